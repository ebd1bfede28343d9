#pragma once

// Akaike weights for competing least-squares fits of the same data.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "eitlab/errors.hpp"
#include "eitlab/fit.hpp"

namespace eitlab {

struct AicEntry {
  ModelKind kind = ModelKind::eit;
  double aic = 0.0;
  double delta = 0.0;
  double weight = 0.0;
};

struct AicReport {
  std::vector<AicEntry> entries;
  bool small_sample_correction = false;

  const AicEntry& entry(ModelKind k) const {
    for (const auto& e : entries)
      if (e.kind == k) return e;
    throw InvalidArgument("AIC report has no entry for model " + std::string(to_string(k)));
  }
  double weight(ModelKind k) const { return entry(k).weight; }
};

// Gaussian least-squares AIC: n ln(RSS/n) + 2k, optionally with the
// small-sample term 2k(k+1)/(n-k-1).
inline double aic_value(double rss, int n, int k, bool small_sample = false) {
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  double aic = nn * std::log(rss / nn) + 2.0 * kk;
  if (small_sample) aic += 2.0 * kk * (kk + 1.0) / (nn - kk - 1.0);
  return aic;
}

inline std::vector<double> akaike_weights(std::span<const double> aic) {
  const double best = *std::min_element(aic.begin(), aic.end());
  std::vector<double> w(aic.size());
  double total = 0.0;
  for (std::size_t i = 0; i < aic.size(); ++i) {
    w[i] = std::exp(-0.5 * (aic[i] - best));
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return w;
}

inline AicReport aic_weights(std::span<const FitResult> results, bool small_sample = false) {
  if (results.empty()) throw InvalidArgument("aic_weights: no fit results");
  for (const auto& r : results) {
    if (r.n != results.front().n || !(r.weights == results.front().weights))
      throw MismatchedData("aic_weights: fits use different residual vectors (n = " +
                           std::to_string(results.front().n) + " vs " + std::to_string(r.n) + ")");
    if (!(r.n > r.k)) throw InvalidArgument("aic_weights: need n > k");
  }

  AicReport report;
  report.small_sample_correction = small_sample;
  std::vector<double> aic;
  for (const auto& r : results) {
    // An exact fit has RSS = 0; clamp so the log stays finite.
    const double rss = std::max(r.rss, std::numeric_limits<double>::min());
    aic.push_back(aic_value(rss, r.n, r.k, small_sample));
  }
  const auto w = akaike_weights(aic);
  const double best = *std::min_element(aic.begin(), aic.end());
  for (std::size_t i = 0; i < results.size(); ++i)
    report.entries.push_back({results[i].kind, aic[i], aic[i] - best, w[i]});
  return report;
}

}  // namespace eitlab
