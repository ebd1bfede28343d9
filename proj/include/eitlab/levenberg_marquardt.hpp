#pragma once

// Levenberg-Marquardt for small dense least-squares problems.
//
// The damped subproblem min |J~ d + r|^2 + lambda |d|^2 is solved by QR,
// where J~ is J with columns scaled by running maxima of their norms
// (Marquardt/MINPACK scaling), so the iteration is invariant to parameter
// units. A Jacobian column that is identically zero leaves its parameter
// fixed, which is how callers freeze parameters.
//
// A Problem provides
//   Eigen::Index residual_count() const;
//   void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const;

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace eitlab::lm {

struct Options {
  int max_iterations = 500;
  double rss_rtol = 1e-10;      // converged when an accepted step improves RSS by less
  double gradient_tol = 1e-8;   // scaled gradient: max |J~^T r| / |r|
  double step_tol = 1e-14;      // relative scaled step
  double initial_lambda = 1e-3;
  double max_lambda = 1e16;
};

enum class Stop { rss_change, gradient, step, zero_residual, max_iterations, stalled };

inline std::string to_string(Stop s) {
  switch (s) {
    case Stop::rss_change: return "relative RSS change below tolerance";
    case Stop::gradient: return "scaled gradient below tolerance";
    case Stop::step: return "step below tolerance";
    case Stop::zero_residual: return "zero residual";
    case Stop::max_iterations: return "iteration limit reached";
    case Stop::stalled: return "damping limit reached";
  }
  return "unknown";
}

struct Result {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;  // at x
  double rss = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  Stop stop = Stop::max_iterations;

  bool converged() const noexcept {
    return stop != Stop::max_iterations && stop != Stop::stalled;
  }
};

template <class Problem>
Result solve(const Problem& problem, Eigen::VectorXd x, const Options& opt = {}) {
  const Eigen::Index m = problem.residual_count();
  const Eigen::Index n = x.size();

  Result res;
  Eigen::VectorXd r(m), r_trial(m);
  Eigen::MatrixXd jac(m, n);
  problem.evaluate(x, r, &jac);
  double rss = r.squaredNorm();

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  double lambda = opt.initial_lambda;
  Eigen::MatrixXd aug(2 * n, n);
  Eigen::VectorXd rhs(2 * n);

  auto finish = [&](Stop why, int iter) {
    res.x = x;
    res.residual = r;
    res.jacobian = jac;
    res.rss = rss;
    res.iterations = iter;
    res.stop = why;
    return res;
  };

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    if (rss == 0.0) return finish(Stop::zero_residual, iter);

    for (Eigen::Index j = 0; j < n; ++j) {
      const double cn = jac.col(j).norm();
      diag(j) = std::max(diag(j), cn > 0.0 ? cn : 1.0);
    }
    const Eigen::MatrixXd js = jac * diag.cwiseInverse().asDiagonal();
    const Eigen::VectorXd grad = js.transpose() * r;
    res.gradient_norm = grad.cwiseAbs().maxCoeff() / std::sqrt(rss);
    if (res.gradient_norm < opt.gradient_tol) return finish(Stop::gradient, iter);

    // |J~ d + r|^2 = |R d + Q^T r|^2 + const, so each damped trial only needs
    // a QR of the small stacked matrix [R; sqrt(lambda) I].
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(js);
    const Eigen::MatrixXd rfac = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    const Eigen::VectorXd qtr = (qr.householderQ().transpose() * r).head(n);

    const double xnorm = (diag.asDiagonal() * x).norm();
    bool accepted = false;
    while (!accepted) {
      aug.topRows(n) = rfac;
      aug.bottomRows(n) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(n, n);
      rhs.head(n) = -qtr;
      rhs.tail(n).setZero();
      const Eigen::VectorXd step_scaled = aug.householderQr().solve(rhs);
      const Eigen::VectorXd step = diag.cwiseInverse().asDiagonal() * step_scaled;
      const Eigen::VectorXd x_trial = x + step;

      problem.evaluate(x_trial, r_trial, nullptr);
      const double rss_trial = r_trial.squaredNorm();
      const bool small_step = step_scaled.norm() <= opt.step_tol * (xnorm + opt.step_tol);

      if (std::isfinite(rss_trial) && rss_trial < rss) {
        const double rel = (rss - rss_trial) / rss;
        x = x_trial;
        r = r_trial;
        rss = rss_trial;
        problem.evaluate(x, r, &jac);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (rel < opt.rss_rtol) return finish(Stop::rss_change, iter + 1);
        if (small_step) return finish(Stop::step, iter + 1);
      } else {
        if (small_step) return finish(Stop::step, iter + 1);
        lambda *= 10.0;
        if (lambda > opt.max_lambda) return finish(Stop::stalled, iter + 1);
      }
    }
  }
  return finish(Stop::max_iterations, opt.max_iterations);
}

}  // namespace eitlab::lm
