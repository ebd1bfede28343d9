#pragma once

// Spectrum CSV files. The header selects the layout:
//   frequency_hz, s21_real, s21_imag
//   frequency_hz, s21_mag_db, s21_phase_rad
// Other columns are ignored. Rows are strictly ascending in frequency.

#include <charconv>
#include <cmath>
#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eitlab/errors.hpp"
#include "eitlab/spectrum.hpp"
#include "eitlab/units.hpp"
#include "eitlab/workbench/io.hpp"

namespace eitlab::workbench {

inline constexpr std::size_t kMinSpectrumRows = 16;

enum class SpectrumLayout { real_imag, mag_db_phase };

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  while (true) {
    const auto c = line.find(',', b);
    auto cell = line.substr(b, c == std::string_view::npos ? std::string_view::npos : c - b);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
      cell.remove_suffix(1);
    out.push_back(cell);
    if (c == std::string_view::npos) break;
    b = c + 1;
  }
  return out;
}

inline std::optional<std::size_t> column(const std::vector<std::string_view>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

}  // namespace detail

// Parses CSV text into a spectrum with unwrapped phase. `source` names the
// file in diagnostics; line numbers count the header as line 1.
inline ComplexSpectrum parse_spectrum_csv(std::string_view text, const std::string& source = "<csv>") {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto nl = text.find('\n', pos);
    lines.push_back(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
  }
  if (lines.empty()) throw FormatError(source + ": empty file");

  const auto header = detail::split_csv_line(lines[0]);
  const auto f_col = detail::column(header, "frequency_hz");
  const auto re_col = detail::column(header, "s21_real");
  const auto im_col = detail::column(header, "s21_imag");
  const auto db_col = detail::column(header, "s21_mag_db");
  const auto ph_col = detail::column(header, "s21_phase_rad");
  const bool ri = re_col && im_col;
  const bool mp = db_col && ph_col;
  if (!f_col || ri == mp)
    throw FormatError(source + ": header must contain frequency_hz and either (s21_real, s21_imag) or "
                      "(s21_mag_db, s21_phase_rad)");
  const std::size_t a = ri ? *re_col : *db_col;
  const std::size_t b = ri ? *im_col : *ph_col;

  std::vector<SpectrumPoint> pts;
  std::vector<double> raw_phase;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string where = source + ":" + std::to_string(li + 1);
    if (lines[li].find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const auto cells = detail::split_csv_line(lines[li]);
    if (cells.size() != header.size())
      throw FormatError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                        std::to_string(cells.size()));
    auto num = [&](std::size_t col) {
      double v = 0.0;
      const auto cell = cells[col];
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw FormatError(where + ": column '" + std::string(header[col]) + "' is not a finite number");
      return v;
    };
    const double f_hz = num(*f_col);
    const double va = num(a), vb = num(b);
    if (!pts.empty()) {
      const double prev = units::rad_to_hz(pts.back().omega_p);
      if (f_hz == prev) throw FormatError(where + ": duplicate frequency " + format_double(f_hz) + " Hz");
      if (f_hz < prev) throw FormatError(where + ": frequency decreases (" + format_double(f_hz) + " Hz)");
    }
    SpectrumPoint p;
    p.omega_p = units::hz_to_rad(f_hz);
    if (ri) {
      p.s21 = {va, vb};
      if (std::abs(p.s21) == 0.0) throw FormatError(where + ": zero transmission");
      raw_phase.push_back(std::arg(p.s21));
    } else {
      p.s21 = std::polar(std::pow(10.0, va / 20.0), vb);
      raw_phase.push_back(vb);
    }
    pts.push_back(p);
  }
  if (pts.size() < kMinSpectrumRows)
    throw FormatError(source + ": need at least " + std::to_string(kMinSpectrumRows) + " data rows, found " +
                      std::to_string(pts.size()));
  const auto phase = unwrap_phase(raw_phase);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].phase = phase[i];
  return ComplexSpectrum(std::move(pts));
}

inline ComplexSpectrum read_spectrum_csv(const std::filesystem::path& path) {
  return parse_spectrum_csv(read_file(path), path.string());
}

// Real/imaginary layout plus the simulated coherence when present.
inline std::string spectrum_csv(const ComplexSpectrum& s, bool with_coherence = false) {
  CsvTable t;
  t.header = {"frequency_hz", "s21_real", "s21_imag"};
  if (with_coherence) {
    t.header.push_back("rho31_real");
    t.header.push_back("rho31_imag");
  }
  for (const auto& p : s.points()) {
    std::vector<std::string> row = {format_double(units::rad_to_hz(p.omega_p)), format_double(p.s21.real()),
                                    format_double(p.s21.imag())};
    if (with_coherence) {
      row.push_back(format_double(p.rho_31.real()));
      row.push_back(format_double(p.rho_31.imag()));
    }
    t.rows.push_back(std::move(row));
  }
  return t.str();
}

inline void write_spectrum_csv(const std::filesystem::path& path, const ComplexSpectrum& s,
                               bool with_coherence = false) {
  write_file_atomic(path, spectrum_csv(s, with_coherence));
}

}  // namespace eitlab::workbench
