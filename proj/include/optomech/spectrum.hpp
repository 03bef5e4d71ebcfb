#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace optomech {

enum class SpectrumUnit { displacement, force, raw };

inline std::string_view to_string(SpectrumUnit unit) {
  switch (unit) {
    case SpectrumUnit::displacement:
      return "m^2/Hz";
    case SpectrumUnit::force:
      return "N^2/Hz";
    case SpectrumUnit::raw:
      return "raw";
  }
  return "raw";
}

inline SpectrumUnit parse_spectrum_unit(std::string_view text) {
  if (text == "m^2/Hz") return SpectrumUnit::displacement;
  if (text == "N^2/Hz") return SpectrumUnit::force;
  if (text == "raw") return SpectrumUnit::raw;
  throw InputError("unknown spectrum unit '" + std::string(text) + "'");
}

/// One-sided power spectral density sampled on a strictly increasing
/// frequency grid (Hz). Values are per Hz of positive frequency.
class Spectrum {
 public:
  Spectrum(std::vector<double> freq_hz, std::vector<double> psd, SpectrumUnit unit,
           bool calibrated, nlohmann::json metadata = nlohmann::json::object())
      : freq_hz_(std::move(freq_hz)),
        psd_(std::move(psd)),
        unit_(unit),
        calibrated_(calibrated),
        metadata_(std::move(metadata)) {
    if (freq_hz_.empty()) throw InputError("spectrum: empty grid");
    if (freq_hz_.size() != psd_.size()) throw InputError("spectrum: grid and values differ in length");
    for (std::size_t i = 1; i < freq_hz_.size(); ++i)
      if (!(freq_hz_[i] > freq_hz_[i - 1])) throw InputError("spectrum: grid not strictly increasing");
    for (double v : psd_)
      if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("spectrum: psd must be finite and >= 0");
    if (unit_ == SpectrumUnit::raw && calibrated_) throw InputError("spectrum: raw unit cannot be calibrated");
  }

  const std::vector<double>& freq_hz() const noexcept { return freq_hz_; }
  const std::vector<double>& psd() const noexcept { return psd_; }
  SpectrumUnit unit() const noexcept { return unit_; }
  bool calibrated() const noexcept { return calibrated_; }
  const nlohmann::json& metadata() const noexcept { return metadata_; }
  std::size_t size() const noexcept { return psd_.size(); }

  Spectrum scaled(double factor, SpectrumUnit unit, bool calibrated) const {
    std::vector<double> out(psd_);
    for (double& v : out) v *= factor;
    return {freq_hz_, std::move(out), unit, calibrated, metadata_};
  }

  Spectrum with_metadata(nlohmann::json metadata) const {
    return {freq_hz_, psd_, unit_, calibrated_, std::move(metadata)};
  }

  // Drops units: what an uncalibrated analyzer trace looks like.
  Spectrum as_raw(double gain) const { return scaled(gain, SpectrumUnit::raw, false); }

  friend bool operator==(const Spectrum&, const Spectrum&) = default;

 private:
  std::vector<double> freq_hz_;
  std::vector<double> psd_;
  SpectrumUnit unit_;
  bool calibrated_;
  nlohmann::json metadata_;
};

/// Phase-modulation reference tone of known displacement equivalence,
/// confined to a single bin of width `bin_width_hz`.
struct CalibrationPeak {
  double freq_hz = 0.0;
  double displacement_equiv = 0.0;  // rms displacement, m
  double bin_width_hz = 1.0;

  void validate() const {
    detail::require(freq_hz > 0.0, "calibration: frequency must be positive");
    detail::require(displacement_equiv > 0.0, "calibration: displacement_equiv must be positive");
    detail::require(bin_width_hz > 0.0, "calibration: bin width must be positive");
  }

  double psd_value() const { return displacement_equiv * displacement_equiv / bin_width_hz; }

  friend bool operator==(const CalibrationPeak&, const CalibrationPeak&) = default;
};

inline std::vector<double> linear_grid(double f_lo, double f_hi, std::size_t n) {
  detail::require(n >= 2, "grid: need at least two points");
  detail::require(f_hi > f_lo, "grid: upper edge must exceed lower edge");
  std::vector<double> grid(n);
  const double step = (f_hi - f_lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = f_lo + step * static_cast<double>(i);
  grid.back() = f_hi;
  return grid;
}

inline void require_increasing(const std::vector<double>& grid) {
  if (grid.empty()) throw InputError("grid: empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InputError("grid: frequencies must be strictly increasing");
}

/// Index of the bin containing `f_hz`: nearest grid point, provided it lies
/// within half the local spacing. Throws InputError otherwise.
inline std::size_t bin_index(const std::vector<double>& grid, double f_hz) {
  require_increasing(grid);
  auto it = std::lower_bound(grid.begin(), grid.end(), f_hz);
  std::size_t i = static_cast<std::size_t>(it - grid.begin());
  if (i == grid.size()) i = grid.size() - 1;
  if (i > 0 && std::abs(grid[i - 1] - f_hz) <= std::abs(grid[i] - f_hz)) --i;
  double spacing;
  if (grid.size() == 1) {
    spacing = 0.0;
  } else if (i == 0) {
    spacing = grid[1] - grid[0];
  } else if (i + 1 == grid.size()) {
    spacing = grid[i] - grid[i - 1];
  } else {
    spacing = std::max(grid[i] - grid[i - 1], grid[i + 1] - grid[i]);
  }
  if (std::abs(grid[i] - f_hz) > 0.5 * spacing)
    throw InputError("frequency " + std::to_string(f_hz) + " Hz lies outside the grid");
  return i;
}

}  // namespace optomech
