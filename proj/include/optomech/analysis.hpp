#pragma once

// Estimation from measured (or synthesized) displacement spectra:
// absolute calibration, Lorentzian fitting, equipartition thermometry,
// and the comparison with the quantum limits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "constants.hpp"
#include "levenberg_marquardt.hpp"
#include "physics.hpp"
#include "spectra.hpp"
#include "spectrum.hpp"

namespace optomech {

// ---------------------------------------------------------------------------
// Calibration

// Mean of up to `half_width` bins on each side of bin i, excluding i.
inline double local_background(const std::vector<double>& psd, std::size_t i, std::size_t half_width = 4) {
  double sum = 0.0;
  std::size_t count = 0;
  const std::size_t lo = i >= half_width ? i - half_width : 0;
  const std::size_t hi = std::min(psd.size() - 1, i + half_width);
  for (std::size_t j = lo; j <= hi; ++j) {
    if (j == i) continue;
    sum += psd[j];
    ++count;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

/// Factor that turns `spec` into m^2/Hz: the calibration bin's excess over
/// its neighbours, times the bin width, must equal displacement_equiv^2.
inline double calibration_factor(const Spectrum& spec, const CalibrationPeak& cal) {
  cal.validate();
  const std::size_t i = bin_index(spec.freq_hz(), cal.freq_hz);
  const double excess = spec.psd()[i] - local_background(spec.psd(), i);
  if (!(excess > 0.0))
    throw CalibrationError("calibration bin at " + std::to_string(cal.freq_hz) +
                           " Hz does not rise above the local background");
  return cal.displacement_equiv * cal.displacement_equiv / (excess * cal.bin_width_hz);
}

inline Spectrum calibrate(const Spectrum& raw, const CalibrationPeak& cal) {
  const double factor = calibration_factor(raw, cal);
  nlohmann::json meta = raw.metadata();
  meta["calibration_factor"] = factor;
  return raw.scaled(factor, SpectrumUnit::displacement, true).with_metadata(std::move(meta));
}

// ---------------------------------------------------------------------------
// Lorentzian fit

struct LorentzianFit {
  double omega_m = 0.0;     // rad/s
  double gamma = 0.0;       // rad/s, full width
  double peak_psd = 0.0;    // above background, at omega_m
  double background = 0.0;  // flat floor, same unit as the spectrum
  double residual_norm = 0.0;  // ||residual|| / ||data||
  bool converged = false;
  int iterations = 0;
};

// Unit-height oscillator response: 1 at omega_m, same shape as thermal_psd.
inline double lorentzian_shape(double omega, double omega_m, double gamma) {
  const double detune = (omega_m - omega) * (omega_m + omega);
  return gamma * gamma * omega_m * omega_m / (detune * detune + gamma * gamma * omega * omega);
}

struct FrequencyWindow {
  double f_lo_hz;
  double f_hi_hz;
};

enum class FitWeighting { uniform, relative };

struct FitOptions {
  FitWeighting weighting = FitWeighting::uniform;
  std::vector<double> exclude_hz;  // single bins to drop, e.g. the calibration tone
  LmOptions lm{};
};

/// Least-squares fit of background + peak * lorentzian_shape inside
/// `window`. Starts from the highest bin, the half-maximum width and the
/// window minimum. Never throws on non-convergence; check `converged`.
inline LorentzianFit fit_lorentzian(const Spectrum& spec, const FrequencyWindow& window,
                                    const FitOptions& options = {}) {
  std::vector<std::size_t> excluded;
  for (double f : options.exclude_hz) {
    try {
      excluded.push_back(bin_index(spec.freq_hz(), f));
    } catch (const InputError&) {
      // off-grid frequencies exclude nothing
    }
  }

  std::vector<double> x, y;  // angular frequency normalized by the window center, scaled psd
  const double center = hz_to_rad(0.5 * (window.f_lo_hz + window.f_hi_hz));
  if (!(center > 0.0)) throw InputError("fit: window must lie at positive frequency");
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double f = spec.freq_hz()[i];
    if (f < window.f_lo_hz || f > window.f_hi_hz) continue;
    if (std::find(excluded.begin(), excluded.end(), i) != excluded.end()) continue;
    x.push_back(hz_to_rad(f) / center);
    y.push_back(spec.psd()[i]);
  }
  if (x.size() < 8) throw DegenerateInputError("fit: window holds fewer than 8 bins");

  const auto [min_it, max_it] = std::minmax_element(y.begin(), y.end());
  const double y_min = *min_it, y_max = *max_it;
  if (!(y_max > y_min) || (y_max - y_min) <= 1e-12 * y_max)
    throw DegenerateInputError("fit: flat window, nothing to fit");
  const double y_scale = y_max;
  for (double& v : y) v /= y_scale;

  // Initial guess.
  const auto peak = static_cast<std::size_t>(max_it - y.begin());
  const double floor0 = y_min / y_scale;
  const double height0 = 1.0 - floor0;
  const double half = floor0 + 0.5 * height0;
  std::size_t left = peak, right = peak;
  while (left > 0 && y[left] > half) --left;
  while (right + 1 < y.size() && y[right] > half) ++right;
  double width0 = x[right] - x[left];
  if (!(width0 > 0.0)) width0 = 0.25 * (x.back() - x.front());

  using Vec4 = Eigen::Matrix<double, 4, 1>;
  const Eigen::Index m = static_cast<Eigen::Index>(x.size());
  std::vector<double> weight(x.size(), 1.0);

  auto model_at = [&](const Vec4& p, std::size_t i) {
    return p[3] + p[2] * lorentzian_shape(x[i], p[0], p[1]);
  };
  auto eval = [&](const Vec4& p, Eigen::VectorXd& r, Eigen::Matrix<double, Eigen::Dynamic, 4>& J) {
    const double w0 = p[0], g = p[1], a = p[2], b = p[3];
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double w = x[k];
      const double detune = (w0 - w) * (w0 + w);
      const double d = detune * detune + g * g * w * w;
      const double shape = g * g * w0 * w0 / d;
      const double d_w0 = 2.0 * g * g * w0 / d - 4.0 * g * g * w0 * w0 * w0 * detune / (d * d);
      const double d_g = 2.0 * g * w0 * w0 / d - 2.0 * g * g * g * w0 * w0 * w * w / (d * d);
      r[i] = weight[k] * (y[k] - (b + a * shape));
      J(i, 0) = -weight[k] * a * d_w0;
      J(i, 1) = -weight[k] * a * d_g;
      J(i, 2) = -weight[k] * shape;
      J(i, 3) = -weight[k];
    }
  };
  auto project = [](Vec4 p) {
    p[1] = std::abs(p[1]);
    p[2] = std::max(p[2], 0.0);
    p[3] = std::max(p[3], 0.0);
    return p;
  };

  // Relative weighting: iteratively reweighted least squares with
  // 1/model weights frozen during each solve, the usual choice for
  // periodogram (multiplicative) noise.
  const int passes = options.weighting == FitWeighting::relative ? 4 : 1;
  Vec4 params(x[peak], width0, height0, floor0);
  LmResult<4> result{params, 0.0, 0, false};
  int iterations = 0;
  for (int pass = 0; pass < passes; ++pass) {
    if (pass > 0) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double mi = model_at(result.params, i);
        weight[i] = mi > 0.0 ? 1.0 / mi : 1.0;
      }
    }
    result = levenberg_marquardt<4>(eval, project, params, m, options.lm);
    iterations += result.iterations;
    params = result.params;
  }

  double data_norm = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) data_norm += weight[i] * weight[i] * y[i] * y[i];

  LorentzianFit fit;
  fit.omega_m = result.params[0] * center;
  fit.gamma = result.params[1] * center;
  fit.peak_psd = result.params[2] * y_scale;
  fit.background = result.params[3] * y_scale;
  fit.residual_norm = std::sqrt(result.cost / data_norm);
  fit.converged = result.converged && fit.gamma > 0.0;
  fit.iterations = iterations;
  return fit;
}

// ---------------------------------------------------------------------------
// Thermometry and quantum-limit comparisons

// Area under the fitted peak above background: peak * Gamma / 4.
inline double mean_square_displacement(const LorentzianFit& fit) {
  return 0.25 * fit.peak_psd * fit.gamma;
}

/// Mode temperature from equipartition, m_eff Omega_m^2 <x^2> = k_B T.
inline double noise_thermometry(const Spectrum& spec, const LorentzianFit& fit, double m_eff) {
  if (!spec.calibrated() || spec.unit() != SpectrumUnit::displacement)
    throw CalibrationError("noise_thermometry: spectrum is not calibrated to m^2/Hz");
  if (!fit.converged) throw InputError("noise_thermometry: fit did not converge");
  detail::require(m_eff > 0.0, "noise_thermometry: m_eff must be positive");
  return m_eff * fit.omega_m * fit.omega_m * mean_square_displacement(fit) / PhysicalConstants::k_B;
}

inline double sql_ratio(double background, const MechanicalMode& mode) {
  detail::require(background > 0.0, "sql_ratio: background must be positive");
  return std::sqrt(background / sql_psd(mode));
}

/// |chi_eff(Omega_m)| = 1 / (m_eff Gamma_eff Omega_m), m/N.
inline double effective_susceptibility(const MechanicalMode& mode, double gamma_eff) {
  detail::require(gamma_eff > 0.0, "effective_susceptibility: gamma_eff must be positive");
  return 1.0 / (mode.m_eff() * gamma_eff * mode.omega_m());
}

struct BackactionAudit {
  double sqrt_sxx;      // m/sqrt(Hz)
  double sqrt_sff_tot;  // N/sqrt(Hz)
  double product;       // J s
  double ratio_to_hbar_over_2;
};

// Imprecision times total force noise, both as amplitude spectral densities.
inline BackactionAudit audit_from_amplitudes(double sqrt_sxx, double sqrt_sff_tot) {
  detail::require(sqrt_sxx > 0.0 && sqrt_sff_tot > 0.0, "audit: inputs must be positive");
  const double product = sqrt_sxx * sqrt_sff_tot;
  return {sqrt_sxx, sqrt_sff_tot, product, product / (0.5 * PhysicalConstants::hbar)};
}

/// Conservative audit: every bit of force noise driving the mode, thermal
/// Langevin force included, is booked as measurement backaction.
inline BackactionAudit backaction_audit(double peak_thermal_psd, double imprecision_background,
                                        const MechanicalMode& mode, double gamma_eff) {
  detail::require(peak_thermal_psd > 0.0 && imprecision_background > 0.0,
                  "audit: spectral densities must be positive");
  const double chi = effective_susceptibility(mode, gamma_eff);
  const double sff_tot = peak_thermal_psd / (chi * chi);
  return audit_from_amplitudes(std::sqrt(imprecision_background), std::sqrt(sff_tot));
}

inline nlohmann::json to_json(const LorentzianFit& fit) {
  return {{"omega_m_hz", rad_to_hz(fit.omega_m)},
          {"gamma_hz", rad_to_hz(fit.gamma)},
          {"peak_psd", fit.peak_psd},
          {"background", fit.background},
          {"residual_norm", fit.residual_norm},
          {"converged", fit.converged},
          {"iterations", fit.iterations}};
}

inline nlohmann::json to_json(const BackactionAudit& audit) {
  return {{"sqrt_sxx_m_per_rthz", audit.sqrt_sxx},
          {"sqrt_sff_tot_n_per_rthz", audit.sqrt_sff_tot},
          {"product_js", audit.product},
          {"ratio_to_hbar_over_2", audit.ratio_to_hbar_over_2}};
}

}  // namespace optomech
