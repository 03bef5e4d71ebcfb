#pragma once

// Closed-form one-sided noise spectral densities of the optomechanical
// readout, and direct frequency-domain synthesis of measured spectra.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "constants.hpp"
#include "physics.hpp"
#include "rng.hpp"
#include "spectrum.hpp"

namespace optomech {

/// Shot-noise imprecision of a phase readout, m^2/Hz, at analysis
/// frequency `omega`. Ideal case: strongly overcoupled cavity, unit
/// detection efficiency, quantum-limited laser. Even in detuning.
inline double imprecision_psd(const LaserDrive& drive, const OpticalCavity& cavity, double omega) {
  if (!(drive.power_in > 0.0)) throw DomainError("imprecision_psd: diverges at zero input power");
  const double g0 = optomechanical_coupling(cavity);
  const double half = 0.5 * cavity.kappa();
  const double d2 = drive.detuning * drive.detuning;
  const double h2 = half * half;
  const double w2 = omega * omega;
  const double buildup = (d2 + h2) / half;
  const double filter =
      1.0 + w2 * (w2 + h2 - 2.0 * d2) / ((d2 + h2) * (d2 + h2) + w2 * h2);
  return PhysicalConstants::hbar * cavity.omega() / (16.0 * g0 * g0 * drive.power_in) * buildup *
         buildup * filter;
}

// Deeply resolved sideband value at |detuning| = Omega = omega_m:
// hbar omega Omega_m^2 / (4 g0^2 P). Independent of finesse.
inline double imprecision_rsb_limit(const LaserDrive& drive, const OpticalCavity& cavity,
                                    const MechanicalMode& mode) {
  if (!(drive.power_in > 0.0)) throw DomainError("imprecision_rsb_limit: zero input power");
  const double g0 = optomechanical_coupling(cavity);
  const double wm = mode.omega_m();
  return PhysicalConstants::hbar * cavity.omega() * wm * wm / (4.0 * g0 * g0 * drive.power_in);
}

/// Standard quantum limit of displacement sensing on resonance, m^2/Hz.
inline double sql_psd(const MechanicalMode& mode) {
  return PhysicalConstants::hbar / (mode.m_eff() * mode.gamma_m() * mode.omega_m());
}

/// Brownian displacement spectrum, normalized so that the integral over
/// positive frequencies (in Hz) equals k_B T / (m_eff Omega_m^2).
inline double thermal_psd(const MechanicalMode& mode, double temperature, double omega) {
  detail::require(temperature >= 0.0, "thermal_psd: temperature must be non-negative");
  const double wm = mode.omega_m();
  const double g = mode.gamma_m();
  const double detune = (wm - omega) * (wm + omega);
  return 4.0 * PhysicalConstants::k_B * temperature * g / mode.m_eff() /
         (detune * detune + g * g * omega * omega);
}

/// Quantum backaction force noise, N^2/Hz, for a coherent input.
/// The two sideband Lorentzians are evaluated at the analysis frequency
/// `omega`; at omega = Omega_m this is the familiar resonant expression.
inline double qba_force_psd(const LaserDrive& drive, const OpticalCavity& cavity, double omega) {
  const double g0 = optomechanical_coupling(cavity);
  const double k = cavity.kappa();
  const double h2 = 0.25 * k * k;
  const double d = drive.detuning;
  const double lower = 1.0 / (h2 + (d - omega) * (d - omega));
  const double upper = 1.0 / (h2 + (d + omega) * (d + omega));
  return PhysicalConstants::hbar / (2.0 * cavity.omega()) * g0 * g0 * drive.power_in *
         (k * k / (h2 + d * d)) * (lower + upper);
}

inline double qba_force_psd_at_resonance(const LaserDrive& drive, const OpticalCavity& cavity,
                                         const MechanicalMode& mode) {
  return qba_force_psd(drive, cavity, mode.omega_m());
}

// 2 g0^2 P hbar / (omega Omega_m^2) for |detuning| = Omega_m >> kappa.
inline double qba_rsb_limit(const LaserDrive& drive, const OpticalCavity& cavity,
                            const MechanicalMode& mode) {
  const double g0 = optomechanical_coupling(cavity);
  const double wm = mode.omega_m();
  return 2.0 * g0 * g0 * drive.power_in * PhysicalConstants::hbar / (cavity.omega() * wm * wm);
}

/// Everything needed to fake an analyzer trace of the mechanical mode.
struct SynthesisScene {
  MechanicalMode mode;
  OpticalCavity cavity;
  LaserDrive drive;
  double t_mode = 0.0;     // K
  double gamma_eff = 0.0;  // rad/s, linewidth of the (possibly cooled) mode
  std::optional<CalibrationPeak> calibration;
  double imprecision_penalty = 1.0;  // >= 1, lumps detection inefficiencies
  unsigned averaging_count = 50;     // periodogram averages; 0 = noiseless
};

// Flat shot-noise floor seen around the mechanical resonance. Zero without
// light on the cavity.
inline double background_psd(const SynthesisScene& scene) {
  if (scene.drive.power_in <= 0.0) return 0.0;
  return scene.imprecision_penalty *
         imprecision_psd(scene.drive, scene.cavity, scene.mode.omega_m());
}

inline nlohmann::json synthesis_metadata(const SynthesisScene& scene, std::uint64_t seed) {
  nlohmann::json meta = {
      {"omega_m_hz", rad_to_hz(scene.mode.omega_m())},
      {"gamma_eff_hz", rad_to_hz(scene.gamma_eff)},
      {"m_eff_kg", scene.mode.m_eff()},
      {"t_mode_k", scene.t_mode},
      {"power_in_w", scene.drive.power_in},
      {"detuning_hz", rad_to_hz(scene.drive.detuning)},
      {"kappa_hz", rad_to_hz(scene.cavity.kappa())},
      {"imprecision_penalty", scene.imprecision_penalty},
      {"background_psd", background_psd(scene)},
      {"averaging_count", scene.averaging_count},
      {"seed", seed},
  };
  if (scene.calibration) {
    meta["calibration"] = {{"freq_hz", scene.calibration->freq_hz},
                           {"displacement_m", scene.calibration->displacement_equiv},
                           {"bin_width_hz", scene.calibration->bin_width_hz}};
  }
  return meta;
}

/// Calibrated displacement spectrum: cooled Lorentzian plus flat
/// imprecision floor, each bin scaled by an independent chi^2(2k)/2k
/// periodogram factor, plus the calibration tone added to its single bin.
/// The tone is coherent, so it carries no periodogram spread. Bin i draws
/// from RNG stream i, which makes the output independent of evaluation
/// order.
inline Spectrum synthesize_spectrum(const SynthesisScene& scene, const std::vector<double>& grid_hz,
                                    std::uint64_t seed) {
  require_increasing(grid_hz);
  detail::require(scene.gamma_eff > 0.0, "synthesize: gamma_eff must be positive");
  detail::require(scene.imprecision_penalty >= 1.0, "synthesize: imprecision penalty must be >= 1");

  const MechanicalMode cooled = scene.mode.with_gamma(scene.gamma_eff);
  const double floor = background_psd(scene);
  const CounterRng rng(seed);

  std::vector<double> psd(grid_hz.size());
  for (std::size_t i = 0; i < grid_hz.size(); ++i) {
    double value = thermal_psd(cooled, scene.t_mode, hz_to_rad(grid_hz[i])) + floor;
    if (scene.averaging_count > 0) value *= rng.averaged_periodogram_factor(i, scene.averaging_count);
    psd[i] = value;
  }
  if (scene.calibration) {
    scene.calibration->validate();
    psd[bin_index(grid_hz, scene.calibration->freq_hz)] += scene.calibration->psd_value();
  }
  return {grid_hz, std::move(psd), SpectrumUnit::displacement, true, synthesis_metadata(scene, seed)};
}

}  // namespace optomech
