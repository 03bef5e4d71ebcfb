#pragma once

// A complete experimental configuration in user-facing units (Hz, W, K),
// plus the read-only presets for the three samples.

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "cooling.hpp"
#include "physics.hpp"
#include "spectra.hpp"
#include "spectrum.hpp"

namespace optomech {

struct Scene {
  struct Cavity {
    double wavelength_m = 780e-9;
    double kappa_hz = 19e6;
    double kappa_intrinsic_hz = 5.5e6;
    double radius_m = 27.5e-6;
    double finesse = 0.0;  // 0: derive from the free spectral range
    double refractive_index = 1.44;
    friend bool operator==(const Cavity&, const Cavity&) = default;
  };
  struct Mode {
    double omega_m_hz = 65.2e6;
    double gamma_m_hz = 65.2e6 / 2000.0;
    double m_eff_kg = 10e-12;
    friend bool operator==(const Mode&, const Mode&) = default;
  };
  struct Drive {
    double power_in_w = 0.2e-3;
    double detuning_hz = -65.2e6;
    friend bool operator==(const Drive&, const Drive&) = default;
  };
  struct Bath {
    double t_cryostat_k = 1.65;
    double heating_k_per_w = 10.0;
    friend bool operator==(const Bath&, const Bath&) = default;
  };
  struct Measurement {
    double imprecision_penalty = 1.0;
    unsigned averaging_count = 50;
    friend bool operator==(const Measurement&, const Measurement&) = default;
  };
  struct Cooling {
    double scale = 1.0;
    friend bool operator==(const Cooling&, const Cooling&) = default;
  };

  std::string name = "custom";
  Cavity cavity;
  Mode mode;
  Drive drive;
  Bath environment;
  Measurement measurement;
  CalibrationPeak calibration{65.2e6 + 5.0 * 32.6e3, 1e-15, 100.0};
  Cooling cooling;

  friend bool operator==(const Scene&, const Scene&) = default;

  OpticalCavity make_cavity() const {
    return {cavity.wavelength_m, hz_to_rad(cavity.kappa_hz), hz_to_rad(cavity.kappa_intrinsic_hz),
            cavity.radius_m, cavity.finesse, cavity.refractive_index};
  }
  MechanicalMode make_mode() const {
    return {hz_to_rad(mode.omega_m_hz), hz_to_rad(mode.gamma_m_hz), mode.m_eff_kg};
  }
  LaserDrive make_drive() const {
    return {drive.power_in_w, hz_to_rad(drive.detuning_hz), cavity.wavelength_m};
  }
  Environment make_environment() const {
    return {environment.t_cryostat_k, environment.heating_k_per_w};
  }
  CoolingScene cooling_scene() const {
    return {make_cavity(), make_mode(), make_drive(), make_environment(), cooling.scale};
  }

  SynthesisScene synthesis(double t_mode, double gamma_eff) const {
    return {make_mode(), make_cavity(), make_drive(), t_mode, gamma_eff, calibration,
            measurement.imprecision_penalty, measurement.averaging_count};
  }

  // Throws InputError naming the first broken invariant.
  void validate() const {
    (void)cooling_scene();
    calibration.validate();
    detail::require(measurement.imprecision_penalty >= 1.0, "measurement: imprecision_penalty must be >= 1");
    detail::require(cooling.scale > 0.0, "cooling: scale must be positive");
  }
};

// Measured readout background the detection penalty is tuned to reproduce.
inline constexpr double kMeasuredBackgroundAmplitude = 1.5e-18;  // m/sqrt(Hz)

namespace detail {

inline double penalty_for_background(const Scene& s, double amplitude) {
  const double ideal = imprecision_psd(s.make_drive(), s.make_cavity(), s.make_mode().omega_m());
  return std::max(1.0, amplitude * amplitude / ideal);
}

// Tone 100x above the uncooled thermal peak at the bath temperature, parked
// five linewidths above resonance.
inline CalibrationPeak default_calibration(const Scene& s) {
  const MechanicalMode mode = s.make_mode();
  const double peak = thermal_psd(mode, s.environment.t_cryostat_k, mode.omega_m());
  constexpr double bin = 100.0;
  return {s.mode.omega_m_hz + 5.0 * s.mode.gamma_m_hz, std::sqrt(100.0 * peak * bin), bin};
}

inline Scene make_sample65() {
  Scene s;
  s.name = "sample65";
  s.cavity = {780e-9, 19e6, 5.5e6, 27.5e-6, 70000.0, 1.44};
  s.mode = {65.2e6, 65.2e6 / 2000.0, 10e-12};
  s.drive = {0.2e-3, -65.2e6};
  s.environment = {1.65, 10.0};
  s.measurement.imprecision_penalty = penalty_for_background(s, kMeasuredBackgroundAmplitude);
  s.calibration = default_calibration(s);
  // 0.2 mW on the red sideband gives a total damping of 2 pi x 370 kHz.
  s.cooling.scale = calibrate_cooling_scale(s.cooling_scene(), 0.2e-3, hz_to_rad(370e3));
  return s;
}

inline Scene make_sample62() {
  const Scene ref = make_sample65();
  Scene s = ref;
  s.name = "sample62";
  s.mode = {62e6, 62e6 / 2000.0, 10e-12};
  // Thermometry probe: < 2 uW, on resonance.
  s.drive = {2e-6, 0.0};
  s.measurement.imprecision_penalty = penalty_for_background(s, kMeasuredBackgroundAmplitude);
  s.calibration = default_calibration(s);
  return s;
}

inline Scene make_sample122() {
  const Scene ref = make_sample65();
  Scene s;
  s.name = "sample122";
  s.cavity = {780e-9, 155e6, 20e6, 15e-6, 0.0, 1.44};
  s.mode = {121.7e6, 121.7e6 / 2000.0, 5e-12};
  s.drive = {1e-3, -121.7e6};
  s.environment = {1.65, 10.0};
  s.measurement.imprecision_penalty = penalty_for_background(s, kMeasuredBackgroundAmplitude);
  s.calibration = default_calibration(s);
  // No linewidth anchor for this sample; it inherits the sample65 factor.
  s.cooling.scale = ref.cooling.scale;
  return s;
}

}  // namespace detail

inline constexpr std::array<std::string_view, 3> kPresetNames{"sample62", "sample65", "sample122"};

inline std::optional<Scene> preset(std::string_view name) {
  if (name == "sample62") return detail::make_sample62();
  if (name == "sample65") return detail::make_sample65();
  if (name == "sample122") return detail::make_sample122();
  return std::nullopt;
}

}  // namespace optomech
