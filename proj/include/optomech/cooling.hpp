#pragma once

// Dynamical backaction cooling: optical damping from the sideband
// asymmetry, competition with the (absorption heated) bath, and the
// search for the best operating point.

#include <cmath>
#include <limits>
#include <vector>

#include "golden_section.hpp"
#include "physics.hpp"

namespace optomech {

/// Parameters of one cooling experiment. `cooling_scale` is a single
/// dimensionless calibration of the optical damping against a measured
/// linewidth anchor; the absolute coupling depends on geometry that is
/// not modeled.
struct CoolingScene {
  OpticalCavity cavity;
  MechanicalMode mode;
  LaserDrive drive;
  Environment env;
  double cooling_scale = 1.0;
};

/// Optical damping rate Gamma_cool, rad/s. Positive on the red side
/// (detuning < 0), negative on the blue side, zero at detuning = 0.
inline double cooling_rate(const LaserDrive& drive, const OpticalCavity& cavity,
                           const MechanicalMode& mode, double scale = 1.0) {
  const double g = optomechanical_coupling(cavity) * zero_point_spread(mode);
  const double k = cavity.kappa();
  const double h2 = 0.25 * k * k;
  const double anti_stokes = k / (h2 + (drive.detuning + mode.omega_m()) * (drive.detuning + mode.omega_m()));
  const double stokes = k / (h2 + (drive.detuning - mode.omega_m()) * (drive.detuning - mode.omega_m()));
  return scale * intracavity_photons(drive, cavity) * g * g * (anti_stokes - stokes);
}

inline double cooling_rate(const CoolingScene& scene) {
  return cooling_rate(scene.drive, scene.cavity, scene.mode, scene.cooling_scale);
}

// Sideband-limited minimum occupancy kappa^2 / (16 Omega_m^2).
inline double quantum_backaction_limit(const OpticalCavity& cavity, const MechanicalMode& mode) {
  const double ratio = cavity.kappa() / mode.omega_m();
  return ratio * ratio / 16.0;
}

/// Steady-state occupancy of the laser-cooled mode: the bath occupancy
/// diluted by Gamma_m / (Gamma_m + Gamma_cool), plus the quantum floor.
inline double final_occupancy(const MechanicalMode& mode, const OpticalCavity& cavity,
                              double gamma_cool, double t_bath_eff) {
  detail::require(gamma_cool >= 0.0, "final_occupancy: gamma_cool must be non-negative");
  detail::require(t_bath_eff >= 0.0, "final_occupancy: bath temperature must be non-negative");
  const double dilution = mode.gamma_m() / (mode.gamma_m() + gamma_cool);
  return dilution * occupancy_from_temperature(t_bath_eff, mode) +
         quantum_backaction_limit(cavity, mode);
}

// Absorption heating follows circulating, not launched, power.
inline double effective_bath_temperature(const Environment& env, double p_circ) {
  return env.t_cryostat + env.heating_coeff * p_circ;
}

struct CoolingPoint {
  double power_in;    // W
  double p_circ;      // W
  double gamma_cool;  // rad/s
  double gamma_eff;   // rad/s
  double t_bath_eff;  // K
  double t_mode;      // K
  double n_f;
};

struct CoolingRun {
  std::vector<CoolingPoint> points;
  CoolingScene scene;
};

inline CoolingPoint cooling_point(const CoolingScene& scene, double power_in) {
  const LaserDrive drive = scene.drive.with_power(power_in);
  CoolingPoint p{};
  p.power_in = power_in;
  p.p_circ = circulating_power(drive, scene.cavity);
  p.gamma_cool = cooling_rate(drive, scene.cavity, scene.mode, scene.cooling_scale);
  p.gamma_eff = scene.mode.gamma_m() + p.gamma_cool;
  p.t_bath_eff = effective_bath_temperature(scene.env, p.p_circ);
  p.n_f = final_occupancy(scene.mode, scene.cavity, p.gamma_cool, p.t_bath_eff);
  p.t_mode = temperature_from_occupancy(p.n_f, scene.mode);
  return p;
}

inline CoolingRun simulate_cooling_run(const CoolingScene& scene, const std::vector<double>& powers) {
  detail::require(!powers.empty(), "cooling run: empty power grid");
  CoolingRun run{{}, scene};
  run.points.reserve(powers.size());
  for (std::size_t i = 0; i < powers.size(); ++i) {
    detail::require(powers[i] >= 0.0, "cooling run: powers must be non-negative");
    detail::require(i == 0 || powers[i] > powers[i - 1], "cooling run: powers must increase");
    run.points.push_back(cooling_point(scene, powers[i]));
  }
  return run;
}

/// Scale factor that makes `power_in` produce a total damping rate
/// `gamma_eff_target` (rad/s) in `scene`.
inline double calibrate_cooling_scale(const CoolingScene& scene, double power_in,
                                      double gamma_eff_target) {
  const double bare = cooling_rate(scene.drive.with_power(power_in), scene.cavity, scene.mode, 1.0);
  const double wanted = gamma_eff_target - scene.mode.gamma_m();
  if (!(bare > 0.0)) throw DomainError("calibrate_cooling_scale: no optical damping at this detuning");
  if (!(wanted > 0.0)) throw DomainError("calibrate_cooling_scale: target below intrinsic damping");
  return wanted / bare;
}

/// n_f at an arbitrary (power, detuning). Blue-side points where the
/// total damping turns non-positive are unstable and score +inf.
inline double occupancy_at(const CoolingScene& scene, double power_in, double detuning) {
  const LaserDrive drive(power_in, detuning, scene.drive.wavelength);
  const double gamma_cool = cooling_rate(drive, scene.cavity, scene.mode, scene.cooling_scale);
  const double gamma_eff = scene.mode.gamma_m() + gamma_cool;
  if (!(gamma_eff > 0.0)) return std::numeric_limits<double>::infinity();
  const double t_bath = effective_bath_temperature(scene.env, circulating_power(drive, scene.cavity));
  return scene.mode.gamma_m() / gamma_eff * occupancy_from_temperature(t_bath, scene.mode) +
         quantum_backaction_limit(scene.cavity, scene.mode);
}

struct OperatingBounds {
  double power_max = 0.0;  // W; power ranges over [0, power_max]
  double detuning_min = 0.0;  // rad/s
  double detuning_max = 0.0;
};

struct OperatingPoint {
  double power_in;
  double detuning;
  double n_f;
  int sweeps;
};

struct OptimizerOptions {
  int coarse_points = 64;  // per axis
  double rel_tol = 1e-3;   // stop when a sweep improves n_f by less than this
  int max_sweeps = 50;
};

/// Minimizes occupancy_at over the closed box. A coarse grid scan picks a
/// cell; alternating golden-section line searches on power and detuning
/// then refine inside the neighbouring cells.
inline OperatingPoint optimize_operating_point(const CoolingScene& scene, const OperatingBounds& box,
                                               const OptimizerOptions& opt = {}) {
  if (!(box.power_max >= 0.0)) throw InputError("optimize: power_max must be >= 0");
  if (!(box.detuning_max >= box.detuning_min)) throw InputError("optimize: inverted detuning bounds");
  if (opt.coarse_points < 2) throw InputError("optimize: coarse grid needs >= 2 points per axis");

  const int n = opt.coarse_points;
  auto axis = [n](double lo, double hi, int i) {
    return i == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };

  int best_i = 0, best_j = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = occupancy_at(scene, axis(0.0, box.power_max, i),
                                    axis(box.detuning_min, box.detuning_max, j));
      if (v < best) {
        best = v;
        best_i = i;
        best_j = j;
      }
    }
  }

  const double p_lo = axis(0.0, box.power_max, std::max(best_i - 1, 0));
  const double p_hi = axis(0.0, box.power_max, std::min(best_i + 1, n - 1));
  const double d_lo = axis(box.detuning_min, box.detuning_max, std::max(best_j - 1, 0));
  const double d_hi = axis(box.detuning_min, box.detuning_max, std::min(best_j + 1, n - 1));

  OperatingPoint point{axis(0.0, box.power_max, best_i), axis(box.detuning_min, box.detuning_max, best_j),
                       best, 0};
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    const double before = point.n_f;
    auto along_power = golden_section_minimize(
        [&](double p) { return occupancy_at(scene, p, point.detuning); }, p_lo, p_hi);
    if (along_power.value <= point.n_f) {
      point.power_in = along_power.x;
      point.n_f = along_power.value;
    }
    auto along_detuning = golden_section_minimize(
        [&](double d) { return occupancy_at(scene, point.power_in, d); }, d_lo, d_hi);
    if (along_detuning.value <= point.n_f) {
      point.detuning = along_detuning.x;
      point.n_f = along_detuning.value;
    }
    point.sweeps = sweep + 1;
    if (before - point.n_f < opt.rel_tol * std::abs(point.n_f)) break;
  }
  return point;
}

}  // namespace optomech
