#pragma once

// Domain types of the cavity optomechanical system and the elementary
// conversions between them. All rates and frequencies are angular (rad/s).

#include <cmath>

#include "constants.hpp"
#include "errors.hpp"

namespace optomech {

/// Whispering-gallery optical resonance.
///
/// `kappa` is the total (loaded) energy decay rate; it splits into the
/// intrinsic loss and the external coupling to the fiber taper. The
/// finesse is either given explicitly or derived from the free spectral
/// range of a ring of radius `radius` and group index `refractive_index`.
class OpticalCavity {
 public:
  OpticalCavity(double wavelength, double kappa, double kappa_intrinsic, double radius,
                double finesse = 0.0, double refractive_index = 1.44)
      : wavelength_(wavelength),
        kappa_(kappa),
        kappa_intrinsic_(kappa_intrinsic),
        radius_(radius),
        refractive_index_(refractive_index) {
    detail::require(wavelength > 0.0, "cavity: wavelength must be positive");
    detail::require(kappa > 0.0, "cavity: kappa must be positive");
    detail::require(kappa_intrinsic >= 0.0, "cavity: kappa_intrinsic must be non-negative");
    detail::require(kappa_intrinsic <= kappa, "cavity: kappa_intrinsic exceeds kappa");
    detail::require(radius > 0.0, "cavity: radius must be positive");
    detail::require(refractive_index > 0.0, "cavity: refractive index must be positive");
    detail::require(finesse >= 0.0, "cavity: finesse must be non-negative");
    finesse_ = finesse > 0.0 ? finesse : free_spectral_range() / kappa_;
  }

  double wavelength() const noexcept { return wavelength_; }
  double omega() const noexcept { return two_pi * PhysicalConstants::c / wavelength_; }
  double kappa() const noexcept { return kappa_; }
  double kappa_intrinsic() const noexcept { return kappa_intrinsic_; }
  double kappa_ex() const noexcept { return kappa_ - kappa_intrinsic_; }
  double radius() const noexcept { return radius_; }
  double refractive_index() const noexcept { return refractive_index_; }
  double finesse() const noexcept { return finesse_; }

  // Angular FSR of the ring.
  double free_spectral_range() const noexcept {
    return PhysicalConstants::c / (radius_ * refractive_index_);
  }

 private:
  double wavelength_;
  double kappa_;
  double kappa_intrinsic_;
  double radius_;
  double refractive_index_;
  double finesse_;
};

/// Radial breathing mode.
class MechanicalMode {
 public:
  MechanicalMode(double omega_m, double gamma_m, double m_eff)
      : omega_m_(omega_m), gamma_m_(gamma_m), m_eff_(m_eff) {
    detail::require(omega_m > 0.0, "mode: omega_m must be positive");
    detail::require(gamma_m > 0.0, "mode: gamma_m must be positive");
    detail::require(m_eff > 0.0, "mode: m_eff must be positive");
  }

  double omega_m() const noexcept { return omega_m_; }
  double gamma_m() const noexcept { return gamma_m_; }
  double m_eff() const noexcept { return m_eff_; }
  double q_factor() const noexcept { return omega_m_ / gamma_m_; }

  MechanicalMode with_gamma(double gamma) const { return {omega_m_, gamma, m_eff_}; }
  MechanicalMode with_mass(double m_eff) const { return {omega_m_, gamma_m_, m_eff}; }

 private:
  double omega_m_;
  double gamma_m_;
  double m_eff_;
};

/// Probe/cooling laser. Detuning is laser minus cavity frequency, so the
/// red (cooling) sideband sits at detuning = -omega_m.
struct LaserDrive {
  double power_in = 0.0;  // launched power, W
  double detuning = 0.0;  // rad/s
  double wavelength = 780e-9;

  LaserDrive() = default;
  LaserDrive(double power, double delta, double lambda = 780e-9)
      : power_in(power), detuning(delta), wavelength(lambda) {
    detail::require(power >= 0.0, "drive: power_in must be non-negative");
    detail::require(lambda > 0.0, "drive: wavelength must be positive");
  }

  LaserDrive with_power(double p) const { return {p, detuning, wavelength}; }
  LaserDrive with_detuning(double d) const { return {power_in, d, wavelength}; }
};

struct Environment {
  double t_cryostat = 0.0;     // K
  double heating_coeff = 0.0;  // K per W of circulating power

  Environment() = default;
  Environment(double t, double heating) : t_cryostat(t), heating_coeff(heating) {
    detail::require(t >= 0.0, "environment: t_cryostat must be non-negative");
    detail::require(heating >= 0.0, "environment: heating_coeff must be non-negative");
  }
};

// Classical mean phonon number k_B T / (hbar Omega_m). No zero-point term:
// every regime treated here has n >> 1.
inline double occupancy_from_temperature(double temperature, const MechanicalMode& mode) {
  detail::require(temperature >= 0.0, "occupancy: temperature must be non-negative");
  return PhysicalConstants::k_B * temperature / (PhysicalConstants::hbar * mode.omega_m());
}

inline double temperature_from_occupancy(double n, const MechanicalMode& mode) {
  detail::require(n >= 0.0, "temperature: occupancy must be non-negative");
  return n * PhysicalConstants::hbar * mode.omega_m() / PhysicalConstants::k_B;
}

/// g0 = d(omega)/dx = omega / R for a radially breathing ring, rad s^-1 m^-1.
inline double optomechanical_coupling(const OpticalCavity& cavity) {
  return cavity.omega() / cavity.radius();
}

inline double zero_point_spread(const MechanicalMode& mode) {
  return std::sqrt(PhysicalConstants::hbar / (2.0 * mode.m_eff() * mode.omega_m()));
}

// Normalized Lorentzian (kappa/2)^2 / (delta^2 + (kappa/2)^2); 1 on resonance.
inline double detuning_response(double detuning, double kappa) {
  const double half = 0.5 * kappa;
  return half * half / (detuning * detuning + half * half);
}

/// Power circulating in the ring.
///
/// On resonance the buildup is (F/pi) times the launched power times the
/// coupling efficiency 4 kappa_ex kappa_0 / kappa^2, which is one at
/// critical coupling. Off resonance it falls off as a Lorentzian of full
/// width kappa, so parking the laser on the red sideband of a resolved
/// sideband cavity cuts it by 1 + 4 Omega_m^2 / kappa^2.
inline double circulating_power(const LaserDrive& drive, const OpticalCavity& cavity) {
  const double k = cavity.kappa();
  const double coupling = 4.0 * cavity.kappa_ex() * cavity.kappa_intrinsic() / (k * k);
  const double on_resonance = cavity.finesse() / std::numbers::pi * drive.power_in * coupling;
  return on_resonance * detuning_response(drive.detuning, k);
}

// Mean intracavity photon number for the circulating power above.
inline double intracavity_photons(const LaserDrive& drive, const OpticalCavity& cavity) {
  const double round_trip = two_pi * cavity.radius() / PhysicalConstants::c;
  return circulating_power(drive, cavity) * round_trip / (PhysicalConstants::hbar * cavity.omega());
}

}  // namespace optomech
