// One line per acceptance criterion; exit status is the number of failures.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <optomech/optomech.hpp>

#include "oracles.hpp"

using namespace optomech;
namespace fs = std::filesystem;

namespace {

constexpr double kHbar = PhysicalConstants::hbar;

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

bool within(double v, double ref, double rel) { return std::abs(v / ref - 1.0) <= rel; }

MechanicalMode mode_at(double f_hz, double q = 2000.0, double m = 10e-12) {
  return {hz_to_rad(f_hz), hz_to_rad(f_hz) / q, m};
}

OpticalCavity cavity_rad(double kappa) { return {780e-9, kappa, 0.5 * kappa, 27.5e-6, 70000.0}; }

OpticalCavity cavity_hz(double kappa_hz, double radius = 27.5e-6) {
  return {780e-9, hz_to_rad(kappa_hz), hz_to_rad(kappa_hz) * 0.3, radius, 0.0};
}

void occupancy_anchors() {
  const double a = occupancy_from_temperature(1.65, mode_at(62e6));
  const double b = occupancy_from_temperature(1.65, mode_at(122e6));
  const double c = occupancy_from_temperature(2.4, mode_at(65.3e6));
  const double d = occupancy_from_temperature(0.2, mode_at(65.2e6));
  report(1, "occupancy anchors", within(a, 560, 0.02) && within(b, 280, 0.02) && within(c, 770, 0.02) && within(d, 63, 0.03),
         fmt("%.2f/560 %.2f/280 %.2f/770 %.2f/63", a, b, c, d));
}

void imprecision_limits() {
  const double wm = hz_to_rad(65.2e6);
  const auto mode = mode_at(65.2e6);
  const auto cav = cavity_rad(1e-2 * wm);
  const LaserDrive red(2e-4, -wm), resonant(2e-4, 0.0);
  const double rsb = imprecision_psd(red, cav, wm) / imprecision_rsb_limit(red, cav, mode);
  const double four = imprecision_psd(red, cav, wm) / imprecision_psd(resonant, cav, wm);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double kappa = std::pow(10.0, 6 + 3 * u(gen));
    const OpticalCavity c(780e-9, kappa, 0.5 * kappa, 10e-6 + 50e-6 * u(gen), 1e4 + 1e5 * u(gen));
    const double p = 1e-6 + 1e-2 * u(gen);
    const double g0 = optomechanical_coupling(c);
    const double closed = kHbar * c.omega() * kappa * kappa / (64 * g0 * g0 * p);
    worst = std::max(worst, std::abs(imprecision_psd(LaserDrive(p, 0.0), c, 0.0) / closed - 1.0));
  }
  report(2, "imprecision limits", std::abs(rsb - 1.0) <= 1e-3 && four >= 3.9 && four <= 4.0 && worst <= 4 * std::numeric_limits<double>::epsilon(),
         fmt("RSB/limit=%.7f ratio=%.5f closed-form rel err=%.1e", rsb, four, worst));
}

void backaction_force() {
  const Scene s = *preset("sample65");
  const double amp = std::sqrt(qba_force_psd_at_resonance(s.make_drive(), s.make_cavity(), s.make_mode()));
  const double wm = hz_to_rad(65.2e6);
  const auto cav = cavity_rad(1e-2 * wm);
  const LaserDrive drive(2e-4, -wm);
  const double limit = qba_force_psd(drive, cav, wm) / qba_rsb_limit(drive, cav, mode_at(65.2e6));
  report(3, "backaction force", within(amp, 1.0e-15, 0.3) && std::abs(limit - 1.0) <= 1e-3,
         fmt("sqrt(S_FF)=%.4g N/sqrt(Hz) RSB/limit=%.7f", amp, limit));
}

void sql_consistency() {
  const auto mode = mode_at(65.2e6);
  const double bg = 1.5e-18 * 1.5e-18;
  const double implied = 2.7e-19;
  const double m_implied = kHbar / (implied * implied * mode.gamma_m() * mode.omega_m());
  const double at_implied = sql_ratio(bg, mode.with_mass(m_implied));
  const double at_preset = sql_ratio(bg, mode.with_mass(preset("sample65")->mode.m_eff_kg));
  // lightest mass whose ratio still lands in the band
  const double m_low = kHbar / (bg / (7.0 * 7.0) * mode.gamma_m() * mode.omega_m());
  const double m_high = kHbar / (bg / (4.0 * 4.0) * mode.gamma_m() * mode.omega_m());
  const bool ok = std::abs(at_implied - 5.5) <= 1.5 && std::abs(at_preset - 5.5) <= 1.5;
  report(4, "SQL consistency", ok,
         fmt("ratio %.3f at implied-SQL mass %.2f ng, %.3f at 10 ng; band holds for m in [%.2f, %.2f] ng", at_implied,
             m_implied * 1e12, at_preset, m_high * 1e12, m_low * 1e12));
}

void cooling_endpoint() {
  const auto r = run_reproduction(Target::fig3);
  const double n = r.report.value("n_f").value;
  report(5, "cooling endpoint", n >= 43 && n <= 83 && r.report.pass(),
         fmt("n_f=%.3f gamma_eff/2pi=%.1f Hz", n, r.report.value("gamma_eff").value));
}

void quantum_floor() {
  const double a = quantum_backaction_limit(cavity_hz(19e6), mode_at(65.2e6));
  const double b = quantum_backaction_limit(cavity_hz(155e6), mode_at(121.7e6));
  report(6, "quantum floor", std::abs(a - 0.0053) <= 1e-4 && std::abs(b - 0.101) <= 1e-3, fmt("%.6f %.5f", a, b));
}

void heating_shape() {
  const auto r = run_reproduction(Target::fig4);
  const double rsb = r.report.value("rsb_max_deviation").value;
  const double wide = r.report.value("non_rsb_max_deviation").value;
  report(7, "heating deviation shape", rsb > 0 && wide >= 3 * rsb,
         fmt("RSB %.4g non-RSB %.4g ratio %.2f", rsb, wide, wide / rsb));
}

void heisenberg_audit() {
  const auto r = run_reproduction(Target::audit);
  const auto& q = r.report.value("ratio_quoted_inputs");
  const bool flagged = r.report.value("quoted_230_inside_band").value == 1.0 && 230.0 >= q.lo && 230.0 <= q.hi;
  const auto mode = mode_at(65.2e6);
  const double gamma = hz_to_rad(370e3);
  const double base = backaction_audit(1e-34, 2e-36, mode, gamma).ratio_to_hbar_over_2;
  std::mt19937_64 gen(32);
  std::uniform_real_distribution<double> u(-6, 6);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double alpha = std::pow(10.0, u(gen));
    worst = std::max(worst, std::abs(backaction_audit(1e-34 / alpha, 2e-36 * alpha, mode, gamma).ratio_to_hbar_over_2 / base - 1.0));
  }
  report(8, "Heisenberg audit", q.value >= 200 && q.value <= 240 && flagged && worst <= 1e-12,
         fmt("ratio %.2f hbar/2, quoted 230 %s band, rescaling err %.1e", q.value, flagged ? "inside" : "outside", worst));
}

void estimation_round_trips() {
  const Scene s62 = *preset("sample62");
  double worst_t = 0.0;
  std::uint64_t seed = 100;
  for (double t : {0.1, 0.2, 0.5, 1.0, 1.65, 3.0, 5.0, 10.0})
    for (int rep = 0; rep < 3; ++rep)
      worst_t = std::max(worst_t, std::abs(thermometry_round_trip(s62, t, s62.make_mode().gamma_m(), seed++).temperature / t - 1.0));

  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_fit = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto mode = mode_at(1e6 + 200e6 * u(gen), std::pow(10.0, 1.5 + 3 * u(gen)), 1e-12 * (1 + 10 * u(gen)));
    const double t = std::pow(10.0, -1 + 2 * u(gen));
    const double peak = thermal_psd(mode, t, mode.omega_m());
    const double floor = peak * std::pow(10.0, -4 + 3 * u(gen));
    const double f = rad_to_hz(mode.omega_m()), lw = rad_to_hz(mode.gamma_m()), span = 5 + 20 * u(gen);
    const auto grid = linear_grid(f - span * lw, f + span * lw, 801 + static_cast<std::size_t>(2000 * u(gen)));
    std::vector<double> psd;
    for (double x : grid) psd.push_back(thermal_psd(mode, t, hz_to_rad(x)) + floor);
    const Spectrum spec(grid, psd, SpectrumUnit::displacement, true);
    const auto fit = fit_lorentzian(spec, {grid.front(), grid.back()});
    for (double e : {fit.omega_m / mode.omega_m(), fit.gamma / mode.gamma_m(), fit.peak_psd / peak, fit.background / floor})
      worst_fit = std::max(worst_fit, std::abs(e - 1.0));
    if (!fit.converged) worst_fit = 1.0;
  }

  double worst_eq = 0.0;
  for (double f : {1e6, 65.2e6, 121.7e6})
    for (double q : {50.0, 2000.0, 1e5}) {
      const auto mode = mode_at(f, q);
      const double wm = mode.omega_m(), g = mode.gamma_m();
      auto s = [&](double w) { return thermal_psd(mode, 2.0, w); };
      const double area =
          oracle::integrate(s, {0.0, wm - 50 * g, wm - 5 * g, wm, wm + 5 * g, wm + 50 * g, 10 * wm}, 1e-10) / two_pi;
      worst_eq = std::max(worst_eq, std::abs(area * mode.m_eff() * wm * wm / (PhysicalConstants::k_B * 2.0) - 1.0));
    }
  report(9, "estimation round trips", worst_t < 0.02 && worst_fit <= 1e-6 && worst_eq <= 5e-3,
         fmt("thermometry %.4f, fit %.1e, equipartition %.1e", worst_t, worst_fit, worst_eq));
}

void optimizer() {
  std::mt19937_64 gen(24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double f = 20e6 + 130e6 * u(gen);
    const double kappa = f * std::pow(10.0, -1.5 + 2.0 * u(gen));
    const auto mode = mode_at(f, 500 + 5000 * u(gen), 1e-12 * (1 + 20 * u(gen)));
    const auto cav = cavity_hz(kappa, 15e-6 + 40e-6 * u(gen));
    const double heating = u(gen) < 0.3 ? 0.0 : std::pow(10.0, 4.0 * u(gen));
    const CoolingScene s{cav, mode, LaserDrive(1e-4, -mode.omega_m()), Environment(0.5 + 4 * u(gen), heating),
                         0.5 + 5 * u(gen)};
    const double wm = mode.omega_m();
    const OperatingBounds box{std::pow(10.0, -5 + 3 * u(gen)), -(1.5 + u(gen)) * wm, u(gen) * 0.5 * wm};
    const auto best = optimize_operating_point(s, box);
    const auto grid = oracle::operating_grid(s, box, 200);
    worst = std::max(worst, best.n_f / grid.n_f - 1.0);
  }
  auto s = preset("sample65")->cooling_scene();
  s.env.heating_coeff = 0.0;
  s.cavity = cavity_hz(0.5e6);
  const double wm = s.mode.omega_m();
  const OperatingBounds box{1e-3, -2.0 * wm, 0.0};
  const auto best = optimize_operating_point(s, box);
  const bool limit = best.power_in == box.power_max && std::abs(best.detuning / -wm - 1.0) <= 1e-3;
  report(10, "optimizer", worst <= 1e-3 && limit,
         fmt("worst excess over grid %.2e, no-heating optimum P=%.3g W detuning/-wm=%.6f", worst, best.power_in,
             best.detuning / -wm));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void cli_determinism() {
#ifdef OPTOMECH_LAB
  const fs::path root = fs::temp_directory_path() / "optomech_acceptance_cli";
  fs::remove_all(root);
  const std::string lab = OPTOMECH_LAB;
  const char* commands[] = {
      "synth --preset sample65 --temp 1.65 --seed 7",
      "synth --preset sample62 --temp 0.5 --seed 9 --raw --name raw",
      "spectrum --preset sample122",
      "cooling-run --preset sample65",
      "optimize --preset sample65 --p-max 1e-3",
      "reproduce all",
  };
  int runs = 0, mismatches = 0, errors = 0;
  for (std::size_t c = 0; c < std::size(commands); ++c) {
    fs::path out[2];
    for (int k = 0; k < 2; ++k) {
      out[k] = root / std::to_string(c) / std::to_string(k);
      fs::create_directories(out[k]);
      const std::string cmd = "\"" + lab + "\" " + commands[c] + " --out \"" + out[k].string() + "\" > \"" + out[k].string() +
                              ".log\" 2>&1";
      if (std::system(cmd.c_str()) != 0) ++errors;
    }
    for (const auto& e : fs::directory_iterator(out[0])) {
      ++runs;
      if (slurp(e.path()) != slurp(out[1] / e.path().filename())) ++mismatches;
    }
  }
  // thermometry consumes a synthesized file
  const fs::path in = root / "0" / "0" / "synth.csv";
  std::string reports[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = root / "thermometry" / std::to_string(k);
    fs::create_directories(out);
    const std::string cmd = "\"" + lab + "\" thermometry --in \"" + in.string() + "\" --m-eff 1e-11 --out \"" +
                            out.string() + "\" > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) ++errors;
    reports[k] = slurp(out / "thermometry.report.json");
  }
  ++runs;
  if (reports[0].empty() || reports[0] != reports[1]) ++mismatches;
  report(11, "CLI determinism", errors == 0 && mismatches == 0,
         fmt("%d files compared across paired runs, %d differ, %d failed runs", runs, mismatches, errors));
#else
  report(11, "CLI determinism", false, "optomech-lab not built");
#endif
}

}  // namespace

int main() {
  auto guard = [](auto&& fn, int id) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, "criterion", false, std::string("exception: ") + e.what());
    }
  };
  guard(occupancy_anchors, 1);
  guard(imprecision_limits, 2);
  guard(backaction_force, 3);
  guard(sql_consistency, 4);
  guard(cooling_endpoint, 5);
  guard(quantum_floor, 6);
  guard(heating_shape, 7);
  guard(heisenberg_audit, 8);
  guard(estimation_round_trips, 9);
  guard(optimizer, 10);
  guard(cli_determinism, 11);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
