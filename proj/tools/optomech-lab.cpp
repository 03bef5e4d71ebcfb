// optomech-lab: command line front end for the optomech toolkit.
//
//   optomech-lab <subcommand> [--config FILE] [--preset NAME] [--out DIR] [--seed N] [key=value ...]
//
// Exit status: 0 success, 1 computation error, 2 usage or configuration error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <optomech/optomech.hpp>

namespace fs = std::filesystem;
using namespace optomech;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string preset;
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  bool dump_config = false;
  std::vector<std::string> overrides;
};

Scene build_scene(const Common& c) {
  Scene scene = c.preset.empty() ? Scene{} : resolve_preset(c.preset);
  if (!c.config.empty()) {
    if (!fs::exists(c.config)) throw ConfigError("--config", "no such file '" + c.config + "'");
    scene = load_scene(c.config, scene);
  }
  for (const auto& o : c.overrides) apply_override(scene, o);
  validate_scene(scene, "<overrides>");
  return scene;
}

void note(const fs::path& p) { std::cout << "wrote " << p.string() << "\n"; }

void write_json(const fs::path& p, const json& j) {
  write_text_file(p, j.dump(2) + "\n");
  note(p);
}

void write_svg(const fs::path& p, const Plot& plot) {
  write_text_file(p, render_svg(plot));
  note(p);
}

// Cooled mode at the scene's operating point.
CoolingPoint operating_point(const Scene& scene) {
  const auto p = cooling_point(scene.cooling_scene(), scene.drive.power_in_w);
  if (!(p.gamma_eff > 0.0)) throw DomainError("total damping is not positive at this detuning: the mode is unstable");
  return p;
}

// ---------------------------------------------------------------------------

struct SpectrumArgs {
  std::size_t points = 2001;
  double span = 15.0;
};

int run_spectrum(const Common& c, const SpectrumArgs& a) {
  const Scene scene = build_scene(c);
  const auto op = operating_point(scene);
  const MechanicalMode mode = scene.make_mode();
  const MechanicalMode cooled = mode.with_gamma(op.gamma_eff);
  const OpticalCavity cav = scene.make_cavity();
  const LaserDrive drive = scene.make_drive();
  const double sql = sql_psd(mode);

  Table t{{"freq_hz", "thermal_psd", "imprecision_psd", "background_psd", "qba_force_psd", "sql_psd", "total_psd"}, {}};
  PlotSeries total{"thermal + background", {}, {}, "#1f77b4"};
  PlotSeries floor{"ideal imprecision", {}, {}, "#ff7f0e", true};
  const double background = scene.measurement.imprecision_penalty * imprecision_psd(drive, cav, mode.omega_m());
  for (double f : mode_grid(scene.mode.omega_m_hz, rad_to_hz(op.gamma_eff), a.span, a.points)) {
    const double w = hz_to_rad(f);
    const double th = thermal_psd(cooled, op.t_mode, w);
    const double imp = imprecision_psd(drive, cav, w);
    t.rows.push_back({f, th, imp, background, qba_force_psd(drive, cav, w), sql, th + background});
    total.x.push_back(f * 1e-6);
    total.y.push_back(th + background);
    floor.x.push_back(f * 1e-6);
    floor.y.push_back(imp);
  }
  const fs::path dir = c.out;
  write_text_file(dir / "spectrum.csv", to_csv(t));
  note(dir / "spectrum.csv");

  const double qba = qba_force_psd_at_resonance(drive, cav, mode);
  json summary = {
      {"scene", scene_to_json(scene)},
      {"operating_point",
       {{"gamma_eff_hz", rad_to_hz(op.gamma_eff)}, {"t_mode_k", op.t_mode}, {"n_f", op.n_f}, {"p_circ_w", op.p_circ}}},
      {"at_resonance",
       {{"sqrt_imprecision_ideal", std::sqrt(imprecision_psd(drive, cav, mode.omega_m()))},
        {"sqrt_background", std::sqrt(background)},
        {"sqrt_sql", std::sqrt(sql)},
        {"sqrt_thermal_peak", std::sqrt(thermal_psd(cooled, op.t_mode, mode.omega_m()))},
        {"sqrt_qba_force", std::sqrt(qba)},
        {"sql_ratio", sql_ratio(background, mode)},
        {"quantum_floor", quantum_backaction_limit(cav, mode)}}}};
  write_json(dir / "spectrum.json", summary);

  Plot plot{"Displacement noise of " + scene.name, "frequency (MHz)", "S_xx (m^2/Hz)",
            {total, floor, {"SQL", {total.x.front(), total.x.back()}, {sql, sql}, "#2ca02c", true}},
            false, true, "optomech-lab spectrum scene=" + scene.name};
  write_svg(dir / "spectrum.svg", plot);
  std::cout << summary["at_resonance"].dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::optional<double> temp;
  std::optional<double> gamma_eff_hz;
  std::size_t points = 32001;
  double span = 15.0;
  bool raw = false;
  std::string name = "synth";
};

int run_synth(const Common& c, const SynthArgs& a) {
  const Scene scene = build_scene(c);
  const double t = a.temp.value_or(scene.environment.t_cryostat_k);
  if (t < 0.0) throw UsageError("--temp must be non-negative");
  const double gamma = hz_to_rad(a.gamma_eff_hz.value_or(scene.mode.gamma_m_hz));
  if (!(gamma > 0.0)) throw UsageError("--gamma-eff-hz must be positive");
  if (a.points < 8) throw UsageError("--points must be at least 8");

  const auto grid = mode_grid(scene.mode.omega_m_hz, rad_to_hz(gamma), a.span, a.points);
  Spectrum s = synthesize_spectrum(scene.synthesis(t, gamma), grid, c.seed);
  json meta = s.metadata();
  meta["scene"] = scene.name;
  s = s.with_metadata(meta);
  if (a.raw) s = s.as_raw(kRawGain);

  const fs::path csv = fs::path(c.out) / (a.name + ".csv");
  write_spectrum(csv, s);
  note(csv);
  note(sidecar_path(csv));
  return 0;
}

// ---------------------------------------------------------------------------

struct ThermometryArgs {
  std::string in;
  std::optional<double> m_eff;
  std::optional<double> f_lo, f_hi;
  std::string weighting = "uniform";
};

int run_thermometry(const Common& c, const ThermometryArgs& a) {
  const Scene scene = build_scene(c);
  Spectrum spec = read_spectrum(a.in);
  const json meta = spec.metadata();

  std::optional<double> factor;
  if (!spec.calibrated()) {
    CalibrationPeak cal = scene.calibration;
    if (meta.contains("calibration")) {
      const auto& m = meta["calibration"];
      cal = {m.at("freq_hz").get<double>(), m.at("displacement_m").get<double>(), m.at("bin_width_hz").get<double>()};
    }
    spec = calibrate(spec, cal);
    factor = spec.metadata()["calibration_factor"].get<double>();
  }
  const double m_eff = a.m_eff.value_or(scene.mode.m_eff_kg);
  if (!(m_eff > 0.0)) throw UsageError("--m-eff must be positive");

  FitOptions opt;
  if (a.weighting == "relative") opt.weighting = FitWeighting::relative;
  else if (a.weighting != "uniform") throw UsageError("--weighting must be uniform or relative");
  if (meta.contains("calibration")) opt.exclude_hz.push_back(meta["calibration"]["freq_hz"].get<double>());
  const FrequencyWindow w{a.f_lo.value_or(spec.freq_hz().front()), a.f_hi.value_or(spec.freq_hz().back())};

  const LorentzianFit fit = fit_lorentzian(spec, w, opt);
  if (!fit.converged) throw DomainError("Lorentzian fit did not converge");
  const double t = noise_thermometry(spec, fit, m_eff);
  const double n = PhysicalConstants::k_B * t / (PhysicalConstants::hbar * fit.omega_m);

  json report = {{"input", a.in},
                 {"m_eff_kg", m_eff},
                 {"weighting", a.weighting},
                 {"window_hz", {w.f_lo_hz, w.f_hi_hz}},
                 {"fit", to_json(fit)},
                 {"mean_square_displacement_m2", mean_square_displacement(fit)},
                 {"temperature_k", t},
                 {"occupancy", n}};
  if (factor) report["calibration_factor"] = *factor;
  write_json(fs::path(c.out) / "thermometry.report.json", report);
  std::cout << "T_mode = " << format_double(t) << " K, <n> = " << format_double(n) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct CoolingArgs {
  std::optional<double> p_max;
  std::size_t points = 21;
  std::vector<double> powers;
};

int run_cooling(const Common& c, const CoolingArgs& a) {
  const Scene scene = build_scene(c);
  std::vector<double> powers = a.powers;
  if (powers.empty()) {
    if (a.points < 2) throw UsageError("--points must be at least 2");
    const double p_max = a.p_max.value_or(scene.drive.power_in_w);
    if (!(p_max > 0.0)) throw UsageError("--p-max must be positive");
    for (std::size_t i = 0; i < a.points; ++i)
      powers.push_back(p_max * static_cast<double>(i) / static_cast<double>(a.points - 1));
  }
  const auto run = simulate_cooling_run(scene.cooling_scene(), powers);
  const fs::path csv = fs::path(c.out) / "cooling_run.csv";
  write_cooling_run(csv, run, scene_to_json(scene));
  note(csv);
  note(sidecar_path(csv));

  PlotSeries s{"mode temperature", {}, {}, "#1f77b4", false, true};
  for (const auto& p : run.points) {
    s.x.push_back(rad_to_hz(p.gamma_eff) * 1e-3);
    s.y.push_back(p.t_mode);
  }
  write_svg(fs::path(c.out) / "cooling_run.svg",
            {"Cooling run of " + scene.name, "total damping (kHz)", "mode temperature (K)", {s}, true, true,
             "optomech-lab cooling-run scene=" + scene.name});
  const auto& last = run.points.back();
  std::cout << "final point: P = " << format_double(last.power_in) << " W, Gamma_eff/2pi = "
            << format_double(rad_to_hz(last.gamma_eff)) << " Hz, n_f = " << format_double(last.n_f) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct OptimizeArgs {
  std::optional<double> p_max;
  std::optional<double> d_min_hz, d_max_hz;
};

int run_optimize(const Common& c, const OptimizeArgs& a) {
  const Scene scene = build_scene(c);
  const OperatingBounds box{a.p_max.value_or(scene.drive.power_in_w), hz_to_rad(a.d_min_hz.value_or(-2.0 * scene.mode.omega_m_hz)),
                            hz_to_rad(a.d_max_hz.value_or(0.0))};
  const auto best = optimize_operating_point(scene.cooling_scene(), box);
  json report = {{"scene", scene_to_json(scene)},
                 {"bounds", {{"power_max_w", box.power_max}, {"detuning_min_hz", rad_to_hz(box.detuning_min)},
                             {"detuning_max_hz", rad_to_hz(box.detuning_max)}}},
                 {"power_in_w", best.power_in},
                 {"detuning_hz", rad_to_hz(best.detuning)},
                 {"n_f", best.n_f},
                 {"t_mode_k", temperature_from_occupancy(best.n_f, scene.make_mode())},
                 {"sweeps", best.sweeps}};
  write_json(fs::path(c.out) / "optimize.json", report);
  std::cout << "P* = " << format_double(best.power_in) << " W, Delta*/2pi = " << format_double(rad_to_hz(best.detuning))
            << " Hz, n_f* = " << format_double(best.n_f) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int run_reproduce(const Common& c, const std::string& target_name, bool strict) {
  std::vector<Target> targets;
  if (target_name == "all") {
    for (auto name : kTargetNames) targets.push_back(*parse_target(name));
  } else if (auto t = parse_target(target_name)) {
    targets.push_back(*t);
  } else {
    throw UsageError("unknown target '" + target_name + "' (expected fig2a, fig2b, fig3, fig4, audit or all)");
  }
  if (!c.overrides.empty() || !c.config.empty() || !c.preset.empty())
    throw UsageError("reproduce uses the built-in presets; --config, --preset and overrides are not accepted");

  bool all_pass = true;
  for (Target t : targets) {
    auto r = run_reproduction(t, c.seed);
    const std::string stem(to_string(t));
    const fs::path dir = c.out;
    write_text_file(dir / (stem + ".csv"), to_csv(r.table));
    note(dir / (stem + ".csv"));
    write_svg(dir / (stem + ".svg"), r.plot);
    r.report.files = {stem + ".csv", stem + ".svg", stem + ".report.json"};
    json j = r.report.to_json();
    j["seed"] = c.seed;
    write_json(dir / (stem + ".report.json"), j);
    for (const auto& v : r.report.values)
      std::cout << "  " << (v.checked ? (v.pass() ? "PASS " : "FAIL ") : "info ") << stem << "." << v.name << " = "
                << format_double(v.value) << (v.unit.empty() ? "" : " " + v.unit) << "\n";
    all_pass = all_pass && r.report.pass();
  }
  return strict && !all_pass ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resolved-sideband cooling toolkit: spectra, cooling runs, thermometry, reproductions", "optomech-lab"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  if (const char* env = std::getenv("OPTOMECH_LAB_OUT")) common.out = env;
  if (common.out.empty()) common.out = ".";
  app.add_option("--config", common.config, "YAML scene file");
  app.add_option("--preset", common.preset, "starting scene: sample62, sample65 or sample122");
  app.add_option("--out", common.out, "output directory (default $OPTOMECH_LAB_OUT or .)");
  app.add_option("--seed", common.seed, "random seed")->capture_default_str();
  app.add_flag("--dump-config", common.dump_config, "print the effective scene as YAML and exit");

  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("overrides", common.overrides, "section.key=value overrides");
  };

  SpectrumArgs spectrum_args;
  auto* spectrum = app.add_subcommand("spectrum", "analytic noise spectra at the scene's operating point");
  spectrum->add_option("--points", spectrum_args.points, "grid points")->capture_default_str();
  spectrum->add_option("--span", spectrum_args.span, "half width in linewidths")->capture_default_str();
  add_overrides(spectrum);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "synthesize a noisy calibrated displacement spectrum");
  synth->add_option("--temp", synth_args.temp, "mode temperature, K (default: cryostat temperature)");
  synth->add_option("--gamma-eff-hz", synth_args.gamma_eff_hz, "mode linewidth, Hz (default: intrinsic)");
  synth->add_option("--points", synth_args.points, "grid points")->capture_default_str();
  synth->add_option("--span", synth_args.span, "half width in linewidths")->capture_default_str();
  synth->add_option("--name", synth_args.name, "output file stem")->capture_default_str();
  synth->add_flag("--raw", synth_args.raw, "emit uncalibrated analyzer units");
  add_overrides(synth);

  ThermometryArgs thermo_args;
  auto* thermo = app.add_subcommand("thermometry", "fit a spectrum file and report the mode temperature");
  thermo->add_option("--in", thermo_args.in, "spectrum CSV (sidecar JSON read if present)")->required();
  thermo->add_option("--m-eff", thermo_args.m_eff, "effective mass, kg (default: scene)");
  thermo->add_option("--f-lo", thermo_args.f_lo, "fit window lower edge, Hz");
  thermo->add_option("--f-hi", thermo_args.f_hi, "fit window upper edge, Hz");
  thermo->add_option("--weighting", thermo_args.weighting, "uniform or relative")->capture_default_str();
  add_overrides(thermo);

  CoolingArgs cooling_args;
  auto* cooling = app.add_subcommand("cooling-run", "simulate n_f and T_mode over a power ramp");
  cooling->add_option("--p-max", cooling_args.p_max, "top of the ramp, W (default: drive.power_in_w)");
  cooling->add_option("--points", cooling_args.points, "ramp points")->capture_default_str();
  cooling->add_option("--powers", cooling_args.powers, "explicit increasing powers, W")->delimiter(',');
  add_overrides(cooling);

  OptimizeArgs opt_args;
  auto* optimize = app.add_subcommand("optimize", "minimize n_f over launched power and detuning");
  optimize->add_option("--p-max", opt_args.p_max, "maximum launched power, W (default: drive.power_in_w)");
  optimize->add_option("--detuning-min-hz", opt_args.d_min_hz, "default -2 omega_m");
  optimize->add_option("--detuning-max-hz", opt_args.d_max_hz, "default 0");
  add_overrides(optimize);

  std::string target;
  bool strict = false;
  auto* reproduce = app.add_subcommand("reproduce", "regenerate a reference figure or number: data, plot, report");
  reproduce->add_option("target", target, "fig2a, fig2b, fig3, fig4, audit or all")->required();
  reproduce->add_flag("--strict", strict, "exit 1 when any verdict fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (common.dump_config) {
      std::cout << dump_scene(build_scene(common));
      return 0;
    }
    if (*spectrum) return run_spectrum(common, spectrum_args);
    if (*synth) return run_synth(common, synth_args);
    if (*thermo) return run_thermometry(common, thermo_args);
    if (*cooling) return run_cooling(common, cooling_args);
    if (*optimize) return run_optimize(common, opt_args);
    if (*reproduce) return run_reproduce(common, target, strict);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
