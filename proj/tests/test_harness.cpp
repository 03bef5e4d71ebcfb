#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include <optomech/optomech.hpp>

using namespace optomech;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("optomech_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Presets, AllValidAndDistinct) {
  for (auto name : kPresetNames) {
    const auto s = preset(name);
    ASSERT_TRUE(s) << name;
    EXPECT_EQ(s->name, name);
    EXPECT_NO_THROW(s->validate());
  }
  EXPECT_FALSE(preset("sample99"));
  EXPECT_THROW(resolve_preset("sample99"), ConfigError);
}

TEST(Presets, ReturnFreshCopies) {
  Scene a = *preset("sample65");
  a.mode.m_eff_kg = 1.0;
  EXPECT_EQ(preset("sample65")->mode.m_eff_kg, 10e-12);
}

TEST(Presets, PaperParameters) {
  const Scene s62 = *preset("sample62"), s65 = *preset("sample65"), s122 = *preset("sample122");
  EXPECT_EQ(s62.mode.omega_m_hz, 62e6);
  EXPECT_EQ(s65.mode.omega_m_hz, 65.2e6);
  EXPECT_EQ(s122.mode.omega_m_hz, 121.7e6);
  EXPECT_EQ(s65.cavity.kappa_hz, 19e6);
  EXPECT_EQ(s122.cavity.kappa_hz, 155e6);
  EXPECT_EQ(s65.drive.detuning_hz, -65.2e6);
  EXPECT_LE(s62.drive.power_in_w, 2e-6);
  for (const Scene* s : {&s62, &s65, &s122}) {
    EXPECT_EQ(s->environment.t_cryostat_k, 1.65);
    EXPECT_EQ(s->environment.heating_k_per_w, 10.0);
    // readout penalty reproduces the measured background
    const double bg = background_psd(s->synthesis(1.0, s->make_mode().gamma_m()));
    EXPECT_NEAR(std::sqrt(bg) / kMeasuredBackgroundAmplitude, 1.0, 1e-12) << s->name;
  }
}

TEST(Config, DumpRoundTripsPresets) {
  for (auto name : kPresetNames) {
    const Scene s = *preset(name);
    EXPECT_EQ(parse_scene_yaml(dump_scene(s), Scene{}), s) << name;
  }
}

TEST(Config, DumpRoundTripsRandomScenes) {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int i = 0; i < 100; ++i) {
    Scene s = *preset("sample65");
    s.name = "random" + std::to_string(i);
    s.cavity.kappa_hz *= u(gen);
    s.cavity.kappa_intrinsic_hz = s.cavity.kappa_hz * u(gen) / 4;
    s.cavity.radius_m *= u(gen);
    s.cavity.finesse *= u(gen);
    s.mode.omega_m_hz *= u(gen);
    s.mode.gamma_m_hz *= u(gen);
    s.mode.m_eff_kg *= u(gen);
    s.drive.power_in_w *= u(gen);
    s.drive.detuning_hz *= u(gen);
    s.environment.t_cryostat_k *= u(gen);
    s.environment.heating_k_per_w *= u(gen);
    s.measurement.imprecision_penalty *= u(gen);
    s.measurement.averaging_count = 1 + i;
    s.calibration.freq_hz = s.mode.omega_m_hz * u(gen);
    s.calibration.displacement_equiv *= u(gen);
    s.cooling.scale *= u(gen);
    EXPECT_EQ(parse_scene_yaml(dump_scene(s), Scene{}), s);
  }
}

TEST(Config, PresetKeyAndOverrides) {
  const Scene s = parse_scene_yaml("preset: sample122\ndrive:\n  power_in_w: 5e-4\n", Scene{});
  Scene expected = *preset("sample122");
  expected.drive.power_in_w = 5e-4;
  EXPECT_EQ(s, expected);

  Scene o = *preset("sample65");
  apply_override(o, "cavity.kappa_hz=20e6");
  apply_override(o, "name=tweaked");
  EXPECT_EQ(o.cavity.kappa_hz, 20e6);
  EXPECT_EQ(o.name, "tweaked");
  EXPECT_EQ(parse_scene_yaml("", o), o);
}

TEST(Config, ErrorsNameTheKey) {
  auto key_of = [](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(key_of([] { parse_scene_yaml("cavity:\n  kappa_mhz: 3\n", Scene{}); }), "cavity.kappa_mhz");
  EXPECT_EQ(key_of([] { parse_scene_yaml("mode:\n  m_eff_kg: heavy\n", Scene{}); }), "mode.m_eff_kg");
  EXPECT_EQ(key_of([] { parse_scene_yaml("measurement:\n  averaging_count: 2.5\n", Scene{}); }),
            "measurement.averaging_count");
  EXPECT_EQ(key_of([] { parse_scene_yaml("drive: 3\n", Scene{}); }), "drive");
  EXPECT_EQ(key_of([] { parse_scene_yaml("preset: nope\n", Scene{}); }), "preset");
  Scene s;
  EXPECT_EQ(key_of([&] { apply_override(s, "mode.q=3"); }), "mode.q");
  EXPECT_EQ(key_of([&] { apply_override(s, "garbage"); }), "garbage");
  EXPECT_THROW(parse_scene_yaml("cavity:\n  kappa_hz: -1\n", Scene{}), ConfigError);
  EXPECT_THROW(parse_scene_yaml("[1, 2", Scene{}), ConfigError);
}

TEST(Io, NumberFormattingRoundTrips) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(-300, 300);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::pow(10.0, u(gen)) * (i % 2 ? -1 : 1);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_THROW(parse_double("1.0x"), InputError);
  EXPECT_THROW(parse_double(""), InputError);
}

TEST(Io, TableRoundTrip) {
  const Table t{{"a", "b"}, {{1.0, 2.5e-300}, {-3.0, 1.0 / 3.0}}};
  EXPECT_EQ(parse_table_csv(to_csv(t)), t);
  EXPECT_THROW(parse_table_csv("a,b\n1\n"), InputError);
  EXPECT_THROW(t.column("c"), InputError);
}

TEST(Io, SpectrumFileRoundTrip) {
  const fs::path dir = scratch("spectrum");
  const Scene s = *preset("sample65");
  const auto spec = synthesize_spectrum(s.synthesis(1.65, hz_to_rad(370e3)), mode_grid(65.2e6, 370e3, 10, 1001), 3);
  write_spectrum(dir / "x.csv", spec.as_raw(2.0));
  EXPECT_TRUE(fs::exists(dir / "x.json"));
  const Spectrum back = read_spectrum(dir / "x.csv");
  EXPECT_EQ(back.psd(), spec.as_raw(2.0).psd());
  EXPECT_EQ(back.freq_hz(), spec.freq_hz());
  EXPECT_EQ(back.unit(), SpectrumUnit::raw);
  EXPECT_FALSE(back.calibrated());
  EXPECT_EQ(back.metadata()["seed"], 3);
  EXPECT_EQ(to_csv(spec).substr(0, 28), "freq_hz,psd,unit,calibrated\n");
  EXPECT_THROW(parse_spectrum_csv("freq,psd\n1,2\n"), InputError);
  EXPECT_THROW(parse_spectrum_csv("freq_hz,psd,unit,calibrated\n1,2,raw,maybe\n"), InputError);
  EXPECT_THROW(parse_spectrum_csv("freq_hz,psd,unit,calibrated\n1,2,raw,true\n"), InputError);
}

TEST(Io, CoolingRunColumns) {
  const auto run = simulate_cooling_run(preset("sample65")->cooling_scene(), {0.0, 1e-4});
  const std::string csv = to_csv(to_table(run));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "power_w,p_circ_w,gamma_eff_hz,t_bath_k,t_mode_k,n_f");
}

TEST(Svg, ProvenanceAndEscaping) {
  Plot p{"a < b", "x", "y", {{"s", {1, 2, 3}, {1, 4, 9}}}, false, true, "seed=1 -- scene=x"};
  const std::string svg = render_svg(p);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("<!-- seed=1 - - scene=x -->"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b"), std::string::npos);
  EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
}

TEST(Reproduce, TargetNames) {
  for (auto n : kTargetNames) EXPECT_EQ(to_string(*parse_target(n)), n);
  EXPECT_FALSE(parse_target("fig5"));
}

class ReproduceTarget : public ::testing::TestWithParam<Target> {};

TEST_P(ReproduceTarget, PassesAndVerdictsFollowFromCsv) {
  const auto r = run_reproduction(GetParam());
  for (const auto& v : r.report.values)
    EXPECT_TRUE(v.pass()) << r.report.target << "." << v.name << " = " << v.value;
  const Table back = parse_table_csv(to_csv(r.table));
  const auto again = evaluate(GetParam(), back);
  EXPECT_EQ(again.to_json().dump(), r.report.to_json().dump());
  EXPECT_NE(render_svg(r.plot).find("<!-- optomech-lab reproduce"), std::string::npos);
}

TEST_P(ReproduceTarget, Deterministic) {
  const auto a = run_reproduction(GetParam(), 7);
  const auto b = run_reproduction(GetParam(), 7);
  EXPECT_EQ(to_csv(a.table), to_csv(b.table));
  EXPECT_EQ(render_svg(a.plot), render_svg(b.plot));
}

INSTANTIATE_TEST_SUITE_P(All, ReproduceTarget,
                         ::testing::Values(Target::fig2a, Target::fig2b, Target::fig3, Target::fig4, Target::audit),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Reproduce, Fig3Endpoint) {
  const auto r = run_reproduction(Target::fig3);
  EXPECT_GE(r.report.value("n_f").value, 43.0);
  EXPECT_LE(r.report.value("n_f").value, 83.0);
  EXPECT_NEAR(r.report.value("gamma_eff").value, 370e3, 1e-3);
}

TEST(Reproduce, SeedsChangeNoisyTargetsOnly) {
  EXPECT_NE(to_csv(run_reproduction(Target::fig2b, 1).table), to_csv(run_reproduction(Target::fig2b, 2).table));
  EXPECT_EQ(to_csv(run_reproduction(Target::fig3, 1).table), to_csv(run_reproduction(Target::fig3, 2).table));
}

TEST(Reproduce, Fig2aAcrossSeeds) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto r = run_reproduction(Target::fig2a, seed);
    EXPECT_TRUE(r.report.pass()) << seed << " " << r.report.to_json().dump();
  }
}
