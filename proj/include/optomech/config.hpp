#pragma once

// Scene configuration files: nested key/value YAML with the unit in every
// key name, plus dotted-path overrides such as `cavity.kappa_hz=20e6`.
//
//   preset: sample65          # optional starting point
//   cavity:
//     kappa_hz: 19e6
//   drive:
//     power_in_w: 2e-4

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "errors.hpp"
#include "io.hpp"
#include "scene.hpp"

namespace optomech {

namespace detail {

struct ConfigKey {
  const char* path;
  std::function<double(const Scene&)> get;
  std::function<void(Scene&, double)> set;
};

#define OPTOMECH_KEY(PATH, MEMBER)                                  \
  ConfigKey {                                                       \
    PATH, [](const Scene& s) { return static_cast<double>(s.MEMBER); }, \
        [](Scene& s, double v) { s.MEMBER = v; }                    \
  }

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      OPTOMECH_KEY("cavity.wavelength_m", cavity.wavelength_m),
      OPTOMECH_KEY("cavity.kappa_hz", cavity.kappa_hz),
      OPTOMECH_KEY("cavity.kappa_intrinsic_hz", cavity.kappa_intrinsic_hz),
      OPTOMECH_KEY("cavity.radius_m", cavity.radius_m),
      OPTOMECH_KEY("cavity.finesse", cavity.finesse),
      OPTOMECH_KEY("cavity.refractive_index", cavity.refractive_index),
      OPTOMECH_KEY("mode.omega_m_hz", mode.omega_m_hz),
      OPTOMECH_KEY("mode.gamma_m_hz", mode.gamma_m_hz),
      OPTOMECH_KEY("mode.m_eff_kg", mode.m_eff_kg),
      OPTOMECH_KEY("drive.power_in_w", drive.power_in_w),
      OPTOMECH_KEY("drive.detuning_hz", drive.detuning_hz),
      OPTOMECH_KEY("environment.t_cryostat_k", environment.t_cryostat_k),
      OPTOMECH_KEY("environment.heating_k_per_w", environment.heating_k_per_w),
      OPTOMECH_KEY("measurement.imprecision_penalty", measurement.imprecision_penalty),
      ConfigKey{"measurement.averaging_count",
                [](const Scene& s) { return static_cast<double>(s.measurement.averaging_count); },
                [](Scene& s, double v) {
                  if (v < 0 || v != std::floor(v) || v > 1e6)
                    throw ConfigError("measurement.averaging_count", "must be a non-negative integer");
                  s.measurement.averaging_count = static_cast<unsigned>(v);
                }},
      OPTOMECH_KEY("calibration.freq_hz", calibration.freq_hz),
      OPTOMECH_KEY("calibration.displacement_m", calibration.displacement_equiv),
      OPTOMECH_KEY("calibration.bin_width_hz", calibration.bin_width_hz),
      OPTOMECH_KEY("cooling.scale", cooling.scale),
  };
  return keys;
}

#undef OPTOMECH_KEY

inline const ConfigKey* find_key(std::string_view path) {
  for (const auto& k : config_keys())
    if (path == k.path) return &k;
  return nullptr;
}

inline void set_key(Scene& scene, std::string_view path, std::string_view value) {
  const ConfigKey* key = find_key(path);
  if (!key) throw ConfigError(std::string(path), "unknown key");
  double v;
  try {
    v = parse_double(value);
  } catch (const InputError&) {
    throw ConfigError(std::string(path), "expected a number, got '" + std::string(value) + "'");
  }
  if (!std::isfinite(v)) throw ConfigError(std::string(path), "must be finite");
  key->set(scene, v);
}

}  // namespace detail

/// Scene::validate() with failures reported as ConfigError.
inline void validate_scene(const Scene& scene, std::string_view origin) {
  try {
    scene.validate();
  } catch (const InputError& e) {
    throw ConfigError(std::string(origin), e.what());
  }
}

/// Flat `section.key -> value` record, for provenance in output files.
inline nlohmann::json scene_to_json(const Scene& scene) {
  nlohmann::json j = {{"name", scene.name}};
  for (const auto& key : detail::config_keys()) j[key.path] = key.get(scene);
  return j;
}

inline Scene resolve_preset(std::string_view name) {
  auto s = preset(name);
  if (!s) throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
  return *s;
}

/// Applies `section.key=value`. Throws ConfigError naming the key.
inline void apply_override(Scene& scene, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(std::string(assignment), "override must look like section.key=value");
  const std::string_view path = assignment.substr(0, eq);
  if (path == "name") {
    scene.name = std::string(assignment.substr(eq + 1));
    return;
  }
  detail::set_key(scene, path, assignment.substr(eq + 1));
}

/// Reads a scene from YAML text. A top-level `preset` key selects the
/// starting point, otherwise `base` is used.
inline Scene parse_scene_yaml(std::string_view text, const Scene& base) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("<file>", std::string("not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) return base;
  if (!root.IsMap()) throw ConfigError("<root>", "expected a mapping of sections");

  Scene scene = base;
  if (root["preset"]) scene = resolve_preset(root["preset"].as<std::string>());
  for (const auto& entry : root) {
    const auto section = entry.first.as<std::string>();
    if (section == "preset") continue;
    if (section == "name") {
      scene.name = entry.second.as<std::string>();
      continue;
    }
    if (!entry.second.IsMap()) throw ConfigError(section, "expected a section of key: value pairs");
    for (const auto& kv : entry.second) {
      const std::string path = section + "." + kv.first.as<std::string>();
      if (!kv.second.IsScalar()) throw ConfigError(path, "expected a scalar value");
      detail::set_key(scene, path, kv.second.Scalar());
    }
  }
  validate_scene(scene, "<scene>");
  return scene;
}

inline Scene load_scene(const std::filesystem::path& path, const Scene& base) {
  return parse_scene_yaml(read_text_file(path), base);
}

/// Effective configuration as YAML; parse_scene_yaml() of the result gives
/// back an identical Scene.
inline std::string dump_scene(const Scene& scene) {
  std::string out = "name: " + scene.name + "\n";
  std::string current;
  for (const auto& key : detail::config_keys()) {
    const std::string_view path = key.path;
    const std::string section(path.substr(0, path.find('.')));
    if (section != current) {
      out += section + ":\n";
      current = section;
    }
    out += "  " + std::string(path.substr(path.find('.') + 1)) + ": " + format_double(key.get(scene)) + "\n";
  }
  return out;
}

}  // namespace optomech
