#pragma once

// Text serialization: shortest round-trip number formatting, CSV tables,
// spectra with JSON sidecars, cooling runs.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "constants.hpp"
#include "cooling.hpp"
#include "errors.hpp"
#include "spectrum.hpp"

namespace optomech {

// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw InputError("not a number: '" + std::string(text) + "'");
  return v;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// JSON sidecar sitting next to a CSV file: data.csv -> data.json.
inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  return p.replace_extension(".json");
}

/// Numeric table with named columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw InputError("table has no column '" + std::string(name) + "'");
  }
  std::vector<double> values(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  friend bool operator==(const Table&, const Table&) = default;
};

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += '\n';
  }
  return out;
}

inline Table parse_table_csv(std::string_view text) {
  Table t;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (header) {
      for (auto c : cells) t.columns.emplace_back(c);
      header = false;
      continue;
    }
    if (cells.size() != t.columns.size()) throw InputError("csv row width differs from header");
    std::vector<double> row;
    for (auto c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  if (header) throw InputError("csv: missing header");
  return t;
}

// ---------------------------------------------------------------------------
// Spectrum: freq_hz,psd,unit,calibrated

inline std::string to_csv(const Spectrum& s) {
  std::string out = "freq_hz,psd,unit,calibrated\n";
  const std::string tail = "," + std::string(to_string(s.unit())) + (s.calibrated() ? ",true\n" : ",false\n");
  for (std::size_t i = 0; i < s.size(); ++i)
    out += format_double(s.freq_hz()[i]) + "," + format_double(s.psd()[i]) + tail;
  return out;
}

inline Spectrum parse_spectrum_csv(std::string_view text, nlohmann::json metadata = nlohmann::json::object()) {
  std::vector<double> f, psd;
  std::optional<SpectrumUnit> unit;
  std::optional<bool> calibrated;
  std::size_t pos = 0, lineno = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "freq_hz,psd,unit,calibrated") throw InputError("spectrum csv: unexpected header");
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) throw InputError("spectrum csv: line " + std::to_string(lineno) + " needs 4 fields");
    f.push_back(parse_double(cells[0]));
    psd.push_back(parse_double(cells[1]));
    const SpectrumUnit u = parse_spectrum_unit(cells[2]);
    const bool c = cells[3] == "true";
    if (!c && cells[3] != "false") throw InputError("spectrum csv: calibrated must be true/false");
    if ((unit && *unit != u) || (calibrated && *calibrated != c))
      throw InputError("spectrum csv: unit/calibration changes between rows");
    unit = u;
    calibrated = c;
  }
  if (!unit) throw InputError("spectrum csv: no data rows");
  return {std::move(f), std::move(psd), *unit, *calibrated, std::move(metadata)};
}

inline void write_spectrum(const std::filesystem::path& csv, const Spectrum& s) {
  write_text_file(csv, to_csv(s));
  nlohmann::json side = {{"unit", to_string(s.unit())},
                         {"calibrated", s.calibrated()},
                         {"points", s.size()},
                         {"metadata", s.metadata()}};
  write_text_file(sidecar_path(csv), side.dump(2) + "\n");
}

// Reads the CSV and, when present, the metadata from its sidecar.
inline Spectrum read_spectrum(const std::filesystem::path& csv) {
  nlohmann::json meta = nlohmann::json::object();
  const auto side = sidecar_path(csv);
  if (std::filesystem::exists(side)) {
    const auto doc = nlohmann::json::parse(read_text_file(side), nullptr, false);
    if (doc.is_discarded()) throw InputError("malformed sidecar " + side.string());
    if (doc.contains("metadata")) meta = doc["metadata"];
  }
  return parse_spectrum_csv(read_text_file(csv), std::move(meta));
}

// ---------------------------------------------------------------------------
// CoolingRun: power_w,p_circ_w,gamma_eff_hz,t_bath_k,t_mode_k,n_f

inline Table to_table(const CoolingRun& run) {
  Table t{{"power_w", "p_circ_w", "gamma_eff_hz", "t_bath_k", "t_mode_k", "n_f"}, {}};
  for (const auto& p : run.points)
    t.rows.push_back({p.power_in, p.p_circ, rad_to_hz(p.gamma_eff), p.t_bath_eff, p.t_mode, p.n_f});
  return t;
}

inline void write_cooling_run(const std::filesystem::path& csv, const CoolingRun& run,
                              const nlohmann::json& scene) {
  write_text_file(csv, to_csv(to_table(run)));
  write_text_file(sidecar_path(csv), nlohmann::json{{"scene", scene}, {"points", run.points.size()}}.dump(2) + "\n");
}

}  // namespace optomech
