#pragma once

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmtai/physics.hpp"

namespace lmtai {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SweepOptions {
  int replicates = 5;
  std::vector<int> n_r_values;
  std::vector<double> axis_values;
  double oracle_tolerance = 1e-3;
  bool operator==(const SweepOptions&) const = default;
};

struct RunConfig {
  SimulationConfig sim;
  SweepOptions sweep;
  bool operator==(const RunConfig&) const = default;
};

struct ParsedConfig {
  RunConfig config;
  std::vector<std::string> fallbacks;
};

// 17 significant digits: round-trips every double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& text, const std::string& key, int line) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError("line " + std::to_string(line) + ": key '" + key + "': invalid number '" + t + "'");
  return v;
}

inline long long parse_integer(const std::string& text, const std::string& key, int line) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw ConfigError("line " + std::to_string(line) + ": key '" + key + "': invalid integer '" + t + "'");
  return v;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Text for v / scale such that parsing it and multiplying by scale gives v back.
inline std::string encode_scaled(double v, double scale) {
  double y = v / scale;
  for (int k = 0; k < 8; ++k) {
    for (double dir : {1.0, -1.0}) {
      double c = y;
      for (int j = 0; j < k; ++j) c = std::nextafter(c, dir * INFINITY);
      const std::string s = format_double(c);
      if (std::strtod(s.c_str(), nullptr) * scale == v) return s;
    }
  }
  return format_double(y);
}

struct Key {
  std::string name;
  std::function<std::string(const RunConfig&)> write;
  std::function<void(RunConfig&, const std::string&, int)> read;
};

template <class E>
struct EnumNames {
  std::vector<std::pair<E, std::string>> names;
  std::string to(E e) const {
    for (auto& [k, v] : names)
      if (k == e) return v;
    return "?";
  }
  E from(const std::string& s, const std::string& key, int line) const {
    for (auto& [k, v] : names)
      if (v == s) return k;
    std::string opts;
    for (auto& [k, v] : names) opts += (opts.empty() ? "" : "|") + v;
    throw ConfigError("line " + std::to_string(line) + ": key '" + key + "': expected " + opts +
                      ", got '" + s + "'");
  }
};

inline const EnumNames<Geometry> kGeometry{{{Geometry::CounterPropagating, "counter"},
                                            {Geometry::CoPropagating, "co"}}};
inline const EnumNames<PulseCalibration> kPulseMode{{{PulseCalibration::Table, "table"},
                                                     {PulseCalibration::Calibrated, "calibrated"}}};
inline const EnumNames<QMode> kQMode{{{QMode::Zero, "zero"}, {QMode::Constant, "constant"}, {QMode::Random, "random"}}};
inline const EnumNames<CovMode> kCovMode{{{CovMode::Binomial, "binomial"}, {CovMode::VarianceRatio, "variance_ratio"}}};
inline const EnumNames<RatioForm> kRatioForm{{{RatioForm::DeltaMethod, "delta"}, {RatioForm::LossCovariance, "loss_cov"}}};
inline const EnumNames<MeasurementModel> kMeasurement{
    {{MeasurementModel::Multiplicative, "multiplicative"}, {MeasurementModel::Deterministic, "deterministic"}}};
inline const EnumNames<SignSchedule> kSigns{{{SignSchedule::Palindromic, "palindromic"},
                                             {SignSchedule::Alternating, "alternating"}}};
inline const EnumNames<bool> kBool{{{true, "true"}, {false, "false"}}};

inline Key scaled(const std::string& name, double scale, double SimulationConfig::*field) {
  return {name, [=](const RunConfig& c) { return encode_scaled(c.sim.*field, scale); },
          [=](RunConfig& c, const std::string& v, int line) { c.sim.*field = parse_number(v, name, line) * scale; }};
}

inline Key species_key(const std::string& name, double scale, double AtomSpecies::*field) {
  return {name, [=](const RunConfig& c) { return encode_scaled(c.sim.species.*field, scale); },
          [=](RunConfig& c, const std::string& v, int line) {
            c.sim.species.*field = parse_number(v, name, line) * scale;
          }};
}

inline Key laser_key(const std::string& name, double scale, double LaserConfig::*field) {
  return {name, [=](const RunConfig& c) { return encode_scaled(c.sim.laser.*field, scale); },
          [=](RunConfig& c, const std::string& v, int line) {
            c.sim.laser.*field = parse_number(v, name, line) * scale;
          }};
}

template <class E, class Get>
Key enum_key(const std::string& name, const EnumNames<E>& names, Get get) {
  return {name, [=, &names](const RunConfig& c) { return names.to(get(const_cast<RunConfig&>(c))); },
          [=, &names](RunConfig& c, const std::string& v, int line) { get(c) = names.from(v, name, line); }};
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

inline const std::vector<Key>& keys() {
  static const std::vector<Key> k = [] {
    const double mega = 1e6;
    std::vector<Key> v;
    v.push_back(species_key("mass_kg", 1.0, &AtomSpecies::mass));
    v.push_back(species_key("wavelength_nm", 1e-9, &AtomSpecies::wavelength));
    v.push_back(species_key("gamma_total_mrad_per_s", mega, &AtomSpecies::gamma_total));
    v.push_back(species_key("gamma_l_mrad_per_s", mega, &AtomSpecies::gamma_l));
    v.push_back(species_key("gamma_g_mrad_per_s", mega, &AtomSpecies::gamma_g));
    v.push_back(species_key("gamma_e_mrad_per_s", mega, &AtomSpecies::gamma_e));
    v.push_back(species_key("hfs_ghz", kTwoPi * 1e9, &AtomSpecies::hyperfine_splitting));
    v.push_back(laser_key("rabi1_mrad_per_s", mega, &LaserConfig::rabi1));
    v.push_back(laser_key("rabi2_mrad_per_s", mega, &LaserConfig::rabi2));
    v.push_back(laser_key("delta_single_ghz", kTwoPi * 1e9, &LaserConfig::delta_single));
    v.push_back(laser_key("delta_two_khz", kTwoPi * 1e3, &LaserConfig::delta_two));
    v.push_back(laser_key("delta_ac_khz", kTwoPi * 1e3, &LaserConfig::delta_ac));
    v.push_back(laser_key("theta_rad", 1.0, &LaserConfig::theta));
    v.push_back(enum_key("geometry", kGeometry, [](RunConfig& c) -> Geometry& { return c.sim.laser.geometry; }));
    v.push_back({"n_r", [](const RunConfig& c) { return std::to_string(c.sim.n_r); },
                 [](RunConfig& c, const std::string& s, int line) {
                   const long long n = parse_integer(s, "n_r", line);
                   if (n < 1 || n % 2 == 0)
                     throw ConfigError("line " + std::to_string(line) + ": key 'n_r': must be odd and >= 1");
                   c.sim.n_r = static_cast<int>(n);
                 }});
    v.push_back(scaled("t_free_ms", 1e-3, &SimulationConfig::T));
    v.push_back(scaled("tau_d_us", 1e-6, &SimulationConfig::tau_d));
    v.push_back(scaled("t_pi_us", 1e-6, &SimulationConfig::table_t_pi));
    v.push_back(scaled("t_half_pi_us", 1e-6, &SimulationConfig::table_t_half_pi));
    v.push_back(enum_key("pulse_mode", kPulseMode,
                         [](RunConfig& c) -> PulseCalibration& { return c.sim.pulse_calibration; }));
    v.push_back(scaled("a_true_m_per_s2", 1.0, &SimulationConfig::a_true));
    v.push_back(scaled("mot_temperature_uk", 1e-6, &SimulationConfig::mot_temperature));
    v.push_back(scaled("cloud_sigma_x_mm", 1e-3, &SimulationConfig::cloud_sigma_x));
    v.push_back({"n_samples", [](const RunConfig& c) { return std::to_string(c.sim.n_samples); },
                 [](RunConfig& c, const std::string& s, int line) {
                   const long long n = parse_integer(s, "n_samples", line);
                   if (n < 2) throw ConfigError("line " + std::to_string(line) + ": key 'n_samples': must be >= 2");
                   c.sim.n_samples = static_cast<int>(n);
                 }});
    v.push_back(scaled("epsilon_m", 1.0, &SimulationConfig::epsilon_m));
    v.push_back(enum_key("measurement_model", kMeasurement,
                         [](RunConfig& c) -> MeasurementModel& { return c.sim.measurement_model; }));
    v.push_back({"seed", [](const RunConfig& c) { return std::to_string(c.sim.rng_seed); },
                 [](RunConfig& c, const std::string& s, int line) {
                   const std::string t = trim(s);
                   char* end = nullptr;
                   errno = 0;
                   const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
                   if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE)
                     throw ConfigError("line " + std::to_string(line) + ": key 'seed': invalid unsigned integer");
                   c.sim.rng_seed = v;
                 }});
    v.push_back(enum_key("q_mode", kQMode, [](RunConfig& c) -> QMode& { return c.sim.q_mode; }));
    v.push_back(enum_key("cov_mode", kCovMode, [](RunConfig& c) -> CovMode& { return c.sim.cov_mode; }));
    v.push_back(enum_key("ratio_form", kRatioForm, [](RunConfig& c) -> RatioForm& { return c.sim.ratio_form; }));
    v.push_back(scaled("var_q_normalization", 1.0, &SimulationConfig::var_q_normalization));
    v.push_back(enum_key("sign_schedule", kSigns, [](RunConfig& c) -> SignSchedule& { return c.sim.sign_schedule; }));
    v.push_back({"steps_per_pi", [](const RunConfig& c) { return std::to_string(c.sim.steps_per_pi); },
                 [](RunConfig& c, const std::string& s, int line) {
                   const long long n = parse_integer(s, "steps_per_pi", line);
                   if (n < 1) throw ConfigError("line " + std::to_string(line) + ": key 'steps_per_pi': must be >= 1");
                   c.sim.steps_per_pi = static_cast<int>(n);
                 }});
    v.push_back(enum_key("drift_during_pulses", kBool,
                         [](RunConfig& c) -> bool& { return c.sim.drift_during_pulses; }));
    v.push_back({"replicates", [](const RunConfig& c) { return std::to_string(c.sweep.replicates); },
                 [](RunConfig& c, const std::string& s, int line) {
                   const long long n = parse_integer(s, "replicates", line);
                   if (n < 1) throw ConfigError("line " + std::to_string(line) + ": key 'replicates': must be >= 1");
                   c.sweep.replicates = static_cast<int>(n);
                 }});
    v.push_back({"n_r_values", [](const RunConfig& c) { return join_ints(c.sweep.n_r_values); },
                 [](RunConfig& c, const std::string& s, int line) {
                   c.sweep.n_r_values.clear();
                   for (const auto& item : split_list(s)) {
                     const long long n = parse_integer(item, "n_r_values", line);
                     if (n < 1 || n % 2 == 0)
                       throw ConfigError("line " + std::to_string(line) + ": key 'n_r_values': values must be odd and >= 1");
                     c.sweep.n_r_values.push_back(static_cast<int>(n));
                   }
                 }});
    v.push_back({"axis_values", [](const RunConfig& c) { return join_doubles(c.sweep.axis_values); },
                 [](RunConfig& c, const std::string& s, int line) {
                   c.sweep.axis_values.clear();
                   for (const auto& item : split_list(s))
                     c.sweep.axis_values.push_back(parse_number(item, "axis_values", line));
                 }});
    v.push_back({"oracle_tolerance", [](const RunConfig& c) { return format_double(c.sweep.oracle_tolerance); },
                 [](RunConfig& c, const std::string& s, int line) {
                   c.sweep.oracle_tolerance = parse_number(s, "oracle_tolerance", line);
                 }});
    return v;
  }();
  return k;
}

}  // namespace detail

inline std::vector<int> default_n_r_grid() {
  std::vector<int> v;
  for (int n = 1; n <= 41; n += 2) v.push_back(n);
  return v;
}

inline RunConfig default_run_config() {
  RunConfig c;
  c.sweep.n_r_values = default_n_r_grid();
  return c;
}

inline ParsedConfig parse_config_text(const std::string& text) {
  ParsedConfig out;
  out.config = default_run_config();
  std::map<std::string, const detail::Key*> index;
  for (const auto& k : detail::keys()) index[k.name] = &k;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string value = detail::trim(body.substr(eq + 1));
    const auto it = index.find(key);
    if (it == index.end()) throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    it->second->read(out.config, value, line);
  }
  for (const auto& k : detail::keys())
    if (!seen.count(k.name)) out.fallbacks.push_back(k.name + " = " + k.write(out.config));
  try {
    out.config.sim.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return out;
}

inline std::string write_config(const RunConfig& c) {
  std::string s;
  for (const auto& k : detail::keys()) s += k.name + " = " + k.write(c) + "\n";
  return s;
}

// FNV-1a over the canonical serialization.
inline std::uint64_t fingerprint(const RunConfig& c) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : write_config(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace lmtai
