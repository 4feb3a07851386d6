#include "lmtai/cli.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lmtai/density.hpp"
#include "lmtai/experiments.hpp"

namespace lmtai {

namespace {

std::string num(double v) { return format_double(v); }
std::string num(int v) { return std::to_string(v); }

std::string seed_list(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) s += (i ? " " : "") + std::to_string(seeds[i]);
  return s;
}

void add_footer(ResultTable& t, const RunConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  t.footer.push_back("fingerprint=" + hex64(fingerprint(cfg)));
  t.footer.push_back("seeds=" + seed_list(seeds));
}

const std::vector<std::string> kRowColumns{
    "fom_m2_per_s4",        "var_dev_a_m2_per_s4", "dc_offset_m2_per_s4", "empirical_var_dev_a_m2_per_s4",
    "mean_dev_a_m_per_s2", "mean_q_per_pulse",    "fom_spread_m2_per_s4", "seeds_ok",
    "degenerate_samples",  "error"};

std::vector<std::string> row_cells(const SweepRow& r) {
  std::string err = r.error;
  for (auto& ch : err)
    if (ch == ',' || ch == '\n') ch = ';';
  return {num(r.fom),          num(r.var_dev_a),        num(r.dc_offset),
          num(r.empirical_var_dev_a), num(r.mean_dev_a), num(r.mean_q_per_pulse),
          num(r.fom_spread),   num(r.seeds_ok),         num(r.degenerate_samples),
          err};
}

std::vector<double> axis_values_or(const RunConfig& cfg, std::vector<double> fallback) {
  return cfg.sweep.axis_values.empty() ? fallback : cfg.sweep.axis_values;
}

std::vector<int> n_r_values(const RunConfig& cfg) {
  return cfg.sweep.n_r_values.empty() ? default_n_r_grid() : cfg.sweep.n_r_values;
}

ResultTable simulate(const RunConfig& cfg) {
  const EnsembleResult r = run_ensemble(cfg.sim, cfg.sim.a_true);
  ResultTable t;
  t.header = {"sample",   "x0_m",          "v0_m_per_s",         "pop_e",     "pop_g",
              "q_tot",    "measured_pop_e", "phase_rad",         "dev_a_m_per_s2", "degenerate"};
  for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
    const auto& o = r.outcomes[i];
    t.rows.push_back({std::to_string(i), num(o.atom.x0), num(o.atom.v0), num(o.run.pop_e),
                      num(o.run.pop_g), num(o.run.q_tot), num(r.measured_pop_e[i]),
                      num(r.dev_a[i] / r.alpha), num(r.dev_a[i]), o.degenerate ? "1" : "0"});
  }
  add_footer(t, cfg, {cfg.sim.rng_seed});
  const auto& b = r.budget;
  t.footer.push_back("fom=" + num(b.fom) + " var_dev_a=" + num(b.var_dev_a) +
                     " dc_offset=" + num(b.dc_offset) + " empirical_var_dev_a=" + num(b.empirical_var_dev_a));
  t.footer.push_back("mean_dev_a=" + num(b.mean_dev_a) + " r1_mean=" + num(b.r1_mean) +
                     " r1_var=" + num(b.r1_var) + " alpha=" + num(r.alpha));
  t.footer.push_back("mean_pop_e=" + num(r.stats.mean_pop_e) + " var_pop_e=" + num(r.stats.var_pop_e) +
                     " mean_q=" + num(r.stats.mean_q) + " var_q=" + num(r.stats.var_q) +
                     " cov_eq=" + num(r.stats.cov_eq) + " mean_q_per_pulse=" + num(r.mean_q_per_pulse));
  return t;
}

ResultTable sweep_pulses(const RunConfig& cfg) {
  const auto seeds = replicate_seeds(cfg.sim.rng_seed, cfg.sweep.replicates);
  std::vector<double> values;
  for (int n : n_r_values(cfg)) values.push_back(n);
  const auto rows = sweep(SweepSpec{cfg.sim, SweepAxis::PulseCount, values, seeds});
  ResultTable t;
  t.header = {"n_r"};
  t.header.insert(t.header.end(), kRowColumns.begin(), kRowColumns.end());
  for (const auto& r : rows) {
    std::vector<std::string> cells{num(static_cast<int>(r.value))};
    auto rest = row_cells(r);
    cells.insert(cells.end(), rest.begin(), rest.end());
    t.rows.push_back(cells);
  }
  add_footer(t, cfg, seeds);
  try {
    const MinFom m = find_min_fom(rows);
    t.footer.push_back("min_fom_n_r=" + num(static_cast<int>(m.value)) + " min_fom=" + num(m.fom));
  } catch (const std::exception& e) {
    t.footer.push_back(std::string("min_fom=none ") + e.what());
  }
  return t;
}

ResultTable grid(const RunConfig& cfg, SweepAxis axis, const std::string& axis_column,
                 std::vector<double> defaults) {
  const auto seeds = replicate_seeds(cfg.sim.rng_seed, cfg.sweep.replicates);
  const auto values = axis_values_or(cfg, defaults);
  SweepSpec check{cfg.sim, axis, values, seeds};
  validate(check);
  const auto curves = pulse_grid(cfg.sim, axis, values, n_r_values(cfg), seeds);
  ResultTable t;
  t.header = {axis_column, "n_r"};
  t.header.insert(t.header.end(), kRowColumns.begin(), kRowColumns.end());
  t.header.push_back("is_min");
  for (const auto& c : curves) {
    for (const auto& r : c.rows) {
      std::vector<std::string> cells{num(c.axis_value), num(static_cast<int>(r.value))};
      auto rest = row_cells(r);
      cells.insert(cells.end(), rest.begin(), rest.end());
      cells.push_back(c.has_minimum && c.minimum.value == r.value ? "1" : "0");
      t.rows.push_back(cells);
    }
  }
  add_footer(t, cfg, seeds);
  return t;
}

std::pair<ResultTable, bool> oracle_check(const RunConfig& cfg) {
  ResultTable t;
  t.header = {"pulse", "pop_g", "rho_gg", "pop_e", "rho_ee", "q", "loss", "max_discrepancy", "within_bound"};
  bool ok = true;
  for (auto kind : {SegmentKind::HalfPi, SegmentKind::Pi}) {
    const OracleResult r = oracle_compare(cfg.sim, kind);
    const bool within = r.max <= cfg.sweep.oracle_tolerance;
    ok = ok && within;
    t.rows.push_back({kind == SegmentKind::Pi ? "pi" : "half_pi", num(r.pop_g), num(r.rho_gg),
                      num(r.pop_e), num(r.rho_ee), num(r.q), num(r.loss), num(r.max), within ? "1" : "0"});
  }
  add_footer(t, cfg, {cfg.sim.rng_seed});
  t.footer.push_back("oracle_tolerance=" + num(cfg.sweep.oracle_tolerance));
  return {t, ok};
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"simulate",          "sweep-pulses",      "sweep-detuning",
                                          "sweep-two-photon", "sweep-measurement", "oracle-check"};
  return c;
}

ParsedConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_overrides(RunConfig& cfg, const CliRequest& req) {
  if (req.seed) cfg.sim.rng_seed = *req.seed;
  if (req.samples) {
    if (*req.samples < 2) throw ConfigError("--samples must be >= 2");
    cfg.sim.n_samples = *req.samples;
  }
  if (req.q_mode) cfg.sim.q_mode = detail::kQMode.from(*req.q_mode, "--q-mode", 0);
  if (req.pulse_mode) cfg.sim.pulse_calibration = detail::kPulseMode.from(*req.pulse_mode, "--pulse-mode", 0);
  cfg.sim.validate();
}

std::string render_table(const ResultTable& t) {
  std::string s;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    s += "\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  for (const auto& f : t.footer) s += "# " + f + "\n";
  return s;
}

void write_table(const ResultTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
  out << render_table(t);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::pair<ResultTable, bool> run_command(const std::string& command, const RunConfig& cfg) {
  if (command == "simulate") return {simulate(cfg), true};
  if (command == "sweep-pulses") return {sweep_pulses(cfg), true};
  if (command == "sweep-detuning")
    return {grid(cfg, SweepAxis::SingleDetuning, "delta_single_ghz", {1, 3, 5, 7, 9, 12, 20}), true};
  if (command == "sweep-two-photon")
    return {grid(cfg, SweepAxis::TwoPhotonDetuning, "delta_two_khz", {0, 63}), true};
  if (command == "sweep-measurement")
    return {grid(cfg, SweepAxis::MeasurementError, "epsilon_m", {0.02, 0.04, 0.1, 0.2, 0.5}), true};
  if (command == "oracle-check") return oracle_check(cfg);
  throw std::invalid_argument("unknown command '" + command + "'");
}

int dispatch(const CliRequest& req, std::ostream& log) {
  try {
    ParsedConfig parsed = parse_config(req.config_path);
    for (const auto& f : parsed.fallbacks) log << "default: " << f << "\n";
    apply_overrides(parsed.config, req);
    auto [table, ok] = run_command(req.command, parsed.config);
    write_table(table, req.out_path);
    if (!ok) {
      log << "error: oracle: discrepancy exceeds tolerance\n";
      return kExitOracle;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "error: config: " << e.what() << "\n";
  } catch (const ValidationError& e) {
    log << "error: validation: " << e.what() << "\n";
  } catch (const std::exception& e) {
    log << "error: runtime: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace lmtai
