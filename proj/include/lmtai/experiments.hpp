#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmtai/ensemble.hpp"
#include "lmtai/physics.hpp"

namespace lmtai {

enum class SweepAxis { PulseCount, SingleDetuning, TwoPhotonDetuning, MeasurementError };

// Axis values: N_R, Delta in GHz, delta in kHz, epsilon_m as a fraction.
struct SweepSpec {
  SimulationConfig base;
  SweepAxis axis = SweepAxis::PulseCount;
  std::vector<double> values;
  std::vector<std::uint64_t> replicate_seeds;
};

struct SweepRow {
  double value = 0.0;
  double fom = 0.0;
  double var_dev_a = 0.0;
  double dc_offset = 0.0;
  double empirical_var_dev_a = 0.0;
  double mean_dev_a = 0.0;
  double mean_q_per_pulse = 0.0;
  double fom_spread = 0.0;
  int seeds_ok = 0;
  int degenerate_samples = 0;
  std::string error;
};

inline std::vector<std::uint64_t> replicate_seeds(std::uint64_t base, int count) {
  std::vector<std::uint64_t> s;
  for (int r = 0; r < count; ++r) s.push_back(base + static_cast<std::uint64_t>(r));
  return s;
}

inline SimulationConfig with_axis(SimulationConfig c, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::PulseCount: {
      const double r = std::round(value);
      if (r != value || r < 1 || static_cast<long long>(r) % 2 == 0)
        throw ValidationError("pulse-count values must be odd integers");
      c.n_r = static_cast<int>(r);
      break;
    }
    case SweepAxis::SingleDetuning: c.laser.delta_single = kTwoPi * 1e9 * value; break;
    case SweepAxis::TwoPhotonDetuning: c.laser.delta_two = kTwoPi * 1e3 * value; break;
    case SweepAxis::MeasurementError: c.epsilon_m = value; break;
  }
  return c;
}

inline void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw ValidationError("sweep: no axis values");
  for (std::size_t i = 1; i < spec.values.size(); ++i)
    if (!(spec.values[i] > spec.values[i - 1])) throw ValidationError("sweep: values must be strictly increasing");
  if (spec.replicate_seeds.empty()) throw ValidationError("sweep: no replicate seeds");
  for (double v : spec.values) with_axis(spec.base, spec.axis, v).validate();
}

namespace detail {

inline SweepRow reduce_row(double value, const std::vector<EnsembleResult>& results,
                           const std::vector<std::string>& errors) {
  SweepRow row;
  row.value = value;
  std::vector<double> foms;
  for (const auto& r : results) {
    foms.push_back(r.budget.fom);
    row.fom += r.budget.fom;
    row.var_dev_a += r.budget.var_dev_a;
    row.dc_offset += r.budget.dc_offset;
    row.empirical_var_dev_a += r.budget.empirical_var_dev_a;
    row.mean_dev_a += r.budget.mean_dev_a;
    row.mean_q_per_pulse += r.mean_q_per_pulse;
    row.degenerate_samples += r.degenerate_samples;
  }
  row.seeds_ok = static_cast<int>(results.size());
  if (!results.empty()) {
    const double n = static_cast<double>(results.size());
    row.fom /= n;
    row.var_dev_a /= n;
    row.dc_offset /= n;
    row.empirical_var_dev_a /= n;
    row.mean_dev_a /= n;
    row.mean_q_per_pulse /= n;
    row.fom_spread = foms.size() > 1 ? std::sqrt(sample_variance(foms)) : 0.0;
  }
  for (const auto& e : errors) row.error += (row.error.empty() ? "" : "; ") + e;
  return row;
}

}  // namespace detail

// One ensemble per (value, seed). The measurement-error axis reuses the dynamics.
inline std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned threads = worker_count()) {
  validate(spec);
  std::vector<std::vector<EnsembleResult>> results(spec.values.size());
  std::vector<std::vector<std::string>> errors(spec.values.size());
  if (spec.axis == SweepAxis::MeasurementError) {
    for (auto seed : spec.replicate_seeds) {
      SimulationConfig c = spec.base;
      c.rng_seed = seed;
      std::vector<SampleOutcome> outcomes;
      try {
        outcomes = simulate_samples(c, c.a_true, threads);
      } catch (const std::exception& e) {
        for (auto& err : errors) err.push_back("seed " + std::to_string(seed) + ": " + e.what());
        continue;
      }
      for (std::size_t i = 0; i < spec.values.size(); ++i) {
        try {
          results[i].push_back(summarize(with_axis(c, spec.axis, spec.values[i]), outcomes));
        } catch (const std::exception& e) {
          errors[i].push_back("seed " + std::to_string(seed) + ": " + e.what());
        }
      }
    }
  } else {
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
      for (auto seed : spec.replicate_seeds) {
        SimulationConfig c = with_axis(spec.base, spec.axis, spec.values[i]);
        c.rng_seed = seed;
        try {
          results[i].push_back(run_ensemble(c, c.a_true, threads));
        } catch (const std::exception& e) {
          errors[i].push_back("seed " + std::to_string(seed) + ": " + e.what());
        }
      }
    }
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < spec.values.size(); ++i)
    rows.push_back(detail::reduce_row(spec.values[i], results[i], errors[i]));
  return rows;
}

struct MinFom {
  double value = 0.0;
  double fom = 0.0;
};

inline MinFom find_min_fom(const std::vector<SweepRow>& rows) {
  std::optional<MinFom> best;
  for (const auto& r : rows) {
    if (r.seeds_ok == 0 || !std::isfinite(r.fom)) continue;
    if (!best || r.fom < best->fom || (r.fom == best->fom && r.value < best->value))
      best = MinFom{r.value, r.fom};
  }
  if (!best) throw std::runtime_error("find_min_fom: no usable rows");
  return *best;
}

// FOM-versus-N_R curve for each value of a second axis.
struct GridCurve {
  double axis_value = 0.0;
  std::vector<SweepRow> rows;
  MinFom minimum;
  bool has_minimum = false;
};

inline std::vector<GridCurve> pulse_grid(const SimulationConfig& base, SweepAxis axis,
                                         const std::vector<double>& axis_values,
                                         const std::vector<int>& n_r_values,
                                         const std::vector<std::uint64_t>& seeds,
                                         unsigned threads = worker_count()) {
  std::vector<double> nr(n_r_values.begin(), n_r_values.end());
  std::vector<GridCurve> out(axis_values.size());
  if (axis == SweepAxis::MeasurementError) {
    // Dynamics are shared across epsilon_m values: sweep epsilon_m at each N_R.
    std::vector<std::vector<SweepRow>> by_nr;
    for (int n : n_r_values) {
      SweepSpec s{base, SweepAxis::MeasurementError, axis_values, seeds};
      s.base.n_r = n;
      by_nr.push_back(sweep(s, threads));
    }
    for (std::size_t a = 0; a < axis_values.size(); ++a) {
      out[a].axis_value = axis_values[a];
      for (std::size_t k = 0; k < n_r_values.size(); ++k) {
        SweepRow r = by_nr[k][a];
        r.value = nr[k];
        out[a].rows.push_back(r);
      }
    }
  } else {
    for (std::size_t a = 0; a < axis_values.size(); ++a) {
      SweepSpec s{with_axis(base, axis, axis_values[a]), SweepAxis::PulseCount, nr, seeds};
      out[a].axis_value = axis_values[a];
      out[a].rows = sweep(s, threads);
    }
  }
  for (auto& c : out) {
    try {
      c.minimum = find_min_fom(c.rows);
      c.has_minimum = true;
    } catch (const std::exception&) {
      c.has_minimum = false;
    }
  }
  return out;
}

}  // namespace lmtai
