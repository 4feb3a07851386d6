#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmtai/amplitude.hpp"
#include "lmtai/loss_stats.hpp"
#include "lmtai/parallel.hpp"
#include "lmtai/physics.hpp"

namespace lmtai {

class SampleError : public std::runtime_error {
public:
  SampleError(std::size_t index, const std::string& what)
      : std::runtime_error("sample " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const { return index_; }

private:
  std::size_t index_;
};

enum class Stream : std::uint32_t { Atom = 1, Measurement = 2 };

// Independent generator per (seed, sample index, purpose).
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

inline double thermal_velocity_sigma(double mot_temperature, const AtomSpecies& s) {
  return std::sqrt(kBoltzmann * mot_temperature / s.mass);
}

inline AtomSample sample_atom(std::size_t index, std::uint64_t seed, double mot_temperature,
                              const AtomSpecies& species, double cloud_sigma_x) {
  auto rng = sample_rng(seed, index, Stream::Atom);
  std::normal_distribution<double> normal(0.0, 1.0);
  AtomSample a;
  a.v0 = thermal_velocity_sigma(mot_temperature, species) * normal(rng);
  a.x0 = cloud_sigma_x * normal(rng);
  return a;
}

inline std::vector<AtomSample> sample_atoms(std::size_t n, std::uint64_t seed, double mot_temperature,
                                            const AtomSpecies& species, double cloud_sigma_x) {
  std::vector<AtomSample> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = sample_atom(i, seed, mot_temperature, species, cloud_sigma_x);
  return out;
}

template <class Rng>
double apply_measurement_error(double pop_e, double epsilon_m, Rng& rng,
                               MeasurementModel model = MeasurementModel::Multiplicative) {
  if (epsilon_m == 0.0) return pop_e;
  if (model == MeasurementModel::Deterministic) return pop_e * (1.0 - epsilon_m);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double v = pop_e * (1.0 + epsilon_m * normal(rng));
  return std::clamp(v, 0.0, 1.0);
}

struct SampleOutcome {
  AtomSample atom;
  RunOutcome run;
  bool degenerate = false;
};

// Dynamics for every sample; independent of the measurement model.
inline std::vector<SampleOutcome> simulate_samples(const SimulationConfig& cfg, double accel,
                                                   unsigned threads = worker_count()) {
  cfg.validate();
  const PulseSequence seq = cfg.sequence();
  const PulseParams p = pulse_params(cfg);
  const double alpha = alpha_scale(seq, cfg.laser.k_eff(cfg.species), cfg.laser.theta);
  std::vector<SampleOutcome> out(static_cast<std::size_t>(cfg.n_samples));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    try {
      SampleOutcome s;
      s.atom = sample_atom(i, cfg.rng_seed, cfg.mot_temperature, cfg.species, cfg.cloud_sigma_x);
      const QuantumState st = run_sequence(s.atom, cfg, seq, p, accel);
      s.run.pop_e = std::norm(st.c_e);
      s.run.pop_g = std::norm(st.c_g);
      s.run.q_tot = st.q_tot;
      const double den = 1.0 - s.run.pop_e - s.run.q_tot;
      s.degenerate = !(den > 0.0);
      s.run.phase = std::atan2(std::sqrt(s.run.pop_e), std::sqrt(std::max(den, 0.0)));
      s.run.dev_a = alpha * s.run.phase;
      out[i] = s;
    } catch (const std::exception& e) {
      throw SampleError(i, e.what());
    }
  });
  return out;
}

struct EnsembleResult {
  std::vector<SampleOutcome> outcomes;
  std::vector<double> measured_pop_e;
  std::vector<double> dev_a;
  PopulationStats stats;
  ErrorBudget budget;
  double alpha = 0.0;
  double mean_q_per_pulse = 0.0;
  int degenerate_samples = 0;
  std::uint64_t rng_seed = 0;
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Measurement model, Q bookkeeping per q_mode, and the error budget.
inline EnsembleResult summarize(const SimulationConfig& cfg, std::vector<SampleOutcome> outcomes) {
  const std::size_t n = outcomes.size();
  if (n < 2) throw std::invalid_argument("summarize: need at least two samples");
  const PulseSequence seq = cfg.sequence();
  const double m = seq.q_weight();
  const double t_pi = cfg.t_pi();
  const double gamma_l = cfg.species.gamma_l;

  EnsembleResult r;
  r.rng_seed = cfg.rng_seed;
  r.alpha = alpha_scale(seq, cfg.laser.k_eff(cfg.species), cfg.laser.theta);

  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = outcomes[i].run.q_tot;
    r.degenerate_samples += outcomes[i].degenerate;
  }
  const double mean_q_raw = mean_of(q);
  r.mean_q_per_pulse = mean_q_raw / m;

  r.measured_pop_e.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = sample_rng(cfg.rng_seed, i, Stream::Measurement);
    r.measured_pop_e[i] =
        apply_measurement_error(outcomes[i].run.pop_e, cfg.epsilon_m, rng, cfg.measurement_model);
  }

  PopulationStats& s = r.stats;
  s.n = static_cast<int>(n);
  s.q_mode = cfg.q_mode;
  s.mean_pop_e = mean_of(r.measured_pop_e);
  s.var_pop_e = sample_variance(r.measured_pop_e);
  std::vector<double> q_used(n, 0.0);
  if (cfg.q_mode == QMode::Constant) {
    std::fill(q_used.begin(), q_used.end(), mean_q_raw);
    s.mean_q = mean_q_raw;
  } else if (cfg.q_mode == QMode::Random) {
    q_used = q;
    s.mean_q = mean_q_raw;
    const double q_pulse = r.mean_q_per_pulse;
    if (gamma_l * t_pi > 0.0) {
      const double norm = cfg.var_q_normalization;
      s.var_q = m * m * variance_q(q_pulse, gamma_l, t_pi) / norm;
      s.cov_eq = cfg.cov_mode == CovMode::Binomial
                     ? covariance_ce_q(q_pulse, m, gamma_l, t_pi, CovMode::Binomial) / norm
                     : covariance_ce_q(q_pulse, m, gamma_l, t_pi, CovMode::VarianceRatio, s.var_q);
      const double bound = std::sqrt(s.var_pop_e * s.var_q);
      if (std::abs(s.cov_eq) > bound) {
        s.cov_eq = std::copysign(bound, s.cov_eq);
        s.cov_clamped = true;
      }
    }
  }

  r.dev_a.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = r.measured_pop_e[i];
    const double y = 1.0 - x - q_used[i];
    r.dev_a[i] = r.alpha * std::atan2(std::sqrt(x), std::sqrt(std::max(y, 0.0)));
  }
  r.budget = accel_error_budget(s, r.alpha, cfg.a_true, r.dev_a, cfg.ratio_form);
  r.outcomes = std::move(outcomes);
  return r;
}

inline EnsembleResult run_ensemble(const SimulationConfig& cfg, double accel,
                                   unsigned threads = worker_count()) {
  return summarize(cfg, simulate_samples(cfg, accel, threads));
}

}  // namespace lmtai
