#include <gtest/gtest.h>

#include <cmath>

#include "lmtai/ensemble.hpp"

using namespace lmtai;

namespace {

SimulationConfig small(int n_r = 3, int n = 40) {
  SimulationConfig c;
  c.n_r = n_r;
  c.n_samples = n;
  c.steps_per_pi = 200;
  return c;
}

}  // namespace

TEST(Sampling, ThermalVelocityScale) {
  AtomSpecies sp;
  const double s = thermal_velocity_sigma(2e-6, sp);
  EXPECT_NEAR(s, std::sqrt(1.380649e-23 * 2e-6 / 1.419e-25), 1e-15);
  EXPECT_NEAR(s, 1.394e-2, 1e-5);
}

TEST(Sampling, MomentsConverge) {
  AtomSpecies sp;
  const auto atoms = sample_atoms(10000, 11, 2e-6, sp, 1e-3);
  std::vector<double> v, x;
  for (const auto& a : atoms) {
    v.push_back(a.v0);
    x.push_back(a.x0);
  }
  EXPECT_NEAR(std::sqrt(sample_variance(v)), thermal_velocity_sigma(2e-6, sp), 0.02 * 1.394e-2);
  EXPECT_NEAR(std::sqrt(sample_variance(x)), 1e-3, 0.02e-3);
  EXPECT_NEAR(mean_of(v), 0.0, 4 * 1.394e-2 / 100);
}

TEST(Sampling, IndexedStreamsAreIndependentOfCount) {
  AtomSpecies sp;
  const auto a = sample_atoms(10, 5, 2e-6, sp, 1e-3);
  const auto b = sample_atoms(1000, 5, 2e-6, sp, 1e-3);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(a[i].x0, b[i].x0);
    EXPECT_EQ(a[i].v0, b[i].v0);
  }
  EXPECT_NE(sample_atom(0, 5, 2e-6, sp, 1e-3).v0, sample_atom(0, 6, 2e-6, sp, 1e-3).v0);
  EXPECT_EQ(sample_atom(3, 5, 0.0, sp, 0.0).v0, 0.0);
}

TEST(Measurement, MultiplicativeNoiseStatistics) {
  std::mt19937_64 rng(3);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = apply_measurement_error(0.4, 0.05, rng);
    s += v;
    s2 += v * v;
  }
  const double m = s / n;
  EXPECT_NEAR(m, 0.4, 1e-3);
  EXPECT_NEAR(std::sqrt(s2 / n - m * m), 0.02, 2e-4);
}

TEST(Measurement, ClampAndModels) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = apply_measurement_error(0.99, 0.5, rng);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_EQ(apply_measurement_error(0.4, 0.0, rng), 0.4);
  EXPECT_DOUBLE_EQ(apply_measurement_error(0.4, 0.1, rng, MeasurementModel::Deterministic), 0.36);
}

TEST(Ensemble, IdenticalAcrossThreadCounts) {
  const auto cfg = small(3, 33);
  const auto a = run_ensemble(cfg, cfg.a_true, 1);
  for (unsigned t : {4u, 16u}) {
    const auto b = run_ensemble(cfg, cfg.a_true, t);
    ASSERT_EQ(a.dev_a.size(), b.dev_a.size());
    for (std::size_t i = 0; i < a.dev_a.size(); ++i) {
      EXPECT_EQ(a.dev_a[i], b.dev_a[i]);
      EXPECT_EQ(a.outcomes[i].run.q_tot, b.outcomes[i].run.q_tot);
    }
    EXPECT_EQ(a.budget.fom, b.budget.fom);
  }
}

TEST(Ensemble, SeedChangesResult) {
  auto cfg = small(1, 20);
  const auto a = run_ensemble(cfg, cfg.a_true, 1);
  cfg.rng_seed = 2;
  const auto b = run_ensemble(cfg, cfg.a_true, 1);
  EXPECT_NE(a.budget.fom, b.budget.fom);
  EXPECT_EQ(b.rng_seed, 2u);
}

TEST(Ensemble, LossModesOrderVariance) {
  auto cfg = small(5, 60);
  const auto outcomes = simulate_samples(cfg, cfg.a_true, 1);
  cfg.q_mode = QMode::Zero;
  const auto z = summarize(cfg, outcomes);
  cfg.q_mode = QMode::Constant;
  const auto c = summarize(cfg, outcomes);
  cfg.q_mode = QMode::Random;
  const auto r = summarize(cfg, outcomes);
  EXPECT_EQ(z.stats.mean_q, 0.0);
  EXPECT_EQ(z.stats.var_q, 0.0);
  EXPECT_GT(c.stats.mean_q, 0.0);
  EXPECT_EQ(c.stats.var_q, 0.0);
  EXPECT_GT(r.stats.var_q, 0.0);
  EXPECT_LT(r.stats.cov_eq, 0.0);
  EXPECT_LE(std::abs(r.stats.cov_eq), std::sqrt(r.stats.var_pop_e * r.stats.var_q) * (1 + 1e-12));
  EXPECT_GE(r.budget.var_dev_a, c.budget.var_dev_a);
  EXPECT_NEAR(c.budget.var_dev_a, z.budget.var_dev_a, 0.05 * z.budget.var_dev_a);
}

TEST(Ensemble, SummaryBookkeeping) {
  auto cfg = small(3, 30);
  cfg.epsilon_m = 0.0;
  const auto r = run_ensemble(cfg, cfg.a_true, 1);
  const double m = cfg.sequence().q_weight();
  std::vector<double> q;
  for (const auto& o : r.outcomes) q.push_back(o.run.q_tot);
  EXPECT_DOUBLE_EQ(r.mean_q_per_pulse, mean_of(q) / m);
  for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
    EXPECT_EQ(r.measured_pop_e[i], r.outcomes[i].run.pop_e);
    EXPECT_DOUBLE_EQ(r.dev_a[i], r.outcomes[i].run.dev_a);
  }
  EXPECT_EQ(r.budget.fom, r.budget.dc_offset + r.budget.var_dev_a);
  EXPECT_DOUBLE_EQ(r.alpha, alpha_scale(cfg.sequence(), cfg.laser.k_eff(cfg.species), 0.0));
}

TEST(Ensemble, InvalidConfigRejected) {
  auto cfg = small();
  cfg.n_samples = 1;
  EXPECT_THROW(run_ensemble(cfg, 0.0, 1), ValidationError);
  EXPECT_THROW(summarize(small(), {}), std::invalid_argument);
}

TEST(Parallel, LowestIndexErrorWins) {
  std::vector<int> out(100, 0);
  try {
    parallel_for(100, 4, [&](std::size_t i) {
      if (i == 70 || i == 30) throw SampleError(i, "boom");
      out[i] = 1;
    });
    FAIL();
  } catch (const SampleError& e) {
    EXPECT_EQ(e.index(), 30u);
  }
  EXPECT_EQ(out[99], 1);
}
