#include <gtest/gtest.h>

#include <cmath>

#include "lmtai/density.hpp"

using namespace lmtai;

namespace {

DensityMatrix3 mixed() {
  DensityMatrix3 a = pure_state(std::sqrt(0.5), cd{0.0, std::sqrt(0.3)}, cd{0.3, 0.2});
  const DensityMatrix3 b = pure_state(cd{0.1, 0.5}, 0.2, 0.6);
  for (int i = 0; i < 9; ++i) a[i] = 0.6 * a[i] + 0.4 * b[i];
  const double tr = trace(a);
  for (auto& x : a) x /= tr;
  return a;
}

// Principal minors of a Hermitian 3x3 are non-negative iff it is positive semidefinite.
bool positive(const DensityMatrix3& r, double tol) {
  for (int j = 0; j < 3; ++j)
    if (at(r, j, j).real() < -tol) return false;
  for (int j = 0; j < 3; ++j)
    for (int k = j + 1; k < 3; ++k)
      if ((at(r, j, j) * at(r, k, k) - std::norm(at(r, j, k))).real() < -tol) return false;
  cd det = 0.0;
  for (int j = 0; j < 3; ++j)
    det += at(r, 0, j) * (at(r, 1, (j + 1) % 3) * at(r, 2, (j + 2) % 3) -
                          at(r, 1, (j + 2) % 3) * at(r, 2, (j + 1) % 3));
  return det.real() >= -tol;
}

DensityParams sample_params() {
  DensityParams p;
  p.rabi1 = p.rabi2 = 212e6;
  p.delta_single = kTwoPi * 3e9;
  p.delta_two = kTwoPi * 40e3;
  p.k1 = 8e6;
  p.k2 = -8e6;
  p.x_g = 1e-7;
  p.x_e = -3e-7;
  p.v_g = 0.01;
  p.v_e = 0.02;
  p.t0 = 0.05;
  p.gamma_l = 38.117e6;
  return p;
}

}  // namespace

TEST(Closed, TraceAndHermiticityPreserved) {
  ClosedParams p{2.0, 1.5, 20.0, 0.1, 0.3, -0.4};
  const DensityMatrix3 r0 = mixed();
  const auto d = rho_derivatives_closed(r0, p, 0.7);
  EXPECT_NEAR(std::abs(d[0] + d[4] + d[8]), 0.0, 1e-12);
  EXPECT_LT(hermiticity_error(d), 1e-12);
  auto f = [&](const DensityMatrix3& r, double t) { return rho_derivatives_closed(r, p, t); };
  const auto r = integrate<9>(r0, 0.0, 5.0, 1e-3, f);
  EXPECT_NEAR(trace(r), 1.0, 1e-10);
  EXPECT_LT(hermiticity_error(r), 1e-10);
  EXPECT_TRUE(positive(r, 1e-10));
}

TEST(Closed, ExcitedStateDecaysEquallyToBothGrounds) {
  ClosedParams p{};
  const auto d = rho_derivatives_closed(pure_state(0.0, 0.0, 1.0), p, 0.0);
  EXPECT_DOUBLE_EQ(d[3 * kG + kG].real(), 0.5);
  EXPECT_DOUBLE_EQ(d[3 * kE + kE].real(), 0.5);
  EXPECT_DOUBLE_EQ(d[3 * kI + kI].real(), -1.0);
}

TEST(Open, TraceLossEqualsLossRateTimesIntermediatePopulation) {
  DensityParams p = sample_params();
  p.gamma_l = 38.117e6;
  const auto d = rho_derivatives_open(pure_state(0.0, 0.0, 1.0), p, 1e-7);
  EXPECT_NEAR((d[0] + d[4] + d[8]).real(), -p.gamma_l, 1e-6);
  const DensityMatrix3 r = mixed();
  const auto d2 = rho_derivatives_open(r, p, 3e-8);
  EXPECT_NEAR((d2[0] + d2[4] + d2[8]).real(), -p.gamma_l * at(r, kI, kI).real(), 1e-3);
  EXPECT_LT(hermiticity_error(d2), 1e-3);
}

TEST(Open, EvolutionStaysPhysical) {
  const DensityParams p = sample_params();
  const auto r = evolve_density(pure_state(std::sqrt(0.5), cd{0.0, std::sqrt(0.5)}), p, 2e-7,
                                density_step(p, 2e-7));
  EXPECT_LE(trace(r), 1.0);
  EXPECT_GT(trace(r), 0.99);
  EXPECT_LT(hermiticity_error(r), 1e-10);
  EXPECT_TRUE(positive(r, 1e-10));
}

TEST(Adiabatic, SteadyCoherenceMatchesAmplitudeProduct) {
  SimulationConfig cfg;
  cfg.laser.delta_single = kTwoPi * 3e9;
  cfg.laser.delta_two = kTwoPi * 40e3;
  PulseParams pp = pulse_params(cfg);
  pp.drift = false;
  QuantumState st;
  st.c_g = std::sqrt(0.6);
  st.c_e = cd{0.3, std::sqrt(0.31)};
  st.x_g = 2e-7;
  st.x_e = 5e-7;
  st.t = 0.02;
  const DensityParams dp = density_params(st, pp, 1);
  const double tau = 2e-6;
  QuantumState later = st;
  later.t = st.t + tau;
  const cd ci = intermediate_amplitude(later, pp, 1, tau);
  const SteadyState ss = steady_state_coherences({std::norm(st.c_g), st.c_g * std::conj(st.c_e), std::norm(st.c_e)}, dp, tau);
  EXPECT_LT(std::abs(ss.rho_gi - st.c_g * std::conj(ci)), 1e-9 * std::abs(ss.rho_gi));
  EXPECT_LT(std::abs(ss.rho_ei - st.c_e * std::conj(ci)), 1e-9 * std::abs(ss.rho_ei));
  EXPECT_NEAR(ss.rho_ii, std::norm(ci), 1e-9 * std::norm(ci));
}

TEST(Adiabatic, ReducedRatesMatchAmplitudeEquations) {
  SimulationConfig cfg;
  cfg.laser.delta_single = kTwoPi * 5e9;
  cfg.laser.delta_two = kTwoPi * 20e3;
  PulseParams pp = pulse_params(cfg);
  pp.drift = false;
  QuantumState st;
  st.c_g = std::sqrt(0.45);
  st.c_e = cd{-0.2, std::sqrt(0.51)};
  st.x_g = 1e-7;
  st.x_e = 4e-7;
  st.t = 0.01;
  const DensityParams dp = density_params(st, pp, -1);
  const double tau = 1e-6;
  QuantumState later = st;
  later.t = st.t + tau;
  const auto dc = amplitude_derivatives(later, pp, -1, tau, false);
  const ReducedRho r{std::norm(st.c_g), st.c_g * std::conj(st.c_e), std::norm(st.c_e)};
  const ReducedRho d = rho_adiabatic_derivatives(r, dp, tau);
  const double scale = std::abs(dc[0]);
  EXPECT_NEAR(d.gg, 2.0 * (std::conj(st.c_g) * dc[0]).real(), 1e-9 * scale);
  EXPECT_NEAR(d.ee, 2.0 * (std::conj(st.c_e) * dc[1]).real(), 1e-9 * scale);
  EXPECT_LT(std::abs(d.ge - (dc[0] * std::conj(st.c_e) + st.c_g * std::conj(dc[1]))), 1e-9 * scale);
}

TEST(Adiabatic, RejectsOverfullPopulations) {
  EXPECT_THROW(rho_adiabatic_derivatives({0.7, 0.0, 0.4}, sample_params(), 0.0), ModelViolationError);
}

TEST(Oracle, AgreesAtThreeGigahertz) {
  SimulationConfig cfg;
  cfg.laser.delta_single = kTwoPi * 3e9;
  for (auto kind : {SegmentKind::HalfPi, SegmentKind::Pi}) {
    const auto r = oracle_compare(cfg, kind);
    EXPECT_LT(r.max, 5e-3);
    EXPECT_GT(r.loss, 0.0);
  }
  OracleOptions opt;
  opt.initial.c_g = std::sqrt(0.5);
  opt.initial.c_e = cd{0.0, -std::sqrt(0.5)};
  opt.initial.v_e = 0.012;
  opt.direction = -1;
  const auto r = oracle_compare(cfg, SegmentKind::Pi, opt);
  EXPECT_LT(r.max, 5e-3);
}

TEST(Oracle, RejectsNonOpticalSegments) {
  EXPECT_THROW(oracle_compare(SimulationConfig{}, SegmentKind::Free), std::invalid_argument);
}
