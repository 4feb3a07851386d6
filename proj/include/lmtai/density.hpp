#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "lmtai/amplitude.hpp"
#include "lmtai/numerics.hpp"
#include "lmtai/physics.hpp"

namespace lmtai {

// Row-major 3x3 over the basis (g, e, i).
using DensityMatrix3 = CVec<9>;

enum Level { kG = 0, kE = 1, kI = 2 };

inline cd& at(DensityMatrix3& r, int j, int k) { return r[3 * j + k]; }
inline const cd& at(const DensityMatrix3& r, int j, int k) { return r[3 * j + k]; }

inline DensityMatrix3 pure_state(cd c_g, cd c_e, cd c_i = 0.0) {
  const std::array<cd, 3> c{c_g, c_e, c_i};
  DensityMatrix3 r{};
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) r[3 * j + k] = c[j] * std::conj(c[k]);
  return r;
}

inline double trace(const DensityMatrix3& r) {
  return (r[0] + r[4] + r[8]).real();
}

inline double hermiticity_error(const DensityMatrix3& r) {
  double e = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) e = std::max(e, std::abs(at(r, j, k) - std::conj(at(r, k, j))));
  return e;
}

// Interaction-picture coupling of one pulse. Positions are at pulse start (t0) and
// advance with the arm velocities when drift is on. Rates in rad/s.
struct DensityParams {
  double rabi1 = 0.0;
  double rabi2 = 0.0;
  double delta_single = 0.0;
  double delta_two = 0.0;
  double t0 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double x_g = 0.0;
  double x_e = 0.0;
  double v_g = 0.0;
  double v_e = 0.0;
  bool drift = true;
  double gamma_l = 0.0;
  double gamma_g = 0.0;
  double gamma_e = 0.0;

  double gamma_total() const { return gamma_l + gamma_g + gamma_e; }
  double phase_g(double tau) const { return k1 * (x_g + (drift ? v_g * tau : 0.0)); }
  double phase_e(double tau) const { return k2 * (x_e + (drift ? v_e * tau : 0.0)); }
  cd h_gi(double tau) const {
    return rabi1 * std::polar(1.0, -phase_g(tau) - delta_single * tau);
  }
  cd h_ei(double tau) const {
    return rabi2 *
           std::polar(1.0, -phase_e(tau) - delta_two * t0 - (delta_single + delta_two) * tau);
  }
};

// Three-level amplitudes before elimination, with c_i decaying at gamma_total / 2.
inline CVec<3> three_level_derivatives(const CVec<3>& c, const DensityParams& p, double tau) {
  const cd hgi = p.h_gi(tau), hei = p.h_ei(tau);
  const cd I{0.0, 1.0};
  return {-I * hgi * c[2], -I * hei * c[2],
          -0.5 * p.gamma_total() * c[2] - I * (std::conj(hgi) * c[0] + std::conj(hei) * c[1])};
}

inline DensityMatrix3 lindblad(const DensityMatrix3& r, cd hgi, cd hei, double gamma_l,
                               double gamma_g, double gamma_e) {
  DensityMatrix3 H{};
  H[3 * kG + kI] = hgi;
  H[3 * kI + kG] = std::conj(hgi);
  H[3 * kE + kI] = hei;
  H[3 * kI + kE] = std::conj(hei);
  const cd I{0.0, 1.0};
  const double g_half = 0.5 * (gamma_l + gamma_g + gamma_e);
  DensityMatrix3 d{};
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      cd comm = 0.0;
      for (int m = 0; m < 3; ++m) comm += at(H, j, m) * at(r, m, k) - at(r, j, m) * at(H, m, k);
      cd v = -I * comm;
      // Anticommutator with the projector onto |i>.
      if (j == kI) v -= g_half * at(r, j, k);
      if (k == kI) v -= g_half * at(r, j, k);
      d[3 * j + k] = v;
    }
  const cd pii = at(r, kI, kI);
  d[3 * kG + kG] += gamma_g * pii;
  d[3 * kE + kE] += gamma_e * pii;
  return d;
}

inline DensityMatrix3 rho_derivatives_open(const DensityMatrix3& r, const DensityParams& p,
                                           double tau) {
  return lindblad(r, p.h_gi(tau), p.h_ei(tau), p.gamma_l, p.gamma_g, p.gamma_e);
}

// Dimensionless closed system: time in units of 1/Gamma, all rates divided by Gamma,
// decay of |i> split equally between |g> and |e>, no loss channel.
struct ClosedParams {
  double rabi1 = 0.0;
  double rabi2 = 0.0;
  double delta_single = 0.0;
  double delta_two = 0.0;
  double phase_g = 0.0;
  double phase_e = 0.0;
};

inline DensityMatrix3 rho_derivatives_closed(const DensityMatrix3& r, const ClosedParams& p,
                                             double tau) {
  const cd hgi = p.rabi1 * std::polar(1.0, -p.phase_g - p.delta_single * tau);
  const cd hei = p.rabi2 * std::polar(1.0, -p.phase_e - (p.delta_single + p.delta_two) * tau);
  return lindblad(r, hgi, hei, 0.0, 0.5, 0.5);
}

struct ReducedRho {
  double gg = 1.0;
  cd ge = 0.0;
  double ee = 0.0;
};

struct SteadyState {
  cd rho_gi;
  cd rho_ei;
  double rho_ii;
};

inline SteadyState steady_state_coherences(const ReducedRho& r, const DensityParams& p, double tau) {
  const double g2 = 0.5 * p.gamma_total();
  const double D = p.delta_single, d = p.delta_two;
  const cd I{0.0, 1.0};
  const cd Kg = I * p.rabi1 * std::polar(1.0, p.phase_g(tau) + D * tau) / cd{g2, D};
  const cd Ke = I * p.rabi2 * std::polar(1.0, p.phase_e(tau) + d * p.t0 + (D + d) * tau) /
                cd{g2, D + d};
  SteadyState s;
  s.rho_gi = -std::conj(Kg) * r.gg - std::conj(Ke) * r.ge;
  s.rho_ei = -std::conj(Kg) * std::conj(r.ge) - std::conj(Ke) * r.ee;
  s.rho_ii = std::norm(Kg) * r.gg + std::norm(Ke) * r.ee + 2.0 * (Kg * std::conj(Ke) * r.ge).real();
  return s;
}

inline ReducedRho rho_adiabatic_derivatives(const ReducedRho& r, const DensityParams& p, double tau) {
  if (1.0 - r.gg - r.ee < -1e-6)
    throw ModelViolationError("rho_adiabatic_derivatives: populations exceed unity");
  const SteadyState ss = steady_state_coherences(r, p, tau);
  const cd hgi = p.h_gi(tau), hei = p.h_ei(tau);
  const cd I{0.0, 1.0};
  const cd rho_ig = std::conj(ss.rho_gi), rho_ie = std::conj(ss.rho_ei);
  ReducedRho d;
  d.gg = (-I * (hgi * rho_ig - ss.rho_gi * std::conj(hgi))).real() + p.gamma_g * ss.rho_ii;
  d.ee = (-I * (hei * rho_ie - ss.rho_ei * std::conj(hei))).real() + p.gamma_e * ss.rho_ii;
  d.ge = -I * (hgi * rho_ie - ss.rho_gi * std::conj(hei));
  return d;
}

inline DensityParams density_params(const QuantumState& st, const PulseParams& p, int s) {
  DensityParams d;
  d.rabi1 = p.laser.rabi1;
  d.rabi2 = p.laser.rabi2;
  d.delta_single = p.laser.delta_single;
  d.delta_two = p.laser.delta_two;
  d.t0 = st.t;
  d.k1 = wavevector1(p, s);
  d.k2 = wavevector2(p, s);
  d.x_g = st.x_g;
  d.x_e = st.x_e;
  d.v_g = st.v_g;
  d.v_e = st.v_e;
  d.drift = p.drift;
  d.gamma_l = p.species.gamma_l;
  d.gamma_g = p.species.gamma_g;
  d.gamma_e = p.species.gamma_e;
  return d;
}

// Step small enough to resolve the single-photon detuning oscillation.
inline double density_step(const DensityParams& p, double duration, double resolution = 0.05) {
  const double w = std::max({std::abs(p.delta_single), std::abs(p.delta_single + p.delta_two),
                             std::abs(p.rabi1), std::abs(p.rabi2), p.gamma_total()});
  return std::min(resolution / w, duration / 100.0);
}

inline DensityMatrix3 evolve_density(const DensityMatrix3& r0, const DensityParams& p,
                                     double duration, double dt) {
  auto f = [&](const DensityMatrix3& r, double tau) { return rho_derivatives_open(r, p, tau); };
  return integrate<9>(r0, 0.0, duration, dt, f);
}

struct OracleResult {
  double d_gg = 0.0;
  double d_ee = 0.0;
  double d_loss = 0.0;
  double max = 0.0;
  double pop_g = 0.0;
  double pop_e = 0.0;
  double q = 0.0;
  double rho_gg = 0.0;
  double rho_ee = 0.0;
  double loss = 0.0;
};

struct OracleOptions {
  QuantumState initial;
  int direction = 1;
  double resolution = 0.05;
};

// One pulse through both engines from identical inputs.
inline OracleResult oracle_compare(const SimulationConfig& cfg, SegmentKind kind,
                                   const OracleOptions& opt = {}) {
  if (kind != SegmentKind::Pi && kind != SegmentKind::HalfPi)
    throw std::invalid_argument("oracle_compare: single optical pulse only");
  const PulseParams p = pulse_params(cfg);
  const double duration = kind == SegmentKind::Pi ? cfg.t_pi() : cfg.t_half_pi();
  QuantumState st = opt.initial;
  st.split = true;
  const QuantumState out = apply_pulse(st, kind, duration, p, opt.direction);

  const DensityParams dp = density_params(st, p, opt.direction);
  const DensityMatrix3 r0 = pure_state(st.c_g, st.c_e);
  const DensityMatrix3 r = evolve_density(r0, dp, duration, density_step(dp, duration, opt.resolution));

  OracleResult res;
  res.pop_g = std::norm(out.c_g);
  res.pop_e = std::norm(out.c_e);
  res.q = out.q_tot - st.q_tot;
  res.rho_gg = at(r, kG, kG).real();
  res.rho_ee = at(r, kE, kE).real();
  res.loss = trace(r0) - trace(r);
  res.d_gg = std::abs(res.pop_g - res.rho_gg);
  res.d_ee = std::abs(res.pop_e - res.rho_ee);
  res.d_loss = std::abs(res.q - res.loss);
  res.max = std::max({res.d_gg, res.d_ee, res.d_loss});
  return res;
}

}  // namespace lmtai
