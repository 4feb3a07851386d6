#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmtai/loss_stats.hpp"
#include "lmtai/numerics.hpp"
#include "lmtai/physics.hpp"

namespace lmtai {

struct QuantumState {
  cd c_g{1.0, 0.0};
  cd c_e{0.0, 0.0};
  double q_tot = 0.0;
  double x_g = 0.0;
  double x_e = 0.0;
  double v_g = 0.0;
  double v_e = 0.0;
  double t = 0.0;
  bool split = false;
};

struct RunOutcome {
  double pop_e = 0.0;
  double pop_g = 0.0;
  double q_tot = 0.0;
  double phase = 0.0;
  double dev_a = 0.0;
};

class DegeneratePopulationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class PulseEngine { Propagator, Direct };

struct PulseParams {
  AtomSpecies species;
  LaserConfig laser;
  double dt = 1e-9;
  bool drift = true;
  PulseEngine engine = PulseEngine::Propagator;
};

// k1 = s k, k2 = -s k for counter-propagating beams; both s k when co-propagating.
inline double wavevector1(const PulseParams& p, int s) { return s * p.laser.k(p.species); }
inline double wavevector2(const PulseParams& p, int s) {
  const double k = p.laser.k(p.species);
  return p.laser.geometry == Geometry::CounterPropagating ? -s * k : s * k;
}

inline double delta_kx(const QuantumState& st, const PulseParams& p, int s) {
  return wavevector2(p, s) * st.x_e - wavevector1(p, s) * st.x_g;
}

inline double delta_kx_rate(const QuantumState& st, const PulseParams& p, int s) {
  return wavevector2(p, s) * st.v_e - wavevector1(p, s) * st.v_g;
}

struct Coupling {
  cd a1, a2, b_ge, b_eg;
  double gamma, delta_single, delta_two;
};

inline Coupling make_coupling(const PulseParams& p) {
  const double g2 = 0.5 * p.species.gamma_l;
  const double D = p.laser.delta_single;
  const double d = p.laser.delta_two;
  const double o1 = p.laser.rabi1, o2 = p.laser.rabi2;
  const cd den1{g2, D}, den2{g2, D + d};
  return {o1 * o1 / den1, o2 * o2 / den2, o1 * o2 / den2, o2 * o1 / den1, p.species.gamma_l, D, d};
}

// Right-hand side of the eliminated two-level dynamics. st.t is the current global
// time, t_pulse the time since the pulse began; positions are current.
inline std::array<cd, 2> amplitude_derivatives(const QuantumState& st, const PulseParams& p, int s,
                                               double t_pulse, bool include_transient = true) {
  const Coupling c = make_coupling(p);
  const double dkx = delta_kx(st, p, s);
  const cd E = std::polar(1.0, dkx + c.delta_two * st.t);
  cd dg = -c.a1 * st.c_g - c.b_ge * E * st.c_e;
  cd de = -c.a2 * st.c_e - c.b_eg * std::conj(E) * st.c_g;
  if (include_transient) {
    const double t0 = st.t - t_pulse;
    const cd E0 = std::polar(1.0, dkx + c.delta_two * t0);
    const double decay = std::exp(-0.5 * c.gamma * t_pulse);
    const cd rg = decay * std::polar(1.0, -c.delta_single * t_pulse);
    const cd re = decay * std::polar(1.0, -(c.delta_single + c.delta_two) * t_pulse);
    dg += rg * (c.a1 * st.c_g + c.b_ge * E0 * st.c_e);
    de += re * (c.b_eg * std::conj(E0) * st.c_g + c.a2 * st.c_e);
  }
  return {dg, de};
}

// Reconstructed intermediate amplitude with c_i(0) = 0, amplitudes frozen at their
// current values and st.t the current global time.
inline cd intermediate_amplitude(const QuantumState& st, const PulseParams& p, int s,
                                 double t_pulse) {
  const double g2 = 0.5 * p.species.gamma_l;
  const double D = p.laser.delta_single, d = p.laser.delta_two;
  const double t0 = st.t - t_pulse;
  const cd I{0.0, 1.0};
  const cd Kg = I * p.laser.rabi1 * std::polar(1.0, wavevector1(p, s) * st.x_g) * st.c_g /
                cd{g2, D};
  const cd Ke = I * p.laser.rabi2 * std::polar(1.0, wavevector2(p, s) * st.x_e + d * t0) *
                st.c_e / cd{g2, D + d};
  return (Kg + Ke) * std::exp(-g2 * t_pulse) - Kg * std::polar(1.0, D * t_pulse) -
         Ke * std::polar(1.0, (D + d) * t_pulse);
}

// Integral over [0, tau] of exp(-(g/2 + i w) u).
inline cd transient_integral(double gamma, double w, double tau) {
  const cd z{0.5 * gamma, w};
  if (std::abs(z) * tau < 1e-8) return tau;
  return (1.0 - std::exp(-z * tau)) / z;
}

// Advance positions with constant velocity and acceleration.
inline void drift(QuantumState& st, double tau, double accel) {
  st.x_g += st.v_g * tau + 0.5 * accel * tau * tau;
  st.x_e += st.v_e * tau + 0.5 * accel * tau * tau;
  st.v_g += accel * tau;
  st.v_e += accel * tau;
  st.t += tau;
}

inline QuantumState free_evolve(QuantumState st, double duration, double accel) {
  if (duration < 0.0) throw std::invalid_argument("free_evolve: negative duration");
  if (duration == 0.0) return st;
  drift(st, duration, accel);
  return st;
}

namespace detail {

inline long long step_count(double duration, double dt) {
  const double n = std::ceil(duration / dt - 1e-9);
  return std::max(1LL, static_cast<long long>(n));
}

// Mean of exp(i w t) over [0, tau].
inline cd phase_average(double w, double tau) {
  const double x = w * tau;
  if (std::abs(x) < 1e-8) return {1.0, 0.5 * x};
  return (std::polar(1.0, x) - 1.0) / cd{0.0, x};
}

}  // namespace detail

// Analytic loss for one pulse evaluated on the entry amplitudes: gamma_l integrated
// over the quasi-steady intermediate population.
inline double pulse_loss(const QuantumState& st, const PulseParams& p, int s, double duration) {
  const double theta0 = delta_kx(st, p, s) + p.laser.delta_two * st.t;
  const double w = (p.drift ? delta_kx_rate(st, p, s) : 0.0) + p.laser.delta_two;
  LossInputs in;
  in.rabi1 = p.laser.rabi1;
  in.rabi2 = p.laser.rabi2;
  in.delta_single = p.laser.delta_single;
  in.delta_two = p.laser.delta_two;
  in.gamma_l = p.species.gamma_l;
  in.phase = theta0;
  in.phase_average = detail::phase_average(w, duration);
  return analytical_q(st.c_g, st.c_e, in, duration);
}

// Propagate one optical pulse with direction s. Kinematics: arms drift during the pulse;
// the opening beam splitter separates the arms by one recoil, mirrors swap the arms.
inline QuantumState apply_pulse(QuantumState st, SegmentKind kind, double duration,
                                const PulseParams& p, int s) {
  if (!(duration > 0.0)) throw std::invalid_argument("apply_pulse: duration must be positive");
  if (kind != SegmentKind::Pi && kind != SegmentKind::HalfPi)
    throw std::invalid_argument("apply_pulse: not an optical segment");

  const Coupling c = make_coupling(p);

  // Positions at the pulse midpoint are used when drift is switched off so the
  // frozen phase stays symmetric under sequence reversal.
  QuantumState ref = st;
  if (!p.drift) {
    ref.x_g += 0.5 * st.v_g * duration;
    ref.x_e += 0.5 * st.v_e * duration;
  }
  const double q = pulse_loss(ref, p, s, duration);
  const double theta0 = delta_kx(ref, p, s) + c.delta_two * st.t;
  const double w = (p.drift ? delta_kx_rate(st, p, s) : 0.0) + c.delta_two;
  const long long n = detail::step_count(duration, p.dt);
  const double h = duration / static_cast<double>(n);

  cd cg = st.c_g, ce = st.c_e;
  if (p.engine == PulseEngine::Propagator) {
    // Frame d = c_e exp(i theta(t)) turns the field into a constant linear system.
    const Mat2 A{-c.a1, -c.b_ge, -c.b_eg, cd{0.0, w} - c.a2};
    const Mat2 P = mat_pow(rk4_step_matrix(A, h), n);
    const cd d0 = ce * std::polar(1.0, theta0);
    const cd g1 = P.a * cg + P.b * d0;
    const cd d1 = P.c * cg + P.d * d0;
    cg = g1;
    ce = d1 * std::polar(1.0, -(theta0 + w * duration));
  } else {
    const double t0 = st.t;
    auto field = [&](const CVec<2>& y, double tau) {
      QuantumState cur = ref;
      cur.c_g = y[0];
      cur.c_e = y[1];
      if (p.drift) {
        cur.x_g += st.v_g * tau;
        cur.x_e += st.v_e * tau;
      }
      cur.t = t0 + tau;
      const auto r = amplitude_derivatives(cur, p, s, tau, false);
      return CVec<2>{r[0], r[1]};
    };
    CVec<2> y{cg, ce};
    for (long long k = 0; k < n; ++k) y = rk4_step<2>(y, k * h, h, field);
    cg = y[0];
    ce = y[1];
  }

  // Fast transient at the single-photon detuning, integrated with entry amplitudes.
  const cd E0 = std::polar(1.0, theta0);
  cg += (c.a1 * st.c_g + c.b_ge * E0 * st.c_e) * transient_integral(c.gamma, c.delta_single, duration);
  ce += (c.b_eg * std::conj(E0) * st.c_g + c.a2 * st.c_e) *
        transient_integral(c.gamma, c.delta_single + c.delta_two, duration);
  if (!std::isfinite(std::norm(cg)) || !std::isfinite(std::norm(ce)))
    throw IntegrationError("non-finite amplitude", st.t + duration);

  st.c_g = cg;
  st.c_e = ce;
  st.q_tot += q;
  drift(st, duration, 0.0);

  const double vr = recoil_velocity(p.species, p.laser);
  if (kind == SegmentKind::HalfPi) {
    if (!st.split) {
      st.x_e = st.x_g;
      st.v_e = st.v_g + s * vr;
      st.split = true;
    }
  } else {
    const double xg = st.x_g, vg = st.v_g;
    st.x_g = st.x_e;
    st.x_e = xg;
    st.v_g = st.v_e - s * vr;
    st.v_e = vg + s * vr;
  }
  return st;
}

// Beam direction per optical pulse, in sequence order.
inline std::vector<int> pulse_directions(int n_r, SignSchedule schedule) {
  const int boosts = (n_r - 1) / 2;
  const int mirrors = 2 * n_r - 1;
  std::vector<int> dirs;
  dirs.push_back(1);
  for (int j = 1; j <= mirrors; ++j) {
    const bool even = j % 2 == 0;
    int s;
    if (schedule == SignSchedule::Alternating || j <= boosts || j > boosts + n_r)
      s = even ? 1 : -1;
    else
      s = even ? -1 : 1;
    dirs.push_back(s);
  }
  dirs.push_back(1);
  return dirs;
}

struct AtomSample {
  double x0 = 0.0;
  double v0 = 0.0;
};

inline PulseParams pulse_params(const SimulationConfig& cfg) {
  PulseParams p;
  p.species = cfg.species;
  p.laser = cfg.laser;
  p.dt = cfg.t_pi() / cfg.steps_per_pi;
  p.drift = cfg.drift_during_pulses;
  return p;
}

inline double interferometer_phase(double pop_e, double q_tot) {
  const double den = 1.0 - pop_e - q_tot;
  if (!(den > 0.0))
    throw DegeneratePopulationError("ground population exhausted: 1 - pop_e - q_tot = " +
                                    std::to_string(den));
  return std::atan(std::sqrt(std::max(pop_e, 0.0) / den));
}

inline QuantumState run_sequence(const AtomSample& sample, const SimulationConfig& cfg,
                                 const PulseSequence& seq, const PulseParams& p, double accel) {
  QuantumState st;
  st.x_g = st.x_e = sample.x0;
  st.v_g = st.v_e = sample.v0;
  const auto dirs = pulse_directions(seq.n_r, cfg.sign_schedule);
  std::size_t pulse = 0;
  for (const auto& seg : seq.segments) {
    if (seg.kind == SegmentKind::Free || seg.kind == SegmentKind::Gap) {
      st = free_evolve(st, seg.duration, accel);
    } else {
      st = apply_pulse(st, seg.kind, seg.duration, p, dirs.at(pulse++));
    }
  }
  return st;
}

inline RunOutcome run_interferometer(const AtomSample& sample, const SimulationConfig& cfg,
                                     double accel) {
  const PulseSequence seq = cfg.sequence();
  const PulseParams p = pulse_params(cfg);
  const QuantumState st = run_sequence(sample, cfg, seq, p, accel);
  RunOutcome out;
  out.pop_e = std::norm(st.c_e);
  out.pop_g = std::norm(st.c_g);
  out.q_tot = st.q_tot;
  out.phase = interferometer_phase(out.pop_e, out.q_tot);
  out.dev_a = alpha_scale(seq, cfg.laser.k_eff(cfg.species), cfg.laser.theta) * out.phase;
  return out;
}

}  // namespace lmtai
