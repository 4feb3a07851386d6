#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmtai/physics.hpp"

namespace lmtai {

class LossOverflowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ModelViolationError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class DegenerateDenominatorError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// phase: Delta_kx + delta t at pulse entry; phase_average: mean of exp(i w t) over the pulse.
struct LossInputs {
  double rabi1 = 212e6;
  double rabi2 = 212e6;
  double delta_single = kTwoPi * 9e9;
  double delta_two = 0.0;
  double gamma_l = 38.117e6;
  double phase = 0.0;
  std::complex<double> phase_average{1.0, 0.0};
};

inline double analytical_q(std::complex<double> c_g, std::complex<double> c_e,
                           const LossInputs& in, double t_tot) {
  if (!(t_tot > 0.0)) throw std::invalid_argument("analytical_q: t_tot must be positive");
  if (in.gamma_l == 0.0) return 0.0;
  using cd = std::complex<double>;
  const double g2 = 0.5 * in.gamma_l;
  const double D = in.delta_single, Dd = in.delta_single + in.delta_two;
  const double o1 = in.rabi1, o2 = in.rabi2;
  const double direct = o1 * o1 * std::norm(c_g) / (D * D + g2 * g2) +
                        o2 * o2 * std::norm(c_e) / (Dd * Dd + g2 * g2);
  const cd cross = o1 * o2 * std::conj(c_g) * c_e * std::polar(1.0, in.phase) *
                   in.phase_average / (cd{g2, -D} * cd{g2, Dd});
  double q = in.gamma_l * t_tot * (direct + 2.0 * cross.real());
  if (q < 0.0) {
    if (q > -1e-12) return 0.0;
    throw ModelViolationError("analytical_q: negative loss " + std::to_string(q));
  }
  if (q >= 1.0) throw LossOverflowError("analytical_q: loss >= 1");
  return q;
}

inline double variance_q(double q, double gamma_l, double t_tot) {
  const double gt = gamma_l * t_tot;
  if (q < 0.0 || !(gt > 0.0)) throw ModelViolationError("variance_q: need q >= 0 and gamma_l t > 0");
  if (q > gt) throw ModelViolationError("variance_q: q exceeds gamma_l t_tot");
  return gt * q * (1.0 - q / gt);
}

inline double covariance_ce_q(double q, double m, double gamma_l, double t_tot,
                              CovMode mode = CovMode::Binomial, double var_q_tot = 0.0) {
  const double gt = gamma_l * t_tot;
  if (q < 0.0 || !(gt > 0.0)) throw ModelViolationError("covariance_ce_q: need q >= 0 and gamma_l t > 0");
  if (q > gt) throw ModelViolationError("covariance_ce_q: q exceeds gamma_l t_tot");
  if (mode == CovMode::Binomial) return -0.5 * m * q * (1.0 - q / gt);
  return -var_q_tot / (2.0 * gt);
}

struct PopulationStats {
  double mean_pop_e = 0.0;
  double var_pop_e = 0.0;
  double mean_q = 0.0;
  double var_q = 0.0;
  double cov_eq = 0.0;
  int n = 2;
  QMode q_mode = QMode::Zero;
  bool cov_clamped = false;
};

struct RatioMoments {
  double mean = 0.0;
  double var = 0.0;
};

// X = pop_e, Y = 1 - X - Q. DeltaMethod uses cov(X,Y) = -var X - cov(X,Q) in both moments;
// LossCovariance places cov(X,Q) in the variance cross term.
inline RatioMoments ratio_moments(const PopulationStats& s, RatioForm form = RatioForm::DeltaMethod) {
  if (s.n < 1) throw std::invalid_argument("ratio_moments: n must be positive");
  const double X = s.mean_pop_e;
  const double Y = 1.0 - s.mean_pop_e - s.mean_q;
  if (!(Y > 0.0)) throw DegenerateDenominatorError("ratio_moments: <Y> <= 0");
  const double var_y = s.var_pop_e + s.var_q + 2.0 * s.cov_eq;
  const double cov_xy = -s.var_pop_e - s.cov_eq;
  RatioMoments r;
  r.mean = X / Y + var_y * X / (Y * Y * Y) - cov_xy / (Y * Y);
  const double cross = form == RatioForm::DeltaMethod ? cov_xy : s.cov_eq;
  r.var = (s.var_pop_e / (Y * Y) + X * X * var_y / (Y * Y * Y * Y) - 2.0 * X * cross / (Y * Y * Y)) /
          static_cast<double>(s.n);
  return r;
}

struct PhaseVariance {
  double var_phi = 0.0;
  double d = 0.0;
  double b = 0.0;
};

inline PhaseVariance phase_variance(double r1_mean, double r1_var) {
  if (r1_var < 0.0) throw ModelViolationError("phase_variance: negative ratio variance");
  PhaseVariance p;
  p.d = 1.0 / (1.0 + r1_mean * r1_mean);
  p.b = std::atan(r1_mean);
  p.var_phi = r1_var * p.d * p.d + 2.0 * p.d * p.b * std::sqrt(r1_var) + p.b * p.b;
  return p;
}

struct ErrorBudget {
  double mean_dev_a = 0.0;
  double var_dev_a = 0.0;
  double empirical_var_dev_a = 0.0;
  double dc_offset = 0.0;
  double fom = 0.0;
  double d = 0.0;
  double b = 0.0;
  double r1_mean = 0.0;
  double r1_var = 0.0;
};

inline ErrorBudget accel_error_budget(const PopulationStats& stats, double alpha, double a_tr,
                                      const std::vector<double>& dev_a,
                                      RatioForm form = RatioForm::DeltaMethod) {
  if (dev_a.empty()) throw std::invalid_argument("accel_error_budget: no samples");
  if (!std::isfinite(alpha)) throw std::invalid_argument("accel_error_budget: alpha not finite");
  ErrorBudget e;
  double sum = 0.0;
  for (double v : dev_a) sum += v;
  e.mean_dev_a = sum / static_cast<double>(dev_a.size());
  double ss = 0.0;
  for (double v : dev_a) ss += (v - e.mean_dev_a) * (v - e.mean_dev_a);
  e.empirical_var_dev_a = dev_a.size() > 1 ? ss / static_cast<double>(dev_a.size() - 1) : 0.0;

  const RatioMoments r = ratio_moments(stats, form);
  const PhaseVariance pv = phase_variance(r.mean, r.var);
  e.r1_mean = r.mean;
  e.r1_var = r.var;
  e.d = pv.d;
  e.b = pv.b;
  e.var_dev_a = alpha * alpha * pv.var_phi;
  e.dc_offset = (a_tr - e.mean_dev_a) * (a_tr - e.mean_dev_a);
  e.fom = e.dc_offset + e.var_dev_a;
  return e;
}

// Shot-noise style estimate; alpha here is the phase per unit acceleration.
inline double accel_variance_poisson(double rho_ee, double rho_gg, double n, double alpha,
                                     double a_mean) {
  if (!(rho_gg > 0.0)) throw std::invalid_argument("accel_variance_poisson: rho_gg must be positive");
  if (!(n > 0.0)) throw std::invalid_argument("accel_variance_poisson: n must be positive");
  const double x = alpha * a_mean;
  const double half_pi = 0.5 * kPi;
  if (std::abs(x) < 1e-12 || std::abs(std::abs(x) - half_pi) < 1e-12)
    throw ModelViolationError("accel_variance_poisson: linearization singular at this phase");
  const double t = std::tan(x);
  const double den = 2.0 * alpha * (t + t * t * t);
  return (rho_ee / (rho_gg * rho_gg * rho_gg)) * (rho_gg + rho_ee) / (den * den) / n;
}

}  // namespace lmtai
