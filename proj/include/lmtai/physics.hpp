#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmtai {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kSpeedOfLight = 299792458.0;

class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Rates are angular (rad/s).
struct AtomSpecies {
  double mass = 1.419e-25;
  double wavelength = 780e-9;
  double gamma_total = 38.117e6;
  double gamma_l = 38.117e6;
  double gamma_g = 0.0;
  double gamma_e = 0.0;
  double hyperfine_splitting = kTwoPi * 3.0357324e9;

  bool operator==(const AtomSpecies&) const = default;

  void validate() const {
    if (!(mass > 0.0)) throw ValidationError("species: mass must be positive");
    if (!(wavelength > 0.0)) throw ValidationError("species: wavelength must be positive");
    if (!(gamma_total > 0.0)) throw ValidationError("species: gamma_total must be positive");
    if (gamma_l < 0.0 || gamma_g < 0.0 || gamma_e < 0.0)
      throw ValidationError("species: decay branches must be non-negative");
    if (std::abs(gamma_l + gamma_g + gamma_e - gamma_total) > 1e-9 * gamma_total)
      throw ValidationError("species: gamma_l + gamma_g + gamma_e must equal gamma_total");
  }
};

enum class Geometry { CounterPropagating, CoPropagating };

struct LaserConfig {
  double rabi1 = 212e6;
  double rabi2 = 212e6;
  double delta_single = kTwoPi * 9e9;
  double delta_two = 0.0;
  double delta_ac = 0.0;
  double theta = 0.0;
  Geometry geometry = Geometry::CounterPropagating;

  bool operator==(const LaserConfig&) const = default;

  double k(const AtomSpecies& s) const { return kTwoPi / s.wavelength; }
  double k_eff(const AtomSpecies& s) const {
    return geometry == Geometry::CounterPropagating ? 2.0 * k(s) : 0.0;
  }
  // Laser frequencies: omega1 sits delta_single below the g-i optical line,
  // omega2 is offset by the hyperfine splitting plus delta_two.
  double omega1(const AtomSpecies& s) const {
    return kTwoPi * kSpeedOfLight / s.wavelength - delta_single;
  }
  double omega2(const AtomSpecies& s) const {
    return omega1(s) - s.hyperfine_splitting - delta_two;
  }
  // Adiabatic elimination degrades when the detuning is not large.
  bool weak_detuning_warning() const {
    return std::abs(delta_single) < 10.0 * std::max(std::abs(rabi1), std::abs(rabi2));
  }
};

enum class SegmentKind { HalfPi, Pi, Free, Gap };

struct Segment {
  SegmentKind kind;
  double duration;
  bool operator==(const Segment&) const = default;
};

struct PulseSequence {
  std::vector<Segment> segments;
  int n_r = 1;
  double T = 0.1;
  double tau_d = 150e-6;
  double t_pi = 2e-6;
  double t_half_pi = 1e-6;

  int pi_count() const {
    int n = 0;
    for (const auto& s : segments) n += s.kind == SegmentKind::Pi;
    return n;
  }
  int half_pi_count() const {
    int n = 0;
    for (const auto& s : segments) n += s.kind == SegmentKind::HalfPi;
    return n;
  }
  double q_weight() const { return pi_count() + 0.5 * half_pi_count(); }
  double total_time() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
  }
  double optical_time() const {
    double t = 0.0;
    for (const auto& s : segments)
      if (s.kind == SegmentKind::Pi || s.kind == SegmentKind::HalfPi) t += s.duration;
    return t;
  }
};

// Layout: HalfPi, boosts, Free(T), N_R centrals, Free(T), boosts, HalfPi.
// Consecutive optical pulses are separated by Gap(tau_d).
inline PulseSequence build_sequence(int n_r, double T, double tau_d, double t_pi,
                                    double t_half_pi) {
  if (n_r < 1 || n_r % 2 == 0) throw ValidationError("n_r must be odd and >= 1");
  if (!(T > 0.0) || !(tau_d > 0.0) || !(t_pi > 0.0) || !(t_half_pi > 0.0))
    throw ValidationError("sequence durations must be positive");
  PulseSequence seq;
  seq.n_r = n_r;
  seq.T = T;
  seq.tau_d = tau_d;
  seq.t_pi = t_pi;
  seq.t_half_pi = t_half_pi;
  const int boosts = (n_r - 1) / 2;
  auto& s = seq.segments;
  auto pulse_train = [&](int count) {
    for (int j = 0; j < count; ++j) {
      if (j > 0 || (!s.empty() && s.back().kind != SegmentKind::Free))
        s.push_back({SegmentKind::Gap, tau_d});
      s.push_back({SegmentKind::Pi, t_pi});
    }
  };
  s.push_back({SegmentKind::HalfPi, t_half_pi});
  pulse_train(boosts);
  s.push_back({SegmentKind::Free, T});
  pulse_train(n_r);
  s.push_back({SegmentKind::Free, T});
  pulse_train(boosts);
  if (boosts > 0) s.push_back({SegmentKind::Gap, tau_d});
  s.push_back({SegmentKind::HalfPi, t_half_pi});
  return seq;
}

inline double alpha_scale(const PulseSequence& seq, double k_eff, double theta) {
  const double c = std::cos(theta);
  const double n = seq.n_r;
  const double k = std::abs(k_eff);
  const double denom = (2.0 * n * seq.T * seq.T * k - 2.0 * (n + 1.0) * k * seq.T * seq.tau_d) * c;
  if (std::abs(c) < 1e-12 || !(std::abs(denom) > 0.0) || !std::isfinite(denom))
    throw ValidationError("alpha_scale: degenerate geometry");
  return 1.0 / denom;
}

inline double recoil_velocity(const AtomSpecies& s, const LaserConfig& l) {
  return kHbar * l.k_eff(s) / s.mass;
}

// delta = (omega1 - omega2) - (omega_hfs - k_eff v + hbar k_eff^2 / 2m) + delta_ac
inline double effective_two_photon_detuning(const LaserConfig& l, const AtomSpecies& s,
                                            double velocity, bool include_recoil = true) {
  const double keff = l.k_eff(s);
  const double recoil = include_recoil ? kHbar * keff * keff / (2.0 * s.mass) : 0.0;
  return (l.omega1(s) - l.omega2(s)) - (s.hyperfine_splitting - keff * velocity + recoil) +
         l.delta_ac;
}

// Pulse length giving area pi for the effective two-photon Rabi frequency 2|O1 O2|/Delta.
inline double calibrated_t_pi(const LaserConfig& l) {
  return kPi * std::abs(l.delta_single) / (2.0 * std::abs(l.rabi1 * l.rabi2));
}

enum class PulseCalibration { Table, Calibrated };
enum class QMode { Zero, Constant, Random };
enum class CovMode { Binomial, VarianceRatio };
enum class RatioForm { DeltaMethod, LossCovariance };
enum class MeasurementModel { Multiplicative, Deterministic };
enum class SignSchedule { Palindromic, Alternating };

struct SimulationConfig {
  AtomSpecies species;
  LaserConfig laser;
  int n_r = 1;
  double T = 0.1;
  double tau_d = 150e-6;
  double table_t_pi = 2e-6;
  double table_t_half_pi = 1e-6;
  PulseCalibration pulse_calibration = PulseCalibration::Calibrated;
  double a_true = 1.85e-5;
  double mot_temperature = 2e-6;
  double cloud_sigma_x = 1e-3;
  int n_samples = 200;
  double epsilon_m = 0.02;
  MeasurementModel measurement_model = MeasurementModel::Multiplicative;
  std::uint64_t rng_seed = 1;
  QMode q_mode = QMode::Random;
  CovMode cov_mode = CovMode::Binomial;
  RatioForm ratio_form = RatioForm::DeltaMethod;
  double var_q_normalization = 1.0;
  SignSchedule sign_schedule = SignSchedule::Palindromic;
  int steps_per_pi = 2000;
  bool drift_during_pulses = true;

  bool operator==(const SimulationConfig&) const = default;

  double t_pi() const {
    return pulse_calibration == PulseCalibration::Calibrated ? calibrated_t_pi(laser)
                                                             : table_t_pi;
  }
  double t_half_pi() const {
    return pulse_calibration == PulseCalibration::Calibrated ? 0.5 * calibrated_t_pi(laser)
                                                             : table_t_half_pi;
  }
  PulseSequence sequence() const { return build_sequence(n_r, T, tau_d, t_pi(), t_half_pi()); }

  void validate() const {
    species.validate();
    if (n_r < 1 || n_r % 2 == 0) throw ValidationError("n_r must be odd and >= 1");
    if (n_samples < 2) throw ValidationError("n_samples must be >= 2");
    if (epsilon_m < 0.0 || epsilon_m >= 1.0) throw ValidationError("epsilon_m must lie in [0,1)");
    if (mot_temperature < 0.0) throw ValidationError("mot_temperature must be non-negative");
    if (cloud_sigma_x < 0.0) throw ValidationError("cloud_sigma_x must be non-negative");
    if (steps_per_pi < 1) throw ValidationError("steps_per_pi must be >= 1");
    if (!(var_q_normalization > 0.0)) throw ValidationError("var_q_normalization must be positive");
    if (!(T > 0.0) || !(tau_d > 0.0)) throw ValidationError("T and tau_d must be positive");
    if (!(table_t_pi > 0.0) || !(table_t_half_pi > 0.0))
      throw ValidationError("pulse lengths must be positive");
    if (!(std::abs(laser.delta_single) > 0.0)) throw ValidationError("delta_single must be nonzero");
  }
};

}  // namespace lmtai
