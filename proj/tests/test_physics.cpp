#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lmtai/amplitude.hpp"
#include "lmtai/physics.hpp"

using namespace lmtai;

namespace {

int count(const PulseSequence& s, SegmentKind k) {
  return static_cast<int>(std::count_if(s.segments.begin(), s.segments.end(),
                                        [k](const Segment& x) { return x.kind == k; }));
}

}  // namespace

TEST(Sequence, SingleMirrorLayout) {
  const auto s = build_sequence(1, 0.1, 150e-6, 2e-6, 1e-6);
  const std::vector<Segment> expect{{SegmentKind::HalfPi, 1e-6}, {SegmentKind::Free, 0.1},
                                    {SegmentKind::Pi, 2e-6},     {SegmentKind::Free, 0.1},
                                    {SegmentKind::HalfPi, 1e-6}};
  EXPECT_EQ(s.segments, expect);
}

TEST(Sequence, ThreeMirrorLayout) {
  const auto s = build_sequence(3, 0.1, 150e-6, 2e-6, 1e-6);
  using K = SegmentKind;
  const std::vector<K> expect{K::HalfPi, K::Gap, K::Pi, K::Free, K::Pi, K::Gap, K::Pi,
                              K::Gap,    K::Pi,  K::Free, K::Pi, K::Gap, K::HalfPi};
  ASSERT_EQ(s.segments.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_EQ(s.segments[i].kind, expect[i]) << i;
}

TEST(Sequence, CountsAndDurations) {
  for (int n = 1; n <= 41; n += 2) {
    const double T = 0.1, tau = 150e-6, tp = 2e-6, th = 1e-6;
    const auto s = build_sequence(n, T, tau, tp, th);
    EXPECT_EQ(s.pi_count(), 2 * n - 1);
    EXPECT_EQ(s.half_pi_count(), 2);
    EXPECT_EQ(count(s, SegmentKind::Free), 2);
    EXPECT_EQ(count(s, SegmentKind::Gap), 2 * n - 2);
    EXPECT_DOUBLE_EQ(s.q_weight(), 2.0 * n);
    EXPECT_NEAR(s.optical_time(), (2 * n - 1) * tp + 2 * th, 1e-18);
    EXPECT_NEAR(s.total_time(), 2 * T + (2 * n - 2) * tau + s.optical_time(), 1e-15);
    // No two optical pulses are adjacent.
    for (std::size_t i = 1; i < s.segments.size(); ++i) {
      const bool a = s.segments[i - 1].kind == SegmentKind::Pi || s.segments[i - 1].kind == SegmentKind::HalfPi;
      const bool b = s.segments[i].kind == SegmentKind::Pi || s.segments[i].kind == SegmentKind::HalfPi;
      EXPECT_FALSE(a && b);
    }
  }
}

TEST(Sequence, RejectsInvalidInput) {
  EXPECT_THROW(build_sequence(4, 0.1, 1e-4, 2e-6, 1e-6), ValidationError);
  EXPECT_THROW(build_sequence(0, 0.1, 1e-4, 2e-6, 1e-6), ValidationError);
  EXPECT_THROW(build_sequence(3, 0.0, 1e-4, 2e-6, 1e-6), ValidationError);
  EXPECT_THROW(build_sequence(3, 0.1, 1e-4, -2e-6, 1e-6), ValidationError);
}

TEST(Alpha, MatchesHandValue) {
  AtomSpecies sp;
  LaserConfig l;
  const double keff = l.k_eff(sp);
  EXPECT_NEAR(keff, 2.0 * 2.0 * 3.141592653589793 / 780e-9, 1e-6);
  // Without the pulse spacing term: 1 / (2 T^2 k_eff) for one mirror.
  const auto s = build_sequence(1, 0.1, 1e-30, 2e-6, 1e-6);
  EXPECT_NEAR(alpha_scale(s, keff, 0.0), 3.103e-6, 1e-9);
  const auto s150 = build_sequence(1, 0.1, 150e-6, 2e-6, 1e-6);
  EXPECT_NEAR(alpha_scale(s150, keff, 0.0), 1.0 / (2 * 0.01 * keff - 4 * keff * 0.1 * 150e-6), 1e-18);
}

TEST(Alpha, DecreasesWithMirrorCount) {
  AtomSpecies sp;
  LaserConfig l;
  double prev = INFINITY;
  for (int n = 1; n <= 41; n += 2) {
    const double a = alpha_scale(build_sequence(n, 0.1, 150e-6, 2e-6, 1e-6), l.k_eff(sp), 0.0);
    EXPECT_LT(a, prev);
    prev = a;
  }
}

TEST(Alpha, DegenerateGeometryThrows) {
  AtomSpecies sp;
  LaserConfig l;
  const auto s = build_sequence(1, 0.1, 150e-6, 2e-6, 1e-6);
  EXPECT_THROW(alpha_scale(s, l.k_eff(sp), 3.141592653589793 / 2), ValidationError);
  l.geometry = Geometry::CoPropagating;
  EXPECT_THROW(alpha_scale(s, l.k_eff(sp), 0.0), ValidationError);
}

TEST(Kinematics, RecoilValues) {
  AtomSpecies sp;
  LaserConfig l;
  const double vr = recoil_velocity(sp, l);
  EXPECT_NEAR(vr, 1.054571817e-34 * l.k_eff(sp) / 1.419e-25, 1e-15);
  // Recoil shift hbar k_eff^2 / 2m is about 2 pi x 15.4 kHz.
  const double shift = vr * l.k_eff(sp) / 2.0;
  EXPECT_NEAR(shift / (2 * 3.141592653589793), 15.4e3, 0.1e3);
}

TEST(Kinematics, EffectiveDetuning) {
  AtomSpecies sp;
  LaserConfig l;
  l.delta_two = 2 * 3.141592653589793 * 63e3;
  // At rest and without recoil the laser-defined detuning is recovered.
  // Optical frequencies near 1e15 rad/s leave about one rad/s of resolution.
  EXPECT_NEAR(effective_two_photon_detuning(l, sp, 0.0, false), l.delta_two, 1.0);
  const double v = 0.01;
  EXPECT_NEAR(effective_two_photon_detuning(l, sp, v, false) - l.delta_two, l.k_eff(sp) * v, 1.0);
}

TEST(Calibration, PiPulseLength) {
  LaserConfig l;
  EXPECT_NEAR(calibrated_t_pi(l), 3.141592653589793 * 2 * 3.141592653589793 * 9e9 / (2 * 212e6 * 212e6),
              1e-18);
  EXPECT_NEAR(calibrated_t_pi(l), 1.97638e-6, 1e-10);
  SimulationConfig c;
  EXPECT_DOUBLE_EQ(c.t_half_pi(), 0.5 * c.t_pi());
  c.pulse_calibration = PulseCalibration::Table;
  EXPECT_DOUBLE_EQ(c.t_pi(), 2e-6);
  EXPECT_DOUBLE_EQ(c.t_half_pi(), 1e-6);
}

TEST(Species, DecayBranchesMustSum) {
  AtomSpecies sp;
  EXPECT_NO_THROW(sp.validate());
  sp.gamma_g = 1.0;
  EXPECT_THROW(sp.validate(), ValidationError);
  sp.gamma_l = 0.0;
  sp.gamma_g = sp.gamma_e = 0.5 * sp.gamma_total;
  EXPECT_NO_THROW(sp.validate());
}

TEST(Config, ValidateRejectsBadValues) {
  SimulationConfig c;
  EXPECT_NO_THROW(c.validate());
  auto bad = [](auto mutate) {
    SimulationConfig x;
    mutate(x);
    EXPECT_THROW(x.validate(), ValidationError);
  };
  bad([](SimulationConfig& x) { x.n_r = 2; });
  bad([](SimulationConfig& x) { x.n_samples = 1; });
  bad([](SimulationConfig& x) { x.epsilon_m = 1.0; });
  bad([](SimulationConfig& x) { x.epsilon_m = -0.1; });
  bad([](SimulationConfig& x) { x.steps_per_pi = 0; });
  bad([](SimulationConfig& x) { x.laser.delta_single = 0.0; });
}

TEST(Directions, PalindromicSchedule) {
  for (int n = 1; n <= 41; n += 2) {
    const auto d = pulse_directions(n, SignSchedule::Palindromic);
    ASSERT_EQ(static_cast<int>(d.size()), 2 * n + 1);
    EXPECT_EQ(d.front(), 1);
    EXPECT_EQ(d.back(), 1);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d[i], d[d.size() - 1 - i]) << "n=" << n;
  }
  const std::vector<int> three{1, -1, -1, 1, -1, -1, 1};
  EXPECT_EQ(pulse_directions(3, SignSchedule::Palindromic), three);
  const std::vector<int> alt{1, -1, 1, -1, 1, -1, 1};
  EXPECT_EQ(pulse_directions(3, SignSchedule::Alternating), alt);
}
