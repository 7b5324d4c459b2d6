#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "core/rng.hpp"
#include "shedder/shedder.hpp"

using namespace ufls;

namespace {

UflsParams single(double sp, double tau1) {
  UflsParams p;
  p.setpoints = {sp};
  p.fixed_tau1 = tau1;
  p.tau2 = 900.0;
  p.tau_rand_max = 0.0;
  p.phase = Attachment::A;
  return p;
}

}  // namespace

TEST(Shedder, TripsOnTheStepWhereInBandTimeReachesTau1) {
  const auto p = single(59.85, 3.2);
  RandomStream rng(1);
  auto s = initial_device_state(p, rng);
  int tripped_at = 0;
  for (int k = 1; k <= 400 && !tripped_at; ++k) {
    s = step_device(s, p, 59.85, 0.01, rng);
    if (s.mode == ShedMode::Shed) tripped_at = k;
  }
  // Entry step sets t1 = 0, so t1 = 3.2 on the 321st in-band step.
  EXPECT_EQ(tripped_at, 321);
  EXPECT_FALSE(s.u);
}

TEST(Shedder, LeavingBandResetsTimer) {
  const auto p = single(59.85, 1.0);
  RandomStream rng(1);
  auto s = initial_device_state(p, rng);
  for (int k = 0; k < 90; ++k) s = step_device(s, p, 59.85, 0.01, rng);
  EXPECT_EQ(s.mode, ShedMode::TimingTrip);
  s = step_device(s, p, 60.0, 0.01, rng);
  EXPECT_EQ(s.mode, ShedMode::Armed);
  EXPECT_EQ(s.t1, 0.0);
  for (int k = 0; k < 100; ++k) s = step_device(s, p, 59.85, 0.01, rng);
  EXPECT_EQ(s.mode, ShedMode::TimingTrip);
  s = step_device(s, p, 59.85, 0.01, rng);
  EXPECT_EQ(s.mode, ShedMode::Shed);
}

TEST(Shedder, BandEdgesAreInclusive) {
  const auto p = single(59.55, 0.0);
  EXPECT_TRUE(band_match(59.60, p));
  EXPECT_TRUE(band_match(59.50, p));
  EXPECT_FALSE(band_match(59.601, p));
  EXPECT_FALSE(band_match(59.85, p));
}

TEST(Shedder, SectionalizerTripsOnSecondInBandStep) {
  UflsParams p = single(58.65, 0.02);
  RandomStream rng(3);
  auto s = initial_device_state(p, rng);
  s = step_device(s, p, 58.65, 0.01, rng);
  s = step_device(s, p, 58.65, 0.01, rng);
  EXPECT_EQ(s.mode, ShedMode::TimingTrip);
  s = step_device(s, p, 58.65, 0.01, rng);
  EXPECT_EQ(s.mode, ShedMode::Shed);
}

TEST(Shedder, ReconnectsAfterTau2PlusRandom) {
  UflsParams p = single(59.85, 0.0);
  p.tau2 = 2.0;
  p.tau_rand_max = 1.0;
  RandomStream rng(9);
  auto s = initial_device_state(p, rng);
  const double tau_rand = s.tau_rand_drawn;
  s = step_device(s, p, 59.85, 0.01, rng);
  ASSERT_EQ(s.mode, ShedMode::Shed);
  int k = 0;
  while (s.mode != ShedMode::Armed) {
    s = step_device(s, p, 60.0, 0.01, rng);
    ++k;
    if (k == 200) EXPECT_EQ(s.mode, ShedMode::Recovering);
    ASSERT_LT(k, 400);
  }
  EXPECT_EQ(k, static_cast<int>(std::ceil((2.0 + tau_rand) / 0.01 - 1e-7)));
  EXPECT_TRUE(s.u);
}

TEST(Shedder, ThreePhaseApplianceTripsOnAnyBand) {
  UflsParams p;
  p.setpoints = {59.85, 59.55, 59.25};
  EXPECT_TRUE(band_match(59.25, p));
  EXPECT_TRUE(band_match(59.55, p));
  EXPECT_FALSE(band_match(59.4, p));
}

TEST(Shedder, EffectiveOnIsLogicalAnd) {
  static_assert(effective_on(true, true));
  static_assert(!effective_on(true, false));
  static_assert(!effective_on(false, true));
  static_assert(!effective_on(false, false));
}

TEST(RideThrough, BoundValues) {
  const double at_5925 = max_tripping_delay_bound(59.25);
  EXPECT_GE(at_5925, 655.0);
  EXPECT_LE(at_5925, 663.0);
  const double at_5865 = max_tripping_delay_bound(58.65);
  EXPECT_GE(at_5865, 59.0);
  EXPECT_LE(at_5865, 61.0);
  for (double f : {57.0, 57.5, 58.0, 58.65, 59.25, 59.85, 60.0}) {
    const long double oracle = std::pow(10.0L, 1.7373L * static_cast<long double>(f) - 100.116L);
    EXPECT_NEAR(max_tripping_delay_bound(f) / static_cast<double>(oracle), 1.0, 1e-9) << f;
  }
  EXPECT_NEAR(max_tripping_delay_bound(57.0), 0.0813, 0.0005);
}

TEST(RideThrough, OutOfRangeThrows) {
  EXPECT_THROW(max_tripping_delay_bound(56.99), std::out_of_range);
  EXPECT_THROW(max_tripping_delay_bound(60.01), std::out_of_range);
  EXPECT_THROW(max_tripping_delay_bound(std::nan("")), std::out_of_range);
}

TEST(Shedder, DelayDrawsStayInRange) {
  UflsParams p;
  p.setpoints = {59.85};
  p.tau1_max = 10.0;
  p.tau_rand_max = 180.0;
  RandomStream rng(11);
  for (int i = 0; i < 10000; ++i) {
    const auto d = draw_delays(p, rng);
    ASSERT_GE(d.tau1, 0.0);
    ASSERT_LT(d.tau1, 10.0);
    ASSERT_GE(d.tau_rand, 0.0);
    ASSERT_LT(d.tau_rand, 180.0);
  }
}

// Reference model written from the state-machine description with plain
// step counters; compared against step_device on random frequency traces.
namespace {

struct Oracle {
  enum Mode { Armed, Timing, Shed, Recovering } mode = Armed;
  std::int64_t in_band = 0;
  std::int64_t since_shed = 0;
  double tau1 = 0.0;
  double tau_rand = 0.0;
};

void oracle_draw(Oracle& o, const UflsParams& p, RandomStream& rng) {
  const double a = rng.uniform(0.0, p.tau1_max);
  o.tau1 = p.fixed_tau1 ? *p.fixed_tau1 : a;
  o.tau_rand = rng.uniform(0.0, p.tau_rand_max);
}

bool oracle_in_band(double f, const UflsParams& p) {
  for (double sp : p.setpoints) {
    if (std::abs(f - sp) <= p.deadband + 1e-9) return true;
  }
  return false;
}

void oracle_step(Oracle& o, const UflsParams& p, double f, double dt, RandomStream& rng) {
  const auto due = [&](std::int64_t ticks, double delay) { return static_cast<double>(ticks) * dt + 1e-9 >= delay; };
  switch (o.mode) {
    case Oracle::Armed:
    case Oracle::Timing:
      if (!oracle_in_band(f, p)) {
        o.mode = Oracle::Armed;
        o.in_band = 0;
        return;
      }
      if (o.mode == Oracle::Armed) {
        o.mode = Oracle::Timing;
        o.in_band = 0;
      } else {
        ++o.in_band;
      }
      if (due(o.in_band, o.tau1)) {
        o.mode = Oracle::Shed;
        o.since_shed = 0;
      }
      return;
    case Oracle::Shed:
    case Oracle::Recovering:
      ++o.since_shed;
      if (due(o.since_shed, p.tau2 + o.tau_rand)) {
        o.mode = Oracle::Armed;
        o.in_band = 0;
        oracle_draw(o, p, rng);
      } else if (due(o.since_shed, p.tau2)) {
        o.mode = Oracle::Recovering;
      }
      return;
  }
}

ShedMode as_mode(Oracle::Mode m) {
  switch (m) {
    case Oracle::Armed: return ShedMode::Armed;
    case Oracle::Timing: return ShedMode::TimingTrip;
    case Oracle::Shed: return ShedMode::Shed;
    case Oracle::Recovering: return ShedMode::Recovering;
  }
  return ShedMode::Armed;
}

}  // namespace

TEST(ShedderProperty, MatchesReferenceModelOnRandomTraces) {
  RandomStream gen(77);
  const double setpoints[] = {59.85, 59.55, 59.25, 58.95, 58.65};
  for (int trace = 0; trace < 10000; ++trace) {
    UflsParams p;
    p.setpoints = {setpoints[static_cast<int>(gen.uniform(0.0, 5.0))]};
    p.tau1_max = gen.uniform(0.0, 0.5);
    if (gen.uniform01() < 0.2) p.fixed_tau1 = 0.02;
    p.tau2 = gen.uniform(0.05, 0.6);
    p.tau_rand_max = gen.uniform(0.0, 0.3);
    const double dt = gen.uniform01() < 0.5 ? 0.01 : 0.005;
    const std::uint64_t seed = static_cast<std::uint64_t>(trace) * 7919u + 1u;
    RandomStream a(seed);
    RandomStream b(seed);
    auto s = initial_device_state(p, a);
    Oracle o;
    oracle_draw(o, p, b);
    double f = 60.0;
    for (int k = 0; k < 300; ++k) {
      // Piecewise-constant walk that dwells near the setpoint.
      if (gen.uniform01() < 0.1) {
        f = gen.uniform01() < 0.6 ? p.setpoints[0] + gen.uniform(-0.06, 0.06) : gen.uniform(58.5, 60.0);
      }
      s = step_device(s, p, f, dt, a);
      oracle_step(o, p, f, dt, b);
      ASSERT_EQ(s.mode, as_mode(o.mode)) << "trace " << trace << " step " << k;
      ASSERT_EQ(s.u, o.mode == Oracle::Armed || o.mode == Oracle::Timing);
      ASSERT_EQ(s.tau1_drawn, o.tau1);
      // u is false exactly while shed or recovering, and a trip requires the band.
      if (s.mode == ShedMode::TimingTrip) ASSERT_TRUE(band_match(f, p));
    }
  }
}
