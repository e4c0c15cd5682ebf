#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "test_support.hpp"

using namespace fatiguekit;
using fatiguekit::testing::rel_err;

namespace {
const MuscleParameters kRef{"ref", 100.0, 1.0};
}

// --- accumulated_load ------------------------------------------------------

TEST(AccumulatedLoad, ZeroLoadGivesZero) {
  EXPECT_EQ(accumulated_load(LoadProfile::constant(0.0), kRef, 0.0, 5.0, 0.01), 0.0);
  EXPECT_EQ(accumulated_load(LoadProfile::constant(0.0), kRef, 2.0, 2.5, 0.01), 0.0);
}

TEST(AccumulatedLoad, ConstantLoadIsExact) {
  EXPECT_DOUBLE_EQ(accumulated_load(LoadProfile::constant(50.0), kRef, 0.0, 1.0, 0.01), 0.5);
}

TEST(AccumulatedLoad, SinusoidMatchesAnalyticAndRiemannOracle) {
  auto load = [](double t) { return 50.0 * (1.0 + std::sin(2.0 * std::numbers::pi * t)); };
  const double oracle =
      fatiguekit::testing::riemann([&](double t) { return load(t) / 100.0; }, 0.0, 1.0, 1e-6);
  EXPECT_NEAR(oracle, 0.5, 1e-9);
  const double got = accumulated_load(load, kRef, 0.0, 1.0, 1e-3);
  EXPECT_NEAR(got, 0.5, 1e-12);
  EXPECT_NEAR(got, oracle, 1e-9);
}

TEST(AccumulatedLoad, AdditiveOverAdjacentIntervals) {
  const auto p = LoadProfile::cyclic(80.0, 10.0, 0.7, 0.3);
  const double whole = accumulated_load(p, kRef, 0.0, 5.0, 1e-3);
  const double parts = accumulated_load(p, kRef, 0.0, 1.234, 1e-3) +
                       accumulated_load(p, kRef, 1.234, 5.0, 1e-3);
  EXPECT_NEAR(whole, parts, 1e-12);
  // 7 full periods of (0.21 min at 80 N + 0.49 min at 10 N), then 0.1 min at 80 N
  EXPECT_NEAR(whole, (7.0 * (0.21 * 80.0 + 0.49 * 10.0) + 0.1 * 80.0) / 100.0, 1e-12);
}

TEST(AccumulatedLoad, Errors) {
  const auto p = LoadProfile::constant(10.0);
  EXPECT_THROW(accumulated_load(p, kRef, 0.0, 1.0, 0.0), ParameterError);
  EXPECT_THROW(accumulated_load(p, kRef, 0.0, 1.0, -1.0), ParameterError);
  EXPECT_THROW(accumulated_load(p, kRef, 1.0, 0.5, 0.1), ParameterError);
  auto nan_load = [](double t) { return t > 0.3 ? NAN : 1.0; };
  EXPECT_THROW(accumulated_load(nan_load, kRef, 0.0, 1.0, 0.01), InputError);
  const auto sampled = LoadProfile::sampled({{0.0, 1.0}, {1.0, 2.0}});
  EXPECT_THROW(accumulated_load(sampled, kRef, 0.0, 2.0, 0.01), DomainError);
}

// --- closed forms ------------------------------------------------------------

TEST(FcemClosedForm, NoHistoryGivesMvc) {
  EXPECT_EQ(fcem_closed_form(kRef, 0.0), 100.0);
}

TEST(FcemClosedForm, MatchesRk4Oracle) {
  EXPECT_NEAR(fcem_closed_form(kRef, 0.5), 60.653065971263345, 1e-10);
  const auto s1 = fatiguekit::testing::rk4_oracle(kRef, {{1.0, 50.0}}, 1e-4);
  EXPECT_LT(rel_err(fcem_closed_form(kRef, 0.5), s1.fcem), 1e-10);

  const MuscleParameters p{"b", 400.0, 2.0};
  EXPECT_NEAR(fcem_closed_form(p, 1.0), 54.13411329464508, 1e-10);
  const auto s2 = fatiguekit::testing::rk4_oracle(p, {{2.0, 200.0}}, 1e-4);
  EXPECT_LT(rel_err(fcem_closed_form(p, 1.0), s2.fcem), 1e-9);
}

TEST(FcemClosedForm, RejectsNegativeAccumulation) {
  EXPECT_THROW(fcem_closed_form(kRef, -1e-12), ParameterError);
  EXPECT_THROW(fcem_closed_form({"x", -1.0, 1.0}, 0.0), ParameterError);
  EXPECT_THROW(fcem_closed_form({"x", 1.0, 0.0}, 0.0), ParameterError);
}

TEST(FatigueIndexClosedForm, ZeroWithoutLoad) {
  EXPECT_EQ(fatigue_index_closed_form(kRef, 0.0, 0.0), 0.0);
}

TEST(FatigueIndexClosedForm, MatchesRk4Oracle) {
  EXPECT_NEAR(fatigue_index_closed_form(kRef, 0.5, 0.0), 0.8591409142295225, 1e-12);
  const auto s = fatiguekit::testing::rk4_oracle(kRef, {{1.0, 50.0}}, 1e-4);
  EXPECT_LT(rel_err(fatigue_index_closed_form(kRef, 0.5), s.u), 1e-10);
}

TEST(FatigueIndexClosedForm, SubIntervalMatchesRk4Oracle) {
  const MuscleParameters p{"h", 100.0, 0.5};
  EXPECT_NEAR(fatigue_index_closed_form(p, 0.7, 0.2), 0.7923499493103068, 1e-12);
  // start already carrying F = 0.2, then relative load 0.5 for 1 min
  MuscleState start{0.0, p.mvc * std::exp(-p.k * 0.2), 0.2, 0.0};
  const auto s = fatiguekit::testing::rk4_oracle(p, {{1.0, 50.0}}, 1e-4, start);
  EXPECT_NEAR(s.f_acc, 0.7, 1e-12);
  EXPECT_LT(rel_err(fatigue_index_closed_form(p, 0.7, 0.2), s.u), 1e-10);
}

TEST(FatigueIndexClosedForm, StrictlyIncreasingAndOrdered) {
  double prev = 0.0;
  for (double f = 0.01; f < 2.0; f += 0.01) {
    const double u = fatigue_index_closed_form(kRef, f, 0.0);
    EXPECT_GT(u, prev);
    prev = u;
  }
  EXPECT_THROW(fatigue_index_closed_form(kRef, 0.1, 0.2), ParameterError);
  EXPECT_THROW(fatigue_index_closed_form(kRef, 0.1, -0.1), ParameterError);
}

// --- reference integrator ----------------------------------------------------

TEST(StepReferenceOde, ZeroLoadIsFixedPoint) {
  const MuscleState s{1.5, 70.0, 0.356, 0.2};
  const auto n = step_reference_ode(s, kRef, 0.0, 0.25);
  EXPECT_EQ(n.t, 1.75);
  EXPECT_EQ(n.fcem, s.fcem);
  EXPECT_EQ(n.f_acc, s.f_acc);
  EXPECT_EQ(n.u, s.u);
}

TEST(StepReferenceOde, ConvergesToClosedForm) {
  MuscleState s = MuscleState::fresh(kRef);
  for (int i = 0; i < 10000; ++i) {
    s = step_reference_ode(s, kRef, 50.0, 1e-4);
  }
  EXPECT_LT(rel_err(s.fcem, 60.653065971263345), 1e-6);
  EXPECT_LT(rel_err(s.u, 0.8591409142295225), 1e-6);
  EXPECT_NEAR(s.t, 1.0, 1e-9);
}

TEST(StepReferenceOde, LocalErrorIsFifthOrder) {
  const MuscleParameters p{"o", 100.0, 2.0};
  auto defect = [&](double dt) {
    const auto fresh = MuscleState::fresh(p);
    const auto full = step_reference_ode(fresh, p, 90.0, dt);
    const auto half = step_reference_ode(step_reference_ode(fresh, p, 90.0, dt / 2), p, 90.0, dt / 2);
    return std::abs(full.u - half.u);
  };
  // tiny at the nominal step
  EXPECT_LT(defect(1e-3), 1e-12);
  // and shrinking ~32x per halving where it is above roundoff
  const double ratio = defect(0.1) / defect(0.05);
  EXPECT_GT(ratio, 24.0);
  EXPECT_LT(ratio, 40.0);
}

TEST(StepReferenceOde, CapacityFloorRaises) {
  EXPECT_THROW(step_reference_ode(MuscleState::fresh(kRef), kRef, 1e4, 1.0),
               CapacityExhaustedError);
  const MuscleState weak{0.0, 1e-3, 11.5, 1e6};
  EXPECT_THROW(step_reference_ode(weak, kRef, 10.0, 1.0, 1e-4), CapacityExhaustedError);
}

TEST(StepReferenceOde, RejectsBadArguments) {
  const auto s = MuscleState::fresh(kRef);
  EXPECT_THROW(step_reference_ode(s, kRef, 10.0, 0.0), ParameterError);
  EXPECT_THROW(step_reference_ode(s, kRef, -1.0, 0.1), ParameterError);
  EXPECT_THROW(step_reference_ode({0.0, 200.0, 0.0, 0.0}, kRef, 1.0, 0.1), ParameterError);
}

// --- endurance ---------------------------------------------------------------

TEST(EnduranceTime, ConstantHalfLoad) {
  const auto t = endurance_time(kRef, LoadProfile::constant(50.0), 5.0, 1e-3);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 1.3862943611198906, 1e-7);
  EXPECT_NEAR(*t, fatiguekit::testing::rk4_endurance_oracle(kRef, 50.0, 1e-5), 1e-6);
}

TEST(EnduranceTime, LoadEqualToCapacityIsImmediate) {
  EXPECT_EQ(endurance_time(kRef, LoadProfile::constant(100.0), 5.0, 1e-3), 0.0);
  EXPECT_EQ(endurance_time(kRef, LoadProfile::constant(150.0), 5.0, 1e-3), 0.0);
}

TEST(EnduranceTime, LowLoadSlowRate) {
  const MuscleParameters p{"s", 100.0, 0.5};
  const auto t = endurance_time(p, LoadProfile::constant(20.0), 40.0, 1e-2);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 16.094379124341003, 1e-7);
  EXPECT_NEAR(*t, fatiguekit::testing::rk4_endurance_oracle(p, 20.0, 1e-4), 1e-6);
}

TEST(EnduranceTime, NoExhaustion) {
  EXPECT_FALSE(endurance_time(kRef, LoadProfile::constant(0.0), 100.0, 0.1));
  EXPECT_FALSE(endurance_time(kRef, LoadProfile::constant(50.0), 1.0, 1e-3));
}

TEST(EnduranceTime, CrossingBeforeLoadDropIsFound) {
  // Overload begins inside the first high phase at ln(1.25)/0.8 min. The
  // scan step is wider than the high phase, so only the left-limit check
  // at the switch to the low level catches it.
  const auto p = LoadProfile::cyclic(80.0, 0.0, 1.0, 0.5);
  const auto t = endurance_time(kRef, p, 3.0, 0.9);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 0.2789294391427622, 1e-7);
}

TEST(EnduranceTime, StartOffset) {
  const auto t = endurance_time(kRef, LoadProfile::constant(50.0), 10.0, 1e-3, 2.0);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 2.0 + 1.3862943611198906, 1e-7);
}

TEST(EnduranceTime, AnalyticFormulaHelpers) {
  EXPECT_NEAR(*constant_load_endurance(0.5, 1.0), 1.3862943611198906, 1e-15);
  EXPECT_EQ(*constant_load_endurance(1.0, 1.0), 0.0);
  EXPECT_FALSE(constant_load_endurance(0.0, 1.0));
  EXPECT_NEAR(*constant_load_exhaustion_fatigue(0.5, 1.0), 1.5, 1e-15);
  // U at the analytic endurance equals the helper value
  const double f_star = 0.5 * 1.3862943611198906;
  EXPECT_NEAR(fatigue_index_closed_form(kRef, f_star), 1.5, 1e-12);
}

// --- properties --------------------------------------------------------------

TEST(FatigueProperties, ClosedFormAgreesWithOracleOnRandomProfiles) {
  std::mt19937_64 rng(fatiguekit::testing::test_seed());
  for (int i = 0; i < 20; ++i) {
    const auto c = fatiguekit::testing::random_case(rng);
    const auto profile = fatiguekit::testing::to_profile(c.segments);
    const double horizon = fatiguekit::testing::total_duration(c.segments);
    const auto closed = evolve(MuscleState::fresh(c.params), c.params, profile, horizon);
    const auto oracle = fatiguekit::testing::rk4_oracle(c.params, c.segments, 1e-3);
    EXPECT_LT(rel_err(closed.fcem, oracle.fcem), 1e-5) << "case " << i;
    EXPECT_LT(rel_err(closed.u, oracle.u), 1e-5) << "case " << i;
  }
}

TEST(FatigueProperties, MonotoneTrajectories) {
  const auto p = LoadProfile::composite({{0.3, LoadProfile::constant(40.0)},
                                         {0.2, LoadProfile::constant(0.0)},
                                         {0.5, LoadProfile::cyclic(70.0, 5.0, 0.1, 0.4)}});
  MuscleState s = MuscleState::fresh(kRef);
  for (int i = 1; i <= 100; ++i) {
    const auto next = evolve(s, kRef, p, i * 0.01);
    EXPECT_LE(next.fcem, s.fcem);
    EXPECT_GE(next.u, s.u);
    const bool loaded = i * 0.01 <= 0.3 + 1e-12 || i * 0.01 > 0.5 + 1e-12;
    if (loaded) {
      EXPECT_LT(next.fcem, s.fcem);
      EXPECT_GT(next.u, s.u);
    } else {
      EXPECT_EQ(next.fcem, s.fcem);
      EXPECT_EQ(next.u, s.u);
    }
    s = next;
  }
}

TEST(FatigueProperties, RelativeLoadScaleInvariance) {
  const auto base = LoadProfile::composite({{0.4, LoadProfile::constant(30.0)},
                                            {0.6, LoadProfile::cyclic(90.0, 10.0, 0.2, 0.5)}});
  for (double c : {0.25, 2.0, 8.0}) {
    const MuscleParameters scaled{"s", kRef.mvc * c, kRef.k};
    const auto sp = base.scaled(c);
    const auto a = evolve(MuscleState::fresh(kRef), kRef, base, 1.0);
    const auto b = evolve(MuscleState::fresh(scaled), scaled, sp, 1.0);
    EXPECT_EQ(a.f_acc, b.f_acc);
    EXPECT_EQ(a.u, b.u);
    EXPECT_EQ(a.fcem / kRef.mvc, b.fcem / scaled.mvc);
    EXPECT_EQ(endurance_time(kRef, base, 1.0, 1e-2), endurance_time(scaled, sp, 1.0, 1e-2));
  }
  // arbitrary factors agree to rounding
  const MuscleParameters odd{"o", kRef.mvc * 3.7, kRef.k};
  const auto a = evolve(MuscleState::fresh(kRef), kRef, base, 1.0);
  const auto b = evolve(MuscleState::fresh(odd), odd, base.scaled(3.7), 1.0);
  EXPECT_LT(rel_err(b.u, a.u), 1e-13);
}

TEST(FatigueProperties, LoadDominance) {
  const auto low = LoadProfile::cyclic(40.0, 5.0, 0.3, 0.5);
  const auto high = LoadProfile::cyclic(60.0, 5.0, 0.3, 0.5);
  for (double t = 0.05; t <= 2.0; t += 0.05) {
    const auto a = evolve(MuscleState::fresh(kRef), kRef, low, t);
    const auto b = evolve(MuscleState::fresh(kRef), kRef, high, t);
    EXPECT_GE(b.u, a.u);
    EXPECT_LE(b.fcem, a.fcem);
  }
}

TEST(FatigueProperties, TimeAdditivity) {
  const auto p = LoadProfile::sampled({{0.0, 10.0}, {0.5, 70.0}, {1.2, 20.0}, {2.0, 45.0}});
  const auto direct = evolve(MuscleState::fresh(kRef), kRef, p, 2.0);
  const auto mid = evolve(MuscleState::fresh(kRef), kRef, p, 0.83);
  const auto two = evolve(mid, kRef, p, 2.0);
  EXPECT_LT(rel_err(two.u, direct.u), 1e-9);
  EXPECT_LT(rel_err(two.fcem, direct.fcem), 1e-9);
  EXPECT_LT(rel_err(two.f_acc, direct.f_acc), 1e-9);
}

TEST(FatigueProperties, ConcurrentCallsAreDeterministic) {
  const auto p = LoadProfile::cyclic(70.0, 10.0, 0.1, 0.3);
  const auto ref = evolve(MuscleState::fresh(kRef), kRef, p, 3.0);
  std::vector<MuscleState> out(8);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < out.size(); ++i) {
    threads.emplace_back([&, i] { out[i] = evolve(MuscleState::fresh(kRef), kRef, p, 3.0); });
  }
  for (auto &t : threads) {
    t.join();
  }
  for (const auto &s : out) {
    EXPECT_EQ(s, ref);
  }
}
