#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace fatiguekit;

TEST(LoadProfileEvaluate, Constant) {
  EXPECT_EQ(evaluate(LoadProfile::constant(50.0), 3.7), 50.0);
}

TEST(LoadProfileEvaluate, CyclicSquareWave) {
  const auto p = LoadProfile::cyclic(80.0, 0.0, 1.0, 0.25);
  EXPECT_EQ(evaluate(p, 0.2), 80.0);
  EXPECT_EQ(evaluate(p, 0.3), 0.0);
  // right-continuous switch: the boundary itself is already low
  EXPECT_EQ(evaluate(p, 0.25), 0.0);
  EXPECT_EQ(p.left_limit(0.25), 80.0);
  EXPECT_EQ(evaluate(p, 1.0), 80.0);
  EXPECT_EQ(p.left_limit(1.0), 0.0);
}

TEST(LoadProfileEvaluate, SampledLinearAndHold) {
  const auto lin = LoadProfile::sampled({{0.0, 0.0}, {1.0, 100.0}});
  EXPECT_EQ(evaluate(lin, 0.25), 25.0);
  EXPECT_EQ(evaluate(lin, 1.0), 100.0);

  const auto hold = LoadProfile::sampled({{0.0, 10.0}, {1.0, 100.0}, {2.0, 5.0}},
                                         Interpolation::hold_previous);
  EXPECT_EQ(evaluate(hold, 0.99), 10.0);
  EXPECT_EQ(evaluate(hold, 1.0), 100.0);
  EXPECT_EQ(hold.left_limit(1.0), 10.0);
  EXPECT_EQ(evaluate(hold, 2.0), 5.0);
}

TEST(LoadProfileEvaluate, SampledOutsideRangeIsDomainError) {
  const auto p = LoadProfile::sampled({{1.0, 0.0}, {2.0, 100.0}});
  EXPECT_THROW(evaluate(p, 0.5), DomainError);
  EXPECT_THROW(evaluate(p, 2.0001), DomainError);
  EXPECT_THROW(evaluate(LoadProfile::constant(1.0), -0.1), DomainError);
}

TEST(LoadProfileEvaluate, CompositeSegments) {
  const auto p = LoadProfile::composite({{1.0, LoadProfile::constant(10.0)},
                                         {2.0, LoadProfile::sampled({{0.0, 0.0}, {2.0, 40.0}})}});
  EXPECT_EQ(evaluate(p, 0.5), 10.0);
  EXPECT_EQ(evaluate(p, 1.0), 0.0);
  EXPECT_EQ(p.left_limit(1.0), 10.0);
  EXPECT_EQ(evaluate(p, 2.0), 20.0);
  EXPECT_EQ(evaluate(p, 3.0), 40.0);
  EXPECT_THROW(evaluate(p, 3.5), DomainError);
}

TEST(LoadProfileConstruction, RejectsInvalidShapes) {
  EXPECT_THROW(LoadProfile::constant(-1.0), InputError);
  EXPECT_THROW(LoadProfile::constant(NAN), InputError);
  EXPECT_THROW(LoadProfile::cyclic(1.0, 0.0, 0.0, 0.5), ParameterError);
  EXPECT_THROW(LoadProfile::cyclic(1.0, 0.0, 1.0, 1.0), ParameterError);
  EXPECT_THROW(LoadProfile::cyclic(1.0, 0.0, 1.0, 0.0), ParameterError);
  EXPECT_THROW(LoadProfile::sampled({{0.0, 1.0}}), InsufficientDataError);
  EXPECT_THROW(LoadProfile::sampled({{0.0, 1.0}, {0.0, 2.0}}), InputError);
  EXPECT_THROW(LoadProfile::sampled({{0.0, 1.0}, {1.0, INFINITY}}), InputError);
  EXPECT_THROW(LoadProfile::composite({{0.0, LoadProfile::constant(1.0)}}), ParameterError);
  EXPECT_THROW(LoadProfile::composite({{2.0, LoadProfile::sampled({{0.0, 1.0}, {1.0, 1.0}})}}),
               DomainError);
}

TEST(Resample, ConstantGrid) {
  const auto r = resample(LoadProfile::constant(50.0), 0.5, 1.0);
  const auto &s = std::get<SampledLoad>(r.variant()).samples;
  const std::vector<LoadSample> want{{0.0, 50.0}, {0.5, 50.0}, {1.0, 50.0}};
  EXPECT_EQ(s, want);
}

TEST(Resample, CyclicMeanMatchesDutyCycle) {
  const double high = 80.0;
  const double low = 20.0;
  const double period = 0.5;
  const double duty = 0.3;
  const auto r = resample(LoadProfile::cyclic(high, low, period, duty), period / 100, 10 * period);
  const auto &s = std::get<SampledLoad>(r.variant()).samples;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    sum += s[i].f_load;
  }
  const double sample_mean = sum / static_cast<double>(s.size() - 1);
  const double analytic = duty * high + (1 - duty) * low;
  EXPECT_LT(std::abs(sample_mean - analytic) / analytic, 0.01);
}

TEST(Resample, PreservesEndpointsAndGridValues) {
  const auto ramp = LoadProfile::sampled({{0.0, 0.0}, {1.0, 30.0}});
  const auto r = resample(ramp, 0.03, 1.0);
  const auto &s = std::get<SampledLoad>(r.variant()).samples;
  EXPECT_EQ(s.front(), (LoadSample{0.0, 0.0}));
  EXPECT_EQ(s.back(), (LoadSample{1.0, 30.0}));
  for (const auto &p : s) {
    EXPECT_EQ(evaluate(r, p.t), evaluate(ramp, p.t));
  }
}

TEST(Resample, IdempotentOnGridValues) {
  const auto src = LoadProfile::cyclic(60.0, 5.0, 0.37, 0.4);
  const auto once = resample(src, 0.01, 2.0);
  const auto twice = resample(once, 0.01, 2.0);
  EXPECT_EQ(std::get<SampledLoad>(once.variant()).samples,
            std::get<SampledLoad>(twice.variant()).samples);
}

TEST(Resample, Errors) {
  const auto p = LoadProfile::sampled({{0.0, 1.0}, {1.0, 2.0}});
  EXPECT_THROW(resample(p, 0.1, 2.0), DomainError);
  EXPECT_THROW(resample(p, 0.0, 1.0), ParameterError);
  EXPECT_THROW(resample(p, 0.1, 0.0), ParameterError);
}

TEST(MeanRelativeLoad, Examples) {
  const MuscleParameters m{"m", 100.0, 1.0};
  EXPECT_DOUBLE_EQ(mean_relative_load(LoadProfile::constant(50.0), m, 7.0), 0.5);
  EXPECT_DOUBLE_EQ(mean_relative_load(LoadProfile::constant(0.0), m, 7.0), 0.0);
  const auto cyc = LoadProfile::cyclic(100.0, 0.0, 1.0, 0.3);
  const double numeric = fatiguekit::testing::riemann(
                             [&](double t) { return evaluate(cyc, t); }, 0.0, 10.0, 1e-5) /
                         100.0 / 10.0;
  EXPECT_NEAR(numeric, 0.3, 1e-4);
  EXPECT_NEAR(mean_relative_load(cyc, m, 10.0), 0.3, 1e-12);
  EXPECT_THROW(mean_relative_load(cyc, m, 0.0), ParameterError);
}

TEST(LoadProfileProperties, CyclicIsPeriodic) {
  const auto p = LoadProfile::cyclic(80.0, 15.0, 0.5, 0.35);
  std::mt19937_64 rng(fatiguekit::testing::test_seed());
  std::uniform_real_distribution<double> t(0.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    double x = t(rng);
    // stay clear of the switching instants, where the sum t + period rounds
    const double phase = std::fmod(x, 0.5);
    if (std::abs(phase) < 1e-9 || std::abs(phase - 0.175) < 1e-9) {
      continue;
    }
    EXPECT_EQ(evaluate(p, x), evaluate(p, x + 0.5));
  }
}

TEST(LoadProfileProperties, SingleSegmentCompositeMatchesInner) {
  const auto inner = LoadProfile::cyclic(50.0, 10.0, 0.2, 0.5);
  const auto c = LoadProfile::composite({{1.0, inner}});
  const MuscleParameters m{"m", 100.0, 1.0};
  for (double t = 0.0; t <= 1.0; t += 0.013) {
    EXPECT_EQ(evaluate(c, t), evaluate(inner, t));
  }
  EXPECT_DOUBLE_EQ(integrate(c, 0.0, 1.0, 0.01), integrate(inner, 0.0, 1.0, 0.01));
  EXPECT_EQ(endurance_time(m, c, 1.0, 0.01), endurance_time(m, inner, 1.0, 0.01));
}

TEST(LoadCsv, ParsesAndValidates) {
  const auto p = parse_sampled_csv("# load\nt_min,f_load_N\n0,10\n0.5,20\n1,0\n");
  const auto &s = std::get<SampledLoad>(p.variant()).samples;
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[1], (LoadSample{0.5, 20.0}));

  try {
    parse_sampled_csv("t_min,f_load_N\n0,10\n0.5,20\n0.4,1\n");
    FAIL() << "expected parse error";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(parse_sampled_csv("t,f\n0,1\n1,2\n"), ParseError);
  EXPECT_THROW(parse_sampled_csv("t_min,f_load_N\n0,nan\n1,2\n"), ParseError);
  EXPECT_THROW(parse_sampled_csv("t_min,f_load_N\n0,1,3\n1,2\n"), ParseError);
  EXPECT_THROW(parse_sampled_csv("t_min,f_load_N\n0,1\n"), ParseError);
  EXPECT_THROW(parse_sampled_csv("t_min,f_load_N\n0,-1\n1,2\n"), ParseError);
  EXPECT_NO_THROW(parse_sampled_csv("t_min,mass_kg\n0,1\n1,2\n", "mass_kg"));
}

TEST(LoadCsv, RoundTripsSampledProfiles) {
  std::mt19937_64 rng(fatiguekit::testing::test_seed());
  std::uniform_real_distribution<double> v(0.0, 500.0);
  std::vector<LoadSample> s;
  double t = 0.0;
  for (int i = 0; i < 50; ++i) {
    s.push_back({text::round9(t), text::round9(v(rng))});
    t += 0.0123;
  }
  const auto p = LoadProfile::sampled(s);
  const auto back = parse_sampled_csv(to_csv(std::get<SampledLoad>(p.variant())));
  EXPECT_EQ(std::get<SampledLoad>(back.variant()).samples, s);
}
