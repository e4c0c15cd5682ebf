#include <gtest/gtest.h>

#include <cmath>

#include "numerics.hpp"

namespace num = fatiguekit::numerics;

TEST(Simpson, ExactForCubics) {
  auto cubic = [](double x) { return 2.0 * x * x * x - x + 3.0; };
  // integral over [0, 2] = 8 - 2 + 6
  EXPECT_NEAR(num::simpson(cubic, 0.0, 2.0, 1.0), 12.0, 1e-13);
}

TEST(Simpson, IntervalCountIsEvenAndRespectsStep) {
  EXPECT_EQ(num::simpson_intervals(1.0, 10.0), 2u);
  EXPECT_EQ(num::simpson_intervals(1.0, 0.3), 4u);
  EXPECT_EQ(num::simpson_intervals(1.0, 0.25), 4u);
  EXPECT_THROW(num::simpson_intervals(1.0, 0.0), fatiguekit::ParameterError);
}

TEST(Simpson, RejectsNonFiniteSamples) {
  auto bad = [](double x) { return x > 0.5 ? NAN : 1.0; };
  EXPECT_THROW(num::simpson(bad, 0.0, 1.0, 0.1), fatiguekit::InputError);
}

TEST(Rk4, FourthOrderOnExponentialDecay) {
  auto rhs = [](const std::array<double, 1> &y) { return std::array<double, 1>{-y[0]}; };
  auto global_error = [&](int n) {
    std::array<double, 1> y{1.0};
    const double h = 1.0 / n;
    for (int i = 0; i < n; ++i) {
      y = num::rk4_step<1>(y, h, rhs);
    }
    return std::abs(y[0] - std::exp(-1.0));
  };
  const double ratio = global_error(10) / global_error(20);
  EXPECT_GT(ratio, 14.0);
  EXPECT_LT(ratio, 18.0);
}

TEST(Bisection, FindsThresholdOfMonotonePredicate) {
  auto pred = [](double x) { return x * x >= 2.0; };
  const double r = num::bisect_first_true(pred, 0.0, 2.0, 1e-12);
  EXPECT_NEAR(r, std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(pred(r));
}
