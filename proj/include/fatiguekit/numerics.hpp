#pragma once

/**
 * @file numerics.hpp
 * @brief Generic numerical kernels: composite Simpson quadrature, a classical
 * fixed-step Runge-Kutta stage and bracketed bisection.
 */

#include <array>
#include <cmath>
#include <cstddef>

#include "errors.hpp"

namespace fatiguekit::numerics {

/// Number of Simpson subintervals (always even, at least 2) so that the
/// subinterval width does not exceed max_step.
inline std::size_t simpson_intervals(double width, double max_step) {
  if (!(max_step > 0.0)) {
    throw ParameterError("integration step must be positive");
  }
  auto n = static_cast<std::size_t>(std::ceil(width / max_step));
  if (n < 2) {
    n = 2;
  }
  if (n % 2 != 0) {
    ++n;
  }
  return n;
}

/**
 * Composite Simpson rule over [a, b]. The endpoint values are passed in
 * explicitly so callers integrating piecewise functions can supply one-sided
 * limits at discontinuities; interior nodes are sampled through f.
 */
template <typename Func>
double simpson(Func &&f, double a, double b, double fa, double fb,
               double max_step) {
  if (b <= a) {
    return 0.0;
  }
  const std::size_t n = simpson_intervals(b - a, max_step);
  const double h = (b - a) / static_cast<double>(n);

  auto sample = [&](double t) {
    const double v = f(t);
    if (!std::isfinite(v)) {
      throw InputError("non-finite integrand sample at t = " +
                       std::to_string(t));
    }
    return v;
  };
  if (!std::isfinite(fa) || !std::isfinite(fb)) {
    throw InputError("non-finite integrand at interval endpoint");
  }

  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double t = a + h * static_cast<double>(i);
    if (i % 2 == 1) {
      odd += sample(t);
    } else {
      even += sample(t);
    }
  }
  return h / 3.0 * (fa + fb + 4.0 * odd + 2.0 * even);
}

template <typename Func>
double simpson(Func &&f, double a, double b, double max_step) {
  return simpson(f, a, b, f(a), f(b), max_step);
}

/**
 * One classical RK4 step for an autonomous system y' = rhs(y).
 * rhs receives a stage vector and returns its derivative.
 */
template <std::size_t N, typename Rhs>
std::array<double, N> rk4_step(const std::array<double, N> &y, double dt,
                               Rhs &&rhs) {
  auto axpy = [](const std::array<double, N> &base, double s,
                 const std::array<double, N> &dir) {
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = base[i] + s * dir[i];
    }
    return out;
  };

  const auto k1 = rhs(y);
  const auto k2 = rhs(axpy(y, dt / 2.0, k1));
  const auto k3 = rhs(axpy(y, dt / 2.0, k2));
  const auto k4 = rhs(axpy(y, dt, k3));

  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

/**
 * Bisection on (lo, hi] where pred(lo) is false and pred(hi) is true.
 * Returns the smallest point found (to within tol) at which pred holds.
 */
template <typename Pred>
double bisect_first_true(Pred &&pred, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

} // namespace fatiguekit::numerics
