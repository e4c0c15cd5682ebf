#pragma once

/**
 * @file fatigue.hpp
 * @brief Dynamic muscle fatigue model.
 *
 * Capacity decays under load as
 *
 *     dFcem/dt = -k * Fcem * F_load / MVC
 *
 * and the fatigue index accumulates as
 *
 *     dU/dt = (MVC / Fcem) * (F_load / Fcem).
 *
 * With the accumulated normalized load F(t) = integral of F_load/MVC, both
 * have closed forms: Fcem = MVC * exp(-k F) and
 * U = (exp(2kF(t)) - exp(2kF(0))) / (2k). The closed forms are the
 * production path; step_reference_ode() integrates the raw system with
 * classical RK4 and exists to cross-check them.
 *
 * No recovery: with zero load both Fcem and U stay constant.
 */

#include <array>
#include <cmath>
#include <concepts>
#include <optional>
#include <string>

#include "errors.hpp"
#include "load_profile.hpp"
#include "muscle.hpp"
#include "numerics.hpp"

namespace fatiguekit {

namespace detail {
inline void check_interval(double t0, double t1, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ParameterError("dt must be > 0");
  }
  if (!(t0 >= 0.0) || !(t1 >= t0) || !std::isfinite(t1)) {
    throw ParameterError("interval must satisfy t1 >= t0 >= 0");
  }
}
} // namespace detail

/// F over [t0, t1]: integral of f_load / mvc for a load profile.
inline double accumulated_load(const LoadProfile &profile,
                               const MuscleParameters &params, double t0,
                               double t1, double dt) {
  validate(params);
  detail::check_interval(t0, t1, dt);
  return integrate(profile, t0, t1, dt) / params.mvc;
}

/// F over [t0, t1] for an arbitrary load function f_load(t) in newtons,
/// by composite Simpson on a grid of step <= dt.
template <typename Load>
  requires std::invocable<Load &, double>
double accumulated_load(Load &&load, const MuscleParameters &params, double t0,
                        double t1, double dt) {
  validate(params);
  detail::check_interval(t0, t1, dt);
  return numerics::simpson(load, t0, t1, dt) / params.mvc;
}

inline double fcem_closed_form(const MuscleParameters &params, double f_acc) {
  validate(params);
  if (!(f_acc >= 0.0)) {
    throw ParameterError("accumulated load must be >= 0");
  }
  return params.mvc * std::exp(-params.k * f_acc);
}

/// Fatigue index gained between accumulation states f_0 <= f_t, in minutes.
inline double fatigue_index_closed_form(const MuscleParameters &params,
                                        double f_t, double f_0 = 0.0) {
  validate(params);
  if (!(f_0 >= 0.0)) {
    throw ParameterError("initial accumulated load must be >= 0");
  }
  if (!(f_t >= f_0)) {
    throw ParameterError("fatigue index requires f_t >= f_0");
  }
  const double two_k = 2.0 * params.k;
  // expm1 keeps small increments accurate: e^{a} - e^{b} = e^{b} (e^{a-b} - 1)
  return std::exp(two_k * f_0) * std::expm1(two_k * (f_t - f_0)) / two_k;
}

/**
 * One RK4 step of the coupled (Fcem, U, F) system under a load held constant
 * over the step. Throws CapacityExhaustedError when any stage would push Fcem
 * below floor_fraction * mvc.
 */
inline MuscleState step_reference_ode(const MuscleState &state,
                                      const MuscleParameters &params,
                                      double f_load, double dt,
                                      double floor_fraction = kDefaultCapacityFloor) {
  validate(params);
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ParameterError("dt must be > 0");
  }
  if (!(f_load >= 0.0) || !std::isfinite(f_load)) {
    throw ParameterError("f_load must be finite and >= 0");
  }
  if (!(state.fcem > 0.0) || state.fcem > params.mvc || state.u < 0.0 ||
      state.f_acc < 0.0 || state.t < 0.0) {
    throw ParameterError("muscle state violates its invariants");
  }

  const double floor = floor_fraction * params.mvc;
  const double mvc = params.mvc;
  const double k = params.k;
  auto rhs = [&](const std::array<double, 3> &y) {
    const double fcem = y[0];
    if (fcem < floor) {
      throw CapacityExhaustedError("muscle '" + params.muscle_id +
                                   "': capacity below validity floor");
    }
    return std::array<double, 3>{-k * fcem * f_load / mvc,
                                 mvc * f_load / (fcem * fcem), f_load / mvc};
  };

  const auto y = numerics::rk4_step<3>({state.fcem, state.u, state.f_acc}, dt, rhs);
  if (y[0] < floor) {
    throw CapacityExhaustedError("muscle '" + params.muscle_id +
                                 "': capacity below validity floor");
  }
  return MuscleState{state.t + dt, y[0], y[2], y[1]};
}

/// Advances a state to t1 through the closed forms.
inline MuscleState evolve(const MuscleState &state,
                          const MuscleParameters &params,
                          const LoadProfile &profile, double t1,
                          double dt = kDefaultIntegrationStep) {
  const double f1 = state.f_acc + accumulated_load(profile, params, state.t, t1, dt);
  return MuscleState{t1, fcem_closed_form(params, f1), f1,
                     state.u + fatigue_index_closed_form(params, f1, state.f_acc)};
}

/// Endurance under a constant relative load f = F_load / MVC:
/// -ln(f) / (k f). Zero when f >= 1, empty when f == 0.
inline std::optional<double> constant_load_endurance(double relative_load,
                                                     double k) {
  if (!(relative_load >= 0.0) || !(k > 0.0)) {
    throw ParameterError("relative load must be >= 0 and k > 0");
  }
  if (relative_load == 0.0) {
    return std::nullopt;
  }
  if (relative_load >= 1.0) {
    return 0.0;
  }
  return -std::log(relative_load) / (k * relative_load);
}

/// Fatigue index reached at exhaustion under a constant relative load:
/// (1/f^2 - 1) / (2k).
inline std::optional<double> constant_load_exhaustion_fatigue(double relative_load,
                                                              double k) {
  if (!(relative_load >= 0.0) || !(k > 0.0)) {
    throw ParameterError("relative load must be >= 0 and k > 0");
  }
  if (relative_load == 0.0) {
    return std::nullopt;
  }
  if (relative_load >= 1.0) {
    return 0.0;
  }
  return (1.0 / (relative_load * relative_load) - 1.0) / (2.0 * k);
}

/// Tolerance to which endurance_time refines the crossing instant.
inline constexpr double kEnduranceTolerance = 1e-8;

/**
 * Earliest t in [t_start, t_max] with Fcem(t) <= F_load(t), or empty when the
 * capacity stays above the load over the whole horizon.
 *
 * Scans on a grid of step dt merged with the profile's breakpoints. On each
 * scan interval the left limit of the load at its right end is checked (so
 * a crossing just before a drop in load is not missed) and the crossing is
 * refined by bisection to kEnduranceTolerance.
 */
inline std::optional<double> endurance_time(const MuscleParameters &params,
                                            const LoadProfile &profile,
                                            double t_max, double dt,
                                            double t_start = 0.0) {
  validate(params);
  detail::check_interval(t_start, t_max, dt);
  if (!(t_max > t_start)) {
    throw ParameterError("t_max must exceed the start time");
  }
  const auto d = profile.domain();
  if (!d.contains(t_start) || !d.contains(t_max)) {
    throw DomainError("endurance horizon outside profile domain");
  }

  auto capacity = [&](double f_acc) {
    return params.mvc * std::exp(-params.k * f_acc);
  };
  if (profile.evaluate(t_start) >= params.mvc) {
    return t_start;
  }

  const auto breaks = profile.breakpoints(t_start, t_max);
  std::size_t next_break = 0;
  std::size_t step = 0;
  double a = t_start;
  double f_a = 0.0;
  while (a < t_max) {
    double b = std::min(t_start + static_cast<double>(step + 1) * dt, t_max);
    while (next_break < breaks.size() && breaks[next_break] <= a) {
      ++next_break;
    }
    const bool at_break = next_break < breaks.size() && breaks[next_break] < b;
    if (at_break) {
      b = breaks[next_break];
    } else {
      ++step;
    }

    const double f_b = f_a + integrate(profile, a, b, dt) / params.mvc;
    if (capacity(f_b) <= profile.left_limit(b)) {
      auto overloaded = [&](double t) {
        const double f_t = f_a + integrate(profile, a, t, dt) / params.mvc;
        return capacity(f_t) <= profile.evaluate(t);
      };
      return numerics::bisect_first_true(overloaded, a, b, kEnduranceTolerance);
    }
    if (capacity(f_b) <= profile.evaluate(b)) {
      return b;
    }
    a = b;
    f_a = f_b;
  }
  return std::nullopt;
}

} // namespace fatiguekit
