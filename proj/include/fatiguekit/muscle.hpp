#pragma once

/**
 * @file muscle.hpp
 * @brief Per-muscle constants and time-evolving fatigue state.
 *
 * Units are fixed throughout the library: forces in newtons, time in
 * minutes, the rate constant k in 1/min.
 */

#include <cmath>
#include <string>

#include "errors.hpp"

namespace fatiguekit {

/// Rate constant used when a profile omits k. Uncalibrated.
inline constexpr double kDefaultRateConstant = 1.0;

/// Capacity floor relative to MVC below which the model is considered
/// outside its validity region.
inline constexpr double kDefaultCapacityFloor = 1e-9;

struct MuscleParameters {
  std::string muscle_id;
  double mvc = 0.0;                 // N
  double k = kDefaultRateConstant;  // 1/min

  bool operator==(const MuscleParameters &) const = default;
};

inline void validate(const MuscleParameters &p) {
  if (p.muscle_id.empty()) {
    throw ParameterError("muscle_id must be non-empty");
  }
  if (!(p.mvc > 0.0) || !std::isfinite(p.mvc)) {
    throw ParameterError("muscle '" + p.muscle_id + "': mvc must be > 0");
  }
  if (!(p.k > 0.0) || !std::isfinite(p.k)) {
    throw ParameterError("muscle '" + p.muscle_id + "': k must be > 0");
  }
}

struct MuscleState {
  double t = 0.0;     // min
  double fcem = 0.0;  // N, current exertable maximum force
  double f_acc = 0.0; // accumulated normalized load, dimensionless
  double u = 0.0;     // fatigue index, min

  static MuscleState fresh(const MuscleParameters &p, double t0 = 0.0) {
    return MuscleState{t0, p.mvc, 0.0, 0.0};
  }

  bool operator==(const MuscleState &) const = default;
};

struct LoadSample {
  double t = 0.0;      // min
  double f_load = 0.0; // N (or kg for mass timelines)

  bool operator==(const LoadSample &) const = default;
};

} // namespace fatiguekit
