#pragma once

/**
 * @file synth.hpp
 * @brief Synthetic motion and hand-mass fixtures with known phase boundaries.
 *
 * hold:       constant posture and constant mass for the whole duration.
 * lift-cycle: an optional lead-in hold, then `cycles` repetitions of
 *             [move, dwell]. During a move the chosen joint swings out by
 *             `amplitude` and back at constant angular speed while the hand
 *             carries the mass; during dwells the posture is the base one
 *             and the hand is empty.
 *
 * Frames are taken at i / rate_hz seconds for i in [0, round(duration *
 * rate_hz)), so 60 s at 25 Hz is 1500 frames.
 */

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "load_profile.hpp"
#include "motion.hpp"

namespace fatiguekit::synth {

struct Options {
  double rate_hz = 25.0;
  double duration_s = 60.0; // hold only; lift-cycle derives its own duration
  std::vector<std::pair<std::string, double>> posture = {
      {"lumbar", 0.2}, {"shoulder", 0.0}, {"elbow", 1.5707963267948966},
      {"wrist", 1.5707963267948966}};
  double mass_kg = 5.0;

  int cycles = 3;
  double lead_hold_s = 0.0;
  double move_s = 1.5;
  double dwell_s = 2.0;
  std::string moving_joint = "shoulder";
  double amplitude_rad = 1.0;

  double noise_rad = 0.0; // Gaussian angle noise, standard deviation
  std::uint64_t seed = 42;
};

struct Scenario {
  MotionSeries motion;
  LoadProfile mass; // kg, linear, sampled at the motion frames
  std::vector<PhaseSpan> truth;
};

namespace detail {

inline void check_common(const Options &o) {
  if (!(o.rate_hz > 0.0) || !std::isfinite(o.rate_hz)) {
    throw ParameterError("rate must be > 0");
  }
  if (!(o.mass_kg >= 0.0) || !std::isfinite(o.mass_kg)) {
    throw ParameterError("mass must be >= 0");
  }
  if (o.posture.empty()) {
    throw ParameterError("posture needs at least one joint");
  }
  if (!(o.noise_rad >= 0.0)) {
    throw ParameterError("noise must be >= 0");
  }
}

inline std::size_t frame_count(double duration_s, double rate_hz) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ParameterError("duration must be > 0");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  if (n < 2) {
    throw ParameterError("duration too short for 2 frames at this rate");
  }
  return n;
}

inline double frame_time_min(std::size_t i, double rate_hz) {
  return static_cast<double>(i) / (rate_hz * 60.0);
}

template <typename AngleFn, typename MassFn>
Scenario build(const Options &o, std::size_t n, AngleFn &&angles, MassFn &&mass) {
  std::vector<std::string> joints;
  for (const auto &[name, angle] : o.posture) {
    joints.push_back(name);
  }
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> noise(0.0, o.noise_rad > 0.0 ? o.noise_rad : 1.0);

  std::vector<MotionFrame> frames;
  std::vector<LoadSample> masses;
  for (std::size_t i = 0; i < n; ++i) {
    const double t_s = static_cast<double>(i) / o.rate_hz;
    auto a = angles(t_s);
    if (o.noise_rad > 0.0) {
      for (auto &v : a) {
        v += noise(rng);
      }
    }
    frames.push_back({frame_time_min(i, o.rate_hz), std::move(a)});
    masses.push_back({frame_time_min(i, o.rate_hz), mass(t_s)});
  }
  Scenario s{make_motion_series(std::move(joints), std::move(frames)),
             LoadProfile::sampled(std::move(masses), Interpolation::linear),
             {}};
  return s;
}

} // namespace detail

inline Scenario hold(const Options &o) {
  detail::check_common(o);
  const auto n = detail::frame_count(o.duration_s, o.rate_hz);
  std::vector<double> base;
  for (const auto &[name, angle] : o.posture) {
    base.push_back(angle);
  }
  auto s = detail::build(
      o, n, [&](double) { return base; }, [&](double) { return o.mass_kg; });
  s.truth.push_back({"dwell_1", s.motion.start(), s.motion.end()});
  return s;
}

inline double lift_cycle_duration_s(const Options &o) {
  return o.lead_hold_s + o.cycles * (o.move_s + o.dwell_s);
}

inline Scenario lift_cycle(const Options &o) {
  detail::check_common(o);
  if (o.cycles < 1) {
    throw ParameterError("lift-cycle needs at least one cycle");
  }
  if (!(o.move_s > 0.0) || !(o.dwell_s > 0.0) || !(o.lead_hold_s >= 0.0)) {
    throw ParameterError("lift-cycle phase durations must be > 0");
  }
  std::size_t moving = o.posture.size();
  std::vector<double> base;
  for (std::size_t j = 0; j < o.posture.size(); ++j) {
    base.push_back(o.posture[j].second);
    if (o.posture[j].first == o.moving_joint) {
      moving = j;
    }
  }
  if (moving == o.posture.size()) {
    throw ParameterError("moving joint '" + o.moving_joint + "' not in posture");
  }

  const double cycle = o.move_s + o.dwell_s;
  // Position inside the move phase as a fraction in [0, 1), or -1 outside it.
  auto move_fraction = [&](double t_s) {
    const double local = t_s - o.lead_hold_s;
    if (local < 0.0) {
      return -1.0;
    }
    const double in_cycle = std::fmod(local, cycle);
    return in_cycle < o.move_s ? in_cycle / o.move_s : -1.0;
  };

  const auto n = detail::frame_count(lift_cycle_duration_s(o), o.rate_hz);
  auto s = detail::build(
      o, n,
      [&](double t_s) {
        auto a = base;
        const double x = move_fraction(t_s);
        if (x >= 0.0) {
          const double tri = x < 0.5 ? 2.0 * x : 2.0 * (1.0 - x);
          a[moving] += o.amplitude_rad * tri;
        }
        return a;
      },
      [&](double t_s) { return move_fraction(t_s) >= 0.0 ? o.mass_kg : 0.0; });

  const double to_min = 1.0 / 60.0;
  int dwell_n = 0;
  int move_n = 0;
  if (o.lead_hold_s > 0.0) {
    s.truth.push_back({"dwell_" + std::to_string(++dwell_n), 0.0,
                       o.lead_hold_s * to_min});
  }
  for (int c = 0; c < o.cycles; ++c) {
    const double m0 = o.lead_hold_s + c * cycle;
    s.truth.push_back({"move_" + std::to_string(++move_n), m0 * to_min,
                       (m0 + o.move_s) * to_min});
    s.truth.push_back({"dwell_" + std::to_string(++dwell_n),
                       (m0 + o.move_s) * to_min, (m0 + cycle) * to_min});
  }
  s.truth.back().end = s.motion.end();
  return s;
}

inline nlohmann::ordered_json truth_json(const std::vector<PhaseSpan> &truth) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto &p : truth) {
    out.push_back({{"label", p.label},
                   {"start_min", text::round9(p.start)},
                   {"end_min", text::round9(p.end)}});
  }
  return out;
}

} // namespace fatiguekit::synth
