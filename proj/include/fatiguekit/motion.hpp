#pragma once

/**
 * @file motion.hpp
 * @brief Joint-angle time series: CSV ingestion, resampling, dwell/move
 * phase segmentation and efficiency ratios against standard times.
 *
 * Times are minutes, angles radians measured from the vertical in the
 * sagittal plane. Motion CSV layout:
 *
 *     # comment lines are ignored
 *     t_min,shoulder_rad,elbow_rad
 *     0,0,1.5707963
 *     0.000666667,0,1.5707963
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "text.hpp"

namespace fatiguekit {

struct MotionFrame {
  double t = 0.0;
  std::vector<double> angles; // same order as MotionSeries::joints

  bool operator==(const MotionFrame &) const = default;
};

struct PhaseSpan {
  std::string label;
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
  bool operator==(const PhaseSpan &) const = default;
};

struct MotionSeries {
  std::vector<std::string> joints;
  std::vector<MotionFrame> frames;
  double rate = 0.0; // samples per minute
  std::vector<PhaseSpan> phases;

  double start() const { return frames.front().t; }
  double end() const { return frames.back().t; }

  std::optional<std::size_t> joint_index(std::string_view name) const {
    const auto it = std::find(joints.begin(), joints.end(), name);
    if (it == joints.end()) {
      return std::nullopt;
    }
    return static_cast<std::size_t>(it - joints.begin());
  }

  bool operator==(const MotionSeries &) const = default;
};

/// Mean sampling rate (frames - 1) / span, in samples per minute.
inline double mean_rate(const std::vector<MotionFrame> &frames) {
  if (frames.size() < 2) {
    return 0.0;
  }
  return static_cast<double>(frames.size() - 1) /
         (frames.back().t - frames.front().t);
}

/// Validates and assembles a series; rate is derived from the timestamps.
inline MotionSeries make_motion_series(std::vector<std::string> joints,
                                       std::vector<MotionFrame> frames) {
  if (joints.empty()) {
    throw SchemaError("motion series needs at least one joint");
  }
  if (frames.empty()) {
    throw InsufficientDataError("motion series has no frames");
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto &f = frames[i];
    if (f.angles.size() != joints.size()) {
      throw SchemaError("frame " + std::to_string(i) + " carries " +
                        std::to_string(f.angles.size()) + " angles, expected " +
                        std::to_string(joints.size()));
    }
    if (!std::isfinite(f.t)) {
      throw InputError("frame " + std::to_string(i) + ": non-finite time");
    }
    for (double a : f.angles) {
      if (!std::isfinite(a)) {
        throw InputError("frame " + std::to_string(i) + ": non-finite angle");
      }
    }
    if (i > 0 && !(f.t > frames[i - 1].t)) {
      throw InputError("frame " + std::to_string(i) +
                       ": timestamps must be strictly increasing");
    }
  }
  MotionSeries s;
  s.joints = std::move(joints);
  s.rate = mean_rate(frames);
  s.frames = std::move(frames);
  return s;
}

inline MotionSeries parse_motion_csv(std::string_view content) {
  const auto lines = text::data_lines(content);
  if (lines.empty()) {
    throw ParseError(1, "missing header");
  }
  const auto header = text::split(lines.front().content, ',');
  if (header.size() < 2 || header[0] != "t_min") {
    throw ParseError(lines.front().number,
                     "header must be 't_min,<joint>_rad,...'");
  }
  std::vector<std::string> joints;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto col = header[c];
    constexpr std::string_view suffix = "_rad";
    if (col.size() <= suffix.size() ||
        col.substr(col.size() - suffix.size()) != suffix) {
      throw ParseError(lines.front().number,
                       "column '" + std::string(col) + "' must end in _rad");
    }
    std::string name(col.substr(0, col.size() - suffix.size()));
    if (std::find(joints.begin(), joints.end(), name) != joints.end()) {
      throw ParseError(lines.front().number, "duplicate joint '" + name + "'");
    }
    joints.push_back(std::move(name));
  }

  std::vector<MotionFrame> frames;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto &line = lines[i];
    const auto cols = text::split(line.content, ',');
    if (cols.size() != header.size()) {
      throw ParseError(line.number, "expected " + std::to_string(header.size()) +
                                        " columns, found " +
                                        std::to_string(cols.size()));
    }
    MotionFrame frame;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto v = text::parse_double(cols[c]);
      if (!v) {
        throw ParseError(line.number, "malformed number in column " +
                                          std::to_string(c + 1));
      }
      if (!std::isfinite(*v)) {
        throw ParseError(line.number, "non-finite value in column " +
                                          std::to_string(c + 1));
      }
      if (c == 0) {
        frame.t = *v;
      } else {
        frame.angles.push_back(*v);
      }
    }
    if (!frames.empty() && !(frame.t > frames.back().t)) {
      throw ParseError(line.number, "time not strictly increasing");
    }
    frames.push_back(std::move(frame));
  }
  if (frames.empty()) {
    throw ParseError(lines.back().number, "no data rows");
  }
  return make_motion_series(std::move(joints), std::move(frames));
}

inline std::string to_csv(const MotionSeries &series) {
  std::string out = "t_min";
  for (const auto &j : series.joints) {
    out += "," + j + "_rad";
  }
  out += "\n";
  for (const auto &f : series.frames) {
    out += text::fmt9(f.t);
    for (double a : f.angles) {
      out += "," + text::fmt9(a);
    }
    out += "\n";
  }
  return out;
}

/// Joint angles at time t by linear interpolation between frames. Exact at
/// frame times.
inline std::vector<double> interpolate_angles(const MotionSeries &series,
                                              double t) {
  const auto &fr = series.frames;
  if (t < fr.front().t || t > fr.back().t) {
    throw DomainError("t = " + text::fmt9(t) + " outside motion range");
  }
  const auto it = std::upper_bound(
      fr.begin(), fr.end(), t,
      [](double v, const MotionFrame &f) { return v < f.t; });
  const auto i = static_cast<std::size_t>(it - fr.begin()) - 1;
  if (fr[i].t == t || i + 1 == fr.size()) {
    return fr[i].angles;
  }
  const double w = (t - fr[i].t) / (fr[i + 1].t - fr[i].t);
  std::vector<double> out(fr[i].angles.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double a = fr[i].angles[j];
    const double b = fr[i + 1].angles[j];
    out[j] = a + (b - a) * w;
  }
  return out;
}

/**
 * Linear interpolation onto a uniform grid spanning the original range.
 * The interval count is round(span * rate), so the realized rate can differ
 * slightly from the request; both endpoints are kept exactly. A series that
 * is already uniform at that spacing is returned unchanged.
 */
inline MotionSeries resample_motion(const MotionSeries &series, double rate) {
  if (series.frames.size() < 2) {
    throw InsufficientDataError("resampling needs at least 2 frames");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ParameterError("resample rate must be > 0");
  }
  const double t0 = series.start();
  const double t1 = series.end();
  const double span = t1 - t0;
  const auto n = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(span * rate)));

  if (n + 1 == series.frames.size()) {
    const double h = span / static_cast<double>(n);
    bool uniform = true;
    for (std::size_t i = 0; i < series.frames.size() && uniform; ++i) {
      const double grid = t0 + h * static_cast<double>(i);
      uniform = std::abs(series.frames[i].t - grid) <= 1e-9 * h;
    }
    if (uniform) {
      MotionSeries out = series;
      out.rate = static_cast<double>(n) / span;
      return out;
    }
  }

  std::vector<MotionFrame> frames;
  frames.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = i == n ? t1 : t0 + span * (static_cast<double>(i) /
                                                static_cast<double>(n));
    frames.push_back({t, interpolate_angles(series, t)});
  }
  MotionSeries out = make_motion_series(series.joints, std::move(frames));
  out.phases = series.phases;
  return out;
}

/// Per-frame maximum absolute joint angular speed (rad/min): central
/// differences inside, one-sided at both ends.
inline std::vector<double> joint_speeds(const MotionSeries &series) {
  const auto &fr = series.frames;
  std::vector<double> speed(fr.size(), 0.0);
  if (fr.size() < 2) {
    return speed;
  }
  for (std::size_t i = 0; i < fr.size(); ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == fr.size() ? i : i + 1;
    const double dt = fr[hi].t - fr[lo].t;
    double best = 0.0;
    for (std::size_t j = 0; j < series.joints.size(); ++j) {
      best = std::max(best, std::abs(fr[hi].angles[j] - fr[lo].angles[j]) / dt);
    }
    speed[i] = best;
  }
  return speed;
}

inline constexpr std::string_view kDwell = "dwell";
inline constexpr std::string_view kMove = "move";

/// "move_3" -> "move". Labels without a numeric suffix are returned as is.
inline std::string phase_kind(std::string_view label) {
  const auto pos = label.rfind('_');
  if (pos == std::string_view::npos || pos + 1 == label.size()) {
    return std::string(label);
  }
  const auto suffix = label.substr(pos + 1);
  if (!std::all_of(suffix.begin(), suffix.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    return std::string(label);
  }
  return std::string(label.substr(0, pos));
}

/**
 * Splits a series into alternating dwell/move spans.
 *
 * Frames whose maximum joint speed is below velocity_threshold are dwell,
 * the rest move. A run shorter than min_phase_duration is absorbed by the
 * span before it (the first run by the one after it), after which equal
 * neighbours are fused. Spans partition [first frame, last frame] and are
 * labelled dwell_1, move_1, dwell_2, ... in order of appearance.
 */
inline std::vector<PhaseSpan> segment_phases(const MotionSeries &series,
                                             double velocity_threshold,
                                             double min_phase_duration) {
  if (!(velocity_threshold > 0.0) || !(min_phase_duration > 0.0)) {
    throw ParameterError("segmentation thresholds must be > 0");
  }
  const auto &fr = series.frames;
  if (fr.size() < 2) {
    throw InsufficientDataError("segmentation needs at least 2 frames");
  }
  const auto speed = joint_speeds(series);

  struct Run {
    bool moving;
    double start;
    double end;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < fr.size(); ++i) {
    const bool moving = speed[i] >= velocity_threshold;
    if (runs.empty() || runs.back().moving != moving) {
      if (!runs.empty()) {
        runs.back().end = fr[i].t;
      }
      runs.push_back({moving, fr[i].t, fr[i].t});
    }
  }
  runs.back().end = fr.back().t;

  std::vector<Run> merged;
  std::optional<double> carry_start;
  for (const auto &run : runs) {
    const bool short_run = run.end - run.start < min_phase_duration;
    if (short_run && !merged.empty()) {
      merged.back().end = run.end;
      continue;
    }
    if (short_run) {
      if (!carry_start) {
        carry_start = run.start;
      }
      continue;
    }
    Run r = run;
    if (carry_start) {
      r.start = *carry_start;
      carry_start.reset();
    }
    if (!merged.empty() && merged.back().moving == r.moving) {
      merged.back().end = r.end;
    } else {
      merged.push_back(r);
    }
  }
  if (merged.empty()) {
    // every run was shorter than the minimum: one span of the dominant kind
    double moving_time = 0.0;
    for (const auto &r : runs) {
      moving_time += r.moving ? r.end - r.start : 0.0;
    }
    const double span = fr.back().t - fr.front().t;
    merged.push_back({moving_time > 0.5 * span, fr.front().t, fr.back().t});
  }

  std::vector<PhaseSpan> out;
  int dwell_count = 0;
  int move_count = 0;
  for (const auto &r : merged) {
    const int n = r.moving ? ++move_count : ++dwell_count;
    out.push_back({std::string(r.moving ? kMove : kDwell) + "_" + std::to_string(n),
                   r.start, r.end});
  }
  return out;
}

/// Standard (predetermined) time per phase label or phase kind, minutes.
using StandardTimes = std::map<std::string, double>;

inline StandardTimes parse_standard_times_json(std::string_view content) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error &e) {
    throw SchemaError(std::string("standard times: ") + e.what());
  }
  if (!doc.is_object()) {
    throw SchemaError("standard times must be an object of label -> minutes");
  }
  StandardTimes out;
  for (const auto &[label, value] : doc.items()) {
    if (!value.is_number()) {
      throw SchemaError("standard time for '" + label + "' is not a number");
    }
    out[label] = value.get<double>();
  }
  return out;
}

struct PhaseEfficiency {
  std::string label;
  double standard = 0.0; // min
  double actual = 0.0;   // min
  double ratio = 0.0;    // standard / actual

  bool operator==(const PhaseEfficiency &) const = default;
};

struct EfficiencyResult {
  std::vector<PhaseEfficiency> phases;
  double overall = 0.0; // sum standard / sum actual

  bool operator==(const EfficiencyResult &) const = default;
};

/// Ratios of standard to actual duration. Each phase looks up its exact
/// label first, then its kind ("move_2" falls back to "move").
inline EfficiencyResult efficiency_ratio(const std::vector<PhaseSpan> &phases,
                                         const StandardTimes &standard_times) {
  EfficiencyResult result;
  double total_standard = 0.0;
  double total_actual = 0.0;
  for (const auto &p : phases) {
    auto it = standard_times.find(p.label);
    if (it == standard_times.end()) {
      it = standard_times.find(phase_kind(p.label));
    }
    if (it == standard_times.end()) {
      throw ConfigError("no standard time for phase '" + p.label + "'");
    }
    if (!(it->second > 0.0) || !std::isfinite(it->second)) {
      throw ConfigError("standard time for '" + it->first + "' must be > 0");
    }
    const double actual = p.duration();
    if (!(actual > 0.0)) {
      throw ParameterError("phase '" + p.label + "' has non-positive duration");
    }
    result.phases.push_back({p.label, it->second, actual, it->second / actual});
    total_standard += it->second;
    total_actual += actual;
  }
  result.overall = total_actual > 0.0 ? total_standard / total_actual : 0.0;
  return result;
}

} // namespace fatiguekit
