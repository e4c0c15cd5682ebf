#pragma once

/**
 * @file biomech.hpp
 * @brief Quasi-static joint loads on a planar serial linkage and their
 * conversion into per-muscle demanded forces.
 *
 * The worker is a chain of segments ordered proximal to distal (for example
 * trunk, upper arm, forearm, hand). Segment i hangs from joint i and its
 * posture angle is its absolute orientation from the vertical, so its distal
 * end sits length * sin(angle) further along the horizontal axis. A hand
 * load acts at the distal end of the last segment.
 *
 * Only gravity is considered: inertial terms are ignored, which is why
 * reports flag frames whose angular speed exceeds a threshold.
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "load_profile.hpp"
#include "motion.hpp"
#include "muscle.hpp"

namespace fatiguekit {

inline constexpr double kGravity = 9.81; // m/s^2

struct SegmentSpec {
  std::string name;
  std::string joint; // proximal joint
  double length = 0.0;    // m
  double mass = 0.0;      // kg
  double com_ratio = 0.5; // COM distance from the proximal joint / length

  bool operator==(const SegmentSpec &) const = default;
};

/// Equivalent muscle spanning one joint.
struct MuscleAttachment {
  MuscleParameters params;
  std::string joint;
  double moment_arm = 0.0; // m
  double share = 1.0;      // fraction of the joint torque carried

  bool operator==(const MuscleAttachment &) const = default;
};

struct AngleRange {
  double lo = -std::numbers::pi;
  double hi = std::numbers::pi;

  bool operator==(const AngleRange &) const = default;
};

struct WorkerProfile {
  std::string name;
  std::vector<SegmentSpec> segments;
  std::map<std::string, double> joint_strengths; // N*m
  std::vector<MuscleAttachment> muscles;
  std::map<std::string, AngleRange> ranges; // joints absent here use +-pi

  std::vector<std::string> joints() const {
    std::vector<std::string> out;
    for (const auto &s : segments) {
      out.push_back(s.joint);
    }
    return out;
  }

  AngleRange range(const std::string &joint) const {
    const auto it = ranges.find(joint);
    return it == ranges.end() ? AngleRange{} : it->second;
  }

  bool operator==(const WorkerProfile &) const = default;
};

/// Muscle ids are used in output file names.
inline bool is_valid_identifier(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
  });
}

inline constexpr double kShareTolerance = 1e-9;

inline void validate(const WorkerProfile &w) {
  if (w.segments.empty()) {
    throw SchemaError("worker profile has no segments");
  }
  std::set<std::string> joints;
  for (const auto &s : w.segments) {
    if (s.joint.empty() || !joints.insert(s.joint).second) {
      throw SchemaError("segment '" + s.name + "': joint name missing or duplicated");
    }
    if (!(s.length > 0.0) || !std::isfinite(s.length)) {
      throw SchemaError("segment '" + s.name + "': length must be > 0");
    }
    if (!(s.mass >= 0.0) || !std::isfinite(s.mass)) {
      throw SchemaError("segment '" + s.name + "': mass must be >= 0");
    }
    if (!(s.com_ratio >= 0.0 && s.com_ratio <= 1.0)) {
      throw SchemaError("segment '" + s.name + "': com_ratio must lie in [0, 1]");
    }
  }
  for (const auto &[joint, strength] : w.joint_strengths) {
    if (!joints.count(joint)) {
      throw SchemaError("joint strength given for unknown joint '" + joint + "'");
    }
    if (!(strength > 0.0) || !std::isfinite(strength)) {
      throw SchemaError("joint '" + joint + "': strength must be > 0");
    }
  }
  for (const auto &[joint, r] : w.ranges) {
    if (!joints.count(joint)) {
      throw SchemaError("angle range given for unknown joint '" + joint + "'");
    }
    if (!(r.lo < r.hi)) {
      throw SchemaError("joint '" + joint + "': empty angle range");
    }
  }

  std::set<std::string> ids;
  std::map<std::string, double> share_sum;
  for (const auto &m : w.muscles) {
    const auto &id = m.params.muscle_id;
    if (!is_valid_identifier(id)) {
      throw SchemaError("muscle id '" + id + "' must match [A-Za-z0-9_.-]+");
    }
    if (!ids.insert(id).second) {
      throw SchemaError("duplicate muscle id '" + id + "'");
    }
    if (!joints.count(m.joint)) {
      throw SchemaError("muscle '" + id + "' references unknown joint '" +
                        m.joint + "'");
    }
    if (!(m.moment_arm > 0.0) || !std::isfinite(m.moment_arm)) {
      throw SchemaError("muscle '" + id + "': moment_arm must be > 0");
    }
    if (!(m.share > 0.0 && m.share <= 1.0)) {
      throw SchemaError("muscle '" + id + "': share must lie in (0, 1]");
    }
    validate(m.params);
    share_sum[m.joint] += m.share;
  }
  for (const auto &[joint, sum] : share_sum) {
    if (std::abs(sum - 1.0) > kShareTolerance) {
      throw ConfigError("muscle shares at joint '" + joint + "' sum to " +
                        text::fmt9(sum) + ", expected 1");
    }
  }
}

/**
 * Worker profile document:
 *
 *     {
 *       "name": "...",
 *       "segments": [{"name", "joint", "length_m", "mass_kg", "com_ratio"}],
 *       "joint_strengths_Nm": {"elbow": 70.0},
 *       "angle_ranges_rad": {"elbow": [-3.14, 3.14]},
 *       "muscles": [{"id", "joint", "moment_arm_m", "share", "mvc_N", "k_per_min"}]
 *     }
 *
 * share defaults to 1, k_per_min to kDefaultRateConstant. A muscle without
 * mvc_N gets strength * share / moment_arm from its joint.
 */
inline WorkerProfile parse_worker_profile_json(std::string_view content) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error &e) {
    throw SchemaError(std::string("worker profile: ") + e.what());
  }

  auto number = [](const json &obj, const char *key, const std::string &where)
      -> double {
    if (!obj.contains(key) || !obj[key].is_number()) {
      throw SchemaError(where + ": missing numeric field '" + key + "'");
    }
    return obj[key].get<double>();
  };
  auto string = [](const json &obj, const char *key, const std::string &where) {
    if (!obj.contains(key) || !obj[key].is_string()) {
      throw SchemaError(where + ": missing string field '" + key + "'");
    }
    return obj[key].get<std::string>();
  };

  if (!doc.is_object()) {
    throw SchemaError("worker profile must be a JSON object");
  }
  WorkerProfile w;
  w.name = doc.value("name", std::string{});
  if (!doc.contains("segments") || !doc["segments"].is_array()) {
    throw SchemaError("worker profile: 'segments' array required");
  }
  for (std::size_t i = 0; i < doc["segments"].size(); ++i) {
    const auto &s = doc["segments"][i];
    const std::string where = "segments[" + std::to_string(i) + "]";
    if (!s.is_object()) {
      throw SchemaError(where + ": expected object");
    }
    w.segments.push_back({string(s, "name", where), string(s, "joint", where),
                          number(s, "length_m", where), number(s, "mass_kg", where),
                          number(s, "com_ratio", where)});
  }
  if (doc.contains("joint_strengths_Nm")) {
    const auto &js = doc["joint_strengths_Nm"];
    if (!js.is_object()) {
      throw SchemaError("joint_strengths_Nm must be an object");
    }
    for (const auto &[joint, v] : js.items()) {
      if (!v.is_number()) {
        throw SchemaError("joint_strengths_Nm." + joint + " must be a number");
      }
      w.joint_strengths[joint] = v.get<double>();
    }
  }
  if (doc.contains("angle_ranges_rad")) {
    const auto &rs = doc["angle_ranges_rad"];
    if (!rs.is_object()) {
      throw SchemaError("angle_ranges_rad must be an object");
    }
    for (const auto &[joint, v] : rs.items()) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw SchemaError("angle_ranges_rad." + joint + " must be [lo, hi]");
      }
      w.ranges[joint] = {v[0].get<double>(), v[1].get<double>()};
    }
  }
  if (doc.contains("muscles")) {
    if (!doc["muscles"].is_array()) {
      throw SchemaError("'muscles' must be an array");
    }
    for (std::size_t i = 0; i < doc["muscles"].size(); ++i) {
      const auto &m = doc["muscles"][i];
      const std::string where = "muscles[" + std::to_string(i) + "]";
      if (!m.is_object()) {
        throw SchemaError(where + ": expected object");
      }
      MuscleAttachment a;
      a.params.muscle_id = string(m, "id", where);
      a.joint = string(m, "joint", where);
      a.moment_arm = number(m, "moment_arm_m", where);
      a.share = m.contains("share") ? number(m, "share", where) : 1.0;
      a.params.k = m.contains("k_per_min") ? number(m, "k_per_min", where)
                                           : kDefaultRateConstant;
      if (m.contains("mvc_N")) {
        a.params.mvc = number(m, "mvc_N", where);
      } else {
        const auto it = w.joint_strengths.find(a.joint);
        if (it == w.joint_strengths.end()) {
          throw SchemaError(where + ": no mvc_N and no strength for joint '" +
                            a.joint + "'");
        }
        if (a.moment_arm > 0.0) {
          a.params.mvc = it->second * a.share / a.moment_arm;
        }
      }
      w.muscles.push_back(std::move(a));
    }
  }
  validate(w);
  return w;
}

struct Posture {
  std::map<std::string, double> joint_angles; // rad from vertical
};

using JointTorques = std::map<std::string, double>;

inline void validate_posture(const WorkerProfile &w, const Posture &p) {
  for (const auto &[joint, angle] : p.joint_angles) {
    const auto joints = w.joints();
    if (std::find(joints.begin(), joints.end(), joint) == joints.end()) {
      throw SchemaError("posture names unknown joint '" + joint + "'");
    }
    if (!std::isfinite(angle)) {
      throw InputError("joint '" + joint + "': non-finite angle");
    }
    const auto r = w.range(joint);
    if (angle < r.lo || angle > r.hi) {
      throw InputError("joint '" + joint + "': angle " + text::fmt9(angle) +
                       " rad outside range [" + text::fmt9(r.lo) + ", " +
                       text::fmt9(r.hi) + "]");
    }
  }
  for (const auto &s : w.segments) {
    if (!p.joint_angles.count(s.joint)) {
      throw SchemaError("posture lacks joint '" + s.joint + "'");
    }
  }
}

/**
 * Gravity moment about each joint: distal segment weights at their COMs
 * plus the hand load at the chain tip, as a magnitude in N*m.
 */
inline JointTorques static_joint_torques(const WorkerProfile &w,
                                         const Posture &posture,
                                         double hand_load_mass) {
  if (!(hand_load_mass >= 0.0) || !std::isfinite(hand_load_mass)) {
    throw ParameterError("hand load mass must be finite and >= 0");
  }
  validate_posture(w, posture);

  const std::size_t n = w.segments.size();
  std::vector<double> joint_x(n + 1, 0.0);
  std::vector<double> com_x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto &s = w.segments[i];
    const double reach = std::sin(posture.joint_angles.at(s.joint));
    com_x[i] = joint_x[i] + s.com_ratio * s.length * reach;
    joint_x[i + 1] = joint_x[i] + s.length * reach;
  }

  JointTorques out;
  for (std::size_t j = 0; j < n; ++j) {
    double moment = 0.0;
    for (std::size_t i = j; i < n; ++i) {
      moment += w.segments[i].mass * (com_x[i] - joint_x[j]);
    }
    moment += hand_load_mass * (joint_x[n] - joint_x[j]);
    out[w.segments[j].joint] = std::abs(kGravity * moment);
  }
  return out;
}

/// f_load = share * torque / moment_arm for every muscle, keyed by id.
inline std::map<std::string, double>
torque_to_muscle_load(const WorkerProfile &w, const JointTorques &torques) {
  std::map<std::string, double> share_sum;
  for (const auto &m : w.muscles) {
    share_sum[m.joint] += m.share;
  }
  for (const auto &[joint, sum] : share_sum) {
    if (std::abs(sum - 1.0) > kShareTolerance) {
      throw ConfigError("muscle shares at joint '" + joint + "' sum to " +
                        text::fmt9(sum) + ", expected 1");
    }
  }
  std::map<std::string, double> out;
  for (const auto &m : w.muscles) {
    const auto it = torques.find(m.joint);
    if (it == torques.end()) {
      throw SchemaError("no torque for joint '" + m.joint + "'");
    }
    if (!(it->second >= 0.0)) {
      throw ParameterError("joint '" + m.joint + "': torque must be >= 0");
    }
    out[m.params.muscle_id] = m.share * it->second / m.moment_arm;
  }
  return out;
}

inline Posture posture_at_frame(const MotionSeries &motion, std::size_t frame) {
  Posture p;
  for (std::size_t j = 0; j < motion.joints.size(); ++j) {
    p.joint_angles[motion.joints[j]] = motion.frames[frame].angles[j];
  }
  return p;
}

/// Tolerance for matching motion and mass-timeline spans, minutes.
inline constexpr double kSpanTolerance = 1e-9;

namespace detail {
inline void check_span(const MotionSeries &motion, const LoadProfile &mass) {
  const auto d = mass.domain();
  if (d.start > motion.start() + kSpanTolerance ||
      d.end < motion.end() - kSpanTolerance) {
    throw DomainError("mass timeline [" + text::fmt9(d.start) + ", " +
                      text::fmt9(d.end) + "] does not cover motion span [" +
                      text::fmt9(motion.start()) + ", " + text::fmt9(motion.end()) +
                      "]");
  }
}

inline double mass_at(const LoadProfile &mass, double t) {
  const auto d = mass.domain();
  return mass.evaluate(std::clamp(t, d.start, d.end));
}
} // namespace detail

struct JointLoadSeries {
  std::string joint;
  std::vector<LoadSample> samples; // (t min, torque N*m)

  bool operator==(const JointLoadSeries &) const = default;
};

/// Frame-wise joint torques over a motion, one series per joint.
inline std::vector<JointLoadSeries>
joint_load_series(const WorkerProfile &w, const MotionSeries &motion,
                  const LoadProfile &mass_timeline) {
  detail::check_span(motion, mass_timeline);
  std::vector<JointLoadSeries> out;
  for (const auto &j : w.joints()) {
    out.push_back({j, {}});
  }
  for (std::size_t f = 0; f < motion.frames.size(); ++f) {
    const double t = motion.frames[f].t;
    const auto torques = static_joint_torques(
        w, posture_at_frame(motion, f), detail::mass_at(mass_timeline, t));
    for (auto &series : out) {
      series.samples.push_back({t, torques.at(series.joint)});
    }
  }
  return out;
}

/**
 * Per-muscle demanded force at every motion frame, as linear sampled
 * profiles keyed by muscle id. Mass is read from the timeline at each frame
 * time.
 */
inline std::map<std::string, LoadProfile>
posture_series_to_load_profiles(const WorkerProfile &w,
                                const MotionSeries &motion,
                                const LoadProfile &mass_timeline) {
  if (motion.frames.size() < 2) {
    throw InsufficientDataError("motion needs at least 2 frames");
  }
  detail::check_span(motion, mass_timeline);

  std::map<std::string, std::vector<LoadSample>> samples;
  for (std::size_t f = 0; f < motion.frames.size(); ++f) {
    const double t = motion.frames[f].t;
    const auto torques = static_joint_torques(
        w, posture_at_frame(motion, f), detail::mass_at(mass_timeline, t));
    for (const auto &[id, force] : torque_to_muscle_load(w, torques)) {
      samples[id].push_back({t, force});
    }
  }
  std::map<std::string, LoadProfile> out;
  for (auto &[id, s] : samples) {
    out.emplace(id, LoadProfile::sampled(std::move(s), Interpolation::linear));
  }
  return out;
}

} // namespace fatiguekit
