#pragma once

/**
 * @file report.hpp
 * @brief Task evaluation pipeline and report emission.
 *
 * evaluate_task() chains motion -> joint torques -> per-muscle load profiles
 * -> closed-form fatigue trajectories, then adds endurance, overload spans,
 * per-phase fatigue increments and optional efficiency ratios.
 * write_report() serializes the result; every number is printed with nine
 * significant digits and nothing time- or host-dependent is written, so
 * identical inputs give byte-identical files.
 */

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biomech.hpp"
#include "errors.hpp"
#include "fatigue.hpp"
#include "load_profile.hpp"
#include "motion.hpp"
#include "text.hpp"

namespace fatiguekit {

inline constexpr const char *kToolVersion = "0.1.0";

/// Relative change of final U under grid halving that the analysis accepts.
inline constexpr double kGridConvergenceLimit = 1e-4;

struct EvaluationOptions {
  double analysis_dt = 1e-3;                  // min
  double velocity_threshold = 30.0;           // rad/min (0.5 rad/s)
  double min_phase_duration = 0.25 / 60.0;    // min (0.25 s)
  double inertial_speed_threshold = 120.0;    // rad/min (2 rad/s)
  bool check_grid = true;
};

struct TrajectoryPoint {
  double t = 0.0;      // min
  double f_load = 0.0; // N
  double fcem = 0.0;   // N
  double u = 0.0;      // min

  bool operator==(const TrajectoryPoint &) const = default;
};

struct TimeSpan {
  double start = 0.0;
  double end = 0.0;

  bool operator==(const TimeSpan &) const = default;
};

struct MuscleReport {
  std::string muscle_id;
  std::string joint;
  double mvc = 0.0;
  double k = 0.0;
  std::vector<TrajectoryPoint> trajectory;
  std::optional<double> endurance_time;      // first overload inside the window
  std::optional<double> projected_endurance; // at the session's mean relative load
  double peak_relative_load = 0.0;
  double mean_relative_load = 0.0;
  double final_u = 0.0;
  std::optional<double> u_ref;        // U at exhaustion under the mean load
  std::optional<double> normalized_u; // final_u / u_ref
  std::vector<TimeSpan> overload_spans;

  bool operator==(const MuscleReport &) const = default;
};

struct PhaseReport {
  std::string label;
  double start = 0.0;
  double end = 0.0;
  double duration = 0.0;
  std::map<std::string, double> delta_u; // by muscle id

  bool operator==(const PhaseReport &) const = default;
};

struct GridCheck {
  double analysis_dt = 0.0;
  double halved_dt = 0.0;
  double max_relative_change = 0.0;
  bool passed = true;

  bool operator==(const GridCheck &) const = default;
};

struct RunMetadata {
  std::string tool_version = kToolVersion;
  std::map<std::string, std::string> input_digests;
  std::map<std::string, double> parameters;

  bool operator==(const RunMetadata &) const = default;
};

struct FatigueReport {
  RunMetadata metadata;
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<MuscleReport> muscles; // ordered by muscle id
  std::vector<PhaseReport> phases;
  std::optional<EfficiencyResult> efficiency;
  std::vector<TimeSpan> quasi_static_violations;
  std::optional<GridCheck> grid_check;

  bool operator==(const FatigueReport &) const = default;
};

namespace detail {

/// Analysis grid: the motion frames, or a uniform grid of step dt when dt is
/// coarser than the motion spacing. Both ends are always included.
inline std::vector<double> analysis_grid(const MotionSeries &motion, double dt) {
  const double t0 = motion.start();
  const double t1 = motion.end();
  const double motion_step =
      (t1 - t0) / static_cast<double>(motion.frames.size() - 1);
  std::vector<double> grid;
  if (dt <= motion_step * (1.0 + 1e-9)) {
    for (const auto &f : motion.frames) {
      grid.push_back(f.t);
    }
    return grid;
  }
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt));
  for (std::size_t i = 0; i <= n; ++i) {
    grid.push_back(t0 + static_cast<double>(i) * dt);
  }
  if (t1 - grid.back() <= 1e-9 * dt) {
    grid.back() = t1;
  } else {
    grid.push_back(t1);
  }
  return grid;
}

/// Accumulated normalized load at each grid point, starting from 0.
inline std::vector<double> accumulation(const LoadProfile &profile,
                                        const MuscleParameters &params,
                                        const std::vector<double> &grid,
                                        double dt) {
  std::vector<double> f(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    f[i] = f[i - 1] + accumulated_load(profile, params, grid[i - 1], grid[i], dt);
  }
  return f;
}

inline std::vector<TimeSpan> flagged_spans(const std::vector<double> &t,
                                           const std::vector<bool> &flag) {
  std::vector<TimeSpan> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!flag[i]) {
      continue;
    }
    if (i > 0 && flag[i - 1]) {
      out.back().end = t[i];
    } else {
      out.push_back({t[i], t[i]});
    }
  }
  return out;
}

} // namespace detail

/**
 * Runs the full pipeline. Fatigue values on the grid come from the closed
 * forms applied to the exact integral of the frame-sampled (linearly
 * interpolated) muscle load, so the per-phase increments telescope to the
 * final fatigue index.
 */
inline FatigueReport evaluate_task(const WorkerProfile &worker,
                                   const MotionSeries &motion,
                                   const LoadProfile &mass_timeline,
                                   const EvaluationOptions &options,
                                   const std::optional<StandardTimes> &standards = {}) {
  if (!(options.analysis_dt > 0.0) || !std::isfinite(options.analysis_dt)) {
    throw ParameterError("analysis_dt must be > 0");
  }
  if (!(options.inertial_speed_threshold > 0.0)) {
    throw ParameterError("inertial speed threshold must be > 0");
  }
  validate(worker);
  if (motion.frames.size() < 2) {
    throw InsufficientDataError("motion needs at least 2 frames");
  }
  if (motion.start() < 0.0) {
    throw DomainError("motion must start at t >= 0");
  }

  FatigueReport report;
  report.t_start = motion.start();
  report.t_end = motion.end();
  report.metadata.parameters = {
      {"analysis_dt_min", options.analysis_dt},
      {"velocity_threshold_rad_per_min", options.velocity_threshold},
      {"min_phase_duration_min", options.min_phase_duration},
      {"inertial_speed_threshold_rad_per_min", options.inertial_speed_threshold},
  };

  const auto profiles = posture_series_to_load_profiles(worker, motion, mass_timeline);
  const auto grid = detail::analysis_grid(motion, options.analysis_dt);
  const double dt = options.analysis_dt;
  const double window = report.t_end - report.t_start;
  const double scan_dt = grid[1] - grid[0];

  std::vector<PhaseSpan> phases = motion.phases;
  if (phases.empty()) {
    phases = segment_phases(motion, options.velocity_threshold,
                            options.min_phase_duration);
  }
  for (const auto &p : phases) {
    report.phases.push_back({p.label, p.start, p.end, p.duration(), {}});
  }

  std::optional<GridCheck> grid_check;
  if (options.check_grid) {
    grid_check = GridCheck{dt, dt / 2.0, 0.0, true};
  }

  std::vector<MuscleAttachment> muscles = worker.muscles;
  std::sort(muscles.begin(), muscles.end(), [](const auto &a, const auto &b) {
    return a.params.muscle_id < b.params.muscle_id;
  });

  for (const auto &m : muscles) {
    const auto &params = m.params;
    const auto &profile = profiles.at(params.muscle_id);

    MuscleReport mr;
    mr.muscle_id = params.muscle_id;
    mr.joint = m.joint;
    mr.mvc = params.mvc;
    mr.k = params.k;

    const auto f = detail::accumulation(profile, params, grid, dt);
    std::vector<bool> overloaded(grid.size(), false);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double load = profile.evaluate(grid[i]);
      const double fcem = fcem_closed_form(params, f[i]);
      mr.trajectory.push_back(
          {grid[i], load, fcem, fatigue_index_closed_form(params, f[i])});
      overloaded[i] = load > fcem;
    }
    mr.overload_spans = detail::flagged_spans(grid, overloaded);
    mr.final_u = mr.trajectory.back().u;

    for (const auto &s : std::get<SampledLoad>(profile.variant()).samples) {
      mr.peak_relative_load = std::max(mr.peak_relative_load, s.f_load / params.mvc);
    }
    mr.mean_relative_load = f.back() / window;
    mr.endurance_time =
        endurance_time(params, profile, report.t_end, scan_dt, report.t_start);
    mr.projected_endurance = constant_load_endurance(mr.mean_relative_load, params.k);
    mr.u_ref = constant_load_exhaustion_fatigue(mr.mean_relative_load, params.k);
    if (mr.u_ref && *mr.u_ref > 0.0) {
      mr.normalized_u = mr.final_u / *mr.u_ref;
    } else {
      mr.u_ref.reset();
    }

    for (auto &phase : report.phases) {
      const double f_start =
          accumulated_load(profile, params, report.t_start, phase.start, dt);
      const double f_end =
          accumulated_load(profile, params, report.t_start, phase.end, dt);
      phase.delta_u[params.muscle_id] =
          fatigue_index_closed_form(params, std::max(f_end, f_start), f_start);
    }

    if (grid_check) {
      const auto fine = detail::analysis_grid(motion, dt / 2.0);
      const auto f_fine = detail::accumulation(profile, params, fine, dt / 2.0);
      const double u_fine = fatigue_index_closed_form(params, f_fine.back());
      const double change =
          mr.final_u > 0.0 ? std::abs(u_fine - mr.final_u) / mr.final_u
                           : std::abs(u_fine);
      grid_check->max_relative_change =
          std::max(grid_check->max_relative_change, change);
    }

    report.muscles.push_back(std::move(mr));
  }
  if (grid_check) {
    grid_check->passed = grid_check->max_relative_change < kGridConvergenceLimit;
    report.grid_check = grid_check;
  }

  const auto speed = joint_speeds(motion);
  std::vector<double> times;
  std::vector<bool> fast;
  for (std::size_t i = 0; i < motion.frames.size(); ++i) {
    times.push_back(motion.frames[i].t);
    fast.push_back(speed[i] > options.inertial_speed_threshold);
  }
  report.quasi_static_violations = detail::flagged_spans(times, fast);

  if (standards) {
    report.efficiency = efficiency_ratio(phases, *standards);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson num(double v) { return text::round9(v); }

inline ojson opt(const std::optional<double> &v) {
  return v ? num(*v) : ojson(nullptr);
}

inline std::optional<double> opt_from(const ojson &j) {
  if (j.is_null()) {
    return std::nullopt;
  }
  return j.get<double>();
}

inline ojson spans_json(const std::vector<TimeSpan> &spans) {
  ojson out = ojson::array();
  for (const auto &s : spans) {
    out.push_back({{"start_min", num(s.start)}, {"end_min", num(s.end)}});
  }
  return out;
}

inline std::vector<TimeSpan> spans_from(const ojson &j) {
  std::vector<TimeSpan> out;
  for (const auto &s : j) {
    out.push_back({s.at("start_min").get<double>(), s.at("end_min").get<double>()});
  }
  return out;
}

} // namespace detail

inline nlohmann::ordered_json report_to_json(const FatigueReport &r) {
  using detail::num;
  using detail::ojson;
  using detail::opt;

  ojson meta;
  meta["tool_version"] = r.metadata.tool_version;
  meta["input_digests"] = ojson::object();
  for (const auto &[k, v] : r.metadata.input_digests) {
    meta["input_digests"][k] = v;
  }
  meta["parameters"] = ojson::object();
  for (const auto &[k, v] : r.metadata.parameters) {
    meta["parameters"][k] = num(v);
  }

  ojson muscles = ojson::array();
  for (const auto &m : r.muscles) {
    ojson traj = ojson::array();
    for (const auto &p : m.trajectory) {
      traj.push_back({num(p.t), num(p.f_load), num(p.fcem), num(p.u)});
    }
    muscles.push_back({
        {"muscle_id", m.muscle_id},
        {"joint", m.joint},
        {"mvc_N", num(m.mvc)},
        {"k_per_min", num(m.k)},
        {"final_u_min", num(m.final_u)},
        {"u_ref_min", opt(m.u_ref)},
        {"normalized_u", opt(m.normalized_u)},
        {"endurance_time_min", opt(m.endurance_time)},
        {"projected_endurance_min", opt(m.projected_endurance)},
        {"peak_relative_load", num(m.peak_relative_load)},
        {"mean_relative_load", num(m.mean_relative_load)},
        {"overload_spans", detail::spans_json(m.overload_spans)},
        {"trajectory_columns", {"t_min", "f_load_N", "fcem_N", "u_min"}},
        {"trajectory", std::move(traj)},
    });
  }

  ojson phases = ojson::array();
  for (const auto &p : r.phases) {
    ojson du = ojson::object();
    for (const auto &[id, v] : p.delta_u) {
      du[id] = num(v);
    }
    phases.push_back({{"label", p.label},
                      {"start_min", num(p.start)},
                      {"end_min", num(p.end)},
                      {"duration_min", num(p.duration)},
                      {"delta_u_min", std::move(du)}});
  }

  ojson efficiency = nullptr;
  if (r.efficiency) {
    ojson per = ojson::array();
    for (const auto &e : r.efficiency->phases) {
      per.push_back({{"label", e.label},
                     {"standard_min", num(e.standard)},
                     {"actual_min", num(e.actual)},
                     {"ratio", num(e.ratio)}});
    }
    efficiency = {{"overall", num(r.efficiency->overall)}, {"phases", std::move(per)}};
  }

  ojson grid = nullptr;
  if (r.grid_check) {
    grid = {{"analysis_dt_min", num(r.grid_check->analysis_dt)},
            {"halved_dt_min", num(r.grid_check->halved_dt)},
            {"max_relative_change", num(r.grid_check->max_relative_change)},
            {"passed", r.grid_check->passed}};
  }

  ojson out;
  out["metadata"] = std::move(meta);
  out["window"] = {{"start_min", num(r.t_start)}, {"end_min", num(r.t_end)}};
  out["muscles"] = std::move(muscles);
  out["phases"] = std::move(phases);
  out["efficiency"] = std::move(efficiency);
  out["quasi_static_violations"] = detail::spans_json(r.quasi_static_violations);
  out["grid_check"] = std::move(grid);
  return out;
}

inline FatigueReport report_from_json(const nlohmann::ordered_json &j) {
  using detail::opt_from;
  try {
    FatigueReport r;
    const auto &meta = j.at("metadata");
    r.metadata.tool_version = meta.at("tool_version").get<std::string>();
    for (const auto &[k, v] : meta.at("input_digests").items()) {
      r.metadata.input_digests[k] = v.get<std::string>();
    }
    for (const auto &[k, v] : meta.at("parameters").items()) {
      r.metadata.parameters[k] = v.get<double>();
    }
    r.t_start = j.at("window").at("start_min").get<double>();
    r.t_end = j.at("window").at("end_min").get<double>();

    for (const auto &m : j.at("muscles")) {
      MuscleReport mr;
      mr.muscle_id = m.at("muscle_id").get<std::string>();
      mr.joint = m.at("joint").get<std::string>();
      mr.mvc = m.at("mvc_N").get<double>();
      mr.k = m.at("k_per_min").get<double>();
      mr.final_u = m.at("final_u_min").get<double>();
      mr.u_ref = opt_from(m.at("u_ref_min"));
      mr.normalized_u = opt_from(m.at("normalized_u"));
      mr.endurance_time = opt_from(m.at("endurance_time_min"));
      mr.projected_endurance = opt_from(m.at("projected_endurance_min"));
      mr.peak_relative_load = m.at("peak_relative_load").get<double>();
      mr.mean_relative_load = m.at("mean_relative_load").get<double>();
      mr.overload_spans = detail::spans_from(m.at("overload_spans"));
      for (const auto &p : m.at("trajectory")) {
        mr.trajectory.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                                 p.at(2).get<double>(), p.at(3).get<double>()});
      }
      r.muscles.push_back(std::move(mr));
    }
    for (const auto &p : j.at("phases")) {
      PhaseReport pr;
      pr.label = p.at("label").get<std::string>();
      pr.start = p.at("start_min").get<double>();
      pr.end = p.at("end_min").get<double>();
      pr.duration = p.at("duration_min").get<double>();
      for (const auto &[id, v] : p.at("delta_u_min").items()) {
        pr.delta_u[id] = v.get<double>();
      }
      r.phases.push_back(std::move(pr));
    }
    if (!j.at("efficiency").is_null()) {
      EfficiencyResult e;
      e.overall = j["efficiency"].at("overall").get<double>();
      for (const auto &p : j["efficiency"].at("phases")) {
        e.phases.push_back({p.at("label").get<std::string>(),
                            p.at("standard_min").get<double>(),
                            p.at("actual_min").get<double>(),
                            p.at("ratio").get<double>()});
      }
      r.efficiency = std::move(e);
    }
    r.quasi_static_violations = detail::spans_from(j.at("quasi_static_violations"));
    if (!j.at("grid_check").is_null()) {
      const auto &g = j["grid_check"];
      r.grid_check = GridCheck{g.at("analysis_dt_min").get<double>(),
                               g.at("halved_dt_min").get<double>(),
                               g.at("max_relative_change").get<double>(),
                               g.at("passed").get<bool>()};
    }
    return r;
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("report: ") + e.what());
  }
}

inline std::string report_json_text(const FatigueReport &r) {
  return report_to_json(r).dump(2) + "\n";
}

inline std::string trajectory_csv(const MuscleReport &m) {
  std::string out = "t_min,f_load_N,fcem_N,u_min\n";
  for (const auto &p : m.trajectory) {
    out += text::fmt9(p.t) + "," + text::fmt9(p.f_load) + "," +
           text::fmt9(p.fcem) + "," + text::fmt9(p.u) + "\n";
  }
  return out;
}

inline std::string summary_csv(const FatigueReport &r) {
  auto opt = [](const std::optional<double> &v) {
    return v ? text::fmt9(*v) : std::string("none");
  };
  std::string out = "muscle_id,joint,mvc_N,k_per_min,final_u_min,normalized_u,"
                    "endurance_time_min,projected_endurance_min,"
                    "peak_relative_load,mean_relative_load,overload_spans\n";
  for (const auto &m : r.muscles) {
    out += m.muscle_id + "," + m.joint + "," + text::fmt9(m.mvc) + "," +
           text::fmt9(m.k) + "," + text::fmt9(m.final_u) + "," +
           opt(m.normalized_u) + "," + opt(m.endurance_time) + "," +
           opt(m.projected_endurance) + "," + text::fmt9(m.peak_relative_load) +
           "," + text::fmt9(m.mean_relative_load) + "," +
           std::to_string(m.overload_spans.size()) + "\n";
  }
  return out;
}

/// Writes report.json, summary.csv and one trajectory_<muscle>.csv per
/// muscle into directory (created if missing). Returns the written paths.
inline std::vector<std::string> write_report(const FatigueReport &r,
                                             const std::string &directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    throw IoError(directory, "cannot create directory: " + ec.message());
  }
  std::vector<std::string> written;
  auto emit = [&](const std::string &name, const std::string &content) {
    const auto path = (fs::path(directory) / name).string();
    text::write_file(path, content);
    written.push_back(path);
  };
  emit("report.json", report_json_text(r));
  emit("summary.csv", summary_csv(r));
  for (const auto &m : r.muscles) {
    emit("trajectory_" + m.muscle_id + ".csv", trajectory_csv(m));
  }
  return written;
}

inline FatigueReport read_report(const std::string &path) {
  const auto content = text::read_file(path);
  try {
    return report_from_json(nlohmann::ordered_json::parse(content));
  } catch (const nlohmann::json::parse_error &e) {
    throw SchemaError(path + ": " + e.what());
  }
}

} // namespace fatiguekit
