// fatiguekit command-line front end.
//
//   fatiguekit analyze   --worker W.json --motion M.csv --mass X.csv --out DIR
//   fatiguekit endurance --mvc 100 --k 1 --load 50
//   fatiguekit synth     hold|lift-cycle --out DIR
//
// Exit codes: 0 success, 1 usage or input error, 2 internal invariant
// violation. Errors are reported as one line: "error: <kind>: <message>".

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>

#include "fatiguekit.hpp"

namespace fk = fatiguekit;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

std::string sha256_hex(const std::string &data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw fk::InvariantError("sha256 digest failed");
  }
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return "sha256:" + out;
}

// Re-throws any library error with the offending file prefixed.
template <typename Fn>
auto from_file(const std::string &path, Fn &&parse) {
  const auto content = fk::text::read_file(path);
  try {
    return parse(content);
  } catch (const fk::IoError &) {
    throw;
  } catch (const fk::Error &e) {
    throw fk::Error(e.kind(), path + ": " + e.what());
  }
}

std::uint64_t seed_from_env() {
  const char *env = std::getenv("FATIGUEKIT_SEED");
  if (env == nullptr || *env == '\0') {
    return 42;
  }
  char *end = nullptr;
  const auto v = std::strtoull(env, &end, 10);
  if (end == nullptr || *end != '\0') {
    throw fk::ParameterError("FATIGUEKIT_SEED must be an unsigned integer");
  }
  return v;
}

std::string opt_min(const std::optional<double> &v, const char *none) {
  return v ? fk::text::fmt9(*v) + " min" : std::string(none);
}

struct AnalyzeArgs {
  std::string worker;
  std::string motion;
  std::string mass;
  std::string out;
  std::string standards;
  double dt = 1e-3;
  std::optional<double> k_override;
  std::optional<double> resample_hz;
  double velocity_threshold_rad_s = 0.5;
  double min_phase_s = 0.25;
  double inertial_threshold_rad_s = 2.0;
};

int run_analyze(const AnalyzeArgs &a) {
  auto worker = from_file(a.worker, [](const std::string &c) {
    return fk::parse_worker_profile_json(c);
  });
  if (a.k_override) {
    for (auto &m : worker.muscles) {
      m.params.k = *a.k_override;
    }
    fk::validate(worker);
  }
  auto motion = from_file(a.motion, [](const std::string &c) {
    return fk::parse_motion_csv(c);
  });
  if (a.resample_hz) {
    motion = fk::resample_motion(motion, *a.resample_hz * 60.0);
  }
  const auto mass = from_file(a.mass, [](const std::string &c) {
    return fk::parse_sampled_csv(c, "mass_kg");
  });
  std::optional<fk::StandardTimes> standards;
  if (!a.standards.empty()) {
    standards = from_file(a.standards, [](const std::string &c) {
      return fk::parse_standard_times_json(c);
    });
  }

  fk::EvaluationOptions opts;
  opts.analysis_dt = a.dt;
  opts.velocity_threshold = a.velocity_threshold_rad_s * 60.0;
  opts.min_phase_duration = a.min_phase_s / 60.0;
  opts.inertial_speed_threshold = a.inertial_threshold_rad_s * 60.0;

  auto report = fk::evaluate_task(worker, motion, mass, opts, standards);
  report.metadata.input_digests["worker"] = sha256_hex(fk::text::read_file(a.worker));
  report.metadata.input_digests["motion"] = sha256_hex(fk::text::read_file(a.motion));
  report.metadata.input_digests["mass"] = sha256_hex(fk::text::read_file(a.mass));
  if (!a.standards.empty()) {
    report.metadata.input_digests["standards"] =
        sha256_hex(fk::text::read_file(a.standards));
  }
  if (a.k_override) {
    report.metadata.parameters["k_override_per_min"] = *a.k_override;
  }
  fk::write_report(report, a.out);

  std::printf("window %s .. %s min, %zu phases, %zu muscles\n",
              fk::text::fmt9(report.t_start).c_str(),
              fk::text::fmt9(report.t_end).c_str(), report.phases.size(),
              report.muscles.size());
  std::printf("%-20s %14s %22s %10s\n", "muscle", "final_U_min", "endurance",
              "peak_rel");
  for (const auto &m : report.muscles) {
    std::string endurance = opt_min(m.endurance_time, "none in window");
    if (!m.endurance_time && m.projected_endurance) {
      endurance = "~" + fk::text::fmt9(*m.projected_endurance) + " min (proj)";
    }
    std::printf("%-20s %14s %22s %10s\n", m.muscle_id.c_str(),
                fk::text::fmt9(m.final_u).c_str(), endurance.c_str(),
                fk::text::fmt9(m.peak_relative_load).c_str());
  }
  if (report.efficiency) {
    std::printf("overall efficiency %s\n",
                fk::text::fmt9(report.efficiency->overall).c_str());
  }
  if (report.grid_check && !report.grid_check->passed) {
    std::printf("warning: grid halving changed final U by %s (relative)\n",
                fk::text::fmt9(report.grid_check->max_relative_change).c_str());
  }
  if (!report.quasi_static_violations.empty()) {
    std::printf("warning: %zu span(s) exceed the quasi-static speed threshold\n",
                report.quasi_static_violations.size());
  }
  std::printf("report written to %s\n", a.out.c_str());
  return 0;
}

int run_endurance(double mvc, double k, double load) {
  if (!(mvc > 0.0) || !(k > 0.0) || !(load >= 0.0)) {
    throw fk::ParameterError("require mvc > 0, k > 0, load >= 0");
  }
  const double f = load / mvc;
  const auto t = fk::constant_load_endurance(f, k);
  if (!t) {
    std::printf("endurance: no exhaustion\n");
    return 0;
  }
  std::printf("relative_load: %s\n", fk::text::fmt9(f).c_str());
  std::printf("endurance_min: %s\n", fk::text::fmt9(*t).c_str());
  std::printf("u_at_exhaustion_min: %s\n",
              fk::text::fmt9(*fk::constant_load_exhaustion_fatigue(f, k)).c_str());
  return 0;
}

struct SynthArgs {
  std::string scenario;
  std::string out;
  fk::synth::Options opts;
  std::vector<std::string> joints;
};

int run_synth(SynthArgs a) {
  auto &o = a.opts;
  o.seed = seed_from_env();
  if (!a.joints.empty()) {
    o.posture.clear();
    for (const auto &entry : a.joints) {
      const auto eq = entry.find('=');
      const auto angle = eq == std::string::npos
                             ? std::nullopt
                             : fk::text::parse_double(entry.substr(eq + 1));
      if (!angle || eq == 0) {
        throw fk::ParameterError("--joint expects name=angle_rad, got '" + entry + "'");
      }
      o.posture.emplace_back(entry.substr(0, eq), *angle);
    }
  }
  const auto scenario =
      a.scenario == "hold" ? fk::synth::hold(o) : fk::synth::lift_cycle(o);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) {
    throw fk::IoError(a.out, "cannot create directory: " + ec.message());
  }
  const fs::path dir(a.out);
  fk::text::write_file((dir / "motion.csv").string(), fk::to_csv(scenario.motion));
  fk::text::write_file(
      (dir / "mass.csv").string(),
      fk::to_csv(std::get<fk::SampledLoad>(scenario.mass.variant()), "mass_kg"));
  fk::text::write_file((dir / "phases_truth.json").string(),
                       fk::synth::truth_json(scenario.truth).dump(2) + "\n");
  std::printf("%s: %zu frames, %zu phases -> %s\n", a.scenario.c_str(),
              scenario.motion.frames.size(), scenario.truth.size(), a.out.c_str());
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"fatiguekit: dynamic muscle fatigue evaluation for manual handling tasks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");

  AnalyzeArgs an;
  auto *analyze = app.add_subcommand("analyze", "Evaluate a recorded task and write a report");
  analyze->add_option("--worker", an.worker, "Worker profile JSON")->required();
  analyze->add_option("--motion", an.motion, "Motion CSV (t_min,<joint>_rad,...)")->required();
  analyze->add_option("--mass", an.mass, "Hand mass timeline CSV (t_min,mass_kg)")->required();
  analyze->add_option("--out", an.out, "Output directory")->required();
  analyze->add_option("--standards", an.standards, "Standard times JSON (label -> min)");
  analyze->add_option("--dt", an.dt, "Analysis grid step, minutes")
      ->check(CLI::PositiveNumber)->capture_default_str();
  analyze->add_option("--k", an.k_override, "Override k (1/min) for every muscle")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--resample-hz", an.resample_hz, "Resample motion before analysis")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--velocity-threshold", an.velocity_threshold_rad_s,
                      "Dwell/move speed threshold, rad/s")
      ->check(CLI::PositiveNumber)->capture_default_str();
  analyze->add_option("--min-phase", an.min_phase_s, "Minimum phase duration, s")
      ->check(CLI::PositiveNumber)->capture_default_str();
  analyze->add_option("--inertial-threshold", an.inertial_threshold_rad_s,
                      "Speed above which quasi-static loading is flagged, rad/s")
      ->check(CLI::PositiveNumber)->capture_default_str();

  double mvc = 0.0;
  double k = fk::kDefaultRateConstant;
  double load = 0.0;
  auto *endurance = app.add_subcommand("endurance", "Endurance time under a constant load");
  endurance->add_option("--mvc", mvc, "Maximum voluntary contraction, N")->required();
  endurance->add_option("--k", k, "Rate constant, 1/min")->capture_default_str();
  endurance->add_option("--load", load, "Constant demanded force, N")->required();

  SynthArgs sy;
  auto *synth = app.add_subcommand("synth", "Write a synthetic motion + mass fixture");
  synth->add_option("scenario", sy.scenario, "hold | lift-cycle")
      ->required()->check(CLI::IsMember({"hold", "lift-cycle"}));
  synth->add_option("--out", sy.out, "Output directory")->required();
  synth->add_option("--rate-hz", sy.opts.rate_hz, "Frame rate")->capture_default_str();
  synth->add_option("--duration-s", sy.opts.duration_s, "Hold duration, s")
      ->capture_default_str();
  synth->add_option("--mass-kg", sy.opts.mass_kg, "Hand mass, kg")->capture_default_str();
  synth->add_option("--joint", sy.joints, "Base posture entry name=angle_rad (repeatable)");
  synth->add_option("--cycles", sy.opts.cycles, "Lift cycles")->capture_default_str();
  synth->add_option("--lead-hold-s", sy.opts.lead_hold_s, "Initial hold, s")
      ->capture_default_str();
  synth->add_option("--move-s", sy.opts.move_s, "Move phase length, s")->capture_default_str();
  synth->add_option("--dwell-s", sy.opts.dwell_s, "Dwell phase length, s")
      ->capture_default_str();
  synth->add_option("--moving-joint", sy.opts.moving_joint, "Joint swung during moves")
      ->capture_default_str();
  synth->add_option("--amplitude-rad", sy.opts.amplitude_rad, "Swing amplitude, rad")
      ->capture_default_str();
  synth->add_option("--noise-rad", sy.opts.noise_rad,
                    "Gaussian angle noise (seeded by FATIGUEKIT_SEED)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*analyze) {
      return run_analyze(an);
    }
    if (*endurance) {
      return run_endurance(mvc, k, load);
    }
    return run_synth(sy);
  } catch (const fk::Error &e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception &e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitInternal;
  }
}
