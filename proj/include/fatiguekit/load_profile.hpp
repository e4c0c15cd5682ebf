#pragma once

/**
 * @file load_profile.hpp
 * @brief Demanded external force as a function of time.
 *
 * A LoadProfile is an immutable value holding one of four shapes:
 *
 *  - Constant: a fixed level for all t >= 0.
 *  - Cyclic: a square wave; `high` for the first `duty` fraction of each
 *    period and `low` for the rest. The switch to `low` is right-continuous,
 *    so evaluate(duty * period) is already `low`.
 *  - Sampled: ordered samples with hold-previous or linear interpolation,
 *    defined only on [first sample, last sample]. Never extrapolated.
 *  - Composite: consecutive segments, each a nested profile evaluated on its
 *    own local clock starting at 0.
 *
 * All shapes are right-continuous. left_limit() gives the value approached
 * from below, used when scanning for the first overload instant.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "muscle.hpp"
#include "text.hpp"

namespace fatiguekit {

enum class Interpolation { hold_previous, linear };

class LoadProfile;

struct ConstantLoad {
  double level = 0.0;
};

struct CyclicLoad {
  double high = 0.0;
  double low = 0.0;
  double period = 1.0;
  double duty = 0.5;
};

struct SampledLoad {
  std::vector<LoadSample> samples;
  Interpolation interpolation = Interpolation::linear;
};

struct CompositeSegment {
  double duration = 0.0;
  std::shared_ptr<const LoadProfile> profile;
};

struct CompositeLoad {
  std::vector<CompositeSegment> segments;
  std::vector<double> starts; // cumulative segment start times
  double total = 0.0;
};

struct TimeDomain {
  double start = 0.0;
  double end = std::numeric_limits<double>::infinity();

  bool contains(double t) const { return t >= start && t <= end; }
};

class LoadProfile {
public:
  using Variant = std::variant<ConstantLoad, CyclicLoad, SampledLoad, CompositeLoad>;

  static LoadProfile constant(double level) {
    check_level(level, "constant level");
    return LoadProfile(ConstantLoad{level});
  }

  static LoadProfile cyclic(double high, double low, double period,
                            double duty) {
    check_level(high, "cyclic high level");
    check_level(low, "cyclic low level");
    if (!(period > 0.0) || !std::isfinite(period)) {
      throw ParameterError("cyclic period must be > 0");
    }
    if (!(duty > 0.0 && duty < 1.0)) {
      throw ParameterError("cyclic duty must lie in (0, 1)");
    }
    return LoadProfile(CyclicLoad{high, low, period, duty});
  }

  static LoadProfile sampled(std::vector<LoadSample> samples,
                             Interpolation interp = Interpolation::linear) {
    if (samples.size() < 2) {
      throw InsufficientDataError("sampled profile needs at least 2 samples");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto &s = samples[i];
      if (!std::isfinite(s.t)) {
        throw InputError("sample " + std::to_string(i) + ": non-finite time");
      }
      check_level(s.f_load, "sample " + std::to_string(i) + " value");
      if (i > 0 && !(s.t > samples[i - 1].t)) {
        throw InputError("sample " + std::to_string(i) +
                         ": timestamps must be strictly increasing");
      }
    }
    return LoadProfile(SampledLoad{std::move(samples), interp});
  }

  static LoadProfile
  composite(const std::vector<std::pair<double, LoadProfile>> &segments) {
    if (segments.empty()) {
      throw ParameterError("composite profile needs at least one segment");
    }
    CompositeLoad c;
    double start = 0.0;
    for (const auto &[duration, inner] : segments) {
      if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw ParameterError("composite segment durations must be > 0");
      }
      const auto d = inner.domain();
      if (d.start > 0.0 || d.end < duration) {
        throw DomainError("composite segment profile does not cover [0, " +
                          text::fmt9(duration) + "]");
      }
      c.segments.push_back({duration, std::make_shared<const LoadProfile>(inner)});
      c.starts.push_back(start);
      start += duration;
    }
    c.total = start;
    return LoadProfile(std::move(c));
  }

  const Variant &variant() const { return v_; }

  TimeDomain domain() const {
    return std::visit(
        [](const auto &x) -> TimeDomain {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, SampledLoad>) {
            return {x.samples.front().t, x.samples.back().t};
          } else if constexpr (std::is_same_v<T, CompositeLoad>) {
            return {0.0, x.total};
          } else {
            return {};
          }
        },
        v_);
  }

  double evaluate(double t) const {
    require_in_domain(t);
    return std::visit([t](const auto &x) { return eval_right(x, t); }, v_);
  }

  /// Value approached from the left at t; equals evaluate(t) wherever the
  /// profile is continuous and at the start of the domain.
  double left_limit(double t) const {
    require_in_domain(t);
    return std::visit([t](const auto &x) { return eval_left(x, t); }, v_);
  }

  /// Sorted, unique points strictly inside (a, b) where the profile may be
  /// discontinuous or change slope. Between consecutive breakpoints every
  /// shape is constant or linear.
  std::vector<double> breakpoints(double a, double b) const {
    std::vector<double> out;
    collect_breakpoints(a, b, 0.0, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Same shape with every force level multiplied by c.
  LoadProfile scaled(double c) const {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ParameterError("scale factor must be > 0");
    }
    return std::visit(
        [c](const auto &x) -> LoadProfile {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ConstantLoad>) {
            return constant(x.level * c);
          } else if constexpr (std::is_same_v<T, CyclicLoad>) {
            return cyclic(x.high * c, x.low * c, x.period, x.duty);
          } else if constexpr (std::is_same_v<T, SampledLoad>) {
            auto s = x.samples;
            for (auto &p : s) {
              p.f_load *= c;
            }
            return sampled(std::move(s), x.interpolation);
          } else {
            std::vector<std::pair<double, LoadProfile>> segs;
            for (const auto &seg : x.segments) {
              segs.emplace_back(seg.duration, seg.profile->scaled(c));
            }
            return composite(segs);
          }
        },
        v_);
  }

private:
  explicit LoadProfile(Variant v) : v_(std::move(v)) {}

  static void check_level(double v, const std::string &what) {
    if (!std::isfinite(v)) {
      throw InputError(what + " is not finite");
    }
    if (v < 0.0) {
      throw InputError(what + " must be >= 0");
    }
  }

  void require_in_domain(double t) const {
    const auto d = domain();
    if (!std::isfinite(t) || !d.contains(t)) {
      throw DomainError("t = " + text::fmt9(t) + " min outside profile domain [" +
                        text::fmt9(d.start) + ", " + text::fmt9(d.end) + "]");
    }
  }

  static double cycle_phase(const CyclicLoad &c, double t) {
    return std::fmod(t, c.period);
  }

  static double eval_right(const ConstantLoad &c, double) { return c.level; }
  static double eval_left(const ConstantLoad &c, double) { return c.level; }

  static double eval_right(const CyclicLoad &c, double t) {
    return cycle_phase(c, t) < c.duty * c.period ? c.high : c.low;
  }
  static double eval_left(const CyclicLoad &c, double t) {
    const double phase = cycle_phase(c, t);
    if (phase == 0.0) {
      return t > 0.0 ? c.low : c.high;
    }
    return phase <= c.duty * c.period ? c.high : c.low;
  }

  // Index of the last sample with time <= t.
  static std::size_t sample_index(const SampledLoad &s, double t) {
    const auto it = std::upper_bound(
        s.samples.begin(), s.samples.end(), t,
        [](double v, const LoadSample &p) { return v < p.t; });
    return static_cast<std::size_t>(it - s.samples.begin()) - 1;
  }

  static double eval_right(const SampledLoad &s, double t) {
    const std::size_t i = sample_index(s, t);
    const auto &p0 = s.samples[i];
    if (t == p0.t || i + 1 == s.samples.size() ||
        s.interpolation == Interpolation::hold_previous) {
      return p0.f_load;
    }
    const auto &p1 = s.samples[i + 1];
    return p0.f_load + (p1.f_load - p0.f_load) * ((t - p0.t) / (p1.t - p0.t));
  }
  static double eval_left(const SampledLoad &s, double t) {
    const std::size_t i = sample_index(s, t);
    if (i > 0 && t == s.samples[i].t &&
        s.interpolation == Interpolation::hold_previous) {
      return s.samples[i - 1].f_load;
    }
    return eval_right(s, t);
  }

  static double eval_right(const CompositeLoad &c, double t) {
    auto it = std::upper_bound(c.starts.begin(), c.starts.end(), t);
    const auto i = static_cast<std::size_t>(it - c.starts.begin()) - 1;
    const auto &seg = c.segments[i];
    return seg.profile->evaluate(std::min(t - c.starts[i], seg.duration));
  }
  static double eval_left(const CompositeLoad &c, double t) {
    if (t <= 0.0) {
      return eval_right(c, t);
    }
    // segment with start < t <= end
    auto it = std::lower_bound(c.starts.begin(), c.starts.end(), t);
    const auto i = static_cast<std::size_t>(it - c.starts.begin()) - 1;
    const auto &seg = c.segments[i];
    return seg.profile->left_limit(std::min(t - c.starts[i], seg.duration));
  }

  void collect_breakpoints(double a, double b, double offset,
                           std::vector<double> &out) const {
    auto push = [&](double local) {
      const double t = local + offset;
      if (t > a && t < b) {
        out.push_back(t);
      }
    };
    std::visit(
        [&](const auto &x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, CyclicLoad>) {
            const double la = a - offset;
            const double lb = b - offset;
            auto first = static_cast<long long>(std::floor(std::max(la, 0.0) / x.period));
            auto last = static_cast<long long>(std::ceil(lb / x.period));
            for (long long n = first; n <= last; ++n) {
              const double base = static_cast<double>(n) * x.period;
              push(base);
              push(base + x.duty * x.period);
            }
          } else if constexpr (std::is_same_v<T, SampledLoad>) {
            auto it = std::upper_bound(
                x.samples.begin(), x.samples.end(), a - offset,
                [](double v, const LoadSample &p) { return v < p.t; });
            for (; it != x.samples.end() && it->t + offset < b; ++it) {
              push(it->t);
            }
          } else if constexpr (std::is_same_v<T, CompositeLoad>) {
            for (std::size_t i = 0; i < x.segments.size(); ++i) {
              const double start = offset + x.starts[i];
              const double end = start + x.segments[i].duration;
              if (end <= a || start >= b) {
                continue;
              }
              push(x.starts[i]);
              x.segments[i].profile->collect_breakpoints(std::max(a, start),
                                                         std::min(b, end),
                                                         start, out);
            }
          }
        },
        v_);
  }

  Variant v_;
};

inline double evaluate(const LoadProfile &profile, double t) {
  return profile.evaluate(t);
}

/**
 * Integral of the profile over [a, b]. The interval is split at the
 * profile's breakpoints; every piece between them is affine, so each piece
 * contributes width * value-at-midpoint, which is what Simpson's rule gives
 * on an affine piece. Evaluating at the midpoint keeps the result exact
 * even when a breakpoint lands an ulp off a square-wave switch.
 */
inline double integrate(const LoadProfile &profile, double a, double b,
                        double max_step) {
  if (!(max_step > 0.0)) {
    throw ParameterError("integration step must be > 0");
  }
  if (!(b >= a)) {
    throw ParameterError("integration interval must satisfy t1 >= t0");
  }
  const auto d = profile.domain();
  if (!d.contains(a) || !d.contains(b)) {
    throw DomainError("integration interval [" + text::fmt9(a) + ", " +
                      text::fmt9(b) + "] outside profile domain");
  }
  if (b == a) {
    return 0.0;
  }
  auto knots = profile.breakpoints(a, b);
  knots.insert(knots.begin(), a);
  knots.push_back(b);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double lo = knots[i];
    const double hi = knots[i + 1];
    total += (hi - lo) * profile.evaluate(lo + 0.5 * (hi - lo));
  }
  return total;
}

/**
 * Uniform grid t_i = i * dt over [0, horizon]; the horizon itself is appended
 * when it is not a grid multiple. The result uses linear interpolation and
 * reproduces the source exactly at every grid point.
 */
inline LoadProfile resample(const LoadProfile &profile, double dt,
                            double horizon) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ParameterError("resample dt must be > 0");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ParameterError("resample horizon must be > 0");
  }
  const auto d = profile.domain();
  if (d.start > 0.0 || d.end < horizon) {
    throw DomainError("resample horizon [0, " + text::fmt9(horizon) +
                      "] exceeds profile domain [" + text::fmt9(d.start) +
                      ", " + text::fmt9(d.end) + "]");
  }
  std::vector<LoadSample> out;
  const auto n = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = std::min(static_cast<double>(i) * dt, horizon);
    if (!out.empty() && t <= out.back().t) {
      break;
    }
    out.push_back({t, profile.evaluate(t)});
  }
  if (out.back().t < horizon) {
    out.push_back({horizon, profile.evaluate(horizon)});
  }
  if (out.size() < 2) {
    out.push_back({horizon, profile.evaluate(horizon)});
  }
  return LoadProfile::sampled(std::move(out), Interpolation::linear);
}

/// Integration step used when callers do not supply one.
inline constexpr double kDefaultIntegrationStep = 1e-3;

/// Time-averaged F_load / MVC over [0, horizon].
inline double mean_relative_load(const LoadProfile &profile,
                                 const MuscleParameters &params,
                                 double horizon,
                                 double dt = kDefaultIntegrationStep) {
  validate(params);
  if (!(horizon > 0.0)) {
    throw ParameterError("horizon must be > 0");
  }
  return integrate(profile, 0.0, horizon, dt) / params.mvc / horizon;
}

/**
 * Parses a two-column CSV (`t_min,<value_column>`) into a sampled profile.
 * Used for load files (`f_load_N`) and hand-mass timelines (`mass_kg`).
 */
inline LoadProfile parse_sampled_csv(std::string_view content,
                                     std::string_view value_column = "f_load_N",
                                     Interpolation interp = Interpolation::linear) {
  const auto lines = text::data_lines(content);
  if (lines.empty()) {
    throw ParseError(1, "missing header");
  }
  const auto header = text::split(lines.front().content, ',');
  if (header.size() != 2 || header[0] != "t_min" || header[1] != value_column) {
    throw ParseError(lines.front().number,
                     "expected header 't_min," + std::string(value_column) + "'");
  }
  std::vector<LoadSample> samples;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto &line = lines[i];
    const auto cols = text::split(line.content, ',');
    if (cols.size() != 2) {
      throw ParseError(line.number, "expected 2 columns, found " +
                                        std::to_string(cols.size()));
    }
    const auto t = text::parse_double(cols[0]);
    const auto v = text::parse_double(cols[1]);
    if (!t || !v) {
      throw ParseError(line.number, "malformed number");
    }
    if (!std::isfinite(*t) || !std::isfinite(*v)) {
      throw ParseError(line.number, "non-finite value");
    }
    if (*v < 0.0) {
      throw ParseError(line.number, "negative value");
    }
    if (!samples.empty() && !(*t > samples.back().t)) {
      throw ParseError(line.number, "time not strictly increasing");
    }
    samples.push_back({*t, *v});
  }
  if (samples.size() < 2) {
    throw ParseError(lines.back().number, "need at least 2 data rows");
  }
  return LoadProfile::sampled(std::move(samples), interp);
}

/// Inverse of parse_sampled_csv for sampled profiles (9 significant digits).
inline std::string to_csv(const SampledLoad &s,
                          std::string_view value_column = "f_load_N") {
  std::string out = "t_min," + std::string(value_column) + "\n";
  for (const auto &p : s.samples) {
    out += text::fmt9(p.t) + "," + text::fmt9(p.f_load) + "\n";
  }
  return out;
}

} // namespace fatiguekit
