#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "hybdiff/differentiators.hpp"
#include "hybdiff/signals.hpp"

namespace hybdiff {

enum class Method { euler, rk4 };

inline std::string_view to_string(Method m) { return m == Method::euler ? "euler" : "rk4"; }

inline Method parse_method(std::string_view s) {
  if (s == "euler") return Method::euler;
  if (s == "rk4") return Method::rk4;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

template <std::size_t N>
using Vec = std::array<double, N>;

namespace detail {

template <std::size_t N>
Vec<N> axpy(const Vec<N>& x, double a, const Vec<N>& y) {
  Vec<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = x[i] + a * y[i];
  return r;
}

}  // namespace detail

template <std::size_t N>
bool all_finite(const Vec<N>& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

/// One fixed step of x' = rhs(x, v) with the input v held over the step.
template <std::size_t N, class Rhs>
Vec<N> step(Method method, Rhs&& rhs, const Vec<N>& x, double v_held, double dt) {
  if (method == Method::euler) return detail::axpy(x, dt, rhs(x, v_held));
  const Vec<N> s1 = rhs(x, v_held);
  const Vec<N> s2 = rhs(detail::axpy(x, 0.5 * dt, s1), v_held);
  const Vec<N> s3 = rhs(detail::axpy(x, 0.5 * dt, s2), v_held);
  const Vec<N> s4 = rhs(detail::axpy(x, dt, s3), v_held);
  Vec<N> r;
  for (std::size_t i = 0; i < N; ++i)
    r[i] = x[i] + dt / 6.0 * (s1[i] + 2.0 * s2[i] + 2.0 * s3[i] + s4[i]);
  return r;
}

struct ScheduleEntry {
  double t = 0.0;  // switch time, s
  FamilyParams params;

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

using ParamSchedule = std::vector<ScheduleEntry>;

struct SimConfig {
  double dt = 1e-4;
  double t_end = 10.0;
  Method method = Method::rk4;
  DiffState x0{};

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Column {
  std::string name;
  std::vector<double> values;
};

struct TimeSeries {
  std::vector<double> t, x1, x2, v0, dv0, v_meas;
  std::vector<Column> aux;  // family-specific extras, not part of the CSV

  std::size_t size() const { return t.size(); }

  const Column* find_aux(std::string_view name) const {
    for (const auto& c : aux)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Thrown when the state overflows or becomes NaN.
class NonFiniteState : public std::runtime_error {
 public:
  NonFiniteState(double t, double last_t, std::vector<double> last_state)
      : std::runtime_error("non-finite state at t=" + std::to_string(t) +
                           " (last finite state at t=" + std::to_string(last_t) + ")"),
        t_(t),
        last_t_(last_t),
        last_state_(std::move(last_state)) {}

  double t() const { return t_; }
  double last_finite_t() const { return last_t_; }
  const std::vector<double>& last_finite_state() const { return last_state_; }

 private:
  double t_;
  double last_t_;
  std::vector<double> last_state_;
};

/// Number of grid intervals for a run, floor(t_end / dt) with float slack.
inline std::size_t step_count(double dt, double t_end) {
  return static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
}

/// Checks SimConfig and schedule invariants; returns the problems found.
inline std::vector<FieldError> validate_sim(const SimConfig& cfg, const ParamSchedule& sched) {
  std::vector<FieldError> errs;
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) errs.push_back({"dt", "must be finite and > 0"});
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end))
    errs.push_back({"t_end", "must be finite and > 0"});
  else if (cfg.dt > cfg.t_end)
    errs.push_back({"dt", "must not exceed t_end"});
  if (!std::isfinite(cfg.x0.x1) || !std::isfinite(cfg.x0.x2))
    errs.push_back({"x0", "must be finite"});
  if (sched.empty()) {
    errs.push_back({"schedule", "needs at least one entry"});
  } else {
    if (sched.front().t != 0.0) errs.push_back({"schedule[0].t", "first entry must be at t = 0"});
    for (std::size_t i = 1; i < sched.size(); ++i)
      if (!(sched[i].t > sched[i - 1].t))
        errs.push_back({"schedule[" + std::to_string(i) + "].t", "switch times must increase"});
  }
  return errs;
}

namespace detail {

inline Vec<2> to_vec(Rates r) { return {r.dx1, r.dx2}; }

inline Vec<4> gred_rhs(const GredParams& p, const Vec<4>& x, double v) {
  const Rates a = levant_rhs(p.levant, {x[0], x[1]}, v);
  const Rates b = linear_rhs(p.linear, {x[2], x[3]}, v);
  return {a.dx1, a.dx2, b.dx1, b.dx2};
}

template <std::size_t N>
std::vector<double> as_vector(const Vec<N>& x) {
  return {x.begin(), x.end()};
}

}  // namespace detail

/// Fixed-step simulation of a differentiator family driven by v0 + noise.
///
/// The measurement is sampled once per step (at the step's start) and held
/// through all RK4 stages. Schedule entries take effect at the first grid
/// point t_i >= switch time.
inline TimeSeries simulate(FamilyKind kind, const ParamSchedule& schedule, const SignalSpec& signal,
                           const NoiseSpec& noise, const SimConfig& cfg) {
  if (auto errs = validate_sim(cfg, schedule); !errs.empty())
    throw std::invalid_argument("invalid simulation config: " + errs.front().field + " " +
                                errs.front().message);

  const std::size_t n = step_count(cfg.dt, cfg.t_end);
  TimeSeries ts;
  for (auto* col : {&ts.t, &ts.x1, &ts.x2, &ts.v0, &ts.dv0, &ts.v_meas}) col->reserve(n + 1);

  const bool gred = kind == FamilyKind::gred;
  std::vector<double> x11, x12, x21, x22;
  if (gred)
    for (auto* col : {&x11, &x12, &x21, &x22}) col->reserve(n + 1);

  Vec<2> x2s{cfg.x0.x1, cfg.x0.x2};
  Vec<4> x4s{cfg.x0.x1, cfg.x0.x2, cfg.x0.x1, cfg.x0.x2};
  std::size_t active = 0;
  const double switch_slack = 1e-9 * cfg.dt;

  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    while (active + 1 < schedule.size() && t >= schedule[active + 1].t - switch_slack) ++active;
    const FamilyParams& params = schedule[active].params;

    const SignalSample clean = sample_clean(signal, t);
    const double v = clean.v0 + sample_noise(noise, i, t);

    DiffState out;
    if (gred) {
      const auto& gp = std::get<GredParams>(params);
      out = gred_output({x4s[0], x4s[1]}, {x4s[2], x4s[3]}, gp);
      x11.push_back(x4s[0]);
      x12.push_back(x4s[1]);
      x21.push_back(x4s[2]);
      x22.push_back(x4s[3]);
    } else {
      out = {x2s[0], x2s[1]};
    }
    ts.t.push_back(t);
    ts.x1.push_back(out.x1);
    ts.x2.push_back(out.x2);
    ts.v0.push_back(clean.v0);
    ts.dv0.push_back(clean.dv0);
    ts.v_meas.push_back(v);
    if (i == n) break;

    const double t_next = static_cast<double>(i + 1) * cfg.dt;
    if (gred) {
      const auto& gp = std::get<GredParams>(params);
      auto rhs = [&gp](const Vec<4>& x, double vm) { return detail::gred_rhs(gp, x, vm); };
      const Vec<4> next = step(cfg.method, rhs, x4s, v, cfg.dt);
      if (!all_finite(next)) throw NonFiniteState(t_next, t, detail::as_vector(x4s));
      x4s = next;
    } else {
      Vec<2> next;
      std::visit(
          [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            auto rhs = [&p](const Vec<2>& x, double vm) {
              const DiffState s{x[0], x[1]};
              if constexpr (std::is_same_v<P, HybridParams>) return detail::to_vec(hybrid_rhs(p, s, vm));
              else if constexpr (std::is_same_v<P, LevantParams>) return detail::to_vec(levant_rhs(p, s, vm));
              else if constexpr (std::is_same_v<P, LinearParams>) return detail::to_vec(linear_rhs(p, s, vm));
              else return Vec<2>{0.0, 0.0};
            };
            next = step(cfg.method, rhs, x2s, v, cfg.dt);
          },
          params);
      if (!all_finite(next)) throw NonFiniteState(t_next, t, detail::as_vector(x2s));
      x2s = next;
    }
  }

  if (gred) {
    ts.aux.push_back({"x11", std::move(x11)});
    ts.aux.push_back({"x12", std::move(x12)});
    ts.aux.push_back({"x21", std::move(x21)});
    ts.aux.push_back({"x22", std::move(x22)});
  }
  return ts;
}

/// Convenience overload for a single, unscheduled parameter block.
inline TimeSeries simulate(FamilyKind kind, const FamilyParams& params, const SignalSpec& signal,
                           const NoiseSpec& noise, const SimConfig& cfg) {
  return simulate(kind, ParamSchedule{{0.0, params}}, signal, noise, cfg);
}

struct ScalarSeries {
  std::vector<double> t, x, u;  // u = x' evaluated at the sample
};

/// Scalar first-order example systems from x0.
inline ScalarSeries simulate_first_order(FirstOrderKind kind, double x0, double dt, double t_end,
                                         Method method) {
  const std::size_t n = step_count(dt, t_end);
  ScalarSeries out;
  out.t.reserve(n + 1);
  out.x.reserve(n + 1);
  out.u.reserve(n + 1);
  Vec<1> x{x0};
  auto rhs = [kind](const Vec<1>& s, double) { return Vec<1>{first_order_rhs(kind, s[0])}; };
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * dt;
    out.t.push_back(t);
    out.x.push_back(x[0]);
    out.u.push_back(first_order_rhs(kind, x[0]));
    if (i == n) break;
    const Vec<1> next = step(method, rhs, x, 0.0, dt);
    if (!all_finite(next)) throw NonFiniteState(t + dt, t, {x[0]});
    x = next;
  }
  return out;
}

}  // namespace hybdiff
