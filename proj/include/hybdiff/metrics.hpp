#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hybdiff/analysis.hpp"
#include "hybdiff/integrator.hpp"

namespace hybdiff {

class WindowOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct Window {
  double t_a = 0.0;
  double t_b = 0.0;

  friend bool operator==(const Window&, const Window&) = default;
};

struct ErrorSeries {
  std::vector<double> e1;
  std::vector<double> e2;
};

/// Errors against the clean signal (not the measured one).
inline ErrorSeries error_series(const TimeSeries& ts) {
  ErrorSeries e;
  e.e1.resize(ts.size());
  e.e2.resize(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    e.e1[i] = ts.x1[i] - ts.v0[i];
    e.e2[i] = ts.x2[i] - ts.dv0[i];
  }
  return e;
}

/// Earliest t_i with |e_j| <= tol for every j >= i; nullopt if the tail never settles.
inline std::optional<double> settling_time(std::span<const double> e, std::span<const double> t,
                                           double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("settling_time: tol must be > 0");
  if (e.size() != t.size()) throw std::invalid_argument("settling_time: length mismatch");
  std::size_t i = e.size();
  while (i > 0 && std::abs(e[i - 1]) <= tol) --i;
  if (i == e.size()) return std::nullopt;
  return t[i];
}

/// Index range [first, last] of samples with t_a <= t <= t_b.
inline std::pair<std::size_t, std::size_t> window_indices(std::span<const double> t, Window w) {
  if (t.empty()) throw WindowOutOfRange("empty series");
  const double slack = t.size() > 1 ? 1e-9 * (t[1] - t[0]) : 0.0;
  if (!(w.t_a < w.t_b) || w.t_a < t.front() - slack || w.t_b > t.back() + slack)
    throw WindowOutOfRange("window [" + std::to_string(w.t_a) + ", " + std::to_string(w.t_b) +
                           "] outside series [" + std::to_string(t.front()) + ", " +
                           std::to_string(t.back()) + "]");
  const auto lo = std::lower_bound(t.begin(), t.end(), w.t_a - slack);
  const auto hi = std::upper_bound(t.begin(), t.end(), w.t_b + slack);
  if (lo >= hi) throw WindowOutOfRange("window contains no samples");
  return {static_cast<std::size_t>(lo - t.begin()), static_cast<std::size_t>(hi - t.begin()) - 1};
}

inline double total_variation(std::span<const double> x) {
  double tv = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) tv += std::abs(x[i] - x[i - 1]);
  return tv;
}

/// Excess total variation of the derivative estimate over the true derivative.
inline double chattering_index(std::span<const double> x2, std::span<const double> dv0,
                               std::span<const double> t, Window w) {
  const auto [lo, hi] = window_indices(t, w);
  const std::size_t n = hi - lo + 1;
  return total_variation(x2.subspan(lo, n)) - total_variation(dv0.subspan(lo, n));
}

inline double sup_abs(std::span<const double> e, std::span<const double> t, Window w) {
  const auto [lo, hi] = window_indices(t, w);
  double m = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) m = std::max(m, std::abs(e[i]));
  return m;
}

/// Number of strict sign changes in a series; zeros are skipped.
inline std::size_t sign_flips(std::span<const double> u) {
  std::size_t flips = 0;
  double prev = 0.0;
  for (double v : u) {
    if (v == 0.0) continue;
    if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++flips;
    prev = v;
  }
  return flips;
}

/// sqrt(|e1|^(alpha+1) + e1^2 + e2^2).
inline double zeta_norm(double e1, double e2, double alpha) {
  return std::sqrt(std::pow(std::abs(e1), alpha + 1.0) + e1 * e1 + e2 * e2);
}

struct MetricsConfig {
  std::optional<Window> steady;    // default: final 20% of the run
  std::optional<Window> chatter;   // default: the steady window
  double settle_tol_e1 = 1e-3;
  double settle_tol_e2 = 1e-2;

  friend bool operator==(const MetricsConfig&, const MetricsConfig&) = default;
};

inline Window default_steady_window(const TimeSeries& ts) {
  const double t0 = ts.t.front(), t1 = ts.t.back();
  return {t1 - 0.2 * (t1 - t0), t1};
}

struct RunReport {
  std::string scenario;
  std::string family;
  std::optional<double> settling_time_e1;
  std::optional<double> settling_time_e2;
  double steady_e1_sup = 0.0;
  double steady_e2_sup = 0.0;
  std::optional<double> steady_zeta_sup;  // hybrid families only
  double chattering_index = 0.0;
  double peak_x2 = 0.0;
  std::optional<double> bound_theorem1;
  std::optional<double> bound_theorem2;
  std::optional<double> bound_linear;  // tau sigma1 L2 / lambda
  std::string flags;                   // e.g. FAILED-HYPOTHESIS(theorem2)
  std::string status = "ok";
};

/// Trajectory metrics; bounds are attached separately.
inline RunReport measure(const TimeSeries& ts, const MetricsConfig& cfg,
                         std::optional<double> zeta_alpha = std::nullopt) {
  RunReport r;
  const ErrorSeries e = error_series(ts);
  const Window steady = cfg.steady.value_or(default_steady_window(ts));
  const Window chatter = cfg.chatter.value_or(steady);
  r.settling_time_e1 = settling_time(e.e1, ts.t, cfg.settle_tol_e1);
  r.settling_time_e2 = settling_time(e.e2, ts.t, cfg.settle_tol_e2);
  r.steady_e1_sup = sup_abs(e.e1, ts.t, steady);
  r.steady_e2_sup = sup_abs(e.e2, ts.t, steady);
  r.chattering_index = chattering_index(ts.x2, ts.dv0, ts.t, chatter);
  for (double v : ts.x2) r.peak_x2 = std::max(r.peak_x2, std::abs(v));
  if (zeta_alpha) {
    const auto [lo, hi] = window_indices(ts.t, steady);
    double m = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) m = std::max(m, zeta_norm(e.e1[i], e.e2[i], *zeta_alpha));
    r.steady_zeta_sup = m;
  }
  return r;
}

inline void add_flag(RunReport& r, const std::string& flag) {
  std::size_t pos = 0;
  while (pos <= r.flags.size()) {
    const std::size_t end = std::min(r.flags.find(';', pos), r.flags.size());
    if (r.flags.compare(pos, end - pos, flag) == 0 && end - pos == flag.size()) return;
    pos = end + 1;
  }
  if (!r.flags.empty()) r.flags += ';';
  r.flags += flag;
}

/// Attaches the applicable analytic bounds for the final parameter block.
inline void attach_bounds(RunReport& r, FamilyKind kind, const FamilyParams& params, double L2,
                          double eps) {
  if (uses_hybrid_params(kind)) {
    const auto& p = std::get<HybridParams>(params);
    if (kind == FamilyKind::nonlinear) return;  // Omega2 vanishes with k2 = 0
    const CertificateEigen ev = certificate_eigen(build_hybrid_matrices(p));
    if (!ev.positive()) add_flag(r, "FAILED-HYPOTHESIS(certificate)");
    try {
      const double ratio = theorem1_ratio(p, L2);
      r.bound_theorem1 = theorem1_bound_from_ratio(ratio, p.alpha);
      if (ratio >= 1.0) add_flag(r, "FAILED-HYPOTHESIS(theorem1)");
    } catch (const NonPositiveLambdaMin&) {
      add_flag(r, "FAILED-HYPOTHESIS(theorem1)");
    }
    try {
      r.bound_theorem2 = noise_bound_theorem2(p, L2, eps);
    } catch (const HypothesisViolated&) {
      add_flag(r, "FAILED-HYPOTHESIS(theorem2)");
    }
  } else if (kind == FamilyKind::linear) {
    r.bound_linear = linear_decay(std::get<LinearParams>(params)).steady_bound(L2);
  }
}

/// Ordinary least-squares slope of y on x.
inline double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

struct ScalingFit {
  double exponent_e1 = 0.0;
  double exponent_e2 = 0.0;
  std::vector<double> eps;
  std::vector<double> sup_e1;
  std::vector<double> sup_e2;
};

/// Steady sup errors, maximised over `noise_omegas` when non-empty.
inline std::pair<double, double> steady_sup_envelope(FamilyKind kind, const ParamSchedule& schedule,
                                                     const SignalSpec& signal, const NoiseSpec& noise,
                                                     const SimConfig& sim, std::optional<Window> steady,
                                                     std::span<const double> noise_omegas = {}) {
  auto one = [&](const NoiseSpec& n) {
    const TimeSeries ts = simulate(kind, schedule, signal, n, sim);
    const Window w = steady.value_or(default_steady_window(ts));
    const ErrorSeries e = error_series(ts);
    return std::pair{sup_abs(e.e1, ts.t, w), sup_abs(e.e2, ts.t, w)};
  };
  if (noise_omegas.empty()) return one(noise);
  std::pair<double, double> worst{0.0, 0.0};
  for (double w : noise_omegas) {
    NoiseSpec n = noise;
    n.noise_omega = w;
    const auto [s1, s2] = one(n);
    worst.first = std::max(worst.first, s1);
    worst.second = std::max(worst.second, s2);
  }
  return worst;
}

/// Fits log(steady sup error) against log(eps) over a noise-amplitude grid.
/// `noise` supplies kind, frequency and seed; its epsilon is replaced per point.
/// With `noise_omegas`, each point takes the worst case over those frequencies.
inline ScalingFit accuracy_scaling(FamilyKind kind, const ParamSchedule& schedule,
                                   const SignalSpec& signal, const NoiseSpec& noise,
                                   const SimConfig& sim, std::span<const double> eps_grid,
                                   std::optional<Window> steady = std::nullopt,
                                   std::span<const double> noise_omegas = {}) {
  if (eps_grid.size() < 4) throw std::invalid_argument("accuracy_scaling: need >= 4 grid points");
  if (noise.kind == NoiseKind::none)
    throw std::invalid_argument("accuracy_scaling: noise-free sweep has no scaling");
  double lo = eps_grid.front(), hi = eps_grid.front();
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw std::invalid_argument("accuracy_scaling: eps must be > 0");
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (hi < 10.0 * lo * (1.0 - 1e-12))
    throw std::invalid_argument("accuracy_scaling: grid must span at least one decade");

  ScalingFit fit;
  std::vector<double> lx, l1, l2;
  for (double eps : eps_grid) {
    NoiseSpec n = noise;
    n.epsilon = eps;
    const auto [s1, s2] = steady_sup_envelope(kind, schedule, signal, n, sim, steady, noise_omegas);
    fit.eps.push_back(eps);
    fit.sup_e1.push_back(s1);
    fit.sup_e2.push_back(s2);
    lx.push_back(std::log(eps));
    l1.push_back(std::log(fit.sup_e1.back()));
    l2.push_back(std::log(fit.sup_e2.back()));
  }
  fit.exponent_e1 = least_squares_slope(lx, l1);
  fit.exponent_e2 = least_squares_slope(lx, l2);
  return fit;
}

}  // namespace hybdiff
