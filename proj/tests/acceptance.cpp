// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hybdiff/hybdiff.hpp"

using namespace hybdiff;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario bundled(const std::string& name) {
  return load_scenario(std::string(HYBDIFF_SCENARIO_DIR) + "/" + name + ".toml");
}

const HybridParams kFinal{1, 1, 8, 8, 0.2};

SignalSpec zero_signal() {
  SignalSpec s;
  s.kind = SignalKind::constant;
  s.offset = 0.0;
  return s;
}

ParamSchedule scheduled_hybrid() {
  return {{0.0, HybridParams{1, 7, 8, 25, 0.2}}, {1.0, kFinal}};
}

double window_sup(const std::vector<double>& x, const std::vector<double>& t, double ta, double tb) {
  return sup_abs(x, t, Window{ta, tb});
}

Outcome describing_gain_anchors() {
  const auto t0 = std::chrono::steady_clock::now();
  const double c = describing_gain(0.5);
  const double beta = std::tgamma(1.25) * std::tgamma(0.5) / std::tgamma(1.75);
  const double oracle = 2.0 / std::numbers::pi * beta;
  const double c1 = describing_gain(1.0), c0 = describing_gain(0.0);
  const double secs = elapsed_since(t0);
  const bool ok = c > 1.0 && c < 4.0 / std::numbers::pi && std::abs(c - oracle) <= 1e-8 &&
                  std::abs(c - 1.11280) < 1e-4 && std::abs(c1 - 1.0) <= 1e-10 &&
                  std::abs(c0 - 4.0 / std::numbers::pi) <= 1e-10 && secs < 1.0;
  return {ok, fmt("c(0.5)=%.12f oracle=%.12f |diff|=%.2e c(1)-1=%.2e c(0)-4/pi=%.2e", c, oracle,
                  std::abs(c - oracle), c1 - 1.0, c0 - 4.0 / std::numbers::pi)};
}

Outcome first_order_closed_forms() {
  const auto t0 = std::chrono::steady_clock::now();
  const double dt = 1e-4;
  const auto power = simulate_first_order(FirstOrderKind::power, 1.0, dt, 3.0, Method::rk4);
  const auto st = settling_time(power.x, power.t, 1e-6);
  const bool power_ok = st && std::abs(*st - 1.0) <= 2.0 * dt + 1e-12;

  const auto lin = simulate_first_order(FirstOrderKind::linear, 1.0, dt, 3.0, Method::rk4);
  double lin_err = 0.0;
  for (std::size_t i = 0; i < lin.t.size(); ++i) lin_err = std::max(lin_err, std::abs(lin.x[i] - std::exp(-2.0 * lin.t[i])));
  const bool lin_ok = lin_err <= 1e-8;

  auto final_second_flips = [&](Method m) {
    const auto smc = simulate_first_order(FirstOrderKind::smc, 1.0, dt, 3.0, m);
    const auto first = std::lower_bound(smc.t.begin(), smc.t.end(), 2.0 - 1e-9) - smc.t.begin();
    return sign_flips(std::span(smc.u).subspan(static_cast<std::size_t>(first)));
  };
  // RK4 stage slopes cancel near x = 0 and freeze the switching system, so
  // chattering is asserted under Euler.
  const std::size_t flips = final_second_flips(Method::euler);
  const std::size_t flips_rk4 = final_second_flips(Method::rk4);
  const bool smc_ok = flips >= 100;
  const double secs = elapsed_since(t0);

  return {power_ok && lin_ok && smc_ok && secs < 5.0,
          fmt("power settles(|x|<=1e-6) at t=%s (target 1 +/- %.0e); linear max|x-e^-2t|=%.2e; smc sign flips "
              "in final 1 s=%zu euler (rk4, informational: %zu)",
              st ? fmt_num(*st).c_str() : "never", 2.0 * dt, lin_err, flips, flips_rk4)};
}

Outcome hybrid_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  SignalSpec sig;  // 2 sin t
  const auto ts = simulate(FamilyKind::hybrid, scheduled_hybrid(), sig, NoiseSpec{},
                           SimConfig{1e-4, 10.0, Method::rk4, {}});
  const auto e = error_series(ts);
  const double s1 = window_sup(e.e1, ts.t, 8.0, 10.0);
  const double s2 = window_sup(e.e2, ts.t, 8.0, 10.0);
  const auto st = settling_time(e.e2, ts.t, 1e-2);
  const double secs = elapsed_since(t0);
  const bool ok = s1 <= 1e-3 && s2 <= 1e-2 && st && *st <= 3.0 && secs < 10.0;
  return {ok, fmt("steady sup|e1|=%.3e (<=1e-3) sup|e2|=%.3e (<=1e-2) settling_time(e2,1e-2)=%s (<=3)", s1, s2,
                  st ? fmt_num(*st).c_str() : "never")};
}

Outcome chattering_separation() {
  SignalSpec sig;
  const Window w{8.0, 10.0};
  auto index = [&](FamilyKind kind, const ParamSchedule& p, Method m, double dt) {
    const auto ts = simulate(kind, p, sig, NoiseSpec{}, SimConfig{dt, 10.0, m, {}});
    return chattering_index(ts.x2, ts.dv0, ts.t, w);
  };
  const ParamSchedule levant{{0.0, LevantParams{28, 6}}};
  const ParamSchedule hybrid = scheduled_hybrid();
  // The switching term chatters only under a one-stage discretization; the
  // explicit Euler step is used for the asserted comparison.
  const double lev4 = index(FamilyKind::levant, levant, Method::euler, 1e-4);
  const double hyb4 = index(FamilyKind::hybrid, hybrid, Method::euler, 1e-4);
  const double lev5 = index(FamilyKind::levant, levant, Method::euler, 1e-5);
  const double hyb5 = index(FamilyKind::hybrid, hybrid, Method::euler, 1e-5);
  const double lev_rk = index(FamilyKind::levant, levant, Method::rk4, 1e-4);
  const double hyb_rk = index(FamilyKind::hybrid, hybrid, Method::rk4, 1e-4);
  const bool ok = lev4 >= 5.0 * hyb4 && lev5 >= 5.0 * hyb5;
  return {ok, fmt("euler dt=1e-4: levant=%.4g hybrid=%.4g; euler dt=1e-5: levant=%.4g hybrid=%.4g; "
                  "rk4 dt=1e-4 (informational): levant=%.4g hybrid=%.4g",
                  lev4, hyb4, lev5, hyb5, lev_rk, hyb_rk)};
}

Outcome lyapunov_decrease() {
  const double dt = 1e-4;
  const auto ts = simulate(FamilyKind::hybrid, kFinal, zero_signal(), NoiseSpec{},
                           SimConfig{dt, 10.0, Method::rk4, {1.0, 0.0}});
  const auto c = build_hybrid_matrices(kFinal);
  const double rate = lambda_min_sym(c.Omega2) / lambda_max_sym(c.Pi);
  std::vector<double> V(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) V[i] = lyapunov_V(kFinal, ts.x1[i], ts.x2[i]);
  std::size_t increases = 0, decay_ok = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < V.size(); ++i) {
    const double dv = V[i + 1] - V[i];
    if (dv > 1e-9 * V[0]) ++increases;
    worst = std::max(worst, dv);
    if (dv / dt <= -rate * V[i] + 1e-6) ++decay_ok;
  }
  const double frac = static_cast<double>(decay_ok) / static_cast<double>(V.size() - 1);
  return {increases == 0 && frac >= 0.99,
          fmt("V(0)=%.6g V(10)=%.3e; steps with increase >1e-9 V(0): %zu (max step change %.2e); "
              "rate lambda_min(Omega2)/lambda_max(Pi)=%.4g satisfied at %.2f%% of steps",
              V[0], V.back(), increases, worst, rate, 100.0 * frac)};
}

Outcome certificate_positivity() {
  std::string detail;
  bool ok = true;
  auto check = [&](const char* label, const HybridParams& p) {
    const auto ev = certificate_eigen(build_hybrid_matrices(p));
    ok = ok && ev.positive();
    detail += fmt("%s: min eig Pi=%.4g Omega1=%.4g Omega2=%.4g; ", label, ev.pi_min, ev.omega1_min, ev.omega2_min);
  };
  check("scheduled t<=1 (1,7,8,25)", HybridParams{1, 7, 8, 25, 0.2});
  check("scheduled t>1 (1,1,8,8)", kFinal);
  check("second example system (6,10,9,20)", HybridParams{6, 10, 9, 20, 0.2});
  const auto so = build_second_order_certificate(6, 9, 0.2);
  const double pmin = lambda_min_sym(so.P), qmin = lambda_min_sym(so.Q);
  ok = ok && pmin > 0.0 && qmin > 0.0;
  detail += fmt("second-order k1=6 k2=9: min eig P=%.4g Q=%.4g", pmin, qmin);
  return {ok, detail};
}

Outcome tau_scaling() {
  const std::vector<double> taus{0.2, 0.1, 0.05};
  std::vector<double> sup;
  for (double tau : taus) {
    const auto ts = simulate(FamilyKind::linear, LinearParams{2, 1, tau}, SignalSpec{}, NoiseSpec{},
                             SimConfig{1e-4, 10.0, Method::rk4, {}});
    const auto e = error_series(ts);
    sup.push_back(window_sup(e.e2, ts.t, 8.0, 10.0));
  }
  const double r1 = sup[1] / sup[0], r2 = sup[2] / sup[1];
  const bool ok = r1 >= 0.35 && r1 <= 0.65 && r2 >= 0.35 && r2 <= 0.65;
  return {ok, fmt("steady sup|e2| = %.4g, %.4g, %.4g; ratios %.4f, %.4f (target [0.35, 0.65])", sup[0], sup[1],
                  sup[2], r1, r2)};
}

Outcome frequency_response() {
  const LinearParams p{2, 1, 0.1};
  const double wn = linearize_linear(p).omega_n;
  std::string detail = fmt("omega_n=%g; ", wn);
  bool probes_ok = true;
  for (double k : {0.1, 1.0, 10.0}) {
    const double w = k * wn;
    const double period = 2.0 * std::numbers::pi / w;
    const double t_end = 3.0 + 2.0 * period;
    SignalSpec sig;
    sig.amplitude = 1.0;
    sig.omega = w;
    const auto ts = simulate(FamilyKind::linear, p, sig, NoiseSpec{}, SimConfig{1e-5, t_end, Method::rk4, {}});
    const double t1 = ts.t.back();
    const double a1 = window_sup(ts.x1, ts.t, t1 - 2.0 * period, t1);
    const double a2 = window_sup(ts.x2, ts.t, t1 - 2.0 * period, t1);
    const auto r = linear_freq_response(p, w);
    const double d1 = a1 / r.mag_track - 1.0, d2 = a2 / r.mag_deriv - 1.0;
    probes_ok = probes_ok && std::abs(d1) <= 0.02 && std::abs(d2) <= 0.02;
    detail += fmt("w=%gwn track %.4f vs %.4f (%+.2f%%) deriv %.4f vs %.4f (%+.2f%%); ", k, a1, r.mag_track,
                  100 * d1, a2, r.mag_deriv, 100 * d2);
  }
  const auto lo = linear_freq_response(p, 10.0 * wn), hi = linear_freq_response(p, 100.0 * wn);
  const double slope_track = hi.L_track_dB - lo.L_track_dB;
  const double slope_deriv = hi.L_deriv_dB - lo.L_deriv_dB;
  const bool track_ok = std::abs(slope_track + 40.0) <= 1.0;
  const bool deriv_ok = std::abs(slope_deriv + 20.0) <= 1.0;
  detail += fmt("slope over [10wn,100wn]: tracking %.3f dB/dec (target -40 +/- 1), derivative %.3f dB/dec "
                "(target -20 +/- 1)",
                slope_track, slope_deriv);
  return {probes_ok && track_ok && deriv_ok, detail};
}

Outcome accuracy_exponents() {
  const Scenario sc = bundled("accuracy_sweep");
  const auto& f = sc.families.front();
  std::vector<double> eps;
  for (int i = 0; i < 5; ++i) eps.push_back(1e-3 * std::pow(10.0, 0.5 * i));
  const auto fit = accuracy_scaling(f.kind, f.schedule, sc.signal, sc.noise, sc.sim, eps, sc.metrics.steady,
                                    sc.worst_case_omegas);
  const bool ok = fit.exponent_e2 >= 0.3 && fit.exponent_e2 <= 0.7 && fit.exponent_e1 >= 0.8 &&
                  fit.exponent_e1 <= 1.2;
  std::string sups;
  for (std::size_t i = 0; i < eps.size(); ++i)
    sups += fmt("(%.0e: %.3g, %.3g) ", eps[i], fit.sup_e1[i], fit.sup_e2[i]);
  return {ok, fmt("exponent e1=%.3f (target [0.8,1.2]) e2=%.3f (target [0.3,0.7]); worst-case sups over %zu noise "
                  "frequencies %s",
                  fit.exponent_e1, fit.exponent_e2, sc.worst_case_omegas.size(), sups.c_str())};
}

Outcome noise_bound_consistency() {
  const Scenario sc = bundled("hybrid_noisy");
  const auto run = run_family(sc, sc.families.front());
  const auto& r = run.report;
  const double measured = r.steady_zeta_sup.value_or(-1.0);
  const bool flagged = r.flags.find("FAILED-HYPOTHESIS(theorem2)") != std::string::npos;
  if (flagged) {
    const auto t = noise_bound_terms(kFinal, second_derivative_bound(sc.signal), sc.noise.epsilon);
    return {true, fmt("hypotheses fail (denominator1=%.4g, denominator2=%.4g); report flags '%s'; measured steady "
                      "|zeta|=%.4g (informational, not asserted)",
                      t.denom1, t.denom2, r.flags.c_str(), measured)};
  }
  if (!r.bound_theorem2) return {false, "no bound and no FAILED-HYPOTHESIS flag"};
  return {measured <= *r.bound_theorem2,
          fmt("measured steady |zeta|=%.4g bound=%.4g", measured, *r.bound_theorem2)};
}

Outcome gred_blend() {
  const double w0 = gred_weight(0.5, 1.0, 0.05);
  const double w1 = gred_weight(0.97, 1.0, 0.05);
  const double w2 = gred_weight(2.0, 1.0, 0.05);
  const double w1_oracle = (0.97 - 1.0 + 0.05) / 0.05;
  const bool probes_ok = w0 == 0.0 && w1 == w1_oracle && std::abs(w1 - 0.4) < 1e-12 && w2 == 1.0;

  const Scenario sc = bundled("gred_noisy");
  const auto& f = sc.families.front();
  const auto ts = simulate(f.kind, f.schedule, sc.signal, sc.noise, sc.sim);
  const auto& x11 = ts.find_aux("x11")->values;
  const auto& x12 = ts.find_aux("x12")->values;
  const auto& x21 = ts.find_aux("x21")->values;
  const auto& x22 = ts.find_aux("x22")->values;
  std::size_t outside = 0;
  auto inside = [](double y, double a, double b) {
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(a), std::abs(b), 1.0});
    return y >= std::min(a, b) - slack && y <= std::max(a, b) + slack;
  };
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (!inside(ts.x1[i], x11[i], x21[i]) || !inside(ts.x2[i], x12[i], x22[i])) ++outside;
  return {probes_ok && outside == 0,
          fmt("w(0.5)=%g w(0.97)=%.15g w(2)=%g; steps outside the convex hull: %zu of %zu", w0, w1, w2, outside,
              ts.size())};
}

}  // namespace

int main() {
  criterion(1, "describing gain anchors", describing_gain_anchors);
  criterion(2, "first-order closed forms", first_order_closed_forms);
  criterion(3, "hybrid convergence with scheduled gains", hybrid_convergence);
  criterion(4, "chattering separation", chattering_separation);
  criterion(5, "Lyapunov decrease", lyapunov_decrease);
  criterion(6, "certificate positivity", certificate_positivity);
  criterion(7, "linear tau scaling", tau_scaling);
  criterion(8, "linear frequency response", frequency_response);
  criterion(9, "accuracy exponents", accuracy_exponents);
  criterion(10, "noise bound consistency", noise_bound_consistency);
  criterion(11, "blend weights and convexity", gred_blend);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
