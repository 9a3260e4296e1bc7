#pragma once

// Command implementations behind the hybdiff executable. Each command takes
// a parsed Scenario and returns a process exit code; argument parsing lives
// in tools/hybdiff.cpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hybdiff/analysis.hpp"
#include "hybdiff/integrator.hpp"
#include "hybdiff/metrics.hpp"
#include "hybdiff/report.hpp"
#include "hybdiff/scenario.hpp"

namespace hybdiff {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 2;
inline constexpr int non_finite = 3;
inline constexpr int io = 4;
inline constexpr int failed_hypothesis = 5;
}  // namespace exit_code

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  std::optional<double> dt_override;
  ReportFormat format = ReportFormat::kv;
  std::optional<FamilyKind> family;
  bool strict = false;  // certify: any flag exits 5
};

/// Applies overrides and the family selector, then revalidates.
inline Scenario prepare(Scenario sc, const CommandOptions& opt) {
  if (opt.seed_override) sc.noise.seed = *opt.seed_override;
  if (opt.dt_override) sc.sim.dt = *opt.dt_override;
  if (opt.family) {
    std::erase_if(sc.families, [&](const FamilyEntry& f) { return f.kind != *opt.family; });
    if (sc.families.empty())
      throw ConfigError(0, "family", "no family of kind '" + std::string(to_string(*opt.family)) + "'");
  }
  validate(sc);
  return sc;
}

/// Hypothesis checks that gate a simulation; returns human-readable warnings.
inline std::vector<std::string> gate_warnings(const FamilyEntry& f, double L2) {
  std::vector<std::string> out;
  for (const auto& e : f.schedule) {
    const std::string at = " for the block starting at t=" + fmt_num(e.t);
    if (f.kind == FamilyKind::hybrid || f.kind == FamilyKind::hybrid_discontinuous) {
      const auto ev = certificate_eigen(build_hybrid_matrices(std::get<HybridParams>(e.params)));
      if (!ev.positive())
        out.push_back("certificate: lambda_min(Pi)=" + fmt_num(ev.pi_min) + ", lambda_min(Omega1)=" +
                      fmt_num(ev.omega1_min) + ", lambda_min(Omega2)=" + fmt_num(ev.omega2_min) + at);
    }
    const LevantParams* lev = std::get_if<LevantParams>(&e.params);
    if (const auto* g = std::get_if<GredParams>(&e.params)) lev = &g->levant;
    if (lev && !(lev->lambda1 > L2))
      out.push_back("levant-gain: lambda1=" + fmt_num(lev->lambda1) + " does not exceed L2=" + fmt_num(L2) + at);
  }
  return out;
}

struct FamilyRun {
  TimeSeries series;
  RunReport report;
};

/// Simulates one family and measures it; throws NonFiniteState.
inline FamilyRun run_family(const Scenario& sc, const FamilyEntry& f) {
  FamilyRun run;
  run.series = simulate(f.kind, f.schedule, sc.signal, sc.noise, sc.sim);
  const FamilyParams& last = f.schedule.back().params;
  std::optional<double> alpha;
  if (uses_hybrid_params(f.kind)) alpha = std::get<HybridParams>(last).alpha;
  run.report = measure(run.series, sc.metrics, alpha);
  run.report.scenario = sc.name;
  run.report.family = f.name;
  if (!sc.worst_case_omegas.empty()) {
    const auto [s1, s2] = steady_sup_envelope(f.kind, f.schedule, sc.signal, sc.noise, sc.sim,
                                              sc.metrics.steady, sc.worst_case_omegas);
    run.report.steady_e1_sup = s1;
    run.report.steady_e2_sup = s2;
  }
  const double L2 = second_derivative_bound(sc.signal);
  for (const auto& w : gate_warnings(f, L2))
    add_flag(run.report, "FAILED-HYPOTHESIS(" + w.substr(0, w.find(':')) + ")");
  attach_bounds(run.report, f.kind, last, L2, sc.noise.epsilon);
  return run;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string());
  out << content;
  out.close();
  if (!out) throw IoError(path.string());
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError(dir.string());
}

struct SystemReport {
  std::string name;
  std::optional<double> settling_time;  // |x| <= metrics.settle_tol_e1
  std::size_t sign_flips_final_1s = 0;  // sign changes of u over the last second
};

inline SystemReport measure_system(const Scenario& sc, const FirstOrderEntry& sys, const ScalarSeries& s) {
  SystemReport r{sys.name, settling_time(s.x, s.t, sc.metrics.settle_tol_e1), 0};
  const double t1 = s.t.back();
  const auto first = std::lower_bound(s.t.begin(), s.t.end(), t1 - 1.0 - 1e-9) - s.t.begin();
  r.sign_flips_final_1s = sign_flips(std::span(s.u).subspan(static_cast<std::size_t>(first)));
  return r;
}

inline void write_system_csv(std::ostream& out, const ScalarSeries& s) {
  out << "t,x,u\n";
  for (std::size_t i = 0; i < s.t.size(); ++i)
    out << fmt_num(s.t[i]) << ',' << fmt_num(s.x[i]) << ',' << fmt_num(s.u[i]) << '\n';
}

inline std::string system_report_kv(const std::string& scenario, const SystemReport& r) {
  return "scenario=" + scenario + "\nsystem=" + r.name + "\nsettling_time=" + fmt_opt(r.settling_time) +
         "\nsign_flips_final_1s=" + std::to_string(r.sign_flips_final_1s) + "\n";
}

inline std::string report_extension(ReportFormat f) { return f == ReportFormat::kv ? ".txt" : ".csv"; }

/// One series CSV and one report per family, plus `<scenario>_comparison.csv`.
inline int cmd_run(const Scenario& sc, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  ensure_dir(opt.out_dir);
  const double L2 = second_derivative_bound(sc.signal);
  std::vector<RunReport> reports;
  for (const auto& f : sc.families) {
    for (const auto& w : gate_warnings(f, L2)) err << "warning: " << f.name << ": " << w << '\n';
    FamilyRun run;
    try {
      run = run_family(sc, f);
    } catch (const NonFiniteState& e) {
      err << "error: " << f.name << ": " << e.what() << '\n';
      return exit_code::non_finite;
    }
    const std::string stem = sc.name + "_" + f.name;
    std::ostringstream csv, rep;
    write_series_csv(csv, run.series);
    write_report(rep, run.report, opt.format);
    write_file(opt.out_dir / (stem + ".csv"), csv.str());
    write_file(opt.out_dir / (stem + "_report" + report_extension(opt.format)), rep.str());
    reports.push_back(std::move(run.report));
  }
  std::vector<std::string> system_reports;
  for (const auto& sys : sc.systems) {
    ScalarSeries s;
    try {
      s = simulate_first_order(sys.kind, sys.x0, sc.sim.dt, sc.sim.t_end, sys.method.value_or(sc.sim.method));
    } catch (const NonFiniteState& e) {
      err << "error: " << sys.name << ": " << e.what() << '\n';
      return exit_code::non_finite;
    }
    std::ostringstream csv;
    write_system_csv(csv, s);
    const std::string stem = sc.name + "_" + sys.name;
    system_reports.push_back(system_report_kv(sc.name, measure_system(sc, sys, s)));
    write_file(opt.out_dir / (stem + ".csv"), csv.str());
    write_file(opt.out_dir / (stem + "_report.txt"), system_reports.back());
  }
  if (!reports.empty()) {
    std::ostringstream table;
    table << kNoiseNote << '\n';
    write_report_csv_header(table);
    for (const auto& r : reports) write_report_csv_row(table, r);
    write_file(opt.out_dir / (sc.name + "_comparison.csv"), table.str());
    if (opt.format == ReportFormat::csv) {
      out << table.str();
    } else {
      for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i) out << '\n';
        write_report_kv(out, reports[i]);
      }
    }
  }
  for (const auto& r : system_reports) out << (reports.empty() && &r == &system_reports.front() ? "" : "\n") << r;
  return exit_code::ok;
}

namespace detail {

template <std::size_t N>
void print_matrix(std::ostream& out, const char* name, const Mat<N>& m) {
  out << name << " = [";
  for (std::size_t i = 0; i < N; ++i) {
    out << (i ? ", [" : "[");
    for (std::size_t j = 0; j < N; ++j) out << (j ? ", " : "") << fmt_num(m[i][j]);
    out << ']';
  }
  out << "]\n";
}

inline void print_vec(std::ostream& out, const char* name, const Vec3& v) {
  out << name << " = [" << fmt_num(v[0]) << ", " << fmt_num(v[1]) << ", " << fmt_num(v[2]) << "]\n";
}

inline const std::vector<double>& certify_amplitudes() {
  static const std::vector<double> a{0.01, 0.1, 1.0, 10.0};
  return a;
}

struct CertifyTally {
  bool gate_failed = false;
  bool any_flag = false;
};

inline void certify_hybrid(std::ostream& out, FamilyKind kind, const HybridParams& p, double L2,
                           double eps, CertifyTally& tally) {
  out << "k1=" << fmt_num(p.k1) << " k2=" << fmt_num(p.k2) << " k3=" << fmt_num(p.k3)
      << " k4=" << fmt_num(p.k4) << " alpha=" << fmt_num(p.alpha) << '\n';
  if (kind == FamilyKind::nonlinear) {
    const auto c = build_second_order_certificate(p.k1, p.k3, p.alpha);
    print_matrix(out, "P", c.P);
    print_matrix(out, "Q", c.Q);
    const double pmin = lambda_min_sym(c.P), qmin = lambda_min_sym(c.Q);
    out << "lambda_min(P) = " << fmt_num(pmin) << "\nlambda_min(Q) = " << fmt_num(qmin)
        << "\ntheta = " << fmt_num(c.theta) << '\n';
    const bool ok = pmin > 0.0 && qmin > 0.0 && c.theta_in_unit_interval;
    out << "certificate = " << (ok ? "positive" : "FAILED-HYPOTHESIS(certificate)") << '\n';
    if (!ok) tally.gate_failed = tally.any_flag = true;
  } else {
    const auto c = build_hybrid_matrices(p);
    print_matrix(out, "Pi", c.Pi);
    print_matrix(out, "Omega1", c.Omega1);
    print_matrix(out, "Omega2", c.Omega2);
    print_vec(out, "Gamma1", c.Gamma1);
    print_vec(out, "Gamma2", c.Gamma2);
    const auto ev = certificate_eigen(c);
    out << "lambda_min(Pi) = " << fmt_num(ev.pi_min) << "\nlambda_max(Pi) = " << fmt_num(ev.pi_max)
        << "\nlambda_min(Omega1) = " << fmt_num(ev.omega1_min)
        << "\nlambda_min(Omega2) = " << fmt_num(ev.omega2_min) << '\n';
    out << "certificate = " << (ev.positive() ? "positive" : "FAILED-HYPOTHESIS(certificate)") << '\n';
    if (!ev.positive()) tally.gate_failed = tally.any_flag = true;
    if (p.alpha > 0.0) {
      const auto so = build_second_order_certificate(p.k1, p.k3, p.alpha);
      out << "theta = " << fmt_num(so.theta) << '\n';
    }
    out << "L2 = " << fmt_num(L2) << '\n';
    try {
      const double ratio = theorem1_ratio(p, L2);
      out << "bound_theorem1 = " << fmt_num(theorem1_bound_from_ratio(ratio, p.alpha));
      if (ratio >= 1.0) {
        out << " FAILED-HYPOTHESIS(theorem1): L2*|Gamma1|/lambda_min(Omega1) = " << fmt_num(ratio) << " >= 1";
        tally.any_flag = true;
      }
      out << '\n';
    } catch (const NonPositiveLambdaMin& e) {
      out << "bound_theorem1 = none FAILED-HYPOTHESIS(theorem1): " << e.what() << '\n';
      tally.any_flag = true;
    }
    out << "epsilon = " << fmt_num(eps) << '\n';
    const auto terms = noise_bound_terms(p, L2, eps);
    out << "psi1 = " << fmt_num(terms.psi1) << "\npsi2 = " << fmt_num(terms.psi2)
        << "\ndenominator1 = " << fmt_num(terms.denom1) << "\ndenominator2 = " << fmt_num(terms.denom2)
        << '\n';
    try {
      out << "bound_theorem2 = " << fmt_num(noise_bound_theorem2(p, L2, eps)) << '\n';
    } catch (const HypothesisViolated& e) {
      out << "bound_theorem2 = none FAILED-HYPOTHESIS(theorem2): " << e.what() << '\n';
      tally.any_flag = true;
    }
  }
  out << "A,omega_n,zeta\n";
  for (double A : certify_amplitudes()) {
    const auto lin = linearize_hybrid(p, A);
    out << fmt_num(A) << ',' << fmt_num(lin.omega_n) << ',' << fmt_num(lin.zeta) << '\n';
  }
}

inline void certify_levant(std::ostream& out, const LevantParams& p, double L2, CertifyTally& tally) {
  out << "lambda1=" << fmt_num(p.lambda1) << " lambda2=" << fmt_num(p.lambda2) << '\n';
  const bool ok = p.lambda1 > L2;
  out << "lambda1 > L2 (" << fmt_num(L2) << ") = " << (ok ? "yes" : "no FAILED-HYPOTHESIS(levant-gain)") << '\n';
  if (!ok) tally.gate_failed = tally.any_flag = true;
  out << "A,omega_n,zeta\n";
  for (double A : certify_amplitudes()) {
    const auto lin = linearize_levant(p, A);
    out << fmt_num(A) << ',' << fmt_num(lin.omega_n) << ',' << fmt_num(lin.zeta) << '\n';
  }
}

inline void certify_linear(std::ostream& out, const LinearParams& p, double L2) {
  const auto d = linear_decay(p);
  const auto lin = linearize_linear(p);
  out << "a1=" << fmt_num(p.a1) << " a2=" << fmt_num(p.a2) << " tau=" << fmt_num(p.tau) << '\n';
  print_matrix(out, "A", d.A);
  out << "lambda = " << fmt_num(d.lambda) << " (time-normalized)\n"
      << "sigma1 = " << fmt_num(d.sigma1) << " (grid estimate, lower bound of the supremum)\n"
      << "bound_linear = " << fmt_num(d.steady_bound(L2)) << '\n'
      << "omega_n = " << fmt_num(lin.omega_n) << "\nzeta = " << fmt_num(lin.zeta) << '\n';
}

}  // namespace detail

/// Certificate, bound and linearization report for every schedule block.
inline int cmd_certify(const Scenario& sc, const CommandOptions& opt, std::ostream& out) {
  const double L2 = second_derivative_bound(sc.signal);
  detail::CertifyTally tally;
  out << "# certificate report: " << sc.name << '\n';
  for (const auto& f : sc.families) {
    for (std::size_t i = 0; i < f.schedule.size(); ++i) {
      const auto& e = f.schedule[i];
      out << "\n[" << f.name << " kind=" << to_string(f.kind) << " t>=" << fmt_num(e.t) << "]\n";
      if (uses_hybrid_params(f.kind)) {
        detail::certify_hybrid(out, f.kind, std::get<HybridParams>(e.params), L2, sc.noise.epsilon, tally);
      } else if (f.kind == FamilyKind::levant) {
        detail::certify_levant(out, std::get<LevantParams>(e.params), L2, tally);
      } else if (f.kind == FamilyKind::linear) {
        detail::certify_linear(out, std::get<LinearParams>(e.params), L2);
      } else {
        const auto& g = std::get<GredParams>(e.params);
        detail::certify_levant(out, g.levant, L2, tally);
        detail::certify_linear(out, g.linear, L2);
      }
    }
  }
  const bool fail = tally.gate_failed || (opt.strict && tally.any_flag);
  out << "\nresult = " << (fail ? "FAILED-HYPOTHESIS" : tally.any_flag ? "certified (bound hypotheses flagged)" : "certified")
      << '\n';
  return fail ? exit_code::failed_hypothesis : exit_code::ok;
}

struct FreqGrid {
  double omega_min = 0.1;
  double omega_max = 1000.0;
  std::size_t points = 41;
  std::vector<double> amplitudes{0.01, 0.1, 1.0, 10.0};
};

inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1));
  return v;
}

inline std::string freq_table(const LinearParams& p, const FreqGrid& g) {
  std::ostringstream o;
  const auto lin = linearize_linear(p);
  o << "# omega_n=" << fmt_num(lin.omega_n) << " zeta=" << fmt_num(lin.zeta) << '\n';
  o << "omega,mag_track,mag_deriv,L_track_dB,L_deriv_dB\n";
  for (double w : log_space(g.omega_min, g.omega_max, g.points)) {
    const auto r = linear_freq_response(p, w);
    o << fmt_num(w) << ',' << fmt_num(r.mag_track) << ',' << fmt_num(r.mag_deriv) << ','
      << fmt_num(r.L_track_dB) << ',' << fmt_num(r.L_deriv_dB) << '\n';
  }
  return o.str();
}

template <class Linearize>
std::string amplitude_table(const FreqGrid& g, Linearize&& lin) {
  std::ostringstream o;
  o << "A,omega_n,zeta\n";
  for (double A : g.amplitudes) {
    const LinearizationResult r = lin(A);
    o << fmt_num(A) << ',' << fmt_num(r.omega_n) << ',' << fmt_num(r.zeta) << '\n';
  }
  return o.str();
}

/// Frequency-response CSVs for linear gains, (A, omega_n, zeta) tables otherwise.
/// Uses each family's final parameter block.
inline int cmd_freq(const Scenario& sc, const FreqGrid& g, const CommandOptions& opt, std::ostream& out,
                    std::ostream& err) {
  if (g.points < 2 || g.amplitudes.size() < 2) {
    err << "error: frequency and amplitude grids need at least 2 points\n";
    return exit_code::validation;
  }
  if (!(g.omega_min > 0.0) || !(g.omega_max > g.omega_min)) {
    err << "error: need 0 < omega-min < omega-max\n";
    return exit_code::validation;
  }
  for (double A : g.amplitudes)
    if (!(A > 0.0)) {
      err << "error: amplitudes must be > 0\n";
      return exit_code::validation;
    }
  ensure_dir(opt.out_dir);
  for (const auto& f : sc.families) {
    const auto& params = f.schedule.back().params;
    const std::string stem = sc.name + "_" + f.name;
    auto emit = [&](const std::string& suffix, const std::string& body) {
      write_file(opt.out_dir / (stem + suffix), body);
      out << "# " << f.name << suffix << '\n' << body;
    };
    if (uses_hybrid_params(f.kind)) {
      const auto& p = std::get<HybridParams>(params);
      emit("_linearization.csv", amplitude_table(g, [&](double A) { return linearize_hybrid(p, A); }));
    } else if (f.kind == FamilyKind::levant) {
      const auto& p = std::get<LevantParams>(params);
      emit("_linearization.csv", amplitude_table(g, [&](double A) { return linearize_levant(p, A); }));
    } else if (f.kind == FamilyKind::linear) {
      emit("_freq.csv", freq_table(std::get<LinearParams>(params), g));
    } else {
      const auto& p = std::get<GredParams>(params);
      emit("_linearization.csv", amplitude_table(g, [&](double A) { return linearize_levant(p.levant, A); }));
      emit("_freq.csv", freq_table(p.linear, g));
    }
  }
  return exit_code::ok;
}

struct SweepRow {
  double value = 0.0;
  RunReport report;
};

/// Runs the scenario once per axis value, concurrently; rows follow `values`
/// order with one row per family. A failed run yields rows whose status says why.
inline std::vector<SweepRow> sweep(const Scenario& base, const std::string& axis, const std::vector<double>& values) {
  {
    Scenario probe = base;
    set_numeric(probe, axis, values.empty() ? 0.0 : values.front());
  }
  std::vector<std::future<std::vector<SweepRow>>> jobs;
  jobs.reserve(values.size());
  for (double v : values) {
    jobs.push_back(std::async(std::launch::async, [&base, &axis, v] {
      std::vector<SweepRow> rows;
      Scenario sc = base;
      set_numeric(sc, axis, v);
      std::string invalid;
      try {
        validate(sc);
      } catch (const ConfigError& e) {
        invalid = std::string("invalid: ") + e.what();
      }
      for (const auto& f : sc.families) {
        SweepRow row{v, {}};
        if (!invalid.empty()) {
          row.report.scenario = sc.name;
          row.report.family = f.name;
          row.report.status = invalid;
        } else {
          try {
            row.report = run_family(sc, f).report;
          } catch (const NonFiniteState& e) {
            row.report.scenario = sc.name;
            row.report.family = f.name;
            row.report.status = std::string("non-finite: ") + e.what();
          }
        }
        rows.push_back(std::move(row));
      }
      return rows;
    }));
  }
  std::vector<SweepRow> out;
  for (auto& j : jobs)
    for (auto& r : j.get()) out.push_back(std::move(r));
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string r = "\"";
  for (char c : s) r += c == '"' ? std::string("\"\"") : std::string(1, c);
  return r + "\"";
}

/// Writes `<scenario>_sweep.csv`; with >= 2 positive values a log-log slope
/// of each family's steady errors against the axis is appended as comments.
inline int cmd_sweep(const Scenario& sc, const std::string& axis, const std::vector<double>& values,
                     const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  if (values.empty()) {
    err << "error: sweep needs at least one value\n";
    return exit_code::validation;
  }
  const auto rows = sweep(sc, axis, values);
  std::ostringstream table;
  table << kNoiseNote << '\n';
  write_report_csv_header(table, "axis,value,");
  for (const auto& r : rows) {
    RunReport rep = r.report;
    rep.status = csv_escape(rep.status);
    write_report_csv_row(table, rep, axis + "," + fmt_num(r.value) + ",");
  }
  const bool positive = values.size() >= 2 && std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
  if (positive) {
    for (const auto& f : sc.families) {
      std::vector<double> lx, l1, l2;
      for (const auto& r : rows)
        if (r.report.family == f.name && r.report.status == "ok" && r.report.steady_e1_sup > 0.0 &&
            r.report.steady_e2_sup > 0.0) {
          lx.push_back(std::log(r.value));
          l1.push_back(std::log(r.report.steady_e1_sup));
          l2.push_back(std::log(r.report.steady_e2_sup));
        }
      if (lx.size() >= 2)
        table << "# slope " << f.name << " steady_e1_sup=" << fmt_num(least_squares_slope(lx, l1))
              << " steady_e2_sup=" << fmt_num(least_squares_slope(lx, l2)) << '\n';
    }
  }
  ensure_dir(opt.out_dir);
  write_file(opt.out_dir / (sc.name + "_sweep.csv"), table.str());
  out << table.str();
  return exit_code::ok;
}

}  // namespace hybdiff
