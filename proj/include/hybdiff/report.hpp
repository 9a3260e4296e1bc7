#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hybdiff/integrator.hpp"
#include "hybdiff/metrics.hpp"

namespace hybdiff {

enum class ReportFormat { csv, kv };

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_num(*v) : "none"; }

/// Columns t,x1,x2,v0,dv0,v_meas,e1,e2; errors are against the clean signal.
inline void write_series_csv(std::ostream& out, const TimeSeries& ts) {
  out << "t,x1,x2,v0,dv0,v_meas,e1,e2\n";
  std::string line;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    line.clear();
    for (double v : {ts.t[i], ts.x1[i], ts.x2[i], ts.v0[i], ts.dv0[i], ts.v_meas[i], ts.x1[i] - ts.v0[i],
                     ts.x2[i] - ts.dv0[i]}) {
      if (!line.empty()) line += ',';
      line += fmt_num(v);
    }
    out << line << '\n';
  }
}

inline std::vector<std::pair<std::string, std::string>> report_fields(const RunReport& r) {
  return {{"scenario", r.scenario},
          {"family", r.family},
          {"settling_time_e1", fmt_opt(r.settling_time_e1)},
          {"settling_time_e2", fmt_opt(r.settling_time_e2)},
          {"steady_e1_sup", fmt_num(r.steady_e1_sup)},
          {"steady_e2_sup", fmt_num(r.steady_e2_sup)},
          {"steady_zeta_sup", fmt_opt(r.steady_zeta_sup)},
          {"chattering_index", fmt_num(r.chattering_index)},
          {"peak_x2", fmt_num(r.peak_x2)},
          {"bound_theorem1", fmt_opt(r.bound_theorem1)},
          {"bound_theorem2", fmt_opt(r.bound_theorem2)},
          {"bound_linear", fmt_opt(r.bound_linear)},
          {"flags", r.flags.empty() ? "none" : r.flags},
          {"status", r.status}};
}

inline constexpr const char* kNoiseNote =
    "# noise is a function of (seed, integration step index); changing dt changes the noise path";

inline void write_report_kv(std::ostream& out, const RunReport& r) {
  out << kNoiseNote << '\n';
  for (const auto& [k, v] : report_fields(r)) out << k << '=' << v << '\n';
}

inline void write_report_csv_header(std::ostream& out, const std::string& prefix = {}) {
  out << prefix;
  bool first = true;
  for (const auto& [k, v] : report_fields(RunReport{})) {
    out << (first ? "" : ",") << k;
    first = false;
  }
  out << '\n';
}

inline void write_report_csv_row(std::ostream& out, const RunReport& r, const std::string& prefix = {}) {
  out << prefix;
  bool first = true;
  for (const auto& [k, v] : report_fields(r)) {
    out << (first ? "" : ",") << v;
    first = false;
  }
  out << '\n';
}

inline void write_report(std::ostream& out, const RunReport& r, ReportFormat f) {
  if (f == ReportFormat::kv) {
    write_report_kv(out, r);
  } else {
    out << kNoiseNote << '\n';
    write_report_csv_header(out);
    write_report_csv_row(out, r);
  }
}

}  // namespace hybdiff
