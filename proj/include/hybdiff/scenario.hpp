#pragma once

// Scenario files: a line-oriented, TOML-like format.
//
//   # comment
//   [section]            scenario, signal, noise, sim, metrics
//   key = value          number, "string", or [n1, n2, ...]
//   [[family]]           one per differentiator; keys: name, kind, gains
//   [[family.switch]]    gain change at time t; unspecified keys carry over
//   [[system]]           scalar first-order system; keys: name, kind, x0, method
//
// Gain keys per kind:
//   hybrid, nonlinear, hybrid-discontinuous: k1 k2 k3 k4 alpha
//   levant: lambda1 lambda2
//   linear: a1 a2 tau
//   gred:   lambda1 lambda2 a1 a2 tau eps_p c_p eps_d c_d

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hybdiff/differentiators.hpp"
#include "hybdiff/integrator.hpp"
#include "hybdiff/metrics.hpp"
#include "hybdiff/signals.hpp"

namespace hybdiff {

struct FamilyEntry {
  std::string name;
  FamilyKind kind = FamilyKind::hybrid;
  ParamSchedule schedule;

  friend bool operator==(const FamilyEntry&, const FamilyEntry&) = default;
};

struct FirstOrderEntry {
  std::string name;
  FirstOrderKind kind = FirstOrderKind::linear;
  double x0 = 1.0;
  std::optional<Method> method;  // overrides sim.method

  friend bool operator==(const FirstOrderEntry&, const FirstOrderEntry&) = default;
};

struct Scenario {
  std::string name = "default";
  SignalSpec signal{};
  NoiseSpec noise{};
  // When non-empty, steady errors are the worst case over these noise frequencies.
  std::vector<double> worst_case_omegas;
  SimConfig sim{};
  MetricsConfig metrics{};
  std::vector<FamilyEntry> families;
  std::vector<FirstOrderEntry> systems;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parse or validation failure; `line` is 0 when no source line applies.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string path, const std::string& message)
      : std::runtime_error(format(line, path, message)), line_(line), path_(std::move(path)) {}

  int line() const { return line_; }
  const std::string& path() const { return path_; }

 private:
  static std::string format(int line, const std::string& path, const std::string& message) {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    if (!path.empty()) s += path + ": ";
    return s + message;
  }

  int line_;
  std::string path_;
};

namespace config {

using Value = std::variant<double, std::string, std::vector<double>>;

struct Entry {
  std::string key;
  Value value;
  int line = 0;
};

struct Section {
  std::string name;
  bool array = false;
  int line = 0;
  std::vector<Entry> entries;
};

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || errno == ERANGE) return std::nullopt;
  return v;
}

inline std::string strip_comment(std::string_view line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

inline Value parse_value(std::string_view raw, int line) {
  const std::string_view s = trim(raw);
  if (s.empty()) throw ConfigError(line, "", "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') throw ConfigError(line, "", "unterminated string");
    return std::string(s.substr(1, s.size() - 2));
  }
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError(line, "", "unterminated array");
    std::vector<double> out;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const auto item = trim(body.substr(0, comma));
      const auto v = parse_number(item);
      if (!v) throw ConfigError(line, "", "array items must be numbers, got '" + std::string(item) + "'");
      out.push_back(*v);
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
    }
    return out;
  }
  const auto v = parse_number(s);
  if (!v) throw ConfigError(line, "", "cannot parse value '" + std::string(s) + "'");
  return *v;
}

inline std::vector<Section> parse_document(std::istream& in) {
  std::vector<Section> doc;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string stripped = strip_comment(raw);
    const std::string_view line = trim(stripped);
    if (line.empty()) continue;
    if (line.front() == '[') {
      const bool arr = line.starts_with("[[");
      const std::string_view close = arr ? "]]" : "]";
      if (!line.ends_with(close)) throw ConfigError(line_no, "", "malformed section header");
      const std::size_t skip = arr ? 2 : 1;
      const std::string_view name = trim(line.substr(skip, line.size() - 2 * skip));
      if (name.empty()) throw ConfigError(line_no, "", "empty section name");
      doc.push_back({std::string(name), arr, line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(line_no, "", "empty key");
    if (doc.empty()) throw ConfigError(line_no, key, "key outside of any section");
    for (const auto& e : doc.back().entries)
      if (e.key == key) throw ConfigError(line_no, doc.back().name + "." + key, "duplicate key");
    doc.back().entries.push_back({key, parse_value(line.substr(eq + 1), line_no), line_no});
  }
  return doc;
}

inline double as_number(const Entry& e, const std::string& path) {
  if (const auto* d = std::get_if<double>(&e.value)) return *d;
  throw ConfigError(e.line, path, "expected a number");
}

inline std::string as_string(const Entry& e, const std::string& path) {
  if (const auto* s = std::get_if<std::string>(&e.value)) return *s;
  throw ConfigError(e.line, path, "expected a quoted string");
}

inline std::vector<double> as_array(const Entry& e, const std::string& path, std::size_t n = 0) {
  const auto* a = std::get_if<std::vector<double>>(&e.value);
  if (!a) throw ConfigError(e.line, path, "expected an array");
  if (n != 0 && a->size() != n)
    throw ConfigError(e.line, path, "expected " + std::to_string(n) + " elements");
  return *a;
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // shortest form that round-trips
  for (int prec = 1; prec <= 17; ++prec) {
    char tmp[64];
    std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  return buf;
}

/// Writes a gain key into the family's parameter block; false if unknown.
inline bool set_param(FamilyParams& params, const std::string& key, double v) {
  return std::visit(
      [&](auto& p) -> bool {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, HybridParams>) {
          if (key == "k1") p.k1 = v;
          else if (key == "k2") p.k2 = v;
          else if (key == "k3") p.k3 = v;
          else if (key == "k4") p.k4 = v;
          else if (key == "alpha") p.alpha = v;
          else return false;
        } else if constexpr (std::is_same_v<P, LevantParams>) {
          if (key == "lambda1") p.lambda1 = v;
          else if (key == "lambda2") p.lambda2 = v;
          else return false;
        } else if constexpr (std::is_same_v<P, LinearParams>) {
          if (key == "a1") p.a1 = v;
          else if (key == "a2") p.a2 = v;
          else if (key == "tau") p.tau = v;
          else return false;
        } else {
          if (key == "lambda1") p.levant.lambda1 = v;
          else if (key == "lambda2") p.levant.lambda2 = v;
          else if (key == "a1") p.linear.a1 = v;
          else if (key == "a2") p.linear.a2 = v;
          else if (key == "tau") p.linear.tau = v;
          else if (key == "eps_p") p.eps_p = v;
          else if (key == "c_p") p.c_p = v;
          else if (key == "eps_d") p.eps_d = v;
          else if (key == "c_d") p.c_d = v;
          else return false;
        }
        return true;
      },
      params);
}

inline std::vector<std::pair<std::string, double>> param_items(const FamilyParams& params) {
  return std::visit(
      [](const auto& p) -> std::vector<std::pair<std::string, double>> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, HybridParams>)
          return {{"k1", p.k1}, {"k2", p.k2}, {"k3", p.k3}, {"k4", p.k4}, {"alpha", p.alpha}};
        else if constexpr (std::is_same_v<P, LevantParams>)
          return {{"lambda1", p.lambda1}, {"lambda2", p.lambda2}};
        else if constexpr (std::is_same_v<P, LinearParams>)
          return {{"a1", p.a1}, {"a2", p.a2}, {"tau", p.tau}};
        else
          return {{"lambda1", p.levant.lambda1}, {"lambda2", p.levant.lambda2},
                  {"a1", p.linear.a1},           {"a2", p.linear.a2},
                  {"tau", p.linear.tau},          {"eps_p", p.eps_p},
                  {"c_p", p.c_p},                 {"eps_d", p.eps_d},
                  {"c_d", p.c_d}};
      },
      params);
}

}  // namespace config

namespace detail {

struct FamilyLines {
  int header = 0;
  std::map<std::string, int> key_lines;
};

inline void bind_section(Scenario& sc, const config::Section& sec) {
  using namespace config;
  for (const Entry& e : sec.entries) {
    const std::string path = sec.name + "." + e.key;
    try {
      if (sec.name == "scenario") {
        if (e.key == "name") sc.name = as_string(e, path);
        else throw ConfigError(e.line, path, "unknown key");
      } else if (sec.name == "signal") {
        auto& s = sc.signal;
        if (e.key == "kind") s.kind = parse_signal_kind(as_string(e, path));
        else if (e.key == "amplitude") s.amplitude = as_number(e, path);
        else if (e.key == "omega") s.omega = as_number(e, path);
        else if (e.key == "phase") s.phase = as_number(e, path);
        else if (e.key == "offset") s.offset = as_number(e, path);
        else if (e.key == "coeffs") {
          const auto a = as_array(e, path, 3);
          s.coeffs = {a[0], a[1], a[2]};
        } else throw ConfigError(e.line, path, "unknown key");
      } else if (sec.name == "noise") {
        auto& n = sc.noise;
        if (e.key == "kind") n.kind = parse_noise_kind(as_string(e, path));
        else if (e.key == "epsilon") n.epsilon = as_number(e, path);
        else if (e.key == "noise_omega") n.noise_omega = as_number(e, path);
        else if (e.key == "seed") {
          const double v = as_number(e, path);
          if (v < 0 || v != std::floor(v) || v > 9.007199254740992e15)
            throw ConfigError(e.line, path, "seed must be a non-negative integer");
          n.seed = static_cast<std::uint64_t>(v);
        } else if (e.key == "worst_case_omegas") sc.worst_case_omegas = as_array(e, path);
        else throw ConfigError(e.line, path, "unknown key");
      } else if (sec.name == "sim") {
        auto& s = sc.sim;
        if (e.key == "dt") s.dt = as_number(e, path);
        else if (e.key == "t_end") s.t_end = as_number(e, path);
        else if (e.key == "method") s.method = parse_method(as_string(e, path));
        else if (e.key == "x0") {
          const auto a = as_array(e, path, 2);
          s.x0 = {a[0], a[1]};
        } else throw ConfigError(e.line, path, "unknown key");
      } else if (sec.name == "metrics") {
        auto& m = sc.metrics;
        if (e.key == "steady_window" || e.key == "chatter_window") {
          const auto a = as_array(e, path, 2);
          (e.key == "steady_window" ? m.steady : m.chatter) = Window{a[0], a[1]};
        } else if (e.key == "settle_tol_e1") m.settle_tol_e1 = as_number(e, path);
        else if (e.key == "settle_tol_e2") m.settle_tol_e2 = as_number(e, path);
        else throw ConfigError(e.line, path, "unknown key");
      } else {
        throw ConfigError(sec.line, sec.name, "unknown section");
      }
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(e.line, path, ex.what());
    }
  }
}

}  // namespace detail

/// Checks cross-field invariants; throws ConfigError naming the field path.
inline void validate(const Scenario& sc, const std::vector<detail::FamilyLines>* lines = nullptr) {
  auto line_of = [&](std::size_t fi, const std::string& key) {
    if (!lines || fi >= lines->size()) return 0;
    const auto& fl = (*lines)[fi];
    const auto it = fl.key_lines.find(key);
    return it != fl.key_lines.end() ? it->second : fl.header;
  };
  if (sc.families.empty() && sc.systems.empty())
    throw ConfigError(0, "family", "scenario needs at least one [[family]] or [[system]]");
  if (sc.families.empty()) {
    if (!(sc.sim.dt > 0.0) || !(sc.sim.t_end > 0.0) || !std::isfinite(sc.sim.dt) || !std::isfinite(sc.sim.t_end))
      throw ConfigError(0, "sim", "dt and t_end must be finite and > 0");
  }
  for (std::size_t i = 0; i < sc.systems.size(); ++i)
    if (!std::isfinite(sc.systems[i].x0))
      throw ConfigError(0, "system[" + std::to_string(i) + "].x0", "must be finite");
  if (!std::isfinite(sc.signal.amplitude) || !std::isfinite(sc.signal.omega))
    throw ConfigError(0, "signal", "amplitude and omega must be finite");
  if (!(sc.noise.epsilon >= 0.0) || !std::isfinite(sc.noise.epsilon))
    throw ConfigError(0, "noise.epsilon", "must be finite and >= 0");
  for (double w : sc.worst_case_omegas)
    if (!(w > 0.0)) throw ConfigError(0, "noise.worst_case_omegas", "frequencies must be > 0");
  if (sc.metrics.settle_tol_e1 <= 0.0) throw ConfigError(0, "metrics.settle_tol_e1", "must be > 0");
  if (sc.metrics.settle_tol_e2 <= 0.0) throw ConfigError(0, "metrics.settle_tol_e2", "must be > 0");
  for (std::size_t fi = 0; fi < sc.families.size(); ++fi) {
    const auto& f = sc.families[fi];
    const std::string base = "family[" + std::to_string(fi) + "]";
    if (auto errs = validate_sim(sc.sim, f.schedule); !errs.empty()) {
      const auto& err = errs.front();
      const bool sched = err.field.starts_with("schedule");
      throw ConfigError(sched ? line_of(fi, "t") : 0, sched ? base + "." + err.field : "sim." + err.field,
                        err.message);
    }
    for (std::size_t si = 0; si < f.schedule.size(); ++si) {
      const auto errs = validate_params(f.kind, f.schedule[si].params);
      if (!errs.empty()) {
        const std::string path = si == 0 ? base + "." + errs.front().field
                                         : base + ".switch[" + std::to_string(si - 1) + "]." +
                                               errs.front().field;
        throw ConfigError(si == 0 ? line_of(fi, errs.front().field) : 0, path, errs.front().message);
      }
    }
  }
}

inline Scenario parse_scenario(std::istream& in) {
  using namespace config;
  const std::vector<Section> doc = parse_document(in);
  Scenario sc;
  std::vector<detail::FamilyLines> lines;
  for (const Section& sec : doc) {
    if (sec.name == "family") {
      if (!sec.array) throw ConfigError(sec.line, "family", "use [[family]] for family blocks");
      FamilyEntry fam;
      detail::FamilyLines fl{sec.line, {}};
      fam.name = "family" + std::to_string(sc.families.size());
      for (const Entry& e : sec.entries)
        if (e.key == "kind") {
          try {
            fam.kind = parse_family_kind(as_string(e, "family.kind"));
          } catch (const std::invalid_argument& ex) {
            throw ConfigError(e.line, "family.kind", ex.what());
          }
        }
      const bool has_kind = std::any_of(sec.entries.begin(), sec.entries.end(),
                                        [](const Entry& e) { return e.key == "kind"; });
      if (!has_kind) throw ConfigError(sec.line, "family.kind", "missing family kind");
      FamilyParams params = default_params(fam.kind);
      const std::string base = "family[" + std::to_string(sc.families.size()) + "]";
      for (const Entry& e : sec.entries) {
        if (e.key == "kind") continue;
        if (e.key == "name") {
          fam.name = as_string(e, base + ".name");
          continue;
        }
        if (!set_param(params, e.key, as_number(e, base + "." + e.key)))
          throw ConfigError(e.line, base + "." + e.key, "unknown key for family kind");
        fl.key_lines[e.key] = e.line;
      }
      fam.schedule.push_back({0.0, params});
      sc.families.push_back(std::move(fam));
      lines.push_back(std::move(fl));
    } else if (sec.name == "family.switch") {
      if (!sec.array || sc.families.empty())
        throw ConfigError(sec.line, "family.switch", "[[family.switch]] must follow a [[family]]");
      auto& fam = sc.families.back();
      ScheduleEntry entry = fam.schedule.back();
      bool has_t = false;
      const std::string base = "family[" + std::to_string(sc.families.size() - 1) + "].switch[" +
                               std::to_string(fam.schedule.size() - 1) + "]";
      for (const Entry& e : sec.entries) {
        if (e.key == "t") {
          entry.t = as_number(e, base + ".t");
          has_t = true;
          lines.back().key_lines["t"] = e.line;
        } else if (!set_param(entry.params, e.key, as_number(e, base + "." + e.key))) {
          throw ConfigError(e.line, base + "." + e.key, "unknown key for family kind");
        }
      }
      if (!has_t) throw ConfigError(sec.line, base + ".t", "switch needs a time t");
      fam.schedule.push_back(std::move(entry));
    } else if (sec.name == "system") {
      if (!sec.array) throw ConfigError(sec.line, "system", "use [[system]] for first-order systems");
      FirstOrderEntry sys;
      const std::string base = "system[" + std::to_string(sc.systems.size()) + "]";
      sys.name = "system" + std::to_string(sc.systems.size());
      for (const Entry& e : sec.entries) {
        const std::string path = base + "." + e.key;
        if (e.key == "name") sys.name = as_string(e, path);
        else if (e.key == "x0") sys.x0 = as_number(e, path);
        else if (e.key == "method") {
          try {
            sys.method = parse_method(as_string(e, path));
          } catch (const std::invalid_argument& ex) {
            throw ConfigError(e.line, path, ex.what());
          }
        }
        else if (e.key == "kind") {
          try {
            sys.kind = parse_first_order_kind(as_string(e, path));
          } catch (const std::invalid_argument& ex) {
            throw ConfigError(e.line, path, ex.what());
          }
        } else throw ConfigError(e.line, path, "unknown key");
      }
      sc.systems.push_back(std::move(sys));
    } else {
      if (sec.array) throw ConfigError(sec.line, sec.name, "unknown array section");
      detail::bind_section(sc, sec);
    }
  }
  validate(sc, &lines);
  return sc;
}

inline Scenario parse_scenario(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

class IoError : public std::runtime_error {
 public:
  explicit IoError(std::string path)
      : std::runtime_error("cannot access '" + path + "'"), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path);
  return parse_scenario(in);
}

inline std::string serialize(const Scenario& sc) {
  using config::format_number;
  std::ostringstream o;
  auto arr = [](std::initializer_list<double> v) {
    std::string s = "[";
    bool first = true;
    for (double d : v) {
      if (!first) s += ", ";
      s += format_number(d);
      first = false;
    }
    return s + "]";
  };
  o << "[scenario]\nname = \"" << sc.name << "\"\n\n";
  o << "[signal]\nkind = \"" << to_string(sc.signal.kind) << "\"\n"
    << "amplitude = " << format_number(sc.signal.amplitude) << "\n"
    << "omega = " << format_number(sc.signal.omega) << "\n"
    << "phase = " << format_number(sc.signal.phase) << "\n"
    << "offset = " << format_number(sc.signal.offset) << "\n"
    << "coeffs = " << arr({sc.signal.coeffs[0], sc.signal.coeffs[1], sc.signal.coeffs[2]}) << "\n\n";
  o << "[noise]\nkind = \"" << to_string(sc.noise.kind) << "\"\n"
    << "epsilon = " << format_number(sc.noise.epsilon) << "\n"
    << "noise_omega = " << format_number(sc.noise.noise_omega) << "\n"
    << "seed = " << sc.noise.seed << "\n";
  if (!sc.worst_case_omegas.empty()) {
    o << "worst_case_omegas = [";
    for (std::size_t i = 0; i < sc.worst_case_omegas.size(); ++i)
      o << (i ? ", " : "") << format_number(sc.worst_case_omegas[i]);
    o << "]\n";
  }
  o << "\n[sim]\ndt = " << format_number(sc.sim.dt) << "\n"
    << "t_end = " << format_number(sc.sim.t_end) << "\n"
    << "method = \"" << to_string(sc.sim.method) << "\"\n"
    << "x0 = " << arr({sc.sim.x0.x1, sc.sim.x0.x2}) << "\n\n";
  o << "[metrics]\n";
  if (sc.metrics.steady)
    o << "steady_window = " << arr({sc.metrics.steady->t_a, sc.metrics.steady->t_b}) << "\n";
  if (sc.metrics.chatter)
    o << "chatter_window = " << arr({sc.metrics.chatter->t_a, sc.metrics.chatter->t_b}) << "\n";
  o << "settle_tol_e1 = " << format_number(sc.metrics.settle_tol_e1) << "\n"
    << "settle_tol_e2 = " << format_number(sc.metrics.settle_tol_e2) << "\n";
  for (const auto& f : sc.families) {
    o << "\n[[family]]\nname = \"" << f.name << "\"\nkind = \"" << to_string(f.kind) << "\"\n";
    for (const auto& [k, v] : config::param_items(f.schedule.front().params))
      o << k << " = " << format_number(v) << "\n";
    for (std::size_t i = 1; i < f.schedule.size(); ++i) {
      o << "\n[[family.switch]]\nt = " << format_number(f.schedule[i].t) << "\n";
      for (const auto& [k, v] : config::param_items(f.schedule[i].params))
        o << k << " = " << format_number(v) << "\n";
    }
  }
  for (const auto& sys : sc.systems)
    o << "\n[[system]]\nname = \"" << sys.name << "\"\nkind = \"" << to_string(sys.kind) << "\"\nx0 = "
      << format_number(sys.x0) << "\n" << (sys.method ? "method = \"" + std::string(to_string(*sys.method)) + "\"\n" : "");
  return o.str();
}

/// Scenario printed by --print-defaults.
inline Scenario default_scenario() {
  Scenario sc;
  sc.families.push_back({"hybrid", FamilyKind::hybrid, {{0.0, default_params(FamilyKind::hybrid)}}});
  return sc;
}

/// Sets a numeric field by path: section.key (signal, noise, sim) or
/// <family name>.<gain>, applied to every schedule block of that family.
inline void set_numeric(Scenario& sc, const std::string& path, double v) {
  const auto dot = path.find('.');
  if (dot == std::string::npos) throw ConfigError(0, path, "axis must be <section>.<key>");
  const std::string head = path.substr(0, dot), key = path.substr(dot + 1);
  if (head == "signal") {
    if (key == "amplitude") sc.signal.amplitude = v;
    else if (key == "omega") sc.signal.omega = v;
    else if (key == "phase") sc.signal.phase = v;
    else if (key == "offset") sc.signal.offset = v;
    else throw ConfigError(0, path, "not a numeric field");
    return;
  }
  if (head == "noise") {
    if (key == "epsilon") sc.noise.epsilon = v;
    else if (key == "noise_omega") sc.noise.noise_omega = v;
    else throw ConfigError(0, path, "not a numeric field");
    return;
  }
  if (head == "sim") {
    if (key == "dt") sc.sim.dt = v;
    else if (key == "t_end") sc.sim.t_end = v;
    else throw ConfigError(0, path, "not a numeric field");
    return;
  }
  bool found = false;
  for (auto& f : sc.families) {
    if (f.name != head) continue;
    found = true;
    for (auto& e : f.schedule)
      if (!config::set_param(e.params, key, v)) throw ConfigError(0, path, "not a gain of this family");
  }
  if (!found) throw ConfigError(0, path, "no section or family named '" + head + "'");
}

}  // namespace hybdiff
