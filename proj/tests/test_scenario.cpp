#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "hybdiff/scenario.hpp"

using namespace hybdiff;
namespace fs = std::filesystem;

namespace {

const std::string kMinimal = R"(
[scenario]
name = "t"

[sim]
dt = 1e-3
t_end = 1

[[family]]
name = "h"
kind = "hybrid"
k1 = 2
)";

ConfigError parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError(0, "", "");
}

}  // namespace

TEST_CASE("bundled scenarios round-trip through serialize") {
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(HYBDIFF_SCENARIO_DIR)) {
    if (entry.path().extension() != ".toml") continue;
    ++n;
    CAPTURE(entry.path().string());
    const Scenario a = load_scenario(entry.path().string());
    const std::string text = serialize(a);
    const Scenario b = parse_scenario(text);
    CHECK(a == b);
    CHECK(serialize(b) == text);
    CHECK(a.name == entry.path().stem().string());
  }
  CHECK(n >= 10);
}

TEST_CASE("defaults and unspecified keys") {
  const Scenario sc = parse_scenario(kMinimal);
  REQUIRE(sc.families.size() == 1);
  const auto& p = std::get<HybridParams>(sc.families[0].schedule[0].params);
  CHECK(p == HybridParams{2.0, 1.0, 8.0, 8.0, 0.2});
  CHECK(sc.signal == SignalSpec{});
  CHECK(sc.noise.kind == NoiseKind::none);
  CHECK(sc.sim.method == Method::rk4);
  CHECK(parse_scenario(serialize(default_scenario())) == default_scenario());
}

TEST_CASE("switch blocks inherit the previous gains") {
  const Scenario sc = parse_scenario(kMinimal + R"(
[[family.switch]]
t = 0.25
k2 = 5

[[family.switch]]
t = 0.5
k4 = 3
)");
  const auto& s = sc.families[0].schedule;
  REQUIRE(s.size() == 3);
  CHECK(s[1].t == 0.25);
  CHECK(std::get<HybridParams>(s[1].params) == HybridParams{2, 5, 8, 8, 0.2});
  CHECK(std::get<HybridParams>(s[2].params) == HybridParams{2, 5, 8, 3, 0.2});
}

TEST_CASE("comments and whitespace") {
  const Scenario sc = parse_scenario(R"(
  # leading comment
[scenario]   # trailing
name = "with # hash"
[sim]
  dt=1e-3
t_end   =   2   # seconds
x0 = [ 1 , -2 ]
[[system]]
name = "s"
kind = "smc"
)");
  CHECK(sc.name == "with # hash");
  CHECK(sc.sim.t_end == 2.0);
  CHECK(sc.sim.x0 == DiffState{1.0, -2.0});
  REQUIRE(sc.systems.size() == 1);
  CHECK(sc.systems[0].kind == FirstOrderKind::smc);
}

TEST_CASE("validation errors name the field and line") {
  SECTION("negative gain") {
    std::string text = kMinimal;
    text.replace(text.find("k1 = 2"), 6, "k1 = -2");
    const auto e = parse_error(text);
    CHECK(e.path() == "family[0].k1");
    CHECK(e.line() == 12);
    CHECK(std::string(e.what()).find("family[0].k1") != std::string::npos);
  }
  SECTION("zero k3") {
    const auto e = parse_error(kMinimal + "k3 = 0\n");
    CHECK(e.path() == "family[0].k3");
    CHECK(e.line() == 13);
  }
  SECTION("alpha outside the unit interval") {
    CHECK(parse_error(kMinimal + "alpha = 1\n").path() == "family[0].alpha");
  }
  SECTION("bad switch gain") {
    CHECK(parse_error(kMinimal + "[[family.switch]]\nt = 0.5\nk4 = -1\n").path() == "family[0].switch[0].k4");
  }
  SECTION("switch times out of order") {
    const auto e = parse_error(kMinimal + "[[family.switch]]\nt = 0.5\n[[family.switch]]\nt = 0.2\n");
    CHECK(e.path().starts_with("family[0].schedule"));
  }
  SECTION("switch without time") {
    CHECK(parse_error(kMinimal + "[[family.switch]]\nk2 = 3\n").path() == "family[0].switch[0].t");
  }
  SECTION("nonpositive step") {
    std::string text = kMinimal;
    text.replace(text.find("dt = 1e-3"), 9, "dt = 0");
    CHECK(parse_error(text).path() == "sim.dt");
  }
  SECTION("nonlinear family with a linear gain") {
    CHECK(parse_error("[[family]]\nkind = \"nonlinear\"\nk1 = 1\nk2 = 1\nk3 = 1\nk4 = 0\n").path() ==
          "family[0].k2");
  }
  SECTION("negative noise") {
    CHECK(parse_error(kMinimal + "[noise]\nepsilon = -0.1\n").path() == "noise.epsilon");
  }
  SECTION("empty scenario") {
    CHECK(parse_error("[scenario]\nname = \"x\"\n").path() == "family");
  }
}

TEST_CASE("syntax errors") {
  CHECK(parse_error(kMinimal + "bogus = 1\n").path() == "family[0].bogus");
  CHECK(parse_error("[signal]\nwhat = 3\n").path() == "signal.what");
  CHECK(parse_error("[signal]\nomega = 1\nomega = 2\n").line() == 3);
  CHECK(parse_error("[signal]\nomega = 1\nomega = 2\n").path() == "signal.omega");
  CHECK(parse_error("[signal\n").line() == 1);
  CHECK(parse_error("[signal]\nomega 1\n").line() == 2);
  CHECK(parse_error("[signal]\nomega = abc\n").line() == 2);
  CHECK(parse_error("[signal]\nkind = \"square\"\n").path() == "signal.kind");
  CHECK(parse_error("[signal]\nomega = \"fast\"\n").path() == "signal.omega");
  CHECK(parse_error("[sim]\nx0 = [1, 2, 3]\n").path() == "sim.x0");
  CHECK(parse_error("[sim]\nmethod = \"rk45\"\n").path() == "sim.method");
  CHECK(parse_error("[noise]\nseed = 1.5\n").path() == "noise.seed");
  CHECK(parse_error("omega = 1\n").line() == 1);
  CHECK(parse_error("[[family]]\nk1 = 1\n").path() == "family.kind");
  CHECK(parse_error("[[family]]\nkind = \"levant\"\nk1 = 1\n").path() == "family[0].k1");
  CHECK(parse_error("[[family.switch]]\nt = 1\n").path() == "family.switch");
  CHECK(parse_error("[[widgets]]\n").path() == "widgets");
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/dir/none.toml"), IoError);
}

TEST_CASE("numeric fields by path") {
  Scenario sc = parse_scenario(kMinimal + "[[family.switch]]\nt = 0.5\nk2 = 4\n");
  set_numeric(sc, "h.k3", 3.0);
  for (const auto& e : sc.families[0].schedule) CHECK(std::get<HybridParams>(e.params).k3 == 3.0);
  set_numeric(sc, "noise.epsilon", 0.02);
  CHECK(sc.noise.epsilon == 0.02);
  set_numeric(sc, "signal.omega", 3.0);
  CHECK(sc.signal.omega == 3.0);
  set_numeric(sc, "sim.dt", 2e-3);
  CHECK(sc.sim.dt == 2e-3);
  CHECK_THROWS_AS(set_numeric(sc, "h.lambda1", 1.0), ConfigError);
  CHECK_THROWS_AS(set_numeric(sc, "nobody.k1", 1.0), ConfigError);
  CHECK_THROWS_AS(set_numeric(sc, "signal.kind", 1.0), ConfigError);
  CHECK_THROWS_AS(set_numeric(sc, "epsilon", 1.0), ConfigError);
}

TEST_CASE("numbers survive formatting") {
  for (double v : {0.1, 1e-4, 2.0 / 3.0, 12345.678, -7.0, 5e-324, 1.7976931348623157e308}) {
    const auto s = config::format_number(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(config::format_number(0.1) == "0.1");
  CHECK(config::format_number(8.0) == "8");
}
