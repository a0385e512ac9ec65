#include <string>

#include "doctest.h"
#include "kirchhoff/config.hpp"
#include "kirchhoff/errors.hpp"

using namespace kirchhoff;

namespace {

std::string error_of(std::string_view text, const std::vector<std::string>& overrides = {}) {
  try {
    load_config(text, "cfg.json", overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("the embedded schema parses and describes every top-level key") {
    const Json& s = config_schema();
    CHECK(s["type"] == "object");
    for (const char* k : {"problem", "grid", "solver", "geometry", "checks", "output_dir", "seed"})
      CHECK(s["properties"].contains(k));
    CHECK(s["additionalProperties"] == false);
  }

  TEST_CASE("an empty document takes every default") {
    const RunConfig c = load_config("{}", "empty.json");
    CHECK(c.problem.b == 1.0);
    CHECK(c.effective["grid"]["R"] == 8.0);
    CHECK(c.effective["grid"]["n"] == 256);
    CHECK(c.effective["grid"]["scheme"] == "fd4");
    CHECK(c.problem.R == 8.0);
    CHECK(c.problem.n == 256);
    CHECK(c.effective["problem"]["potential"]["kind"] == "zigzag");
    CHECK(c.effective["problem"]["potential"]["a0"] == 0.0);
    CHECK(c.effective["problem"]["nonlinearity"]["terms"][0]["kind"] == "kirchhoff-example");
    CHECK(c.effective["problem"]["nonlinearity"]["terms"][0]["amplitude"] == 1.0);
    CHECK(c.solver.tol_residual == 1e-6);
    CHECK(c.geometry.sphere_samples == 256);
    CHECK_FALSE(c.geometry.rho);
    CHECK(c.checks.empty());
    CHECK(c.output_dir == "out");
    CHECK(c.seed == 0);
  }

  TEST_CASE("syntax errors carry line and column") {
    const std::string e = error_of("{\n  \"grid\": {\"n\": }\n}");
    CHECK(starts_with(e, "cfg.json:2:"));
  }

  TEST_CASE("schema violations point at the offending line") {
    const std::string e = error_of("{\n  \"grid\": {\n    \"n\": 4\n  }\n}");
    CHECK(starts_with(e, "cfg.json:3: /grid/n:"));
    CHECK(e.find("minimum 8") != std::string::npos);

    const std::string unknown = error_of("{\n  \"grid\": {\"N\": 64}\n}");
    CHECK(starts_with(unknown, "cfg.json:2:"));
    CHECK(unknown.find("unknown key 'N'") != std::string::npos);
    CHECK(unknown.find("allowed:") != std::string::npos);

    const std::string kind = error_of(R"({"problem": {"potential": {"kind": "cosine"}}})");
    CHECK(kind.find("/problem/potential/kind") != std::string::npos);

    const std::string type = error_of(R"({"seed": "zero"})");
    CHECK(type.find("expected integer") != std::string::npos);
  }

  TEST_CASE("kind-specific keys are required or rejected") {
    CHECK(error_of(R"({"problem": {"nonlinearity": {"terms": [{"kind": "power"}]}}})").find("needs key 'p'") !=
          std::string::npos);
    CHECK(error_of(R"({"problem": {"nonlinearity": {"terms": [{"kind": "power", "p": 4, "tau": 1}]}}})")
              .find("does not apply to kind 'power'") != std::string::npos);
    CHECK(error_of(R"({"problem": {"potential": {"kind": "tabulated"}}})").find("needs key 'values'") !=
          std::string::npos);
    CHECK(error_of(R"({"problem": {"potential": {"kind": "constant", "a0": 1}}})").find("does not apply") !=
          std::string::npos);
    CHECK(error_of(R"({"problem": {"nonlinearity": {"terms": [{"kind": "sublinear-origin", "tau": 2.5}]}}})") != "");
  }

  TEST_CASE("--set overrides apply before validation and are named in errors") {
    const RunConfig c = load_config("{}", "x.json", {"grid.n=64", "problem.b=0.5", "grid.scheme=fd2"});
    CHECK(c.problem.n == 64);
    CHECK(c.problem.b == 0.5);
    CHECK(c.problem.scheme == DiffScheme::fd2);
    CHECK(c.effective["grid"]["scheme"] == "fd2");

    const std::string e = error_of("{}", {"grid.n=4"});
    CHECK(starts_with(e, "--set grid.n=4: /grid/n:"));
    CHECK(starts_with(error_of("{}", {"grid.n"}), "--set grid.n: expected KEY=VALUE"));
    CHECK(error_of(R"({"checks": []})", {"checks.3.condition=S1"}).find("past the end") != std::string::npos);
  }

  TEST_CASE("overrides index into arrays") {
    const std::string text = R"({"checks": [{"condition": "S1"}, {"condition": "S2"}]})";
    const RunConfig c = load_config(text, "x.json", {"checks.1.range=nonnegative", "checks.1.U=20"});
    REQUIRE(c.checks.size() == 2);
    CHECK(c.checks[1].samples.range == SignRange::nonnegative);
    CHECK(c.checks[1].samples.U == 20.0);
    CHECK(c.checks[0].samples.range == SignRange::full);
  }

  TEST_CASE("apply_override parses JSON values and falls back to strings") {
    Json doc = Json::object();
    CHECK(apply_override(doc, "a.b=3") == "/a/b");
    CHECK(doc["a"]["b"] == 3);
    apply_override(doc, "a.c=[1, 2]");
    CHECK(doc["a"]["c"].size() == 2);
    apply_override(doc, "a.d=hello");
    CHECK(doc["a"]["d"] == "hello");
    apply_override(doc, "a.e=null");
    CHECK(doc["a"]["e"].is_null());
  }

  TEST_CASE("command-line seed and output directory win over the file") {
    const RunConfig c = load_config(R"({"seed": 3, "output_dir": "a"})", "x.json", {}, 11, std::string("b"));
    CHECK(c.seed == 11);
    CHECK(c.output_dir == "b");
    CHECK(c.solver.seed == 11);
    CHECK(c.geometry.seed == 11);
    CHECK(c.effective["seed"] == 11);
  }

  TEST_CASE("the echoed configuration reloads to itself") {
    const char* text = R"({
      "problem": {"b": 2, "potential": {"kind": "tabulated", "radii": [0, 4, 8], "values": [1, 3, 2]},
                  "nonlinearity": {"terms": [{"kind": "sublinear-origin", "c3": 0.5, "tau": 0.5},
                                             {"kind": "kirchhoff-example"}]}},
      "grid": {"n": 128},
      "checks": [{"condition": "V1"}, {"condition": "AR", "mu": [5, 6]}]
    })";
    const RunConfig a = load_config(text, "x.json");
    const RunConfig b = load_config(a.effective.dump(), "echo.json");
    CHECK(a.effective == b.effective);
    CHECK(b.checks.size() == 2);
    CHECK(b.checks[1].mu == std::vector<double>{5.0, 6.0});
    CHECK(b.problem.potential(4.0) == 3.0);
  }

  TEST_CASE("a V0 below the required shift is rejected later, a negative one now") {
    CHECK(error_of(R"({"problem": {"V0": -1}})").find("/problem/V0") != std::string::npos);
    CHECK_NOTHROW(load_config(R"({"problem": {"V0": 2}})", "x.json"));
  }

  TEST_CASE("load_config_file reports unreadable paths") {
    CHECK_THROWS_AS(load_config_file("/nonexistent/config.json"), ConfigError);
  }
}
