#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "idfield/config.hpp"
#include "idfield/report_io.hpp"
#include "idfield/runner.hpp"

using namespace idfield;
using nlohmann::json;

namespace {

json gaussian_config() {
  return json::parse(R"({
    "domain": {"box": {"lo": [0.0], "hi": [1.0]}, "resolution": [32]},
    "characteristics": {
      "a": {"kind": "constant", "value": 0.0},
      "sigma2": {"kind": "constant", "value": 1.0},
      "rho": {"kind": "none"}
    },
    "kernels": {"preset": "indicator", "lo": [0.0], "hi": [1.0],
                "sign_class": "nonnegative"},
    "t_points": [[0.0]],
    "samples": 20000,
    "epsilon": 0.01,
    "level": 1,
    "seed": 42,
    "experiments": [
      {"name": "cf_check", "t_index": 0, "theta": [1.0], "tolerance": 0.03}
    ]
  })");
}

}  // namespace

TEST_CASE("config validation reports field-level messages and rejects bad input") {
  json bad = gaussian_config();
  bad["domain"]["resolution"] = {0};
  bad["samples"] = 0;
  bad["epsilon"] = 2.0;
  bad["experiments"][0]["name"] = "mystery";
  try {
    parse_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.messages.size() >= 4);
    bool saw_res = false, saw_samples = false, saw_eps = false, saw_name = false;
    for (const auto& m : e.messages) {
      if (m.find("domain.resolution") != std::string::npos) saw_res = true;
      if (m.find("samples") != std::string::npos) saw_samples = true;
      if (m.find("epsilon") != std::string::npos) saw_eps = true;
      if (m.find("mystery") != std::string::npos) saw_name = true;
    }
    CHECK(saw_res);
    CHECK(saw_samples);
    CHECK(saw_eps);
    CHECK(saw_name);
  }

  json missing = gaussian_config();
  missing.erase("t_points");
  CHECK_THROWS_AS(parse_config(missing), ConfigError);

  json bad_exp = gaussian_config();
  bad_exp["experiments"][0] =
      json{{"name", "independence"}, {"K", {0}}};  // L missing
  CHECK_THROWS_AS(parse_config(bad_exp), ConfigError);

  json bad_idx = gaussian_config();
  bad_idx["experiments"][0] = json{{"name", "cf_check"}, {"t_index", 5}};
  CHECK_THROWS_AS(parse_config(bad_idx), ConfigError);
}

TEST_CASE("empty experiment list yields an empty report batch") {
  json cfg_json = gaussian_config();
  cfg_json["experiments"] = json::array();
  const auto cfg = parse_config(cfg_json);
  CHECK(run_experiment(cfg).empty());
}

TEST_CASE("cf_check on the standard-normal scenario") {
  const auto cfg = parse_config(gaussian_config());
  const auto reports = run_experiment(cfg);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].verdict == Verdict::Pass);
  // analytic sanity statistic is exact
  CHECK(reports[0].statistics[0].estimate <= 1e-12);

  // the analytic cf itself hits exp(-1/2) to 1e-10
  const auto spec = cfg.field_spec();
  CHECK(std::abs(cf_integral(spec, cfg.t_points[0], 1.0) -
                 Complex(std::exp(-0.5), 0.0)) < 1e-10);
}

TEST_CASE("identical config and seed give byte-identical reports") {
  const auto cfg = parse_config(gaussian_config());
  const auto r1 = run_experiment(cfg);
  const auto r2 = run_experiment(cfg);
  std::ostringstream j1, j2, c1, c2;
  emit_report_json(r1, j1);
  emit_report_json(r2, j2);
  emit_report_csv(r1, c1);
  emit_report_csv(r2, c2);
  CHECK(j1.str() == j2.str());
  CHECK(c1.str() == c2.str());

  auto other = gaussian_config();
  other["seed"] = 43;
  const auto r3 = run_experiment(parse_config(other));
  std::ostringstream j3;
  emit_report_json(r3, j3);
  CHECK(j1.str() != j3.str());
}

TEST_CASE("csv emits one row per statistic with the documented header") {
  const auto cfg = parse_config(gaussian_config());
  const auto reports = run_experiment(cfg);
  std::ostringstream out;
  emit_report_csv(reports, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "experiment,statistic,estimate,std_error,threshold,verdict,n_samples,"
        "seed");
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  std::size_t stats = 0;
  for (const auto& r : reports) stats += r.statistics.size();
  CHECK(rows == stats);

  // empty report list: header only
  std::ostringstream empty;
  emit_report_csv(std::vector<ExperimentReport>{}, empty);
  CHECK(empty.str() ==
        "experiment,statistic,estimate,std_error,threshold,verdict,n_samples,"
        "seed\n");
}

TEST_CASE("json reports round-trip structurally") {
  const auto cfg = parse_config(gaussian_config());
  const auto reports = run_experiment(cfg);
  std::ostringstream out;
  emit_report_json(reports, out);
  const json parsed = json::parse(out.str());
  REQUIRE(parsed.contains("reports"));
  REQUIRE(parsed["reports"].size() == reports.size());
  const json again = json::parse(out.str());
  CHECK(parsed == again);
  CHECK(parsed["reports"][0]["experiment"] == "cf_check");
  CHECK(parsed["reports"][0]["verdict"] == "pass");
  CHECK_FALSE(parsed["reports"][0].contains("runtime_seconds"));

  EmitOptions opts;
  opts.include_runtime = true;
  std::ostringstream timed;
  emit_report_json(reports, timed, opts);
  CHECK(json::parse(timed.str())["reports"][0].contains("runtime_seconds"));
}

TEST_CASE("experiment filter preserves derived seeds") {
  json two = gaussian_config();
  two["experiments"] = json::array(
      {json{{"name", "id"}, {"n_fold", 2}, {"samples", 0}},
       json{{"name", "cf_check"}, {"t_index", 0}, {"theta", {1.0}},
            {"tolerance", 0.03}}});
  const auto cfg = parse_config(two);
  const auto all = run_experiment(cfg);
  const auto only_cf = run_experiment(cfg, {"cf_check"});
  REQUIRE(all.size() == 2);
  REQUIRE(only_cf.size() == 1);
  CHECK(only_cf[0].seed == all[1].seed);
  std::ostringstream a, b;
  emit_report_json(std::vector<ExperimentReport>{all[1]}, a);
  emit_report_json(only_cf, b);
  CHECK(a.str() == b.str());
}

TEST_CASE("a failing experiment does not abort the batch") {
  json cfg_json = gaussian_config();
  cfg_json["experiments"] = json::array(
      {json{{"name", "independence"}, {"K", {0}}, {"L", {0}}, {"samples", 0}},
       json{{"name", "cf_check"}, {"t_index", 0}, {"theta", {1.0}},
            {"tolerance", 0.03}}});
  const auto cfg = parse_config(cfg_json);
  const auto reports = run_experiment(cfg);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].verdict == Verdict::Fail);  // overlapping K and L throws
  CHECK_FALSE(reports[0].error.empty());
  CHECK(reports[1].verdict == Verdict::Pass);
}

TEST_CASE("stable bridge characteristics come from the stable section") {
  json cfg_json = gaussian_config();
  cfg_json["characteristics"]["rho"] = json{{"kind", "stable_bridge"}};
  cfg_json["characteristics"]["sigma2"] = json{{"kind", "constant"}, {"value", 0.0}};
  cfg_json["stable"] =
      json{{"alpha", 1.5}, {"beta", json{{"kind", "constant"}, {"value", 0.0}}}};
  cfg_json["experiments"] = json::array({json{
      {"name", "cf_check"}, {"t_index", 0}, {"theta", {0.5}}, {"samples", 500},
      {"tolerance", 0.5}}});
  cfg_json["epsilon"] = 0.001;
  const auto cfg = parse_config(cfg_json);
  // unit scale per unit mass: cf(u) = exp(-|u|^alpha)
  const auto spec = cfg.field_spec();
  const Complex v = cf_integral(spec, cfg.t_points[0], 0.5);
  CHECK(std::abs(v - Complex(std::exp(-std::pow(0.5, 1.5)), 0.0)) < 1e-9);

  json no_stable = cfg_json;
  no_stable.erase("stable");
  CHECK_THROWS_AS(parse_config(no_stable), ConfigError);
}

TEST_CASE("sign-class violations are caught before execution") {
  json cfg_json = gaussian_config();
  cfg_json["kernels"] = json{{"preset", "constant"}, {"value", -1.0},
                             {"sign_class", "nonnegative"}};
  const auto cfg = parse_config(cfg_json);
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}
