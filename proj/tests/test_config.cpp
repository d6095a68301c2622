#include <doctest.h>

#include <fstream>
#include <ios>
#include <string>

#include "riskmesh/config.hpp"

using namespace riskmesh;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  std::string path = "/tmp/riskmesh_test_" + name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << body;
  return path;
}

}  // namespace

TEST_CASE("defaults validate and survive a json round trip") {
  SimConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  SimConfig back = parse_config(config_to_json(cfg));
  CHECK(config_digest(back) == config_digest(cfg));
}

TEST_CASE("partial documents override only the named keys") {
  SimConfig cfg = parse_config(R"({"world": {"population": 250, "app_adoption": 0.8}})");
  CHECK(cfg.world.population == 250);
  CHECK(cfg.world.app_adoption == doctest::Approx(0.8));
  CHECK(cfg.world.n_days == SimConfig{}.world.n_days);
  CHECK(cfg.disease.p_asymptomatic == doctest::Approx(0.40));
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"world": {"populaton": 10}})"),
                       doctest::Contains("populaton"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"wrld": {}})"), ConfigError);
}

TEST_CASE("invalid values name the offending field") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"world": {"app_adoption": 1.5}})"),
                       doctest::Contains("app_adoption"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"world": {"population": 1}})"),
                       doctest::Contains("population"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"world": {"slot_minutes": 10}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"disease": {"p_asymptomatic": -0.1}})"), ConfigError);
}

TEST_CASE("malformed json is a configuration error, missing file an io error") {
  std::string bad = write_temp("bad.json", "{ not json");
  CHECK_THROWS_AS(load_config(bad), ConfigError);
  CHECK_THROWS_AS(load_config("/tmp/riskmesh_no_such_file.json"), std::ios_base::failure);
}

TEST_CASE("load_config reads a real document") {
  std::string path = write_temp("ok.json", R"({
    "world": {"population": 300, "n_days": 12, "seed": 9},
    "scenario": {"intervention_day": 3},
    "transport": {"batch_threshold": 4}
  })");
  SimConfig cfg = load_config(path);
  CHECK(cfg.world.population == 300);
  CHECK(cfg.world.seed == 9);
  CHECK(cfg.scenario.intervention_day == 3);
  CHECK(cfg.transport.batch_threshold == 4);
}

TEST_CASE("digest tracks content, not formatting") {
  SimConfig a = parse_config(R"({"world":{"population":500}})");
  SimConfig b = parse_config(R"({ "world" : { "population" : 500 } })");
  SimConfig c = parse_config(R"({"world":{"population":501}})");
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a) != config_digest(c));
}

TEST_CASE("zero location counts are derived from population") {
  WorldConfig w;
  w.population = 1000;
  LocationCounts lc = resolve_location_counts(w);
  // household stays 0: it means "derive from sampled household sizes".
  CHECK(lc.household == 0);
  CHECK(lc.store > 0);
  CHECK(lc.hospital >= 1);
  CHECK(lc.icu >= 1);
  CHECK(lc.workplace > 0);
  // Explicit counts pass through untouched.
  w.locations.store = 3;
  CHECK(resolve_location_counts(w).store == 3);
}
