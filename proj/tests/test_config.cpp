#include <doctest.h>

#include <map>

#include "primeorbit/config.hpp"

using namespace primeorbit;

TEST_CASE("minimal config gets defaults") {
  auto c = parse_config("# nothing but a comment\n\n");
  CHECK(c == RunConfig{});
  auto d = parse_config("levels = 6  # trailing comment\nd = 0.25\n");
  CHECK(d.d == 0.25);
  CHECK(d.levels == 6);
  CHECK(parse_config("max_horizon = 1e7\n").max_horizon == 10000000);
  CHECK(parse_config("experiment.levels = 3..5\n").experiment_levels == LevelRange{3, 5});
  CHECK(parse_config("mode = check-only\n").mode == RunMode::CheckOnly);
}

TEST_CASE("config errors carry positions and field names") {
  try {
    parse_config("d = 0.3\ndetla = 0.4\n");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(e.line() == 2);
    CHECK(e.column() == 1);
    CHECK(std::string(e.what()).find("did you mean 'delta'") != std::string::npos);
  }
  try {
    parse_config("delta = 0.5\nd = 0.5\n");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    CHECK(e.field() == "d");
  }
  try {
    parse_config("levels = 6\n  workers =  two\n");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 14);
    CHECK(e.field() == "workers");
  }
  CHECK_THROWS_AS(parse_config("levels\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("d = 0.1\nd = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("k_cap = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("bits = 0102\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("mode = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("roof = file\nroof.file = /no/such/roof.json\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("checks.levels = 2..6\n"), ConfigError);
  try {
    parse_config("sieve_limt = 5\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sieve_limit") != std::string::npos);
  }
  try {
    parse_config("zzz = 1\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("did you mean") == std::string::npos);
  }
}

TEST_CASE("osa distance") {
  CHECK(osa_distance("detla", "delta") == 1);
  CHECK(osa_distance("delta", "delta") == 0);
  CHECK(osa_distance("dleta", "delta") == 1);
  CHECK(osa_distance("ca", "abc") == 3);
  CHECK(osa_distance("", "abc") == 3);
  CHECK(osa_distance("kitten", "sitting") == 3);
}

TEST_CASE("config round trip") {
  RunConfig c;
  c.d = 0.1 + 0.2;
  c.bits = "0101101";
  c.levels = 7;
  c.roof = "reparam";
  c.reparam_modes = "1,0,0.1,0;2,1,0.01,0.02";
  c.tol = 3.3e-11;
  c.mode = RunMode::CheckOnly;
  c.output_dir = "some dir/out";
  c.check_levels = {3, 6};
  c.experiment_levels = {2, 7};
  auto text = serialize_config(c);
  CHECK(parse_config(text) == c);
  CHECK(serialize_config(parse_config(text)) == text);
  CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("environment overrides budget caps only") {
  std::map<std::string, std::string> env{{"PRIMEORBIT_MAX_HORIZON", "5000"}, {"PRIMEORBIT_SIEVE_LIMIT", "1e6"}};
  auto lookup = [&](const char* n) -> const char* {
    auto it = env.find(n);
    return it == env.end() ? nullptr : it->second.c_str();
  };
  RunConfig c;
  apply_env_overrides(c, lookup);
  CHECK(c.max_horizon == 5000);
  CHECK(c.sieve_limit == 1000000);
  CHECK(c.max_steps == RunConfig{}.max_steps);
  env["PRIMEORBIT_MAX_STEPS"] = "lots";
  CHECK_THROWS_AS(apply_env_overrides(c, lookup), ConfigError);
}
