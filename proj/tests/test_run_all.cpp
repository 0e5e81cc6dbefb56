#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "primeorbit/run_all.hpp"

using namespace primeorbit;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const std::string& dir) {
  RunConfig c;
  c.max_horizon = 3000;
  c.lemma4_kmax = 10;
  c.lemma4_grid = 16;
  c.closed_form_kmax = 5;
  c.grid_x = 16;
  c.k_cap = 20;
  c.output_dir = (fs::temp_directory_path() / dir).string();
  fs::remove_all(c.output_dir);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run_all writes the five artifacts") {
  auto c = small_config("primeorbit_run_a");
  auto r = run_all(c);
  CHECK(r.exit_code == 0);
  CHECK(r.failures.empty());
  std::vector<std::string> expect{"cf.json", "roof.json", "lemma4.csv", "deviation.csv", "report.json"};
  CHECK(r.artifacts == expect);
  for (const auto& name : expect) CHECK(fs::exists(fs::path(c.output_dir) / name));
  CHECK_FALSE(fs::exists(fs::path(c.output_dir) / "failures.json"));
  auto report = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "report.json"));
  CHECK(report["experiment"]["levels"].size() == 5);
  CHECK(report["config"]["max_horizon"] == "3000");

  auto again = small_config("primeorbit_run_b");
  run_all(again);
  for (const auto& name : expect) {
    auto a = slurp(fs::path(c.output_dir) / name);
    auto b = slurp(fs::path(again.output_dir) / name);
    if (name == "report.json") {
      // The config echo names the output directory.
      auto ja = nlohmann::json::parse(a), jb = nlohmann::json::parse(b);
      ja["config"].erase("output.dir");
      jb["config"].erase("output.dir");
      CHECK(ja.dump() == jb.dump());
    } else {
      CHECK(a == b);
    }
  }
}

TEST_CASE("run_all check-only and budget failures") {
  auto c = small_config("primeorbit_run_c");
  c.mode = RunMode::CheckOnly;
  auto r = run_all(c);
  CHECK(r.exit_code == 0);
  std::vector<std::string> expect{"cf.json", "roof.json", "lemma4.csv", "deviation.csv"};
  CHECK(r.artifacts == expect);
  CHECK_FALSE(fs::exists(fs::path(c.output_dir) / "report.json"));

  auto b = small_config("primeorbit_run_d");
  b.max_steps = 1;
  b.sieve_limit = 1;
  auto rb = run_all(b);
  CHECK(rb.exit_code != 0);
  auto manifest = nlohmann::json::parse(slurp(fs::path(b.output_dir) / "failures.json"));
  REQUIRE(manifest.size() >= 2);
  for (const auto& f : manifest) CHECK(f["kind"] == "budget");

  auto t = small_config("primeorbit_run_e");
  t.max_threshold_bits = 8;
  auto rt = run_all(t);
  CHECK(rt.exit_code != 0);
  CHECK(rt.failures[0]["stage"] == "alpha");
}

TEST_CASE("reparametrized and file roofs") {
  auto c = small_config("primeorbit_run_f");
  c.mode = RunMode::CheckOnly;
  c.roof = "reparam";
  auto r = run_all(c);
  CHECK(r.exit_code == 0);
  auto file = small_config("primeorbit_run_g");
  file.mode = RunMode::CheckOnly;
  file.roof = "file";
  file.roof_file = (fs::path(c.output_dir) / "roof.json").string();
  auto rf = run_all(file);
  CHECK(rf.exit_code == 0);
  CHECK(slurp(fs::path(c.output_dir) / "roof.json") == slurp(fs::path(file.output_dir) / "roof.json"));
  CHECK(slurp(fs::path(c.output_dir) / "deviation.csv") == slurp(fs::path(file.output_dir) / "deviation.csv"));
  CHECK_THROWS(parse_torus_modes("1,0,0.1"));
  CHECK(parse_torus_modes("1,0,0.1,0; 0,1,0.2,0.1").size() == 2);
}
