#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "primeorbit/character_sums.hpp"
#include "primeorbit/config.hpp"
#include "primeorbit/continued_fraction.hpp"
#include "primeorbit/equidistribution.hpp"
#include "primeorbit/error.hpp"
#include "primeorbit/format.hpp"
#include "primeorbit/primes.hpp"
#include "primeorbit/roof.hpp"
#include "primeorbit/rotation.hpp"
#include "primeorbit/run_all.hpp"
#include "primeorbit/special_flow.hpp"

using namespace primeorbit;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cli", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, "cli", path + ": " + e.what());
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cli", "cannot write " + path);
  out << text;
}

ContinuedFraction load_cf(const std::string& path) { return cf_from_json(read_json(path)); }

AnalyticRoof load_roof(const std::string& path) {
  if (path.empty()) return default_roof();
  auto f = roof_from_json(read_json(path));
  return f.mean() == 1.0 ? f : normalize_roof(f);
}

// Counts given as 1e7 and the like.
std::uint64_t as_count(double v, const char* name) {
  if (!(v >= 0) || v != std::floor(v) || v >= 0x1p64) {
    throw Error(ErrorKind::InvalidArgument, "cli", std::string(name) + " must be a nonnegative integer");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prime-time orbits of special flows over Diophantine rotations"};
  app.require_subcommand(1);

  // alpha
  auto* alpha = app.add_subcommand("alpha", "Continued fractions in the Diophantine class");
  alpha->require_subcommand(1);
  DiophantineParams params;
  std::string bits, out_path, in_path;
  std::size_t levels = 6, from_level = 0;
  unsigned max_bits = 4096;
  auto* build = alpha->add_subcommand("build", "Construct alpha from a bit string");
  build->add_option("--c0", params.c0, "growth constant")->capture_default_str();
  build->add_option("--delta", params.delta, "growth exponent")->capture_default_str();
  build->add_option("--d", params.d, "horizon exponent, below delta")->capture_default_str();
  build->add_option("--bits", bits, "one 0/1 choice per level")->required();
  build->add_option("--levels", levels)->capture_default_str();
  build->add_option("--max-threshold-bits", max_bits)->capture_default_str();
  build->add_option("--out", out_path, "cf.json path (stdout when absent)");
  auto* verify = alpha->add_subcommand("verify", "Recheck primality, growth and bracketing");
  verify->add_option("--in", in_path)->required();
  verify->add_option("--from-level", from_level)->capture_default_str();

  // orbit
  auto* orbit = app.add_subcommand("orbit", "Exact rotation x + n alpha with an error budget");
  std::string cf_path, x_text;
  std::int64_t steps = 0;
  double tol = 1e-12;
  orbit->add_option("--cf", cf_path)->required();
  orbit->add_option("--x", x_text, "rational a/b or decimal")->required();
  orbit->add_option("--n", steps)->required();
  orbit->add_option("--tol", tol)->capture_default_str();

  // sums
  auto* sums = app.add_subcommand("sums", "Character sums and Birkhoff deviations");
  sums->require_subcommand(1);
  std::string roof_path, levels_text = "2..5";
  std::int64_t kmax = 200;
  std::size_t grid = 64;
  double d = 0.3;
  std::uint64_t k_cap = 1000;
  double max_steps = 0x1p32;
  auto* lemma4 = sums->add_subcommand("lemma4", "Character sum bounds over a grid");
  lemma4->add_option("--cf", cf_path)->required();
  lemma4->add_option("--roof", roof_path, "accepted for symmetry; the bound does not use the roof");
  lemma4->add_option("--kmax", kmax)->capture_default_str();
  lemma4->add_option("--levels", levels_text)->capture_default_str();
  lemma4->add_option("--grid", grid)->capture_default_str();
  lemma4->add_option("--out", out_path);
  auto* deviation = sums->add_subcommand("deviation", "Grid deviation, uniform sup and near returns per level");
  std::size_t dev_grid = 32;
  deviation->add_option("--cf", cf_path)->required();
  deviation->add_option("--roof", roof_path, "roof.json (default roof when absent)");
  deviation->add_option("--levels", levels_text)->capture_default_str();
  deviation->add_option("--grid", dev_grid)->capture_default_str();
  deviation->add_option("--d", d)->capture_default_str();
  deviation->add_option("--k-cap", k_cap)->capture_default_str();
  deviation->add_option("--max-steps", max_steps)->capture_default_str();
  deviation->add_option("--out", out_path);

  // flow
  auto* flow = app.add_subcommand("flow", "Special flow under the roof");
  flow->require_subcommand(1);
  double s = 0, t = 0;
  auto* flow_t = flow->add_subcommand("t", "T_t(x, s)");
  flow_t->add_option("--cf", cf_path)->required();
  flow_t->add_option("--roof", roof_path);
  flow_t->add_option("--x", x_text)->required();
  flow_t->add_option("--s", s)->required();
  flow_t->add_option("--t", t)->required();
  flow_t->add_option("--tol", tol)->capture_default_str();
  auto* near = flow->add_subcommand("near-return", "d(T_{K q_n} p, p) over the start grid");
  std::size_t level = 4;
  std::uint64_t near_k = 0;
  near->add_option("--cf", cf_path)->required();
  near->add_option("--roof", roof_path);
  near->add_option("--level", level)->required();
  near->add_option("--kmax", near_k, "largest K (default min(floor(e^{d q_n}), 1000))");
  near->add_option("--d", d)->capture_default_str();
  near->add_option("--out", out_path);

  // primes
  auto* primes = app.add_subcommand("primes", "Segmented sieve and progression counts");
  primes->require_subcommand(1);
  double limit = 1e7;
  SieveOptions sopts;
  auto* psieve = primes->add_subcommand("sieve", "Sieve and write gaps");
  psieve->add_option("--limit", limit)->capture_default_str();
  psieve->add_option("--out", out_path);
  psieve->add_option("--workers", sopts.workers)->capture_default_str();
  psieve->add_option("--segment", sopts.segment)->capture_default_str();
  std::uint64_t q = 13;
  std::int64_t a = -1;
  auto* psw = primes->add_subcommand("sw", "pi(x; q, a) (q - 1) / Li(x)");
  psw->add_option("--x", limit)->capture_default_str();
  psw->add_option("--q", q)->capture_default_str();
  psw->add_option("--a", a, "residue (all coprime residues when absent)");
  psw->add_option("--out", out_path);

  // equi
  auto* equi = app.add_subcommand("equi", "Prime-time equidistribution experiment");
  equi->require_subcommand(1);
  auto* erun = equi->add_subcommand("run", "Run the experiment");
  double max_horizon = 1e8;
  std::string csv_path;
  unsigned workers = 1;
  std::string elevels = "2..5";
  erun->add_option("--cf", cf_path)->required();
  erun->add_option("--roof", roof_path);
  erun->add_option("--d", d)->capture_default_str();
  erun->add_option("--levels", elevels)->capture_default_str();
  erun->add_option("--max-horizon", max_horizon)->capture_default_str();
  erun->add_option("--workers", workers)->capture_default_str();
  erun->add_option("--out", out_path);
  erun->add_option("--csv", csv_path, "plot-ready per-level gaps");

  // run-all
  auto* runall = app.add_subcommand("run-all", "Full pipeline from a config file");
  std::string config_path, out_dir;
  runall->add_option("--config", config_path, "key = value config (defaults when absent)");
  runall->add_option("--out-dir", out_dir, "overrides output.dir");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      SearchLimits lim;
      lim.max_threshold_bits = max_bits;
      auto c = construct_alpha_in_D(params, parse_bits(bits), levels, lim);
      emit(out_path, cf_to_json(c.cf, params, bits).dump(2) + "\n");
      return 0;
    }
    if (verify->parsed()) {
      json j = read_json(in_path);
      auto cf = cf_from_json(j);
      auto p = params_from_json(j);
      if (!p) throw Error(ErrorKind::InvalidArgument, "cli", "cf.json carries no params to verify against");
      auto rep = verify_diophantine(cf, *p, from_level);
      json out;
      out["determinant_ok"] = rep.determinant_ok;
      out["levels"] = json::array();
      for (const auto& l : rep.levels) {
        out["levels"].push_back({{"n", l.n},
                                 {"prime", to_string(l.prime)},
                                 {"prime_deterministic", l.prime_deterministic},
                                 {"growth", to_string(l.growth)},
                                 {"growth_ratio", l.growth_ratio},
                                 {"bracket", to_string(l.bracket)}});
      }
      out["pass"] = rep.all_pass();
      std::cout << out.dump(2) << "\n";
      return rep.all_pass() ? 0 : 1;
    }
    if (orbit->parsed()) {
      auto cf = load_cf(cf_path);
      auto r = rotate_n(CirclePoint::parse(x_text), cf, steps, tol);
      json out = {{"point", r.point.value().get_str()},
                  {"point_decimal", r.point.to_double()},
                  {"budget", {{"steps", r.budget.steps}, {"level", r.budget.approx_level}, {"bound", r.budget.bound.get_str()}, {"bound_decimal", r.budget.bound.get_d()}}}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (lemma4->parsed()) {
      auto cf = load_cf(cf_path);
      auto range = parse_level_range(levels_text);
      auto rows = lemma4_table(cf, kmax, range.lo, range.hi, grid);
      emit(out_path, lemma4_csv(rows));
      for (const auto& r : rows) {
        if (!r.pass) return 1;
      }
      return 0;
    }
    if (deviation->parsed()) {
      auto cf = load_cf(cf_path);
      auto f = load_roof(roof_path);
      auto range = parse_level_range(levels_text);
      auto tab = deviation_table(f, cf, range.lo, range.hi, dev_grid, d, k_cap, as_count(max_steps, "--max-steps"),
                                 default_start_grid(f), 1e-9);
      emit(out_path, deviation_csv(tab));
      if (!tab.fit_error.empty()) std::cerr << "fit: " << tab.fit_error << "\n";
      return 0;
    }
    if (flow_t->parsed()) {
      auto cf = load_cf(cf_path);
      auto f = load_roof(roof_path);
      auto p = make_flow_point(CirclePoint::parse(x_text).turn(), s, f);
      auto r = flow_time_t(p, t, f, cf, tol);
      json out = {{"x", r.point.base.to_double()},
                  {"s", r.point.height},
                  {"steps", r.step.steps},
                  {"residual", r.step.residual},
                  {"error", r.step.error}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (near->parsed()) {
      auto cf = load_cf(cf_path);
      auto f = load_roof(roof_path);
      std::uint64_t K = near_k ? near_k : horizon_multiplier(cf, level, d, 1000);
      auto scan = near_return_scan(default_start_grid(f), f, cf, level, K);
      std::string csv = "K,d_physical,d_integer,d_physical_below_roof,physical_bound\n";
      for (const auto& r : scan.rows) {
        csv += std::to_string(r.K) + "," + format_double(r.d_physical) + "," + format_double(r.d_integer) + "," +
               format_double(r.d_physical_below_roof) + "," + format_double(r.physical_bound) + "\n";
      }
      emit(out_path, csv);
      return 0;
    }
    if (psieve->parsed()) {
      auto table = sieve(as_count(limit, "--limit"), sopts);
      if (!out_path.empty()) write_primes(out_path, table);
      std::cout << "pi(" << table.limit() << ") = " << table.primes().size() << "\n";
      return 0;
    }
    if (psw->parsed()) {
      auto x = as_count(limit, "--x");
      auto table = sieve(x);
      std::string csv = "q,a,count,li,ratio,valid\n";
      for (std::uint64_t r = 0; r < q; ++r) {
        if (a >= 0 && r != static_cast<std::uint64_t>(a) % q) continue;
        auto w = sw_ratio(table, x, q, r);
        if (a < 0 && !w.coprime) continue;
        csv += std::to_string(q) + "," + std::to_string(r) + "," + std::to_string(w.count) + "," + format_double(w.li) +
               "," + format_double(w.ratio) + "," + (w.valid() ? "1" : "0") + "\n";
      }
      emit(out_path, csv);
      return 0;
    }
    if (erun->parsed()) {
      auto cf = load_cf(cf_path);
      auto f = load_roof(roof_path);
      auto range = parse_level_range(elevels);
      ExperimentConfig e;
      e.level_lo = range.lo;
      e.level_hi = range.hi;
      e.d = d;
      e.max_horizon = as_count(max_horizon, "--max-horizon");
      e.workers = workers;
      e.starts = default_start_grid(f);
      e.tests = default_test_set(f);
      auto table = sieve(std::max<std::uint64_t>(experiment_max_horizon(e, cf), 2));
      auto res = run_experiment(e, f, cf, table);
      emit(out_path, experiment_to_json(res, e).dump(2) + "\n");
      if (!csv_path.empty()) {
        std::string csv = "level,horizon,test,prime_residue,residue_target,prime_target,integer_target,discrepancy\n";
        for (const auto& l : res.levels) {
          for (const auto& w : l.worst) {
            csv += std::to_string(l.level) + "," + std::to_string(l.horizon) + "," + w.name + "," +
                   format_double(w.prime_residue) + "," + format_double(w.residue_target) + "," +
                   format_double(w.prime_target) + "," + format_double(w.integer_target) + "," +
                   format_double(l.worst_discrepancy) + "\n";
          }
        }
        emit(csv_path, csv);
      }
      return 0;
    }
    if (runall->parsed()) {
      RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
      apply_env_overrides(c);
      if (!out_dir.empty()) c.output_dir = out_dir;
      auto r = run_all(c);
      for (const auto& ch : r.checks) std::cout << (ch.pass ? "pass " : "FAIL ") << ch.name << ": " << ch.detail << "\n";
      for (const auto& f : r.failures) {
        if (f.contains("module")) std::cout << "error " << f["stage"].get<std::string>() << ": " << f["message"].get<std::string>() << "\n";
      }
      std::cout << "artifacts:";
      for (const auto& name : r.artifacts) std::cout << " " << name;
      std::cout << "\n";
      return r.exit_code;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
