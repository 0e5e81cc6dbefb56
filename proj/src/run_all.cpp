#include "primeorbit/run_all.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "primeorbit/character_sums.hpp"
#include "primeorbit/equidistribution.hpp"
#include "primeorbit/error.hpp"
#include "primeorbit/format.hpp"
#include "primeorbit/primes.hpp"
#include "primeorbit/reparam.hpp"
#include "primeorbit/special_flow.hpp"

namespace primeorbit {

namespace {

constexpr const char* kModule = "run_all";

namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, kModule, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, kModule, "write failed for " + path.string());
}

class Runner {
 public:
  explicit Runner(const RunConfig& c) : c_(c), dir_(c.output_dir) {}

  RunOutcome run();

 private:
  void emit(const std::string& name, const std::string& text) {
    write_text(dir_ / name, text);
    out_.artifacts.push_back(name);
  }
  void check(const std::string& name, bool pass, const std::string& detail) {
    out_.checks.push_back({name, pass, detail});
    report_["checks"].push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
    if (!pass) out_.failures.push_back({{"stage", name}, {"kind", "check-failed"}, {"message", detail}});
  }
  void fail(const std::string& stage, const Error& e) {
    out_.failures.push_back({{"stage", stage}, {"module", e.module()}, {"kind", std::string(to_string(e.kind()))},
                             {"message", e.detail()}});
  }
  // Runs one stage; errors are recorded and reported as false.
  template <class F>
  bool stage(const std::string& name, F&& body) {
    try {
      body();
      return true;
    } catch (const Error& e) {
      fail(name, e);
    } catch (const std::exception& e) {
      fail(name, Error(ErrorKind::InvalidArgument, kModule, e.what()));
    }
    return false;
  }

  void checks_stage();
  void deviation_stage();
  void primes_stage();
  void experiment_stage();

  const RunConfig& c_;
  fs::path dir_;
  RunOutcome out_;
  json report_ = json::object();
  std::optional<ContinuedFraction> cf_;
  std::optional<AnalyticRoof> roof_;
  std::optional<PrimeTable> table_;
};

void Runner::checks_stage() {
  const auto& cf = *cf_;
  auto grid = uniform_grid(c_.grid_x);
  double worst = 0.0;
  for (std::size_t n = c_.check_levels.lo; n <= c_.check_levels.hi; ++n) {
    std::uint64_t qn = cf.q(n).get_ui();
    auto k = static_cast<std::int64_t>(c_.closed_form_kmax);
    for (std::int64_t j = -k; j <= k; ++j) {
      for (const auto& x : grid) {
        worst = std::max(worst, std::abs(char_sum_closed_form(j, x, cf, qn) - char_sum_direct(j, x, cf, qn)));
      }
    }
  }
  report_["closed_form"] = {{"kmax", c_.closed_form_kmax}, {"max_difference", worst}};
  check("closed_form", worst < 1e-9, "max |closed - direct| = " + format_double(worst));

  auto rows = lemma4_table(cf, static_cast<std::int64_t>(c_.lemma4_kmax), c_.check_levels.lo, c_.check_levels.hi,
                           c_.lemma4_grid);
  std::size_t violations = 0, without_k = 0;
  for (const auto& r : rows) {
    if (!r.pass) ++violations;
    if (!r.pass_without_k) ++without_k;
  }
  emit("lemma4.csv", lemma4_csv(rows));
  report_["lemma4"] = {{"rows", rows.size()}, {"violations", violations}, {"violations_without_k", without_k}};
  check("lemma4", violations == 0, std::to_string(violations) + " violations in " + std::to_string(rows.size()) + " rows");
}

void Runner::deviation_stage() {
  const auto& f = *roof_;
  auto starts = start_grid(f, c_.start_bases, c_.start_heights);
  auto t = deviation_table(f, *cf_, c_.check_levels.lo, c_.check_levels.hi, c_.grid_x, c_.d, c_.k_cap, c_.max_steps,
                           starts, c_.tol);
  emit("deviation.csv", deviation_csv(t));
  json levels = json::array();
  bool uniform_ok = true, physical_ok = true;
  for (const auto& r : t.rows) {
    uniform_ok = uniform_ok && r.uniform.pass;
    physical_ok = physical_ok && r.near_return.physical_bound_pass;
    levels.push_back({{"level", r.level},
                      {"q_n", r.deviation.q_n},
                      {"k_cap", r.k_cap},
                      {"deviation", r.deviation.sup},
                      {"deviation_argmax", r.deviation.argmax},
                      {"deviation_error", r.deviation.error},
                      {"uniform_sup", r.uniform.sup},
                      {"chain_bound", r.uniform.chain_bound},
                      {"near_return_integer", r.near_return.max_integer},
                      {"near_return_physical", r.near_return.max_physical},
                      {"near_return_above_roof", r.near_return.above_roof},
                      {"near_return_ambiguous", r.near_return.ambiguous}});
  }
  report_["deviation"] = levels;
  check("uniform_sup", uniform_ok, "sup over K <= K_cap against the chained deviation bound");
  check("near_return_physical", physical_ok,
        "physical near returns below K / q_{n+1} where the start stays under the roof");
  if (t.fit_error.empty()) {
    report_["deviation_fit"] = {{"c_prime", t.fit.c_prime}, {"C_prime", t.fit.C_prime}};
    check("deviation_fit", t.fit.pass && t.fit.c_prime > 0, "c' = " + format_double(t.fit.c_prime));
  } else {
    check("deviation_fit", false, t.fit_error);
  }
}

void Runner::primes_stage() {
  ExperimentConfig probe;
  probe.level_lo = c_.experiment_levels.lo;
  probe.level_hi = c_.experiment_levels.hi;
  probe.d = c_.d;
  probe.max_horizon = c_.max_horizon;
  std::uint64_t limit = std::max<std::uint64_t>(experiment_max_horizon(probe, *cf_), 1000000);
  SieveOptions opts;
  opts.ceiling = c_.sieve_limit;
  opts.segment = c_.sieve_segment;
  opts.workers = static_cast<unsigned>(c_.workers);
  table_ = sieve(limit, opts);
  bool partition = true;
  for (std::uint64_t q = 1; q <= 50; ++q) {
    auto counts = table_->residue_counts(limit, q);
    std::uint64_t total = 0;
    for (auto v : counts) total += v;
    partition = partition && total == table_->pi(limit);
  }
  double worst = 0.0;
  json ratios = json::array();
  for (std::uint64_t q : {2, 3, 5, 7, 11, 13}) {
    for (std::uint64_t a = 1; a < q; ++a) {
      auto r = sw_ratio(*table_, limit, q, a);
      worst = std::max(worst, std::abs(r.ratio - 1.0));
      ratios.push_back({{"q", q}, {"a", a}, {"count", r.count}, {"ratio", r.ratio}});
    }
  }
  report_["primes"] = {{"limit", limit}, {"pi", table_->pi(limit)}, {"li", li_x(static_cast<double>(limit))},
                       {"sw_ratios", ratios}};
  check("prime_partition", partition, "sum over a of pi(x; q, a) = pi(x) for q <= 50");
  check("siegel_walfisz", worst <= 0.05, "max |ratio - 1| = " + format_double(worst));
}

void Runner::experiment_stage() {
  const auto& f = *roof_;
  ExperimentConfig e;
  e.level_lo = c_.experiment_levels.lo;
  e.level_hi = c_.experiment_levels.hi;
  e.d = c_.d;
  e.max_horizon = c_.max_horizon;
  e.tol = c_.tol;
  e.workers = static_cast<unsigned>(c_.workers);
  e.starts = start_grid(f, c_.start_bases, c_.start_heights);
  e.tests = default_test_set(f);
  double steps = static_cast<double>(experiment_max_horizon(e, *cf_)) / f.min_bound() + 1;
  if (steps > static_cast<double>(c_.max_steps)) {
    throw Error(ErrorKind::Budget, "equidistribution", "experiment needs more than max_steps base steps");
  }
  auto res = run_experiment(e, f, *cf_, *table_);
  report_["experiment"] = experiment_to_json(res, e);
  auto t = trend_summary(res);
  std::string pairs;
  for (auto [a, b] : t.improving_pairs) pairs += (pairs.empty() ? "" : ", ") + std::to_string(a) + "->" + std::to_string(b);
  check("equidistribution_trend", t.pass,
        "improving level pairs: " + (pairs.empty() ? std::string("none") : pairs) +
            (t.constant_gaps_zero ? "" : "; constant test function gaps nonzero"));
}

RunOutcome Runner::run() {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorKind::Io, kModule, "cannot create " + dir_.string());
  fs::remove(dir_ / "failures.json", ec);
  if (c_.mode == RunMode::CheckOnly) fs::remove(dir_ / "report.json", ec);

  report_["checks"] = json::array();
  json cfg = json::object();
  {
    std::istringstream in(serialize_config(c_));
    std::string line;
    while (std::getline(in, line)) {
      auto eq = line.find(" = ");
      cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
  }
  report_["config"] = cfg;

  DiophantineParams params{c_.c0, c_.delta, c_.d};
  bool have_cf = stage("alpha", [&] {
    SearchLimits limits;
    limits.max_threshold_bits = static_cast<unsigned>(std::min<std::uint64_t>(c_.max_threshold_bits, 1u << 30));
    auto bits = parse_bits(c_.bits);
    cf_ = construct_alpha_in_D(params, bits, c_.levels, limits).cf;
    emit("cf.json", cf_to_json(*cf_, params, c_.bits).dump(2) + "\n");
    auto rep = verify_diophantine(*cf_, params, 0);
    report_["alpha"] = {{"levels", c_.levels},
                        {"q", cf_to_json(*cf_, std::nullopt)["q"]},
                        {"determinant_ok", rep.determinant_ok}};
    check("diophantine", rep.all_pass(), "primality, growth and bracketing at every level");
  });
  bool have_roof = have_cf && stage("roof", [&] {
    roof_ = build_roof(c_, *cf_);
    emit("roof.json", roof_to_json(*roof_).dump(2) + "\n");
    report_["roof"] = {{"kmax", roof_->kmax()},
                       {"min_bound", roof_->min_bound()},
                       {"max_bound", roof_->max_bound()},
                       {"lipschitz", roof_->lipschitz()}};
  });
  if (have_cf) stage("character_sums", [&] { checks_stage(); });
  if (have_roof) stage("deviation", [&] { deviation_stage(); });
  if (have_roof && c_.mode == RunMode::Full) {
    bool have_primes = stage("primes", [&] { primes_stage(); });
    if (have_primes) stage("experiment", [&] { experiment_stage(); });
  }

  if (c_.mode == RunMode::Full) emit("report.json", report_.dump(2) + "\n");
  if (!out_.failures.empty()) {
    emit("failures.json", out_.failures.dump(2) + "\n");
    out_.exit_code = 1;
  }
  return out_;
}

}  // namespace

std::vector<TorusMode> parse_torus_modes(const std::string& text) {
  std::vector<TorusMode> modes;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(item);
    std::string tok;
    std::vector<double> v;
    while (std::getline(fields, tok, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, kModule, "bad torus mode '" + item + "'");
      }
    }
    if (v.size() != 4 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
      throw Error(ErrorKind::Parse, kModule, "torus modes are m,n,re,im with integer m, n: '" + item + "'");
    }
    modes.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), {v[2], v[3]}});
  }
  return modes;
}

std::string lemma4_csv(const std::vector<Lemma4Row>& rows) {
  std::string csv = "level,k,statistic,bound,pass,q_n,norm_lo,bound_without_k,pass_without_k,triangle_pass,tol\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.level) + "," + std::to_string(r.k) + "," + format_double(r.max_abs) + "," +
           format_double(r.bound) + "," + (r.pass ? "1" : "0") + "," + format_double(r.q_n) + "," +
           format_double(r.norm_lo) + "," + format_double(r.bound_without_k) + "," + (r.pass_without_k ? "1" : "0") +
           "," + (r.triangle_pass ? "1" : "0") + "," + format_double(r.tol) + "\n";
  }
  return csv;
}

DeviationTable deviation_table(const AnalyticRoof& f, const ContinuedFraction& cf, std::size_t level_lo,
                               std::size_t level_hi, std::size_t grid_size, double d, std::uint64_t k_cap,
                               std::uint64_t max_steps, const std::vector<FlowPoint>& starts, double tol) {
  DeviationTable t;
  auto grid = uniform_grid(grid_size);
  std::vector<double> qs, devs;
  for (std::size_t n = level_lo; n <= level_hi; ++n) {
    DeviationRow r;
    r.level = n;
    r.deviation = deviation_qn(f, grid, cf, n);
    r.k_cap = horizon_multiplier(cf, n, d, k_cap);
    r.uniform = uniform_sup_check(f, grid, cf, n, r.k_cap, max_steps);
    if (!starts.empty()) r.near_return = near_return_scan(starts, f, cf, n, r.k_cap, tol);
    qs.push_back(r.deviation.q_n);
    devs.push_back(r.deviation.sup);
    t.rows.push_back(r);
  }
  try {
    t.fit = fit_exponential_bound(qs, devs);
    for (auto& r : t.rows) r.fit_bound = t.fit.C_prime * std::exp(-t.fit.c_prime * r.deviation.q_n);
  } catch (const Error& e) {
    t.fit_error = e.detail();
    for (auto& r : t.rows) r.fit_bound = std::nan("");
  }
  return t;
}

std::string deviation_csv(const DeviationTable& t) {
  std::string csv =
      "level,statistic,bound,pass,q_n,deviation_error,k_cap,uniform_sup,chain_bound,uniform_pass,"
      "near_return_integer,near_return_physical,physical_bound_pass,above_roof,ambiguous\n";
  for (const auto& r : t.rows) {
    bool pass = r.deviation.sup <= r.fit_bound;
    csv += std::to_string(r.level) + "," + format_double(r.deviation.sup) + "," + format_double(r.fit_bound) + "," +
           (pass ? "1" : "0") + "," + format_double(r.deviation.q_n) + "," + format_double(r.deviation.error) + "," +
           std::to_string(r.k_cap) + "," + format_double(r.uniform.sup) + "," + format_double(r.uniform.chain_bound) +
           "," + (r.uniform.pass ? "1" : "0") + "," + format_double(r.near_return.max_integer) + "," +
           format_double(r.near_return.max_physical) + "," + (r.near_return.physical_bound_pass ? "1" : "0") + "," +
           std::to_string(r.near_return.above_roof) + "," + std::to_string(r.near_return.ambiguous) + "\n";
  }
  return csv;
}

AnalyticRoof build_roof(const RunConfig& c, const ContinuedFraction& cf) {
  if (c.roof == "default") return default_roof();
  if (c.roof == "geometric") {
    return normalize_roof(geometric_roof(c.roof_mean, c.roof_amplitude, c.roof_rate, c.roof_phase, c.harmonics));
  }
  if (c.roof == "file") {
    std::ifstream in(c.roof_file);
    if (!in) throw Error(ErrorKind::Io, kModule, "cannot read " + c.roof_file);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse, kModule, c.roof_file + ": " + e.what());
    }
    auto f = roof_from_json(j);
    return f.mean() == 1.0 ? f : normalize_roof(f);
  }
  if (c.roof == "reparam") {
    Torus2Function r(c.reparam_mean, parse_torus_modes(c.reparam_modes));
    ReparamOptions opts;
    opts.harmonics = c.harmonics;
    return roof_from_reparam(r, Turn::from_rational(cf.midpoint()), opts).roof;
  }
  throw Error(ErrorKind::InvalidArgument, kModule, "unknown roof kind '" + c.roof + "'");
}

RunOutcome run_all(const RunConfig& config) {
  validate_config(config);
  return Runner(config).run();
}

}  // namespace primeorbit
