// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "primeorbit/character_sums.hpp"
#include "primeorbit/config.hpp"
#include "primeorbit/continued_fraction.hpp"
#include "primeorbit/equidistribution.hpp"
#include "primeorbit/format.hpp"
#include "primeorbit/primes.hpp"
#include "primeorbit/special_flow.hpp"

using namespace primeorbit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) {
    o.pass = false;
    o.detail += "; over the " + format_double(limit_s) + " s limit";
  }
  if (!o.pass) ++failures;
  std::printf("%s [%d] %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

ContinuedFraction constructed(std::size_t levels) {
  DiophantineParams params{1.0, 0.5, 0.3};
  return construct_alpha_in_D(params, std::vector<int>(levels, 0), levels).cf;
}

std::string fmt(double v) { return format_double(v); }

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

}  // namespace

int main() {
  criterion(1, "continued fraction exactness", 1.0, [] {
    DiophantineParams params{1.0, 0.5, 0.3};
    auto cf = construct_alpha_in_D(params, std::vector<int>(5, 0), 5).cf;
    const std::vector<long> expect{1, 1, 2, 3, 5, 13, 733};
    if (cf.denominators().size() != expect.size()) return Outcome{false, "wrong number of denominators"};
    for (std::size_t i = 0; i < expect.size(); ++i) {
      if (cf.q(i) != expect[i]) return Outcome{false, "q_" + std::to_string(i) + " = " + cf.q(i).get_str()};
    }
    for (std::size_t n = 2; n < expect.size(); ++n) {
      if (mpz_probab_prime_p(cf.q(n).get_mpz_t(), 30) == 0) return Outcome{false, "q_n not prime"};
    }
    // q_{n+1} >= e^{q_n / 2}; the values are small enough for long double.
    for (std::size_t n = 1; n + 1 < expect.size(); ++n) {
      if (static_cast<long double>(expect[n + 1]) < std::exp(0.5L * expect[n])) {
        return Outcome{false, "growth fails at n = " + std::to_string(n)};
      }
    }
    // |q_n a - p_n| is linear on the cylinder, so the endpoint values bound it.
    // The rational end p_{N+1}/q_{N+1} reaches 1/q_{N+1} exactly; interior
    // (irrational) points stay strictly below.
    auto cyl = cf.cylinder();
    for (std::size_t n = 0; n + 1 < expect.size(); ++n) {
      for (const mpq_class& a : {cyl.lo, cyl.hi}) {
        mpq_class dist = abs(mpq_class(cf.q(n)) * a - cf.p(n));
        mpq_class hi(1, cf.q(n + 1));
        mpq_class lo(1, 2 * cf.q(n + 1));
        if (!(dist > lo && dist <= hi)) return Outcome{false, "bracketing fails at n = " + std::to_string(n)};
      }
    }
    bool report = verify_diophantine(cf, params, 0).all_pass();
    return Outcome{report, "q = (1,1,2,3,5,13,733), all checks exact"};
  });

  auto cf = constructed(6);
  auto f = default_roof();

  criterion(2, "geometric-sum closed form vs direct summation", 10.0, [&] {
    auto grid = uniform_grid(32);
    double worst = 0.0;
    for (std::size_t n = 2; n <= 5; ++n) {
      auto qn = cf.q(n).get_ui();
      for (std::int64_t k = -20; k <= 20; ++k) {
        for (const auto& x : grid) {
          worst = std::max(worst, std::abs(char_sum_closed_form(k, x, cf, qn) - char_sum_direct(k, x, cf, qn)));
        }
      }
    }
    return Outcome{worst < 1e-9, "max difference " + fmt(worst)};
  });

  criterion(3, "character sum bound with certified ||k alpha||", 60.0, [&] {
    auto rows = lemma4_table(cf, 200, 2, 5, 64);
    std::size_t bad = 0;
    for (const auto& r : rows) {
      if (!r.pass) ++bad;
    }
    return Outcome{bad == 0 && rows.size() == 4 * 400,
                   std::to_string(bad) + " violations in " + std::to_string(rows.size()) + " (level, k) rows"};
  });

  criterion(4, "grid deviation trend and exponential fit", 0, [&] {
    auto grid = uniform_grid(32);
    std::vector<double> q, dev;
    for (std::size_t n = 2; n <= 5; ++n) {
      auto r = deviation_qn(f, grid, cf, n);
      q.push_back(r.q_n);
      dev.push_back(r.sup);
    }
    auto fit = fit_exponential_bound(q, dev);
    bool drop = dev[3] <= 0.9 * dev[2];
    return Outcome{drop && fit.c_prime > 0, "level 4 " + fmt(dev[2]) + " -> level 5 " + fmt(dev[3]) +
                                                 ", c' = " + fmt(fit.c_prime)};
  });

  criterion(5, "uniform sup within K_cap times the grid deviation", 0, [&] {
    auto grid = uniform_grid(32);
    std::string detail;
    bool ok = true;
    for (std::size_t n = 3; n <= 5; ++n) {
      std::uint64_t kcap = horizon_multiplier(cf, n, 0.3, 1000);
      auto us = uniform_sup_check(f, grid, cf, n, kcap);
      double bound = static_cast<double>(kcap) * deviation_qn(f, grid, cf, n).sup + 1e-9;
      ok = ok && us.sup <= bound;
      detail += "level " + std::to_string(n) + ": " + fmt(us.sup) + " <= " + fmt(bound) + "; ";
    }
    return Outcome{ok, detail};
  });

  criterion(6, "integer-time near returns shrink by at least 25%", 0, [&] {
    auto starts = default_start_grid(f);
    auto s4 = near_return_scan(starts, f, cf, 4, horizon_multiplier(cf, 4, 0.3, 1000));
    auto s5 = near_return_scan(starts, f, cf, 5, horizon_multiplier(cf, 5, 0.3, 1000));
    double drop = 1.0 - s5.max_integer / s4.max_integer;
    return Outcome{drop >= 0.25, "level 4 " + fmt(s4.max_integer) + " -> level 5 " + fmt(s5.max_integer) +
                                     " (drop " + fmt(drop) + ")"};
  });

  criterion(7, "prime counts and progression ratios", 30.0, [] {
    auto t6 = sieve(1000000);
    bool pi_ok = t6.pi(1000000) == 78498;
    bool partition = true;
    for (std::uint64_t q = 1; q <= 50; ++q) {
      std::uint64_t total = 0;
      for (std::uint64_t a = 0; a < q; ++a) total += t6.pi(1000000, q, a);
      partition = partition && total == 78498;
    }
    auto t7 = sieve(10000000);
    double worst = 0.0;
    for (std::uint64_t q : {2, 3, 5, 7, 11, 13}) {
      for (std::uint64_t a = 1; a < q; ++a) worst = std::max(worst, std::abs(sw_ratio(t7, 10000000, q, a).ratio - 1));
    }
    return Outcome{pi_ok && partition && worst <= 0.05,
                   "pi(10^6) = " + std::to_string(t6.pi(1000000)) + ", partitions " + (partition ? "exact" : "broken") +
                       ", max |ratio - 1| = " + fmt(worst)};
  });

  criterion(8, "prime-time equidistribution trend", 600.0, [&] {
    ExperimentConfig c;
    c.level_lo = 2;
    c.level_hi = 6;
    c.d = 0.3;
    c.max_horizon = 10000000;
    c.tests = default_test_set(f);
    c.starts = default_start_grid(f);
    auto table = sieve(experiment_max_horizon(c, cf));
    auto res = run_experiment(c, f, cf, table);
    auto t = trend_summary(res);
    std::string pairs;
    for (auto [a, b] : t.improving_pairs) pairs += std::to_string(a) + "->" + std::to_string(b) + " ";
    return Outcome{t.pass, "improving pairs: " + (pairs.empty() ? std::string("none ") : pairs) +
                               "constant gaps " + (t.constant_gaps_zero ? "exactly 0" : "nonzero")};
  });

  criterion(9, "run-all determinism", 0, [] {
    fs::path dir = fs::temp_directory_path() / "primeorbit_acceptance_run";
    fs::remove_all(dir);
    fs::create_directories(dir);
    RunConfig c;
    c.output_dir = (dir / "out").string();
    fs::path conf = dir / "run.conf";
    std::ofstream(conf) << serialize_config(c);
    std::string cmd = std::string("\"") + PRIMEORBIT_CLI + "\" run-all --config \"" + conf.string() + "\" > \"" +
                      (dir / "log.txt").string() + "\" 2>&1";
    int first = std::system(cmd.c_str());
    auto a = read_dir(c.output_dir);
    int second = std::system(cmd.c_str());
    auto b = read_dir(c.output_dir);
    bool same = a == b && a.size() == 5;
    return Outcome{first == 0 && second == 0 && same,
                   std::to_string(a.size()) + " artifacts, " + (same ? "byte-identical" : "different") +
                       ", exit codes " + std::to_string(first) + "/" + std::to_string(second)};
  });

  return failures == 0 ? 0 : 1;
}
