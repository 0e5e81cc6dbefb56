#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace primeorbit {

struct DiophantineParams {
  double c0 = 1.0;
  double delta = 0.5;
  double d = 0.3;

  void validate() const;
};

struct RationalInterval {
  mpq_class lo;
  mpq_class hi;

  bool contains(const mpq_class& v) const { return lo <= v && v <= hi; }
  mpq_class width() const { return hi - lo; }
};

// alpha = [0; 1, a_1, a_2, ...], so that q_0 = q_1 = 1 and
// q_{n+1} = a_n q_n + q_{n-1}. quotients[i] holds a_{i+1}.
class ContinuedFraction {
 public:
  ContinuedFraction() = default;

  std::size_t levels() const { return quotients_.size(); }
  const std::vector<mpz_class>& quotients() const { return quotients_; }
  const std::vector<mpz_class>& numerators() const { return p_; }
  const std::vector<mpz_class>& denominators() const { return q_; }

  // a_n for 1 <= n <= levels().
  const mpz_class& a(std::size_t n) const;
  // p_n, q_n for 0 <= n <= levels() + 1.
  const mpz_class& p(std::size_t n) const;
  const mpz_class& q(std::size_t n) const;
  mpq_class convergent(std::size_t n) const;

  // [p_N/q_N, p_{N+1}/q_{N+1}] in increasing order; alpha lies strictly inside.
  const RationalInterval& value_interval() const { return interval_; }
  // Closure of the set of irrationals whose expansion starts with the stored
  // quotients: between p_{N+1}/q_{N+1} and the mediant
  // (p_{N+1} + p_N)/(q_{N+1} + q_N). A subset of value_interval().
  const RationalInterval& cylinder() const { return cylinder_; }
  mpq_class midpoint() const { return (cylinder_.lo + cylinder_.hi) / 2; }

  friend ContinuedFraction convergents(const std::vector<mpz_class>& quotients);

 private:
  std::vector<mpz_class> quotients_;
  std::vector<mpz_class> p_;
  std::vector<mpz_class> q_;
  RationalInterval interval_;
  RationalInterval cylinder_;
};

ContinuedFraction convergents(const std::vector<mpz_class>& quotients);
ContinuedFraction convergents(const std::vector<std::uint64_t>& quotients);

struct SearchLimits {
  // Threshold c0 e^{delta q_n} may not exceed 2^max_threshold_bits.
  unsigned max_threshold_bits = 4096;
  std::uint64_t max_candidates = 1000000000;
};

struct ConstructionLevel {
  std::size_t n = 0;
  mpz_class a;
  mpz_class q_next;
  std::uint64_t candidates_tested = 0;
  bool deterministic = true;
};

struct Construction {
  ContinuedFraction cf;
  std::vector<ConstructionLevel> trace;
};

// bits[n-1] selects the smallest (0) or second smallest (1) admissible a_n.
Construction construct_alpha_in_D(const DiophantineParams& params, const std::vector<int>& bits,
                                  std::size_t levels, const SearchLimits& limits = {});

std::vector<int> parse_bits(const std::string& text);

enum class Verdict { Pass, Fail, Undetermined, NotApplicable };
std::string to_string(Verdict v);

struct DiophantineLevelCheck {
  std::size_t n = 0;
  // Primality of q_n; not applicable below n = 2.
  Verdict prime = Verdict::NotApplicable;
  bool prime_deterministic = true;
  // q_{n+1} >= c0 e^{delta q_n}, decided with directed rounding; not
  // applicable at n = 0 where the construction has no freedom.
  Verdict growth = Verdict::NotApplicable;
  double growth_ratio = 0.0;
  // |q_n alpha - p_n| in (1/(2 q_{n+1}), 1/q_{n+1}) for every alpha in the cylinder.
  Verdict bracket = Verdict::Pass;
};

struct DiophantineReport {
  std::vector<DiophantineLevelCheck> levels;
  bool determinant_ok = true;
  bool all_pass() const;
};

DiophantineReport verify_diophantine(const ContinuedFraction& cf, const DiophantineParams& params,
                                     std::size_t from_level);

// Certified interval containing ||k alpha||.
RationalInterval nearest_integer_distance(std::int64_t k, const ContinuedFraction& cf);
RationalInterval nearest_integer_distance(const mpz_class& k, const ContinuedFraction& cf);

// +1 when q_next >= c0 e^{delta q_n}, -1 when below, 0 if precision ran out.
int compare_growth(const mpz_class& q_next, const mpz_class& q_n, const DiophantineParams& params,
                   unsigned max_bits = 1 << 16);

// floor(c0 e^{delta q}) exactly; Budget error above 2^max_bits.
mpz_class growth_threshold_floor(const mpz_class& q, const DiophantineParams& params, unsigned max_bits);
// log2(c0 e^{delta q}) to a few bits, without overflow.
double growth_threshold_log2(const mpz_class& q, const DiophantineParams& params);

nlohmann::json cf_to_json(const ContinuedFraction& cf, const std::optional<DiophantineParams>& params,
                          const std::string& bits = {});
ContinuedFraction cf_from_json(const nlohmann::json& j);
std::optional<DiophantineParams> params_from_json(const nlohmann::json& j);

}  // namespace primeorbit
