#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "primeorbit/character_sums.hpp"
#include "primeorbit/config.hpp"
#include "primeorbit/continued_fraction.hpp"
#include "primeorbit/reparam.hpp"
#include "primeorbit/roof.hpp"
#include "primeorbit/special_flow.hpp"

namespace primeorbit {

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunOutcome {
  int exit_code = 0;
  // File names written under output.dir, in write order.
  std::vector<std::string> artifacts;
  std::vector<CheckOutcome> checks;
  // Same content as failures.json.
  nlohmann::json failures = nlohmann::json::array();
};

// Roof selected by the config, normalized to mean 1.
AnalyticRoof build_roof(const RunConfig& c, const ContinuedFraction& cf);

// "m,n,re,im;..." into torus modes.
std::vector<TorusMode> parse_torus_modes(const std::string& text);

// level,k,statistic,bound,pass then the remaining Lemma4Row fields.
std::string lemma4_csv(const std::vector<Lemma4Row>& rows);

struct DeviationRow {
  std::size_t level = 0;
  std::uint64_t k_cap = 0;
  DeviationResult deviation;
  UniformSupResult uniform;
  NearReturnScan near_return;
  // C' e^{-c' q_n} from the fit, NaN when the fit failed.
  double fit_bound = 0.0;
};

struct DeviationTable {
  std::vector<DeviationRow> rows;
  BoundFit fit;
  // Empty when the fit succeeded.
  std::string fit_error;
};

// Grid deviation, uniform sup over K <= K_cap = min(floor(e^{d q_n}), k_cap)
// and near returns for each level.
DeviationTable deviation_table(const AnalyticRoof& f, const ContinuedFraction& cf, std::size_t level_lo,
                               std::size_t level_hi, std::size_t grid_size, double d, std::uint64_t k_cap,
                               std::uint64_t max_steps, const std::vector<FlowPoint>& starts, double tol);
std::string deviation_csv(const DeviationTable& t);

// alpha -> roof -> lemma checks -> primes -> experiment. Every artifact goes to
// output.dir; any failed check or error leaves failures.json and exit code 1.
RunOutcome run_all(const RunConfig& config);

}  // namespace primeorbit
