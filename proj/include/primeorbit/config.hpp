#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "primeorbit/error.hpp"

namespace primeorbit {

enum class RunMode { Full, CheckOnly };

struct LevelRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
  bool operator==(const LevelRange&) const = default;
};

struct RunConfig {
  double c0 = 1.0;
  double delta = 0.5;
  double d = 0.3;
  std::string bits = "000000";
  std::size_t levels = 6;

  // default | geometric | file | reparam
  std::string roof = "default";
  double roof_mean = 1.0;
  double roof_amplitude = 0.3;
  double roof_rate = 1.0;
  double roof_phase = 0.7;
  std::size_t harmonics = 32;
  std::string roof_file;
  double reparam_mean = 1.0;
  // "m,n,re,im;m,n,re,im;..."
  std::string reparam_modes = "1,0,0.05,0.02;0,1,0.03,0;1,1,0.01,-0.01";

  std::uint64_t max_steps = 1ull << 32;
  std::uint64_t max_horizon = 10000000;
  std::uint64_t sieve_limit = 1000000000;
  std::uint64_t sieve_segment = 1 << 20;
  std::uint64_t max_threshold_bits = 4096;
  std::uint64_t k_cap = 1000;
  std::uint64_t workers = 1;

  std::size_t grid_x = 32;
  std::size_t lemma4_grid = 64;
  std::uint64_t lemma4_kmax = 200;
  std::uint64_t closed_form_kmax = 20;
  std::size_t start_bases = 5;
  std::size_t start_heights = 3;

  LevelRange check_levels{2, 5};
  LevelRange experiment_levels{2, 6};
  double tol = 1e-9;
  RunMode mode = RunMode::Full;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

// Parse and validation failures. line/column are 1-based and 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(ErrorKind kind, std::string field, std::size_t line, std::size_t column, const std::string& message);
  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string field_;
  std::size_t line_;
  std::size_t column_;
};

// Flat "key = value" lines; '#' starts a comment. Unknown keys, duplicates and
// malformed values are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
void validate_config(const RunConfig& c);
std::string serialize_config(const RunConfig& c);

std::vector<std::string> config_keys();
// Optimal string alignment distance (adjacent transpositions count once).
std::size_t osa_distance(const std::string& a, const std::string& b);

using EnvLookup = std::function<const char*(const char*)>;
// PRIMEORBIT_MAX_STEPS, PRIMEORBIT_MAX_HORIZON, PRIMEORBIT_SIEVE_LIMIT.
void apply_env_overrides(RunConfig& c, const EnvLookup& lookup);
void apply_env_overrides(RunConfig& c);

LevelRange parse_level_range(const std::string& text);
std::string format_level_range(const LevelRange& r);

}  // namespace primeorbit
