#include "primeorbit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "primeorbit/format.hpp"

namespace primeorbit {

namespace {

constexpr const char* kModule = "config";

// Thrown by value parsers; the caller adds the position.
struct BadValue {
  std::string message;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_uint(const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec == std::errc() && ptr == v.data() + v.size()) return out;
  // 1e7 style, only when the value is an exact integer.
  double d = 0;
  auto [p2, e2] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (e2 == std::errc() && p2 == v.data() + v.size() && d >= 0 && d < 0x1p64 && d == std::floor(d)) {
    return static_cast<std::uint64_t>(d);
  }
  throw BadValue{"expected a nonnegative integer, got '" + v + "'"};
}

double parse_real(const std::string& v) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw BadValue{"expected a finite number, got '" + v + "'"};
  }
  return out;
}

std::string parse_string(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

struct Field {
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field real_field(const char* name, T RunConfig::*m) {
  return {name, [m](RunConfig& c, const std::string& v) { c.*m = parse_real(v); },
          [m](const RunConfig& c) { return format_double(c.*m); }};
}

template <class T>
Field uint_field(const char* name, T RunConfig::*m) {
  return {name, [m](RunConfig& c, const std::string& v) { c.*m = static_cast<T>(parse_uint(v)); },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

Field string_field(const char* name, std::string RunConfig::*m) {
  return {name, [m](RunConfig& c, const std::string& v) { c.*m = parse_string(v); },
          [m](const RunConfig& c) { return quote(c.*m); }};
}

Field range_field(const char* name, LevelRange RunConfig::*m) {
  return {name,
          [m](RunConfig& c, const std::string& v) {
            try {
              c.*m = parse_level_range(parse_string(v));
            } catch (const Error& e) {
              throw BadValue{e.detail()};
            }
          },
          [m](const RunConfig& c) { return format_level_range(c.*m); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      real_field("c0", &RunConfig::c0),
      real_field("delta", &RunConfig::delta),
      real_field("d", &RunConfig::d),
      string_field("bits", &RunConfig::bits),
      uint_field("levels", &RunConfig::levels),
      string_field("roof", &RunConfig::roof),
      real_field("roof.mean", &RunConfig::roof_mean),
      real_field("roof.amplitude", &RunConfig::roof_amplitude),
      real_field("roof.rate", &RunConfig::roof_rate),
      real_field("roof.phase", &RunConfig::roof_phase),
      uint_field("roof.harmonics", &RunConfig::harmonics),
      string_field("roof.file", &RunConfig::roof_file),
      real_field("reparam.mean", &RunConfig::reparam_mean),
      string_field("reparam.modes", &RunConfig::reparam_modes),
      uint_field("max_steps", &RunConfig::max_steps),
      uint_field("max_horizon", &RunConfig::max_horizon),
      uint_field("sieve_limit", &RunConfig::sieve_limit),
      uint_field("sieve_segment", &RunConfig::sieve_segment),
      uint_field("max_threshold_bits", &RunConfig::max_threshold_bits),
      uint_field("k_cap", &RunConfig::k_cap),
      uint_field("workers", &RunConfig::workers),
      uint_field("grid.x", &RunConfig::grid_x),
      uint_field("grid.lemma4", &RunConfig::lemma4_grid),
      uint_field("lemma4.kmax", &RunConfig::lemma4_kmax),
      uint_field("closed_form.kmax", &RunConfig::closed_form_kmax),
      uint_field("grid.bases", &RunConfig::start_bases),
      uint_field("grid.heights", &RunConfig::start_heights),
      range_field("checks.levels", &RunConfig::check_levels),
      range_field("experiment.levels", &RunConfig::experiment_levels),
      real_field("tol", &RunConfig::tol),
      {"mode",
       [](RunConfig& c, const std::string& v) {
         auto s = parse_string(v);
         if (s == "full") {
           c.mode = RunMode::Full;
         } else if (s == "check-only") {
           c.mode = RunMode::CheckOnly;
         } else {
           throw BadValue{"expected 'full' or 'check-only', got '" + s + "'"};
         }
       },
       [](const RunConfig& c) { return std::string(c.mode == RunMode::Full ? "full" : "check-only"); }},
      string_field("output.dir", &RunConfig::output_dir),
  };
  return f;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (key == f.name) return &f;
  }
  return nullptr;
}

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw ConfigError(ErrorKind::Validation, field, 0, 0, field + ": " + message);
}

}  // namespace

ConfigError::ConfigError(ErrorKind kind, std::string field, std::size_t line, std::size_t column,
                         const std::string& message)
    : Error(kind, kModule, message), field_(std::move(field)), line_(line), column_(column) {}

std::size_t osa_distance(const std::string& a, const std::string& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    }
  }
  return d[n][m];
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.name);
  return out;
}

LevelRange parse_level_range(const std::string& text) {
  auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      auto v = parse_uint(trim(text));
      return {v, v};
    }
    return {parse_uint(trim(text.substr(0, dots))), parse_uint(trim(text.substr(dots + 2)))};
  } catch (const BadValue&) {
    throw Error(ErrorKind::Parse, kModule, "expected a level range like 2..5, got '" + text + "'");
  }
}

std::string format_level_range(const LevelRange& r) { return std::to_string(r.lo) + ".." + std::to_string(r.hi); }

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::vector<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    std::size_t key_col = line.find_first_not_of(" \t") + 1;
    if (eq == std::string::npos) {
      throw ConfigError(ErrorKind::Parse, "", line_no, key_col,
                        "line " + std::to_string(line_no) + ", column " + std::to_string(key_col) +
                            ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto at = [&](std::size_t col) {
      return "line " + std::to_string(line_no) + ", column " + std::to_string(col) + ": ";
    };
    if (key.empty()) throw ConfigError(ErrorKind::Parse, "", line_no, eq + 1, at(eq + 1) + "missing key");
    const Field* f = find_field(key);
    if (!f) {
      std::string msg = at(key_col) + "unknown key '" + key + "'";
      for (const auto& k : config_keys()) {
        if (osa_distance(key, k) == 1) {
          msg += "; did you mean '" + k + "'?";
          break;
        }
      }
      throw ConfigError(ErrorKind::Parse, key, line_no, key_col, msg);
    }
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError(ErrorKind::Parse, key, line_no, key_col, at(key_col) + "duplicate key '" + key + "'");
    }
    seen.push_back(key);
    std::size_t value_col = line.find_first_not_of(" \t", eq + 1);
    value_col = value_col == std::string::npos ? line.size() + 1 : value_col + 1;
    if (value.empty()) {
      throw ConfigError(ErrorKind::Parse, key, line_no, value_col, at(value_col) + "missing value for '" + key + "'");
    }
    try {
      f->set(c, value);
    } catch (const BadValue& b) {
      throw ConfigError(ErrorKind::Parse, key, line_no, value_col, at(value_col) + key + ": " + b.message);
    }
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, kModule, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const RunConfig& c) {
  if (!(c.c0 > 0)) invalid("c0", "must be positive");
  if (!(c.delta > 0)) invalid("delta", "must be positive");
  if (!(c.d > 0)) invalid("d", "must be positive");
  if (!(c.d < c.delta)) invalid("d", "must be below delta (" + format_double(c.d) + " >= " + format_double(c.delta) + ")");
  if (c.levels < 2) invalid("levels", "need at least 2 levels");
  if (c.bits.find_first_not_of("01") != std::string::npos) invalid("bits", "only 0 and 1 are allowed");
  if (c.bits.size() < c.levels) invalid("bits", "needs one entry per level");
  if (c.roof != "default" && c.roof != "geometric" && c.roof != "file" && c.roof != "reparam") {
    invalid("roof", "expected default, geometric, file or reparam");
  }
  if (c.roof == "file") {
    if (c.roof_file.empty()) invalid("roof.file", "required when roof = file");
    if (!std::filesystem::exists(c.roof_file)) invalid("roof.file", "no such file '" + c.roof_file + "'");
  }
  if (!(c.roof_mean > 0)) invalid("roof.mean", "must be positive");
  if (!(c.roof_amplitude >= 0)) invalid("roof.amplitude", "must be nonnegative");
  if (!(c.roof_rate > 0)) invalid("roof.rate", "must be positive");
  if (c.harmonics < 1) invalid("roof.harmonics", "must be positive");
  if (!(c.reparam_mean > 0)) invalid("reparam.mean", "must be positive");
  const std::pair<const char*, std::uint64_t> budgets[] = {
      {"max_steps", c.max_steps},
      {"max_horizon", c.max_horizon},
      {"sieve_limit", c.sieve_limit},
      {"sieve_segment", c.sieve_segment},
      {"max_threshold_bits", c.max_threshold_bits},
      {"k_cap", c.k_cap},
      {"workers", c.workers},
      {"grid.x", c.grid_x},
      {"grid.lemma4", c.lemma4_grid},
      {"lemma4.kmax", c.lemma4_kmax},
      {"closed_form.kmax", c.closed_form_kmax},
      {"grid.bases", c.start_bases},
      {"grid.heights", c.start_heights},
  };
  for (auto [name, v] : budgets) {
    if (v == 0) invalid(name, "must be positive");
  }
  if (c.check_levels.lo < 2 || c.check_levels.lo > c.check_levels.hi || c.check_levels.hi + 1 > c.levels) {
    invalid("checks.levels", "need 2 <= lo <= hi <= levels - 1");
  }
  if (c.experiment_levels.lo < 2 || c.experiment_levels.lo >= c.experiment_levels.hi ||
      c.experiment_levels.hi > c.levels) {
    invalid("experiment.levels", "need 2 <= lo < hi <= levels");
  }
  if (!(c.tol > 0)) invalid("tol", "must be positive");
  if (c.output_dir.empty()) invalid("output.dir", "must not be empty");
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.name;
    out += " = ";
    out += f.get(c);
    out += '\n';
  }
  return out;
}

void apply_env_overrides(RunConfig& c, const EnvLookup& lookup) {
  const std::pair<const char*, std::uint64_t RunConfig::*> vars[] = {
      {"PRIMEORBIT_MAX_STEPS", &RunConfig::max_steps},
      {"PRIMEORBIT_MAX_HORIZON", &RunConfig::max_horizon},
      {"PRIMEORBIT_SIEVE_LIMIT", &RunConfig::sieve_limit},
  };
  for (auto [name, m] : vars) {
    const char* v = lookup(name);
    if (!v) continue;
    try {
      std::uint64_t x = parse_uint(trim(v));
      if (x == 0) throw BadValue{"must be positive"};
      c.*m = x;
    } catch (const BadValue& b) {
      throw ConfigError(ErrorKind::Parse, name, 0, 0, std::string(name) + ": " + b.message);
    }
  }
}

void apply_env_overrides(RunConfig& c) {
  apply_env_overrides(c, [](const char* n) -> const char* { return std::getenv(n); });
}

}  // namespace primeorbit
