#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spl {

// Parsed run configuration. The on-disk format is a small TOML subset:
// top-level `key = value` pairs, `[section]` tables, inline tables
// `{k = v, ...}`, strings, numbers, booleans and `#` comments. Unknown keys
// are rejected; every violation is reported, not only the first.
struct DomainConfig {
  std::string kind = "interval";
  double a = -1.0, b = 1.0;
  double ax = 0.0, ay = 0.0, bx = 1.0, by = 1.0;
  double cx = 0.0, cy = 0.0, radius = 1.0;
};

struct WeightConfig {
  std::string kind = "constant";
  double value = 1.0;
  double alpha = 0.0;
  std::string path;
  double s = -1.0;        // integrability exponent; -1 = auto
  double morrey_q = -1.0; // -1 = auto (n + 1)
  double morrey_alpha = -1.0;
};

struct FConfig {
  std::string kind = "affine";  // affine | power_shift | table
  double c0 = 1.0, c1 = 0.0;
  double beta = 0.0;
  std::string path;
};

struct ToleranceConfig {
  double defect = 1e-8;
  double residual = 1e-6;
  double continuation = 1e-7;
  double solver = 1e-11;
  double minimize = 1e-10;
};

struct RunConfig {
  std::string case_id = "I";
  uint64_t seed = 0;
  std::string out = "out";

  DomainConfig domain;
  int resolution = 128;
  WeightConfig weight;

  double p = 2.0, q = 0.5;
  double lambda = 1.0;
  bool lambda_auto = false;  // case II: lambda = Lambda_est / 10
  FConfig f;                 // case I profile
  double r = 3.0, k = 0.5;   // case II
  int eps_first = 1, eps_last = 20;

  ToleranceConfig tol;
};

struct ParseResult {
  RunConfig config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

ParseResult parse_config_file(const std::string& path);
ParseResult parse_config_text(const std::string& text);

// Semantic checks alone (every violated bound reported by name); parse_*
// runs them automatically, the CLI reruns them after flag overrides.
std::vector<std::string> validate_config(const RunConfig& cfg);

}  // namespace spl
