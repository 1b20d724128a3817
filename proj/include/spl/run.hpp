#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spl/config.hpp"

namespace spl {

enum class RunStatus : int {
  Ok = 0,
  SolverFailure = 1,
  ConfigError = 2,
  CertificateFailure = 3,
};

// Full run artifact: a report with a fixed certificate schema plus the field
// tables to be written as CSV. Identical config and seed reproduce the report
// byte-for-byte except for the "timings" subtree.
struct RunOutput {
  nlohmann::ordered_json report;
  RunStatus status = RunStatus::Ok;
  // (file name, CSV content) pairs
  std::vector<std::pair<std::string, std::string>> files;
};

// Certificate keys emitted for each case; reports always carry the complete
// set for their case, with {"pass": bool, ...} payloads.
const std::vector<std::string>& case1_certificate_keys();
const std::vector<std::string>& case2_certificate_keys();

RunOutput run_solve(const RunConfig& cfg);

// Writes report.json and the CSV files into `dir` (created if needed).
void write_outputs(const RunOutput& out, const std::string& dir);

}  // namespace spl
