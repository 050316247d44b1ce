#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

// Subcommand dispatch and the machine-readable report. JSON is the single
// machine-readable output (schema_version "1"); text mode is a human
// rendering of the same structure. Fields irrelevant to a subcommand are
// omitted, never null-padded. Numbers are serialized in shortest
// round-trip form, so no precision is lost on re-parse.

namespace copdiv {

struct RunConfig {
  std::string subcommand;  // fit | test | power | samplesize | sample | simulate
  std::string data_path;
  std::string family = "clayton";
  std::string divergence = "kl-m";
  double alpha = 0.05;
  double beta = 0.8;
  std::vector<double> theta;  // repeatable; built-ins use theta[0]
  long long n = 0;
  long long reps = 0;
  std::optional<std::uint64_t> seed;
  int quad_order = 64;
  std::string pseudo_mode = "divide-by-n-plus-1";  // or "divide-by-n"
  double clamp_eps = 1e-12;
  double tol = 1e-8;
  int multistart = 16;
  std::string output = "json";  // json | text
  std::string out_path;         // empty = stdout
  std::string mode = "null";    // simulate: null | alternative
  int threads = 0;
};

using Report = nlohmann::json;

// Comma-delimited, exactly two numeric columns, optional single header row
// (detected by a non-numeric first row). Errors carry the offending line
// number.
std::vector<std::array<double, 2>> ingest_csv(const std::string& path);

// Runs the subcommand and assembles the report. Throws on invalid
// configuration or computation errors; never aborts the process itself.
Report dispatch(const RunConfig& config);

// Human rendering of the same report structure.
std::string render_text(const Report& report);

}  // namespace copdiv
