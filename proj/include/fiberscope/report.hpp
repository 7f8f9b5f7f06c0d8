#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fiberscope/config.hpp"

namespace fiberscope {

using Json = nlohmann::ordered_json;

/// Exit codes shared by the library runner and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerdictFalse = 2;

struct RunResult {
  Json report;
  int exit_code = kExitError;
  std::vector<FiberField> generators;  // kept for dumps
};

/// Runs the requested analyses in the fixed order of analysis_order(). Module errors do not
/// escape: they end the run, land in report["error"] and give exit code 1.
RunResult run(const RunConfig& config);

/// Fiberizes every sampled-file generator and checks Plancherel and intertwining.
RunResult run_transform(const RunConfig& config);

/// 0 if every verdict recorded in the report is true, 2 if any is false, 1 on error.
int exit_code_for(const Json& report);

struct OutputOptions {
  bool json = true;
  bool csv = true;
};

/// report.json, the CSV plot data and (if config.dumps) one FIBF file per generator.
void write_outputs(const RunResult& result, const RunConfig& config, const std::filesystem::path& dir,
                   const OutputOptions& options = {});

/// dimension.csv (sigma, dim_W, dim_V0..dim_V{N-1}) and occupancy_<g>.csv (rows s, columns band
/// index n, HS block norms). Headers are written even when there is no data.
void emit_plotdata(const Json& report, const std::filesystem::path& dir);

/// One line per analysis with its verdict and headline numbers.
void print_summary(const Json& report, std::ostream& out);

/// Report with the generated_at field removed; the part covered by the determinism contract.
Json deterministic_part(Json report);

}  // namespace fiberscope
