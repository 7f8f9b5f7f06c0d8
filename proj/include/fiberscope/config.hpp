#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fiberscope/invariance_suite.hpp"

namespace fiberscope {

/// One generator line: `gen = <kind> key=value ...`.
///
/// kind is random | residue | rank-one | zero | fiber-file | sampled-file. Without an explicit
/// seed the generator seed is derive_seed(run seed, generator index).
struct GeneratorSpec {
  std::string kind = "random";
  std::optional<std::uint64_t> seed;
  std::vector<int> residues;  // random / rank-one: classes that carry blocks, empty = all
  int residue = 0;            // residue
  std::string path;           // fiber-file / sampled-file

  bool operator==(const GeneratorSpec&) const = default;
};

inline const std::vector<std::string>& analysis_order() {
  static const std::vector<std::string> order{"tile-check", "range",   "oracle",  "containment",   "membership",
                                              "dimension",  "decompose", "measure", "support-bound", "beta"};
  return order;
}

struct RunConfig {
  // [lattice]
  int d = 1;
  double c = 1.0;
  int N = 1;
  // [grid]
  std::size_t S = 8;
  int K = 1;
  std::size_t M = 4;
  double L = 4.0;
  // [gamma]
  double a = 1.0;
  double b = 1.0;
  std::vector<GammaSet::IndexPair> pairs{{{0}, {0}}};
  // [generators]
  std::vector<GeneratorSpec> generators;
  // [tolerances]
  Tolerances tol;
  double plancherel_tol = 1e-2;
  double intertwining_tol = 1e-2;
  // [run]
  std::vector<std::string> analyses = analysis_order();
  std::uint64_t seed = 0;
  std::string out = "fiberscope-out";
  bool dumps = false;
  // [beta]
  std::size_t beta_phi = 0;
  std::string beta_target = "planted";  // "planted" or a generator index

  LatticeConfig lattice() const { return {c, N, d}; }
  GammaSet gamma() const { return {a, b, pairs}; }
  FiberShape shape() const { return FiberShape::make(lattice(), S, K, M, L); }
  std::uint64_t generator_seed(std::size_t index) const;
  bool requested(const std::string& analysis) const;

  /// Every constraint violation, in a stable order. Empty when the config is valid.
  std::vector<std::string> problems() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the line-based format. Throws ConfigError listing every problem found, syntax errors
/// with their line numbers first.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(render(c)) == c.
std::string render(const RunConfig& config);

}  // namespace fiberscope
