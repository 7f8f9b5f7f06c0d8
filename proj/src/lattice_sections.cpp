#include "fiberscope/lattice_sections.hpp"

#include <algorithm>
#include <cmath>

#include "fiberscope/errors.hpp"

namespace fiberscope {

void LatticeConfig::validate() const {
  if (!(center_spacing > 0.0) || !std::isfinite(center_spacing))
    throw InvalidConfig("center spacing must be positive");
  if (refinement < 1) throw InvalidConfig("refinement N must be >= 1");
  if (d < 1) throw InvalidConfig("Heisenberg dimension d must be >= 1");
}

double LatticeConfig::dual_spacing() const { return annihilator(center_spacing); }

double LatticeConfig::refined_dual_spacing() const { return annihilator(refined_spacing()); }

double annihilator(double lattice_spacing) {
  if (!(lattice_spacing > 0.0) || !std::isfinite(lattice_spacing))
    throw InvalidConfig("lattice spacing must be positive, got " + std::to_string(lattice_spacing));
  return 1.0 / lattice_spacing;
}

SectionGrid::SectionGrid(double section_length, std::size_t num_points)
    : section_length_(section_length) {
  if (num_points == 0) throw InvalidConfig("section grid needs S >= 1 points");
  if (!(section_length > 0.0)) throw InvalidConfig("section length must be positive");
  cell_measure_ = section_length / static_cast<double>(num_points);
  points_.resize(num_points);
  for (std::size_t s = 0; s < num_points; ++s)
    points_[s] = (static_cast<double>(s) + 0.5) * cell_measure_;
}

ResidueSystem::ResidueSystem(int refinement, int band_half_width)
    : refinement_(refinement), band_half_width_(band_half_width) {
  if (refinement < 1) throw InvalidConfig("refinement N must be >= 1");
  if (band_half_width < 1) throw InvalidConfig("band half width K must be >= 1");
  residues_.resize(static_cast<std::size_t>(refinement));
  for (int j = 0; j < refinement; ++j) residues_[static_cast<std::size_t>(j)] = j;
}

ResidueSystem ResidueSystem::with_residues(int refinement, int band_half_width,
                                           std::vector<int> residues) {
  ResidueSystem out(refinement, band_half_width);
  out.residues_ = std::move(residues);
  return out;
}

int ResidueSystem::residue_of(int n) const {
  const int r = n % refinement_;
  return r < 0 ? r + refinement_ : r;
}

bool ResidueSystem::contains_residue(int j) const {
  return std::find(residues_.begin(), residues_.end(), j) != residues_.end();
}

std::vector<int> ResidueSystem::class_members(int j) const {
  std::vector<int> out;
  for (int n = band_begin(); n < band_end(); ++n)
    if (residue_of(n) == residue_of(j)) out.push_back(n);
  return out;
}

Sections build_sections(const LatticeConfig& config, std::size_t num_points, int band_half_width) {
  config.validate();
  if (band_half_width < 1) throw InvalidConfig("band half width K must be >= 1");
  return {SectionGrid(config.section_measure(), num_points),
          ResidueSystem(config.refinement, band_half_width)};
}

TilingReport tiling_check(const SectionGrid& grid, const ResidueSystem& residues) {
  TilingReport report;
  const std::size_t S = grid.size();
  const std::size_t band = residues.band_size();
  report.window_cells = S * band;

  // The grid cells [s*h, (s+1)*h) must partition [0, 1/c) with every centre strictly inside.
  double total = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    total += grid.cell_measure();
    const double p = grid.point(s);
    if (!(p > 0.0 && p < grid.section_length())) {
      report.section_issue = "grid point " + std::to_string(s) + " outside (0, 1/c)";
      break;
    }
  }
  if (report.section_issue.empty() &&
      std::abs(total - grid.section_length()) > 1e-12 * grid.section_length())
    report.section_issue = "cell measures do not sum to the section measure";

  // Cell (s, n) is Sigma-cell s translated by n/c; residue j together with the refined
  // annihilator N/c * Z reaches exactly the band members n = j (mod N).
  std::vector<int> cover(S * band, 0);
  const int N = residues.refinement();
  for (const int j : residues.residues()) {
    for (int n = residues.band_begin(); n < residues.band_end(); ++n) {
      if (((n - j) % N + N) % N != 0) continue;
      const std::size_t slot = residues.slot_of(n);
      for (std::size_t s = 0; s < S; ++s) ++cover[slot * S + s];
    }
  }

  for (std::size_t slot = 0; slot < band; ++slot) {
    const int n = residues.band_index(slot);
    for (std::size_t s = 0; s < S; ++s) {
      const int count = cover[slot * S + s];
      report.covered_cells += static_cast<std::size_t>(count);
      if (count == 1) continue;
      const double lower = grid.cell_lower(s) + n * grid.section_length();
      report.violations.push_back({count == 0 ? TilingViolation::Kind::gap : TilingViolation::Kind::overlap,
                                   n, s, lower, count});
    }
  }
  report.holds = report.violations.empty() && report.section_issue.empty();
  return report;
}

std::string to_string(TilingViolation::Kind kind) {
  return kind == TilingViolation::Kind::gap ? "gap" : "overlap";
}

}  // namespace fiberscope
