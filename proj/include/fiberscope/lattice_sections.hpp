#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fiberscope {

/// Center lattice data for the Heisenberg group H^d.
///
/// The center lattice is c*Z, the refined lattice is (c/N)*Z. Their annihilators in the
/// dual of the center are (1/c)*Z and (N/c)*Z.
struct LatticeConfig {
  double center_spacing = 1.0;
  int refinement = 1;
  int d = 1;

  void validate() const;

  double refined_spacing() const { return center_spacing / refinement; }
  double dual_spacing() const;          // 1/c
  double refined_dual_spacing() const;  // N/c
  /// Measure of the section [0, 1/c) of the dual modulo the annihilator.
  double section_measure() const { return dual_spacing(); }

  bool operator==(const LatticeConfig&) const = default;
};

/// Annihilator spacing of spacing*Z inside the dual of R, i.e. 1/spacing.
double annihilator(double lattice_spacing);

/// Cell-centred discretisation of the section [0, 1/c).
class SectionGrid {
 public:
  SectionGrid() = default;
  SectionGrid(double section_length, std::size_t num_points);

  std::size_t size() const { return points_.size(); }
  double point(std::size_t s) const { return points_[s]; }
  const std::vector<double>& points() const { return points_; }
  double cell_measure() const { return cell_measure_; }
  double section_length() const { return section_length_; }
  /// Left edge of cell s.
  double cell_lower(std::size_t s) const { return static_cast<double>(s) * cell_measure_; }

  bool operator==(const SectionGrid&) const = default;

 private:
  double section_length_ = 0.0;
  double cell_measure_ = 0.0;
  std::vector<double> points_;
};

/// Residue representatives {0..N-1} together with the truncated fiber band [-K*N, K*N).
class ResidueSystem {
 public:
  ResidueSystem() = default;
  ResidueSystem(int refinement, int band_half_width);

  /// Arbitrary residue list; used to exercise the tiling verifier on broken sections.
  static ResidueSystem with_residues(int refinement, int band_half_width, std::vector<int> residues);

  int refinement() const { return refinement_; }
  int band_half_width() const { return band_half_width_; }
  const std::vector<int>& residues() const { return residues_; }

  int band_begin() const { return -band_half_width_ * refinement_; }
  int band_end() const { return band_half_width_ * refinement_; }
  std::size_t band_size() const { return static_cast<std::size_t>(band_end() - band_begin()); }
  /// Fiber index n of band slot i.
  int band_index(std::size_t slot) const { return band_begin() + static_cast<int>(slot); }
  std::size_t slot_of(int n) const { return static_cast<std::size_t>(n - band_begin()); }
  bool in_band(int n) const { return n >= band_begin() && n < band_end(); }

  /// Canonical residue of n in [0, N).
  int residue_of(int n) const;
  bool contains_residue(int j) const;
  /// Band members congruent to j modulo N, ascending.
  std::vector<int> class_members(int j) const;

  bool operator==(const ResidueSystem&) const = default;

 private:
  int refinement_ = 1;
  int band_half_width_ = 1;
  std::vector<int> residues_;
};

struct Sections {
  SectionGrid grid;
  ResidueSystem residues;
};

Sections build_sections(const LatticeConfig& config, std::size_t num_points, int band_half_width);

struct TilingViolation {
  enum class Kind { overlap, gap };
  Kind kind;
  int fiber_index;      // n
  std::size_t cell;     // s
  double lower_edge;    // left edge of the offending cell in the dual of the center
  int cover_count;
};

struct TilingReport {
  bool holds = false;
  std::size_t window_cells = 0;
  std::size_t covered_cells = 0;  // sum of cover counts
  std::vector<TilingViolation> violations;
  std::string section_issue;      // non-empty if the grid itself does not tile [0, 1/c)
};

/// Checks that the translates Sigma + j + (N/c)Z, j in the residue list, restricted to the
/// window [-K*N/c, K*N/c), cover every window cell exactly once.
TilingReport tiling_check(const SectionGrid& grid, const ResidueSystem& residues);

std::string to_string(TilingViolation::Kind kind);

}  // namespace fiberscope
