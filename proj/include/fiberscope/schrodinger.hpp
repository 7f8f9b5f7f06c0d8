#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace fiberscope {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Point (x, y, w) of H^d in exponential coordinates.
///
/// Composition is the polarized law (x, y, w)(x', y', w') = (x + x', y + y', w + w' + x.y').
/// Under this law the Schrodinger formula below is a representation.
struct GroupElement {
  std::vector<double> x;
  std::vector<double> y;
  double w = 0.0;

  static GroupElement identity(int d);
  static GroupElement central(int d, double w);

  int dim() const { return static_cast<int>(x.size()); }
  GroupElement inverse() const;

  bool operator==(const GroupElement&) const = default;
};

GroupElement group_multiply(const GroupElement& g, const GroupElement& h);

/// Grid model of L^2(R^d): points_per_axis samples per axis on [-L/2, L/2), circular shifts.
///
/// For d = 1 the representation space has dimension M = points_per_axis; in general M^d.
class RepGrid {
 public:
  RepGrid() = default;
  RepGrid(int d, std::size_t points_per_axis, double window);

  int d() const { return d_; }
  std::size_t points_per_axis() const { return points_per_axis_; }
  std::size_t dimension() const { return dimension_; }
  double window() const { return window_; }
  double step() const { return window_ / static_cast<double>(points_per_axis_); }
  double sample(std::size_t m) const { return -0.5 * window_ + static_cast<double>(m) * step(); }

  /// Number of grid steps represented by a translation amount; throws GridMismatch if off-grid.
  long shift_steps(double amount) const;
  bool on_grid(double amount) const;

  bool operator==(const RepGrid&) const = default;

 private:
  int d_ = 1;
  std::size_t points_per_axis_ = 1;
  std::size_t dimension_ = 1;
  double window_ = 1.0;
};

/// pi_lambda(g) on a RepGrid, stored as (phase per row, source column per row).
///
/// The matrix has exactly one nonzero per row: U[m, source[m]] = phase[m].
class RepOperator {
 public:
  RepOperator(double lambda, const GroupElement& g, const RepGrid& grid);

  CMatrix matrix() const;
  /// U * block without forming U.
  CMatrix apply_left(const CMatrix& block) const;

 private:
  std::vector<Complex> phase_;
  std::vector<std::size_t> source_;
};

/// Matrix of pi_lambda(g) f(v) = e^{2 pi i lambda w} e^{-2 pi i lambda y.v} f(v - x) in the
/// grid basis. Exactly unitary.
CMatrix rep_matrix(double lambda, const GroupElement& g, const RepGrid& grid);

/// |Pf(sigma)|^{1/2} = |sigma|^{d/2}; throws CrossSectionViolation at sigma == 0.
double pfaffian_weight(double sigma, int d);

/// Finite translation set {(a m, b n, 0)} with integer d-vectors (m, n).
class GammaSet {
 public:
  using IndexPair = std::pair<std::vector<int>, std::vector<int>>;

  GammaSet() = default;
  GammaSet(double a, double b, std::vector<IndexPair> pairs);

  /// {(0, 0)} in dimension d.
  static GammaSet trivial(int d);

  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<IndexPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  int d() const;

  GroupElement element(std::size_t i) const;
  std::vector<GroupElement> elements() const;

  /// Throws InvalidConfig unless a*b is an integer, the identity pair is present, and all pairs
  /// share one dimension.
  void validate() const;
  /// Additionally requires every x-translation a*m to lie on the grid.
  void validate_against(const RepGrid& grid) const;

 private:
  double a_ = 1.0;
  double b_ = 1.0;
  std::vector<IndexPair> pairs_;
};

}  // namespace fiberscope
