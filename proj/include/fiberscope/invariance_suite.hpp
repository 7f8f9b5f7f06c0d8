#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fiberscope/range_analysis.hpp"

namespace fiberscope {

struct Tolerances {
  double rank = 1e-8;    // relative singular-value cut per sigma
  double member = 1e-8;  // membership verdict threshold on the max-over-sigma residual
  double supp = 1e-10;   // support indicator, relative to the generator's largest block norm
  double measure_slack = 1e-9;

  void validate() const;
  bool operator==(const Tolerances&) const = default;
};

/// Generators A, translation set Gamma and the fiber shape (which fixes N). Construction
/// precomputes the translated generators and the range function J of S(A).
class InvarianceProblem {
 public:
  InvarianceProblem(FiberShape shape, std::vector<FiberField> generators, GammaSet gamma, Tolerances tol = {});

  const FiberShape& shape() const { return shape_; }
  const std::vector<FiberField>& generators() const { return generators_; }
  const GammaSet& gamma() const { return gamma_; }
  const Tolerances& tolerances() const { return tol_; }
  int refinement() const { return shape_.lattice.refinement; }

  /// gamma_translate(phi, gamma), generator-major.
  const std::vector<FiberField>& translated() const { return translated_; }
  const RangeBasis& range() const { return range_; }

  /// Range function of V_j: span of translates of mask(phi, j).
  RangeBasis masked_range(int residue) const;

 private:
  FiberShape shape_;
  std::vector<FiberField> generators_;
  GammaSet gamma_;
  Tolerances tol_;
  std::vector<FiberField> translated_;
  RangeBasis range_;
};

struct VerdictResult {
  bool verdict = false;
  double max_residual = 0.0;
  double threshold = 0.0;

  /// Residual is at least `factor` away from the threshold on either side.
  bool margin_ok(double factor = 10.0) const {
    return max_residual < threshold / factor || max_residual > threshold * factor;
  }
};

/// Direct check of invariance under the refined center lattice: every spanning vector of
/// J(sigma), modulated by c/N, must stay in J(sigma).
VerdictResult test_oracle(const InvarianceProblem& problem);

/// Every masked spanning vector mask(v, j) must lie in J(sigma).
VerdictResult test_containment(const InvarianceProblem& problem);

/// T(L_gamma phi^j)(sigma) in J(sigma) for every generator, gamma and residue j.
VerdictResult test_membership(const InvarianceProblem& problem);

struct DimensionResult {
  bool verdict = false;
  DimensionFunction dim_w;
  std::vector<DimensionFunction> dim_v;  // indexed by residue
  bool rank_margin_ok = true;

  std::size_t dim_v_sum(std::size_t s) const;
};

/// dim_W(sigma) == sum_j dim_{V_j}(sigma) at every grid point.
DimensionResult test_dimension(const InvarianceProblem& problem);

struct DecompositionReport {
  std::size_t elements = 0;
  bool sum_exact = true;               // sum_j mask(f, j) == f entry for entry
  double max_pythagoras_error = 0.0;   // | ||f||^2 - sum_j ||f_j||^2 | / ||f||^2
  bool components_checked = false;
  double max_component_residual = 0.0;
  bool verdict = false;
};

/// Splits each spanning vector and `random_combinations` seeded random combinations of them
/// into residue components. Component membership is checked only when `invariant` is true.
DecompositionReport decompose(const InvarianceProblem& problem, bool invariant, std::uint64_t seed,
                              std::size_t random_combinations = 3);

/// Residue components mask(f, j), j = 0..N-1.
std::vector<FiberField> residue_components(const FiberField& f);

struct MeasureReport {
  std::vector<double> lhs;        // measure of the nonzero set of each generator over D = [0, N/c)
  double rhs = 0.0;               // sum_m m * mu(Sigma_m)
  double rhs_integral = 0.0;      // integral of dim_W over Sigma, computed cell by cell
  double bound = 0.0;             // n * k * mu(Sigma)
  std::vector<std::size_t> level_counts;  // number of grid cells with dim_W == m
  bool lhs_ok = false;
  bool rhs_ok = false;
  bool verdict = false;
  bool advisory = false;          // true when the space was not declared invariant
};

MeasureReport measure_report(const InvarianceProblem& problem, bool invariant);

/// Measure of the support of one generator over the fiber slot (s, n): cell measure times the
/// count of blocks above the relative support threshold.
double support_measure(const FiberField& phi, const std::vector<int>& fiber_indices, double rel_tol);

struct SupportBoundReport {
  enum class Status { holds, violated, not_applicable, advisory };
  Status status = Status::not_applicable;
  double measured_zero = 0.0;
  double bound = 0.0;
  std::string note;
};

/// Zero set of a single generator inside the band against 2K * mu(Sigma) * (N - k). Needs
/// N > k and an invariant S(phi).
SupportBoundReport support_bound(const FiberShape& shape, const FiberField& phi, const GammaSet& gamma,
                                 const Tolerances& tol = {});

std::string to_string(SupportBoundReport::Status status);

struct BetaDecomposition {
  /// coefficients[s][g]: coefficient of gamma_translate(phi, gamma_g) at sigma_s.
  std::vector<std::vector<Complex>> coefficients;
  double max_reconstruction_residual = 0.0;
  /// Residual of the projection formula that divides by ||e_gamma||^2 without orthogonalising.
  double max_projection_formula_residual = 0.0;
};

/// Least-squares coefficients of f against the translates of phi, per sigma. Throws
/// DecompositionInfeasible if some fiber of f is not in the span.
BetaDecomposition beta_decompose(const FiberField& f, const FiberField& phi, const GammaSet& gamma,
                                 const Tolerances& tol = {});

struct SpanClosure {
  double max_residual = 0.0;
  bool verdict = false;
};

/// For each residue j, the span of the masked translates is closed under modulation by c/N and
/// by c (residual of modulated spanning vectors against J_{V_j}).
SpanClosure masked_span_closure(const InvarianceProblem& problem);

}  // namespace fiberscope
