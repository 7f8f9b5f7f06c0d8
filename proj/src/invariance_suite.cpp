#include "fiberscope/invariance_suite.hpp"

#include <algorithm>
#include <cmath>

#include "fiberscope/errors.hpp"
#include "fiberscope/random.hpp"

namespace fiberscope {

void Tolerances::validate() const {
  if (!(rank > 0.0 && member > 0.0 && supp > 0.0 && measure_slack > 0.0))
    throw InvalidConfig("all tolerances must be positive");
}

InvarianceProblem::InvarianceProblem(FiberShape shape, std::vector<FiberField> generators, GammaSet gamma,
                                     Tolerances tol)
    : shape_(std::move(shape)), generators_(std::move(generators)), gamma_(std::move(gamma)), tol_(tol) {
  tol_.validate();
  gamma_.validate_against(shape_.rep);
  for (const auto& g : generators_)
    if (!(g.shape() == shape_)) throw ShapeError("generator shape does not match the problem shape");
  translated_ = translated_generators(generators_, gamma_);
  range_ = span_basis(shape_, translated_, tol_.rank);
}

RangeBasis InvarianceProblem::masked_range(int residue) const {
  std::vector<FiberField> masked;
  masked.reserve(generators_.size());
  for (const auto& phi : generators_) masked.push_back(mask(phi, residue));
  return range_function(shape_, masked, gamma_, tol_.rank);
}

namespace {

template <typename Candidates>
VerdictResult check_all(const InvarianceProblem& problem, Candidates&& for_each_candidate) {
  VerdictResult out;
  out.threshold = problem.tolerances().member;
  for_each_candidate([&](const FiberField& v) {
    out.max_residual = std::max(out.max_residual, membership_residual(v, problem.range()).max);
  });
  out.verdict = out.max_residual < out.threshold;
  return out;
}

}  // namespace

VerdictResult test_oracle(const InvarianceProblem& problem) {
  // Theta = (c/N) Z is generated by c/N together with Lambda, and Lambda already preserves
  // every J(sigma); testing the spanning vectors suffices by linearity.
  const double theta = problem.shape().lattice.refined_spacing();
  return check_all(problem, [&](auto&& visit) {
    for (const auto& t : problem.translated()) visit(central_modulate(t, theta));
  });
}

VerdictResult test_containment(const InvarianceProblem& problem) {
  return check_all(problem, [&](auto&& visit) {
    for (const int j : problem.shape().residues.residues())
      for (const auto& t : problem.translated()) visit(mask(t, j));
  });
}

VerdictResult test_membership(const InvarianceProblem& problem) {
  const auto elements = problem.gamma().elements();
  return check_all(problem, [&](auto&& visit) {
    for (const auto& phi : problem.generators())
      for (const int j : problem.shape().residues.residues()) {
        const FiberField phi_j = mask(phi, j);
        for (const auto& g : elements) visit(gamma_translate(phi_j, g));
      }
  });
}

std::size_t DimensionResult::dim_v_sum(std::size_t s) const {
  std::size_t acc = 0;
  for (const auto& dv : dim_v) acc += dv[s];
  return acc;
}

DimensionResult test_dimension(const InvarianceProblem& problem) {
  DimensionResult out;
  out.dim_w = dimension_function(problem.range());
  out.rank_margin_ok = problem.range().rank_margin_ok();
  for (const int j : problem.shape().residues.residues()) {
    const RangeBasis vj = problem.masked_range(j);
    out.dim_v.push_back(dimension_function(vj));
    out.rank_margin_ok = out.rank_margin_ok && vj.rank_margin_ok();
  }
  out.verdict = true;
  for (std::size_t s = 0; s < out.dim_w.size(); ++s) out.verdict = out.verdict && out.dim_w[s] == out.dim_v_sum(s);
  return out;
}

std::vector<FiberField> residue_components(const FiberField& f) {
  std::vector<FiberField> out;
  for (const int j : f.shape().residues.residues()) out.push_back(mask(f, j));
  return out;
}

DecompositionReport decompose(const InvarianceProblem& problem, bool invariant, std::uint64_t seed,
                              std::size_t random_combinations) {
  DecompositionReport out;
  std::vector<FiberField> elements = problem.translated();
  if (!problem.translated().empty()) {
    Rng rng(seed);
    for (std::size_t c = 0; c < random_combinations; ++c) {
      FiberField combo(problem.shape());
      for (const auto& t : problem.translated()) combo += rng.complex_symmetric() * t;
      elements.push_back(std::move(combo));
    }
  }
  out.elements = elements.size();
  out.components_checked = invariant;

  for (const auto& f : elements) {
    const auto parts = residue_components(f);
    FiberField sum(problem.shape());
    double parts_norm = 0.0;
    for (const auto& p : parts) {
      sum += p;
      parts_norm += p.norm_squared();
      if (invariant) out.max_component_residual = std::max(out.max_component_residual, membership_residual(p, problem.range()).max);
    }
    out.sum_exact = out.sum_exact && sum == f;
    const double total = f.norm_squared();
    if (total > 0.0) out.max_pythagoras_error = std::max(out.max_pythagoras_error, std::abs(total - parts_norm) / total);
  }
  out.verdict = out.sum_exact && out.max_pythagoras_error <= 1e-12 &&
                (!invariant || out.max_component_residual < problem.tolerances().member);
  return out;
}

double support_measure(const FiberField& phi, const std::vector<int>& fiber_indices, double rel_tol) {
  const auto& shape = phi.shape();
  const double threshold = rel_tol * phi.max_block_norm();
  std::size_t count = 0;
  for (std::size_t s = 0; s < shape.grid.size(); ++s)
    for (const int n : fiber_indices)
      if (phi.block(s, n).norm() > threshold) ++count;
  return static_cast<double>(count) * shape.grid.cell_measure();
}

MeasureReport measure_report(const InvarianceProblem& problem, bool invariant) {
  MeasureReport out;
  out.advisory = !invariant;
  const auto& shape = problem.shape();
  const double slack = problem.tolerances().measure_slack;

  // D = [0, N/c): band representatives n = 0..N-1.
  std::vector<int> section;
  for (int j = 0; j < problem.refinement(); ++j) section.push_back(j);
  for (const auto& phi : problem.generators()) out.lhs.push_back(support_measure(phi, section, problem.tolerances().supp));

  const DimensionFunction dims = dimension_function(problem.range());
  const std::size_t n = problem.generators().size();
  const std::size_t k = problem.gamma().size();
  out.level_counts.assign(n * k + 1, 0);
  for (const auto m : dims) {
    if (m >= out.level_counts.size()) out.level_counts.resize(m + 1, 0);
    ++out.level_counts[m];
  }
  for (std::size_t m = 0; m < out.level_counts.size(); ++m)
    out.rhs += static_cast<double>(m) * (static_cast<double>(out.level_counts[m]) * shape.grid.cell_measure());
  for (const auto m : dims) out.rhs_integral += static_cast<double>(m) * shape.grid.cell_measure();

  out.bound = static_cast<double>(n * k) * shape.grid.section_length();
  out.lhs_ok = std::all_of(out.lhs.begin(), out.lhs.end(), [&](double v) { return v <= out.rhs + slack; });
  out.rhs_ok = out.rhs <= out.bound + slack;
  out.verdict = out.lhs_ok && out.rhs_ok;
  return out;
}

SupportBoundReport support_bound(const FiberShape& shape, const FiberField& phi, const GammaSet& gamma,
                                 const Tolerances& tol) {
  SupportBoundReport out;
  const int N = shape.lattice.refinement;
  const auto k = static_cast<int>(gamma.size());
  const int K = shape.residues.band_half_width();
  const double mu = shape.grid.section_length();

  if (N - k <= 0) {
    out.status = SupportBoundReport::Status::not_applicable;
    out.note = "requires |J| mu(Sigma) - k > 0, i.e. N > |Gamma|";
    return out;
  }

  std::vector<int> band;
  for (int n = shape.residues.band_begin(); n < shape.residues.band_end(); ++n) band.push_back(n);
  out.measured_zero = static_cast<double>(band.size() * shape.grid.size()) * shape.grid.cell_measure() -
                      support_measure(phi, band, tol.supp);
  out.bound = 2.0 * K * mu * (N - k);

  const InvarianceProblem single(shape, {phi}, gamma, tol);
  if (!test_oracle(single).verdict) {
    out.status = SupportBoundReport::Status::advisory;
    out.note = "S(phi) is not invariant under the refined lattice; bound not guaranteed";
    return out;
  }
  out.status = out.measured_zero >= out.bound - tol.measure_slack ? SupportBoundReport::Status::holds
                                                                  : SupportBoundReport::Status::violated;
  return out;
}

std::string to_string(SupportBoundReport::Status status) {
  switch (status) {
    case SupportBoundReport::Status::holds: return "holds";
    case SupportBoundReport::Status::violated: return "violated";
    case SupportBoundReport::Status::not_applicable: return "not-applicable";
    case SupportBoundReport::Status::advisory: return "advisory";
  }
  return "unknown";
}

BetaDecomposition beta_decompose(const FiberField& f, const FiberField& phi, const GammaSet& gamma,
                                 const Tolerances& tol) {
  if (!(f.shape() == phi.shape())) throw ShapeError("f and phi have different shapes");
  const auto& shape = f.shape();
  const auto translates = translated_generators({phi}, gamma);
  const auto k = static_cast<Eigen::Index>(translates.size());
  const auto rows = static_cast<Eigen::Index>(shape.fiber_length());

  BetaDecomposition out;
  out.coefficients.resize(shape.grid.size());
  for (std::size_t s = 0; s < shape.grid.size(); ++s) {
    CMatrix e(rows, k);
    for (Eigen::Index g = 0; g < k; ++g) e.col(g) = translates[static_cast<std::size_t>(g)].fiber(s);
    const CVector target = f.fiber(s);
    const double target_norm = target.norm();

    Eigen::JacobiSVD<CMatrix> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::Index r = 0;
    if (sv.size() > 0 && sv(0) > 0.0)
      while (r < sv.size() && sv(r) > tol.rank * sv(0)) ++r;
    const CMatrix u = svd.matrixU().leftCols(r);
    if (subspace_residual(u, target) >= tol.member)
      throw DecompositionInfeasible("fiber of f at sigma index " + std::to_string(s) + " is not in the span of the translates of phi");

    // Minimum-norm least squares: V_r diag(1/s_r) U_r^* f.
    CVector beta = CVector::Zero(k);
    if (r > 0) {
      const CVector projected = u.adjoint() * target;
      const Eigen::VectorXd inv = sv.head(r).cwiseInverse();
      beta = svd.matrixV().leftCols(r) * (inv.cast<Complex>().asDiagonal() * projected);
    }
    out.coefficients[s].assign(beta.data(), beta.data() + beta.size());

    if (target_norm > 0.0) {
      const CVector rebuilt = e * beta;
      out.max_reconstruction_residual = std::max(out.max_reconstruction_residual, (rebuilt - target).norm() / target_norm);

      CVector naive = CVector::Zero(rows);
      for (Eigen::Index g = 0; g < k; ++g) {
        const double nn = e.col(g).squaredNorm();
        if (nn > 0.0) naive += (e.col(g).dot(target) / nn) * e.col(g);
      }
      out.max_projection_formula_residual =
          std::max(out.max_projection_formula_residual, (naive - target).norm() / target_norm);
    }
  }
  return out;
}

SpanClosure masked_span_closure(const InvarianceProblem& problem) {
  SpanClosure out;
  const double c = problem.shape().lattice.center_spacing;
  const double theta = problem.shape().lattice.refined_spacing();
  const auto elements = problem.gamma().elements();
  for (const int j : problem.shape().residues.residues()) {
    const RangeBasis vj = problem.masked_range(j);
    for (const auto& phi : problem.generators()) {
      const FiberField phi_j = mask(phi, j);
      for (const auto& g : elements) {
        const FiberField v = gamma_translate(phi_j, g);
        out.max_residual = std::max(out.max_residual, membership_residual(central_modulate(v, theta), vj).max);
        out.max_residual = std::max(out.max_residual, membership_residual(central_modulate(v, c), vj).max);
      }
    }
  }
  out.verdict = out.max_residual < problem.tolerances().member;
  return out;
}

}  // namespace fiberscope
