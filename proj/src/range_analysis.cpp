#include "fiberscope/range_analysis.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>

#include "fiberscope/errors.hpp"
#include "fiberscope/parallel.hpp"

namespace fiberscope {

RangeBasis::RangeBasis(FiberShape shape, double tol_rank, std::vector<CMatrix> bases,
                       std::vector<Eigen::VectorXd> singular_values)
    : shape_(std::move(shape)),
      tol_rank_(tol_rank),
      bases_(std::move(bases)),
      singular_values_(std::move(singular_values)) {}

CVector RangeBasis::project(std::size_t s, const CVector& v) const {
  const CMatrix& q = bases_[s];
  if (q.cols() == 0) return CVector::Zero(v.size());
  return q * (q.adjoint() * v);
}

double RangeBasis::min_retained_ratio() const {
  double out = 1.0;
  for (std::size_t s = 0; s < bases_.size(); ++s) {
    const auto r = static_cast<Eigen::Index>(rank(s));
    if (r == 0) continue;
    out = std::min(out, singular_values_[s](r - 1) / singular_values_[s](0));
  }
  return out;
}

double RangeBasis::max_dropped_ratio() const {
  double out = 0.0;
  for (std::size_t s = 0; s < bases_.size(); ++s) {
    const auto& sv = singular_values_[s];
    const auto r = static_cast<Eigen::Index>(rank(s));
    if (r == 0 || r >= sv.size()) continue;
    out = std::max(out, sv(r) / sv(0));
  }
  return out;
}

bool RangeBasis::rank_margin_ok(double factor) const {
  return min_retained_ratio() >= factor * tol_rank_ && max_dropped_ratio() <= tol_rank_ / factor;
}

RangeBasis span_basis(const FiberShape& shape, const std::vector<FiberField>& spanning, double tol_rank) {
  if (!(tol_rank > 0.0)) throw InvalidConfig("rank tolerance must be positive");
  for (const auto& f : spanning)
    if (!(f.shape() == shape)) throw ShapeError("spanning fields do not share one shape");

  const std::size_t S = shape.grid.size();
  const auto rows = static_cast<Eigen::Index>(shape.fiber_length());
  const auto cols = static_cast<Eigen::Index>(spanning.size());
  std::vector<CMatrix> bases(S);
  std::vector<Eigen::VectorXd> values(S);

  parallel_for(S, [&](std::size_t s) {
    if (cols == 0) {
      bases[s] = CMatrix(rows, 0);
      values[s] = Eigen::VectorXd(0);
      return;
    }
    CMatrix a(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) a.col(c) = spanning[static_cast<std::size_t>(c)].fiber(s);
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::Index keep = 0;
    if (sv.size() > 0 && sv(0) > 0.0)
      while (keep < sv.size() && sv(keep) > tol_rank * sv(0)) ++keep;
    bases[s] = svd.matrixU().leftCols(keep);
    values[s] = sv;
  });
  return RangeBasis(shape, tol_rank, std::move(bases), std::move(values));
}

std::vector<FiberField> translated_generators(const std::vector<FiberField>& generators, const GammaSet& gamma) {
  std::vector<FiberField> out;
  out.reserve(generators.size() * gamma.size());
  const auto elements = gamma.elements();
  for (const auto& phi : generators)
    for (const auto& g : elements) out.push_back(gamma_translate(phi, g));
  return out;
}

RangeBasis range_function(const FiberShape& shape, const std::vector<FiberField>& generators,
                          const GammaSet& gamma, double tol_rank) {
  for (const auto& f : generators)
    if (!(f.shape() == shape)) throw ShapeError("generators do not share one shape");
  return span_basis(shape, translated_generators(generators, gamma), tol_rank);
}

RangeBasis range_function(const std::vector<FiberField>& generators, const GammaSet& gamma, double tol_rank) {
  if (generators.empty()) throw ShapeError("range_function needs a shape when there are no generators");
  return range_function(generators.front().shape(), generators, gamma, tol_rank);
}

DimensionFunction dimension_function(const RangeBasis& basis) {
  DimensionFunction out(basis.size());
  for (std::size_t s = 0; s < basis.size(); ++s) out[s] = basis.rank(s);
  return out;
}

double subspace_residual(const CMatrix& orthonormal_basis, const CVector& v) {
  const double norm = v.norm();
  if (norm == 0.0) return 0.0;
  CVector r = v;
  if (orthonormal_basis.cols() > 0) r -= orthonormal_basis * (orthonormal_basis.adjoint() * v);
  return r.norm() / std::max(norm, kResidualFloor);
}

MembershipResidual membership_residual(const FiberField& field, const RangeBasis& basis) {
  if (!(field.shape() == basis.shape())) throw ShapeError("field and range basis have different shapes");
  MembershipResidual out;
  out.per_point.resize(basis.size());
  for (std::size_t s = 0; s < basis.size(); ++s) {
    out.per_point[s] = subspace_residual(basis.basis(s), field.fiber(s));
    out.max = std::max(out.max, out.per_point[s]);
  }
  return out;
}

void write_dimension_csv(const std::filesystem::path& path, const SectionGrid& grid, const DimensionFunction& dims) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "sigma,rank\n" << std::setprecision(17);
  for (std::size_t s = 0; s < dims.size(); ++s) out << grid.point(s) << ',' << dims[s] << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace fiberscope
