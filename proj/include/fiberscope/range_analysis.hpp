#pragma once

#include <filesystem>
#include <vector>

#include "fiberscope/fiber_space.hpp"

namespace fiberscope {

inline constexpr double kDefaultRankTolerance = 1e-8;
inline constexpr double kResidualFloor = 1e-300;

/// Orthonormal basis of J(sigma_s) at every grid point, from a thin SVD of the spanning fibers.
///
/// A singular value is retained iff it exceeds tol_rank times the largest singular value at
/// that point.
class RangeBasis {
 public:
  RangeBasis() = default;
  RangeBasis(FiberShape shape, double tol_rank, std::vector<CMatrix> bases,
             std::vector<Eigen::VectorXd> singular_values);

  const FiberShape& shape() const { return shape_; }
  double tol_rank() const { return tol_rank_; }
  std::size_t size() const { return bases_.size(); }

  /// fiber_length x rank(s), orthonormal columns.
  const CMatrix& basis(std::size_t s) const { return bases_[s]; }
  std::size_t rank(std::size_t s) const { return static_cast<std::size_t>(bases_[s].cols()); }
  /// All singular values at s, descending (retained and dropped).
  const Eigen::VectorXd& singular_values(std::size_t s) const { return singular_values_[s]; }

  /// P_{J(sigma_s)} v.
  CVector project(std::size_t s, const CVector& v) const;

  /// Smallest retained singular value relative to the largest, over all s (1 if nothing kept).
  double min_retained_ratio() const;
  /// Largest dropped singular value relative to the largest, over all s (0 if nothing dropped).
  double max_dropped_ratio() const;
  /// True when the rank decision has `factor` headroom on both sides of tol_rank everywhere.
  bool rank_margin_ok(double factor = 10.0) const;

 private:
  FiberShape shape_;
  double tol_rank_ = kDefaultRankTolerance;
  std::vector<CMatrix> bases_;
  std::vector<Eigen::VectorXd> singular_values_;
};

using DimensionFunction = std::vector<std::size_t>;

/// Orthonormal basis of the span of the given fields' fibers, pointwise in sigma.
RangeBasis span_basis(const FiberShape& shape, const std::vector<FiberField>& spanning,
                      double tol_rank = kDefaultRankTolerance);

/// All translates gamma_translate(phi, gamma), generator-major then gamma order.
std::vector<FiberField> translated_generators(const std::vector<FiberField>& generators, const GammaSet& gamma);

/// J(sigma) = span{ T(L_gamma phi)(sigma) : phi in generators, gamma in Gamma }.
RangeBasis range_function(const FiberShape& shape, const std::vector<FiberField>& generators,
                          const GammaSet& gamma, double tol_rank = kDefaultRankTolerance);
/// Same, with the shape taken from the (nonempty) generator list.
RangeBasis range_function(const std::vector<FiberField>& generators, const GammaSet& gamma,
                          double tol_rank = kDefaultRankTolerance);

DimensionFunction dimension_function(const RangeBasis& basis);

struct MembershipResidual {
  std::vector<double> per_point;
  double max = 0.0;
};

/// ||v - P v|| / max(||v||, floor); zero vectors have residual 0.
double subspace_residual(const CMatrix& orthonormal_basis, const CVector& v);

MembershipResidual membership_residual(const FiberField& field, const RangeBasis& basis);

/// CSV with header "sigma,rank".
void write_dimension_csv(const std::filesystem::path& path, const SectionGrid& grid, const DimensionFunction& dims);

}  // namespace fiberscope
