#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fiberscope/fiber_space.hpp"

namespace fiberscope {

/// Samples of a function on H^1 over a regular (x, y, w) box.
///
/// Sample (i, j, l) sits at placement * (x0 + i hx, y0 + j hy, w0 + l hw). The placement starts
/// at the identity and only changes under left translation, so translating never resamples.
struct SampledFunction {
  std::size_t nx = 0, ny = 0, nw = 0;
  double hx = 1.0, hy = 1.0, hw = 1.0;
  double x0 = 0.0, y0 = 0.0, w0 = 0.0;
  std::vector<Complex> samples;  // row-major, w fastest
  GroupElement placement = GroupElement::identity(1);

  static SampledFunction zeros(std::size_t nx, std::size_t ny, std::size_t nw, double hx, double hy, double hw,
                               double x0, double y0, double w0);

  Complex& at(std::size_t i, std::size_t j, std::size_t l) { return samples[(i * ny + j) * nw + l]; }
  const Complex& at(std::size_t i, std::size_t j, std::size_t l) const { return samples[(i * ny + j) * nw + l]; }

  double x(std::size_t i) const { return x0 + static_cast<double>(i) * hx; }
  double y(std::size_t j) const { return y0 + static_cast<double>(j) * hy; }
  double w(std::size_t l) const { return w0 + static_cast<double>(l) * hw; }
  double cell_volume() const { return hx * hy * hw; }

  /// Riemann sum of |f|^2.
  double norm_squared() const;
};

/// (L_g f)(p) = f(g^{-1} p). Exact: the samples are kept, the placement becomes g * placement.
SampledFunction left_translate(const SampledFunction& f, const GroupElement& g);

/// Box of a Gaussian exp(-pi (x^2/alpha^2 + y^2/beta^2 + w^2/tau^2)) times an optional
/// central character exp(-2 pi i lambda0 w).
struct GaussianSpec {
  double alpha = 3.0, beta = 4.0, tau = 6.0;
  double lambda0 = 0.0;
  std::size_t nx = 16, ny = 576, nw = 120;
  double hx = 1.0, hy = 1.0 / 36.0, hw = 0.2;
  double x0 = -8.0, y0 = -8.0, w0 = -12.0;
};

SampledFunction sample_gaussian(const GaussianSpec& spec);

/// Quadrature fiberization. For every lambda = sigma_s + n/c the block is
///   h * |lambda|^{1/2} * K,  K[m, m'] = sum_{y, w} f(v_m - v_m', y, w) e^{2 pi i lambda w} e^{-2 pi i lambda y v_m} hy hw
/// with the x-offset looked up on the sample grid (zero outside the box). Needs d = 1, hx equal
/// to the representation step and the placed x-grid aligned with it; otherwise GridMismatch.
FiberField fiberize(const SampledFunction& f, const FiberShape& shape);

/// | ||fiberize(f)||^2 - ||f||^2 | / ||f||^2, and 0 for f = 0.
double plancherel_check(const SampledFunction& f, const FiberShape& shape);

/// Max-over-blocks discrepancy between fiberize(L_{gamma lambda} f) and
/// e^{2 pi i sigma_s c lambda} gamma_translate(fiberize(f), gamma), divided by the largest block
/// norm of the reference. gamma must have w = 0; lambda counts center-lattice steps.
double intertwining_check(const SampledFunction& f, const GroupElement& gamma, long central_steps,
                          const FiberShape& shape);

/// HSMP format: eleven little-endian 64-bit header slots
///   magic "HSMP" (zero padded), version, nx, ny, nw (u64), hx, hy, hw, x0, y0, w0 (f64)
/// then nx*ny*nw complex doubles (re, im), row-major with w fastest. A placement with zero
/// x-part is folded into the origin; any other placement cannot be stored.
void write_sampled_function(const std::filesystem::path& path, const SampledFunction& f);
SampledFunction read_sampled_function(const std::filesystem::path& path);

inline constexpr std::uint64_t kSampledFileVersion = 1;

}  // namespace fiberscope
