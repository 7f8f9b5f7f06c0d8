#include "fiberscope/group_transform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "fiberscope/binary_io.hpp"
#include "fiberscope/errors.hpp"
#include "fiberscope/parallel.hpp"

namespace fiberscope {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex expi(double angle) { return std::polar(1.0, angle); }

using RowMajorCMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_samples(const SampledFunction& f) {
  if (f.samples.size() != f.nx * f.ny * f.nw) throw ShapeError("sample count does not match nx*ny*nw");
  if (!(f.hx > 0.0 && f.hy > 0.0 && f.hw > 0.0)) throw InvalidConfig("sample steps must be positive");
  if (f.placement.dim() != 1) throw InvalidConfig("sampled functions live on H^1");
}

// Index offset k such that sample i sits at x = (i + k) h on the representation lattice of
// differences v_m - v_m'.
long x_offset(const SampledFunction& f, const RepGrid& grid) {
  const double h = grid.step();
  if (std::abs(f.hx - h) > 1e-12 * h)
    throw GridMismatch("x step " + std::to_string(f.hx) + " differs from the representation step " + std::to_string(h));
  const double start = (f.x0 + f.placement.x[0]) / h;
  const double k = std::round(start);
  if (std::abs(start - k) > 1e-9) throw GridMismatch("sample x-grid is not aligned with the representation grid");
  return static_cast<long>(k);
}

}  // namespace

SampledFunction SampledFunction::zeros(std::size_t nx, std::size_t ny, std::size_t nw, double hx, double hy,
                                       double hw, double x0, double y0, double w0) {
  SampledFunction f;
  f.nx = nx;
  f.ny = ny;
  f.nw = nw;
  f.hx = hx;
  f.hy = hy;
  f.hw = hw;
  f.x0 = x0;
  f.y0 = y0;
  f.w0 = w0;
  f.samples.assign(nx * ny * nw, Complex(0.0, 0.0));
  return f;
}

double SampledFunction::norm_squared() const {
  double acc = 0.0;
  for (const auto& v : samples) acc += std::norm(v);
  return acc * cell_volume();
}

SampledFunction left_translate(const SampledFunction& f, const GroupElement& g) {
  if (g.dim() != 1) throw InvalidConfig("left translation on H^1 needs a 1-dimensional group element");
  SampledFunction out = f;
  out.placement = group_multiply(g, f.placement);
  return out;
}

SampledFunction sample_gaussian(const GaussianSpec& spec) {
  SampledFunction f =
      SampledFunction::zeros(spec.nx, spec.ny, spec.nw, spec.hx, spec.hy, spec.hw, spec.x0, spec.y0, spec.w0);
  std::vector<Complex> wpart(spec.nw);
  for (std::size_t l = 0; l < spec.nw; ++l) {
    const double w = f.w(l);
    wpart[l] = std::exp(-std::numbers::pi * w * w / (spec.tau * spec.tau)) * expi(-kTwoPi * spec.lambda0 * w);
  }
  for (std::size_t i = 0; i < spec.nx; ++i) {
    const double x = f.x(i);
    for (std::size_t j = 0; j < spec.ny; ++j) {
      const double y = f.y(j);
      const double xy = std::exp(-std::numbers::pi * (x * x / (spec.alpha * spec.alpha) + y * y / (spec.beta * spec.beta)));
      for (std::size_t l = 0; l < spec.nw; ++l) f.at(i, j, l) = xy * wpart[l];
    }
  }
  return f;
}

FiberField fiberize(const SampledFunction& f, const FiberShape& shape) {
  require_samples(f);
  if (shape.lattice.d != 1) throw InvalidConfig("fiberize supports d = 1 only");
  const RepGrid& grid = shape.rep;
  const long offset = x_offset(f, grid);
  const auto M = static_cast<Eigen::Index>(grid.dimension());
  const auto nx = static_cast<Eigen::Index>(f.nx);
  const auto ny = static_cast<Eigen::Index>(f.ny);
  const auto nw = static_cast<Eigen::Index>(f.nw);
  const double h = grid.step();
  const double xp = f.placement.x[0];
  const double yp = f.placement.y[0];
  const double wp = f.placement.w;

  FiberField out(shape);
  if (f.samples.empty()) return out;
  const Eigen::Map<const RowMajorCMatrix> values(f.samples.data(), nx * ny, nw);

  parallel_for(shape.num_blocks(), [&](std::size_t idx) {
    const std::size_t s = idx / shape.band_size();
    const std::size_t slot = idx % shape.band_size();
    const double lambda = shape.frequency(s, shape.residues.band_index(slot));

    CVector ew(nw);
    for (Eigen::Index l = 0; l < nw; ++l) ew(l) = expi(kTwoPi * lambda * f.w(static_cast<std::size_t>(l))) * f.hw;
    const CVector g1_flat = values * ew;

    // Placed w = wp + w + xp*y: the extra central shift is a phase per y.
    RowMajorCMatrix g1(nx, ny);
    for (Eigen::Index j = 0; j < ny; ++j) {
      const Complex phase = expi(kTwoPi * lambda * (wp + xp * f.y(static_cast<std::size_t>(j))));
      for (Eigen::Index i = 0; i < nx; ++i) g1(i, j) = g1_flat(i * ny + j) * phase;
    }

    CMatrix ey(ny, M);
    for (Eigen::Index m = 0; m < M; ++m) {
      const double v = grid.sample(static_cast<std::size_t>(m));
      for (Eigen::Index j = 0; j < ny; ++j)
        ey(j, m) = expi(-kTwoPi * lambda * (yp + f.y(static_cast<std::size_t>(j))) * v) * f.hy;
    }
    const CMatrix g2 = g1 * ey;  // nx x M

    const double weight = h * std::sqrt(std::abs(lambda));
    CMatrix& block = out.block_at(s, slot);
    for (Eigen::Index m = 0; m < M; ++m)
      for (Eigen::Index mp = 0; mp < M; ++mp) {
        const long i = static_cast<long>(m - mp) - offset;
        if (i >= 0 && i < nx) block(m, mp) = weight * g2(i, m);
      }
  });
  return out;
}

double plancherel_check(const SampledFunction& f, const FiberShape& shape) {
  const double base = f.norm_squared();
  const FiberField field = fiberize(f, shape);
  if (base == 0.0) return 0.0;
  return std::abs(field.norm_squared() - base) / base;
}

double intertwining_check(const SampledFunction& f, const GroupElement& gamma, long central_steps,
                          const FiberShape& shape) {
  const double c = shape.lattice.center_spacing;
  const double shift = c * static_cast<double>(central_steps);
  const GroupElement moved = group_multiply(gamma, GroupElement::central(1, shift));
  const FiberField lhs = fiberize(left_translate(f, moved), shape);
  FiberField rhs = gamma_translate(fiberize(f, shape), gamma);
  for (std::size_t s = 0; s < shape.grid.size(); ++s) {
    const Complex phase = expi(kTwoPi * shape.grid.point(s) * shift);
    for (std::size_t slot = 0; slot < shape.band_size(); ++slot) rhs.block_at(s, slot) *= phase;
  }
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t s = 0; s < shape.grid.size(); ++s)
    for (std::size_t slot = 0; slot < shape.band_size(); ++slot) {
      worst = std::max(worst, (lhs.block_at(s, slot) - rhs.block_at(s, slot)).norm());
      scale = std::max(scale, rhs.block_at(s, slot).norm());
    }
  return scale == 0.0 ? worst : worst / scale;
}

void write_sampled_function(const std::filesystem::path& path, const SampledFunction& f) {
  require_samples(f);
  if (f.placement.x[0] != 0.0)
    throw IoError("cannot store a sampled function whose placement has a nonzero x-part: " + path.string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  binary::put_magic(out, "HSMP");
  binary::put_u64(out, kSampledFileVersion);
  binary::put_u64(out, f.nx);
  binary::put_u64(out, f.ny);
  binary::put_u64(out, f.nw);
  binary::put_f64(out, f.hx);
  binary::put_f64(out, f.hy);
  binary::put_f64(out, f.hw);
  binary::put_f64(out, f.x0);
  binary::put_f64(out, f.y0 + f.placement.y[0]);
  binary::put_f64(out, f.w0 + f.placement.w);
  for (const auto& v : f.samples) binary::put_complex(out, v);
  if (!out) throw IoError("write failed for " + path.string());
}

SampledFunction read_sampled_function(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  binary::expect_magic(in, "HSMP", path.string());
  const auto version = binary::get_u64(in);
  if (version != kSampledFileVersion) throw IoError(path.string() + ": unsupported version " + std::to_string(version));
  const auto nx = binary::get_u64(in);
  const auto ny = binary::get_u64(in);
  const auto nw = binary::get_u64(in);
  const double hx = binary::get_f64(in);
  const double hy = binary::get_f64(in);
  const double hw = binary::get_f64(in);
  const double x0 = binary::get_f64(in);
  const double y0 = binary::get_f64(in);
  const double w0 = binary::get_f64(in);
  if (nx * ny * nw > (std::uint64_t{1} << 31)) throw IoError(path.string() + ": implausible sample count");
  SampledFunction f = SampledFunction::zeros(nx, ny, nw, hx, hy, hw, x0, y0, w0);
  for (auto& v : f.samples) v = binary::get_complex(in);
  return f;
}

}  // namespace fiberscope
