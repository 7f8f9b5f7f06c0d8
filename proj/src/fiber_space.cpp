#include "fiberscope/fiber_space.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "fiberscope/binary_io.hpp"
#include "fiberscope/errors.hpp"
#include "fiberscope/parallel.hpp"
#include "fiberscope/random.hpp"

namespace fiberscope {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<bool> supported_slots(const FiberShape& shape, const std::vector<int>& residues) {
  const auto& rs = shape.residues;
  std::vector<bool> keep(shape.band_size(), residues.empty());
  for (const int j : residues) {
    if (!rs.contains_residue(j)) throw InvalidResidue("residue " + std::to_string(j) + " not in {0..N-1}");
    for (std::size_t slot = 0; slot < keep.size(); ++slot)
      if (rs.residue_of(rs.band_index(slot)) == j) keep[slot] = true;
  }
  return keep;
}

CMatrix random_block(Rng& rng, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = rng.complex_symmetric();
  return out;
}

CMatrix rank_one_block(Rng& rng, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  CVector u(n), v(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = rng.complex_symmetric();
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.complex_symmetric();
  return u * v.adjoint();
}

}  // namespace

FiberShape FiberShape::make(const LatticeConfig& lattice, std::size_t S, int K, std::size_t M, double L) {
  auto sections = build_sections(lattice, S, K);
  return {lattice, std::move(sections.grid), std::move(sections.residues), RepGrid(lattice.d, M, L)};
}

FiberField::FiberField(FiberShape shape) : shape_(std::move(shape)) {
  const auto dim = static_cast<Eigen::Index>(shape_.block_dim());
  blocks_.assign(shape_.num_blocks(), CMatrix::Zero(dim, dim));
}

std::size_t FiberField::index(std::size_t s, int n) const {
  if (s >= shape_.grid.size() || !shape_.residues.in_band(n))
    throw ShapeError("block (" + std::to_string(s) + ", " + std::to_string(n) + ") outside the field");
  return s * shape_.band_size() + shape_.residues.slot_of(n);
}

void FiberField::require_compatible(const FiberField& other) const {
  if (!(shape_ == other.shape_)) throw ShapeError("fiber fields have different grids, residues or rep grids");
}

CVector FiberField::fiber(std::size_t s) const {
  const std::size_t dim = shape_.block_dim();
  CVector out(static_cast<Eigen::Index>(shape_.fiber_length()));
  Eigen::Index k = 0;
  for (std::size_t slot = 0; slot < shape_.band_size(); ++slot) {
    const CMatrix& b = block_at(s, slot);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) out(k++) = b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return out;
}

void FiberField::set_fiber(std::size_t s, const CVector& values) {
  if (static_cast<std::size_t>(values.size()) != shape_.fiber_length()) throw ShapeError("fiber length mismatch");
  const std::size_t dim = shape_.block_dim();
  Eigen::Index k = 0;
  for (std::size_t slot = 0; slot < shape_.band_size(); ++slot) {
    CMatrix& b = block_at(s, slot);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values(k++);
  }
}

double FiberField::norm_squared() const {
  double acc = 0.0;
  for (const auto& b : blocks_) acc += b.squaredNorm();
  return acc * shape_.grid.cell_measure();
}

double FiberField::norm() const { return std::sqrt(norm_squared()); }

double FiberField::max_block_norm() const {
  double out = 0.0;
  for (const auto& b : blocks_) out = std::max(out, b.norm());
  return out;
}

FiberField& FiberField::operator+=(const FiberField& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += other.blocks_[i];
  return *this;
}

FiberField& FiberField::operator-=(const FiberField& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= other.blocks_[i];
  return *this;
}

FiberField& FiberField::operator*=(Complex scale) {
  for (auto& b : blocks_) b *= scale;
  return *this;
}

bool FiberField::operator==(const FiberField& other) const {
  if (!(shape_ == other.shape_)) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i] != other.blocks_[i]) return false;
  return true;
}

FiberField operator+(FiberField lhs, const FiberField& rhs) { return lhs += rhs; }
FiberField operator-(FiberField lhs, const FiberField& rhs) { return lhs -= rhs; }
FiberField operator*(Complex scale, FiberField field) { return field *= scale; }

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("HS inner product of differently sized blocks");
  // tr(B^* A) = sum_ij conj(b_ij) a_ij
  Complex acc = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r) acc += std::conj(b(r, c)) * a(r, c);
  return acc;
}

Complex field_inner(const FiberField& f, const FiberField& g) {
  if (!(f.shape() == g.shape())) throw ShapeError("inner product of incompatible fiber fields");
  const auto& shape = f.shape();
  Complex acc = 0.0;
  for (std::size_t s = 0; s < shape.grid.size(); ++s)
    for (std::size_t slot = 0; slot < shape.band_size(); ++slot) acc += hs_inner(f.block_at(s, slot), g.block_at(s, slot));
  return acc * shape.grid.cell_measure();
}

FiberField central_modulate(const FiberField& field, double theta) {
  FiberField out = field;
  const auto& shape = field.shape();
  for (std::size_t s = 0; s < shape.grid.size(); ++s)
    for (std::size_t slot = 0; slot < shape.band_size(); ++slot) {
      const double freq = shape.frequency(s, shape.residues.band_index(slot));
      out.block_at(s, slot) *= std::polar(1.0, kTwoPi * freq * theta);
    }
  return out;
}

FiberField gamma_translate(const FiberField& field, const GroupElement& gamma) {
  const auto& shape = field.shape();
  if (gamma.dim() != shape.rep.d()) throw ShapeError("group element dimension does not match the field");
  for (const double x : gamma.x) shape.rep.shift_steps(x);  // grid check up front

  FiberField out(shape);
  const std::size_t band = shape.band_size();
  parallel_for(shape.num_blocks(), [&](std::size_t i) {
    const std::size_t s = i / band;
    const std::size_t slot = i % band;
    const RepOperator op(shape.frequency(s, shape.residues.band_index(slot)), gamma, shape.rep);
    out.block_at(s, slot) = op.apply_left(field.block_at(s, slot));
  });
  return out;
}

FiberField mask(const FiberField& field, int residue) {
  const auto& shape = field.shape();
  if (!shape.residues.contains_residue(residue))
    throw InvalidResidue("residue " + std::to_string(residue) + " not in {0..N-1}");
  FiberField out(shape);
  for (std::size_t s = 0; s < shape.grid.size(); ++s)
    for (std::size_t slot = 0; slot < shape.band_size(); ++slot)
      if (shape.residues.residue_of(shape.residues.band_index(slot)) == residue)
        out.block_at(s, slot) = field.block_at(s, slot);
  return out;
}

FiberField synthesize(const SynthSpec& spec, const FiberShape& shape) {
  if (spec.kind == SynthKind::from_file) {
    FiberField loaded = read_fiber_field(spec.path);
    if (!(loaded.shape() == shape))
      throw ShapeError("fiber field file " + spec.path.string() + " does not match the configured shape");
    return loaded;
  }

  FiberField out(shape);
  if (spec.kind == SynthKind::zero) return out;

  std::vector<bool> keep;
  if (spec.kind == SynthKind::residue_supported)
    keep = supported_slots(shape, {spec.residue});
  else
    keep = supported_slots(shape, spec.residues);

  Rng rng(spec.seed);
  const std::size_t dim = shape.block_dim();
  for (std::size_t s = 0; s < shape.grid.size(); ++s)
    for (std::size_t slot = 0; slot < shape.band_size(); ++slot) {
      if (!keep[slot]) continue;
      CMatrix b = spec.kind == SynthKind::rank_one ? rank_one_block(rng, dim) : random_block(rng, dim);
      out.block_at(s, slot) = b * pfaffian_weight(shape.frequency(s, shape.residues.band_index(slot)), shape.lattice.d);
    }
  return out;
}

std::string to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::random: return "random";
    case SynthKind::residue_supported: return "residue";
    case SynthKind::rank_one: return "rank-one";
    case SynthKind::zero: return "zero";
    case SynthKind::from_file: return "fiber-file";
  }
  return "unknown";
}

SynthKind synth_kind_from_string(const std::string& name) {
  if (name == "random") return SynthKind::random;
  if (name == "residue") return SynthKind::residue_supported;
  if (name == "rank-one") return SynthKind::rank_one;
  if (name == "zero") return SynthKind::zero;
  if (name == "fiber-file") return SynthKind::from_file;
  throw InvalidConfig("unknown generator kind '" + name + "'");
}

void write_fiber_field(const std::filesystem::path& path, const FiberField& field) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto& shape = field.shape();
  binary::put_magic(out, "FIBF");
  binary::put_u64(out, kFiberFileVersion);
  binary::put_u64(out, static_cast<std::uint64_t>(shape.lattice.d));
  binary::put_u64(out, shape.grid.size());
  binary::put_u64(out, static_cast<std::uint64_t>(shape.lattice.refinement));
  binary::put_u64(out, static_cast<std::uint64_t>(shape.residues.band_half_width()));
  binary::put_u64(out, shape.rep.points_per_axis());
  binary::put_f64(out, shape.rep.window());
  binary::put_f64(out, shape.lattice.center_spacing);
  const auto dim = static_cast<Eigen::Index>(shape.block_dim());
  for (std::size_t s = 0; s < shape.grid.size(); ++s)
    for (std::size_t slot = 0; slot < shape.band_size(); ++slot) {
      const CMatrix& b = field.block_at(s, slot);
      for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) binary::put_complex(out, b(r, c));
    }
  if (!out) throw IoError("write failed for " + path.string());
}

FiberField read_fiber_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  binary::expect_magic(in, "FIBF", path.string());
  const auto version = binary::get_u64(in);
  if (version != kFiberFileVersion) throw IoError(path.string() + ": unsupported version " + std::to_string(version));
  LatticeConfig lattice;
  lattice.d = static_cast<int>(binary::get_u64(in));
  const auto S = binary::get_u64(in);
  lattice.refinement = static_cast<int>(binary::get_u64(in));
  const auto K = static_cast<int>(binary::get_u64(in));
  const auto M = binary::get_u64(in);
  const double L = binary::get_f64(in);
  lattice.center_spacing = binary::get_f64(in);

  FiberField field(FiberShape::make(lattice, S, K, M, L));
  const auto& shape = field.shape();
  const auto dim = static_cast<Eigen::Index>(shape.block_dim());
  for (std::size_t s = 0; s < shape.grid.size(); ++s)
    for (std::size_t slot = 0; slot < shape.band_size(); ++slot) {
      CMatrix& b = field.block_at(s, slot);
      for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) b(r, c) = binary::get_complex(in);
    }
  return field;
}

}  // namespace fiberscope
