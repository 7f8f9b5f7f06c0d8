#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fiberscope/lattice_sections.hpp"
#include "fiberscope/schrodinger.hpp"

namespace fiberscope {

/// Everything that fixes the discretised fiber domain. Two fields are composable only if
/// their shapes compare equal.
struct FiberShape {
  LatticeConfig lattice;
  SectionGrid grid;
  ResidueSystem residues;
  RepGrid rep;

  static FiberShape make(const LatticeConfig& lattice, std::size_t S, int K, std::size_t M, double L);

  std::size_t block_dim() const { return rep.dimension(); }
  std::size_t band_size() const { return residues.band_size(); }
  std::size_t num_blocks() const { return grid.size() * residues.band_size(); }
  /// Length of one flattened fiber: band * dim^2.
  std::size_t fiber_length() const { return band_size() * block_dim() * block_dim(); }

  /// Central frequency sigma_s + n/c carried by block (s, n).
  double frequency(std::size_t s, int n) const {
    return grid.point(s) + static_cast<double>(n) * grid.section_length();
  }

  bool operator==(const FiberShape&) const = default;
};

/// Discretised T f: sigma-grid x fiber band -> dim x dim Hilbert-Schmidt blocks.
///
/// The Plancherel weight |sigma + n|^{d/2} is already included in the blocks. Fibers outside
/// the band are zero.
class FiberField {
 public:
  FiberField() = default;
  explicit FiberField(FiberShape shape);

  const FiberShape& shape() const { return shape_; }

  CMatrix& block(std::size_t s, int n) { return blocks_[index(s, n)]; }
  const CMatrix& block(std::size_t s, int n) const { return blocks_[index(s, n)]; }
  CMatrix& block_at(std::size_t s, std::size_t slot) { return blocks_[s * shape_.band_size() + slot]; }
  const CMatrix& block_at(std::size_t s, std::size_t slot) const { return blocks_[s * shape_.band_size() + slot]; }

  /// Fiber at sigma_s as a vector: band slots ascending, each block row-major.
  CVector fiber(std::size_t s) const;
  void set_fiber(std::size_t s, const CVector& values);

  /// ||F||^2 = sum_{s,n} ||block||_HS^2 * cell measure, accumulated in ascending (s, n).
  double norm_squared() const;
  double norm() const;
  double max_block_norm() const;

  FiberField& operator+=(const FiberField& other);
  FiberField& operator-=(const FiberField& other);
  FiberField& operator*=(Complex scale);

  /// Exact equality of shape and every entry.
  bool operator==(const FiberField& other) const;

 private:
  std::size_t index(std::size_t s, int n) const;
  void require_compatible(const FiberField& other) const;

  FiberShape shape_;
  std::vector<CMatrix> blocks_;
};

FiberField operator+(FiberField lhs, const FiberField& rhs);
FiberField operator-(FiberField lhs, const FiberField& rhs);
FiberField operator*(Complex scale, FiberField field);

/// <A, B>_HS = tr(B^* A).
Complex hs_inner(const CMatrix& a, const CMatrix& b);

/// <F, G> = sum_{s,n} <F(s,n), G(s,n)>_HS * cell measure.
Complex field_inner(const FiberField& f, const FiberField& g);

/// block(s, n) -> e^{2 pi i (sigma_s + n/c) theta} block(s, n).
FiberField central_modulate(const FiberField& field, double theta);

/// block(s, n) -> pi_{sigma_s + n/c}(gamma) block(s, n).
FiberField gamma_translate(const FiberField& field, const GroupElement& gamma);

/// Keeps the blocks with n = j (mod N), zeroes the rest. Throws InvalidResidue if j is not in
/// the residue system.
FiberField mask(const FiberField& field, int residue);

enum class SynthKind { random, residue_supported, rank_one, zero, from_file };

struct SynthSpec {
  SynthKind kind = SynthKind::random;
  std::uint64_t seed = 0;
  /// Residue classes that carry nonzero blocks (random / rank_one). Empty means all classes.
  std::vector<int> residues;
  /// Class used by residue_supported.
  int residue = 0;
  std::filesystem::path path;
};

FiberField synthesize(const SynthSpec& spec, const FiberShape& shape);

std::string to_string(SynthKind kind);
SynthKind synth_kind_from_string(const std::string& name);

/// Binary FIBF format: nine little-endian 64-bit header slots
///   magic "FIBF" (zero padded), version, d, S, N, K, M (u64), L, c (f64)
/// followed by the blocks in ascending (s, n), each dim^2 complex doubles (re, im), row-major.
/// M is the number of grid points per axis; dim = M^d.
void write_fiber_field(const std::filesystem::path& path, const FiberField& field);
FiberField read_fiber_field(const std::filesystem::path& path);

inline constexpr std::uint64_t kFiberFileVersion = 1;

}  // namespace fiberscope
