#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "../support/instances.hpp"
#include "fiberscope/errors.hpp"
#include "fiberscope/fiber_space.hpp"

using namespace fiberscope;
using fstest::shape_of;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "fiberscope-unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

double max_diff(const FiberField& a, const FiberField& b) {
  double worst = 0.0;
  const auto& sh = a.shape();
  for (std::size_t s = 0; s < sh.grid.size(); ++s)
    for (std::size_t slot = 0; slot < sh.band_size(); ++slot)
      worst = std::max(worst, (a.block_at(s, slot) - b.block_at(s, slot)).cwiseAbs().maxCoeff());
  return worst;
}

// Norm by a direct loop over entries, no Eigen reductions.
double loop_norm_squared(const FiberField& f) {
  const auto& sh = f.shape();
  double total = 0.0;
  for (std::size_t s = 0; s < sh.grid.size(); ++s)
    for (std::size_t slot = 0; slot < sh.band_size(); ++slot) {
      const CMatrix& b = f.block_at(s, slot);
      for (Eigen::Index r = 0; r < b.rows(); ++r)
        for (Eigen::Index c = 0; c < b.cols(); ++c) total += std::norm(b(r, c));
    }
  return total * sh.grid.cell_measure();
}

}  // namespace

TEST(HsInner, Examples) {
  EXPECT_EQ(hs_inner(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)), Complex(2.0));
  CMatrix a = CMatrix::Zero(2, 2), b = CMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  b(1, 0) = 1.0;
  EXPECT_EQ(hs_inner(a, b), Complex(0.0));
  CMatrix c = CMatrix::Zero(1, 1);
  c(0, 0) = Complex(0.0, 1.0);
  EXPECT_EQ(hs_inner(c, c), Complex(1.0));
}

TEST(HsInner, ConjugateLinearInSecondSlot) {
  Rng rng(1);
  CMatrix a(3, 3), b(3, 3);
  for (Eigen::Index i = 0; i < 9; ++i) {
    a.data()[i] = rng.complex_symmetric();
    b.data()[i] = rng.complex_symmetric();
  }
  const Complex z(0.3, -1.2);
  EXPECT_LT(std::abs(hs_inner(a, z * b) - std::conj(z) * hs_inner(a, b)), 1e-14);
  EXPECT_LT(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))), 1e-14);
}

TEST(HsInner, SizeMismatchRejected) {
  EXPECT_THROW(hs_inner(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)), ShapeError);
}

TEST(FiberField, NormMatchesIndependentLoop) {
  const auto shape = shape_of(3, 2);
  const FiberField f = fstest::random_field(shape, 17);
  EXPECT_NEAR(f.norm_squared(), loop_norm_squared(f), 1e-12 * loop_norm_squared(f));
  EXPECT_NEAR(field_inner(f, f).real(), f.norm_squared(), 1e-12 * f.norm_squared());
}

TEST(FiberField, BlocksOutsideBandRejected) {
  FiberField f(shape_of(2, 1));
  EXPECT_THROW(f.block(0, 2), ShapeError);
  EXPECT_THROW(f.block(8, 0), ShapeError);
  EXPECT_NO_THROW(f.block(7, -2));
}

TEST(FiberField, IncompatibleShapesRejected) {
  FiberField a(shape_of(2, 1)), b(shape_of(3, 1));
  EXPECT_THROW(a += b, ShapeError);
  EXPECT_THROW(field_inner(a, b), ShapeError);
}

TEST(CentralModulate, ZeroIsIdentity) {
  const FiberField f = fstest::random_field(shape_of(2, 1), 3);
  EXPECT_EQ(central_modulate(f, 0.0), f);
}

TEST(CentralModulate, UnitShiftGivesSectionPhase) {
  // theta = 1 (= c): the fiber index drops out and only the section point remains.
  const auto shape = shape_of(2, 2);
  const FiberField f = fstest::random_field(shape, 4);
  const FiberField g = central_modulate(f, 1.0);
  for (std::size_t s = 0; s < shape.grid.size(); ++s)
    for (int n = -4; n < 4; ++n) {
      const Complex phase = std::polar(1.0, kTwoPi * shape.grid.point(s));
      EXPECT_LT((g.block(s, n) - phase * f.block(s, n)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(CentralModulate, RefinedStepComposesToLatticeStep) {
  const auto shape = shape_of(3, 1);
  const FiberField f = fstest::random_field(shape, 5);
  FiberField g = f;
  for (int i = 0; i < 3; ++i) g = central_modulate(g, 1.0 / 3.0);
  EXPECT_LT(max_diff(g, central_modulate(f, 1.0)), 1e-12);
}

TEST(CentralModulate, IsometryAndAdditive) {
  const auto shape = shape_of(3, 2);
  const FiberField f = fstest::random_field(shape, 6);
  EXPECT_NEAR(central_modulate(f, 0.37).norm_squared(), f.norm_squared(), 1e-12 * f.norm_squared());
  EXPECT_LT(max_diff(central_modulate(central_modulate(f, 0.2), 0.5), central_modulate(f, 0.7)), 1e-12);
}

TEST(GammaTranslate, IdentityLeavesFieldUnchanged) {
  const FiberField f = fstest::random_field(shape_of(2, 1), 7);
  EXPECT_EQ(gamma_translate(f, GroupElement::identity(1)), f);
}

TEST(GammaTranslate, MatchesRepresentationMatrixPerBlock) {
  const auto shape = shape_of(2, 2, 4, 4, 2.0);
  const FiberField f = fstest::random_field(shape, 8);
  const GroupElement g{{1.5}, {-0.75}, 0.25};
  const FiberField t = gamma_translate(f, g);
  for (std::size_t s = 0; s < shape.grid.size(); ++s)
    for (int n = -4; n < 4; ++n) {
      const CMatrix want = rep_matrix(shape.frequency(s, n), g, shape.rep) * f.block(s, n);
      EXPECT_LT((t.block(s, n) - want).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(GammaTranslate, IsometryAndCommutesWithCenter) {
  const auto shape = shape_of(3, 1);
  const FiberField f = fstest::random_field(shape, 9);
  const GroupElement g{{1.0}, {2.0}, 0.0};
  EXPECT_NEAR(gamma_translate(f, g).norm_squared(), f.norm_squared(), 1e-12 * f.norm_squared());
  EXPECT_LT(max_diff(gamma_translate(central_modulate(f, 0.4), g), central_modulate(gamma_translate(f, g), 0.4)), 1e-12);
}

TEST(GammaTranslate, OffGridElementRejected) {
  const FiberField f(shape_of(2, 1));
  EXPECT_THROW(gamma_translate(f, GroupElement{{0.3}, {0.0}, 0.0}), GridMismatch);
}

TEST(Mask, SplitsIntoOrthogonalComponents) {
  const auto shape = shape_of(3, 2);
  const FiberField f = fstest::random_field(shape, 10);
  FiberField sum(shape);
  double norms = 0.0;
  for (int j = 0; j < 3; ++j) {
    const FiberField fj = mask(f, j);
    EXPECT_EQ(mask(fj, j), fj);
    for (int k = 0; k < 3; ++k)
      if (k != j) EXPECT_EQ(mask(fj, k).norm_squared(), 0.0);
    sum += fj;
    norms += fj.norm_squared();
  }
  EXPECT_EQ(sum, f);
  EXPECT_NEAR(norms, f.norm_squared(), 1e-12 * norms);
}

TEST(Mask, TwoClassSupport) {
  const auto shape = shape_of(2, 1);
  const FiberField f = fstest::random_field(shape, 11);
  const FiberField f0 = mask(f, 0);
  for (std::size_t s = 0; s < shape.grid.size(); ++s) {
    EXPECT_EQ(f0.block(s, -2), f.block(s, -2));
    EXPECT_EQ(f0.block(s, 0), f.block(s, 0));
    EXPECT_EQ(f0.block(s, -1).norm(), 0.0);
    EXPECT_EQ(f0.block(s, 1).norm(), 0.0);
  }
}

TEST(Mask, InvalidResidueRejected) {
  const FiberField f(shape_of(2, 1));
  EXPECT_THROW(mask(f, 2), InvalidResidue);
  EXPECT_THROW(mask(f, -1), InvalidResidue);
}

TEST(Mask, AgreesWithCharacterAverageOfModulations) {
  // mask_j F = (1/N) sum_k e^{-2 pi i j k / N} e^{-2 pi i sigma k c / N} M_{k c / N} F
  for (const double c : {1.0, 0.5}) {
    const int N = 3;
    const auto shape = shape_of(N, 2, 8, 4, 2.0, c);
    const FiberField f = fstest::random_field(shape, 12);
    for (int j = 0; j < N; ++j) {
      FiberField acc(shape);
      for (int k = 0; k < N; ++k) {
        FiberField mk = central_modulate(f, k * c / N);
        for (std::size_t s = 0; s < shape.grid.size(); ++s) {
          const Complex w = std::polar(1.0 / N, -kTwoPi * (static_cast<double>(j * k) / N + shape.grid.point(s) * k * c / N));
          for (std::size_t slot = 0; slot < shape.band_size(); ++slot) mk.block_at(s, slot) *= w;
        }
        acc += mk;
      }
      EXPECT_LT(max_diff(acc, mask(f, j)), 1e-12) << "c=" << c << " j=" << j;
    }
  }
}

TEST(Synthesize, ResidueSupportedStaysInClass) {
  const auto shape = shape_of(3, 2);
  const FiberField f = fstest::residue_field(shape, 13, 1);
  EXPECT_GT(f.norm_squared(), 0.0);
  EXPECT_EQ(mask(f, 1), f);
}

TEST(Synthesize, SeedDeterminesField) {
  const auto shape = shape_of(2, 1);
  EXPECT_EQ(fstest::random_field(shape, 14), fstest::random_field(shape, 14));
  EXPECT_FALSE(fstest::random_field(shape, 14) == fstest::random_field(shape, 15));
}

TEST(Synthesize, RankOneBlocks) {
  const auto shape = shape_of(2, 1, 4, 4, 2.0);
  const FiberField f = fstest::rank_one_field(shape, 16);
  for (std::size_t s = 0; s < shape.grid.size(); ++s)
    for (std::size_t slot = 0; slot < shape.band_size(); ++slot) {
      const Eigen::JacobiSVD<CMatrix> svd(f.block_at(s, slot));
      const auto sv = svd.singularValues();
      EXPECT_GT(sv(0), 0.0);
      EXPECT_LT(sv(1), 1e-12 * sv(0));
    }
}

TEST(Synthesize, ZeroAndKindNames) {
  SynthSpec spec;
  spec.kind = SynthKind::zero;
  EXPECT_EQ(synthesize(spec, shape_of(2, 1)).norm_squared(), 0.0);
  for (const auto kind : {SynthKind::random, SynthKind::residue_supported, SynthKind::rank_one, SynthKind::zero, SynthKind::from_file})
    EXPECT_EQ(synth_kind_from_string(to_string(kind)), kind);
  EXPECT_THROW(synth_kind_from_string("gaussian"), InvalidConfig);
}

TEST(Synthesize, InvalidResidueRejected) {
  EXPECT_THROW(fstest::residue_field(shape_of(2, 1), 1, 5), InvalidResidue);
}

TEST(FiberFile, RoundTripExact) {
  for (const double c : {1.0, 0.5}) {
    const auto shape = shape_of(3, 2, 4, 4, 2.0, c);
    const FiberField f = fstest::random_field(shape, 18);
    const auto path = temp_file("roundtrip.fibf");
    write_fiber_field(path, f);
    EXPECT_EQ(read_fiber_field(path), f);
  }
}

TEST(FiberFile, HeaderLayout) {
  const auto shape = shape_of(3, 2, 4, 4, 2.0);
  const auto path = temp_file("header.fibf");
  write_fiber_field(path, FiberField(shape));
  std::ifstream in(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ASSERT_EQ(bytes.size(), 72u + shape.num_blocks() * 16u * 16u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "FIBF");
  for (int i = 4; i < 8; ++i) EXPECT_EQ(bytes[static_cast<std::size_t>(i)], 0);
  auto u64_at = [&](std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[off + static_cast<std::size_t>(i)];
    return v;
  };
  EXPECT_EQ(u64_at(8), 1u);   // version
  EXPECT_EQ(u64_at(16), 1u);  // d
  EXPECT_EQ(u64_at(24), 4u);  // S
  EXPECT_EQ(u64_at(32), 3u);  // N
  EXPECT_EQ(u64_at(40), 2u);  // K
  EXPECT_EQ(u64_at(48), 4u);  // M
}

TEST(FiberFile, BadMagicAndTruncationRejected) {
  const auto path = temp_file("bad.fibf");
  {
    std::ofstream out(path, std::ios::binary);
    out << "XXXX0000";
  }
  EXPECT_THROW(read_fiber_field(path), IoError);

  write_fiber_field(path, fstest::random_field(shape_of(2, 1), 19));
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  EXPECT_THROW(read_fiber_field(path), IoError);
  EXPECT_THROW(read_fiber_field(temp_file("missing.fibf")), IoError);
}

TEST(FiberFile, FromFileShapeMismatchRejected) {
  const auto path = temp_file("mismatch.fibf");
  write_fiber_field(path, FiberField(shape_of(2, 1)));
  SynthSpec spec;
  spec.kind = SynthKind::from_file;
  spec.path = path;
  EXPECT_NO_THROW(synthesize(spec, shape_of(2, 1)));
  EXPECT_THROW(synthesize(spec, shape_of(3, 1)), ShapeError);
}
