#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "fiberscope/config.hpp"
#include "fiberscope/errors.hpp"
#include "fiberscope/random.hpp"

using namespace fiberscope;

namespace {

const char* kMinimal = R"(
[lattice]
N = 2
[grid]
S = 8
K = 1
M = 4
[gamma]
pairs = 0:0
)";

std::vector<std::string> problems_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  return std::any_of(problems.begin(), problems.end(), [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

RunConfig random_config(std::uint64_t seed) {
  Rng rng(seed);
  RunConfig cfg;
  cfg.N = 1 + static_cast<int>(rng.below(4));
  cfg.c = std::vector<double>{1.0, 0.5, 2.0, 0.1}[rng.below(4)];
  cfg.S = 1 + rng.below(32);
  cfg.K = 1 + static_cast<int>(rng.below(3));
  cfg.M = std::size_t{2} << rng.below(3);
  cfg.L = static_cast<double>(cfg.M) * (rng.below(2) ? 0.5 : 0.25);
  cfg.a = cfg.L / static_cast<double>(cfg.M) * static_cast<double>(4 + rng.below(3) * 4);
  cfg.b = 1.0 / cfg.a * static_cast<double>(1 + rng.below(3));
  cfg.pairs = {{{0}, {0}}};
  if (rng.below(2)) cfg.pairs.push_back({{static_cast<int>(rng.below(5)) - 2}, {1}});
  const std::size_t gens = rng.below(4);
  for (std::size_t i = 0; i < gens; ++i) {
    GeneratorSpec g;
    switch (rng.below(4)) {
      case 0: g.kind = "random"; break;
      case 1:
        g.kind = "residue";
        g.residue = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.N)));
        break;
      case 2: g.kind = "rank-one"; break;
      default: g.kind = "zero"; break;
    }
    if (rng.below(2)) g.seed = rng.next_u64();
    if ((g.kind == "random" || g.kind == "rank-one") && rng.below(2)) g.residues = {0};
    cfg.generators.push_back(g);
  }
  cfg.tol.rank = 1e-8 * (1.0 + rng.uniform());
  cfg.tol.member = 3.7e-9;
  cfg.plancherel_tol = 0.02;
  cfg.seed = rng.next_u64();
  cfg.dumps = rng.below(2) == 1;
  cfg.out = "out-" + std::to_string(seed);
  if (rng.below(2)) cfg.analyses = {"range", "oracle", "dimension"};
  return cfg;
}

}  // namespace

TEST(ParseConfig, MinimalConfigUsesDefaults) {
  const RunConfig cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.N, 2);
  EXPECT_EQ(cfg.S, 8u);
  EXPECT_EQ(cfg.d, 1);
  EXPECT_EQ(cfg.c, 1.0);
  EXPECT_EQ(cfg.L, 4.0);
  EXPECT_EQ(cfg.tol.rank, 1e-8);
  EXPECT_EQ(cfg.tol.supp, 1e-10);
  EXPECT_EQ(cfg.analyses, analysis_order());
  EXPECT_TRUE(cfg.generators.empty());
}

TEST(ParseConfig, NonIntegerProductRejected) {
  const auto p = problems_of(std::string(kMinimal) + "a = 0.5\nb = 1\n");
  EXPECT_TRUE(mentions(p, "a*b not integer"));
}

TEST(ParseConfig, MissingIdentityNamesHypothesis) {
  const auto p = problems_of("[gamma]\npairs = 1:0 0:1\n");
  EXPECT_TRUE(mentions(p, "identity pair (0,0)"));
}

TEST(ParseConfig, GridStepMultiple) {
  EXPECT_TRUE(mentions(problems_of("[grid]\nM = 4\nL = 4\n[gamma]\na = 1.5\nb = 2\n"), "multiple of the grid step"));
  EXPECT_TRUE(problems_of("[grid]\nM = 4\nL = 2\n[gamma]\na = 1.5\nb = 2\n").empty());
}

TEST(ParseConfig, UnknownKeyCarriesLineNumber) {
  const auto p = problems_of("[lattice]\nN = 2\nQ = 3\n");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], "line 3: unknown key 'Q' in [lattice]");
}

TEST(ParseConfig, SyntaxErrors) {
  EXPECT_TRUE(mentions(problems_of("[lattice\n"), "line 1: malformed section header"));
  EXPECT_TRUE(mentions(problems_of("[lattice]\nN 2\n"), "line 2: expected 'key = value'"));
  EXPECT_TRUE(mentions(problems_of("N = 2\n"), "before any [section]"));
  EXPECT_TRUE(mentions(problems_of("[nope]\n"), "unknown section [nope]"));
  EXPECT_TRUE(mentions(problems_of("[lattice]\nN = two\n"), "N: expected an integer"));
  EXPECT_TRUE(mentions(problems_of("[lattice]\nN = 2\nN = 3\n"), "line 3: duplicate key 'N'"));
  EXPECT_TRUE(mentions(problems_of("[gamma]\npairs = 0-0\n"), "pairs: expected m:n"));
}

TEST(ParseConfig, ReportsEverySyntaxError) {
  const auto p = problems_of("[lattice]\nX = 1\n[grid]\nY = 2\nZ\n");
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0].rfind("line 2:", 0), 0u);
  EXPECT_EQ(p[1].rfind("line 4:", 0), 0u);
  EXPECT_EQ(p[2].rfind("line 5:", 0), 0u);
}

TEST(ParseConfig, ReportsEveryConstraintViolation) {
  const auto p = problems_of("[gamma]\na = 0.5\nb = 1\npairs = 1:1\n[tolerances]\nrank = 0\n[run]\nanalyses = range, nope\n");
  EXPECT_TRUE(mentions(p, "a*b not integer"));
  EXPECT_TRUE(mentions(p, "identity pair"));
  EXPECT_TRUE(mentions(p, "tolerances must be positive"));
  EXPECT_TRUE(mentions(p, "unknown analysis 'nope'"));
}

TEST(ParseConfig, CommentsAndWhitespace) {
  const RunConfig cfg = parse_config("# header\n  [lattice]   \n N = 3   # three classes\n\n");
  EXPECT_EQ(cfg.N, 3);
}

TEST(ParseConfig, Generators) {
  const RunConfig cfg = parse_config(
      "[lattice]\nN = 3\n[generators]\ngen = residue residue=2 seed=5\ngen = random residues=0,1\ngen = zero\n");
  ASSERT_EQ(cfg.generators.size(), 3u);
  EXPECT_EQ(cfg.generators[0].kind, "residue");
  EXPECT_EQ(cfg.generators[0].residue, 2);
  EXPECT_EQ(cfg.generator_seed(0), 5u);
  EXPECT_EQ(cfg.generators[1].residues, (std::vector<int>{0, 1}));
  EXPECT_EQ(cfg.generator_seed(1), derive_seed(0, 1));
  EXPECT_EQ(cfg.generators[2].kind, "zero");
}

TEST(ParseConfig, GeneratorProblems) {
  EXPECT_TRUE(mentions(problems_of("[generators]\ngen = gaussian\n"), "unknown kind 'gaussian'"));
  EXPECT_TRUE(mentions(problems_of("[generators]\ngen = zero path=x\n"), "does not apply"));
  EXPECT_TRUE(mentions(problems_of("[lattice]\nN = 2\n[generators]\ngen = residue residue=2\n"), "outside 0..N-1"));
  EXPECT_TRUE(mentions(problems_of("[generators]\ngen = fiber-file\n"), "path required"));
  EXPECT_TRUE(mentions(problems_of("[lattice]\nd = 2\n[gamma]\npairs = 0,0:0,0\n[generators]\ngen = sampled-file path=f\n"),
                       "need d = 1"));
  EXPECT_TRUE(mentions(problems_of("[generators]\ngen = random\n[beta]\nphi = 3\n"), "phi must index"));
}

TEST(ParseConfig, TwoDimensionalPairs) {
  const RunConfig cfg = parse_config("[lattice]\nd = 2\n[grid]\nM = 2\nL = 2\n[gamma]\npairs = 0,0:0,0 1,0:0,1\n");
  ASSERT_EQ(cfg.pairs.size(), 2u);
  EXPECT_EQ(cfg.pairs[1].first, (std::vector<int>{1, 0}));
  EXPECT_EQ(cfg.pairs[1].second, (std::vector<int>{0, 1}));
  EXPECT_TRUE(mentions(problems_of("[lattice]\nd = 2\n[gamma]\npairs = 0:0\n"), "d components"));
}

TEST(ParseConfig, BlockDimensionCap) {
  EXPECT_TRUE(mentions(problems_of("[lattice]\nd = 2\n[grid]\nM = 128\nL = 128\n[gamma]\npairs = 0,0:0,0\n"), "4096"));
}

TEST(Render, RoundTripsRandomConfigs) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const RunConfig cfg = random_config(seed);
    ASSERT_TRUE(cfg.problems().empty()) << "seed " << seed << ": " << cfg.problems().front();
    const std::string text = render(cfg);
    const RunConfig back = parse_config(text);
    EXPECT_EQ(back, cfg) << text;
    EXPECT_EQ(render(back), text);
  }
}

TEST(Render, DefaultRoundTrip) {
  const RunConfig cfg;
  EXPECT_EQ(parse_config(render(cfg)), cfg);
}

TEST(LoadConfig, ReadsFileAndReportsMissing) {
  const auto path = std::filesystem::temp_directory_path() / "fiberscope-unit-config.cfg";
  {
    std::ofstream out(path);
    out << kMinimal;
  }
  EXPECT_EQ(load_config(path).N, 2);
  EXPECT_THROW(load_config(path.string() + ".missing"), IoError);
}

TEST(RunConfig, DerivedObjects) {
  RunConfig cfg = parse_config("[lattice]\nN = 3\nc = 0.5\n[grid]\nS = 4\nK = 2\nM = 4\nL = 2\n[gamma]\npairs = 0:0 1:1\n");
  EXPECT_EQ(cfg.shape().band_size(), 12u);
  EXPECT_EQ(cfg.gamma().size(), 2u);
  EXPECT_DOUBLE_EQ(cfg.shape().grid.section_length(), 2.0);
  EXPECT_TRUE(cfg.requested("beta"));
  cfg.analyses = {"range"};
  EXPECT_FALSE(cfg.requested("beta"));
}
