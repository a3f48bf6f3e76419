#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "bot/json_io.hpp"
#include "bot/problem.hpp"
#include "support/fixtures.hpp"

namespace bot {
namespace {

using testing::make_problem;

TEST(GenerateRandomProblem, TwoTerminalsHaveUnitMasses) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Problem p = generate_random_problem(2, seed);
    ASSERT_EQ(p.size(), 2);
    const double a = p.terminals[0].mu;
    const double b = p.terminals[1].mu;
    EXPECT_DOUBLE_EQ(std::max(a, b), 1.0);
    EXPECT_DOUBLE_EQ(std::min(a, b), -1.0);
  }
}

TEST(GenerateRandomProblem, SupplyAndDemandNormalized) {
  for (int n = 2; n <= 12; ++n) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const Problem p = generate_random_problem(n, seed, 2 + static_cast<int>(seed % 3));
      double supply = 0.0;
      double demand = 0.0;
      for (const auto& t : p.terminals) (t.mu > 0 ? supply : demand) += t.mu;
      EXPECT_NEAR(supply, 1.0, 1e-12);
      EXPECT_NEAR(demand, -1.0, 1e-12);
    }
  }
}

TEST(GenerateRandomProblem, DeterministicForSeed) {
  const Problem a = generate_random_problem(5, 1234);
  const Problem b = generate_random_problem(5, 1234);
  EXPECT_EQ(a, b);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_NE(to_json(a).dump(), to_json(generate_random_problem(5, 1235)).dump());
}

TEST(GenerateRandomProblem, RespectsRanges) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Problem p = generate_random_problem(7, seed, 3);
    EXPECT_EQ(p.dim, 3);
    EXPECT_GE(p.alpha, 0.0);
    EXPECT_LE(p.alpha, 1.0);
    int sources = 0;
    for (const auto& t : p.terminals) {
      sources += t.mu > 0;
      ASSERT_EQ(t.position.size(), 3u);
      for (double x : t.position) {
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 1.0);
      }
    }
    EXPECT_GE(sources, 1);
    EXPECT_LE(sources, 6);
  }
}

TEST(GenerateRandomProblem, AlwaysValid) {
  for (int n = 2; n <= 15; ++n)
    for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_TRUE(validate(generate_random_problem(n, seed)).empty());
}

TEST(GenerateRandomProblem, RejectsSingleTerminal) {
  EXPECT_THROW(generate_random_problem(1, 0), std::invalid_argument);
  EXPECT_THROW(generate_random_problem(0, 0), std::invalid_argument);
}

TEST(Validate, AcceptsBalancedPair) {
  EXPECT_TRUE(validate(make_problem(0.5, {{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, -1.0}})).empty());
}

TEST(Validate, ReportsMassImbalance) {
  const auto v = validate(make_problem(0.5, {{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, -0.9}}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("mass imbalance"), std::string::npos);
}

TEST(Validate, ReportsCoincidentTerminals) {
  const auto v = validate(make_problem(0.5, {{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, -0.5}, {{1.0, 0.0}, -0.5}}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("coincident terminals"), std::string::npos);
}

TEST(Validate, ReportsEachBrokenInvariant) {
  Problem p = make_problem(1.5, {{{0.0, 0.0}, 1.0}, {{1.0}, 1.0}});
  const auto v = validate(p);
  // alpha, position length, imbalance, missing sink
  EXPECT_EQ(v.size(), 4u);
  EXPECT_THROW(require_valid(p), std::invalid_argument);
}

TEST(Validate, RejectsZeroMass) {
  const auto v = validate(make_problem(0.5, {{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, -1.0}, {{2.0, 0.0}, 0.0}}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("zero mass"), std::string::npos);
}

TEST(ProblemJson, RoundTripIsBitExact) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Problem p = generate_random_problem(8, seed, 2 + static_cast<int>(seed % 4));
    const auto text = to_json(p).dump();
    const Problem q = problem_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(p, q);
  }
}

TEST(ProblemJson, RenormalizesSmallImbalance) {
  nlohmann::json j = {{"alpha", 0.3},
                      {"dim", 2},
                      {"terminals", {{{"pos", {0, 0}}, {"mu", 1.0}}, {{"pos", {1, 0}}, {"mu", -1.0 + 5e-10}}}}};
  const Problem p = problem_from_json(j);
  EXPECT_DOUBLE_EQ(p.terminals[1].mu, -1.0);
}

TEST(ProblemJson, RejectsLargeImbalance) {
  nlohmann::json j = {{"alpha", 0.3},
                      {"dim", 2},
                      {"terminals", {{{"pos", {0, 0}}, {"mu", 1.0}}, {{"pos", {1, 0}}, {"mu", -0.5}}}}};
  EXPECT_THROW(problem_from_json(j), ParseError);
}

TEST(ProblemJson, DimDefaultsToTwo) {
  nlohmann::json j = {{"alpha", 0.3}, {"terminals", {{{"pos", {0, 0}}, {"mu", 1.0}}, {{"pos", {1, 0}}, {"mu", -1.0}}}}};
  EXPECT_EQ(problem_from_json(j).dim, 2);
}

TEST(ProblemFile, SyntaxErrorCarriesLineContext) {
  const auto path = std::filesystem::temp_directory_path() / "bot_problem_syntax.json";
  {
    std::ofstream f(path);
    f << "{\n  \"alpha\": 0.5,\n  \"terminals\": [\n    {\"pos\": [0, 0] \"mu\": 1}\n  ]\n}\n";
  }
  try {
    load_problem(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":4:"), std::string::npos) << e.what();
  }
  std::filesystem::remove(path);
}

TEST(ProblemFile, SaveLoadRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "bot_problem_roundtrip.json";
  const Problem p = generate_random_problem(6, 99, 3);
  save_problem(p, path);
  EXPECT_EQ(load_problem(path), p);
  std::filesystem::remove(path);
}

TEST(ProblemScaling, ScalesCoordinatesAndMasses) {
  const Problem p = generate_random_problem(4, 5);
  const Problem c = scale_coordinates(p, 3.0);
  const Problem m = scale_masses(p, 0.25);
  for (int i = 0; i < p.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    EXPECT_DOUBLE_EQ(c.terminals[k].position[1], 3.0 * p.terminals[k].position[1]);
    EXPECT_DOUBLE_EQ(m.terminals[k].mu, 0.25 * p.terminals[k].mu);
  }
}

TEST(BoundingBox, CoversTerminals) {
  const Problem p = make_problem(0.5, {{{-1.0, 2.0}, 1.0}, {{3.0, -2.0}, -1.0}});
  const auto box = bounding_box(p);
  EXPECT_EQ(box.lo, (std::vector<double>{-1.0, -2.0}));
  EXPECT_EQ(box.hi, (std::vector<double>{3.0, 2.0}));
  EXPECT_DOUBLE_EQ(box.diagonal(), std::sqrt(32.0));
}

}  // namespace
}  // namespace bot
