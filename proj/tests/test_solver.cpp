#include <gtest/gtest.h>

#include <map>
#include <set>

#include "crosspuzzle/generator.hpp"
#include "crosspuzzle/solver.hpp"
#include "fixtures.hpp"

using namespace crosspuzzle;
using fixtures::grid_of;

namespace {

Equation eq(int id, Orientation o, Coord start, Op op) { return Equation::at(id, o, start, op); }

}  // namespace

// --- detect_equations --------------------------------------------------------

TEST(DetectEquations, WorkedGrid) {
  const auto eqs = detect_equations(fixtures::worked_grid());
  constexpr auto H = Orientation::Horizontal;
  constexpr auto V = Orientation::Vertical;
  const std::vector<Equation> expected{
      eq(0, H, {2, 2}, Op::Div), eq(1, H, {4, 0}, Op::Div), eq(2, H, {6, 2}, Op::Add),
      eq(3, V, {0, 4}, Op::Add), eq(4, V, {2, 0}, Op::Add), eq(5, V, {4, 2}, Op::Mul),
  };
  EXPECT_EQ(eqs, expected);
}

TEST(DetectEquations, AllEmpty) { EXPECT_TRUE(detect_equations(Grid(5, 5)).empty()); }

TEST(DetectEquations, MinimalRow) {
  const auto eqs = detect_equations(grid_of("| 7 | + | 5 | = | 12 |"));
  ASSERT_EQ(eqs.size(), 1u);
  EXPECT_EQ(eqs[0].orientation, Orientation::Horizontal);
  EXPECT_EQ(eqs[0].a, (Coord{0, 0}));
  EXPECT_EQ(eqs[0].b, (Coord{0, 2}));
  EXPECT_EQ(eqs[0].c, (Coord{0, 4}));
  EXPECT_EQ(eqs[0].op, Op::Add);
  EXPECT_EQ(eqs[0].op_cell, (Coord{0, 1}));
  EXPECT_EQ(eqs[0].eq_cell, (Coord{0, 3}));
}

TEST(DetectEquations, VerticalOnly) {
  const auto eqs = detect_equations(grid_of("| 8 |\n| - |\n| 3 |\n| = |\n| 5 |"));
  ASSERT_EQ(eqs.size(), 1u);
  EXPECT_EQ(eqs[0].orientation, Orientation::Vertical);
  EXPECT_EQ(eqs[0].op, Op::Sub);
}

TEST(DetectEquations, LongerRunIsMalformed) {
  EXPECT_THROW(detect_equations(grid_of("| 1 | + | 2 | + | 3 | = | 6 |")), MalformedGrid);
}

TEST(DetectEquations, StrayOperatorIsMalformed) {
  EXPECT_THROW(detect_equations(grid_of("| 7 | + | 5 | = | 12 |   | × |")), MalformedGrid);
}

TEST(DetectEquations, WrongPatternIsMalformed) {
  EXPECT_THROW(detect_equations(grid_of("| 7 | = | 5 | + | 12 |")), MalformedGrid);
  EXPECT_THROW(detect_equations(grid_of("| 7 | 5 | + | = | 12 |")), MalformedGrid);
}

TEST(DetectEquations, IdenticalOnQueryAndAnswerGrid) {
  const Grid q = fixtures::worked_grid();
  const Grid a = fill_targets(q, {6, 93, 45, 8});
  EXPECT_EQ(detect_equations(q), detect_equations(a));
}

// --- solve_missing -------------------------------------------------------------

TEST(SolveMissing, SpecExamples) {
  EXPECT_EQ(solve_missing(Op::Add, Slot::A, 3, 9), 6);
  EXPECT_EQ(solve_missing(Op::Div, Slot::A, 3, 31), 93);
  EXPECT_EQ(solve_missing(Op::Mul, Slot::B, 5, 40), 8);
  EXPECT_EQ(solve_missing(Op::Div, Slot::A, 4, 7), 28);
}

TEST(SolveMissing, EverySlotOfEveryOperator) {
  EXPECT_EQ(solve_missing(Op::Add, Slot::B, 3, 9), 6);
  EXPECT_EQ(solve_missing(Op::Add, Slot::C, 3, 6), 9);
  EXPECT_EQ(solve_missing(Op::Sub, Slot::A, 4, 5), 9);
  EXPECT_EQ(solve_missing(Op::Sub, Slot::B, 9, 5), 4);
  EXPECT_EQ(solve_missing(Op::Sub, Slot::C, 9, 4), 5);
  EXPECT_EQ(solve_missing(Op::Mul, Slot::A, 8, 40), 5);
  EXPECT_EQ(solve_missing(Op::Mul, Slot::C, 5, 8), 40);
  EXPECT_EQ(solve_missing(Op::Div, Slot::B, 93, 31), 3);
  EXPECT_EQ(solve_missing(Op::Div, Slot::C, 93, 3), 31);
}

TEST(SolveMissing, NoIntegerSolution) {
  EXPECT_THROW(solve_missing(Op::Div, Slot::C, 10, 3), NoIntegerSolution);
  EXPECT_THROW(solve_missing(Op::Sub, Slot::C, 5, 5), NoIntegerSolution);
  EXPECT_THROW(solve_missing(Op::Add, Slot::A, 9, 3), NoIntegerSolution);
  EXPECT_THROW(solve_missing(Op::Mul, Slot::B, 3, 10), NoIntegerSolution);
  EXPECT_THROW(solve_missing(Op::Div, Slot::B, 10, 3), NoIntegerSolution);
}

// --- deduce --------------------------------------------------------------------

TEST(Deduce, WorkedSingleIteration) {
  const Grid g = fixtures::worked_grid();
  const Deduction d = deduce(g);
  ASSERT_EQ(d.trace.steps.size(), 1u);
  std::map<Coord, Value> resolved;
  for (const auto& r : d.trace.steps[0]) resolved[r.coord] = r.value;
  const std::map<Coord, Value> expected{{{0, 4}, 6}, {{2, 2}, 93}, {{4, 0}, 45}, {{6, 2}, 8}};
  EXPECT_EQ(resolved, expected);

  std::vector<Value> answers;
  for (Coord t : target_order(g)) answers.push_back(d.trace.answer_grid.at(t).value);
  EXPECT_EQ(answers, (std::vector<Value>{6, 93, 45, 8}));
  EXPECT_EQ(ordered_hops(g, d.hops), (std::vector<int>{1, 1, 1, 1}));
}

TEST(Deduce, TwoUnknownsIsUnsolvable) {
  EXPECT_THROW(deduce(grid_of("| ? | + | ? | = | 12 |")), Unsolvable);
}

TEST(Deduce, NoTargetsVerifiesOnly) {
  const Deduction d = deduce(fill_targets(fixtures::worked_grid(), {6, 93, 45, 8}));
  EXPECT_TRUE(d.trace.steps.empty());
  EXPECT_TRUE(d.hops.empty());
}

TEST(Deduce, FalseKnownEquationIsContradiction) {
  EXPECT_THROW(deduce(grid_of("| 7 | + | 5 | = | 13 |")), Contradiction);
}

TEST(Deduce, ConflictingResolutionsAreContradiction) {
  // The shared "?" at (0,4) is 12 by the row and 10 by the column.
  const Grid g = grid_of(
      "| 7 | + | 5 | = | ? |\n"
      "|   |   |   |   | - |\n"
      "|   |   |   |   | 3 |\n"
      "|   |   |   |   | = |\n"
      "|   |   |   |   | 7 |\n");
  EXPECT_THROW(deduce(g), Contradiction);
}

TEST(Deduce, AgreeingResolutionsKeepLowerEquationId) {
  const Grid g = grid_of(
      "| 7 | + | 5 | = | ? |\n"
      "|   |   |   |   | - |\n"
      "|   |   |   |   | 3 |\n"
      "|   |   |   |   | = |\n"
      "|   |   |   |   | 9 |\n");
  const Deduction d = deduce(g);
  ASSERT_EQ(d.trace.steps.size(), 1u);
  ASSERT_EQ(d.trace.steps[0].size(), 1u);
  EXPECT_EQ(d.trace.steps[0][0], (Resolution{0, {0, 4}, 12}));
}

TEST(Deduce, ChainProducesIncreasingHops) {
  // Row gives (0,4); the column then needs it to give (4,4).
  const Grid g = grid_of(
      "| 7 | + | 5 | = | ? |\n"
      "|   |   |   |   | - |\n"
      "|   |   |   |   | 3 |\n"
      "|   |   |   |   | = |\n"
      "|   |   |   |   | ? |\n");
  const Deduction d = deduce(g);
  ASSERT_EQ(d.trace.steps.size(), 2u);
  EXPECT_EQ(d.trace.steps[0], (std::vector<Resolution>{{0, {0, 4}, 12}}));
  EXPECT_EQ(d.trace.steps[1], (std::vector<Resolution>{{1, {4, 4}, 9}}));
  EXPECT_EQ(ordered_hops(g, d.hops), (std::vector<int>{1, 2}));
}

// A value resolved in iteration i must not feed another resolution in the
// same iteration, even when the equations are scanned in dependency order.
TEST(Deduce, CommitsAreSynchronizedPerIteration) {
  const Grid g = grid_of(
      "| 2 | + | 3 | = | ? |   |   |   |   |\n"
      "|   |   |   |   | + |   |   |   |   |\n"
      "|   |   |   |   | 4 |   |   |   |   |\n"
      "|   |   |   |   | = |   |   |   |   |\n"
      "|   |   |   |   | ? | + | 1 | = | ? |\n");
  const Deduction d = deduce(g);
  ASSERT_EQ(d.trace.steps.size(), 3u);
  EXPECT_EQ(ordered_hops(g, d.hops), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(d.trace.answer_grid.at(4, 8), Cell::number(10));
}

// --- verify_solution -------------------------------------------------------------

TEST(VerifySolution, SpecExamples) {
  const Grid g = fixtures::worked_grid();
  EXPECT_TRUE(verify_solution(g, {6, 93, 45, 8}));
  EXPECT_FALSE(verify_solution(g, {6, 93, 45, 9}));
  EXPECT_THROW(verify_solution(g, {6}), ArityMismatch);
  EXPECT_TRUE(verify_solution(fill_targets(g, {6, 93, 45, 8}), {}));
  EXPECT_FALSE(verify_solution(grid_of("| 7 | + | 5 | = | 13 |"), {}));
}

// --- brute_force_oracle ------------------------------------------------------------

TEST(BruteForceOracle, WorkedUnique) {
  const auto sols = brute_force_oracle(fixtures::worked_grid(), 1, 100);
  EXPECT_EQ(sols, (std::vector<std::vector<Value>>{{6, 93, 45, 8}}));
}

TEST(BruteForceOracle, SingleEquation) {
  const Grid g = grid_of("| ? | + | 2 | = | 5 |");
  EXPECT_EQ(brute_force_oracle(g, 1, 10), (std::vector<std::vector<Value>>{{3}}));
  EXPECT_TRUE(brute_force_oracle(g, 5, 10).empty());
}

TEST(BruteForceOracle, FindsEveryAssignment) {
  const auto sols = brute_force_oracle(grid_of("| ? | + | ? | = | 5 |"), 1, 10);
  EXPECT_EQ(sols, (std::vector<std::vector<Value>>{{1, 4}, {2, 3}, {3, 2}, {4, 1}}));
}

TEST(BruteForceOracle, Caps) {
  const Grid g = grid_of("| ? | + | 2 | = | 5 |");
  EXPECT_THROW(brute_force_oracle(g, 1, 1000), CapExceeded);
  OracleCaps tight;
  tight.max_targets = 0;
  EXPECT_THROW(brute_force_oracle(g, 1, 10, tight), CapExceeded);
}

// --- properties over generated puzzles ------------------------------------------------

class GeneratedPuzzles : public ::testing::TestWithParam<Difficulty> {};

TEST_P(GeneratedPuzzles, CausalityHopsAndVerification) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    GenParams p = GenParams::defaults_for(GetParam());
    p.seed = derive_seed(1234, seed);
    const DatasetExample ex = generate(p, "t");
    const auto eqs = detect_equations(ex.grid);
    const Deduction d = deduce(ex.grid);

    // Causality: each resolution uses two operands known before its iteration.
    std::map<Coord, int> known_at;  // coord -> iteration it became known (0 = given)
    for (int r = 0; r < ex.grid.rows(); ++r)
      for (int c = 0; c < ex.grid.cols(); ++c)
        if (ex.grid.at(r, c).kind == CellKind::Number) known_at[{r, c}] = 0;
    std::set<Coord> seen;
    for (std::size_t i = 0; i < d.trace.steps.size(); ++i) {
      const int iter = static_cast<int>(i) + 1;
      for (const Resolution& res : d.trace.steps[i]) {
        EXPECT_TRUE(seen.insert(res.coord).second) << "resolved twice";
        const Equation& e = eqs.at(static_cast<std::size_t>(res.equation_id));
        int earlier = 0, dep_hop = 0;
        for (Coord o : {e.a, e.b, e.c}) {
          if (o == res.coord) continue;
          auto it = known_at.find(o);
          if (it != known_at.end() && it->second < iter) {
            ++earlier;
            dep_hop = std::max(dep_hop, it->second);
          }
        }
        EXPECT_EQ(earlier, 2) << "seed " << seed << " step " << iter;
        // Hop = 1 + deepest target dependency.
        EXPECT_EQ(d.hops.at(res.coord), 1 + dep_hop);
      }
      for (const Resolution& res : d.trace.steps[i]) known_at[res.coord] = iter;
    }
    EXPECT_EQ(seen.size(), ex.grid.count(CellKind::Target));
    EXPECT_TRUE(verify_solution(ex.grid, ex.gold_answers));
    EXPECT_EQ(detect_equations(ex.grid), detect_equations(ex.answer_grid));
  }
}

INSTANTIATE_TEST_SUITE_P(AllDifficulties, GeneratedPuzzles,
                         ::testing::Values(Difficulty::Easy, Difficulty::Medium, Difficulty::Hard),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(OracleEquivalence, SmallGeneratedPuzzles) {
  int checked = 0;
  for (std::uint64_t i = 0; checked < 40 && i < 400; ++i) {
    GenParams p = GenParams::defaults_for(Difficulty::Medium);
    p.range_lo = 1;
    p.range_hi = 60;
    p.min_equations = 2;
    p.max_equations = 5;
    p.seed = derive_seed(99, i);
    const DatasetExample ex = generate(p, "o");
    if (ex.gold_answers.size() > 6) continue;
    const auto sols = brute_force_oracle(ex.grid, p.range_lo, p.range_hi);
    ASSERT_EQ(sols.size(), 1u) << "seed index " << i;
    EXPECT_EQ(sols[0], ex.gold_answers);
    ++checked;
  }
  EXPECT_EQ(checked, 40);
}
