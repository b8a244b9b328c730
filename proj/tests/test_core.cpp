#include <gtest/gtest.h>

#include "crosspuzzle/core.hpp"
#include "fixtures.hpp"

using namespace crosspuzzle;

TEST(TargetOrder, WorkedGridIsRowMajor) {
  const auto order = target_order(fixtures::worked_grid());
  const std::vector<Coord> expected{{0, 4}, {2, 2}, {4, 0}, {6, 2}};
  EXPECT_EQ(order, expected);
}

TEST(TargetOrder, EmptyWhenNoTargets) {
  Grid g(3, 3);
  g.set({1, 1}, Cell::number(4));
  EXPECT_TRUE(target_order(g).empty());
}

TEST(TargetOrder, SingleCell) {
  Grid g(1, 1);
  g.set({0, 0}, Cell::target());
  EXPECT_EQ(target_order(g), (std::vector<Coord>{{0, 0}}));
}

// Reading order: rows outer, columns inner.
TEST(TargetOrder, RowsOuterColumnsInner) {
  Grid g(3, 4);
  for (Coord c : {Coord{2, 0}, Coord{0, 3}, Coord{1, 1}, Coord{0, 0}, Coord{2, 3}}) g.set(c, Cell::target());
  const auto order = target_order(g);

  std::vector<Coord> top_to_bottom;  // visit each row, then each column within it
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c)
      if (g.at(r, c).kind == CellKind::Target) top_to_bottom.push_back({r, c});
  EXPECT_EQ(order, top_to_bottom);

  for (std::size_t i = 1; i < order.size(); ++i) {
    EXPECT_TRUE(order[i - 1].row < order[i].row ||
                (order[i - 1].row == order[i].row && order[i - 1].col < order[i].col));
  }
  EXPECT_EQ(order.front(), (Coord{0, 0}));
  EXPECT_EQ(order.back(), (Coord{2, 3}));
}

TEST(FillTargets, SubstitutesInOrder) {
  const Grid filled = fill_targets(fixtures::worked_grid(), {6, 93, 45, 8});
  EXPECT_EQ(filled.count(CellKind::Target), 0u);
  EXPECT_EQ(filled.at(0, 4), Cell::number(6));
  EXPECT_EQ(filled.at(2, 2), Cell::number(93));
  EXPECT_EQ(filled.at(4, 0), Cell::number(45));
  EXPECT_EQ(filled.at(6, 2), Cell::number(8));
}

TEST(FillTargets, ArityMismatch) {
  EXPECT_THROW(fill_targets(fixtures::worked_grid(), {6, 93}), ArityMismatch);
}

TEST(Grid, RejectsDegenerateShape) {
  EXPECT_THROW(Grid(0, 3), MalformedGrid);
  EXPECT_THROW(Grid(2, 0), MalformedGrid);
}

TEST(Grid, AtOutOfBoundsThrows) {
  Grid g(2, 2);
  EXPECT_THROW((void)g.at(2, 0), std::out_of_range);
}

TEST(ApplyOp, PositiveIntegersOnly) {
  Value out = 0;
  EXPECT_TRUE(apply_op(Op::Div, 93, 3, out));
  EXPECT_EQ(out, 31);
  EXPECT_FALSE(apply_op(Op::Div, 10, 3, out));
  EXPECT_FALSE(apply_op(Op::Sub, 5, 5, out));
  EXPECT_TRUE(equation_holds(Op::Mul, 5, 8, 40));
  EXPECT_FALSE(equation_holds(Op::Mul, 5, 9, 40));
}

TEST(GenParams, Validation) {
  GenParams p;
  EXPECT_NO_THROW(p.validate());
  p.range_lo = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = GenParams{};
  p.min_equations = 9;
  p.max_equations = 4;
  EXPECT_THROW(p.validate(), ConfigError);
  p = GenParams::defaults_for(Difficulty::Easy);
  EXPECT_EQ(p.max_hop, 1);
  p.max_hop = 3;
  EXPECT_THROW(p.validate(), ConfigError);
  p = GenParams{};
  p.operators.clear();
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(OperatorSet, ParseAndPrint) {
  EXPECT_EQ(parse_operator_set("+-*/"), (std::vector<Op>{Op::Add, Op::Sub, Op::Mul, Op::Div}));
  EXPECT_EQ(parse_operator_set("×÷"), (std::vector<Op>{Op::Mul, Op::Div}));
  EXPECT_EQ(operator_set_string({Op::Add, Op::Div}), "+/");
  EXPECT_THROW(parse_operator_set("+%"), ConfigError);
  EXPECT_THROW(parse_operator_set(""), ConfigError);
}

TEST(Difficulty, RoundTrip) {
  for (Difficulty d : {Difficulty::Easy, Difficulty::Medium, Difficulty::Hard})
    EXPECT_EQ(parse_difficulty(to_string(d)), d);
  EXPECT_THROW(parse_difficulty("extreme"), ConfigError);
}
