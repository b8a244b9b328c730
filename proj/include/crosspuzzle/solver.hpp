#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "crosspuzzle/core.hpp"

namespace crosspuzzle {

/// Target coordinate -> 1-based deduction iteration that resolved it.
using HopMap = std::map<Coord, int>;

/// Finds every a op b = c run along rows (ids first) and then columns.
/// Any run of two or more adjacent non-empty cells that is not exactly one
/// such five-cell equation, and any operator or equals cell outside an
/// equation, raises MalformedGrid.
std::vector<Equation> detect_equations(const Grid& grid);

/// Value of the missing slot of a op b = c given the other two, in slot order.
Value solve_missing(Op op, Slot unknown, Value known1, Value known2);

struct Deduction {
  SolutionTrace trace;
  HopMap hops;
};

/// Iterative 2-of-3 propagation with per-iteration synchronized commits.
Deduction deduce(const Grid& grid);

/// Hop depths aligned with target_order(grid).
std::vector<int> ordered_hops(const Grid& grid, const HopMap& hops);

/// Answers (target order) substituted into the grid satisfy every equation.
bool verify_solution(const Grid& grid, const std::vector<Value>& answers);

struct OracleCaps {
  std::size_t max_targets = 6;
  Value max_span = 300;
};

/// Exhaustive enumeration of target assignments over [lo, hi]; returns every
/// assignment (target order) that satisfies all equations.
std::vector<std::vector<Value>> brute_force_oracle(const Grid& grid, Value lo, Value hi,
                                                   OracleCaps caps = {});

}  // namespace crosspuzzle
