#include "crosspuzzle/solver.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <set>

namespace crosspuzzle {

namespace {

struct Run {
  Coord start;
  int length;
};

// Maximal runs of non-empty cells along one axis.
std::vector<Run> runs_along(const Grid& grid, Orientation o) {
  std::vector<Run> runs;
  const bool horiz = o == Orientation::Horizontal;
  const int outer = horiz ? grid.rows() : grid.cols();
  const int inner = horiz ? grid.cols() : grid.rows();
  for (int i = 0; i < outer; ++i) {
    int j = 0;
    while (j < inner) {
      auto coord = [&](int k) { return horiz ? Coord{i, k} : Coord{k, i}; };
      if (grid.at(coord(j)).is_empty()) {
        ++j;
        continue;
      }
      int k = j;
      while (k < inner && !grid.at(coord(k)).is_empty()) ++k;
      runs.push_back({coord(j), k - j});
      j = k;
    }
  }
  return runs;
}

const char* axis_name(Orientation o) { return o == Orientation::Horizontal ? "row" : "column"; }

}  // namespace

std::vector<Equation> detect_equations(const Grid& grid) {
  std::vector<Equation> out;
  std::set<Coord> covered;
  for (Orientation o : {Orientation::Horizontal, Orientation::Vertical}) {
    auto runs = runs_along(grid, o);
    // Horizontal runs come out row-major already; vertical ones column-major.
    if (o == Orientation::Vertical)
      std::sort(runs.begin(), runs.end(), [](const Run& x, const Run& y) { return x.start < y.start; });
    for (const Run& run : runs) {
      if (run.length == 1) continue;
      const Coord s = run.start;
      if (run.length != 5)
        throw MalformedGrid(std::string("run of ") + std::to_string(run.length) + " cells along " + axis_name(o) +
                            " starting at " + to_string(s) + " is not a single equation");
      const Equation probe = Equation::at(0, o, s, Op::Add);
      const Cell& op = grid.at(probe.op_cell);
      const bool ok = grid.at(probe.a).is_operand() && op.kind == CellKind::Operator &&
                      grid.at(probe.b).is_operand() && grid.at(probe.eq_cell).kind == CellKind::Equals &&
                      grid.at(probe.c).is_operand();
      if (!ok)
        throw MalformedGrid("cells starting at " + to_string(s) + " along " + axis_name(o) +
                            " do not form 'x op y = z'");
      Equation eq = Equation::at(static_cast<int>(out.size()), o, s, op.op);
      for (Coord c : {eq.a, eq.op_cell, eq.b, eq.eq_cell, eq.c}) covered.insert(c);
      out.push_back(eq);
    }
  }
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c) {
      const auto kind = grid.at(r, c).kind;
      if ((kind == CellKind::Operator || kind == CellKind::Equals) && !covered.contains({r, c}))
        throw MalformedGrid("symbol at " + to_string({r, c}) + " belongs to no equation");
    }
  return out;
}

Value solve_missing(Op op, Slot unknown, Value k1, Value k2) {
  Value out = 0;
  bool ok = false;
  if (unknown == Slot::C) {
    ok = apply_op(op, k1, k2, out);
  } else {
    // k1/k2 are (b, c) for slot A and (a, c) for slot B.
    const Value other = k1;
    const Value c = k2;
    switch (op) {
      case Op::Add:
        ok = apply_op(Op::Sub, c, other, out);
        break;
      case Op::Sub:
        ok = unknown == Slot::A ? apply_op(Op::Add, c, other, out) : apply_op(Op::Sub, other, c, out);
        break;
      case Op::Mul:
        ok = apply_op(Op::Div, c, other, out);
        break;
      case Op::Div:
        ok = unknown == Slot::A ? apply_op(Op::Mul, c, other, out) : apply_op(Op::Div, other, c, out);
        break;
    }
  }
  if (!ok || out < 1) throw NoIntegerSolution("no positive integer completes the equation");
  return out;
}

Deduction deduce(const Grid& grid) {
  const auto equations = detect_equations(grid);
  std::map<Coord, Value> known;
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c)
      if (grid.at(r, c).kind == CellKind::Number) known[{r, c}] = grid.at(r, c).value;

  auto lookup = [&](Coord c) -> std::optional<Value> {
    auto it = known.find(c);
    if (it == known.end()) return std::nullopt;
    return it->second;
  };

  Deduction result;
  HopMap& hops = result.hops;
  std::vector<bool> verified(equations.size(), false);

  for (int iteration = 1;; ++iteration) {
    std::map<Coord, Resolution> pending;
    for (const Equation& eq : equations) {
      if (verified[eq.id]) continue;
      const std::array<std::optional<Value>, 3> v{lookup(eq.a), lookup(eq.b), lookup(eq.c)};
      const int n_known = static_cast<int>(std::count_if(v.begin(), v.end(), [](auto& x) { return x.has_value(); }));
      if (n_known == 3) {
        if (!equation_holds(eq.op, *v[0], *v[1], *v[2]))
          throw Contradiction("equation " + std::to_string(eq.id) + " at " + to_string(eq.a) + " does not hold");
        verified[eq.id] = true;
        continue;
      }
      if (n_known < 2) continue;

      Slot slot = !v[0] ? Slot::A : (!v[1] ? Slot::B : Slot::C);
      Value value = 0;
      try {
        if (slot == Slot::A) value = solve_missing(eq.op, slot, *v[1], *v[2]);
        else if (slot == Slot::B) value = solve_missing(eq.op, slot, *v[0], *v[2]);
        else value = solve_missing(eq.op, slot, *v[0], *v[1]);
      } catch (const NoIntegerSolution&) {
        throw Contradiction("equation " + std::to_string(eq.id) + " has no positive integer completion");
      }
      const Coord at = eq.operand(slot);
      auto [it, inserted] = pending.try_emplace(at, Resolution{eq.id, at, value});
      if (!inserted && it->second.value != value)
        throw Contradiction("cell " + to_string(at) + " resolved to both " + std::to_string(it->second.value) +
                            " and " + std::to_string(value));
    }
    if (pending.empty()) break;
    std::vector<Resolution> step;
    for (const auto& [coord, res] : pending) {
      known[coord] = res.value;
      hops[coord] = iteration;
      step.push_back(res);
    }
    result.trace.steps.push_back(std::move(step));
  }

  Grid answer = grid;
  for (Coord t : target_order(grid)) {
    auto v = lookup(t);
    if (!v) throw Unsolvable("target " + to_string(t) + " cannot be deduced");
    answer.set(t, Cell::number(*v));
  }
  result.trace.answer_grid = std::move(answer);
  return result;
}

std::vector<int> ordered_hops(const Grid& grid, const HopMap& hops) {
  std::vector<int> out;
  for (Coord t : target_order(grid)) out.push_back(hops.at(t));
  return out;
}

bool verify_solution(const Grid& grid, const std::vector<Value>& answers) {
  const Grid filled = fill_targets(grid, answers);
  for (const Equation& eq : detect_equations(filled)) {
    const Cell &a = filled.at(eq.a), &b = filled.at(eq.b), &c = filled.at(eq.c);
    if (!equation_holds(eq.op, a.value, b.value, c.value)) return false;
  }
  return true;
}

std::vector<std::vector<Value>> brute_force_oracle(const Grid& grid, Value lo, Value hi, OracleCaps caps) {
  const auto targets = target_order(grid);
  if (targets.size() > caps.max_targets)
    throw CapExceeded(std::to_string(targets.size()) + " targets exceed the oracle cap of " +
                      std::to_string(caps.max_targets));
  if (hi - lo > caps.max_span)
    throw CapExceeded("value span " + std::to_string(hi - lo) + " exceeds the oracle cap of " +
                      std::to_string(caps.max_span));
  if (lo > hi) return {};

  const auto equations = detect_equations(grid);
  std::map<Coord, int> target_index;
  for (std::size_t i = 0; i < targets.size(); ++i) target_index[targets[i]] = static_cast<int>(i);

  // Equations that involve no target are checked once up front.
  std::vector<std::vector<int>> eq_targets(equations.size());
  for (const Equation& eq : equations)
    for (Coord c : {eq.a, eq.b, eq.c})
      if (auto it = target_index.find(c); it != target_index.end()) eq_targets[eq.id].push_back(it->second);

  std::vector<Value> assignment(targets.size(), 0);
  auto value_of = [&](Coord c) {
    auto it = target_index.find(c);
    return it == target_index.end() ? grid.at(c).value : assignment[it->second];
  };
  auto holds = [&](const Equation& eq) { return equation_holds(eq.op, value_of(eq.a), value_of(eq.b), value_of(eq.c)); };

  for (const Equation& eq : equations)
    if (eq_targets[eq.id].empty() && !holds(eq)) return {};

  // Static variable order: prefer targets that complete the most equations
  // early so enumeration prunes sooner. Every assignment is still visited
  // unless a fully assigned equation already fails.
  std::vector<int> order;
  std::vector<bool> placed(targets.size(), false);
  for (std::size_t step = 0; step < targets.size(); ++step) {
    int best = -1, best_completes = -1, best_touch = -1;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (placed[t]) continue;
      int completes = 0, touch = 0;
      for (const Equation& eq : equations) {
        const auto& ts = eq_targets[eq.id];
        if (std::find(ts.begin(), ts.end(), static_cast<int>(t)) == ts.end()) continue;
        ++touch;
        if (std::all_of(ts.begin(), ts.end(), [&](int o) { return o == static_cast<int>(t) || placed[o]; })) ++completes;
      }
      if (completes > best_completes || (completes == best_completes && touch > best_touch)) {
        best = static_cast<int>(t);
        best_completes = completes;
        best_touch = touch;
      }
    }
    placed[best] = true;
    order.push_back(best);
  }

  // checks_at[d]: equations whose last target is assigned at depth d.
  std::vector<std::vector<int>> checks_at(order.size());
  std::vector<int> depth_of(targets.size());
  for (std::size_t d = 0; d < order.size(); ++d) depth_of[order[d]] = static_cast<int>(d);
  for (const Equation& eq : equations) {
    if (eq_targets[eq.id].empty()) continue;
    int last = 0;
    for (int t : eq_targets[eq.id]) last = std::max(last, depth_of[t]);
    checks_at[last].push_back(eq.id);
  }

  std::vector<std::vector<Value>> solutions;
  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == order.size()) {
      solutions.push_back(assignment);
      return;
    }
    for (Value v = lo; v <= hi; ++v) {
      assignment[order[depth]] = v;
      bool ok = true;
      for (int id : checks_at[depth])
        if (!holds(equations[id])) {
          ok = false;
          break;
        }
      if (ok) self(self, depth + 1);
    }
  };
  recurse(recurse, 0);
  std::sort(solutions.begin(), solutions.end());
  return solutions;
}

}  // namespace crosspuzzle
