#include "crosspuzzle/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "crosspuzzle/render.hpp"
#include "crosspuzzle/solver.hpp"

namespace crosspuzzle {

DifficultyProfile DifficultyProfile::for_difficulty(Difficulty d) {
  DifficultyProfile p;
  switch (d) {
    case Difficulty::Easy:
      p.single_blank_per_equation = true;
      break;
    // Hop shares are reference per-difficulty averages normalised by
    // the average number of targets.
    case Difficulty::Medium:
      p.blanks_per_equation_weights = {0.85, 0.15};
      p.target_hop_histogram = {7.66 / 9.81, 1.53 / 9.81, 0.53 / 9.81, 0.09 / 9.81};
      break;
    case Difficulty::Hard:
      p.blanks_per_equation_weights = {0.6, 0.4};
      p.target_hop_histogram = {5.13 / 10.63, 2.52 / 10.63, 1.73 / 10.63, 1.25 / 10.63};
      p.require_multi_step = true;
      break;
  }
  return p;
}

namespace {

std::optional<Value> pick(Value lo, Value hi, Rng& rng) {
  if (lo > hi) return std::nullopt;
  return rng.uniform(lo, hi);
}

// Divisors d of v with lo <= d and lo <= v / d.
std::vector<Value> divisor_splits(Value v, Value lo) {
  std::vector<Value> out;
  for (Value d = 1; d * d <= v; ++d) {
    if (v % d != 0) continue;
    const Value e = v / d;
    if (d >= lo && e >= lo) {
      out.push_back(d);
      if (e != d) out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Uniform (x, y) with x, y >= lo and x * y <= hi, by rejection.
std::optional<std::pair<Value, Value>> product_pair(Value lo, Value hi, Rng& rng) {
  if (lo > hi / lo) return std::nullopt;
  const Value top = hi / lo;
  for (;;) {
    const Value x = rng.uniform(lo, top);
    const Value y = rng.uniform(lo, top);
    if (x <= hi / y) return std::pair{x, y};
  }
}

}  // namespace

std::array<Value, 3> sample_equation(Op op, Value lo, Value hi, Rng& rng) {
  auto infeasible = [&] {
    return RangeInfeasible(std::string("no '") + std::string(op_glyph(op)) + "' equation fits in [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
  };
  if (lo < 1 || lo > hi) throw infeasible();
  switch (op) {
    case Op::Add: {
      if (2 * lo > hi) throw infeasible();
      const Value c = rng.uniform(2 * lo, hi);
      const Value a = rng.uniform(lo, c - lo);
      return {a, c - a, c};
    }
    case Op::Sub: {
      if (2 * lo > hi) throw infeasible();
      const Value a = rng.uniform(2 * lo, hi);
      const Value b = rng.uniform(lo, a - lo);
      return {a, b, a - b};
    }
    case Op::Mul: {
      auto p = product_pair(lo, hi, rng);
      if (!p) throw infeasible();
      return {p->first, p->second, p->first * p->second};
    }
    case Op::Div: {
      auto p = product_pair(lo, hi, rng);
      if (!p) throw infeasible();
      return {p->first * p->second, p->first, p->second};
    }
  }
  throw infeasible();
}

std::optional<std::array<Value, 3>> sample_equation_with(Op op, Slot slot, Value v, Value lo, Value hi, Rng& rng) {
  if (v < lo || v > hi) return std::nullopt;
  using Triple = std::array<Value, 3>;
  std::optional<Value> x;
  switch (op) {
    case Op::Add:
      if (slot == Slot::A) { if ((x = pick(lo, hi - v, rng))) return Triple{v, *x, v + *x}; }
      else if (slot == Slot::B) { if ((x = pick(lo, hi - v, rng))) return Triple{*x, v, *x + v}; }
      else if ((x = pick(lo, v - lo, rng))) return Triple{*x, v - *x, v};
      return std::nullopt;
    case Op::Sub:
      if (slot == Slot::A) { if ((x = pick(lo, v - lo, rng))) return Triple{v, *x, v - *x}; }
      else if (slot == Slot::B) { if ((x = pick(lo, hi - v, rng))) return Triple{v + *x, v, *x}; }
      else if ((x = pick(lo, hi - v, rng))) return Triple{*x + v, *x, v};
      return std::nullopt;
    case Op::Mul:
      if (slot == Slot::A) { if ((x = pick(lo, hi / v, rng))) return Triple{v, *x, v * *x}; }
      else if (slot == Slot::B) { if ((x = pick(lo, hi / v, rng))) return Triple{*x, v, *x * v}; }
      else {
        const auto ds = divisor_splits(v, lo);
        if (ds.empty()) return std::nullopt;
        const Value a = ds[rng.index(ds.size())];
        return Triple{a, v / a, v};
      }
      return std::nullopt;
    case Op::Div:
      if (slot == Slot::A) {
        const auto ds = divisor_splits(v, lo);
        if (ds.empty()) return std::nullopt;
        const Value b = ds[rng.index(ds.size())];
        return Triple{v, b, v / b};
      }
      if (slot == Slot::B) { if ((x = pick(lo, hi / v, rng))) return Triple{v * *x, v, *x}; }
      else if ((x = pick(lo, hi / v, rng))) return Triple{v * *x, *x, v};
      return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Layout
// ---------------------------------------------------------------------------

namespace {

constexpr Slot kSlots[] = {Slot::A, Slot::B, Slot::C};

int slot_offset(Slot s) { return s == Slot::A ? 0 : (s == Slot::B ? 2 : 4); }

struct Bounds {
  int r0 = std::numeric_limits<int>::max(), c0 = std::numeric_limits<int>::max();
  int r1 = std::numeric_limits<int>::min(), c1 = std::numeric_limits<int>::min();
  void add(Coord c) {
    r0 = std::min(r0, c.row), c0 = std::min(c0, c.col);
    r1 = std::max(r1, c.row), c1 = std::max(c1, c.col);
  }
  int rows() const { return r1 - r0 + 1; }
  int cols() const { return c1 - c0 + 1; }
};

using SparseGrid = std::map<Coord, Cell>;

Grid densify(const SparseGrid& cells) {
  Bounds b;
  for (const auto& [c, _] : cells) b.add(c);
  Grid g(b.rows(), b.cols());
  for (const auto& [c, cell] : cells) g.set({c.row - b.r0, c.col - b.c0}, cell);
  return g;
}

void place(SparseGrid& cells, const Equation& eq, const std::array<Value, 3>& v) {
  cells[eq.a] = Cell::number(v[0]);
  cells[eq.op_cell] = Cell::oper(eq.op);
  cells[eq.b] = Cell::number(v[1]);
  cells[eq.eq_cell] = Cell::equals();
  cells[eq.c] = Cell::number(v[2]);
}

struct Candidate {
  Equation eq;
  Slot shared_slot;
  Value shared_value;
  int area;
};

std::vector<Op> feasible_ops(const GenParams& p) {
  std::vector<Op> ops;
  Rng probe(0);
  for (Op op : p.operators) {
    try {
      sample_equation(op, p.range_lo, p.range_hi, probe);
      ops.push_back(op);
    } catch (const RangeInfeasible&) {
    }
  }
  if (ops.empty())
    throw RangeInfeasible("no operator in '" + operator_set_string(p.operators) + "' fits in [" +
                          std::to_string(p.range_lo) + ", " + std::to_string(p.range_hi) + "]");
  return ops;
}

}  // namespace

SolvedLayout build_solved_layout(const GenParams& params, Rng& rng, const LayoutOptions& options) {
  params.validate();
  const auto ops = feasible_ops(params);
  const Value lo = params.range_lo, hi = params.range_hi;
  const int target_count = static_cast<int>(rng.uniform(params.min_equations, params.max_equations));

  SparseGrid cells;
  std::vector<Equation> placed;
  std::map<Coord, int> uses;  // operand cell -> number of equations through it

  {
    const Op op = ops[rng.index(ops.size())];
    const Equation first = Equation::at(0, Orientation::Horizontal, {0, 0}, op);
    place(cells, first, sample_equation(op, lo, hi, rng));
    for (Coord c : {first.a, first.b, first.c}) uses[c] = 1;
    placed.push_back(first);
  }

  while (static_cast<int>(placed.size()) < target_count) {
    bool done = false;
    int attempts = 0;
    while (!done && attempts < options.placement_retries) {
      // Gather a few geometrically valid candidates, keep the most compact.
      std::vector<Candidate> pool;
      while (attempts < options.placement_retries &&
             static_cast<int>(pool.size()) < options.compactness_tournament) {
        ++attempts;
        const Equation& host = placed[rng.index(placed.size())];
        const Slot host_slot = kSlots[rng.index(3)];
        const Coord shared = host.operand(host_slot);
        if (uses[shared] >= 2) continue;
        const Orientation o =
            host.orientation == Orientation::Horizontal ? Orientation::Vertical : Orientation::Horizontal;
        const Slot slot = kSlots[rng.index(3)];
        Coord start = shared;
        (o == Orientation::Horizontal ? start.col : start.row) -= slot_offset(slot);
        Equation eq = Equation::at(static_cast<int>(placed.size()), o, start, Op::Add);

        bool clash = false;
        for (Coord c : {eq.a, eq.op_cell, eq.b, eq.eq_cell, eq.c})
          if (c != shared && cells.contains(c)) clash = true;
        if (clash) continue;

        SparseGrid trial = cells;
        place(trial, eq, {1, 1, 1});
        trial[shared] = cells.at(shared);
        Bounds b;
        for (const auto& [c, _] : trial) b.add(c);
        if (b.rows() > options.max_extent || b.cols() > options.max_extent) continue;
        try {
          if (detect_equations(densify(trial)).size() != placed.size() + 1) continue;
        } catch (const MalformedGrid&) {
          continue;
        }
        pool.push_back({eq, slot, cells.at(shared).value, b.rows() * b.cols()});
      }
      if (pool.empty()) break;
      const auto best = std::min_element(pool.begin(), pool.end(),
                                         [](const Candidate& x, const Candidate& y) { return x.area < y.area; });

      std::vector<Op> order = ops;
      rng.shuffle(std::span<Op>(order));
      for (Op op : order) {
        auto values = sample_equation_with(op, best->shared_slot, best->shared_value, lo, hi, rng);
        if (!values) continue;
        Equation eq = best->eq;
        eq.op = op;
        place(cells, eq, *values);
        for (Coord c : {eq.a, eq.b, eq.c}) ++uses[c];
        placed.push_back(eq);
        done = true;
        break;
      }
    }
    if (!done)
      throw LayoutFailure("could not place equation " + std::to_string(placed.size() + 1) + " of " +
                          std::to_string(target_count) + " after " + std::to_string(options.placement_retries) +
                          " attempts");
  }

  SolvedLayout out;
  out.answer_grid = densify(cells);
  out.equations = detect_equations(out.answer_grid);
  if (out.equations.size() != placed.size()) throw LayoutFailure("layout produced spurious equations");
  return out;
}

// ---------------------------------------------------------------------------
// Blanks
// ---------------------------------------------------------------------------

namespace {

struct Closure {
  bool ok = false;
  HopMap hops;
  int max_hop = 0;
};

Closure closure_of(const Grid& answer, const std::set<Coord>& blanks) {
  Grid q = answer;
  for (Coord c : blanks) q.set(c, Cell::target());
  Closure out;
  try {
    auto d = deduce(q);
    out.hops = std::move(d.hops);
  } catch (const Unsolvable&) {
    return out;
  }
  out.ok = true;
  for (const auto& [_, h] : out.hops) out.max_hop = std::max(out.max_hop, h);
  return out;
}

double profile_distance(const Closure& cl, const std::set<Coord>& blanks, const std::vector<Equation>& eqs,
                        const DifficultyProfile& profile) {
  std::array<double, 4> counts{};
  for (const auto& [_, h] : cl.hops) counts[std::min(h, 4) - 1] += 1;
  const double m = static_cast<double>(cl.hops.size());
  double d = 0;
  for (int k = 0; k < 4; ++k) d += std::abs(counts[k] - profile.target_hop_histogram[k] * m);

  int blanked = 0, doubles = 0;
  for (const Equation& eq : eqs) {
    int n = 0;
    for (Coord c : {eq.a, eq.b, eq.c}) n += blanks.contains(c) ? 1 : 0;
    if (n > 0) ++blanked;
    if (n >= 2) ++doubles;
  }
  if (blanked > 0) d += 0.5 * std::abs(doubles - profile.blanks_per_equation_weights[1] * blanked);
  return d;
}

bool every_equation_participates(const std::set<Coord>& blanks, const std::vector<Equation>& eqs) {
  std::vector<bool> has_blank(eqs.size(), false);
  for (const Equation& eq : eqs)
    for (Coord c : {eq.a, eq.b, eq.c})
      if (blanks.contains(c)) has_blank[eq.id] = true;
  for (const Equation& eq : eqs) {
    if (has_blank[eq.id]) continue;
    bool touches = false;
    for (const Equation& other : eqs) {
      if (other.id == eq.id || !has_blank[other.id]) continue;
      for (Coord x : {eq.a, eq.b, eq.c})
        for (Coord y : {other.a, other.b, other.c})
          if (x == y) touches = true;
    }
    if (!touches) return false;
  }
  return true;
}

std::optional<std::set<Coord>> single_blank_attempt(const std::vector<Equation>& eqs, Rng& rng) {
  std::map<Coord, std::vector<int>> owners;
  for (const Equation& eq : eqs)
    for (Coord c : {eq.a, eq.b, eq.c}) owners[c].push_back(eq.id);

  std::vector<bool> has_blank(eqs.size(), false);
  std::vector<int> order(eqs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  rng.shuffle(std::span<int>(order));

  std::set<Coord> blanks;
  for (int id : order) {
    if (has_blank[id]) continue;
    const Equation& eq = eqs[id];
    std::vector<Coord> options;
    for (Coord c : {eq.a, eq.b, eq.c}) {
      const auto& own = owners[c];
      if (std::none_of(own.begin(), own.end(), [&](int o) { return o != id && has_blank[o]; })) options.push_back(c);
    }
    if (options.empty()) return std::nullopt;
    // A blank on a crossing serves two equations at once; prefer private
    // cells so the target count tracks the equation count.
    std::vector<Coord> own_only;
    for (Coord c : options)
      if (owners[c].size() == 1) own_only.push_back(c);
    const auto& pool = own_only.empty() ? options : own_only;
    const Coord pick = pool[rng.index(pool.size())];
    blanks.insert(pick);
    for (int o : owners[pick]) has_blank[o] = true;
  }
  return blanks;
}

std::optional<std::set<Coord>> greedy_attempt(const Grid& answer, const std::vector<Equation>& eqs,
                                              const DifficultyProfile& profile, int max_hop, Rng& rng) {
  std::vector<Coord> operands;
  for (const Equation& eq : eqs)
    for (Coord c : {eq.a, eq.b, eq.c})
      if (std::find(operands.begin(), operands.end(), c) == operands.end()) operands.push_back(c);

  // Each equation resolves at most one cell, so there can never be more
  // targets than equations.
  const std::size_t budget = eqs.size();
  std::set<Coord> blanks;
  while (blanks.size() < budget) {
    std::vector<std::pair<double, Coord>> scored;
    for (Coord c : operands) {
      if (blanks.contains(c)) continue;
      auto trial = blanks;
      trial.insert(c);
      const Closure cl = closure_of(answer, trial);
      if (!cl.ok || cl.max_hop > max_hop) continue;
      scored.emplace_back(profile_distance(cl, trial, eqs, profile), c);
    }
    if (scored.empty()) break;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [s, _] : scored) best = std::min(best, s);
    std::vector<Coord> near;
    for (const auto& [s, c] : scored)
      if (s <= best + 0.25) near.push_back(c);
    blanks.insert(near[rng.index(near.size())]);
  }
  if (blanks.empty()) return std::nullopt;
  return blanks;
}

}  // namespace

Grid punch_blanks(const Grid& answer_grid, const std::vector<Equation>& equations, const DifficultyProfile& profile,
                  int max_hop, Rng& rng, int retries) {
  if (equations.empty()) throw ProfileInfeasible("layout has no equations");
  for (int attempt = 0; attempt < retries; ++attempt) {
    auto blanks = profile.single_blank_per_equation ? single_blank_attempt(equations, rng)
                                                    : greedy_attempt(answer_grid, equations, profile, max_hop, rng);
    if (!blanks) continue;
    const Closure cl = closure_of(answer_grid, *blanks);
    if (!cl.ok || cl.max_hop > max_hop) continue;
    if (profile.require_multi_step && equations.size() >= 2 && cl.max_hop < 2) continue;
    if (!every_equation_participates(*blanks, equations)) continue;
    Grid q = answer_grid;
    for (Coord c : *blanks) q.set(c, Cell::target());
    return q;
  }
  throw ProfileInfeasible("no blank pattern satisfied the profile after " + std::to_string(retries) + " attempts");
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

std::string image_path(const std::string& id, bool solution, std::string_view style, std::string_view ext) {
  return "images/" + id + (solution ? ".solution." : ".query.") + std::string(style) + "." + std::string(ext);
}

namespace {

DatasetExample generate_impl(const GenParams& params, const std::string& id, std::string_view image_ext) {
  params.validate();
  const DifficultyProfile profile = DifficultyProfile::for_difficulty(params.difficulty);
  Rng rng(params.seed);

  std::exception_ptr last;
  for (int attempt = 0; attempt < 3; ++attempt) {
    try {
      const SolvedLayout layout = build_solved_layout(params, rng);
      const Grid query = punch_blanks(layout.answer_grid, layout.equations, profile, params.max_hop, rng);
      Deduction d = deduce(query);

      DatasetExample ex;
      ex.id = id;
      ex.difficulty = params.difficulty;
      ex.grid = query;
      ex.answer_grid = d.trace.answer_grid;
      for (Coord t : target_order(query)) ex.gold_answers.push_back(ex.answer_grid.at(t).value);
      ex.hop_depths = ordered_hops(query, d.hops);
      ex.markdown = to_markdown(query);
      for (StyleId s : kAllStyles) {
        ex.images[std::string(to_string(s))] = image_path(id, false, to_string(s), image_ext);
        ex.solution_images[std::string(to_string(s))] = image_path(id, true, to_string(s), image_ext);
      }
      ex.seed = params.seed;
      ex.gen_params = params;
      ex.trace = std::move(d.trace);
      return ex;
    } catch (const LayoutFailure&) {
      last = std::current_exception();
    } catch (const ProfileInfeasible&) {
      last = std::current_exception();
    }
  }
  std::rethrow_exception(last);
}

}  // namespace

DatasetExample generate(const GenParams& params, const std::string& id) { return generate_impl(params, id, "svg"); }

std::vector<DatasetExample> generate_batch(const BatchRequest& request) {
  std::vector<GenParams> plan;
  for (const auto& [difficulty, count] : request.mix)
    for (int i = 0; i < count; ++i) {
      GenParams p = request.base;
      p.difficulty = difficulty;
      p.max_hop = difficulty == Difficulty::Easy
                      ? 1
                      : request.max_hop.value_or(GenParams::defaults_for(difficulty).max_hop);
      p.seed = derive_seed(request.seed, plan.size());
      plan.push_back(p);
    }

  std::vector<DatasetExample> out(plan.size());
  std::vector<std::exception_ptr> errors(plan.size());
  auto work = [&](std::size_t worker, std::size_t stride) {
    for (std::size_t i = worker; i < plan.size(); i += stride) {
      char id[32];
      std::snprintf(id, sizeof id, "p%05zu", i);
      try {
        out[i] = generate_impl(plan[i], id, request.image_ext);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min<std::size_t>(request.jobs, plan.size()));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < jobs; ++w) threads.emplace_back(work, w, jobs);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace crosspuzzle
