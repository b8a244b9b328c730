#include "crosspuzzle/core.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace crosspuzzle {

ParseError::ParseError(int line, int column, const std::string& reason)
    : Error("parse error at line " + std::to_string(line) + ", cell " + std::to_string(column) + ": " +
            reason),
      line_(line),
      column_(column),
      reason_(reason) {}

std::string_view op_glyph(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "×";
    case Op::Div: return "÷";
  }
  return "?";
}

bool apply_op(Op op, Value a, Value b, Value& out) {
  constexpr Value kMax = std::numeric_limits<Value>::max();
  switch (op) {
    case Op::Add:
      if (a > kMax - b) return false;
      out = a + b;
      break;
    case Op::Sub:
      out = a - b;
      break;
    case Op::Mul:
      if (a != 0 && b > kMax / a) return false;
      out = a * b;
      break;
    case Op::Div:
      if (b == 0 || a % b != 0) return false;
      out = a / b;
      break;
  }
  return out >= 1;
}

bool equation_holds(Op op, Value a, Value b, Value c) {
  if (a < 1 || b < 1 || c < 1) return false;
  Value r = 0;
  return apply_op(op, a, b, r) && r == c;
}

std::string to_string(Coord c) {
  return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

bool Cell::operator==(const Cell& o) const {
  if (kind != o.kind) return false;
  if (kind == CellKind::Number) return value == o.value;
  if (kind == CellKind::Operator) return op == o.op;
  return true;
}

Grid::Grid(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw MalformedGrid("grid dimensions must be positive");
  cells_.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
}

const Cell& Grid::at(Coord c) const {
  if (!in_bounds(c)) throw std::out_of_range("cell " + to_string(c) + " outside grid");
  return cells_[static_cast<std::size_t>(c.row) * cols_ + c.col];
}

void Grid::set(Coord c, Cell cell) {
  if (!in_bounds(c)) throw std::out_of_range("cell " + to_string(c) + " outside grid");
  cells_[static_cast<std::size_t>(c.row) * cols_ + c.col] = cell;
}

std::size_t Grid::count(CellKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [kind](const Cell& c) { return c.kind == kind; }));
}

Equation Equation::at(int id, Orientation o, Coord start, Op op) {
  const int dr = o == Orientation::Vertical ? 1 : 0;
  const int dc = o == Orientation::Horizontal ? 1 : 0;
  auto step = [&](int k) { return Coord{start.row + dr * k, start.col + dc * k}; };
  return Equation{id, o, step(0), step(2), step(4), op, step(1), step(3)};
}

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
  }
  return "easy";
}

Difficulty parse_difficulty(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "easy") return Difficulty::Easy;
  if (lower == "medium") return Difficulty::Medium;
  if (lower == "hard") return Difficulty::Hard;
  throw ConfigError("unknown difficulty '" + std::string(s) + "'");
}

void GenParams::validate() const {
  if (operators.empty()) throw ConfigError("operator set must not be empty");
  if (range_lo < 1) throw ConfigError("value range must start at 1 or above");
  if (range_lo > range_hi) throw ConfigError("value range is empty");
  if (min_equations < 1 || min_equations > max_equations) throw ConfigError("bad equation count range");
  if (max_hop < 1) throw ConfigError("max_hop must be at least 1");
  if (difficulty == Difficulty::Easy && max_hop != 1) throw ConfigError("easy puzzles require max_hop = 1");
}

GenParams GenParams::defaults_for(Difficulty d) {
  GenParams p;
  p.difficulty = d;
  switch (d) {
    case Difficulty::Easy: p.max_hop = 1; break;
    case Difficulty::Medium: p.max_hop = 5; break;
    case Difficulty::Hard: p.max_hop = 10; break;
  }
  return p;
}

std::vector<Op> parse_operator_set(std::string_view s) {
  std::vector<Op> ops;
  auto add = [&](Op o) {
    if (std::find(ops.begin(), ops.end(), o) == ops.end()) ops.push_back(o);
  };
  for (std::size_t i = 0; i < s.size();) {
    std::string_view rest = s.substr(i);
    if (rest.starts_with("×")) {
      add(Op::Mul);
      i += std::string_view("×").size();
    } else if (rest.starts_with("÷")) {
      add(Op::Div);
      i += std::string_view("÷").size();
    } else {
      switch (s[i]) {
        case '+': add(Op::Add); break;
        case '-': add(Op::Sub); break;
        case '*':
        case 'x': add(Op::Mul); break;
        case '/': add(Op::Div); break;
        case ',':
        case ' ': break;
        default: throw ConfigError("unknown operator '" + std::string(1, s[i]) + "'");
      }
      ++i;
    }
  }
  if (ops.empty()) throw ConfigError("operator set must not be empty");
  std::sort(ops.begin(), ops.end());
  return ops;
}

std::string operator_set_string(const std::vector<Op>& ops) {
  std::string out;
  for (Op o : ops) {
    switch (o) {
      case Op::Add: out += '+'; break;
      case Op::Sub: out += '-'; break;
      case Op::Mul: out += '*'; break;
      case Op::Div: out += '/'; break;
    }
  }
  return out;
}

std::vector<Coord> target_order(const Grid& grid) {
  std::vector<Coord> out;
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c)
      if (grid.at(r, c).kind == CellKind::Target) out.push_back({r, c});
  return out;
}

Grid fill_targets(const Grid& grid, const std::vector<Value>& answers) {
  const auto targets = target_order(grid);
  if (targets.size() != answers.size())
    throw ArityMismatch("expected " + std::to_string(targets.size()) + " answers, got " +
                        std::to_string(answers.size()));
  Grid out = grid;
  for (std::size_t i = 0; i < targets.size(); ++i) out.set(targets[i], Cell::number(answers[i]));
  return out;
}

}  // namespace crosspuzzle
