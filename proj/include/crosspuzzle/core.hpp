#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crosspuzzle {

// ---------------------------------------------------------------------------
// Errors. One exception type per failure class so callers can catch narrowly.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CROSSPUZZLE_ERROR(Name)            \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

CROSSPUZZLE_ERROR(MalformedGrid);
CROSSPUZZLE_ERROR(NoIntegerSolution);
CROSSPUZZLE_ERROR(Unsolvable);
CROSSPUZZLE_ERROR(Contradiction);
CROSSPUZZLE_ERROR(ArityMismatch);
CROSSPUZZLE_ERROR(CapExceeded);
CROSSPUZZLE_ERROR(RangeInfeasible);
CROSSPUZZLE_ERROR(LayoutFailure);
CROSSPUZZLE_ERROR(ProfileInfeasible);
CROSSPUZZLE_ERROR(UnknownExample);
CROSSPUZZLE_ERROR(EmptyReport);
CROSSPUZZLE_ERROR(NoSuchHop);
CROSSPUZZLE_ERROR(EmptyScores);
CROSSPUZZLE_ERROR(MissingStyleArtifact);
CROSSPUZZLE_ERROR(ConfigError);
CROSSPUZZLE_ERROR(ManifestMismatch);

#undef CROSSPUZZLE_ERROR

/// Markdown parse failure; line and column are 1-based (column counts cells).
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& reason);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& reason() const { return reason_; }

 private:
  int line_;
  int column_;
  std::string reason_;
};

// ---------------------------------------------------------------------------
// Grid primitives
// ---------------------------------------------------------------------------

using Value = std::int64_t;

enum class Op : std::uint8_t { Add, Sub, Mul, Div };

/// Canonical glyph: "+", "-", "×", "÷".
std::string_view op_glyph(Op op);
/// Applies a op b. Returns false when the result is not a positive integer.
bool apply_op(Op op, Value a, Value b, Value& out);
/// True iff a op b = c holds exactly over positive integers.
bool equation_holds(Op op, Value a, Value b, Value c);

struct Coord {
  int row = 0;
  int col = 0;
  auto operator<=>(const Coord&) const = default;
};

std::string to_string(Coord c);

enum class CellKind : std::uint8_t { Empty, Number, Operator, Equals, Target };

struct Cell {
  CellKind kind = CellKind::Empty;
  Value value = 0;  // Number only
  Op op = Op::Add;  // Operator only

  static Cell empty() { return {}; }
  static Cell number(Value v) { return {CellKind::Number, v, Op::Add}; }
  static Cell oper(Op o) { return {CellKind::Operator, 0, o}; }
  static Cell equals() { return {CellKind::Equals, 0, Op::Add}; }
  static Cell target() { return {CellKind::Target, 0, Op::Add}; }

  bool is_empty() const { return kind == CellKind::Empty; }
  bool is_operand() const { return kind == CellKind::Number || kind == CellKind::Target; }

  bool operator==(const Cell& o) const;
};

/// Rectangular row-major cell array.
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool in_bounds(Coord c) const { return c.row >= 0 && c.col >= 0 && c.row < rows_ && c.col < cols_; }

  const Cell& at(Coord c) const;
  const Cell& at(int r, int c) const { return at(Coord{r, c}); }
  void set(Coord c, Cell cell);

  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t count(CellKind kind) const;

  bool operator==(const Grid&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Cell> cells_;
};

enum class Orientation : std::uint8_t { Horizontal, Vertical };

/// Operand slot within a op b = c.
enum class Slot : std::uint8_t { A, B, C };

struct Equation {
  int id = 0;
  Orientation orientation = Orientation::Horizontal;
  Coord a, b, c;
  Op op = Op::Add;
  Coord op_cell, eq_cell;

  Coord operand(Slot s) const { return s == Slot::A ? a : (s == Slot::B ? b : c); }
  /// Laid out from `start` along `orientation`: a, op, b, =, c.
  static Equation at(int id, Orientation o, Coord start, Op op);

  bool operator==(const Equation&) const = default;
};

struct Resolution {
  int equation_id = 0;
  Coord coord;
  Value value = 0;
  bool operator==(const Resolution&) const = default;
};

/// steps[i] holds the resolutions committed by deduction iteration i + 1.
struct SolutionTrace {
  std::vector<std::vector<Resolution>> steps;
  Grid answer_grid;
};

enum class Difficulty : std::uint8_t { Easy, Medium, Hard };

std::string_view to_string(Difficulty d);
Difficulty parse_difficulty(std::string_view s);

/// Generation knobs. Defaults: all four operators, values 50..250, 5-15 equations.
struct GenParams {
  Difficulty difficulty = Difficulty::Medium;
  std::vector<Op> operators{Op::Add, Op::Sub, Op::Mul, Op::Div};
  Value range_lo = 50;
  Value range_hi = 250;
  int min_equations = 5;
  int max_equations = 15;
  int max_hop = 5;
  std::uint64_t seed = 0;

  /// Throws ConfigError on violated invariants. Easy forces max_hop = 1.
  void validate() const;
  static GenParams defaults_for(Difficulty d);
};

/// Parses an operator set like "+-*/" or "+-×÷".
std::vector<Op> parse_operator_set(std::string_view s);
std::string operator_set_string(const std::vector<Op>& ops);

struct DatasetExample {
  std::string id;
  Difficulty difficulty = Difficulty::Easy;
  Grid grid;
  Grid answer_grid;
  std::vector<Value> gold_answers;
  std::vector<int> hop_depths;
  std::string markdown;
  std::map<std::string, std::string> images;           // style id -> query image path
  std::map<std::string, std::string> solution_images;  // style id -> solution image path
  std::uint64_t seed = 0;
  GenParams gen_params;
  SolutionTrace trace;
};

/// Target coordinates in reading order: rows top to bottom, columns left to right.
std::vector<Coord> target_order(const Grid& grid);

/// Writes `answers` into the Target cells of `grid` in target order.
Grid fill_targets(const Grid& grid, const std::vector<Value>& answers);

}  // namespace crosspuzzle
