#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "crosspuzzle/core.hpp"
#include "crosspuzzle/rng.hpp"

namespace crosspuzzle {

/// Shape of the blank pattern a difficulty level aims for.
struct DifficultyProfile {
  /// Among equations that contain blanks: weight of exactly one blank, of two.
  std::array<double, 2> blanks_per_equation_weights{1.0, 0.0};
  /// Desired share of targets at hop 1, 2, 3 and 4+.
  std::array<double, 4> target_hop_histogram{1.0, 0.0, 0.0, 0.0};
  /// Every equation gets exactly one blank and keeps two given operands.
  bool single_blank_per_equation = false;
  /// Reject blank sets whose deduction finishes in a single step.
  bool require_multi_step = false;

  static DifficultyProfile for_difficulty(Difficulty d);
};

/// A random a op b = c with all three values in [lo, hi].
/// Throws RangeInfeasible when no such triple exists.
std::array<Value, 3> sample_equation(Op op, Value lo, Value hi, Rng& rng);

/// Same, with one slot pinned to `fixed`. Returns nullopt when infeasible.
std::optional<std::array<Value, 3>> sample_equation_with(Op op, Slot slot, Value fixed, Value lo, Value hi, Rng& rng);

struct LayoutOptions {
  int placement_retries = 200;
  int max_extent = 25;  // rows and columns of the cropped grid
  int compactness_tournament = 3;
};

struct SolvedLayout {
  Grid answer_grid;
  std::vector<Equation> equations;  // as detect_equations reports them
};

/// Places a tree of crossing equations; each new equation is perpendicular to
/// an existing one and shares exactly one operand cell with it.
SolvedLayout build_solved_layout(const GenParams& params, Rng& rng, const LayoutOptions& options = {});

/// Turns Number cells into Targets so that deduction resolves every target,
/// no target needs more than `max_hop` iterations, and the hop histogram
/// tracks the profile. Throws ProfileInfeasible after `retries` attempts.
Grid punch_blanks(const Grid& answer_grid, const std::vector<Equation>& equations, const DifficultyProfile& profile,
                  int max_hop, Rng& rng, int retries = 200);

/// Full pipeline for one puzzle. Deterministic in params.seed.
DatasetExample generate(const GenParams& params, const std::string& id);

/// Relative path of an example's image under a dataset directory.
std::string image_path(const std::string& id, bool solution, std::string_view style, std::string_view ext = "svg");

struct BatchRequest {
  GenParams base;
  std::vector<std::pair<Difficulty, int>> mix;  // difficulty, count; generated in this order
  std::uint64_t seed = 0;
  std::optional<int> max_hop;  // per-difficulty default when unset; easy is always 1
  unsigned jobs = 1;
  std::string image_ext = "svg";
};

/// Example i gets seed derive_seed(seed, i) and id "p%05d". The result does
/// not depend on `jobs`.
std::vector<DatasetExample> generate_batch(const BatchRequest& request);

}  // namespace crosspuzzle
