#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crosspuzzle/core.hpp"

namespace crosspuzzle {

/// A model answer after extraction. parsed[i] is nullopt for tokens that are
/// not plain decimal integers.
struct Prediction {
  std::string example_id;
  std::string raw_text;
  std::vector<std::string> extracted;
  std::vector<std::optional<Value>> parsed;

  static Prediction from_text(std::string example_id, std::string raw_text);
};

struct CellScore {
  int index = 0;
  int hop = 1;
  bool correct = false;
};

struct ExampleScore {
  std::string example_id;
  std::vector<CellScore> cells;
  bool all_correct = false;
};

/// Hop buckets reported by khop: 1, 2, 3 and 4+ (pools every depth >= 4).
enum class HopBucket { One = 1, Two = 2, Three = 3, FourPlus = 4 };

inline constexpr HopBucket kHopBuckets[] = {HopBucket::One, HopBucket::Two, HopBucket::Three, HopBucket::FourPlus};

/// "1", "2", "3", "4plus".
std::string hop_bucket_key(HopBucket k);

struct EvalReport {
  std::vector<ExampleScore> per_example;
  double micro = 0;
  double macro = 0;
  std::map<HopBucket, std::optional<double>> khop;  // nullopt: no cell at that depth
  double mean_reward = 0;
};

using WeightFn = std::function<double(int hop)>;

/// w(h) = h.
double hop_weight(int hop);
/// w(h) = 1.
double uniform_weight(int hop);

/// Tokens of the last <answer>...</answer> block, split on whitespace.
std::vector<std::string> extract_answers(std::string_view raw_text);

/// Integer value of an answer token after stripping thousands separators and
/// surrounding punctuation; nullopt if anything else remains.
std::optional<Value> parse_answer_token(std::string_view token);

/// Positional scoring: slot i is correct iff the prediction has a valid
/// integer at i equal to gold_answers[i]. Surplus tokens never earn credit
/// but make all_correct false.
ExampleScore score_example(const Prediction& pred, const DatasetExample& gold);

/// Mean over examples of the per-example fraction of correct cells.
double micro_accuracy(const std::vector<ExampleScore>& scores);
/// Share of examples with every cell correct.
double macro_accuracy(const std::vector<ExampleScore>& scores);
/// Pooled accuracy over every cell at depth k across all examples.
double khop_accuracy(const std::vector<ExampleScore>& scores, HopBucket k);

/// sum(w(hop) * correct) / sum(w(hop)).
double weighted_reward(const std::vector<CellScore>& scores, const WeightFn& weight = hop_weight);

/// All aggregate metrics. Throws EmptyReport when `scores` is empty.
EvalReport aggregate(std::vector<ExampleScore> scores, const WeightFn& weight = hop_weight);

}  // namespace crosspuzzle
