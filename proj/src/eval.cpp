#include "crosspuzzle/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>

namespace crosspuzzle {

Prediction Prediction::from_text(std::string example_id, std::string raw_text) {
  Prediction p;
  p.example_id = std::move(example_id);
  p.raw_text = std::move(raw_text);
  p.extracted = extract_answers(p.raw_text);
  for (const auto& tok : p.extracted) p.parsed.push_back(parse_answer_token(tok));
  return p;
}

std::string hop_bucket_key(HopBucket k) {
  return k == HopBucket::FourPlus ? "4plus" : std::to_string(static_cast<int>(k));
}

double hop_weight(int hop) { return static_cast<double>(hop); }
double uniform_weight(int) { return 1.0; }

std::vector<std::string> extract_answers(std::string_view text) {
  constexpr std::string_view kOpen = "<answer>";
  constexpr std::string_view kClose = "</answer>";
  // Last closing tag with an opening tag before it.
  std::size_t close = text.rfind(kClose);
  while (close != std::string_view::npos) {
    const std::size_t open = text.rfind(kOpen, close);
    if (open != std::string_view::npos) {
      std::string_view body = text.substr(open + kOpen.size(), close - open - kOpen.size());
      std::vector<std::string> tokens;
      std::size_t i = 0;
      while (i < body.size()) {
        while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        std::size_t j = i;
        while (j < body.size() && !std::isspace(static_cast<unsigned char>(body[j]))) ++j;
        if (j > i) tokens.emplace_back(body.substr(i, j - i));
        i = j;
      }
      return tokens;
    }
    if (close == 0) break;
    close = text.rfind(kClose, close - 1);
  }
  return {};
}

std::optional<Value> parse_answer_token(std::string_view tok) {
  constexpr std::string_view kPunct = ".,;:!?()[]{}\"'`*";
  while (!tok.empty() && kPunct.find(tok.front()) != std::string_view::npos) tok.remove_prefix(1);
  while (!tok.empty() && kPunct.find(tok.back()) != std::string_view::npos) tok.remove_suffix(1);
  std::string digits;
  for (char ch : tok) {
    if (ch == ',') continue;
    if (ch < '0' || ch > '9') return std::nullopt;
    digits += ch;
  }
  if (digits.empty()) return std::nullopt;
  Value v = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  return v;
}

ExampleScore score_example(const Prediction& pred, const DatasetExample& gold) {
  if (pred.example_id != gold.id)
    throw UnknownExample("prediction for '" + pred.example_id + "' scored against '" + gold.id + "'");
  if (gold.hop_depths.size() != gold.gold_answers.size())
    throw ArityMismatch("example '" + gold.id + "' has mismatched answers and hop depths");
  ExampleScore s;
  s.example_id = gold.id;
  bool all = pred.parsed.size() == gold.gold_answers.size();
  for (std::size_t i = 0; i < gold.gold_answers.size(); ++i) {
    const bool ok = i < pred.parsed.size() && pred.parsed[i] && *pred.parsed[i] == gold.gold_answers[i];
    s.cells.push_back({static_cast<int>(i), gold.hop_depths[i], ok});
    all = all && ok;
  }
  s.all_correct = all;
  return s;
}

namespace {

double cell_fraction(const ExampleScore& e) {
  if (e.cells.empty()) return e.all_correct ? 1.0 : 0.0;
  const auto n = std::count_if(e.cells.begin(), e.cells.end(), [](const CellScore& c) { return c.correct; });
  return static_cast<double>(n) / static_cast<double>(e.cells.size());
}

bool in_bucket(int hop, HopBucket k) {
  return k == HopBucket::FourPlus ? hop >= 4 : hop == static_cast<int>(k);
}

}  // namespace

double micro_accuracy(const std::vector<ExampleScore>& scores) {
  if (scores.empty()) throw EmptyReport("no examples to score");
  double sum = 0;
  for (const auto& e : scores) sum += cell_fraction(e);
  return sum / static_cast<double>(scores.size());
}

double macro_accuracy(const std::vector<ExampleScore>& scores) {
  if (scores.empty()) throw EmptyReport("no examples to score");
  const auto n = std::count_if(scores.begin(), scores.end(), [](const ExampleScore& e) { return e.all_correct; });
  return static_cast<double>(n) / static_cast<double>(scores.size());
}

double khop_accuracy(const std::vector<ExampleScore>& scores, HopBucket k) {
  std::size_t total = 0, correct = 0;
  for (const auto& e : scores)
    for (const auto& c : e.cells)
      if (in_bucket(c.hop, k)) {
        ++total;
        correct += c.correct ? 1 : 0;
      }
  if (total == 0) throw NoSuchHop("no cells at hop depth " + hop_bucket_key(k));
  return static_cast<double>(correct) / static_cast<double>(total);
}

double weighted_reward(const std::vector<CellScore>& scores, const WeightFn& weight) {
  if (scores.empty()) throw EmptyScores("reward needs at least one cell");
  double num = 0, den = 0;
  for (const auto& c : scores) {
    const double w = weight(c.hop);
    if (!(w > 0)) throw Error("hop weights must be positive");
    den += w;
    if (c.correct) num += w;
  }
  return num / den;
}

EvalReport aggregate(std::vector<ExampleScore> scores, const WeightFn& weight) {
  EvalReport r;
  r.micro = micro_accuracy(scores);
  r.macro = macro_accuracy(scores);
  for (HopBucket k : kHopBuckets) {
    try {
      r.khop[k] = khop_accuracy(scores, k);
    } catch (const NoSuchHop&) {
      r.khop[k] = std::nullopt;
    }
  }
  double reward = 0;
  for (const auto& e : scores) reward += e.cells.empty() ? 0.0 : weighted_reward(e.cells, weight);
  r.mean_reward = reward / static_cast<double>(scores.size());
  r.per_example = std::move(scores);
  return r;
}

}  // namespace crosspuzzle
