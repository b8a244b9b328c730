#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crosspuzzle/core.hpp"
#include "crosspuzzle/eval.hpp"
#include "crosspuzzle/json_io.hpp"

namespace crosspuzzle {

inline constexpr std::string_view kTemplateVersion = "v1";

enum class Modality : std::uint8_t { TextOnly, ImageOnly, ImageText };

/// "text", "image", "image-text".
std::string_view to_string(Modality m);
Modality parse_modality(std::string_view s);

struct TextPart {
  std::string text;
};

struct ImagePart {
  std::string bytes;
  std::string media_type;
};

using PromptPart = std::variant<TextPart, ImagePart>;

/// A prompt: the instruction template followed by the puzzle parts.
struct PromptBundle {
  std::string instruction_text;
  std::vector<PromptPart> parts;
  std::string example_id;
  Modality modality = Modality::TextOnly;
  std::string style_id;  // "none" for text-only prompts

  /// Instruction and every text part, joined by blank lines.
  std::string full_text() const;
};

/// Verbatim template text for a modality (or the trajectory template).
std::string_view prompt_template(Modality m);
std::string_view trajectory_template();

/// Writes manifest.jsonl plus query and solution images for every style under
/// `dir`. SVG files are always written; PNG files too when the manifest paths
/// point at .png.
void write_dataset(const std::filesystem::path& dir, const std::vector<DatasetExample>& examples);

/// `dataset_dir` resolves relative image paths from the manifest.
/// Throws MissingStyleArtifact when an image-bearing modality lacks the style.
PromptBundle build_prompt(const DatasetExample& example, Modality modality, std::string_view style_id,
                          const std::filesystem::path& dataset_dir = ".");

struct EndpointConfig {
  std::string base_url;                  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model_name;
  std::string model_field = "model";
  std::string auth_token_env = "BENCH_API_KEY";
  std::string response_text_pointer = "/choices/0/message/content";
  int max_concurrency = 4;
  double timeout_s = 120;
  int max_retries = 3;
  int backoff_ms = 500;
  json sampling = json::object();  // merged into the request body as-is

  /// Throws ConfigError.
  void validate() const;
  static EndpointConfig from_json(const json& j);
  json to_json() const;
};

/// Chat-completions request body for a bundle.
json chat_request_body(const PromptBundle& bundle, const EndpointConfig& config);

enum class RunStatus : std::uint8_t { Ok, Error };

struct RunRecord {
  std::string example_id;
  Modality modality = Modality::TextOnly;
  std::string style_id;
  std::string model;
  std::string request_fingerprint;
  std::string response_text;
  std::int64_t latency_ms = 0;
  RunStatus status = RunStatus::Ok;
  std::string error;

  json to_json() const;
  static RunRecord from_json(const json& j);
};

/// SHA-256 over (example id, modality, style, model, template version).
std::string request_fingerprint(std::string_view example_id, Modality modality, std::string_view style_id,
                                std::string_view model_name);

struct RunSummary {
  std::filesystem::path run_file;
  std::size_t requested = 0;  // examples sent to the endpoint in this call
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;  // already OK from an earlier run
};

/// Sends every example's prompt to the endpoint with at most
/// max_concurrency requests in flight and writes one RunRecord per example.
/// Records already OK under the same fingerprint are kept and not re-sent;
/// stale or failed records are dropped and retried.
RunSummary run_benchmark(const std::filesystem::path& manifest, const EndpointConfig& endpoint, Modality modality,
                         std::string_view style_id, const std::filesystem::path& out);

/// Scores a run file against its manifest. Error records count as empty
/// answers. Throws EmptyReport for an empty run and ManifestMismatch when the
/// run's example ids differ from the manifest's.
EvalReport score_run(const std::filesystem::path& run_file, const std::filesystem::path& manifest,
                     const WeightFn& weight = hop_weight);

/// Step-by-step text of a solution trace, one section per deduction step.
std::string render_symbolic_solution(const DatasetExample& example);

/// "<answer>a b c</answer>".
std::string answer_line(const std::vector<Value>& answers);

/// One JSONL record per example: trajectory prompt, symbolic solution and
/// answer line. Returns the number of records written.
std::size_t export_sft_trajectories(const std::filesystem::path& manifest, const std::filesystem::path& out);

struct LabeledReport {
  std::string model;
  Modality modality = Modality::TextOnly;
  std::string style_id;
  EvalReport report;
};

/// Rows per model; Micro/Macro column pairs per modality, in percent.
std::string format_table(const std::vector<LabeledReport>& reports);

}  // namespace crosspuzzle
