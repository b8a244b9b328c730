#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "crosspuzzle/core.hpp"
#include "crosspuzzle/eval.hpp"

namespace crosspuzzle {

using json = nlohmann::json;

json trace_to_json(const SolutionTrace& trace);
/// Steps only; the answer grid is not part of the wire form.
SolutionTrace trace_from_json(const json& j);

json gen_params_to_json(const GenParams& p);
GenParams gen_params_from_json(const json& j);

/// One manifest line.
json example_to_json(const DatasetExample& ex);
DatasetExample example_from_json(const json& j);

void write_manifest(const std::filesystem::path& path, const std::vector<DatasetExample>& examples);
std::vector<DatasetExample> read_manifest(const std::filesystem::path& path);

/// Keys: micro, macro, khop.{1,2,3,4plus} (null when absent), mean_reward,
/// per_example.
json report_to_json(const EvalReport& report);
EvalReport report_from_json(const json& j);

/// Parses every non-blank line of a JSONL file.
std::vector<json> read_jsonl(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace crosspuzzle
