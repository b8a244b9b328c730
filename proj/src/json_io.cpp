#include "crosspuzzle/json_io.hpp"

#include <fstream>
#include <sstream>

#include "crosspuzzle/render.hpp"
#include "crosspuzzle/solver.hpp"

namespace crosspuzzle {

json trace_to_json(const SolutionTrace& trace) {
  json steps = json::array();
  for (const auto& step : trace.steps) {
    json s = json::array();
    for (const auto& r : step)
      s.push_back({{"eq", r.equation_id}, {"row", r.coord.row}, {"col", r.coord.col}, {"value", r.value}});
    steps.push_back(std::move(s));
  }
  return {{"steps", std::move(steps)}};
}

SolutionTrace trace_from_json(const json& j) {
  SolutionTrace t;
  for (const auto& s : j.at("steps")) {
    std::vector<Resolution> step;
    for (const auto& r : s)
      step.push_back({r.at("eq").get<int>(), Coord{r.at("row").get<int>(), r.at("col").get<int>()},
                      r.at("value").get<Value>()});
    t.steps.push_back(std::move(step));
  }
  return t;
}

json gen_params_to_json(const GenParams& p) {
  return {{"difficulty", to_string(p.difficulty)},
          {"operators", operator_set_string(p.operators)},
          {"range", {p.range_lo, p.range_hi}},
          {"equation_count", {p.min_equations, p.max_equations}},
          {"max_hop", p.max_hop},
          {"seed", p.seed}};
}

GenParams gen_params_from_json(const json& j) {
  GenParams p;
  p.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
  p.operators = parse_operator_set(j.at("operators").get<std::string>());
  p.range_lo = j.at("range").at(0).get<Value>();
  p.range_hi = j.at("range").at(1).get<Value>();
  p.min_equations = j.at("equation_count").at(0).get<int>();
  p.max_equations = j.at("equation_count").at(1).get<int>();
  p.max_hop = j.at("max_hop").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

json example_to_json(const DatasetExample& ex) {
  return {{"id", ex.id},
          {"difficulty", to_string(ex.difficulty)},
          {"seed", ex.seed},
          {"markdown", ex.markdown},
          {"solution_markdown", to_markdown(ex.answer_grid)},
          {"gold_answers", ex.gold_answers},
          {"hop_depths", ex.hop_depths},
          {"images", ex.images},
          {"solution_images", ex.solution_images},
          {"gen_params", gen_params_to_json(ex.gen_params)},
          {"trace", trace_to_json(ex.trace)}};
}

DatasetExample example_from_json(const json& j) {
  DatasetExample ex;
  ex.id = j.at("id").get<std::string>();
  ex.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
  ex.seed = j.at("seed").get<std::uint64_t>();
  ex.markdown = j.at("markdown").get<std::string>();
  ex.grid = parse_markdown(ex.markdown);
  ex.gold_answers = j.at("gold_answers").get<std::vector<Value>>();
  ex.hop_depths = j.at("hop_depths").get<std::vector<int>>();
  ex.answer_grid = j.contains("solution_markdown") ? parse_markdown(j.at("solution_markdown").get<std::string>())
                                                   : fill_targets(ex.grid, ex.gold_answers);
  ex.images = j.value("images", std::map<std::string, std::string>{});
  ex.solution_images = j.value("solution_images", std::map<std::string, std::string>{});
  if (j.contains("gen_params")) ex.gen_params = gen_params_from_json(j.at("gen_params"));
  if (j.contains("trace")) {
    ex.trace = trace_from_json(j.at("trace"));
    ex.trace.answer_grid = ex.answer_grid;
  }
  if (ex.gold_answers.size() != target_order(ex.grid).size() || ex.hop_depths.size() != ex.gold_answers.size())
    throw ArityMismatch("manifest entry '" + ex.id + "' has answers that do not match its targets");
  return ex;
}

void write_manifest(const std::filesystem::path& path, const std::vector<DatasetExample>& examples) {
  std::string out;
  for (const auto& ex : examples) out += example_to_json(ex).dump() + "\n";
  write_file(path, out);
}

std::vector<DatasetExample> read_manifest(const std::filesystem::path& path) {
  std::vector<DatasetExample> out;
  for (const auto& j : read_jsonl(path)) out.push_back(example_from_json(j));
  return out;
}

json report_to_json(const EvalReport& report) {
  json khop = json::object();
  for (const auto& [k, v] : report.khop) khop[hop_bucket_key(k)] = v ? json(*v) : json(nullptr);
  json per = json::array();
  for (const auto& e : report.per_example) {
    json cells = json::array();
    for (const auto& c : e.cells) cells.push_back({{"index", c.index}, {"hop", c.hop}, {"correct", c.correct}});
    per.push_back({{"id", e.example_id}, {"cells", std::move(cells)}, {"all_correct", e.all_correct}});
  }
  return {{"micro", report.micro},
          {"macro", report.macro},
          {"khop", std::move(khop)},
          {"mean_reward", report.mean_reward},
          {"per_example", std::move(per)}};
}

EvalReport report_from_json(const json& j) {
  EvalReport r;
  r.micro = j.at("micro").get<double>();
  r.macro = j.at("macro").get<double>();
  r.mean_reward = j.at("mean_reward").get<double>();
  for (HopBucket k : kHopBuckets) {
    const auto& v = j.at("khop").at(hop_bucket_key(k));
    r.khop[k] = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  }
  for (const auto& e : j.value("per_example", json::array())) {
    ExampleScore s;
    s.example_id = e.at("id").get<std::string>();
    s.all_correct = e.at("all_correct").get<bool>();
    for (const auto& c : e.at("cells"))
      s.cells.push_back({c.at("index").get<int>(), c.at("hop").get<int>(), c.at("correct").get<bool>()});
    r.per_example.push_back(std::move(s));
  }
  return r;
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw Error(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

}  // namespace crosspuzzle
