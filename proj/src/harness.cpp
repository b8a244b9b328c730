#include "crosspuzzle/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "crosspuzzle/raster.hpp"
#include "crosspuzzle/render.hpp"
#include "crosspuzzle/resources.hpp"
#include "crosspuzzle/solver.hpp"

namespace crosspuzzle {

namespace fs = std::filesystem;

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::TextOnly: return "text";
    case Modality::ImageOnly: return "image";
    case Modality::ImageText: return "image-text";
  }
  return "text";
}

Modality parse_modality(std::string_view s) {
  if (s == "text" || s == "text-only") return Modality::TextOnly;
  if (s == "image" || s == "image-only") return Modality::ImageOnly;
  if (s == "image-text" || s == "image+text") return Modality::ImageText;
  throw ConfigError("unknown modality '" + std::string(s) + "'");
}

std::string PromptBundle::full_text() const {
  std::string out = instruction_text;
  for (const auto& part : parts)
    if (const auto* t = std::get_if<TextPart>(&part)) out += "\n" + t->text;
  return out;
}

std::string_view prompt_template(Modality m) {
  switch (m) {
    case Modality::TextOnly: return resource("prompts/v1/text_only.txt");
    case Modality::ImageOnly: return resource("prompts/v1/image_only.txt");
    case Modality::ImageText: return resource("prompts/v1/image_text.txt");
  }
  return resource("prompts/v1/text_only.txt");
}

std::string_view trajectory_template() { return resource("prompts/v1/trajectory.txt"); }

namespace {

std::string media_type_for(const fs::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  return "application/octet-stream";
}

std::string base64(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return ss.str();
}

}  // namespace

void write_dataset(const fs::path& dir, const std::vector<DatasetExample>& examples) {
  write_manifest(dir / "manifest.jsonl", examples);
  for (const auto& ex : examples) {
    const std::uint64_t seed = style_seed(ex.id);
    for (StyleId id : kAllStyles) {
      const StyleSpec spec = StyleSpec::make(id);
      const std::string key(to_string(id));
      for (bool solution : {false, true}) {
        const auto& paths = solution ? ex.solution_images : ex.images;
        auto it = paths.find(key);
        if (it == paths.end()) continue;
        const RenderView view = solution ? RenderView::solution(ex.answer_grid) : RenderView::query();
        fs::path target = dir / it->second;
        fs::path svg = target;
        svg.replace_extension(".svg");
        write_file(svg, render_svg(ex.grid, spec, view, seed));
        if (target.extension() == ".png") {
          const auto png = render_png(ex.grid, spec, view, seed);
          write_file(target, std::string_view(reinterpret_cast<const char*>(png.data()), png.size()));
        }
      }
    }
  }
}

PromptBundle build_prompt(const DatasetExample& example, Modality modality, std::string_view style_id,
                          const fs::path& dataset_dir) {
  PromptBundle b;
  b.instruction_text = std::string(prompt_template(modality));
  b.example_id = example.id;
  b.modality = modality;
  b.style_id = modality == Modality::TextOnly ? "none" : std::string(style_id);

  auto image = [&]() -> ImagePart {
    auto it = example.images.find(std::string(style_id));
    if (it == example.images.end())
      throw MissingStyleArtifact("example '" + example.id + "' has no '" + std::string(style_id) + "' image");
    const fs::path p = fs::path(it->second).is_absolute() ? fs::path(it->second) : dataset_dir / it->second;
    if (!fs::exists(p)) throw MissingStyleArtifact("image file " + p.string() + " is missing");
    return {read_file(p), media_type_for(p)};
  };

  if (modality != Modality::ImageOnly) b.parts.emplace_back(TextPart{example.markdown});
  if (modality != Modality::TextOnly) b.parts.emplace_back(image());
  return b;
}

void EndpointConfig::validate() const {
  static const std::regex kUrl(R"(^https?://[^/:\s]+(:\d{1,5})?/?$)");
  if (!std::regex_match(base_url, kUrl)) throw ConfigError("base_url must look like http(s)://host[:port]");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (base_url.starts_with("https://")) throw ConfigError("this build has no TLS support");
#endif
  if (path.empty() || path.front() != '/') throw ConfigError("path must start with '/'");
  if (model_name.empty()) throw ConfigError("model name is required");
  if (model_field.empty()) throw ConfigError("model field name is required");
  if (max_concurrency < 1) throw ConfigError("max_concurrency must be at least 1");
  if (!(timeout_s > 0)) throw ConfigError("timeout must be positive");
  if (max_retries < 0) throw ConfigError("max_retries must not be negative");
  if (backoff_ms < 0) throw ConfigError("backoff must not be negative");
  if (!sampling.is_object()) throw ConfigError("sampling must be a JSON object");
  try {
    (void)json::json_pointer(response_text_pointer);
  } catch (const json::exception&) {
    throw ConfigError("response_text_pointer is not a JSON pointer");
  }
}

EndpointConfig EndpointConfig::from_json(const json& j) {
  EndpointConfig c;
  try {
    c.base_url = j.at("base_url").get<std::string>();
    c.model_name = j.at("model").get<std::string>();
    c.path = j.value("path", c.path);
    c.model_field = j.value("model_field", c.model_field);
    c.auth_token_env = j.value("auth_token_env", c.auth_token_env);
    c.response_text_pointer = j.value("response_text_pointer", c.response_text_pointer);
    c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
    c.timeout_s = j.value("timeout_s", c.timeout_s);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.backoff_ms = j.value("backoff_ms", c.backoff_ms);
    c.sampling = j.value("sampling", json::object());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad endpoint config: ") + e.what());
  }
  return c;
}

json EndpointConfig::to_json() const {
  return {{"base_url", base_url},         {"path", path},
          {"model", model_name},          {"model_field", model_field},
          {"auth_token_env", auth_token_env}, {"response_text_pointer", response_text_pointer},
          {"max_concurrency", max_concurrency}, {"timeout_s", timeout_s},
          {"max_retries", max_retries},   {"backoff_ms", backoff_ms},
          {"sampling", sampling}};
}

json chat_request_body(const PromptBundle& bundle, const EndpointConfig& config) {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", bundle.instruction_text}});
  for (const auto& part : bundle.parts) {
    if (const auto* t = std::get_if<TextPart>(&part)) {
      content.push_back({{"type", "text"}, {"text", t->text}});
    } else {
      const auto& img = std::get<ImagePart>(part);
      content.push_back(
          {{"type", "image_url"}, {"image_url", {{"url", "data:" + img.media_type + ";base64," + base64(img.bytes)}}}});
    }
  }
  json body = config.sampling;
  body[config.model_field] = config.model_name;
  body["messages"] = json::array({{{"role", "user"}, {"content", std::move(content)}}});
  return body;
}

json RunRecord::to_json() const {
  json j = {{"example_id", example_id},
            {"modality", to_string(modality)},
            {"style", style_id},
            {"model", model},
            {"fingerprint", request_fingerprint},
            {"response_text", response_text},
            {"latency_ms", latency_ms},
            {"status", status == RunStatus::Ok ? "ok" : "error"}};
  if (status == RunStatus::Error) j["error"] = error;
  return j;
}

RunRecord RunRecord::from_json(const json& j) {
  RunRecord r;
  r.example_id = j.at("example_id").get<std::string>();
  r.modality = parse_modality(j.at("modality").get<std::string>());
  r.style_id = j.value("style", "none");
  r.model = j.value("model", "");
  r.request_fingerprint = j.value("fingerprint", "");
  r.response_text = j.value("response_text", "");
  r.latency_ms = j.value("latency_ms", std::int64_t{0});
  r.status = j.value("status", "error") == "ok" ? RunStatus::Ok : RunStatus::Error;
  r.error = j.value("error", "");
  return r;
}

std::string request_fingerprint(std::string_view example_id, Modality modality, std::string_view style_id,
                                std::string_view model_name) {
  std::string key;
  for (std::string_view field : {example_id, to_string(modality), style_id, model_name, kTemplateVersion}) {
    key += field;
    key += '\x1f';
  }
  return sha256_hex(key);
}

namespace {

std::string extract_response_text(const json& response, const std::string& pointer) {
  const json& node = response.at(json::json_pointer(pointer));
  if (node.is_string()) return node.get<std::string>();
  if (node.is_array()) {
    std::string out;
    for (const auto& part : node)
      if (part.is_object() && part.value("type", "") == "text") out += part.value("text", "");
    return out;
  }
  throw Error("response text is neither a string nor a list of parts");
}

bool transient(int status) { return status == 408 || status == 429 || status >= 500; }

RunRecord send_one(httplib::Client& client, const EndpointConfig& cfg, const std::string& body,
                   const std::string& token, RunRecord rec) {
  const auto start = std::chrono::steady_clock::now();
  httplib::Headers headers;
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(cfg.path, headers, body, "application/json");
    std::string failure;
    bool retry = false;
    if (!res) {
      failure = "transport error: " + httplib::to_string(res.error());
      retry = true;
    } else if (res->status < 200 || res->status >= 300) {
      failure = "HTTP " + std::to_string(res->status);
      retry = transient(res->status);
    } else {
      try {
        rec.response_text = extract_response_text(json::parse(res->body), cfg.response_text_pointer);
        rec.status = RunStatus::Ok;
        rec.error.clear();
      } catch (const std::exception& e) {
        rec.status = RunStatus::Error;
        rec.error = std::string("unreadable response: ") + e.what();
      }
      break;
    }
    if (!retry || attempt >= cfg.max_retries) {
      rec.status = RunStatus::Error;
      rec.error = failure;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<std::int64_t>(cfg.backoff_ms) << attempt));
  }
  rec.latency_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

RunSummary run_benchmark(const fs::path& manifest, const EndpointConfig& endpoint, Modality modality,
                         std::string_view style_id, const fs::path& out) {
  endpoint.validate();
  const auto examples = read_manifest(manifest);
  const fs::path dataset_dir = manifest.has_parent_path() ? manifest.parent_path() : fs::path(".");
  const std::string style = modality == Modality::TextOnly ? "none" : std::string(style_id);
  if (modality != Modality::TextOnly) (void)parse_style(style);

  RunSummary summary;
  summary.run_file = out;

  // Keep OK records whose fingerprint still matches; everything else reruns.
  std::map<std::string, RunRecord> kept;
  if (fs::exists(out)) {
    for (const auto& j : read_jsonl(out)) {
      RunRecord r = RunRecord::from_json(j);
      if (r.status == RunStatus::Ok &&
          r.request_fingerprint == request_fingerprint(r.example_id, modality, style, endpoint.model_name))
        kept[r.example_id] = std::move(r);
    }
  }
  std::vector<const DatasetExample*> todo;
  std::string rewritten;
  for (const auto& ex : examples) {
    if (auto it = kept.find(ex.id); it != kept.end()) {
      rewritten += it->second.to_json().dump() + "\n";
      ++summary.skipped;
    } else {
      todo.push_back(&ex);
    }
  }
  write_file(out, rewritten);
  summary.requested = todo.size();
  if (todo.empty()) return summary;

  const char* token_env = std::getenv(endpoint.auth_token_env.c_str());
  const std::string token = token_env ? token_env : "";

  std::ofstream sink(out, std::ios::app | std::ios::binary);
  if (!sink) throw Error("cannot append to " + out.string());
  std::mutex sink_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    httplib::Client client(endpoint.base_url);
    const auto timeout = std::chrono::milliseconds(static_cast<std::int64_t>(endpoint.timeout_s * 1000));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      const DatasetExample& ex = *todo[i];
      RunRecord rec;
      rec.example_id = ex.id;
      rec.modality = modality;
      rec.style_id = style;
      rec.model = endpoint.model_name;
      rec.request_fingerprint = request_fingerprint(ex.id, modality, style, endpoint.model_name);
      try {
        const std::string body = chat_request_body(build_prompt(ex, modality, style, dataset_dir), endpoint).dump();
        rec = send_one(client, endpoint, body, token, std::move(rec));
      } catch (const std::exception& e) {
        rec.status = RunStatus::Error;
        rec.error = e.what();
      }
      std::lock_guard lock(sink_mutex);
      sink << rec.to_json().dump() << '\n';
      sink.flush();
      (rec.status == RunStatus::Ok ? summary.ok : summary.failed) += 1;
    }
  };

  const int n = std::min<int>(endpoint.max_concurrency, static_cast<int>(todo.size()));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  }
  return summary;
}

EvalReport score_run(const fs::path& run_file, const fs::path& manifest, const WeightFn& weight) {
  const auto rows = read_jsonl(run_file);
  if (rows.empty()) throw EmptyReport("run file " + run_file.string() + " has no records");
  const auto examples = read_manifest(manifest);

  std::map<std::string, RunRecord> records;
  for (const auto& j : rows) {
    RunRecord r = RunRecord::from_json(j);
    records[r.example_id] = std::move(r);
  }
  std::set<std::string> manifest_ids;
  for (const auto& ex : examples) manifest_ids.insert(ex.id);
  for (const auto& [id, _] : records)
    if (!manifest_ids.contains(id)) throw ManifestMismatch("run has a record for unknown example '" + id + "'");
  for (const auto& id : manifest_ids)
    if (!records.contains(id)) throw ManifestMismatch("run has no record for example '" + id + "'");

  std::vector<ExampleScore> scores;
  for (const auto& ex : examples) {
    const RunRecord& r = records.at(ex.id);
    const std::string text = r.status == RunStatus::Ok ? r.response_text : std::string();
    scores.push_back(score_example(Prediction::from_text(ex.id, text), ex));
  }
  return aggregate(std::move(scores), weight);
}

std::string answer_line(const std::vector<Value>& answers) {
  std::string out = "<answer>";
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(answers[i]);
  }
  return out + "</answer>";
}

std::string render_symbolic_solution(const DatasetExample& example) {
  const auto equations = detect_equations(example.answer_grid);
  std::ostringstream out;
  for (std::size_t s = 0; s < example.trace.steps.size(); ++s) {
    out << "Step " << s + 1 << ":\n";
    for (const Resolution& r : example.trace.steps[s]) {
      const Equation& eq = equations.at(static_cast<std::size_t>(r.equation_id));
      const Grid& g = example.answer_grid;
      out << "- Cell (row " << r.coord.row + 1 << ", column " << r.coord.col + 1 << ") = " << r.value << ", from the "
          << (eq.orientation == Orientation::Horizontal ? "horizontal" : "vertical") << " equation "
          << g.at(eq.a).value << ' ' << op_glyph(eq.op) << ' ' << g.at(eq.b).value << " = " << g.at(eq.c).value
          << ".\n";
    }
  }
  return out.str();
}

std::size_t export_sft_trajectories(const fs::path& manifest, const fs::path& out) {
  const auto examples = read_manifest(manifest);
  std::string lines;
  for (const auto& ex : examples) {
    const std::string solution = render_symbolic_solution(ex);
    const std::string answer = answer_line(ex.gold_answers);
    json rec = {{"id", ex.id},
                {"difficulty", to_string(ex.difficulty)},
                {"prompt", std::string(trajectory_template()) + "\n" + ex.markdown},
                {"symbolic_solution", solution},
                {"answer", answer},
                {"completion", solution + "\n" + answer},
                {"gold_answers", ex.gold_answers},
                {"hop_depths", ex.hop_depths},
                {"steps", ex.trace.steps.size()}};
    lines += rec.dump() + "\n";
  }
  write_file(out, lines);
  return examples.size();
}

std::string format_table(const std::vector<LabeledReport>& reports) {
  constexpr Modality kCols[] = {Modality::ImageOnly, Modality::ImageText, Modality::TextOnly};
  std::vector<std::string> models;
  std::map<std::pair<std::string, Modality>, const EvalReport*> cells;
  for (const auto& r : reports) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
    cells[{r.model, r.modality}] = &r.report;
  }
  std::size_t width = 5;
  for (const auto& m : models) width = std::max(width, m.size());

  auto pct = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%6.2f", 100.0 * v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "Model"
      << " | Image Only      | Image + Text    | Text Only\n";
  out << std::setw(static_cast<int>(width)) << ""
      << " | Micro   Macro   | Micro   Macro   | Micro   Macro\n";
  out << std::string(width, '-') << "-+-----------------+-----------------+----------------\n";
  for (const auto& m : models) {
    out << std::setw(static_cast<int>(width)) << m;
    for (Modality col : kCols) {
      out << " | ";
      auto it = cells.find({m, col});
      if (it == cells.end()) out << "  -       -    ";
      else out << pct(it->second->micro) << "  " << pct(it->second->macro) << " ";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace crosspuzzle
