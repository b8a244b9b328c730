// Command-line front end: dataset generation, rendering, solving, SFT export
// and the benchmark run/score loop.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crosspuzzle/generator.hpp"
#include "crosspuzzle/harness.hpp"
#include "crosspuzzle/json_io.hpp"
#include "crosspuzzle/raster.hpp"
#include "crosspuzzle/render.hpp"
#include "crosspuzzle/solver.hpp"

namespace fs = std::filesystem;
using namespace crosspuzzle;

namespace {

std::pair<long long, long long> parse_pair(const std::string& s, const char* what) {
  long long a = 0, b = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lld:%lld%c", &a, &b, &tail) != 2)
    throw ConfigError(std::string(what) + " must look like LO:HI, got '" + s + "'");
  return {a, b};
}

std::vector<int> parse_mix(const std::string& s) {
  int e = 0, m = 0, h = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d:%d:%d%c", &e, &m, &h, &tail) != 3 || e < 0 || m < 0 || h < 0)
    throw ConfigError("--mix must look like EASY:MEDIUM:HARD, got '" + s + "'");
  return {e, m, h};
}

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  return read_file(path);
}

void emit(const std::string& out, std::string_view text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_file(out, text);
  }
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
  std::string config;
};

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string difficulty = "mixed";
  std::string mix = "90:85:75";
  int count = 100;
  std::string ops = "+-*/";
  std::string range = "50:250";
  std::string eqs = "5:15";
  std::optional<int> max_hop;
  unsigned jobs = 1;
  std::string image_format = "svg";
};

int run_generate(const Globals& g, const GenerateArgs& a) {
  BatchRequest req;
  req.base.operators = parse_operator_set(a.ops);
  std::tie(req.base.range_lo, req.base.range_hi) = parse_pair(a.range, "--range");
  const auto [emin, emax] = parse_pair(a.eqs, "--eqs");
  req.base.min_equations = static_cast<int>(emin);
  req.base.max_equations = static_cast<int>(emax);
  req.seed = g.seed;
  req.max_hop = a.max_hop;
  req.jobs = a.jobs;
  req.image_ext = a.image_format;

  if (a.difficulty == "mixed") {
    const auto mix = parse_mix(a.mix);
    req.mix = {{Difficulty::Easy, mix[0]}, {Difficulty::Medium, mix[1]}, {Difficulty::Hard, mix[2]}};
  } else {
    req.mix = {{parse_difficulty(a.difficulty), a.count}};
  }

  const fs::path dir = g.out.empty() ? fs::path("dataset") : fs::path(g.out);
  const auto examples = generate_batch(req);
  write_dataset(dir, examples);
  std::cerr << "wrote " << examples.size() << " examples to " << (dir / "manifest.jsonl").string() << "\n";
  return 0;
}

// --- render -----------------------------------------------------------------

struct RenderArgs {
  std::string input;
  std::string manifest;
  std::string id;
  std::string style = "original";
  std::string view = "query";
  std::string format = "svg";
};

int run_render(const Globals& g, const RenderArgs& a) {
  Grid grid;
  std::optional<Grid> answers;
  std::uint64_t seed = g.seed;
  if (!a.manifest.empty()) {
    if (a.id.empty()) throw ConfigError("--manifest needs --id");
    bool found = false;
    for (const auto& ex : read_manifest(a.manifest))
      if (ex.id == a.id) {
        grid = ex.grid;
        answers = ex.answer_grid;
        if (!g.seed_given) seed = style_seed(ex.id);
        found = true;
      }
    if (!found) throw UnknownExample("no example '" + a.id + "' in " + a.manifest);
  } else if (!a.input.empty()) {
    grid = parse_markdown(read_input(a.input));
  } else {
    throw ConfigError("render needs a markdown file or --manifest/--id");
  }

  RenderView view = RenderView::query();
  if (a.view == "solution") {
    if (!answers) answers = deduce(grid).trace.answer_grid;
    view = RenderView::solution(*answers);
  } else if (a.view != "query") {
    throw ConfigError("--view must be query or solution");
  }
  const StyleSpec spec = StyleSpec::make(parse_style(a.style));
  if (a.format == "svg") {
    emit(g.out, render_svg(grid, spec, view, seed));
  } else if (a.format == "png") {
    if (g.out.empty() || g.out == "-") throw ConfigError("png output needs --out FILE");
    const auto png = render_png(grid, spec, view, seed);
    write_file(g.out, std::string_view(reinterpret_cast<const char*>(png.data()), png.size()));
  } else {
    throw ConfigError("--format must be svg or png");
  }
  return 0;
}

// --- solve ------------------------------------------------------------------

struct SolveArgs {
  std::string input = "-";
  std::string oracle;
};

int run_solve(const Globals& g, const SolveArgs& a) {
  const Grid grid = parse_markdown(read_input(a.input));
  const auto equations = detect_equations(grid);
  const Deduction d = deduce(grid);
  std::vector<Value> answers;
  for (Coord t : target_order(grid)) answers.push_back(d.trace.answer_grid.at(t).value);

  json out = {{"equations", equations.size()},
              {"answers", answers},
              {"hop_depths", ordered_hops(grid, d.hops)},
              {"answer", answer_line(answers)},
              {"trace", trace_to_json(d.trace)},
              {"solution_markdown", to_markdown(d.trace.answer_grid)}};
  if (!a.oracle.empty()) {
    const auto [lo, hi] = parse_pair(a.oracle, "--oracle");
    out["oracle"] = brute_force_oracle(grid, lo, hi);
  }
  emit(g.out, out.dump(2) + "\n");
  return 0;
}

// --- export-sft ---------------------------------------------------------------

int run_export_sft(const Globals& g, const std::string& manifest) {
  const fs::path out = g.out.empty() ? fs::path("sft.jsonl") : fs::path(g.out);
  const std::size_t n = export_sft_trajectories(manifest, out);
  std::cerr << "wrote " << n << " trajectories to " << out.string() << "\n";
  return 0;
}

// --- bench ------------------------------------------------------------------

struct BenchRunArgs {
  std::string manifest;
  std::string modality = "text";
  std::string style = "original";
  std::string base_url;
  std::string model;
  std::optional<int> concurrency;
};

int run_bench_run(const Globals& g, const BenchRunArgs& a) {
  json cfg = load_config(g.config);
  if (cfg.contains("endpoint")) cfg = cfg.at("endpoint");
  if (!a.base_url.empty()) cfg["base_url"] = a.base_url;
  if (!a.model.empty()) cfg["model"] = a.model;
  if (a.concurrency) cfg["max_concurrency"] = *a.concurrency;
  const EndpointConfig endpoint = EndpointConfig::from_json(cfg);

  const fs::path out = g.out.empty() ? fs::path("run.jsonl") : fs::path(g.out);
  const RunSummary s = run_benchmark(a.manifest, endpoint, parse_modality(a.modality), a.style, out);
  std::cerr << "requested " << s.requested << ", ok " << s.ok << ", failed " << s.failed << ", resumed " << s.skipped
            << " -> " << s.run_file.string() << "\n";
  return 0;
}

WeightFn weight_named(const std::string& name) {
  if (name == "hop") return hop_weight;
  if (name == "uniform") return uniform_weight;
  throw ConfigError("--weights must be hop or uniform");
}

LabeledReport labeled(const std::string& run, const std::string& manifest, const WeightFn& w) {
  LabeledReport r;
  r.report = score_run(run, manifest, w);
  const auto rows = read_jsonl(run);
  const RunRecord first = RunRecord::from_json(rows.front());
  r.model = first.model;
  r.modality = first.modality;
  r.style_id = first.style_id;
  return r;
}

struct BenchScoreArgs {
  std::string run;
  std::string manifest;
  std::string weights = "hop";
  bool table = false;
};

int run_bench_score(const Globals& g, const BenchScoreArgs& a) {
  const LabeledReport r = labeled(a.run, a.manifest, weight_named(a.weights));
  json j = report_to_json(r.report);
  if (a.table) {
    std::cout << format_table({r});
    if (!g.out.empty()) write_file(g.out, j.dump(2) + "\n");
  } else {
    emit(g.out, j.dump(2) + "\n");
  }
  return 0;
}

int run_bench_table(const Globals& g, const std::vector<std::string>& runs, const std::string& manifest,
                    const std::string& weights) {
  std::vector<LabeledReport> reports;
  for (const auto& run : runs) reports.push_back(labeled(run, manifest, weight_named(weights)));
  emit(g.out, format_table(reports));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-math puzzle generator, renderer, solver and benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Base random seed")->default_val(0);
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--config", g.config, "Endpoint configuration (JSON)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a dataset (manifest.jsonl + images)");
  generate->add_option("--difficulty", gen.difficulty, "easy, medium, hard or mixed")
      ->check(CLI::IsMember({"easy", "medium", "hard", "mixed"}))
      ->capture_default_str();
  generate->add_option("--mix", gen.mix, "EASY:MEDIUM:HARD counts for --difficulty mixed")->capture_default_str();
  generate->add_option("--count", gen.count, "Examples for a single difficulty")->capture_default_str();
  generate->add_option("--ops", gen.ops, "Operator set, e.g. +-*/")->capture_default_str();
  generate->add_option("--range", gen.range, "Value range LO:HI")->capture_default_str();
  generate->add_option("--eqs", gen.eqs, "Equations per puzzle MIN:MAX")->capture_default_str();
  generate->add_option("--max-hop", gen.max_hop, "Hop cap for medium and hard");
  generate->add_option("--jobs", gen.jobs, "Worker threads")->capture_default_str();
  generate->add_option("--image-format", gen.image_format, "Manifest image format")
      ->check(CLI::IsMember({"svg", "png"}))
      ->capture_default_str();

  RenderArgs ren;
  auto* render = app.add_subcommand("render", "Render a markdown grid or a manifest example");
  render->add_option("input", ren.input, "Markdown grid file ('-' for stdin)");
  render->add_option("--manifest", ren.manifest, "Dataset manifest");
  render->add_option("--id", ren.id, "Example id within --manifest");
  render->add_option("--style", ren.style, "original, borderless, background or altfontcolor")->capture_default_str();
  render->add_option("--view", ren.view, "query or solution")->capture_default_str();
  render->add_option("--format", ren.format, "svg or png")->capture_default_str();

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "Deduce the targets of a markdown grid");
  solve->add_option("input", sol.input, "Markdown grid file ('-' for stdin)")->capture_default_str();
  solve->add_option("--oracle", sol.oracle, "Also enumerate all solutions over LO:HI");

  std::string sft_manifest;
  auto* sft = app.add_subcommand("export-sft", "Write solution trajectories as JSONL");
  sft->add_option("--manifest", sft_manifest, "Dataset manifest")->required();

  auto* bench = app.add_subcommand("bench", "Query an endpoint and score its answers");
  bench->require_subcommand(1);

  BenchRunArgs br;
  auto* bench_run = bench->add_subcommand("run", "Send every example to the endpoint");
  bench_run->add_option("--manifest", br.manifest, "Dataset manifest")->required();
  bench_run->add_option("--modality", br.modality, "text, image or image-text")->capture_default_str();
  bench_run->add_option("--style", br.style, "Image style")->capture_default_str();
  bench_run->add_option("--base-url", br.base_url, "Overrides the configured base URL");
  bench_run->add_option("--model", br.model, "Overrides the configured model name");
  bench_run->add_option("--concurrency", br.concurrency, "Overrides max_concurrency");

  BenchScoreArgs bs;
  auto* bench_score = bench->add_subcommand("score", "Score a run file");
  bench_score->add_option("--run", bs.run, "Run file")->required();
  bench_score->add_option("--manifest", bs.manifest, "Dataset manifest")->required();
  bench_score->add_option("--weights", bs.weights, "Reward weights: hop or uniform")->capture_default_str();
  bench_score->add_flag("--table", bs.table, "Print a Micro/Macro table");

  std::vector<std::string> table_runs;
  std::string table_manifest, table_weights = "hop";
  auto* bench_table = bench->add_subcommand("table", "Micro/Macro table over several run files");
  bench_table->add_option("runs", table_runs, "Run files")->required();
  bench_table->add_option("--manifest", table_manifest, "Dataset manifest")->required();
  bench_table->add_option("--weights", table_weights, "Reward weights: hop or uniform")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*generate) return run_generate(g, gen);
    if (*render) return run_render(g, ren);
    if (*solve) return run_solve(g, sol);
    if (*sft) return run_export_sft(g, sft_manifest);
    if (*bench_run) return run_bench_run(g, br);
    if (*bench_score) return run_bench_score(g, bs);
    if (*bench_table) return run_bench_table(g, table_runs, table_manifest, table_weights);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
