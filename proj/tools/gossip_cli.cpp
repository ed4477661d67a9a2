#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "gossip/harness.hpp"

namespace fs = std::filesystem;
using namespace gossip;

namespace {

int cmd_run(const std::string& config, const std::vector<std::string>& overrides, std::string out) {
  ExperimentConfig cfg = load_config(config);
  for (const auto& kv : overrides) apply_override(cfg, kv);
  if (out.empty()) out = cfg.out;
  if (out.empty()) throw Error(ErrorKind::kConfigInvalid, "no output directory (--out or out = ...)");
  fs::create_directories(out);
  const fs::path csv = fs::path(out) / "results.csv";
  std::ofstream f(csv);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + csv.string());
  const auto rows = run_suite(cfg, &f);
  std::size_t ok = 0;
  for (const auto& r : rows) ok += r.success;
  std::cerr << rows.size() << " runs, " << ok << " successful -> " << csv.string() << '\n';
  return 0;
}

int cmd_summarize(const std::string& in, const std::string& out) {
  fs::path src(in);
  if (fs::is_directory(src)) src /= "results.csv";
  const Summary s = summarize(read_csv(src.string()));
  const std::string json = report_json(s);
  if (out.empty() || out == "-") {
    std::cout << json;
    return 0;
  }
  std::ofstream f(out);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + out);
  f << json;
  return 0;
}

int cmd_graph_gen(GraphSpec spec, const std::string& family, const std::string& out) {
  spec.family = parse_family(family);
  const Graph g = generate(spec);
  save_edgelist(g, out);
  std::cerr << "n=" << g.n() << " m=" << g.m() << " -> " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GOSSIP-CONGEST simulator and experiment runner"};
  app.require_subcommand(1);

  std::string config, out_dir;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "Run an experiment sweep and write results.csv");
  run->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--override", overrides, "key=value, applied after the file");
  run->add_option("--out", out_dir, "Output directory");

  std::string in, report;
  auto* sum = app.add_subcommand("summarize", "Medians, growth ratios and verdicts as JSON");
  sum->add_option("--in", in, "results.csv or the directory holding it")->required();
  sum->add_option("--out", report, "report.json path, '-' for stdout");

  auto* graph = app.add_subcommand("graph", "Graph utilities");
  graph->require_subcommand(1);
  GraphSpec spec;
  std::string family, edges_out;
  auto* gen = graph->add_subcommand("gen", "Write a generated graph as an edge list");
  gen->add_option("--family", family, "Graph family")->required();
  gen->add_option("--n", spec.n, "Node count")->required();
  gen->add_option("--seed", spec.seed, "Seed");
  gen->add_option("--c", spec.c, "Cliques or components for the barbell families");
  gen->add_option("--d", spec.d, "Degree for random_regular and expander_barbell");
  gen->add_option("--p", spec.p, "Edge probability for erdos_renyi");
  gen->add_flag("--weighted", spec.weighted, "Distinct random weights");
  gen->add_option("--out", edges_out, "Edge list path")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, overrides, out_dir);
    if (*sum) return cmd_summarize(in, report);
    if (*gen) return cmd_graph_gen(spec, family, edges_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
