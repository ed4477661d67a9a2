#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gossip/applications.hpp"
#include "gossip/graph.hpp"

namespace gossip {

enum class Algorithm { kUniformGossip, kWeakCond, kGeneral, kMst, kLeader, kAggregate };

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

// Text format: one `key = value` per line, `#` starts a comment, lists are
// comma separated. Keys:
//   algorithm   uniform_gossip | weakcond | general | mst | leader | aggregate
//   family      list of graph families
//   n           list of sizes
//   c_graph, d, p, graph_path   family shape parameters
//   seeds, base_seed
//   c, phi      weak-conductance knowledge; 0 picks the family's own values
//   alpha, delta_exp, delta_sk, c_b, max_rounds
//   leader_algorithm   weakcond | general
//   agg_op      min | max | sum | count | average
//   c_f         MST diameter cap constant
//   threads     0 = hardware concurrency
//   out         output directory
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kGeneral;
  std::vector<Family> families;
  std::vector<std::uint32_t> ns;
  std::uint32_t c_graph = 2;
  std::uint32_t d = 3;
  double p = 0.1;
  std::string graph_path;
  std::uint32_t seeds = 1;
  std::uint64_t base_seed = 1;
  double c = 0;
  double phi = 0;
  double alpha = 8.0;
  double delta_exp = 0.5;
  double delta_sk = 0.05;
  std::uint32_t c_b = 64;
  std::uint64_t max_rounds = 0;
  LeaderAlgorithm leader_algorithm = LeaderAlgorithm::kGeneral;
  AggOp agg_op = AggOp::kSum;
  double c_f = 2.0;
  std::uint32_t threads = 0;
  std::string out;
};

// Throws config-invalid.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key_eq_value);
void validate(const ExperimentConfig& cfg);

// (c, phi) that hold for the family by construction: the clique pieces of
// the barbells, segments of three nodes on paths and cycles, and a
// conservative expansion bound for the random families.
struct WeakParams {
  double c = 1;
  double phi = 1;
};
WeakParams family_weak_params(const GraphSpec& spec);

struct ResultRow {
  std::string algorithm;
  std::string family;
  std::uint32_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t rounds = 0;
  std::uint64_t messages = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t max_message_bits = 0;
  bool success = false;
  std::string error;   // error label, empty on a clean run
  std::string phases;  // label@round entries separated by '|'

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

std::string csv_header();
std::string to_csv(const ResultRow& r);
std::vector<ResultRow> parse_csv(const std::string& text);
std::vector<ResultRow> read_csv(const std::string& path);

// Seed of run i at one sweep point.
std::uint64_t run_seed(const ExperimentConfig& cfg, std::uint32_t index);

// One run; failures come back as rows with success = false and the label.
ResultRow run_one(const ExperimentConfig& cfg, Family family, std::uint32_t n, std::uint32_t index);

// All (family, n, seed) points in that order. Rows are computed in parallel
// and written to csv (header first) in order as soon as a prefix is done.
std::vector<ResultRow> run_suite(const ExperimentConfig& cfg, std::ostream* csv = nullptr);

// ---- summaries ----

struct SeriesPoint {
  std::uint32_t n = 0;
  std::uint32_t runs = 0;
  std::uint32_t successes = 0;
  double median = 0;
  double q25 = 0;
  double q75 = 0;
  std::uint64_t max_message_bits = 0;
};

struct Series {
  std::string algorithm;
  std::string family;
  std::vector<SeriesPoint> points;  // by n
  std::vector<double> ratios;       // median(n_{k+1}) / median(n_k)
};

struct Summary {
  std::vector<Series> series;
};

// Medians over runs without an error. Throws insufficient-data when no
// series has two sizes.
Summary summarize(const std::vector<ResultRow>& rows);

std::vector<double> growth_ratios(const std::vector<double>& medians);
double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

// Medians, ratios and per-series verdicts: logarithmic growth (every ratio
// <= 1.35), linear growth (every ratio >= 1.7), and the spread of rounds
// normalized by n log^2 n and sqrt(n) log^2 n (max / min <= 2).
std::string report_json(const Summary& s);

}  // namespace gossip
