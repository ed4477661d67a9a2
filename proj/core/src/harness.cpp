#include "gossip/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace gossip {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kUniformGossip: return "uniform_gossip";
    case Algorithm::kWeakCond: return "weakcond";
    case Algorithm::kGeneral: return "general";
    case Algorithm::kMst: return "mst";
    case Algorithm::kLeader: return "leader";
    case Algorithm::kAggregate: return "aggregate";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  for (Algorithm a : {Algorithm::kUniformGossip, Algorithm::kWeakCond, Algorithm::kGeneral,
                      Algorithm::kMst, Algorithm::kLeader, Algorithm::kAggregate})
    if (algorithm_name(a) == s) return a;
  throw Error(ErrorKind::kConfigInvalid, "unknown algorithm '" + s + "'");
}

// ---- config ----

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T x{};
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end)
    throw Error(ErrorKind::kConfigInvalid, "bad value '" + v + "' for " + key);
  return x;
}

void set_key(ExperimentConfig& c, const std::string& key, const std::string& v) {
  auto u32 = [&] { return parse_number<std::uint32_t>(key, v); };
  auto u64 = [&] { return parse_number<std::uint64_t>(key, v); };
  auto dbl = [&] { return parse_number<double>(key, v); };
  try {
    if (key == "algorithm") c.algorithm = parse_algorithm(v);
    else if (key == "family") {
      c.families.clear();
      for (const auto& f : split_list(v)) c.families.push_back(parse_family(f));
    } else if (key == "n") {
      c.ns.clear();
      for (const auto& x : split_list(v)) c.ns.push_back(parse_number<std::uint32_t>(key, x));
    } else if (key == "c_graph") c.c_graph = u32();
    else if (key == "d") c.d = u32();
    else if (key == "p") c.p = dbl();
    else if (key == "graph_path") c.graph_path = v;
    else if (key == "seeds") c.seeds = u32();
    else if (key == "base_seed") c.base_seed = u64();
    else if (key == "c") c.c = dbl();
    else if (key == "phi") c.phi = dbl();
    else if (key == "alpha") c.alpha = dbl();
    else if (key == "delta_exp") c.delta_exp = dbl();
    else if (key == "delta_sk") c.delta_sk = dbl();
    else if (key == "c_b") c.c_b = u32();
    else if (key == "max_rounds") c.max_rounds = u64();
    else if (key == "leader_algorithm") {
      if (v == "weakcond") c.leader_algorithm = LeaderAlgorithm::kWeakCond;
      else if (v == "general") c.leader_algorithm = LeaderAlgorithm::kGeneral;
      else throw Error(ErrorKind::kConfigInvalid, "unknown leader_algorithm '" + v + "'");
    } else if (key == "agg_op") c.agg_op = parse_agg_op(v);
    else if (key == "c_f") c.c_f = dbl();
    else if (key == "threads") c.threads = u32();
    else if (key == "out") c.out = v;
    else throw Error(ErrorKind::kConfigInvalid, "unknown key '" + key + "'");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfigInvalid) throw;
    throw Error(ErrorKind::kConfigInvalid, key + ": " + e.what());
  }
}

}  // namespace

void validate(const ExperimentConfig& c) {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::kConfigInvalid, m); };
  for (std::uint32_t n : c.ns)
    if (n == 0) bad("n must be positive");
  for (Family f : c.families)
    if (f == Family::kFromFile && c.graph_path.empty()) bad("from_file needs graph_path");
  if (c.c != 0 && !(c.c >= 1)) bad("c must be >= 1");
  if (c.phi < 0 || c.phi > 1) bad("phi must lie in (0, 1]");
  if (!(c.alpha > 0)) bad("alpha must be positive");
  if (!(c.delta_exp > 0 && c.delta_exp < 1)) bad("delta_exp must lie in (0, 1)");
  if (!(c.delta_sk > 0 && c.delta_sk < 1)) bad("delta_sk must lie in (0, 1)");
  if (c.c_b == 0) bad("c_b must be positive");
  if (c.c_f < 0) bad("c_f must be >= 0");
  if (!(c.p >= 0 && c.p <= 1)) bad("p must lie in [0, 1]");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::stringstream in(text);
  std::string line;
  std::uint32_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::kConfigInvalid, "line " + std::to_string(no) + ": expected key = value");
    set_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::kConfigInvalid, "override '" + kv + "' lacks '='");
  set_key(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  validate(cfg);
}

WeakParams family_weak_params(const GraphSpec& s) {
  const std::uint32_t n = std::max<std::uint32_t>(s.n, 2);
  switch (s.family) {
    case Family::kComplete: return {1, clique_conductance(n)};
    case Family::kDumbbell: return {2, clique_conductance(n / 2)};
    case Family::kCBarbell: return {double(s.c), clique_conductance(n / s.c)};
    case Family::kPath:
    case Family::kCycle: return {std::max(1.0, std::floor(n / 3.0)), 1.0};
    case Family::kStar: return {1, 1};
    case Family::kExpanderBarbell: return {2, 0.05};
    default: return {1, 0.05};
  }
}

// ---- rows ----

std::string csv_header() {
  return "algorithm,family,n,seed,rounds,messages,total_bits,max_message_bits,success,error,phases";
}

std::string to_csv(const ResultRow& r) {
  std::ostringstream o;
  o << r.algorithm << ',' << r.family << ',' << r.n << ',' << r.seed << ',' << r.rounds << ','
    << r.messages << ',' << r.total_bits << ',' << r.max_message_bits << ',' << (r.success ? 1 : 0)
    << ',' << r.error << ',' << r.phases;
  return o.str();
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::vector<ResultRow> rows;
  std::stringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      if (line != csv_header()) throw Error(ErrorKind::kParseError, "unexpected CSV header");
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 11) throw Error(ErrorKind::kParseError, "CSV row with " + std::to_string(f.size()) + " fields");
    try {
      ResultRow r;
      r.algorithm = f[0];
      r.family = f[1];
      r.n = parse_number<std::uint32_t>("n", f[2]);
      r.seed = parse_number<std::uint64_t>("seed", f[3]);
      r.rounds = parse_number<std::uint64_t>("rounds", f[4]);
      r.messages = parse_number<std::uint64_t>("messages", f[5]);
      r.total_bits = parse_number<std::uint64_t>("total_bits", f[6]);
      r.max_message_bits = parse_number<std::uint64_t>("max_message_bits", f[7]);
      r.success = f[8] == "1";
      r.error = f[9];
      r.phases = f[10];
      rows.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(ErrorKind::kParseError, e.what());
    }
  }
  return rows;
}

std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

std::uint64_t run_seed(const ExperimentConfig& cfg, std::uint32_t index) {
  return derive_seed(cfg.base_seed, index);
}

namespace {

bool all_hold(const std::vector<std::uint64_t>& rumor, std::uint64_t want) {
  for (std::size_t v = 1; v < rumor.size(); ++v)
    if (rumor[v] != want) return false;
  return true;
}

bool tree_ok(const Graph& g, const SpreadRun& run) {
  try {
    extract_spanning_tree(g, run);
    return true;
  } catch (const Error&) {
    return false;
  }
}

GeneralConfig general_config(const ExperimentConfig& c) {
  GeneralConfig gc;
  gc.delta_exp = c.delta_exp;
  gc.delta_sk = c.delta_sk;
  gc.budget = Budget{c.c_b};
  gc.max_rounds = c.max_rounds;
  return gc;
}

WeakCondConfig weak_config(const ExperimentConfig& c, const GraphSpec& spec) {
  const WeakParams wp = family_weak_params(spec);
  WeakCondConfig wc;
  wc.c = c.c > 0 ? c.c : wp.c;
  wc.phi = c.phi > 0 ? c.phi : wp.phi;
  wc.alpha = c.alpha;
  wc.budget = Budget{c.c_b};
  wc.max_rounds = c.max_rounds;
  return wc;
}

std::string phase_string(const Trace& t) {
  std::string s;
  for (const auto& p : t.phases) {
    if (!s.empty()) s += '|';
    s += p.label + '@' + std::to_string(p.round);
  }
  return s;
}

}  // namespace

ResultRow run_one(const ExperimentConfig& cfg, Family family, std::uint32_t n, std::uint32_t index) {
  ResultRow row;
  row.algorithm = algorithm_name(cfg.algorithm);
  row.family = family_name(family);
  row.n = n;
  row.seed = run_seed(cfg, index);
  const std::uint64_t seed = row.seed;
  GraphSpec spec;
  spec.family = family;
  spec.n = n;
  spec.c = cfg.c_graph;
  spec.d = cfg.d;
  spec.p = cfg.p;
  spec.path = cfg.graph_path;
  spec.seed = seed;
  spec.weighted = cfg.algorithm == Algorithm::kMst;
  const Budget budget{cfg.c_b};
  const NodeId source = 1;
  Trace trace;
  try {
    const Graph g = generate(spec);
    switch (cfg.algorithm) {
      case Algorithm::kUniformGossip: {
        SpreadRun r = uniform_push_pull(g, source, seed,
                                        cfg.max_rounds ? cfg.max_rounds : kDefaultMaxRounds, budget);
        row.success = all_hold(r.rumor, 1) && tree_ok(g, r);
        trace = std::move(r.trace);
        break;
      }
      case Algorithm::kWeakCond: {
        const WeakCondResult r = rumor_spread_weakcond(g, source, weak_config(cfg, spec), seed);
        row.success = all_hold(r.rumor, 1) && tree_ok(g, spread_run(r, source));
        trace = r.trace;
        break;
      }
      case Algorithm::kGeneral: {
        const GeneralResult r = rumor_spread_general(g, source, general_config(cfg), seed);
        row.success = all_hold(r.rumor, 1) && tree_ok(g, spread_run(r, source));
        trace = r.trace;
        break;
      }
      case Algorithm::kMst: {
        const MstResult r = mst(g, MstConfig{cfg.c_f, budget, cfg.max_rounds}, general_config(cfg), seed);
        row.success = r.edges == kruskal_mst(g);
        trace = r.trace;
        break;
      }
      case Algorithm::kLeader: {
        const LeaderResult r = leader_election(g, cfg.leader_algorithm, seed, weak_config(cfg, spec),
                                               general_config(cfg));
        const auto roots = r.tree.roots();
        bool ok = roots.size() == 1 && forest_consistent(g, r.tree);
        for (NodeId v = 1; ok && v <= n; ++v) ok = r.tree.in_forest(v) && r.leader[v] == roots[0];
        row.success = ok;
        trace = r.trace;
        break;
      }
      case Algorithm::kAggregate: {
        const GeneralResult gr = rumor_spread_general(g, source, general_config(cfg), seed);
        trace = gr.trace;
        const Forest tree = extract_spanning_tree(g, spread_run(gr, source));
        std::vector<std::uint64_t> values(n + 1, 0);
        for (NodeId v = 1; v <= n; ++v) values[v] = derive_seed(seed, v) & 0xFFFFF;
        const AggregateResult ar =
            aggregate(g, tree, AggregateSpec{cfg.agg_op, 64}, values, budget, derive_seed(seed, 7));
        append_trace(trace, ar.trace);
        AggValue want{0, n};
        if (cfg.agg_op == AggOp::kMin) want.value = UINT64_MAX;
        for (NodeId v = 1; v <= n; ++v) {
          switch (cfg.agg_op) {
            case AggOp::kMin: want.value = std::min(want.value, values[v]); break;
            case AggOp::kMax: want.value = std::max(want.value, values[v]); break;
            case AggOp::kCount: want.value += 1; break;
            default: want.value += values[v];
          }
        }
        bool ok = true;
        for (NodeId v = 1; v <= n; ++v) ok = ok && ar.result[v] == want;
        row.success = ok;
        break;
      }
    }
  } catch (const Error& e) {
    row.success = false;
    row.error = e.label();
  } catch (const std::exception&) {
    row.success = false;
    row.error = "internal";
  }
  row.rounds = trace.rounds;
  row.messages = trace.messages;
  row.total_bits = trace.total_bits;
  row.max_message_bits = trace.max_message_bits;
  row.phases = phase_string(trace);
  return row;
}

std::vector<ResultRow> run_suite(const ExperimentConfig& cfg, std::ostream* csv) {
  validate(cfg);
  struct Job {
    Family f;
    std::uint32_t n, i;
  };
  std::vector<Job> jobs;
  for (Family f : cfg.families)
    for (std::uint32_t n : cfg.ns)
      for (std::uint32_t i = 0; i < cfg.seeds; ++i) jobs.push_back({f, n, i});

  if (csv) *csv << csv_header() << '\n' << std::flush;
  std::vector<ResultRow> rows(jobs.size());
  std::vector<char> ready(jobs.size(), 0);
  std::size_t flushed = 0;
  std::mutex mu;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      ResultRow r = run_one(cfg, jobs[k].f, jobs[k].n, jobs[k].i);
      std::lock_guard lock(mu);
      rows[k] = std::move(r);
      ready[k] = 1;
      while (flushed < jobs.size() && ready[flushed]) {
        if (csv) *csv << to_csv(rows[flushed]) << '\n';
        ++flushed;
      }
      if (csv) csv->flush();
    }
  };
  std::uint32_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<std::uint32_t>(std::min<std::size_t>(threads, std::max<std::size_t>(1, jobs.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::uint32_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

// ---- summaries ----

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw Error(ErrorKind::kInsufficientData, "quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

std::vector<double> growth_ratios(const std::vector<double>& m) {
  if (m.size() < 2) throw Error(ErrorKind::kInsufficientData, "growth ratios need two sizes");
  std::vector<double> r;
  for (std::size_t k = 0; k + 1 < m.size(); ++k) r.push_back(m[k + 1] / m[k]);
  return r;
}

Summary summarize(const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::map<std::uint32_t, std::vector<const ResultRow*>>> by;
  for (const auto& r : rows) by[{r.algorithm, r.family}][r.n].push_back(&r);
  Summary s;
  bool any = false;
  for (const auto& [key, sizes] : by) {
    Series se{key.first, key.second, {}, {}};
    std::vector<double> meds;
    for (const auto& [n, rs] : sizes) {
      SeriesPoint p;
      p.n = n;
      std::vector<double> rounds;
      for (const ResultRow* r : rs) {
        ++p.runs;
        p.successes += r->success;
        p.max_message_bits = std::max(p.max_message_bits, r->max_message_bits);
        if (r->error.empty()) rounds.push_back(static_cast<double>(r->rounds));
      }
      if (rounds.empty()) continue;
      p.median = median(rounds);
      p.q25 = quantile(rounds, 0.25);
      p.q75 = quantile(rounds, 0.75);
      meds.push_back(p.median);
      se.points.push_back(p);
    }
    if (meds.size() >= 2) {
      se.ratios = growth_ratios(meds);
      any = true;
    }
    s.series.push_back(std::move(se));
  }
  if (!any) throw Error(ErrorKind::kInsufficientData, "no series has results at two sizes");
  return s;
}

std::string report_json(const Summary& s) {
  using json = nlohmann::ordered_json;
  json out;
  out["series"] = json::array();
  for (const Series& se : s.series) {
    json j;
    j["algorithm"] = se.algorithm;
    j["family"] = se.family;
    json pts = json::array();
    std::vector<double> nl2, sl2;
    bool budget_ok = true;
    for (const SeriesPoint& p : se.points) {
      const double n = p.n, l = std::log2(std::max(2.0, n));
      const double a = p.median / (n * l * l), b = p.median / (std::sqrt(n) * l * l);
      nl2.push_back(a);
      sl2.push_back(b);
      const std::uint64_t id_bound = std::max<std::uint64_t>(4, std::uint64_t{p.n} * p.n);
      const std::uint64_t cap = Budget{64}.max_bits(id_bound);
      budget_ok = budget_ok && p.max_message_bits <= cap;
      pts.push_back({{"n", p.n},
                     {"runs", p.runs},
                     {"successes", p.successes},
                     {"median", p.median},
                     {"q25", p.q25},
                     {"q75", p.q75},
                     {"max_message_bits", p.max_message_bits},
                     {"rounds_per_n_log2sq", a},
                     {"rounds_per_sqrt_n_log2sq", b}});
    }
    j["points"] = std::move(pts);
    j["ratios"] = se.ratios;
    json v;
    if (!se.ratios.empty()) {
      const auto [lo, hi] = std::minmax_element(se.ratios.begin(), se.ratios.end());
      v["log_growth"] = *hi <= 1.35;
      v["linear_growth"] = *lo >= 1.7;
    }
    auto spread = [](const std::vector<double>& x) {
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      return *lo > 0 ? *hi / *lo : 0.0;
    };
    if (nl2.size() >= 2) {
      v["n_log2sq_spread"] = spread(nl2);
      v["n_log2sq_within_2x"] = spread(nl2) <= 2.0;
      v["sqrt_n_log2sq_spread"] = spread(sl2);
      v["sqrt_n_log2sq_within_2x"] = spread(sl2) <= 2.0;
    }
    v["budget_ok"] = budget_ok;
    j["verdicts"] = std::move(v);
    out["series"].push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

}  // namespace gossip
