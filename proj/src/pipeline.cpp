#include "rtnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "rtnet/backbone.hpp"
#include "rtnet/csv.hpp"
#include "rtnet/diagnostics.hpp"
#include "rtnet/graph_io.hpp"
#include "rtnet/ingest.hpp"
#include "rtnet/parallel.hpp"
#include "rtnet/synthetic.hpp"

namespace rtnet {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string describe(const std::vector<ConfigViolation>& violations) {
  std::string text = "invalid configuration:";
  for (const auto& v : violations) text += " " + v.key + ": " + v.message + ";";
  text.pop_back();
  return text;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

const std::vector<std::string>& report_files() {
  static const std::vector<std::string> files = {
      "fig1a_creator_consumer.csv", "fig1b_retention.csv", "fig1c_temporal.csv",
      "fig2a_ternary.csv",          "fig2b_coverage.csv",  "fig3a_daily_counts.csv",
      "fig3b_growth.csv",           "fig4_simulation.csv", "supp_a_diagnostics.csv",
  };
  return files;
}

std::string fnv1a_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

namespace {

constexpr const char* kIngestStages = "ingest (or synth)";

fs::path at(const PipelineConfig& c, std::string_view name) { return c.out_dir / name; }

void require(const PipelineConfig& c, std::string_view name, std::string_view stage) {
  if (!fs::exists(at(c, name))) {
    throw MissingInputError("missing " + std::string(name) + " in " + c.out_dir.string() +
                            "; run `" + std::string(stage) + "` first");
  }
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void ensure_valid(const PipelineConfig& c) {
  auto violations = validate_config(c);
  if (!violations.empty()) throw ConfigError(std::move(violations));
}

ordered_json config_json(const PipelineConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["range_start"] = c.range_start ? ordered_json(*c.range_start) : ordered_json();
  j["range_end"] = c.range_end ? ordered_json(*c.range_end) : ordered_json();
  j["alpha"] = c.alpha;
  j["band"] = c.band;
  j["tail_lo"] = c.tail_lo ? ordered_json(*c.tail_lo) : ordered_json();
  j["tail_hi"] = c.tail_hi ? ordered_json(*c.tail_hi) : ordered_json();
  j["theta"] = c.theta;
  j["min_involvement"] = c.min_involvement;
  j["use_backbone"] = c.use_backbone;
  j["ternary_bins"] = c.ternary_bins;
  j["window_days"] = c.window_days;
  j["step_days"] = c.step_days;
  j["partial_windows"] = c.partial_windows;
  j["min_obs"] = c.min_obs;
  j["n"] = c.fit.lookback_months;
  j["r0_min"] = c.fit.r0_min;
  j["r0_max"] = c.fit.r0_max;
  j["r0_step"] = c.fit.r0_step;
  j["runs"] = c.fit.runs_per_point;
  j["tolerance"] = c.fit.tolerance_pct;
  j["fit_mode"] = std::string(to_string(c.fit.mode));
  j["delta_tol"] = c.fit.delta_tolerance;
  j["delta_scan"] = c.fit.delta_scan_points;
  j["max_iter"] = c.fit.max_iterations;
  j["r0"] = c.sim_r0;
  j["delta"] = c.sim_delta;
  j["events"] = c.synth_events;
  return j;
}

// Inputs are hashed so a manifest pins exactly what a stage consumed. No
// timestamps or thread counts: reruns must be byte-identical.
void write_manifest(const PipelineConfig& c, const std::string& stage,
                    const std::vector<std::pair<std::string, fs::path>>& inputs,
                    const std::vector<std::string>& outputs) {
  ordered_json doc;
  doc["stage"] = stage;
  doc["seed"] = c.seed;
  doc["parameters"] = config_json(c);
  ordered_json in = ordered_json::object();
  for (const auto& [name, path] : inputs) in[name] = "fnv1a64:" + fnv1a_file(path);
  doc["inputs"] = std::move(in);
  doc["outputs"] = outputs;
  write_file(at(c, stage + ".manifest.json"), [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

std::vector<std::pair<std::string, fs::path>> artifacts(const PipelineConfig& c,
                                                        std::initializer_list<const char*> names) {
  std::vector<std::pair<std::string, fs::path>> out;
  for (const char* n : names) {
    if (fs::exists(at(c, n))) out.emplace_back(n, at(c, n));
  }
  return out;
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * fraction);
  return buf;
}

// ---------------------------------------------------------------- dataset

TimeRange resolve_range(const PipelineConfig& c, std::span<const RetweetEvent> events) {
  TimeRange range{c.range_start.value_or(0), c.range_end.value_or(0)};
  if (!c.range_start || !c.range_end) {
    if (events.empty()) throw std::runtime_error("no valid events to infer the dataset range from");
    const auto [lo, hi] = std::minmax_element(
        events.begin(), events.end(),
        [](const RetweetEvent& a, const RetweetEvent& b) { return a.timestamp < b.timestamp; });
    if (!c.range_start) range.start = day_of(lo->timestamp) * kSecondsPerDay;
    if (!c.range_end) range.end = (day_of(hi->timestamp) + 1) * kSecondsPerDay;
  }
  if (range.empty()) throw std::runtime_error("dataset range is empty");
  return range;
}

TimeRange read_dataset_range(const PipelineConfig& c) {
  require(c, artifact::kDataset, kIngestStages);
  std::ifstream in(at(c, artifact::kDataset));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  const auto f = split_csv_line(row);
  if (f.size() < 2) throw std::runtime_error("malformed " + std::string(artifact::kDataset));
  return {std::stoll(f[0]), std::stoll(f[1])};
}

std::string write_dataset(const PipelineConfig& c, const std::string& stage, const EventStream& s,
                          TimeRange range, const std::vector<ParseIssue>& issues,
                          std::vector<std::pair<std::string, fs::path>> inputs,
                          std::vector<std::string> outputs) {
  fs::create_directories(c.out_dir);
  save_event_store(at(c, artifact::kEvents), s);
  write_file(at(c, artifact::kDataset), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"start", "end", "start_date", "end_date", "events", "users"});
    csv.field(range.start).field(range.end).field(format_date(range.start));
    csv.field(format_date(range.end)).field(std::uint64_t{s.events.size()});
    csv.field(std::uint64_t{s.users.size()}).end_row();
  });
  const auto g = build_network(s.events, range);
  save_graph(at(c, artifact::kGraph), g);
  const auto logs = build_follower_logs(s.events);
  write_file(at(c, artifact::kFollowerLogs),
             [&](std::ostream& out) { write_follower_logs_csv(out, logs, s.users); });
  write_file(at(c, artifact::kFlagRates), [&](std::ostream& out) {
    write_flag_rates_csv(out, user_flag_rates(s.events), s.users);
  });
  write_file(at(c, artifact::kIngestErrors), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"line", "message"});
    for (const auto& issue : issues) csv.field(std::uint64_t{issue.line}).field(issue.message).end_row();
  });
  for (const char* name : {artifact::kEvents, artifact::kDataset, artifact::kGraph,
                           artifact::kFollowerLogs, artifact::kFlagRates, artifact::kIngestErrors}) {
    outputs.emplace_back(name);
  }
  write_manifest(c, stage, inputs, outputs);
  std::ostringstream line;
  line << stage << ": " << s.events.size() << " events, " << s.users.size() << " users, "
       << g.node_count() << " nodes, " << g.edge_count() << " edges, " << issues.size()
       << " rejected lines, range " << format_date(range.start) << " .. "
       << format_date(range.end);
  return line.str();
}

EventStream load_events(const PipelineConfig& c) {
  require(c, artifact::kEvents, kIngestStages);
  return load_event_store(at(c, artifact::kEvents));
}

WeightedDigraph load_stage_graph(const PipelineConfig& c, const char* name, const char* stage) {
  require(c, name, stage);
  return load_graph(at(c, name));
}

// ---------------------------------------------------------------- alignment io

AlignmentIndex read_alignment(const PipelineConfig& c, const UserTable& users) {
  require(c, artifact::kAlignment, "align");
  std::ifstream in(at(c, artifact::kAlignment));
  std::string line;
  std::getline(in, line);
  AlignmentIndex index;
  while (std::getline(in, line)) {
    const auto f = split_csv_line(line);
    if (f.size() < 2) throw std::runtime_error("malformed alignment row: " + line);
    if (f[1] == "unaligned") continue;
    const auto cls = parse_content_class(f[1]);
    const auto user = users.find(f[0]);
    if (!cls || !user) throw std::runtime_error("alignment row does not match events: " + line);
    index.emplace(*user, *cls);
  }
  return index;
}

using GrowthTable = std::map<std::pair<std::size_t, std::size_t>, std::optional<double>>;

GrowthTable read_growth(const PipelineConfig& c) {
  require(c, artifact::kGrowth, "growth");
  std::ifstream in(at(c, artifact::kGrowth));
  std::string line;
  std::getline(in, line);
  GrowthTable table;
  while (std::getline(in, line)) {
    const auto f = split_csv_line(line);
    if (f.size() < 6) throw std::runtime_error("malformed growth row: " + line);
    const auto cls = parse_content_class(f[4]);
    if (!cls) throw std::runtime_error("unknown class in growth row: " + line);
    std::optional<double> rate;
    if (!f[5].empty()) rate = std::stod(f[5]);
    table[{std::stoull(f[0]), index_of(*cls)}] = rate;
  }
  return table;
}

std::vector<TimeWindow> dataset_windows(const PipelineConfig& c, TimeRange range) {
  return sliding_windows(range, c.window_days * kSecondsPerDay, c.step_days * kSecondsPerDay,
                         c.partial_windows);
}

// ---------------------------------------------------------------- structure summary

void write_structure_summary(std::ostream& out, const PipelineConfig& c,
                             const std::vector<std::pair<std::string, const WeightedDigraph*>>& graphs) {
  CsvWriter csv(out);
  csv.header({"graph", "metric", "direction", "k_min", "k_max", "value"});
  const auto scalar = [&](const std::string& graph, const char* metric, auto value) {
    csv.field(graph).field(metric).empty().empty().empty().field(value).end_row();
  };
  for (const auto& [name, g] : graphs) {
    scalar(name, "nodes", std::uint64_t{g->node_count()});
    scalar(name, "edges", std::uint64_t{g->edge_count()});
    scalar(name, "total_weight", g->total_weight());
    if (g->empty()) continue;
    std::optional<std::pair<double, double>> tail;
    if (c.tail_lo && c.tail_hi) tail = std::make_pair(*c.tail_lo, *c.tail_hi);
    const auto topo = topology_report(*g, tail);
    scalar(name, "average_clustering", topo.average_clustering);
    const auto sccs = strongly_connected_components(*g);
    scalar(name, "scc_count", std::uint64_t{sccs.size()});
    scalar(name, "largest_scc", std::uint64_t{sccs.empty() ? 0 : sccs.front().size()});
    if (topo.weight_tail) {
      scalar(name, "weight_tail_beta", topo.weight_tail->beta);
      scalar(name, "weight_tail_points", std::uint64_t{topo.weight_tail->points});
    }
    const auto het = strong_disorder_test(*g, c.band);
    for (const auto& b : het.buckets) {
      const char* dir = b.direction == Direction::kIn ? "in" : "out";
      csv.field(name).field("bucket_nodes").field(dir).field(b.k_min).field(b.k_max);
      csv.field(std::uint64_t{b.nodes}).end_row();
      csv.field(name).field("flagged_fraction").field(dir).field(b.k_min).field(b.k_max);
      csv.field(b.flagged_fraction).end_row();
    }
  }
}

const char* role_name(std::size_t r) {
  switch (static_cast<NodeRole>(r)) {
    case NodeRole::kCreatorOnly: return "creator";
    case NodeRole::kConsumerOnly: return "consumer";
    case NodeRole::kBoth: return "both";
  }
  return "?";
}

std::vector<double> theta_grid() {
  std::vector<double> grid;
  for (int i = 50; i <= 99; ++i) grid.push_back(i / 100.0);
  return grid;
}

std::vector<double> alpha_grid(double configured) {
  std::vector<double> grid = {0.001, 0.005, 0.01, 0.02, 0.05, 0.1,  0.2,  0.3, 0.35, 0.36,
                              0.37,  0.38,  0.4,  0.5,  0.6,  0.7, 0.8, 0.9, 1.0};
  grid.push_back(configured);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

// ---------------------------------------------------------------- stages

std::string run_ingest(const PipelineConfig& c) {
  ensure_valid(c);
  if (c.input.empty()) throw ConfigError(std::vector<ConfigViolation>{{"input", "an event file is required"}});
  if (!fs::exists(c.input)) {
    throw MissingInputError("input file " + c.input.string() + " does not exist");
  }
  ParseOptions options;
  if (c.range_start && c.range_end) options.dataset_range = TimeRange{*c.range_start, *c.range_end};
  auto parsed = parse_events_file(c.input, options);
  const auto range = resolve_range(c, parsed.stream.events);
  return write_dataset(c, "ingest", parsed.stream, range, parsed.issues,
                       {{"input:" + c.input.filename().string(), c.input}}, {});
}

std::string run_synth(const PipelineConfig& c) {
  ensure_valid(c);
  auto synth = default_synth_config(c.synth_events);
  if (c.range_start) synth.range.start = *c.range_start;
  if (c.range_end) synth.range.end = *c.range_end;
  const auto stream = generate_synthetic(synth, c.seed);
  fs::create_directories(c.out_dir);
  std::vector<std::string> outputs;
  if (c.synth_jsonl) {
    write_file(at(c, artifact::kEventsJsonl), [&](std::ostream& out) { write_events_jsonl(out, stream); });
    outputs.emplace_back(artifact::kEventsJsonl);
  }
  return write_dataset(c, "synth", stream, synth.range, {}, {}, outputs);
}

std::string run_backbone(const PipelineConfig& c) {
  ensure_valid(c);
  const auto g = load_stage_graph(c, artifact::kGraph, kIngestStages);
  const auto events = load_events(c);
  const auto& users = events.users;
  const auto sig = edge_significance(g, c.threads);
  const auto bb = disparity_filter(g, sig, c.alpha);
  save_graph(at(c, artifact::kBackbone), bb);

  write_file(at(c, artifact::kSignificance), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"source", "sink", "weight", "p_out", "p_in", "alpha_out", "alpha_in", "alpha",
                "retained"});
    for (const auto& s : sig) {
      csv.field(users.name(s.source)).field(users.name(s.sink)).field(s.weight);
      csv.field(s.p_out).field(s.p_in).field(s.alpha_out).field(s.alpha_in).field(s.alpha);
      csv.field(static_cast<int>(c.alpha >= 1.0 || s.alpha < c.alpha)).end_row();
    }
  });
  const auto grid = alpha_grid(c.alpha);
  const auto curve = backbone_size_curve(g, grid, c.threads);
  write_file(at(c, artifact::kSizeCurve), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"alpha", "nodes", "edges", "weight", "node_fraction", "edge_fraction",
                "weight_fraction"});
    for (const auto& p : curve) {
      csv.field(p.alpha).field(std::uint64_t{p.nodes}).field(std::uint64_t{p.edges}).field(p.weight);
      csv.field(p.node_fraction).field(p.edge_fraction).field(p.weight_fraction).end_row();
    }
  });
  // How much of each global-threshold backbone survives the disparity filter.
  write_file(at(c, artifact::kOverlap), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"top_fraction", "w_min", "reference_edges", "overlap"});
    if (g.edge_count() == 0) return;
    for (double top : {0.001, 0.005, 0.01, 0.05, 0.1, 0.2}) {
      const auto w_min = top_weight_threshold(g, top);
      const auto ref = global_threshold_backbone(g, w_min);
      if (ref.edge_count() == 0) continue;
      csv.field(top).field(w_min).field(std::uint64_t{ref.edge_count()});
      csv.field(backbone_overlap(ref, bb)).end_row();
    }
  });
  write_manifest(c, "backbone", artifacts(c, {artifact::kGraph, artifact::kEvents}),
                 {artifact::kBackbone, artifact::kSignificance, artifact::kSizeCurve,
                  artifact::kOverlap});

  const auto frac = [](double a, double b) { return b > 0 ? a / b : 0.0; };
  std::ostringstream line;
  line << "backbone: alpha=" << format_double(c.alpha) << " kept " << bb.node_count() << " nodes ("
       << percent(frac(static_cast<double>(bb.node_count()), static_cast<double>(g.node_count())))
       << "), " << bb.edge_count() << " edges ("
       << percent(frac(static_cast<double>(bb.edge_count()), static_cast<double>(g.edge_count())))
       << "), weight "
       << percent(frac(static_cast<double>(bb.total_weight()), static_cast<double>(g.total_weight())));
  return line.str();
}

std::string run_diagnose(const PipelineConfig& c) {
  ensure_valid(c);
  const auto g = load_stage_graph(c, artifact::kGraph, kIngestStages);
  const auto bb = load_stage_graph(c, artifact::kBackbone, "backbone");
  const auto events = load_events(c);
  const std::vector<std::pair<std::string, const WeightedDigraph*>> graphs = {{"original", &g},
                                                                               {"backbone", &bb}};
  write_file(at(c, artifact::kDiagnostics),
             [&](std::ostream& out) { write_structure_summary(out, c, graphs); });
  write_file(at(c, artifact::kDegreeCcdf), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"graph", "direction", "degree", "fraction"});
    for (const auto& [name, graph] : graphs) {
      if (graph->empty()) continue;
      const auto topo = topology_report(*graph);
      for (const auto& p : topo.in_degree_ccdf) csv.field(name).field("in").field(p.value).field(p.fraction).end_row();
      for (const auto& p : topo.out_degree_ccdf) csv.field(name).field("out").field(p.value).field(p.fraction).end_row();
    }
  });
  write_file(at(c, artifact::kWeightCcdf), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"graph", "weight", "fraction"});
    for (const auto& [name, graph] : graphs) {
      if (graph->empty()) continue;
      for (const auto& p : topology_report(*graph).weight_ccdf) {
        csv.field(name).field(p.value).field(p.fraction).end_row();
      }
    }
  });
  const auto het = strong_disorder_test(g, c.band);
  std::size_t flagged = 0;
  write_file(at(c, artifact::kHeterogeneity), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"node", "direction", "degree", "upsilon", "null_mean", "null_sd", "flagged"});
    for (const auto& e : het.entries) {
      flagged += e.flagged;
      csv.field(events.users.name(e.node)).field(e.direction == Direction::kIn ? "in" : "out");
      csv.field(e.degree).field(e.upsilon).field(e.null_mean).field(e.null_sd);
      csv.field(static_cast<int>(e.flagged)).end_row();
    }
  });
  write_manifest(c, "diagnose",
                 artifacts(c, {artifact::kGraph, artifact::kBackbone, artifact::kEvents}),
                 {artifact::kDiagnostics, artifact::kDegreeCcdf, artifact::kWeightCcdf,
                  artifact::kHeterogeneity});
  std::ostringstream line;
  line << "diagnose: clustering=" << format_double(average_clustering(g)) << ", " << flagged
       << " of " << het.entries.size() << " node sides above the null band (a="
       << format_double(c.band) << ")";
  return line.str();
}

std::string run_align(const PipelineConfig& c) {
  ensure_valid(c);
  const auto events = load_events(c);
  std::optional<WeightedDigraph> bb;
  if (c.use_backbone) bb = load_stage_graph(c, artifact::kBackbone, "backbone");
  const auto graphs = build_class_graphs(events.events, bb ? &*bb : nullptr);
  const auto profiles = involvement_profiles(graphs);
  const auto index = align_users(profiles, c.theta, c.min_involvement);

  std::array<std::size_t, kNumClasses> counts{};
  write_file(at(c, artifact::kAlignment), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"user", "label", "theta", "factual", "misleading", "uncertain", "total"});
    for (const auto& p : profiles) {
      auto it = index.find(p.user);
      csv.field(events.users.name(p.user));
      if (it == index.end()) {
        csv.field("unaligned");
      } else {
        csv.field(to_string(it->second));
        ++counts[index_of(it->second)];
      }
      const auto prop = p.proportions();
      csv.field(c.theta).field(prop[0]).field(prop[1]).field(prop[2]).field(p.total()).end_row();
    }
  });
  write_file(at(c, artifact::kTernary), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"i", "j", "orientation", "count"});
    for (const auto& b : ternary_histogram(profiles, c.ternary_bins)) {
      csv.field(b.i).field(b.j).field(b.up ? "up" : "down").field(std::uint64_t{b.count}).end_row();
    }
  });
  const auto grid = theta_grid();
  write_file(at(c, artifact::kCoverage), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"class", "theta", "coverage"});
    for (auto cls : kAllClasses) {
      const auto& cg = graphs[index_of(cls)];
      if (cg.total_weight() == 0) continue;
      const auto curve = coverage_curve(cg, profiles, cls, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.field(to_string(cls)).field(grid[i]).field(curve[i]).end_row();
      }
    }
  });
  write_manifest(c, "align",
                 c.use_backbone ? artifacts(c, {artifact::kEvents, artifact::kBackbone})
                                : artifacts(c, {artifact::kEvents}),
                 {artifact::kAlignment, artifact::kTernary, artifact::kCoverage});
  std::ostringstream line;
  line << "align: theta=" << format_double(c.theta) << " on the "
       << (c.use_backbone ? "backbone" : "full network") << ", aligned factual=" << counts[0]
       << " misleading=" << counts[1] << " uncertain=" << counts[2] << " of " << profiles.size()
       << " users";
  return line.str();
}

std::string run_growth(const PipelineConfig& c) {
  ensure_valid(c);
  const auto events = load_events(c);
  const auto range = read_dataset_range(c);
  const auto index = read_alignment(c, events.users);
  const auto logs = build_follower_logs(events.events);
  const auto windows = dataset_windows(c, range);

  std::array<std::vector<UserId>, kNumClasses> aligned;
  for (auto cls : kAllClasses) aligned[index_of(cls)] = aligned_to(index, cls);
  std::vector<GrowthPoint> points(windows.size() * kNumClasses);
  parallel_for(points.size(), c.threads, [&](std::size_t i) {
    const std::size_t w = i / kNumClasses;
    const std::size_t k = i % kNumClasses;
    points[i] = window_growth_rate(logs, aligned[k], windows[w], kAllClasses[k], c.min_obs);
  });

  std::vector<std::optional<double>> trend(points.size());
  std::size_t defined = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    std::vector<double> xs, ys;
    std::vector<std::size_t> at_point;
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const auto& p = points[w * kNumClasses + k];
      if (!p.rate) continue;
      xs.push_back(static_cast<double>(w));
      ys.push_back(*p.rate);
      at_point.push_back(w * kNumClasses + k);
    }
    defined += xs.size();
    if (xs.empty()) continue;
    const auto t = trend_line(xs, ys);
    for (std::size_t i = 0; i < at_point.size(); ++i) trend[at_point[i]] = t.values[i];
  }
  write_file(at(c, artifact::kGrowth), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"window", "window_start", "window_end", "partial", "class", "rate", "n_active",
                "f_first", "f_last", "trend"});
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      csv.field(std::uint64_t{i / kNumClasses}).field(format_date(p.window.start));
      csv.field(format_date(p.window.end)).field(static_cast<int>(p.window.partial));
      csv.field(to_string(p.content_class));
      if (p.rate) csv.field(*p.rate); else csv.empty();
      csv.field(std::uint64_t{p.n_active}).field(p.f_first).field(p.f_last);
      if (trend[i]) csv.field(*trend[i]); else csv.empty();
      csv.end_row();
    }
  });

  write_file(at(c, artifact::kDailyCounts), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"date", "class", "count", "trend"});
    for (auto cls : kAllClasses) {
      const auto series = daily_counts(events.events, cls, index, range);
      std::vector<double> xs(series.counts.size()), ys(series.counts.size());
      for (std::size_t d = 0; d < xs.size(); ++d) {
        xs[d] = static_cast<double>(d);
        ys[d] = static_cast<double>(series.counts[d]);
      }
      const auto t = trend_line(xs, ys);
      for (std::size_t d = 0; d < xs.size(); ++d) {
        csv.field(format_date((series.first_day + static_cast<std::int64_t>(d)) * kSecondsPerDay));
        csv.field(to_string(cls)).field(series.counts[d]).field(t.values[d]).end_row();
      }
    }
  });
  write_manifest(c, "growth", artifacts(c, {artifact::kEvents, artifact::kDataset, artifact::kAlignment}),
                 {artifact::kGrowth, artifact::kDailyCounts});
  std::ostringstream line;
  line << "growth: " << windows.size() << " windows x 3 classes, " << defined
       << " defined growth points";
  return line.str();
}

FitInputs load_fit_inputs(const PipelineConfig& c) {
  const auto stream = load_events(c);
  const auto range = read_dataset_range(c);
  const auto index = read_alignment(c, stream.users);
  const auto growth = read_growth(c);
  const auto logs = build_follower_logs(stream.events);
  std::vector<RetweetEvent> events;
  if (c.use_backbone) {
    const auto bb = load_stage_graph(c, artifact::kBackbone, "backbone");
    for (const auto& e : stream.events) {
      if (bb.find_edge(e.retweetee, e.retweeter)) events.push_back(e);
    }
  } else {
    events = stream.events;
  }

  FitInputs inputs;
  const auto windows = dataset_windows(c, range);
  const Timestamp lookback = c.fit.lookback_months * kWindowLength;
  std::vector<std::size_t> keys;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    if (windows[w].start - lookback < range.start) {
      inputs.skipped.push_back({static_cast<std::uint32_t>(w), windows[w],
                                "lookback reaches before the dataset start"});
      continue;
    }
    keys.push_back(w);
  }
  inputs.windows.resize(keys.size());
  parallel_for(keys.size() * kNumClasses, c.threads, [&](std::size_t task) {
    const std::size_t i = task / kNumClasses;
    const std::size_t k = task % kNumClasses;
    const auto key = static_cast<std::uint32_t>(keys[i]);
    inputs.windows[i].setups[k] = build_cascade_setup(events, logs, index, windows[keys[i]],
                                                      c.fit.lookback_months, kAllClasses[k], key);
  });
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto& wi = inputs.windows[i];
    wi.key = static_cast<std::uint32_t>(keys[i]);
    wi.window = windows[keys[i]];
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      auto it = growth.find({keys[i], k});
      if (it != growth.end()) wi.empirical[k] = it->second;
    }
  }
  return inputs;
}

namespace {

void write_setups(std::ostream& out, const FitInputs& inputs) {
  CsvWriter csv(out);
  csv.header({"window", "window_start", "class", "aligned", "swayable", "s0", "i0",
              "aligned_followers", "swayable_followers", "fallback_snapshots", "empirical_rate",
              "excluded_reason"});
  for (const auto& w : inputs.windows) {
    const auto reason = exclusion_reason(w);
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      const auto& s = w.setups[k];
      csv.field(w.key).field(format_date(w.window.start)).field(to_string(kAllClasses[k]));
      csv.field(std::uint64_t{s.aligned.size()}).field(std::uint64_t{s.swayable.size()});
      if (s.population() > 0) {
        const auto init = initial_state(s);
        csv.field(init.s0).field(init.i0);
      } else {
        csv.empty().empty();
      }
      csv.field(s.aligned_follower_total()).field(s.swayable_follower_total());
      csv.field(std::uint64_t{s.fallback_snapshots});
      if (w.empirical[k]) csv.field(*w.empirical[k]); else csv.empty();
      csv.field(reason).end_row();
    }
  }
}

}  // namespace

std::string run_simulate(const PipelineConfig& c) {
  ensure_valid(c);
  const auto inputs = load_fit_inputs(c);
  write_file(at(c, artifact::kSetups), [&](std::ostream& out) { write_setups(out, inputs); });

  struct Row {
    double r_inf = 0.0;
    std::uint64_t recovered = 0;
    double mean = 0.0;
    double sd = 0.0;
    bool ok = false;
  };
  const std::size_t runs = c.fit.runs_per_point;
  std::vector<Row> rows(inputs.windows.size() * kNumClasses);
  parallel_for(rows.size(), c.threads, [&](std::size_t task) {
    const auto& w = inputs.windows[task / kNumClasses];
    const std::size_t k = task % kNumClasses;
    const auto& s = w.setups[k];
    if (!s.simulable()) return;
    Row row;
    const auto init = initial_state(s);
    row.r_inf = final_size(init.s0, c.sim_r0);
    row.recovered = swayable_recovered_count(s.population(), row.r_inf, init.i0, s.swayable.size());
    std::vector<double> rates(runs);
    for (std::size_t r = 0; r < runs; ++r) {
      auto rng = draw_stream(c.seed, w.key, k, 0, r);
      rates[r] = simulate_growth_rate(s, c.sim_r0, c.sim_delta, rng);
    }
    for (double v : rates) row.mean += v;
    row.mean /= static_cast<double>(runs);
    if (runs > 1) {
      double ss = 0.0;
      for (double v : rates) ss += (v - row.mean) * (v - row.mean);
      row.sd = std::sqrt(ss / static_cast<double>(runs - 1));
    }
    row.ok = true;
    rows[task] = row;
  });

  std::size_t simulated = 0;
  write_file(at(c, artifact::kSimulate), [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"window", "window_start", "class", "r0", "delta", "r_inf", "recovered_swayable",
                "runs", "rate_mean", "rate_sd", "empirical_rate"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& w = inputs.windows[i / kNumClasses];
      const std::size_t k = i % kNumClasses;
      csv.field(w.key).field(format_date(w.window.start)).field(to_string(kAllClasses[k]));
      csv.field(c.sim_r0).field(c.sim_delta);
      if (rows[i].ok) {
        ++simulated;
        csv.field(rows[i].r_inf).field(rows[i].recovered).field(std::uint64_t{runs});
        csv.field(rows[i].mean).field(rows[i].sd);
      } else {
        csv.empty().empty().empty().empty().empty();
      }
      if (w.empirical[k]) csv.field(*w.empirical[k]); else csv.empty();
      csv.end_row();
    }
  });
  write_manifest(c, "simulate",
                 artifacts(c, {artifact::kEvents, artifact::kDataset, artifact::kAlignment,
                               artifact::kGrowth, artifact::kBackbone}),
                 {artifact::kSetups, artifact::kSimulate});
  std::ostringstream line;
  line << "simulate: R0=" << format_double(c.sim_r0) << " delta=" << format_double(c.sim_delta)
       << ", " << simulated << " (window, class) pairs simulated, " << inputs.skipped.size()
       << " windows skipped for lookback";
  return line.str();
}

namespace {

void write_fig4(std::ostream& out, const FitResult& r) {
  CsvWriter csv(out);
  csv.header({"window", "window_start", "window_end", "class", "empirical_rate",
              "simulated_mean", "simulated_sd", "r0_mean", "r0_sd", "delta"});
  for (const auto& w : r.windows) {
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      csv.field(w.key).field(format_date(w.window.start)).field(format_date(w.window.end));
      csv.field(to_string(kAllClasses[k])).field(w.classes[k].empirical);
      csv.field(w.classes[k].simulated_mean).field(w.classes[k].simulated_sd);
      csv.field(w.r0_mean).field(w.r0_sd).field(r.delta).end_row();
    }
  }
}

}  // namespace

std::string run_fit(const PipelineConfig& c) {
  ensure_valid(c);
  const auto inputs = load_fit_inputs(c);
  write_file(at(c, artifact::kSetups), [&](std::ostream& out) { write_setups(out, inputs); });
  auto cfg = c.fit;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  bool any_simulable = false;
  for (const auto& w : inputs.windows) any_simulable |= exclusion_reason(w).empty();
  if (!any_simulable) {
    throw std::runtime_error("no simulable window: every window lacks aligned users reaching "
                             "swayable users, follower data or an empirical rate (see " +
                             std::string(artifact::kSetups) + ")");
  }
  auto result = fit_parameters(inputs.windows, cfg);
  result.excluded.insert(result.excluded.end(), inputs.skipped.begin(), inputs.skipped.end());
  std::sort(result.excluded.begin(), result.excluded.end(),
            [](const ExcludedWindow& a, const ExcludedWindow& b) { return a.key < b.key; });
  write_file(at(c, artifact::kFitJson), [&](std::ostream& out) { write_fit_json(out, result); });
  write_file(at(c, artifact::kFitWindows), [&](std::ostream& out) { write_fig4(out, result); });
  write_manifest(c, "fit",
                 artifacts(c, {artifact::kEvents, artifact::kDataset, artifact::kAlignment,
                               artifact::kGrowth, artifact::kBackbone}),
                 {artifact::kSetups, artifact::kFitJson, artifact::kFitWindows});
  std::ostringstream line;
  line << "fit: delta=" << format_double(result.delta) << " objective="
       << format_double(result.objective) << " over " << result.windows.size() << " windows ("
       << result.excluded.size() << " excluded), " << result.evaluations << " evaluations";
  return line.str();
}

std::string run_report(const PipelineConfig& c) {
  ensure_valid(c);
  for (const auto& [name, stage] :
       std::vector<std::pair<const char*, const char*>>{{artifact::kGraph, kIngestStages},
                                                        {artifact::kEvents, kIngestStages},
                                                        {artifact::kDataset, kIngestStages},
                                                        {artifact::kBackbone, "backbone"},
                                                        {artifact::kTernary, "align"},
                                                        {artifact::kCoverage, "align"},
                                                        {artifact::kGrowth, "growth"},
                                                        {artifact::kDailyCounts, "growth"}}) {
    require(c, name, stage);
  }
  const auto g = load_graph(at(c, artifact::kGraph));
  const auto bb = load_graph(at(c, artifact::kBackbone));
  const auto events = load_events(c);
  const auto range = read_dataset_range(c);
  const fs::path dir = at(c, artifact::kReportDir);
  fs::create_directories(dir);
  const auto& files = report_files();
  std::size_t written = 0;
  const auto emit = [&](std::size_t i, auto&& fn) {
    write_file(dir / files[i], fn);
    ++written;
  };

  emit(0, [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"graph", "from_role", "to_role", "weight_fraction", "from_role_nodes"});
    for (const auto& [name, graph] :
         std::vector<std::pair<const char*, const WeightedDigraph*>>{{"original", &g}, {"backbone", &bb}}) {
      const auto part = creator_consumer_partition(*graph);
      const std::array<std::size_t, 3> sizes{part.creators_only.size(), part.consumers_only.size(),
                                             part.both.size()};
      for (std::size_t from = 0; from < 3; ++from) {
        for (std::size_t to = 0; to < 3; ++to) {
          csv.field(name).field(role_name(from)).field(role_name(to));
          csv.field(part.cross_fraction[from][to]).field(std::uint64_t{sizes[from]}).end_row();
        }
      }
    }
  });

  emit(1, [&](std::ostream& out) {
    const auto original = build_class_graphs(events.events);
    const auto filtered = build_class_graphs(events.events, &bb);
    CsvWriter csv(out);
    csv.header({"class", "original_weight", "backbone_weight", "retention"});
    for (auto cls : kAllClasses) {
      const auto ow = original[index_of(cls)].total_weight();
      const auto fw = filtered[index_of(cls)].total_weight();
      csv.field(to_string(cls)).field(ow).field(fw);
      if (ow > 0) csv.field(static_cast<double>(fw) / static_cast<double>(ow)); else csv.empty();
      csv.end_row();
    }
  });

  emit(2, [&](std::ostream& out) {
    const auto first_day = day_of(range.start);
    const auto days = static_cast<std::size_t>(day_of(range.end - 1) - first_day + 1);
    std::vector<std::array<std::uint64_t, 2 * kNumClasses>> counts(days);
    for (const auto& e : events.events) {
      if (!range.contains(e.timestamp)) continue;
      auto& row = counts[static_cast<std::size_t>(day_of(e.timestamp) - first_day)];
      const std::size_t k = index_of(e.content_class);
      ++row[k];
      if (bb.find_edge(e.retweetee, e.retweeter)) ++row[kNumClasses + k];
    }
    CsvWriter csv(out);
    csv.header({"date", "class", "original_count", "backbone_count"});
    for (std::size_t d = 0; d < days; ++d) {
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        csv.field(format_date((first_day + static_cast<std::int64_t>(d)) * kSecondsPerDay));
        csv.field(to_string(kAllClasses[k])).field(counts[d][k]).field(counts[d][kNumClasses + k]);
        csv.end_row();
      }
    }
  });

  const auto copy = [&](std::size_t i, const char* source) {
    fs::copy_file(at(c, source), dir / files[i], fs::copy_options::overwrite_existing);
    ++written;
  };
  copy(3, artifact::kTernary);
  copy(4, artifact::kCoverage);
  copy(5, artifact::kDailyCounts);
  copy(6, artifact::kGrowth);

  const fs::path fig4 = dir / files[7];
  if (fs::exists(at(c, artifact::kFitWindows))) {
    fs::copy_file(at(c, artifact::kFitWindows), fig4, fs::copy_options::overwrite_existing);
    ++written;
  } else {
    fs::remove(fig4);
  }

  emit(8, [&](std::ostream& out) {
    write_structure_summary(out, c, {{"original", &g}, {"backbone", &bb}});
  });

  write_manifest(c, "report",
                 artifacts(c, {artifact::kGraph, artifact::kBackbone, artifact::kEvents,
                               artifact::kDataset, artifact::kTernary, artifact::kCoverage,
                               artifact::kGrowth, artifact::kDailyCounts, artifact::kFitWindows}),
                 [&] {
                   std::vector<std::string> out;
                   for (const auto& f : files) {
                     if (fs::exists(dir / f)) out.push_back(std::string(artifact::kReportDir) + "/" + f);
                   }
                   return out;
                 }());
  std::ostringstream line;
  line << "report: " << written << " files in " << dir.string();
  if (!fs::exists(fig4)) line << " (no fit results; " << files[7] << " omitted)";
  return line.str();
}

std::string run_stage(const std::string& stage, const PipelineConfig& config) {
  if (stage == "ingest") return run_ingest(config);
  if (stage == "synth") return run_synth(config);
  if (stage == "backbone") return run_backbone(config);
  if (stage == "diagnose") return run_diagnose(config);
  if (stage == "align") return run_align(config);
  if (stage == "growth") return run_growth(config);
  if (stage == "simulate") return run_simulate(config);
  if (stage == "fit") return run_fit(config);
  if (stage == "report") return run_report(config);
  throw std::invalid_argument("unknown subcommand '" + stage + "'");
}

}  // namespace rtnet
