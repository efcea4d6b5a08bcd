#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "socmine/analysis.hpp"
#include "socmine/discovery.hpp"
#include "socmine/event_log.hpp"
#include "socmine/petri_net.hpp"
#include "socmine/stochastic.hpp"

namespace socmine {

constexpr std::uint64_t default_seed = 42;

struct PipelineConfig {
  std::vector<std::string> inputs;
  LogSchema schema;
  std::size_t max_events = 10;
  std::optional<std::size_t> max_traces; // all traces when unset
  double noise_threshold = default_noise_threshold;
  bool split_bots = false;
  double bot_high = 0.9;
  double bot_low = 0.1;
  std::size_t state_cap = default_state_cap;
  double log_base = 0.0; // natural log
  std::uint64_t seed = default_seed;
  std::string out_dir = ".";
  /// Analyze against this net instead of discovering one.
  std::optional<std::string> net_path;

  void validate() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json &doc);
};

/// One metrics row plus the parameters that produced it.
struct MetricsReport {
  std::string log_name;
  std::size_t node_count = 0;
  double density = 0;
  std::size_t diameter = 0;
  double mean_wait_seconds = 0;
  double ks_entropy = 0;
  nlohmann::json provenance;

  nlohmann::json to_json() const;
  static MetricsReport from_json(const nlohmann::json &doc);
  static std::string csv_header();
  std::string csv_row() const;
};

/// Everything computed for one log.
struct LogAnalysis {
  MetricsReport report;
  std::optional<ProcessTree> tree;
  PetriNet net;         // analysis net
  PetriNet report_net;  // silent-reduced net behind the structural measures
  StochasticPetriNet fspn;
  std::vector<ReplayResult> replays;
  WaitingTimeStats waits;
  MarkovChain chain;
  std::vector<std::string> trace_ids;
};

class PipelineError : public std::runtime_error {
public:
  PipelineError(std::string stage, const std::string &what)
      : std::runtime_error(stage + ": " + what), stage(std::move(stage)) {}
  std::string stage;
};

/// Runs discovery (unless `net` is given), enrichment and all measures on a
/// log that has already been preprocessed.
LogAnalysis analyze_log(const EventLog &log, const std::string &name, const PipelineConfig &config,
                        const std::optional<PetriNet> &net = std::nullopt);

/// Output file name -> contents for one analysis: report.json, report.csv,
/// net.json, fspn.json, model.dot, conformance.json, waits.csv, tree.txt.
std::map<std::string, std::string> render_artifacts(const LogAnalysis &analysis);

/// Parses, preprocesses, optionally splits by bot score, analyzes and writes
/// artifacts. A single resulting log writes into out_dir; several write into
/// out_dir/<name>/. Nothing is written unless every log is
/// analyzed; a failed write removes the files already written.
std::vector<MetricsReport> run_pipeline(const PipelineConfig &config);

/// Per-activity mean waits as written to waits.csv.
std::vector<double> read_mean_waits(const std::filesystem::path &waits_csv);

nlohmann::json compare(const MetricsReport &a, const std::vector<double> &waits_a, const MetricsReport &b,
                       const std::vector<double> &waits_b);

/// compare() on two pipeline output directories.
nlohmann::json compare_runs(const std::filesystem::path &dir_a, const std::filesystem::path &dir_b);

/// Graphviz text; silent transitions are drawn as filled black boxes.
std::string export_dot(const PetriNet &net);
/// Place->transition arcs carry their probabilities. With `reduce`, the
/// silent-reduced net is drawn.
std::string export_dot(const StochasticPetriNet &fspn, bool reduce = false);

std::string read_file(const std::filesystem::path &path);

} // namespace socmine
