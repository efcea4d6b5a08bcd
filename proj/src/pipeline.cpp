#include "socmine/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace socmine {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string shortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

template <typename F> auto stage(const char *name, F &&f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError &) {
    throw;
  } catch (const std::exception &e) {
    throw PipelineError(name, e.what());
  }
}

json schema_to_json(const LogSchema &schema) {
  json doc{{"trace", schema.trace_column},
           {"activity", schema.activity_column},
           {"timestamp", schema.timestamp_column},
           {"delimiter", std::string(1, schema.delimiter)},
           {"format", schema.timestamp_format == TimestampFormat::iso8601 ? "iso8601" : "epoch"}};
  if (schema.bot_score_column)
    doc["bot_score"] = *schema.bot_score_column;
  return doc;
}

LogSchema schema_from_json(const json &doc) {
  if (doc.is_string())
    return LogSchema::parse(doc.get<std::string>());
  LogSchema schema;
  schema.trace_column = doc.value("trace", schema.trace_column);
  schema.activity_column = doc.value("activity", schema.activity_column);
  schema.timestamp_column = doc.value("timestamp", schema.timestamp_column);
  if (doc.contains("bot_score") && !doc.at("bot_score").is_null())
    schema.bot_score_column = doc.at("bot_score").get<std::string>();
  const auto delimiter = doc.value("delimiter", std::string(","));
  schema.delimiter = delimiter == "\\t" || delimiter == "tab" ? '\t' : delimiter.empty() ? ',' : delimiter[0];
  const auto format = doc.value("format", std::string("iso8601"));
  schema.timestamp_format = format == "epoch" || format == "epoch_seconds" ? TimestampFormat::epoch_seconds
                                                                            : TimestampFormat::iso8601;
  return schema;
}

} // namespace

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Config and report

void PipelineConfig::validate() const {
  if (max_events < 1)
    throw std::invalid_argument("max_events must be at least 1");
  if (max_traces && *max_traces < 1)
    throw std::invalid_argument("max_traces must be at least 1");
  for (const double v : {noise_threshold, bot_high, bot_low})
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("thresholds must lie in [0,1]");
  if (split_bots && !(bot_high > bot_low))
    throw std::invalid_argument("bot_high must exceed bot_low");
  if (state_cap < 1)
    throw std::invalid_argument("state_cap must be positive");
  if (log_base < 0.0 || log_base == 1.0)
    throw std::invalid_argument("log_base must be 0 (natural) or a positive base other than 1");
}

json PipelineConfig::to_json() const {
  json doc{{"inputs", inputs},
           {"schema", schema_to_json(schema)},
           {"max_events", max_events},
           {"max_traces", max_traces ? json(*max_traces) : json(nullptr)},
           {"noise_threshold", noise_threshold},
           {"split_bots", split_bots},
           {"bot_high", bot_high},
           {"bot_low", bot_low},
           {"state_cap", state_cap},
           {"log_base", log_base},
           {"seed", seed},
           {"out", out_dir}};
  if (net_path)
    doc["net"] = *net_path;
  return doc;
}

PipelineConfig PipelineConfig::from_json(const json &doc) {
  PipelineConfig c;
  if (doc.contains("inputs")) {
    if (doc.at("inputs").is_string())
      c.inputs = {doc.at("inputs").get<std::string>()};
    else
      c.inputs = doc.at("inputs").get<std::vector<std::string>>();
  }
  if (doc.contains("schema"))
    c.schema = schema_from_json(doc.at("schema"));
  c.max_events = doc.value("max_events", c.max_events);
  if (doc.contains("max_traces") && !doc.at("max_traces").is_null())
    c.max_traces = doc.at("max_traces").get<std::size_t>();
  c.noise_threshold = doc.value("noise_threshold", c.noise_threshold);
  c.split_bots = doc.value("split_bots", c.split_bots);
  c.bot_high = doc.value("bot_high", c.bot_high);
  c.bot_low = doc.value("bot_low", c.bot_low);
  c.state_cap = doc.value("state_cap", c.state_cap);
  c.log_base = doc.value("log_base", c.log_base);
  c.seed = doc.value("seed", c.seed);
  c.out_dir = doc.value("out", c.out_dir);
  if (doc.contains("net") && !doc.at("net").is_null())
    c.net_path = doc.at("net").get<std::string>();
  return c;
}

json MetricsReport::to_json() const {
  return {{"log", log_name},
          {"nodes", node_count},
          {"density", density},
          {"diameter", diameter},
          {"mean_wait_seconds", mean_wait_seconds},
          {"ks_entropy", ks_entropy},
          {"provenance", provenance}};
}

MetricsReport MetricsReport::from_json(const json &doc) {
  MetricsReport r;
  r.log_name = doc.at("log").get<std::string>();
  r.node_count = doc.at("nodes").get<std::size_t>();
  r.density = doc.at("density").get<double>();
  r.diameter = doc.at("diameter").get<std::size_t>();
  r.mean_wait_seconds = doc.at("mean_wait_seconds").get<double>();
  r.ks_entropy = doc.at("ks_entropy").get<double>();
  r.provenance = doc.value("provenance", json::object());
  return r;
}

std::string MetricsReport::csv_header() { return "log,nodes,density,diameter,mean_wait_seconds,ks_entropy\n"; }

std::string MetricsReport::csv_row() const {
  std::string name = log_name;
  if (name.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : name)
      quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    name = quoted + "\"";
  }
  return name + "," + std::to_string(node_count) + "," + shortest(density) + "," + std::to_string(diameter) + "," +
         shortest(mean_wait_seconds) + "," + shortest(ks_entropy) + "\n";
}

// ---------------------------------------------------------------------------
// Analysis

LogAnalysis analyze_log(const EventLog &log, const std::string &name, const PipelineConfig &config,
                        const std::optional<PetriNet> &net) {
  LogAnalysis a;
  for (const auto &trace : log.traces)
    a.trace_ids.push_back(trace.trace_id);
  if (net) {
    a.net = *net;
  } else {
    a.tree = stage("discover", [&] { return discover_tree(log, config.noise_threshold); });
    a.net = stage("discover", [&] { return tree_to_net(*a.tree); });
  }
  a.replays = stage("replay", [&] { return replay_log(a.net, log); });
  a.fspn = stage("enrich", [&] { return enrich(a.net, a.replays); });
  a.waits = stage("waiting-times", [&] { return waiting_time_stats(a.net, a.replays); });
  a.report_net = stage("structure", [&] { return reduce_silent(a.net); });

  auto &r = a.report;
  r.log_name = name;
  stage("structure", [&] {
    r.node_count = a.report_net.node_count();
    r.density = density(a.report_net);
    r.diameter = diameter(a.report_net);
    return 0;
  });
  r.mean_wait_seconds = a.waits.mean_of_means;

  const auto rg = stage("reachability", [&] { return reachability_graph(a.net, config.state_cap); });
  a.chain = stage("markov-chain", [&] { return build_markov_chain(rg, a.replays); });
  stage("entropy", [&] {
    a.chain.stationary = stationary_distribution(a.chain);
    r.ks_entropy = ks_entropy(a.chain, config.log_base);
    return 0;
  });

  std::size_t conforming = 0, completed = 0;
  for (const auto &replay : a.replays) {
    conforming += replay.conforming ? 1 : 0;
    completed += replay.conforming && replay.completed ? 1 : 0;
  }
  std::size_t unfired = 0;
  for (std::size_t t = 0; t < a.net.transition_count(); ++t) {
    const auto tid = static_cast<TransitionId>(t);
    if (!a.net.transition(tid).silent() && !a.fspn.delays.count(tid))
      ++unfired;
  }
  r.provenance = {{"traces", log.traces.size()},
                  {"events", log.event_count()},
                  {"activities", log.activities().size()},
                  {"noise_threshold", config.noise_threshold},
                  {"max_events", config.max_events},
                  {"max_traces", config.max_traces ? json(*config.max_traces) : json(nullptr)},
                  {"state_cap", config.state_cap},
                  {"log_base", config.log_base == 0.0 ? json("e") : json(config.log_base)},
                  {"seed", config.seed},
                  {"net_source", net ? "given" : "discovered"},
                  {"conforming_traces", conforming},
                  {"nonconforming_traces", log.traces.size() - conforming},
                  {"completed_traces", completed},
                  {"unfired_visible_transitions", unfired},
                  {"analysis_net",
                   {{"places", a.net.place_count()},
                    {"transitions", a.net.transition_count()},
                    {"arcs", a.net.arc_count()}}},
                  {"reachability_states", rg.states.size()},
                  {"markov_chain", {{"states", a.chain.size()}, {"closure_edges", a.chain.closure_edges}}}};
  if (config.split_bots) {
    r.provenance["bot_high"] = config.bot_high;
    r.provenance["bot_low"] = config.bot_low;
  }
  return a;
}

std::map<std::string, std::string> render_artifacts(const LogAnalysis &a) {
  std::map<std::string, std::string> files;
  files["report.json"] = a.report.to_json().dump(2) + "\n";
  files["report.csv"] = MetricsReport::csv_header() + a.report.csv_row();
  files["net.json"] = net_to_json(a.net).dump(2) + "\n";
  files["fspn.json"] = fspn_to_json(a.fspn).dump(2) + "\n";
  files["model.dot"] = export_dot(a.fspn, true);
  if (a.tree)
    files["tree.txt"] = a.tree->to_string() + "\n";

  json nonconforming = json::array();
  std::size_t conforming = 0, completed = 0;
  for (std::size_t i = 0; i < a.replays.size(); ++i) {
    const auto &replay = a.replays[i];
    if (replay.conforming) {
      ++conforming;
      completed += replay.completed ? 1 : 0;
    } else {
      nonconforming.push_back({{"trace", a.trace_ids.at(i)}, {"failed_at", replay.failed_at.value_or(0)}});
    }
  }
  files["conformance.json"] = json{{"traces", a.replays.size()},
                                   {"conforming", conforming},
                                   {"completed", completed},
                                   {"nonconforming", nonconforming}}
                                  .dump(2) +
                              "\n";

  std::string waits = "activity,count,mean_seconds,median_seconds\n";
  for (const auto &[activity, w] : a.waits.per_activity) {
    std::string name = activity;
    if (name.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : name)
        quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      name = quoted + "\"";
    }
    waits += name + "," + std::to_string(w.count) + "," + shortest(w.mean) + "," + shortest(w.median) + "\n";
  }
  files["waits.csv"] = waits;
  return files;
}

std::vector<MetricsReport> run_pipeline(const PipelineConfig &config) {
  stage("config", [&] {
    config.validate();
    if (config.inputs.empty())
      throw std::invalid_argument("no input logs given");
    return 0;
  });

  std::optional<PetriNet> given_net;
  if (config.net_path)
    given_net = stage("load-net", [&] { return net_from_json(json::parse(read_file(*config.net_path))); });

  std::vector<std::pair<std::string, EventLog>> logs;
  std::set<std::string> names;
  for (const auto &input : config.inputs) {
    const auto parsed = stage("parse", [&] {
      std::ifstream in(input, std::ios::binary);
      if (!in)
        throw std::runtime_error("cannot open input '" + input + "'");
      return parse_log(in, config.schema);
    });
    auto log = stage("preprocess", [&] {
      return preprocess(parsed.log, config.max_events, config.max_traces.value_or(SIZE_MAX));
    });
    std::string stem = fs::path(input).stem().string();
    if (stem.empty())
      stem = "log";
    for (std::size_t k = 2; names.count(stem); ++k)
      stem = fs::path(input).stem().string() + "_" + std::to_string(k);
    names.insert(stem);
    if (config.split_bots) {
      auto [high, low] = stage("split", [&] { return split_by_bot_score(log, config.bot_high, config.bot_low); });
      logs.emplace_back(stem + "_high", std::move(high));
      logs.emplace_back(stem + "_low", std::move(low));
    } else {
      logs.emplace_back(stem, std::move(log));
    }
  }

  // analyze everything before writing so a failing stage leaves no output
  std::vector<std::pair<fs::path, std::map<std::string, std::string>>> outputs;
  std::vector<MetricsReport> reports;
  for (const auto &[name, log] : logs) {
    const auto analysis = analyze_log(log, name, config, given_net);
    const fs::path dir = logs.size() == 1 ? fs::path(config.out_dir) : fs::path(config.out_dir) / name;
    outputs.emplace_back(dir, render_artifacts(analysis));
    reports.push_back(analysis.report);
  }

  std::vector<fs::path> written;
  try {
    for (const auto &[dir, files] : outputs) {
      fs::create_directories(dir);
      for (const auto &[file, content] : files) {
        const auto path = dir / file;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        written.push_back(path);
        if (!(out << content) || !out.flush())
          throw std::runtime_error("cannot write '" + path.string() + "'");
      }
    }
  } catch (const std::exception &e) {
    std::error_code ec;
    for (const auto &path : written)
      fs::remove(path, ec);
    throw PipelineError("write", e.what());
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Comparison

std::vector<double> read_mean_waits(const fs::path &waits_csv) {
  std::istringstream in(read_file(waits_csv));
  LogSchema schema;
  std::string line;
  std::vector<double> out;
  if (!std::getline(in, line))
    return out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    // activity may be quoted; the numeric columns are the last three
    const auto last = line.rfind(',');
    const auto mid = last == std::string::npos ? last : line.rfind(',', last - 1);
    if (mid == std::string::npos)
      throw std::runtime_error(waits_csv.string() + ":" + std::to_string(line_no) + ": malformed row");
    const auto field = line.substr(mid + 1, last - mid - 1);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
      throw std::runtime_error(waits_csv.string() + ":" + std::to_string(line_no) + ": bad mean '" + field + "'");
    out.push_back(value);
  }
  return out;
}

json compare(const MetricsReport &a, const std::vector<double> &waits_a, const MetricsReport &b,
             const std::vector<double> &waits_b) {
  if (waits_a.empty() || waits_b.empty())
    throw std::invalid_argument("compare: both runs need waiting-time samples");
  const auto ks = ks_two_sample(waits_a, waits_b);
  auto row = [](const MetricsReport &r) {
    return json{{"log", r.log_name},
                {"nodes", r.node_count},
                {"density", r.density},
                {"diameter", r.diameter},
                {"mean_wait_seconds", r.mean_wait_seconds},
                {"ks_entropy", r.ks_entropy}};
  };
  return {{"a", row(a)},
          {"b", row(b)},
          {"density_ratio", b.density > 0 ? json(a.density / b.density) : json(nullptr)},
          {"diameter_difference", static_cast<long long>(a.diameter) - static_cast<long long>(b.diameter)},
          {"entropy_difference", a.ks_entropy - b.ks_entropy},
          {"mean_wait_ratio", b.mean_wait_seconds > 0 ? json(a.mean_wait_seconds / b.mean_wait_seconds) : json(nullptr)},
          {"ks_test",
           {{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"n_a", waits_a.size()}, {"n_b", waits_b.size()}}}};
}

json compare_runs(const fs::path &dir_a, const fs::path &dir_b) {
  const auto a = MetricsReport::from_json(json::parse(read_file(dir_a / "report.json")));
  const auto b = MetricsReport::from_json(json::parse(read_file(dir_b / "report.json")));
  return compare(a, read_mean_waits(dir_a / "waits.csv"), b, read_mean_waits(dir_b / "waits.csv"));
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string dot_quote(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

template <typename Probability> std::string dot_text(const PetriNet &net, Probability probability) {
  std::string out = "digraph net {\n  rankdir=LR;\n";
  for (const auto &p : net.places()) {
    out += "  " + dot_quote(p.name) + " [shape=circle, label=" +
           dot_quote(p.initial_tokens ? std::to_string(p.initial_tokens) : std::string()) + "];\n";
  }
  for (const auto &t : net.transitions()) {
    if (t.silent())
      out += "  " + dot_quote(t.name) + " [shape=box, style=filled, fillcolor=black, label=\"\"];\n";
    else
      out += "  " + dot_quote(t.name) + " [shape=box, label=" + dot_quote(*t.label) + "];\n";
  }
  for (std::size_t i = 0; i < net.place_count(); ++i) {
    const auto p = static_cast<PlaceId>(i);
    for (const auto t : net.consumers(p)) {
      out += "  " + dot_quote(net.place(p).name) + " -> " + dot_quote(net.transition(t).name);
      if (const auto pr = probability(p, t)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", *pr);
        out += std::string(" [label=\"") + buf + "\"]";
      }
      out += ";\n";
    }
  }
  for (std::size_t i = 0; i < net.transition_count(); ++i) {
    const auto t = static_cast<TransitionId>(i);
    for (const auto p : net.postset(t))
      out += "  " + dot_quote(net.transition(t).name) + " -> " + dot_quote(net.place(p).name) + ";\n";
  }
  out += "}\n";
  return out;
}

} // namespace

std::string export_dot(const PetriNet &net) {
  return dot_text(net, [](PlaceId, TransitionId) -> std::optional<double> { return std::nullopt; });
}

std::string export_dot(const StochasticPetriNet &fspn, bool reduce) {
  const PetriNet shown = reduce ? reduce_silent(fspn.net) : fspn.net;
  // reduction keeps node names and every surviving place->transition arc
  return dot_text(shown, [&](PlaceId p, TransitionId t) -> std::optional<double> {
    const auto op = fspn.net.find_place(shown.place(p).name);
    const auto ot = fspn.net.find_transition(shown.transition(t).name);
    if (!op || !ot)
      return std::nullopt;
    const auto it = fspn.arc_probabilities.find({*op, *ot});
    if (it == fspn.arc_probabilities.end())
      return std::nullopt;
    return it->second;
  });
}

} // namespace socmine
