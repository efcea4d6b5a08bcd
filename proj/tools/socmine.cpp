// Command-line front end. Talks to the library only through the C interface.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "socmine/socmine.h"

namespace {

struct Options {
  std::vector<std::string> inputs;
  std::string schema;
  std::size_t max_events = 10;
  std::optional<std::size_t> max_traces;
  double noise_threshold = 0.2;
  bool split_bots = false;
  double bot_high = 0.9;
  double bot_low = 0.1;
  std::size_t state_cap = 1'000'000;
  double log_base = 0.0;
  std::uint64_t seed = 42;
  std::string out = ".";
};

// Owns a string handed out by the library.
struct Text {
  char *s = nullptr;
  ~Text() { socmine_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

int report_failure(const char *what, socmine_status status) {
  std::cerr << "socmine: " << what << ": " << socmine_last_error() << "\n";
  return status == SOCMINE_OK ? 1 : static_cast<int>(status);
}

bool write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  return out << text && out.flush();
}

int emit(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return 0;
  }
  if (!write_text(path, text)) {
    std::cerr << "socmine: cannot write '" << path << "'\n";
    return static_cast<int>(SOCMINE_ERR_IO);
  }
  return 0;
}

nlohmann::json pipeline_config(const Options &o, const std::string &net) {
  nlohmann::json doc{{"inputs", o.inputs},         {"max_events", o.max_events},
                     {"noise_threshold", o.noise_threshold}, {"split_bots", o.split_bots},
                     {"bot_high", o.bot_high},     {"bot_low", o.bot_low},
                     {"state_cap", o.state_cap},   {"log_base", o.log_base},
                     {"seed", o.seed},             {"out", o.out}};
  if (!o.schema.empty())
    doc["schema"] = o.schema;
  if (o.max_traces)
    doc["max_traces"] = *o.max_traces;
  if (!net.empty())
    doc["net"] = net;
  return doc;
}

int run_analyze(const Options &o, const std::string &net) {
  Text reports;
  const auto config = pipeline_config(o, net).dump();
  if (const auto st = socmine_run_pipeline(config.c_str(), &reports.s); st != SOCMINE_OK)
    return report_failure("analyze", st);
  std::cout << "log,nodes,density,diameter,mean_wait_seconds,ks_entropy\n";
  for (const auto &r : nlohmann::json::parse(reports.str()))
    std::cout << r.at("log").get<std::string>() << "," << r.at("nodes") << "," << r.at("density") << ","
              << r.at("diameter") << "," << r.at("mean_wait_seconds") << "," << r.at("ks_entropy") << "\n";
  return 0;
}

int run_discover(const Options &o) {
  if (o.inputs.size() != 1) {
    std::cerr << "socmine: discover takes exactly one --input\n";
    return static_cast<int>(SOCMINE_ERR_ARGUMENT);
  }
  socmine_log *log = nullptr;
  std::size_t rejected = 0;
  auto st = socmine_log_read(o.inputs[0].c_str(), o.schema.empty() ? nullptr : o.schema.c_str(), &log, &rejected);
  if (st != SOCMINE_OK)
    return report_failure("parse", st);
  std::unique_ptr<socmine_log, decltype(&socmine_log_free)> log_guard(log, socmine_log_free);
  if (rejected)
    std::cerr << "socmine: skipped " << rejected << " malformed row(s)\n";
  if ((st = socmine_log_preprocess(log, o.max_events, o.max_traces.value_or(0))) != SOCMINE_OK)
    return report_failure("preprocess", st);

  socmine_net *net = nullptr;
  Text tree;
  if ((st = socmine_discover(log, o.noise_threshold, &net, &tree.s)) != SOCMINE_OK)
    return report_failure("discover", st);
  std::unique_ptr<socmine_net, decltype(&socmine_net_free)> net_guard(net, socmine_net_free);
  Text json, dot;
  if ((st = socmine_net_to_json(net, &json.s)) != SOCMINE_OK || (st = socmine_net_to_dot(net, &dot.s)) != SOCMINE_OK)
    return report_failure("discover", st);

  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  const std::filesystem::path dir(o.out);
  if (!write_text(dir / "net.json", json.str()) || !write_text(dir / "model.dot", dot.str()) ||
      !write_text(dir / "tree.txt", tree.str() + "\n")) {
    for (const char *f : {"net.json", "model.dot", "tree.txt"})
      std::filesystem::remove(dir / f, ec);
    std::cerr << "socmine: write: cannot write into '" << o.out << "'\n";
    return static_cast<int>(SOCMINE_ERR_IO);
  }
  std::cout << tree.str() << "\n";
  return 0;
}

int run_simulate(const std::string &fspn_path, std::int64_t traces, std::uint64_t seed, std::size_t max_firings,
                 const std::string &out) {
  socmine_fspn *fspn = nullptr;
  auto st = socmine_fspn_load(fspn_path.c_str(), &fspn);
  if (st != SOCMINE_OK)
    return report_failure("simulate", st);
  std::unique_ptr<socmine_fspn, decltype(&socmine_fspn_free)> fspn_guard(fspn, socmine_fspn_free);
  socmine_log *log = nullptr;
  if ((st = socmine_simulate(fspn, traces, seed, max_firings, &log)) != SOCMINE_OK)
    return report_failure("simulate", st);
  std::unique_ptr<socmine_log, decltype(&socmine_log_free)> log_guard(log, socmine_log_free);
  const std::string path = out.empty() ? "/dev/stdout" : out;
  if ((st = socmine_log_write(log, path.c_str())) != SOCMINE_OK)
    return report_failure("simulate", st);
  return 0;
}

int run_compare(const std::string &a, const std::string &b, const std::string &out) {
  Text doc;
  if (const auto st = socmine_compare_dirs(a.c_str(), b.c_str(), &doc.s); st != SOCMINE_OK)
    return report_failure("compare", st);
  return emit(out, doc.str());
}

int run_export_dot(const std::string &path, bool reduce, const std::string &out) {
  Text dot;
  if (const auto st = socmine_export_dot_file(path.c_str(), reduce ? 1 : 0, &dot.s); st != SOCMINE_OK)
    return report_failure("export-dot", st);
  return emit(out, dot.str());
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Stochastic process mining of repost logs"};
  app.set_version_flag("--version", std::string(socmine_version()));
  app.set_config("--config", "", "TOML file with option defaults; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("-i,--input", o.inputs, "Event log CSV (repeatable)");
  app.add_option("--schema", o.schema,
                 "Column mapping, e.g. \"trace=post;activity=user;timestamp=time;bot_score=bot;format=epoch\"");
  app.add_option("--max-events", o.max_events, "Events kept per trace")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-traces", o.max_traces, "Traces kept per log (earliest first)")->check(CLI::PositiveNumber);
  app.add_option("--noise-threshold", o.noise_threshold, "Directly-follows filter threshold")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_flag("--split-bots", o.split_bots, "Split each log into high and low bot-score traces");
  app.add_option("--bot-high", o.bot_high, "Bot score above which an event counts as coordinated")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--bot-low", o.bot_low, "Bot score below which an event counts as uncoordinated")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--state-cap", o.state_cap, "Reachability graph state limit")->capture_default_str();
  app.add_option("--log-base", o.log_base, "Entropy logarithm base (0 = natural)")->capture_default_str();
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("-o,--out", o.out, "Output directory or file")->capture_default_str();

  auto *discover = app.add_subcommand("discover", "Discover a Petri net from one log");

  std::string net_path;
  auto *analyze = app.add_subcommand("analyze", "Run the full pipeline and write reports");
  analyze->add_option("--net", net_path, "Use this net.json instead of discovering one")->check(CLI::ExistingFile);

  std::string fspn_path;
  std::int64_t traces = 1000;
  std::size_t max_firings = 10'000;
  auto *simulate = app.add_subcommand("simulate", "Generate a log from a stochastic net");
  simulate->add_option("fspn", fspn_path, "fspn.json")->required();
  simulate->add_option("-n,--traces", traces, "Number of traces")->capture_default_str()->check(CLI::NonNegativeNumber);
  simulate->add_option("--max-firings", max_firings, "Firing limit per trace")->capture_default_str();

  std::string dir_a, dir_b;
  auto *compare = app.add_subcommand("compare", "Compare two analyze output directories");
  compare->add_option("a", dir_a, "First output directory")->required();
  compare->add_option("b", dir_b, "Second output directory")->required();

  std::string model_path;
  bool reduce = false;
  auto *export_dot = app.add_subcommand("export-dot", "Graphviz rendering of net.json or fspn.json");
  export_dot->add_option("model", model_path, "net.json or fspn.json")->required();
  export_dot->add_flag("--reduce", reduce, "Draw the net with removable silent transitions folded away");

  CLI11_PARSE(app, argc, argv);

  const bool out_given = app.count("--out") > 0;
  if (*discover || *analyze) {
    if (o.inputs.empty()) {
      std::cerr << "socmine: --input is required\n";
      return static_cast<int>(SOCMINE_ERR_ARGUMENT);
    }
    return *discover ? run_discover(o) : run_analyze(o, net_path);
  }
  if (*simulate)
    return run_simulate(fspn_path, traces, o.seed, max_firings, out_given ? o.out : "");
  if (*compare)
    return run_compare(dir_a, dir_b, out_given ? o.out : "");
  return run_export_dot(model_path, reduce, out_given ? o.out : "");
}
