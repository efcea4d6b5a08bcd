#include "socmine/socmine.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "socmine/pipeline.hpp"

struct socmine_log {
  socmine::EventLog log;
};
struct socmine_net {
  socmine::PetriNet net;
};
struct socmine_fspn {
  socmine::StochasticPetriNet fspn;
};

namespace {

thread_local std::string last_error;

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

socmine_status fail(socmine_status status, const char *what) {
  last_error = what;
  return status;
}

// Runs f, translating exceptions into status codes.
template <typename F> socmine_status guard(F &&f) {
  using namespace socmine;
  try {
    last_error.clear();
    f();
    return SOCMINE_OK;
  } catch (const PipelineError &e) {
    return fail(SOCMINE_ERR_PIPELINE, e.what());
  } catch (const IoError &e) {
    return fail(SOCMINE_ERR_IO, e.what());
  } catch (const ParseError &e) {
    return fail(SOCMINE_ERR_PARSE, e.what());
  } catch (const SchemaError &e) {
    return fail(SOCMINE_ERR_PARSE, e.what());
  } catch (const nlohmann::json::exception &e) {
    return fail(SOCMINE_ERR_PARSE, e.what());
  } catch (const StateCapError &e) {
    return fail(SOCMINE_ERR_STATE_CAP, e.what());
  } catch (const ConvergenceError &e) {
    return fail(SOCMINE_ERR_CONVERGENCE, e.what());
  } catch (const NetError &e) {
    return fail(SOCMINE_ERR_MODEL, e.what());
  } catch (const EnrichmentError &e) {
    return fail(SOCMINE_ERR_MODEL, e.what());
  } catch (const ChainError &e) {
    return fail(SOCMINE_ERR_MODEL, e.what());
  } catch (const MeasureError &e) {
    return fail(SOCMINE_ERR_MODEL, e.what());
  } catch (const EmptyStatisticsError &e) {
    return fail(SOCMINE_ERR_MODEL, e.what());
  } catch (const std::invalid_argument &e) {
    return fail(SOCMINE_ERR_ARGUMENT, e.what());
  } catch (const std::exception &e) {
    return fail(SOCMINE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SOCMINE_ERR_INTERNAL, "unknown error");
  }
}

char *dup(const std::string &s) {
  auto *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out)
    throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void require(const void *p, const char *name) {
  if (!p)
    throw std::invalid_argument(std::string(name) + " must not be null");
}

std::string load(const char *path) {
  try {
    return socmine::read_file(path);
  } catch (const std::exception &e) {
    throw IoError(e.what());
  }
}

nlohmann::json load_json(const char *path) {
  const auto text = load(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string(path) + ": " + e.what());
  }
}

} // namespace

extern "C" {

const char *socmine_version(void) { return "0.1.0"; }

const char *socmine_last_error(void) { return last_error.c_str(); }

void socmine_string_free(char *s) { std::free(s); }

socmine_status socmine_log_read(const char *path, const char *schema, socmine_log **out, size_t *rejected_rows) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    const auto parsed_schema = schema ? socmine::LogSchema::parse(schema) : socmine::LogSchema{};
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw IoError(std::string("cannot open '") + path + "'");
    auto result = socmine::parse_log(in, parsed_schema);
    if (rejected_rows)
      *rejected_rows = result.rejected.size();
    *out = new socmine_log{std::move(result.log)};
  });
}

socmine_status socmine_log_preprocess(socmine_log *log, size_t max_events, size_t max_traces) {
  return guard([&] {
    require(log, "log");
    log->log = socmine::preprocess(log->log, max_events, max_traces ? max_traces : SIZE_MAX);
  });
}

size_t socmine_log_trace_count(const socmine_log *log) { return log ? log->log.traces.size() : 0; }

size_t socmine_log_event_count(const socmine_log *log) { return log ? log->log.event_count() : 0; }

socmine_status socmine_log_write(const socmine_log *log, const char *path) {
  return guard([&] {
    require(log, "log");
    require(path, "path");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError(std::string("cannot write '") + path + "'");
    socmine::write_log(out, log->log);
    if (!out.flush())
      throw IoError(std::string("cannot write '") + path + "'");
  });
}

void socmine_log_free(socmine_log *log) { delete log; }

socmine_status socmine_discover(const socmine_log *log, double noise_threshold, socmine_net **out, char **tree) {
  return guard([&] {
    require(log, "log");
    require(out, "out");
    const auto discovered = socmine::discover_tree(log->log, noise_threshold);
    auto net = std::make_unique<socmine_net>(socmine_net{socmine::tree_to_net(discovered)});
    if (tree)
      *tree = dup(discovered.to_string());
    *out = net.release();
  });
}

socmine_status socmine_net_from_tree(const char *tree, socmine_net **out) {
  return guard([&] {
    require(tree, "tree");
    require(out, "out");
    socmine::ProcessTree parsed;
    try {
      parsed = socmine::parse_process_tree(tree);
    } catch (const std::exception &e) {
      throw ParseError(e.what());
    }
    *out = new socmine_net{socmine::tree_to_net(parsed)};
  });
}

socmine_status socmine_net_load(const char *path, socmine_net **out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new socmine_net{socmine::net_from_json(load_json(path))};
  });
}

socmine_status socmine_net_to_json(const socmine_net *net, char **out) {
  return guard([&] {
    require(net, "net");
    require(out, "out");
    *out = dup(socmine::net_to_json(net->net).dump(2) + "\n");
  });
}

socmine_status socmine_net_to_dot(const socmine_net *net, char **out) {
  return guard([&] {
    require(net, "net");
    require(out, "out");
    *out = dup(socmine::export_dot(net->net));
  });
}

void socmine_net_free(socmine_net *net) { delete net; }

socmine_status socmine_enrich(const socmine_net *net, const socmine_log *log, socmine_fspn **out) {
  return guard([&] {
    require(net, "net");
    require(log, "log");
    require(out, "out");
    *out = new socmine_fspn{socmine::enrich(net->net, log->log)};
  });
}

socmine_status socmine_fspn_load(const char *path, socmine_fspn **out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new socmine_fspn{socmine::fspn_from_json(load_json(path))};
  });
}

socmine_status socmine_fspn_to_json(const socmine_fspn *fspn, char **out) {
  return guard([&] {
    require(fspn, "fspn");
    require(out, "out");
    *out = dup(socmine::fspn_to_json(fspn->fspn).dump(2) + "\n");
  });
}

socmine_status socmine_fspn_to_dot(const socmine_fspn *fspn, int reduce, char **out) {
  return guard([&] {
    require(fspn, "fspn");
    require(out, "out");
    *out = dup(socmine::export_dot(fspn->fspn, reduce != 0));
  });
}

socmine_status socmine_simulate(const socmine_fspn *fspn, int64_t n_traces, uint64_t seed, size_t max_firings,
                                socmine_log **out) {
  return guard([&] {
    require(fspn, "fspn");
    require(out, "out");
    *out = new socmine_log{socmine::simulate(fspn->fspn, n_traces, seed, max_firings)};
  });
}

void socmine_fspn_free(socmine_fspn *fspn) { delete fspn; }

socmine_status socmine_run_pipeline(const char *config_json, char **reports) {
  return guard([&] {
    require(config_json, "config_json");
    nlohmann::json doc;
    socmine::PipelineConfig config;
    try {
      doc = nlohmann::json::parse(config_json);
      config = socmine::PipelineConfig::from_json(doc);
    } catch (const nlohmann::json::exception &e) {
      throw socmine::PipelineError("config", e.what());
    } catch (const socmine::SchemaError &e) {
      throw socmine::PipelineError("config", e.what());
    }
    const auto result = socmine::run_pipeline(config);
    if (reports) {
      auto array = nlohmann::json::array();
      for (const auto &r : result)
        array.push_back(r.to_json());
      *reports = dup(array.dump(2) + "\n");
    }
  });
}

socmine_status socmine_compare_dirs(const char *dir_a, const char *dir_b, char **out) {
  return guard([&] {
    require(dir_a, "dir_a");
    require(dir_b, "dir_b");
    require(out, "out");
    nlohmann::json doc;
    try {
      doc = socmine::compare_runs(dir_a, dir_b);
    } catch (const nlohmann::json::exception &) {
      throw;
    } catch (const std::invalid_argument &) {
      throw;
    } catch (const std::runtime_error &e) {
      throw IoError(e.what());
    }
    *out = dup(doc.dump(2) + "\n");
  });
}

socmine_status socmine_export_dot_file(const char *path, int reduce, char **out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    const auto doc = load_json(path);
    if (doc.contains("probabilities"))
      *out = dup(socmine::export_dot(socmine::fspn_from_json(doc), reduce != 0));
    else
      *out = dup(socmine::export_dot(reduce ? socmine::reduce_silent(socmine::net_from_json(doc))
                                             : socmine::net_from_json(doc)));
  });
}

} // extern "C"
