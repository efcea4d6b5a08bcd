#include "socmine/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>
#include <unordered_map>

namespace socmine {

double StochasticPetriNet::probability(PlaceId p, TransitionId t) const {
  const auto it = arc_probabilities.find({p, t});
  return it == arc_probabilities.end() ? 0.0 : it->second;
}

void StochasticPetriNet::validate() const {
  if (!is_free_choice(net))
    throw std::invalid_argument("stochastic net is not free-choice");
  for (const auto &[arc, pr] : arc_probabilities) {
    if (index(arc.first) >= net.place_count() || index(arc.second) >= net.transition_count() ||
        !net.has_arc(arc.first, arc.second))
      throw std::invalid_argument("probability attached to a missing place->transition arc");
    if (!(pr >= 0.0 && pr <= 1.0))
      throw std::invalid_argument("arc probability outside [0,1]");
  }
  for (std::size_t i = 0; i < net.place_count(); ++i) {
    const auto p = static_cast<PlaceId>(i);
    const auto &consumers = net.consumers(p);
    if (consumers.empty())
      continue;
    double sum = 0;
    for (const auto t : consumers)
      sum += probability(p, t);
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("outgoing probabilities of place " + net.place(p).name + " sum to " +
                                  std::to_string(sum));
  }
  for (const auto &[t, delay] : delays) {
    if (index(t) >= net.transition_count())
      throw std::invalid_argument("delay attached to an unknown transition");
    if (net.transition(t).silent())
      throw std::invalid_argument("silent transition " + net.transition(t).name + " carries a delay");
    if (delay.samples.empty())
      throw std::invalid_argument("empty delay distribution for " + net.transition(t).name);
    if (std::any_of(delay.samples.begin(), delay.samples.end(), [](std::int64_t s) { return s < 0; }))
      throw std::invalid_argument("negative delay sample for " + net.transition(t).name);
  }
}

// ---------------------------------------------------------------------------
// Token replay

namespace {

// Bound on markings explored per silent-path search.
constexpr std::size_t silent_search_budget = 200'000;

class Replayer {
public:
  explicit Replayer(const PetriNet &net) : net_(net) {
    for (std::size_t i = 0; i < net.transition_count(); ++i) {
      const auto t = static_cast<TransitionId>(i);
      if (net.transition(t).silent())
        silent_.push_back(t);
      else
        by_label_[*net.transition(t).label].push_back(t);
    }
  }

  ReplayResult run(const Trace &trace) const {
    ReplayResult result;
    const Timestamp start = trace.empty() ? 0 : trace.events.front().timestamp;
    State state{std::vector<std::deque<Timestamp>>(net_.place_count()), start};
    for (std::size_t i = 0; i < net_.place_count(); ++i)
      state.tokens[i].assign(net_.places()[i].initial_tokens, start);

    for (std::size_t i = 0; i < trace.events.size(); ++i) {
      const auto &event = trace.events[i];
      const auto candidates = by_label_.find(event.activity);
      if (candidates == by_label_.end()) {
        result.conforming = false;
        result.failed_at = i;
        return result;
      }
      const auto &ts = candidates->second;
      auto goal = [&](const Marking &m) {
        return std::any_of(ts.begin(), ts.end(), [&](TransitionId t) { return is_enabled(net_, m, t); });
      };
      const auto path = silent_path(marking_of(state), goal);
      if (!path) {
        result.conforming = false;
        result.failed_at = i;
        return result;
      }
      for (const auto t : *path)
        fire(state, t, std::nullopt, result);
      const auto m = marking_of(state);
      const auto t = *std::find_if(ts.begin(), ts.end(), [&](TransitionId c) { return is_enabled(net_, m, c); });
      fire(state, t, event.timestamp, result);
    }

    auto dead = [&](const Marking &m) {
      for (std::size_t i = 0; i < net_.transition_count(); ++i)
        if (is_enabled(net_, m, static_cast<TransitionId>(i)))
          return false;
      return true;
    };
    if (const auto path = silent_path(marking_of(state), dead)) {
      for (const auto t : *path)
        fire(state, t, std::nullopt, result);
      result.completed = true;
    }
    return result;
  }

private:
  struct State {
    std::vector<std::deque<Timestamp>> tokens; // arrival times, oldest first
    Timestamp clock;
  };

  Marking marking_of(const State &state) const {
    Marking m;
    for (std::size_t i = 0; i < state.tokens.size(); ++i)
      if (!state.tokens[i].empty())
        m.set(static_cast<PlaceId>(i), static_cast<std::uint32_t>(state.tokens[i].size()));
    return m;
  }

  // Visible firings happen at `at`; silent ones pass the enabling time on to
  // their output tokens.
  void fire(State &state, TransitionId t, std::optional<Timestamp> at, ReplayResult &result) const {
    Timestamp enabled_at = std::numeric_limits<Timestamp>::min();
    for (const auto p : net_.preset(t)) {
      auto &queue = state.tokens[index(p)];
      enabled_at = std::max(enabled_at, queue.front());
      queue.pop_front();
    }
    if (net_.preset(t).empty())
      enabled_at = state.clock;
    const Timestamp token_time = at ? *at : enabled_at;
    for (const auto p : net_.postset(t))
      state.tokens[index(p)].push_back(token_time);
    const Timestamp fired_at = at ? *at : std::max(enabled_at, state.clock);
    state.clock = std::max(state.clock, fired_at);
    result.firings.push_back({t, enabled_at, fired_at});
    if (at)
      result.waits.emplace_back(t, std::max<std::int64_t>(0, *at - enabled_at));
  }

  // Shortest sequence of silent firings from `from` to a marking satisfying
  // `goal`; ties go to the lower transition id.
  template <typename Goal> std::optional<std::vector<TransitionId>> silent_path(const Marking &from, Goal goal) const {
    if (goal(from))
      return std::vector<TransitionId>{};
    if (silent_.empty())
      return std::nullopt;
    struct Node {
      Marking marking;
      std::size_t parent;
      TransitionId via;
      std::size_t depth;
    };
    std::vector<Node> nodes{{from, SIZE_MAX, TransitionId{}, 0}};
    std::unordered_map<Marking, std::size_t, MarkingHash> seen{{from, 0}};
    for (std::size_t head = 0; head < nodes.size(); ++head) {
      if (nodes[head].depth >= silent_.size())
        continue;
      for (const auto t : silent_) {
        if (!is_enabled(net_, nodes[head].marking, t))
          continue;
        auto next = socmine::fire(net_, nodes[head].marking, t);
        if (seen.count(next))
          continue;
        const bool hit = goal(next);
        seen.emplace(next, nodes.size());
        nodes.push_back({std::move(next), head, t, nodes[head].depth + 1});
        if (hit) {
          std::vector<TransitionId> path;
          for (auto n = nodes.size() - 1; n != 0; n = nodes[n].parent)
            path.push_back(nodes[n].via);
          std::reverse(path.begin(), path.end());
          return path;
        }
        if (nodes.size() > silent_search_budget)
          return std::nullopt;
      }
    }
    return std::nullopt;
  }

  const PetriNet &net_;
  std::vector<TransitionId> silent_;
  std::unordered_map<std::string, std::vector<TransitionId>> by_label_;
};

} // namespace

ReplayResult replay_trace(const PetriNet &net, const Trace &trace) { return Replayer(net).run(trace); }

std::vector<ReplayResult> replay_log(const PetriNet &net, const EventLog &log) {
  const Replayer replayer(net);
  std::vector<ReplayResult> out;
  out.reserve(log.traces.size());
  for (const auto &trace : log.traces)
    out.push_back(replayer.run(trace));
  return out;
}

// ---------------------------------------------------------------------------
// Enrichment and waiting times

StochasticPetriNet enrich(const PetriNet &net, const std::vector<ReplayResult> &replays) {
  std::map<std::pair<PlaceId, TransitionId>, std::uint64_t> consumed;
  std::vector<std::uint64_t> consumed_from(net.place_count(), 0);
  StochasticPetriNet fspn{net, {}, {}};
  std::size_t conforming = 0;
  for (const auto &replay : replays) {
    if (!replay.conforming)
      continue;
    ++conforming;
    for (const auto &firing : replay.firings)
      for (const auto p : net.preset(firing.transition)) {
        ++consumed[{p, firing.transition}];
        ++consumed_from[index(p)];
      }
    for (const auto &[t, wait] : replay.waits)
      fspn.delays[t].samples.push_back(wait);
  }
  if (conforming == 0)
    throw EnrichmentError("no trace of the log replays on the net");

  for (std::size_t i = 0; i < net.place_count(); ++i) {
    const auto p = static_cast<PlaceId>(i);
    const auto &consumers = net.consumers(p);
    for (const auto t : consumers) {
      const auto total = consumed_from[i];
      fspn.arc_probabilities[{p, t}] =
          total == 0 ? 1.0 / static_cast<double>(consumers.size())
                     : static_cast<double>(consumed[{p, t}]) / static_cast<double>(total);
    }
  }
  return fspn;
}

StochasticPetriNet enrich(const PetriNet &net, const EventLog &log) { return enrich(net, replay_log(net, log)); }

WaitingTimeStats waiting_time_stats(const PetriNet &net, const std::vector<ReplayResult> &replays) {
  std::map<std::string, std::vector<std::int64_t>> waits;
  for (const auto &replay : replays) {
    if (!replay.conforming)
      continue;
    for (const auto &[t, wait] : replay.waits)
      waits[net.display_label(t)].push_back(wait);
  }
  if (waits.empty())
    throw EmptyStatisticsError("no waiting times: no conforming replay fired a visible transition");
  WaitingTimeStats stats;
  double sum_of_means = 0;
  for (auto &[activity, samples] : waits) {
    std::sort(samples.begin(), samples.end());
    ActivityWaits w;
    w.count = samples.size();
    double sum = 0;
    for (const auto s : samples)
      sum += static_cast<double>(s);
    w.mean = sum / static_cast<double>(samples.size());
    const auto mid = samples.size() / 2;
    w.median = samples.size() % 2 == 1 ? static_cast<double>(samples[mid])
                                       : (static_cast<double>(samples[mid - 1]) + static_cast<double>(samples[mid])) / 2.0;
    sum_of_means += w.mean;
    stats.per_activity.emplace(activity, w);
  }
  stats.mean_of_means = sum_of_means / static_cast<double>(stats.per_activity.size());
  return stats;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

class TraceRng {
public:
  TraceRng(std::uint64_t seed, std::uint64_t trace_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trace_index), static_cast<std::uint32_t>(trace_index >> 32)};
    engine_.seed(seq);
  }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n))); }

private:
  std::mt19937_64 engine_;
};

} // namespace

EventLog simulate(const StochasticPetriNet &fspn, std::int64_t n_traces, std::uint64_t seed, std::size_t max_firings) {
  if (n_traces < 0)
    throw std::invalid_argument("simulate: n_traces must be non-negative");
  fspn.validate();
  const auto &net = fspn.net;
  const auto np = net.place_count();

  EventLog log;
  log.traces.reserve(static_cast<std::size_t>(n_traces));
  for (std::int64_t i = 0; i < n_traces; ++i) {
    TraceRng rng(seed, static_cast<std::uint64_t>(i));
    Trace trace{"sim-" + std::to_string(i), {}};
    std::vector<std::uint32_t> marking(np);
    for (std::size_t p = 0; p < np; ++p)
      marking[p] = net.places()[p].initial_tokens;

    struct Pending {
      std::int64_t time;
      TransitionId transition;
      std::uint64_t seq;
      bool operator>(const Pending &o) const {
        if (time != o.time)
          return time > o.time;
        if (transition != o.transition)
          return transition > o.transition;
        return seq > o.seq;
      }
    };
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending;
    std::uint64_t seq = 0;
    std::int64_t clock = 0;
    std::size_t fired = 0;

    auto start = [&](TransitionId t) {
      for (const auto p : net.preset(t))
        --marking[index(p)];
      std::int64_t delay = 0;
      if (!net.transition(t).silent()) {
        const auto it = fspn.delays.find(t);
        if (it != fspn.delays.end())
          delay = it->second.samples[rng.below(it->second.samples.size())];
      }
      pending.push({clock + delay, t, seq++});
    };

    while (fired < max_firings) {
      // every marked place hands each of its tokens to one enabled output transition
      bool progress = true;
      while (progress) {
        progress = false;
        for (std::size_t pi = 0; pi < np; ++pi) {
          const auto p = static_cast<PlaceId>(pi);
          const auto &consumers = net.consumers(p);
          while (marking[pi] > 0 && !consumers.empty()) {
            if (consumers.size() == 1) {
              const auto t = consumers.front();
              const bool ready = std::all_of(net.preset(t).begin(), net.preset(t).end(),
                                             [&](PlaceId q) { return marking[index(q)] > 0; });
              if (!ready)
                break;
              start(t);
            } else {
              // free-choice: every consumer here has this place as its only input
              const double u = rng.uniform();
              double acc = 0;
              TransitionId chosen = consumers.back();
              for (const auto t : consumers) {
                acc += fspn.probability(p, t);
                if (u < acc) {
                  chosen = t;
                  break;
                }
              }
              start(chosen);
            }
            progress = true;
          }
        }
      }
      if (pending.empty())
        break;
      const auto next = pending.top();
      pending.pop();
      clock = next.time;
      for (const auto p : net.postset(next.transition))
        ++marking[index(p)];
      ++fired;
      if (const auto &label = net.transition(next.transition).label)
        trace.events.push_back({trace.trace_id, *label, clock, std::nullopt});
    }
    log.traces.push_back(std::move(trace));
  }
  return log;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json fspn_to_json(const StochasticPetriNet &fspn) {
  using nlohmann::json;
  auto doc = net_to_json(fspn.net);
  json probabilities = json::array();
  for (const auto &[arc, pr] : fspn.arc_probabilities)
    probabilities.push_back(json::array({fspn.net.place(arc.first).name, fspn.net.transition(arc.second).name, pr}));
  json delays = json::object();
  for (const auto &[t, delay] : fspn.delays)
    delays[fspn.net.transition(t).name] = delay.samples;
  doc["probabilities"] = std::move(probabilities);
  doc["delays"] = std::move(delays);
  return doc;
}

StochasticPetriNet fspn_from_json(const nlohmann::json &doc) {
  StochasticPetriNet fspn{net_from_json(doc), {}, {}};
  try {
    for (const auto &entry : doc.at("probabilities")) {
      const auto p = fspn.net.find_place(entry.at(0).get<std::string>());
      const auto t = fspn.net.find_transition(entry.at(1).get<std::string>());
      if (!p || !t)
        throw NetError("probability entry references unknown nodes");
      fspn.arc_probabilities[{*p, *t}] = entry.at(2).get<double>();
    }
    if (doc.contains("delays"))
      for (const auto &[name, samples] : doc.at("delays").items()) {
        const auto t = fspn.net.find_transition(name);
        if (!t)
          throw NetError("delay entry references unknown transition '" + name + "'");
        fspn.delays[*t].samples = samples.get<std::vector<std::int64_t>>();
      }
  } catch (const nlohmann::json::exception &e) {
    throw NetError(std::string("malformed stochastic net document: ") + e.what());
  }
  fspn.validate();
  return fspn;
}

} // namespace socmine
