#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "socmine/event_log.hpp"
#include "socmine/petri_net.hpp"

namespace socmine {

/// Empirical delay distribution, whole seconds.
struct EmpiricalDelay {
  std::vector<std::int64_t> samples;

  friend bool operator==(const EmpiricalDelay &, const EmpiricalDelay &) = default;
};

/// Free-choice net with branch probabilities on place->transition arcs and
/// empirical delays on visible transitions.
struct StochasticPetriNet {
  PetriNet net;
  std::map<std::pair<PlaceId, TransitionId>, double> arc_probabilities;
  std::map<TransitionId, EmpiricalDelay> delays;

  double probability(PlaceId p, TransitionId t) const;

  /// Throws std::invalid_argument when the net is not free-choice, a place's
  /// outgoing probabilities do not sum to 1, or a silent transition carries a
  /// delay.
  void validate() const;

  friend bool operator==(const StochasticPetriNet &, const StochasticPetriNet &) = default;
};

struct Firing {
  TransitionId transition;
  Timestamp enabled_at;
  Timestamp fired_at;
};

struct ReplayResult {
  std::vector<Firing> firings;
  /// (transition, wait) for every visible firing, in firing order.
  std::vector<std::pair<TransitionId, std::int64_t>> waits;
  bool conforming = true;
  /// Index of the first event that could not be replayed.
  std::optional<std::size_t> failed_at;
  /// A dead marking was reached through silent moves after the last event.
  bool completed = false;
};

/// Token replay with FIFO token ages. Silent transitions are fired on demand
/// along the shortest silent path that enables the next observed activity.
ReplayResult replay_trace(const PetriNet &net, const Trace &trace);

std::vector<ReplayResult> replay_log(const PetriNet &net, const EventLog &log);

class EnrichmentError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Branch probabilities from consumed-token frequencies over conforming
/// replays; unvisited choice places are uniform. Delays are the observed
/// waits of each visible transition.
StochasticPetriNet enrich(const PetriNet &net, const std::vector<ReplayResult> &replays);
StochasticPetriNet enrich(const PetriNet &net, const EventLog &log);

struct ActivityWaits {
  std::size_t count = 0;
  double mean = 0;
  double median = 0;
};

struct WaitingTimeStats {
  std::map<std::string, ActivityWaits> per_activity;
  double mean_of_means = 0;
};

class EmptyStatisticsError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Per-activity waits over conforming replays, and the mean of the
/// per-activity means.
WaitingTimeStats waiting_time_stats(const PetriNet &net, const std::vector<ReplayResult> &replays);

/// Generates `n_traces` traces starting at clock 0. Each trace uses its own
/// random stream derived from (seed, trace index).
EventLog simulate(const StochasticPetriNet &fspn, std::int64_t n_traces, std::uint64_t seed,
                  std::size_t max_firings = 10'000);

nlohmann::json fspn_to_json(const StochasticPetriNet &fspn);
StochasticPetriNet fspn_from_json(const nlohmann::json &doc);

} // namespace socmine
