#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace socmine {

enum class PlaceId : std::uint32_t {};
enum class TransitionId : std::uint32_t {};

constexpr std::size_t index(PlaceId p) { return static_cast<std::size_t>(p); }
constexpr std::size_t index(TransitionId t) { return static_cast<std::size_t>(t); }

class NetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by fire() when a transition is not enabled.
class FiringError : public NetError {
public:
  FiringError(TransitionId t, PlaceId unmet, const std::string &what)
      : NetError(what), transition(t), place(unmet) {}
  TransitionId transition;
  PlaceId place;
};

/// Token counts, stored sparsely as (place, count) pairs sorted by place with
/// zero counts omitted, so equal markings compare and hash equal.
class Marking {
public:
  Marking() = default;
  Marking(std::initializer_list<std::pair<PlaceId, std::uint32_t>> tokens);

  std::uint32_t operator[](PlaceId p) const;
  void set(PlaceId p, std::uint32_t count);
  void add(PlaceId p, std::uint32_t count = 1) { set(p, (*this)[p] + count); }

  std::uint64_t total() const;
  bool empty() const { return entries_.empty(); }
  const std::vector<std::pair<PlaceId, std::uint32_t>> &entries() const { return entries_; }

  std::size_t hash() const;
  friend bool operator==(const Marking &, const Marking &) = default;

private:
  std::vector<std::pair<PlaceId, std::uint32_t>> entries_;
};

struct MarkingHash {
  std::size_t operator()(const Marking &m) const { return m.hash(); }
};

/// Labeled place/transition net with plain (weight 1) arcs. A transition
/// without a label is silent.
class PetriNet {
public:
  struct Place {
    std::string name;
    std::uint32_t initial_tokens = 0;
    friend bool operator==(const Place &, const Place &) = default;
  };
  struct Transition {
    std::string name;
    std::optional<std::string> label;
    bool silent() const { return !label.has_value(); }
    friend bool operator==(const Transition &, const Transition &) = default;
  };

  PlaceId add_place(std::string name, std::uint32_t initial_tokens = 0);
  TransitionId add_transition(std::string name, std::optional<std::string> label);
  void add_arc(PlaceId from, TransitionId to);
  void add_arc(TransitionId from, PlaceId to);

  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }
  std::size_t node_count() const { return places_.size() + transitions_.size(); }
  std::size_t arc_count() const;

  const Place &place(PlaceId p) const { return places_.at(index(p)); }
  const Transition &transition(TransitionId t) const { return transitions_.at(index(t)); }
  const std::vector<Place> &places() const { return places_; }
  const std::vector<Transition> &transitions() const { return transitions_; }

  /// Input places of t, ascending.
  const std::vector<PlaceId> &preset(TransitionId t) const { return pre_.at(index(t)); }
  /// Output places of t, ascending.
  const std::vector<PlaceId> &postset(TransitionId t) const { return post_.at(index(t)); }
  /// Transitions producing into p, ascending.
  const std::vector<TransitionId> &producers(PlaceId p) const { return producers_.at(index(p)); }
  /// Transitions consuming from p, ascending.
  const std::vector<TransitionId> &consumers(PlaceId p) const { return consumers_.at(index(p)); }

  bool has_arc(PlaceId p, TransitionId t) const;
  bool has_arc(TransitionId t, PlaceId p) const;

  std::optional<PlaceId> find_place(const std::string &name) const;
  std::optional<TransitionId> find_transition(const std::string &name) const;

  Marking initial_marking() const;
  void set_initial_tokens(PlaceId p, std::uint32_t tokens) { places_.at(index(p)).initial_tokens = tokens; }

  /// Display label: the transition label, or "tau" for silent transitions.
  std::string display_label(TransitionId t) const;

  friend bool operator==(const PetriNet &, const PetriNet &) = default;

private:
  void check(PlaceId p) const;
  void check(TransitionId t) const;

  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<PlaceId>> pre_, post_;
  std::vector<std::vector<TransitionId>> producers_, consumers_;
  // node names are unique across places and transitions
  std::unordered_map<std::string, PlaceId> place_names_;
  std::unordered_map<std::string, TransitionId> transition_names_;
};

bool is_enabled(const PetriNet &net, const Marking &m, TransitionId t);

/// Transitions with every input place marked, ascending by id.
std::vector<TransitionId> enabled(const PetriNet &net, const Marking &m);

/// Marking after firing t. Throws FiringError naming the first unmarked input
/// place when t is not enabled.
Marking fire(const PetriNet &net, const Marking &m, TransitionId t);

bool is_free_choice(const PetriNet &net);

struct ReachabilityGraph {
  struct Edge {
    std::size_t from;
    TransitionId transition;
    std::size_t to;
  };

  std::vector<Marking> states; // states[0] is the initial marking
  std::vector<Edge> edges;     // grouped by `from`, ascending transition within a state
  std::vector<std::size_t> end_states;

  std::optional<std::size_t> find_state(const Marking &m) const;
  std::optional<std::size_t> successor(std::size_t state, TransitionId t) const;

  /// Outgoing edges of `state` as a subrange of `edges`.
  std::pair<std::size_t, std::size_t> out_edges(std::size_t state) const {
    return {edge_offsets.at(state), edge_offsets.at(state + 1)};
  }

  std::vector<std::size_t> edge_offsets; // CSR offsets, size states.size() + 1
  std::unordered_map<Marking, std::size_t, MarkingHash> state_index;
};

class StateCapError : public NetError {
public:
  explicit StateCapError(std::size_t cap)
      : NetError("reachability graph exceeds " + std::to_string(cap) + " markings"), cap(cap) {}
  std::size_t cap;
};

constexpr std::size_t default_state_cap = 1'000'000;

/// Breadth-first marking graph; states are numbered in discovery order.
ReachabilityGraph reachability_graph(const PetriNet &net, std::size_t state_cap = default_state_cap);

nlohmann::json net_to_json(const PetriNet &net);
PetriNet net_from_json(const nlohmann::json &doc);

} // namespace socmine
