#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "socmine/event_log.hpp"
#include "socmine/petri_net.hpp"

namespace socmine {

struct ProcessTree {
  enum class Kind { activity, silent, sequence, exclusive_choice, parallel, loop };

  Kind kind = Kind::silent;
  std::string activity; // activity leaves only
  std::vector<ProcessTree> children;

  static ProcessTree leaf(std::string activity);
  static ProcessTree tau();
  /// Loop children are [body, redo...].
  static ProcessTree node(Kind kind, std::vector<ProcessTree> children);

  bool is_leaf() const { return kind == Kind::activity || kind == Kind::silent; }

  /// Parenthesized form: `->(A, /\(B, C))`, `X(..)`, `*(body, redo..)`, `tau`.
  std::string to_string() const;

  friend bool operator==(const ProcessTree &, const ProcessTree &) = default;
};

/// Inverse of ProcessTree::to_string. Activity names may be double-quoted when
/// they contain separators.
ProcessTree parse_process_tree(const std::string &text);

struct Cut {
  enum class Kind { exclusive_choice, sequence, parallel, loop };
  Kind kind;
  std::vector<std::set<std::string>> blocks;

  friend bool operator==(const Cut &, const Cut &) = default;
};

/// Minimum self-distance witnesses: for each activity, the activities that
/// occur between two of its occurrences at minimal distance.
using SelfDistanceWitnesses = std::map<std::string, std::set<std::string>>;

SelfDistanceWitnesses self_distance_witnesses(const EventLog &log);

/// Drops each activity's outgoing edges counting less than threshold times its
/// strongest outgoing edge; start and end counts are filtered against their
/// own maxima.
Dfg filter_dfg(const Dfg &dfg, double threshold);

/// First applicable cut among exclusive choice, sequence, parallel and loop.
/// Witnesses, when given, keep an activity and its self-distance witnesses in
/// the same parallel block.
std::optional<Cut> find_cut(const Dfg &dfg, const std::set<std::string> &alphabet,
                            const SelfDistanceWitnesses *witnesses = nullptr);

constexpr double default_noise_threshold = 0.2;

ProcessTree discover_tree(const EventLog &log, double threshold = default_noise_threshold);

/// Workflow net of the tree: one marked source place, one sink place.
PetriNet tree_to_net(const ProcessTree &tree);

/// Simplified copy used for reporting and DOT output:
///  - a silent transition whose only input place has a single producer and no
///    other consumer is fused into that producer;
///  - places nobody consumes from are removed;
///  - silent transitions left without outputs, whose inputs feed only them,
///    are removed.
/// The visible language and free-choice property are preserved.
PetriNet reduce_silent(const PetriNet &net);

} // namespace socmine
