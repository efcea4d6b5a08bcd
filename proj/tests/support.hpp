// Shared fixtures for the unit and acceptance tests.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "socmine/pipeline.hpp"

namespace fixtures {

using namespace socmine;

// p1 -> A -> {p2, p3}; p2 -> B; p3 -> C.
inline PetriNet concurrency_net() {
  PetriNet net;
  const auto p1 = net.add_place("p1", 1);
  const auto p2 = net.add_place("p2");
  const auto p3 = net.add_place("p3");
  const auto a = net.add_transition("A", "A");
  const auto b = net.add_transition("B", "B");
  const auto c = net.add_transition("C", "C");
  net.add_arc(p1, a);
  net.add_arc(a, p2);
  net.add_arc(a, p3);
  net.add_arc(p2, b);
  net.add_arc(p3, c);
  return net;
}

// The concurrency net where B and C may each be skipped by a silent move.
inline StochasticPetriNet threshold_fspn() {
  PetriNet net;
  const auto p1 = net.add_place("p1", 1);
  const auto p2 = net.add_place("p2");
  const auto p3 = net.add_place("p3");
  const auto a = net.add_transition("A", "A");
  const auto b = net.add_transition("B", "B");
  const auto skip_b = net.add_transition("skip_B", std::nullopt);
  const auto c = net.add_transition("C", "C");
  const auto skip_c = net.add_transition("skip_C", std::nullopt);
  net.add_arc(p1, a);
  net.add_arc(a, p2);
  net.add_arc(a, p3);
  net.add_arc(p2, b);
  net.add_arc(p2, skip_b);
  net.add_arc(p3, c);
  net.add_arc(p3, skip_c);

  StochasticPetriNet fspn;
  fspn.net = net;
  fspn.arc_probabilities = {{{p1, a}, 1.0}, {{p2, b}, 0.8}, {{p2, skip_b}, 0.2}, {{p3, c}, 0.7}, {{p3, skip_c}, 0.3}};
  fspn.delays[a] = {{0}};
  fspn.delays[b] = {{30, 60, 120, 600}};
  fspn.delays[c] = {{10, 45, 300}};
  return fspn;
}

// start -> first -> p1 -> second -> ... -> end
inline PetriNet chain_net(const std::vector<std::string> &labels) {
  PetriNet net;
  auto place = net.add_place("start", 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto t = net.add_transition(labels[i], labels[i]);
    net.add_arc(place, t);
    place = net.add_place(i + 1 == labels.size() ? "end" : "p" + std::to_string(i + 1));
    net.add_arc(t, place);
  }
  return net;
}

inline Trace make_trace(const std::string &id, const std::vector<std::pair<std::string, Timestamp>> &events) {
  Trace trace{id, {}};
  for (const auto &[activity, ts] : events)
    trace.events.push_back({id, activity, ts, std::nullopt});
  return trace;
}

inline EventLog make_log(const std::vector<std::vector<std::string>> &sequences) {
  EventLog log;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    std::vector<std::pair<std::string, Timestamp>> events;
    for (std::size_t j = 0; j < sequences[i].size(); ++j)
      events.push_back({sequences[i][j], static_cast<Timestamp>(100 * i + j)});
    log.traces.push_back(make_trace("c" + std::to_string(i), events));
  }
  return log;
}

// Visible label sequences along paths from the initial state to dead states,
// with at most `depth` firings. Silent firings are dropped.
inline std::set<std::vector<std::string>> language(const PetriNet &net, std::size_t depth = 32) {
  const auto rg = reachability_graph(net);
  std::set<std::vector<std::string>> words;
  std::vector<std::string> word;
  auto walk = [&](auto &&self, std::size_t state, std::size_t left) -> void {
    const auto [begin, end] = rg.out_edges(state);
    if (begin == end) {
      words.insert(word);
      return;
    }
    if (left == 0)
      return;
    for (auto e = begin; e < end; ++e) {
      const auto &edge = rg.edges[e];
      const auto &t = net.transition(edge.transition);
      if (!t.silent())
        word.push_back(*t.label);
      self(self, edge.to, left - 1);
      if (!t.silent())
        word.pop_back();
    }
  };
  walk(walk, 0, depth);
  return words;
}

} // namespace fixtures
