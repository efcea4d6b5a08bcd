#include "socmine/petri_net.hpp"

#include <algorithm>
#include <deque>

namespace socmine {

Marking::Marking(std::initializer_list<std::pair<PlaceId, std::uint32_t>> tokens) {
  for (const auto &[p, n] : tokens)
    add(p, n);
}

std::uint32_t Marking::operator[](PlaceId p) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), p,
                                   [](const auto &e, PlaceId key) { return e.first < key; });
  return it != entries_.end() && it->first == p ? it->second : 0;
}

void Marking::set(PlaceId p, std::uint32_t count) {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), p,
                                   [](const auto &e, PlaceId key) { return e.first < key; });
  if (it != entries_.end() && it->first == p) {
    if (count == 0)
      entries_.erase(it);
    else
      it->second = count;
  } else if (count != 0) {
    entries_.insert(it, {p, count});
  }
}

std::uint64_t Marking::total() const {
  std::uint64_t n = 0;
  for (const auto &e : entries_)
    n += e.second;
  return n;
}

std::size_t Marking::hash() const {
  // FNV-1a over (place, count) pairs
  std::uint64_t h = 1469598103934665603ull;
  for (const auto &[p, n] : entries_) {
    for (const std::uint64_t v : {static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(n)}) {
      h ^= v;
      h *= 1099511628211ull;
    }
  }
  return static_cast<std::size_t>(h);
}

void PetriNet::check(PlaceId p) const {
  if (index(p) >= places_.size())
    throw NetError("unknown place id " + std::to_string(index(p)));
}

void PetriNet::check(TransitionId t) const {
  if (index(t) >= transitions_.size())
    throw NetError("unknown transition id " + std::to_string(index(t)));
}

PlaceId PetriNet::add_place(std::string name, std::uint32_t initial_tokens) {
  if (place_names_.count(name) || transition_names_.count(name))
    throw NetError("duplicate node name '" + name + "'");
  place_names_.emplace(name, static_cast<PlaceId>(places_.size()));
  places_.push_back({std::move(name), initial_tokens});
  producers_.emplace_back();
  consumers_.emplace_back();
  return static_cast<PlaceId>(places_.size() - 1);
}

TransitionId PetriNet::add_transition(std::string name, std::optional<std::string> label) {
  if (place_names_.count(name) || transition_names_.count(name))
    throw NetError("duplicate node name '" + name + "'");
  transition_names_.emplace(name, static_cast<TransitionId>(transitions_.size()));
  transitions_.push_back({std::move(name), std::move(label)});
  pre_.emplace_back();
  post_.emplace_back();
  return static_cast<TransitionId>(transitions_.size() - 1);
}

namespace {
template <typename T> bool sorted_insert(std::vector<T> &v, T value) {
  const auto it = std::lower_bound(v.begin(), v.end(), value);
  if (it != v.end() && *it == value)
    return false;
  v.insert(it, value);
  return true;
}
} // namespace

void PetriNet::add_arc(PlaceId from, TransitionId to) {
  check(from);
  check(to);
  if (!sorted_insert(pre_[index(to)], from))
    throw NetError("duplicate arc " + places_[index(from)].name + " -> " + transitions_[index(to)].name);
  sorted_insert(consumers_[index(from)], to);
}

void PetriNet::add_arc(TransitionId from, PlaceId to) {
  check(from);
  check(to);
  if (!sorted_insert(post_[index(from)], to))
    throw NetError("duplicate arc " + transitions_[index(from)].name + " -> " + places_[index(to)].name);
  sorted_insert(producers_[index(to)], from);
}

std::size_t PetriNet::arc_count() const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < transitions_.size(); ++t)
    n += pre_[t].size() + post_[t].size();
  return n;
}

bool PetriNet::has_arc(PlaceId p, TransitionId t) const {
  const auto &v = preset(t);
  return std::binary_search(v.begin(), v.end(), p);
}

bool PetriNet::has_arc(TransitionId t, PlaceId p) const {
  const auto &v = postset(t);
  return std::binary_search(v.begin(), v.end(), p);
}

std::optional<PlaceId> PetriNet::find_place(const std::string &name) const {
  const auto it = place_names_.find(name);
  return it == place_names_.end() ? std::nullopt : std::optional(it->second);
}

std::optional<TransitionId> PetriNet::find_transition(const std::string &name) const {
  const auto it = transition_names_.find(name);
  return it == transition_names_.end() ? std::nullopt : std::optional(it->second);
}

Marking PetriNet::initial_marking() const {
  Marking m;
  for (std::size_t i = 0; i < places_.size(); ++i)
    m.set(static_cast<PlaceId>(i), places_[i].initial_tokens);
  return m;
}

std::string PetriNet::display_label(TransitionId t) const {
  const auto &tr = transition(t);
  return tr.label ? *tr.label : std::string("tau");
}

bool is_enabled(const PetriNet &net, const Marking &m, TransitionId t) {
  for (const auto p : net.preset(t))
    if (m[p] == 0)
      return false;
  return true;
}

std::vector<TransitionId> enabled(const PetriNet &net, const Marking &m) {
  std::vector<TransitionId> out;
  for (std::size_t i = 0; i < net.transition_count(); ++i) {
    const auto t = static_cast<TransitionId>(i);
    if (is_enabled(net, m, t))
      out.push_back(t);
  }
  return out;
}

Marking fire(const PetriNet &net, const Marking &m, TransitionId t) {
  const auto &pre = net.preset(t);
  for (const auto p : pre)
    if (m[p] == 0)
      throw FiringError(t, p,
                        "transition " + net.transition(t).name + " is not enabled: place " +
                            net.place(p).name + " is empty");
  Marking next = m;
  for (const auto p : pre)
    next.set(p, next[p] - 1);
  for (const auto p : net.postset(t))
    next.add(p);
  return next;
}

bool is_free_choice(const PetriNet &net) {
  for (std::size_t i = 0; i < net.place_count(); ++i) {
    const auto &consumers = net.consumers(static_cast<PlaceId>(i));
    if (consumers.size() < 2)
      continue;
    for (const auto t : consumers)
      if (net.preset(t).size() > 1)
        return false;
  }
  return true;
}

std::optional<std::size_t> ReachabilityGraph::find_state(const Marking &m) const {
  const auto it = state_index.find(m);
  if (it == state_index.end())
    return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ReachabilityGraph::successor(std::size_t state, TransitionId t) const {
  const auto [begin, end] = out_edges(state);
  for (auto e = begin; e < end; ++e)
    if (edges[e].transition == t)
      return edges[e].to;
  return std::nullopt;
}

ReachabilityGraph reachability_graph(const PetriNet &net, std::size_t state_cap) {
  ReachabilityGraph rg;
  auto intern = [&](Marking m) -> std::size_t {
    const auto [it, inserted] = rg.state_index.try_emplace(m, rg.states.size());
    if (inserted) {
      if (rg.states.size() >= state_cap)
        throw StateCapError(state_cap);
      rg.states.push_back(std::move(m));
    }
    return it->second;
  };
  intern(net.initial_marking());
  rg.edge_offsets.push_back(0);
  // states are appended in BFS order, so scanning them in index order is the BFS queue
  for (std::size_t s = 0; s < rg.states.size(); ++s) {
    const auto ts = enabled(net, rg.states[s]);
    if (ts.empty())
      rg.end_states.push_back(s);
    for (const auto t : ts) {
      auto next = fire(net, rg.states[s], t);
      const auto to = intern(std::move(next));
      rg.edges.push_back({s, t, to});
    }
    rg.edge_offsets.push_back(rg.edges.size());
  }
  return rg;
}

nlohmann::json net_to_json(const PetriNet &net) {
  using nlohmann::json;
  json places = json::array();
  json initial = json::object();
  for (const auto &p : net.places()) {
    places.push_back(p.name);
    if (p.initial_tokens > 0)
      initial[p.name] = p.initial_tokens;
  }
  json transitions = json::array();
  for (const auto &t : net.transitions())
    transitions.push_back({{"id", t.name}, {"label", t.label ? json(*t.label) : json(nullptr)}});
  json arcs = json::array();
  for (std::size_t i = 0; i < net.transition_count(); ++i) {
    const auto t = static_cast<TransitionId>(i);
    for (const auto p : net.preset(t))
      arcs.push_back(json::array({net.place(p).name, net.transition(t).name}));
    for (const auto p : net.postset(t))
      arcs.push_back(json::array({net.transition(t).name, net.place(p).name}));
  }
  return {{"places", places}, {"transitions", transitions}, {"arcs", arcs}, {"initial_marking", initial}};
}

PetriNet net_from_json(const nlohmann::json &doc) {
  try {
    PetriNet net;
    std::unordered_map<std::string, PlaceId> places;
    std::unordered_map<std::string, TransitionId> transitions;
    for (const auto &p : doc.at("places")) {
      const auto name = p.get<std::string>();
      if (places.count(name))
        throw NetError("duplicate place '" + name + "'");
      places.emplace(name, net.add_place(name));
    }
    for (const auto &t : doc.at("transitions")) {
      const auto name = t.at("id").get<std::string>();
      if (places.count(name) || transitions.count(name))
        throw NetError("duplicate node id '" + name + "'");
      std::optional<std::string> label;
      if (t.contains("label") && !t.at("label").is_null())
        label = t.at("label").get<std::string>();
      transitions.emplace(name, net.add_transition(name, std::move(label)));
    }
    for (const auto &arc : doc.at("arcs")) {
      if (!arc.is_array() || arc.size() != 2)
        throw NetError("arc must be a [from, to] pair");
      const auto from = arc[0].get<std::string>();
      const auto to = arc[1].get<std::string>();
      if (const auto p = places.find(from); p != places.end()) {
        const auto t = transitions.find(to);
        if (t == transitions.end())
          throw NetError("arc " + from + " -> " + to + " does not end at a transition");
        net.add_arc(p->second, t->second);
      } else if (const auto t = transitions.find(from); t != transitions.end()) {
        const auto q = places.find(to);
        if (q == places.end())
          throw NetError("arc " + from + " -> " + to + " does not end at a place");
        net.add_arc(t->second, q->second);
      } else {
        throw NetError("arc references unknown node '" + from + "'");
      }
    }
    if (doc.contains("initial_marking")) {
      for (const auto &[name, tokens] : doc.at("initial_marking").items()) {
        const auto p = places.find(name);
        if (p == places.end())
          throw NetError("initial marking references unknown place '" + name + "'");
        net.set_initial_tokens(p->second, tokens.get<std::uint32_t>());
      }
    }
    return net;
  } catch (const nlohmann::json::exception &e) {
    throw NetError(std::string("malformed net document: ") + e.what());
  }
}

} // namespace socmine
