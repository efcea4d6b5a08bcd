#include <doctest.h>

#include "socmine/petri_net.hpp"
#include "support.hpp"

using namespace socmine;

namespace {

PlaceId P(const PetriNet &net, const std::string &name) { return *net.find_place(name); }
TransitionId T(const PetriNet &net, const std::string &name) { return *net.find_transition(name); }

} // namespace

TEST_CASE("enabled transitions") {
  const auto net = fixtures::concurrency_net();
  CHECK(enabled(net, net.initial_marking()) == std::vector{T(net, "A")});
  const Marking after_a{{P(net, "p2"), 1}, {P(net, "p3"), 1}};
  CHECK(enabled(net, after_a) == std::vector{T(net, "B"), T(net, "C")});
  CHECK(enabled(net, Marking{}).empty());
}

TEST_CASE("firing") {
  const auto net = fixtures::concurrency_net();
  const auto m = fire(net, net.initial_marking(), T(net, "A"));
  CHECK(m == Marking{{P(net, "p2"), 1}, {P(net, "p3"), 1}});

  try {
    fire(net, net.initial_marking(), T(net, "B"));
    FAIL("expected a firing error");
  } catch (const FiringError &e) {
    CHECK(e.place == P(net, "p2"));
    CHECK(e.transition == T(net, "B"));
  }

  PetriNet loop;
  const auto p = loop.add_place("p", 1);
  const auto q = loop.add_place("q");
  const auto t = loop.add_transition("t", "t");
  loop.add_arc(p, t);
  loop.add_arc(t, p);
  loop.add_arc(t, q);
  const auto after = fire(loop, loop.initial_marking(), t);
  CHECK(after[p] == 1);
  CHECK(after[q] == 1);
  CHECK(after.total() == 2);
}

TEST_CASE("construction errors") {
  PetriNet net;
  const auto p = net.add_place("p");
  const auto t = net.add_transition("t", std::nullopt);
  net.add_arc(p, t);
  CHECK_THROWS_AS(net.add_arc(p, t), NetError);
  CHECK_THROWS_AS(net.add_place("p"), NetError);
  CHECK_THROWS_AS(net.add_transition("p", "x"), NetError);
  CHECK_THROWS_AS(net.add_arc(static_cast<PlaceId>(7), t), NetError);
  CHECK(net.display_label(t) == "tau");
}

TEST_CASE("free choice") {
  CHECK(is_free_choice(fixtures::concurrency_net()));
  CHECK(is_free_choice(fixtures::threshold_fspn().net));

  PetriNet bad;
  const auto p = bad.add_place("p", 1);
  const auto extra = bad.add_place("extra", 1);
  const auto t1 = bad.add_transition("t1", "a");
  const auto t2 = bad.add_transition("t2", "b");
  bad.add_arc(p, t1);
  bad.add_arc(p, t2);
  bad.add_arc(extra, t1);
  CHECK_FALSE(is_free_choice(bad));

  CHECK(is_free_choice(fixtures::chain_net({"a", "b", "c"})));
}

TEST_CASE("reachability graph of the concurrency net") {
  const auto net = fixtures::concurrency_net();
  const auto rg = reachability_graph(net);
  CHECK(rg.states.size() == 5);
  CHECK(rg.edges.size() == 5);
  CHECK(rg.states[0] == net.initial_marking());
  CHECK(rg.end_states.size() == 1);
  const std::set<std::vector<std::string>> expected{{"A", "B", "C"}, {"A", "C", "B"}};
  CHECK(fixtures::language(net) == expected);
  for (std::size_t s = 0; s < rg.states.size(); ++s) {
    const auto [b, e] = rg.out_edges(s);
    for (auto i = b; i < e; ++i) {
      CHECK(rg.edges[i].from == s);
      CHECK(fire(net, rg.states[s], rg.edges[i].transition) == rg.states[rg.edges[i].to]);
    }
  }
  const auto again = reachability_graph(net);
  CHECK(again.states == rg.states);
  CHECK(again.end_states == rg.end_states);
}

TEST_CASE("reachability corner cases") {
  PetriNet dead;
  dead.add_place("p");
  dead.add_transition("t", "t");
  dead.add_arc(dead.find_place("p").value(), dead.find_transition("t").value());
  const auto rg = reachability_graph(dead);
  CHECK(rg.states.size() == 1);
  CHECK(rg.edges.empty());

  PetriNet source;
  const auto t = source.add_transition("gen", "g");
  source.add_arc(t, source.add_place("out"));
  CHECK_THROWS_AS(reachability_graph(source, 1000), StateCapError);
}

TEST_CASE("token conservation") {
  const auto fspn = fixtures::threshold_fspn();
  const auto rg = reachability_graph(fspn.net);
  for (const auto &edge : rg.edges) {
    const auto before = static_cast<std::int64_t>(rg.states[edge.from].total());
    const auto after = static_cast<std::int64_t>(rg.states[edge.to].total());
    CHECK(after - before == static_cast<std::int64_t>(fspn.net.postset(edge.transition).size()) -
                                static_cast<std::int64_t>(fspn.net.preset(edge.transition).size()));
  }
}

TEST_CASE("net JSON round trip") {
  const auto net = fixtures::threshold_fspn().net;
  const auto doc = net_to_json(net);
  CHECK(net_from_json(doc) == net);
  CHECK(doc["transitions"][2]["label"].is_null());
  CHECK(doc["initial_marking"]["p1"] == 1);
  CHECK_THROWS(net_from_json(nlohmann::json::parse(R"({"places":["p"],"transitions":[],"arcs":[["p","x"]]})")));
}
