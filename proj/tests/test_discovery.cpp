#include <doctest.h>

#include <random>

#include "socmine/analysis.hpp"
#include "socmine/discovery.hpp"
#include "socmine/stochastic.hpp"
#include "support.hpp"

using namespace socmine;
using fixtures::make_log;

namespace {

Dfg dfg_of(std::map<std::pair<std::string, std::string>, std::uint64_t> edges,
           std::map<std::string, std::uint64_t> starts, std::map<std::string, std::uint64_t> ends) {
  return Dfg{std::move(edges), std::move(starts), std::move(ends)};
}

std::string discover(const std::vector<std::vector<std::string>> &traces, double threshold = 0.2) {
  return discover_tree(make_log(traces), threshold).to_string();
}

// Source and sink places are unique and every node lies on a source-sink path.
bool is_workflow_net(const PetriNet &net) {
  std::vector<PlaceId> sources, sinks;
  for (std::size_t i = 0; i < net.place_count(); ++i) {
    const auto p = static_cast<PlaceId>(i);
    if (net.producers(p).empty())
      sources.push_back(p);
    if (net.consumers(p).empty())
      sinks.push_back(p);
  }
  if (sources.size() != 1 || sinks.size() != 1)
    return false;
  const auto np = net.place_count(), n = net.node_count();
  auto search = [&](std::size_t start, bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      std::vector<std::size_t> next;
      if (u < np) {
        const auto p = static_cast<PlaceId>(u);
        for (const auto t : forward ? net.consumers(p) : net.producers(p))
          next.push_back(np + index(t));
      } else {
        const auto t = static_cast<TransitionId>(u - np);
        for (const auto p : forward ? net.postset(t) : net.preset(t))
          next.push_back(index(p));
      }
      for (const auto v : next)
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
    }
    return seen;
  };
  const auto from_source = search(index(sources[0]), true);
  const auto to_sink = search(index(sinks[0]), false);
  for (std::size_t v = 0; v < n; ++v)
    if (!from_source[v] || !to_sink[v])
      return false;
  return true;
}

} // namespace

TEST_CASE("noise filter") {
  const auto dfg = dfg_of({{{"a", "B"}, 100}, {{"a", "C"}, 10}, {{"B", "C"}, 3}}, {{"a", 50}, {"B", 5}},
                          {{"C", 40}, {"B", 20}});
  const auto filtered = filter_dfg(dfg, 0.2);
  CHECK(filtered.edges.count({"a", "B"}));
  CHECK_FALSE(filtered.edges.count({"a", "C"}));
  CHECK(filtered.edges.count({"B", "C"}));
  CHECK(filtered.starts == std::map<std::string, std::uint64_t>{{"a", 50}});
  CHECK(filtered.ends.size() == 2);

  CHECK(filter_dfg(dfg, 0.0) == dfg);
  const auto strict = filter_dfg(dfg, 1.0);
  CHECK(strict.edges.size() == 2);
  CHECK(strict.starts.size() == 1);
  CHECK(strict.ends.size() == 1);
}

TEST_CASE("cut detection") {
  const auto log = make_log({{"A", "B", "C"}, {"A", "C", "B"}});
  const auto cut = find_cut(build_dfg(log), {"A", "B", "C"});
  REQUIRE(cut);
  CHECK(cut->kind == Cut::Kind::sequence);
  CHECK(cut->blocks == std::vector<std::set<std::string>>{{"A"}, {"B", "C"}});

  const auto bc = dfg_of({{{"B", "C"}, 1}, {{"C", "B"}, 1}}, {{"B", 1}, {"C", 1}}, {{"B", 1}, {"C", 1}});
  const auto par = find_cut(bc, {"B", "C"});
  REQUIRE(par);
  CHECK(par->kind == Cut::Kind::parallel);
  CHECK(par->blocks == std::vector<std::set<std::string>>{{"B"}, {"C"}});

  CHECK_FALSE(find_cut(dfg_of({}, {{"A", 1}}, {{"A", 1}}), {"A"}));

  const auto xor_cut = find_cut(build_dfg(make_log({{"A", "B"}, {"C"}})), {"A", "B", "C"});
  REQUIRE(xor_cut);
  CHECK(xor_cut->kind == Cut::Kind::exclusive_choice);

  const auto loop_cut = find_cut(build_dfg(make_log({{"A", "B"}, {"A", "B", "C", "A", "B"}})), {"A", "B", "C"});
  REQUIRE(loop_cut);
  CHECK(loop_cut->kind == Cut::Kind::loop);
  CHECK(loop_cut->blocks == std::vector<std::set<std::string>>{{"A", "B"}, {"C"}});
}

TEST_CASE("discovered trees") {
  CHECK(discover({{"A", "B", "C"}, {"A", "C", "B"}}) == "->(A, /\\(B, C))");
  CHECK(discover(std::vector<std::vector<std::string>>(10, {"A"})) == "A");
  CHECK(discover({{"A", "B", "A"}, {"B", "A", "B"}, {"A"}, {"B", "B"}}, 0.0) == "*(tau, A, B)");
  CHECK(discover({{"A", "A"}, {"A"}}) == "*(A, tau)");
  CHECK(discover({{"A", "B"}, {"A", "C"}}) == "->(A, X(B, C))");
  CHECK(discover({{"A", "B"}, {}}) == "X(tau, ->(A, B))");
  auto rare_empty = std::vector<std::vector<std::string>>(19, {"A", "B"});
  rare_empty.push_back({});
  CHECK(discover(rare_empty) == "X(tau, ->(A, B))");
  CHECK(discover({}) == "tau");
}

TEST_CASE("tree text round trip") {
  for (const std::string text : {"->(A, /\\(B, C))", "*(tau, A, B)", "X(tau, ->(\"a b\", \"c,d\"))", "tau", "A"})
    CHECK(parse_process_tree(text).to_string() == text);
  CHECK_THROWS(parse_process_tree("->(A"));
  CHECK_THROWS(parse_process_tree("->(A)"));
  CHECK_THROWS(parse_process_tree("A B"));
}

TEST_CASE("tree to net") {
  const auto seq = tree_to_net(parse_process_tree("->(A, /\\(B, C))"));
  CHECK(is_free_choice(seq));
  CHECK(is_workflow_net(seq));
  CHECK(fixtures::language(seq) == fixtures::language(fixtures::concurrency_net()));

  const auto leaf = tree_to_net(ProcessTree::leaf("A"));
  CHECK(leaf.node_count() == 3);
  CHECK(density(leaf) == doctest::Approx(1.0 / 3.0));

  const auto flower = tree_to_net(parse_process_tree("*(tau, A, B)"));
  CHECK(is_free_choice(flower));
  CHECK(is_workflow_net(flower));
  const auto words = fixtures::language(flower, 16);
  for (const auto &w : std::set<std::vector<std::string>>{{}, {"A"}, {"B", "A", "B"}, {"B", "B", "A", "A"}})
    CHECK(words.count(w));
}

TEST_CASE("reduced net of the concurrency tree") {
  const auto reduced = reduce_silent(tree_to_net(parse_process_tree("->(A, /\\(B, C))")));
  CHECK(reduced.node_count() == 6);
  CHECK(reduced.arc_count() == 5);
  CHECK(density(reduced) == doctest::Approx(5.0 / 30.0).epsilon(1e-12));
  CHECK(diameter(reduced) == 3);
  CHECK(fixtures::language(reduced) == fixtures::language(fixtures::concurrency_net()));
}

TEST_CASE("random logs: free-choice workflow nets that replay every trace at threshold 0") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> alphabet{"a", "b", "c", "d", "e"};
  for (int round = 0; round < 150; ++round) {
    std::vector<std::vector<std::string>> traces;
    const auto n = 1 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> trace;
      const auto len = rng() % 6;
      for (std::size_t j = 0; j < len; ++j)
        trace.push_back(alphabet[rng() % (2 + round % 4)]);
      traces.push_back(trace);
    }
    const auto log = make_log(traces);
    const auto tree = discover_tree(log, 0.0);
    CAPTURE(tree.to_string());
    CHECK(discover_tree(log, 0.0) == tree);
    const auto net = tree_to_net(tree);
    CHECK(is_free_choice(net));
    CHECK(is_workflow_net(net));
    const auto reduced = reduce_silent(net);
    CHECK(is_free_choice(reduced));
    for (const auto &r : replay_log(net, log)) {
      CHECK(r.conforming);
      CHECK(r.completed);
    }
  }
}
