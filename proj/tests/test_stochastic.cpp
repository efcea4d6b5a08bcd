#include <doctest.h>

#include <cmath>

#include "socmine/discovery.hpp"
#include "socmine/stochastic.hpp"
#include "support.hpp"

using namespace socmine;
using fixtures::make_trace;

namespace {

std::map<std::string, std::int64_t> waits_by_label(const PetriNet &net, const ReplayResult &r) {
  std::map<std::string, std::int64_t> out;
  for (const auto &[t, w] : r.waits)
    out[*net.transition(t).label] = w;
  return out;
}

} // namespace

TEST_CASE("replay waits on the concurrency and chain nets") {
  const auto trace = make_trace("x", {{"A", 0}, {"B", 5}, {"C", 7}});
  const auto par = fixtures::concurrency_net();
  const auto r = replay_trace(par, trace);
  REQUIRE(r.conforming);
  CHECK(waits_by_label(par, r) == std::map<std::string, std::int64_t>{{"A", 0}, {"B", 5}, {"C", 7}});

  const auto seq = fixtures::chain_net({"A", "B", "C"});
  const auto s = replay_trace(seq, trace);
  REQUIRE(s.conforming);
  CHECK(s.completed);
  CHECK(waits_by_label(seq, s) == std::map<std::string, std::int64_t>{{"A", 0}, {"B", 5}, {"C", 2}});

  const auto ab = replay_trace(fixtures::chain_net({"A", "B"}), make_trace("y", {{"A", 0}, {"B", 5}}));
  CHECK(ab.waits.back().second == 5);

  const auto bad = replay_trace(par, make_trace("z", {{"B", 0}}));
  CHECK_FALSE(bad.conforming);
  CHECK(bad.failed_at == 0);
}

TEST_CASE("replay through silent moves on a discovered net") {
  const auto net = tree_to_net(parse_process_tree("->(A, /\\(B, C))"));
  const auto r = replay_trace(net, make_trace("x", {{"A", 10}, {"B", 15}, {"C", 17}}));
  REQUIRE(r.conforming);
  CHECK(r.completed);
  std::int64_t previous = 0;
  for (const auto &f : r.firings) {
    CHECK(f.fired_at >= f.enabled_at);
    CHECK(f.fired_at >= previous);
    previous = f.fired_at;
  }
  CHECK(waits_by_label(net, r) == std::map<std::string, std::int64_t>{{"A", 0}, {"B", 5}, {"C", 7}});
}

TEST_CASE("enrichment frequencies") {
  const auto fspn = fixtures::threshold_fspn();
  EventLog log;
  for (int i = 0; i < 10; ++i) {
    std::vector<std::pair<std::string, Timestamp>> events{{"A", 0}};
    if (i < 8)
      events.push_back({"B", 4});
    if (i < 5)
      events.push_back({"C", 9});
    log.traces.push_back(make_trace("t" + std::to_string(i), events));
  }
  const auto enriched = enrich(fspn.net, log);
  const auto &net = enriched.net;
  auto pr = [&](const char *p, const char *t) { return enriched.probability(*net.find_place(p), *net.find_transition(t)); };
  CHECK(pr("p1", "A") == 1.0);
  CHECK(pr("p2", "B") == doctest::Approx(0.8));
  CHECK(pr("p2", "skip_B") == doctest::Approx(0.2));
  CHECK(pr("p3", "C") == doctest::Approx(0.5));
  CHECK(enriched.delays.at(*net.find_transition("B")).samples.size() == 8);
  CHECK_FALSE(enriched.delays.count(*net.find_transition("skip_B")));
  CHECK_NOTHROW(enriched.validate());

  EventLog nothing;
  nothing.traces.push_back(make_trace("n", {{"Z", 0}}));
  CHECK_THROWS_AS(enrich(fspn.net, nothing), EnrichmentError);
}

TEST_CASE("only fired visible transitions carry delays") {
  const auto net = tree_to_net(parse_process_tree("->(A, X(B, C, D))"));
  EventLog log;
  log.traces.push_back(make_trace("1", {{"A", 0}, {"B", 1}}));
  const auto enriched = enrich(net, log);
  CHECK_NOTHROW(enriched.validate());
  std::size_t with_delay = 0;
  for (const auto &[t, d] : enriched.delays) {
    CHECK_FALSE(net.transition(t).silent());
    ++with_delay;
  }
  CHECK(with_delay == 2);
}

TEST_CASE("waiting-time statistics") {
  PetriNet net;
  const auto p = net.add_place("p", 1);
  const auto b = net.add_transition("B", "B");
  const auto c = net.add_transition("C", "C");
  net.add_arc(p, b);
  net.add_arc(p, c);
  std::vector<ReplayResult> replays(2);
  replays[0].waits = {{b, 5}, {c, 1}};
  replays[1].waits = {{b, 7}};
  const auto stats = waiting_time_stats(net, replays);
  CHECK(stats.mean_of_means == doctest::Approx(3.5));
  CHECK(stats.per_activity.at("B").count == 2);
  CHECK(stats.per_activity.at("B").median == doctest::Approx(6.0));

  std::vector<ReplayResult> single(1);
  single[0].waits = {{b, 42}};
  CHECK(waiting_time_stats(net, single).mean_of_means == 42.0);

  std::vector<ReplayResult> none(1);
  none[0].conforming = false;
  none[0].waits = {{b, 1}};
  CHECK_THROWS_AS(waiting_time_stats(net, none), EmptyStatisticsError);
}

TEST_CASE("simulation") {
  const auto fspn = fixtures::threshold_fspn();
  const auto log = simulate(fspn, 10'000, 7);
  REQUIRE(log.traces.size() == 10'000);
  std::size_t with_b = 0;
  for (const auto &trace : log.traces) {
    for (const auto &e : trace.events)
      if (e.activity == "B") {
        ++with_b;
        break;
      }
  }
  const double fraction = static_cast<double>(with_b) / 10'000.0;
  CHECK(fraction >= 0.78);
  CHECK(fraction <= 0.82);

  for (const auto &r : replay_log(fspn.net, log))
    CHECK(r.conforming);

  CHECK(simulate(fspn, 10, 3) == simulate(fspn, 10, 3));
  CHECK(simulate(fspn, 0, 3).traces.empty());
  CHECK_THROWS_AS(simulate(fspn, -1, 3), std::invalid_argument);

  StochasticPetriNet chain;
  chain.net = fixtures::chain_net({"a", "b", "c"});
  for (std::size_t t = 0; t < 3; ++t)
    chain.delays[static_cast<TransitionId>(t)] = {{4}};
  for (std::size_t p = 0; p < 3; ++p)
    chain.arc_probabilities[{static_cast<PlaceId>(p), static_cast<TransitionId>(p)}] = 1.0;
  const auto same = simulate(chain, 20, 1);
  for (const auto &trace : same.traces) {
    REQUIRE(trace.events.size() == 3);
    CHECK(trace.events[2].timestamp == 12);
    CHECK(trace.events[1].activity == same.traces[0].events[1].activity);
  }
}

TEST_CASE("enrich recovers simulated branch probabilities") {
  const auto fspn = fixtures::threshold_fspn();
  const auto enriched = enrich(fspn.net, simulate(fspn, 10'000, 2024));
  for (const auto &[arc, pr] : fspn.arc_probabilities)
    CHECK(std::abs(enriched.arc_probabilities.at(arc) - pr) <= 0.05);
}

TEST_CASE("stochastic net JSON round trip and validation") {
  const auto fspn = fixtures::threshold_fspn();
  CHECK(fspn_from_json(fspn_to_json(fspn)) == fspn);

  auto broken = fspn;
  broken.arc_probabilities.begin()->second = 0.5;
  CHECK_THROWS(broken.validate());
  auto silent_delay = fspn;
  silent_delay.delays[*fspn.net.find_transition("skip_B")] = {{1}};
  CHECK_THROWS(silent_delay.validate());
}
