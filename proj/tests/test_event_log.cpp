#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "socmine/event_log.hpp"
#include "support.hpp"

using namespace socmine;

namespace {

ParseResult parse(const std::string &text, const LogSchema &schema = {}) {
  std::istringstream in(text);
  return parse_log(in, schema);
}

} // namespace

TEST_CASE("a row maps onto an event") {
  const auto r = parse("trace_id,activity,timestamp\n123,alice,2019-01-01T00:00:00Z\n");
  REQUIRE(r.rejected.empty());
  REQUIRE(r.log.traces.size() == 1);
  const auto &e = r.log.traces[0].events.at(0);
  CHECK(e.trace_id == "123");
  CHECK(e.activity == "alice");
  CHECK(e.timestamp == 1546300800);
  CHECK_FALSE(e.bot_score);
}

TEST_CASE("events are sorted by time within a trace") {
  const auto r = parse("trace_id,activity,timestamp\n"
                       "123,bob,2019-01-01T00:05:00Z\n"
                       "123,alice,2019-01-01T00:00:00Z\n");
  REQUIRE(r.log.traces.size() == 1);
  CHECK(r.log.traces[0].events[0].activity == "alice");
  CHECK(r.log.traces[0].events[1].activity == "bob");
}

TEST_CASE("bad rows are rejected with their line number") {
  const auto r = parse("trace_id,activity,timestamp,bot\n"
                       "1,a,2019-01-01T00:00:00Z,0.5\n"
                       "1,b,not-a-date,0.5\n"
                       "1,c,2019-01-01T00:00:01Z,1.5\n"
                       "1,,2019-01-01T00:00:02Z,0.5\n",
                       LogSchema::parse("bot_score=bot"));
  REQUIRE(r.rejected.size() == 3);
  CHECK(r.rejected[0].line == 3);
  CHECK(r.rejected[0].message.find("not-a-date") != std::string::npos);
  CHECK(r.rejected[1].line == 4);
  CHECK(r.rejected[2].line == 5);
  CHECK(r.accepted_rows == 1);
  CHECK(r.log.event_count() == 1);
}

TEST_CASE("a missing mandatory column is fatal") {
  CHECK_THROWS_AS(parse("trace_id,activity\n1,a\n"), SchemaError);
  CHECK_THROWS_AS(LogSchema::parse("colour=red"), SchemaError);
}

TEST_CASE("schema mapping, epoch timestamps, quoting and other delimiters") {
  const auto schema = LogSchema::parse("trace=post;activity=user;timestamp=t;format=epoch;delimiter=|");
  CHECK(schema.delimiter == '|');
  const auto r = parse("user|post|t\n\"x|y\"|p1|10\nz|p1|5\n", schema);
  REQUIRE(r.rejected.empty());
  REQUIRE(r.log.traces.size() == 1);
  CHECK(r.log.traces[0].events[0].activity == "z");
  CHECK(r.log.traces[0].events[1].activity == "x|y");
  CHECK(r.log.traces[0].events[1].timestamp == 10);

  const auto tabs = LogSchema::parse("delimiter=\\t");
  CHECK(tabs.delimiter == '\t');
}

TEST_CASE("ISO-8601 offsets and fractions") {
  CHECK(parse_timestamp("2019-01-01T01:00:00+01:00", TimestampFormat::iso8601) == 1546300800);
  CHECK(parse_timestamp("2019-01-01T00:00:00.999Z", TimestampFormat::iso8601) == 1546300800);
  CHECK(parse_timestamp("2019-01-01 00:00:00", TimestampFormat::iso8601) == 1546300800);
  CHECK_THROWS(parse_timestamp("2019-02-30T00:00:00Z", TimestampFormat::iso8601));
  CHECK(format_timestamp(1546300800, TimestampFormat::iso8601) == "2019-01-01T00:00:00Z");
  CHECK(format_timestamp(-5, TimestampFormat::epoch_seconds) == "-5");
}

TEST_CASE("shuffled rows parse to the same log") {
  std::vector<std::string> rows;
  for (int t = 0; t < 8; ++t)
    for (int e = 0; e < 6; ++e)
      rows.push_back("c" + std::to_string(t) + ",u" + std::to_string((t * 7 + e * 3) % 5) + "," +
                     std::to_string(1000 * t + 10 * e));
  auto text = [&] {
    std::string s = "trace_id,activity,timestamp\n";
    for (const auto &r : rows)
      s += r + "\n";
    return s;
  };
  const auto schema = LogSchema::parse("format=epoch");
  const auto reference = parse(text(), schema).log;
  std::mt19937 rng(7);
  for (int round = 0; round < 5; ++round) {
    std::shuffle(rows.begin(), rows.end(), rng);
    CHECK(parse(text(), schema).log == reference);
  }
}

TEST_CASE("write_log round trips") {
  const auto schema = LogSchema::parse("bot_score=bot");
  const auto r = parse("trace_id,activity,timestamp,bot\n"
                       "1,a,2019-01-01T00:00:00Z,0.25\n"
                       "1,b,2019-01-01T00:00:09Z,1\n"
                       "2,\"c,d\",2019-01-02T00:00:00Z,0\n",
                       schema);
  std::ostringstream out;
  write_log(out, r.log, schema);
  CHECK(parse(out.str(), schema).log == r.log);
}

TEST_CASE("preprocess truncates traces and keeps the earliest ones") {
  EventLog log;
  std::vector<std::pair<std::string, Timestamp>> long_trace;
  for (int i = 0; i < 15; ++i)
    long_trace.push_back({"u" + std::to_string(i), i});
  log.traces.push_back(fixtures::make_trace("long", long_trace));
  log.traces.push_back(fixtures::make_trace("short", {{"a", 3}, {"b", 4}, {"c", 5}}));
  const auto cut = preprocess(log, 10, 100);
  CHECK(cut.traces[0].size() == 10);
  CHECK(cut.traces[0].events.back().activity == "u9");
  CHECK(cut.traces[1] == log.traces[1]);

  EventLog many;
  for (int i = 0; i < 500; ++i)
    many.traces.push_back(fixtures::make_trace("t" + std::to_string(i), {{"a", 500 - i}}));
  const auto first = preprocess(many, 10, 300);
  REQUIRE(first.traces.size() == 300);
  for (const auto &trace : first.traces)
    CHECK(trace.events[0].timestamp <= 300);

  CHECK(preprocess(EventLog{}, 10, 10).traces.empty());
  CHECK_THROWS(preprocess(log, 0, 10));
}

TEST_CASE("truncation is prefix-monotone") {
  const auto log = fixtures::make_log({{"a", "b", "c", "d", "e"}, {"x", "y"}, {"p", "q", "r"}});
  for (std::size_t k = 1; k < 6; ++k) {
    const auto small = preprocess(log, k, 10);
    const auto large = preprocess(log, k + 1, 10);
    for (std::size_t i = 0; i < small.traces.size(); ++i)
      CHECK(std::equal(small.traces[i].events.begin(), small.traces[i].events.end(), large.traces[i].events.begin()));
  }
}

TEST_CASE("bot-score split") {
  EventLog log;
  Trace t{"1", {}};
  t.events.push_back({"1", "bot", 0, 0.95});
  t.events.push_back({"1", "human", 1, 0.05});
  t.events.push_back({"1", "unsure", 2, 0.5});
  log.traces.push_back(t);
  log.traces.push_back({"2", {{"2", "unsure", 5, 0.6}}});
  const auto [high, low] = split_by_bot_score(log, 0.9, 0.1);
  REQUIRE(high.traces.size() == 1);
  REQUIRE(low.traces.size() == 1);
  CHECK(high.traces[0].events.size() == 1);
  CHECK(high.traces[0].events[0].activity == "bot");
  CHECK(low.traces[0].events[0].activity == "human");

  log.traces[1].events[0].bot_score.reset();
  CHECK_THROWS(split_by_bot_score(log, 0.9, 0.1));
  CHECK_THROWS(split_by_bot_score(EventLog{}, 0.1, 0.9));
}

TEST_CASE("directly-follows counts") {
  const auto dfg = build_dfg(fixtures::make_log({{"A", "B", "C"}, {"A", "C", "B"}}));
  const std::map<std::pair<std::string, std::string>, std::uint64_t> edges{
      {{"A", "B"}, 1}, {{"B", "C"}, 1}, {{"A", "C"}, 1}, {{"C", "B"}, 1}};
  CHECK(dfg.edges == edges);
  CHECK(dfg.starts == std::map<std::string, std::uint64_t>{{"A", 2}});
  CHECK(dfg.ends == std::map<std::string, std::uint64_t>{{"B", 1}, {"C", 1}});

  const auto single = build_dfg(fixtures::make_log({{"A"}}));
  CHECK(single.edges.empty());
  CHECK(single.starts.at("A") == 1);
  CHECK(single.ends.at("A") == 1);
  CHECK(build_dfg(EventLog{}).empty());
}

TEST_CASE("edge total equals adjacent pairs") {
  const auto log = fixtures::make_log({{"a", "b", "a", "a"}, {"c"}, {}, {"b", "c", "b"}});
  std::uint64_t total = 0;
  for (const auto &[edge, n] : build_dfg(log).edges)
    total += n;
  CHECK(total == 3 + 0 + 0 + 2);
}
