#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace socmine {

/// Seconds since the Unix epoch.
using Timestamp = std::int64_t;

struct Event {
  std::string trace_id;
  std::string activity;
  Timestamp timestamp = 0;
  std::optional<double> bot_score;

  friend bool operator==(const Event &, const Event &) = default;
};

/// Events of one original post, ascending by timestamp.
struct Trace {
  std::string trace_id;
  std::vector<Event> events;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }
  friend bool operator==(const Trace &, const Trace &) = default;
};

struct EventLog {
  std::vector<Trace> traces;

  /// Union of the activities of all traces.
  std::set<std::string> activities() const;
  std::size_t event_count() const;
  friend bool operator==(const EventLog &, const EventLog &) = default;
};

/// Directly-follows counts.
struct Dfg {
  std::map<std::pair<std::string, std::string>, std::uint64_t> edges;
  std::map<std::string, std::uint64_t> starts;
  std::map<std::string, std::uint64_t> ends;

  bool empty() const { return edges.empty() && starts.empty() && ends.empty(); }
  std::set<std::string> activities() const;
  friend bool operator==(const Dfg &, const Dfg &) = default;
};

enum class TimestampFormat { iso8601, epoch_seconds };

struct LogSchema {
  std::string trace_column = "trace_id";
  std::string activity_column = "activity";
  std::string timestamp_column = "timestamp";
  std::optional<std::string> bot_score_column;
  char delimiter = ',';
  TimestampFormat timestamp_format = TimestampFormat::iso8601;

  /// Parses "trace=col;activity=col;timestamp=col;bot_score=col;format=epoch;delimiter=\t".
  /// Unspecified keys keep their defaults.
  static LogSchema parse(const std::string &text);
};

/// The header lacks a mandatory column, or the schema text is malformed.
class SchemaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RowError {
  std::size_t line = 0; // 1-based, header is line 1
  std::string message;
};

struct ParseResult {
  EventLog log;
  std::vector<RowError> rejected;
  std::size_t accepted_rows = 0;
};

/// Reads delimiter-separated rows into a log. Malformed rows are reported in
/// `rejected` and skipped; a bad header throws SchemaError.
///
/// Traces are ordered by earliest event timestamp, ties by first appearance
/// in the input. Events inside a trace are stably sorted by timestamp.
ParseResult parse_log(std::istream &in, const LogSchema &schema);

/// Writes trace,activity,timestamp[,bot_score] rows using the schema's column
/// names, delimiter and timestamp format.
void write_log(std::ostream &out, const EventLog &log, const LogSchema &schema = {});

Timestamp parse_timestamp(const std::string &text, TimestampFormat format);
std::string format_timestamp(Timestamp ts, TimestampFormat format);

/// Keeps the earliest `max_events` events of each trace and the `max_traces`
/// traces with the earliest first event.
EventLog preprocess(const EventLog &log, std::size_t max_events, std::size_t max_traces);

/// Routes events with score > high to the first log and score < low to the
/// second. Traces emptied by the split are dropped.
std::pair<EventLog, EventLog> split_by_bot_score(const EventLog &log, double high, double low);

Dfg build_dfg(const EventLog &log);

} // namespace socmine
