#include "socmine/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace socmine {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// RFC-4180 style: fields may be quoted, "" escapes a quote inside quotes.
std::vector<std::string> split_row(const std::string &line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(trim(field));
  return fields;
}

std::string quote_field(const std::string &value, char delimiter) {
  if (value.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos)
    return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"')
      out += "\"\"";
    else
      out.push_back(c);
  }
  out.push_back('"');
  return out;
}

template <typename Int> bool read_int(std::string_view s, std::size_t &pos, std::size_t digits, Int &out) {
  if (pos + digits > s.size())
    return false;
  const auto *begin = s.data() + pos;
  const auto [ptr, ec] = std::from_chars(begin, begin + digits, out);
  if (ec != std::errc{} || ptr != begin + digits)
    return false;
  pos += digits;
  return true;
}

bool expect(std::string_view s, std::size_t &pos, char c) {
  if (pos < s.size() && s[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

std::invalid_argument bad_timestamp(const std::string &text) {
  return std::invalid_argument("unparseable timestamp '" + text + "'");
}

Timestamp parse_iso8601(const std::string &text) {
  using namespace std::chrono;
  const std::string_view s = text;
  std::size_t pos = 0;
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!read_int(s, pos, 4, y) || !expect(s, pos, '-') || !read_int(s, pos, 2, mo) ||
      !expect(s, pos, '-') || !read_int(s, pos, 2, d))
    throw bad_timestamp(text);
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ')
      throw bad_timestamp(text);
    ++pos;
    if (!read_int(s, pos, 2, h) || !expect(s, pos, ':') || !read_int(s, pos, 2, mi))
      throw bad_timestamp(text);
    if (expect(s, pos, ':') && !read_int(s, pos, 2, sec))
      throw bad_timestamp(text);
    // Fractional seconds are truncated to whole seconds.
    if (expect(s, pos, '.') || expect(s, pos, ',')) {
      const auto start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9')
        ++pos;
      if (pos == start)
        throw bad_timestamp(text);
    }
  }
  long offset = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const long sign = s[pos] == '-' ? -1 : 1;
      ++pos;
      unsigned oh = 0, om = 0;
      if (!read_int(s, pos, 2, oh))
        throw bad_timestamp(text);
      expect(s, pos, ':');
      if (pos < s.size() && !read_int(s, pos, 2, om))
        throw bad_timestamp(text);
      offset = sign * static_cast<long>(oh * 3600 + om * 60);
    }
  }
  if (pos != s.size() || h > 23 || mi > 59 || sec > 60)
    throw bad_timestamp(text);
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok())
    throw bad_timestamp(text);
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days_since_epoch) * 86400 + h * 3600 + mi * 60 + sec - offset;
}

} // namespace

std::set<std::string> EventLog::activities() const {
  std::set<std::string> out;
  for (const auto &trace : traces)
    for (const auto &event : trace.events)
      out.insert(event.activity);
  return out;
}

std::size_t EventLog::event_count() const {
  std::size_t n = 0;
  for (const auto &trace : traces)
    n += trace.events.size();
  return n;
}

std::set<std::string> Dfg::activities() const {
  std::set<std::string> out;
  for (const auto &[edge, count] : edges) {
    out.insert(edge.first);
    out.insert(edge.second);
  }
  for (const auto &[a, count] : starts)
    out.insert(a);
  for (const auto &[a, count] : ends)
    out.insert(a);
  return out;
}

LogSchema LogSchema::parse(const std::string &text) {
  LogSchema schema;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (trim(item).empty())
      continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw SchemaError("schema entry '" + item + "' is not key=value");
    const auto key = trim(std::string_view(item).substr(0, eq));
    const std::string value = item.substr(eq + 1);
    if (key == "trace")
      schema.trace_column = trim(value);
    else if (key == "activity")
      schema.activity_column = trim(value);
    else if (key == "timestamp")
      schema.timestamp_column = trim(value);
    else if (key == "bot_score")
      schema.bot_score_column = trim(value);
    else if (key == "format") {
      const auto f = trim(value);
      if (f == "iso8601" || f == "iso")
        schema.timestamp_format = TimestampFormat::iso8601;
      else if (f == "epoch" || f == "epoch_seconds")
        schema.timestamp_format = TimestampFormat::epoch_seconds;
      else
        throw SchemaError("unknown timestamp format '" + f + "'");
    } else if (key == "delimiter") {
      if (value == "\\t" || value == "tab")
        schema.delimiter = '\t';
      else if (value.size() == 1)
        schema.delimiter = value[0];
      else
        throw SchemaError("delimiter must be a single character");
    } else {
      throw SchemaError("unknown schema key '" + key + "'");
    }
  }
  return schema;
}

Timestamp parse_timestamp(const std::string &text, TimestampFormat format) {
  if (format == TimestampFormat::iso8601)
    return parse_iso8601(text);
  Timestamp ts = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), ts);
  if (ec == std::errc{} && ptr == text.data() + text.size())
    return ts;
  // Accept "1546300800.25" style values, truncated.
  double value = 0;
  const auto [dptr, dec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (dec != std::errc{} || dptr != text.data() + text.size() || !std::isfinite(value))
    throw bad_timestamp(text);
  return static_cast<Timestamp>(std::floor(value));
}

std::string format_timestamp(Timestamp ts, TimestampFormat format) {
  using namespace std::chrono;
  if (format == TimestampFormat::epoch_seconds)
    return std::to_string(ts);
  const auto day_count = static_cast<long>(std::floor(static_cast<double>(ts) / 86400.0));
  const Timestamp rem = ts - static_cast<Timestamp>(day_count) * 86400;
  const year_month_day ymd{sys_days{days{day_count}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return buf;
}

ParseResult parse_log(std::istream &in, const LogSchema &schema) {
  ParseResult result;
  std::string line;
  if (!std::getline(in, line))
    throw SchemaError("input has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);
  const auto header = split_row(line, schema.delimiter);
  auto column = [&](const std::string &name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw SchemaError("missing column '" + name + "' in header");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto trace_col = column(schema.trace_column);
  const auto activity_col = column(schema.activity_column);
  const auto time_col = column(schema.timestamp_column);
  const std::optional<std::size_t> bot_col =
      schema.bot_score_column ? std::optional{column(*schema.bot_score_column)} : std::nullopt;
  const auto needed = std::max({trace_col, activity_col, time_col, bot_col.value_or(0)}) + 1;

  std::unordered_map<std::string, std::size_t> trace_index;
  std::vector<Trace> traces;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    const auto fields = split_row(line, schema.delimiter);
    auto reject = [&](std::string msg) { result.rejected.push_back({line_no, std::move(msg)}); };
    if (fields.size() < needed) {
      reject("expected at least " + std::to_string(needed) + " fields, got " + std::to_string(fields.size()));
      continue;
    }
    Event event;
    event.trace_id = fields[trace_col];
    event.activity = fields[activity_col];
    if (event.trace_id.empty() || event.activity.empty()) {
      reject("empty trace or activity identifier");
      continue;
    }
    try {
      event.timestamp = parse_timestamp(fields[time_col], schema.timestamp_format);
    } catch (const std::invalid_argument &e) {
      reject(e.what());
      continue;
    }
    if (bot_col && !fields[*bot_col].empty()) {
      double score = 0;
      const auto &text = fields[*bot_col];
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), score);
      if (ec != std::errc{} || ptr != text.data() + text.size() || !(score >= 0.0 && score <= 1.0)) {
        reject("bot score '" + text + "' outside [0,1]");
        continue;
      }
      event.bot_score = score;
    }
    auto [it, inserted] = trace_index.try_emplace(event.trace_id, traces.size());
    if (inserted)
      traces.push_back(Trace{event.trace_id, {}});
    traces[it->second].events.push_back(std::move(event));
    ++result.accepted_rows;
  }

  for (auto &trace : traces)
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const Event &a, const Event &b) { return a.timestamp < b.timestamp; });
  // traces are already in order of first appearance; stable sort keeps that for ties
  std::stable_sort(traces.begin(), traces.end(), [](const Trace &a, const Trace &b) {
    return a.events.front().timestamp < b.events.front().timestamp;
  });
  result.log.traces = std::move(traces);
  return result;
}

void write_log(std::ostream &out, const EventLog &log, const LogSchema &schema) {
  bool with_score = false;
  for (const auto &trace : log.traces)
    for (const auto &event : trace.events)
      with_score = with_score || event.bot_score.has_value();
  const char d = schema.delimiter;
  out << quote_field(schema.trace_column, d) << d << quote_field(schema.activity_column, d) << d
      << quote_field(schema.timestamp_column, d);
  if (with_score)
    out << d << quote_field(schema.bot_score_column.value_or("bot_score"), d);
  out << '\n';
  for (const auto &trace : log.traces) {
    for (const auto &event : trace.events) {
      out << quote_field(event.trace_id, d) << d << quote_field(event.activity, d) << d
          << format_timestamp(event.timestamp, schema.timestamp_format);
      if (with_score) {
        out << d;
        if (event.bot_score) {
          char buf[32];
          const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *event.bot_score);
          out << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
        }
      }
      out << '\n';
    }
  }
}

EventLog preprocess(const EventLog &log, std::size_t max_events, std::size_t max_traces) {
  if (max_events == 0 || max_traces == 0)
    throw std::invalid_argument("preprocess: limits must be positive");
  std::vector<std::size_t> order(log.traces.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  // empty traces have no first event and sort last
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto &ta = log.traces[a];
    const auto &tb = log.traces[b];
    if (ta.empty() || tb.empty())
      return !ta.empty() && tb.empty();
    return ta.events.front().timestamp < tb.events.front().timestamp;
  });
  if (order.size() > max_traces)
    order.resize(max_traces);

  EventLog out;
  out.traces.reserve(order.size());
  for (const auto idx : order) {
    Trace trace = log.traces[idx];
    if (trace.events.size() > max_events)
      trace.events.resize(max_events);
    out.traces.push_back(std::move(trace));
  }
  return out;
}

std::pair<EventLog, EventLog> split_by_bot_score(const EventLog &log, double high, double low) {
  if (!(high > low))
    throw std::invalid_argument("split_by_bot_score: high bound must exceed low bound");
  EventLog bots, humans;
  for (const auto &trace : log.traces) {
    Trace hi{trace.trace_id, {}};
    Trace lo{trace.trace_id, {}};
    for (const auto &event : trace.events) {
      if (!event.bot_score)
        throw std::invalid_argument("event of trace '" + event.trace_id + "' by '" + event.activity +
                                    "' has no bot score");
      if (*event.bot_score > high)
        hi.events.push_back(event);
      else if (*event.bot_score < low)
        lo.events.push_back(event);
    }
    if (!hi.empty())
      bots.traces.push_back(std::move(hi));
    if (!lo.empty())
      humans.traces.push_back(std::move(lo));
  }
  return {std::move(bots), std::move(humans)};
}

Dfg build_dfg(const EventLog &log) {
  Dfg dfg;
  for (const auto &trace : log.traces) {
    if (trace.empty())
      continue;
    ++dfg.starts[trace.events.front().activity];
    ++dfg.ends[trace.events.back().activity];
    for (std::size_t i = 1; i < trace.events.size(); ++i)
      ++dfg.edges[{trace.events[i - 1].activity, trace.events[i].activity}];
  }
  return dfg;
}

} // namespace socmine
