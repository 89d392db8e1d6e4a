#include "airkit/state_log.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>

#include "airkit/errors.hpp"

namespace airkit {

const char* to_string(State s) noexcept { return s == State::up ? "UP" : "DOWN"; }

const char* to_string(BeatStatus s) noexcept {
  return s == BeatStatus::alive ? "ALIVE" : "DOWN";
}

const char* to_string(ViolationRule r) noexcept {
  switch (r) {
    case ViolationRule::non_alternating: return "non_alternating";
    case ViolationRule::negative_duration: return "negative_duration";
    case ViolationRule::machine_mismatch: return "machine_mismatch";
  }
  return "unknown";
}

namespace {

struct Segment {
  State state;
  std::int64_t begin;
  std::int64_t end;
};

class SegmentBuilder {
 public:
  explicit SegmentBuilder(std::int64_t window_end) : window_end_(window_end) {}

  void push(State s, std::int64_t begin, std::int64_t end) {
    begin = std::min(begin, window_end_);
    end = std::min(end, window_end_);
    if (end <= begin) return;
    if (!segments_.empty() && segments_.back().state == s && segments_.back().end == begin) {
      segments_.back().end = end;
      return;
    }
    segments_.push_back({s, begin, end});
  }

  std::vector<Segment> take() { return std::move(segments_); }

 private:
  std::int64_t window_end_;
  std::vector<Segment> segments_;
};

void check_options(const CompressOptions& options, TimeWindow window) {
  if (options.heartbeat_period <= 0)
    throw InvalidArgument("heartbeat_period must be positive");
  if (!(options.gap_factor >= 1.0))
    throw InvalidArgument("gap_factor must be at least 1");
  if (window.start < 0 || window.end <= window.start)
    throw InvalidArgument("window must satisfy 0 <= start < end");
}

MachineHistory compress_one(const std::vector<HeartbeatRecord>& records,
                            const std::vector<std::size_t>& positions,
                            const CompressOptions& options, TimeWindow window) {
  const double threshold = options.gap_factor * static_cast<double>(options.heartbeat_period);
  const std::int64_t period = options.heartbeat_period;
  auto silent_too_long = [&](std::int64_t from, std::int64_t to) {
    return static_cast<double>(to - from) > threshold;
  };

  MachineHistory history;
  history.machine_id = positions.empty() ? std::string{} : records[positions.front()].machine_id;

  std::int64_t previous = window.start;
  for (std::size_t n = 0; n < positions.size(); ++n) {
    const auto& r = records[positions[n]];
    if (r.machine_id != history.machine_id)
      throw HeartbeatError("mixed machine ids in one history", positions[n]);
    if (r.timestamp < window.start || r.timestamp > window.end)
      throw HeartbeatError("timestamp outside processing window", positions[n]);
    if (r.timestamp < previous)
      throw HeartbeatError("heartbeats not sorted by timestamp", positions[n]);
    previous = r.timestamp;
  }

  SegmentBuilder out(window.end);
  if (positions.empty()) {
    out.push(State::down, window.start, window.end);
  } else {
    State state;
    std::int64_t begin = window.start;
    std::int64_t last_alive = 0;
    const auto& first = records[positions.front()];
    if (first.status == BeatStatus::alive) {
      if (silent_too_long(window.start, first.timestamp)) {
        out.push(State::down, window.start, first.timestamp);
        begin = first.timestamp;
      }
      state = State::up;
      last_alive = first.timestamp;
    } else {
      state = State::down;
    }

    for (std::size_t n = 1; n < positions.size(); ++n) {
      const auto& r = records[positions[n]];
      if (state == State::up) {
        if (r.status == BeatStatus::alive) {
          if (silent_too_long(last_alive, r.timestamp)) {
            out.push(State::up, begin, last_alive + period);
            out.push(State::down, last_alive + period, r.timestamp);
            begin = r.timestamp;
          }
          last_alive = r.timestamp;
        } else {
          const std::int64_t cut = std::min(r.timestamp, last_alive + period);
          out.push(State::up, begin, cut);
          begin = cut;
          state = State::down;
        }
      } else if (r.status == BeatStatus::alive) {
        out.push(State::down, begin, r.timestamp);
        begin = r.timestamp;
        last_alive = r.timestamp;
        state = State::up;
      }
    }

    if (state == State::up && silent_too_long(last_alive, window.end)) {
      out.push(State::up, begin, last_alive + period);
      out.push(State::down, last_alive + period, window.end);
    } else {
      out.push(state, begin, window.end);
    }
  }

  auto segments = out.take();
  history.intervals.reserve(segments.size());
  for (const auto& s : segments) {
    StateInterval iv;
    iv.machine_id = history.machine_id;
    iv.state = s.state;
    iv.duration_hours = static_cast<double>(s.end - s.begin) / 3600.0;
    history.intervals.push_back(std::move(iv));
  }
  history.intervals.front().censored_at_start = true;
  history.intervals.back().censored_at_end = true;
  return history;
}

}  // namespace

MachineHistory compress_heartbeats(const std::vector<HeartbeatRecord>& records,
                                   const CompressOptions& options, TimeWindow window) {
  check_options(options, window);
  std::vector<std::size_t> positions(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) positions[i] = i;
  return compress_one(records, positions, options, window);
}

std::vector<MachineHistory> compress_fleet(const std::vector<HeartbeatRecord>& records,
                                           const CompressOptions& options, TimeWindow window) {
  check_options(options, window);
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(records[i].machine_id);
    if (inserted) order.push_back(records[i].machine_id);
    it->second.push_back(i);
  }
  std::vector<MachineHistory> histories;
  histories.reserve(order.size());
  for (const auto& id : order) histories.push_back(compress_one(records, groups[id], options, window));
  return histories;
}

std::vector<Violation> validate_history(const MachineHistory& history) {
  std::vector<Violation> violations;
  for (std::size_t i = 0; i < history.intervals.size(); ++i) {
    const auto& iv = history.intervals[i];
    if (!history.machine_id.empty() && iv.machine_id != history.machine_id)
      violations.push_back({i, ViolationRule::machine_mismatch});
    if (i > 0 && iv.state == history.intervals[i - 1].state)
      violations.push_back({i, ViolationRule::non_alternating});
    if (!(iv.duration_hours >= 0.0)) violations.push_back({i, ViolationRule::negative_duration});
  }
  return violations;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    auto comma = line.find(',', pos);
    fields.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

InvalidArgument row_error(std::size_t row, const std::string& what) {
  return InvalidArgument("csv row " + std::to_string(row) + ": " + what);
}

void expect_header(std::istream& in, std::initializer_list<std::string_view> columns) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("csv input is empty; header row required");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  auto fields = split(line);
  bool ok = fields.size() == columns.size();
  std::size_t i = 0;
  for (auto c : columns) {
    if (!ok) break;
    ok = fields[i++] == c;
  }
  if (!ok) {
    std::string expected;
    for (auto c : columns) expected += (expected.empty() ? "" : ",") + std::string(c);
    throw InvalidArgument("csv header must be '" + expected + "'");
  }
}

template <typename F>
void for_each_row(std::istream& in, std::size_t columns, F&& f) {
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (fields.size() != columns) throw row_error(row, "expected " + std::to_string(columns) + " fields");
    f(row, fields);
  }
}

}  // namespace

std::vector<HeartbeatRecord> read_heartbeat_csv(std::istream& in) {
  expect_header(in, {"machine_id", "timestamp", "status"});
  std::vector<HeartbeatRecord> records;
  for_each_row(in, 3, [&](std::size_t row, const std::vector<std::string_view>& f) {
    HeartbeatRecord r;
    r.machine_id = std::string(f[0]);
    auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), r.timestamp);
    if (ec != std::errc{} || ptr != f[1].data() + f[1].size()) throw row_error(row, "bad timestamp");
    if (r.timestamp < 0) throw row_error(row, "negative timestamp");
    if (f[2] == "ALIVE") {
      r.status = BeatStatus::alive;
    } else if (f[2] == "DOWN") {
      r.status = BeatStatus::down;
    } else {
      throw row_error(row, "unknown status '" + std::string(f[2]) + "'");
    }
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<MachineHistory> read_state_csv(std::istream& in) {
  expect_header(in, {"machine_id", "state", "duration_hours", "censored"});
  std::vector<StateInterval> rows;
  for_each_row(in, 4, [&](std::size_t row, const std::vector<std::string_view>& f) {
    StateInterval iv;
    iv.machine_id = std::string(f[0]);
    if (f[1] == "UP") {
      iv.state = State::up;
    } else if (f[1] == "DOWN") {
      iv.state = State::down;
    } else {
      throw row_error(row, "unknown state '" + std::string(f[1]) + "'");
    }
    std::string number(f[2]);
    std::size_t used = 0;
    try {
      iv.duration_hours = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != number.size()) throw row_error(row, "bad duration_hours");
    if (f[3] == "1") {
      iv.censored_at_end = true;
    } else if (f[3] != "0") {
      throw row_error(row, "censored must be 0 or 1");
    }
    rows.push_back(std::move(iv));
  });
  return group_state_rows(std::move(rows));
}

std::vector<MachineHistory> group_state_rows(std::vector<StateInterval> rows) {
  std::vector<MachineHistory> histories;
  for (auto& iv : rows) {
    if (iv.censored_at_start) {
      iv.censored_at_start = false;
      iv.censored_at_end = true;
    }
    if (histories.empty() || histories.back().machine_id != iv.machine_id)
      histories.push_back({iv.machine_id, {}});
    histories.back().intervals.push_back(std::move(iv));
  }
  for (auto& h : histories) {
    auto& first = h.intervals.front();
    if (first.censored_at_end) {
      first.censored_at_start = true;
      first.censored_at_end = h.intervals.size() == 1;
    }
  }
  return histories;
}

void write_state_csv(std::ostream& out, const std::vector<MachineHistory>& histories) {
  out << "machine_id,state,duration_hours,censored\n";
  char buf[64];
  for (const auto& h : histories) {
    for (const auto& iv : h.intervals) {
      std::snprintf(buf, sizeof buf, "%.12g", iv.duration_hours);
      out << iv.machine_id << ',' << to_string(iv.state) << ',' << buf << ','
          << (iv.censored() ? 1 : 0) << '\n';
    }
  }
}

}  // namespace airkit
