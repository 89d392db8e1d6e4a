#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace airkit {

enum class BeatStatus { alive, down };
enum class State { up, down };

const char* to_string(State s) noexcept;
const char* to_string(BeatStatus s) noexcept;

struct HeartbeatRecord {
  std::string machine_id;
  std::int64_t timestamp = 0;  // seconds since epoch
  BeatStatus status = BeatStatus::alive;
};

/// One UP or DOWN stretch. Censoring records which window boundary cut the
/// interval short; an interval censored only at the start still ends in an
/// observed transition.
struct StateInterval {
  std::string machine_id;
  State state = State::up;
  double duration_hours = 0.0;
  bool censored_at_start = false;
  bool censored_at_end = false;

  bool censored() const noexcept { return censored_at_start || censored_at_end; }
  bool operator==(const StateInterval&) const = default;
};

struct MachineHistory {
  std::string machine_id;
  std::vector<StateInterval> intervals;
};

struct TimeWindow {
  std::int64_t start = 0;
  std::int64_t end = 0;
};

struct CompressOptions {
  std::int64_t heartbeat_period = 300;  // seconds
  double gap_factor = 3.0;
};

/// Compresses one machine's heartbeats into alternating UP/DOWN intervals
/// covering `window` exactly. Records must share a machine id and be sorted.
/// Throws HeartbeatError naming the first out-of-order record.
MachineHistory compress_heartbeats(const std::vector<HeartbeatRecord>& records,
                                   const CompressOptions& options,
                                   TimeWindow window);

/// Groups a mixed log by machine (first-appearance order) and compresses each.
/// Error indices refer to positions in `records`.
std::vector<MachineHistory> compress_fleet(const std::vector<HeartbeatRecord>& records,
                                           const CompressOptions& options,
                                           TimeWindow window);

enum class ViolationRule { non_alternating, negative_duration, machine_mismatch };

struct Violation {
  std::size_t index = 0;
  ViolationRule rule = ViolationRule::non_alternating;
  bool operator==(const Violation&) const = default;
};

const char* to_string(ViolationRule r) noexcept;

std::vector<Violation> validate_history(const MachineHistory& history);

// CSV surfaces. Both formats require a header row.
std::vector<HeartbeatRecord> read_heartbeat_csv(std::istream& in);
/// Groups flat state rows (consecutive rows per machine) into histories.
/// Rows carry a single censored flag (either side set). A censored first row
/// followed by more rows of the same machine is taken as censored at the
/// window start; any other censored row as censored at the end (a lone row,
/// at both).
std::vector<MachineHistory> group_state_rows(std::vector<StateInterval> rows);

/// Reads `machine_id,state,duration_hours,censored` rows; see group_state_rows.
std::vector<MachineHistory> read_state_csv(std::istream& in);
void write_state_csv(std::ostream& out, const std::vector<MachineHistory>& histories);

}  // namespace airkit
