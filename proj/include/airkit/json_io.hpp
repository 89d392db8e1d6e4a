#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "airkit/calibration.hpp"
#include "airkit/errors.hpp"
#include "airkit/hypothesis_test.hpp"
#include "airkit/point_process.hpp"
#include "airkit/rate_estimation.hpp"
#include "airkit/state_log.hpp"
#include "airkit/time_to_wait.hpp"

namespace airkit {

using Json = nlohmann::ordered_json;

/// A request document that is not valid JSON or does not match a schema.
/// `field` is a JSON-pointer-like path to the offending member, if known.
class SchemaError : public InvalidArgument {
 public:
  SchemaError(std::string field, const std::string& message)
      : InvalidArgument(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Compact JSON with insertion-ordered keys and doubles printed with 12
/// significant digits (non-finite values become null). Output is a pure
/// function of the document.
std::string dump(const Json& doc);

/// Parses text, mapping syntax errors to SchemaError.
Json parse_json(std::string_view text);

Json to_json(const BatchDistribution& batch);
Json to_json(const ProcessSpec& spec);
Json to_json(const RateEstimate& estimate);
Json to_json(const TestInput& input);
Json to_json(const TestResult& result);
Json to_json(const CalibrationConfig& config);
Json to_json(const CalibrationTable& table);
Json to_json(const AlphaBetaCurve& curve);
Json to_json(const StabilityReport& report);
Json to_json(const WaitQuery& query);
Json to_json(const WaitRecommendation& recommendation);
Json to_json(const CountMoments& moments);

BatchDistribution batch_from_json(const Json& j, const std::string& at = "batch");
ProcessSpec process_from_json(const Json& j, const std::string& at = "process");
TestInput test_input_from_json(const Json& j);
CalibrationConfig calibration_config_from_json(const Json& j);
WaitQuery wait_query_from_json(const Json& j);
StabilityVariant stability_variant_from_json(const Json& j, const std::string& at);
/// Accepts an array of {machine_id, state, duration_hours, censored} rows or
/// an object holding that array under "rows".
std::vector<MachineHistory> histories_from_json(const Json& j);

void write_table_csv(std::ostream& out, const CalibrationTable& table);
void write_curve_csv(std::ostream& out, const AlphaBetaCurve& curve);

}  // namespace airkit
