#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "airkit/point_process.hpp"

namespace airkit {

/// Simulation setup shared by the null calibration and the power curves.
/// Group 1 is observed for t1, group 2 for t2; the test alternative is
/// "group 1 rate is higher".
struct CalibrationConfig {
  ProcessSpec null_process = PoissonProcess{1.0};
  double t1 = 1.0;
  double t2 = 1.0;
  std::int64_t replications = 1000;
  /// Uniform alpha-hat grid step; empty selects the default grid (0.001 steps
  /// up to 0.1, then 0.01 steps up to 1).
  std::optional<double> grid_step;
  std::uint64_t master_seed = 0;
  double scale_factor = 1.0;
};

void validate(const CalibrationConfig& config);

std::vector<double> alpha_grid(std::optional<double> step);

/// Achieved false-positive rate per threshold. Index i of every vector refers
/// to alpha_hat[i].
struct CalibrationTable {
  std::vector<double> alpha_hat;
  std::vector<double> alpha;
  std::vector<double> standard_error;
  CalibrationConfig config;
};

struct AlphaBetaPoint {
  double alpha_hat = 0.0;
  double alpha = 0.0;
  double alpha_se = 0.0;
  double beta = 1.0;
  double beta_se = 0.0;
};

struct AlphaBetaCurve {
  std::vector<AlphaBetaPoint> points;
  double effect_size = 1.0;
  CalibrationConfig config;
};

/// One p-value per replication, in replication order. Replication r draws
/// group g from Stream::derive(seed, r, g). `workers` only changes how the
/// replications are split across threads.
std::vector<double> simulate_p_values(const ProcessSpec& group1, const ProcessSpec& group2,
                                      const CalibrationConfig& config, std::uint64_t group_tag,
                                      unsigned workers = 1);

/// Fraction of replications with p <= alpha_hat at each grid point.
CalibrationTable calibrate_null(const CalibrationConfig& config, unsigned workers = 1);

/// Same simulation as calibrate_null, but the grid is every distinct null
/// p-value (with 0 and 1 added). Resolves thresholds far below the default
/// grid, which over-dispersed nulls need at small target alphas.
CalibrationTable calibrate_null_adaptive(const CalibrationConfig& config, unsigned workers = 1);

/// Group 1 rate multiplied by effect_size; beta is the fraction of
/// replications with p > alpha_hat, paired with the null alpha of the same
/// config. Null and alternative replications use disjoint streams.
AlphaBetaCurve power_curve(const CalibrationConfig& config, double effect_size,
                           unsigned workers = 1);

/// Builds the curve from an existing null table (same config) without
/// re-running the null simulation.
AlphaBetaCurve power_curve(const CalibrationTable& null_table, double effect_size,
                           unsigned workers = 1);

struct AlphaHatLookup {
  double alpha_hat = 0.0;
  double achieved_alpha = 0.0;
  std::size_t index = 0;
  bool warning = false;  // no positive threshold meets the target
};

/// Largest alpha_hat whose achieved alpha does not exceed target_alpha.
AlphaHatLookup lookup_alpha_hat(const CalibrationTable& table, double target_alpha);

/// Beta at a given achieved alpha, interpolating linearly along the curve.
/// Where several grid points share an alpha the lowest beta is used.
double beta_at_alpha(const AlphaBetaCurve& curve, double alpha);

/// Standard error of beta_at_alpha, interpolated the same way.
double beta_se_at_alpha(const AlphaBetaCurve& curve, double alpha);

struct StabilityVariant {
  double t1 = 1.0;
  double t2 = 1.0;
  double rate_multiplier = 1.0;
};

struct StabilityReport {
  double max_deviation = 0.0;
  std::size_t worst_index = 0;  // grid index where the spread peaks
  std::vector<StabilityVariant> variants;
  std::vector<CalibrationTable> tables;
};

/// Calibrates each variant (base process with rate scaled, horizons replaced)
/// and reports the largest spread of alpha across variants at any grid point.
StabilityReport stability_scan(const CalibrationConfig& base,
                               const std::vector<StabilityVariant>& variants,
                               unsigned workers = 1);

}  // namespace airkit
