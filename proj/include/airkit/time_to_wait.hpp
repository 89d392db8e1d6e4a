#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "airkit/point_process.hpp"

namespace airkit {

struct WaitQuery {
  ProcessSpec process = PoissonProcess{1.0};
  double effect_size = 1.5;  // rate ratio, group 1 over group 2
  double target_alpha = 0.05;
  double target_beta = 0.2;
  std::optional<double> fixed_t1;  // when set, only t2 is searched
  std::int64_t replications = 2000;
  std::uint64_t master_seed = 0;
  double max_horizon = 1e6;
};

void validate(const WaitQuery& query);

/// One simulated operating point: null calibration at (t1, t2) on the adaptive
/// grid, the alpha-hat that meets the target alpha, and the resulting beta.
struct WaitProbe {
  double t1 = 0.0;
  double t2 = 0.0;
  std::int64_t replications = 0;
  double alpha_hat = 0.0;
  bool alpha_hat_warning = false;
  double achieved_alpha = 0.0;
  double alpha_se = 0.0;
  double achieved_beta = 1.0;
  double beta_se = 0.0;
  bool meets_target = false;
  std::string phase;  // "bracket" or "bisect"
};

struct WaitRecommendation {
  bool feasible = false;
  double t1 = 0.0;
  double t2 = 0.0;
  double achieved_alpha = 0.0;
  double alpha_se = 0.0;
  double achieved_beta = 1.0;
  double beta_se = 0.0;
  double alpha_hat_used = 0.0;
  double search_tolerance = 0.0;  // width of the final bracket on the searched horizon
  std::string reason;            // set when infeasible
  std::vector<WaitProbe> iterations;
};

WaitProbe evaluate_horizons(const ProcessSpec& process, double effect_size, double target_alpha,
                            double target_beta, double t1, double t2, std::int64_t replications,
                            std::uint64_t master_seed, unsigned workers = 1);

/// Smallest simulated horizon whose beta meets target_beta at the target
/// alpha. Doubles from a start where about ten events are expected, then
/// bisects; the last three probes use four times the replications. Every
/// probe reuses the query seed.
WaitRecommendation recommend_wait(const WaitQuery& query, unsigned workers = 1);

}  // namespace airkit
