#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "airkit/state_log.hpp"

namespace airkit {

/// Hours in one hundred VM-years (8760 h per year, leap years ignored).
inline constexpr double kHoursPer100VmYears = 876000.0;

/// Pooled fleet estimate. Quantities that need at least one observed
/// transition are empty when none was seen; `undefined_reason` says why.
struct RateEstimate {
  std::int64_t n_failures = 0;
  std::int64_t n_recoveries = 0;
  double total_up_time = 0.0;
  double total_down_time = 0.0;
  std::optional<double> mttf;
  std::optional<double> mttr;
  std::optional<double> failure_rate;
  std::optional<double> rate_with_downtime;
  std::optional<double> air;
  std::string undefined_reason;
};

/// Censored exponential MLE pooled over machines: every UP hour counts toward
/// exposure, and every UP interval not cut off by the window end counts as a
/// failure (DOWN likewise for recoveries). Throws InvalidArgument on empty
/// input or invalid histories.
RateEstimate estimate(std::span<const MachineHistory> histories);

struct Exponential {
  double rate = 1.0;  // per hour
};

struct Weibull {
  double shape = 1.0;
  double scale = 1.0;  // hours
};

using LifetimeDistribution = std::variant<Exponential, Weibull>;

/// f(t)/S(t). Throws InfiniteHazard for Weibull shape < 1 at t = 0.
double hazard(const LifetimeDistribution& dist, double t);

double average_rate(std::int64_t n_events, double elapsed);

/// Exponential log-likelihood of uncensored lifetimes and right-censored
/// exposures: sum(log rate - rate t_i) - sum(rate x_j).
double log_likelihood(const Exponential& dist, std::span<const double> uncensored,
                      std::span<const double> censored);

/// Closed-form maximizer of log_likelihood: n / (sum t_i + sum x_j).
double exponential_mle(std::span<const double> uncensored, std::span<const double> censored);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace airkit
