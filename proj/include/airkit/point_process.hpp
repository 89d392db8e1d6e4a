#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "airkit/rng.hpp"

namespace airkit {

// Batch laws for the number of events carried by one compound arrival.
// Support starts at 1.

struct ConstantBatch {
  std::int64_t k = 1;
};

/// P(Y = k) = p (1 - p)^(k - 1), k >= 1.
struct GeometricBatch {
  double p = 0.5;
};

struct EmpiricalBatch {
  std::vector<std::pair<std::int64_t, double>> pmf;
};

using BatchDistribution = std::variant<ConstantBatch, GeometricBatch, EmpiricalBatch>;

void validate(const BatchDistribution& batch);
double batch_mean(const BatchDistribution& batch);
double batch_second_moment(const BatchDistribution& batch);
std::int64_t sample_batch(const BatchDistribution& batch, Stream& stream);

struct PoissonProcess {
  double rate = 1.0;
};

/// Stationary renewal process with Weibull inter-arrivals, parametrized by its
/// long-run event rate. The Weibull scale is derived so the mean gap is
/// 1 / mean_rate; shape < 1 clusters events, shape > 1 spaces them out.
struct WeibullRenewal {
  double shape = 1.0;
  double mean_rate = 1.0;

  double scale() const;
};

struct CompoundPoisson {
  double node_rate = 1.0;
  BatchDistribution batch = ConstantBatch{1};
};

using ProcessSpec = std::variant<PoissonProcess, WeibullRenewal, CompoundPoisson>;

void validate(const ProcessSpec& spec);

/// Expected events per unit time, batches included.
double mean_event_rate(const ProcessSpec& spec);

/// Same process with its arrival rate multiplied (node rate for compound;
/// the batch law is untouched).
ProcessSpec scale_rate(const ProcessSpec& spec, double multiplier);

struct Arrival {
  double time = 0.0;
  std::int64_t multiplicity = 1;
};

/// scale * (-ln u)^(1/shape) for u in (0, 1).
double weibull_inverse_transform(double u, double shape, double scale);

/// Event times in [0, horizon], ascending.
///
/// Poisson and compound arrivals draw the arrival count first, then (compound
/// only) one batch size per arrival, then the arrival times as sorted uniform
/// order statistics. Weibull renewal starts in equilibrium and accumulates
/// inter-arrival gaps until the horizon is passed. sample_count consumes the
/// stream in the same order, so on equal streams the two agree.
std::vector<Arrival> sample_arrivals(const ProcessSpec& spec, double horizon, Stream& stream);

/// Total events in [0, horizon] with batch multiplicities summed.
std::int64_t sample_count(const ProcessSpec& spec, double horizon, Stream& stream);

struct CountMoments {
  double mean = 0.0;
  std::optional<double> variance;  // empty when no closed form is known
};

/// Compound variance is lambda t E[Y^2].
CountMoments moments(const ProcessSpec& spec, double horizon);

}  // namespace airkit
