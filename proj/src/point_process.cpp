#include "airkit/point_process.hpp"

#include <algorithm>
#include <cmath>

#include "airkit/errors.hpp"

namespace airkit {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate(const BatchDistribution& batch) {
  std::visit(overloaded{
                 [](const ConstantBatch& b) {
                   if (b.k < 1) throw InvalidArgument("constant batch size must be >= 1");
                 },
                 [](const GeometricBatch& b) {
                   if (!(b.p > 0.0 && b.p <= 1.0))
                     throw InvalidArgument("geometric batch p must lie in (0, 1]");
                 },
                 [](const EmpiricalBatch& b) {
                   if (b.pmf.empty()) throw InvalidArgument("empirical batch pmf is empty");
                   double total = 0.0;
                   for (auto [value, prob] : b.pmf) {
                     if (value < 1) throw InvalidArgument("empirical batch values must be >= 1");
                     if (!(prob >= 0.0)) throw InvalidArgument("empirical batch probabilities must be >= 0");
                     total += prob;
                   }
                   if (std::fabs(total - 1.0) > 1e-9)
                     throw InvalidArgument("empirical batch probabilities must sum to 1");
                 },
             },
             batch);
}

double batch_mean(const BatchDistribution& batch) {
  return std::visit(overloaded{
                        [](const ConstantBatch& b) { return static_cast<double>(b.k); },
                        [](const GeometricBatch& b) { return 1.0 / b.p; },
                        [](const EmpiricalBatch& b) {
                          double m = 0.0;
                          for (auto [value, prob] : b.pmf) m += static_cast<double>(value) * prob;
                          return m;
                        },
                    },
                    batch);
}

double batch_second_moment(const BatchDistribution& batch) {
  return std::visit(overloaded{
                        [](const ConstantBatch& b) {
                          const double k = static_cast<double>(b.k);
                          return k * k;
                        },
                        [](const GeometricBatch& b) { return (2.0 - b.p) / (b.p * b.p); },
                        [](const EmpiricalBatch& b) {
                          double m = 0.0;
                          for (auto [value, prob] : b.pmf) {
                            const double v = static_cast<double>(value);
                            m += v * v * prob;
                          }
                          return m;
                        },
                    },
                    batch);
}

std::int64_t sample_batch(const BatchDistribution& batch, Stream& stream) {
  return std::visit(overloaded{
                        [](const ConstantBatch& b) { return b.k; },
                        [&](const GeometricBatch& b) -> std::int64_t {
                          if (b.p >= 1.0) return 1;
                          const double u = stream.uniform_open();
                          return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-b.p)));
                        },
                        [&](const EmpiricalBatch& b) {
                          const double u = stream.uniform_open();
                          double cdf = 0.0;
                          for (auto [value, prob] : b.pmf) {
                            cdf += prob;
                            if (u <= cdf) return value;
                          }
                          return b.pmf.back().first;
                        },
                    },
                    batch);
}

double WeibullRenewal::scale() const {
  return 1.0 / (mean_rate * std::tgamma(1.0 + 1.0 / shape));
}

void validate(const ProcessSpec& spec) {
  std::visit(overloaded{
                 [](const PoissonProcess& p) {
                   if (!(p.rate > 0.0) || !std::isfinite(p.rate))
                     throw InvalidArgument("poisson rate must be positive");
                 },
                 [](const WeibullRenewal& w) {
                   if (!(w.shape > 0.0) || !std::isfinite(w.shape))
                     throw InvalidArgument("weibull shape must be positive");
                   if (!(w.mean_rate > 0.0) || !std::isfinite(w.mean_rate))
                     throw InvalidArgument("weibull mean_rate must be positive");
                 },
                 [](const CompoundPoisson& c) {
                   if (!(c.node_rate > 0.0) || !std::isfinite(c.node_rate))
                     throw InvalidArgument("compound node_rate must be positive");
                   validate(c.batch);
                 },
             },
             spec);
}

double mean_event_rate(const ProcessSpec& spec) {
  return std::visit(overloaded{
                        [](const PoissonProcess& p) { return p.rate; },
                        [](const WeibullRenewal& w) { return w.mean_rate; },
                        [](const CompoundPoisson& c) { return c.node_rate * batch_mean(c.batch); },
                    },
                    spec);
}

ProcessSpec scale_rate(const ProcessSpec& spec, double multiplier) {
  if (!(multiplier > 0.0)) throw InvalidArgument("rate multiplier must be positive");
  return std::visit(overloaded{
                        [&](PoissonProcess p) -> ProcessSpec {
                          p.rate *= multiplier;
                          return p;
                        },
                        [&](WeibullRenewal w) -> ProcessSpec {
                          w.mean_rate *= multiplier;
                          return w;
                        },
                        [&](CompoundPoisson c) -> ProcessSpec {
                          c.node_rate *= multiplier;
                          return c;
                        },
                    },
                    spec);
}

double weibull_inverse_transform(double u, double shape, double scale) {
  if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("inverse transform requires u in (0, 1)");
  if (!(shape > 0.0) || !(scale > 0.0)) throw InvalidArgument("weibull shape and scale must be positive");
  return scale * std::pow(-std::log(u), 1.0 / shape);
}

namespace {

void check_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon must be positive");
}

std::int64_t poisson_variate(double mean, Stream& stream) {
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(stream);
}

// Walks a stationary Weibull renewal path, calling on_event(time) per arrival.
// The first arrival is a uniform fraction of a length-biased gap, which makes
// E[N(t)] = mean_rate * t for every horizon. A length-biased Weibull gap is
// scale * G^(1/shape) with G ~ Gamma(1 + 1/shape).
template <typename F>
void walk_renewal(const WeibullRenewal& w, double horizon, Stream& stream, F&& on_event) {
  const double scale = w.scale();
  const double inv_shape = 1.0 / w.shape;
  std::gamma_distribution<double> length_biased(1.0 + inv_shape, 1.0);
  const double straddling_gap = scale * std::pow(length_biased(stream), inv_shape);
  double time = stream.uniform_open() * straddling_gap;
  while (time <= horizon) {
    on_event(time);
    time += scale * std::pow(-std::log(stream.uniform_open()), inv_shape);
  }
}

}  // namespace

std::vector<Arrival> sample_arrivals(const ProcessSpec& spec, double horizon, Stream& stream) {
  validate(spec);
  check_horizon(horizon);
  std::vector<Arrival> arrivals;
  auto scatter_times = [&] {
    for (auto& a : arrivals) a.time = stream.uniform_open() * horizon;
    std::sort(arrivals.begin(), arrivals.end(),
              [](const Arrival& a, const Arrival& b) { return a.time < b.time; });
  };
  std::visit(overloaded{
                 [&](const PoissonProcess& p) {
                   arrivals.resize(static_cast<std::size_t>(poisson_variate(p.rate * horizon, stream)));
                   scatter_times();
                 },
                 [&](const WeibullRenewal& w) {
                   walk_renewal(w, horizon, stream, [&](double t) { arrivals.push_back({t, 1}); });
                 },
                 [&](const CompoundPoisson& c) {
                   arrivals.resize(static_cast<std::size_t>(poisson_variate(c.node_rate * horizon, stream)));
                   for (auto& a : arrivals) a.multiplicity = sample_batch(c.batch, stream);
                   scatter_times();
                 },
             },
             spec);
  return arrivals;
}

std::int64_t sample_count(const ProcessSpec& spec, double horizon, Stream& stream) {
  validate(spec);
  check_horizon(horizon);
  return std::visit(overloaded{
                        [&](const PoissonProcess& p) { return poisson_variate(p.rate * horizon, stream); },
                        [&](const WeibullRenewal& w) {
                          std::int64_t n = 0;
                          walk_renewal(w, horizon, stream, [&](double) { ++n; });
                          return n;
                        },
                        [&](const CompoundPoisson& c) {
                          const std::int64_t nodes = poisson_variate(c.node_rate * horizon, stream);
                          if (const auto* k = std::get_if<ConstantBatch>(&c.batch)) return nodes * k->k;
                          std::int64_t total = 0;
                          for (std::int64_t i = 0; i < nodes; ++i) total += sample_batch(c.batch, stream);
                          return total;
                        },
                    },
                    spec);
}

CountMoments moments(const ProcessSpec& spec, double horizon) {
  validate(spec);
  check_horizon(horizon);
  return std::visit(overloaded{
                        [&](const PoissonProcess& p) {
                          const double m = p.rate * horizon;
                          return CountMoments{m, m};
                        },
                        [&](const WeibullRenewal& w) { return CountMoments{w.mean_rate * horizon, std::nullopt}; },
                        [&](const CompoundPoisson& c) {
                          const double lt = c.node_rate * horizon;
                          return CountMoments{lt * batch_mean(c.batch), lt * batch_second_moment(c.batch)};
                        },
                    },
                    spec);
}

}  // namespace airkit
