#include "airkit/rate_estimation.hpp"

#include <cmath>

#include "airkit/errors.hpp"

namespace airkit {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

RateEstimate estimate(std::span<const MachineHistory> histories) {
  CompensatedSum up;
  CompensatedSum down;
  RateEstimate r;
  std::size_t intervals = 0;
  for (const auto& h : histories) {
    auto violations = validate_history(h);
    if (!violations.empty()) {
      throw InvalidArgument("history '" + h.machine_id + "' invalid: " +
                            to_string(violations.front().rule) + " at interval " +
                            std::to_string(violations.front().index));
    }
    for (const auto& iv : h.intervals) {
      ++intervals;
      if (iv.state == State::up) {
        up.add(iv.duration_hours);
        if (!iv.censored_at_end) ++r.n_failures;
      } else {
        down.add(iv.duration_hours);
        if (!iv.censored_at_end) ++r.n_recoveries;
      }
    }
  }
  if (intervals == 0) throw InvalidArgument("no intervals to estimate from");

  r.total_up_time = up.value();
  r.total_down_time = down.value();

  if (r.n_failures > 0) {
    r.mttf = r.total_up_time / static_cast<double>(r.n_failures);
    r.failure_rate = static_cast<double>(r.n_failures) / r.total_up_time;
    r.air = *r.failure_rate * kHoursPer100VmYears;
  } else {
    r.undefined_reason =
        "no observed UP->DOWN transitions; MTTF, failure rate and AIR are not identified";
  }
  if (r.n_recoveries > 0) {
    r.mttr = r.total_down_time / static_cast<double>(r.n_recoveries);
  } else {
    if (!r.undefined_reason.empty()) r.undefined_reason += "; ";
    r.undefined_reason += "no observed DOWN->UP transitions; MTTR is not identified";
  }
  if (r.mttf && r.mttr) r.rate_with_downtime = 1.0 / (*r.mttf + *r.mttr);
  return r;
}

double hazard(const LifetimeDistribution& dist, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("hazard requires t >= 0");
  if (const auto* e = std::get_if<Exponential>(&dist)) {
    if (!(e->rate > 0.0)) throw InvalidArgument("exponential rate must be positive");
    return e->rate;
  }
  const auto& w = std::get<Weibull>(dist);
  if (!(w.shape > 0.0) || !(w.scale > 0.0))
    throw InvalidArgument("weibull shape and scale must be positive");
  if (t == 0.0) {
    if (w.shape < 1.0) throw InfiniteHazard("weibull hazard is infinite at t = 0 for shape < 1");
    if (w.shape > 1.0) return 0.0;
    return 1.0 / w.scale;
  }
  return (w.shape / w.scale) * std::pow(t / w.scale, w.shape - 1.0);
}

double average_rate(std::int64_t n_events, double elapsed) {
  if (!(elapsed > 0.0)) throw InvalidArgument("elapsed time must be positive");
  if (n_events < 0) throw InvalidArgument("event count must be non-negative");
  return static_cast<double>(n_events) / elapsed;
}

namespace {

void check_durations(std::span<const double> xs) {
  for (double x : xs)
    if (!(x >= 0.0)) throw InvalidArgument("durations must be non-negative");
}

}  // namespace

double log_likelihood(const Exponential& dist, std::span<const double> uncensored,
                      std::span<const double> censored) {
  if (!(dist.rate > 0.0)) throw InvalidArgument("exponential rate must be positive");
  check_durations(uncensored);
  check_durations(censored);
  const double log_rate = std::log(dist.rate);
  CompensatedSum ll;
  for (double t : uncensored) ll.add(log_rate - dist.rate * t);
  for (double x : censored) ll.add(-dist.rate * x);
  return ll.value();
}

double exponential_mle(std::span<const double> uncensored, std::span<const double> censored) {
  check_durations(uncensored);
  check_durations(censored);
  if (uncensored.empty()) throw InvalidArgument("rate not identified without uncensored lifetimes");
  CompensatedSum exposure;
  for (double t : uncensored) exposure.add(t);
  for (double x : censored) exposure.add(x);
  return static_cast<double>(uncensored.size()) / exposure.value();
}

}  // namespace airkit
