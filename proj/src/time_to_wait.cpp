#include "airkit/time_to_wait.hpp"

#include <algorithm>
#include <cmath>

#include "airkit/calibration.hpp"
#include "airkit/errors.hpp"

namespace airkit {

namespace {

constexpr double kRelativeBracket = 0.05;
constexpr double kStartEvents = 10.0;
constexpr int kMaxHalvings = 40;
constexpr int kFinalProbes = 3;
constexpr std::int64_t kFinalReplicationFactor = 4;

}  // namespace

void validate(const WaitQuery& q) {
  validate(q.process);
  if (!(q.effect_size > 1.0) || !std::isfinite(q.effect_size))
    throw InvalidArgument("effect_size must be greater than 1");
  if (!(q.target_alpha > 0.0 && q.target_alpha < 1.0))
    throw InvalidArgument("target_alpha must lie in (0, 1)");
  if (!(q.target_beta > 0.0 && q.target_beta < 1.0))
    throw InvalidArgument("target_beta must lie in (0, 1)");
  if (q.fixed_t1 && !(*q.fixed_t1 > 0.0 && std::isfinite(*q.fixed_t1)))
    throw InvalidArgument("fixed t1 must be positive");
  if (q.replications < 100) throw InvalidArgument("replications must be at least 100");
  if (!(q.max_horizon > 0.0) || !std::isfinite(q.max_horizon))
    throw InvalidArgument("max_horizon must be positive");
}

WaitProbe evaluate_horizons(const ProcessSpec& process, double effect_size, double target_alpha,
                            double target_beta, double t1, double t2, std::int64_t replications,
                            std::uint64_t master_seed, unsigned workers) {
  CalibrationConfig config;
  config.null_process = process;
  config.t1 = t1;
  config.t2 = t2;
  config.replications = replications;
  config.master_seed = master_seed;

  WaitProbe probe;
  probe.t1 = t1;
  probe.t2 = t2;
  probe.replications = replications;

  const auto table = calibrate_null_adaptive(config, workers);
  const auto lookup = lookup_alpha_hat(table, target_alpha);
  probe.alpha_hat = lookup.alpha_hat;
  probe.alpha_hat_warning = lookup.warning;
  probe.achieved_alpha = lookup.achieved_alpha;
  probe.alpha_se = table.standard_error[lookup.index];
  if (lookup.warning) {
    // the test can never fire at this horizon
    probe.achieved_beta = 1.0;
    probe.beta_se = 0.0;
  } else {
    const auto curve = power_curve(table, effect_size, workers);
    probe.achieved_beta = curve.points[lookup.index].beta;
    probe.beta_se = curve.points[lookup.index].beta_se;
  }
  probe.meets_target = probe.achieved_beta <= target_beta;
  return probe;
}

WaitRecommendation recommend_wait(const WaitQuery& q, unsigned workers) {
  validate(q);
  const double rate = mean_event_rate(q.process);
  const bool symmetric = !q.fixed_t1.has_value();

  WaitRecommendation rec;
  auto probe_at = [&](double t, std::int64_t reps, const char* phase) -> const WaitProbe& {
    const double t1 = symmetric ? t : *q.fixed_t1;
    auto p = evaluate_horizons(q.process, q.effect_size, q.target_alpha, q.target_beta, t1, t,
                               reps, q.master_seed, workers);
    p.phase = phase;
    rec.iterations.push_back(std::move(p));
    return rec.iterations.back();
  };
  auto searched = [&](const WaitProbe& p) { return p.t2; };

  // Start where roughly ten events are expected in the searched window(s).
  double start = symmetric ? kStartEvents / (rate * (1.0 + q.effect_size)) : kStartEvents / rate;
  start = std::min(start, q.max_horizon);

  double lo = 0.0;  // largest failing horizon
  double hi = 0.0;  // smallest passing horizon
  double beta_lo = 1.0, se_lo = 0.0, beta_hi = 1.0, se_hi = 0.0;

  const WaitProbe& first = probe_at(start, q.replications, "bracket");
  if (first.meets_target) {
    hi = start;
    beta_hi = first.achieved_beta;
    se_hi = first.beta_se;
    double t = start;
    for (int i = 0; i < kMaxHalvings; ++i) {
      t /= 2.0;
      const WaitProbe& p = probe_at(t, q.replications, "bracket");
      if (!p.meets_target) {
        lo = t;
        beta_lo = p.achieved_beta;
        se_lo = p.beta_se;
        break;
      }
      hi = t;
      beta_hi = p.achieved_beta;
      se_hi = p.beta_se;
    }
  } else {
    lo = start;
    beta_lo = first.achieved_beta;
    se_lo = first.beta_se;
    double t = start;
    while (t < q.max_horizon) {
      t = std::min(2.0 * t, q.max_horizon);
      const WaitProbe& p = probe_at(t, q.replications, "bracket");
      if (p.meets_target) {
        hi = t;
        beta_hi = p.achieved_beta;
        se_hi = p.beta_se;
        break;
      }
      lo = t;
      beta_lo = p.achieved_beta;
      se_lo = p.beta_se;
    }
  }

  if (hi == 0.0) {
    const auto best = std::min_element(
        rec.iterations.begin(), rec.iterations.end(),
        [](const WaitProbe& a, const WaitProbe& b) { return a.achieved_beta < b.achieved_beta; });
    rec.feasible = false;
    rec.t1 = best->t1;
    rec.t2 = best->t2;
    rec.achieved_alpha = best->achieved_alpha;
    rec.alpha_se = best->alpha_se;
    rec.achieved_beta = best->achieved_beta;
    rec.beta_se = best->beta_se;
    rec.alpha_hat_used = best->alpha_hat;
    rec.reason = "target beta not reached within max_horizon; best achieved beta reported";
    return rec;
  }

  auto converged = [&] {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= kRelativeBracket * mid) return true;
    return std::fabs(beta_lo - q.target_beta) <= se_lo && std::fabs(beta_hi - q.target_beta) <= se_hi;
  };
  while (lo > 0.0 && !converged()) {
    const double mid = 0.5 * (lo + hi);
    const double steps_left = std::ceil(std::log2((hi - lo) / (kRelativeBracket * mid)));
    const auto reps = steps_left <= kFinalProbes ? q.replications * kFinalReplicationFactor
                                                 : q.replications;
    const WaitProbe& p = probe_at(mid, reps, "bisect");
    if (p.meets_target) {
      hi = mid;
      beta_hi = p.achieved_beta;
      se_hi = p.beta_se;
    } else {
      lo = mid;
      beta_lo = p.achieved_beta;
      se_lo = p.beta_se;
    }
  }

  const WaitProbe* best = nullptr;
  for (const auto& p : rec.iterations)
    if (p.meets_target && (!best || searched(p) < searched(*best))) best = &p;
  rec.feasible = true;
  rec.t1 = best->t1;
  rec.t2 = best->t2;
  rec.achieved_alpha = best->achieved_alpha;
  rec.alpha_se = best->alpha_se;
  rec.achieved_beta = best->achieved_beta;
  rec.beta_se = best->beta_se;
  rec.alpha_hat_used = best->alpha_hat;
  rec.search_tolerance = hi - lo;
  return rec;
}

}  // namespace airkit
