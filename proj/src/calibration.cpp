#include "airkit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "airkit/errors.hpp"
#include "airkit/hypothesis_test.hpp"

namespace airkit {

namespace {

// Group tags keep null and alternative draws on disjoint streams.
constexpr std::uint64_t kNullTag = 0;
constexpr std::uint64_t kAlternativeTag = 2;

double binomial_se(double fraction, std::int64_t n) {
  return std::sqrt(fraction * (1.0 - fraction) / static_cast<double>(n));
}

// Fraction of sorted p-values at or below each threshold.
std::vector<double> firing_fractions(const std::vector<double>& sorted_p,
                                     const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  const double r = static_cast<double>(sorted_p.size());
  for (double a : grid) {
    const auto fired = std::upper_bound(sorted_p.begin(), sorted_p.end(), a) - sorted_p.begin();
    out.push_back(static_cast<double>(fired) / r);
  }
  return out;
}

}  // namespace

void validate(const CalibrationConfig& c) {
  validate(c.null_process);
  if (!(c.t1 > 0.0) || !(c.t2 > 0.0) || !std::isfinite(c.t1) || !std::isfinite(c.t2))
    throw InvalidArgument("observation horizons t1, t2 must be positive");
  if (c.replications < 100) throw InvalidArgument("replications must be at least 100");
  if (c.grid_step && !(*c.grid_step > 0.0 && *c.grid_step <= 0.05))
    throw InvalidArgument("grid_step must lie in (0, 0.05]");
  if (!(c.scale_factor > 0.0) || !std::isfinite(c.scale_factor))
    throw InvalidArgument("scale_factor must be positive");
}

std::vector<double> alpha_grid(std::optional<double> step) {
  std::vector<double> grid;
  if (!step) {
    for (int i = 0; i <= 100; ++i) grid.push_back(i / 1000.0);
    for (int i = 11; i <= 100; ++i) grid.push_back(i / 100.0);
    return grid;
  }
  const double inverse = 1.0 / *step;
  const double whole = std::round(inverse);
  if (std::fabs(inverse - whole) < 1e-9 * inverse) {
    const auto n = static_cast<int>(whole);
    for (int i = 0; i <= n; ++i) grid.push_back(static_cast<double>(i) / whole);
  } else {
    for (int i = 0; i * *step < 1.0; ++i) grid.push_back(i * *step);
    grid.push_back(1.0);
  }
  return grid;
}

std::vector<double> simulate_p_values(const ProcessSpec& group1, const ProcessSpec& group2,
                                      const CalibrationConfig& config, std::uint64_t group_tag,
                                      unsigned workers) {
  validate(config);
  validate(group1);
  validate(group2);
  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<double> p(reps);

  auto run_block = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Stream s1 = Stream::derive(config.master_seed, r, group_tag + 1);
      Stream s2 = Stream::derive(config.master_seed, r, group_tag + 2);
      TestInput in;
      in.n1 = sample_count(group1, config.t1, s1);
      in.n2 = sample_count(group2, config.t2, s2);
      in.t1 = config.t1;
      in.t2 = config.t2;
      in.alternative = Alternative::greater;
      in.scale_factor = config.scale_factor;
      p[r] = ump_poisson_test(in).p_value;
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(reps)));
  if (workers == 1) {
    run_block(0, reps);
    return p;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (reps + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(reps, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        run_block(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return p;
}

CalibrationTable calibrate_null(const CalibrationConfig& config, unsigned workers) {
  auto p = simulate_p_values(config.null_process, config.null_process, config, kNullTag, workers);
  std::sort(p.begin(), p.end());
  CalibrationTable table;
  table.config = config;
  table.alpha_hat = alpha_grid(config.grid_step);
  table.alpha = firing_fractions(p, table.alpha_hat);
  table.standard_error.reserve(table.alpha.size());
  for (double a : table.alpha) table.standard_error.push_back(binomial_se(a, config.replications));
  return table;
}

CalibrationTable calibrate_null_adaptive(const CalibrationConfig& config, unsigned workers) {
  auto p = simulate_p_values(config.null_process, config.null_process, config, kNullTag, workers);
  std::sort(p.begin(), p.end());
  CalibrationTable table;
  table.config = config;
  table.alpha_hat.push_back(0.0);
  for (double v : p)
    if (v > table.alpha_hat.back() && v < 1.0) table.alpha_hat.push_back(v);
  table.alpha_hat.push_back(1.0);
  table.alpha = firing_fractions(p, table.alpha_hat);
  table.standard_error.reserve(table.alpha.size());
  for (double a : table.alpha) table.standard_error.push_back(binomial_se(a, config.replications));
  return table;
}

AlphaBetaCurve power_curve(const CalibrationTable& null_table, double effect_size, unsigned workers) {
  if (!(effect_size > 0.0) || !std::isfinite(effect_size))
    throw InvalidArgument("effect_size must be positive");
  const auto& config = null_table.config;
  const ProcessSpec boosted = scale_rate(config.null_process, effect_size);
  auto p = simulate_p_values(boosted, config.null_process, config, kAlternativeTag, workers);
  std::sort(p.begin(), p.end());
  const auto fired = firing_fractions(p, null_table.alpha_hat);

  AlphaBetaCurve curve;
  curve.effect_size = effect_size;
  curve.config = config;
  curve.points.reserve(fired.size());
  for (std::size_t i = 0; i < fired.size(); ++i) {
    AlphaBetaPoint pt;
    pt.alpha_hat = null_table.alpha_hat[i];
    pt.alpha = null_table.alpha[i];
    pt.alpha_se = null_table.standard_error[i];
    pt.beta = 1.0 - fired[i];
    pt.beta_se = binomial_se(pt.beta, config.replications);
    curve.points.push_back(pt);
  }
  return curve;
}

AlphaBetaCurve power_curve(const CalibrationConfig& config, double effect_size, unsigned workers) {
  if (!(effect_size > 0.0) || !std::isfinite(effect_size))
    throw InvalidArgument("effect_size must be positive");
  return power_curve(calibrate_null(config, workers), effect_size, workers);
}

AlphaHatLookup lookup_alpha_hat(const CalibrationTable& table, double target_alpha) {
  if (!(target_alpha > 0.0 && target_alpha < 1.0))
    throw InvalidArgument("target alpha must lie in (0, 1)");
  if (table.alpha_hat.empty() || table.alpha_hat.size() != table.alpha.size())
    throw InvalidArgument("calibration table is empty or malformed");
  AlphaHatLookup best;
  bool found = false;
  for (std::size_t i = 0; i < table.alpha_hat.size(); ++i) {
    if (table.alpha[i] <= target_alpha) {
      best.alpha_hat = table.alpha_hat[i];
      best.achieved_alpha = table.alpha[i];
      best.index = i;
      found = true;
    }
  }
  if (!found || best.alpha_hat <= 0.0) {
    best = AlphaHatLookup{};
    best.warning = true;
  }
  return best;
}

namespace {

template <typename Value>
double interpolate_at_alpha(const AlphaBetaCurve& curve, double alpha, Value value) {
  const auto& pts = curve.points;
  if (pts.empty()) throw InvalidArgument("alpha-beta curve is empty");
  std::size_t lo = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].alpha <= alpha) lo = i;
  if (pts[lo].alpha > alpha) return value(pts[lo]);  // alpha below the curve's start
  if (pts[lo].alpha == alpha || lo + 1 == pts.size()) return value(pts[lo]);
  const auto& a = pts[lo];
  const auto& b = pts[lo + 1];
  const double w = (alpha - a.alpha) / (b.alpha - a.alpha);
  return value(a) + w * (value(b) - value(a));
}

}  // namespace

double beta_at_alpha(const AlphaBetaCurve& curve, double alpha) {
  return interpolate_at_alpha(curve, alpha, [](const AlphaBetaPoint& p) { return p.beta; });
}

double beta_se_at_alpha(const AlphaBetaCurve& curve, double alpha) {
  return interpolate_at_alpha(curve, alpha, [](const AlphaBetaPoint& p) { return p.beta_se; });
}

StabilityReport stability_scan(const CalibrationConfig& base,
                               const std::vector<StabilityVariant>& variants, unsigned workers) {
  if (variants.size() < 2) throw InvalidArgument("stability scan needs at least two variants");
  StabilityReport report;
  report.variants = variants;
  for (const auto& v : variants) {
    CalibrationConfig c = base;
    c.t1 = v.t1;
    c.t2 = v.t2;
    c.null_process = scale_rate(base.null_process, v.rate_multiplier);
    report.tables.push_back(calibrate_null(c, workers));
  }
  const std::size_t grid = report.tables.front().alpha.size();
  for (std::size_t g = 0; g < grid; ++g) {
    double lo = 1.0;
    double hi = 0.0;
    for (const auto& t : report.tables) {
      lo = std::min(lo, t.alpha[g]);
      hi = std::max(hi, t.alpha[g]);
    }
    if (hi - lo > report.max_deviation) {
      report.max_deviation = hi - lo;
      report.worst_index = g;
    }
  }
  return report;
}

}  // namespace airkit
