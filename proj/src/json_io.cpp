#include "airkit/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace airkit {

namespace {

void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  out += buf;
}

void write(std::string& out, const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
    case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
    case Json::value_t::number_float: write_number(out, j.get<double>()); break;
    case Json::value_t::string: out += j.dump(); break;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        write(out, e);
      }
      out += ']';
      break;
    }
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        write(out, it.value());
      }
      out += '}';
      break;
    }
    default: out += "null"; break;
  }
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string path(const std::string& at, const char* key) { return at.empty() ? key : at + "." + key; }

const Json& member(const Json& j, const char* key, const std::string& at) {
  if (!j.is_object()) throw SchemaError(at, "must be an object");
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw SchemaError(path(at, key), "is required");
  return *it;
}

bool has(const Json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && !it->is_null();
}

double number(const Json& j, const char* key, const std::string& at) {
  const auto& v = member(j, key, at);
  if (!v.is_number()) throw SchemaError(path(at, key), "must be a number");
  return v.get<double>();
}

double number_or(const Json& j, const char* key, const std::string& at, double fallback) {
  return has(j, key) ? number(j, key, at) : fallback;
}

std::int64_t integer(const Json& j, const char* key, const std::string& at) {
  const auto& v = member(j, key, at);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.0e15)
      return static_cast<std::int64_t>(d);
  }
  throw SchemaError(path(at, key), "must be an integer");
}

std::uint64_t seed(const Json& j, const char* key, const std::string& at) {
  const auto& v = member(j, key, at);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw SchemaError(path(at, key), "must be a non-negative integer");
}

std::string text(const Json& j, const char* key, const std::string& at) {
  const auto& v = member(j, key, at);
  if (!v.is_string()) throw SchemaError(path(at, key), "must be a string");
  return v.get<std::string>();
}

}  // namespace

std::string dump(const Json& doc) {
  std::string out;
  write(out, doc);
  return out;
}

Json parse_json(std::string_view body) {
  try {
    return Json::parse(body.begin(), body.end());
  } catch (const Json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Serialization

Json to_json(const BatchDistribution& batch) {
  Json j;
  if (const auto* c = std::get_if<ConstantBatch>(&batch)) {
    j["kind"] = "constant";
    j["k"] = c->k;
  } else if (const auto* g = std::get_if<GeometricBatch>(&batch)) {
    j["kind"] = "geometric";
    j["p"] = g->p;
  } else {
    const auto& e = std::get<EmpiricalBatch>(batch);
    j["kind"] = "empirical";
    Json pmf = Json::array();
    for (auto [value, prob] : e.pmf) pmf.push_back(Json::array({value, prob}));
    j["pmf"] = std::move(pmf);
  }
  return j;
}

Json to_json(const ProcessSpec& spec) {
  Json j;
  if (const auto* p = std::get_if<PoissonProcess>(&spec)) {
    j["kind"] = "poisson";
    j["rate"] = p->rate;
  } else if (const auto* w = std::get_if<WeibullRenewal>(&spec)) {
    j["kind"] = "weibull_renewal";
    j["shape"] = w->shape;
    j["mean_rate"] = w->mean_rate;
  } else {
    const auto& c = std::get<CompoundPoisson>(spec);
    j["kind"] = "compound_poisson";
    j["node_rate"] = c.node_rate;
    j["batch"] = to_json(c.batch);
  }
  return j;
}

Json to_json(const RateEstimate& e) {
  Json j;
  j["n_failures"] = e.n_failures;
  j["n_recoveries"] = e.n_recoveries;
  j["total_up_time"] = e.total_up_time;
  j["total_down_time"] = e.total_down_time;
  j["mttf"] = optional_number(e.mttf);
  j["mttr"] = optional_number(e.mttr);
  j["failure_rate"] = optional_number(e.failure_rate);
  j["rate_with_downtime"] = optional_number(e.rate_with_downtime);
  j["air"] = optional_number(e.air);
  j["undefined_reason"] = e.undefined_reason.empty() ? Json(nullptr) : Json(e.undefined_reason);
  return j;
}

Json to_json(const TestInput& in) {
  Json j;
  j["n1"] = in.n1;
  j["t1"] = in.t1;
  j["n2"] = in.n2;
  j["t2"] = in.t2;
  j["alternative"] = to_string(in.alternative);
  j["scale_factor"] = in.scale_factor;
  return j;
}

Json to_json(const TestResult& r) {
  Json j;
  j["p_value"] = r.p_value;
  j["conditional_total"] = r.conditional_total;
  j["success_probability_h0"] = r.success_probability_h0;
  j["effective_n1"] = r.effective_n1;
  return j;
}

Json to_json(const CalibrationConfig& c) {
  Json j;
  j["null_process"] = to_json(c.null_process);
  j["t1"] = c.t1;
  j["t2"] = c.t2;
  j["replications"] = c.replications;
  j["grid_step"] = optional_number(c.grid_step);
  j["master_seed"] = c.master_seed;
  j["scale_factor"] = c.scale_factor;
  return j;
}

Json to_json(const CalibrationTable& t) {
  Json j;
  j["alpha_hat"] = t.alpha_hat;
  j["alpha"] = t.alpha;
  j["se"] = t.standard_error;
  j["config"] = to_json(t.config);
  return j;
}

Json to_json(const AlphaBetaCurve& c) {
  Json alpha_hat = Json::array(), alpha = Json::array(), alpha_se = Json::array(),
       beta = Json::array(), se = Json::array();
  for (const auto& p : c.points) {
    alpha_hat.push_back(p.alpha_hat);
    alpha.push_back(p.alpha);
    alpha_se.push_back(p.alpha_se);
    beta.push_back(p.beta);
    se.push_back(p.beta_se);
  }
  Json j;
  j["alpha_hat"] = std::move(alpha_hat);
  j["alpha"] = std::move(alpha);
  j["alpha_se"] = std::move(alpha_se);
  j["beta"] = std::move(beta);
  j["se"] = std::move(se);
  j["effect_size"] = c.effect_size;
  j["config"] = to_json(c.config);
  return j;
}

Json to_json(const StabilityReport& r) {
  Json variants = Json::array();
  for (std::size_t i = 0; i < r.variants.size(); ++i) {
    Json v;
    v["t1"] = r.variants[i].t1;
    v["t2"] = r.variants[i].t2;
    v["rate_multiplier"] = r.variants[i].rate_multiplier;
    v["table"] = to_json(r.tables[i]);
    variants.push_back(std::move(v));
  }
  Json j;
  j["max_deviation"] = r.max_deviation;
  j["worst_alpha_hat"] = r.tables.empty() ? Json(nullptr) : Json(r.tables.front().alpha_hat[r.worst_index]);
  j["variants"] = std::move(variants);
  return j;
}

Json to_json(const WaitQuery& q) {
  Json j;
  j["process"] = to_json(q.process);
  j["effect_size"] = q.effect_size;
  j["target_alpha"] = q.target_alpha;
  j["target_beta"] = q.target_beta;
  j["t1"] = optional_number(q.fixed_t1);
  j["replications"] = q.replications;
  j["master_seed"] = q.master_seed;
  j["max_horizon"] = q.max_horizon;
  return j;
}

Json to_json(const WaitRecommendation& r) {
  Json trace = Json::array();
  for (const auto& p : r.iterations) {
    Json s;
    s["phase"] = p.phase;
    s["t1"] = p.t1;
    s["t2"] = p.t2;
    s["replications"] = p.replications;
    s["alpha_hat"] = p.alpha_hat;
    s["achieved_alpha"] = p.achieved_alpha;
    s["alpha_se"] = p.alpha_se;
    s["achieved_beta"] = p.achieved_beta;
    s["beta_se"] = p.beta_se;
    s["meets_target"] = p.meets_target;
    trace.push_back(std::move(s));
  }
  Json j;
  j["feasible"] = r.feasible;
  j["t1"] = r.t1;
  j["t2"] = r.t2;
  j["achieved_alpha"] = r.achieved_alpha;
  j["alpha_se"] = r.alpha_se;
  j["achieved_beta"] = r.achieved_beta;
  j["beta_se"] = r.beta_se;
  j["alpha_hat_used"] = r.alpha_hat_used;
  j["search_tolerance"] = r.search_tolerance;
  j["reason"] = r.reason.empty() ? Json(nullptr) : Json(r.reason);
  j["iterations"] = std::move(trace);
  return j;
}

Json to_json(const CountMoments& m) {
  Json j;
  j["mean"] = m.mean;
  j["variance"] = optional_number(m.variance);
  return j;
}

// ---------------------------------------------------------------------------
// Parsing

BatchDistribution batch_from_json(const Json& j, const std::string& at) {
  const auto kind = text(j, "kind", at);
  BatchDistribution batch;
  if (kind == "constant") {
    batch = ConstantBatch{integer(j, "k", at)};
  } else if (kind == "geometric") {
    batch = GeometricBatch{number(j, "p", at)};
  } else if (kind == "empirical") {
    const auto& pmf = member(j, "pmf", at);
    if (!pmf.is_array()) throw SchemaError(path(at, "pmf"), "must be an array of [value, probability]");
    EmpiricalBatch e;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      const auto& entry = pmf[i];
      const std::string where = path(at, "pmf") + "[" + std::to_string(i) + "]";
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() || !entry[1].is_number())
        throw SchemaError(where, "must be [integer value, probability]");
      e.pmf.emplace_back(entry[0].get<std::int64_t>(), entry[1].get<double>());
    }
    batch = std::move(e);
  } else {
    throw SchemaError(path(at, "kind"), "unknown batch kind '" + kind + "'");
  }
  return batch;
}

ProcessSpec process_from_json(const Json& j, const std::string& at) {
  const auto kind = text(j, "kind", at);
  ProcessSpec spec;
  if (kind == "poisson") {
    spec = PoissonProcess{number(j, "rate", at)};
  } else if (kind == "weibull_renewal") {
    spec = WeibullRenewal{number(j, "shape", at), number(j, "mean_rate", at)};
  } else if (kind == "compound_poisson") {
    spec = CompoundPoisson{number(j, "node_rate", at), batch_from_json(member(j, "batch", at), path(at, "batch"))};
  } else {
    throw SchemaError(path(at, "kind"), "unknown process kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

TestInput test_input_from_json(const Json& j) {
  TestInput in;
  in.n1 = integer(j, "n1", "");
  in.n2 = integer(j, "n2", "");
  in.t1 = number(j, "t1", "");
  in.t2 = number(j, "t2", "");
  if (has(j, "alternative")) {
    const auto a = text(j, "alternative", "");
    try {
      in.alternative = parse_alternative(a.c_str());
    } catch (const InvalidArgument& e) {
      throw SchemaError("alternative", e.what());
    }
  }
  in.scale_factor = number_or(j, "scale_factor", "", 1.0);
  return in;
}

CalibrationConfig calibration_config_from_json(const Json& j) {
  CalibrationConfig c;
  c.null_process = process_from_json(member(j, "null_process", ""), "null_process");
  c.t1 = number(j, "t1", "");
  c.t2 = number(j, "t2", "");
  c.replications = integer(j, "replications", "");
  if (has(j, "grid_step")) c.grid_step = number(j, "grid_step", "");
  c.master_seed = seed(j, "master_seed", "");
  c.scale_factor = number_or(j, "scale_factor", "", 1.0);
  return c;
}

WaitQuery wait_query_from_json(const Json& j) {
  WaitQuery q;
  q.process = process_from_json(member(j, "process", ""), "process");
  q.effect_size = number(j, "effect_size", "");
  q.target_alpha = number(j, "target_alpha", "");
  q.target_beta = number(j, "target_beta", "");
  if (has(j, "t1")) q.fixed_t1 = number(j, "t1", "");
  if (has(j, "replications")) q.replications = integer(j, "replications", "");
  q.master_seed = seed(j, "master_seed", "");
  q.max_horizon = number_or(j, "max_horizon", "", q.max_horizon);
  return q;
}

StabilityVariant stability_variant_from_json(const Json& j, const std::string& at) {
  return StabilityVariant{number(j, "t1", at), number(j, "t2", at), number_or(j, "rate_multiplier", at, 1.0)};
}

std::vector<MachineHistory> histories_from_json(const Json& j) {
  const Json* rows = &j;
  std::string at = "";
  if (j.is_object()) {
    rows = &member(j, "rows", "");
    at = "rows";
  }
  if (!rows->is_array()) throw SchemaError(at, "must be an array of state rows");
  std::vector<StateInterval> intervals;
  for (std::size_t i = 0; i < rows->size(); ++i) {
    const auto& r = (*rows)[i];
    const std::string where = at + "[" + std::to_string(i) + "]";
    StateInterval iv;
    iv.machine_id = text(r, "machine_id", where);
    const auto state = text(r, "state", where);
    if (state == "UP") {
      iv.state = State::up;
    } else if (state == "DOWN") {
      iv.state = State::down;
    } else {
      throw SchemaError(where + ".state", "must be UP or DOWN");
    }
    iv.duration_hours = number(r, "duration_hours", where);
    const auto& c = member(r, "censored", where);
    if (c.is_boolean()) {
      iv.censored_at_end = c.get<bool>();
    } else if (c.is_number_integer() && (c.get<int>() == 0 || c.get<int>() == 1)) {
      iv.censored_at_end = c.get<int>() == 1;
    } else {
      throw SchemaError(where + ".censored", "must be 0, 1, true or false");
    }
    intervals.push_back(std::move(iv));
  }
  return group_state_rows(std::move(intervals));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fmt12(double v) {
  std::string s;
  write_number(s, v);
  return s;
}

}  // namespace

void write_table_csv(std::ostream& out, const CalibrationTable& t) {
  out << "alpha_hat,alpha,se\n";
  for (std::size_t i = 0; i < t.alpha_hat.size(); ++i)
    out << fmt12(t.alpha_hat[i]) << ',' << fmt12(t.alpha[i]) << ',' << fmt12(t.standard_error[i]) << '\n';
}

void write_curve_csv(std::ostream& out, const AlphaBetaCurve& c) {
  out << "alpha,beta,se\n";
  for (const auto& p : c.points) out << fmt12(p.alpha) << ',' << fmt12(p.beta) << ',' << fmt12(p.beta_se) << '\n';
}

}  // namespace airkit
