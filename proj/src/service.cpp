#include "airkit/service.hpp"

#include <cstdlib>

#include "httplib.h"

#include "airkit/json_io.hpp"

namespace airkit {

void validate(const JobLimits& limits) {
  if (limits.max_replications <= 0 || !(limits.max_horizon > 0.0) || !(limits.request_timeout > 0.0) ||
      limits.max_concurrent_jobs == 0 || limits.workers == 0)
    throw InvalidArgument("job limits must all be positive");
}

JobLimits limits_from_environment(JobLimits limits) {
  if (const char* reps = std::getenv("AIRKIT_MAX_REPS")) {
    char* end = nullptr;
    const long long v = std::strtoll(reps, &end, 10);
    if (end == reps || *end != '\0' || v <= 0)
      throw InvalidArgument("AIRKIT_MAX_REPS must be a positive integer");
    limits.max_replications = v;
  }
  return limits;
}

namespace {

ApiResponse error(int status, std::string code, const std::string& message, const std::string& field = {}) {
  Json e;
  e["code"] = std::move(code);
  e["field"] = field.empty() ? Json(nullptr) : Json(field);
  e["message"] = message;
  Json j;
  j["error"] = std::move(e);
  return {status, dump(j)};
}

// Limit violations are computation rejections (422), not schema errors.
class LimitExceeded : public InvalidArgument {
 public:
  LimitExceeded(std::string field, const std::string& message)
      : InvalidArgument(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

void check_replications(std::int64_t reps, const JobLimits& limits) {
  if (reps > limits.max_replications)
    throw LimitExceeded("replications", "replications " + std::to_string(reps) + " exceed the limit of " +
                                            std::to_string(limits.max_replications));
}

void check_horizon(const char* field, double t, const JobLimits& limits) {
  if (t > limits.max_horizon)
    throw LimitExceeded(field, std::string(field) + " exceeds the horizon limit of " +
                                   std::to_string(limits.max_horizon));
}

Json calibrate(const Json& body, const JobLimits& limits) {
  const auto config = calibration_config_from_json(body);
  check_replications(config.replications, limits);
  check_horizon("t1", config.t1, limits);
  check_horizon("t2", config.t2, limits);
  return to_json(calibrate_null(config, limits.workers));
}

Json power(const Json& body, const JobLimits& limits) {
  const auto config = calibration_config_from_json(body);
  if (!body.contains("effect_size") || !body["effect_size"].is_number())
    throw SchemaError("effect_size", "is required and must be a number");
  check_replications(config.replications, limits);
  check_horizon("t1", config.t1, limits);
  check_horizon("t2", config.t2, limits);
  return to_json(power_curve(config, body["effect_size"].get<double>(), limits.workers));
}

Json wait(const Json& body, const JobLimits& limits) {
  auto query = wait_query_from_json(body);
  if (!body.contains("max_horizon") || body["max_horizon"].is_null()) query.max_horizon = limits.max_horizon;
  check_replications(query.replications, limits);
  check_horizon("max_horizon", query.max_horizon, limits);
  if (query.fixed_t1) check_horizon("t1", *query.fixed_t1, limits);
  return to_json(recommend_wait(query, limits.workers));
}

}  // namespace

Api::Api(JobLimits limits) : limits_(std::move(limits)) { validate(limits_); }

ApiResponse Api::handle(std::string_view method, std::string_view path, std::string_view body) {
  if (path == "/api/v1/health") {
    if (method != "GET") return error(405, "method_not_allowed", "use GET");
    return {200, R"({"status":"ok"})"};
  }

  using Handler = Json (*)(const Json&, const JobLimits&);
  Handler handler = nullptr;
  if (path == "/api/v1/estimate") {
    handler = [](const Json& j, const JobLimits&) { return to_json(estimate(histories_from_json(j))); };
  } else if (path == "/api/v1/test") {
    handler = [](const Json& j, const JobLimits&) { return to_json(ump_poisson_test(test_input_from_json(j))); };
  } else if (path == "/api/v1/calibrate") {
    handler = calibrate;
  } else if (path == "/api/v1/power-curve") {
    handler = power;
  } else if (path == "/api/v1/recommend-wait") {
    handler = wait;
  } else {
    return error(404, "not_found", "no such endpoint: " + std::string(path));
  }
  if (method != "POST") return error(405, "method_not_allowed", "use POST");

  if (in_flight_.fetch_add(1) >= limits_.max_concurrent_jobs) {
    in_flight_.fetch_sub(1);
    return error(429, "overloaded", "too many concurrent jobs; retry later");
  }
  struct Release {
    std::atomic<unsigned>& counter;
    ~Release() { counter.fetch_sub(1); }
  } release{in_flight_};

  try {
    const Json request = parse_json(body);
    return {200, dump(handler(request, limits_))};
  } catch (const SchemaError& e) {
    return error(400, "bad_request", e.what(), e.field());
  } catch (const LimitExceeded& e) {
    return error(422, "limit_exceeded", e.what(), e.field());
  } catch (const InvalidArgument& e) {
    return error(422, "rejected", e.what());
  } catch (const std::domain_error& e) {
    return error(422, "rejected", e.what());
  } catch (const std::exception& e) {
    return error(500, "internal", e.what());
  }
}

struct HttpService::Impl {
  explicit Impl(JobLimits limits) : api(std::move(limits)) {}
  Api api;
  httplib::Server server;
};

HttpService::HttpService(JobLimits limits) : impl_(std::make_unique<Impl>(std::move(limits))) {
  auto& server = impl_->server;
  const auto& lim = impl_->api.limits();
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(lim.request_timeout * 1000.0));
  server.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
  server.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
  server.set_default_headers({{"Access-Control-Allow-Origin", lim.cors_origin},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});

  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto out = impl_->api.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  server.Get(R"(/api/v1/.*)", route);
  server.Post(R"(/api/v1/.*)", route);
  server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpService::listen() { return impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace airkit
