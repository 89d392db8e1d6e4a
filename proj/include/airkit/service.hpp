#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace airkit {

struct JobLimits {
  std::int64_t max_replications = 20000;
  double max_horizon = 1e6;
  double request_timeout = 300.0;  // seconds, socket read/write
  unsigned max_concurrent_jobs = 4;
  unsigned workers = 1;  // per-request simulation threads
  std::string cors_origin = "*";
};

void validate(const JobLimits& limits);

/// Applies AIRKIT_MAX_REPS from the environment, if set.
JobLimits limits_from_environment(JobLimits limits);

struct ApiResponse {
  int status = 200;
  std::string body;
};

/// Routes a request to the library. Stateless apart from the in-flight
/// counter used for overload rejection; responses are a pure function of
/// the request for every endpoint.
class Api {
 public:
  explicit Api(JobLimits limits);

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

  const JobLimits& limits() const noexcept { return limits_; }

 private:
  JobLimits limits_;
  std::atomic<unsigned> in_flight_{0};
};

/// HTTP front end over Api.
class HttpService {
 public:
  explicit HttpService(JobLimits limits);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace airkit
