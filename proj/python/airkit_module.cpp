#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "airkit/calibration.hpp"
#include "airkit/hypothesis_test.hpp"
#include "airkit/json_io.hpp"
#include "airkit/point_process.hpp"
#include "airkit/rate_estimation.hpp"
#include "airkit/service.hpp"
#include "airkit/state_log.hpp"
#include "airkit/time_to_wait.hpp"

namespace py = pybind11;
using namespace airkit;

namespace {

// JSON crosses the boundary as text; the Python package decodes it.

std::string compress_csv(const std::string& csv, std::int64_t period, double gap_factor,
                         std::int64_t window_start, std::int64_t window_end) {
  std::istringstream in(csv);
  const auto records = read_heartbeat_csv(in);
  std::ostringstream out;
  write_state_csv(out, compress_fleet(records, CompressOptions{period, gap_factor}, TimeWindow{window_start, window_end}));
  return out.str();
}

std::string estimate_csv(const std::string& csv) {
  std::istringstream in(csv);
  return dump(to_json(estimate(read_state_csv(in))));
}

std::string estimate_rows(const std::string& rows) {
  return dump(to_json(estimate(histories_from_json(parse_json(rows)))));
}

std::string test(std::int64_t n1, double t1, std::int64_t n2, double t2, const std::string& alternative,
                 double scale_factor) {
  return dump(to_json(ump_poisson_test({n1, n2, t1, t2, parse_alternative(alternative.c_str()), scale_factor})));
}

std::string calibrate(const std::string& config, unsigned workers) {
  const auto c = calibration_config_from_json(parse_json(config));
  py::gil_scoped_release release;
  return dump(to_json(calibrate_null(c, workers)));
}

std::string curve(const std::string& config, double effect_size, unsigned workers) {
  const auto c = calibration_config_from_json(parse_json(config));
  py::gil_scoped_release release;
  return dump(to_json(power_curve(c, effect_size, workers)));
}

std::string wait(const std::string& query, unsigned workers) {
  const auto q = wait_query_from_json(parse_json(query));
  py::gil_scoped_release release;
  return dump(to_json(recommend_wait(q, workers)));
}

std::vector<std::int64_t> counts(const std::string& process, double horizon, std::size_t n, std::uint64_t seed) {
  const auto spec = process_from_json(parse_json(process));
  std::vector<std::int64_t> out(n);
  Stream s(seed);
  for (auto& c : out) c = sample_count(spec, horizon, s);
  return out;
}

std::string process_moments(const std::string& process, double horizon) {
  return dump(to_json(moments(process_from_json(parse_json(process)), horizon)));
}

py::tuple handle(const std::string& method, const std::string& path, const std::string& body) {
  static Api api{JobLimits{}};
  const auto r = api.handle(method, path, body);
  return py::make_tuple(r.status, r.body);
}

}  // namespace

PYBIND11_MODULE(_airkit, m) {
  m.doc() = "Native core of the airkit package";
  m.def("compress_heartbeats_csv", &compress_csv, py::arg("csv"), py::arg("period") = 300,
        py::arg("gap_factor") = 3.0, py::arg("window_start"), py::arg("window_end"));
  m.def("estimate_csv", &estimate_csv, py::arg("csv"));
  m.def("estimate_rows", &estimate_rows, py::arg("rows"));
  m.def("test", &test, py::arg("n1"), py::arg("t1"), py::arg("n2"), py::arg("t2"),
        py::arg("alternative") = "greater", py::arg("scale_factor") = 1.0);
  m.def("binomial_tail", [](std::int64_t k, std::int64_t n, double p, bool upper) {
    return binomial_tail(k, n, p, upper ? TailDirection::ge : TailDirection::le);
  }, py::arg("k"), py::arg("n"), py::arg("p"), py::arg("upper") = true);
  m.def("calibrate", &calibrate, py::arg("config"), py::arg("workers") = 1);
  m.def("power_curve", &curve, py::arg("config"), py::arg("effect_size"), py::arg("workers") = 1);
  m.def("recommend_wait", &wait, py::arg("query"), py::arg("workers") = 1);
  m.def("sample_counts", &counts, py::arg("process"), py::arg("horizon"), py::arg("n"), py::arg("seed"));
  m.def("moments", &process_moments, py::arg("process"), py::arg("horizon"));
  m.def("handle", &handle, py::arg("method"), py::arg("path"), py::arg("body") = "");
  m.attr("HOURS_PER_100_VM_YEARS") = kHoursPer100VmYears;
}
