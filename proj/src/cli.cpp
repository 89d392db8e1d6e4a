#include "airkit/cli.hpp"

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "airkit/json_io.hpp"
#include "airkit/service.hpp"

namespace airkit::cli {

namespace {

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw InvalidArgument("cannot open output file '" + path + "'");
      use_file_ = true;
    }
  }
  std::ostream& stream() { return use_file_ ? file_ : fallback_; }

 private:
  std::ostream& fallback_;
  std::ofstream file_;
  bool use_file_ = false;
};

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProcessSpec read_process(const std::string& path) {
  return process_from_json(parse_json(read_file(path)), "process");
}

struct Common {
  std::string output;
  std::string format = "json";
  unsigned workers = 1;
};

void add_common(CLI::App* cmd, Common& c, bool csv_allowed) {
  cmd->add_option("--output,-o", c.output, "Output path (default stdout)");
  auto* fmt = cmd->add_option("--format", c.format, "Output format")->capture_default_str();
  fmt->check(CLI::IsMember(csv_allowed ? std::vector<std::string>{"json", "csv"}
                                       : std::vector<std::string>{"json"}));
}

void emit_json(const Common& c, std::ostream& fallback, const Json& doc) {
  Output out(c.output, fallback);
  out.stream() << dump(doc) << '\n';
}

struct SimulationFlags {
  std::string process;
  double t1 = 0.0;
  double t2 = 0.0;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  std::optional<double> grid_step;
  double scale = 1.0;
};

void add_simulation(CLI::App* cmd, SimulationFlags& f, bool horizons) {
  cmd->add_option("--process", f.process, "ProcessSpec JSON file")->required();
  if (horizons) {
    cmd->add_option("--t1", f.t1, "Group 1 observation horizon")->required();
    cmd->add_option("--t2", f.t2, "Group 2 observation horizon")->required();
  }
  cmd->add_option("--reps", f.reps, "Monte Carlo replications")->required();
  cmd->add_option("--seed", f.seed, "Master seed (required)")->required();
  cmd->add_option("--grid-step", f.grid_step, "Uniform alpha-hat grid step (default: two-tier grid)");
  cmd->add_option("--scale", f.scale, "Count scaling factor applied before the test")->capture_default_str();
}

CalibrationConfig to_config(const SimulationFlags& f) {
  CalibrationConfig c;
  c.null_process = read_process(f.process);
  c.t1 = f.t1;
  c.t2 = f.t2;
  c.replications = f.reps;
  c.grid_step = f.grid_step;
  c.master_seed = f.seed;
  c.scale_factor = f.scale;
  return c;
}

HttpService* g_service = nullptr;

extern "C" void handle_stop_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"airkit: interruption-rate measurement, simulation and comparison"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "airkit 1.0.0");

  // heartbeat-compress
  auto* hb = app.add_subcommand("heartbeat-compress", "Compress heartbeat CSV into state-transition CSV");
  Common hb_common;
  hb_common.format = "csv";
  std::string hb_input;
  std::int64_t hb_period = 300;
  double hb_gap = 3.0;
  std::optional<std::int64_t> hb_start, hb_end;
  hb->add_option("--input,-i", hb_input, "Heartbeat CSV (machine_id,timestamp,status)")->required();
  hb->add_option("--period", hb_period, "Heartbeat period in seconds")->capture_default_str();
  hb->add_option("--gap-factor", hb_gap, "Silence longer than gap-factor x period counts as DOWN")
      ->capture_default_str();
  hb->add_option("--window-start", hb_start, "Processing window start (default: first beat)");
  hb->add_option("--window-end", hb_end, "Processing window end (default: last beat + period)");
  add_common(hb, hb_common, true);

  // estimate
  auto* est = app.add_subcommand("estimate", "MTTF / MTTR / AIR from state-transition CSV");
  Common est_common;
  std::string est_input;
  est->add_option("--input,-i", est_input, "State-transition CSV (machine_id,state,duration_hours,censored)")
      ->required();
  add_common(est, est_common, true);

  // test
  auto* tst = app.add_subcommand("test", "UMP conditional binomial test of two event rates");
  Common tst_common;
  TestInput tin;
  std::string alternative = "greater";
  tst->add_option("--n1", tin.n1, "Group 1 event count")->required();
  tst->add_option("--t1", tin.t1, "Group 1 observation time")->required();
  tst->add_option("--n2", tin.n2, "Group 2 event count")->required();
  tst->add_option("--t2", tin.t2, "Group 2 observation time")->required();
  tst->add_option("--alternative", alternative, "greater | less | two-sided")
      ->check(CLI::IsMember({"greater", "less", "two-sided"}))
      ->capture_default_str();
  tst->add_option("--scale", tin.scale_factor, "Count scaling factor")->capture_default_str();
  add_common(tst, tst_common, false);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Achieved false-positive rate per alpha-hat under the null");
  Common cal_common;
  SimulationFlags cal_flags;
  add_simulation(cal, cal_flags, true);
  add_common(cal, cal_common, true);
  cal->add_option("--workers", cal_common.workers, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  // power-curve
  auto* pc = app.add_subcommand("power-curve", "Alpha-beta curve for a rate ratio");
  Common pc_common;
  SimulationFlags pc_flags;
  double pc_effect = 0.0;
  add_simulation(pc, pc_flags, true);
  pc->add_option("--effect", pc_effect, "Rate ratio applied to group 1")->required();
  add_common(pc, pc_common, true);
  pc->add_option("--workers", pc_common.workers, "Worker threads")->check(CLI::PositiveNumber);

  // stability-scan
  auto* ss = app.add_subcommand("stability-scan", "Spread of null calibrations across horizons and rates");
  Common ss_common;
  SimulationFlags ss_flags;
  std::vector<std::string> ss_variants;
  add_simulation(ss, ss_flags, false);
  ss->add_option("--variant", ss_variants, "t1,t2,rate_multiplier (repeat, at least two)")
      ->required()
      ->expected(1, -1);
  add_common(ss, ss_common, false);
  ss->add_option("--workers", ss_common.workers, "Worker threads")->check(CLI::PositiveNumber);

  // recommend-wait
  auto* rw = app.add_subcommand("recommend-wait", "Observation time needed to reach target alpha and beta");
  Common rw_common;
  std::string rw_process;
  WaitQuery rw_query;
  std::optional<double> rw_t1;
  rw->add_option("--process", rw_process, "ProcessSpec JSON file")->required();
  rw->add_option("--effect", rw_query.effect_size, "Rate ratio to detect (> 1)")->required();
  rw->add_option("--alpha", rw_query.target_alpha, "Target false-positive rate")->required();
  rw->add_option("--beta", rw_query.target_beta, "Target false-negative rate")->required();
  rw->add_option("--t1", rw_t1, "Fix group 1 horizon and search group 2");
  rw->add_option("--reps", rw_query.replications, "Replications per probe")->capture_default_str();
  rw->add_option("--seed", rw_query.master_seed, "Master seed (required)")->required();
  rw->add_option("--max-horizon", rw_query.max_horizon, "Largest horizon to try")->capture_default_str();
  add_common(rw, rw_common, false);
  rw->add_option("--workers", rw_common.workers, "Worker threads")->check(CLI::PositiveNumber);

  // serve
  auto* srv = app.add_subcommand("serve", "HTTP JSON API");
  std::string host = "127.0.0.1";
  int port = 8080;
  JobLimits limits;
  srv->add_option("--host", host, "Bind address")->capture_default_str();
  srv->add_option("--port", port, "Port")->capture_default_str();
  srv->add_option("--max-reps", limits.max_replications, "Replication cap (AIRKIT_MAX_REPS overrides)")
      ->capture_default_str();
  srv->add_option("--max-horizon", limits.max_horizon, "Horizon cap")->capture_default_str();
  srv->add_option("--timeout", limits.request_timeout, "Socket timeout in seconds")->capture_default_str();
  srv->add_option("--max-jobs", limits.max_concurrent_jobs, "Concurrent job cap")->capture_default_str();
  srv->add_option("--workers", limits.workers, "Simulation threads per request")->capture_default_str();
  srv->add_option("--cors-origin", limits.cors_origin, "Allowed CORS origin")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (const auto* sub : app.get_subcommands())
      if (sub->parsed()) failing = sub;
    err << failing->help();
    return kExitUsage;
  }

  try {
    if (hb->parsed()) {
      std::istringstream in(read_file(hb_input));
      const auto records = read_heartbeat_csv(in);
      if (records.empty() && (!hb_start || !hb_end))
        throw InvalidArgument("empty heartbeat log needs an explicit --window-start and --window-end");
      TimeWindow window;
      if (!records.empty()) {
        auto [lo, hi] = std::minmax_element(records.begin(), records.end(), [](const auto& a, const auto& b) {
          return a.timestamp < b.timestamp;
        });
        window = {lo->timestamp, hi->timestamp + hb_period};
      }
      if (hb_start) window.start = *hb_start;
      if (hb_end) window.end = *hb_end;
      const auto histories = compress_fleet(records, CompressOptions{hb_period, hb_gap}, window);
      Output o(hb_common.output, out);
      if (hb_common.format == "csv") {
        write_state_csv(o.stream(), histories);
      } else {
        Json rows = Json::array();
        for (const auto& h : histories)
          for (const auto& iv : h.intervals) {
            Json r;
            r["machine_id"] = iv.machine_id;
            r["state"] = to_string(iv.state);
            r["duration_hours"] = iv.duration_hours;
            r["censored"] = iv.censored() ? 1 : 0;
            rows.push_back(std::move(r));
          }
        o.stream() << dump(rows) << '\n';
      }
      return kExitOk;
    }

    if (est->parsed()) {
      std::istringstream in(read_file(est_input));
      const auto result = estimate(read_state_csv(in));
      const auto doc = to_json(result);
      if (est_common.format == "csv") {
        Output o(est_common.output, out);
        bool first = true;
        for (auto it = doc.begin(); it != doc.end(); ++it) o.stream() << (first ? "" : ",") << it.key(), first = false;
        o.stream() << '\n';
        first = true;
        for (auto it = doc.begin(); it != doc.end(); ++it) {
          std::string v = it->is_null() ? "" : it->is_string() ? it->get<std::string>() : dump(*it);
          if (v.find(',') != std::string::npos) v = "\"" + v + "\"";
          o.stream() << (first ? "" : ",") << v;
          first = false;
        }
        o.stream() << '\n';
      } else {
        emit_json(est_common, out, doc);
      }
      return kExitOk;
    }

    if (tst->parsed()) {
      tin.alternative = parse_alternative(alternative.c_str());
      emit_json(tst_common, out, to_json(ump_poisson_test(tin)));
      return kExitOk;
    }

    if (cal->parsed()) {
      const auto config = to_config(cal_flags);
      err << "seed: " << config.master_seed << '\n';
      const auto table = calibrate_null(config, cal_common.workers);
      if (cal_common.format == "csv") {
        Output o(cal_common.output, out);
        write_table_csv(o.stream(), table);
      } else {
        emit_json(cal_common, out, to_json(table));
      }
      return kExitOk;
    }

    if (pc->parsed()) {
      const auto config = to_config(pc_flags);
      err << "seed: " << config.master_seed << '\n';
      const auto curve = power_curve(config, pc_effect, pc_common.workers);
      if (pc_common.format == "csv") {
        Output o(pc_common.output, out);
        write_curve_csv(o.stream(), curve);
      } else {
        emit_json(pc_common, out, to_json(curve));
      }
      return kExitOk;
    }

    if (ss->parsed()) {
      auto config = to_config(ss_flags);
      std::vector<StabilityVariant> variants;
      for (const auto& spec : ss_variants) {
        StabilityVariant v;
        char c1 = 0, c2 = 0;
        std::istringstream in(spec);
        if (!(in >> v.t1 >> c1 >> v.t2 >> c2 >> v.rate_multiplier) || c1 != ',' || c2 != ',' || !in.eof()) {
          err << "error: --variant expects t1,t2,rate_multiplier, got '" << spec << "'\n";
          return kExitUsage;
        }
        variants.push_back(v);
      }
      config.t1 = variants.front().t1;
      config.t2 = variants.front().t2;
      err << "seed: " << config.master_seed << '\n';
      emit_json(ss_common, out, to_json(stability_scan(config, variants, ss_common.workers)));
      return kExitOk;
    }

    if (rw->parsed()) {
      rw_query.process = read_process(rw_process);
      rw_query.fixed_t1 = rw_t1;
      err << "seed: " << rw_query.master_seed << '\n';
      emit_json(rw_common, out, to_json(recommend_wait(rw_query, rw_common.workers)));
      return kExitOk;
    }

    if (srv->parsed()) {
      limits = limits_from_environment(limits);
      HttpService service(limits);
      const int bound = service.bind(host, port);
      if (bound < 0) throw InvalidArgument("cannot bind " + host + ":" + std::to_string(port));
      err << "listening on http://" << host << ':' << bound << '\n';
      g_service = &service;
      std::signal(SIGINT, handle_stop_signal);
      std::signal(SIGTERM, handle_stop_signal);
      service.listen();
      g_service = nullptr;
      return kExitOk;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitRejected;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRejected;
  }
  return kExitUsage;
}

}  // namespace airkit::cli
