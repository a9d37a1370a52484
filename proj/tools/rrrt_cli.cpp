#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rrrt/error.hpp"
#include "rrrt/metrics/metrics.hpp"
#include "rrrt/scenario/config.hpp"
#include "rrrt/scenario/experiment.hpp"
#include "rrrt/scenario/format.hpp"
#include "rrrt/scenario/trace_io.hpp"

namespace fs = std::filesystem;
using namespace rrrt;

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kValidation = 3, kIo = 4, kCorrupt = 5, kInvariant = 6, kOther = 7 };

int exit_code(Errc c) {
  switch (c) {
    case Errc::Validation:
    case Errc::InvalidTarget:
    case Errc::UnknownParameter:
      return kValidation;
    case Errc::Io:
      return kIo;
    case Errc::Corrupt:
      return kCorrupt;
    case Errc::InvariantViolation:
      return kInvariant;
    default:
      return kOther;
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

template <typename F>
std::string capture(F&& f) {
  std::ostringstream out;
  f(out);
  return out.str();
}

void emit_summary(const sim::TraceMeta& meta, const metrics::MetricsReport& report, const std::string& format,
                  std::ostream& out) {
  if (format == "structured")
    scenario::write_summary_json(out, meta, report);
  else
    scenario::write_summary_csv(out, meta, report);
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
            const std::string& format) {
  const auto cfg = scenario::parse_scenario(scenario_path);
  const std::uint64_t s = seed.value_or(cfg.sim.seed);
  const auto trace = scenario::run_trace(cfg, s);
  const auto report = metrics::compute_report(trace);
  const auto cons = metrics::conservation(trace);
  ensure(cons.holds(), "packet conservation");

  if (out_dir.empty()) {
    emit_summary(trace.meta, report, format, std::cout);
    return kOk;
  }
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_file(dir / "trace.csv", scenario::serialize_trace(trace));
  write_file(dir / "intervals.csv", capture([&](std::ostream& o) { scenario::write_interval_csv(o, trace); }));
  write_file(dir / "connections.csv", capture([&](std::ostream& o) { scenario::write_connection_csv(o, trace); }));
  const bool structured = format == "structured";
  write_file(dir / (structured ? "summary.json" : "summary.csv"),
             capture([&](std::ostream& o) { emit_summary(trace.meta, report, format, o); }));
  std::cout << scenario::preamble(trace.meta) << "\nwrote " << dir.string() << '\n';
  return kOk;
}

int cmd_sweep(const std::string& scenario_path, std::optional<std::uint64_t> seed, const std::string& param,
              const std::vector<std::string>& values, std::uint32_t reps, unsigned threads, const std::string& out,
              const std::string& format) {
  auto cfg = scenario::parse_scenario(scenario_path);
  if (seed) cfg.sim.seed = *seed;
  scenario::SweepSpec spec{param, values, reps == 0 ? cfg.sim.repetitions : reps, threads};
  const auto rows = scenario::sweep(cfg, spec);

  std::string text;
  if (format == "structured") {
    nlohmann::json j;
    j["version"] = scenario::kArtifactVersion;
    j["scenario"] = scenario::hex64(scenario::scenario_hash(cfg));
    j["seed"] = cfg.sim.seed;
    j["parameter"] = param;
    auto& arr = j["rows"] = nlohmann::json::array();
    auto stat = [](const scenario::MetricSummary& m) {
      return nlohmann::json{{"mean", m.mean}, {"std", m.stddev}, {"n", m.samples}};
    };
    for (const auto& r : rows) {
      arr.push_back({{"value", r.value},
                     {"repetitions", r.repetitions},
                     {"convergence_time", stat(r.convergence_time)},
                     {"total_energy", stat(r.total_energy)},
                     {"aggregate_throughput", stat(r.aggregate_throughput)},
                     {"average_packet_delay", stat(r.average_packet_delay)}});
    }
    text = j.dump(2) + "\n";
  } else {
    text = scenario::sweep_csv(cfg, spec, rows);
  }
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  return kOk;
}

int cmd_replay(const std::string& trace_path, const std::string& format) {
  const auto trace = scenario::read_trace(trace_path);
  emit_summary(trace.meta, metrics::compute_report(trace), format, std::cout);
  return kOk;
}

int cmd_validate(const std::string& scenario_path) {
  const auto cfg = scenario::parse_scenario(scenario_path);
  std::cout << "valid scenario=" << scenario::hex64(scenario::scenario_hash(cfg)) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-constrained reliable transport simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out, format = "csv", trace_path, param;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> values;
  std::uint32_t reps = 0;
  unsigned threads = 0;

  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", format, "Summary format")->check(CLI::IsMember({"csv", "structured"}));
  };

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--scenario", scenario_path, "Scenario file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out, "Directory for trace, interval, connection and summary files");
  add_format(run);

  auto* sw = app.add_subcommand("sweep", "Sweep one parameter over a list of values");
  sw->add_option("--scenario", scenario_path, "Scenario file")->required();
  sw->add_option("--param", param, "Parameter as section.key")->required();
  sw->add_option("--values", values, "Values to try")->required()->delimiter(',');
  sw->add_option("--reps", reps, "Repetitions per value (default: scenario repetitions)");
  sw->add_option("--threads", threads, "Concurrent runs (default: hardware concurrency)");
  sw->add_option("--seed", seed, "Base seed");
  sw->add_option("--out", out, "Output file");
  add_format(sw);

  auto* rp = app.add_subcommand("replay", "Recompute metrics from a stored trace");
  rp->add_option("--trace", trace_path, "Trace file")->required();
  add_format(rp);

  auto* va = app.add_subcommand("validate", "Check a scenario file");
  va->add_option("--scenario", scenario_path, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(scenario_path, seed, out, format);
    if (*sw) return cmd_sweep(scenario_path, seed, param, values, reps, threads, out, format);
    if (*rp) return cmd_replay(trace_path, format);
    if (*va) return cmd_validate(scenario_path);
  } catch (const scenario::ValidationError& e) {
    for (const auto& v : e.violations()) std::cerr << "invalid " << v.field << ": " << v.reason << '\n';
    return kValidation;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kUsage;
}
