#include "udnmob/app.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "udnmob/acceptance.hpp"
#include "udnmob/presets.hpp"

namespace udnmob {

namespace fs = std::filesystem;

std::string default_output_dir() {
  const char* v = std::getenv(kOutputDirEnv);
  return (v && *v) ? std::string(v) : std::string("out");
}

std::vector<ExperimentSpec> build_experiments(const RunOptions& o) {
  if (o.scenario && o.preset) throw ConfigError("give either --scenario or --preset, not both");
  if (!o.scenario && !o.preset) throw ConfigError("one of --scenario or --preset is required");
  if (o.stride < 1) throw ConfigError("--stride must be >= 1");
  if (o.repetitions && *o.repetitions < 1) throw ConfigError("--reps must be >= 1");
  if (o.horizon && *o.horizon < 1) throw ConfigError("--T must be >= 1");

  std::vector<PolicySpec> algos;
  for (const auto& a : o.algos) algos.push_back(parse_policy_spec(a));

  std::vector<ExperimentSpec> out;
  if (o.preset) {
    PresetOptions p;
    p.horizon = o.horizon;
    p.repetitions = o.repetitions;
    p.seed = o.seed;
    p.stride = o.stride;
    p.threads = o.threads;
    out = make_preset(*o.preset, p);
    if (!algos.empty()) {
      for (auto& e : out) e.policies = algos;
    }
  } else {
    if (algos.empty()) throw ConfigError("no algorithms given (use --algo)");
    ExperimentSpec e;
    e.scenario = load_scenario(*o.scenario);
    if (o.horizon) e.scenario.horizon = *o.horizon;
    e.scenario.validate();
    e.id = e.scenario.name;
    e.policies = algos;
    e.repetitions = o.repetitions.value_or(20);
    e.seed = o.seed;
    e.stride = o.stride;
    e.threads = o.threads;
    out.push_back(std::move(e));
  }
  // Surface parameter errors for every grid point before running anything.
  for (const auto& e : out) {
    for (const auto& p : e.policies) make_policy(p, e.scenario, RngStream(0, 0));
  }
  return out;
}

namespace {

void print_summary_line(std::ostream& log, const ExperimentResult& r, const AlgoResult& a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-28s %-22s cost/slot %.5f  regret %10.3f +- %-8.3f", r.id.c_str(),
                a.label.c_str(), a.mean_cost / static_cast<double>(r.scenario.horizon),
                a.mean_regret, a.se_regret);
  log << buf;
  if (a.bound) {
    std::snprintf(buf, sizeof buf, "  bound(T%d) %.1f %s", a.bound->theorem, a.bound->bound,
                  a.bound->pass ? "ok" : "VIOLATED");
    log << buf;
  }
  log << '\n';
}

}  // namespace

int cmd_run(const RunOptions& o, std::ostream& log, std::ostream& err) {
  fs::path dir;
  fs::path trace_tmp, summary_tmp;
  bool created_dir = false;
  try {
    const auto experiments = build_experiments(o);
    dir = o.out ? fs::path(*o.out) : fs::path(default_output_dir());
    if (!fs::exists(dir)) {
      fs::create_directories(dir);
      created_dir = true;
    }
    trace_tmp = dir / "trace.csv.partial";
    summary_tmp = dir / "summary.csv.partial";
    std::ofstream trace(trace_tmp), summary(summary_tmp);
    if (!trace || !summary) throw ConfigError("cannot write to output directory " + dir.string());
    bool first = true;
    for (const auto& e : experiments) {
      const auto result = run_experiment(e);
      write_trace_csv(trace, result, first);
      write_summary_csv(summary, result, first);
      for (const auto& a : result.algos) print_summary_line(log, result, a);
      first = false;
    }
    trace.close();
    summary.close();
    if (!trace || !summary) throw std::runtime_error("failed writing CSV output");
    fs::rename(trace_tmp, dir / "trace.csv");
    fs::rename(summary_tmp, dir / "summary.csv");
    log << "wrote " << (dir / "trace.csv").string() << " and " << (dir / "summary.csv").string()
        << '\n';
    return kExitOk;
  } catch (const std::exception& ex) {
    std::error_code ec;
    if (!trace_tmp.empty()) fs::remove(trace_tmp, ec);
    if (!summary_tmp.empty()) fs::remove(summary_tmp, ec);
    if (created_dir && fs::is_empty(dir, ec)) fs::remove(dir, ec);
    err << "error: " << ex.what() << '\n';
    return kExitConfig;
  }
}

int cmd_verify(const std::string& filter, std::ostream& out, std::size_t threads) {
  const auto results = run_acceptance(filter, threads, &out);
  if (results.empty()) {
    out << "no criterion matches filter '" << filter << "'\n";
    return kExitConfig;
  }
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  out << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? kExitOk : kExitAcceptance;
}

}  // namespace udnmob
