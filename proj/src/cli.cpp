#include "polarpark/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "polarpark/certificates.hpp"
#include "polarpark/csv.hpp"
#include "polarpark/error.hpp"
#include "polarpark/scenario_file.hpp"
#include "polarpark/simulator.hpp"
#include "polarpark/sweep.hpp"

namespace polarpark {

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<double> dt, t_max, cutoff;
  std::optional<int> stride;

  void apply(Scenario& s) const {
    if (dt) s.dt = *dt;
    if (t_max) s.t_max = *t_max;
    if (cutoff) s.cutoff_rho = *cutoff;
    if (stride) s.record_stride = *stride;
    s.validate();
  }
};

struct Source {
  std::vector<std::string> presets;
  std::vector<std::string> scenario_files;

  std::vector<Scenario> load() const {
    std::vector<Scenario> out;
    for (const auto& p : presets) {
      auto set = preset(p);
      out.insert(out.end(), set.begin(), set.end());
    }
    for (const auto& f : scenario_files) {
      Scenario s = load_scenario_file(f);
      if (s.name.empty()) s.name = fs::path(f).stem().string();
      out.push_back(std::move(s));
    }
    return out;
  }
};

fs::path resolve_output(const fs::path& requested) {
  if (const char* dir = std::getenv("POLARPARK_OUT_DIR"); dir && *dir) {
    return fs::path(dir) / requested.filename();
  }
  return requested;
}

std::string resolve_suite(const std::string& suite, ControllerKind kind) {
  if (suite != "auto") return suite;
  switch (kind) {
    case ControllerKind::DeadbeatPower: return "thm3";
    case ControllerKind::DeadbeatExp: return "thm4";
    case ControllerKind::GloFo:
    case ControllerKind::BoFo: return "monotone";
    default: return "";
  }
}

std::optional<CheckReport> run_suite(const std::string& suite, const Trajectory& traj) {
  const std::string resolved = resolve_suite(suite, traj.metadata.controller.kind());
  if (resolved.empty()) return std::nullopt;
  if (resolved == "thm3") return check_thm3_envelopes(traj, traj.metadata.controller.dubins_gains());
  if (resolved == "thm4") return check_thm4_envelopes(traj, traj.metadata.controller.dubins_gains());
  if (resolved == "monotone") return check_monotone_v(traj);
  throw Error(ErrorCode::InvalidScenario, "unknown check suite '" + suite + "'");
}

void print_summary(std::ostream& out, const Trajectory& traj, const fs::path& path) {
  const auto& last = traj.back();
  out << std::setprecision(10) << traj.metadata.name << ": termination=" << to_string(traj.termination)
      << " t_end=" << last.t << " samples=" << traj.samples.size() << " rho=" << last.polar.rho
      << " delta=" << last.polar.delta << " gamma=" << last.polar.gamma;
  if (!path.empty()) out << " csv=" << path.string();
  out << '\n';
}

bool faulted(const Trajectory& traj) {
  return traj.termination == Termination::DomainExit ||
         traj.termination == Termination::NumericalFault;
}

// Simulates, checks, and writes one CSV per scenario. Returns the exit code.
int simulate_and_write(const std::vector<Scenario>& scenarios,
                       const std::vector<fs::path>& outputs, const std::string& suite,
                       const std::string& report_path, std::ostream& out, std::ostream& err) {
  const auto results = batch_run(scenarios);
  int code = kExitOk;
  std::string reports;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& item = results[i];
    if (!item.trajectory) {
      err << "error: " << item.error << '\n';
      code = kExitUsage;
      continue;
    }
    const Trajectory& traj = *item.trajectory;
    if (faulted(traj)) {
      err << "error: " << scenarios[i].name << " ended with " << to_string(traj.termination)
          << ": " << traj.fault_message << " (no CSV written)\n";
      if (code == kExitOk) code = kExitCheckFailed;
      continue;
    }
    if (!suite.empty()) {
      if (auto report = run_suite(suite, traj)) {
        reports += "scenario=" + traj.metadata.name + "\n" + format_report(*report);
        if (!report->passed() && code == kExitOk) code = kExitCheckFailed;
      }
    }
    write_file_atomic(outputs[i], trajectory_csv(traj));
    print_summary(out, traj, outputs[i]);
  }
  out << reports;
  if (!report_path.empty() && !reports.empty()) write_file_atomic(resolve_output(report_path), reports);
  return code;
}

std::vector<fs::path> output_paths(const std::vector<Scenario>& scenarios, const std::string& out_flag) {
  std::vector<fs::path> paths;
  if (scenarios.size() == 1) {
    paths.push_back(resolve_output(out_flag.empty() ? scenarios[0].name + ".csv" : out_flag));
    return paths;
  }
  const fs::path base = out_flag.empty() ? fs::path("trajectory.csv") : fs::path(out_flag);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    fs::path p = base.parent_path() / (base.stem().string() + "_" + std::to_string(i) + base.extension().string());
    paths.push_back(resolve_output(p));
  }
  return paths;
}

void add_overrides(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--dt", ov.dt, "Integration step [s]");
  cmd->add_option("--tmax", ov.t_max, "Horizon [s]");
  cmd->add_option("--cutoff", ov.cutoff, "Cutoff radius [m], 0 disables");
  cmd->add_option("--stride", ov.stride, "Record every n-th step");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polar-coordinate unicycle and Dubins parking: simulation and certificate checks",
               "polarpark"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Simulate one preset or scenario file and write CSV");
  std::string run_preset, run_scenario, run_out, run_check, run_report;
  Overrides run_ov;
  auto* p_opt = run_cmd->add_option("--preset", run_preset, "Built-in scenario set");
  auto* s_opt = run_cmd->add_option("--scenario", run_scenario, "Scenario JSON file");
  p_opt->excludes(s_opt);
  run_cmd->add_option("--out", run_out, "CSV output path");
  run_cmd->add_option("--check", run_check, "Check suite: thm3, thm4, monotone or auto");
  run_cmd->add_option("--report", run_report, "Also write the check report to this path");
  add_overrides(run_cmd, run_ov);

  // batch
  auto* batch_cmd = app.add_subcommand("batch", "Simulate several presets/scenarios in parallel");
  Source batch_src;
  std::string batch_dir = ".", batch_check, batch_report;
  Overrides batch_ov;
  batch_cmd->add_option("--preset", batch_src.presets, "Built-in scenario set (repeatable)");
  batch_cmd->add_option("--scenario", batch_src.scenario_files, "Scenario JSON file (repeatable)");
  batch_cmd->add_option("--out-dir", batch_dir, "Directory for <name>.csv outputs");
  batch_cmd->add_option("--check", batch_check, "Check suite applied to every run (auto recommended)");
  batch_cmd->add_option("--report", batch_report, "Also write the check reports to this path");
  add_overrides(batch_cmd, batch_ov);

  // check
  auto* check_cmd = app.add_subcommand("check", "Run a certificate suite over a stored CSV");
  std::string check_csv, check_preset, check_scenario, check_suite = "auto", check_report;
  std::size_t check_index = 0;
  check_cmd->add_option("--csv", check_csv, "Trajectory CSV written by 'run'")->required();
  auto* cp = check_cmd->add_option("--preset", check_preset, "Preset that produced the CSV");
  auto* cs = check_cmd->add_option("--scenario", check_scenario, "Scenario file that produced the CSV");
  cp->excludes(cs);
  check_cmd->add_option("--index", check_index, "Scenario index within a grid preset");
  check_cmd->add_option("--suite", check_suite, "thm3, thm4, monotone or auto");
  check_cmd->add_option("--report", check_report, "Also write the report to this path");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Random-state CLF negativity and finite-difference check");
  std::string sweep_ctrl = "glofo";
  double k1 = 1.0, k2 = 3.0, k3 = 2.0, sweep_tol = 1e-6;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  sweep_cmd->add_option("--controller", sweep_ctrl, "glofo or bofo")->check(CLI::IsMember({"glofo", "bofo"}));
  sweep_cmd->add_option("--k1", k1);
  sweep_cmd->add_option("--k2", k2);
  sweep_cmd->add_option("--k3", k3);
  sweep_cmd->add_option("--samples", samples);
  sweep_cmd->add_option("--seed", seed, "Seed of the state sampler");
  sweep_cmd->add_option("--tol", sweep_tol, "Relative analytic/numeric agreement tolerance");

  app.add_subcommand("list-presets", "List built-in scenario sets");

  std::vector<const char*> argv{"polarpark"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run 'polarpark --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("list-presets")) {
      for (const auto& name : preset_names()) {
        const auto set = preset(name);
        out << name << '\t' << to_string(set.front().controller.kind()) << '\t' << set.size()
            << (set.size() == 1 ? " scenario" : " scenarios") << '\n';
      }
      return kExitOk;
    }

    if (run_cmd->parsed()) {
      if (run_preset.empty() == run_scenario.empty()) {
        err << "error: run needs exactly one of --preset or --scenario\n";
        return kExitUsage;
      }
      Source src;
      if (!run_preset.empty()) src.presets.push_back(run_preset);
      else src.scenario_files.push_back(run_scenario);
      auto scenarios = src.load();
      for (auto& s : scenarios) run_ov.apply(s);
      return simulate_and_write(scenarios, output_paths(scenarios, run_out), run_check, run_report,
                                out, err);
    }

    if (batch_cmd->parsed()) {
      auto scenarios = batch_src.load();
      if (scenarios.empty()) {
        err << "error: batch needs at least one --preset or --scenario\n";
        return kExitUsage;
      }
      for (auto& s : scenarios) batch_ov.apply(s);
      std::vector<fs::path> paths;
      const char* env_dir = std::getenv("POLARPARK_OUT_DIR");
      const fs::path dir = (env_dir && *env_dir) ? fs::path(env_dir) : fs::path(batch_dir);
      for (const auto& s : scenarios) paths.push_back(dir / (s.name + ".csv"));
      return simulate_and_write(scenarios, paths, batch_check, batch_report, out, err);
    }

    if (check_cmd->parsed()) {
      if (check_preset.empty() == check_scenario.empty()) {
        err << "error: check needs exactly one of --preset or --scenario\n";
        return kExitUsage;
      }
      Scenario meta;
      if (!check_preset.empty()) {
        const auto set = preset(check_preset);
        if (check_index >= set.size()) {
          err << "error: preset " << check_preset << " has " << set.size() << " scenarios\n";
          return kExitUsage;
        }
        meta = set[check_index];
      } else {
        meta = load_scenario_file(check_scenario);
      }
      std::ifstream in(check_csv);
      if (!in) {
        err << "error: cannot open " << check_csv << '\n';
        return kExitUsage;
      }
      const Trajectory traj = read_trajectory_csv(in, meta);
      const auto report = run_suite(check_suite, traj);
      if (!report) {
        err << "error: no check suite applies to " << to_string(meta.controller.kind()) << '\n';
        return kExitUsage;
      }
      const std::string text = format_report(*report);
      out << text;
      if (!check_report.empty()) write_file_atomic(resolve_output(check_report), text);
      return report->passed() ? kExitOk : kExitCheckFailed;
    }

    if (sweep_cmd->parsed()) {
      const UnicycleGains g(k1, k2, k3);
      const bool bofo = sweep_ctrl == "bofo";
      const auto spec = bofo ? ControllerSpec::bofo(g) : ControllerSpec::glofo(g);
      StateBox box;
      if (bofo) box.gamma_max = kPi - 1e-3;
      const auto states = sample_states(seed, samples, box);
      const auto summary = summarize(clf_sweep(spec, states), sweep_tol);
      out << std::setprecision(17) << "controller=" << to_string(spec.kind()) << '\n'
          << "samples=" << summary.count << '\n'
          << "seed=" << seed << '\n'
          << "nonnegative_rates=" << summary.nonnegative << '\n'
          << "disagreements=" << summary.disagreements << '\n'
          << "worst_scaled_error=" << summary.worst_scaled_error << '\n'
          << "max_rate=" << summary.max_rate << '\n';
      const bool ok = summary.nonnegative == 0 && summary.disagreements == 0;
      out << "overall=" << (ok ? "pass" : "fail") << '\n';
      return ok ? kExitOk : kExitCheckFailed;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace polarpark
