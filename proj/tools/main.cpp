// rtsched: partitioned real-time scheduling simulator with primary-backup
// fault tolerance. Subcommands: gen, partition, simulate, sweep, check.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtsched/edf.hpp"
#include "rtsched/io.hpp"
#include "rtsched/oracle.hpp"
#include "rtsched/sasa.hpp"
#include "rtsched/sim.hpp"
#include "rtsched/taskmodel.hpp"

namespace {

using namespace rtsched;

// 0 success / 1 infeasible-or-rejected / 2 invariant-or-verification
// failure / 3 usage-or-parse error
constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kVerificationFailure = 2;
constexpr int kUsage = 3;

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Infeasible:
    case ErrorKind::Generation:
      return kInfeasible;
    case ErrorKind::Bookkeeping:
      return kVerificationFailure;
    default:
      return kUsage;
  }
}

Rat parse_rat_flag(const std::string& text, const std::string& flag) {
  try {
    return parse_rational(text);
  } catch (const Error&) {
    throw Error(ErrorKind::Usage, "bad value for " + flag + ": " + text);
  }
}

struct GenArgs {
  int count = 1;
  std::string util = "1/2";
  std::vector<Tick> periods;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  GenParams p;
  p.count = a.count;
  p.target_total_utilization = parse_rat_flag(a.util, "--util");
  p.period_choices = a.periods;
  p.seed = a.seed;
  TaskSet set = generate(p);
  io::write_file(a.out, io::serialize_taskset(set));
  std::cout << "tasks: " << set.tasks.size()
            << "  total utilization: " << to_string(total_utilization(set))
            << "\n";
  return kOk;
}

struct PartitionArgs {
  std::string in;
  int procs = 1;
  std::string uth = "1";
  std::string algo = "sasa";
  std::string out;
};

int cmd_partition(const PartitionArgs& a) {
  TaskSet set = io::parse_taskset(io::read_file(a.in));
  Rat uth = parse_rat_flag(a.uth, "--uth");
  sasa::Assignment asg;
  if (a.algo == "sasa")
    asg = sasa::assign(set, a.procs, uth);
  else if (a.algo == "ff")
    asg = sasa::assign_first_fit(set, a.procs, uth);
  else if (a.algo == "bf")
    asg = sasa::assign_best_fit(set, a.procs, uth);
  else
    throw Error(ErrorKind::Usage, "unknown --algo: " + a.algo);
  for (int p = 0; p < asg.processor_count; ++p)
    std::cout << "P" << p + 1 << ": " << to_string(asg.util(p)) << "\n";
  if (asg.split_count() > 0)
    std::cout << "splits: " << asg.split_count() << "\n";
  if (!a.out.empty()) io::write_file(a.out, io::serialize_assignment(asg));
  return kOk;
}

struct SimulateArgs {
  std::string in;
  int procs = 1;
  std::string uth = "1";
  std::string mode = "partitioned";
  std::optional<Tick> horizon;
  std::string backup_ratio = "1";
  std::string faults;
  std::string trace_out;
  std::string gantt_out;
};

sim::SimConfig make_config(const std::string& in, int procs,
                           const std::string& uth, const std::string& mode,
                           std::optional<Tick> horizon,
                           const std::string& backup_ratio,
                           const std::string& faults_file) {
  sim::SimConfig cfg;
  cfg.taskset = io::parse_taskset(io::read_file(in));
  cfg.processor_count = procs;
  cfg.threshold = parse_rat_flag(uth, "--uth");
  if (mode == "partitioned")
    cfg.mode = sim::Mode::Partitioned;
  else if (mode == "ft")
    cfg.mode = sim::Mode::Ft;
  else
    throw Error(ErrorKind::Usage, "unknown --mode: " + mode);
  cfg.horizon = horizon;
  cfg.backup_ratio = parse_rat_flag(backup_ratio, "--backup-ratio");
  if (!faults_file.empty()) {
    io::Scenario sc = io::parse_scenario(io::read_file(faults_file));
    if (sc.processors != procs)
      throw Error(ErrorKind::Validation,
                  "fault scenario names " + std::to_string(sc.processors) +
                      " processors, --procs says " + std::to_string(procs));
    if (sc.threshold) cfg.threshold = *sc.threshold;
    cfg.faults = sc.events;
  }
  return cfg;
}

int cmd_simulate(const SimulateArgs& a) {
  sim::SimConfig cfg = make_config(a.in, a.procs, a.uth, a.mode, a.horizon,
                                   a.backup_ratio, a.faults);
  sim::SimResult result = sim::run(cfg);
  std::cout << io::serialize_metrics(result.metrics);
  if (!a.trace_out.empty())
    io::write_file(a.trace_out, io::serialize_trace(result.trace));
  if (!a.gantt_out.empty())
    io::write_file(a.gantt_out,
                   io::render_gantt(result.trace, result.assignment));
  if (result.metrics.protected_misses > 0) {
    std::cout << "FAIL: " << result.metrics.protected_misses
              << " protected committed job(s) missed\n";
    return kVerificationFailure;
  }
  return kOk;
}

struct SweepArgs {
  std::string in;
  int procs = 1;
  std::string uth = "1";
  std::string mode = "ft";
  std::optional<Tick> horizon;
  std::string backup_ratio = "1";
};

int cmd_sweep(const SweepArgs& a) {
  if (a.mode != "ft")
    throw Error(ErrorKind::Usage, "sweep requires --mode ft");
  sim::SimConfig cfg = make_config(a.in, a.procs, a.uth, a.mode, a.horizon,
                                   a.backup_ratio, "");
  sim::SweepReport report = sim::sweep_single_faults(cfg);
  std::cout << "sweep runs: " << report.runs << "\n";
  if (report.clean) {
    std::cout << "single-fault safe: every protected job met its deadline\n";
    return kOk;
  }
  const auto& worst = report.failures.front();
  std::cout << "FAIL: fault on P" << worst.processor + 1 << " at tick "
            << worst.fault_tick << " misses task " << worst.job.task_id
            << " job " << worst.job.index << "\n";
  return kVerificationFailure;
}

struct CheckArgs {
  std::string in;
  int procs = 1;
  std::string uth = "1";
};

int cmd_check(const CheckArgs& a) {
  TaskSet set = io::parse_taskset(io::read_file(a.in));
  Rat uth = parse_rat_flag(a.uth, "--uth");
  sasa::Assignment asg = sasa::assign(set, a.procs, uth);
  bool all_schedulable = true;
  for (int p = 0; p < asg.processor_count; ++p) {
    bool exact = edf::exact_schedulable(asg.bins[p]);
    bool has_portion = false;
    for (const sasa::Entry& e : asg.bins[p])
      if (e.part != 0) has_portion = true;
    std::cout << "P" << p + 1 << ": exact="
              << (exact ? "schedulable" : "unschedulable");
    if (!has_portion) {
      // Demand-bound oracle only covers unsplit synchronous loads.
      std::vector<Task> tasks;
      for (const sasa::Entry& e : asg.bins[p])
        tasks.push_back(Task{e.task_id, e.period, e.wcet, e.deadline, 0});
      oracle::OracleVerdict v = oracle::dbf_schedulable(tasks);
      std::cout << " dbf=" << (v.schedulable ? "schedulable" : "unschedulable");
      if (v.schedulable != exact) {
        std::cout << "\nFAIL: oracle disagreement on P" << p + 1 << "\n";
        return kVerificationFailure;
      }
    } else {
      std::cout << " dbf=skipped(split portions)";
    }
    std::cout << "\n";
    all_schedulable = all_schedulable && exact;
  }
  if (!all_schedulable) {
    std::cout << "verdict: unschedulable\n";
    return kInfeasible;
  }
  std::cout << "verdict: schedulable\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partitioned real-time scheduling simulator with "
               "primary-backup fault tolerance"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* c_gen = app.add_subcommand("gen", "Generate a seeded task set");
  c_gen->add_option("--count", gen.count, "Number of tasks")->required();
  c_gen->add_option("--util", gen.util, "Target total utilization")->required();
  c_gen->add_option("--periods", gen.periods, "Period choices")
      ->required()
      ->delimiter(',');
  c_gen->add_option("--seed", gen.seed, "RNG seed");
  c_gen->add_option("--out", gen.out, "Output task-set file")->required();

  PartitionArgs part;
  CLI::App* c_part =
      app.add_subcommand("partition", "Assign tasks to processors");
  c_part->add_option("--in", part.in, "Task-set file")->required();
  c_part->add_option("--procs", part.procs, "Processor count")->required();
  c_part->add_option("--uth", part.uth, "Utilization threshold");
  c_part->add_option("--algo", part.algo, "sasa | ff | bf");
  c_part->add_option("--out", part.out, "Assignment output file");

  SimulateArgs simu;
  CLI::App* c_sim = app.add_subcommand("simulate", "Run a simulation");
  c_sim->add_option("--in", simu.in, "Task-set file")->required();
  c_sim->add_option("--procs", simu.procs, "Processor count")->required();
  c_sim->add_option("--uth", simu.uth, "Utilization threshold");
  c_sim->add_option("--mode", simu.mode, "partitioned | ft");
  c_sim->add_option("--horizon", simu.horizon, "Simulation horizon (ticks)");
  c_sim->add_option("--backup-ratio", simu.backup_ratio,
                    "Backup wcet / primary wcet");
  c_sim->add_option("--faults", simu.faults, "Fault scenario file");
  c_sim->add_option("--trace", simu.trace_out, "Trace CSV output");
  c_sim->add_option("--gantt", simu.gantt_out, "Gantt SVG output");

  SweepArgs sweep;
  CLI::App* c_sweep =
      app.add_subcommand("sweep", "Exhaustive single-fault sweep");
  c_sweep->add_option("--in", sweep.in, "Task-set file")->required();
  c_sweep->add_option("--procs", sweep.procs, "Processor count")->required();
  c_sweep->add_option("--uth", sweep.uth, "Utilization threshold");
  c_sweep->add_option("--mode", sweep.mode, "must be ft");
  c_sweep->add_option("--horizon", sweep.horizon, "Sweep horizon (ticks)");
  c_sweep->add_option("--backup-ratio", sweep.backup_ratio,
                      "Backup wcet / primary wcet");

  CheckArgs check;
  CLI::App* c_check = app.add_subcommand(
      "check", "SASA partition + exact EDF test + demand-bound oracle");
  c_check->add_option("--in", check.in, "Task-set file")->required();
  c_check->add_option("--procs", check.procs, "Processor count")->required();
  c_check->add_option("--uth", check.uth, "Utilization threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (c_gen->parsed()) return cmd_gen(gen);
    if (c_part->parsed()) return cmd_partition(part);
    if (c_sim->parsed()) return cmd_simulate(simu);
    if (c_sweep->parsed()) return cmd_sweep(sweep);
    if (c_check->parsed()) return cmd_check(check);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailure;
  }
  return kUsage;
}
