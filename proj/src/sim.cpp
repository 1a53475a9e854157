#include "rtsched/sim.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "rtsched/edf.hpp"
#include "rtsched/pbft.hpp"

namespace rtsched::sim {

namespace {

Tick resolve_horizon(const SimConfig& cfg) {
  if (cfg.horizon) {
    if (*cfg.horizon < 1)
      throw Error(ErrorKind::Validation, "horizon must be >= 1");
    return *cfg.horizon;
  }
  return hyperperiod(cfg.taskset, cfg.horizon_cap);
}

void validate_faults(const SimConfig& cfg) {
  std::set<int> procs;
  for (const pbft::FaultEvent& f : cfg.faults) {
    if (f.processor < 0 || f.processor >= cfg.processor_count)
      throw Error(ErrorKind::Validation,
                  "fault event names processor " +
                      std::to_string(f.processor + 1) + " of " +
                      std::to_string(cfg.processor_count));
    if (f.time < 0)
      throw Error(ErrorKind::Validation, "fault time must be non-negative");
    procs.insert(f.processor);
  }
  // Backup overloading is only safe under a single-failure hypothesis.
  if (procs.size() > 1)
    throw Error(ErrorKind::Validation,
                "fault scenario touches more than one processor");
}

Tick backup_length(Tick wcet, const Rat& ratio) {
  Tick bw = ceil_rat(Rat(wcet) * ratio);
  return std::max<Tick>(1, std::min(bw, wcet));
}

struct AdmissionOutcome {
  pbft::ReservationTable table;
  long committed = 0;
  long rejected = 0;
  long unprotected = 0;
  long total_backups = 0;
  long overloaded_backups = 0;
};

// Integrated admission: the fault-free EDF run fixes each job's primary
// window; backups are reserved in the idle time around it, by overloading
// first and the latest free slot otherwise.
AdmissionOutcome admit_all(const sasa::Assignment& asg,
                           const edf::RunResult& fault_free, Tick horizon,
                           const Rat& backup_ratio) {
  AdmissionOutcome out{pbft::ReservationTable(asg.processor_count)};

  for (const edf::ExecRun& run : fault_free.runs)
    out.table.add_primary(pbft::SlotReservation{
        run.processor, run.interval, run.job, Copy::Primary, -1});

  std::vector<const edf::JobOutcome*> pending;
  for (const auto& [key, o] : fault_free.outcomes)
    if (o.abs_deadline <= horizon) pending.push_back(&o);
  std::stable_sort(pending.begin(), pending.end(),
                   [](const edf::JobOutcome* a, const edf::JobOutcome* b) {
                     return std::make_tuple(a->abs_deadline, a->release,
                                            a->key.task_id, a->key.index,
                                            a->key.part) <
                            std::make_tuple(b->abs_deadline, b->release,
                                            b->key.task_id, b->key.index,
                                            b->key.part);
                   });

  for (const edf::JobOutcome* o : pending) {
    if (o->status != edf::JobStatus::CompletedPrimary) {
      // No valid primary window inside the horizon.
      ++out.rejected;
      continue;
    }
    Tick bw = backup_length(o->wcet, backup_ratio);
    pbft::SlotReservation backup;
    Interval slot;
    auto hit = pbft::try_overload_window(o->processor, o->completion,
                                         o->abs_deadline, bw, out.table);
    if (hit) {
      backup = pbft::SlotReservation{hit->processor, hit->interval, o->key,
                                     Copy::Backup, hit->overload_group};
      slot = out.table.groups().at(hit->overload_group).slot;
    } else {
      auto placed = pbft::place_backup_latest_window(
          o->processor, o->completion, o->abs_deadline, bw, out.table);
      if (!placed) {
        ++out.unprotected;
        continue;
      }
      backup = pbft::SlotReservation{placed->first, placed->second, o->key,
                                     Copy::Backup,
                                     out.table.new_overload_group()};
      slot = placed->second;
    }
    out.table.add_backup_member(backup, slot);
    out.table.register_committed(pbft::CommittedJob{
        o->key, o->processor, {o->first_exec, o->completion}, o->abs_deadline,
        backup, false});
    ++out.committed;
  }

  out.total_backups = out.committed;
  for (const auto& [id, g] : out.table.groups())
    if (g.members.size() > 1)
      out.overloaded_backups += static_cast<long>(g.members.size());
  return out;
}

Metrics collect_metrics(const edf::RunResult& run, Tick horizon,
                        const AdmissionOutcome* admission,
                        const pbft::ReservationTable* final_table) {
  Metrics m;
  m.horizon = horizon;
  m.deadline_misses = run.misses;
  m.recoveries = run.recoveries;
  m.backup_ticks_executed = run.backup_ticks_executed;
  for (Tick busy : run.busy_ticks) m.busy_fraction.emplace_back(busy, horizon);
  if (admission) {
    m.committed_jobs = admission->committed;
    m.rejected_jobs = admission->rejected;
    m.unprotected_jobs = admission->unprotected;
    m.total_backup_reservations = admission->total_backups;
    m.overloaded_backup_reservations = admission->overloaded_backups;
  }
  if (final_table) {
    for (const auto& [key, c] : final_table->committed()) {
      if (!c.backup_freed) {
        auto it = run.outcomes.find(key);
        bool recovered = it != run.outcomes.end() &&
                         it->second.status == edf::JobStatus::CompletedBackup;
        if (!recovered) ++m.backups_unfreed;
      }
      auto it = run.outcomes.find(key);
      if (it != run.outcomes.end() &&
          it->second.status == edf::JobStatus::Missed)
        ++m.protected_misses;
    }
  }
  return m;
}

}  // namespace

SimResult run(const SimConfig& cfg) {
  validate(cfg.taskset);
  if (cfg.backup_ratio <= Rat(0) || cfg.backup_ratio > Rat(1))
    throw Error(ErrorKind::Validation, "backup ratio must be in (0, 1]");
  Tick horizon = resolve_horizon(cfg);

  SimResult result;
  result.assignment =
      sasa::assign(cfg.taskset, cfg.processor_count, cfg.threshold);

  if (cfg.mode == Mode::Partitioned) {
    if (!cfg.faults.empty())
      throw Error(ErrorKind::Usage,
                  "fault injection requires ft mode");
    edf::RunResult run =
        edf::run_core(result.assignment, horizon, nullptr, nullptr);
    result.metrics = collect_metrics(run, horizon, nullptr, nullptr);
    result.trace = std::move(run.trace);
    for (const auto& [key, o] : run.outcomes) result.outcomes.push_back(o);
    return result;
  }

  validate_faults(cfg);
  edf::RunResult fault_free =
      edf::run_core(result.assignment, horizon, nullptr, nullptr);
  AdmissionOutcome admission =
      admit_all(result.assignment, fault_free, horizon, cfg.backup_ratio);

  pbft::ReservationTable table = admission.table;
  edf::RunResult run =
      edf::run_core(result.assignment, horizon, &cfg.faults, &table);
  result.metrics = collect_metrics(run, horizon, &admission, &table);
  result.trace = std::move(run.trace);
  for (const auto& [key, o] : run.outcomes) result.outcomes.push_back(o);
  result.table = std::move(table);
  return result;
}

SweepReport sweep_single_faults(const SimConfig& cfg, long sweep_cap) {
  if (cfg.mode != Mode::Ft)
    throw Error(ErrorKind::Usage, "fault sweep requires ft mode");
  if (!cfg.faults.empty())
    throw Error(ErrorKind::Usage,
                "fault sweep generates its own fault events");
  Tick horizon = resolve_horizon(cfg);
  if (static_cast<long>(horizon) * cfg.processor_count > sweep_cap)
    throw Error(ErrorKind::CapExceeded,
                "sweep size " + std::to_string(horizon * cfg.processor_count) +
                    " exceeds cap " + std::to_string(sweep_cap));

  sasa::Assignment asg =
      sasa::assign(cfg.taskset, cfg.processor_count, cfg.threshold);
  edf::RunResult fault_free = edf::run_core(asg, horizon, nullptr, nullptr);
  AdmissionOutcome admission =
      admit_all(asg, fault_free, horizon, cfg.backup_ratio);

  SweepReport report;
  for (int p = 0; p < cfg.processor_count; ++p) {
    for (Tick f = 0; f < horizon; ++f) {
      std::vector<pbft::FaultEvent> faults{
          pbft::FaultEvent{f, p, pbft::FaultKind::Permanent}};
      pbft::ReservationTable table = admission.table;
      edf::RunResult run = edf::run_core(asg, horizon, &faults, &table);
      ++report.runs;
      for (const auto& [key, c] : table.committed()) {
        auto it = run.outcomes.find(key);
        if (it != run.outcomes.end() &&
            it->second.status == edf::JobStatus::Missed)
          report.failures.push_back(SweepReport::Failure{p, f, key});
      }
    }
  }
  report.clean = report.failures.empty();
  return report;
}

std::vector<PartitionerRow> compare_partitioners(const TaskSet& set,
                                                 int processor_count,
                                                 Rat threshold) {
  using Algo =
      sasa::Assignment (*)(const TaskSet&, int, Rat);
  const std::pair<std::string, Algo> algos[] = {
      {"sasa", &sasa::assign},
      {"ff", &sasa::assign_first_fit},
      {"bf", &sasa::assign_best_fit},
  };
  std::vector<PartitionerRow> rows;
  for (const auto& [name, fn] : algos) {
    PartitionerRow row;
    row.algo = name;
    try {
      sasa::Assignment asg = fn(set, processor_count, threshold);
      row.feasible = true;
      row.splits = asg.split_count();
      row.max_util = asg.max_util();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Infeasible) throw;
      row.feasible = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rtsched::sim
