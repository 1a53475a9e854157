#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtsched/edf.hpp"
#include "rtsched/pbft.hpp"
#include "rtsched/sasa.hpp"
#include "rtsched/taskmodel.hpp"
#include "rtsched/types.hpp"

namespace rtsched::sim {

enum class Mode { Partitioned, Ft };

struct SimConfig {
  Mode mode = Mode::Partitioned;
  TaskSet taskset;
  int processor_count = 1;
  Rat threshold{1};
  std::optional<Tick> horizon;  // default: one hyperperiod, capped
  Tick horizon_cap = kDefaultHorizonCap;
  Rat backup_ratio{1};
  std::vector<pbft::FaultEvent> faults;
  std::uint64_t seed = 0;
};

struct Metrics {
  long committed_jobs = 0;
  long rejected_jobs = 0;     // no valid primary window within the horizon
  long unprotected_jobs = 0;  // primary runs, backup unplaceable
  long deadline_misses = 0;
  long protected_misses = 0;  // misses of committed jobs (invariant breach)
  long recoveries = 0;
  Tick backup_ticks_executed = 0;
  long total_backup_reservations = 0;
  long overloaded_backup_reservations = 0;
  long backups_unfreed = 0;  // reservations still live at run end
  std::vector<Rat> busy_fraction;
  Tick horizon = 0;
};

struct SimResult {
  sasa::Assignment assignment;
  edf::ScheduleTrace trace;
  Metrics metrics;
  pbft::ReservationTable table{1};  // post-run table (ft mode)
  std::vector<edf::JobOutcome> outcomes;
};

// mode=Partitioned: sasa::assign then edf::run_partitioned.
// mode=Ft: additionally primary-backup admission per job (primary windows
// taken from the fault-free EDF run) and fault injection per scenario.
SimResult run(const SimConfig& config);

struct SweepReport {
  struct Failure {
    int processor = 0;
    Tick fault_tick = 0;
    JobKey job;
  };
  bool clean = true;
  std::vector<Failure> failures;
  long runs = 0;
};

// One simulation per (processor, fault tick, permanent) over [0, horizon);
// reports every missed deadline of a committed (protected) job.
// Throws Error{Usage} outside ft mode, Error{CapExceeded} past sweep_cap.
SweepReport sweep_single_faults(const SimConfig& config,
                                long sweep_cap = 200'000);

struct PartitionerRow {
  std::string algo;
  bool feasible = false;
  int splits = 0;
  Rat max_util{0};
  std::string error;
};

// Feasibility / split count / max utilization for SASA, FF, BF.
std::vector<PartitionerRow> compare_partitioners(const TaskSet& set,
                                                 int processor_count,
                                                 Rat threshold);

}  // namespace rtsched::sim
