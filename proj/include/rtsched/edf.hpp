#pragma once

#include <map>
#include <optional>
#include <vector>

#include "rtsched/pbft.hpp"
#include "rtsched/sasa.hpp"
#include "rtsched/types.hpp"

namespace rtsched::edf {

enum class EventKind { Release, Start, Preempt, Resume, Complete, Miss };

struct TraceEvent {
  Tick tick = 0;
  int processor = 0;
  JobKey job;
  Copy copy = Copy::Primary;
  EventKind kind = EventKind::Release;

  bool operator==(const TraceEvent& o) const {
    return tick == o.tick && processor == o.processor && job == o.job &&
           copy == o.copy && kind == o.kind;
  }
};

struct ScheduleTrace {
  std::vector<TraceEvent> events;
};

struct ReadyJob {
  JobKey key;
  Tick release = 0;
  Tick abs_deadline = 0;
  Tick remaining = 0;
  Tick wcet = 0;
};

// Smallest (abs_deadline, release, task id, index, part); null when empty.
const ReadyJob* pick(const std::vector<ReadyJob>& ready);

enum class JobStatus {
  Pending,
  CompletedPrimary,
  CompletedBackup,
  Missed,
  Unfinished,  // still running (or unreleased) when the horizon closed
};

struct JobOutcome {
  JobKey key;
  int processor = 0;  // primary processor
  Tick release = 0;
  Tick abs_deadline = 0;
  Tick wcet = 0;
  Tick first_exec = -1;
  Tick completion = -1;  // tick boundary at which the job finished
  JobStatus status = JobStatus::Pending;
};

// Maximal contiguous execution run of one copy of one job.
struct ExecRun {
  int processor = 0;
  Interval interval;
  JobKey job;
  Copy copy = Copy::Primary;
};

struct RunResult {
  ScheduleTrace trace;
  std::map<JobKey, JobOutcome> outcomes;
  std::vector<ExecRun> runs;
  std::vector<Tick> busy_ticks;  // per processor
  Tick backup_ticks_executed = 0;
  int recoveries = 0;
  long misses = 0;
};

// Fault-aware engine. `table` (optional) supplies committed backup
// reservations to activate; `faults` (optional) injects crashes.
// Both null reproduces the plain partitioned run.
RunResult run_core(const sasa::Assignment& assignment, Tick horizon,
                   const std::vector<pbft::FaultEvent>* faults,
                   pbft::ReservationTable* table);

// Tick-by-tick partitioned EDF with split-portion chaining, fault-free.
ScheduleTrace run_partitioned(const sasa::Assignment& assignment, Tick horizon);

// Synchronous-release simulation of one processor's load over one
// hyperperiod; part-2 portions release at (period boundary + part-1 wcet).
// Throws Error{CapExceeded} when the hyperperiod passes horizon_cap.
bool exact_schedulable(const std::vector<sasa::Entry>& entries,
                       Tick horizon_cap = kDefaultHorizonCap);

}  // namespace rtsched::edf
