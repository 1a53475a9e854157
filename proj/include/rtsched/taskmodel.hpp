#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtsched/types.hpp"

namespace rtsched {

// Periodic task. All parameters are integer ticks; 0 < wcet <= deadline <= period.
struct Task {
  int id = 0;
  Tick period = 0;
  Tick wcet = 0;
  Tick deadline = 0;  // relative
  Tick phase = 0;     // first release offset

  bool operator==(const Task& o) const {
    return id == o.id && period == o.period && wcet == o.wcet &&
           deadline == o.deadline && phase == o.phase;
  }
};

struct TaskSet {
  std::vector<Task> tasks;
  std::string name;

  bool operator==(const TaskSet& o) const {
    return tasks == o.tasks && name == o.name;
  }
};

// One periodic instance of a task.
struct Job {
  int task_id = 0;
  Tick index = 0;
  Tick release = 0;
  Tick abs_deadline = 0;
  Tick wcet = 0;
};

// Throws Error{Validation} naming the offending task and rule.
void validate(const Task& task);
void validate(const TaskSet& set);

// Exact wcet/period; no floating point anywhere in utilization arithmetic.
Rat utilization(const Task& task);
Rat total_utilization(const TaskSet& set);

// LCM of all periods. Throws Error{CapExceeded} when the LCM passes `cap`.
Tick hyperperiod(const TaskSet& set, Tick cap = kDefaultHorizonCap);

// Stable ascending sort by (period, wcet, id).
TaskSet sort_tasks(const TaskSet& set);

struct GenParams {
  int count = 1;
  Rat target_total_utilization{1, 2};
  std::vector<Tick> period_choices;
  std::uint64_t seed = 0;
};

// Seeded UUniFast budget splitting; wcet = max(1, round(u * period)),
// invalid draws are retried up to a bounded budget.
// Throws Error{Generation} when the target is unreachable for the choices.
TaskSet generate(const GenParams& params);

// All jobs with release < horizon, ordered by (release, task id).
std::vector<Job> release_jobs(const TaskSet& set, Tick horizon);

}  // namespace rtsched
