#pragma once

#include <string>
#include <vector>

#include "rtsched/taskmodel.hpp"
#include "rtsched/types.hpp"

namespace rtsched::sasa {

// A task, or one half of a split task, placed on a processor.
// part 0 = whole task, 1/2 = split halves. full_wcet is the parent's wcet
// (equal to wcet for whole tasks).
struct Entry {
  int task_id = 0;
  Tick period = 0;
  Tick deadline = 0;
  Tick phase = 0;
  Tick wcet = 0;
  Tick full_wcet = 0;
  int part = 0;

  Rat util() const { return Rat(wcet, period); }

  bool operator==(const Entry& o) const {
    return task_id == o.task_id && period == o.period &&
           deadline == o.deadline && phase == o.phase && wcet == o.wcet &&
           full_wcet == o.full_wcet && part == o.part;
  }
};

struct Assignment {
  int processor_count = 0;
  Rat threshold{1};
  std::vector<std::vector<Entry>> bins;  // bins[p], p in [0, processor_count)

  Rat util(int processor) const;
  int split_count() const;
  Rat max_util() const;
};

// Sorted sequential assignment under the utilization threshold, with two-way
// splitting when no single processor fits a task.
// Throws Error{Infeasible} naming the unplaceable task.
Assignment assign(const TaskSet& set, int processor_count, Rat threshold);

// Baselines: no sorting, no splitting.
Assignment assign_first_fit(const TaskSet& set, int processor_count,
                            Rat threshold);
Assignment assign_best_fit(const TaskSet& set, int processor_count,
                           Rat threshold);

struct SplitResult {
  Entry part1;
  Entry part2;
};

// Two-way split sized to fill the low processor's residual capacity:
// part-1 wcet = floor(low_residual * period), clamped to [1, wcet - 1].
// Throws Error{Unsplittable} when no whole tick fits the low processor or
// part 2 exceeds the high processor's residual.
SplitResult split_task(const Task& task, Rat low_residual, Rat high_residual,
                       int low_processor, int high_processor);

// Post-hoc audit; returns one line per violated Assignment invariant.
std::vector<std::string> verify(const Assignment& assignment);

}  // namespace rtsched::sasa
