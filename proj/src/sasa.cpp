#include "rtsched/sasa.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace rtsched::sasa {

namespace {

Entry whole_entry(const Task& t) {
  return Entry{t.id, t.period, t.deadline, t.phase, t.wcet, t.wcet, 0};
}

void check_args(const TaskSet& set, int m, const Rat& uth) {
  validate(set);
  if (m < 1)
    throw Error(ErrorKind::Validation, "processor count must be >= 1");
  if (uth <= Rat(0) || uth > Rat(1))
    throw Error(ErrorKind::Validation, "threshold must be in (0, 1]");
}

[[noreturn]] void infeasible(int task_id) {
  throw Error(ErrorKind::Infeasible,
              "task " + std::to_string(task_id) +
                  " cannot be placed on any processor");
}

// Adjacent pairs left to right first, then the remaining (i < j) pairs in
// lexicographic order.
std::vector<std::pair<int, int>> split_pair_order(int m) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < m; ++i) pairs.emplace_back(i, i + 1);
  for (int i = 0; i < m; ++i)
    for (int j = i + 2; j < m; ++j) pairs.emplace_back(i, j);
  return pairs;
}

}  // namespace

Rat Assignment::util(int processor) const {
  Rat sum{0};
  for (const Entry& e : bins.at(processor)) sum += e.util();
  return sum;
}

int Assignment::split_count() const {
  int n = 0;
  for (const auto& bin : bins)
    for (const Entry& e : bin)
      if (e.part == 1) ++n;
  return n;
}

Rat Assignment::max_util() const {
  Rat best{0};
  for (int p = 0; p < processor_count; ++p) best = std::max(best, util(p));
  return best;
}

SplitResult split_task(const Task& task, Rat low_residual, Rat high_residual,
                       int low_processor, int high_processor) {
  if (low_processor == high_processor)
    throw Error(ErrorKind::Validation, "split processors must differ");
  auto unsplittable = [&](const std::string& why) {
    throw Error(ErrorKind::Unsplittable,
                "task " + std::to_string(task.id) + ": " + why);
  };
  if (task.wcet < 2) unsplittable("wcet below 2 ticks cannot be split");
  if (low_residual <= Rat(0)) unsplittable("no residual capacity");
  Tick part1 = floor_rat(low_residual * Rat(task.period));
  if (part1 < 1) unsplittable("no whole tick fits the residual");
  part1 = std::min(part1, task.wcet - 1);
  Tick part2 = task.wcet - part1;
  if (Rat(part2, task.period) > high_residual)
    unsplittable("part 2 exceeds the second processor's capacity");
  SplitResult r;
  r.part1 = Entry{task.id, task.period, task.deadline, task.phase,
                  part1,   task.wcet,   1};
  r.part2 = Entry{task.id, task.period, task.deadline, task.phase,
                  part2,   task.wcet,   2};
  return r;
}

Assignment assign(const TaskSet& set, int processor_count, Rat threshold) {
  check_args(set, processor_count, threshold);
  Assignment asg;
  asg.processor_count = processor_count;
  asg.threshold = threshold;
  asg.bins.resize(processor_count);
  std::vector<Rat> util(processor_count, Rat(0));

  for (const Task& task : sort_tasks(set).tasks) {
    Rat u = utilization(task);
    bool placed = false;
    for (int p = 0; p < processor_count && !placed; ++p) {
      if (util[p] + u <= threshold) {
        asg.bins[p].push_back(whole_entry(task));
        util[p] += u;
        placed = true;
      }
    }
    if (placed) continue;
    for (auto [lo, hi] : split_pair_order(processor_count)) {
      try {
        SplitResult sr = split_task(task, threshold - util[lo],
                                    threshold - util[hi], lo, hi);
        asg.bins[lo].push_back(sr.part1);
        asg.bins[hi].push_back(sr.part2);
        util[lo] += sr.part1.util();
        util[hi] += sr.part2.util();
        placed = true;
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Unsplittable) throw;
      }
    }
    if (!placed) infeasible(task.id);
  }
  return asg;
}

Assignment assign_first_fit(const TaskSet& set, int processor_count,
                            Rat threshold) {
  check_args(set, processor_count, threshold);
  Assignment asg;
  asg.processor_count = processor_count;
  asg.threshold = threshold;
  asg.bins.resize(processor_count);
  std::vector<Rat> util(processor_count, Rat(0));
  for (const Task& task : set.tasks) {
    Rat u = utilization(task);
    bool placed = false;
    for (int p = 0; p < processor_count && !placed; ++p) {
      if (util[p] + u <= threshold) {
        asg.bins[p].push_back(whole_entry(task));
        util[p] += u;
        placed = true;
      }
    }
    if (!placed) infeasible(task.id);
  }
  return asg;
}

Assignment assign_best_fit(const TaskSet& set, int processor_count,
                           Rat threshold) {
  check_args(set, processor_count, threshold);
  Assignment asg;
  asg.processor_count = processor_count;
  asg.threshold = threshold;
  asg.bins.resize(processor_count);
  std::vector<Rat> util(processor_count, Rat(0));
  for (const Task& task : set.tasks) {
    Rat u = utilization(task);
    int best = -1;
    for (int p = 0; p < processor_count; ++p) {
      if (util[p] + u > threshold) continue;
      if (best < 0 || threshold - util[p] < threshold - util[best]) best = p;
    }
    if (best < 0) infeasible(task.id);
    asg.bins[best].push_back(whole_entry(task));
    util[best] += u;
  }
  return asg;
}

std::vector<std::string> verify(const Assignment& asg) {
  std::vector<std::string> violations;
  auto flag = [&](const std::string& msg) { violations.push_back(msg); };

  if (asg.processor_count < 1 ||
      asg.bins.size() != static_cast<std::size_t>(asg.processor_count))
    flag("bin list does not match the processor count");

  for (int p = 0; p < static_cast<int>(asg.bins.size()); ++p) {
    if (asg.util(p) > asg.threshold)
      flag("processor " + std::to_string(p + 1) + " utilization " +
           to_string(asg.util(p)) + " exceeds threshold " +
           to_string(asg.threshold));
  }

  // placement map: task id -> list of (processor, entry)
  std::map<int, std::vector<std::pair<int, Entry>>> by_task;
  for (int p = 0; p < static_cast<int>(asg.bins.size()); ++p)
    for (const Entry& e : asg.bins[p]) by_task[e.task_id].emplace_back(p, e);

  for (const auto& [id, places] : by_task) {
    const std::string tag = "task " + std::to_string(id);
    if (places.size() == 1) {
      if (places[0].second.part != 0)
        flag(tag + " has a lone split portion");
      continue;
    }
    if (places.size() != 2) {
      flag(tag + " appears " + std::to_string(places.size()) + " times");
      continue;
    }
    const auto* p1 = &places[0];
    const auto* p2 = &places[1];
    if (p1->second.part == 2) std::swap(p1, p2);
    if (p1->second.part != 1 || p2->second.part != 2) {
      flag(tag + " does not split into parts 1 and 2");
      continue;
    }
    if (p1->first == p2->first)
      flag(tag + ": both portions share one processor");
    if (p1->first > p2->first)
      flag(tag + ": part 1 is not on the lower-indexed processor");
    if (p1->second.wcet + p2->second.wcet != p1->second.full_wcet)
      flag(tag + ": portion wcets do not sum to the parent wcet");
    if (p1->second.period != p2->second.period ||
        p1->second.deadline != p2->second.deadline ||
        p1->second.phase != p2->second.phase)
      flag(tag + ": portions disagree on period/deadline/phase");
  }
  return violations;
}

}  // namespace rtsched::sasa
