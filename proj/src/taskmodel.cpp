#include "rtsched/taskmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

namespace rtsched {

void validate(const Task& task) {
  auto fail = [&](const std::string& rule) {
    throw Error(ErrorKind::Validation,
                "task " + std::to_string(task.id) + ": " + rule);
  };
  if (task.id < 0) fail("id must be non-negative");
  if (task.wcet <= 0) fail("wcet must be positive");
  if (task.period <= 0) fail("period must be positive");
  if (task.deadline <= 0) fail("deadline must be positive");
  if (task.phase < 0) fail("phase must be non-negative");
  if (task.wcet > task.deadline) fail("wcet must not exceed deadline");
  if (task.deadline > task.period) fail("deadline must not exceed period");
}

void validate(const TaskSet& set) {
  if (set.tasks.empty())
    throw Error(ErrorKind::Validation, "task set must be non-empty");
  std::set<int> ids;
  for (const Task& t : set.tasks) {
    validate(t);
    if (!ids.insert(t.id).second)
      throw Error(ErrorKind::Validation,
                  "duplicate task id " + std::to_string(t.id));
  }
}

Rat utilization(const Task& task) { return Rat(task.wcet, task.period); }

Rat total_utilization(const TaskSet& set) {
  Rat sum{0};
  for (const Task& t : set.tasks) sum += utilization(t);
  return sum;
}

Tick hyperperiod(const TaskSet& set, Tick cap) {
  Tick l = 1;
  for (const Task& t : set.tasks) {
    Tick g = std::gcd(l, t.period);
    if (t.period / g > cap / l)
      throw Error(ErrorKind::CapExceeded,
                  "hyperperiod exceeds cap " + std::to_string(cap) +
                      "; instance too large for exact analysis");
    l = l / g * t.period;
  }
  return l;
}

TaskSet sort_tasks(const TaskSet& set) {
  TaskSet out = set;
  std::stable_sort(out.tasks.begin(), out.tasks.end(),
                   [](const Task& a, const Task& b) {
                     return std::tie(a.period, a.wcet, a.id) <
                            std::tie(b.period, b.wcet, b.id);
                   });
  return out;
}

TaskSet generate(const GenParams& p) {
  if (p.count < 1)
    throw Error(ErrorKind::Validation, "generate: count must be >= 1");
  if (p.target_total_utilization <= Rat(0) ||
      p.target_total_utilization > Rat(p.count))
    throw Error(ErrorKind::Validation,
                "generate: target utilization must be in (0, count]");
  if (p.period_choices.empty())
    throw Error(ErrorKind::Validation, "generate: no period choices");
  for (Tick t : p.period_choices)
    if (t <= 0)
      throw Error(ErrorKind::Validation, "generate: periods must be positive");

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_period(
      0, p.period_choices.size() - 1);
  const double target = static_cast<double>(p.target_total_utilization.numerator()) /
                        static_cast<double>(p.target_total_utilization.denominator());
  const int n = p.count;
  const int kSetAttempts = 100;
  const int kTaskAttempts = 20;

  for (int attempt = 0; attempt < kSetAttempts; ++attempt) {
    // UUniFast: iteratively split the remaining utilization budget.
    std::vector<double> u(n);
    double sum = target;
    for (int i = 0; i < n - 1; ++i) {
      double next = sum * std::pow(unif(rng), 1.0 / (n - 1 - i));
      u[i] = sum - next;
      sum = next;
    }
    u[n - 1] = sum;

    TaskSet out;
    out.name = "gen-" + std::to_string(p.seed);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      bool placed = false;
      for (int retry = 0; retry < kTaskAttempts; ++retry) {
        Tick period = p.period_choices[pick_period(rng)];
        Tick wcet = std::max<Tick>(
            1, static_cast<Tick>(std::llround(u[i] * static_cast<double>(period))));
        if (wcet > period) continue;
        out.tasks.push_back(Task{i + 1, period, wcet, period, 0});
        placed = true;
        break;
      }
      ok = placed;
    }
    if (ok) {
      validate(out);
      return out;
    }
  }
  throw Error(ErrorKind::Generation,
              "generate: retry budget exhausted; target infeasible for the "
              "given period choices");
}

std::vector<Job> release_jobs(const TaskSet& set, Tick horizon) {
  if (horizon < 1)
    throw Error(ErrorKind::Validation, "release_jobs: horizon must be >= 1");
  std::vector<Job> jobs;
  for (const Task& t : set.tasks) {
    for (Tick k = 0;; ++k) {
      Tick r = t.phase + k * t.period;
      if (r >= horizon) break;
      jobs.push_back(Job{t.id, k, r, r + t.deadline, t.wcet});
    }
  }
  std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return std::tie(a.release, a.task_id) < std::tie(b.release, b.task_id);
  });
  return jobs;
}

}  // namespace rtsched
