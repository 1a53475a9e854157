#include "rtsched/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace rtsched::oracle {

OracleVerdict dbf_schedulable(const std::vector<Task>& tasks, Tick cap) {
  Tick hyper = 1;
  for (const Task& t : tasks) {
    validate(t);
    Tick g = std::gcd(hyper, t.period);
    if (t.period / g > cap / hyper)
      throw Error(ErrorKind::CapExceeded,
                  "hyperperiod exceeds cap " + std::to_string(cap));
    hyper = hyper / g * t.period;
  }

  std::set<Tick> deadlines;
  for (const Task& t : tasks)
    for (Tick d = t.deadline; d <= hyper; d += t.period) deadlines.insert(d);

  for (Tick t : deadlines) {
    Tick demand = 0;
    for (const Task& task : tasks) {
      if (t < task.deadline) continue;
      demand += ((t - task.deadline) / task.period + 1) * task.wcet;
    }
    if (demand > t) return OracleVerdict{false, Witness{t, demand, t}};
  }
  return OracleVerdict{true, std::nullopt};
}

bool exhaustive_fault_check(const pbft::ReservationTable& table, Tick horizon,
                            int processor_count) {
  for (int p = 0; p < processor_count; ++p) {
    for (Tick f = 0; f < horizon; ++f) {
      std::vector<std::vector<Interval>> activated(processor_count);
      for (const auto& [key, c] : table.committed()) {
        if (c.primary_processor != p) continue;
        if (c.primary.end <= f) continue;  // finished before the crash
        if (c.backup.processor == p) return false;  // dies with its primary
        if (c.backup.interval.end > c.abs_deadline) return false;
        activated[c.backup.processor].push_back(c.backup.interval);
      }
      for (auto& ivs : activated) {
        std::sort(ivs.begin(), ivs.end(),
                  [](const Interval& a, const Interval& b) {
                    return a.start < b.start;
                  });
        for (std::size_t i = 1; i < ivs.size(); ++i)
          if (ivs[i].start < ivs[i - 1].end) return false;  // collision
      }
    }
  }
  return true;
}

}  // namespace rtsched::oracle
