#include <doctest.h>

#include <map>
#include <random>

#include "rtsched/sasa.hpp"

using namespace rtsched;
using namespace rtsched::sasa;

namespace {

Task t(int id, Tick period, Tick wcet) {
  return Task{id, period, wcet, period, 0};
}

Rat placed_utilization(const Assignment& asg) {
  Rat sum{0};
  for (int p = 0; p < asg.processor_count; ++p) sum += asg.util(p);
  return sum;
}

TaskSet seeded_set(std::uint64_t seed, int max_tasks = 8) {
  GenParams p;
  p.count = 2 + static_cast<int>(seed % max_tasks);
  p.target_total_utilization = Rat(1 + static_cast<int>(seed % 3), 2);
  p.period_choices = {4, 5, 6, 8, 10, 12, 20};
  p.seed = seed;
  return generate(p);
}

}  // namespace

TEST_CASE("assign packs the sorted example onto two processors") {
  TaskSet set{{t(1, 4, 1), t(2, 5, 1), t(3, 6, 2), t(4, 8, 3)}, ""};
  Assignment asg = assign(set, 2, Rat(1));
  CHECK(asg.util(0) == Rat(47, 60));
  CHECK(asg.util(1) == Rat(3, 8));
  CHECK(asg.split_count() == 0);
  CHECK(asg.bins[0].size() == 3);
  CHECK(asg.bins[1].size() == 1);
  CHECK(asg.bins[1][0].task_id == 4);
  CHECK(verify(asg).empty());
}

TEST_CASE("assign: single task on a single processor") {
  Assignment asg = assign(TaskSet{{t(1, 4, 2)}, ""}, 1, Rat(1));
  CHECK(asg.util(0) == Rat(1, 2));
  CHECK(asg.bins[0].size() == 1);
}

TEST_CASE("assign splits a task no processor can hold whole") {
  // Utilizations 2/5, 1/2, 4/5, 3/10 over period 10. After the period sort
  // (tie-break by wcet) the order is 3,4,5,8 ticks; the 8-tick task fits
  // nowhere whole and splits across P1/P2, filling both to exactly 1.
  TaskSet set{{t(1, 10, 4), t(2, 10, 5), t(3, 10, 8), t(4, 10, 3)}, ""};
  Assignment asg = assign(set, 2, Rat(1));
  CHECK(asg.split_count() == 1);
  CHECK(asg.util(0) == Rat(1));
  CHECK(asg.util(1) == Rat(1));
  std::map<int, Entry> parts;
  for (int p = 0; p < 2; ++p)
    for (const Entry& e : asg.bins[p])
      if (e.part != 0) {
        CHECK(e.task_id == 3);
        parts[e.part] = e;
      }
  REQUIRE(parts.size() == 2);
  CHECK(parts[1].wcet + parts[2].wcet == 8);
  CHECK(verify(asg).empty());
}

TEST_CASE("split_task sizes part 1 from the residual capacity") {
  SplitResult r = split_task(t(1, 10, 3), Rat(1, 10), Rat(1), 0, 1);
  CHECK(r.part1.wcet == 1);
  CHECK(r.part2.wcet == 2);
  CHECK(r.part1.part == 1);
  CHECK(r.part2.part == 2);
  CHECK(r.part1.period == 10);
  CHECK(r.part2.deadline == 10);

  SplitResult even = split_task(t(1, 4, 2), Rat(1, 4), Rat(1), 0, 1);
  CHECK(even.part1.wcet == 1);
  CHECK(even.part2.wcet == 1);
}

TEST_CASE("split_task rejects sub-tick residuals and oversize remainders") {
  CHECK_THROWS_AS(split_task(t(1, 10, 5), Rat(1, 20), Rat(1), 0, 1), Error);
  try {
    split_task(t(1, 10, 5), Rat(1, 20), Rat(1), 0, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unsplittable);
  }
  // part 2 of size 2 does not fit a residual of 1/10
  CHECK_THROWS_AS(split_task(t(1, 10, 3), Rat(1, 10), Rat(1, 10), 0, 1),
                  Error);
}

TEST_CASE("first fit fails where SASA splits") {
  TaskSet set{{t(1, 10, 4), t(2, 10, 5), t(3, 10, 8), t(4, 10, 3)}, ""};
  CHECK_THROWS_AS(assign_first_fit(set, 2, Rat(1)), Error);
  try {
    assign_first_fit(set, 2, Rat(1));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
    CHECK(std::string(e.what()).find("task") != std::string::npos);
  }
}

TEST_CASE("first fit matches assign on trivial inputs") {
  TaskSet single{{t(1, 4, 2)}, ""};
  Assignment a = assign(single, 2, Rat(1));
  Assignment b = assign_first_fit(single, 2, Rat(1));
  CHECK(a.bins[0][0] == b.bins[0][0]);

  TaskSet small{{t(1, 10, 2), t(2, 10, 3), t(3, 10, 4)}, ""};
  Assignment ff = assign_first_fit(small, 3, Rat(1));
  CHECK(ff.bins[0].size() == 3);  // everything fits the first processor
  CHECK(ff.bins[1].empty());
}

TEST_CASE("best fit prefers the tightest feasible processor") {
  // After 1/2 -> P1 and 3/5 -> P2, the 1/4 task sees remaining capacities
  // 1/2 and 2/5; the tighter P2 wins.
  TaskSet set{{t(1, 20, 10), t(2, 20, 12), t(3, 20, 5)}, ""};
  Assignment asg = assign_best_fit(set, 2, Rat(1));
  CHECK(asg.bins[1].size() == 2);
  CHECK(asg.bins[1][1].task_id == 3);

  // all processors empty: tie broken by lowest index
  Assignment first = assign_best_fit(TaskSet{{t(1, 4, 1)}, ""}, 3, Rat(1));
  CHECK(first.bins[0].size() == 1);
}

TEST_CASE("best fit never exceeds the threshold over a seeded corpus") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    TaskSet set = seeded_set(seed);
    try {
      Assignment asg = assign_best_fit(set, 2, Rat(1));
      for (int p = 0; p < asg.processor_count; ++p)
        CHECK(asg.util(p) <= asg.threshold);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Infeasible);
    }
  }
}

TEST_CASE("assign conserves utilization and is deterministic") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    TaskSet set = seeded_set(seed);
    try {
      Assignment a = assign(set, 3, Rat(1));
      Assignment b = assign(set, 3, Rat(1));
      CHECK(placed_utilization(a) == total_utilization(set));
      CHECK(a.bins == b.bins);
      CHECK(verify(a).empty());
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Infeasible);
    }
  }
}

TEST_CASE("FF feasibility on the sorted set implies SASA feasibility") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    TaskSet set = seeded_set(seed);
    bool ff_ok = true;
    try {
      assign_first_fit(sort_tasks(set), 3, Rat(1));
    } catch (const Error&) {
      ff_ok = false;
    }
    if (ff_ok) {
      Assignment asg = assign(set, 3, Rat(1));  // must not throw
      CHECK(asg.split_count() == 0);
    }
  }
}

TEST_CASE("verify flags hand-built violations and accepts the boundary") {
  Assignment ok;
  ok.processor_count = 1;
  ok.threshold = Rat(1, 2);
  ok.bins.resize(1);
  ok.bins[0].push_back(Entry{1, 4, 4, 0, 2, 2, 0});  // U == UTH exactly
  CHECK(verify(ok).empty());

  Assignment both_on_one = ok;
  both_on_one.bins[0].clear();
  both_on_one.bins[0].push_back(Entry{1, 10, 10, 0, 1, 3, 1});
  both_on_one.bins[0].push_back(Entry{1, 10, 10, 0, 2, 3, 2});
  auto violations = verify(both_on_one);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("share one processor") != std::string::npos);

  Assignment over = ok;
  over.bins[0].push_back(Entry{2, 4, 4, 0, 1, 1, 0});
  CHECK_FALSE(verify(over).empty());
}
