#pragma once

#include <optional>
#include <vector>

#include "rtsched/pbft.hpp"
#include "rtsched/taskmodel.hpp"
#include "rtsched/types.hpp"

// Brute-force validators for the test suite. Deliberately share no
// scheduling code with the edf/sim engines.
namespace rtsched::oracle {

struct Witness {
  Tick deadline = 0;
  Tick demand = 0;
  Tick supply = 0;
};

struct OracleVerdict {
  bool schedulable = true;
  std::optional<Witness> witness;  // first failing deadline when false
};

// Processor-demand criterion for synchronous-release EDF on one processor:
// schedulable iff for every absolute deadline t in (0, hyperperiod],
// sum_i max(0, floor((t - D_i)/T_i) + 1) * C_i <= t.
OracleVerdict dbf_schedulable(const std::vector<Task>& tasks,
                              Tick cap = kDefaultHorizonCap);

// True iff for every (processor, tick) permanent fault the reservation table
// recovers every committed job by its deadline, with no two activated
// backups colliding. Independent replay over the reservations themselves.
bool exhaustive_fault_check(const pbft::ReservationTable& table, Tick horizon,
                            int processor_count);

}  // namespace rtsched::oracle
