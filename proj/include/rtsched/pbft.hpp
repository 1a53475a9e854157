#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rtsched/taskmodel.hpp"
#include "rtsched/types.hpp"

namespace rtsched::pbft {

enum class FaultKind { Permanent, Transient };

struct FaultEvent {
  Tick time = 0;
  int processor = 0;
  FaultKind kind = FaultKind::Permanent;
};

// Reserved execution interval for one copy of a job. Backups stacked on the
// same slot share an overload_group; primaries use group -1.
struct SlotReservation {
  int processor = 0;
  Interval interval;
  JobKey job;
  Copy kind = Copy::Primary;
  int overload_group = -1;
};

struct CommittedJob {
  JobKey key;
  int primary_processor = 0;
  Interval primary;        // reserved (or observed) primary execution window
  Tick abs_deadline = 0;
  SlotReservation backup;
  bool backup_freed = false;
};

// Per-processor reservation lists plus the committed-job registry.
// Invariants: primary reservations on one processor are pairwise disjoint;
// backups overlap only within an overload group whose members' primaries all
// reside on distinct processors; every committed job has its primary and
// backup on distinct processors with backup ⊆ [primary end, deadline).
class ReservationTable {
 public:
  explicit ReservationTable(int processor_count);

  int processor_count() const { return processor_count_; }

  // Pure-mode primary reservation; also used to block externally scheduled
  // execution time (the integrated mode records EDF busy runs this way).
  void add_primary(const SlotReservation& r);

  void add_backup_member(const SlotReservation& r, Interval slot);
  int new_overload_group();

  void register_committed(const CommittedJob& c);

  // Removes the job's backup member; a shared slot keeps its other members.
  // Throws Error{Bookkeeping} for unknown or already-freed jobs.
  Interval free_backup(const JobKey& key);

  void mark_crashed(int processor, Tick tick);
  bool is_crashed(int processor) const;

  const std::vector<SlotReservation>& primaries(int processor) const;
  const std::vector<SlotReservation>& backups(int processor) const;
  const std::map<JobKey, CommittedJob>& committed() const { return committed_; }

  struct OverloadGroup {
    int processor = 0;
    Interval slot;
    std::vector<JobKey> members;
  };
  const std::map<int, OverloadGroup>& groups() const { return groups_; }

  // Free gaps of the given window on one processor. For primary placement the
  // occupied set is primaries + live committed backups; for backup placement
  // it is primaries + overload-group slots.
  std::vector<Interval> free_gaps_for_primary(int processor,
                                              Interval window) const;
  std::vector<Interval> free_gaps_for_backup(int processor,
                                             Interval window) const;

 private:
  int processor_count_;
  std::vector<std::vector<SlotReservation>> primaries_;
  std::vector<std::vector<SlotReservation>> backups_;
  std::map<int, OverloadGroup> groups_;
  std::map<JobKey, CommittedJob> committed_;
  std::vector<std::optional<Tick>> crashed_;
  int next_group_ = 0;
};

// Earliest contiguous free interval of length job.wcet within
// [release, abs_deadline), scanning processors in ascending index.
std::optional<std::pair<int, Interval>> find_primary_slot(
    const Job& job, const ReservationTable& table);

struct OverloadHit {
  int processor = 0;
  Interval interval;  // aligned to the slot start, trimmed to backup_wcet
  int overload_group = 0;
};

// Joins an existing backup slot on a processor other than primary_processor
// when every stacked member's primary lives on yet another processor.
std::optional<OverloadHit> try_overload(const Job& job, int primary_processor,
                                        Tick backup_wcet,
                                        const ReservationTable& table);

// Latest-starting free interval of length backup_wcet within
// [primary.end, abs_deadline) over processors != primary.processor;
// start ties go to the lowest processor index.
std::optional<std::pair<int, Interval>> place_backup_latest(
    const Job& job, const SlotReservation& primary, Tick backup_wcet,
    const ReservationTable& table);

// Window forms of the two backup-placement searches, shared with the
// integrated simulation mode where the primary window comes from an
// observed EDF execution rather than a reservation.
std::optional<OverloadHit> try_overload_window(int primary_processor,
                                               Tick primary_end, Tick deadline,
                                               Tick backup_wcet,
                                               const ReservationTable& table);
std::optional<std::pair<int, Interval>> place_backup_latest_window(
    int primary_processor, Tick primary_end, Tick deadline, Tick backup_wcet,
    const ReservationTable& table);

enum class AdmitResult { Committed, Rejected };

// Steps 2-5: primary by earliest fit, backup by overload else latest slot.
// A rejected job leaves the table untouched.
AdmitResult admit(const Job& job, ReservationTable& table, Tick backup_wcet);

// Admission processing order: (abs_deadline, release, task id).
std::vector<Job> order_pending(std::vector<Job> jobs);

// Step-5 deallocation once the job's primary completed fault-free.
Interval deallocate_backup(const JobKey& key, ReservationTable& table);

// Marks the crash and returns the committed jobs whose backups activate.
// Permanent: every primary on the processor not completed by event.time.
// Transient: only the primary whose reserved interval covers event.time.
std::vector<JobKey> on_fault(const FaultEvent& event, ReservationTable& table);

}  // namespace rtsched::pbft
