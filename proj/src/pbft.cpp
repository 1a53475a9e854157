#include "rtsched/pbft.hpp"

#include <algorithm>
#include <tuple>

namespace rtsched::pbft {

namespace {

std::string key_str(const JobKey& k) {
  std::string s = "job(" + std::to_string(k.task_id) + "," +
                  std::to_string(k.index) + ")";
  if (k.part != 0) s += " part " + std::to_string(k.part);
  return s;
}

// Gaps of `window` not covered by `occupied` (need not be sorted).
std::vector<Interval> subtract(Interval window,
                               std::vector<Interval> occupied) {
  std::vector<Interval> gaps;
  if (window.length() <= 0) return gaps;
  std::sort(occupied.begin(), occupied.end(),
            [](const Interval& a, const Interval& b) {
              return std::tie(a.start, a.end) < std::tie(b.start, b.end);
            });
  Tick cursor = window.start;
  for (const Interval& iv : occupied) {
    if (iv.end <= cursor || iv.start >= window.end) continue;
    if (iv.start > cursor) gaps.push_back({cursor, std::min(iv.start, window.end)});
    cursor = std::max(cursor, iv.end);
    if (cursor >= window.end) break;
  }
  if (cursor < window.end) gaps.push_back({cursor, window.end});
  return gaps;
}

}  // namespace

ReservationTable::ReservationTable(int processor_count)
    : processor_count_(processor_count),
      primaries_(processor_count),
      backups_(processor_count),
      crashed_(processor_count) {
  if (processor_count < 1)
    throw Error(ErrorKind::Validation, "processor count must be >= 1");
}

void ReservationTable::add_primary(const SlotReservation& r) {
  primaries_.at(r.processor).push_back(r);
}

int ReservationTable::new_overload_group() { return next_group_++; }

void ReservationTable::add_backup_member(const SlotReservation& r,
                                         Interval slot) {
  backups_.at(r.processor).push_back(r);
  auto it = groups_.find(r.overload_group);
  if (it == groups_.end()) {
    groups_[r.overload_group] = OverloadGroup{r.processor, slot, {r.job}};
  } else {
    it->second.members.push_back(r.job);
  }
}

void ReservationTable::register_committed(const CommittedJob& c) {
  committed_[c.key] = c;
}

Interval ReservationTable::free_backup(const JobKey& key) {
  auto it = committed_.find(key);
  if (it == committed_.end())
    throw Error(ErrorKind::Bookkeeping, "unknown " + key_str(key));
  if (it->second.backup_freed)
    throw Error(ErrorKind::Bookkeeping, key_str(key) + " already deallocated");
  it->second.backup_freed = true;
  const SlotReservation& b = it->second.backup;
  auto& vec = backups_.at(b.processor);
  vec.erase(std::remove_if(vec.begin(), vec.end(),
                           [&](const SlotReservation& r) {
                             return r.job == key;
                           }),
            vec.end());
  auto git = groups_.find(b.overload_group);
  if (git != groups_.end()) {
    auto& members = git->second.members;
    members.erase(std::remove(members.begin(), members.end(), key),
                  members.end());
    if (members.empty()) groups_.erase(git);
  }
  return b.interval;
}

void ReservationTable::mark_crashed(int processor, Tick tick) {
  if (!crashed_.at(processor)) crashed_[processor] = tick;
}

bool ReservationTable::is_crashed(int processor) const {
  return crashed_.at(processor).has_value();
}

const std::vector<SlotReservation>& ReservationTable::primaries(
    int processor) const {
  return primaries_.at(processor);
}

const std::vector<SlotReservation>& ReservationTable::backups(
    int processor) const {
  return backups_.at(processor);
}

std::vector<Interval> ReservationTable::free_gaps_for_primary(
    int processor, Interval window) const {
  std::vector<Interval> occupied;
  for (const SlotReservation& r : primaries_.at(processor))
    occupied.push_back(r.interval);
  for (const SlotReservation& r : backups_.at(processor))
    occupied.push_back(r.interval);
  return subtract(window, std::move(occupied));
}

std::vector<Interval> ReservationTable::free_gaps_for_backup(
    int processor, Interval window) const {
  std::vector<Interval> occupied;
  for (const SlotReservation& r : primaries_.at(processor))
    occupied.push_back(r.interval);
  for (const auto& [id, g] : groups_)
    if (g.processor == processor) occupied.push_back(g.slot);
  return subtract(window, std::move(occupied));
}

std::optional<std::pair<int, Interval>> find_primary_slot(
    const Job& job, const ReservationTable& table) {
  for (int p = 0; p < table.processor_count(); ++p) {
    for (const Interval& gap :
         table.free_gaps_for_primary(p, {job.release, job.abs_deadline})) {
      if (gap.length() >= job.wcet)
        return std::make_pair(p, Interval{gap.start, gap.start + job.wcet});
    }
  }
  return std::nullopt;
}

std::optional<OverloadHit> try_overload_window(int primary_processor,
                                               Tick primary_end, Tick deadline,
                                               Tick backup_wcet,
                                               const ReservationTable& table) {
  std::optional<OverloadHit> best;
  for (const auto& [id, g] : table.groups()) {
    if (g.processor == primary_processor) continue;
    if (g.slot.start < primary_end) continue;
    if (g.slot.start + backup_wcet > deadline) continue;
    if (g.slot.length() < backup_wcet) continue;
    bool compatible = true;
    for (const JobKey& member : g.members) {
      auto it = table.committed().find(member);
      if (it != table.committed().end() &&
          it->second.primary_processor == primary_processor) {
        compatible = false;
        break;
      }
    }
    if (!compatible) continue;
    OverloadHit hit{g.processor, {g.slot.start, g.slot.start + backup_wcet}, id};
    if (!best ||
        std::tie(hit.processor, hit.interval.start, hit.overload_group) <
            std::tie(best->processor, best->interval.start,
                     best->overload_group))
      best = hit;
  }
  return best;
}

std::optional<OverloadHit> try_overload(const Job& job, int primary_processor,
                                        Tick backup_wcet,
                                        const ReservationTable& table) {
  // The primary is assumed to end no later than release + wcet under an
  // earliest-fit placement; callers with an exact end use the window form.
  return try_overload_window(primary_processor, job.release + job.wcet,
                             job.abs_deadline, backup_wcet, table);
}

std::optional<std::pair<int, Interval>> place_backup_latest_window(
    int primary_processor, Tick primary_end, Tick deadline, Tick backup_wcet,
    const ReservationTable& table) {
  std::optional<std::pair<int, Interval>> best;
  for (int p = 0; p < table.processor_count(); ++p) {
    if (p == primary_processor) continue;
    Tick latest = -1;
    for (const Interval& gap :
         table.free_gaps_for_backup(p, {primary_end, deadline})) {
      if (gap.length() >= backup_wcet)
        latest = std::max(latest, gap.end - backup_wcet);
    }
    if (latest < 0) continue;
    if (!best || latest > best->second.start)
      best = std::make_pair(p, Interval{latest, latest + backup_wcet});
  }
  return best;
}

std::optional<std::pair<int, Interval>> place_backup_latest(
    const Job& job, const SlotReservation& primary, Tick backup_wcet,
    const ReservationTable& table) {
  return place_backup_latest_window(primary.processor, primary.interval.end,
                                    job.abs_deadline, backup_wcet, table);
}

AdmitResult admit(const Job& job, ReservationTable& table, Tick backup_wcet) {
  if (job.release >= job.abs_deadline)
    throw Error(ErrorKind::Validation, "job release must precede deadline");
  if (backup_wcet < 1 || backup_wcet > job.wcet)
    throw Error(ErrorKind::Validation, "backup wcet must be in [1, wcet]");

  auto primary = find_primary_slot(job, table);
  if (!primary) return AdmitResult::Rejected;
  auto [pproc, pint] = *primary;
  JobKey key{job.task_id, job.index, 0};

  SlotReservation backup;
  Interval slot;
  auto hit = try_overload_window(pproc, pint.end, job.abs_deadline,
                                 backup_wcet, table);
  if (hit) {
    backup = SlotReservation{hit->processor, hit->interval, key, Copy::Backup,
                             hit->overload_group};
    slot = table.groups().at(hit->overload_group).slot;
  } else {
    auto placed = place_backup_latest_window(pproc, pint.end, job.abs_deadline,
                                             backup_wcet, table);
    if (!placed) return AdmitResult::Rejected;
    backup = SlotReservation{placed->first, placed->second, key, Copy::Backup,
                             table.new_overload_group()};
    slot = placed->second;
  }

  table.add_primary(SlotReservation{pproc, pint, key, Copy::Primary, -1});
  table.add_backup_member(backup, slot);
  table.register_committed(CommittedJob{key, pproc, pint, job.abs_deadline,
                                        backup, false});
  return AdmitResult::Committed;
}

std::vector<Job> order_pending(std::vector<Job> jobs) {
  std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return std::tie(a.abs_deadline, a.release, a.task_id) <
           std::tie(b.abs_deadline, b.release, b.task_id);
  });
  return jobs;
}

Interval deallocate_backup(const JobKey& key, ReservationTable& table) {
  return table.free_backup(key);
}

std::vector<JobKey> on_fault(const FaultEvent& event, ReservationTable& table) {
  if (event.processor < 0 || event.processor >= table.processor_count())
    throw Error(ErrorKind::Validation, "fault names an unknown processor");
  std::vector<JobKey> promoted;
  if (event.kind == FaultKind::Permanent) {
    if (table.is_crashed(event.processor))
      throw Error(ErrorKind::Validation, "processor already crashed");
    table.mark_crashed(event.processor, event.time);
    for (const auto& [key, c] : table.committed()) {
      if (c.primary_processor != event.processor) continue;
      if (c.primary.end <= event.time) continue;  // completed before the fault
      promoted.push_back(key);
    }
  } else {
    for (const auto& [key, c] : table.committed()) {
      if (c.primary_processor != event.processor) continue;
      if (c.primary.contains(event.time)) promoted.push_back(key);
    }
  }
  return promoted;
}

}  // namespace rtsched::pbft
