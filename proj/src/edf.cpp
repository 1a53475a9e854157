#include "rtsched/edf.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

namespace rtsched::edf {

namespace {

auto edf_key(const ReadyJob& j) {
  return std::make_tuple(j.abs_deadline, j.release, j.key.task_id, j.key.index,
                         j.key.part);
}

struct Part2Info {
  int processor = 0;
  Tick wcet = 0;
  Tick period = 0;
  Tick deadline = 0;
  Tick phase = 0;
};

struct BackupRun {
  Interval interval;
  JobKey key;
  Tick executed = 0;
  bool started = false;
};

// Occupant of a processor during one tick, for start/preempt/resume events.
struct Occupant {
  JobKey key;
  Copy copy = Copy::Primary;
  bool operator==(const Occupant& o) const {
    return key == o.key && copy == o.copy;
  }
};

struct Proc {
  std::vector<ReadyJob> ready;
  std::vector<std::pair<Tick, ReadyJob>> pending;  // future part-2 releases
  std::vector<BackupRun> backups;
  std::optional<Occupant> prev;
  std::optional<Tick> crashed;
  bool transient_pending = false;
  Tick busy = 0;
  // current contiguous run, for ExecRun extraction
  std::optional<Occupant> run_owner;
  Tick run_start = 0;
};

struct JobState {
  bool has_run = false;
  bool corrupted = false;
  bool backup_activated = false;
};

class Engine {
 public:
  Engine(const sasa::Assignment& asg, Tick horizon,
         const std::vector<pbft::FaultEvent>* faults,
         pbft::ReservationTable* table)
      : asg_(asg), horizon_(horizon), table_(table) {
    if (horizon < 1)
      throw Error(ErrorKind::Validation, "horizon must be >= 1");
    procs_.resize(asg.processor_count);
    if (faults) faults_ = *faults;
    std::stable_sort(faults_.begin(), faults_.end(),
                     [](const pbft::FaultEvent& a, const pbft::FaultEvent& b) {
                       return a.time < b.time;
                     });
    prepare_releases();
  }

  RunResult run() {
    for (Tick t = 0; t < horizon_; ++t) {
      inject_faults(t);
      do_releases(t);
      check_misses(t);
      for (int p = 0; p < asg_.processor_count; ++p) execute(t, p);
      // A transient fault only corrupts work running at its tick.
      for (Proc& proc : procs_) proc.transient_pending = false;
    }
    finish();
    return std::move(result_);
  }

 private:
  void prepare_releases() {
    for (int p = 0; p < asg_.processor_count; ++p) {
      for (const sasa::Entry& e : asg_.bins[p]) {
        if (e.part == 2) {
          part2_[e.task_id] =
              Part2Info{p, e.wcet, e.period, e.deadline, e.phase};
          continue;
        }
        for (Tick k = 0;; ++k) {
          Tick r = e.phase + k * e.period;
          if (r >= horizon_) break;
          ReadyJob j{JobKey{e.task_id, k, e.part}, r, r + e.deadline, e.wcet,
                     e.wcet};
          releases_[p].emplace_back(r, j);
        }
      }
      std::stable_sort(releases_[p].begin(), releases_[p].end(),
                       [](const auto& a, const auto& b) {
                         return std::tie(a.first, a.second.key) <
                                std::tie(b.first, b.second.key);
                       });
    }
  }

  JobOutcome& outcome(const ReadyJob& j, int processor) {
    auto it = result_.outcomes.find(j.key);
    if (it == result_.outcomes.end()) {
      JobOutcome o;
      o.key = j.key;
      o.processor = processor;
      o.release = j.release;
      o.abs_deadline = j.abs_deadline;
      o.wcet = j.wcet;
      it = result_.outcomes.emplace(j.key, o).first;
    }
    return it->second;
  }

  void emit(Tick tick, int processor, const JobKey& key, Copy copy,
            EventKind kind) {
    result_.trace.events.push_back(
        TraceEvent{tick, processor, key, copy, kind});
  }

  void inject_faults(Tick t) {
    for (const pbft::FaultEvent& f : faults_) {
      if (f.time != t) continue;
      Proc& proc = procs_.at(f.processor);
      if (proc.crashed) continue;
      if (f.kind == pbft::FaultKind::Permanent) {
        close_run(t, f.processor);
        proc.crashed = t;
        proc.prev.reset();
        if (table_) {
          table_->mark_crashed(f.processor, t);
          for (const auto& [key, c] : table_->committed()) {
            if (c.primary_processor != f.processor) continue;
            auto it = result_.outcomes.find(key);
            bool done = it != result_.outcomes.end() &&
                        (it->second.status == JobStatus::CompletedPrimary ||
                         it->second.status == JobStatus::CompletedBackup ||
                         it->second.status == JobStatus::Missed);
            if (done) continue;
            activate_backup(key, c);
          }
        }
      } else {
        proc.transient_pending = true;
      }
    }
  }

  void activate_backup(const JobKey& key, const pbft::CommittedJob& c) {
    JobState& st = state_[key];
    if (st.backup_activated) return;
    st.backup_activated = true;
    // Materialize the outcome for jobs that never got to release.
    ReadyJob probe{key, c.primary.start, c.abs_deadline, 0, 0};
    outcome(probe, c.primary_processor);
    Proc& host = procs_.at(c.backup.processor);
    host.backups.push_back(BackupRun{c.backup.interval, key, 0, false});
    std::stable_sort(host.backups.begin(), host.backups.end(),
                     [](const BackupRun& a, const BackupRun& b) {
                       return std::tie(a.interval.start, a.key) <
                              std::tie(b.interval.start, b.key);
                     });
  }

  void do_releases(Tick t) {
    for (int p = 0; p < asg_.processor_count; ++p) {
      auto& timeline = releases_[p];
      auto& idx = release_idx_[p];
      while (idx < timeline.size() && timeline[idx].first <= t) {
        const ReadyJob& j = timeline[idx].second;
        outcome(j, p);
        emit(j.release, p, j.key, Copy::Primary, EventKind::Release);
        procs_[p].ready.push_back(j);
        ++idx;
      }
      auto& pend = procs_[p].pending;
      for (auto it = pend.begin(); it != pend.end();) {
        if (it->first <= t) {
          emit(it->second.release, p, it->second.key, Copy::Primary,
               EventKind::Release);
          procs_[p].ready.push_back(it->second);
          it = pend.erase(it);
        } else {
          ++it;
        }
      }
    }
  }

  void check_misses(Tick t) {
    for (int p = 0; p < asg_.processor_count; ++p) {
      auto& ready = procs_[p].ready;
      for (auto it = ready.begin(); it != ready.end();) {
        if (it->abs_deadline > t) {
          ++it;
          continue;
        }
        JobState& st = state_[it->key];
        if (!st.backup_activated) {
          emit(t, p, it->key, Copy::Primary, EventKind::Miss);
          outcome(*it, p).status = JobStatus::Missed;
          ++result_.misses;
        }
        // Backup-covered jobs complete via their reservation instead.
        if (procs_[p].prev && procs_[p].prev->key == it->key) {
          close_run(t, p);
          procs_[p].prev.reset();
        }
        it = ready.erase(it);
      }
    }
  }

  void close_run(Tick t, int p) {
    Proc& proc = procs_[p];
    if (!proc.run_owner) return;
    result_.runs.push_back(ExecRun{p,
                                   {proc.run_start, t},
                                   proc.run_owner->key,
                                   proc.run_owner->copy});
    proc.run_owner.reset();
  }

  void occupy(Tick t, int p, const Occupant& who) {
    Proc& proc = procs_[p];
    if (proc.run_owner && *proc.run_owner == who) return;
    close_run(t, p);
    proc.run_owner = who;
    proc.run_start = t;
  }

  void execute(Tick t, int p) {
    Proc& proc = procs_[p];
    if (proc.crashed) return;

    // An activated backup reservation owns its ticks outright.
    for (BackupRun& b : proc.backups) {
      if (!b.interval.contains(t) || b.executed >= b.interval.length())
        continue;
      if (proc.prev && proc.prev->copy == Copy::Primary)
        preempt_prev(t, p);
      if (!b.started) {
        emit(t, p, b.key, Copy::Backup, EventKind::Start);
        b.started = true;
      }
      occupy(t, p, Occupant{b.key, Copy::Backup});
      ++b.executed;
      ++proc.busy;
      ++result_.backup_ticks_executed;
      proc.prev = Occupant{b.key, Copy::Backup};
      if (b.executed == b.interval.length()) backup_complete(t + 1, p, b);
      return;
    }

    ReadyJob* choose = nullptr;
    for (ReadyJob& j : proc.ready) {
      if (j.release > t || j.remaining <= 0) continue;
      if (state_[j.key].backup_activated) continue;
      if (!choose || edf_key(j) < edf_key(*choose)) choose = &j;
    }
    if (!choose) {
      close_run(t, p);
      proc.prev.reset();
      return;
    }

    Occupant who{choose->key, Copy::Primary};
    if (proc.prev && !(*proc.prev == who)) preempt_prev(t, p);
    JobState& st = state_[choose->key];
    if (!st.has_run) {
      emit(t, p, choose->key, Copy::Primary, EventKind::Start);
      st.has_run = true;
      outcome(*choose, p).first_exec = t;
    } else if (!proc.prev || !(*proc.prev == who)) {
      emit(t, p, choose->key, Copy::Primary, EventKind::Resume);
    }
    if (proc.transient_pending) {
      st.corrupted = true;
      proc.transient_pending = false;
    }
    occupy(t, p, who);
    ++proc.busy;
    --choose->remaining;
    proc.prev = who;
    if (choose->remaining == 0) primary_complete(t + 1, p, *choose);
  }

  void preempt_prev(Tick t, int p) {
    Proc& proc = procs_[p];
    if (!proc.prev || proc.prev->copy != Copy::Primary) return;
    for (const ReadyJob& j : proc.ready) {
      if (j.key == proc.prev->key && j.remaining > 0) {
        emit(t, p, j.key, Copy::Primary, EventKind::Preempt);
        break;
      }
    }
  }

  // by value: the caller's reference dies when we erase from ready below
  void primary_complete(Tick completion, int p, ReadyJob job) {
    close_run(completion, p);
    procs_[p].prev.reset();
    JobState& st = state_[job.key];
    JobOutcome& o = outcome(job, p);
    auto& ready = procs_[p].ready;
    ready.erase(std::remove_if(ready.begin(), ready.end(),
                               [&](const ReadyJob& j) {
                                 return j.key == job.key;
                               }),
                ready.end());
    if (st.corrupted) {
      // Transient fault: the completion acceptance test fails here.
      bool recovered = false;
      if (table_) {
        auto it = table_->committed().find(job.key);
        if (it != table_->committed().end() && !it->second.backup_freed) {
          activate_backup(job.key, it->second);
          recovered = true;
        }
      }
      if (!recovered) {
        emit(completion, p, job.key, Copy::Primary, EventKind::Miss);
        o.status = JobStatus::Missed;
        ++result_.misses;
      }
      return;
    }
    emit(completion, p, job.key, Copy::Primary, EventKind::Complete);
    o.status = JobStatus::CompletedPrimary;
    o.completion = completion;
    if (table_) {
      auto it = table_->committed().find(job.key);
      if (it != table_->committed().end() && !it->second.backup_freed)
        table_->free_backup(job.key);
    }
    if (job.key.part == 1) chain_part2(completion, job);
  }

  void backup_complete(Tick completion, int p, const BackupRun& b) {
    close_run(completion, p);
    procs_[p].prev.reset();
    emit(completion, p, b.key, Copy::Backup, EventKind::Complete);
    ReadyJob probe{b.key, b.interval.start, completion, 0, 0};
    JobOutcome& o = outcome(probe, p);
    o.status = JobStatus::CompletedBackup;
    o.completion = completion;
    ++result_.recoveries;
    if (b.key.part == 1) {
      auto it = part2_.find(b.key.task_id);
      if (it != part2_.end()) {
        ReadyJob parent{b.key, 0, o.abs_deadline, 0, 0};
        chain_part2(completion, parent);
      }
    }
  }

  // Part-2 release at the part-1 completion tick, parent deadline kept.
  void chain_part2(Tick completion, const ReadyJob& part1) {
    auto it = part2_.find(part1.key.task_id);
    if (it == part2_.end()) return;
    const Part2Info& info = it->second;
    Tick parent_release = info.phase + part1.key.index * info.period;
    Tick abs_deadline = parent_release + info.deadline;
    JobKey key2{part1.key.task_id, part1.key.index, 2};
    ReadyJob j{key2, completion, abs_deadline, info.wcet, info.wcet};
    JobOutcome& o = outcome(j, info.processor);
    if (completion >= abs_deadline) {
      // Chain violation: no time left for part 2.
      emit(completion, info.processor, key2, Copy::Primary, EventKind::Miss);
      o.status = JobStatus::Missed;
      ++result_.misses;
      return;
    }
    if (completion >= horizon_) return;  // beyond the simulated window
    procs_[info.processor].pending.emplace_back(completion, j);
  }

  void finish() {
    for (int p = 0; p < asg_.processor_count; ++p)
      close_run(procs_[p].crashed ? *procs_[p].crashed : horizon_, p);
    // Deadlines landing exactly on the horizon are past the last
    // check_misses call; settle them here.
    for (int p = 0; p < asg_.processor_count; ++p) {
      auto settle = [&](const ReadyJob& j) {
        if (j.abs_deadline > horizon_ || j.remaining <= 0) return;
        if (state_[j.key].backup_activated) return;
        emit(j.abs_deadline, p, j.key, Copy::Primary, EventKind::Miss);
        outcome(j, p).status = JobStatus::Missed;
        ++result_.misses;
      };
      for (const ReadyJob& j : procs_[p].ready) settle(j);
      for (const auto& [at, j] : procs_[p].pending) settle(j);
    }
    for (auto& [key, o] : result_.outcomes)
      if (o.status == JobStatus::Pending) o.status = JobStatus::Unfinished;
    result_.busy_ticks.clear();
    for (const Proc& proc : procs_) result_.busy_ticks.push_back(proc.busy);
  }

  const sasa::Assignment& asg_;
  Tick horizon_;
  pbft::ReservationTable* table_;
  std::vector<pbft::FaultEvent> faults_;
  std::vector<Proc> procs_;
  std::map<int, std::vector<std::pair<Tick, ReadyJob>>> releases_;
  std::map<int, std::size_t> release_idx_;
  std::map<int, Part2Info> part2_;
  std::map<JobKey, JobState> state_;
  RunResult result_;
};

}  // namespace

const ReadyJob* pick(const std::vector<ReadyJob>& ready) {
  const ReadyJob* best = nullptr;
  for (const ReadyJob& j : ready)
    if (!best || edf_key(j) < edf_key(*best)) best = &j;
  return best;
}

RunResult run_core(const sasa::Assignment& assignment, Tick horizon,
                   const std::vector<pbft::FaultEvent>* faults,
                   pbft::ReservationTable* table) {
  return Engine(assignment, horizon, faults, table).run();
}

ScheduleTrace run_partitioned(const sasa::Assignment& assignment,
                              Tick horizon) {
  return run_core(assignment, horizon, nullptr, nullptr).trace;
}

bool exact_schedulable(const std::vector<sasa::Entry>& entries,
                       Tick horizon_cap) {
  if (entries.empty()) return true;
  // Synchronous release; a part-2 portion is released at its earliest
  // possible offset (part-1 wcet) with the parent deadline kept.
  sasa::Assignment pseudo;
  pseudo.processor_count = 1;
  pseudo.threshold = Rat(1);
  pseudo.bins.resize(1);
  Tick hyper = 1;
  for (const sasa::Entry& e : entries) {
    Tick g = std::gcd(hyper, e.period);
    if (e.period / g > horizon_cap / hyper)
      throw Error(ErrorKind::CapExceeded,
                  "hyperperiod exceeds cap " + std::to_string(horizon_cap));
    hyper = hyper / g * e.period;
    Tick offset = e.part == 2 ? e.full_wcet - e.wcet : 0;
    Tick rel_deadline = e.deadline - offset;
    if (rel_deadline < e.wcet) return false;  // no window at all
    pseudo.bins[0].push_back(sasa::Entry{e.task_id, e.period, rel_deadline,
                                         offset, e.wcet, e.wcet, 0});
  }
  RunResult r = run_core(pseudo, hyper, nullptr, nullptr);
  return r.misses == 0;
}

}  // namespace rtsched::edf
