// Python surface: task-set generation, partitioning, schedulability tests,
// simulation, fault sweeps, and serialization. Rationals cross the boundary
// as "num/den" strings to keep the exact-arithmetic contract.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "rtsched/edf.hpp"
#include "rtsched/io.hpp"
#include "rtsched/oracle.hpp"
#include "rtsched/sasa.hpp"
#include "rtsched/sim.hpp"
#include "rtsched/taskmodel.hpp"

namespace py = pybind11;
using namespace rtsched;

namespace {

sasa::Assignment partition(const TaskSet& set, int procs,
                           const std::string& threshold,
                           const std::string& algo) {
  Rat uth = parse_rational(threshold);
  if (algo == "sasa") return sasa::assign(set, procs, uth);
  if (algo == "ff") return sasa::assign_first_fit(set, procs, uth);
  if (algo == "bf") return sasa::assign_best_fit(set, procs, uth);
  throw Error(ErrorKind::Usage, "unknown algorithm: " + algo);
}

std::vector<pbft::FaultEvent> to_faults(
    const std::vector<py::tuple>& events) {
  std::vector<pbft::FaultEvent> faults;
  for (const py::tuple& t : events) {
    if (t.size() != 3)
      throw Error(ErrorKind::Usage,
                  "fault events are (time, processor, 'permanent'|'transient')");
    pbft::FaultEvent ev;
    ev.time = t[0].cast<Tick>();
    ev.processor = t[1].cast<int>();
    std::string kind = t[2].cast<std::string>();
    if (kind == "permanent")
      ev.kind = pbft::FaultKind::Permanent;
    else if (kind == "transient")
      ev.kind = pbft::FaultKind::Transient;
    else
      throw Error(ErrorKind::Usage, "unknown fault kind: " + kind);
    faults.push_back(ev);
  }
  return faults;
}

sim::SimConfig make_config(const TaskSet& set, int procs,
                           const std::string& mode,
                           const std::string& threshold,
                           std::optional<Tick> horizon,
                           const std::string& backup_ratio,
                           const std::vector<py::tuple>& faults) {
  sim::SimConfig cfg;
  cfg.taskset = set;
  cfg.processor_count = procs;
  cfg.threshold = parse_rational(threshold);
  if (mode == "partitioned")
    cfg.mode = sim::Mode::Partitioned;
  else if (mode == "ft")
    cfg.mode = sim::Mode::Ft;
  else
    throw Error(ErrorKind::Usage, "unknown mode: " + mode);
  cfg.horizon = horizon;
  cfg.backup_ratio = parse_rational(backup_ratio);
  cfg.faults = to_faults(faults);
  return cfg;
}

py::dict metrics_dict(const sim::Metrics& m) {
  py::dict d;
  d["horizon"] = m.horizon;
  d["committed_jobs"] = m.committed_jobs;
  d["rejected_jobs"] = m.rejected_jobs;
  d["unprotected_jobs"] = m.unprotected_jobs;
  d["deadline_misses"] = m.deadline_misses;
  d["protected_misses"] = m.protected_misses;
  d["recoveries"] = m.recoveries;
  d["backup_ticks_executed"] = m.backup_ticks_executed;
  d["total_backup_reservations"] = m.total_backup_reservations;
  d["overloaded_backup_reservations"] = m.overloaded_backup_reservations;
  d["backups_unfreed"] = m.backups_unfreed;
  py::list busy;
  for (const Rat& r : m.busy_fraction) busy.append(to_string(r));
  d["busy_fraction"] = busy;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Partitioned real-time scheduling simulator with primary-backup "
            "fault tolerance";

  py::register_exception<Error>(m, "SchedulingError");

  py::class_<Task>(m, "Task")
      .def(py::init([](int id, Tick period, Tick wcet, Tick deadline,
                       Tick phase) {
             Task t{id, period, wcet, deadline < 0 ? period : deadline, phase};
             validate(t);
             return t;
           }),
           py::arg("id"), py::arg("period"), py::arg("wcet"),
           py::arg("deadline") = -1, py::arg("phase") = 0)
      .def_readonly("id", &Task::id)
      .def_readonly("period", &Task::period)
      .def_readonly("wcet", &Task::wcet)
      .def_readonly("deadline", &Task::deadline)
      .def_readonly("phase", &Task::phase)
      .def("__eq__", [](const Task& a, const Task& b) { return a == b; })
      .def("__repr__", [](const Task& t) {
        return "Task(id=" + std::to_string(t.id) +
               ", period=" + std::to_string(t.period) +
               ", wcet=" + std::to_string(t.wcet) + ")";
      });

  py::class_<TaskSet>(m, "TaskSet")
      .def(py::init([](std::vector<Task> tasks, std::string name) {
             TaskSet set{std::move(tasks), std::move(name)};
             validate(set);
             return set;
           }),
           py::arg("tasks"), py::arg("name") = "")
      .def_readonly("tasks", &TaskSet::tasks)
      .def_readonly("name", &TaskSet::name)
      .def("__len__", [](const TaskSet& s) { return s.tasks.size(); })
      .def("__eq__",
           [](const TaskSet& a, const TaskSet& b) { return a == b; });

  py::class_<sasa::Entry>(m, "Entry")
      .def_readonly("task_id", &sasa::Entry::task_id)
      .def_readonly("period", &sasa::Entry::period)
      .def_readonly("deadline", &sasa::Entry::deadline)
      .def_readonly("phase", &sasa::Entry::phase)
      .def_readonly("wcet", &sasa::Entry::wcet)
      .def_readonly("full_wcet", &sasa::Entry::full_wcet)
      .def_readonly("part", &sasa::Entry::part);

  py::class_<sasa::Assignment>(m, "Assignment")
      .def_readonly("processor_count", &sasa::Assignment::processor_count)
      .def_readonly("bins", &sasa::Assignment::bins)
      .def("utilization",
           [](const sasa::Assignment& a, int p) { return to_string(a.util(p)); },
           py::arg("processor"))
      .def("split_count", &sasa::Assignment::split_count)
      .def("threshold", [](const sasa::Assignment& a) {
        return to_string(a.threshold);
      });

  m.def("generate",
        [](int count, const std::string& util, std::vector<Tick> periods,
           std::uint64_t seed) {
          GenParams p{count, parse_rational(util), std::move(periods), seed};
          return generate(p);
        },
        py::arg("count"), py::arg("util"), py::arg("periods"),
        py::arg("seed") = 0);
  m.def("sort_tasks", &sort_tasks, py::arg("taskset"));
  m.def("hyperperiod", &hyperperiod, py::arg("taskset"),
        py::arg("cap") = kDefaultHorizonCap);
  m.def("total_utilization",
        [](const TaskSet& s) { return to_string(total_utilization(s)); },
        py::arg("taskset"));

  m.def("partition", &partition, py::arg("taskset"), py::arg("processors"),
        py::arg("threshold") = "1", py::arg("algo") = "sasa");
  m.def("verify_assignment", &sasa::verify, py::arg("assignment"));

  m.def("exact_schedulable",
        [](const sasa::Assignment& asg, int processor, Tick cap) {
          return edf::exact_schedulable(asg.bins.at(processor), cap);
        },
        py::arg("assignment"), py::arg("processor"),
        py::arg("cap") = kDefaultHorizonCap);
  m.def("dbf_schedulable",
        [](const TaskSet& set, Tick cap) -> py::object {
          oracle::OracleVerdict v = oracle::dbf_schedulable(set.tasks, cap);
          if (v.schedulable) return py::make_tuple(true, py::none());
          return py::make_tuple(
              false, py::make_tuple(v.witness->deadline, v.witness->demand,
                                    v.witness->supply));
        },
        py::arg("taskset"), py::arg("cap") = kDefaultHorizonCap);

  m.def("simulate",
        [](const TaskSet& set, int procs, const std::string& mode,
           const std::string& threshold, std::optional<Tick> horizon,
           const std::string& backup_ratio,
           const std::vector<py::tuple>& faults, bool gantt) {
          sim::SimResult r = sim::run(make_config(
              set, procs, mode, threshold, horizon, backup_ratio, faults));
          py::dict d;
          d["metrics"] = metrics_dict(r.metrics);
          d["trace_csv"] = io::serialize_trace(r.trace);
          if (gantt) d["gantt_svg"] = io::render_gantt(r.trace, r.assignment);
          return d;
        },
        py::arg("taskset"), py::arg("processors"),
        py::arg("mode") = "partitioned", py::arg("threshold") = "1",
        py::arg("horizon") = std::nullopt, py::arg("backup_ratio") = "1",
        py::arg("faults") = std::vector<py::tuple>{},
        py::arg("gantt") = false);

  m.def("sweep_single_faults",
        [](const TaskSet& set, int procs, const std::string& threshold,
           std::optional<Tick> horizon, const std::string& backup_ratio) {
          sim::SweepReport report = sim::sweep_single_faults(make_config(
              set, procs, "ft", threshold, horizon, backup_ratio, {}));
          py::dict d;
          d["clean"] = report.clean;
          d["runs"] = report.runs;
          py::list fails;
          for (const auto& f : report.failures)
            fails.append(py::make_tuple(f.processor, f.fault_tick,
                                        f.job.task_id, f.job.index));
          d["failures"] = fails;
          return d;
        },
        py::arg("taskset"), py::arg("processors"), py::arg("threshold") = "1",
        py::arg("horizon") = std::nullopt, py::arg("backup_ratio") = "1");

  m.def("compare_partitioners",
        [](const TaskSet& set, int procs, const std::string& threshold) {
          py::list rows;
          for (const sim::PartitionerRow& r : sim::compare_partitioners(
                   set, procs, parse_rational(threshold))) {
            py::dict d;
            d["algo"] = r.algo;
            d["feasible"] = r.feasible;
            d["splits"] = r.splits;
            d["max_util"] = to_string(r.max_util);
            d["error"] = r.error;
            rows.append(d);
          }
          return rows;
        },
        py::arg("taskset"), py::arg("processors"), py::arg("threshold") = "1");

  m.def("parse_taskset", &io::parse_taskset, py::arg("text"));
  m.def("serialize_taskset", &io::serialize_taskset, py::arg("taskset"));
}
