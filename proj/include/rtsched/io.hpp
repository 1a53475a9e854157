#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtsched/edf.hpp"
#include "rtsched/pbft.hpp"
#include "rtsched/sasa.hpp"
#include "rtsched/sim.hpp"
#include "rtsched/taskmodel.hpp"

// File formats: JSON task sets and fault scenarios, CSV traces, JSON
// metrics/assignments, SVG Gantt charts. UTF-8, LF newlines. Processor
// indices are 1-based in every external document.
namespace rtsched::io {

struct Scenario {
  int processors = 1;
  std::optional<Rat> threshold;
  std::vector<pbft::FaultEvent> events;

  bool operator==(const Scenario& o) const;
};

// Throws Error{Parse} with position info on syntax errors and
// Error{Validation} naming the task and rule on invariant violations.
TaskSet parse_taskset(const std::string& text);
std::string serialize_taskset(const TaskSet& set);

Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& scenario);

// CSV, columns (tick, processor, task_id, job_index, copy, event),
// rows sorted by (tick, processor); byte-deterministic.
std::string serialize_trace(const edf::ScheduleTrace& trace);

std::string serialize_assignment(const sasa::Assignment& assignment);
std::string serialize_metrics(const sim::Metrics& metrics);

// One lane per processor, one rectangle per contiguous execution run;
// fill classes distinguish primary / backup / split-part-2 work.
std::string render_gantt(const edf::ScheduleTrace& trace,
                         const sasa::Assignment& assignment);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace rtsched::io
