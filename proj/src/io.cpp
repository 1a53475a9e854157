#include "rtsched/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace rtsched::io {

using nlohmann::json;

bool Scenario::operator==(const Scenario& o) const {
  if (processors != o.processors || threshold != o.threshold ||
      events.size() != o.events.size())
    return false;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].time != o.events[i].time ||
        events[i].processor != o.events[i].processor ||
        events[i].kind != o.events[i].kind)
      return false;
  }
  return true;
}

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("invalid JSON: ") + e.what());
  }
}

Tick get_tick(const json& obj, const std::string& field, bool required,
              Tick fallback, const std::string& ctx) {
  if (!obj.contains(field)) {
    if (required)
      throw Error(ErrorKind::Parse, ctx + ": missing field '" + field + "'");
    return fallback;
  }
  const json& v = obj.at(field);
  if (!v.is_number_integer())
    throw Error(ErrorKind::Parse, ctx + ": field '" + field +
                                      "' must be an integer");
  return v.get<Tick>();
}

Rat get_rational(const json& v, const std::string& ctx) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rat(v.get<std::int64_t>());
  throw Error(ErrorKind::Parse,
              ctx + ": expected an integer or a \"num/den\" string");
}

const char* copy_label(const JobKey& key, Copy copy) {
  if (copy == Copy::Backup) return "backup";
  if (key.part == 1) return "part1";
  if (key.part == 2) return "part2";
  return "primary";
}

const char* event_label(edf::EventKind kind) {
  switch (kind) {
    case edf::EventKind::Release: return "release";
    case edf::EventKind::Start: return "start";
    case edf::EventKind::Preempt: return "preempt";
    case edf::EventKind::Resume: return "resume";
    case edf::EventKind::Complete: return "complete";
    case edf::EventKind::Miss: return "miss";
  }
  return "?";
}

}  // namespace

TaskSet parse_taskset(const std::string& text) {
  json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("tasks") || !doc["tasks"].is_array())
    throw Error(ErrorKind::Parse, "task-set document needs a 'tasks' array");
  TaskSet set;
  if (doc.contains("name")) set.name = doc["name"].get<std::string>();
  for (const json& jt : doc["tasks"]) {
    Task t;
    t.id = static_cast<int>(get_tick(jt, "id", true, 0, "task"));
    t.period = get_tick(jt, "period", true, 0,
                        "task " + std::to_string(t.id));
    t.wcet = get_tick(jt, "wcet", true, 0, "task " + std::to_string(t.id));
    t.deadline = get_tick(jt, "deadline", false, t.period,
                          "task " + std::to_string(t.id));
    t.phase = get_tick(jt, "phase", false, 0, "task " + std::to_string(t.id));
    set.tasks.push_back(t);
  }
  validate(set);
  return set;
}

std::string serialize_taskset(const TaskSet& set) {
  json doc;
  doc["name"] = set.name;
  doc["tasks"] = json::array();
  for (const Task& t : set.tasks) {
    doc["tasks"].push_back(json{{"id", t.id},
                                {"period", t.period},
                                {"wcet", t.wcet},
                                {"deadline", t.deadline},
                                {"phase", t.phase}});
  }
  return doc.dump(2) + "\n";
}

Scenario parse_scenario(const std::string& text) {
  json doc = parse_json(text);
  if (!doc.is_object())
    throw Error(ErrorKind::Parse, "scenario document must be an object");
  Scenario sc;
  sc.processors =
      static_cast<int>(get_tick(doc, "processors", true, 0, "scenario"));
  if (sc.processors < 1)
    throw Error(ErrorKind::Validation, "scenario: processors must be >= 1");
  if (doc.contains("threshold"))
    sc.threshold = get_rational(doc["threshold"], "scenario threshold");
  if (doc.contains("events")) {
    if (!doc["events"].is_array())
      throw Error(ErrorKind::Parse, "scenario: 'events' must be an array");
    for (const json& je : doc["events"]) {
      pbft::FaultEvent ev;
      ev.time = get_tick(je, "time", true, 0, "fault event");
      // External documents use 1-based processor indices.
      Tick proc = get_tick(je, "processor", true, 0, "fault event");
      if (proc < 1 || proc > sc.processors)
        throw Error(ErrorKind::Validation,
                    "fault event: processor " + std::to_string(proc) +
                        " out of range 1.." + std::to_string(sc.processors));
      ev.processor = static_cast<int>(proc) - 1;
      if (!je.contains("kind") || !je["kind"].is_string())
        throw Error(ErrorKind::Parse, "fault event: missing 'kind'");
      std::string kind = je["kind"].get<std::string>();
      if (kind == "permanent")
        ev.kind = pbft::FaultKind::Permanent;
      else if (kind == "transient")
        ev.kind = pbft::FaultKind::Transient;
      else
        throw Error(ErrorKind::Parse,
                    "fault event: kind must be permanent or transient");
      if (ev.time < 0)
        throw Error(ErrorKind::Validation,
                    "fault event: time must be non-negative");
      sc.events.push_back(ev);
    }
  }
  return sc;
}

std::string serialize_scenario(const Scenario& sc) {
  json doc;
  doc["processors"] = sc.processors;
  if (sc.threshold) doc["threshold"] = to_string(*sc.threshold);
  doc["events"] = json::array();
  for (const pbft::FaultEvent& ev : sc.events) {
    doc["events"].push_back(
        json{{"time", ev.time},
             {"processor", ev.processor + 1},
             {"kind", ev.kind == pbft::FaultKind::Permanent ? "permanent"
                                                            : "transient"}});
  }
  return doc.dump(2) + "\n";
}

std::string serialize_trace(const edf::ScheduleTrace& trace) {
  std::vector<edf::TraceEvent> events = trace.events;
  std::stable_sort(events.begin(), events.end(),
                   [](const edf::TraceEvent& a, const edf::TraceEvent& b) {
                     return std::tie(a.tick, a.processor) <
                            std::tie(b.tick, b.processor);
                   });
  std::ostringstream out;
  out << "tick,processor,task_id,job_index,copy,event\n";
  for (const edf::TraceEvent& e : events) {
    out << e.tick << ',' << e.processor + 1 << ',' << e.job.task_id << ','
        << e.job.index << ',' << copy_label(e.job, e.copy) << ','
        << event_label(e.kind) << '\n';
  }
  return out.str();
}

std::string serialize_assignment(const sasa::Assignment& asg) {
  json doc;
  doc["processor_count"] = asg.processor_count;
  doc["threshold"] = to_string(asg.threshold);
  doc["processors"] = json::array();
  for (int p = 0; p < asg.processor_count; ++p) {
    json jp;
    jp["index"] = p + 1;
    jp["utilization"] = to_string(asg.util(p));
    jp["entries"] = json::array();
    for (const sasa::Entry& e : asg.bins[p]) {
      jp["entries"].push_back(json{{"task", e.task_id},
                                   {"part", e.part},
                                   {"wcet", e.wcet},
                                   {"period", e.period},
                                   {"deadline", e.deadline},
                                   {"phase", e.phase}});
    }
    doc["processors"].push_back(jp);
  }
  return doc.dump(2) + "\n";
}

std::string serialize_metrics(const sim::Metrics& m) {
  json doc;
  doc["horizon"] = m.horizon;
  doc["committed_jobs"] = m.committed_jobs;
  doc["rejected_jobs"] = m.rejected_jobs;
  doc["unprotected_jobs"] = m.unprotected_jobs;
  doc["deadline_misses"] = m.deadline_misses;
  doc["protected_misses"] = m.protected_misses;
  doc["recoveries"] = m.recoveries;
  doc["backup_ticks_executed"] = m.backup_ticks_executed;
  doc["total_backup_reservations"] = m.total_backup_reservations;
  doc["overloaded_backup_reservations"] = m.overloaded_backup_reservations;
  doc["backups_unfreed"] = m.backups_unfreed;
  doc["busy_fraction"] = json::array();
  for (const Rat& r : m.busy_fraction)
    doc["busy_fraction"].push_back(to_string(r));
  return doc.dump(2) + "\n";
}

std::string render_gantt(const edf::ScheduleTrace& trace,
                         const sasa::Assignment& asg) {
  // Rebuild contiguous runs per processor from start/resume and
  // preempt/complete/miss pairs.
  struct Rect {
    int processor;
    Interval iv;
    JobKey job;
    Copy copy;
  };
  std::vector<Rect> rects;
  struct Open {
    Tick since;
    JobKey job;
    Copy copy;
  };
  std::map<int, Open> open;
  Tick horizon = 0;
  std::vector<edf::TraceEvent> events = trace.events;
  std::stable_sort(events.begin(), events.end(),
                   [](const edf::TraceEvent& a, const edf::TraceEvent& b) {
                     return a.tick < b.tick;
                   });
  for (const edf::TraceEvent& e : events) {
    horizon = std::max(horizon, e.tick);
    switch (e.kind) {
      case edf::EventKind::Start:
      case edf::EventKind::Resume: {
        auto it = open.find(e.processor);
        if (it != open.end()) {
          rects.push_back(Rect{e.processor, {it->second.since, e.tick},
                               it->second.job, it->second.copy});
          open.erase(it);
        }
        open[e.processor] = Open{e.tick, e.job, e.copy};
        break;
      }
      case edf::EventKind::Preempt:
      case edf::EventKind::Complete: {
        auto it = open.find(e.processor);
        if (it != open.end() && it->second.job == e.job &&
            it->second.copy == e.copy) {
          rects.push_back(Rect{e.processor, {it->second.since, e.tick},
                               e.job, e.copy});
          open.erase(it);
        }
        break;
      }
      default:
        break;
    }
  }
  for (const auto& [p, o] : open)
    rects.push_back(Rect{p, {o.since, horizon}, o.job, o.copy});
  std::stable_sort(rects.begin(), rects.end(),
                   [](const Rect& a, const Rect& b) {
                     return std::tie(a.processor, a.iv.start) <
                            std::tie(b.processor, b.iv.start);
                   });

  const int px = 12, lane = 28, left = 40, top = 10;
  const int m = asg.processor_count;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << left + horizon * px + 10 << "\" height=\"" << top + m * lane + 20
      << "\">\n";
  svg << "<style>.primary{fill:#4c78a8}.part1{fill:#4c78a8}"
         ".part2{fill:#72b7b2}.backup{fill:#e45756}"
         "rect{stroke:#333;stroke-width:0.5}"
         "text{font-family:monospace;font-size:10px}</style>\n";
  for (int p = 0; p < m; ++p) {
    int y = top + p * lane;
    svg << "<text x=\"4\" y=\"" << y + 16 << "\">P" << p + 1 << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << y + lane - 4 << "\" x2=\""
        << left + horizon * px << "\" y2=\"" << y + lane - 4
        << "\" stroke=\"#999\"/>\n";
  }
  for (const Rect& r : rects) {
    int y = top + r.processor * lane;
    svg << "<rect class=\"" << copy_label(r.job, r.copy) << "\" x=\""
        << left + r.iv.start * px << "\" y=\"" << y << "\" width=\""
        << r.iv.length() * px << "\" height=\"" << lane - 8 << "\"/>\n";
    svg << "<text x=\"" << left + r.iv.start * px + 2 << "\" y=\"" << y + 14
        << "\">" << r.job.task_id << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Parse, "cannot write file: " + path);
  out << content;
}

}  // namespace rtsched::io
