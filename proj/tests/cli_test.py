#!/usr/bin/env python3
"""End-to-end exit-code and output checks for the rtsched CLI."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

CLI = sys.argv[1]
failures = []


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def expect(name, result, code, stdout_has=()):
    ok = result.returncode == code
    for needle in stdout_has:
        if needle not in result.stdout:
            ok = False
    if not ok:
        failures.append(
            f"{name}: rc={result.returncode} (want {code})\n"
            f"  stdout: {result.stdout!r}\n  stderr: {result.stderr!r}"
        )


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    four = tmp / "four.json"
    four.write_text(json.dumps({"tasks": [
        {"id": 1, "period": 4, "wcet": 1},
        {"id": 2, "period": 5, "wcet": 1},
        {"id": 3, "period": 6, "wcet": 2},
        {"id": 4, "period": 8, "wcet": 3},
    ]}))
    split_set = tmp / "split.json"
    split_set.write_text(json.dumps({"tasks": [
        {"id": 1, "period": 10, "wcet": 4},
        {"id": 2, "period": 10, "wcet": 5},
        {"id": 3, "period": 10, "wcet": 8},
        {"id": 4, "period": 10, "wcet": 3},
    ]}))
    overload = tmp / "overload.json"
    overload.write_text(json.dumps({"tasks": [
        {"id": 1, "period": 4, "wcet": 4},
        {"id": 2, "period": 4, "wcet": 4},
        {"id": 3, "period": 4, "wcet": 4},
    ]}))
    scenario = tmp / "fault.json"
    scenario.write_text(json.dumps({
        "processors": 2,
        "events": [{"time": 0, "processor": 1, "kind": "permanent"}],
    }))

    # gen: single-task budget, determinism, bad target
    out1, out2 = tmp / "g1.json", tmp / "g2.json"
    r = run("gen", "--count", "1", "--util", "1/2", "--periods", "10",
            "--seed", "1", "--out", str(out1))
    expect("gen single", r, 0, ["1/2"])
    task = json.loads(out1.read_text())["tasks"][0]
    if (task["wcet"], task["period"]) != (5, 10):
        failures.append(f"gen single: got task {task}")
    run("gen", "--count", "1", "--util", "1/2", "--periods", "10",
        "--seed", "1", "--out", str(out2))
    if out1.read_text() != out2.read_text():
        failures.append("gen determinism: files differ")
    expect("gen bad util", run("gen", "--count", "2", "--util", "3",
                               "--periods", "10", "--out", str(tmp / "x.json")),
           3)

    # partition
    expect("partition sasa", run("partition", "--in", str(four),
                                 "--procs", "2"),
           0, ["P1: 47/60", "P2: 3/8"])
    expect("partition ff infeasible",
           run("partition", "--in", str(split_set), "--procs", "2",
               "--algo", "ff"), 1)
    expect("partition uth zero",
           run("partition", "--in", str(four), "--procs", "2", "--uth", "0"),
           3)
    asg_out = tmp / "asg.json"
    expect("partition split out",
           run("partition", "--in", str(split_set), "--procs", "2",
               "--out", str(asg_out)), 0, ["splits: 1"])
    if "\"part\": 1" not in asg_out.read_text():
        failures.append("partition split out: no part-1 entry in file")

    # simulate
    trace_out = tmp / "trace.csv"
    gantt_out = tmp / "gantt.svg"
    expect("simulate partitioned",
           run("simulate", "--in", str(four), "--procs", "2",
               "--trace", str(trace_out), "--gantt", str(gantt_out)),
           0, ['"deadline_misses": 0'])
    if not trace_out.read_text().startswith(
            "tick,processor,task_id,job_index,copy,event"):
        failures.append("simulate: trace header wrong")
    if "<svg" not in gantt_out.read_text():
        failures.append("simulate: gantt is not SVG")
    expect("simulate missing input",
           run("simulate", "--in", str(tmp / "nope.json"), "--procs", "2"), 3)
    expect("simulate ft faults",
           run("simulate", "--in", str(four), "--procs", "2", "--mode", "ft",
               "--faults", str(scenario)),
           0, ['"protected_misses": 0'])
    r = run("simulate", "--in", str(four), "--procs", "2", "--mode", "ft",
            "--faults", str(scenario))
    recoveries = json.loads(r.stdout)["recoveries"]
    if recoveries <= 0:
        failures.append(f"simulate ft: expected recoveries > 0, got {recoveries}")

    # sweep
    expect("sweep clean", run("sweep", "--in", str(four), "--procs", "2"),
           0, ["single-fault safe"])
    expect("sweep wrong mode",
           run("sweep", "--in", str(four), "--procs", "2",
               "--mode", "partitioned"), 3)
    expect("sweep cap",
           run("sweep", "--in", str(four), "--procs", "2",
               "--horizon", "1000000"), 3)

    # check
    expect("check feasible", run("check", "--in", str(four), "--procs", "2"),
           0, ["verdict: schedulable"])
    expect("check overloaded",
           run("check", "--in", str(overload), "--procs", "2"), 1)
    expect("check split skips dbf",
           run("check", "--in", str(split_set), "--procs", "2"),
           0, ["skipped(split portions)"])

    # usage surface
    expect("no subcommand", run(), 3)
    expect("help", run("--help"), 0)

if failures:
    print("CLI test failures:")
    for f in failures:
        print(" -", f)
    sys.exit(1)
print("cli: all checks passed")
