"""
Comparing scheduling policies
=============================

Three ways to run the same queue under one node power budget:

* naive time-sharing - every job runs alone with the power budget split
  evenly between CPU and GPU;
* optimal time-sharing - still one job at a time, but each job gets its
  best CPU/GPU cap split;
* co-scheduling - pairs share the node with tuned partitions and caps.

Decisions come from a model (here: the exact oracle); elapsed times are
always oracle measurements.  The estimation error report at the end
compares predicted against measured per set, which is what separates a
trained predictor from ground truth.
"""

from cosched.core import default_space
from cosched.simenv import (
    OracleParams,
    OracleSlowdownModel,
    estimation_error_report,
    generate_workload,
    mixed_archetypes,
    run_policy,
)

space = default_space(350.0)
params = OracleParams()
oracle = OracleSlowdownModel(params)

queue = tuple(s.job for s in generate_workload(11, mixed_archetypes(8)))
print(f"workload: {len(queue)} jobs, budget {space.p_total:.0f} W\n")

totals = {}
for policy in ("naive-timeshare", "opt-timeshare", "coschedule"):
    result = run_policy(policy, queue, space, oracle, params)
    totals[policy] = result.total_measured_s
    print(f"{policy:16s} total {result.total_measured_s:7.1f} s")
    if policy == "coschedule":
        for row in result.rows:
            mode = "co-run" if row.corun else "solo"
            hc = row.configs[0]
            print(f"    [{mode:6s}] {'+'.join(row.job_ids):46s} "
                  f"caps {hc.cpu_cap:.0f}/{hc.gpu_cap:.0f} W "
                  f"measured {row.measured_s:6.1f} s")

naive, cosched = totals["naive-timeshare"], totals["coschedule"]
print(f"\nco-scheduling beats naive time-sharing by "
      f"{100 * (naive - cosched) / naive:.1f}%")

report = estimation_error_report(oracle, params, queue, space)
print(f"estimation error with the oracle as the model: "
      f"{report.total_error_pct:.2f}% (exact predictions)")
