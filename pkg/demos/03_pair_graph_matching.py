"""
From pair decisions to a schedule
=================================

Scheduling a window of W jobs means choosing a perfect matching on the
complete pair graph.  Each edge weight is the pair's best dispatch time:
the faster of (a) the best co-run configuration found by exhaustive
search and (b) the sum of the two jobs' best exclusive runs.  Edmonds'
blossom algorithm then finds the minimum-weight perfect matching, and
matched pairs flagged "solo" split into singleton sets.

The oracle plays the model here, so every number is exact and the result
provably optimal.
"""

from cosched.core import SchedulingParams, default_space
from cosched.hwopt import decide_pair
from cosched.matcher import brute_force_matching, min_weight_perfect_matching
from cosched.scheduler import SchedulerInput, build_graph, predicted_makespan, schedule
from cosched.simenv import OracleParams, OracleSlowdownModel, generate_workload

space = default_space(350.0)
params = OracleParams()
oracle = OracleSlowdownModel(params)

specs = generate_workload(
    7, ["cpu-bound", "gpu-bound", "memory-bound", "balanced",
        "cpu-bound", "gpu-bound"])
queue = tuple(s.job for s in specs)
print("queue:")
for s in specs:
    print(f"  {s.job.job_id:22s} baseline {s.job.base_time:5.1f} s")

# One pair decision, up close.
decision = decide_pair(oracle, queue[0], queue[1], space)
hc = decision.corun_config
print(f"\n{queue[0].job_id} + {queue[1].job_id}:")
print(f"  best co-run: cores {hc.cpu_partition}, GPCs {hc.gpu_partition}, "
      f"caps {hc.cpu_cap:.0f}/{hc.gpu_cap:.0f} W -> {decision.corun_time_s:.1f} s")
print(f"  best time-sharing: {decision.solo_time_s:.1f} s")
print(f"  decision: {'co-run' if decision.corun_chosen else 'time-share'}")

# The full graph and its optimal matching.
inp = SchedulerInput(queue, space, SchedulingParams(window=len(queue)), oracle)
graph = build_graph(inp)
pairs = min_weight_perfect_matching(graph)
_, brute_total = brute_force_matching(graph)
print(f"\nmatching over {len(graph.decisions)} edges: {pairs}")

plan = schedule(inp)
total = predicted_makespan(plan, oracle, space)
print(f"schedule total {total:.1f} s (brute-force optimum {brute_total:.1f} s)")
for js, cfgs, flag in zip(plan.job_sets, plan.configs, plan.corun_flags):
    names = " + ".join(j.job_id for j in js.jobs)
    mode = "co-run" if flag else "solo"
    hc = cfgs[0]
    print(f"  [{mode:6s}] {names:46s} caps {hc.cpu_cap:.0f}/{hc.gpu_cap:.0f} W")
