"""
The hardware configuration search space
=======================================

A co-scheduled pair shares one node: CPU cores and GPU GPCs are split
between the two jobs, and each device gets a power cap.  This script
walks the legal knob values, the co-run configurations a search visits,
and how one configuration becomes a normalized model input.
"""

import numpy as np

from cosched.core import (
    JobProfile,
    default_space,
    enumerate_corun_configs,
    enumerate_solo_splits,
    normalize_input,
    solo_config,
)

# Two node budgets are standard: 350 W and 400 W, under a 500 W ceiling.
for p_total in (350.0, 400.0):
    space = default_space(p_total)
    configs = enumerate_corun_configs(space)
    splits = enumerate_solo_splits(space)
    print(f"budget {p_total:.0f} W: {len(configs)} co-run configs, "
          f"{len(splits)} exclusive-run cap splits")
    print("  cap splits:", ", ".join(f"{c:.0f}+{g:.0f}" for c, g in splits))

# The first few co-run configs, in their deterministic search order.
space = default_space(400.0)
print("\nfirst five co-run configs at 400 W:")
for hc in enumerate_corun_configs(space)[:5]:
    print(f"  cores {hc.cpu_partition}, GPCs {hc.gpu_partition}, "
          f"caps {hc.cpu_cap:.0f}/{hc.gpu_cap:.0f} W")

# A profiled job is 18 counters plus its uncapped solo runtime.
rng = np.random.default_rng(0)
job_a = JobProfile("demo-a", rng.uniform(1.0, 90.0, 18), base_time=25.0)
job_b = JobProfile("demo-b", rng.uniform(1.0, 90.0, 18), base_time=40.0)

# The model input is 40 values in [0, 1]: partition shares, cap shares,
# then both jobs' counters scaled by the training maxima.
bounds = np.full(36, 100.0)
hc = enumerate_corun_configs(space)[0]
vec = normalize_input(job_a, job_b, hc, space, bounds)
print(f"\nnormalized input for {job_a.job_id}+{job_b.job_id} under the first config:")
print("  knob slots:", np.round(vec[:4], 3))
print("  job-a counters (first 6):", np.round(vec[4:10], 3))
print("  job-b counters (first 6):", np.round(vec[22:28], 3))

# A solo run zeroes the co-runner's block and takes the full machine.
solo_vec = normalize_input(job_a, None, solo_config(250, 250), space, bounds)
print("\nsolo input: knob slots", solo_vec[:4], "co-runner block all zero:",
      bool(np.all(solo_vec[22:] == 0.0)))
