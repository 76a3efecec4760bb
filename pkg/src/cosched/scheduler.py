"""End-to-end scheduling of a job queue.

Builds the complete pair graph (one edge per unordered pair, weighted by
the pair's best dispatch time), finds the minimum-weight perfect matching,
and emits the dispatch plan: matched pairs flagged for co-running become
two-job sets; pairs that are faster time-shared split into two singleton
sets carrying their solo cap splits.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    ConfigSpace,
    JobProfile,
    JobSet,
    Schedule,
    SchedulingParams,
    ValidationError,
)
from . import estimator
from .hwopt import decide_pair
from .matcher import PairGraph, min_weight_perfect_matching


@dataclass(frozen=True)
class SchedulerInput:
    """One scheduling round: the queued jobs, the knob space, the window
    parameters, and the slowdown model (trained weights or the oracle)."""

    queue: tuple
    space: ConfigSpace
    params: SchedulingParams
    model: object

    def __post_init__(self) -> None:
        queue = tuple(self.queue)
        if len(queue) == 0:
            raise ValidationError("queue must not be empty")
        if len(queue) != self.params.window:
            raise ValidationError(
                f"queue length {len(queue)} must equal the window {self.params.window}")
        object.__setattr__(self, "queue", queue)


def build_graph(inp: SchedulerInput, jobs: int = 1) -> PairGraph:
    """Optimize every unordered pair and assemble the weighted pair graph.

    Args:
        jobs: Worker threads for the per-edge optimizations.  Edges are
            independent pure computations and the reduction respects edge
            order, so the result is identical for any worker count.
    """
    n = len(inp.queue)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def edge(pair):
        i, j = pair
        return decide_pair(inp.model, inp.queue[i], inp.queue[j], inp.space)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            decisions = list(pool.map(edge, pairs))
    else:
        decisions = [edge(p) for p in pairs]

    weights = np.zeros((n, n))
    payload = {}
    for (i, j), decision in zip(pairs, decisions):
        weights[i, j] = weights[j, i] = decision.winning_time
        payload[(i, j)] = decision
    return PairGraph(weights, payload)


def schedule(inp: SchedulerInput, jobs: int = 1) -> Schedule:
    """Produce the dispatch plan for the queue.

    Raises:
        ValidationError: On an odd or empty queue.
    """
    graph = build_graph(inp, jobs=jobs)
    matched = min_weight_perfect_matching(graph)

    job_sets = []
    configs = []
    flags = []
    for i, j in matched:
        decision = graph.decisions[(i, j)]
        if decision.corun_chosen:
            job_sets.append(JobSet((inp.queue[i], inp.queue[j])))
            configs.append((decision.corun_config,))
            flags.append(True)
        else:
            # Split the time-shared pair into singletons, edge order kept.
            for k, solo_hc in zip((i, j), decision.solo_configs):
                job_sets.append(JobSet((inp.queue[k],)))
                configs.append((solo_hc,))
                flags.append(False)
    result = Schedule(tuple(job_sets), tuple(configs), tuple(flags))
    result.validate_against(inp.queue, inp.space)
    return result


def set_time(model, js: JobSet, configs: Sequence, corun: bool,
             space: ConfigSpace) -> float:
    """Predicted dispatch time of one emitted set."""
    if corun:
        return estimator.corun_time(model, js, configs[0], space)
    hc = configs[0]
    return estimator.solo_app_time(model, js.jobs[0], hc.cpu_cap, hc.gpu_cap, space)


def predicted_makespan(sched: Schedule, model, space: ConfigSpace) -> float:
    """Total predicted time of a schedule under sequential set dispatch."""
    return sum(
        set_time(model, js, cfgs, flag, space)
        for js, cfgs, flag in zip(sched.job_sets, sched.configs, sched.corun_flags)
    )


def schedule_to_json(sched: Schedule, model, space: ConfigSpace) -> dict:
    """Serializable view of a schedule with per-set predicted times."""
    sets = []
    for js, cfgs, flag in zip(sched.job_sets, sched.configs, sched.corun_flags):
        sets.append({
            "jobs": [job.job_id for job in js.jobs],
            "corun": bool(flag),
            "configs": [hc.to_json() for hc in cfgs],
            "predicted_s": set_time(model, js, cfgs, flag, space),
        })
    return {
        "p_total_w": space.p_total,
        "sets": sets,
        "total_predicted_s": predicted_makespan(sched, model, space),
    }


def write_schedule_json(sched: Schedule, model, space: ConfigSpace, path) -> None:
    with open(path, "w") as fh:
        json.dump(schedule_to_json(sched, model, space), fh, indent=2, sort_keys=True)
        fh.write("\n")
