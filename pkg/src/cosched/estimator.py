"""Slowdown queries and runtime aggregation on top of the predictor.

A job set's co-run time is the longest member's slowdown-scaled baseline;
the time-sharing alternative is the sum of each member's solo time at its
best power split.  Any object with a ``predict_slowdown`` method can stand
in for the trained network (the synthetic oracle does exactly that), which
keeps every downstream computation testable against ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Protocol

from .core import (
    ConfigSpace,
    HardwareConfig,
    JobProfile,
    JobSet,
    SOLO_CPU_PARTITION,
    SOLO_GPU_PARTITION,
    ValidationError,
    enumerate_solo_splits,
    normalize_input,
    solo_config,
)
from .fnn import NetworkWeights, forward

# Predictions below this are treated as pathological and clamped: a real
# co-run under capping cannot beat the uncapped full-resource solo run by
# 2x, so anything lower signals an untrained or broken model.  Without the
# floor such a model would fake near-zero runtimes and win every search.
SLOWDOWN_FLOOR = 0.5


class ClampStats:
    """Counts floor clamps, for diagnosing a misbehaving model."""

    def __init__(self) -> None:
        self.count = 0

    def reset(self) -> None:
        self.count = 0


clamp_stats = ClampStats()


class SlowdownModel(Protocol):
    def predict_slowdown(
        self,
        primary: JobProfile,
        co_job: Optional[JobProfile],
        hc: HardwareConfig,
        space: ConfigSpace,
    ) -> float: ...


class FnnSlowdownModel:
    """The trained network exposed through the common model interface."""

    def __init__(self, weights: NetworkWeights):
        self.weights = weights

    def predict_slowdown(self, primary, co_job, hc, space) -> float:
        x = normalize_input(primary, co_job, hc, space, self.weights.feature_bounds)
        return forward(self.weights, x)


def as_model(model) -> SlowdownModel:
    """Accept either raw NetworkWeights or any predict_slowdown object."""
    if isinstance(model, NetworkWeights):
        return FnnSlowdownModel(model)
    if hasattr(model, "predict_slowdown"):
        return model
    raise ValidationError(f"not a slowdown model: {type(model).__name__}")


@dataclass(frozen=True)
class SlowdownQuery:
    """One prediction request: the job whose slowdown is asked for, the
    optional co-located job, and the hardware config from the primary
    job's perspective (partition slot 1 = primary's allocation)."""

    primary_job: JobProfile
    co_job: Optional[JobProfile]
    hc: HardwareConfig

    def __post_init__(self) -> None:
        if self.co_job is None and not self.hc.is_solo:
            raise ValidationError(
                f"solo query requires partitions {SOLO_CPU_PARTITION}/{SOLO_GPU_PARTITION}, "
                f"got {self.hc.cpu_partition}/{self.hc.gpu_partition}")
        if self.co_job is not None and not self.hc.is_corun:
            raise ValidationError("co-run query requires co-run partitions on both devices")


def slowdown(model, query: SlowdownQuery, space: ConfigSpace) -> float:
    """Predicted slowdown for the query's primary job, floored for sanity.

    The other member of a pair is evaluated by re-invoking with swapped
    roles and reversed partition pairs.
    """
    pred = as_model(model).predict_slowdown(
        query.primary_job, query.co_job, query.hc, space)
    if pred < SLOWDOWN_FLOOR:
        clamp_stats.count += 1
        return SLOWDOWN_FLOOR
    return pred


def corun_app_time(model, js: JobSet, hc: HardwareConfig, space: ConfigSpace,
                   job_index: int) -> float:
    """Runtime of one member of a co-run set: slowdown times its baseline."""
    if not 0 <= job_index < len(js):
        raise ValidationError(f"job_index {job_index} out of range for a {len(js)}-job set")
    job = js.jobs[job_index]
    if len(js) == 1:
        query = SlowdownQuery(job, None, hc)
    else:
        other = js.jobs[1 - job_index]
        view = hc if job_index == 0 else hc.reversed_partitions()
        query = SlowdownQuery(job, other, view)
    return slowdown(model, query, space) * job.base_time


def corun_time(model, js: JobSet, hc: HardwareConfig, space: ConfigSpace) -> float:
    """A set finishes when its longest member finishes."""
    return max(corun_app_time(model, js, hc, space, k) for k in range(len(js)))


def solo_app_time(model, job: JobProfile, cpu_cap: float, gpu_cap: float,
                  space: ConfigSpace) -> float:
    """Exclusive solo runtime at the given caps with full resources."""
    query = SlowdownQuery(job, None, solo_config(cpu_cap, gpu_cap))
    return slowdown(model, query, space) * job.base_time


def solorun_time(
    model,
    js: JobSet,
    space: ConfigSpace,
    p_total: Optional[float] = None,
) -> tuple[float, list[tuple[float, float]]]:
    """Best time-sharing total for a set, plus each job's chosen cap split.

    Every job independently gets the (cpu_cap, gpu_cap) split, summing
    exactly to the node budget, that minimizes its predicted solo time;
    the set's total is the sum over members.

    Raises:
        ValidationError: When no cap pair on the grids reaches the budget.
    """
    if p_total is not None and p_total != space.p_total:
        space = ConfigSpace(
            cpu_partitions=space.cpu_partitions,
            gpu_partitions=space.gpu_partitions,
            cpu_caps=space.cpu_caps,
            gpu_caps=space.gpu_caps,
            p_total=p_total,
            p_max=space.p_max,
            cap_sum_levels=space.cap_sum_levels,
        )
    splits = enumerate_solo_splits(space)
    if not splits:
        raise ValidationError(
            f"p_total {space.p_total} is unreachable on the cap grids")
    total = 0.0
    chosen: list[tuple[float, float]] = []
    for job in js.jobs:
        best_time = None
        best_split = None
        for split in splits:
            t = solo_app_time(model, job, split[0], split[1], space)
            if best_time is None or t < best_time:
                best_time = t
                best_split = split
        total += best_time
        chosen.append(best_split)
    return total, chosen
