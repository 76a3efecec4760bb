"""Exhaustive hardware-setup optimization for a candidate job pair.

The search space is small (at most 100 co-run configs and 5 solo splits
per budget), so every candidate is evaluated; the argmin takes the first
minimum in enumeration order, which makes results reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    ConfigSpace,
    HardwareConfig,
    JobProfile,
    JobSet,
    ValidationError,
    enumerate_corun_configs,
    solo_config,
)
from . import estimator


@dataclass(frozen=True)
class PairDecision:
    """The optimizer's verdict for one pair: best co-run setup, best solo
    splits, and which side won (ties go to co-running)."""

    corun_config: HardwareConfig
    corun_time_s: float
    solo_configs: tuple[HardwareConfig, HardwareConfig]
    solo_time_s: float
    corun_chosen: bool

    def __post_init__(self) -> None:
        if self.corun_chosen != (self.corun_time_s <= self.solo_time_s):
            raise ValidationError("corun_chosen must reflect corun_time <= solo_time")

    @property
    def winning_time(self) -> float:
        return self.corun_time_s if self.corun_chosen else self.solo_time_s


def optimize_corun(model, j1: JobProfile, j2: JobProfile,
                   space: ConfigSpace) -> tuple[HardwareConfig, float]:
    """Scan every co-run config for the pair; return the fastest.

    Deterministic: the enumeration order is fixed and ties keep the first
    minimum.

    Raises:
        ValidationError: When the space admits no co-run config.
    """
    js = JobSet((j1, j2))
    best_hc = None
    best_time = None
    for hc in enumerate_corun_configs(space):
        t = estimator.corun_time(model, js, hc, space)
        if best_time is None or t < best_time:
            best_time = t
            best_hc = hc
    if best_hc is None:
        raise ValidationError(
            f"no co-run configs exist for p_total {space.p_total}")
    return best_hc, best_time


def optimize_solo_pair(model, j1: JobProfile, j2: JobProfile,
                       space: ConfigSpace) -> tuple[HardwareConfig, HardwareConfig, float]:
    """Each job's best exclusive-run split, and the summed time-sharing total."""
    total, splits = estimator.solorun_time(model, JobSet((j1, j2)), space)
    hc1 = solo_config(*splits[0])
    hc2 = solo_config(*splits[1])
    return hc1, hc2, total


def decide_pair(model, j1: JobProfile, j2: JobProfile, space: ConfigSpace) -> PairDecision:
    """Run both optimizations and pick the faster dispatch mode."""
    corun_hc, corun_t = optimize_corun(model, j1, j2, space)
    solo1, solo2, solo_t = optimize_solo_pair(model, j1, j2, space)
    return PairDecision(
        corun_config=corun_hc,
        corun_time_s=corun_t,
        solo_configs=(solo1, solo2),
        solo_time_s=solo_t,
        corun_chosen=corun_t <= solo_t,
    )
