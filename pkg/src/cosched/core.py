"""Domain types, the hardware configuration search space, and input normalization.

Everything downstream (the slowdown model, the per-pair optimizer, the
scheduler) builds on the types in this module.  All types are immutable
after construction and all operations are pure functions, so they are safe
to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

# Number of hardware counters collected per job (10 CPU-side + 8 GPU-side).
NUM_FEATURES = 18

# Normalized model input layout: 4 knob slots + two 18-counter blocks.
INPUT_DIM = 4 + 2 * NUM_FEATURES

# Legal partitionings.  Each pair is (allocation to job 1, allocation to
# job 2); the trailing entry of each list is the exclusive solo-run setup.
CPU_PARTITIONS = ((2, 30), (8, 24), (16, 16), (24, 8), (30, 2), (32, 0))
GPU_PARTITIONS = ((3, 4), (4, 3), (8, 0))
SOLO_CPU_PARTITION = (32, 0)
SOLO_GPU_PARTITION = (8, 0)
TOTAL_CORES = 32
TOTAL_GPCS = 8

# Legal per-device power caps in watts.
CPU_CAPS = (100, 125, 150, 175, 200, 225, 250)
GPU_CAPS = (150, 175, 200, 225, 250)
CPU_CAP_MAX = 250
GPU_CAP_MAX = 250

# Node-level power budgets: the standard budget levels a co-run cap pair
# may exhaust, and the hardware ceiling (TDP).
DEFAULT_CAP_SUM_LEVELS = (350, 400)
DEFAULT_P_MAX = 500


class ValidationError(ValueError):
    """Raised when a domain object or operation input violates an invariant."""


def _as_readonly(values: Sequence[float], name: str, length: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (length,):
        raise ValidationError(f"{name} must have exactly {length} entries, got shape {arr.shape}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class JobProfile:
    """A job's profiled characteristics.

    Attributes:
        job_id: Opaque identifier.
        features: 18 hardware counter values, CPU counters first
            (utilization, context switches, page faults, IPC, stall and
            miss rates) then GPU counters (memory/compute utilization,
            throughputs, occupancy).  All finite and >= 0.
        base_time: Solo runtime in seconds with full resources and no
            power capping (> 0).  This is the baseline every slowdown
            multiplies.
    """

    job_id: str
    features: np.ndarray
    base_time: float

    def __post_init__(self) -> None:
        feats = _as_readonly(self.features, "features", NUM_FEATURES)
        if not np.all(np.isfinite(feats)):
            bad = int(np.flatnonzero(~np.isfinite(feats))[0])
            raise ValidationError(f"feature {bad} of job {self.job_id!r} is not finite")
        if np.any(feats < 0):
            bad = int(np.flatnonzero(feats < 0)[0])
            raise ValidationError(f"feature {bad} of job {self.job_id!r} is negative")
        object.__setattr__(self, "features", feats)
        if not (np.isfinite(self.base_time) and self.base_time > 0):
            raise ValidationError(f"base_time of job {self.job_id!r} must be > 0")

    def to_json(self) -> dict:
        return {
            "job_id": self.job_id,
            "base_time_s": self.base_time,
            "features": [float(v) for v in self.features],
        }

    @classmethod
    def from_json(cls, data: dict) -> "JobProfile":
        return cls(
            job_id=str(data["job_id"]),
            features=np.asarray(data["features"], dtype=float),
            base_time=float(data["base_time_s"]),
        )


@dataclass(frozen=True)
class HardwareConfig:
    """One hardware knob setting: partitions plus per-device power caps.

    ``cpu_partition``/``gpu_partition`` are (job 1 share, job 2 share)
    pairs out of the legal sets; ``(32, 0)``/``(8, 0)`` denote exclusive
    solo runs.  Caps are watts on the per-device grids.
    """

    cpu_partition: tuple[int, int]
    gpu_partition: tuple[int, int]
    cpu_cap: float
    gpu_cap: float

    def __post_init__(self) -> None:
        cpu = tuple(int(v) for v in self.cpu_partition)
        gpu = tuple(int(v) for v in self.gpu_partition)
        if cpu not in CPU_PARTITIONS:
            raise ValidationError(f"cpu_partition {cpu} not in {CPU_PARTITIONS}")
        if gpu not in GPU_PARTITIONS:
            raise ValidationError(f"gpu_partition {gpu} not in {GPU_PARTITIONS}")
        if self.cpu_cap not in CPU_CAPS:
            raise ValidationError(f"cpu_cap {self.cpu_cap} not in {CPU_CAPS}")
        if self.gpu_cap not in GPU_CAPS:
            raise ValidationError(f"gpu_cap {self.gpu_cap} not in {GPU_CAPS}")
        object.__setattr__(self, "cpu_partition", cpu)
        object.__setattr__(self, "gpu_partition", gpu)
        object.__setattr__(self, "cpu_cap", float(self.cpu_cap))
        object.__setattr__(self, "gpu_cap", float(self.gpu_cap))

    @property
    def is_solo(self) -> bool:
        return (self.cpu_partition == SOLO_CPU_PARTITION
                and self.gpu_partition == SOLO_GPU_PARTITION)

    @property
    def is_corun(self) -> bool:
        return self.cpu_partition[1] > 0 and self.gpu_partition[1] > 0

    @property
    def is_degenerate(self) -> bool:
        """True when the config mixes a co-run partition with a solo one."""
        return not (self.is_solo or self.is_corun)

    @property
    def cap_sum(self) -> float:
        return self.cpu_cap + self.gpu_cap

    def reversed_partitions(self) -> "HardwareConfig":
        """The same config seen from the second job's perspective."""
        return HardwareConfig(
            cpu_partition=(self.cpu_partition[1], self.cpu_partition[0]),
            gpu_partition=(self.gpu_partition[1], self.gpu_partition[0]),
            cpu_cap=self.cpu_cap,
            gpu_cap=self.gpu_cap,
        )

    def to_json(self) -> dict:
        return {
            "cpu_partition": list(self.cpu_partition),
            "gpu_partition": list(self.gpu_partition),
            "cpu_cap_w": self.cpu_cap,
            "gpu_cap_w": self.gpu_cap,
        }

    @classmethod
    def from_json(cls, data: dict) -> "HardwareConfig":
        return cls(
            cpu_partition=tuple(data["cpu_partition"]),
            gpu_partition=tuple(data["gpu_partition"]),
            cpu_cap=data["cpu_cap_w"],
            gpu_cap=data["gpu_cap_w"],
        )


def solo_config(cpu_cap: float, gpu_cap: float) -> HardwareConfig:
    """Exclusive solo-run config at the given caps."""
    return HardwareConfig(SOLO_CPU_PARTITION, SOLO_GPU_PARTITION, cpu_cap, gpu_cap)


@dataclass(frozen=True)
class ConfigSpace:
    """The enumerable knob value sets plus the node power budget.

    ``cap_sum_levels`` lists the budget levels a co-run cap pair may
    exhaust exactly.  Runtimes are monotone non-increasing in each cap,
    so leaving budget unused is never faster; the search therefore only
    visits cap pairs whose sum lands on a level that fits ``p_total``.
    """

    cpu_partitions: tuple = CPU_PARTITIONS
    gpu_partitions: tuple = GPU_PARTITIONS
    cpu_caps: tuple = CPU_CAPS
    gpu_caps: tuple = GPU_CAPS
    p_total: float = 400.0
    p_max: float = DEFAULT_P_MAX
    cap_sum_levels: tuple = DEFAULT_CAP_SUM_LEVELS

    def __post_init__(self) -> None:
        if not (self.p_total > 0 and np.isfinite(self.p_total)):
            raise ValidationError(f"p_total must be positive, got {self.p_total}")
        if self.p_total > self.p_max:
            raise ValidationError(f"p_total {self.p_total} exceeds p_max {self.p_max}")
        object.__setattr__(self, "cpu_partitions", tuple(tuple(p) for p in self.cpu_partitions))
        object.__setattr__(self, "gpu_partitions", tuple(tuple(p) for p in self.gpu_partitions))
        object.__setattr__(self, "cpu_caps", tuple(self.cpu_caps))
        object.__setattr__(self, "gpu_caps", tuple(self.gpu_caps))
        object.__setattr__(self, "cap_sum_levels", tuple(self.cap_sum_levels))

    @property
    def corun_cpu_partitions(self) -> tuple:
        return tuple(p for p in self.cpu_partitions if p[0] > 0 and p[1] > 0)

    @property
    def corun_gpu_partitions(self) -> tuple:
        return tuple(p for p in self.gpu_partitions if p[0] > 0 and p[1] > 0)

    def contains(self, hc: HardwareConfig) -> bool:
        return (hc.cpu_partition in self.cpu_partitions
                and hc.gpu_partition in self.gpu_partitions
                and hc.cpu_cap in self.cpu_caps
                and hc.gpu_cap in self.gpu_caps)

    def to_json(self) -> dict:
        return {
            "cpu_partitions": [list(p) for p in self.cpu_partitions],
            "gpu_partitions": [list(p) for p in self.gpu_partitions],
            "cpu_caps": list(self.cpu_caps),
            "gpu_caps": list(self.gpu_caps),
            "p_total": self.p_total,
            "p_max": self.p_max,
            "cap_sum_levels": list(self.cap_sum_levels),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ConfigSpace":
        kwargs = {}
        if "cpu_partitions" in data:
            kwargs["cpu_partitions"] = tuple(tuple(p) for p in data["cpu_partitions"])
        if "gpu_partitions" in data:
            kwargs["gpu_partitions"] = tuple(tuple(p) for p in data["gpu_partitions"])
        if "cpu_caps" in data:
            kwargs["cpu_caps"] = tuple(data["cpu_caps"])
        if "gpu_caps" in data:
            kwargs["gpu_caps"] = tuple(data["gpu_caps"])
        if "cap_sum_levels" in data:
            kwargs["cap_sum_levels"] = tuple(data["cap_sum_levels"])
        kwargs["p_total"] = float(data["p_total"])
        kwargs["p_max"] = float(data.get("p_max", DEFAULT_P_MAX))
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "ConfigSpace":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def default_space(p_total: float = 400.0) -> ConfigSpace:
    return ConfigSpace(p_total=p_total)


@dataclass(frozen=True)
class SchedulingParams:
    """Scheduling knobs: co-location degree (fixed at 2) and window size."""

    window: int
    concurrency: int = 2

    def __post_init__(self) -> None:
        if self.concurrency != 2:
            raise ValidationError("only concurrency 2 is supported")
        if self.window <= 0 or self.window % 2 != 0:
            raise ValidationError(f"window must be a positive even integer, got {self.window}")


@dataclass(frozen=True)
class JobSet:
    """One or two jobs dispatched together."""

    jobs: tuple

    def __post_init__(self) -> None:
        jobs = tuple(self.jobs)
        if not 1 <= len(jobs) <= 2:
            raise ValidationError(f"a job set holds 1 or 2 jobs, got {len(jobs)}")
        object.__setattr__(self, "jobs", jobs)

    def __len__(self) -> int:
        return len(self.jobs)


@dataclass(frozen=True)
class Schedule:
    """A full dispatch plan: job sets, their configs, and co-run flags.

    ``configs[i]`` holds one shared config for a co-run pair or one solo
    config per singleton job.
    """

    job_sets: tuple
    configs: tuple
    corun_flags: tuple

    def __post_init__(self) -> None:
        job_sets = tuple(self.job_sets)
        configs = tuple(tuple(c) for c in self.configs)
        flags = tuple(bool(f) for f in self.corun_flags)
        if not (len(job_sets) == len(configs) == len(flags)):
            raise ValidationError("job_sets, configs, and corun_flags must align")
        for js, cfgs, flag in zip(job_sets, configs, flags):
            if flag and (len(js) != 2 or len(cfgs) != 1):
                raise ValidationError("a co-run set needs 2 jobs and 1 shared config")
            if not flag and (len(js) != 1 or len(cfgs) != 1):
                raise ValidationError("a solo set needs 1 job and 1 config")
        object.__setattr__(self, "job_sets", job_sets)
        object.__setattr__(self, "configs", configs)
        object.__setattr__(self, "corun_flags", flags)

    def validate_against(self, queue: Sequence[JobProfile], space: ConfigSpace) -> None:
        """Check the queue-partition and power-constraint invariants."""
        seen = [job.job_id for js in self.job_sets for job in js.jobs]
        if sorted(seen) != sorted(j.job_id for j in queue):
            raise ValidationError("job sets do not partition the queue")
        for cfgs, flag in zip(self.configs, self.corun_flags):
            for hc in cfgs:
                if flag and hc.cap_sum > space.p_total:
                    raise ValidationError(
                        f"co-run cap sum {hc.cap_sum} exceeds p_total {space.p_total}")


def normalize_input(
    profile_1: JobProfile,
    profile_2: Optional[JobProfile],
    hc: HardwareConfig,
    space: ConfigSpace,
    bounds: np.ndarray,
) -> np.ndarray:
    """Assemble the 40-element model input, normalized to [0, 1].

    Layout: [cores share, GPC share, CPU cap share, GPU cap share,
    job 1's 18 counters, job 2's 18 counters].  The partition slots carry
    only the first job's allocation divided by the device total (32 cores,
    8 GPCs); caps are divided by the per-device maximum (250 W each).
    Counters divide element-wise by ``bounds`` (the per-slot maxima of the
    training corpus) and clamp to [0, 1].  An absent second job zeroes its
    whole counter block.

    Args:
        bounds: 36 positive per-slot maxima (job 1 block then job 2 block).

    Raises:
        ValidationError: On a malformed bounds vector, a non-finite
            counter, or an input/partition mismatch; the message names the
            offending index.
    """
    bounds = np.asarray(bounds, dtype=float)
    if bounds.shape != (2 * NUM_FEATURES,):
        raise ValidationError(
            f"bounds must have {2 * NUM_FEATURES} entries, got shape {bounds.shape}")
    if not np.all(np.isfinite(bounds) & (bounds > 0)):
        bad = int(np.flatnonzero(~(np.isfinite(bounds) & (bounds > 0)))[0])
        raise ValidationError(f"bounds entry {bad} must be finite and > 0")

    out = np.zeros(INPUT_DIM, dtype=float)
    out[0] = hc.cpu_partition[0] / TOTAL_CORES
    out[1] = hc.gpu_partition[0] / TOTAL_GPCS
    out[2] = hc.cpu_cap / CPU_CAP_MAX
    out[3] = hc.gpu_cap / GPU_CAP_MAX

    out[4:4 + NUM_FEATURES] = np.clip(profile_1.features / bounds[:NUM_FEATURES], 0.0, 1.0)
    if profile_2 is not None:
        out[4 + NUM_FEATURES:] = np.clip(
            profile_2.features / bounds[NUM_FEATURES:], 0.0, 1.0)
    return out


def enumerate_corun_configs(space: ConfigSpace) -> list[HardwareConfig]:
    """All legal co-run hardware configs, in a fixed deterministic order.

    A config combines a co-run CPU partition, a co-run GPU partition, and
    a cap pair whose sum exhausts one of ``space.cap_sum_levels`` without
    exceeding ``p_total``.  Order is lexicographic over the declared value
    sets so that first-minimum tie-breaking is reproducible.
    """
    levels = {lv for lv in space.cap_sum_levels if lv <= space.p_total}
    configs = []
    for cpu_part in space.corun_cpu_partitions:
        for gpu_part in space.corun_gpu_partitions:
            for cpu_cap in space.cpu_caps:
                for gpu_cap in space.gpu_caps:
                    if cpu_cap + gpu_cap in levels:
                        configs.append(
                            HardwareConfig(cpu_part, gpu_part, cpu_cap, gpu_cap))
    return configs


def enumerate_solo_splits(space: ConfigSpace) -> list[tuple[float, float]]:
    """All (cpu_cap, gpu_cap) pairs summing exactly to the node budget."""
    return [
        (float(c), float(g))
        for c in space.cpu_caps
        for g in space.gpu_caps
        if c + g == space.p_total
    ]
