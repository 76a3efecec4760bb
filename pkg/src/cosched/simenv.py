"""Synthetic ground truth: an analytic slowdown oracle plus workload tooling.

The oracle stands in for real hardware.  It composes, multiplicatively:

* a resource term per device, ``(total / allocated) ** (scaling * dependence)``,
  where a job's CPU/GPU dependence comes from its utilization counters;
* a power term per device, a piecewise-linear penalty that activates below
  a job-specific sensitivity threshold and is exactly 1 at the device cap
  maximum;
* an interference term for co-runs, driven by the overlap of the two jobs'
  compute and memory intensities (symmetric in the pair).

By construction the slowdown is exactly 1.0 for an uncapped full-resource
solo run, is monotone non-increasing in cores, GPCs, and both caps, and is
always >= 1.  Complementary pairs (CPU-heavy with GPU-heavy) co-run well;
two memory-heavy jobs interfere enough that time-sharing wins.

The module also samples archetype-based synthetic jobs, labels datasets
for model training the same way a profiling campaign would, and compares
scheduling policies with "model chooses, oracle measures" accounting.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    CPU_CAP_MAX,
    GPU_CAP_MAX,
    ConfigSpace,
    HardwareConfig,
    JobProfile,
    JobSet,
    SchedulingParams,
    TOTAL_CORES,
    TOTAL_GPCS,
    ValidationError,
    enumerate_corun_configs,
    enumerate_solo_splits,
    normalize_input,
    solo_config,
)
from .fnn import LabeledSample
from . import estimator, scheduler

POLICIES = ("naive-timeshare", "opt-timeshare", "coschedule")

ARCHETYPES = ("cpu-bound", "gpu-bound", "memory-bound", "balanced")

# Reference scales that turn raw counter values into [0, 1] intensities
# inside the oracle: utilizations and throughputs are percentages, IPC
# tops out around 4 on the modeled cores.
_IPC_SCALE = 4.0
_PCT_SCALE = 100.0


@dataclass(frozen=True)
class OracleParams:
    """Coefficients of the analytic slowdown oracle.

    A job's partition-scaling slope per device combines its dependence on
    that device with its memory pressure (``*_mem_scaling`` terms):
    partitioning slices cache and bandwidth along with cores/GPCs, so
    bandwidth-hungry jobs scale worse.  The resource penalty is linear in
    the lost share, ``1 + slope * (1 - allocated/total)``.  Per-job power
    sensitivity thresholds are ``floor + span * dependence`` and stay
    inside the cap grid, so a device capped at its maximum is never
    penalized.
    """

    cpu_scaling: float = 0.35
    gpu_scaling: float = 0.40
    cpu_mem_scaling: float = 0.55
    gpu_mem_scaling: float = 1.05
    cpu_threshold_floor: float = 100.0
    cpu_threshold_span: float = 150.0
    gpu_threshold_floor: float = 150.0
    gpu_threshold_span: float = 100.0
    cpu_power_penalty: float = 0.45
    gpu_power_penalty: float = 0.45
    compute_compute: float = 0.15
    memory_memory: float = 0.30
    compute_memory: float = 0.05
    noise_sigma: float = 0.03
    seed: int = 0

    def __post_init__(self) -> None:
        if min(self.cpu_scaling, self.gpu_scaling,
               self.cpu_mem_scaling, self.gpu_mem_scaling) < 0:
            raise ValidationError("scaling exponents must be >= 0")
        if self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be >= 0")
        if not (0 < self.cpu_threshold_floor
                and self.cpu_threshold_floor + self.cpu_threshold_span <= CPU_CAP_MAX):
            raise ValidationError("CPU sensitivity thresholds must stay within the cap grid")
        if not (0 < self.gpu_threshold_floor
                and self.gpu_threshold_floor + self.gpu_threshold_span <= GPU_CAP_MAX):
            raise ValidationError("GPU sensitivity thresholds must stay within the cap grid")

    def to_json(self) -> dict:
        return {
            "cpu_scaling": self.cpu_scaling,
            "gpu_scaling": self.gpu_scaling,
            "cpu_mem_scaling": self.cpu_mem_scaling,
            "gpu_mem_scaling": self.gpu_mem_scaling,
            "cpu_threshold_floor": self.cpu_threshold_floor,
            "cpu_threshold_span": self.cpu_threshold_span,
            "gpu_threshold_floor": self.gpu_threshold_floor,
            "gpu_threshold_span": self.gpu_threshold_span,
            "cpu_power_penalty": self.cpu_power_penalty,
            "gpu_power_penalty": self.gpu_power_penalty,
            "compute_compute": self.compute_compute,
            "memory_memory": self.memory_memory,
            "compute_memory": self.compute_memory,
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "OracleParams":
        return cls(**data)

    @classmethod
    def load(cls, path) -> "OracleParams":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class JobIntensities:
    """A job's oracle-relevant summaries, each in [0, 1].

    CPU dependence reads utilization, GPU dependence the compute
    utilization; memory pressure per side comes from stall/L1-miss rates
    (CPU) and DRAM/LLC throughputs (GPU).
    """

    cpu_dep: float
    gpu_dep: float
    cpu_mem: float
    gpu_mem: float
    compute: float

    @property
    def memory(self) -> float:
        return (self.cpu_mem + self.gpu_mem) / 2.0


def job_intensities(job: JobProfile) -> JobIntensities:
    f = job.features

    def frac(value: float, scale: float) -> float:
        return float(np.clip(value / scale, 0.0, 1.0))

    # Slots: f[0]=CPU util, f[3]=IPC, f[4]=stalled cycles, f[6]=L1d miss
    # rate, f[11]=DRAM throughput, f[13]=LLC throughput, f[14]=GPU compute.
    return JobIntensities(
        cpu_dep=frac(f[0], _PCT_SCALE),
        gpu_dep=frac(f[14], _PCT_SCALE),
        cpu_mem=(frac(f[4], _PCT_SCALE) + frac(f[6], _PCT_SCALE)) / 2.0,
        gpu_mem=(frac(f[11], _PCT_SCALE) + frac(f[13], _PCT_SCALE)) / 2.0,
        compute=(frac(f[3], _IPC_SCALE) + frac(f[14], _PCT_SCALE)) / 2.0,
    )


def interference_factor(params: OracleParams, j1: JobProfile, j2: JobProfile) -> float:
    """Co-location contention multiplier; symmetric in the pair and >= 1."""
    a = job_intensities(j1)
    b = job_intensities(j2)
    return 1.0 + (
        params.compute_compute * a.compute * b.compute
        + params.memory_memory * a.memory * b.memory
        + params.compute_memory * (a.compute * b.memory + a.memory * b.compute)
    )


def oracle_slowdown(
    params: OracleParams,
    j1: JobProfile,
    j2: Optional[JobProfile],
    hc: HardwareConfig,
) -> float:
    """Ground-truth (noiseless) slowdown of j1 under the given setup.

    Solo queries require the solo partitions; co-run queries require
    co-run partitions, with the first partition elements being j1's
    allocation.
    """
    if j2 is None and not hc.is_solo:
        raise ValidationError("solo oracle query requires solo partitions")
    if j2 is not None and not hc.is_corun:
        raise ValidationError("co-run oracle query requires co-run partitions")

    ints = job_intensities(j1)
    cores = hc.cpu_partition[0]
    gpcs = hc.gpu_partition[0]

    cpu_slope = params.cpu_scaling * ints.cpu_dep + params.cpu_mem_scaling * ints.cpu_mem
    gpu_slope = params.gpu_scaling * ints.gpu_dep + params.gpu_mem_scaling * ints.gpu_mem
    resource = ((1.0 + cpu_slope * (1.0 - cores / TOTAL_CORES))
                * (1.0 + gpu_slope * (1.0 - gpcs / TOTAL_GPCS)))

    cpu_thr = params.cpu_threshold_floor + params.cpu_threshold_span * ints.cpu_dep
    gpu_thr = params.gpu_threshold_floor + params.gpu_threshold_span * ints.gpu_dep
    power = (
        (1.0 + params.cpu_power_penalty
         * max(0.0, cpu_thr - hc.cpu_cap) / params.cpu_threshold_span)
        * (1.0 + params.gpu_power_penalty
           * max(0.0, gpu_thr - hc.gpu_cap) / params.gpu_threshold_span)
    )

    contention = 1.0 if j2 is None else interference_factor(params, j1, j2)
    return resource * power * contention


class OracleSlowdownModel:
    """The oracle behind the estimator's model interface.

    Dropping this in place of trained weights makes every prediction
    exact, which is how optimality of the surrounding machinery is
    verified ("model chooses, oracle measures" collapses to one function).
    """

    def __init__(self, params: OracleParams):
        self.params = params

    def predict_slowdown(self, primary, co_job, hc, space) -> float:
        return oracle_slowdown(self.params, primary, co_job, hc)


# ---------------------------------------------------------------------------
# Synthetic workload generation.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SyntheticJobSpec:
    """A generated job together with the archetype that shaped it."""

    archetype: str
    job: JobProfile

    def __post_init__(self) -> None:
        if self.archetype not in ARCHETYPES:
            raise ValidationError(f"unknown archetype {self.archetype!r}")

    def to_json(self) -> dict:
        return {"archetype": self.archetype, "job": self.job.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "SyntheticJobSpec":
        return cls(archetype=data["archetype"], job=JobProfile.from_json(data["job"]))


# Per-archetype sampling ranges for the 18 counters, ordered as in
# JobProfile.features: CPU block (util %, ctx switches/s, page faults/s,
# IPC, stalled %, branch miss %, L1d miss %, L1i miss %, dTLB miss %,
# iTLB miss %) then GPU block (memory %, DRAM %, TEX %, LLC %, compute %,
# waves/SM, occupancy %, warps/SM).
ARCHETYPE_RANGES: dict[str, list[tuple[float, float]]] = {
    "cpu-bound": [
        (85, 98), (500, 3000), (100, 1000), (2.6, 3.6), (10, 25),
        (1, 5), (5, 15), (1, 6), (0.5, 3), (0.2, 2),
        (4, 12), (5, 15), (5, 15), (5, 15), (3, 10), (1, 6), (5, 20), (2, 10),
    ],
    "gpu-bound": [
        (8, 20), (200, 1500), (50, 500), (0.8, 1.6), (20, 40),
        (2, 8), (8, 20), (2, 8), (1, 5), (0.5, 3),
        (55, 80), (20, 45), (30, 60), (25, 50), (82, 97), (20, 48), (60, 90), (15, 40),
    ],
    "memory-bound": [
        (40, 60), (2000, 8000), (1000, 5000), (0.5, 1.1), (55, 80),
        (5, 15), (30, 55), (5, 15), (5, 15), (2, 8),
        (70, 92), (70, 90), (30, 60), (60, 85), (12, 25), (8, 20), (30, 60), (8, 24),
    ],
    "balanced": [
        (45, 70), (800, 4000), (200, 2000), (1.4, 2.4), (30, 50),
        (3, 10), (15, 30), (3, 10), (2, 8), (1, 4),
        (35, 60), (30, 55), (20, 45), (30, 55), (35, 60), (10, 30), (40, 70), (10, 30),
    ],
}

BASE_TIME_RANGE = (15.0, 45.0)


def generate_job(rng: np.random.Generator, archetype: str, job_id: str) -> SyntheticJobSpec:
    ranges = ARCHETYPE_RANGES[archetype]
    features = np.array([rng.uniform(lo, hi) for lo, hi in ranges])
    base_time = float(rng.uniform(*BASE_TIME_RANGE))
    return SyntheticJobSpec(archetype, JobProfile(job_id, features, base_time))


def generate_workload(
    seed: int,
    archetypes: Sequence[str],
) -> list[SyntheticJobSpec]:
    """Sample one job per requested archetype label, deterministically."""
    rng = np.random.default_rng([seed, 100])
    return [
        generate_job(rng, archetype, f"job{i:02d}-{archetype}")
        for i, archetype in enumerate(archetypes)
    ]


def mixed_archetypes(n_jobs: int) -> list[str]:
    """Round-robin archetype labels (the standard mixed workload recipe)."""
    return [ARCHETYPES[i % len(ARCHETYPES)] for i in range(n_jobs)]


def workload_to_json(specs: Sequence[SyntheticJobSpec]) -> list:
    return [s.to_json() for s in specs]


def load_workload(path) -> list[SyntheticJobSpec]:
    with open(path) as fh:
        data = json.load(fh)
    return [SyntheticJobSpec.from_json(item) for item in data]


# ---------------------------------------------------------------------------
# Dataset generation.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DatasetRow:
    """One labeled training point plus its provenance."""

    sample: LabeledSample
    clean_target: float
    pair_id: str
    split: str
    primary_id: str
    co_id: str
    hc: HardwareConfig


@dataclass
class Dataset:
    rows: list[DatasetRow]
    jobs: list[SyntheticJobSpec]
    bounds: np.ndarray

    def samples(self, split: str) -> list[LabeledSample]:
        return [r.sample for r in self.rows if r.split == split]

    def rows_for(self, split: str) -> list[DatasetRow]:
        return [r for r in self.rows if r.split == split]


def _sample_pairs(
    n_jobs: int,
    n_pairs: int,
    train_pairs: int,
    rng: np.random.Generator,
    archetypes: Sequence[str],
) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Stratified random pair selection for the training split.

    Training pairs are drawn from a shuffled pair list, preferring pairs
    whose archetype combination is not covered yet and then the currently
    least-covered jobs.  A profiling campaign that never co-ran two
    GPU-heavy jobs cannot anticipate that mix, so every workload-type
    combination gets observed before randomness fills the rest; test
    pairs are the next random picks.
    """
    all_pairs = [(i, j) for i in range(n_jobs) for j in range(i + 1, n_jobs)]
    remaining = [all_pairs[k] for k in rng.permutation(len(all_pairs))]
    counts = [0] * n_jobs
    combos_seen: set = set()
    train: list[tuple[int, int]] = []

    def combo(pair):
        return frozenset((archetypes[pair[0]], archetypes[pair[1]]))

    for _ in range(train_pairs):
        best = min(
            range(len(remaining)),
            key=lambda k: (combo(remaining[k]) in combos_seen,
                           max(counts[remaining[k][0]], counts[remaining[k][1]]),
                           counts[remaining[k][0]] + counts[remaining[k][1]], k))
        i, j = remaining.pop(best)
        counts[i] += 1
        counts[j] += 1
        combos_seen.add(frozenset((archetypes[i], archetypes[j])))
        train.append((i, j))
    return train, remaining[:n_pairs - train_pairs]


def generate_dataset(
    params: OracleParams,
    space: ConfigSpace,
    n_jobs: int = 8,
    n_pairs: int = 16,
    train_pairs: int = 12,
    seed: Optional[int] = None,
) -> Dataset:
    """Label random job pairs under every co-run config, both orderings.

    Pairs are drawn without replacement from the sampled corpus and split
    into train/test at the pair level, so no pair's measurements leak
    across the split.  Labels are oracle slowdowns with multiplicative
    lognormal noise of ``params.noise_sigma`` (zero sigma means exact).
    Normalization bounds are the per-slot maxima over the training rows
    and are returned for embedding into trained weights.

    The defaults reproduce the standard corpus: 16 pairs x 100 co-run
    configs x 2 orderings = 3,200 points, 2,400 of them training.
    """
    if seed is None:
        seed = params.seed
    if n_pairs < 1:
        raise ValidationError("n_pairs must be >= 1")
    max_pairs = n_jobs * (n_jobs - 1) // 2
    if n_pairs > max_pairs:
        raise ValidationError(f"cannot draw {n_pairs} distinct pairs from {n_jobs} jobs")
    if not 1 <= train_pairs < n_pairs:
        raise ValidationError("train_pairs must satisfy 1 <= train_pairs < n_pairs")

    jobs = generate_workload(seed, mixed_archetypes(n_jobs))
    rng = np.random.default_rng([seed, 200])

    train_picks, test_picks = _sample_pairs(
        n_jobs, n_pairs, train_pairs, rng, [s.archetype for s in jobs])
    configs = enumerate_corun_configs(space)
    if not configs:
        raise ValidationError(f"no co-run configs for p_total {space.p_total}")

    raw_rows = []
    labeled_pairs = [("train", p) for p in train_picks] + [("test", p) for p in test_picks]
    for split, (i, j) in labeled_pairs:
        pair_id = f"{jobs[i].job.job_id}+{jobs[j].job.job_id}"
        for hc in configs:
            for primary, co, view in (
                (jobs[i].job, jobs[j].job, hc),
                (jobs[j].job, jobs[i].job, hc.reversed_partitions()),
            ):
                clean = oracle_slowdown(params, primary, co, view)
                noise = float(np.exp(rng.normal(0.0, params.noise_sigma))) \
                    if params.noise_sigma > 0 else 1.0
                raw_rows.append((pair_id, split, primary, co, view, clean, clean * noise))

    bounds = np.zeros(36)
    for pair_id, split, primary, co, view, clean, label in raw_rows:
        if split == "train":
            bounds[:18] = np.maximum(bounds[:18], primary.features)
            bounds[18:] = np.maximum(bounds[18:], co.features)
    if np.any(bounds <= 0):
        raise ValidationError("training rows left a zero normalization bound")

    rows = [
        DatasetRow(
            sample=LabeledSample(
                input=normalize_input(primary, co, view, space, bounds),
                target=label,
            ),
            clean_target=clean,
            pair_id=pair_id,
            split=split,
            primary_id=primary.job_id,
            co_id=co.job_id,
            hc=view,
        )
        for pair_id, split, primary, co, view, clean, label in raw_rows
    ]
    return Dataset(rows=rows, jobs=jobs, bounds=bounds)


DATASET_INPUT_COLUMNS = (
    ["rc_norm", "rg_norm", "pc_norm", "pg_norm"]
    + [f"j1_f{k}" for k in range(1, 19)]
    + [f"j2_f{k}" for k in range(1, 19)]
)


def dataset_to_csv(dataset: Dataset, path) -> None:
    """40 input columns + target + pair id + split tag, one row per point."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DATASET_INPUT_COLUMNS + ["slowdown", "pair_id", "split"])
        for row in dataset.rows:
            writer.writerow(
                [repr(float(v)) for v in row.sample.input]
                + [repr(float(row.sample.target)), row.pair_id, row.split])


def load_dataset_csv(path) -> tuple[list[LabeledSample], list[str], list[str]]:
    """Read a dataset CSV back as (samples, pair_ids, splits).

    Raises:
        ValidationError: Naming the line of the first malformed row.
    """
    samples: list[LabeledSample] = []
    pair_ids: list[str] = []
    splits: list[str] = []
    expected = DATASET_INPUT_COLUMNS + ["slowdown", "pair_id", "split"]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected:
            raise ValidationError(f"dataset CSV {path} has an unexpected header")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(expected):
                raise ValidationError(
                    f"dataset CSV {path} line {line_no}: expected {len(expected)} fields, "
                    f"got {len(row)}")
            try:
                values = [float(v) for v in row[:41]]
            except ValueError as exc:
                raise ValidationError(
                    f"dataset CSV {path} line {line_no}: {exc}") from exc
            samples.append(LabeledSample(np.array(values[:40]), values[40]))
            pair_ids.append(row[41])
            splits.append(row[42])
    return samples, pair_ids, splits


# ---------------------------------------------------------------------------
# Policy comparison.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolicySetResult:
    policy: str
    set_index: int
    job_ids: tuple
    corun: bool
    configs: tuple
    predicted_s: float
    measured_s: float


@dataclass
class PolicyResult:
    policy: str
    rows: list[PolicySetResult]

    @property
    def total_measured_s(self) -> float:
        return sum(r.measured_s for r in self.rows)

    @property
    def total_predicted_s(self) -> float:
        return sum(r.predicted_s for r in self.rows)


def naive_equal_split(space: ConfigSpace) -> tuple[float, float]:
    """Grid realization of "cap both devices equally": the largest legal
    pair with the smallest cap imbalance that fits the budget."""
    candidates = [
        (c, g)
        for c in space.cpu_caps
        for g in space.gpu_caps
        if c + g <= space.p_total
    ]
    if not candidates:
        raise ValidationError(f"no cap pair fits p_total {space.p_total}")
    candidates.sort(key=lambda cg: (-(cg[0] + cg[1]), abs(cg[0] - cg[1]), -cg[0]))
    c, g = candidates[0]
    return float(c), float(g)


def oracle_best_split(params: OracleParams, job: JobProfile,
                      space: ConfigSpace) -> tuple[float, float]:
    """The split a perfectly informed time-sharing scheduler would pick."""
    splits = enumerate_solo_splits(space)
    if not splits:
        raise ValidationError(f"p_total {space.p_total} is unreachable on the cap grids")
    return min(
        splits,
        key=lambda cg: oracle_slowdown(params, job, None, solo_config(*cg)),
    )


def run_policy(
    policy: str,
    queue: Sequence[JobProfile],
    space: ConfigSpace,
    model,
    params: OracleParams,
    jobs: int = 1,
) -> PolicyResult:
    """Execute one scheduling policy; the oracle supplies measured times.

    ``model`` drives the decisions of the coschedule policy and fills the
    predicted column everywhere; pass an OracleSlowdownModel to make the
    predictions exact.  ``jobs`` bounds the coschedule policy's pair
    optimization threads.
    """
    if policy not in POLICIES:
        raise ValidationError(f"unknown policy {policy!r} (choose from {POLICIES})")
    oracle_model = OracleSlowdownModel(params)
    rows: list[PolicySetResult] = []

    if policy in ("naive-timeshare", "opt-timeshare"):
        for idx, job in enumerate(queue):
            if policy == "naive-timeshare":
                split = naive_equal_split(space)
            else:
                split = oracle_best_split(params, job, space)
            hc = solo_config(*split)
            rows.append(PolicySetResult(
                policy=policy,
                set_index=idx,
                job_ids=(job.job_id,),
                corun=False,
                configs=(hc,),
                predicted_s=estimator.solo_app_time(model, job, hc.cpu_cap, hc.gpu_cap, space),
                measured_s=estimator.solo_app_time(oracle_model, job, hc.cpu_cap, hc.gpu_cap, space),
            ))
        return PolicyResult(policy=policy, rows=rows)

    params_sched = SchedulingParams(window=len(queue))
    sched = scheduler.schedule(
        scheduler.SchedulerInput(tuple(queue), space, params_sched, model), jobs=jobs)
    for idx, (js, cfgs, flag) in enumerate(
            zip(sched.job_sets, sched.configs, sched.corun_flags)):
        rows.append(PolicySetResult(
            policy=policy,
            set_index=idx,
            job_ids=tuple(j.job_id for j in js.jobs),
            corun=bool(flag),
            configs=tuple(cfgs),
            predicted_s=scheduler.set_time(model, js, cfgs, flag, space),
            measured_s=scheduler.set_time(oracle_model, js, cfgs, flag, space),
        ))
    return PolicyResult(policy=policy, rows=rows)


def write_policy_report_csv(results: Sequence[PolicyResult], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["policy", "set_index", "jobs", "config",
                         "predicted_s", "measured_s"])
        for result in results:
            for row in result.rows:
                config_desc = ";".join(
                    f"cpu{hc.cpu_partition}/gpu{hc.gpu_partition}"
                    f"@{hc.cpu_cap:g}+{hc.gpu_cap:g}W"
                    for hc in row.configs)
                writer.writerow([
                    row.policy, row.set_index, "+".join(row.job_ids),
                    config_desc, repr(row.predicted_s), repr(row.measured_s),
                ])


# ---------------------------------------------------------------------------
# Estimation error reporting.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorReportRow:
    set_index: int
    job_ids: tuple
    corun: bool
    predicted_s: float
    measured_s: float

    @property
    def error_pct(self) -> float:
        return 100.0 * (self.predicted_s - self.measured_s) / self.measured_s


@dataclass
class ErrorReport:
    rows: list[ErrorReportRow]

    @property
    def total_predicted_s(self) -> float:
        return sum(r.predicted_s for r in self.rows)

    @property
    def total_measured_s(self) -> float:
        return sum(r.measured_s for r in self.rows)

    @property
    def total_error_pct(self) -> float:
        return 100.0 * (self.total_predicted_s - self.total_measured_s) / self.total_measured_s


def estimation_error_report(
    model,
    params: OracleParams,
    queue: Sequence[JobProfile],
    space: ConfigSpace,
) -> ErrorReport:
    """Schedule with the model, then compare predicted vs oracle-measured
    per-set times (the scheduling-accuracy view of model quality)."""
    result = run_policy("coschedule", queue, space, model, params)
    rows = [
        ErrorReportRow(
            set_index=r.set_index,
            job_ids=r.job_ids,
            corun=r.corun,
            predicted_s=r.predicted_s,
            measured_s=r.measured_s,
        )
        for r in result.rows
    ]
    return ErrorReport(rows=rows)


def write_error_report_csv(report: ErrorReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["set_index", "jobs", "corun", "predicted_s",
                         "measured_s", "error_pct"])
        for row in report.rows:
            writer.writerow([
                row.set_index, "+".join(row.job_ids), int(row.corun),
                repr(row.predicted_s), repr(row.measured_s), repr(row.error_pct),
            ])
        writer.writerow([
            "total", "", "", repr(report.total_predicted_s),
            repr(report.total_measured_s), repr(report.total_error_pct),
        ])
