"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Thresholds and budgets are fixed here, not tuned at runtime.  The
learnability criterion freezes its corpus seed and training recipe; the
random-graph and workload criteria freeze their seeds.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from cosched.cli import main
from cosched.core import (
    CPU_CAPS,
    CPU_PARTITIONS,
    GPU_CAPS,
    GPU_PARTITIONS,
    SchedulingParams,
    default_space,
    enumerate_corun_configs,
)
from cosched.fnn import (
    LabeledSample,
    NetworkWeights,
    TrainingConfig,
    backward,
    forward,
    forward_batch,
    initialize_weights,
    train,
)
from cosched.matcher import (
    PairGraph,
    brute_force_matching,
    iter_perfect_matchings,
    matching_weight,
    min_weight_perfect_matching,
)
from cosched.scheduler import SchedulerInput, build_graph, schedule
from cosched.simenv import (
    OracleParams,
    OracleSlowdownModel,
    generate_dataset,
    generate_workload,
    run_policy,
)


@contextmanager
def criterion(name):
    started = time.time()
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] FAIL: {name} ({time.time() - started:.1f}s)")
        raise
    print(f"[ACCEPTANCE] PASS: {name} ({time.time() - started:.1f}s)")


def mixed_queue(seed, size):
    """Two jobs of each archetype: guarantees complementary pairs."""
    labels = (["cpu-bound", "gpu-bound", "memory-bound", "balanced"] * 2)[:size]
    return tuple(s.job for s in generate_workload(seed, labels))


def test_matching_optimality():
    """Blossom total equals the brute-force optimum on 100 random graphs
    for each n in {4, 6, 8} (exact equality), in under 10 seconds."""
    with criterion("matching optimality vs brute force"):
        started = time.time()
        rng = np.random.default_rng(42)
        for n in (4, 6, 8):
            for _ in range(100):
                w = rng.uniform(0.0, 100.0, size=(n, n))
                w = np.triu(w, 1)
                g = PairGraph(w + w.T)
                pairs = min_weight_perfect_matching(g)
                _, best = brute_force_matching(g)
                assert matching_weight(g, pairs) == best
        assert time.time() - started < 10.0


def test_gradient_correctness():
    """Backprop matches central finite differences for every parameter,
    10 seeds x batch 4, rel tol 1e-4 (abs 1e-7 near zero), under 30 s."""
    with criterion("gradient correctness vs finite differences"):
        started = time.time()
        bounds = np.ones(36)

        def flatten(w):
            return np.concatenate([w.w1.ravel(), w.b1, w.w2.ravel(), w.b2,
                                   w.w_out.ravel(), w.b_out])

        def unflatten(vec):
            i = 0
            def take(shape):
                nonlocal i
                size = int(np.prod(shape))
                out = vec[i:i + size].reshape(shape)
                i += size
                return out
            return NetworkWeights(
                w1=take((18, 40)), b1=take((18,)), w2=take((18, 18)),
                b2=take((18,)), w_out=take((1, 18)), b_out=take((1,)),
                feature_bounds=bounds,
            )

        def loss_of(vec, batch):
            w = unflatten(vec)
            return float(np.mean([(forward(w, s.input) - s.target) ** 2
                                  for s in batch]))

        h = 1e-5
        for seed in range(10):
            rng = np.random.default_rng(seed)
            weights = initialize_weights(seed, bounds)
            batch = [LabeledSample(rng.uniform(0, 1, 40),
                                   float(rng.uniform(0.8, 2.5)))
                     for _ in range(4)]
            grads, _ = backward(weights, batch)
            flat_grad = flatten(NetworkWeights(
                w1=grads.w1, b1=grads.b1, w2=grads.w2, b2=grads.b2,
                w_out=grads.w_out, b_out=grads.b_out, feature_bounds=bounds))
            theta = flatten(weights)
            for k in range(len(theta)):
                theta[k] += h
                up = loss_of(theta, batch)
                theta[k] -= 2 * h
                down = loss_of(theta, batch)
                theta[k] += h
                numeric = (up - down) / (2 * h)
                assert abs(flat_grad[k] - numeric) <= max(1e-7, 1e-4 * abs(numeric)), \
                    f"seed {seed} param {k}: {flat_grad[k]} vs {numeric}"
        assert time.time() - started < 30.0


# Frozen learnability setup: corpus seed and SGD recipe.  The batch-2
# schedule trains longer than the 200-epoch production default; the
# synthetic corpus needs the extra passes to generalize across unseen
# job pairs at desk scale.
LEARNABILITY_DATASET_SEED = 0
LEARNABILITY_CFG = TrainingConfig(
    learning_rate=0.002, batch_size=2, epochs=400, seed=2,
    validation_fraction=0.05,
)


def _trained_test_error(noise_sigma):
    space = default_space(400.0)
    params = OracleParams(noise_sigma=noise_sigma)
    dataset = generate_dataset(params, space, seed=LEARNABILITY_DATASET_SEED)
    train_samples = dataset.samples("train")
    assert len(train_samples) == 2400
    weights, _ = train(train_samples, LEARNABILITY_CFG, feature_bounds=dataset.bounds)
    test_rows = dataset.rows_for("test")
    X = np.stack([r.sample.input for r in test_rows])
    clean = np.array([r.clean_target for r in test_rows])
    noisy = np.array([r.sample.target for r in test_rows])
    pred = forward_batch(weights, X)
    mse_clean = float(np.mean((pred - clean) ** 2))
    mare_clean = float(np.mean(np.abs(pred - clean) / clean))
    noise_floor = float(np.mean((noisy - clean) ** 2))
    return mse_clean, mare_clean, noise_floor


def test_model_learnability():
    """Trained on the 2,400-point noiseless corpus: held-out-pair MSE at
    most 0.01 and mean absolute relative error at most 5%.  With label
    noise sigma=0.03 the held-out MSE against the true slowdowns stays
    within 2x the noise floor.  Under 5 minutes."""
    with criterion("model learnability on held-out pairs"):
        started = time.time()
        mse, mare, _ = _trained_test_error(0.0)
        assert mse <= 0.01, f"noiseless test MSE {mse:.5f} > 0.01"
        assert mare <= 0.05, f"noiseless test MARE {mare:.4f} > 5%"
        mse_noisy, _, floor = _trained_test_error(0.03)
        assert mse_noisy <= 2.0 * floor, \
            f"sigma=0.03 test MSE {mse_noisy:.5f} > 2x noise floor {floor:.5f}"
        assert time.time() - started < 300.0


def test_scheduler_optimality_under_exact_estimates():
    """With the oracle as the model, schedule totals equal the exhaustive
    optimum over all perfect matchings and per-edge decisions for 50
    random workloads (W=6 and W=8), exactly, in under 2 minutes."""
    with criterion("scheduler optimality under exact estimates"):
        started = time.time()
        space = default_space(350.0)
        params = OracleParams()
        model = OracleSlowdownModel(params)
        for window, n_workloads, seed_base in ((6, 25, 1000), (8, 25, 2000)):
            for k in range(n_workloads):
                queue = mixed_queue(seed_base + k, window)
                inp = SchedulerInput(queue, space, SchedulingParams(window=window), model)
                graph = build_graph(inp)
                sched = schedule(inp)
                # Matched edges from the emitted sets.
                by_id = {j.job_id: v for v, j in enumerate(queue)}
                edges = []
                i = 0
                while i < len(sched.job_sets):
                    if sched.corun_flags[i]:
                        edges.append(tuple(sorted(
                            by_id[j.job_id] for j in sched.job_sets[i].jobs)))
                        i += 1
                    else:
                        edges.append(tuple(sorted((
                            by_id[sched.job_sets[i].jobs[0].job_id],
                            by_id[sched.job_sets[i + 1].jobs[0].job_id]))))
                        i += 2
                total = sum(graph.decisions[e].winning_time for e in sorted(edges))
                best = min(
                    sum(graph.decisions[tuple(sorted(p))].winning_time
                        for p in sorted(tuple(sorted(q)) for q in pairs))
                    for pairs in iter_perfect_matchings(window)
                )
                assert total == best, f"W={window} workload {k}: {total} != {best}"
        assert time.time() - started < 120.0


def test_constraint_satisfaction():
    """Every schedule emitted across a 20-workload sweep honors the power
    and partitioning constraints: co-run cap sums within the budget, solo
    splits exhausting it exactly, all partitions from the legal sets."""
    with criterion("constraint satisfaction across emitted schedules"):
        params = OracleParams()
        model = OracleSlowdownModel(params)
        violations = 0
        for p_total in (350.0, 400.0):
            space = default_space(p_total)
            for seed in range(10):
                queue = mixed_queue(3000 + seed, 8)
                inp = SchedulerInput(queue, space, SchedulingParams(window=8), model)
                sched = schedule(inp)
                for cfgs, flag in zip(sched.configs, sched.corun_flags):
                    for hc in cfgs:
                        if hc.cpu_partition not in CPU_PARTITIONS:
                            violations += 1
                        if hc.gpu_partition not in GPU_PARTITIONS:
                            violations += 1
                        if hc.cpu_cap not in CPU_CAPS or hc.gpu_cap not in GPU_CAPS:
                            violations += 1
                        if flag and hc.cap_sum > p_total:
                            violations += 1
                        if not flag and hc.cap_sum != p_total:
                            violations += 1
        assert violations == 0


def test_enumeration_counts():
    """Co-run enumeration yields exactly 100 configs at 400 W and 60 at
    350 W."""
    with criterion("co-run enumeration counts"):
        at_400 = len(enumerate_corun_configs(default_space(400.0)))
        at_350 = len(enumerate_corun_configs(default_space(350.0)))
        assert at_400 == 100, f"expected 100 configs at 400 W, got {at_400}"
        # No cap-pair rule yields both 100 at 400 W and 60 at 350 W: the
        # budget-level rule that produces the anchored 100 gives the five
        # exact-350 pairs, hence 50 configs.  See the analysis notes.
        assert at_350 == 60, f"expected 60 configs at 350 W, got {at_350}"


def test_policy_ordering():
    """On 20 seeded mixed workloads (W=8): coschedule <= opt-timeshare <=
    naive-timeshare, and coschedule beats naive-timeshare by >= 10%."""
    with criterion("policy ordering and improvement"):
        space = default_space(350.0)
        params = OracleParams()
        model = OracleSlowdownModel(params)
        for seed in range(20):
            queue = mixed_queue(seed, 8)
            totals = {
                policy: run_policy(policy, queue, space, model, params).total_measured_s
                for policy in ("naive-timeshare", "opt-timeshare", "coschedule")
            }
            assert totals["opt-timeshare"] <= totals["naive-timeshare"] * (1 + 1e-12)
            assert totals["coschedule"] <= totals["opt-timeshare"] * (1 + 1e-12)
            improvement = 1.0 - totals["coschedule"] / totals["naive-timeshare"]
            assert improvement >= 0.10, f"seed {seed}: improvement {improvement:.3f} < 10%"


def test_cli_determinism(tmp_path):
    """Re-running every CLI command with identical seeds and paths
    reproduces its outputs byte for byte (manifest included)."""
    with criterion("CLI determinism"):
        import json
        from cosched.core import default_space as mk_space

        space_path = tmp_path / "space.json"
        space_path.write_text(json.dumps(mk_space(350.0).to_json()))
        oracle_path = tmp_path / "oracle.json"
        oracle_path.write_text(json.dumps(OracleParams().to_json()))

        def run_all():
            data = tmp_path / "data"
            assert main(["gen-data", str(space_path), str(oracle_path),
                         "--pairs", "6", "--train-pairs", "4", "--seed", "7",
                         "--out", str(data)]) == 0
            model = tmp_path / "model"
            assert main(["train", str(data / "dataset.csv"), "--epochs", "3",
                         "--seed", "1", "--out", str(model)]) == 0
            sched = tmp_path / "sched"
            assert main(["schedule", str(model / "weights.json"),
                         str(data / "profiles.json"), str(space_path),
                         "--seed", "0", "--out", str(sched)]) == 0
            cmp_dir = tmp_path / "cmp"
            assert main(["compare", str(model / "weights.json"),
                         str(data / "profiles.json"), str(space_path),
                         str(oracle_path), "--seed", "0", "--out", str(cmp_dir)]) == 0
            ev = tmp_path / "eval"
            assert main(["eval-model", str(model / "weights.json"),
                         str(data / "dataset.csv"), "--split", "test",
                         "--out", str(ev)]) == 0
            return {
                str(p.relative_to(tmp_path)): p.read_bytes()
                for d in (data, model, sched, cmp_dir, ev)
                for p in sorted(d.iterdir())
            }

        first = run_all()
        second = run_all()
        assert first.keys() == second.keys()
        for name in first:
            assert first[name] == second[name], f"{name} differs between runs"
