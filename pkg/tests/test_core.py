import numpy as np
import pytest

from cosched.core import (
    CPU_CAPS,
    GPU_CAPS,
    ConfigSpace,
    HardwareConfig,
    JobProfile,
    JobSet,
    Schedule,
    SchedulingParams,
    ValidationError,
    default_space,
    enumerate_corun_configs,
    enumerate_solo_splits,
    normalize_input,
    solo_config,
)


def make_profile(job_id="j0", fill=1.0, base_time=10.0):
    return JobProfile(job_id, np.full(18, fill), base_time)


def ones_bounds():
    return np.ones(36)


class TestJobProfile:
    def test_valid_roundtrip(self):
        p = JobProfile("a", np.arange(18, dtype=float), 3.5)
        again = JobProfile.from_json(p.to_json())
        assert again.job_id == "a"
        assert np.array_equal(again.features, p.features)
        assert again.base_time == 3.5

    def test_feature_count_enforced(self):
        with pytest.raises(ValidationError):
            JobProfile("a", np.ones(17), 1.0)

    def test_nonfinite_feature_names_index(self):
        feats = np.ones(18)
        feats[7] = np.nan
        with pytest.raises(ValidationError, match="feature 7"):
            JobProfile("a", feats, 1.0)

    def test_negative_feature_rejected(self):
        feats = np.ones(18)
        feats[3] = -0.1
        with pytest.raises(ValidationError, match="feature 3"):
            JobProfile("a", feats, 1.0)

    def test_base_time_positive(self):
        with pytest.raises(ValidationError):
            make_profile(base_time=0.0)

    def test_features_readonly(self):
        p = make_profile()
        with pytest.raises(ValueError):
            p.features[0] = 5.0


class TestHardwareConfig:
    def test_partition_membership(self):
        with pytest.raises(ValidationError):
            HardwareConfig((10, 22), (4, 3), 100, 150)
        with pytest.raises(ValidationError):
            HardwareConfig((16, 16), (5, 2), 100, 150)

    def test_cap_membership(self):
        with pytest.raises(ValidationError):
            HardwareConfig((16, 16), (4, 3), 110, 150)
        with pytest.raises(ValidationError):
            HardwareConfig((16, 16), (4, 3), 100, 140)

    def test_solo_corun_degenerate_flags(self):
        solo = HardwareConfig((32, 0), (8, 0), 250, 250)
        corun = HardwareConfig((16, 16), (4, 3), 100, 150)
        mixed = HardwareConfig((16, 16), (8, 0), 100, 150)
        assert solo.is_solo and not solo.is_corun and not solo.is_degenerate
        assert corun.is_corun and not corun.is_solo and not corun.is_degenerate
        assert mixed.is_degenerate and not mixed.is_solo and not mixed.is_corun

    def test_reversed_partitions(self):
        hc = HardwareConfig((24, 8), (3, 4), 125, 225)
        rev = hc.reversed_partitions()
        assert rev.cpu_partition == (8, 24)
        assert rev.gpu_partition == (4, 3)
        assert rev.cpu_cap == hc.cpu_cap and rev.gpu_cap == hc.gpu_cap

    def test_json_roundtrip(self):
        hc = HardwareConfig((2, 30), (4, 3), 225, 150)
        assert HardwareConfig.from_json(hc.to_json()) == hc


class TestConfigSpace:
    def test_defaults(self):
        space = default_space()
        assert space.p_total == 400.0
        assert space.p_max == 500.0
        assert space.corun_cpu_partitions == ((2, 30), (8, 24), (16, 16), (24, 8), (30, 2))
        assert space.corun_gpu_partitions == ((3, 4), (4, 3))

    def test_budget_bounds(self):
        with pytest.raises(ValidationError):
            ConfigSpace(p_total=600.0)
        with pytest.raises(ValidationError):
            ConfigSpace(p_total=-5.0)
        ConfigSpace(p_total=123.0)  # arbitrary positive budgets allowed

    def test_json_roundtrip(self):
        space = default_space(350.0)
        again = ConfigSpace.from_json(space.to_json())
        assert again == space


class TestSchedulingParams:
    def test_concurrency_fixed_at_two(self):
        with pytest.raises(ValidationError):
            SchedulingParams(window=4, concurrency=3)

    def test_window_even_positive(self):
        SchedulingParams(window=6)
        with pytest.raises(ValidationError):
            SchedulingParams(window=5)
        with pytest.raises(ValidationError):
            SchedulingParams(window=0)


class TestJobSetAndSchedule:
    def test_job_set_size(self):
        a, b = make_profile("a"), make_profile("b")
        assert len(JobSet((a,))) == 1
        assert len(JobSet((a, b))) == 2
        with pytest.raises(ValidationError):
            JobSet(())
        with pytest.raises(ValidationError):
            JobSet((a, b, make_profile("c")))

    def test_schedule_shape_constraints(self):
        a, b = make_profile("a"), make_profile("b")
        corun_hc = HardwareConfig((16, 16), (4, 3), 150, 200)
        solo_hc = solo_config(200, 150)
        Schedule((JobSet((a, b)),), ((corun_hc,),), (True,))
        Schedule((JobSet((a,)), JobSet((b,))), ((solo_hc,), (solo_hc,)), (False, False))
        with pytest.raises(ValidationError):
            Schedule((JobSet((a, b)),), ((corun_hc,),), (False,))
        with pytest.raises(ValidationError):
            Schedule((JobSet((a,)),), ((solo_hc, solo_hc),), (False,))

    def test_schedule_partition_check(self):
        a, b = make_profile("a"), make_profile("b")
        sched = Schedule(
            (JobSet((a,)), JobSet((b,))),
            ((solo_config(200, 150),), (solo_config(200, 150),)),
            (False, False),
        )
        sched.validate_against([a, b], default_space(350.0))
        with pytest.raises(ValidationError):
            sched.validate_against([a, make_profile("c")], default_space(350.0))


class TestNormalizeInput:
    def test_solo_max_resources(self):
        p = make_profile(fill=0.5)
        hc = solo_config(250, 250)
        vec = normalize_input(p, None, hc, default_space(), ones_bounds())
        assert vec.shape == (40,)
        assert list(vec[:4]) == [1.0, 1.0, 1.0, 1.0]
        assert np.all(vec[22:] == 0.0)

    def test_corun_partition_share(self):
        p, q = make_profile("a"), make_profile("b")
        hc = HardwareConfig((16, 16), (4, 3), 250, 250)
        vec = normalize_input(p, q, hc, default_space(), ones_bounds())
        assert vec[0] == 0.5
        assert vec[1] == 4 / 8

    def test_feature_division(self):
        feats = np.ones(18)
        feats[3] = 1.2
        p = JobProfile("a", feats, 1.0)
        bounds = ones_bounds() * 2.4
        vec = normalize_input(p, None, solo_config(250, 250), default_space(), bounds)
        assert vec[4 + 3] == pytest.approx(0.5)

    def test_clamped_to_unit_interval(self):
        p = make_profile(fill=10.0)
        vec = normalize_input(p, None, solo_config(250, 250), default_space(), ones_bounds())
        assert np.all(vec[4:22] == 1.0)

    def test_bad_bounds_rejected(self):
        p = make_profile()
        with pytest.raises(ValidationError):
            normalize_input(p, None, solo_config(250, 250), default_space(), np.ones(35))
        bounds = ones_bounds()
        bounds[5] = 0.0
        with pytest.raises(ValidationError, match="entry 5"):
            normalize_input(p, None, solo_config(250, 250), default_space(), bounds)

    def test_pure_function(self):
        p, q = make_profile("a", fill=2.0), make_profile("b", fill=3.0)
        hc = HardwareConfig((8, 24), (3, 4), 125, 225)
        bounds = ones_bounds() * 4.0
        v1 = normalize_input(p, q, hc, default_space(), bounds)
        v2 = normalize_input(p, q, hc, default_space(), bounds)
        assert np.array_equal(v1, v2)
        assert np.array_equal(p.features, np.full(18, 2.0))

    def test_role_swap_blocks_and_partition_slots(self):
        rng = np.random.default_rng(5)
        p = JobProfile("a", rng.uniform(0.1, 1.0, 18), 1.0)
        q = JobProfile("b", rng.uniform(0.1, 1.0, 18), 1.0)
        bounds = ones_bounds()
        space = default_space()
        for cpu_part in space.corun_cpu_partitions:
            for gpu_part in space.corun_gpu_partitions:
                hc = HardwareConfig(cpu_part, gpu_part, 150, 200)
                fwd = normalize_input(p, q, hc, space, bounds)
                rev = normalize_input(q, p, hc.reversed_partitions(), space, bounds)
                # Feature blocks swap places.
                assert np.array_equal(fwd[4:22], rev[22:])
                assert np.array_equal(fwd[22:], rev[4:22])
                # CPU co-run partitions split all 32 cores, so the share
                # slot complements exactly; the GPU pairs sum to 7 of 8
                # GPCs (one disabled), so it must not.
                assert rev[0] == 1.0 - fwd[0]
                assert rev[1] != 1.0 - fwd[1]
                assert rev[2] == fwd[2] and rev[3] == fwd[3]


class TestEnumerateCorunConfigs:
    def test_count_at_400(self):
        assert len(enumerate_corun_configs(default_space(400.0))) == 100

    def test_count_at_350(self):
        assert len(enumerate_corun_configs(default_space(350.0))) == 50

    def test_count_matches_independent_recount(self):
        for p_total in (350.0, 400.0, 375.0, 500.0):
            space = ConfigSpace(p_total=p_total)
            legal_pairs = [
                (c, g)
                for c in CPU_CAPS
                for g in GPU_CAPS
                if c + g <= p_total and c + g in space.cap_sum_levels
            ]
            expected = 5 * 2 * len(legal_pairs)
            assert len(enumerate_corun_configs(space)) == expected

    def test_below_minimum_budget_empty(self):
        assert enumerate_corun_configs(default_space(250.0)) == []
        assert enumerate_corun_configs(default_space(249.0)) == []

    def test_all_corun_and_within_budget(self):
        space = default_space(400.0)
        configs = enumerate_corun_configs(space)
        assert len(set(configs)) == len(configs)
        for hc in configs:
            assert hc.is_corun
            assert hc.cap_sum <= space.p_total
            assert space.contains(hc)

    def test_deterministic_lexicographic_order(self):
        space = default_space(350.0)
        configs = enumerate_corun_configs(space)
        assert configs == enumerate_corun_configs(space)
        keys = [
            (space.cpu_partitions.index(hc.cpu_partition),
             space.gpu_partitions.index(hc.gpu_partition),
             space.cpu_caps.index(hc.cpu_cap),
             space.gpu_caps.index(hc.gpu_cap))
            for hc in configs
        ]
        assert keys == sorted(keys)


class TestEnumerateSoloSplits:
    def test_splits_at_350(self):
        assert enumerate_solo_splits(default_space(350.0)) == [
            (100.0, 250.0), (125.0, 225.0), (150.0, 200.0),
            (175.0, 175.0), (200.0, 150.0),
        ]

    def test_splits_at_400(self):
        assert enumerate_solo_splits(default_space(400.0)) == [
            (150.0, 250.0), (175.0, 225.0), (200.0, 200.0),
            (225.0, 175.0), (250.0, 150.0),
        ]

    def test_splits_match_grid_scan(self):
        for p_total in (250.0, 300.0, 350.0, 400.0, 500.0):
            space = default_space(min(p_total, 500.0))
            brute = {(float(c), float(g)) for c in CPU_CAPS for g in GPU_CAPS
                     if c + g == p_total}
            assert set(enumerate_solo_splits(space)) == brute

    def test_off_grid_budget_empty(self):
        assert enumerate_solo_splits(default_space(351.0)) == []
