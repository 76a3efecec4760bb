"""Shared deterministic test profiles with known oracle intensities."""

import numpy as np
import pytest

from cosched.core import JobProfile


def profile_from(job_id, base_time=20.0, **slots):
    """An 18-feature profile, defaulting every counter to 1.0.

    Slots are addressed by counter number (f1..f18) for readability.
    """
    features = np.ones(18)
    for name, value in slots.items():
        assert name.startswith("f")
        features[int(name[1:]) - 1] = value
    return JobProfile(job_id, features, base_time)


def cpu_heavy_profile(job_id="cpu-heavy", base_time=20.0):
    # cpu_dep 0.90, gpu_dep 0.05, cpu_mem 0.125, gpu_mem 0.10
    return profile_from(job_id, base_time, f1=90, f4=3.0, f5=15, f7=10,
                        f11=8, f12=10, f14=10, f15=5)


def gpu_heavy_profile(job_id="gpu-heavy", base_time=20.0):
    # cpu_dep 0.12, gpu_dep 0.90, cpu_mem 0.175, gpu_mem 0.325
    return profile_from(job_id, base_time, f1=12, f4=1.0, f5=25, f7=10,
                        f11=70, f12=30, f14=35, f15=90, f17=80)


def memory_heavy_profile(job_id="memory-heavy", base_time=20.0):
    # cpu_dep 0.50, gpu_dep 0.20, cpu_mem 0.60, gpu_mem 0.775; its best
    # solo split is the even (175, 175) pair with slowdown exactly 1.0.
    return profile_from(job_id, base_time, f1=50, f4=0.8, f5=75, f7=45,
                        f11=85, f12=80, f14=75, f15=20)


@pytest.fixture
def cpu_job():
    return cpu_heavy_profile()


@pytest.fixture
def gpu_job():
    return gpu_heavy_profile()


@pytest.fixture
def mem_job():
    return memory_heavy_profile()
