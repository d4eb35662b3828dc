"""Performance tests for the numerical kernels."""

import math

import numpy as np
import pytest

from src.models.device import DeviceParams
from src.models.fock import FockState
from src.models.herald import HeraldSpec
from src.services.device import build_smatrix
from src.services.fock import PermanentWorkspace, evolve, permanent
from src.services.herald import run_experiment


@pytest.fixture
def workspace():
    """Workspace reused across benchmark rounds."""
    return PermanentWorkspace(max_photons=12)


@pytest.fixture
def random_matrix():
    """Dense complex 8x8 matrix."""
    rng = np.random.default_rng(0)
    return rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))


@pytest.fixture
def quoted_params():
    """Quoted three-photon optimum."""
    return DeviceParams.tied(0.52, 0.54, math.pi)


def test_permanent_performance(benchmark, workspace, random_matrix):
    """Benchmark Ryser's formula on an 8x8 matrix."""
    result = benchmark(permanent, random_matrix, workspace)
    assert np.isfinite(abs(result))


def test_build_smatrix_performance(benchmark, quoted_params):
    """Benchmark the boundary-condition solve."""
    s = benchmark(build_smatrix, quoted_params)
    assert s.residual < 1e-10


def test_evolve_performance(benchmark, workspace, quoted_params):
    """Benchmark five-photon evolution through the device."""
    s = build_smatrix(quoted_params)
    out = benchmark(evolve, s, FockState.of(1, 3, 1), workspace)
    assert abs(out.norm_squared() - 1.0) < 1e-10


def test_run_experiment_performance(benchmark, quoted_params):
    """Benchmark one full heralded evaluation, the optimizer's inner loop."""
    report = benchmark(
        run_experiment, quoted_params, FockState.of(1, 2, 1), HeraldSpec(count=1), 3
    )
    assert report.f_noon > 0.999
