"""Tests for optimal-manifold exploration."""

import math

import numpy as np
import pytest

from src.models.fock import FockState
from src.models.herald import HeraldSpec
from src.models.optimization import ParameterBox
from src.services.manifold import (
    constraint_jacobian,
    constraint_map,
    explore_manifold,
    tangent_space,
)
from src.services.optimizer import default_objective
from src.utils.config import Settings
from src.utils.exceptions import DegenerateDeviceError


@pytest.fixture
def fast_settings():
    """Coarse search settings."""
    return Settings(
        _env_file=None,
        grid_tau0=5,
        grid_tau1=5,
        grid_theta=7,
        restarts=3,
        max_evaluations=4000,
    )


def single_click_objective():
    return default_objective(FockState.of(1, 2, 1), HeraldSpec(count=1))


def vacuum_objective():
    return default_objective(FockState.of(1, 1, 1), HeraldSpec(count=0))


EXACT_POINT = np.array([1 / math.sqrt(3), 0.5, math.pi])


class TestConstraintMap:
    """Test the residuals that define the optimal set."""

    def test_vanishes_at_optimum(self):
        """Test every residual is zero at a known unit-fidelity optimum."""
        residuals = constraint_map(single_click_objective(), EXACT_POINT, 8 / 27)
        assert np.max(np.abs(residuals)) < 1e-10

    def test_probability_deficit(self):
        """Test the last residual tracks the click-probability gap."""
        residuals = constraint_map(single_click_objective(), EXACT_POINT, 0.5)
        assert residuals[-1] == pytest.approx(8 / 27 - 0.5, abs=1e-10)

    def test_tangent_space(self):
        """Test the optimum lies on a set of positive dimension."""
        dimension, singular, directions = tangent_space(
            single_click_objective(), EXACT_POINT, 8 / 27
        )
        assert 1 <= dimension <= 3
        assert len(directions) == dimension
        assert len(singular) <= 3
        for direction in directions:
            assert np.linalg.norm(direction) == pytest.approx(1.0)

    def test_jacobian_periodic_in_phase(self):
        """Test a phase on the box edge is differenced like any other phase."""
        objective = single_click_objective()
        x = np.array([0.4, 0.3, 0.0])
        h = np.array([0.0, 0.0, 1e-6])
        below = constraint_map(objective, x - h, 0.3)
        assert np.allclose(below, constraint_map(objective, x - h + [0, 0, 2 * math.pi], 0.3))
        central = (constraint_map(objective, x + h, 0.3) - below) / 2e-6
        jacobian = constraint_jacobian(objective, x, 0.3)
        assert np.allclose(jacobian[:, 2], central, atol=1e-6)

    def test_jacobian_at_transmission_edge(self):
        """Test a transmission at 1 is differenced inwards without failing."""
        objective = single_click_objective()
        jacobian = constraint_jacobian(objective, np.array([1.0, 0.5, math.pi]), 8 / 27)
        assert np.all(np.isfinite(jacobian))

    def test_condition_limit_applied(self):
        """Test the residuals honour the configured condition limit."""
        with pytest.raises(DegenerateDeviceError):
            constraint_map(single_click_objective(), EXACT_POINT, 8 / 27, condition_limit=1.0)


class TestExploreManifold:
    """Test sampling of equally optimal parameter sets."""

    def test_no_feasible_optimum(self, fast_settings):
        """Test an infeasible box returns a warning and no members."""
        objective = default_objective(FockState.of(1, 1, 1), HeraldSpec(count=0))
        objective = objective.model_copy(update={"box": ParameterBox(tau1=(1.0, 1.0))})
        sample = explore_manifold(objective, 4, 0, fast_settings)
        assert not sample.ok
        assert sample.dimension == 0
        assert sample.members == []

    @pytest.mark.slow
    def test_single_click_family(self, fast_settings):
        """Test several distinct unit-fidelity optima are found and verified."""
        sample = explore_manifold(single_click_objective(), 4, 0, fast_settings)
        assert sample.ok
        assert len(sample.members) >= 2
        assert sample.dimension >= 1
        assert sample.min_distance > 1e-4
        for report in sample.reports:
            assert report.f_noon >= 1 - 1e-6
            assert report.p_click == pytest.approx(8 / 27, abs=1e-4)

    @pytest.mark.slow
    def test_vacuum_herald_family(self):
        """Test the no-click optimum has at least two distinct settings."""
        settings = Settings(
            _env_file=None, grid_tau0=11, grid_tau1=11, grid_theta=13, restarts=8
        )
        sample = explore_manifold(vacuum_objective(), 4, 0, settings)
        assert sample.ok
        assert len(sample.members) >= 2
        for report in sample.reports:
            assert report.f_noon >= 1 - 1e-6
            assert report.p_click == pytest.approx(4 / 9, abs=1e-4)
