"""Tests for herald projection, NOON fidelity and full experiments."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.stats import unitary_group

from src.models.device import DeviceParams
from src.models.fock import FockState, FockVector
from src.models.herald import HeraldReport, HeraldSpec
from src.services.device import build_smatrix
from src.services.fock import evolve
from src.services.herald import (
    beam_splitter_reference,
    herald_distribution,
    noon_fidelity,
    project_herald,
    run_experiment,
)
from src.utils.exceptions import DegenerateDeviceError, DomainError


def two_mode(n: int, amplitudes: dict[tuple[int, int], complex]) -> FockVector:
    """Build a two-mode vector from a sparse mapping."""
    return FockVector.model_validate(
        {
            "n": n,
            "modes": 2,
            "amplitudes": [
                {"occ": list(occ), "re": amp.real, "im": amp.imag}
                for occ, amp in amplitudes.items()
            ],
        }
    )


class TestProjectHerald:
    """Test projection onto a detector outcome."""

    def test_certain_click(self):
        """Test a basis state heralds with certainty."""
        out = FockVector.basis_state(FockState.of(1, 2, 1))
        p_click, conditional = project_herald(out, HeraldSpec(count=2))
        assert p_click == pytest.approx(1.0)
        assert conditional.amplitude((1, 1)) == pytest.approx(1.0)
        assert conditional.n == 2
        assert conditional.modes == 2

    def test_impossible_click(self):
        """Test an impossible outcome gives zero and a zero conditional."""
        out = FockVector.basis_state(FockState.of(1, 2, 1))
        p_click, conditional = project_herald(out, HeraldSpec(count=1))
        assert p_click == 0.0
        assert conditional.norm_squared() == 0.0

    def test_conditional_normalized(self):
        """Test a possible outcome renormalizes the remaining modes."""
        u = unitary_group.rvs(3, random_state=8)
        out = evolve(u, FockState.of(1, 2, 1))
        p_click, conditional = project_herald(out, HeraldSpec(count=1))
        assert 0.0 < p_click < 1.0
        assert conditional.norm_squared() == pytest.approx(1.0, abs=1e-12)

    def test_completeness(self):
        """Test click probabilities over all counts sum to one."""
        for seed in range(5):
            u = unitary_group.rvs(3, random_state=seed)
            out = evolve(u, FockState.of(1, 2, 1))
            assert sum(herald_distribution(out)) == pytest.approx(1.0, abs=1e-12)

    def test_factorization(self):
        """Test the output is the sum of sqrt(p_k) |k> times each conditional."""
        out = evolve(build_smatrix(DeviceParams.tied(0.4, 0.3, 2.5)), FockState.of(1, 2, 1))
        branches = [project_herald(out, HeraldSpec(count=k)) for k in range(out.n + 1)]
        rebuilt = np.array(
            [
                math.sqrt(branches[occ[1]][0]) * branches[occ[1]][1].amplitude((occ[0], occ[2]))
                for occ in out.basis
            ]
        )
        assert np.max(np.abs(rebuilt - out.amplitudes)) < 1e-10

    def test_count_exceeds_photons(self):
        """Test asking for more photons than present is a domain error."""
        out = FockVector.basis_state(FockState.of(1, 1, 1))
        with pytest.raises(DomainError):
            project_herald(out, HeraldSpec(count=4))

    def test_mode_out_of_range(self):
        """Test heralding a missing mode is a domain error."""
        out = FockVector.basis_state(FockState.of(1, 1, 1))
        with pytest.raises(DomainError):
            project_herald(out, HeraldSpec(mode=3, count=0))

    def test_unnormalized_output(self):
        """Test sub-normalized outputs are refused."""
        out = two_mode(1, {(1, 0): 0.5 + 0j})
        with pytest.raises(DomainError):
            project_herald(out, HeraldSpec(mode=0, count=0))


class TestNoonFidelity:
    """Test the phase-maximized NOON overlap."""

    def test_perfect_noon(self):
        """Test an ideal NOON state with an arbitrary relative phase."""
        state = two_mode(3, {(3, 0): 1 / math.sqrt(2), (0, 3): 1j / math.sqrt(2)})
        assert noon_fidelity(state, 3) == pytest.approx(1.0)

    def test_orthogonal(self):
        """Test |1,2> has no NOON component."""
        state = two_mode(3, {(1, 2): 1 + 0j})
        assert noon_fidelity(state, 3) == 0.0

    def test_single_arm(self):
        """Test |N,0> alone has fidelity one half."""
        state = two_mode(2, {(2, 0): 1 + 0j})
        assert noon_fidelity(state, 2) == pytest.approx(0.5)

    def test_unbalanced(self):
        """Test (|c_N0| + |c_0N|)^2 / 2 for unequal weights."""
        state = two_mode(2, {(2, 0): math.sqrt(0.8) + 0j, (0, 2): -math.sqrt(0.2) + 0j})
        expected = (math.sqrt(0.8) + math.sqrt(0.2)) ** 2 / 2
        assert noon_fidelity(state, 2) == pytest.approx(expected)

    def test_vacuum_order(self):
        """Test N = 0 scores overlap with the vacuum."""
        state = FockVector.basis_state(FockState.of(0, 0))
        assert noon_fidelity(state, 0) == pytest.approx(1.0)

    def test_increases_as_accidentals_vanish(self):
        """Test shrinking the non-NOON components raises the fidelity."""
        fidelities = []
        for eps in (0.4, 0.2, 0.1, 0.01, 0.0):
            arm = math.sqrt((1.0 - 2.0 * eps * eps) / 2.0)
            state = two_mode(
                3, {(3, 0): arm + 0j, (2, 1): eps + 0j, (1, 2): -eps + 0j, (0, 3): 1j * arm}
            )
            fidelities.append(noon_fidelity(state, 3))
        assert all(a < b for a, b in zip(fidelities, fidelities[1:], strict=False))
        assert fidelities[-1] == pytest.approx(1.0)

    def test_wrong_sector(self):
        """Test a mismatched photon number is a domain error."""
        state = two_mode(2, {(1, 1): 1 + 0j})
        with pytest.raises(DomainError):
            noon_fidelity(state, 3)

    def test_wrong_modes(self):
        """Test three-mode states are refused."""
        with pytest.raises(DomainError):
            noon_fidelity(FockVector.basis_state(FockState.of(1, 1, 0)), 2)


class TestRunExperiment:
    """Test the end-to-end pipeline against closed-form device results."""

    def test_beam_splitter_reference(self):
        """Test the unheralded two-photon reference."""
        report = beam_splitter_reference()
        assert report.p_click == 1.0
        assert report.f_noon == pytest.approx(1.0, abs=1e-12)
        assert report.n_target == 2

    def test_vacuum_herald_three_photons(self):
        """Test (1,1,1) with no click in b reaches p = 4/9 at unit fidelity."""
        p = DeviceParams.tied(1 / math.sqrt(3), 0.5, math.pi / 6)
        report = run_experiment(p, FockState.of(1, 1, 1), HeraldSpec(count=0), 3)
        assert report.p_click == pytest.approx(4 / 9, abs=1e-9)
        assert report.f_noon == pytest.approx(1.0, abs=1e-9)

    def test_single_click_three_photons(self):
        """Test (1,2,1) with one click in b reaches p = 8/27 at unit fidelity."""
        p = DeviceParams.tied(1 / math.sqrt(3), 0.5, math.pi)
        report = run_experiment(p, FockState.of(1, 2, 1), HeraldSpec(count=1), 3)
        assert report.p_click == pytest.approx(8 / 27, abs=1e-9)
        assert report.f_noon == pytest.approx(1.0, abs=1e-9)

    def test_single_click_quoted_optimum(self):
        """Test the quoted three-photon optimum lies on the same solution."""
        p = DeviceParams.tied(0.52143, 0.54, math.pi)
        report = run_experiment(p, FockState.of(1, 2, 1), HeraldSpec(count=1), 3)
        assert report.p_click == pytest.approx(8 / 27, abs=1e-4)
        assert report.f_noon > 1 - 1e-4
        accidental = abs(report.conditional.amplitude((1, 2))) ** 2 + abs(
            report.conditional.amplitude((2, 1))
        ) ** 2
        assert accidental < 1e-4

    def test_four_photon_operating_point(self):
        """Test (1,3,1) at the quoted four-photon point."""
        p = DeviceParams.tied(0.50, 0.56, math.pi)
        report = run_experiment(p, FockState.of(1, 3, 1), HeraldSpec(count=1), 4)
        assert report.p_click == pytest.approx(0.2345, abs=5e-3)
        assert report.f_noon == pytest.approx(0.854, abs=5e-3)

    def test_decoupled_centre(self):
        """Test tau1 = 1 keeps both central photons in b."""
        p = DeviceParams.tied(0.3, 1.0, 1.0)
        report = run_experiment(p, FockState.of(1, 2, 1), HeraldSpec(count=2), 2)
        assert report.p_click == pytest.approx(1.0, abs=1e-12)
        assert abs(report.conditional.amplitude((1, 1))) == pytest.approx(1.0)
        assert report.f_noon == pytest.approx(0.0, abs=1e-12)

    def test_impossible_herald_has_no_fidelity(self):
        """Test a herald that cannot fire reports no fidelity."""
        p = DeviceParams.tied(0.3, 1.0, 1.0)
        report = run_experiment(p, FockState.of(1, 1, 1), HeraldSpec(count=0), 3)
        assert report.p_click == 0.0
        assert report.f_noon is None
        assert not report.heralded

    def test_phase_reflection(self):
        """Test theta and 2 pi - theta give the same statistics."""
        first = run_experiment(
            DeviceParams.tied(0.4, 0.6, 1.1), FockState.of(1, 2, 1), HeraldSpec(count=1), 3
        )
        mirrored = run_experiment(
            DeviceParams.tied(0.4, 0.6, 2 * math.pi - 1.1),
            FockState.of(1, 2, 1),
            HeraldSpec(count=1),
            3,
        )
        assert first.p_click == pytest.approx(mirrored.p_click, abs=1e-12)
        assert first.f_noon == pytest.approx(mirrored.f_noon, abs=1e-12)

    def test_target_order_mismatch(self):
        """Test the NOON order must equal the unheralded photon count."""
        with pytest.raises(DomainError):
            run_experiment(
                DeviceParams.tied(0.5, 0.5, 1.0),
                FockState.of(1, 2, 1),
                HeraldSpec(count=1),
                4,
            )

    def test_degenerate_parameters(self):
        """Test degenerate parameters propagate the device error."""
        with pytest.raises(DegenerateDeviceError):
            run_experiment(
                DeviceParams.tied(1.0, 1.0, 0.0),
                FockState.of(1, 1, 1),
                HeraldSpec(count=0),
                3,
            )

    def test_report_serialization(self):
        """Test the JSON layout of a report."""
        p = DeviceParams.tied(1 / math.sqrt(3), 0.5, math.pi)
        report = run_experiment(p, FockState.of(1, 2, 1), HeraldSpec(count=1), 3)
        data = report.model_dump(mode="json")
        assert set(data) == {"p_click", "f_noon", "n_target", "conditional", "params"}
        assert data["params"]["tau1"] == 0.5
        assert data["conditional"]["modes"] == 2

    def test_report_probability_bounds(self):
        """Test probabilities above one are rejected by the model."""
        with pytest.raises(ValidationError):
            HeraldReport(
                p_click=1.5,
                conditional=FockVector.basis_state(FockState.of(1, 1)),
                n_target=2,
            )

    def test_smatrix_and_report_agree(self):
        """Test the report matches a manual evolve and project."""
        p = DeviceParams.tied(0.45, 0.62, 2.7)
        out = evolve(build_smatrix(p), FockState.of(1, 2, 1))
        p_click, conditional = project_herald(out, HeraldSpec(count=1))
        report = run_experiment(p, FockState.of(1, 2, 1), HeraldSpec(count=1), 3)
        assert report.p_click == p_click
        assert np.array_equal(report.conditional.amplitudes, conditional.amplitudes)
