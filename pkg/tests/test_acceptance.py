"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its measured runtime (run with ``pytest -s`` to see the
lines as they happen).

Every tolerance is pinned here, in the test, not in the library.
"""

import time

import numpy as np
import pytest

from barenco.atoms import TWO_PI, BlockadeSpec, RotatedBasis, blockade_from_c6, \
    noncollinear_from_blockade
from barenco.dynamics import SimConfig, simulate
from barenco.errors import (RB87_MASS, blockade_error, decay_error, force_drift,
                            leakage_error, mc_position_error, total_budget)
from barenco.numerics import phase_aligned_deviation
from barenco.presets import APPENDIX_A_VDW, preset_blockade, preset_trap
from barenco.protocols import (GateAngles, barenco_matrix, cnot_matrix, compose_ideal,
                               controlled_y_matrix, extract_angles, params_from_blockade,
                               protocol1_angles, protocol2_angles, special_gate)
from barenco.sweeps import SweepSpec, run_sweep

OMEGA30 = 30 * TWO_PI


class Criterion:
    """Times the checked block and prints one PASS/FAIL line."""

    def __init__(self, number: int, label: str, budget_s: float):
        self.number, self.label, self.budget_s = number, label, budget_s

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        verdict = "PASS" if exc_type is None and elapsed < self.budget_s else "FAIL"
        print(f"{verdict}  criterion {self.number:2d}: {self.label} "
              f"[{elapsed * 1e3:.2f} ms / budget {self.budget_s * 1e3:.0f} ms]")
        if exc_type is None:
            assert elapsed < self.budget_s, (
                f"criterion {self.number} exceeded its {self.budget_s}s runtime budget "
                f"({elapsed:.3f}s)")
        return False


def test_criterion_01_bundled_blockade_shifts():
    blockade_from_c6(APPENDIX_A_VDW)  # warm path before timing
    with Criterion(1, "bundled preset gives b01/b02 = (0.558, -0.157) x 2pi MHz", 1e-3):
        b = blockade_from_c6(APPENDIX_A_VDW)
        assert b.b01 / TWO_PI == pytest.approx(0.558, rel=5e-3)
        assert b.b02 / TWO_PI == pytest.approx(-0.157, rel=5e-3)


def test_criterion_02_cnot_and_controlled_y():
    with Criterion(2, "composed special gates equal CNOT and CY to 1e-10", 1.0):
        b = BlockadeSpec(0.558 * TWO_PI, 0.0)
        dev_cnot = phase_aligned_deviation(compose_ideal(special_gate("cnot", b)),
                                           cnot_matrix())
        dev_cy = phase_aligned_deviation(compose_ideal(special_gate("cy", b)),
                                         controlled_y_matrix())
        assert dev_cnot <= 1e-10
        assert dev_cy <= 1e-10


def test_criterion_03_protocol1_oracle_equivalence():
    with Criterion(3, "Protocol I pulse composition matches closed form (400 random)", 10.0):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(400):
            b = BlockadeSpec(rng.uniform(-1, 1) * TWO_PI, rng.uniform(-1, 1) * TWO_PI)
            beta0 = rng.uniform(-np.pi, np.pi)
            t = rng.uniform(0.0, 3.0)
            params = params_from_blockade(1, b, RotatedBasis(beta0, np.pi / 4), t)
            want = barenco_matrix(protocol1_angles(b, t, beta0).angles)
            worst = max(worst, phase_aligned_deviation(compose_ideal(params), want))
        assert worst <= 1e-9


def test_criterion_04_protocol2_oracle_equivalence():
    with Criterion(4, "Protocol II pulse composition matches closed form (20x20 grid)", 30.0):
        b = preset_blockade("appendixA")
        t_max = 2 * np.pi / abs(b.b01 - b.b02)
        worst_aligned = 0.0
        worst_exact = 0.0
        for beta1 in np.linspace(0.01, np.pi / 2 - 0.01, 20):
            for t in np.linspace(t_max / 20, t_max, 20):
                params = params_from_blockade(2, b, RotatedBasis(0.0, beta1), t)
                got = compose_ideal(params)
                want = barenco_matrix(protocol2_angles(params.interaction, t).angles)
                worst_aligned = max(worst_aligned, phase_aligned_deviation(got, want))
                worst_exact = max(worst_exact, float(np.max(np.abs(got - want))))
        assert worst_aligned <= 1e-9
        # the alpha-offset convention of the composition is exactly zero
        assert worst_exact <= 1e-9


def test_criterion_05_alpha_theta_linearity():
    with Criterion(5, "alpha = pi - slope*theta lines for ratios {3, 2, 3/2}", 1.0):
        for ratio, slope in ((3.0, 2.0), (2.0, 3.0), (1.5, 5.0)):
            b = BlockadeSpec(ratio * 0.2 * TWO_PI, 0.2 * TWO_PI)
            thetas = np.linspace(0.01, np.pi, 200)
            crossings = 0
            for theta in thetas:
                res = protocol1_angles(b, T=2 * theta / (b.b01 - b.b02))
                assert abs(res.alpha_raw - (np.pi - slope * res.theta_raw)) <= 1e-12
            # the alpha = pi/4 crossing lies inside the swept range
            theta_cross = (np.pi - np.pi / 4) / slope
            assert thetas[0] < theta_cross < thetas[-1]
            res = protocol1_angles(b, T=2 * theta_cross / (b.b01 - b.b02))
            assert res.alpha_raw == pytest.approx(np.pi / 4, abs=1e-12)


def test_criterion_06_blockade_error_scaling():
    with Criterion(6, "simulated infidelity: slope -2 in Rabi frequency; x3 of E_bl", 60.0):
        b = preset_blockade("appendixA")
        params = params_from_blockade(1, b, RotatedBasis(0.0, np.pi / 4), 0.5)
        omegas = np.array([10.0, 20.0, 40.0, 80.0, 160.0])
        infid = np.array([
            1 - simulate(params, b, SimConfig(omega=o * TWO_PI)).fidelity_vs_ideal
            for o in omegas])
        slope = np.polyfit(np.log(omegas), np.log(infid), 1)[0]
        assert slope == pytest.approx(-2.0, abs=0.3)
        infid30 = 1 - simulate(params, b, SimConfig(omega=OMEGA30)).fidelity_vs_ideal
        assert 1.787e-4 / 3 <= infid30 <= 1.787e-4 * 3


def test_criterion_07_rabi_slowdown_degradation():
    leakage_error(OMEGA30)  # warm path
    with Criterion(7, "blockade+leakage rise for 30 -> 5 MHz Rabi drop", 1e-3):
        b = preset_blockade("appendixA")
        v1 = noncollinear_from_blockade(b, RotatedBasis(0.0, np.pi / 4))
        v2 = noncollinear_from_blockade(b, RotatedBasis(0.0, 3 * np.pi / 8))
        rise1 = (blockade_error(v1, 5 * TWO_PI, 1) + leakage_error(5 * TWO_PI)) \
            - (blockade_error(v1, OMEGA30, 1) + leakage_error(OMEGA30))
        rise2 = (blockade_error(v2, 5 * TWO_PI, 2) + leakage_error(5 * TWO_PI)) \
            - (blockade_error(v2, OMEGA30, 2) + leakage_error(OMEGA30))
        assert rise1 == pytest.approx(6e-3, rel=0.25)
        assert rise2 == pytest.approx(32e-3, rel=0.25)


def test_criterion_08_force_drift():
    force_drift(APPENDIX_A_VDW.c6_01, 20.0, 1.0, RB87_MASS)  # warm path
    with Criterion(8, "pair-force drift: delta_v = 7.6e-4 m/s, delta_x = 3.8e-4 um", 1e-3):
        fd = force_drift(APPENDIX_A_VDW.c6_01, 20.0, 1.0, RB87_MASS)
        assert fd.delta_v == pytest.approx(7.6e-4, rel=0.05)
        assert fd.delta_x == pytest.approx(3.8e-4, rel=0.05)


def test_criterion_09_monte_carlo_position_error():
    with Criterion(9, "MC position error at Ta = 10/200 uK within x2; reproducible", 60.0):
        b = preset_blockade("appendixA")
        params = params_from_blockade(1, b, RotatedBasis(0.0, np.pi / 4), 0.5)
        results = {}
        for ta, target in ((10.0, 1.4e-4), (200.0, 5.2e-3)):
            res = mc_position_error(params, APPENDIX_A_VDW, preset_trap("appendixA", ta),
                                    samples=100_000, seed=7)
            assert target / 2 <= res.mean_error <= target * 2
            results[ta] = res
        rerun = mc_position_error(params, APPENDIX_A_VDW, preset_trap("appendixA", 10.0),
                                  samples=100_000, seed=7)
        assert rerun == results[10.0]


def test_criterion_10_budget_properties_and_fig6(tmp_path):
    with Criterion(10, "budget scaling laws hold; fig6 sweep writes both protocols", 1.0):
        b = preset_blockade("appendixA")
        v = noncollinear_from_blockade(b, RotatedBasis(0.0, np.pi / 4))
        # E_de affine in T
        ts = np.linspace(0.1, 2.0, 8)
        de = np.array([decay_error(t, OMEGA30, 540, 410, np.pi / 4) for t in ts])
        assert np.max(np.abs(np.diff(de, 2))) <= 1e-15
        # E_bl ~ Omega^-2, E_le ~ Omega^2
        assert blockade_error(v, 2 * OMEGA30, 1) * 4 == pytest.approx(
            blockade_error(v, OMEGA30, 1), rel=1e-12)
        assert leakage_error(2 * OMEGA30) == pytest.approx(4 * leakage_error(OMEGA30),
                                                           rel=1e-12)
        # total monotone in T
        totals = [total_budget(v, OMEGA30, t, 540, 540, np.pi / 4).total for t in ts]
        assert all(x < y for x, y in zip(totals, totals[1:]))
        # fig6 CSV covers both protocols
        out = run_sweep(SweepSpec(figure="fig6", out=tmp_path / "fig6.csv", b=b))
        lines = out.read_text().splitlines()
        assert lines[0].startswith("protocol,")
        protocols = {line.split(",")[0] for line in lines[1:]}
        assert protocols == {"1", "2"}


def test_criterion_11_angle_roundtrip():
    with Criterion(11, "extract(barenco(a)) = a for 1000 random canonical triples", 1.0):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            a = GateAngles(rng.uniform(-np.pi, np.pi),
                           rng.uniform(0.0, np.pi / 2),
                           rng.uniform(-np.pi, np.pi))
            ex = extract_angles(barenco_matrix(a))
            assert ex.residual <= 1e-12
            assert a.distance(ex.angles) <= 1e-9
