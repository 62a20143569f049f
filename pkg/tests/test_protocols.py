"""Closed-form protocol tests: gate matrix, angle formulas, pulse-map oracle,
special gates, angle extraction."""

import numpy as np
import pytest

from barenco.atoms import TWO_PI, BlockadeSpec, RotatedBasis, noncollinear_from_blockade
from barenco.exceptions import ContractViolationError, InfeasibleGateError
from barenco.numerics import phase_aligned_deviation, unitarity_defect
from barenco.protocols import (GateAngles, ProtocolParams,
                               barenco_matrix, cnot_matrix, compose_ideal,
                               controlled_y_matrix, extract_angles, params_from_blockade,
                               protocol1_angles, protocol2_angles, special_gate)

APPENDIX_B = BlockadeSpec(0.558 * TWO_PI, -0.157 * TWO_PI)


def raw_gate_matrix(alpha, theta, phi):
    """Gate matrix straight from the formula, no canonicalization (test oracle)."""
    u = np.eye(4, dtype=complex)
    u[2, 2] = u[3, 3] = np.exp(1j * alpha) * np.cos(theta)
    u[2, 3] = -1j * np.exp(1j * (alpha - phi)) * np.sin(theta)
    u[3, 2] = -1j * np.exp(1j * (alpha + phi)) * np.sin(theta)
    return u


class TestGateAngles:
    def test_canonical_ranges(self):
        rng = np.random.default_rng(0)
        for _ in range(500):
            a = GateAngles(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10))
            assert -np.pi < a.alpha <= np.pi
            assert 0.0 <= a.theta <= np.pi / 2
            assert -np.pi < a.phi <= np.pi

    def test_canonicalization_preserves_matrix(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            alpha, theta, phi = rng.uniform(-10, 10, size=3)
            canon = GateAngles(alpha, theta, phi)
            if canon.phi_undefined:
                continue
            assert np.max(np.abs(raw_gate_matrix(alpha, theta, phi)
                                 - barenco_matrix(canon))) <= 1e-12

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            a = GateAngles(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10))
            again = GateAngles(a.alpha, a.theta, a.phi, a.phi_undefined)
            assert (a.alpha, a.theta, a.phi, a.phi_undefined) == (
                again.alpha, again.theta, again.phi, again.phi_undefined)

    def test_phi_zeroed_when_undefined(self):
        a = GateAngles(0.3, 0.0, 2.0)
        assert a.phi == 0.0 and a.phi_undefined


class TestBarencoMatrix:
    def test_zero_angles_identity(self):
        assert np.allclose(barenco_matrix(GateAngles(0, 0, 0)), np.eye(4))

    def test_cnot_point(self):
        u = barenco_matrix(GateAngles(np.pi / 2, np.pi / 2, 0.0))
        want = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
        assert np.max(np.abs(u - want)) <= 1e-15

    def test_b1_specialization_entrywise(self):
        theta = 1.234
        u = barenco_matrix(GateAngles(np.pi / 4, theta, np.pi / 2))
        s, c = np.sin(theta), np.cos(theta)
        assert u[2, 2] == pytest.approx(np.exp(1j * np.pi / 4) * c)
        assert u[2, 3] == pytest.approx(-1j * np.exp(-1j * np.pi / 4) * s)
        assert u[3, 2] == pytest.approx(1j * np.exp(-1j * np.pi / 4) * s)
        assert u[3, 3] == pytest.approx(np.exp(1j * np.pi / 4) * c)

    def test_always_unitary(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            u = barenco_matrix(GateAngles(*rng.uniform(-5, 5, size=3)))
            assert unitarity_defect(u) <= 1e-14


class TestProtocol1Angles:
    def test_cnot_point(self):
        b = BlockadeSpec(0.6 * TWO_PI, 0.0)
        res = protocol1_angles(b, T=np.pi / b.b01, beta0=0.0)
        assert res.angles.alpha == pytest.approx(np.pi / 2, abs=1e-12)
        assert res.angles.theta == pytest.approx(np.pi / 2, abs=1e-12)
        assert res.angles.phi == 0.0

    def test_zero_wait(self):
        res = protocol1_angles(APPENDIX_B, T=0.0)
        assert res.angles.alpha == pytest.approx(np.pi)
        assert res.angles.theta == 0.0
        assert res.angles.phi_undefined

    def test_bundled_interaction_half_microsecond(self):
        res = protocol1_angles(APPENDIX_B, T=0.5)
        assert res.angles.alpha == pytest.approx(np.pi * (1 - 0.2005), abs=1e-12)
        assert res.angles.theta == pytest.approx(0.3575 * np.pi, abs=1e-12)

    def test_linear_relation_raw_values(self):
        for ratio in (3.0, 2.0, 1.5, -0.7, 5.0):
            b = BlockadeSpec(ratio * 0.2 * TWO_PI, 0.2 * TWO_PI)
            slope = (b.b01 + b.b02) / (b.b01 - b.b02)
            for t in np.linspace(0.01, 4.0, 40):
                res = protocol1_angles(b, t)
                assert res.slope == pytest.approx(slope)
                assert abs(res.alpha_raw - (np.pi - slope * res.theta_raw)) <= 1e-12

    def test_negative_exchange_sign_convention(self):
        b = BlockadeSpec(0.1 * TWO_PI, 0.5 * TWO_PI)  # b01 < b02: ve < 0 at pi/4
        res = protocol1_angles(b, T=0.3)
        assert res.theta_raw < 0
        # canonical theta is folded positive with the phi shift
        assert res.angles.theta >= 0

    def test_degenerate_shifts_flagged(self):
        res = protocol1_angles(BlockadeSpec(0.4, 0.4), T=1.0)
        assert res.non_entangling
        assert res.angles.theta == 0.0
        assert res.slope is None


class TestProtocol2Angles:
    def test_zero_wait_identity_class(self):
        v = noncollinear_from_blockade(APPENDIX_B, RotatedBasis(0.0, 3 * np.pi / 8))
        res = protocol2_angles(v, 0.0)
        assert res.angles.theta == 0.0
        assert res.angles.alpha == 0.0

    def test_equal_diagonal_pins_phi(self):
        v = noncollinear_from_blockade(APPENDIX_B, RotatedBasis(0.0, np.pi / 4))
        for t in np.linspace(0.05, 1.5, 30):
            res = protocol2_angles(v, t)
            if res.angles.phi_undefined:
                continue
            assert min(abs(res.phi_raw), abs(abs(res.phi_raw) - np.pi)) <= 1e-9

    def test_b1_condition_quarter_alpha(self):
        # b01 + b02 = -vbar/2 at ratio -b01/b02 = 3/5 with b01 > 0
        b = BlockadeSpec(0.3 * TWO_PI, -0.5 * TWO_PI)
        vbar = 0.5 * abs(b.b01 - b.b02)
        for beta1 in (np.pi / 16, np.pi / 8, 0.4):
            v = noncollinear_from_blockade(b, RotatedBasis(0.0, beta1))
            res = protocol2_angles(v, T=np.pi / (2 * vbar))
            assert res.alpha_raw == pytest.approx(np.pi / 4, abs=1e-9)
            assert abs(res.phi_raw) == pytest.approx(np.pi / 2, abs=1e-9)

    def test_trig_consistency_over_grid(self):
        for beta1 in np.linspace(0.05, np.pi / 2 - 0.05, 12):
            v = noncollinear_from_blockade(APPENDIX_B, RotatedBasis(0.0, beta1))
            for t in np.linspace(0.01, 2.0, 25):
                res = protocol2_angles(v, t)
                assert res.sin_theta**2 + res.cos_theta**2 == pytest.approx(1.0, abs=1e-9)
                assert res.sin_phi**2 + res.cos_phi**2 == pytest.approx(1.0, abs=1e-9)

    def test_requires_zero_beta0(self):
        v = noncollinear_from_blockade(APPENDIX_B, RotatedBasis(0.3, 0.5))
        with pytest.raises(ContractViolationError):
            protocol2_angles(v, 0.5)


class TestComposeIdeal:
    def test_protocol1_oracle_equivalence(self):
        rng = np.random.default_rng(11)
        for _ in range(150):
            b = BlockadeSpec(rng.uniform(-1, 1) * TWO_PI, rng.uniform(-1, 1) * TWO_PI)
            beta0 = rng.uniform(-np.pi, np.pi)
            t = rng.uniform(0, 3.0)
            params = params_from_blockade(1, b, RotatedBasis(beta0, np.pi / 4), t)
            got = compose_ideal(params)
            want = barenco_matrix(protocol1_angles(b, t, beta0).angles)
            assert phase_aligned_deviation(got, want) <= 1e-9

    def test_protocol2_oracle_equivalence(self):
        for beta1 in np.linspace(0.1, np.pi / 2 - 0.1, 8):
            for t in np.linspace(0.1, 2.0, 8):
                params = params_from_blockade(2, APPENDIX_B, RotatedBasis(0.0, beta1), t)
                got = compose_ideal(params)
                want = barenco_matrix(protocol2_angles(params.interaction, t).angles)
                assert phase_aligned_deviation(got, want) <= 1e-9

    def test_zero_wait_protocol1(self):
        params = params_from_blockade(1, APPENDIX_B, RotatedBasis(0.0, np.pi / 4), 0.0)
        got = compose_ideal(params)
        assert np.max(np.abs(got - np.diag([1, 1, -1, -1]))) <= 1e-12

    def test_first_two_states_invariant_exactly(self):
        params = params_from_blockade(2, APPENDIX_B, RotatedBasis(0.0, 0.9), 0.7)
        u = compose_ideal(params)
        assert u[0, 0] == 1.0 and u[1, 1] == 1.0
        assert np.max(np.abs(u[0:2, 2:4])) == 0.0
        assert np.max(np.abs(u[2:4, 0:2])) == 0.0

    def test_result_unitary(self):
        params = params_from_blockade(2, APPENDIX_B, RotatedBasis(0.0, 1.1), 1.3)
        assert unitarity_defect(compose_ideal(params)) <= 1e-10

    def test_protocol_param_validation(self):
        v = noncollinear_from_blockade(APPENDIX_B, RotatedBasis(0.0, 0.3))
        with pytest.raises(ContractViolationError):
            ProtocolParams(1, v, 0.5)  # v1 != v2
        v0 = noncollinear_from_blockade(APPENDIX_B, RotatedBasis(0.4, 0.3))
        with pytest.raises(ContractViolationError):
            ProtocolParams(2, v0, 0.5)  # beta0 != 0


class TestSpecialGates:
    def test_cnot(self):
        b = BlockadeSpec(0.558 * TWO_PI, 0.0)
        params = special_gate("cnot", b)
        assert params.T == pytest.approx(np.pi / b.b01)
        u = compose_ideal(params)
        assert phase_aligned_deviation(u, cnot_matrix()) <= 1e-10
        assert u[3, 2] == pytest.approx(1.0)  # |10> -> |11>
        assert u[2, 3] == pytest.approx(1.0)

    def test_controlled_y(self):
        b = BlockadeSpec(0.558 * TWO_PI, 0.0)
        params = special_gate("cy", b)
        u = compose_ideal(params)
        assert phase_aligned_deviation(u, controlled_y_matrix()) <= 1e-10
        assert u[3, 2] == pytest.approx(-1j)  # |10> -> -i|11>
        assert u[2, 3] == pytest.approx(+1j)  # |11> -> +i|10>

    def test_b1_angles(self):
        b = BlockadeSpec(0.3 * TWO_PI, -0.5 * TWO_PI)
        params = special_gate("b1", b)
        res = protocol2_angles(params.interaction, params.T)
        assert res.alpha_raw == pytest.approx(np.pi / 4, abs=1e-9)
        assert abs(res.phi_raw) == pytest.approx(np.pi / 2, abs=1e-9)

    def test_b1_negative_branch(self):
        b = BlockadeSpec(-0.5 * TWO_PI, 0.3 * TWO_PI)  # -b01/b02 = 5/3, b01 < 0
        params = special_gate("b1", b)
        res = protocol2_angles(params.interaction, params.T)
        assert res.alpha_raw == pytest.approx(np.pi / 4, abs=1e-9)

    def test_infeasibility_messages(self):
        with pytest.raises(InfeasibleGateError, match="b02 = 0"):
            special_gate("cnot", BlockadeSpec(1.0, 0.3))
        with pytest.raises(InfeasibleGateError, match="b01 > 0"):
            special_gate("cy", BlockadeSpec(-1.0, 0.0))
        with pytest.raises(InfeasibleGateError, match="5/3"):
            special_gate("b1", BlockadeSpec(1.0, -0.9))
        with pytest.raises(InfeasibleGateError, match="sign"):
            special_gate("b1", BlockadeSpec(0.5 * TWO_PI, -0.3 * TWO_PI))  # ratio 5/3, wrong sign


class TestExtractAngles:
    def test_roundtrip_random_canonical(self):
        rng = np.random.default_rng(12)
        for _ in range(300):
            a = GateAngles(rng.uniform(-np.pi, np.pi),
                           rng.uniform(0.0, np.pi / 2),
                           rng.uniform(-np.pi, np.pi))
            ex = extract_angles(barenco_matrix(a))
            assert ex.residual <= 1e-12
            assert a.distance(ex.angles) <= 1e-9

    def test_cnot(self):
        ex = extract_angles(cnot_matrix())
        assert (ex.angles.alpha, ex.angles.theta, ex.angles.phi) == pytest.approx(
            (np.pi / 2, np.pi / 2, 0.0))

    def test_phase_flip_gate(self):
        ex = extract_angles(np.diag([1, 1, -1, -1]).astype(complex))
        assert ex.angles.alpha == pytest.approx(np.pi)
        assert ex.angles.theta == 0.0
        assert ex.angles.phi == 0.0 and ex.angles.phi_undefined

    def test_global_phase_removed(self):
        a = GateAngles(0.4, 0.9, -1.2)
        ex = extract_angles(np.exp(0.77j) * barenco_matrix(a))
        assert a.distance(ex.angles) <= 1e-9
        assert ex.residual <= 1e-12

    def test_large_residual_flagged_not_fatal(self):
        u = np.eye(4, dtype=complex)
        u[2, 2] = 0.7  # clearly not of gate form
        ex = extract_angles(u)
        assert "large_residual" in ex.flags
