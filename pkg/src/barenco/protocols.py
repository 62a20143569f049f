"""Closed-form gate construction for the two controlled-rotation protocols.

Gate matrix convention (ordered basis {|00>, |01>, |10>, |11>}):

    [[1, 0, 0,                       0                      ],
     [0, 1, 0,                       0                      ],
     [0, 0, e^{ia} cos(t),           -i e^{i(a-p)} sin(t)   ],
     [0, 0, -i e^{i(a+p)} sin(t),    e^{ia} cos(t)          ]]

with angles (a, t, p) = (alpha, theta, phi).  The matrix is invariant under
(theta, phi) -> (-theta, phi+pi) and under
(alpha, theta, phi) -> (alpha+pi, pi-theta, phi+pi), so canonical angles fold
theta into [0, pi/2] (alpha restricted to (-pi/2, pi/2] on the theta = pi/2
boundary) with alpha, phi in (-pi, pi]; phi is reported as 0 and flagged when
sin(theta) = 0.

Protocol I (two pi pulses around one wait of duration T, needs v1 = v2):

    alpha = pi - (b01 + b02) T / 2
    theta = (b01 - b02) T / 2        (sign follows the exchange coefficient)
    phi   = beta0

Note the phi sign: composing the stated pulse maps yields exactly the matrix
above with phi = +beta0, and the controlled-Y construction (beta0 = -pi/2,
|10> -> -i|11>) confirms it.

Protocol II (six pi pulses around two waits of duration T each, beta0 = 0):

    alpha     = -T (v1 + v2)
    sin theta = 2 eta1 eta2 sqrt((eta1^2-eta2^2)^2 (cos 2T vbar - 1)^2
                                  + sin^2 2T vbar)
    cos theta = 1 + 4 eta1^2 eta2^2 (cos 2T vbar - 1)
    sin phi   = 2 eta1 eta2 (eta1^2-eta2^2)(cos 2T vbar - 1) / |sin theta|
    cos phi   = 2 eta1 eta2 sin(2T vbar) / |sin theta|

``compose_ideal`` rebuilds the gate by multiplying the exact pulse maps and
wait propagators on the full two-atom space and is the independent oracle for
both angle sets (it shares no formula with them).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .atoms import BlockadeSpec, NoncollinearV, RotatedBasis, noncollinear_from_blockade
from .exceptions import ContractViolationError, InfeasibleGateError

PHI_UNDEFINED_TOL = 1e-12

# two-atom composition basis: control {|0>, |1>, |r1>} x target {|0>, |1>, |r2>, |r3>},
# index = 4*control + target
COMPUTATIONAL_INDICES = (0, 1, 4, 5)
_R1R2, _R1R3 = 10, 11


def _wrap(x: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    y = np.mod(x, 2.0 * np.pi)
    return float(y - 2.0 * np.pi if y > np.pi else y)


def angle_distance(a: float, b: float) -> float:
    """Distance between two angles modulo 2*pi."""
    return abs(_wrap(a - b))


@dataclass(frozen=True)
class GateAngles:
    """Canonical (alpha, theta, phi) triple; construction canonicalizes."""

    alpha: float
    theta: float
    phi: float
    phi_undefined: bool = False

    def __post_init__(self):
        a, t, p = float(self.alpha), float(self.theta), float(self.phi)
        t = _wrap(t)
        if t < 0:
            t, p = -t, p + np.pi
        if t > np.pi / 2:
            t, a, p = np.pi - t, a + np.pi, p + np.pi
        a, p = _wrap(a), _wrap(p)
        if t == np.pi / 2 and not (-np.pi / 2 < a <= np.pi / 2):
            a, p = _wrap(a + np.pi), _wrap(p + np.pi)
        undefined = t < PHI_UNDEFINED_TOL or bool(self.phi_undefined)
        if undefined:
            p = 0.0
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "phi", p)
        object.__setattr__(self, "phi_undefined", undefined)

    def distance(self, other: "GateAngles") -> float:
        """Largest angular deviation component; phi is skipped when undefined."""
        d = max(angle_distance(self.alpha, other.alpha),
                abs(self.theta - other.theta))
        if not (self.phi_undefined or other.phi_undefined):
            d = max(d, angle_distance(self.phi, other.phi))
        return d


def barenco_matrix(angles: GateAngles) -> np.ndarray:
    """4x4 controlled-rotation unitary for the given angles (see module docs)."""
    a, t, p = angles.alpha, angles.theta, angles.phi
    c, s = np.cos(t), np.sin(t)
    u = np.eye(4, dtype=complex)
    u[2, 2] = np.exp(1j * a) * c
    u[3, 3] = np.exp(1j * a) * c
    u[2, 3] = -1j * np.exp(1j * (a - p)) * s
    u[3, 2] = -1j * np.exp(1j * (a + p)) * s
    return u


def cnot_matrix() -> np.ndarray:
    return barenco_matrix(GateAngles(np.pi / 2, np.pi / 2, 0.0))


def controlled_y_matrix() -> np.ndarray:
    """Controlled-Y variant produced by the protocol: |10> -> -i|11>, |11> -> +i|10>."""
    return barenco_matrix(GateAngles(np.pi / 2, np.pi / 2, -np.pi / 2))


@dataclass(frozen=True)
class ProtocolParams:
    """Validated inputs for one protocol run.

    ``T`` is the duration of each wait period (Protocol II has two of them).
    """

    protocol: int
    interaction: NoncollinearV
    T: float

    def __post_init__(self):
        if self.protocol not in (1, 2):
            raise ContractViolationError(f"protocol must be 1 or 2, got {self.protocol}")
        if self.T < 0:
            raise ContractViolationError(f"wait duration must be >= 0, got {self.T}")
        v = self.interaction
        if self.protocol == 1:
            scale = max(abs(v.v1), abs(v.v2), abs(v.ve))
            if abs(v.v1 - v.v2) > 1e-9 * scale:
                raise ContractViolationError(
                    f"Protocol I requires v1 = v2, got v1 - v2 = {v.v1 - v.v2:g} rad/us"
                )
        else:
            if abs(_wrap(v.beta0)) > 1e-12:
                raise ContractViolationError(
                    f"Protocol II requires beta0 = 0, got {v.beta0:g} rad"
                )


def params_from_blockade(protocol: int, b: BlockadeSpec, basis: RotatedBasis,
                         T: float) -> ProtocolParams:
    """Convenience: build validated params from blockade shifts and basis angles."""
    return ProtocolParams(protocol, noncollinear_from_blockade(b, basis), T)


@dataclass(frozen=True)
class Protocol1Angles:
    """Closed-form Protocol I result: canonical angles plus the raw
    (pre-canonicalization) values and the alpha-theta line slope."""

    angles: GateAngles
    alpha_raw: float
    theta_raw: float
    slope: float | None
    non_entangling: bool


def protocol1_angles(b: BlockadeSpec, T: float, beta0: float = 0.0) -> Protocol1Angles:
    """Gate angles for Protocol I at wait duration T (us), phases set by beta0.

    Raw values obey alpha_raw = pi - slope * theta_raw exactly, with
    slope = (b01 + b02)/(b01 - b02).
    """
    if T < 0:
        raise ContractViolationError(f"wait duration must be >= 0, got {T}")
    total, diff = b.b01 + b.b02, b.b01 - b.b02
    alpha_raw = np.pi - 0.5 * total * T
    theta_raw = 0.5 * diff * T
    non_entangling = diff == 0.0
    slope = None if non_entangling else total / diff
    return Protocol1Angles(
        angles=GateAngles(alpha_raw, theta_raw, beta0),
        alpha_raw=float(alpha_raw),
        theta_raw=float(theta_raw),
        slope=slope,
        non_entangling=non_entangling,
    )


@dataclass(frozen=True)
class Protocol2Angles:
    """Closed-form Protocol II result with the raw trig values the angles
    were recovered from (useful for consistency checks)."""

    angles: GateAngles
    alpha_raw: float
    theta_raw: float
    phi_raw: float
    sin_theta: float
    cos_theta: float
    sin_phi: float
    cos_phi: float


def protocol2_angles(v: NoncollinearV, T: float) -> Protocol2Angles:
    """Gate angles for Protocol II (two waits of T us each; requires beta0 = 0)."""
    if abs(_wrap(v.beta0)) > 1e-12:
        raise ContractViolationError("Protocol II requires beta0 = 0")
    if T < 0:
        raise ContractViolationError(f"wait duration must be >= 0, got {T}")
    spec = numerics.eig2_from_elements(v.v1, v.v2, v.ve)
    d = spec.eta1**2 - spec.eta2**2
    h2 = 2.0 * spec.eta1 * spec.eta2
    c2 = np.cos(2.0 * T * spec.vbar)
    s2 = np.sin(2.0 * T * spec.vbar)

    alpha_raw = -T * (v.v1 + v.v2)
    sin_t = h2 * np.hypot(d * (c2 - 1.0), s2)
    cos_t = 1.0 + h2 * h2 * (c2 - 1.0)
    if abs(sin_t * sin_t + cos_t * cos_t - 1.0) > 1e-9:
        raise ContractViolationError("theta trig pair lost normalization")

    if abs(sin_t) < PHI_UNDEFINED_TOL:
        theta_raw = 0.0 if cos_t > 0 else np.pi
        sin_p, cos_p, phi_raw = 0.0, 1.0, 0.0
        angles = GateAngles(alpha_raw, theta_raw, 0.0, phi_undefined=True)
    else:
        sin_p = h2 * d * (c2 - 1.0) / abs(sin_t)
        cos_p = h2 * s2 / abs(sin_t)
        if abs(sin_p * sin_p + cos_p * cos_p - 1.0) > 1e-9:
            raise ContractViolationError("phi trig pair lost normalization")
        theta_raw = np.arctan2(sin_t, cos_t)
        phi_raw = np.arctan2(sin_p, cos_p)
        angles = GateAngles(alpha_raw, theta_raw, phi_raw)
    return Protocol2Angles(
        angles=angles,
        alpha_raw=float(alpha_raw),
        theta_raw=float(theta_raw),
        phi_raw=float(phi_raw),
        sin_theta=float(sin_t),
        cos_theta=float(cos_t),
        sin_phi=float(sin_p),
        cos_phi=float(cos_p),
    )


# ideal pulse-map composition (the oracle) ------------------------------------

def _control_map(transfer_phase: complex) -> np.ndarray:
    """pi-pulse map on the control: |1> <-> |r1> with the given +/-i phase."""
    m = np.zeros((3, 3), dtype=complex)
    m[0, 0] = 1.0
    m[2, 1] = m[1, 2] = transfer_phase
    return m


def _target_map(pairs: tuple[tuple[int, int], ...], transfer_phase: complex) -> np.ndarray:
    """pi-pulse map on the target swapping the given level pairs with +/-i."""
    m = np.zeros((4, 4), dtype=complex)
    for a, b in pairs:
        m[a, b] = m[b, a] = transfer_phase
    return m


_PAIRS_02_13 = ((0, 2), (1, 3))  # |0> <-> |r2>, |1> <-> |r3>
_PAIRS_03_12 = ((0, 3), (1, 2))  # |0> <-> |r3>, |1> <-> |r2>


def _wait_operator(v: NoncollinearV, T: float) -> np.ndarray:
    """Interaction-only evolution: identity except on (|r1 r2>, |r1 r3>)."""
    u = np.eye(12, dtype=complex)
    block = numerics.propagate(v.block(), T)
    rows = np.ix_((_R1R2, _R1R3), (_R1R2, _R1R3))
    u[rows] = block
    return u


def compose_ideal(p: ProtocolParams) -> np.ndarray:
    """Compose the exact ideal pulse maps and wait propagators; return the
    4x4 restriction to the computational basis.

    Pulse phases: every pi pulse transfers with -i; the closing control pulse
    of Protocol II runs with negated Rabi sign and transfers with +i, which
    makes the composition reproduce the closed-form angles with no global
    phase left over.
    """
    v, T = p.interaction, p.T
    wait = _wait_operator(v, T)
    eye_t, eye_c = np.eye(4, dtype=complex), np.eye(3, dtype=complex)
    if p.protocol == 1:
        p1 = np.kron(_control_map(-1j), _target_map(_PAIRS_02_13, -1j))
        p2 = np.kron(_control_map(-1j), _target_map(_PAIRS_02_13, +1j))
        u = p2 @ wait @ p1
    else:
        p1 = np.kron(_control_map(-1j), eye_t)
        p2 = np.kron(eye_c, _target_map(_PAIRS_02_13, -1j))
        p4 = np.kron(eye_c, _target_map(_PAIRS_03_12, -1j))
        p6 = np.kron(_control_map(+1j), eye_t)
        u = p6 @ p4 @ wait @ p4 @ p2 @ wait @ p2 @ p1
    return u[np.ix_(COMPUTATIONAL_INDICES, COMPUTATIONAL_INDICES)]


def special_gate(kind: str, b: BlockadeSpec) -> ProtocolParams:
    """Parameters realizing a named gate: 'cnot', 'cy' (Protocol I, needs
    b02 = 0 < b01) or 'b1' (Protocol II, needs -b01/b02 in {5/3, 3/5} with
    the sign that makes v1 + v2 = -vbar/2)."""
    kind = kind.lower()
    if kind in ("cnot", "cy"):
        scale = max(abs(b.b01), 1.0)
        if abs(b.b02) > 1e-12 * scale:
            raise InfeasibleGateError(f"{kind} requires b02 = 0, got b02 = {b.b02:g} rad/us")
        if b.b01 <= 0:
            raise InfeasibleGateError(f"{kind} requires b01 > 0, got b01 = {b.b01:g} rad/us")
        beta0 = 0.0 if kind == "cnot" else -np.pi / 2
        basis = RotatedBasis(beta0=beta0, beta1=np.pi / 4)
        return params_from_blockade(1, b, basis, T=np.pi / b.b01)
    if kind == "b1":
        if b.b02 == 0:
            raise InfeasibleGateError("b1 requires -b01/b02 in {5/3, 3/5}, got b02 = 0")
        ratio = -b.b01 / b.b02
        if not (abs(ratio - 5.0 / 3.0) < 1e-8 or abs(ratio - 3.0 / 5.0) < 1e-8):
            raise InfeasibleGateError(
                f"b1 requires -b01/b02 in {{5/3, 3/5}}, got {ratio:g}"
            )
        vbar = 0.5 * abs(b.b01 - b.b02)
        if abs((b.b01 + b.b02) + 0.5 * vbar) > 1e-8 * vbar:
            raise InfeasibleGateError(
                "b1 requires b01 + b02 = -|b01 - b02|/4 "
                f"(got {b.b01 + b.b02:g} vs {-0.5 * vbar:g} rad/us); flip the sign of b01"
            )
        # beta1 away from pi/4, where phi degenerates to {0, pi}
        basis = RotatedBasis(beta0=0.0, beta1=np.pi / 8)
        return params_from_blockade(2, b, basis, T=np.pi / (2.0 * vbar))
    raise ContractViolationError(f"unknown special gate {kind!r}")


@dataclass(frozen=True)
class ExtractedAngles:
    """Angles recovered from a 4x4 gate plus the Frobenius reconstruction
    residual (minimized over a global phase)."""

    angles: GateAngles
    residual: float
    flags: tuple[str, ...] = field(default=())


def extract_angles(u: np.ndarray) -> ExtractedAngles:
    """Invert the gate matrix back to canonical angles.

    Works on approximately block-form matrices (simulated gates carry
    blockade error); a large residual is reported, never raised.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ContractViolationError(f"expected a 4x4 gate, got shape {u.shape}")
    g = np.angle(u[0, 0]) if abs(u[0, 0]) > 0 else 0.0
    w = u * np.exp(-1j * g)
    block = w[2:4, 2:4]

    det = block[0, 0] * block[1, 1] - block[0, 1] * block[1, 0]
    alpha = 0.5 * np.angle(det)
    # the canonical branch has cos(theta) >= 0; the determinant fixes alpha
    # only up to pi
    if (np.exp(-1j * alpha) * block[0, 0]).real < (np.exp(-1j * (alpha + np.pi)) * block[0, 0]).real:
        alpha += np.pi
    cos_t = (np.exp(-1j * alpha) * block[0, 0]).real
    sin_t = 0.5 * (abs(block[0, 1]) + abs(block[1, 0]))
    theta = np.arctan2(sin_t, cos_t)

    flags: list[str] = []
    if sin_t < 1e-12:
        angles = GateAngles(alpha, theta, 0.0, phi_undefined=True)
    else:
        phi = np.angle(block[1, 0]) - alpha + np.pi / 2
        angles = GateAngles(alpha, theta, phi)

    rebuilt = barenco_matrix(angles)
    overlap = np.trace(rebuilt.conj().T @ u)
    gamma = np.angle(overlap) if abs(overlap) > 0 else 0.0
    residual = float(np.linalg.norm(u - np.exp(1j * gamma) * rebuilt))
    if residual > 1e-6:
        flags.append("large_residual")
    return ExtractedAngles(angles=angles, residual=residual, flags=tuple(flags))
