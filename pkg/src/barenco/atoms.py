"""Interaction specifications: blockade shifts from van der Waals geometry,
the rotated two-level basis, and the resulting non-collinear 2x2 block.

Basis convention for the rotated states (mixing angle beta1, phase beta0):

    |r2> = cos(beta1) |R1> + sin(beta1) e^{+i beta0} |R2>
    |r3> = sin(beta1) e^{-i beta0} |R1> - cos(beta1) |R2>

beta1 is canonicalized into [0, pi/2]; the sign this folding would flip on
the exchange coefficient is tracked in ``RotatedBasis.ve_sign``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import ContractViolationError

TWO_PI = 2.0 * np.pi

# below ~5 um the interaction crosses over to resonant dipole-dipole and the
# C6/l^6 picture no longer holds
VDW_MIN_DISTANCE_UM = 5.0


@dataclass(frozen=True)
class VdwSpec:
    """van der Waals coefficients (rad/us * um^6) and the pair distance (um).

    ``c6_exchange`` is informational only (a tiny exchange coefficient that is
    neglected); it never enters any Hamiltonian built here.
    """

    c6_01: float
    c6_02: float
    l: float
    c6_03: float | None = None
    c6_exchange: float | None = None

    def __post_init__(self):
        if self.l <= 0:
            raise ContractViolationError(f"distance l must be > 0 um, got {self.l}")
        if self.l < VDW_MIN_DISTANCE_UM:
            warnings.warn(
                f"l = {self.l} um is below the ~{VDW_MIN_DISTANCE_UM} um vdW validity "
                "threshold; blockade coefficients are unreliable",
                stacklevel=2,
            )


@dataclass(frozen=True)
class BlockadeSpec:
    """Diagonal blockade shifts b_0k (rad/us) of the Rydberg pair states."""

    b01: float
    b02: float
    b03: float | None = None

    def __post_init__(self):
        vals = [self.b01, self.b02] + ([self.b03] if self.b03 is not None else [])
        if not all(np.isfinite(v) for v in vals):
            raise ContractViolationError("blockade shifts must be finite")


@dataclass(frozen=True)
class RotatedBasis:
    """Mixing angles defining the rotated target basis.

    beta1 outside [0, pi/2] is folded back using the symmetry of the
    coefficient map (V1, V2 invariant, Ve flips sign); the flip is recorded
    in ``ve_sign``.
    """

    beta0: float
    beta1: float
    beta2: float | None = None
    ve_sign: float = 1.0

    def __post_init__(self):
        b1 = float(self.beta1)
        sign = float(self.ve_sign)
        # fold into (-pi/2, pi/2] then reflect the negative half
        b1 = b1 - np.pi * np.round(b1 / np.pi)
        if b1 < 0:
            b1, sign = -b1, -sign
        if b1 > np.pi / 2:  # only possible for b1 == pi/2 boundary after round
            b1, sign = np.pi - b1, -sign
        object.__setattr__(self, "beta1", b1)
        object.__setattr__(self, "ve_sign", sign)

    def matrix(self) -> np.ndarray:
        """Unitary change of basis from (|R1>, |R2>) to columns (|r2>, |r3>)."""
        c, s = np.cos(self.beta1), np.sin(self.beta1)
        ph = np.exp(1j * self.beta0)
        return np.array([[c, s / ph], [s * ph, -c]], dtype=complex)


@dataclass(frozen=True)
class NoncollinearV:
    """The engineered 2x2 interaction on (|r1 r2>, |r1 r3>): diagonal (v1, v2),
    off-diagonal ve * e^{-/+ i beta0} with signed real ``ve`` (all rad/us)."""

    v1: float
    v2: float
    ve: float
    beta0: float = 0.0

    def block(self) -> np.ndarray:
        off = self.ve * np.exp(-1j * self.beta0)
        return np.array([[self.v1, off], [np.conj(off), self.v2]], dtype=complex)

    def mixing_angle(self) -> float:
        """beta1 in [0, pi/2] recovered from tan(2*beta1) = 2*ve/(v1 - v2)."""
        if self.ve == 0.0 and self.v1 == self.v2:
            return 0.0
        b1 = 0.5 * np.arctan2(2.0 * self.ve, self.v1 - self.v2)
        return float(b1 if b1 >= 0 else b1 + np.pi / 2)


def blockade_from_c6(spec: VdwSpec) -> BlockadeSpec:
    """b_0k = C6(|R0 Rk>) / l^6 for each provided coefficient."""
    l6 = spec.l**6
    b03 = spec.c6_03 / l6 if spec.c6_03 is not None else None
    return BlockadeSpec(b01=spec.c6_01 / l6, b02=spec.c6_02 / l6, b03=b03)


def noncollinear_from_blockade(b: BlockadeSpec, basis: RotatedBasis) -> NoncollinearV:
    """Coefficient map from diagonal shifts to the rotated-basis block.

    Preserves the trace and determinant of the (b01, b02) pair:
    v1 + v2 = b01 + b02 and v1*v2 - ve^2 = b01*b02 for every beta1.
    """
    c, s = np.cos(basis.beta1), np.sin(basis.beta1)
    v1 = b.b01 * c * c + b.b02 * s * s
    v2 = b.b01 * s * s + b.b02 * c * c
    ve = basis.ve_sign * (b.b01 - b.b02) * s * c
    return NoncollinearV(v1=float(v1), v2=float(v2), ve=float(ve), beta0=basis.beta0)


def b02_tuned(b02: float, b03: float, beta2: float) -> float:
    """Effective b02 when |R2> is replaced by cos(beta2)|R2> + sin(beta2)|R3>."""
    c, s = np.cos(beta2), np.sin(beta2)
    return float(b02 * c * c + b03 * s * s)


# flat key=value interaction-config files ------------------------------------

_REQUIRED_KEYS = ("c6_01_2pi_THz_um6", "c6_02_2pi_THz_um6", "l_um")
_OPTIONAL_KEYS = ("beta0_rad", "beta1_rad", "beta2_rad",
                  "c6_03_2pi_THz_um6", "c6_exchange_2pi_GHz_um6")

# rad/us * um^6 per (2pi THz um^6): 2pi * 1e6 (THz -> MHz -> rad/us)
_C6_2PI_THZ = TWO_PI * 1e6
_C6_2PI_GHZ = TWO_PI * 1e3


def load_interaction_config(path: str | Path) -> tuple[VdwSpec, RotatedBasis]:
    """Parse a flat key=value config file into (VdwSpec, RotatedBasis).

    Recognized keys: c6_01_2pi_THz_um6, c6_02_2pi_THz_um6, l_um, beta0_rad,
    beta1_rad, beta2_rad (plus optional c6_03_2pi_THz_um6 and the
    informational c6_exchange_2pi_GHz_um6).  Lines starting with '#' and
    blank lines are ignored.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ContractViolationError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _REQUIRED_KEYS and key not in _OPTIONAL_KEYS:
            raise ContractViolationError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError as exc:
            raise ContractViolationError(f"{path}:{lineno}: bad number {val.strip()!r}") from exc
    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ContractViolationError(f"{path}: missing keys {missing}")

    vdw = VdwSpec(
        c6_01=values["c6_01_2pi_THz_um6"] * _C6_2PI_THZ,
        c6_02=values["c6_02_2pi_THz_um6"] * _C6_2PI_THZ,
        l=values["l_um"],
        c6_03=(values["c6_03_2pi_THz_um6"] * _C6_2PI_THZ
               if "c6_03_2pi_THz_um6" in values else None),
        c6_exchange=(values["c6_exchange_2pi_GHz_um6"] * _C6_2PI_GHZ
                     if "c6_exchange_2pi_GHz_um6" in values else None),
    )
    basis = RotatedBasis(
        beta0=values.get("beta0_rad", 0.0),
        beta1=values.get("beta1_rad", np.pi / 4),
        beta2=values.get("beta2_rad"),
    )
    return vdw, basis
