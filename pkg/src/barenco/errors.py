"""Analytic gate-error budget and the Monte Carlo position-fluctuation error.

Error components (Rabi frequency Omega, wait duration T, all rad/us and us):

    E_de = ((pi/Omega + T)(tau1 + tau2)/2)
           / (tau1*tau2 + sin^2(beta1) cos^2(beta1) (tau1 - tau2)^2)
           + (pi/(2*Omega) + T/2) / tau1
    E_bl = 2 (V1^2 + V2^2) / Omega^2          (doubled for Protocol II)
    E_le = Omega^2/Delta1^2 + Omega^2/(2*Delta2^2)

Lifetimes are mandatory caller inputs; the bundled example value of 540 us is
an assumption, not a measured number.  The Monte Carlo error perturbs only
the interaction strengths through the sampled atom separation (closed-form
gate per sample); pulse areas are left nominal.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .atoms import VDW_MIN_DISTANCE_UM, VdwSpec, blockade_from_c6
from .dynamics import resolve_basis
from .exceptions import ContractViolationError
from .numerics import eig2_from_elements
from .protocols import ProtocolParams

# CODATA 2018
HBAR = 1.054571817e-34        # J s
KB = 1.380649e-23             # J / K
ATOMIC_MASS = 1.66053906660e-27   # kg
RB87_MASS = 86.909180531 * ATOMIC_MASS

# default leakage-channel detunings (rad/us): 1.8 GHz and 1.5 GHz
DELTA1_DEFAULT = 1.8e3 * 2.0 * np.pi
DELTA2_DEFAULT = 1.5e3 * 2.0 * np.pi

BUDGET_VALIDITY_LIMIT = 0.1


@dataclass(frozen=True)
class ErrorBudget:
    """Analytic error components and their sum; ``valid_regime`` is False when
    the total is too large for the perturbative estimates to mean much."""

    e_decay: float
    e_blockade: float
    e_leakage: float
    total: float
    valid_regime: bool


@dataclass(frozen=True)
class TrapSpec:
    """Optical tweezer: waist w (um), wavelength lam (um), depth (mK), atom
    temperature (uK); the atom mass (kg) sets the thermal-regime check."""

    w: float
    lam: float
    depth_mk: float
    temperature_uk: float
    mass: float = RB87_MASS

    def __post_init__(self):
        if min(self.w, self.lam, self.depth_mk, self.mass) <= 0 or self.temperature_uk < 0:
            raise ContractViolationError("trap parameters must be positive")


@dataclass(frozen=True)
class TrapSigmas:
    """Thermal position spread (um) and the trap anisotropy xi = sigma_z/sigma_x;
    ``thermal`` flags whether k_B Ta / 2 >= hbar * omega_radial holds."""

    sigma_x: float
    sigma_y: float
    sigma_z: float
    xi: float
    thermal: bool


@dataclass(frozen=True)
class ForceDrift:
    """Interatomic-force drift over one Rydberg dwell: signed force (N),
    relative-speed change (m/s) and separation change (um)."""

    force: float
    delta_v: float
    delta_x: float


@dataclass(frozen=True)
class MCResult:
    """Monte Carlo infidelity with its standard error; bit-reproducible for a
    fixed (seed, samples) regardless of worker count."""

    mean_error: float
    std_error_of_mean: float
    samples: int
    seed: int
    invalid_samples: int = 0


def decay_error(T: float, omega: float, tau1: float, tau2: float, beta1: float) -> float:
    """Rydberg-decay error for one Protocol I cycle."""
    if tau1 <= 0 or tau2 <= 0:
        raise ContractViolationError("lifetimes must be > 0 us")
    sc = np.sin(beta1) * np.cos(beta1)
    num = (np.pi / omega + T) * (tau1 + tau2) / 2.0
    den = tau1 * tau2 + sc * sc * (tau1 - tau2) ** 2
    return float(num / den + (np.pi / (2.0 * omega) + T / 2.0) / tau1)


def blockade_error(v, omega: float, protocol: int = 1) -> float:
    """Finite-Rabi blockade error; Protocol II runs two excitation rounds so
    its estimate is doubled."""
    if omega <= 0:
        raise ContractViolationError("omega must be > 0")
    factor = 2.0 if protocol == 1 else 4.0
    return float(factor * (v.v1**2 + v.v2**2) / omega**2)


def leakage_error(omega: float, delta1: float = DELTA1_DEFAULT,
                  delta2: float = DELTA2_DEFAULT) -> float:
    """Population leakage to the nearby Rydberg levels at detunings delta1/2."""
    if delta1 == 0 or delta2 == 0:
        raise ContractViolationError("detunings must be nonzero")
    return float(omega**2 / delta1**2 + omega**2 / (2.0 * delta2**2))


def total_budget(v, omega: float, T: float, tau1: float, tau2: float, beta1: float,
                 protocol: int = 1, delta1: float = DELTA1_DEFAULT,
                 delta2: float = DELTA2_DEFAULT) -> ErrorBudget:
    """Sum of the three analytic components."""
    e_de = decay_error(T, omega, tau1, tau2, beta1)
    e_bl = blockade_error(v, omega, protocol)
    e_le = leakage_error(omega, delta1, delta2)
    total = e_de + e_bl + e_le
    return ErrorBudget(e_de, e_bl, e_le, total, valid_regime=total <= BUDGET_VALIDITY_LIMIT)


def force_drift(c6: float, l: float, t_ry: float, mass: float = RB87_MASS) -> ForceDrift:
    """Drift from the -6*C6/l^7 pair force over a Rydberg dwell time t_ry (us).

    delta_x assumes zero initial relative speed, i.e. the displacement
    accumulated under constant acceleration, delta_v * t_ry / 2.
    """
    if l <= 0:
        raise ContractViolationError("distance must be > 0 um")
    c6_si = c6 * HBAR * 1e-30          # rad/us um^6 -> J m^6
    l_m = l * 1e-6
    t_s = t_ry * 1e-6
    force = -6.0 * c6_si / l_m**7
    delta_v = abs(force) * t_s / mass
    delta_x_um = 0.5 * delta_v * t_s * 1e6
    return ForceDrift(force=float(force), delta_v=float(delta_v), delta_x=float(delta_x_um))


def trap_sigmas(t: TrapSpec) -> TrapSigmas:
    """Thermal position spread of a tweezer-trapped atom.

    sigma_x^2 = sigma_y^2 = (w^2/4)(Ta/U), sigma_z = xi sigma_x with
    xi = sqrt(2) pi w / lam.
    """
    ratio = (t.temperature_uk * 1e-6) / (t.depth_mk * 1e-3)
    sigma_x = 0.5 * t.w * np.sqrt(ratio)
    xi = np.sqrt(2.0) * np.pi * t.w / t.lam
    u_j = t.depth_mk * 1e-3 * KB
    omega_radial = np.sqrt(4.0 * u_j / (t.mass * (t.w * 1e-6) ** 2))
    thermal = KB * t.temperature_uk * 1e-6 / 2.0 >= HBAR * omega_radial
    return TrapSigmas(sigma_x=float(sigma_x), sigma_y=float(sigma_x),
                      sigma_z=float(xi * sigma_x), xi=float(xi), thermal=bool(thermal))


# Monte Carlo position error ---------------------------------------------------

def _worker_count() -> int:
    raw = os.environ.get("BARENCO_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _sample_displacements(seed: int, n: int) -> np.ndarray:
    """(n, 6) standard-normal draws from per-sample counter-based streams.

    Each sample i uses an independent Philox stream keyed by (seed, i), so the
    draws depend only on (seed, i) and never on chunking or thread count.
    """
    def chunk(lo: int, hi: int) -> np.ndarray:
        out = np.empty((hi - lo, 6))
        for i in range(lo, hi):
            gen = np.random.Generator(np.random.Philox(key=[seed, i]))
            out[i - lo] = gen.standard_normal(6)
        return out

    workers = _worker_count()
    if workers == 1:
        return chunk(0, n)
    bounds = np.linspace(0, n, workers + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda ab: chunk(*ab), zip(bounds[:-1], bounds[1:])))
    return np.concatenate(parts, axis=0)


def _pair_infidelity(alpha, theta, phi, alpha0: float, theta0: float, phi0: float):
    """Vectorized 1 - F between two controlled-rotation gates given by angles.

    Uses the trace identity for the d = 4 average fidelity of two gates in
    the common block form: F = (4 + |2 + tr|^2)/20 with
    tr = e^{i(alpha-alpha0)} (2 cos(theta0)cos(theta)
                              + 2 sin(theta0)sin(theta)cos(phi-phi0)).
    """
    tr = np.exp(1j * (alpha - alpha0)) * (
        2.0 * np.cos(theta0) * np.cos(theta)
        + 2.0 * np.sin(theta0) * np.sin(theta) * np.cos(phi - phi0)
    )
    return 1.0 - (4.0 + np.abs(2.0 + tr) ** 2) / 20.0


def _protocol1_raw(b01_nom: float, b02_nom: float, T: float, beta0: float, scale):
    """Raw Protocol I angles with the interaction rescaled by ``scale``."""
    alpha = np.pi - 0.5 * (b01_nom + b02_nom) * T * scale
    theta = 0.5 * (b01_nom - b02_nom) * T * scale
    return alpha, theta, beta0 * np.ones_like(alpha)


def _protocol2_raw(b01_nom: float, b02_nom: float, beta1: float, T: float, scale):
    """Raw Protocol II angles with the interaction rescaled by ``scale``.

    The eta amplitudes depend only on element ratios, so a common rescaling
    leaves them fixed and moves only the trig arguments.
    """
    c, s = np.cos(beta1), np.sin(beta1)
    v1 = b01_nom * c * c + b02_nom * s * s
    v2 = b01_nom * s * s + b02_nom * c * c
    ve = (b01_nom - b02_nom) * s * c
    spec = eig2_from_elements(v1, v2, ve)
    d = spec.eta1**2 - spec.eta2**2
    h2 = 2.0 * spec.eta1 * spec.eta2
    c2 = np.cos(2.0 * T * spec.vbar * scale)
    s2 = np.sin(2.0 * T * spec.vbar * scale)
    alpha = -T * (v1 + v2) * scale
    sin_t = h2 * np.hypot(d * (c2 - 1.0), s2)
    cos_t = 1.0 + h2 * h2 * (c2 - 1.0)
    theta = np.arctan2(sin_t, cos_t)
    safe = np.where(np.abs(sin_t) < 1e-300, 1.0, np.abs(sin_t))
    phi = np.arctan2(h2 * d * (c2 - 1.0) / safe, h2 * s2 / safe)
    phi = np.where(np.abs(sin_t) < 1e-15, 0.0, phi)
    return alpha, theta, phi


def mc_position_error(p: ProtocolParams, vdw: VdwSpec, trap: TrapSpec,
                      samples: int, seed: int) -> MCResult:
    """Gate infidelity from thermal position fluctuations of both atoms.

    Per sample, both atoms get independent Gaussian displacements with the
    trap sigmas (separation axis x, tweezer beams along z), the pair distance
    r is recomputed, the blockade shifts are rescaled by (l/r)^6 and the
    closed-form gate at nominal T is compared against the nominal gate.
    Samples with r below the vdW validity distance are excluded and counted.
    """
    if samples < 1000:
        raise ContractViolationError(f"need at least 1000 samples, got {samples}")
    b_nom = blockade_from_c6(vdw)
    basis = resolve_basis(p.interaction, b_nom)
    sig = trap_sigmas(trap)

    draws = _sample_displacements(seed, samples)
    scales = np.array([sig.sigma_x, sig.sigma_y, sig.sigma_z] * 2)
    disp = draws * scales
    sep = np.stack([
        vdw.l + disp[:, 3] - disp[:, 0],
        disp[:, 4] - disp[:, 1],
        disp[:, 5] - disp[:, 2],
    ], axis=1)
    r = np.linalg.norm(sep, axis=1)
    valid = r >= VDW_MIN_DISTANCE_UM
    scale6 = (vdw.l / r[valid]) ** 6

    if p.protocol == 1:
        raw = lambda s: _protocol1_raw(b_nom.b01, b_nom.b02, p.T, basis.beta0, s)
    else:
        beta1 = basis.ve_sign * basis.beta1
        raw = lambda s: _protocol2_raw(b_nom.b01, b_nom.b02, beta1, p.T, s)
    a, t, ph = raw(scale6)
    a0, t0, p0 = raw(np.asarray(1.0))
    err = _pair_infidelity(a, t, ph, float(a0), float(t0), float(p0))

    n_valid = int(valid.sum())
    mean = float(err.mean()) if n_valid else float("nan")
    sem = float(err.std(ddof=1) / np.sqrt(n_valid)) if n_valid > 1 else float("nan")
    return MCResult(mean_error=mean, std_error_of_mean=sem, samples=samples,
                    seed=seed, invalid_samples=samples - n_valid)
