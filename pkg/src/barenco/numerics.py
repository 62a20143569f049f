"""Dense complex-matrix kernel: Hermitian propagation, 2x2 spectra, fidelities.

Unit conventions used throughout the package (hbar = 1):
  * energies / frequencies : angular frequency in rad/us
    ("X x 2pi MHz" converts to 2*pi*X rad/us)
  * durations              : us

Matrices are plain complex ndarrays; dimensions in this package are 2, 3, 4
or 12.  All functions are pure and thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import ContractViolationError

HERMITICITY_TOL = 1e-10
UNITARITY_TOL = 1e-10


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest elementwise deviation of ``m`` from its conjugate transpose."""
    return float(np.max(np.abs(m - m.conj().T)))


def unitarity_defect(u: np.ndarray) -> float:
    """Largest elementwise deviation of ``u^dag u`` from the identity."""
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def propagate(h: np.ndarray, t: float, *, allow_nonhermitian: bool = False) -> np.ndarray:
    """Propagator exp(-i*h*t) for a piecewise-constant generator.

    ``h`` is in rad/us, ``t`` in us.  Hermitian input goes through an
    eigendecomposition (no time stepping), which keeps the result unitary to
    ~1e-14.  With ``allow_nonhermitian`` a general matrix exponential is used
    instead (needed for the -i/(2*tau) decay terms) and unitarity is not
    guaranteed.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractViolationError(f"generator must be square, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ContractViolationError("generator contains non-finite entries")
    if t < 0:
        raise ContractViolationError(f"duration must be >= 0, got {t}")

    if allow_nonhermitian:
        return scipy.linalg.expm(-1j * t * h)

    scale = max(1.0, float(np.max(np.abs(h))))
    if hermiticity_defect(h) > HERMITICITY_TOL * scale:
        raise ContractViolationError(
            "generator is not Hermitian (defect "
            f"{hermiticity_defect(h):.3e}); pass allow_nonhermitian=True for decay terms"
        )
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


@dataclass(frozen=True)
class SpectralData:
    """Eigensystem of a 2x2 interaction block.

    ``lambda_plus >= lambda_minus`` are the eigenvalues (rad/us) and
    ``(eta1, eta2)`` the real, normalized eigenvector amplitudes:
    the upper eigenvector is (eta1, eta2*e^{i*beta0}) in the block's basis,
    the lower one (eta2*e^{-i*beta0}, -eta1).
    """

    lambda_plus: float
    lambda_minus: float
    eta1: float
    eta2: float

    @property
    def vbar(self) -> float:
        """Half the eigenvalue splitting."""
        return 0.5 * (self.lambda_plus - self.lambda_minus)


def eig2_from_elements(v1: float, v2: float, ve: float) -> SpectralData:
    """Closed-form spectrum of [[v1, ve], [ve, v2]] with signed real ``ve``.

    eta ratio is eta1 : eta2 = ve : (2*vbar + v2 - v1)/2; for ve = 0 the
    convention is (eta1, eta2) = (0, 1) when v2 > v1 and (1, 0) otherwise.
    """
    dv = v1 - v2
    vbar = np.hypot(ve, 0.5 * dv)
    half = 0.5 * (v1 + v2)
    if ve == 0.0:
        eta1, eta2 = (0.0, 1.0) if v2 > v1 else (1.0, 0.0)
    else:
        if dv > 0:
            # avoid cancellation in 2*vbar - dv when ve is small
            pair = (ve, 2.0 * ve * ve / (2.0 * vbar + dv))
        else:
            pair = (ve, vbar - 0.5 * dv)
        norm = np.hypot(*pair)
        eta1, eta2 = pair[0] / norm, pair[1] / norm
    return SpectralData(half + vbar, half - vbar, float(eta1), float(eta2))


def eig2(block: np.ndarray) -> SpectralData:
    """Spectrum of a 2x2 Hermitian block [[V1, Ve*e^{-i*beta0}], [Ve*e^{i*beta0}, V2]].

    A real off-diagonal keeps its sign as Ve (beta0 = 0); a complex one is
    split into magnitude and phase, the phase being the caller's beta0.
    """
    block = np.asarray(block, dtype=complex)
    if block.shape != (2, 2):
        raise ContractViolationError(f"expected a 2x2 block, got shape {block.shape}")
    scale = max(1.0, float(np.max(np.abs(block))))
    if hermiticity_defect(block) > HERMITICITY_TOL * scale:
        raise ContractViolationError("2x2 block is not Hermitian")
    off = block[1, 0]
    ve = float(off.real) if abs(off.imag) <= 1e-14 * scale else float(abs(off))
    return eig2_from_elements(float(block[0, 0].real), float(block[1, 1].real), ve)


def avg_gate_fidelity(u_actual: np.ndarray, u_ideal: np.ndarray,
                      subspace: tuple[int, ...] | list[int] | None = None) -> float:
    """Average gate fidelity of ``u_actual`` against ``u_ideal`` on a subspace.

    Uniform pure-state average over the d-dimensional computational block:
    F = (Tr(M M^dag) + |Tr M|^2) / (d*(d+1)) with M the restriction of
    u_ideal^dag u_actual.  Insensitive to a global phase of either input;
    sub-unitary ``u_actual`` (decay, leakage) lowers F through the traces.
    """
    u_actual = np.asarray(u_actual, dtype=complex)
    u_ideal = np.asarray(u_ideal, dtype=complex)
    if subspace is None:
        subspace = tuple(range(u_ideal.shape[0]))
    idx = np.asarray(subspace, dtype=int)
    if idx.size == 0:
        raise ContractViolationError("subspace must not be empty")
    m = u_ideal[np.ix_(idx, idx)].conj().T @ u_actual[np.ix_(idx, idx)]
    d = idx.size
    f = (np.trace(m @ m.conj().T).real + abs(np.trace(m)) ** 2) / (d * (d + 1))
    return float(f)


def phase_aligned_deviation(u: np.ndarray, v: np.ndarray) -> float:
    """max |u - e^{i*gamma} v| elementwise, minimized over the global phase gamma."""
    overlap = np.trace(np.asarray(v).conj().T @ np.asarray(u))
    gamma = np.angle(overlap) if abs(overlap) > 0 else 0.0
    return float(np.max(np.abs(u - np.exp(1j * gamma) * v)))
