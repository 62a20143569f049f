"""Finite-Rabi pulse-level simulator on the 12-dimensional two-atom space.

Basis layout (energy eigenbasis, not the rotated one):
    control levels: |0>, |1>, |R0>            (indices 0, 1, 2)
    target levels : |0>, |1>, |R1>, |R2>      (indices 0, 1, 2, 3)
    product index = 4 * control + target
    computational states {|00>, |01>, |10>, |11>} = indices (0, 1, 4, 5)

Lasers are exactly resonant in the rotating frame (all in-frame level
energies are zero) and pulses are square.  The interaction is the diagonal
pair shift: b01 on |R0 R1> (index 10), b02 on |R0 R2> (index 11); keeping it
on during pulses is what produces the finite-Rabi blockade error.  Optional
decay adds -i/(2*tau) on each Rydberg level, making the propagators
sub-unitary.

Rabi amplitudes are complex, in rad/us, with the amplitude's phase carried
on the raising part of each coupling.  A pi pulse of amplitude Omega lasts
pi/Omega and transfers population with a -i phase; negating the amplitude
gives the +i inverse transfer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .atoms import BlockadeSpec, NoncollinearV, RotatedBasis, noncollinear_from_blockade
from .exceptions import ContractViolationError
from .protocols import (GateAngles, ProtocolParams, barenco_matrix, extract_angles,
                        protocol2_angles)

DIM = 12
COMPUTATIONAL_INDICES = (0, 1, 4, 5)
_IDX_R0R1, _IDX_R0R2 = 10, 11

# (target_level_from, rydberg_level) column order of PulseSegment.target_rabi
TARGET_COUPLINGS = ((0, 2), (0, 3), (1, 2), (1, 3))  # 0-R1, 0-R2, 1-R1, 1-R2


@dataclass(frozen=True)
class PulseSegment:
    """One piecewise-constant segment: a square pulse or a wait.

    ``target_rabi`` holds the four complex amplitudes for the couplings
    |0>t-|R1>, |0>t-|R2>, |1>t-|R1>, |1>t-|R2> (in that order);
    ``control_rabi`` couples |1>c-|R0>.  Wait segments have all amplitudes
    zero.
    """

    kind: str
    duration: float
    control_rabi: complex = 0.0
    target_rabi: tuple[complex, complex, complex, complex] = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("pulse", "wait"):
            raise ContractViolationError(f"segment kind must be pulse or wait, got {self.kind!r}")
        if self.duration < 0:
            raise ContractViolationError("segment duration must be >= 0")
        if self.kind == "wait" and (self.control_rabi != 0 or any(a != 0 for a in self.target_rabi)):
            raise ContractViolationError("wait segments must have zero Rabi amplitudes")


@dataclass(frozen=True)
class DecaySpec:
    """Rydberg lifetimes (us): tau1, tau2 for the target |R1>, |R2> and
    tau_r1 for the control |R0>."""

    tau1: float
    tau2: float
    tau_r1: float

    def __post_init__(self):
        if min(self.tau1, self.tau2, self.tau_r1) <= 0:
            raise ContractViolationError("lifetimes must be > 0 us")


@dataclass(frozen=True)
class SimConfig:
    """Simulator knobs: pi-pulse Rabi frequency (rad/us), whether the
    interaction stays on during pulses, the Protocol II edge-pulse merge,
    and optional decay."""

    omega: float
    include_interaction_during_pulses: bool = True
    merge_edge_pulses: bool = False
    decay: DecaySpec | None = None

    def __post_init__(self):
        if self.omega <= 0:
            raise ContractViolationError(f"omega must be > 0, got {self.omega}")


def resolve_basis(v: NoncollinearV, b: BlockadeSpec, tol: float = 1e-9) -> RotatedBasis:
    """Rotated basis consistent with both the interaction block and the
    blockade shifts, raising if no mixing angle reproduces ``v`` from ``b``."""
    m = v.mixing_angle()
    scale = max(1.0, abs(b.b01), abs(b.b02))
    for beta1 in (m, np.pi / 2 - m):
        for sign in (1.0, -1.0):
            basis = RotatedBasis(beta0=v.beta0, beta1=beta1, ve_sign=sign)
            rebuilt = noncollinear_from_blockade(b, basis)
            if np.max(np.abs(rebuilt.block() - v.block())) <= tol * scale:
                return basis
    raise ContractViolationError(
        "interaction block is not consistent with the blockade shifts "
        f"(v1={v.v1:g}, v2={v.v2:g}, ve={v.ve:g} vs b01={b.b01:g}, b02={b.b02:g})"
    )


def _target_amps_r2_from_0_r3_from_1(omega: float, basis: RotatedBasis) -> tuple:
    """Amplitudes driving |0> -> |r2> and |1> -> |r3> at rate omega."""
    c = np.cos(basis.beta1)
    s = basis.ve_sign * np.sin(basis.beta1)
    ph = np.exp(1j * basis.beta0)
    return (omega * c, omega * s * ph, omega * s / ph, -omega * c)


def _target_amps_r3_from_0_r2_from_1(omega: float, basis: RotatedBasis) -> tuple:
    """Amplitudes driving |0> -> |r3> and |1> -> |r2> at rate omega."""
    c = np.cos(basis.beta1)
    s = basis.ve_sign * np.sin(basis.beta1)
    ph = np.exp(1j * basis.beta0)
    return (omega * s / ph, -omega * c, omega * c, omega * s * ph)


def build_sequence(p: ProtocolParams, cfg: SimConfig,
                   basis: RotatedBasis | None = None) -> list[PulseSegment]:
    """Pulse/wait segment list realizing the protocol.

    Protocol I: simultaneous control+target pi pulse, wait, closing pulse
    with the target amplitudes negated (3 segments).  Protocol II: six pi
    pulses around two waits (8 segments), or 6 segments with
    ``merge_edge_pulses`` since the first and last two pulses commute.
    """
    if basis is None:
        basis = RotatedBasis(beta0=p.interaction.beta0, beta1=p.interaction.mixing_angle())
    omega = cfg.omega
    t_pi = np.pi / omega
    amps_a = _target_amps_r2_from_0_r3_from_1(omega, basis)
    if p.protocol == 1:
        neg_a = tuple(-a for a in amps_a)
        return [
            PulseSegment("pulse", t_pi, control_rabi=omega, target_rabi=amps_a),
            PulseSegment("wait", p.T),
            PulseSegment("pulse", t_pi, control_rabi=omega, target_rabi=neg_a),
        ]
    amps_b = _target_amps_r3_from_0_r2_from_1(omega, basis)
    wait = PulseSegment("wait", p.T)
    if cfg.merge_edge_pulses:
        return [
            PulseSegment("pulse", t_pi, control_rabi=omega, target_rabi=amps_a),
            wait,
            PulseSegment("pulse", t_pi, target_rabi=amps_a),
            PulseSegment("pulse", t_pi, target_rabi=amps_b),
            wait,
            PulseSegment("pulse", t_pi, control_rabi=-omega, target_rabi=amps_b),
        ]
    return [
        PulseSegment("pulse", t_pi, control_rabi=omega),
        PulseSegment("pulse", t_pi, target_rabi=amps_a),
        wait,
        PulseSegment("pulse", t_pi, target_rabi=amps_a),
        PulseSegment("pulse", t_pi, target_rabi=amps_b),
        wait,
        PulseSegment("pulse", t_pi, target_rabi=amps_b),
        PulseSegment("pulse", t_pi, control_rabi=-omega),
    ]


def build_hamiltonian(seg: PulseSegment, b: BlockadeSpec,
                      include_interaction_during_pulses: bool = True) -> np.ndarray:
    """12x12 Hermitian generator for one segment (rad/us).

    Laser couplings enter as (amplitude/2)(raising + lowering) with the
    amplitude's phase on the raising part; the interaction diagonal is always
    present in waits and optionally during pulses.
    """
    h = np.zeros((DIM, DIM), dtype=complex)
    if seg.control_rabi != 0:
        half = 0.5 * complex(seg.control_rabi)
        for t in range(4):
            h[4 * 2 + t, 4 * 1 + t] += half
            h[4 * 1 + t, 4 * 2 + t] += np.conj(half)
    for amp, (low, up) in zip(seg.target_rabi, TARGET_COUPLINGS):
        if amp == 0:
            continue
        half = 0.5 * complex(amp)
        for c in range(3):
            h[4 * c + up, 4 * c + low] += half
            h[4 * c + low, 4 * c + up] += np.conj(half)
    if seg.kind == "wait" or include_interaction_during_pulses:
        h[_IDX_R0R1, _IDX_R0R1] += b.b01
        h[_IDX_R0R2, _IDX_R0R2] += b.b02
    return h


def _decay_generator(decay: DecaySpec) -> np.ndarray:
    """Anti-Hermitian -i/(2*tau) diagonal on every Rydberg level."""
    rates = np.zeros(DIM, dtype=complex)
    for c in range(3):
        for t in range(4):
            idx = 4 * c + t
            total = 0.0
            if c == 2:
                total += 1.0 / (2.0 * decay.tau_r1)
            if t == 2:
                total += 1.0 / (2.0 * decay.tau1)
            elif t == 3:
                total += 1.0 / (2.0 * decay.tau2)
            rates[idx] = -1j * total
    return np.diag(rates)


@dataclass(frozen=True)
class SimResult:
    """Full-sequence propagator, its computational restriction, the fidelity
    against the closed-form ideal gate, and the angles read back from it."""

    u_sim: np.ndarray
    u_qubit: np.ndarray
    fidelity_vs_ideal: float
    angles: GateAngles
    extraction_residual: float
    ideal_angles: GateAngles
    segments: tuple[PulseSegment, ...]
    flags: tuple[str, ...] = field(default=())


def simulate(p: ProtocolParams, b: BlockadeSpec, cfg: SimConfig) -> SimResult:
    """Multiply segment propagators, restrict to the computational basis and
    compare against the closed-form gate with the average-fidelity formula.

    With decay enabled the restriction is sub-unitary and the fidelity
    accounts for the norm loss.
    """
    basis = resolve_basis(p.interaction, b)
    segments = build_sequence(p, cfg, basis=basis)
    decay_term = _decay_generator(cfg.decay) if cfg.decay is not None else None

    u = np.eye(DIM, dtype=complex)
    for seg in segments:
        h = build_hamiltonian(seg, b, cfg.include_interaction_during_pulses)
        if decay_term is None:
            u = numerics.propagate(h, seg.duration) @ u
        else:
            u = numerics.propagate(h + decay_term, seg.duration, allow_nonhermitian=True) @ u

    u_qubit = u[np.ix_(COMPUTATIONAL_INDICES, COMPUTATIONAL_INDICES)]
    if p.protocol == 1:
        # signed exchange keeps theta right when the basis carries a ve flip
        v = p.interaction
        ideal = GateAngles(np.pi - v.v1 * p.T, v.ve * p.T, v.beta0)
    else:
        ideal = protocol2_angles(p.interaction, p.T).angles
    fidelity = numerics.avg_gate_fidelity(u_qubit, barenco_matrix(ideal))
    extracted = extract_angles(u_qubit)

    flags = list(extracted.flags)
    if cfg.decay is not None:
        flags.append("decay")
    if not cfg.include_interaction_during_pulses:
        flags.append("ideal_pulses")
    if cfg.merge_edge_pulses and p.protocol == 2:
        flags.append("merged_edge_pulses")
    return SimResult(
        u_sim=u,
        u_qubit=u_qubit,
        fidelity_vs_ideal=float(fidelity),
        angles=extracted.angles,
        extraction_residual=extracted.residual,
        ideal_angles=ideal,
        segments=tuple(segments),
        flags=tuple(flags),
    )
