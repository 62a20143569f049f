"""Deterministic CSV sweeps backing the three standard figures.

Column schemas (stable; figtools depends on them verbatim):

    fig3: ratio, theta_rad, alpha_rad
    fig5: v1_v2_ve, T_us, alpha_rad, theta_rad, phi_rad
    fig6: protocol, T_us, alpha_rad, theta_rad, phi_rad,
          e_decay, e_blockade, e_leakage, total

Angle columns hold the raw (pre-canonicalization) protocol values so the
curves stay continuous in T.  For fig6 the decay term uses the total wait
time (T for Protocol I, 2T for Protocol II).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import errors
from .atoms import TWO_PI, BlockadeSpec, NoncollinearV, RotatedBasis, noncollinear_from_blockade
from .exceptions import ContractViolationError
from .protocols import protocol1_angles, protocol2_angles

FIG3_HEADER = ("ratio", "theta_rad", "alpha_rad")
FIG5_HEADER = ("v1_v2_ve", "T_us", "alpha_rad", "theta_rad", "phi_rad")
FIG6_HEADER = ("protocol", "T_us", "alpha_rad", "theta_rad", "phi_rad",
               "e_decay", "e_blockade", "e_leakage", "total")

DEFAULT_FIG3_RATIOS = (Fraction(3), Fraction(2), Fraction(3, 2))
DEFAULT_FIG5_SETS = ("3:1:2", "1:3:2", "2:1:3", "1:2:3", "3:2:1", "2:3:1")


@dataclass(frozen=True)
class SweepSpec:
    """One figure-sweep request; every grid field has a defaulted value and
    outputs are pure functions of the spec."""

    figure: str
    out: Path
    ratios: tuple[Fraction, ...] = DEFAULT_FIG3_RATIOS
    theta_max: float = np.pi
    points: int = 120
    sets: tuple[str, ...] = DEFAULT_FIG5_SETS
    b: BlockadeSpec | None = None
    omega: float = 30.0 * TWO_PI
    tau1: float = 540.0
    tau2: float = 540.0
    t_min: float = 0.05
    t_max: float = 4.0
    t_step: float = 0.05
    beta1_p1: float = np.pi / 4
    beta1_p2: float = 3 * np.pi / 8

    def __post_init__(self):
        if self.figure not in ("fig3", "fig5", "fig6"):
            raise ContractViolationError(f"unknown figure {self.figure!r}")
        if self.points <= 0 or self.t_step <= 0 or self.t_max <= self.t_min:
            raise ContractViolationError("sweep grids must be non-empty with positive step")


def _write(path: Path, header: tuple[str, ...], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def fig3_rows(spec: SweepSpec):
    """alpha vs theta lines for several b01/b02 ratios (Protocol I).

    The reference shift is 0.1 x 2pi rad/us; theta fixes T per ratio, so the
    rows depend only on the ratios and the theta grid.
    """
    b_ref = 0.1 * TWO_PI
    thetas = np.linspace(spec.theta_max / spec.points, spec.theta_max, spec.points)
    for ratio in spec.ratios:
        b = BlockadeSpec(b01=float(ratio) * b_ref, b02=b_ref)
        diff = b.b01 - b.b02
        if diff == 0:
            raise ContractViolationError("fig3 needs ratios != 1")
        for theta in thetas:
            res = protocol1_angles(b, T=2.0 * theta / diff)
            yield (f"{Fraction(ratio)}", f"{res.theta_raw:.12g}", f"{res.alpha_raw:.12g}")


def _parse_vset(label: str) -> NoncollinearV:
    parts = label.split(":")
    if len(parts) != 3:
        raise ContractViolationError(f"interaction set must be 'v1:v2:ve', got {label!r}")
    v1, v2, ve = (float(Fraction(p)) * 0.1 * TWO_PI for p in parts)
    return NoncollinearV(v1=v1, v2=v2, ve=ve, beta0=0.0)


def fig5_rows(spec: SweepSpec):
    """theta and phi against alpha for six interaction ratio sets (Protocol II)."""
    for label in spec.sets:
        v = _parse_vset(label)
        vbar = np.hypot(v.ve, 0.5 * (v.v1 - v.v2))
        t_max = np.pi / vbar
        for t in np.linspace(t_max / spec.points, t_max, spec.points):
            res = protocol2_angles(v, t)
            yield (label, f"{t:.12g}", f"{res.alpha_raw:.12g}",
                   f"{res.theta_raw:.12g}", f"{res.phi_raw:.12g}")


def fig6_rows(spec: SweepSpec):
    """Angles and the analytic error budget against the wait duration for
    both protocols at their standard mixing angles."""
    if spec.b is None:
        raise ContractViolationError("fig6 needs blockade shifts (preset or explicit)")
    n = int(np.floor((spec.t_max - spec.t_min) / spec.t_step + 1e-9)) + 1
    times = spec.t_min + spec.t_step * np.arange(n)
    for protocol, beta1 in ((1, spec.beta1_p1), (2, spec.beta1_p2)):
        v = noncollinear_from_blockade(spec.b, RotatedBasis(0.0, beta1))
        for t in times:
            if protocol == 1:
                res = protocol1_angles(spec.b, float(t))
                alpha, theta, phi = res.alpha_raw, res.theta_raw, 0.0
                t_wait = float(t)
            else:
                res2 = protocol2_angles(v, float(t))
                alpha, theta, phi = res2.alpha_raw, res2.theta_raw, res2.phi_raw
                t_wait = 2.0 * float(t)
            budget = errors.total_budget(v, spec.omega, t_wait, spec.tau1, spec.tau2,
                                         beta1, protocol=protocol)
            yield (str(protocol), f"{t:.12g}", f"{alpha:.12g}", f"{theta:.12g}",
                   f"{phi:.12g}", f"{budget.e_decay:.12g}", f"{budget.e_blockade:.12g}",
                   f"{budget.e_leakage:.12g}", f"{budget.total:.12g}")


def run_sweep(spec: SweepSpec) -> Path:
    """Write the requested figure CSV and return its path."""
    if spec.figure == "fig3":
        _write(spec.out, FIG3_HEADER, fig3_rows(spec))
    elif spec.figure == "fig5":
        _write(spec.out, FIG5_HEADER, fig5_rows(spec))
    else:
        _write(spec.out, FIG6_HEADER, fig6_rows(spec))
    return spec.out
