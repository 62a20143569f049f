"""Inverse problem: find protocol parameters that hit target gate angles,
plus a continued-fraction diagnostic for near-rational angle/pi ratios.

Feasibility is always confirmed by forward evaluation through the closed-form
angle functions; the reported residual is recomputed there, never taken from
the solver's own bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .atoms import TWO_PI, BlockadeSpec, RotatedBasis, noncollinear_from_blockade
from .exceptions import ContractViolationError
from .protocols import (GateAngles, ProtocolParams, angle_distance, params_from_blockade,
                        protocol1_angles, protocol2_angles)

RESIDUAL_CONVERGED = 1e-8
RESIDUAL_BASIN = 1e-3


@dataclass(frozen=True)
class DesignSolution:
    """Inverse-design outcome.  ``achieved`` and ``residual`` come from
    forward evaluation of ``params``; extras carry protocol-specific detail
    (required ratio in free-ratio mode, period of the T family, all basins)."""

    params: ProtocolParams | None
    achieved: GateAngles | None
    residual: float
    feasible: bool
    reason: str | None = None
    required_ratio_b02_b01: float | None = None
    period: float | None = None
    basins: tuple[tuple[float, float], ...] = field(default=())
    non_entangling: bool = False


@dataclass(frozen=True)
class RationalityReport:
    """Continued-fraction convergents of angle/pi; ``flagged_rational`` marks
    a q <= 100 convergent within 1e-9.  A heuristic, not a proof."""

    value_over_pi: float
    best_convergents: tuple[tuple[int, int, float], ...]
    flagged_rational: bool


def _p1_forward(b: BlockadeSpec, T: float, beta0: float, target: GateAngles):
    res = protocol1_angles(b, T, beta0)
    return res, target.distance(res.angles)


def _p1_period(b: BlockadeSpec) -> float | None:
    """Smallest dT returning both raw angles to themselves mod 2*pi, when the
    alpha-theta slope is (near-)rational with small denominator."""
    diff = abs(b.b01 - b.b02)
    if diff == 0:
        return None
    slope = (b.b01 + b.b02) / (b.b01 - b.b02)
    rep = rationality_diagnostic(slope * np.pi)
    if not rep.flagged_rational:
        return None
    q = next(q for _, q, err in rep.best_convergents if q <= 100 and err <= 1e-9)
    return 4.0 * np.pi * q / diff


def solve_protocol1(target: GateAngles, b: BlockadeSpec | None = None,
                    free_ratio: bool = False, b01: float = TWO_PI) -> DesignSolution:
    """Protocol I design: beta0 = phi and T = 2*theta/|b01 - b02|.

    With fixed ``b`` the target is feasible only on the alpha = pi - slope*theta
    line (mod 2*pi); candidate wait times from the equivalent raw
    representations of the canonical target are forward-checked and the
    smallest feasible T wins.  In free-ratio mode the required b02/b01 is
    solved from slope = (pi - alpha)/theta and a concrete spec is built at
    the reference ``b01``.
    """
    if free_ratio:
        if target.theta < 1e-12:
            if angle_distance(target.alpha, np.pi) > 1e-9:
                return DesignSolution(None, None, float("inf"), False,
                                      reason="theta = 0 requires alpha = pi")
            b = BlockadeSpec(b01, 0.0)
            ratio = 0.0
        else:
            slope = (np.pi - target.alpha) / target.theta
            if abs(slope + 1.0) < 1e-12:
                return DesignSolution(None, None, float("inf"), False,
                                      reason="slope = -1 requires b01 = 0; pick b02 as reference")
            ratio = (slope - 1.0) / (slope + 1.0)
            b = BlockadeSpec(b01, b01 * ratio)
    else:
        if b is None:
            raise ContractViolationError("fixed-ratio mode needs a BlockadeSpec")
        ratio = None

    diff = abs(b.b01 - b.b02)
    if diff == 0:
        if target.theta < 1e-12 and angle_distance(target.alpha, np.pi) <= 1e-9:
            res, dist = _p1_forward(b, 0.0, target.phi, target)
            return DesignSolution(params_from_blockade(1, b, RotatedBasis(target.phi, np.pi / 4), 0.0),
                                  res.angles, dist, True, non_entangling=True)
        return DesignSolution(None, None, float("inf"), False,
                              reason="b01 = b02 only produces theta = 0 gates")

    # raw-theta candidates whose canonical form can reproduce the target
    theta = target.theta
    candidates = []
    for k in range(3):
        base = 2.0 * np.pi * k
        candidates += [base + theta, base + np.pi - theta, base + np.pi + theta,
                       base + 2.0 * np.pi - theta]
    deduped: list[float] = []
    for c in sorted(c for c in candidates if c >= 0):
        if not deduped or c - deduped[-1] > 1e-12:
            deduped.append(c)
    best = None
    for theta_raw in deduped:
        T = 2.0 * theta_raw / diff
        for beta0 in (target.phi, target.phi + np.pi):
            res, dist = _p1_forward(b, T, beta0, target)
            if dist <= 1e-9:
                best = (T, beta0, res, dist)
                break
        if best:
            break
    if best is None:
        res, dist = _p1_forward(b, 2.0 * theta / diff, target.phi, target)
        return DesignSolution(None, res.angles, dist, False,
                              reason="alpha is off the pi - slope*theta line for this ratio",
                              required_ratio_b02_b01=ratio)
    T, beta0, res, dist = best
    params = params_from_blockade(1, b, RotatedBasis(beta0, np.pi / 4), T)
    return DesignSolution(params, res.angles, dist, True,
                          required_ratio_b02_b01=ratio, period=_p1_period(b),
                          non_entangling=res.non_entangling)


def _p2_residual(b: BlockadeSpec, beta1: float, T: float, target: GateAngles) -> float:
    v = noncollinear_from_blockade(b, RotatedBasis(0.0, beta1))
    got = protocol2_angles(v, T).angles
    d_theta = abs(got.theta - target.theta)
    if target.phi_undefined or got.phi_undefined:
        return d_theta
    return max(d_theta, angle_distance(got.phi, target.phi))


def solve_protocol2(target: GateAngles, b: BlockadeSpec,
                    grid: int = 64) -> DesignSolution:
    """Protocol II design: coarse (beta1, T) grid scan followed by damped
    Newton refinement of (theta, phi); alpha is read off the solution.

    All distinct basins below the feasibility residual are reported in
    lexicographic (beta1, T) order; the returned params use the basin with
    the smallest T.
    """
    if b.b01 == b.b02:
        raise ContractViolationError("Protocol II needs b01 != b02")
    t_max = 2.0 * np.pi / abs(b.b01 - b.b02)

    if target.theta < 1e-12:
        # trivial non-entangling family at beta1 in {0, pi/2}
        total = b.b01 + b.b02
        if total == 0.0:
            feasible = angle_distance(target.alpha, 0.0) <= 1e-9
            T = 0.0
        else:
            T = (-target.alpha) / total
            while T < 0:
                T += abs(2.0 * np.pi / total)
            feasible = True
        if feasible:
            params = params_from_blockade(2, b, RotatedBasis(0.0, 0.0), T)
            got = protocol2_angles(params.interaction, T).angles
            return DesignSolution(params, got, target.distance(got), True,
                                  non_entangling=True)
        return DesignSolution(None, None, float("inf"), False,
                              reason="theta = 0 with b01 = -b02 fixes alpha = 0")

    eps_b, eps_t = 1e-6, 1e-9 * t_max

    def refine(x0: np.ndarray) -> tuple[np.ndarray, float]:
        x = x0.copy()
        r = _p2_residual(b, x[0], x[1], target)
        for _ in range(60):
            if r < 1e-12:
                break
            jac = np.zeros((2, 2))
            f0 = _p2_vec(b, x, target)
            for j, h in enumerate((1e-7, 1e-7 * t_max)):
                xp, xm = x.copy(), x.copy()
                xp[j] += h
                xm[j] -= h
                jac[:, j] = (_p2_vec(b, xp, target) - _p2_vec(b, xm, target)) / (2 * h)
            try:
                step = np.linalg.solve(jac, -f0)
            except np.linalg.LinAlgError:
                break
            scale = 1.0
            improved = False
            for _ in range(20):
                xn = x + scale * step
                xn[0] = min(max(xn[0], eps_b), np.pi / 2 - eps_b)
                xn[1] = min(max(xn[1], eps_t), 1.5 * t_max)
                rn = _p2_residual(b, xn[0], xn[1], target)
                if rn < r:
                    x, r = xn, rn
                    improved = True
                    break
                scale *= 0.5
            if not improved:
                break
        return x, r

    basins: list[tuple[float, float, float]] = []
    beta_grid = (np.arange(grid) + 0.5) * (np.pi / 2) / grid
    t_grid = (np.arange(grid) + 0.5) * t_max / grid
    coarse = np.array([[_p2_residual(b, b1, t, target) for t in t_grid] for b1 in beta_grid])
    # refine every local minimum of the coarse scan
    for i in range(grid):
        for j in range(grid):
            val = coarse[i, j]
            lo_i, hi_i = max(i - 1, 0), min(i + 2, grid)
            lo_j, hi_j = max(j - 1, 0), min(j + 2, grid)
            if val > coarse[lo_i:hi_i, lo_j:hi_j].min():
                continue
            x, r = refine(np.array([beta_grid[i], t_grid[j]]))
            if r < RESIDUAL_BASIN:
                basins.append((x[0], x[1], r))
    # dedupe
    basins.sort()
    unique: list[tuple[float, float, float]] = []
    for b1, t, r in basins:
        if any(abs(b1 - u[0]) < 1e-5 and abs(t - u[1]) < 1e-5 for u in unique):
            continue
        unique.append((b1, t, r))

    if not unique:
        return DesignSolution(None, None, float(coarse.min()), False,
                              reason="no basin reaches the target (theta, phi) for this b",
                              basins=())
    best = min(unique, key=lambda u: (u[1], u[0]))
    params = params_from_blockade(2, b, RotatedBasis(0.0, best[0]), best[1])
    got = protocol2_angles(params.interaction, best[1]).angles
    residual = _p2_residual(b, best[0], best[1], target)
    return DesignSolution(params, got, residual, residual < RESIDUAL_CONVERGED,
                          reason=None if residual < RESIDUAL_CONVERGED
                          else "best basin did not converge below 1e-8",
                          basins=tuple((u[0], u[1]) for u in unique))


def _p2_vec(b: BlockadeSpec, x: np.ndarray, target: GateAngles) -> np.ndarray:
    v = noncollinear_from_blockade(b, RotatedBasis(0.0, float(x[0])))
    got = protocol2_angles(v, float(x[1])).angles
    d_phi = 0.0
    if not (target.phi_undefined or got.phi_undefined):
        d_phi = np.mod(got.phi - target.phi + np.pi, 2 * np.pi) - np.pi
    return np.array([got.theta - target.theta, d_phi])


def rationality_diagnostic(angle: float, max_q: int = 10**6) -> RationalityReport:
    """Continued-fraction convergents of angle/pi with a near-rational flag.

    Convergents stop at denominator ``max_q`` or once the approximation hits
    float resolution (error < 1e-12), whichever comes first.
    """
    x = angle / np.pi
    convergents: list[tuple[int, int, float]] = []
    p_prev, q_prev = 1, 0
    p_curr, q_curr = int(np.floor(x)), 1
    rem = x - np.floor(x)
    convergents.append((p_curr, q_curr, abs(x - p_curr)))
    while rem > 1e-15 and convergents[-1][2] >= 1e-12:
        y = 1.0 / rem
        a = int(np.floor(y))
        rem = y - a
        p_next = a * p_curr + p_prev
        q_next = a * q_curr + q_prev
        if q_next > max_q:
            break
        convergents.append((p_next, q_next, abs(x - p_next / q_next)))
        p_prev, q_prev, p_curr, q_curr = p_curr, q_curr, p_next, q_next
    flagged = any(q <= 100 and err <= 1e-9 for _, q, err in convergents)
    return RationalityReport(value_over_pi=float(x),
                             best_convergents=tuple(convergents),
                             flagged_rational=flagged)
