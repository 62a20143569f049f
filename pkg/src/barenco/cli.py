"""Command-line front end.

Subcommands: gate, simulate, errors (budget|force|trap|mc), sweep, design.
Angles accept plain radians or multiples of pi via a ``pi`` suffix
(``0.25pi``, ``-pi``).  Frequency flags carry their unit in the name
(``--omega-2pi-mhz``); wait durations are in us.

Exit codes: 0 ok, 2 usage/contract error, 3 infeasible gate, 4 I/O failure.
Output is JSON on stdout (or ``--out``); sweeps write CSV.  Given the same
flags (and seed) every command produces byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import errors as err
from . import presets, sweeps
from .atoms import (TWO_PI, BlockadeSpec, RotatedBasis, blockade_from_c6,
                    load_interaction_config, noncollinear_from_blockade)
from .design import solve_protocol1, solve_protocol2, rationality_diagnostic
from .dynamics import DecaySpec, SimConfig, simulate
from .exceptions import ContractViolationError, InfeasibleGateError
from .numerics import phase_aligned_deviation
from .protocols import (GateAngles, angle_distance, barenco_matrix, compose_ideal,
                        extract_angles, params_from_blockade, protocol1_angles,
                        protocol2_angles, special_gate)

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4


def parse_angle(text: str) -> float:
    """'0.25pi' -> 0.25*pi, 'pi' -> pi, '-pi' -> -pi, otherwise radians."""
    s = text.strip().lower()
    if s.endswith("pi"):
        head = s[:-2]
        if head in ("", "+"):
            return np.pi
        if head == "-":
            return -np.pi
        return float(head) * np.pi
    return float(s)


def _matrix_json(u: np.ndarray) -> list:
    return [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in u]


def _angles_json(a: GateAngles) -> dict:
    return {"alpha_rad": a.alpha, "theta_rad": a.theta, "phi_rad": a.phi,
            "phi_undefined": a.phi_undefined}


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _interaction_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=presets.PRESET_NAMES,
                   help="bundled interaction configuration")
    p.add_argument("--config", help="key=value interaction config file")
    p.add_argument("--b01-2pi-mhz", type=float, help="blockade shift b01 (x 2pi MHz)")
    p.add_argument("--b02-2pi-mhz", type=float, help="blockade shift b02 (x 2pi MHz)")
    p.add_argument("--beta1", type=parse_angle, default=None,
                   help="mixing angle beta1 (rad, or e.g. 0.25pi)")
    p.add_argument("--beta0", type=parse_angle, default=None,
                   help="interaction phase beta0 (rad, or e.g. -0.5pi)")
    p.add_argument("--beta2", type=parse_angle, default=None,
                   help="optional second mixing angle tuning b02 toward b03 (rad)")
    p.add_argument("--b03-2pi-mhz", type=float, help="blockade shift b03 (x 2pi MHz)")


def _resolve_interaction(args) -> tuple[BlockadeSpec, RotatedBasis]:
    """Blockade shifts and basis from preset/config/explicit flags; explicit
    angle flags override the file values."""
    if args.config:
        vdw, basis = load_interaction_config(args.config)
        b = blockade_from_c6(vdw)
    elif args.preset:
        vdw, basis = presets.load_preset_config(args.preset)
        b = blockade_from_c6(vdw)
    elif args.b01_2pi_mhz is not None and args.b02_2pi_mhz is not None:
        b03 = args.b03_2pi_mhz * TWO_PI if args.b03_2pi_mhz is not None else None
        b = BlockadeSpec(args.b01_2pi_mhz * TWO_PI, args.b02_2pi_mhz * TWO_PI, b03)
        basis = RotatedBasis(beta0=0.0, beta1=np.pi / 4)
    else:
        raise ContractViolationError(
            "interaction unspecified: use --preset, --config, or --b01-2pi-mhz/--b02-2pi-mhz"
        )
    beta0 = args.beta0 if args.beta0 is not None else basis.beta0
    beta1 = args.beta1 if args.beta1 is not None else basis.beta1
    beta2 = args.beta2 if args.beta2 is not None else basis.beta2
    if beta2 and b.b03 is None:
        raise ContractViolationError("--beta2 tuning needs b03 (config key or --b03-2pi-mhz)")
    if beta2 and b.b03 is not None:
        from .atoms import b02_tuned
        b = BlockadeSpec(b.b01, b02_tuned(b.b02, b.b03, beta2), b.b03)
    return b, RotatedBasis(beta0=beta0, beta1=beta1, beta2=beta2)


def _gate_report(params, b: BlockadeSpec, basis: RotatedBasis) -> dict:
    if params.protocol == 1:
        res = protocol1_angles(b, params.T, basis.beta0)
        angles = res.angles
        raw = {"alpha_rad": res.alpha_raw, "theta_rad": res.theta_raw,
               "phi_rad": basis.beta0}
        extra = {"slope": res.slope, "non_entangling": res.non_entangling}
    else:
        res2 = protocol2_angles(params.interaction, params.T)
        angles = res2.angles
        raw = {"alpha_rad": res2.alpha_raw, "theta_rad": res2.theta_raw,
               "phi_rad": res2.phi_raw}
        extra = {"trig": {"sin_theta": res2.sin_theta, "cos_theta": res2.cos_theta,
                          "sin_phi": res2.sin_phi, "cos_phi": res2.cos_phi}}
    matrix = barenco_matrix(angles)
    oracle = compose_ideal(params)
    oracle_angles = extract_angles(oracle)
    report = {
        "protocol": params.protocol,
        "T_us": params.T,
        "interaction": {"v1_rad_us": params.interaction.v1,
                        "v2_rad_us": params.interaction.v2,
                        "ve_rad_us": params.interaction.ve,
                        "beta0_rad": params.interaction.beta0},
        "angles": _angles_json(angles),
        "raw_angles": raw,
        "matrix": _matrix_json(matrix),
        "oracle_residual": phase_aligned_deviation(oracle, matrix),
        "oracle_alpha_offset_rad": angle_distance(oracle_angles.angles.alpha, angles.alpha),
        "flags": [],
    }
    report.update(extra)
    if angles.phi_undefined:
        report["flags"].append("phi_undefined")
    return report


def cmd_gate(args) -> int:
    if args.special:
        if args.b01_2pi_mhz is None:
            raise ContractViolationError("--special needs explicit --b01-2pi-mhz/--b02-2pi-mhz")
        b = BlockadeSpec(args.b01_2pi_mhz * TWO_PI, (args.b02_2pi_mhz or 0.0) * TWO_PI)
        params = special_gate(args.special, b)
        beta0 = params.interaction.beta0
        basis = RotatedBasis(beta0=beta0, beta1=params.interaction.mixing_angle())
        report = _gate_report(params, b, basis)
        report["special"] = args.special
    else:
        if args.T is None:
            raise ContractViolationError("--T is required without --special")
        b, basis = _resolve_interaction(args)
        params = params_from_blockade(args.protocol, b, basis, args.T)
        report = _gate_report(params, b, basis)
    _emit(report, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    b, basis = _resolve_interaction(args)
    params = params_from_blockade(args.protocol, b, basis, args.T)
    decay = None
    if args.tau1_us or args.tau2_us or args.tau_r1_us:
        if not (args.tau1_us and args.tau2_us):
            raise ContractViolationError("decay needs both --tau1-us and --tau2-us")
        decay = DecaySpec(tau1=args.tau1_us, tau2=args.tau2_us,
                          tau_r1=args.tau_r1_us or args.tau1_us)
    cfg = SimConfig(omega=args.omega_2pi_mhz * TWO_PI,
                    include_interaction_during_pulses=not args.ideal_pulses,
                    merge_edge_pulses=args.merged,
                    decay=decay)
    res = simulate(params, b, cfg)
    report = {
        "protocol": args.protocol,
        "T_us": args.T,
        "omega_2pi_mhz": args.omega_2pi_mhz,
        "config": {"include_interaction_during_pulses": cfg.include_interaction_during_pulses,
                   "merge_edge_pulses": cfg.merge_edge_pulses,
                   "decay_taus_us": ([decay.tau1, decay.tau2, decay.tau_r1] if decay else None)},
        "segments": [{"kind": s.kind, "duration_us": s.duration} for s in res.segments],
        "matrix": _matrix_json(res.u_qubit),
        "fidelity_vs_ideal": res.fidelity_vs_ideal,
        "infidelity": 1.0 - res.fidelity_vs_ideal,
        "ideal_angles": _angles_json(res.ideal_angles),
        "extracted_angles": _angles_json(res.angles),
        "extraction_residual": res.extraction_residual,
        "flags": list(res.flags),
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_errors(args) -> int:
    if args.errors_cmd == "budget":
        b, basis = _resolve_interaction(args)
        v = noncollinear_from_blockade(b, basis)
        budget = err.total_budget(v, args.omega_2pi_mhz * TWO_PI, args.T,
                                  args.tau1_us, args.tau2_us, basis.beta1,
                                  protocol=args.protocol)
        _emit({
            "e_decay": budget.e_decay, "e_blockade": budget.e_blockade,
            "e_leakage": budget.e_leakage, "total": budget.total,
            "valid_regime": budget.valid_regime,
            "flags": ["assumed_lifetimes"] if args.tau1_us == presets.APPENDIX_A_TAU_US else [],
        }, args.out)
        return EXIT_OK
    if args.errors_cmd == "force":
        if args.preset:
            vdw = presets.preset_vdw(args.preset)
            c6, l = vdw.c6_01, vdw.l
        else:
            if args.c6_2pi_thz_um6 is None or args.l_um is None:
                raise ContractViolationError("force needs --preset or --c6-2pi-thz-um6/--l-um")
            c6, l = args.c6_2pi_thz_um6 * TWO_PI * 1e6, args.l_um
        fd = err.force_drift(c6, l, args.t_ry, args.mass_kg)
        _emit({"force_N": fd.force, "delta_v_mps": fd.delta_v, "delta_x_um": fd.delta_x},
              args.out)
        return EXIT_OK
    if args.errors_cmd == "trap":
        spec = err.TrapSpec(w=args.w_um, lam=args.lambda_um, depth_mk=args.U_mK,
                            temperature_uk=args.Ta_uK)
        sig = err.trap_sigmas(spec)
        _emit({"sigma_x_um": sig.sigma_x, "sigma_y_um": sig.sigma_y,
               "sigma_z_um": sig.sigma_z, "xi": sig.xi, "thermal_regime": sig.thermal},
              args.out)
        return EXIT_OK
    # mc
    if args.preset:
        vdw = presets.preset_vdw(args.preset)
        trap = presets.preset_trap(args.preset, args.Ta_uK)
    else:
        raise ContractViolationError("errors mc needs --preset")
    b, basis = _resolve_interaction(args)
    params = params_from_blockade(args.protocol, b, basis, args.T)
    res = err.mc_position_error(params, vdw, trap, samples=args.samples, seed=args.seed)
    _emit({"mean_error": res.mean_error, "std_error_of_mean": res.std_error_of_mean,
           "samples": res.samples, "seed": res.seed,
           "invalid_samples": res.invalid_samples, "Ta_uK": args.Ta_uK},
          args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    kwargs = {}
    if args.figure == "fig3":
        if args.ratios:
            kwargs["ratios"] = tuple(Fraction(tok) for tok in args.ratios.split(","))
        if args.theta_max is not None:
            kwargs["theta_max"] = args.theta_max
    if args.figure == "fig5" and args.sets:
        kwargs["sets"] = tuple(args.sets.split(","))
    if args.points is not None:
        kwargs["points"] = args.points
    if args.figure == "fig6":
        b, _ = _resolve_interaction(args)
        kwargs.update(b=b, omega=args.omega_2pi_mhz * TWO_PI,
                      tau1=args.tau1_us, tau2=args.tau2_us,
                      t_min=args.t_min, t_max=args.t_max, t_step=args.t_step,
                      beta1_p1=args.beta1_p1, beta1_p2=args.beta1_p2)
    spec = sweeps.SweepSpec(figure=args.figure, out=Path(args.out), **kwargs)
    sweeps.run_sweep(spec)
    return EXIT_OK


def cmd_design(args) -> int:
    target = GateAngles(args.alpha, args.theta, args.phi)
    if args.protocol == 1:
        if args.free_ratio:
            sol = solve_protocol1(target, free_ratio=True,
                                  b01=(args.b01_2pi_mhz or 1.0) * TWO_PI)
        else:
            if args.b01_2pi_mhz is None or args.b02_2pi_mhz is None:
                raise ContractViolationError("fixed-ratio design needs --b01-2pi-mhz/--b02-2pi-mhz")
            sol = solve_protocol1(target, BlockadeSpec(args.b01_2pi_mhz * TWO_PI,
                                                       args.b02_2pi_mhz * TWO_PI))
    else:
        if args.b01_2pi_mhz is None or args.b02_2pi_mhz is None:
            raise ContractViolationError("protocol 2 design needs --b01-2pi-mhz/--b02-2pi-mhz")
        sol = solve_protocol2(target, BlockadeSpec(args.b01_2pi_mhz * TWO_PI,
                                                   args.b02_2pi_mhz * TWO_PI))
    report = {
        "feasible": sol.feasible,
        "residual_rad": sol.residual,
        "reason": sol.reason,
        "target": _angles_json(target),
        "achieved": _angles_json(sol.achieved) if sol.achieved else None,
        "non_entangling": sol.non_entangling,
        "rationality": {
            "alpha": sol.achieved is not None and rationality_diagnostic(sol.achieved.alpha).flagged_rational,
            "theta": sol.achieved is not None and rationality_diagnostic(sol.achieved.theta).flagged_rational,
        },
    }
    if sol.params is not None:
        v = sol.params.interaction
        report["params"] = {"protocol": sol.params.protocol, "T_us": sol.params.T,
                            "v1_rad_us": v.v1, "v2_rad_us": v.v2, "ve_rad_us": v.ve,
                            "beta0_rad": v.beta0}
    if sol.required_ratio_b02_b01 is not None:
        report["required_ratio_b02_b01"] = sol.required_ratio_b02_b01
    if sol.period is not None:
        report["period_us"] = sol.period
    if sol.basins:
        report["basins"] = [{"beta1_rad": b1, "T_us": t} for b1, t in sol.basins]
    if not sol.feasible:
        _emit(report, args.out)
        return EXIT_INFEASIBLE
    _emit(report, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="barenco",
                                 description="Barenco gate synthesis, simulation and error budgets")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gate", help="closed-form gate angles, matrix and oracle residual")
    _interaction_args(g)
    g.add_argument("--protocol", type=int, choices=(1, 2), default=1)
    g.add_argument("--special", choices=("cnot", "cy", "b1"))
    g.add_argument("--T", type=float, help="wait duration (us)")
    g.add_argument("--out", help="write JSON here instead of stdout")
    g.set_defaults(func=cmd_gate)

    s = sub.add_parser("simulate", help="finite-Rabi pulse-level simulation")
    _interaction_args(s)
    s.add_argument("--protocol", type=int, choices=(1, 2), required=True)
    s.add_argument("--T", type=float, required=True, help="wait duration (us)")
    s.add_argument("--omega-2pi-mhz", type=float, default=30.0, help="Rabi frequency (x 2pi MHz)")
    s.add_argument("--ideal-pulses", action="store_true",
                   help="switch the interaction off during pulses")
    s.add_argument("--merged", action="store_true", help="merge Protocol II edge pulses")
    s.add_argument("--tau1-us", type=float, help="target |R1> lifetime (us), enables decay")
    s.add_argument("--tau2-us", type=float, help="target |R2> lifetime (us)")
    s.add_argument("--tau-r1-us", type=float, help="control Rydberg lifetime (us, default tau1)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("errors", help="analytic budget, force drift, trap spread, Monte Carlo")
    esub = e.add_subparsers(dest="errors_cmd", required=True)

    eb = esub.add_parser("budget", help="decay + blockade + leakage budget")
    _interaction_args(eb)
    eb.add_argument("--protocol", type=int, choices=(1, 2), default=1)
    eb.add_argument("--T", type=float, required=True, help="total wait time (us)")
    eb.add_argument("--omega-2pi-mhz", type=float, default=30.0)
    eb.add_argument("--tau1-us", type=float, default=presets.APPENDIX_A_TAU_US,
                    help="lifetime of |R1> (us; default is an assumed value)")
    eb.add_argument("--tau2-us", type=float, default=presets.APPENDIX_A_TAU_US)
    eb.add_argument("--out")
    eb.set_defaults(func=cmd_errors)

    ef = esub.add_parser("force", help="interatomic force drift over a Rydberg dwell")
    ef.add_argument("--preset", choices=presets.PRESET_NAMES)
    ef.add_argument("--c6-2pi-thz-um6", type=float, help="C6 (x 2pi THz um^6)")
    ef.add_argument("--l-um", type=float, help="pair distance (um)")
    ef.add_argument("--t-ry", type=float, required=True, help="Rydberg dwell time (us)")
    ef.add_argument("--mass-kg", type=float, default=err.RB87_MASS)
    ef.add_argument("--out")
    ef.set_defaults(func=cmd_errors)

    et = esub.add_parser("trap", help="thermal position spread of a tweezer")
    et.add_argument("--w-um", type=float, required=True, help="beam waist (um)")
    et.add_argument("--lambda-um", type=float, required=True, help="wavelength (um)")
    et.add_argument("--U-mK", type=float, required=True, help="trap depth (mK)")
    et.add_argument("--Ta-uK", type=float, required=True, help="atom temperature (uK)")
    et.add_argument("--out")
    et.set_defaults(func=cmd_errors)

    em = esub.add_parser("mc", help="Monte Carlo position-fluctuation infidelity")
    _interaction_args(em)
    em.add_argument("--protocol", type=int, choices=(1, 2), default=1)
    em.add_argument("--T", type=float, default=0.5, help="wait duration (us)")
    em.add_argument("--Ta-uK", type=float, required=True, help="atom temperature (uK)")
    em.add_argument("--samples", type=int, default=100000)
    em.add_argument("--seed", type=int, default=0)
    em.add_argument("--out")
    em.set_defaults(func=cmd_errors)

    w = sub.add_parser("sweep", help="figure-data CSV sweeps")
    _interaction_args(w)
    w.add_argument("--figure", choices=("fig3", "fig5", "fig6"), required=True)
    w.add_argument("--out", required=True, help="CSV output path")
    w.add_argument("--ratios", help="fig3 b01/b02 ratios, e.g. 3,2,3/2")
    w.add_argument("--theta-max", type=parse_angle, default=None, help="fig3 theta range")
    w.add_argument("--sets", help="fig5 v1:v2:ve sets, comma separated")
    w.add_argument("--points", type=int, default=None, help="points per curve (fig3/fig5)")
    w.add_argument("--omega-2pi-mhz", type=float, default=30.0)
    w.add_argument("--tau1-us", type=float, default=presets.APPENDIX_A_TAU_US)
    w.add_argument("--tau2-us", type=float, default=presets.APPENDIX_A_TAU_US)
    w.add_argument("--t-min", type=float, default=0.05)
    w.add_argument("--t-max", type=float, default=4.0)
    w.add_argument("--t-step", type=float, default=0.05)
    w.add_argument("--beta1-p1", type=parse_angle, default=np.pi / 4)
    w.add_argument("--beta1-p2", type=parse_angle, default=3 * np.pi / 8)
    w.set_defaults(func=cmd_sweep)

    d = sub.add_parser("design", help="target angles -> protocol parameters")
    d.add_argument("--protocol", type=int, choices=(1, 2), required=True)
    d.add_argument("--alpha", type=parse_angle, required=True, help="rad or e.g. 0.25pi")
    d.add_argument("--theta", type=parse_angle, required=True)
    d.add_argument("--phi", type=parse_angle, required=True)
    d.add_argument("--b01-2pi-mhz", type=float)
    d.add_argument("--b02-2pi-mhz", type=float)
    d.add_argument("--free-ratio", action="store_true",
                   help="solve for the required b02/b01 instead of fixing it")
    d.add_argument("--out")
    d.set_defaults(func=cmd_design)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleGateError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ContractViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
