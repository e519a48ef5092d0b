"""Command-line front end.

One entry point drives every study: single simulations, singular-point
location, case classification, series expansion, and the four experiment
harnesses.  All numeric output goes to CSV files in ``--out``; a short
human-readable summary goes to stdout.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 expectation mismatch (only for commands run with ``--check``).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import canard, experiments, gspot
from .contact import (make_extended_example, make_impact_oscillator,
                      make_simple_example, oscillator_gspot_guess)
from .experiments import ConfigError, ExperimentConfig
from .hypergeo import perturbation_exponents
from .ring import DomainError
from .sim import (SimConfig, SimulationError, oscillator_contact_ic,
                  relaxed_initial_state, simulate)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_MISMATCH = 4


def build_system(args):
    if args.system == "simple":
        return make_simple_example(-1.0, -1.0, -args.beta)
    if args.system == "extended":
        return make_extended_example(args.chi, -1.0, -1.0, -args.beta)
    if args.system == "oscillator":
        return make_impact_oscillator(args.beta, args.kappa)
    raise ConfigError(f"unknown system {args.system!r}")


def _float_list(text: str):
    return tuple(float(x) for x in text.split(",") if x)


def load_config_file(path: str) -> dict:
    """Flat key=value file mirroring the CLI flags."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line: {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jamlab",
        description="numerical laboratory for dynamic jam and canard "
                    "trajectories in planar frictional contact")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--system", default="simple",
                       choices=["simple", "extended", "oscillator"])
        p.add_argument("--beta", type=float, default=1.5)
        p.add_argument("--kappa", type=float, default=0.0)
        p.add_argument("--chi", type=float, default=1.0)
        p.add_argument("--eps", type=_float_list, default=(1e-3,))
        p.add_argument("--nu", type=_float_list, default=(0.25, 0.5, 1.0, 2.0, 4.0))
        p.add_argument("--order", type=int, default=15)
        p.add_argument("--t-end", type=float, default=3.0)
        p.add_argument("--out", default=".")
        p.add_argument("--config", default=None,
                       help="key=value file; explicit flags win")
        p.add_argument("--check", action="store_true",
                       help="verify expected outcomes; mismatch exits 4")

    for name in ("simulate", "find-gspot", "classify", "expand",
                 "scaling-study", "dichotomy", "post-gspot",
                 "oscillator-verify"):
        p = sub.add_parser(name)
        add_common(p)
    return parser


def apply_config_file(args, parser):
    if args.config is None:
        return args
    file_vals = load_config_file(args.config)
    explicit = {a.split("=")[0].lstrip("-").replace("-", "_")
                for a in sys.argv if a.startswith("--")}
    for key, val in file_vals.items():
        if key in explicit or not hasattr(args, key):
            continue
        current = getattr(args, key)
        if isinstance(current, tuple):
            setattr(args, key, _float_list(val))
        elif isinstance(current, bool):
            setattr(args, key, val.lower() in ("1", "true", "yes"))
        elif isinstance(current, int):
            setattr(args, key, int(val))
        elif isinstance(current, float):
            setattr(args, key, float(val))
        else:
            setattr(args, key, val)
    return args


def to_experiment_config(args) -> ExperimentConfig:
    return ExperimentConfig(
        system=args.system,
        beta_list=(args.beta,) if isinstance(args.beta, float) else tuple(args.beta),
        eps_list=args.eps, nu_list=args.nu, kappa=args.kappa,
        chi_list=(args.chi,), order=args.order, t_end=args.t_end,
        out_dir=args.out).validate()


def cmd_simulate(args) -> int:
    sys_ = build_system(args)
    eps = args.eps[0]
    cfg = SimConfig(eps=eps, t_span=(0.0, args.t_end))
    if args.system == "oscillator":
        xi0, z0 = oscillator_contact_ic(sys_, dphi=-0.9)
        traj = simulate(sys_, xi0, cfg, z0=z0)
    else:
        ic = relaxed_initial_state(sys_, args.nu[0], eps,
                                   u0=70.0 if args.system == "extended" else 0.0)
        traj = simulate(sys_, ic, cfg)
    paths = experiments.emit_trajectory(traj, Path(args.out) / "trajectory.csv")
    print(f"samples: {len(traj.t)}  events: "
          f"{' '.join(ev.kind for ev in traj.events) or 'none'}")
    print("wrote: " + " ".join(str(p) for p in paths))
    return EXIT_OK


def cmd_find_gspot(args) -> int:
    sys_ = build_system(args)
    if args.system == "oscillator":
        guess = oscillator_gspot_guess(sys_)
    else:
        guess = np.zeros(sys_.m) + 1e-3
    info = gspot.find_gspot(sys_, guess)
    out = Path(args.out) / "gspot.txt"
    out.write_text(info.to_text())
    print(info.to_text(), end="")
    print(f"wrote: {out}")
    return EXIT_OK


def cmd_classify(args) -> int:
    sys_ = build_system(args)
    if args.system == "oscillator":
        info = gspot.find_gspot(sys_, oscillator_gspot_guess(sys_))
        a1, a2, a3 = info.alpha1, info.alpha2, info.alpha3
    else:
        pr = sys_.params
        a1, a2, a3 = (float(pr["alpha1"]), float(pr["alpha2"]),
                      float(pr["alpha3"]))
    case = gspot.classify_case(a1, a2, a3)
    beta = a3 / a1
    print(f"case: {case}  beta: {beta:.6g}  "
          f"alphas: {a1:.6g} {a2:.6g} {a3:.6g}")
    if case == "III":
        exps = perturbation_exponents(beta)
        print("perturbation exponents: "
              + " ".join(f"{k}={v:.4f}" for k, v in exps.items()))
    return EXIT_OK


def cmd_expand(args) -> int:
    sys_ = build_system(args)
    if args.system == "oscillator":
        info = gspot.find_gspot(sys_, oscillator_gspot_guess(sys_), tol=1e-13)
        exp = canard.expand(sys_, info, M=args.order)
    else:
        from fractions import Fraction
        zero = [Fraction(0)] * sys_.m
        sys_exact = (make_extended_example(Fraction(args.chi).limit_denominator(10**6),
                                           Fraction(-1), Fraction(-1),
                                           -Fraction(args.beta).limit_denominator(10**6))
                     if args.system == "extended" else
                     make_simple_example(Fraction(-1), Fraction(-1),
                                         -Fraction(args.beta).limit_denominator(10**6)))
        exp = canard.expand(sys_exact, zero, M=args.order)
    out = Path(args.out) / "expansion.txt"
    out.write_text(exp.scaled_series_text())
    print(f"expansion through order {args.order}; beta = {exp.gspot.beta:.6g}")
    print(f"wrote: {out}")
    return EXIT_OK


def cmd_scaling_study(args) -> int:
    cfg = to_experiment_config(args)
    if isinstance(args.beta, float):
        cfg.beta_list = (args.beta,)
    reports = experiments.run_scaling_study(cfg)
    paths = experiments.emit_scaling(cfg, reports)
    bad = 0
    for rep in reports:
        for var, fit in rep.fits.items():
            flag = ""
            if args.check and abs(fit.measured - fit.theory) > 0.02:
                flag = "  MISMATCH"
                bad += 1
            print(f"beta={rep.beta:g} {var}: measured {fit.measured:.4f} "
                  f"theory {fit.theory:.4f} R2={fit.r_squared:.6f}{flag}")
    print("wrote: " + " ".join(str(p) for p in paths))
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_dichotomy(args) -> int:
    cfg = to_experiment_config(args)
    reports = experiments.run_dichotomy(cfg)
    paths = experiments.emit_dichotomy(cfg, reports)
    bad = 0
    for rep in reports:
        sides = rep.impact_sides()
        desc = " ".join(f"{side}:{'/'.join(sorted(outs))}"
                        for side, outs in sorted(sides.items()))
        print(f"beta={rep.beta:g}  {desc}")
        if args.check:
            expected = _expected_sides(rep.beta)
            if expected and sides != expected:
                print(f"  MISMATCH: expected {expected}")
                bad += 1
    print("wrote: " + " ".join(str(p) for p in paths))
    return EXIT_MISMATCH if bad else EXIT_OK


def _expected_sides(beta: float):
    if beta == 0.5:
        return {"above": {"iwc"}, "below": {"iwc"}}
    if beta == 1.5:
        return {"above": {"iwc"}, "below": {"lift-off"}}
    if beta == 2.5:
        return {"above": {"lift-off"}, "below": {"iwc"}}
    return None


def cmd_post_gspot(args) -> int:
    cfg = to_experiment_config(args)
    cfg.chi_list = (0.0, 1.0) if args.config is None else cfg.chi_list
    entries = experiments.run_post_gspot(cfg)
    paths = experiments.emit_post_gspot(cfg, entries)
    for e in entries:
        print(f"chi={e.chi:g} nu={e.nu:g}: {e.outcome} at t={e.t_event:.4g} "
              f"(u={e.u_event:.4g})")
    if args.check:
        chi0 = [e for e in entries if e.chi == 0.0]
        chi1 = [e for e in entries if e.chi == 1.0]
        ok = (all(e.outcome == "stick" for e in chi0)
              and sorted(e.outcome for e in chi1) == ["lift-off", "stick"])
        if not ok:
            print("MISMATCH: expected all-stick at chi=0 and exactly one "
                  "lift-off at chi=1")
            return EXIT_MISMATCH
    print("wrote: " + " ".join(str(p) for p in paths))
    return EXIT_OK


def cmd_oscillator_verify(args) -> int:
    cfg = to_experiment_config(args)
    eps = args.eps[0] if args.eps else 1e-6
    rep = experiments.run_oscillator_verify(cfg, eps=eps)
    paths = experiments.emit_oscillator_verify(cfg, rep)
    print(f"singular point: {rep.gspot.xi_star}")
    print(f"alphas: {rep.gspot.alpha1:.5f} {rep.gspot.alpha2:.5f} "
          f"{rep.gspot.alpha3:.5f}  case {rep.gspot.case}")
    print(f"first start events: {' '.join(rep.ic1_event_kinds)}")
    print(f"second start outcome: {rep.ic2_outcome}")
    print(f"expansion overlay max rel dev: {rep.ic3_max_rel_dev:.3e}")
    print(f"Theta overlay max rel dev: {rep.theta_max_rel_dev:.3e}")
    print("wrote: " + " ".join(str(p) for p in paths))
    if args.check:
        seq_ok = ("gspot-passage" in rep.ic1_event_kinds
                  and "lift-off" in rep.ic1_event_kinds
                  and "touch-down" in rep.ic1_event_kinds)
        if not (seq_ok and rep.ic2_outcome == "iwc"
                and rep.ic3_max_rel_dev < 1e-3
                and rep.theta_max_rel_dev < 0.2):
            print("MISMATCH in oscillator verification")
            return EXIT_MISMATCH
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "find-gspot": cmd_find_gspot,
    "classify": cmd_classify,
    "expand": cmd_expand,
    "scaling-study": cmd_scaling_study,
    "dichotomy": cmd_dichotomy,
    "post-gspot": cmd_post_gspot,
    "oscillator-verify": cmd_oscillator_verify,
}


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        args = apply_config_file(args, parser)
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, DomainError, gspot.ConvergenceError,
            canard.ExpansionError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
