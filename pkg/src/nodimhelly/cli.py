"""Command-line interface.

Exit codes: 0 witness / verified run, 1 certificate (or failed self-check),
2 usage or input error, 3 indeterminate result or solver failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import io as nio
from .errors import ContractError, InputError, NodimError, PreconditionError, SolverError
from .geometry import Tolerances, default_tolerances
from .moduli import Budget, modulus_table
from .space import SpaceSpec

EXIT_OK, EXIT_CERTIFICATE, EXIT_USAGE, EXIT_INDETERMINATE = 0, 1, 2, 3
DEFAULT_SEED = 0


@dataclass
class RunConfig:
    seed: int = DEFAULT_SEED
    tolerances: dict = field(default_factory=dict)
    budgets: dict = field(default_factory=dict)
    output_format: str = "json"
    output_path: str | None = None

    def __post_init__(self):
        for k, v in self.tolerances.items():
            if not (isinstance(v, (int, float)) and v > 0):
                raise InputError(f"tolerance {k} must be positive, got {v!r}")

    @property
    def tol(self) -> float:
        return float(self.tolerances.get("tol", 1e-9))

    def solver_tolerances(self, space: SpaceSpec) -> Tolerances:
        base = default_tolerances(space)
        return Tolerances(float(self.tolerances.get("feas_tol", base.feas)),
                          int(self.tolerances.get("maxiter", base.maxiter)),
                          base.step, base.stall_window)

    def budget(self) -> Budget:
        b = Budget()
        return Budget(int(self.budgets.get("restarts", b.restarts)),
                      int(self.budgets.get("iterations", b.iterations)),
                      self.seed, int(self.budgets.get("angular_grid", b.angular_grid)))


def _resolve_config(args) -> RunConfig:
    data = nio.read_json(args.config) if getattr(args, "config", None) else {}
    if not isinstance(data, dict):
        raise InputError("config: expected an object")
    seed = data.get("seed", DEFAULT_SEED)
    if os.environ.get("NODIM_SEED"):
        try:
            seed = int(os.environ["NODIM_SEED"])
        except ValueError:
            raise InputError("NODIM_SEED must be an integer") from None
    if args.seed is not None:
        seed = args.seed
    tolerances = dict(data.get("tolerances", {}))
    for key in ("tol", "feas_tol", "maxiter"):
        v = getattr(args, key, None)
        if v is not None:
            tolerances[key] = v
    budgets = dict(data.get("budgets", {}))
    for key in ("restarts", "iterations", "tuple_budget", "center_candidates", "dir_samples"):
        v = getattr(args, key, None)
        if v is not None:
            budgets[key] = v
    fmt = args.format or data.get("output_format") or args.default_format
    if fmt not in ("json", "csv"):
        raise InputError(f"output_format: expected json or csv, got {fmt!r}")
    return RunConfig(int(seed), tolerances, budgets, fmt, args.output)


def _emit(cfg: RunConfig, text: str):
    if cfg.output_path and cfg.output_path != "-":
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _space_from_flags(args) -> SpaceSpec:
    p = float(args.p)
    mode = args.mode
    if mode == "auto":
        mode = "euclidean" if p == 2.0 else "lp"
    return SpaceSpec(p, args.dim, mode)


def _parse_grid(text: str) -> np.ndarray:
    try:
        parts = [float(v) for v in text.split(":")]
    except ValueError:
        raise InputError(f"--eps: cannot parse {text!r}; use start:stop:step") from None
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise InputError("--eps: expected start:stop:step with step > 0")
    start, stop, step = parts
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


# --- commands -----------------------------------------------------------------

def cmd_modulus(args, cfg):
    space = _space_from_flags(args)
    space.require_uniformly_convex()
    grid = _parse_grid(args.eps)
    table = modulus_table(space, grid, cfg.budget())
    if cfg.output_format == "csv":
        _emit(cfg, table.to_csv())
    else:
        _emit(cfg, nio.dumps({"space": space.to_dict(), "eps": table.eps_grid,
                              "delta": table.delta, "zeta_minus": table.zeta_minus,
                              "zeta_plus": table.zeta_plus}))
    return EXIT_OK


def cmd_rk(args, cfg):
    from .sequences import (caratheodory_radii, euclidean_remark_params, helly_radii,
                            power_type_params)
    space = _space_from_flags(args)
    space.require_uniformly_convex()
    if args.k_max < 1:
        raise InputError("--k-max must be >= 1")
    budget = cfg.budget()
    if args.caratheodory:
        seq = caratheodory_radii(space, args.k_max, budget)
        bound = None
    else:
        seq = helly_radii(space, args.k_max, budget)
        bound = euclidean_remark_params() if space.is_euclidean else power_type_params(space, budget)
    if cfg.output_format == "csv":
        _emit(cfg, seq.to_csv(bound))
    else:
        from .sequences import rk_power_bound
        out = {"space": space.to_dict(), "kind": seq.kind, "zeta_source": seq.zeta_source,
               "values": seq.values}
        if bound is not None:
            out["bound_params"] = {"C_X": bound.C_X, "q": bound.q, "tilde_C_r": bound.tilde_C_r}
            out["bound"] = rk_power_bound(bound, np.arange(1, len(seq) + 1))
        _emit(cfg, nio.dumps(out))
    return EXIT_OK


def _helly_rseq(space, k, cfg):
    from .sequences import helly_radii
    return helly_radii(space, max(k, 1), cfg.budget())


def _outcome_from_dict(d):
    from .helly import Certificate, Witness
    if d.get("kind") == "witness":
        return Witness(np.asarray(d["x"], dtype=float), np.asarray(d.get("per_set_dist", []), dtype=float),
                       float(d["radius"]), int(d["k"]), d.get("color"))
    if d.get("kind") == "certificate":
        idx = [tuple(i) if isinstance(i, list) else int(i) for i in d["indices"]]
        return Certificate(idx, nio.parse_float(d["dist_lower_bound"]), float(d["radius"]), int(d["k"]))
    raise InputError("outcome.kind: expected 'witness' or 'certificate'")


def _finish_outcome(cfg, space, k, outcome, verified, colorful=False):
    payload = {"space": space.to_dict(), "k": k, "colorful": colorful,
               "outcome": outcome.to_dict(), "verified": bool(verified)}
    _emit(cfg, nio.dumps(payload))
    if not verified:
        return EXIT_INDETERMINATE
    return EXIT_OK if outcome.kind == "witness" else EXIT_CERTIFICATE


def _helly_like(args, cfg, colorful):
    from .helly import colorful_search, helly_search, verify_outcome
    inst = nio.load_instance(args.instance)
    space = inst["space"]
    if colorful:
        if "families" not in inst:
            raise InputError("families: missing")
        data = inst["families"]
        k = len(data)
    else:
        if "sets" not in inst:
            raise InputError("sets: missing")
        data = inst["sets"]
        k = args.k if args.k is not None else inst.get("k")
        if k is None:
            raise InputError("k: missing (give it in the instance or with --k)")
    if args.verify_only:
        raw = nio.read_json(args.verify_only)
        if not isinstance(raw, dict) or "outcome" not in raw:
            raise InputError("outcome: missing")
        outcome = _outcome_from_dict(raw["outcome"])
        verified = verify_outcome(space, data, outcome, cfg.tol, colorful)
        return _finish_outcome(cfg, space, k, outcome, verified, colorful)
    rseq = _helly_rseq(space, k, cfg)
    stol = cfg.solver_tolerances(space)
    if colorful:
        outcome = colorful_search(space, data, rseq, cfg.tol, stol, args.threads)
    else:
        outcome = helly_search(space, data, k, rseq, cfg.tol, stol, args.threads)
    verified = verify_outcome(space, data, outcome, cfg.tol, colorful)
    return _finish_outcome(cfg, space, k, outcome, verified, colorful)


def cmd_helly(args, cfg):
    return _helly_like(args, cfg, colorful=False)


def cmd_colorful(args, cfg):
    return _helly_like(args, cfg, colorful=True)


def cmd_fractional(args, cfg):
    from .helly import fractional_verify
    inst = nio.load_instance(args.instance)
    space = inst["space"]
    colorful = "families" in inst
    data = inst["families"] if colorful else inst.get("sets")
    if data is None:
        raise InputError("sets: missing")
    k = len(data) if colorful else (args.k if args.k is not None else inst.get("k"))
    if k is None:
        raise InputError("k: missing (give it in the instance or with --k)")
    rseq = _helly_rseq(space, k, cfg)
    rep = fractional_verify(space, data, k, args.alpha, rseq,
                            int(cfg.budgets.get("tuple_budget", 20_000)),
                            int(cfg.budgets.get("center_candidates", 5_000)),
                            cfg.seed, cfg.tol, colorful, args.threads)
    _emit(cfg, nio.dumps({"space": space.to_dict(), "k": k, "colorful": colorful,
                          "report": rep.to_dict(), "verified": rep.clears_beta}))
    return EXIT_OK if rep.clears_beta else EXIT_INDETERMINATE


def cmd_centerpoint(args, cfg):
    from .helly import centerpoint
    inst = nio.load_instance(args.instance)
    space = inst["space"]
    if "points" not in inst:
        raise InputError("points: missing")
    k = args.k if args.k is not None else inst.get("k")
    if k is None:
        raise InputError("k: missing (give it in the instance or with --k)")
    rseq = _helly_rseq(space, k, cfg)
    res = centerpoint(space, inst["points"], k, rseq,
                      int(cfg.budgets.get("dir_samples", 256)), cfg.seed, cfg.tol, args.threads)
    _emit(cfg, nio.dumps({"space": space.to_dict(), "k": k, "result": res.to_dict(),
                          "verified": res.passed}))
    return EXIT_OK if res.passed else EXIT_INDETERMINATE


def cmd_caratheodory(args, cfg):
    from .caratheodory import error_curve_csv, greedy_caratheodory
    from .sequences import caratheodory_radii
    inst = nio.load_instance(args.instance)
    space = inst["space"]
    if "points" not in inst:
        raise InputError("points: missing")
    K = args.K if args.K is not None else inst.get("K")
    if K is None:
        raise InputError("K: missing (give it in the instance or with --K)")
    Rseq = caratheodory_radii(space, K, cfg.budget())
    run = greedy_caratheodory(space, inst["points"], K, Rseq, cfg.tol)
    if cfg.output_format == "csv":
        _emit(cfg, error_curve_csv(run))
    else:
        _emit(cfg, nio.dumps({"space": space.to_dict(), "run": run.to_dict(), "verified": True}))
    return EXIT_OK


def cmd_selfcheck(args, cfg):
    from .verifier import run_selfcheck
    ps = tuple(float(v) for v in args.ps.split(","))
    dims = tuple(int(v) for v in args.dims.split(","))
    reports = run_selfcheck(ps, dims, args.trials, cfg.seed, cfg.budget(), args.threads)
    ok = all(r.passed for r in reports)
    _emit(cfg, nio.dumps({"passed": ok, "seed": cfg.seed,
                          "reports": [r.to_dict() for r in reports]}))
    return EXIT_OK if ok else EXIT_CERTIFICATE


# --- parser ---------------------------------------------------------------------

def _common(sp):
    sp.add_argument("--seed", type=int, default=None, help="RNG seed (overrides NODIM_SEED)")
    sp.add_argument("--config", help="JSON run configuration")
    sp.add_argument("--format", choices=("json", "csv"), default=None)
    sp.add_argument("-o", "--output", help="output path (default: stdout)")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--tol", type=float, default=None, help="engine slack (relative)")
    sp.add_argument("--feas-tol", dest="feas_tol", type=float, default=None)
    sp.add_argument("--maxiter", type=int, default=None)
    sp.add_argument("--restarts", type=int, default=None)
    sp.add_argument("--iterations", type=int, default=None)


def _space_flags(sp):
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--mode", choices=("auto", "euclidean", "lp"), default="auto")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nodimhelly",
                                 description="No-dimensional Helly and Caratheodory tools for l_p spaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("modulus", help="tabulate delta, zeta- and zeta+")
    _space_flags(sp)
    sp.add_argument("--eps", default="0:2:0.1", help="grid start:stop:step")
    _common(sp)
    sp.set_defaults(func=cmd_modulus, default_format="csv")

    sp = sub.add_parser("rk", help="Helly radii r_k (or Caratheodory bounds R_k)")
    _space_flags(sp)
    sp.add_argument("--k-max", dest="k_max", type=int, required=True)
    sp.add_argument("--caratheodory", action="store_true")
    _common(sp)
    sp.set_defaults(func=cmd_rk, default_format="csv")

    for name, func, hlp in (("helly", cmd_helly, "witness or certificate for one family"),
                            ("colorful", cmd_colorful, "colorful variant over several families")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("instance")
        sp.add_argument("--k", type=int, default=None)
        sp.add_argument("--verify-only", dest="verify_only", metavar="OUTCOME",
                        help="re-verify a saved outcome file instead of searching")
        _common(sp)
        sp.set_defaults(func=func, default_format="json")

    sp = sub.add_parser("fractional", help="measure alpha and search for a beta-center")
    sp.add_argument("instance")
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--tuple-budget", dest="tuple_budget", type=int, default=None)
    sp.add_argument("--center-candidates", dest="center_candidates", type=int, default=None)
    _common(sp)
    sp.set_defaults(func=cmd_fractional, default_format="json")

    sp = sub.add_parser("centerpoint", help="no-dimensional centerpoint (euclidean, n <= 14)")
    sp.add_argument("instance")
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--dir-samples", dest="dir_samples", type=int, default=None)
    _common(sp)
    sp.set_defaults(func=cmd_centerpoint, default_format="json")

    sp = sub.add_parser("caratheodory", help="greedy Caratheodory run and error curve")
    sp.add_argument("instance")
    sp.add_argument("--K", type=int, default=None)
    _common(sp)
    sp.set_defaults(func=cmd_caratheodory, default_format="json")

    sp = sub.add_parser("selfcheck", help="sampling checks of the geometric lemmas")
    sp.add_argument("--ps", default="1.5,2,3")
    sp.add_argument("--dims", default="2,3,4")
    sp.add_argument("--trials", type=int, default=200)
    _common(sp)
    sp.set_defaults(func=cmd_selfcheck, default_format="json")
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads < 1:
            raise InputError("--threads must be >= 1")
        cfg = _resolve_config(args)
        return args.func(args, cfg)
    except (InputError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (SolverError, ContractError) as exc:
        print(f"indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except NodimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE


if __name__ == "__main__":
    sys.exit(main())
