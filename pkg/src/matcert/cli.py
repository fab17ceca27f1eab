"""Command-line front end.

Subcommands: ``interp`` (evaluate p(A) and write it out), ``bound``
(compute certificates side by side), ``cheb-demo`` (Chebyshev-node
comparison table), ``experiment`` (randomized validity experiment),
``expm`` and ``schur`` (debug access to the kernels). Matrices travel as
Matrix Market files; reports are JSON on stdout; diagnostics go to
stderr. Exit codes: 0 success, 1 computation failure, 2 usage or I/O
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import bounds, experiment, interp, linalg, mmio
from .errors import MatcertError

logger = logging.getLogger(__name__)

_BOUND_METHODS = ("theorem1", "cor3", "cor4", "cor5", "cor6", "taylor")
_EXP_ONLY = {"cor3", "cor4", "cor5", "cor6"}


def parse_complex_item(text: str) -> complex:
    """One node: a complex literal like ``-1+2j`` or an arithmetic
    expression over ``pi``, ``e`` and the imaginary unit ``j``
    (for example ``-1+3*pi*j/4``)."""
    s = text.strip()
    try:
        return complex(s.replace(" ", ""))
    except ValueError:
        pass
    if not set(s) <= set("0123456789.+-*/() jepi"):
        raise ValueError(f"cannot parse complex value {s!r}")
    try:
        value = eval(s, {"__builtins__": None},  # noqa: S307 - restricted names
                     {"pi": math.pi, "e": math.e, "j": 1j})
        return complex(value)
    except Exception as exc:
        raise ValueError(f"cannot parse complex value {s!r}") from exc


def parse_node_text(text: str) -> interp.NodeSet:
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise ValueError("empty node list")
    return interp.NodeSet(parse_complex_item(s) for s in items)


def _nodes_from_args(args) -> interp.NodeSet:
    if args.nodes is not None:
        return parse_node_text(args.nodes)
    if args.nodes_file is not None:
        return interp.read_node_file(args.nodes_file)
    raise ValueError("provide nodes with --nodes or --nodes-file")


def _function_from_args(args) -> interp.AnalyticFunction:
    if args.function == "exp":
        return interp.EXP
    if args.coeffs is None:
        raise ValueError("--function poly requires --coeffs")
    return interp.polynomial_function(
        parse_complex_item(s) for s in args.coeffs.split(","))


def _norm_from_args(args) -> linalg.MatrixNorm:
    try:
        return linalg.NORMS[args.norm]
    except KeyError:
        raise ValueError(f"unknown norm {args.norm!r}; choose from {sorted(linalg.NORMS)}")


def _emit(args, payload: dict | list) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        _emit_plain(payload)


def _emit_plain(payload, prefix: str = "") -> None:
    if isinstance(payload, dict):
        for key, val in payload.items():
            if isinstance(val, (dict, list)):
                _emit_plain(val, f"{prefix}{key}.")
            else:
                print(f"{prefix}{key} = {val}")
    else:
        for i, val in enumerate(payload):
            _emit_plain(val, f"{prefix}{i}.")


def cmd_interp(args) -> int:
    a = mmio.read_matrix(args.matrix)
    nodes = _nodes_from_args(args)
    f = _function_from_args(args)
    poly = interp.divided_differences(f, nodes)
    pa = interp.newton_eval_matrix(poly, a)
    mmio.write_matrix(args.out, pa)
    residual = max(
        abs(interp.newton_eval_scalar(poly, z) - complex(f.scalar_eval(z)))
        for z in nodes.values
    )
    summary = {"out": os.fspath(args.out), "nodes": nodes.m,
               "max_node_residual": residual}
    if args.reference is not None:
        ref = mmio.read_matrix(args.reference)
        summary["true_error"] = bounds.true_error(a, nodes, f, ref,
                                                  norm=_norm_from_args(args))
    _emit(args, summary)
    return 0


def cmd_bound(args) -> int:
    a = mmio.read_matrix(args.matrix)
    nodes = _nodes_from_args(args)
    f = _function_from_args(args)
    norm = _norm_from_args(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in _BOUND_METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {_BOUND_METHODS}")
    reports: list[dict] = []
    for method in methods:
        try:
            if method in _EXP_ONLY and f.name != "exp":
                raise ValueError(f"{method} applies to the exponential only")
            if method == "theorem1":
                rep = bounds.theorem_bound(
                    a, nodes, f, t_count=args.t_count, per_edge=args.per_edge,
                    norm=norm, threads=args.threads)
            elif method == "cor3":
                rep = bounds.exp_bound_cor3(
                    a, nodes, t_count=args.t_count, norm=norm,
                    beta_override=args.beta, threads=args.threads)
            elif method == "cor4":
                rep = bounds.exp_bound_cor4(a, nodes, norm=norm)
            elif method == "cor5":
                rep = bounds.exp_bound_cor5(a, nodes, norm=norm)
            elif method == "cor6":
                rep = bounds.exp_bound_cor6(a, nodes, norm=norm)
            else:
                if len(set(nodes.values)) != 1:
                    raise ValueError(
                        "the taylor method needs a single repeated node")
                rep = bounds.taylor_bound(
                    a, nodes.values[0], nodes.m, f, t_count=args.t_count,
                    per_edge=args.per_edge, norm=norm, threads=args.threads)
            reports.append(rep.to_json_dict())
        except (MatcertError, ValueError) as exc:
            logger.error("method %s failed: %s", method, exc)
            reports.append({"method": method, "error": str(exc)})
    ok = [r for r in reports if "error" not in r]
    if ok:
        tightest = min(ok, key=lambda r: r["value"])["method"]
        for r in reports:
            r["tightest"] = r.get("method") == tightest
    _emit(args, reports)
    return 0 if ok else 1


def cheb_demo_values(n: int, spectrum_size: int = 201,
                     grid_points: int = 10001) -> dict:
    """Numbers behind the demo table for degree-n Chebyshev nodes.

    (a) the closed form (1/n!) e / 2^(n-1); (b) the normal-matrix
    certificate for a Hermitian test matrix with spectrum dense in
    [-1, 1]; (c)/(d) the grid maxima of |e^x - p(x)| on [0, 1] and
    [-1, 1].
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    closed = math.e / (2.0 ** (n - 1)) / math.factorial(n)
    nodes = interp.chebyshev_nodes(n, (-1.0, 1.0))
    test_matrix = np.diag(np.linspace(-1.0, 1.0, spectrum_size))
    certificate = bounds.exp_bound_cor5(test_matrix, nodes).value
    poly = interp.divided_differences(interp.EXP, nodes)

    def grid_max(lo: float, hi: float) -> float:
        xs = np.linspace(lo, hi, grid_points)
        return max(abs(math.exp(x) - interp.newton_eval_scalar(poly, x)) for x in xs)

    return {
        "n": n,
        "closed_form": closed,
        "certificate": certificate,
        "sharp_max_0_1": grid_max(0.0, 1.0),
        "sharp_max_m1_1": grid_max(-1.0, 1.0),
    }


def cmd_cheb_demo(args) -> int:
    vals = cheb_demo_values(args.n)
    print(f"n = {vals['n']}")
    print(f"(a) closed-form bound (1/n!) e / 2^(n-1)   {vals['closed_form']!r}")
    print(f"(b) normal-matrix certificate (cor5)       {vals['certificate']!r}")
    print(f"(c) max |e^x - p(x)| on [0, 1]             {vals['sharp_max_0_1']!r}")
    print(f"(d) max |e^x - p(x)| on [-1, 1]            {vals['sharp_max_m1_1']!r}")
    return 0


def cmd_experiment(args) -> int:
    rect = tuple(float(x) for x in args.rect.split(","))
    if len(rect) != 4:
        raise ValueError("--rect needs re_lo,re_hi,im_lo,im_hi")
    cfg = experiment.ExperimentConfig(
        dim=args.dim, trials=args.trials, rect=rect,
        kappa_cutoff=args.kappa_cutoff, t_count=args.t_count, seed=args.seed)
    records, stats = experiment.run_experiment(
        cfg, threads=args.threads, out_csv=args.out_csv, out_json=args.out_json)
    if args.curve_csv is not None:
        rng = np.random.default_rng(cfg.seed + records[0].seed_offset)
        t_mat, d_mat, _ = experiment.random_trial_matrix(cfg.dim, cfg.rect, rng)
        curve = experiment.norms_curve(
            experiment.paper_nodes(), t_count=cfg.t_count, factors=(t_mat, d_mat))
        experiment.write_curve_csv(args.curve_csv, curve)
    print(json.dumps(stats.to_json_dict(), indent=2))
    return 0


def cmd_expm(args) -> int:
    a = mmio.read_matrix(args.matrix)
    e, info = linalg.matrix_exp(a, return_info=True)
    mmio.write_matrix(args.out, e)
    logger.info("expm: degree=%d squarings=%d norm=%.6e",
                info.degree, info.squarings, info.norm)
    print(json.dumps({"out": os.fspath(args.out), "degree": info.degree,
                      "squarings": info.squarings, "norm": info.norm}))
    return 0


def cmd_schur(args) -> int:
    a = mmio.read_matrix(args.matrix)
    form = linalg.schur(a)
    mmio.write_matrix(args.out_q, form.q)
    mmio.write_matrix(args.out_t, form.t)
    print(json.dumps({"out_q": os.fspath(args.out_q),
                      "out_t": os.fspath(args.out_t),
                      "dim": form.source_dim}))
    return 0


def _add_nodes_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nodes", help="inline comma-separated nodes; pi and j allowed")
    p.add_argument("--nodes-file", help="node file, one 'real imag' per line")


def _add_function_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--function", choices=("exp", "poly"), default="exp")
    p.add_argument("--coeffs", help="comma-separated polynomial coefficients a0,a1,...")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matcert",
        description="Matrix functions by interpolation polynomials, "
                    "with a-priori error certificates.")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("interp", help="evaluate the interpolation polynomial at a matrix")
    p.add_argument("matrix", help="input matrix (Matrix Market)")
    _add_nodes_args(p)
    _add_function_args(p)
    p.add_argument("--out", required=True, help="where to write p(A)")
    p.add_argument("--reference", help="ground-truth f(A) for a true-error report")
    p.add_argument("--norm", default="2to2", help="norm for the true error")
    p.add_argument("--format", choices=("json", "plain"), default="json")
    p.set_defaults(func=cmd_interp)

    p = sub.add_parser("bound", help="compute error certificates")
    p.add_argument("matrix")
    _add_nodes_args(p)
    _add_function_args(p)
    p.add_argument("--methods", default="theorem1,cor3,cor4,cor5,cor6")
    p.add_argument("--t-count", type=int, default=101)
    p.add_argument("--per-edge", type=int, default=64)
    p.add_argument("--norm", default="2to2")
    p.add_argument("--beta", type=float, default=None,
                   help="force beta in cor3 instead of computing it from the nodes")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--format", choices=("json", "plain"), default="json")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("cheb-demo", help="Chebyshev-node comparison table")
    p.add_argument("n", nargs="?", type=int, default=10)
    p.set_defaults(func=cmd_cheb_demo)

    p = sub.add_parser("experiment", help="randomized bound-validity experiment")
    p.add_argument("--dim", type=int, default=128)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rect", default=f"-1,0,{-math.pi!r},{math.pi!r}",
                   help="re_lo,re_hi,im_lo,im_hi")
    p.add_argument("--kappa-cutoff", type=float, default=1e5)
    p.add_argument("--t-count", type=int, default=101)
    p.add_argument("--out-csv", help="per-trial records")
    p.add_argument("--out-json", help="aggregate statistics")
    p.add_argument("--curve-csv", help="norm curve of the first trial's matrix")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("expm", help="matrix exponential of a Matrix Market file")
    p.add_argument("matrix")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_expm)

    p = sub.add_parser("schur", help="Schur factors of a Matrix Market file")
    p.add_argument("matrix")
    p.add_argument("--out-q", required=True)
    p.add_argument("--out-t", required=True)
    p.set_defaults(func=cmd_schur)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except MatcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        name = getattr(exc, "filename", None)
        where = f" ({name})" if name and str(name) not in str(exc) else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
