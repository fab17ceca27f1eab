"""Interpolation nodes, confluent divided differences, and Newton polynomials.

Nodes are an ordered multiset of complex points; repeated nodes request
Hermite (derivative-matching) interpolation. The divided-difference
tableau needs equal nodes adjacent, so coefficients are computed on a
stably sorted copy and the returned polynomial carries that sorted node
order; the caller's node set keeps its original order for the node
polynomial ``omega``, whose value does not depend on ordering.
"""

from __future__ import annotations

import cmath
import math
import os
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConditioningError, ConditioningWarning, DerivativeOrderError
from .linalg import (
    DEFAULT_TOLERANCES,
    ToleranceConfig,
    _check_finite,
    as_matrix,
    matrix_exp,
)


class NodeSet:
    """Ordered multiset of interpolation points (repetitions meaningful)."""

    __slots__ = ("values",)

    def __init__(self, values: Iterable[complex]):
        vals = tuple(complex(z) for z in values)
        if not vals:
            raise ValueError("a node set needs at least one node")
        for z in vals:
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ValueError("nodes must be finite")
        self.values = vals

    @property
    def m(self) -> int:
        return len(self.values)

    def multiplicity(self, z: complex) -> int:
        z = complex(z)
        return sum(1 for v in self.values if v == z)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, NodeSet) and self.values == other.values

    def __hash__(self) -> int:
        return hash(self.values)

    def __repr__(self) -> str:
        return f"NodeSet({list(self.values)!r})"


@dataclass(frozen=True)
class AnalyticFunction:
    """Scalar function bundle: value, derivatives, and f^(k) at a matrix.

    ``scalar_derivative(k, z)`` must return the k-th derivative at z for
    every k up to ``max_order`` (``None`` means any order) and must agree
    with ``scalar_eval`` at k = 0. ``matrix_nth_derivative(k, A)``
    evaluates the k-th derivative at a square matrix argument. All three
    callables must be safe for concurrent invocation.
    """

    name: str
    scalar_eval: Callable[[complex], complex]
    scalar_derivative: Callable[[int, complex], complex]
    matrix_nth_derivative: Callable[[int, np.ndarray], np.ndarray]
    max_order: int | None = None

    def require_order(self, k: int) -> None:
        if self.max_order is not None and k > self.max_order:
            raise DerivativeOrderError(
                f"function {self.name!r} supplies derivatives up to order "
                f"{self.max_order}, order {k} requested"
            )


EXP = AnalyticFunction(
    name="exp",
    scalar_eval=cmath.exp,
    scalar_derivative=lambda k, z: cmath.exp(z),
    matrix_nth_derivative=lambda k, a: matrix_exp(a),
)


def _poly_derive(coeffs: tuple[complex, ...], k: int) -> tuple[complex, ...]:
    out = list(coeffs)
    for _ in range(k):
        out = [i * out[i] for i in range(1, len(out))]
        if not out:
            return (0j,)
    return tuple(out)


def _poly_horner(coeffs: Sequence[complex], z: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _poly_horner_matrix(coeffs: Sequence[complex], a: np.ndarray) -> np.ndarray:
    ident = np.eye(a.shape[0], dtype=np.complex128)
    acc = coeffs[-1] * ident
    for c in reversed(coeffs[:-1]):
        acc = acc @ a + c * ident
    return acc


def polynomial_function(coeffs: Iterable[complex]) -> AnalyticFunction:
    """Polynomial ``a0 + a1 z + ...`` with exact derivatives of any order."""
    cs = tuple(complex(c) for c in coeffs)
    if not cs:
        cs = (0j,)
    return AnalyticFunction(
        name="poly",
        scalar_eval=lambda z: _poly_horner(cs, z),
        scalar_derivative=lambda k, z: _poly_horner(_poly_derive(cs, k), z),
        matrix_nth_derivative=lambda k, a: _poly_horner_matrix(
            _poly_derive(cs, k), as_matrix(a)),
    )


@dataclass(frozen=True)
class NewtonPolynomial:
    """Newton-form interpolant: ``coeffs[k]`` is the divided difference
    over the first k+1 entries of ``nodes``."""

    nodes: NodeSet
    coeffs: tuple[complex, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def divided_differences(f: AnalyticFunction, nodes: NodeSet,
                        config: ToleranceConfig | None = None) -> NewtonPolynomial:
    """Confluent divided-difference tableau for ``f`` over ``nodes``.

    Equal nodes (exact complex equality) are grouped by a stable sort on
    (re, im); a span of k+1 coincident nodes contributes f^(k)(z) / k!.
    The returned polynomial stores the sorted node order its coefficients
    refer to. A :class:`ConditioningWarning` is emitted when the smallest
    gap between distinct nodes is below ``node_gap_warn`` times the node
    spread, and a :class:`ConditioningError` is raised if any coefficient
    exceeds the growth limit.
    """
    cfg = config or DEFAULT_TOLERANCES
    zs = sorted(nodes.values, key=lambda z: (z.real, z.imag))
    m = len(zs)
    _warn_near_coincident(zs, cfg)
    max_mult = _max_multiplicity(zs)
    f.require_order(max_mult - 1)
    col = [complex(f.scalar_eval(z)) for z in zs]
    coeffs = [col[0]]
    for j in range(1, m):
        nxt = []
        fact = math.factorial(j)
        for i in range(m - j):
            if zs[i + j] == zs[i]:
                nxt.append(complex(f.scalar_derivative(j, zs[i])) / fact)
            else:
                nxt.append((col[i + 1] - col[i]) / (zs[i + j] - zs[i]))
        col = nxt
        coeffs.append(col[0])
    limit = cfg.coeff_limit
    if any(abs(c) > limit for c in coeffs):
        raise ConditioningError(
            "divided-difference coefficients exceeded the growth limit; "
            "nodes are too clustered for this function"
        )
    return NewtonPolynomial(nodes=NodeSet(zs), coeffs=tuple(coeffs))


def _max_multiplicity(sorted_nodes: list[complex]) -> int:
    best = 1
    run = 1
    for prev, cur in zip(sorted_nodes, sorted_nodes[1:]):
        run = run + 1 if cur == prev else 1
        best = max(best, run)
    return best


def _warn_near_coincident(sorted_nodes: list[complex], cfg: ToleranceConfig) -> None:
    distinct = sorted(set(sorted_nodes), key=lambda z: (z.real, z.imag))
    if len(distinct) < 2:
        return
    spread = max(abs(a - b) for a in distinct for b in distinct)
    gap = min(abs(a - b) for a, b in zip(distinct, distinct[1:]))
    # sorted order does not give nearest pairs in the plane; do the full scan
    for i, a in enumerate(distinct):
        for b in distinct[i + 1:]:
            gap = min(gap, abs(a - b))
    if gap < cfg.node_gap_warn * spread:
        warnings.warn(
            f"distinct nodes are nearly coincident (gap {gap:.3e}, spread {spread:.3e});"
            " divided differences may be inaccurate",
            ConditioningWarning,
            stacklevel=3,
        )


def dd_integral_oracle(f: AnalyticFunction, points: Sequence[complex]) -> complex:
    """Divided difference over ``points`` by nested simplex quadrature.

    Integrates f^(k) (k = len(points) - 1) over the ordered simplex
    0 <= t_k <= ... <= t_1 <= 1 with composite 32-node Gauss-Legendre
    per axis. Exponential cost; limited to 5 points. Serves as an
    independent cross-check of the recursive tableau.
    """
    pts = [complex(p) for p in points]
    q = len(pts)
    if q == 0:
        raise ValueError("at least one point required")
    if q > 5:
        raise ValueError("integral oracle is limited to 5 points")
    if q == 1:
        return complex(f.scalar_eval(pts[0]))
    k = q - 1
    f.require_order(k)
    gl_x, gl_w = np.polynomial.legendre.leggauss(32)
    diffs = [pts[i + 1] - pts[i] for i in range(k)]

    def integrate(axis: int, upper: float, base: complex) -> complex:
        half = 0.5 * upper
        total = 0j
        last = axis == k - 1
        for x, w in zip(gl_x, gl_w):
            t = half * (x + 1.0)
            arg = base + diffs[axis] * t
            val = f.scalar_derivative(k, arg) if last else integrate(axis + 1, t, arg)
            total += w * val
        return half * total

    return integrate(0, 1.0, pts[0])


def newton_eval_scalar(p: NewtonPolynomial, z: complex) -> complex:
    """Horner evaluation c0 + (z - z1)(c1 + (z - z2)(...))."""
    z = complex(z)
    zs = p.nodes.values
    acc = p.coeffs[-1]
    for k in range(len(p.coeffs) - 2, -1, -1):
        acc = p.coeffs[k] + (z - zs[k]) * acc
    return acc


def newton_eval_matrix(p: NewtonPolynomial, a) -> np.ndarray:
    """Matrix Horner evaluation of the Newton form at a square matrix."""
    a = as_matrix(a)
    ident = np.eye(a.shape[0], dtype=np.complex128)
    zs = p.nodes.values
    acc = p.coeffs[-1] * ident
    for k in range(len(p.coeffs) - 2, -1, -1):
        acc = p.coeffs[k] * ident + (a - zs[k] * ident) @ acc
    return _check_finite(acc, "polynomial evaluation")


def omega_at_scalar(nodes: NodeSet, z: complex) -> complex:
    """Node polynomial prod_k (z - z_k), multiplied in node order."""
    z = complex(z)
    acc = 1.0 + 0j
    for zk in nodes.values:
        acc *= z - zk
    return acc


def omega_at_matrix(nodes: NodeSet, a) -> np.ndarray:
    """prod_k (A - z_k I), accumulated left to right in node order."""
    a = as_matrix(a)
    ident = np.eye(a.shape[0], dtype=np.complex128)
    acc = ident.copy()
    for zk in nodes.values:
        acc = acc @ (a - zk * ident)
    return _check_finite(acc, "node polynomial at matrix")


def chebyshev_nodes(m: int, interval: tuple[float, float] = (-1.0, 1.0)) -> NodeSet:
    """Zeros of the degree-m first-kind Chebyshev polynomial on [a, b],
    in increasing order."""
    if m < 1:
        raise ValueError(f"need m >= 1 nodes, got {m}")
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError(f"degenerate interval [{a}, {b}]")
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    xs = [mid + half * math.cos((2 * k - 1) * math.pi / (2 * m)) for k in range(m, 0, -1)]
    return NodeSet(xs)


def taylor_nodes(z1: complex, m: int) -> NodeSet:
    """z1 repeated m times; the Newton form then reproduces the truncated
    Taylor polynomial with coefficients f^(k)(z1) / k!."""
    if m < 1:
        raise ValueError(f"need m >= 1 nodes, got {m}")
    return NodeSet((complex(z1),) * m)


def read_node_file(path: str | os.PathLike) -> NodeSet:
    """Nodes from a text file, one ``real imag`` pair per line.

    Blank lines and lines starting with ``#`` or ``%`` are skipped.
    """
    vals = []
    with open(os.fspath(path), "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            text = raw.strip()
            if not text or text.startswith(("#", "%")):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'real imag', got {raw!r}")
            vals.append(complex(float(parts[0]), float(parts[1])))
    if not vals:
        raise ValueError(f"{path}: no nodes found")
    return NodeSet(vals)


def write_node_file(path: str | os.PathLike, nodes: NodeSet) -> None:
    with open(os.fspath(path), "w", encoding="ascii") as fh:
        for z in nodes.values:
            fh.write(f"{z.real:.17g} {z.imag:.17g}\n")
