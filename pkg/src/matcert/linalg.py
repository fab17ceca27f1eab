"""Dense complex linear algebra kernels.

Everything operates on square ``numpy`` arrays of ``complex128``. The
decompositions are self-contained: Householder reduction to Hessenberg
form, a Wilkinson-shifted complex QR iteration for the Schur form, power
iteration on A^H A for the spectral norm, partial-pivot LU for solves,
and scaling-and-squaring with diagonal Pade approximants for the matrix
exponential. All routines are pure functions of their inputs; random
starts use an explicit, seeded generator so repeated calls are
bit-identical.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonFiniteMatrixError,
    NormConvergenceError,
    SchurConvergenceError,
    SingularMatrixError,
)

logger = logging.getLogger(__name__)

_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class ToleranceConfig:
    """Single record holding every tolerance and iteration cap.

    ``unitarity_tol`` and ``reconstruct_tol`` are per-dimension factors:
    the checked bounds are ``unitarity_tol * d`` and
    ``reconstruct_tol * d * ||A||``.
    """

    norm_tol: float = 1e-12
    norm_max_iters: int = 20_000
    norm_restarts: int = 2
    norm_seed: int = 0x5EED
    unitarity_tol: float = 1e-10
    reconstruct_tol: float = 1e-10
    schur_sweep_factor: int = 30
    normality_tol: float = 1e-10
    coeff_limit: float = 1e150
    node_gap_warn: float = 1e-8


DEFAULT_TOLERANCES = ToleranceConfig()


def as_matrix(a, *, square: bool = True) -> np.ndarray:
    """Coerce ``a`` to a 2-D complex128 array, validating shape and finiteness."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionMismatchError("empty matrices are not supported")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {arr.shape}")
    if not np.isfinite(arr.real).all() or not np.isfinite(arr.imag).all():
        raise NonFiniteMatrixError("matrix has NaN or Inf entries")
    return arr


def _check_finite(a: np.ndarray, what: str) -> np.ndarray:
    if not np.isfinite(a.real).all() or not np.isfinite(a.imag).all():
        raise NonFiniteMatrixError(f"{what} overflowed to NaN or Inf")
    return a


def identity(d: int) -> np.ndarray:
    """The d-by-d identity matrix. ``d`` must be at least 1."""
    if d < 1:
        raise ValueError(f"identity requires d >= 1, got {d}")
    return np.eye(d, dtype=np.complex128)


def mat_add(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    return _check_finite(a + b, "matrix sum")


def mat_sub(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    return _check_finite(a - b, "matrix difference")


def mat_mul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} @ {b.shape}")
    return _check_finite(a @ b, "matrix product")


def scalar_mul(c, a) -> np.ndarray:
    a = as_matrix(a)
    return _check_finite(complex(c) * a, "scalar multiple")


def shift(a, c) -> np.ndarray:
    """A + c*I, the building block for A - z*I and (1-t)*mu*I + t*A."""
    a = as_matrix(a)
    return _check_finite(a + complex(c) * np.eye(a.shape[0], dtype=np.complex128), "shift")


def _vec_norm(v: np.ndarray) -> float:
    return float(np.sqrt(np.vdot(v, v).real))


def spectral_norm(a, *, tol: float | None = None, rng=None,
                  config: ToleranceConfig | None = None) -> float:
    """Largest singular value via power iteration on B = A^H A.

    The estimate is always ``sqrt(||B v||)`` for the current unit vector
    v and stops once it changes by less than ``tol`` relative. Clustered
    top singular values make the plain iteration crawl, so whenever it
    stalls the iteration operator is squared (and Frobenius-normalized
    to dodge overflow), which doubles the spectral-gap exponent while the
    estimate still comes from the original B. On stagnation the
    iteration restarts with a fresh random vector
    (``config.norm_restarts`` times) before raising
    :class:`NormConvergenceError` carrying the best estimate.
    """
    cfg = config or DEFAULT_TOLERANCES
    a = as_matrix(a)
    if tol is None:
        tol = cfg.norm_tol
    n = a.shape[0]
    if float(np.max(np.abs(a))) == 0.0:
        return 0.0
    b = a.conj().T @ a
    if rng is None:
        rng = np.random.default_rng(cfg.norm_seed)
    stall_budget = 100
    max_squarings = 12
    best = 0.0
    for _ in range(cfg.norm_restarts + 1):
        v = rng.uniform(-1.0, 1.0, n) + 1j * rng.uniform(-1.0, 1.0, n)
        nv = _vec_norm(v)
        if nv == 0.0:
            continue
        v = v / nv
        op = b
        squarings = 0
        since_squaring = 0
        prev = None
        for _ in range(cfg.norm_max_iters):
            w = op @ v
            nw = _vec_norm(w)
            if nw == 0.0:
                break
            v = w / nw
            lam = _vec_norm(b @ v) if squarings else nw
            sig = math.sqrt(lam)
            best = max(best, sig)
            if prev is not None and abs(sig - prev) <= tol * sig:
                return sig
            prev = sig
            since_squaring += 1
            if since_squaring >= stall_budget and squarings < max_squarings:
                op = op / frobenius_norm(op)
                op = op @ op
                squarings += 1
                since_squaring = 0
    raise NormConvergenceError(
        f"power iteration did not reach tol={tol:g} within "
        f"{cfg.norm_max_iters} iterations and {cfg.norm_restarts} restarts",
        best_estimate=best,
    )


def frobenius_norm(a) -> float:
    a = as_matrix(a)
    return float(np.sqrt(np.sum(a.real * a.real + a.imag * a.imag)))


def one_norm(a) -> float:
    """Maximum absolute column sum."""
    a = as_matrix(a)
    return float(np.max(np.sum(np.abs(a), axis=0)))


@dataclass(frozen=True)
class MatrixNorm:
    """A named matrix norm functional usable by the bound engine."""

    name: str
    fn: Callable[[np.ndarray], float]

    def __call__(self, a) -> float:
        return self.fn(a)


SPECTRAL = MatrixNorm("2to2", spectral_norm)
FROBENIUS = MatrixNorm("fro", frobenius_norm)
ONE_NORM = MatrixNorm("1", one_norm)

NORMS = {n.name: n for n in (SPECTRAL, FROBENIUS, ONE_NORM)}


def _phase(z: complex) -> complex:
    az = abs(z)
    return z / az if az != 0.0 else 1.0 + 0j


def hessenberg(a) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction to upper Hessenberg form.

    Returns ``(q0, h)`` with ``q0`` unitary, ``h`` upper Hessenberg and
    ``q0^H h q0 == a`` up to rounding (i.e. ``h = q0 a q0^H``).
    """
    a = as_matrix(a)
    n = a.shape[0]
    h = a.copy()
    q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        if _vec_norm(x[1:]) == 0.0:
            continue
        xnorm = _vec_norm(x)
        alpha = -_phase(x[0]) * xnorm
        v = x
        v[0] -= alpha
        vnorm = _vec_norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        # left reflection on rows k+1.. (columns before k are already zero)
        sub = h[k + 1:, k:]
        sub -= 2.0 * np.outer(v, v.conj() @ sub)
        # right reflection on columns k+1..
        sub2 = h[:, k + 1:]
        sub2 -= 2.0 * np.outer(sub2 @ v, v.conj())
        qs = q[k + 1:, :]
        qs -= 2.0 * np.outer(v, v.conj() @ qs)
        h[k + 2:, k] = 0.0
        h[k + 1, k] = alpha
    return q, _check_finite(h, "Hessenberg form")


@dataclass(frozen=True)
class SchurForm:
    """Unitary similarity ``a = q^H t q`` with ``t`` upper triangular."""

    q: np.ndarray
    t: np.ndarray
    source_dim: int


def _givens_rotation(a: complex, b: complex) -> np.ndarray:
    """2x2 unitary g with g @ [a, b] = [r, 0]."""
    if b == 0:
        return np.eye(2, dtype=np.complex128)
    r = math.hypot(abs(a), abs(b))
    return np.array([[np.conj(a), np.conj(b)], [-b, a]], dtype=np.complex128) / r


def _wilkinson_shift(a: complex, b: complex, c: complex, d: complex) -> complex:
    """Eigenvalue of [[a, b], [c, d]] closer to d."""
    half = 0.5 * (a - d)
    disc = np.sqrt(np.complex128(half * half + b * c))
    e1 = d + half + disc
    e2 = d + half - disc
    return complex(e1 if abs(e1 - d) <= abs(e2 - d) else e2)


def schur(a, config: ToleranceConfig | None = None) -> SchurForm:
    """Complex Schur decomposition by shifted QR iteration with deflation.

    Hessenberg reduction first, then explicit single-shift QR sweeps with
    the Wilkinson shift; a subdiagonal entry h[k+1, k] is deflated to zero
    once ``|h[k+1,k]| <= eps * (|h[k,k]| + |h[k+1,k+1]|)``. An ad-hoc
    exceptional shift is used every tenth sweep on a stagnant block. The
    strict lower triangle of the returned factor is exactly zero.
    """
    cfg = config or DEFAULT_TOLERANCES
    a = as_matrix(a)
    n = a.shape[0]
    if n == 1:
        return SchurForm(q=np.eye(1, dtype=np.complex128), t=a.copy(), source_dim=1)
    q, t = hessenberg(a)
    anorm = float(np.max(np.abs(t)))
    max_sweeps = cfg.schur_sweep_factor * n
    sweeps = 0
    stagnation = 0
    hi = n - 1
    while hi > 0:
        # scan the subdiagonal upward from hi; stop at the first negligible entry
        lo = hi
        while lo > 0:
            sub = abs(t[lo, lo - 1])
            if sub == 0.0:
                break
            thr = _EPS * (abs(t[lo - 1, lo - 1]) + abs(t[lo, lo]))
            if thr == 0.0:
                thr = _EPS * anorm
            if sub <= thr:
                t[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            stagnation = 0
            continue
        sweeps += 1
        stagnation += 1
        if sweeps > max_sweeps:
            raise SchurConvergenceError(
                f"QR iteration exceeded {max_sweeps} sweeps "
                f"(dimension {n}, active block {lo}..{hi})"
            )
        if stagnation % 10 == 0:
            mu = complex(t[hi, hi]) + 0.75 * abs(t[hi, hi - 1])
        else:
            mu = _wilkinson_shift(
                complex(t[hi - 1, hi - 1]), complex(t[hi - 1, hi]),
                complex(t[hi, hi - 1]), complex(t[hi, hi]),
            )
        # explicit shifted QR step on the window [lo..hi]
        for i in range(lo, hi + 1):
            t[i, i] -= mu
        rotations = []
        for k in range(lo, hi):
            g = _givens_rotation(complex(t[k, k]), complex(t[k + 1, k]))
            t[k:k + 2, k:] = g @ t[k:k + 2, k:]
            t[k + 1, k] = 0.0
            q[k:k + 2, :] = g @ q[k:k + 2, :]
            rotations.append((k, g))
        for k, g in rotations:
            rmax = min(k + 2, hi) + 1
            t[:rmax, k:k + 2] = t[:rmax, k:k + 2] @ g.conj().T
        for i in range(lo, hi + 1):
            t[i, i] += mu
    t[np.tril_indices(n, -1)] = 0.0
    logger.debug("schur: dim=%d sweeps=%d", n, sweeps)
    return SchurForm(q=q, t=_check_finite(t, "Schur factor"), source_dim=n)


def eigenvalues(a, config: ToleranceConfig | None = None) -> list[complex]:
    """Spectrum of ``a`` as a list (multiset semantics, order unspecified)."""
    form = schur(a, config=config)
    return [complex(z) for z in np.diag(form.t)]


def split_schur(form: SchurForm) -> tuple[np.ndarray, np.ndarray]:
    """Split the triangular factor into diagonal and strictly upper parts."""
    d = np.diag(np.diag(form.t))
    n = form.t - d
    return d, n


def lu_factor(a) -> tuple[np.ndarray, np.ndarray]:
    """Partial-pivot LU. Returns (lu, piv) with L unit-lower in-place."""
    a = as_matrix(a)
    n = a.shape[0]
    lu = a.copy()
    piv = np.arange(n)
    tiny = n * _EPS * float(np.max(np.abs(a)))
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= tiny:
            raise SingularMatrixError(
                f"matrix is singular to working precision (pivot {abs(lu[p, k]):.3e} "
                f"at column {k})"
            )
        if p != k:
            lu[[k, p], :] = lu[[p, k], :]
            piv[[k, p]] = piv[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        if k + 1 < n:
            lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv


def lu_solve(lu: np.ndarray, piv: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = lu.shape[0]
    x = b[piv].astype(np.complex128, copy=True)
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i] -= lu[i, i + 1:] @ x[i + 1:]
        x[i] /= lu[i, i]
    return x


def solve(a, b, config: ToleranceConfig | None = None) -> np.ndarray:
    """Solve A X = B by partial-pivot LU with row interchanges."""
    a = as_matrix(a)
    b_arr = np.asarray(b, dtype=np.complex128)
    if b_arr.ndim not in (1, 2):
        raise DimensionMismatchError(f"right-hand side must be 1-D or 2-D, got {b_arr.ndim}-D")
    if b_arr.shape[0] != a.shape[0]:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} X = {b_arr.shape}")
    if not np.isfinite(b_arr.real).all() or not np.isfinite(b_arr.imag).all():
        raise NonFiniteMatrixError("right-hand side has NaN or Inf entries")
    lu, piv = lu_factor(a)
    return _check_finite(lu_solve(lu, piv, b_arr), "linear solve")


def inverse(a, config: ToleranceConfig | None = None) -> np.ndarray:
    a = as_matrix(a)
    return solve(a, identity(a.shape[0]), config=config)


def condition_number_2(a, config: ToleranceConfig | None = None) -> float:
    """Spectral condition number ||A|| * ||A^-1||."""
    a = as_matrix(a)
    inv = inverse(a, config=config)
    return spectral_norm(a, config=config) * spectral_norm(inv, config=config)


# Diagonal Pade coefficients and switching thresholds for exp, degrees 3..13.
_PADE_COEFF = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}
_PADE_THETA = (
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
)


@dataclass(frozen=True)
class ExpmInfo:
    """Diagnostics of one matrix_exp evaluation."""

    degree: int
    squarings: int
    norm: float


def _pade_uv(x: np.ndarray, degree: int) -> tuple[np.ndarray, np.ndarray]:
    b = _PADE_COEFF[degree]
    n = x.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    x2 = x @ x
    if degree == 13:
        x4 = x2 @ x2
        x6 = x4 @ x2
        u = x @ (x6 @ (b[13] * x6 + b[11] * x4 + b[9] * x2)
                 + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * ident)
        v = (x6 @ (b[12] * x6 + b[10] * x4 + b[8] * x2)
             + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * ident)
        return u, v
    u_acc = b[1] * ident
    v_acc = b[0] * ident
    even = ident
    for k in range(2, degree + 1, 2):
        even = even @ x2 if k > 2 else x2
        u_acc = u_acc + b[k + 1] * even
        v_acc = v_acc + b[k] * even
    return x @ u_acc, v_acc


def matrix_exp(a, *, return_info: bool = False,
               config: ToleranceConfig | None = None):
    """exp(A) by scaling-and-squaring with diagonal Pade approximants.

    The degree is picked from {3, 5, 7, 9, 13} by comparing the spectral
    norm of ``a`` against the standard switching thresholds; above the
    degree-13 threshold the matrix is scaled by 2**-s and the result
    squared ``s`` times. Set ``return_info=True`` to also get the chosen
    degree and squaring count.
    """
    a = as_matrix(a)
    nrm = spectral_norm(a, tol=1e-8, config=config)
    degree = 13
    squarings = 0
    for deg, theta in _PADE_THETA:
        if nrm <= theta:
            degree = deg
            break
    else:
        squarings = max(0, int(math.ceil(math.log2(nrm / _PADE_THETA[-1][1]))))
    x = a * (0.5 ** squarings)
    u, v = _pade_uv(x, degree)
    e = solve(v - u, v + u, config=config)
    for _ in range(squarings):
        e = e @ e
    _check_finite(e, "matrix exponential")
    logger.debug("matrix_exp: dim=%d norm=%.3e degree=%d squarings=%d",
                 a.shape[0], nrm, degree, squarings)
    if return_info:
        return e, ExpmInfo(degree=degree, squarings=squarings, norm=nrm)
    return e
