"""Generalized cross-validation for the ridge hat operator.

The score minimized here is

    V(lam) = n_c * ||(I - H(lam)) y_c||^2 / tr(I - H(lam))^2,

with H(lam) = S_cc (S_cc + lam I)^-1 (I - 1 w^T) + 1 w^T, the calibration-row
restriction of the reconstruction operator including its intercept term. For
the all-zero weight vector the intercept drops out and H reduces to
S_cc (S_cc + lam I)^-1, which is the form used for kriging nugget selection.

``gcv_score`` evaluates V through a direct factorize-and-solve;
``minimize_gcv`` uses a single symmetric eigendecomposition so each candidate
lam costs O(n_c). The two paths are algebraically identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import WeightVector
from .errors import DegenerateTrace, SingularSystem

SEARCH_DOMAIN = (1e-8, 1e8)
COARSE_GRID_POINTS = 25
LOG_LAMBDA_TOL = 1e-4        # relative precision of the refined lambda
TIE_REL = 1e-14              # grid scores closer than this are ties
TRACE_FLOOR = 1e-12

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GcvResult:
    """Outcome of a GCV search.

    ``flat`` marks an objective with no usable structure over the coarse grid
    (the largest grid lambda is returned); ``at_boundary`` marks a minimizer
    at an edge of the search domain.
    """

    lambda_min: float
    score: float
    n_evals: int
    bracket: tuple[float, float]
    flat: bool = False
    at_boundary: bool = False

    def __post_init__(self):
        lo, hi = self.bracket
        if not (lo <= self.lambda_min <= hi):
            raise ValueError("bracket must contain lambda_min")
        if not np.isfinite(self.score):
            raise ValueError("score must be finite")


def _shifted_cho(S_cc: np.ndarray, lam: float):
    shifted = S_cc + lam * np.eye(S_cc.shape[0])
    try:
        return scipy.linalg.cho_factor(shifted, lower=True, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystem(f"S_cc + {lam} I is not positive definite: {exc}") from exc


def hat_apply(S_cc: np.ndarray, lam: float, w: WeightVector, y_c: np.ndarray) -> np.ndarray:
    """Apply the calibration-period hat operator H(lam) to y_c."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    y_c = np.asarray(y_c, dtype=np.float64)
    c = float(w.w @ y_c)
    cho = _shifted_cho(S_cc, lam)
    z = scipy.linalg.cho_solve(cho, y_c - c, check_finite=False)
    return S_cc @ z + c


def gcv_score(S_cc: np.ndarray, lam: float, w: WeightVector, y_c: np.ndarray) -> float:
    """GCV score V(lam) for one candidate ridge parameter."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    y_c = np.asarray(y_c, dtype=np.float64)
    n_c = len(y_c)
    c = float(w.w @ y_c)
    centered = y_c - c
    cho = _shifted_cho(S_cc, lam)
    # (I - H) y_c = (I - A)(y_c - c 1) with A = S_cc (S_cc + lam I)^-1
    resid = centered - S_cc @ scipy.linalg.cho_solve(cho, centered, check_finite=False)
    trace_a = float(np.trace(scipy.linalg.cho_solve(cho, S_cc, check_finite=False)))
    a_ones = S_cc @ scipy.linalg.cho_solve(cho, np.ones(n_c), check_finite=False)
    trace_ih = n_c - trace_a + float(w.w @ a_ones) - float(w.w.sum())
    if trace_ih < TRACE_FLOOR:
        raise DegenerateTrace(f"tr(I - H) = {trace_ih:.3e} at lam = {lam:.3e}")
    return n_c * float(resid @ resid) / trace_ih**2


class GcvEvaluator:
    """Repeated V(lam) evaluation for fixed (S_cc, w, y_c).

    Diagonalizes S_cc once; with eigenvalues sig and shrinkage factors
    f_i = sig_i / (sig_i + lam), the residual norm and trace reduce to
    O(n_c) sums per candidate lam.
    """

    def __init__(self, S_cc: np.ndarray, w: WeightVector, y_c: np.ndarray):
        y_c = np.asarray(y_c, dtype=np.float64)
        self.n_c = len(y_c)
        sig, Q = np.linalg.eigh(np.asarray(S_cc, dtype=np.float64))
        # Tolerate roundoff-negative eigenvalues of a PSD input.
        floor = -1e-8 * max(1.0, float(np.abs(sig).max()))
        if sig[0] < floor:
            raise ValueError(f"S_cc is not PSD (eigenvalue {sig[0]:.3e})")
        self.sig = np.maximum(sig, 0.0)
        c = float(w.w @ y_c)
        self.u_sq = (Q.T @ (y_c - c)) ** 2
        self.wq_1q = (Q.T @ w.w) * (Q.T @ np.ones(self.n_c))
        self.w_sum = float(w.w.sum())

    def __call__(self, lam: float) -> float:
        shrink = self.sig / (self.sig + lam)        # f_i
        damp = lam / (self.sig + lam)               # 1 - f_i, formed directly
        resid_sq = float(damp**2 @ self.u_sq)
        trace_ih = self.n_c - float(shrink.sum()) + float(shrink @ self.wq_1q) - self.w_sum
        if trace_ih < TRACE_FLOOR:
            raise DegenerateTrace(f"tr(I - H) = {trace_ih:.3e} at lam = {lam:.3e}")
        return self.n_c * resid_sq / trace_ih**2


def minimize_gcv(S_cc: np.ndarray, w: WeightVector, y_c: np.ndarray, *,
                 domain: tuple[float, float] = SEARCH_DOMAIN,
                 grid_points: int = COARSE_GRID_POINTS,
                 trace: list | None = None) -> GcvResult:
    """Find the GCV-minimizing ridge parameter.

    A coarse logarithmic grid over ``domain`` brackets the minimizer, then
    golden-section refinement on log(lam) narrows it to relative precision
    LOG_LAMBDA_TOL. Grid scores tying within TIE_REL resolve to the largest
    lam (strongest regularization). Deterministic for fixed inputs.

    ``trace``, if given, collects every (lam, score) pair evaluated.
    """
    evaluator = GcvEvaluator(S_cc, w, y_c)
    evaluated: list[tuple[float, float]] = []

    def f(lam: float) -> float:
        v = evaluator(lam)
        evaluated.append((lam, v))
        return v

    lo, hi = domain
    grid = np.geomspace(lo, hi, grid_points)
    scores = np.array([f(lam) for lam in grid])

    def finish(lam, score, bracket, *, flat=False, at_boundary=False):
        if trace is not None:
            trace.extend(evaluated)
        return GcvResult(lambda_min=float(lam), score=float(score),
                         n_evals=len(evaluated), bracket=bracket,
                         flat=flat, at_boundary=at_boundary)

    vmax = float(scores.max())
    vmin = float(scores.min())
    if vmax - vmin < TIE_REL * vmax or vmax == 0.0:
        return finish(grid[-1], scores[-1], (float(lo), float(hi)), flat=True)

    ties = np.flatnonzero(scores <= vmin + TIE_REL * abs(vmin))
    best = int(ties.max())
    if best == 0 or best == grid_points - 1:
        bracket = (float(grid[max(best - 1, 0)]), float(grid[min(best + 1, grid_points - 1)]))
        return finish(grid[best], scores[best], bracket, at_boundary=True)

    # Golden-section refinement on t = log(lam) within the grid bracket.
    a, b = math.log(grid[best - 1]), math.log(grid[best + 1])
    x1 = b - _INV_GOLDEN * (b - a)
    x2 = a + _INV_GOLDEN * (b - a)
    f1, f2 = f(math.exp(x1)), f(math.exp(x2))
    while b - a > LOG_LAMBDA_TOL:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_GOLDEN * (b - a)
            f1 = f(math.exp(x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (b - a)
            f2 = f(math.exp(x2))

    best_lam, best_score = min(evaluated, key=lambda e: (e[1], -e[0]))
    bracket = (min(math.exp(a), best_lam), max(math.exp(b), best_lam))
    return finish(best_lam, best_score, bracket)
