"""Shared value types, per-calibration standardization, and the ridge
reconstruction operator.

Everything here is a pure function of immutable inputs. Arrays stored on the
value types are copied to float64 (or int64 for indices) and marked read-only,
so instances are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateColumn, LengthMismatch, SingularSystem

# Calibration standard deviations at or below this are treated as zero.
DEGENERATE_STD = 1e-12


def _frozen_array(x, dtype=np.float64, ndim=1):
    a = np.array(x, dtype=dtype)
    if a.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {a.shape}")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Annual target series: calendar years plus values (degC anomaly)."""

    years: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "years", _frozen_array(self.years, dtype=np.int64))
        object.__setattr__(self, "values", _frozen_array(self.values))
        if len(self.years) != len(self.values):
            raise LengthMismatch(
                f"{len(self.years)} years vs {len(self.values)} values"
            )
        if len(self.years) < 2:
            raise ValueError("a series needs at least 2 years")
        if not np.all(np.diff(self.years) == 1):
            raise ValueError("years must be strictly increasing with unit step")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("series values must be finite")

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class ProxyMatrix:
    """n x p predictor matrix (real proxies or generated noise)."""

    data: np.ndarray
    column_ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen_array(self.data, ndim=2))
        object.__setattr__(self, "column_ids", tuple(str(c) for c in self.column_ids))
        n, p = self.data.shape
        if p < 1:
            raise ValueError("need at least one proxy column")
        if len(self.column_ids) != p:
            raise LengthMismatch(f"{len(self.column_ids)} ids for {p} columns")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("proxy matrix contains non-finite entries")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class HoldoutSplit:
    """One contiguous validation block and its calibration complement.

    The complement is a row *set*, not a range: interior blocks leave two
    calibration segments, one on each side.
    """

    block_start: int
    block_len: int
    calib_rows: np.ndarray
    valid_rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "calib_rows", _frozen_array(self.calib_rows, dtype=np.int64))
        object.__setattr__(self, "valid_rows", _frozen_array(self.valid_rows, dtype=np.int64))
        n = len(self.calib_rows) + len(self.valid_rows)
        expected_valid = np.arange(self.block_start, self.block_start + self.block_len)
        if not np.array_equal(self.valid_rows, expected_valid):
            raise ValueError("valid_rows must be the contiguous block "
                             "[block_start, block_start + block_len)")
        complement = np.setdiff1d(np.arange(n), self.valid_rows)
        if not np.array_equal(np.sort(self.calib_rows), complement):
            raise ValueError("calib_rows must be the complement of valid_rows")

    @classmethod
    def make(cls, n: int, block_start: int, n_v: int) -> "HoldoutSplit":
        if not 0 <= block_start <= n - n_v:
            raise ValueError(f"block_start {block_start} out of range for n={n}, n_v={n_v}")
        valid = np.arange(block_start, block_start + n_v)
        calib = np.setdiff1d(np.arange(n), valid)
        return cls(block_start=block_start, block_len=n_v, calib_rows=calib, valid_rows=valid)

    @property
    def n(self) -> int:
        return len(self.calib_rows) + len(self.valid_rows)

    @property
    def n_c(self) -> int:
        return len(self.calib_rows)

    @property
    def n_v(self) -> int:
        return len(self.valid_rows)


@dataclass(frozen=True, eq=False)
class StandardizedMatrix:
    """Proxy matrix after column standardization over calibration rows.

    col_means / col_stds are the calibration-period statistics that were
    removed; the full column (all n rows) is transformed with them.
    """

    data: np.ndarray
    col_means: np.ndarray
    col_stds: np.ndarray
    column_ids: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen_array(self.data, ndim=2))
        object.__setattr__(self, "col_means", _frozen_array(self.col_means))
        object.__setattr__(self, "col_stds", _frozen_array(self.col_stds))
        object.__setattr__(self, "column_ids", tuple(self.column_ids))
        p = self.data.shape[1]
        if len(self.col_means) != p or len(self.col_stds) != p:
            raise LengthMismatch("per-column stats must match the column count")
        if np.any(self.col_stds <= 0):
            raise ValueError("col_stds must be positive")

    @property
    def p(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Calibration weight vector w.

    Normally w sums to one (the intercept weights); the all-zero vector is a
    documented special value that removes the intercept entirely, used by the
    kriging nugget selection.
    """

    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen_array(self.w))
        if not np.all(np.isfinite(self.w)):
            raise ValueError("weights must be finite")
        total = float(self.w.sum())
        if not (abs(total - 1.0) <= 1e-12 or self.is_zero):
            raise ValueError(f"weights must sum to 1 (or be all zero), got {total!r}")

    @classmethod
    def uniform(cls, n_c: int) -> "WeightVector":
        return cls(np.full(n_c, 1.0 / n_c))

    @classmethod
    def zero(cls, n_c: int) -> "WeightVector":
        return cls(np.zeros(n_c))

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.w == 0.0))

    def __len__(self) -> int:
        return len(self.w)


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """Predicted validation values for one holdout block."""

    y_hat_v: np.ndarray
    lam: float
    split: HoldoutSplit
    rmse: float

    def __post_init__(self):
        object.__setattr__(self, "y_hat_v", _frozen_array(self.y_hat_v))
        if len(self.y_hat_v) != self.split.n_v:
            raise LengthMismatch("prediction length must equal the block length")


def standardize_columns(data: np.ndarray, calib_rows: np.ndarray
                        ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column-standardize an n x p array over the given calibration rows.

    Returns (standardized data, calibration means, calibration stds); stds
    use denominator n_c - 1. Raises DegenerateColumn (with column indices as
    ids) on any calibration std at or below DEGENERATE_STD.
    """
    calib = data[calib_rows]
    means = calib.mean(axis=0)
    stds = calib.std(axis=0, ddof=1)
    bad = stds <= DEGENERATE_STD
    if np.any(bad):
        raise DegenerateColumn([str(j) for j in np.flatnonzero(bad)])
    return (data - means) / stds, means, stds


def standardize(X: ProxyMatrix, split: HoldoutSplit, *,
                drop_degenerate: bool = False) -> StandardizedMatrix:
    """Standardize every column using calibration-period statistics only.

    Each column's mean and sample standard deviation (denominator n_c - 1)
    are computed over ``split.calib_rows``; the whole column, validation rows
    included, is then transformed by (x - mean) / std.

    Parameters
    ----------
    X : ProxyMatrix
    split : HoldoutSplit
    drop_degenerate : bool
        When False (strict, the default) a calibration std <= 1e-12 raises
        DegenerateColumn. When True such columns are silently removed;
        raises only if nothing is left.
    """
    calib = X.data[split.calib_rows]
    stds = calib.std(axis=0, ddof=1)
    bad = stds <= DEGENERATE_STD
    ids = X.column_ids
    data = X.data
    if np.any(bad):
        if not drop_degenerate or np.all(bad):
            raise DegenerateColumn([ids[j] for j in np.flatnonzero(bad)])
        keep = ~bad
        data = data[:, keep]
        ids = tuple(c for c, k in zip(ids, keep) if k)
    scaled, means, stds = standardize_columns(data, split.calib_rows)
    return StandardizedMatrix(
        data=scaled,
        col_means=means,
        col_stds=stds,
        column_ids=ids,
    )


def gram_matrix(Xs: StandardizedMatrix) -> np.ndarray:
    """Column-averaged Gram matrix of the standardized predictors.

    Returns the n x n matrix (Xs Xs^T) / p, exactly symmetric and positive
    semidefinite up to rounding.
    """
    S = Xs.data @ Xs.data.T / Xs.p
    return (S + S.T) / 2.0


def center_apply(w: WeightVector, v: np.ndarray) -> np.ndarray:
    """Apply the centering operator I - 1 w^T, i.e. v - (w^T v) 1."""
    v = np.asarray(v, dtype=np.float64)
    if len(w) != len(v):
        raise LengthMismatch(f"{len(w)} weights vs {len(v)} values")
    return v - (w.w @ v)


def solve_shifted(S_cc: np.ndarray, lam: float, rhs: np.ndarray) -> np.ndarray:
    """Solve (S_cc + lam I) z = rhs through a Cholesky factorization.

    The shifted matrix is positive definite for every lam > 0 when S_cc is
    PSD; the factorization is still guarded and failure surfaces as
    SingularSystem rather than a bare LinAlgError.
    """
    shifted = S_cc + lam * np.eye(S_cc.shape[0])
    try:
        cho = scipy.linalg.cho_factor(shifted, lower=True, check_finite=False)
        return scipy.linalg.cho_solve(cho, rhs, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystem(f"shifted calibration system unsolvable: {exc}") from exc


def ridge_predict(S: np.ndarray, lam: float, w: WeightVector, y_c: np.ndarray,
                  calib_rows: np.ndarray, valid_rows: np.ndarray) -> np.ndarray:
    """Ridge prediction onto arbitrary target rows.

    Computes S_vc (S_cc + lam I)^-1 (y_c - (w^T y_c) 1) + (w^T y_c) 1 for the
    given row index sets. ``reconstruct`` is the HoldoutSplit-facing wrapper;
    this form also serves diagnostics that predict back onto the calibration
    rows themselves.
    """
    S_cc = S[np.ix_(calib_rows, calib_rows)]
    S_vc = S[np.ix_(valid_rows, calib_rows)]
    c = float(w.w @ y_c)
    z = solve_shifted(S_cc, lam, y_c - c)
    return S_vc @ z + c


def reconstruct(S: np.ndarray, lam: float, w: WeightVector, y_c: np.ndarray,
                split: HoldoutSplit) -> np.ndarray:
    """Reconstruct the validation block from calibration values.

    Applies the operator S_vc (S_cc + lam I)^-1 (I - 1 w^T) + 1 w^T to y_c,
    where submatrices are indexed by the split. Linear in y_c; with the
    all-zero weight vector the intercept term drops out entirely.
    """
    if lam <= 0:
        raise ValueError("ridge parameter must be positive")
    if len(y_c) != split.n_c:
        raise LengthMismatch("y_c must have one entry per calibration row")
    return ridge_predict(S, lam, w, np.asarray(y_c, dtype=np.float64),
                         split.calib_rows, split.valid_rows)


def rmse(y_hat: np.ndarray, y_true: np.ndarray) -> float:
    """Root mean square difference of two equally long vectors."""
    y_hat = np.asarray(y_hat, dtype=np.float64)
    y_true = np.asarray(y_true, dtype=np.float64)
    if y_hat.shape != y_true.shape or y_hat.ndim != 1 or len(y_hat) < 1:
        raise LengthMismatch(f"shapes {y_hat.shape} vs {y_true.shape}")
    return float(np.sqrt(np.mean((y_hat - y_true) ** 2)))
