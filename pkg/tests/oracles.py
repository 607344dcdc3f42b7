"""Brute-force reference implementations used only by tests.

Everything here builds operators as explicit dense matrices with
numpy.linalg.inv and plain Python loops, independently of the library's
factorize-and-solve / eigendecomposition code paths.
"""

import numpy as np


def centering_matrix(w: np.ndarray) -> np.ndarray:
    n = len(w)
    return np.eye(n) - np.outer(np.ones(n), w)


def reconstruction_matrix(S: np.ndarray, lam: float, w: np.ndarray,
                          calib: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Explicit S_vc (S_cc + lam I)^-1 (I - 1 w^T) + 1 w^T."""
    S_cc = S[np.ix_(calib, calib)]
    S_vc = S[np.ix_(valid, calib)]
    inv = np.linalg.inv(S_cc + lam * np.eye(len(calib)))
    return S_vc @ inv @ centering_matrix(w) + np.outer(np.ones(len(valid)), w)


def hat_matrix(S_cc: np.ndarray, lam: float, w: np.ndarray) -> np.ndarray:
    n = S_cc.shape[0]
    inv = np.linalg.inv(S_cc + lam * np.eye(n))
    return S_cc @ inv @ centering_matrix(w) + np.outer(np.ones(n), w)


def gcv_value(S_cc: np.ndarray, lam: float, w: np.ndarray, y_c: np.ndarray) -> float:
    n = len(y_c)
    H = hat_matrix(S_cc, lam, w)
    r = (np.eye(n) - H) @ y_c
    return n * float(r @ r) / np.trace(np.eye(n) - H) ** 2


def dense_grid_gcv_min(S_cc: np.ndarray, w: np.ndarray, y_c: np.ndarray,
                       lo: float = 1e-8, hi: float = 1e8,
                       points: int = 2000) -> tuple[float, float]:
    grid = np.geomspace(lo, hi, points)
    scores = [gcv_value(S_cc, lam, w, y_c) for lam in grid]
    i = int(np.argmin(scores))
    return float(grid[i]), float(scores[i])


def dense_grid_gcv_ties(S_cc: np.ndarray, w: np.ndarray, y_c: np.ndarray,
                        tie_rel: float = 1e-6, lo: float = 1e-8, hi: float = 1e8,
                        points: int = 2000) -> tuple[np.ndarray, float]:
    """Dense-grid minimum plus every grid lambda tying it within tie_rel.

    Where the objective is flat at the grid's resolution, the grid argmin is
    an arbitrary tie-break; any tied point is an equally valid brute-force
    answer.
    """
    grid = np.geomspace(lo, hi, points)
    scores = np.array([gcv_value(S_cc, lam, w, y_c) for lam in grid])
    v_min = float(scores.min())
    return grid[scores <= v_min * (1 + tie_rel)], v_min


def gram_by_accumulation(Xs: np.ndarray) -> np.ndarray:
    """Sum of column outer products divided by the column count."""
    n, p = Xs.shape
    S = np.zeros((n, n))
    for j in range(p):
        S += np.outer(Xs[:, j], Xs[:, j])
    return S / p


def rmse_by_loop(a, b) -> float:
    total = 0.0
    for x, y in zip(a, b):
        total += (x - y) ** 2
    return (total / len(a)) ** 0.5


def standardize_by_loop(data: np.ndarray, calib: np.ndarray) -> np.ndarray:
    """Per-column standardization over calibration rows, one entry at a time."""
    n, p = data.shape
    out = np.empty_like(data, dtype=float)
    for j in range(p):
        vals = [data[i, j] for i in calib]
        mean = sum(vals) / len(vals)
        var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
        sd = var ** 0.5
        for i in range(n):
            out[i, j] = (data[i, j] - mean) / sd
    return out


def kriging_by_inverse(Phi: np.ndarray, nugget: float, y_c: np.ndarray,
                       calib: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Phi_vc [Phi_cc + nugget I]^-1 y_c with an explicit inverse."""
    Phi_cc = Phi[np.ix_(calib, calib)]
    Phi_vc = Phi[np.ix_(valid, calib)]
    return Phi_vc @ np.linalg.inv(Phi_cc + nugget * np.eye(len(calib))) @ y_c


def constant_baseline_rmse(y_values: np.ndarray, split) -> float:
    """RMSE of predicting the calibration mean on every validation year."""
    pred = np.full(split.n_v, y_values[split.calib_rows].mean())
    return rmse_by_loop(pred, y_values[split.valid_rows])


def lag1_autocorr(data: np.ndarray) -> float:
    """Pooled lag-1 autocorrelation of a zero-mean unit-variance ensemble.

    Ratio of the mean lagged product to the mean square, pooled over all
    columns; bias is O(1/(n p)) for the processes generated here.
    """
    num = np.sum(data[:-1] * data[1:]) / (data.shape[1] * (data.shape[0] - 1))
    den = np.sum(data * data) / data.size
    return float(num / den)
