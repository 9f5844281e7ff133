"""Regularized linear regression: LASSO coordinate descent, ridge, VIF machinery."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LASSO_TOL = 1e-8
LASSO_MAX_SWEEPS = 100_000
VIF_LIMIT = 10.0


class RegressionError(Exception):
    pass


@dataclass
class Standardization:
    """Per-column mean/stdev used to standardize a design matrix."""

    means: np.ndarray
    stds: np.ndarray
    kept: np.ndarray  # indices of non-constant columns
    dropped: list[str] = field(default_factory=list)


def standardize(X: np.ndarray, names: list[str] | None = None) -> tuple[np.ndarray, Standardization]:
    """Zero-mean unit-variance columns; constant columns dropped and reported."""
    X = np.asarray(X, dtype=np.float64)
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    kept = np.flatnonzero(stds > 0)
    dropped = []
    if names is not None:
        dropped = [names[j] for j in np.flatnonzero(stds == 0)]
    Z = (X[:, kept] - means[kept]) / stds[kept]
    return Z, Standardization(means=means, stds=stds, kept=kept, dropped=dropped)


@dataclass
class LassoFit:
    names: list[str]
    coefficients: dict[str, float]  # original (unstandardized) units
    std_coefficients: dict[str, float]  # standardized-design scale
    intercept: float
    lam: float
    standardization: Standardization
    vif: dict[str, float]
    sweeps: int = 0

    def nonzero(self) -> dict[str, float]:
        return {n: c for n, c in self.coefficients.items() if c != 0.0}

    def predict(self, X: np.ndarray) -> np.ndarray:
        beta = np.array([self.coefficients[n] for n in self.names])
        return np.asarray(X, dtype=np.float64) @ beta + self.intercept


def _unstandardized(
    names: list[str], beta_std: np.ndarray, y_mean: float, st: Standardization
) -> tuple[dict[str, float], dict[str, float], float]:
    coefs = {n: 0.0 for n in names}
    std_coefs = {n: 0.0 for n in names}
    intercept = y_mean
    for pos, j in enumerate(st.kept):
        b = float(beta_std[pos])
        std_coefs[names[j]] = b
        orig = b / st.stds[j]
        coefs[names[j]] = orig
        intercept -= orig * st.means[j]
    return coefs, std_coefs, intercept


def fit_lasso(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    names: list[str] | None = None,
    tol: float = LASSO_TOL,
    max_sweeps: int = LASSO_MAX_SWEEPS,
) -> LassoFit:
    """Cyclic coordinate descent on (1/2n)||y - Xb||^2 + lam*||b||_1.

    Columns are standardized internally; reported coefficients are in original
    units with the standardization recorded. Deterministic.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if n < 2:
        raise RegressionError("need at least 2 rows")
    if names is None:
        names = [f"x{j}" for j in range(d)]
    Z, st = standardize(X, names)
    y_mean = float(y.mean())
    r = y - y_mean  # residual with all coefficients at 0
    p = Z.shape[1]
    beta = np.zeros(p)
    col_sq = (Z * Z).sum(axis=0) / n  # = 1 for standardized columns up to fp error
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        max_change = 0.0
        for j in range(p):
            zj = Z[:, j]
            rho = (zj @ r) / n + col_sq[j] * beta[j]
            new = math.copysign(max(abs(rho) - lam, 0.0), rho) / col_sq[j]
            if new != beta[j]:
                r -= (new - beta[j]) * zj
                max_change = max(max_change, abs(new - beta[j]))
                beta[j] = new
        if max_change < tol:
            break

    coefs, std_coefs, intercept = _unstandardized(names, beta, y_mean, st)
    surviving = [pos for pos in range(p) if beta[pos] != 0.0]
    vifs = vif(Z[:, surviving], [names[st.kept[pos]] for pos in surviving]) if surviving else {}
    return LassoFit(
        names=names,
        coefficients=coefs,
        std_coefficients=std_coefs,
        intercept=intercept,
        lam=lam,
        standardization=st,
        vif=vifs,
        sweeps=sweeps,
    )


@dataclass
class RidgeFit:
    names: list[str]
    coefficients: dict[str, float]
    std_coefficients: dict[str, float]
    intercept: float
    lam: float
    standardization: Standardization

    def predict(self, X: np.ndarray) -> np.ndarray:
        beta = np.array([self.coefficients[n] for n in self.names])
        return np.asarray(X, dtype=np.float64) @ beta + self.intercept


def fit_ridge(X: np.ndarray, y: np.ndarray, lam: float, names: list[str] | None = None) -> RidgeFit:
    """Closed-form (Z'Z + n*lam*I)^-1 Z'y on standardized columns."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if names is None:
        names = [f"x{j}" for j in range(d)]
    Z, st = standardize(X, names)
    y_mean = float(y.mean())
    p = Z.shape[1]
    beta = np.linalg.solve(Z.T @ Z + n * lam * np.eye(p), Z.T @ (y - y_mean))
    coefs, std_coefs, intercept = _unstandardized(names, beta, y_mean, st)
    return RidgeFit(names, coefs, std_coefs, intercept, lam, st)


def vif(Z: np.ndarray, names: list[str] | None = None) -> dict[str, float]:
    """Variance inflation factor per standardized column; duplicates report inf."""
    Z = np.asarray(Z, dtype=np.float64)
    n, p = Z.shape
    if names is None:
        names = [f"x{j}" for j in range(p)]
    out: dict[str, float] = {}
    for j in range(p):
        others = np.delete(Z, j, axis=1)
        if others.shape[1] == 0:
            out[names[j]] = 1.0
            continue
        target = Z[:, j]
        coef, *_ = np.linalg.lstsq(others, target, rcond=None)
        resid = target - others @ coef
        sst = float(target @ target)
        if sst == 0.0:
            out[names[j]] = 1.0
            continue
        r2 = 1.0 - float(resid @ resid) / sst
        out[names[j]] = math.inf if r2 >= 1.0 - 1e-12 else 1.0 / (1.0 - r2)
    return out


@dataclass
class ScheduleResult:
    fit: LassoFit
    lam: float
    satisfied: bool
    surviving: int
    positive: int
    negative: int
    trace: list[dict]


def lasso_vif_schedule(
    X: np.ndarray,
    y: np.ndarray,
    lambda_grid: list[float],
    names: list[str] | None = None,
    vif_limit: float = VIF_LIMIT,
) -> ScheduleResult:
    """Increase lambda along the grid until surviving-column VIFs all drop below 10.

    Falls back to the largest-lambda fit (with satisfied=False) if no grid point
    meets the criterion.
    """
    if not lambda_grid or any(l <= 0 for l in lambda_grid):
        raise RegressionError("lambda grid must be positive")
    if sorted(lambda_grid) != list(lambda_grid):
        raise RegressionError("lambda grid must be ascending")
    trace: list[dict] = []
    last_fit = None
    for lam in lambda_grid:
        fit = fit_lasso(X, y, lam, names)
        last_fit = fit
        worst = max(fit.vif.values(), default=1.0)
        nz = fit.nonzero()
        trace.append({"lambda": lam, "surviving": len(nz), "max_vif": worst})
        if worst < vif_limit:
            return ScheduleResult(
                fit=fit,
                lam=lam,
                satisfied=True,
                surviving=len(nz),
                positive=sum(c > 0 for c in nz.values()),
                negative=sum(c < 0 for c in nz.values()),
                trace=trace,
            )
    nz = last_fit.nonzero()
    return ScheduleResult(
        fit=last_fit,
        lam=lambda_grid[-1],
        satisfied=False,
        surviving=len(nz),
        positive=sum(c > 0 for c in nz.values()),
        negative=sum(c < 0 for c in nz.values()),
        trace=trace,
    )


def fit_ols(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Least squares on raw columns; returns (coefficients, intercept)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    A = np.hstack([X, np.ones((X.shape[0], 1))])
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    return sol[:-1], float(sol[-1])
