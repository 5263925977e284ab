"""Generalized linear models: binomial logistic and negative binomial.

Both fitters run iteratively reweighted least squares with step halving so
the log-likelihood trace is nondecreasing.  The negative binomial uses the
NB2 parameterization (variance mu + mu^2/theta) with a log link, alternating
the IRLS beta step with a bracketed root solve of the dispersion score.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import digamma, gammaln

from .types import EffectRow, EffectTable, GlmFit
from .ranktests import _normal_sf

MAX_ITER = 100
TOL = 1e-8
_ETA_CLIP = 30.0
_THETA_LO = 1e-4
_THETA_HI = 1e7


def _as_design(design) -> np.ndarray:
    x = np.asarray(design, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("design matrix must be 2-d and non-empty")
    if np.linalg.matrix_rank(x) < x.shape[1]:
        raise ValueError("design matrix is rank deficient")
    return x


def _term_names(terms, k: int) -> tuple[str, ...]:
    if terms is None:
        return tuple(f"x{i}" for i in range(k))
    names = tuple(terms)
    if len(names) != k:
        raise ValueError("terms must name every design column")
    return names


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(eta, -_ETA_CLIP, _ETA_CLIP)))


def logistic_log_likelihood(design, successes, trials, beta) -> float:
    """Binomial log-likelihood (including the binomial coefficient)."""
    x = np.asarray(design, dtype=float)
    s = np.asarray(successes, dtype=float)
    t = np.asarray(trials, dtype=float)
    b = np.asarray(beta, dtype=float)
    mu = np.clip(_sigmoid(x @ b), 1e-12, 1.0 - 1e-12)
    coef = gammaln(t + 1) - gammaln(s + 1) - gammaln(t - s + 1)
    return float(np.sum(coef + s * np.log(mu) + (t - s) * np.log(1.0 - mu)))


def logistic_score(design, successes, trials, beta) -> np.ndarray:
    """Gradient of the binomial log-likelihood in beta: X'(s - t*mu)."""
    x = np.asarray(design, dtype=float)
    s = np.asarray(successes, dtype=float)
    t = np.asarray(trials, dtype=float)
    b = np.asarray(beta, dtype=float)
    mu = _sigmoid(x @ b)
    return x.T @ (s - t * mu)


def fit_binomial_logistic(design, successes, trials, *, terms=None) -> GlmFit:
    """Logistic regression on aggregated binomial observations.

    Converges when the largest coefficient update falls below 1e-8 within
    100 iterations; otherwise ``converged`` is false and the diagnostic
    names the likely cause (such as complete separation).
    """
    x = _as_design(design)
    s = np.asarray(successes, dtype=float)
    t = np.asarray(trials, dtype=float)
    if s.shape != (x.shape[0],) or t.shape != (x.shape[0],):
        raise ValueError("successes and trials must match the design rows")
    if np.any(t <= 0) or np.any(s < 0) or np.any(s > t):
        raise ValueError("need 0 <= successes <= trials and trials > 0")
    names = _term_names(terms, x.shape[1])

    beta = np.zeros(x.shape[1])
    ll = logistic_log_likelihood(x, s, t, beta)
    trace = [ll]
    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITER + 1):
        eta = np.clip(x @ beta, -_ETA_CLIP, _ETA_CLIP)
        mu = _sigmoid(eta)
        w = np.maximum(t * mu * (1.0 - mu), 1e-12)
        z = eta + (s - t * mu) / w
        xtw = x.T * w
        try:
            beta_new = np.linalg.solve(xtw @ x, xtw @ z)
        except np.linalg.LinAlgError:
            break
        step = beta_new - beta
        # step halving keeps the likelihood trace nondecreasing
        ll_new = logistic_log_likelihood(x, s, t, beta + step)
        while ll_new < ll - 1e-12 and np.max(np.abs(step)) > 1e-14:
            step *= 0.5
            ll_new = logistic_log_likelihood(x, s, t, beta + step)
        beta = beta + step
        ll = max(ll, ll_new)
        trace.append(ll_new)
        if np.max(np.abs(step)) < TOL:
            converged = True
            break

    diagnostic = None
    if not converged:
        if np.max(np.abs(beta)) > 25.0:
            diagnostic = "no convergence: coefficients diverging, possible complete separation"
        else:
            diagnostic = f"no convergence after {iterations} iterations"

    eta = np.clip(x @ beta, -_ETA_CLIP, _ETA_CLIP)
    mu = _sigmoid(eta)
    w = np.maximum(t * mu * (1.0 - mu), 1e-12)
    info = (x.T * w) @ x
    se = _standard_errors(info)
    return GlmFit(
        family="binomial-logit",
        terms=names,
        coefficients=beta,
        standard_errors=se,
        dispersion=None,
        log_likelihood=logistic_log_likelihood(x, s, t, beta),
        converged=converged,
        iterations=iterations,
        ll_trace=trace,
        diagnostic=diagnostic,
    )


def _standard_errors(info: np.ndarray) -> np.ndarray:
    try:
        cov = np.linalg.inv(info)
        return np.sqrt(np.clip(np.diag(cov), 0.0, None))
    except np.linalg.LinAlgError:
        return np.full(info.shape[0], np.nan)


def negbin_log_likelihood(design, counts, beta, dispersion) -> float:
    """NB2 log-likelihood with mean exp(X beta) and dispersion theta."""
    x = np.asarray(design, dtype=float)
    y = np.asarray(counts, dtype=float)
    b = np.asarray(beta, dtype=float)
    theta = float(dispersion)
    mu = np.exp(np.clip(x @ b, -_ETA_CLIP, _ETA_CLIP))
    return float(
        np.sum(
            gammaln(y + theta)
            - gammaln(theta)
            - gammaln(y + 1)
            + theta * np.log(theta / (theta + mu))
            + y * np.log(mu / (theta + mu))
        )
    )


def _theta_score(theta: float, y: np.ndarray, mu: np.ndarray) -> float:
    return float(
        np.sum(
            digamma(y + theta)
            - digamma(theta)
            + np.log(theta)
            + 1.0
            - np.log(theta + mu)
            - (y + theta) / (theta + mu)
        )
    )


def _update_theta(y: np.ndarray, mu: np.ndarray) -> tuple[float, str | None]:
    lo, hi = _THETA_LO, _THETA_HI
    s_lo = _theta_score(lo, y, mu)
    s_hi = _theta_score(hi, y, mu)
    if s_hi > 0:  # likelihood still rising at the cap: essentially Poisson
        return hi, "dispersion at upper bound (data near-Poisson)"
    if s_lo < 0:
        return lo, "dispersion at lower bound (extreme overdispersion)"
    return float(brentq(_theta_score, lo, hi, args=(y, mu), xtol=1e-10, rtol=1e-12)), None


def fit_negative_binomial(design, counts, *, terms=None) -> GlmFit:
    """Negative binomial (NB2) regression with a log link.

    Alternates an IRLS step for the coefficients with a maximum-likelihood
    update of the dispersion found by bracketed root solving of its score.
    """
    x = _as_design(design)
    y = np.asarray(counts, dtype=float)
    if y.shape != (x.shape[0],):
        raise ValueError("counts must match the design rows")
    if np.any(y < 0):
        raise ValueError("counts must be non-negative")
    if not np.any(y > 0):
        raise ValueError("all counts are zero; the mean model is degenerate")
    names = _term_names(terms, x.shape[1])

    mean = y.mean()
    variance = y.var()
    theta = mean**2 / (variance - mean) if variance > mean else 100.0
    theta = float(np.clip(theta, _THETA_LO, _THETA_HI))
    beta = np.zeros(x.shape[1])
    beta[0] = math.log(max(mean, 1e-8)) if np.allclose(x[:, 0], 1.0) else 0.0

    ll = negbin_log_likelihood(x, y, beta, theta)
    trace = [ll]
    converged = False
    iterations = 0
    note: str | None = None
    for iterations in range(1, MAX_ITER + 1):
        eta = np.clip(x @ beta, -_ETA_CLIP, _ETA_CLIP)
        mu = np.exp(eta)
        w = mu * theta / (theta + mu)
        z = eta + (y - mu) / mu
        xtw = x.T * w
        try:
            beta_new = np.linalg.solve(xtw @ x, xtw @ z)
        except np.linalg.LinAlgError:
            break
        step = beta_new - beta
        ll_new = negbin_log_likelihood(x, y, beta + step, theta)
        while ll_new < ll - 1e-12 and np.max(np.abs(step)) > 1e-14:
            step *= 0.5
            ll_new = negbin_log_likelihood(x, y, beta + step, theta)
        beta = beta + step

        mu = np.exp(np.clip(x @ beta, -_ETA_CLIP, _ETA_CLIP))
        theta_new, note = _update_theta(y, mu)
        theta_change = abs(math.log(theta_new) - math.log(theta))
        theta = theta_new
        ll = negbin_log_likelihood(x, y, beta, theta)
        trace.append(ll)
        if np.max(np.abs(step)) < TOL and theta_change < 1e-8:
            converged = True
            break

    diagnostic = note
    if not converged and diagnostic is None:
        diagnostic = f"no convergence after {iterations} iterations"

    mu = np.exp(np.clip(x @ beta, -_ETA_CLIP, _ETA_CLIP))
    w = mu * theta / (theta + mu)
    info = (x.T * w) @ x
    se = _standard_errors(info)
    return GlmFit(
        family="negative-binomial-log",
        terms=names,
        coefficients=beta,
        standard_errors=se,
        dispersion=theta,
        log_likelihood=negbin_log_likelihood(x, y, beta, theta),
        converged=converged,
        iterations=iterations,
        ll_trace=trace,
        diagnostic=diagnostic,
    )


def effect_table(fit: GlmFit) -> EffectTable:
    """Per-term ratio scale: exp(beta), 95% Wald CI, two-sided Wald p.

    For the logistic family the ratios are odds ratios; for the negative
    binomial they are incidence rate ratios.
    """
    if not fit.converged:
        raise ValueError("effect_table requires a converged fit")
    rows = []
    for name, coef, se in zip(fit.terms, fit.coefficients, fit.standard_errors):
        half = 1.96 * se
        p = min(1.0, 2.0 * _normal_sf(abs(coef / se))) if se > 0 else float("nan")
        rows.append(
            EffectRow(
                term=name,
                ratio=math.exp(coef),
                ci_low=math.exp(coef - half),
                ci_high=math.exp(coef + half),
                p_value=p,
            )
        )
    return tuple(rows)
