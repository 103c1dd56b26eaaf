"""Least squares, prediction risk, the cosine-basis bias/variance experiment,
the Haar pyramid, and thresholding denoisers on orthogonal designs."""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SingularDesignError
from .models import DesignMatrix
from .shrinkage import ShrinkageRule


@dataclass
class RiskCurve:
    """Monte Carlo prediction risk per model size J; ties in the argmin go to smaller J."""

    grid: list
    argmin_J: int


@dataclass
class WaveletCoeffs:
    """Orthonormal Haar pyramid: one scaling coefficient plus 2^j details per level j."""

    scaling: float
    details: list
    n: int


def least_squares(X, y):
    """Unique RSS minimizer (X^T X)^{-1} X^T y; requires full column rank."""
    A = X.entries if isinstance(X, DesignMatrix) else np.asarray(X)
    n, p = A.shape
    y = np.asarray(y)
    if y.shape != (n,):
        raise ValueError(f"y length {y.shape} does not match n={n}")
    R = scipy.linalg.qr(A, mode="r", pivoting=True)[0]
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > max(n, p) * np.finfo(float).eps * diag[0]))
    if rank < p:
        raise SingularDesignError(
            f"design is rank deficient: {p - rank} of {p} columns dependent",
            deficient_columns=p - rank,
        )
    theta, *_ = np.linalg.lstsq(A, y, rcond=None)
    return theta


def ls_risk_formula(X, sigma):
    """Exact least-squares risk sigma^2 tr((X^T X)^{-1})."""
    A = X.entries if isinstance(X, DesignMatrix) else np.asarray(X)
    XtX = A.T @ A
    try:
        c, low = scipy.linalg.cho_factor(XtX)
    except scipy.linalg.LinAlgError as exc:
        raise SingularDesignError(f"X^T X is singular: {exc}") from exc
    inv = scipy.linalg.cho_solve((c, low), np.eye(XtX.shape[0]))
    return float(sigma**2 * np.trace(inv))


def fourier_design(n, J):
    """Cosine design X_ij = phi_j(i/n) on the grid i/n, i = 1..n.

    phi_1 is the constant column (renormalized to 1 so the Gram matrix is
    asymptotically the identity); phi_j(t) = sqrt(2) cos((j-1) pi t) for
    j >= 2.
    """
    if not 1 <= J <= n:
        raise ValueError(f"need 1 <= J <= n, got J={J}, n={n}")
    t = np.arange(1, n + 1) / n
    X = np.empty((n, J))
    X[:, 0] = 1.0
    for j in range(2, J + 1):
        X[:, j - 1] = np.sqrt(2.0) * np.cos((j - 1) * np.pi * t)
    return DesignMatrix(X, n, J, "fourier")


def bias_variance_curve(f, n, sigma, J_max, replicates, seed):
    """Monte Carlo prediction risk (1/n) E||X theta_hat - f||^2 versus J.

    Uses the same noise draws across J (common random numbers) so the
    empirical argmin is stable.  The per-J least-squares fits are evaluated
    through one QR of the J_max-column design: the first-J column span
    equals the first-J Q-column span, so projections for every J come from
    prefix sums.
    """
    if J_max > n:
        raise ValueError(f"J_max={J_max} exceeds n={n}")
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    X = fourier_design(n, J_max).entries
    t = np.arange(1, n + 1) / n
    fvec = np.asarray([f(ti) for ti in t], dtype=float)
    Q, _ = np.linalg.qr(X)
    c = Q.T @ fvec
    f2 = float(fvec @ fvec)
    rng = np.random.default_rng(seed)
    risks = np.zeros(J_max)
    for _ in range(replicates):
        y = fvec if sigma == 0 else fvec + sigma * rng.standard_normal(n)
        d = Q.T @ y
        # ||P_J y - f||^2 = ||f||^2 - 2 <c,d>_J + ||d||^2_J, cumulated over J
        risks += f2 - 2.0 * np.cumsum(c * d) + np.cumsum(d * d)
    risks /= replicates * n
    grid = [(J, float(risks[J - 1])) for J in range(1, J_max + 1)]
    argmin_J = int(np.argmin(risks)) + 1
    return RiskCurve(grid, argmin_J)


def haar_forward(v):
    """Orthonormal discrete Haar analysis of a length-2^m vector.

    Detail at the finest level for the pair (v_even, v_odd) is
    (v_odd - v_even)/sqrt(2), matching a mother wavelet that is -1 on the
    first half-interval and +1 on the second.
    """
    v = np.asarray(v, dtype=float)
    n = v.size
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError(f"length must be a power of two, got {n}")
    details = []
    a = v.copy()
    while a.size > 1:
        even, odd = a[0::2], a[1::2]
        details.append((odd - even) / np.sqrt(2.0))
        a = (even + odd) / np.sqrt(2.0)
    details.reverse()  # level j holds 2^j coefficients, j = 0 coarsest
    return WaveletCoeffs(float(a[0]), details, n)


def haar_inverse(c):
    """Exact inverse of `haar_forward`."""
    n = c.n
    m = int(math.log2(n)) if n > 0 else -1
    if n < 1 or 2**m != n:
        raise ValueError(f"invalid coefficient length {n}")
    if len(c.details) != m or any(len(c.details[j]) != 2**j for j in range(m)):
        raise ValueError("malformed coefficient pyramid")
    a = np.array([c.scaling], dtype=float)
    for d in c.details:
        d = np.asarray(d, dtype=float)
        out = np.empty(2 * a.size)
        out[0::2] = (a - d) / np.sqrt(2.0)
        out[1::2] = (a + d) / np.sqrt(2.0)
        a = out
    return a


def universal_threshold(sigma, n, p):
    """The noise-ceiling threshold sigma sqrt(2 log p / n)."""
    if p < 2:
        raise ValueError(f"p must be >= 2 so log p > 0, got {p}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    return sigma * math.sqrt(2.0 * math.log(p) / n)


def ortho_denoise(X, y, rule):
    """Back-project to coefficients (X^T y / n) and threshold componentwise."""
    if X.kind != "orthogonal":
        raise ValueError(f"design kind must be 'orthogonal', got {X.kind!r}")
    if not isinstance(rule, ShrinkageRule):
        raise ValueError("rule must be a ShrinkageRule")
    y_tilde = X.entries.T @ np.asarray(y) / X.n
    return rule.apply(y_tilde)
