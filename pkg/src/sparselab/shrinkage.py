"""Scalar shrinkage calculus.

Soft/hard thresholding, Gaussian expectations, the worst-case soft
thresholding risk over the sparse class (mass >= 1-eps at zero), and the
minimax quantities M(eps) (normalized minimax risk) and ell(eps) (optimal
threshold at unit noise).

The risk of soft thresholding a Gaussian observation is piecewise quadratic
against the Gaussian density, so expectations reduce exactly to Phi/phi
terms (`soft_threshold_risk`); that exact form backs the minimax search.
`gauss_expect` is the generic Gauss-Hermite utility for arbitrary
integrands.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, roots_hermite

from .errors import NumericFailureError

GOLDEN_MAX_ITER = 10_000


@dataclass
class ShrinkageRule:
    """kind in {"soft", "hard"} plus a nonnegative threshold."""

    kind: str
    lam: float

    def __post_init__(self):
        if self.kind not in ("soft", "hard"):
            raise ValueError(f"unknown shrinkage kind {self.kind!r}")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValueError(f"threshold must be finite and >= 0, got {self.lam}")

    def apply(self, x):
        if self.kind == "soft":
            return soft_threshold(x, self.lam)
        return hard_threshold(x, self.lam)


@dataclass
class MinimaxResult:
    eps: float
    M: float
    ell: float
    quadrature_error_bound: float


def soft_threshold(x, lam):
    """eta(x; lam): 0 on [-lam, lam], shifted identity outside. Componentwise."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    x = np.asarray(x)
    out = np.sign(x) * np.maximum(np.abs(x) - lam, 0.0)
    return out if out.ndim else float(out)


def hard_threshold(x, lam):
    """x where |x| >= lam (boundary kept), else 0. Componentwise."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    x = np.asarray(x)
    out = np.where(np.abs(x) >= lam, x, 0.0)
    return out if out.ndim else float(out)


def soft_threshold_derivative(x, lam):
    """d/dx eta(x; lam): 1 outside the threshold band, 0 inside (and at |x| = lam)."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    x = np.asarray(x)
    out = (np.abs(x) > lam).astype(float)
    return out if out.ndim else float(out)


def gauss_expect(f, nodes=61):
    """E{f(Z)}, Z ~ N(0,1), by nodes-point Gauss-Hermite quadrature.

    Exact for polynomials of degree <= 2*nodes - 1.  Integrands with kinks
    (e.g. thresholding rules) converge much more slowly (~1e-4 at 61 nodes);
    use the exact piecewise forms in this module for those.
    """
    if nodes < 2:
        raise ValueError(f"need at least 2 nodes, got {nodes}")
    x, w = roots_hermite(nodes)
    z = math.sqrt(2.0) * x
    vals = np.asarray([f(zi) for zi in z], dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = z[~np.isfinite(vals)][0]
        raise NumericFailureError(f"integrand is not finite at node z={bad}")
    return float(np.sum(w * vals) / math.sqrt(math.pi))


def _phi(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def soft_threshold_risk(mean, threshold):
    """E[(eta(mean + Z; threshold) - mean)^2] with Z ~ N(0,1), exactly.

    Piecewise integration of the quadratic error against the Gaussian:
    the three branches of eta contribute Phi/phi terms only.
    """
    m, g = float(abs(mean)), float(threshold)
    if g == 0.0:
        return 1.0
    return (
        (1.0 + g * g) * (ndtr(m - g) + ndtr(-m - g))
        + m * m * (ndtr(g - m) - ndtr(-g - m))
        - (g + m) * _phi(g - m)
        + (m - g) * _phi(g + m)
    )


def worstcase_soft_risk(eps, lam):
    """sup over the eps-sparse class of the soft-thresholding risk at tau = 1.

    The worst case is the two-point prior (1-eps) delta_0 + eps delta_inf;
    the infinite atom contributes 1 + lam^2 per unit mass (bias lam,
    variance 1).
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    return (1.0 - eps) * soft_threshold_risk(0.0, lam) + eps * (1.0 + lam * lam)


def minimax_soft(eps, tol=1e-8):
    """Minimize the worst-case risk over the threshold by golden-section search.

    Returns M(eps) = min value and ell(eps) = argmin on the bracket
    [0, 10 + sqrt(2 log 1/eps)], which provably contains the optimum for
    eps >= 1e-12.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")

    def risk(lam):
        return worstcase_soft_risk(eps, lam)

    a, b = 0.0, 10.0 + math.sqrt(2.0 * math.log(1.0 / eps))
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = risk(c), risk(d)
    it = 0
    while (b - a) > tol:
        it += 1
        if it > GOLDEN_MAX_ITER:
            raise NumericFailureError(
                f"golden-section search did not reach width {tol} in {GOLDEN_MAX_ITER} iterations"
            )
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = risk(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = risk(d)
    ell = 0.5 * (a + b)
    # risk evaluations are exact Phi/phi expressions: error is rounding-level
    return MinimaxResult(eps, risk(ell), ell, 1e-12)
