"""Deterministic state evolution for the LASSO/AMP and the phase diagram.

The one-dimensional map

    G(tau^2; sigma^2) = sigma^2 + E{(eta(Theta + tau Z; kappa tau) - Theta)^2} / delta

tracks the effective noise variance of AMP iterates as n, p -> infinity.
Per prior atom the expectation is a piecewise quadratic against the
Gaussian, evaluated exactly through Phi/phi (`method="exact"`, default) or
by kink-split Gauss-Legendre panels (`method="quadrature"`); the two agree
to ~1e-12 and serve as mutual checks.

The noiseless map contracts to zero iff delta > M(eps); with noise the
fixed-point excess over sigma^2 reproduces M(eps) sigma^2 / (delta - M(eps))
at the minimax threshold, which `lasso_asymptotic_risk` evaluates directly.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, roots_legendre

from .shrinkage import minimax_soft, soft_threshold_risk

FAR_ATOM_RATIO = 1e6
SE_RTOL = 1e-12
FIXED_POINT_MAX_ITER = 10_000
_QUAD_NODES = 80
_QUAD_TAIL = 12.0  # Gaussian mass beyond 12 sigma is ~1e-32


@dataclass
class ThreePointPrior:
    """(1-eps) delta_0 + (eps/2) delta_{+a} + (eps/2) delta_{-a}.

    amplitude may be math.inf: the far atom's risk contribution is then the
    exact limit (1 + kappa^2) tau^2 per unit mass.
    """

    amplitude: float

    def atoms(self, eps):
        a = self.amplitude
        return [(0.0, 1.0 - eps), (a, eps / 2.0), (-a, eps / 2.0)]

    def second_moment(self, eps):
        return eps * self.amplitude**2


@dataclass
class CustomPrior:
    values: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.masses = np.asarray(self.masses, dtype=float)
        if self.values.shape != self.masses.shape:
            raise ValueError("values and masses must have equal length")
        if abs(self.masses.sum() - 1.0) > 1e-9 or np.any(self.masses < 0):
            raise ValueError("masses must be nonnegative and sum to 1")

    def atoms(self, eps):
        return list(zip(self.values, self.masses))

    def second_moment(self, eps):
        return float(np.sum(self.masses * self.values**2))


@dataclass
class SEConfig:
    delta: float
    eps: float
    sigma2: float
    kappa: float
    prior: object

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must be in (0, 1), got {self.eps}")
        if self.sigma2 < 0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")


@dataclass
class SETrace:
    tau2: list
    fixed_point: float | None
    converged: bool
    diverged: bool = False


def _atom_risk_quadrature(m, g):
    """E[(eta(m + Z; g) - m)^2] by Gauss-Legendre on the smooth pieces.

    The integrand kinks at z = g - m and z = -g - m; each piece is smooth,
    so fixed-order panels between (and beyond) the kinks converge spectrally.
    """
    x, w = roots_legendre(_QUAD_NODES)
    kinks = [min(max(c, -_QUAD_TAIL), _QUAD_TAIL) for c in (-g - m, g - m)]
    cuts = sorted([-_QUAD_TAIL, *kinks, _QUAD_TAIL])
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        z = 0.5 * (b - a) * x + 0.5 * (b + a)
        err = np.sign(m + z) * np.maximum(np.abs(m + z) - g, 0.0) - m
        dens = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        total += 0.5 * (b - a) * float(np.sum(w * err * err * dens))
    return total


def se_map(cfg, tau2, method="exact"):
    """One application of G(tau^2; sigma^2)."""
    if tau2 < 0:
        raise ValueError(f"tau2 must be >= 0, got {tau2}")
    if tau2 == 0.0:
        return cfg.sigma2  # eta(Theta; 0) = Theta
    tau = math.sqrt(tau2)
    g = cfg.kappa
    acc = 0.0
    for value, mass in cfg.prior.atoms(cfg.eps):
        if mass == 0.0:
            continue
        m = abs(value) / tau
        if not math.isfinite(m) or m > FAR_ATOM_RATIO:
            # far-atom limit: eta acts as a pure shift, error (Z - kappa)^2 tau^2
            acc += mass * (1.0 + g * g)
        elif method == "exact":
            acc += mass * soft_threshold_risk(m, g)
        elif method == "quadrature":
            acc += mass * _atom_risk_quadrature(m, g)
        else:
            raise ValueError(f"unknown method {method!r}")
    return cfg.sigma2 + tau2 * acc / cfg.delta


def _default_tau2_0(cfg):
    second = cfg.prior.second_moment(cfg.eps)
    if not math.isfinite(second):
        raise ValueError(
            "prior has infinite second moment; pass tau2_0 explicitly"
        )
    return cfg.sigma2 + second / cfg.delta


def se_trace(cfg, T, tau2_0=None):
    """Iterate tau^2_{t+1} = G(tau^2_t) for T steps from tau2_0.

    Default start is sigma^2 + E{Theta^2}/delta, the first iterate from
    theta^(0) = 0.  Convergence flag: |change| < 1e-12 max(1, tau^2).
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    tau2 = _default_tau2_0(cfg) if tau2_0 is None else float(tau2_0)
    out = [tau2]
    converged = diverged = False
    for _ in range(T):
        new = se_map(cfg, tau2)
        out.append(new)
        if not math.isfinite(new) or new > 1e300:
            diverged = True
            break
        if abs(new - tau2) < SE_RTOL * max(1.0, tau2):
            tau2 = new
            converged = True
            break
        tau2 = new
    fixed_point = out[-1] if converged else None
    return SETrace(out, fixed_point, converged, diverged)


def se_fixed_point(cfg, tau2_0=None, max_iter=FIXED_POINT_MAX_ITER):
    """Straight iteration to the fixed point (the map is monotone and bounded)."""
    tau2 = _default_tau2_0(cfg) if tau2_0 is None else float(tau2_0)
    for _ in range(max_iter):
        new = se_map(cfg, tau2)
        if not math.isfinite(new) or new > 1e300:
            return math.inf
        if abs(new - tau2) < SE_RTOL * max(1.0, tau2):
            return new
        tau2 = new
    return tau2


def lasso_asymptotic_risk(eps, delta, sigma2, tol=1e-8):
    """M(eps) sigma^2 / (delta - M(eps)) when M(eps) < delta, else +infinity."""
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    M = minimax_soft(eps, tol).M
    if M >= delta:
        return math.inf
    return M * sigma2 / (delta - M)


def phase_boundary(eps_grid, tol=1e-8):
    """The exact-recovery boundary delta_c(eps) = M(eps), increasing in eps."""
    return [(float(e), minimax_soft(e, tol).M) for e in eps_grid]
