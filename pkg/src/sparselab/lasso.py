"""The LASSO objective and two solvers.

ISTA is plain majorize-minimize descent with step 1/L and threshold
lambda/L; AMP is the same thresholding iteration plus the Onsager memory
term b_t r^(t-1) with b_t = ||theta^(t)||_0 / n, which keeps the effective
observation theta^(t) + X^T r^(t)/n Gaussian around the truth.  The AMP
threshold follows the effective noise: gamma_t = kappa * tau_hat_t with
tau_hat_t^2 = ||r^(t)||^2 / n estimated from the residual.

Internally AMP runs on the column-normalized pair (X/sqrt(n), y/sqrt(n)) so
every tracked quantity is O(1); fixed points satisfy the original-scale
LASSO stationarity conditions at the induced penalty
lambda = gamma_inf (1 - ||theta_hat||_0 / n).
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericFailureError
from .models import DesignMatrix
from .shrinkage import soft_threshold

POWER_MAX_ITER = 10_000
THIN_EVERY = 10
THIN_AFTER = 50
DIVERGENCE_FACTOR = 1e6
RIP_BUDGET = 1_000_000


@dataclass
class LassoProblem:
    X: DesignMatrix
    y: np.ndarray
    lam: float

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        if self.y.shape != (self.X.n,):
            raise ValueError(f"y length {self.y.shape} does not match n={self.X.n}")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValueError(f"lambda must be finite and >= 0, got {self.lam}")


@dataclass
class IterateTrace:
    """Record of a solver run.

    ``iterates`` is thinned (every iterate up to t=50, then every 10th);
    ``costs`` holds F(theta^(t)) for every t.  ``tau_hat`` (AMP only) is the
    per-iteration effective noise estimate; ``induced_lambda`` (AMP only) is
    the penalty whose LASSO stationarity conditions the fixed point satisfies.
    """

    iterates: list
    costs: list
    final: np.ndarray
    iterations: int
    converged: bool
    tau_hat: list | None = None
    induced_lambda: float | None = None
    diverged: bool = False


@dataclass
class FixedAlpha:
    """Threshold policy gamma_t = kappa * tau_hat_t."""

    kappa: float


@dataclass
class FixedLambdaCalibrated:
    """Run the fixed-alpha policy and report the induced lambda at the fixed point."""

    kappa: float


def lasso_cost(prob, theta):
    """F(theta) = ||y - X theta||^2 / (2n) + lambda ||theta||_1."""
    theta = np.asarray(theta)
    r = prob.y - prob.X.entries @ theta
    return float(r @ r / (2.0 * prob.X.n) + prob.lam * np.abs(theta).sum())


def lipschitz_bound(X, tol=1e-6):
    """Upper bound on lambda_max(X^T X / n) by power iteration.

    Stops when the relative Rayleigh-quotient change drops below tol and
    returns (1 + tol) times the estimate.
    """
    A = X.entries if isinstance(X, DesignMatrix) else np.asarray(X)
    n, p = A.shape
    if not np.any(A):
        raise ValueError("design matrix is identically zero")
    rng = np.random.default_rng(0)
    v = rng.standard_normal(p)
    v /= np.linalg.norm(v)
    for _ in range(POWER_MAX_ITER):
        w = A.T @ (A @ v) / n
        nw = np.linalg.norm(w)
        if nw == 0.0:
            rng2 = np.random.default_rng(1)
            v = rng2.standard_normal(p)
            v /= np.linalg.norm(v)
            continue
        v = w / nw
        Cv = A.T @ (A @ v) / n
        rho = float(v @ Cv)
        # residual-based stop: past it, lambda_max - rho << tol * rho
        if np.linalg.norm(Cv - rho * v) <= tol * abs(rho):
            return (1.0 + tol) * rho
    raise NumericFailureError(
        f"power iteration did not converge to rtol={tol} in {POWER_MAX_ITER} iterations"
    )


def _thin_append(iterates, t, theta):
    if t <= THIN_AFTER or t % THIN_EVERY == 0:
        iterates.append(theta.copy())


def ista(prob, max_iter=1000, tol=1e-8, L=None):
    """Iterative soft thresholding from theta^(0) = 0.

    theta^(t+1) = eta(theta^(t) + X^T (y - X theta^(t)) / (nL); lambda / L),
    stopping when the relative cost decrease falls below tol.  Costs are
    non-increasing by the majorize-minimize construction.
    """
    X, y, lam = prob.X.entries, prob.y, prob.lam
    n, p = prob.X.n, prob.X.p
    if L is None:
        L = lipschitz_bound(prob.X)
    theta = np.zeros(p)
    costs = [lasso_cost(prob, theta)]
    iterates = [theta.copy()]
    converged = False
    t = 0
    for t in range(1, max_iter + 1):
        grad = X.T @ (y - X @ theta) / n
        theta = soft_threshold(theta + grad / L, lam / L)
        _thin_append(iterates, t, theta)
        costs.append(lasso_cost(prob, theta))
        if costs[-2] - costs[-1] < tol * costs[-2] or costs[-2] == 0.0:
            converged = True
            break
    return IterateTrace(iterates, costs, theta, t, converged)


def amp_lasso(prob, policy, max_iter=200, tol=1e-6, onsager=True):
    """Approximate message passing for the LASSO on a Gaussian design.

    Two-line recursion from theta^(0) = 0, r^(-1) = 0:

        r^(t)       = y - X theta^(t) + b_t r^(t-1),   b_t = ||theta^(t)||_0 / n
        theta^(t+1) = eta(theta^(t) + X^T r^(t) / n; kappa * tau_hat_t)

    run in the column-normalized scale.  Stops on iterate stabilization
    ||theta^(t+1) - theta^(t)|| / sqrt(p) < tol.  A runaway effective noise
    (tau_hat > 1e6 tau_hat_0) sets the diverged flag instead of raising.

    ``onsager=False`` drops the memory term (plain iterative thresholding
    with the same threshold policy), for head-to-head comparisons.
    """
    if not isinstance(policy, (FixedAlpha, FixedLambdaCalibrated)):
        raise ValueError("policy must be FixedAlpha or FixedLambdaCalibrated")
    kappa = policy.kappa
    if kappa <= 0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    n, p = prob.X.n, prob.X.p
    A = prob.X.entries / np.sqrt(n)
    b = prob.y / np.sqrt(n)
    theta = np.zeros(p)
    r_old = np.zeros(n)
    tau_hat = []
    costs = [lasso_cost(prob, theta)]
    iterates = [theta.copy()]
    converged = diverged = False
    gamma = 0.0
    t = 0
    for t in range(1, max_iter + 1):
        bt = (np.count_nonzero(theta) / n) if onsager else 0.0
        r = b - A @ theta + bt * r_old
        tau = float(np.linalg.norm(r) / np.sqrt(n))
        tau_hat.append(tau)
        if tau > DIVERGENCE_FACTOR * tau_hat[0]:
            diverged = True
            break
        gamma = kappa * tau
        theta_new = soft_threshold(theta + A.T @ r, gamma)
        step = float(np.linalg.norm(theta_new - theta) / np.sqrt(p))
        theta = theta_new
        r_old = r
        _thin_append(iterates, t, theta)
        costs.append(lasso_cost(prob, theta))
        if step < tol:
            converged = True
            break
    induced = gamma * (1.0 - np.count_nonzero(theta) / n)
    return IterateTrace(
        iterates, costs, theta, t, converged,
        tau_hat=tau_hat, induced_lambda=float(induced), diverged=diverged,
    )


def kkt_residual(prob, theta):
    """Max coordinate distance of X^T (y - X theta)/n from the LASSO subgradient set."""
    theta = np.asarray(theta)
    g = prob.X.entries.T @ (prob.y - prob.X.entries @ theta) / prob.X.n
    on = theta != 0
    res_on = np.abs(g[on] - prob.lam * np.sign(theta[on]))
    res_off = np.maximum(np.abs(g[~on]) - prob.lam, 0.0)
    worst = 0.0
    if res_on.size:
        worst = max(worst, float(res_on.max()))
    if res_off.size:
        worst = max(worst, float(res_off.max()))
    return worst


def rip_constant_bruteforce(X, k):
    """Exact restricted-isometry constant of X/sqrt(n) over all k-sparse supports.

    delta = max over size-k supports T of
    max(lambda_max(X_T^T X_T / n) - 1, 1 - lambda_min(X_T^T X_T / n)).
    Enforces C(p, k) <= 1e6.
    """
    A = X.entries if isinstance(X, DesignMatrix) else np.asarray(X)
    n, p = A.shape
    if k > p:
        raise ValueError(f"k={k} exceeds p={p}")
    count = math.comb(p, k)
    if count > RIP_BUDGET:
        raise ValueError(
            f"C({p},{k}) = {count} supports exceeds the brute-force budget {RIP_BUDGET}"
        )
    delta = 0.0
    for T in itertools.combinations(range(p), k):
        G = A[:, T].T @ A[:, T] / n
        eigs = np.linalg.eigvalsh(G)
        delta = max(delta, float(eigs[-1] - 1.0), float(1.0 - eigs[0]))
    return delta
