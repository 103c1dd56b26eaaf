"""Planted-clique recovery: degree heuristic, spectral method, and AMP.

All three estimators return the k vertices they believe carry the clique,
followed by the same two-stage cleanup: one round of "keep the k vertices
with most +1 neighbors in the candidate set", then a greedy repair loop
(drop the member with fewest in-set neighbors, add the best outsider) until
the set is an actual clique or 2k steps pass.

The AMP iteration runs on A = W/sqrt(n) from the all-ones vector with the
posterior-expectation denoiser for a Bernoulli(k/n) spike observed in unit
Gaussian noise,

    f_t(y) = p / (p + (1 - p) exp(-mu_t y + mu_t^2/2)),   p = k/n,

rescaled each round to unit empirical second moment, plus the Onsager
memory term b_t f_{t-1}(theta^(t-1)) with b_t = mean f_t'(theta^(t)).  In
the k/sqrt(n) -> 0 limit f_t is the exponential exp(mu_t y - const) whose
ideal signal-to-noise recursion is mu_{t+1} = kappa exp(mu_t^2/2), divergent
exactly when kappa > 1/sqrt(e); at finite n the bounded posterior form is
what actually concentrates.  mu_t is estimated from the mean of the current
iterate over its top-k coordinates, clipped to be monotone and no larger
than the deterministic schedule (which bounds the achievable growth).
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .models import PlantedCliqueInstance

EXP_CLAMP = 700.0
SE_CAP_DEFAULT = 30.0


@dataclass
class CliqueEstimate:
    S_hat: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)


@dataclass
class CliqueSETrace:
    """mu_tilde_t sequence under the sigma_t = 1 normalization; mu_tilde_1 = kappa."""

    mu_tilde: list
    diverged: bool


def _top_k(values, k):
    """Indices of the k largest values, ties broken toward smaller index; sorted."""
    order = np.lexsort((np.arange(len(values)), -np.asarray(values)))
    return np.sort(order[:k])


def _neighbor_counts(W, members):
    """+1-neighbor count inside `members` for every vertex (self excluded)."""
    cnt = (W[:, members] > 0).sum(axis=1).astype(np.int64)
    cnt[members] -= 1  # diagonal is +1 by convention
    return cnt


def _clean(W, candidate, k):
    return _top_k(_neighbor_counts(W, candidate), k)


def _greedy_repair(W, S_hat, k, max_steps):
    """Swap low-degree members for the best outsiders until S_hat is a clique."""
    S_hat = np.array(sorted(S_hat))
    for _ in range(max_steps):
        sub = W[np.ix_(S_hat, S_hat)] > 0
        if sub.all():
            break
        in_deg = sub.sum(axis=1)
        worst = S_hat[np.lexsort((S_hat, in_deg))[0]]
        rest = S_hat[S_hat != worst]
        cnt = _neighbor_counts(W, rest)
        cnt[rest] = -1
        cnt[worst] = -1
        best = int(np.lexsort((np.arange(len(cnt)), -cnt))[0])
        S_hat = np.sort(np.append(rest, best))
    return S_hat


def overlap(S_hat, S):
    """|S_hat intersect S| / |S|."""
    S = np.asarray(S)
    if S.size == 0:
        raise ValueError("reference set S is empty")
    return len(np.intersect1d(S_hat, S)) / S.size


def is_clique(inst, T):
    """True iff W_ij = +1 for every pair i != j in T (vacuous for |T| <= 1)."""
    T = np.asarray(T, dtype=int)
    if T.size <= 1:
        return True
    sub = inst.W[np.ix_(T, T)]
    return bool((sub > 0).all())


def degree_heuristic(inst):
    """The k vertices of largest degree, ties toward smaller index."""
    W = inst.W
    D = (W > 0).sum(axis=1).astype(np.int64) - 1  # diagonal +1 is not a neighbor
    S_hat = _top_k(D, inst.k)
    return CliqueEstimate(S_hat, "degree", {"degrees_top": int(D[S_hat].min())})


def spectral_clique(inst, power_tol=1e-6, max_power_iter=500):
    """Top-eigenvector method with neighbor-count cleaning.

    Power iteration on A = W/sqrt(n) (shifted by +3 I to keep the top of the
    spectrum dominant over the negative edge), stopping when the residual
    ||A v - lam v|| <= power_tol |lam|.  If the eigengap is too small to
    converge within the budget the current estimate is returned with
    ``low_confidence`` set instead of raising.
    """
    n, k = inst.n, inst.k
    A = inst.W.astype(np.float32) / np.float32(math.sqrt(n))
    shift = np.float32(3.0)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n).astype(np.float32)
    v /= np.linalg.norm(v)
    lam = 0.0
    stalled = True
    iterations = 0
    for iterations in range(1, max_power_iter + 1):
        w = A @ v + shift * v
        v = w / np.linalg.norm(w)
        Av = A @ v
        lam = float(v.astype(np.float64) @ Av.astype(np.float64))
        residual = float(np.linalg.norm(Av - np.float32(lam) * v))
        if residual <= power_tol * abs(lam):
            stalled = False
            break
    v1 = v.astype(np.float64)
    B = _top_k(np.abs(v1), k)
    S_hat = _greedy_repair(inst.W, _clean(inst.W, B, k), k, 2 * k)
    return CliqueEstimate(
        S_hat,
        "spectral",
        {
            "top_eigenvalue": lam,
            "iterations": iterations,
            "low_confidence": stalled,
            "eigenvector": v1,
        },
    )


def clique_se_trace(kappa, T, cap=SE_CAP_DEFAULT):
    """Iterate mu_{t+1} = kappa exp(mu_t^2/2) from mu_1 = kappa.

    The sequence either converges to the smaller root of
    mu = kappa exp(mu^2/2) or escapes to infinity; the split is at
    kappa = 1/sqrt(e), where mu = 1 is an exact (tangent) fixed point.
    The list stops at the first value above ``cap`` and the trace is
    flagged diverged.
    """
    if kappa <= 0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    mus = [kappa]
    diverged = kappa > cap
    while len(mus) < T and not diverged:
        m = mus[-1]
        nxt = kappa * math.exp(min(m * m / 2.0, EXP_CLAMP))
        mus.append(nxt)
        if nxt > cap:
            diverged = True
    return CliqueSETrace(mus, diverged)


def _mu_schedule(kappa, T, cap):
    """Deterministic mu_t values capped for use inside the AMP solver."""
    mus = [min(kappa, cap)]
    while len(mus) < T:
        m = mus[-1]
        mus.append(cap if m >= cap else min(kappa * math.exp(m * m / 2.0), cap))
    return mus


def amp_clique(inst, T=30, onsager=True, mu_cap=None):
    """AMP with the posterior-expectation nonlinearity, then clean + repair.

    ``onsager=False`` drops the memory term, giving the plain nonlinear
    power iteration with the identical nonlinearity schedule.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    n, k = inst.n, inst.k
    kappa = inst.kappa
    p = k / n
    if mu_cap is None:
        mu_cap = 2.0 * math.sqrt(2.0 * math.log(n))
    A = inst.W.astype(np.float32) / np.float32(math.sqrt(n))
    sched = _mu_schedule(kappa, T + 1, mu_cap)
    log_odds = math.log((1.0 - p) / p)
    theta = np.ones(n)
    u_prev = np.zeros(n)
    mu_prev = 0.0
    mu_hat = []
    saturated = False
    for t in range(T):
        if t == 0:
            u = np.ones(n)  # f_0 = 1: unit second moment, zero derivative
            bt = 0.0
        else:
            mu_emp = float(np.mean(theta[_top_k(theta, k)]))
            mu = float(np.clip(mu_emp, mu_prev, min(sched[t - 1], mu_cap)))
            mu = max(mu, 1e-3)
            if mu >= mu_cap:
                saturated = True
            mu_hat.append(mu)
            z = -mu * theta + mu * mu / 2.0 + log_odds
            clipped = np.clip(z, -EXP_CLAMP, EXP_CLAMP)
            if np.any(z != clipped):
                saturated = True
            fraw = 1.0 / (1.0 + np.exp(clipped))
            rms = math.sqrt(float(np.mean(fraw * fraw)))
            u = fraw / rms
            # f' = mu f (1 - f_raw) after the rescaling
            bt = float(np.mean(mu * fraw * (1.0 - fraw) / rms)) if onsager else 0.0
            mu_prev = mu
        Av = (A @ u.astype(np.float32)).astype(np.float64)
        theta = Av - bt * u_prev
        u_prev = u
    raw = _top_k(theta, k)
    S_hat = _greedy_repair(inst.W, _clean(inst.W, raw, k), k, 2 * k)
    return CliqueEstimate(
        S_hat,
        "amp",
        {"mu_hat": mu_hat, "saturated": saturated, "raw_candidate": raw},
    )


def save_edge_list(inst, path):
    """Write the +1 pairs (i < j, 0-indexed) one per line."""
    ii, jj = np.nonzero(np.triu(inst.W, 1) > 0)
    with open(path, "w") as fh:
        for i, j in zip(ii, jj):
            fh.write(f"{i} {j}\n")


def load_edge_list(path, k, n=None):
    """Read an undirected 0-indexed edge list; absent pairs mean W_ij = -1.

    ``n`` defaults to max index + 1.  The hidden set is unknown for loaded
    instances (S is None); ``k`` must be supplied by the caller.
    """
    pairs = []
    top = -1
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"malformed edge line: {line!r}")
        i, j = int(parts[0]), int(parts[1])
        if i < 0 or j < 0:
            raise ValueError(f"vertex indices must be >= 0, got {line!r}")
        top = max(top, i, j)
        if i != j:
            pairs.append((i, j))
    if n is None:
        n = top + 1
    if n < 1 or top >= n:
        raise ValueError(f"edge indices exceed n={n}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    W = -np.ones((n, n), dtype=np.int8)
    np.fill_diagonal(W, 1)
    for i, j in pairs:
        W[i, j] = 1
        W[j, i] = 1
    return PlantedCliqueInstance(W, None, n, k)
