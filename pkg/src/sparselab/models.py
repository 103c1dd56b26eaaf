"""Seeded generators for every random object the experiments draw.

All functions are pure: the output is a deterministic function of the
arguments, including the seed.  Randomness comes from ``numpy``'s PCG64
generator (``np.random.default_rng``), so replicate ``r`` of an experiment
simply uses ``base_seed + r``.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class DesignMatrix:
    """Dense n x p design with a provenance tag.

    ``kind`` is one of ``gaussian_iid``, ``orthogonal``, ``fourier``,
    ``custom``.  ``kind == "orthogonal"`` promises X^T X = n I (n = p here).
    """

    entries: np.ndarray
    n: int
    p: int
    kind: str

    def __post_init__(self):
        if self.entries.shape != (self.n, self.p):
            raise ValueError(
                f"entries shape {self.entries.shape} != ({self.n}, {self.p})"
            )


@dataclass
class SparseSignal:
    """A p-vector with known support; eps = s0 / p."""

    values: np.ndarray
    support: np.ndarray
    s0: int
    eps: float


@dataclass
class ObservationVector:
    y: np.ndarray
    sigma: float
    seed: int


@dataclass
class PlantedCliqueInstance:
    """Symmetric +-1 matrix with a clique forced on the hidden index set S.

    Entries are stored as int8 (they are all +-1); the diagonal is +1 by
    convention.  ``S`` is None for instances loaded from an edge list, where
    the ground truth is unknown.
    """

    W: np.ndarray
    S: np.ndarray | None
    n: int
    k: int
    kappa: float = field(default=0.0)

    def __post_init__(self):
        if self.kappa == 0.0:
            self.kappa = self.k / np.sqrt(self.n)


def gaussian_design(n, p, seed):
    """i.i.d. N(0,1) design matrix."""
    if n < 1 or p < 1:
        raise ValueError(f"dimensions must be >= 1, got n={n}, p={p}")
    rng = np.random.default_rng(seed)
    return DesignMatrix(rng.standard_normal((n, p)), n, p, "gaussian_iid")


def orthogonal_design(n, seed):
    """X = sqrt(n) Q with Q Haar-uniform orthogonal (QR with sign-fixed diagonal)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    # fix the QR gauge so Q is Haar distributed
    Q = Q * np.sign(np.diag(R))
    return DesignMatrix(np.sqrt(n) * Q, n, n, "orthogonal")


def signed_permutation_design(n, seed):
    """X = sqrt(n) P D with P a random permutation and D random +-1 signs.

    Orthogonal by construction (X^T X = n I exactly), O(n^2) memory but O(n)
    generation work, so usable at n = 10^4 where a Haar QR is not.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    signs = rng.choice([-1.0, 1.0], size=n)
    X = np.zeros((n, n))
    X[perm, np.arange(n)] = np.sqrt(n) * signs
    return DesignMatrix(X, n, n, "orthogonal")


def sparse_signal(p, s0, amplitude, placement_seed):
    """s0 uniformly placed coordinates at +-amplitude (Rademacher signs), rest zero."""
    if not 0 <= s0 <= p:
        raise ValueError(f"need 0 <= s0 <= p, got s0={s0}, p={p}")
    rng = np.random.default_rng(placement_seed)
    values = np.zeros(p)
    support = np.sort(rng.choice(p, size=s0, replace=False))
    values[support] = amplitude * rng.choice([-1.0, 1.0], size=s0)
    return SparseSignal(values, support, s0, s0 / p)


def linear_observe(X, theta, sigma, seed):
    """y = X theta + sigma z with z i.i.d. standard normal; sigma=0 is exact."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    values = theta.values if isinstance(theta, SparseSignal) else np.asarray(theta)
    if values.shape != (X.p,):
        raise ValueError(f"theta length {values.shape} does not match p={X.p}")
    y = X.entries @ values
    if sigma > 0:
        rng = np.random.default_rng(seed)
        y = y + sigma * rng.standard_normal(X.n)
    return ObservationVector(y, sigma, seed)


def planted_clique_instance(n, k, seed):
    """Erdos-Renyi(1/2) sign matrix with a +1 clique planted on a random k-subset.

    Off-clique entries for i < j are fair +-1, symmetrized; the diagonal is
    +1 everywhere so that E{W} restricted to S is exactly the rank-one
    indicator outer product.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    S = np.sort(rng.choice(n, size=k, replace=False))
    R = (rng.integers(0, 2, size=(n, n), dtype=np.int8) * 2 - 1).astype(np.int8)
    U = np.triu(R, 1)
    W = U + U.T
    np.fill_diagonal(W, 1)
    W[np.ix_(S, S)] = 1
    return PlantedCliqueInstance(W, S, n, k)
