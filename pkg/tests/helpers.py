"""Shared independent oracles for the test suite.

These deliberately avoid the library's optimized code paths: brute-force
grids, exhaustive enumeration and direct formula evaluation.
"""

import itertools

import numpy as np

from onebit_mimo import constellation as con
from onebit_mimo import precoder


def random_instance(rng, n_tx=None, mk=None):
    """Random channel and input vector with n_tx >= mk (both <= 2 by default)."""
    if n_tx is None:
        n_tx = int(rng.integers(1, 3))
    if mk is None:
        mk = int(rng.integers(1, n_tx + 1))
    h = (rng.standard_normal((mk, n_tx)) + 1j * rng.standard_normal((mk, n_tx))) / np.sqrt(2)
    s = con.gray_decode(rng.integers(0, 4, mk))
    return h, s


def grid_search_max(h, s, points=41, chunk=200_000):
    """Brute-force maximum of the margin product over a box grid.

    Restricted to the all-margins-positive region, which is the domain the
    solver certifies.  Returns (best_product, best_min_margin); best_product
    is None when no grid point has all margins positive.
    """
    a = precoder.margin_operator(h, s)[0]
    dim = 2 * h.shape[1]
    axis = np.linspace(-con.BOX_HALF_WIDTH, con.BOX_HALF_WIDTH, points)
    best_prod = None
    best_t = -np.inf
    total = points**dim
    idx = np.arange(total)
    for start in range(0, total, chunk):
        flat = idx[start : start + chunk]
        coords = np.empty((dim, len(flat)))
        rem = flat
        for d in range(dim):
            coords[d] = axis[rem % points]
            rem = rem // points
        margins = a @ coords
        tmin = margins.min(axis=0)
        best_t = max(best_t, float(tmin.max()))
        feasible = tmin > 0
        if feasible.any():
            prod = np.prod(margins[:, feasible], axis=0)
            cand = float(prod.max())
            best_prod = cand if best_prod is None else max(best_prod, cand)
    return best_prod, best_t


def direct_cost(h, x, s):
    """Margin product straight from the determinant-of-diagonal definition."""
    w = np.diag((np.asarray(h) @ np.asarray(x)) * np.conj(np.asarray(s)))
    return float(np.linalg.det(np.real(w @ w)))


def numeric_gradient(f, u, step=1e-6):
    """Central finite differences of a scalar function of a real vector."""
    g = np.zeros_like(u)
    for i in range(len(u)):
        up = u.copy()
        dn = u.copy()
        up[i] += step
        dn[i] -= step
        g[i] = (f(up) - f(dn)) / (2 * step)
    return g


def best_subset_exhaustive(costs, size):
    """All size-subsets of indices, maximizing the cost sum; ties by lexicographic order."""
    best = None
    best_sum = -np.inf
    for combo in itertools.combinations(range(len(costs)), size):
        total = float(np.sum(np.asarray(costs)[list(combo)]))
        if total > best_sum + 1e-12:
            best, best_sum = combo, total
    return np.array(best), best_sum
