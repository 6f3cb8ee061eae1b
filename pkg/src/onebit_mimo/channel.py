"""Correlated Rayleigh channel and complex Gaussian noise with deterministic seeding.

The downlink channel has ``n_users * n_rx`` rows (receive dimensions, user
blocks stacked) and ``n_tx`` columns.  Receive antennas of one user share the
correlation factor rho; different users are uncorrelated, so the normalized
row covariance is ``I_M kron ((1-rho) I_K + rho 1_K)``.
"""

from __future__ import annotations

import numpy as np


def derived_rng(seed, *key):
    """Independent Generator for (seed, key); same arguments give the same stream."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def receive_correlation(n_users, n_rx, rho):
    """Receive-side correlation matrix I_M kron ((1-rho) I_K + rho 1_K).

    Args:
        n_users: number of users M.
        n_rx: antennas per user K.
        rho: correlation factor between one user's antennas, in [0, 1].

    Returns:
        (M*K, M*K) symmetric PSD matrix with unit diagonal.
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"correlation factor must be in [0, 1], got {rho}")
    if n_users < 1 or n_rx < 1:
        raise ValueError("n_users and n_rx must be >= 1")
    block = (1.0 - rho) * np.eye(n_rx) + rho * np.ones((n_rx, n_rx))
    return np.kron(np.eye(n_users), block)


def matrix_sqrt_psd(mat, tol=1e-12):
    """Symmetric PSD square root via eigendecomposition (defined at rho = 1)."""
    w, v = np.linalg.eigh(mat)
    w = np.where(w > tol, w, 0.0)
    return (v * np.sqrt(w)) @ v.T


def draw_channel(n_users, n_rx, n_tx, rho, rng, count=None):
    """Draw correlated Rayleigh channel matrices.

    H = R^(1/2) Hw with Hw i.i.d. CN(0, 1), R the receive correlation.
    Deterministic given the rng seed.

    Args:
        n_users, n_rx, n_tx: dimensions (n_tx >= n_users*n_rx required).
        rho: receive correlation factor.
        rng: seed or numpy Generator.
        count: if given, draw that many matrices at once.

    Returns:
        (MK, n_tx) complex matrix, or (count, MK, n_tx) when count is set.
    """
    mk = n_users * n_rx
    if n_tx < mk:
        raise ValueError(f"need n_tx >= n_users*n_rx, got n_tx={n_tx}, MK={mk}")
    rng = np.random.default_rng(rng)
    shape = (mk, n_tx) if count is None else (count, mk, n_tx)
    hw = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    root = matrix_sqrt_psd(receive_correlation(n_users, n_rx, rho))
    return root @ hw if count is None else np.einsum("ij,cjn->cin", root, hw)


def draw_noise(dim, count, rng):
    """i.i.d. CN(0, 1) noise matrix of shape (dim, count); unit variance per entry."""
    if dim < 1 or count < 1:
        raise ValueError("noise dimensions must be >= 1")
    rng = np.random.default_rng(rng)
    shape = (dim, count)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
