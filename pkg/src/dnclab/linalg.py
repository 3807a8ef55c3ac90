"""Rank decisions and small shared linear-algebra helpers.

All rank decisions in the laboratory go through :func:`rank` so the
singular-value threshold (relative to the largest singular value) is set
in exactly one place.
"""

from __future__ import annotations

import numpy as np

# Relative singular-value threshold for rank decisions; configurable.
RANK_RTOL = 1e-8


def rank(a: np.ndarray, rtol: float | None = None) -> int:
    """Numerical rank via SVD with a relative threshold."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > (rtol or RANK_RTOL) * s[0]))


def nullspace(a: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``a``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return np.eye(a.shape[1])
    u, s, vh = np.linalg.svd(a)
    tol = (rtol or RANK_RTOL) * (s[0] if s.size else 1.0)
    r = int(np.sum(s > tol))
    return vh[r:].T


def orthonormalize(vectors: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the column span of ``vectors``."""
    v = np.atleast_2d(np.asarray(vectors, dtype=float))
    if v.size == 0:
        return v.reshape(v.shape[0], 0)
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    tol = (rtol or RANK_RTOL) * (s[0] if s.size else 1.0)
    return u[:, s > tol]


def complement_within(inner: np.ndarray, outer: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(inner) inside
    span(outer).  Both arguments are column bases in a common ambient space."""
    q_out = orthonormalize(outer)
    if inner.size == 0:
        return q_out
    q_in = orthonormalize(inner)
    # project outer basis off span(inner), then re-orthonormalize
    proj = q_out - q_in @ (q_in.T @ q_out)
    return orthonormalize(proj)


def min_norm_lstsq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solution of ``a x = b``."""
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    return x


def loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log(y) against log(x); y entries clipped away
    from zero so exact-zero residual sequences fit harmlessly."""
    x = np.asarray(x, dtype=float)
    y = np.maximum(np.asarray(y, dtype=float), 1e-300)
    lx, ly = np.log(x), np.log(y)
    lx = lx - lx.mean()
    return float((lx @ (ly - ly.mean())) / (lx @ lx))


def pad_to(v: np.ndarray, n: int) -> np.ndarray:
    """Zero-pad a 1-d vector to length ``n`` (or truncate exact zeros)."""
    v = np.asarray(v, dtype=float).ravel()
    if v.size >= n:
        if np.any(v[n:] != 0.0):
            raise ValueError("cannot truncate nonzero coordinates")
        return v[:n].copy()
    out = np.zeros(n)
    out[: v.size] = v
    return out


def trim(v: np.ndarray) -> np.ndarray:
    """Drop the trailing zero coordinates of a 1-d vector."""
    v = np.asarray(v, dtype=float).ravel()
    nz = np.nonzero(v)[0]
    return v[: nz[-1] + 1].copy() if nz.size else np.zeros(0)
