"""Cyclic tridiagonal solves.

A periodic three-point stencil gives a tridiagonal matrix with two extra
corner entries.  The corners are removed with a rank-one Sherman-Morrison
update, which leaves two ordinary tridiagonal solves (done together in a
single LAPACK ``?gtsv`` call with two right-hand sides).
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import lapack

from .errors import DimensionError, NumericError


def _gtsv(dl, d, du, b):
    if np.iscomplexobj(dl) or np.iscomplexobj(d) or np.iscomplexobj(du) or np.iscomplexobj(b):
        fn, dtype = lapack.zgtsv, complex
    else:
        fn, dtype = lapack.dgtsv, float
    _, _, _, x, info = fn(
        np.asarray(dl, dtype), np.asarray(d, dtype), np.asarray(du, dtype), np.asarray(b, dtype),
        overwrite_dl=True, overwrite_d=True, overwrite_du=True, overwrite_b=True,
    )
    if info != 0:
        raise NumericError(f"tridiagonal solve failed (LAPACK info={info})")
    return x


def solve_cyclic_tridiagonal(lower, diag, upper, rhs):
    """Solve ``A x = rhs`` for a cyclic tridiagonal ``A``.

    Parameters
    ----------
    lower, diag, upper : array_like, length n
        ``lower[i] = A[i, i-1]`` and ``upper[i] = A[i, i+1]`` with indices
        taken modulo n, so ``lower[0]`` and ``upper[n-1]`` are the corners.
    rhs : array_like, shape (n,) or (n, k)

    Returns
    -------
    ndarray with the shape of ``rhs``.
    """
    diag = np.asarray(diag)
    n = diag.shape[0]
    lower = np.asarray(lower)
    upper = np.asarray(upper)
    rhs = np.asarray(rhs)
    if lower.shape != (n,) or upper.shape != (n,) or rhs.shape[0] != n:
        raise DimensionError("cyclic tridiagonal bands and rhs must share length n")
    if n < 3:
        raise DimensionError("cyclic tridiagonal system needs n >= 3")

    alpha = upper[-1]   # A[n-1, 0]
    beta = lower[0]     # A[0, n-1]
    # gamma only has to keep the modified diagonal away from zero
    gamma = -diag[0] if diag[0] != 0 else 1.0

    d_mod = diag.astype(np.result_type(diag, lower, upper, rhs, float), copy=True)
    d_mod[0] -= gamma
    d_mod[-1] -= alpha * beta / gamma

    u = np.zeros(n, dtype=d_mod.dtype)
    u[0] = gamma
    u[-1] = alpha

    single = rhs.ndim == 1
    b = rhs.reshape(n, -1)
    stacked = np.empty((n, b.shape[1] + 1), dtype=np.result_type(d_mod, b))
    stacked[:, :-1] = b
    stacked[:, -1] = u
    sol = _gtsv(lower[1:].copy(), d_mod, upper[:-1].copy(), stacked)
    y, z = sol[:, :-1], sol[:, -1]

    # v = (1, 0, ..., 0, beta/gamma)
    denom = 1.0 + z[0] + beta * z[-1] / gamma
    if denom == 0:
        raise NumericError("Sherman-Morrison denominator vanished; matrix is singular")
    factor = (y[0] + beta * y[-1] / gamma) / denom
    x = y - np.outer(z, factor)
    return x[:, 0] if single else x


def cyclic_tridiagonal_dense(lower, diag, upper):
    """Dense matrix for the banded description used by :func:`solve_cyclic_tridiagonal`."""
    diag = np.asarray(diag)
    n = diag.shape[0]
    A = np.zeros((n, n), dtype=np.result_type(lower, diag, upper))
    i = np.arange(n)
    A[i, i] = diag
    A[i, (i - 1) % n] += lower
    A[i, (i + 1) % n] += upper
    return A
