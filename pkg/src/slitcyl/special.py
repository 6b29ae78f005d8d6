"""Integer-order cylinder functions of real argument.

Values come from the AMOS routines wrapped by :mod:`scipy.special`; this module
adds the pieces the solvers rely on: order batches over ``[-M, M]``, the
parity rule for negative orders, derivatives from the three-term recurrence
and domain checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sp

MAX_ORDER = 200


class BesselDomainError(ValueError):
    """Raised for arguments outside the real, positive domain."""


def _check(n, x, allow_zero=False):
    n = np.asarray(n)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise BesselDomainError("argument must be finite")
    if allow_zero:
        if np.any(x < 0):
            raise BesselDomainError("argument must be non-negative")
    elif np.any(x <= 0):
        raise BesselDomainError("argument must be positive (logarithmic singularity at 0)")
    if np.any(np.abs(n) > MAX_ORDER):
        raise BesselDomainError(f"|order| exceeds configured maximum {MAX_ORDER}")
    if not np.all(np.equal(np.mod(n, 1), 0)):
        raise BesselDomainError("only integer orders are supported")
    return n.astype(int), x


def _parity(n):
    # (-1)^n for negative n, 1 otherwise
    return np.where((n < 0) & (np.abs(n) % 2 == 1), -1.0, 1.0)


def bessel_j(n, x):
    """J_n(x) for integer ``n`` and ``x >= 0``."""
    n, x = _check(n, x, allow_zero=True)
    out = _parity(n) * sp.jv(np.abs(n), x)
    return out[()] if out.ndim == 0 else out


def bessel_y(n, x):
    """Y_n(x) for integer ``n`` and ``x > 0``."""
    n, x = _check(n, x)
    out = _parity(n) * sp.yv(np.abs(n), x)
    return out[()] if out.ndim == 0 else out


def hankel1(n, x):
    """H^(1)_n(x) = J_n(x) + i Y_n(x), outgoing under exp(-i omega t)."""
    return bessel_j(n, x) + 1j * bessel_y(n, x)


def deriv_j(n, x):
    n = np.asarray(n)
    return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))


def deriv_y(n, x):
    n = np.asarray(n)
    return 0.5 * (bessel_y(n - 1, x) - bessel_y(n + 1, x))


def deriv_h1(n, x):
    n = np.asarray(n)
    return 0.5 * (hankel1(n - 1, x) - hankel1(n + 1, x))


@dataclass(frozen=True)
class CylinderTable:
    """J, Y, H and their argument-derivatives for orders ``-M..M`` at one x.

    Index ``i`` of every array corresponds to order ``orders[i] = i - M``.
    """

    x: float
    orders: np.ndarray
    j: np.ndarray
    y: np.ndarray
    dj: np.ndarray
    dy: np.ndarray

    @property
    def h(self) -> np.ndarray:
        return self.j + 1j * self.y

    @property
    def dh(self) -> np.ndarray:
        return self.dj + 1j * self.dy


def cylinder_table(max_order: int, x: float, *, with_y: bool = True) -> CylinderTable:
    """Evaluate all orders ``-max_order..max_order`` at ``x`` in one batch.

    Orders ``0..max_order+1`` are computed once and mirrored with the parity
    rule; derivatives use ``f'_n = (f_{n-1} - f_{n+1}) / 2``.
    """
    if max_order < 0:
        raise ValueError("max_order must be non-negative")
    _check(max_order + 1, x, allow_zero=not with_y)
    pos = np.arange(max_order + 2)
    sign = np.where(pos % 2 == 1, -1.0, 1.0)
    jp = sp.jv(pos, x)
    # full range -M-1..M+1
    jfull = np.concatenate([(sign * jp)[:0:-1], jp])
    orders = np.arange(-max_order, max_order + 1)
    c = max_order + 1  # index of order 0 in the full arrays
    j = jfull[c - max_order:c + max_order + 1]
    dj = 0.5 * (jfull[c - max_order - 1:c + max_order] - jfull[c - max_order + 1:c + max_order + 2])
    if with_y:
        yp = sp.yv(pos, x)
        yfull = np.concatenate([(sign * yp)[:0:-1], yp])
        y = yfull[c - max_order:c + max_order + 1]
        dy = 0.5 * (yfull[c - max_order - 1:c + max_order] - yfull[c - max_order + 1:c + max_order + 2])
    else:
        y = np.full_like(j, np.nan)
        dy = np.full_like(j, np.nan)
    return CylinderTable(float(x), orders, j, y, dj, dy)


def hankel_rows(max_order: int, x) -> np.ndarray:
    """``H_n^(1)(x_i)`` for ``n = -max_order..max_order``, shape ``(len(x), 2 max_order + 1)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check(max_order, x)
    pos = np.arange(max_order + 1)
    h = sp.jv(pos[None, :], x[:, None]) + 1j * sp.yv(pos[None, :], x[:, None])
    sign = np.where(pos % 2 == 1, -1.0, 1.0)
    return np.concatenate([(sign * h)[:, :0:-1], h], axis=1)
