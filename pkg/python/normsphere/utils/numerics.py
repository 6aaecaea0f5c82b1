"""Vectorized numerical kernels: root brackets, adaptive Simpson, Richardson."""

from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import NoBracket, QuadratureFailure

FloatArray = NDArray[np.float64]


def bisect_monotone(
    above: Callable[[FloatArray], NDArray[np.bool_]],
    lo: ArrayLike,
    hi: ArrayLike,
    rel_tol: float = 0.0,
    max_iter: int = 80,
) -> FloatArray:
    """Elementwise bisection for a monotone predicate.

    ``above(x)`` must be False on ``[lo, root)`` and True on ``[root, hi]``.
    Every element stops once ``hi - lo <= rel_tol * hi`` or after
    ``max_iter`` halvings; the midpoint of the final bracket is returned.

    :param above: Vectorized predicate
    :param lo: Lower ends of the brackets
    :param hi: Upper ends of the brackets
    :param rel_tol: Relative bracket width at which an element is done
    :param max_iter: Maximum number of halvings
    :return: Bracket midpoints
    """
    lo, hi = np.broadcast_arrays(
        np.asarray(lo, dtype=np.float64), np.asarray(hi, dtype=np.float64)
    )
    active = hi - lo > rel_tol * np.abs(hi)
    for _ in range(max_iter):
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        up = above(mid)
        hi = np.where(active & up, mid, hi)
        lo = np.where(active & ~up, mid, lo)
        active &= hi - lo > rel_tol * np.abs(hi)
    return 0.5 * (lo + hi)


def illinois_roots(
    func: Callable[[FloatArray, NDArray[np.intp]], FloatArray],
    lo: ArrayLike,
    hi: ArrayLike,
    f_lo: ArrayLike,
    f_hi: ArrayLike,
    xtol: float = 1e-13,
    max_iter: int = 100,
) -> FloatArray:
    """Elementwise regula falsi with the Illinois modification.

    ``func(x, index)`` evaluates the functions numbered ``index`` at ``x``.
    Every bracket must carry values of opposite signs. An element stops once
    its iterate moves by at most ``xtol``, or lands on an exact zero.

    :param func: Vectorized functions, evaluated only on unfinished elements
    :param lo: Lower ends of the brackets
    :param hi: Upper ends of the brackets
    :param f_lo: Function values at ``lo``
    :param f_hi: Function values at ``hi``
    :param xtol: Step at which an element is done
    :param max_iter: Maximum number of evaluations per element
    :raises NoBracket: If a bracket has no sign change
    :return: The last iterates
    """
    a, b = (np.array(v, dtype=np.float64, ndmin=1) for v in (lo, hi))
    fa, fb = (np.array(v, dtype=np.float64, ndmin=1) for v in (f_lo, f_hi))
    if np.any(np.sign(fa) == np.sign(fb)):
        raise NoBracket("regula falsi needs a sign change in every bracket")
    x = 0.5 * (a + b)
    kept = np.zeros(a.shape, dtype=np.int8)
    active = np.ones(a.shape, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        new = (a[idx] * fb[idx] - b[idx] * fa[idx]) / (fb[idx] - fa[idx])
        fx = np.asarray(func(new, idx), dtype=np.float64)
        moved = np.abs(new - x[idx])
        x[idx] = new
        toward_b = np.sign(fx) == np.sign(fb[idx])
        # the end kept twice in a row has its value halved
        halve_a = toward_b & (kept[idx] == -1)
        halve_b = ~toward_b & (kept[idx] == 1)
        fa[idx] = np.where(halve_a, 0.5 * fa[idx], fa[idx])
        fb[idx] = np.where(halve_b, 0.5 * fb[idx], fb[idx])
        b[idx] = np.where(toward_b, new, b[idx])
        fb[idx] = np.where(toward_b, fx, fb[idx])
        a[idx] = np.where(toward_b, a[idx], new)
        fa[idx] = np.where(toward_b, fa[idx], fx)
        kept[idx] = np.where(toward_b, -1, 1)
        active[idx] = (fx != 0.0) & (moved > xtol) & (b[idx] - a[idx] > xtol)
    return x


def adaptive_simpson(
    func: Callable[[FloatArray, NDArray[np.int8]], FloatArray],
    a: ArrayLike,
    b: ArrayLike,
    tol: ArrayLike,
    left_side: ArrayLike = 0,
    right_side: ArrayLike = 0,
    max_depth: int = 40,
) -> FloatArray:
    """Integrate ``func`` over many intervals at once by adaptive Simpson.

    ``func(t, side)`` receives an array of nodes and a matching array of
    side flags: ``+1`` asks for the right limit, ``-1`` for the left limit
    and ``0`` for a plain evaluation. Interval ends carry ``left_side`` and
    ``right_side``; every interior node is evaluated with side ``0``.

    :param func: Vectorized integrand
    :param a: Lower limits
    :param b: Upper limits, same shape as ``a``
    :param tol: Absolute tolerance per interval
    :param left_side: Side flag used at ``a``
    :param right_side: Side flag used at ``b``
    :param max_depth: Maximum number of bisection levels
    :raises QuadratureFailure: If an interval is unresolved at ``max_depth``
    :return: Integrals, shape of ``a``
    """
    a = np.asarray(a, dtype=np.float64)
    shape = a.shape
    a = a.ravel()
    b = np.broadcast_to(np.asarray(b, dtype=np.float64), shape).ravel()
    tol = np.broadcast_to(np.asarray(tol, dtype=np.float64), shape).ravel().copy()
    n = a.size
    result = np.zeros(n)
    if n == 0:
        return result.reshape(shape)
    ls = np.broadcast_to(np.asarray(left_side, dtype=np.int8), shape).ravel()
    rs = np.broadcast_to(np.asarray(right_side, dtype=np.int8), shape).ravel()
    m = 0.5 * (a + b)
    zeros = np.zeros(n, dtype=np.int8)
    values = func(np.concatenate([a, m, b]), np.concatenate([ls, zeros, rs]))
    fa, fm, fb = values[:n], values[n : 2 * n], values[2 * n :]
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    owner = np.arange(n)

    for _ in range(max_depth):
        k = a.size
        if k == 0:
            break
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        inner = func(np.concatenate([lm, rm]), np.zeros(2 * k, dtype=np.int8))
        flm, frm = inner[:k], inner[k:]
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        # differences at roundoff level of the estimate count as converged
        floor = 8.0 * np.finfo(np.float64).eps * np.abs(left + right)
        done = np.abs(delta) <= np.maximum(15.0 * tol, floor)
        np.add.at(result, owner[done], (left + right + delta / 15.0)[done])
        keep = ~done
        if not np.any(keep):
            a = a[:0]
            break
        a, m, b = a[keep], m[keep], b[keep]
        fa, flm, fm, frm, fb = fa[keep], flm[keep], fm[keep], frm[keep], fb[keep]
        left, right, half_tol = left[keep], right[keep], 0.5 * tol[keep]
        owner = owner[keep]
        a = np.concatenate([a, m])
        b = np.concatenate([m, b])
        fa, fm, fb = (
            np.concatenate([fa, fm]),
            np.concatenate([flm, frm]),
            np.concatenate([fm, fb]),
        )
        whole = np.concatenate([left, right])
        tol = np.concatenate([half_tol, half_tol])
        owner = np.concatenate([owner, owner])

    if a.size:
        raise QuadratureFailure(
            f"{a.size} subintervals unresolved at depth {max_depth}, "
            f"first at [{a[0]!r}, {b[0]!r}]"
        )
    return result.reshape(shape)


def richardson_one_sided(
    func: Callable[[FloatArray], FloatArray],
    x: ArrayLike,
    side: int,
    h: float = 1e-5,
) -> FloatArray:
    """One-sided derivative of a vector valued function, 2*D(h/2) - D(h).

    :param func: Vectorized map from parameters to points of shape (..., 2)
    :param x: Parameters
    :param side: +1 for the right derivative, -1 for the left
    :param h: Base step
    """
    x = np.asarray(x, dtype=np.float64)
    step = float(side) * h
    f0 = func(x)
    d_full = (func(x + step) - f0) / step
    d_half = (func(x + 0.5 * step) - f0) / (0.5 * step)
    return 2.0 * d_half - d_full
