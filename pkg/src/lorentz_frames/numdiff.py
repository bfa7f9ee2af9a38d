"""Finite-difference stencils for node samples and callables."""

import numpy as np

# One-sided 4th-order first-derivative stencils for the first two nodes;
# the last two nodes use the same weights reversed with flipped sign.
_EDGE_FIRST = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])
_EDGE_SECOND = np.array([-3.0, -10.0, 18.0, -6.0, 1.0])


def grid_derivative(values, h):
    """Differentiate uniformly spaced samples along axis 0 at 4th order.

    Interior nodes use the 5-point central stencil, the two nodes at each
    boundary use one-sided 5-point stencils.  Paths with fewer than five
    nodes fall back to 2nd-order (or forward-difference) stencils.
    """
    v = np.asarray(values, dtype=float)
    n = v.shape[0]
    if n < 2:
        raise ValueError("grid_derivative needs at least 2 nodes")
    if n < 5:
        out = np.empty_like(v)
        if n == 2:
            out[0] = out[1] = (v[1] - v[0]) / h
        else:
            out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
            out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
            out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
        return out
    out = np.empty_like(v)
    out[2:n - 2] = (v[0:n - 4] - 8.0 * v[1:n - 3] + 8.0 * v[3:n - 1] - v[4:n]) / (12.0 * h)
    out[0] = np.tensordot(_EDGE_FIRST, v[:5], axes=(0, 0)) / (12.0 * h)
    out[1] = np.tensordot(_EDGE_SECOND, v[:5], axes=(0, 0)) / (12.0 * h)
    out[-1] = -np.tensordot(_EDGE_FIRST, v[-5:][::-1], axes=(0, 0)) / (12.0 * h)
    out[-2] = -np.tensordot(_EDGE_SECOND, v[-5:][::-1], axes=(0, 0)) / (12.0 * h)
    return out


def fd_weights(offsets, order):
    """Fornberg weights for the derivative of given order at 0 from nodes at `offsets`."""
    x = np.asarray(offsets, dtype=float)
    n = len(x)
    if order >= n:
        raise ValueError("stencil too short for requested derivative order")
    c = np.zeros((n, order + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0]
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def derivative_of_callable(f, x, order, h, lo=None, hi=None):
    """Derivative of a callable at x by a centered (shifted near bounds) stencil.

    Uses 5 points for orders 1 and 2 and 7 points for order 3, which keeps
    every returned derivative 4th-order accurate.
    """
    npts = 5 if order <= 2 else 7
    half = npts // 2
    shift = 0
    if lo is not None:
        shift = max(shift, int(np.ceil((lo - (x - half * h)) / h - 1e-12)))
    if hi is not None:
        shift = min(shift, int(np.floor((hi - (x + half * h)) / h + 1e-12)))
    offsets = (np.arange(npts) - half + shift) * h
    w = fd_weights(offsets, order)
    samples = [np.asarray(f(x + d), dtype=float) for d in offsets]
    return np.tensordot(w, np.stack(samples), axes=(0, 0))
