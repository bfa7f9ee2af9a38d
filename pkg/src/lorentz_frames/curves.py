"""Time-like curves: specs, proper-time reparametrization, derivative oracles.

A CurveSpec describes a curve in one of four source forms:

* ``analytic``     four component expressions gamma(u) on a domain,
* ``piecewise``    branchwise component expressions with junctions,
* ``tangent``      a unit time-like tangent field T(s) given directly in
                   proper time (the position comes from quadrature),
* ``bishop-data``  coefficient functions b1, b2, b3; the curve itself is
                   produced by ``construct.curve_from_bishop_data``.

``reparametrize`` turns a spec into a ProperTimeCurve: a uniform grid in
proper time together with exact symbolic tangent derivatives.  For curves
that need re-labeling the s -> u inversion is tabulated with per-interval
Gauss quadrature and polished by Newton steps, so grid labels agree with
true proper time to near machine precision.  Curves already parameterized
by proper time (tangent fields, synthesized Bishop data) keep their
original parameter values, junctions included.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np
import sympy as sp
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from . import expressions as ex
from .errors import NotTimeLike, OutOfDomain
from .minkowski import ETA_DIAG, inner
from .numdiff import derivative_of_callable

#: Default proper-time grid step.
DEFAULT_STEP = 1e-3

#: Geometric offset exponents for one-sided junction limits (t = 2^-k).
LIMIT_EXPONENTS = tuple(range(10, 41))

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(5)


@dataclass
class CurveSpec:
    """Declarative curve description prior to reparametrization."""

    name: str
    kind: str                      # analytic | piecewise | tangent | bishop-data
    domain: tuple
    field: object = None           # gamma(u) for analytic/piecewise, T(s) for tangent
    base_point: object = None      # tangent kind: gamma at domain start
    bishop_data: dict = None       # bishop-data kind: {'b': field, 'initial': 4x4, 'origin': vec}

    def __post_init__(self):
        a, b = self.domain
        if not b > a:
            raise ValueError("domain must be a nondegenerate interval")
        self.domain = (float(a), float(b))


@dataclass
class RegularityReport:
    is_timelike_everywhere: bool
    min_speed_sq: float            # min over the scan grid of -<gamma', gamma'>
    is_2_regular: bool
    min_tangent_derivative_norm: float
    offending: list = field(default_factory=list)


def _as_piecewise(vec):
    if isinstance(vec, ex.PiecewiseVector):
        return vec
    return ex.PiecewiseVector([(sp.true, vec)], vec.sym)


class _SymbolicTangentChain:
    """T and its first three proper-time derivatives as branchwise expressions.

    For curves parameterized by a raw parameter u the tower is built from
    gamma via v = sqrt(-<gamma', gamma'>) and d/ds = (1/v) d/du; for curves
    already in proper time it is a plain derivative tower.  ``v2`` holds
    -<gamma', gamma'> (respectively -<T, T>, which should be one).
    """

    def __init__(self, branches, sym, junctions, reparametrized):
        self.sym = sym
        chains = [[] for _ in range(4)]
        v2_branches = []
        for cond, vec in branches:
            if reparametrized:
                gu = vec.derivative(1)
                v2 = gu[0] ** 2 - gu[1] ** 2 - gu[2] ** 2 - gu[3] ** 2
                v = sp.sqrt(v2)
                level = [g / v for g in gu]
                step = lambda exprs: [sp.diff(e, sym) / v for e in exprs]  # noqa: E731
            else:
                v2 = -sum(ETA_DIAG[i] * vec.exprs[i] ** 2 for i in range(4))
                level = list(vec.exprs)
                step = lambda exprs: [sp.diff(e, sym) for e in exprs]  # noqa: E731
            for k in range(4):
                chains[k].append((cond, ex.SymbolicVector(level, sym)))
                if k < 3:
                    level = step(level)
            v2_branches.append((cond, ex.SymbolicVector([v2], sym)))
        self.levels = [ex.PiecewiseVector(chains[k], sym, junctions) for k in range(4)]
        self.v2 = ex.PiecewiseVector(v2_branches, sym, junctions)

    def eval(self, x, order, side=0):
        return [np.asarray(self.levels[k].eval(x, 0, side=side), dtype=float)
                for k in range(order + 1)]

    def eval_mp(self, x, order, side=0):
        return [self.levels[k].eval_mp(x, 0, side=side) for k in range(order + 1)]


class PrecisionLost(Exception):
    """Raised by limit integrands when cancellation exhausts the precision."""


def mp_one_sided_limit(fn, center, side, exponents=LIMIT_EXPONENTS):
    """Richardson-extrapolated one-sided limit of a vector-valued callable.

    Samples fn at center + side * 2^-k in mpmath arithmetic, which survives
    the exp(-1/t) style under- and overflow that kills float64 sampling.
    The callable may raise PrecisionLost to stop the sampling early (needed
    when a projection cancels O(1) terms and the residue falls below the
    working precision).  Returns (estimate, spread) where spread is the
    change produced by the last extrapolation level.
    """
    samples = []
    with mpmath.workdps(ex.MP_DPS):
        c = mpmath.mpf(center)
        for k in exponents:
            x = c + side * mpmath.mpf(2) ** (-k)
            try:
                val = fn(x)
            except PrecisionLost:
                break
            samples.append(np.array([float(v) for v in val]))
    if not samples:
        raise PrecisionLost("no trustworthy samples near the junction")
    if len(samples) == 1:
        return samples[0], float("inf")
    table = np.stack(samples[-8:])
    prev_last = table[-1]
    spread = float("inf")
    depth = min(4, len(table) - 1)
    for j in range(1, depth + 1):
        table = (2.0 ** j * table[1:] - table[:-1]) / (2.0 ** j - 1.0)
        spread = float(np.max(np.abs(table[-1] - prev_last)))
        prev_last = table[-1]
    return prev_last, spread


class _ReparamEvaluator:
    """Analytic or piecewise curve re-labeled by proper time starting at 0."""

    def __init__(self, spec, step):
        pw = _as_piecewise(spec.field)
        a, b = spec.domain
        junctions = sorted(j for j in pw.junctions if a < j < b)
        self.chain = _SymbolicTangentChain(pw.branches, pw.sym, junctions, reparametrized=True)
        self.gamma = ex.PiecewiseVector(pw.branches, pw.sym, junctions)
        self.raw_junctions = junctions
        self.name = spec.name

        breaks = [a] + junctions + [b]
        pieces = [np.array([a])]
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            n = max(32, int(np.ceil((hi - lo) / step)))
            pieces.append(np.linspace(lo, hi, n + 1)[1:])
        self.u_table = np.concatenate(pieces)

        self.speed_sq_table = self._speed_sq(self.u_table)
        bad = np.where(self.speed_sq_table <= 0.0)[0]
        if bad.size:
            raise NotTimeLike(
                f"curve {spec.name!r}: -<gamma', gamma'> = "
                f"{self.speed_sq_table[bad[0]]:.3e} at u = {self.u_table[bad[0]]!r}"
            )

        s = np.zeros_like(self.u_table)
        seg = self._gauss_lengths(self.u_table[:-1], self.u_table[1:])
        s[1:] = np.cumsum(seg)
        self.s_table = s
        self._u_interp = PchipInterpolator(s, self.u_table)
        self._s_interp = PchipInterpolator(self.u_table, s)
        self.origin = 0.0
        self.total = float(s[-1])
        self.junctions_s = [float(self._s_interp(j)) for j in junctions]

    def _speed_sq(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.empty(len(u))
        hit = np.zeros(len(u), dtype=bool)
        for j in self.raw_junctions:
            hit |= np.abs(u - j) <= 1e-12 * max(1.0, abs(j))
        if np.any(~hit):
            out[~hit] = self.chain.v2.eval(u[~hit], 0)[..., 0]
        for i in np.where(hit)[0]:
            # nudge the evaluation point off the junction; branch expressions
            # may be singular exactly there even when their limits are fine
            delta = 1e-9 * max(1.0, abs(u[i]))
            left = float(self.chain.v2.eval(u[i] - delta, 0)[0])
            right = float(self.chain.v2.eval(u[i] + delta, 0)[0])
            out[i] = min(left, right)
        return out

    def _gauss_lengths(self, lo, hi):
        """5-point Gauss speed integrals over [lo_i, hi_i] (no junction inside)."""
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        x = mid[:, None] + half[:, None] * _GAUSS_X[None, :]
        v2 = self.chain.v2.eval(x.ravel(), 0)[..., 0].reshape(x.shape)
        if np.any(v2 <= 0.0):
            i = int(np.argwhere(v2 <= 0.0)[0][0])
            raise NotTimeLike(f"-<gamma', gamma'> <= 0 near u = {mid[i]!r}")
        return half * np.sum(_GAUSS_W[None, :] * np.sqrt(v2), axis=1)

    def u_of_s(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        u = np.asarray(self._u_interp(np.clip(s_arr, 0.0, self.total)), dtype=float)
        idx = np.clip(np.searchsorted(self.s_table, s_arr, side="right") - 1,
                      0, len(self.s_table) - 1)
        base_u = self.u_table[idx]
        base_s = self.s_table[idx]
        for _ in range(2):
            s_here = base_s + self._gauss_lengths(base_u, u)
            v = np.sqrt(np.maximum(self.chain.v2.eval(u, 0)[..., 0], 1e-300))
            u = u - (s_here - s_arr) / v
        u = np.clip(u, self.u_table[0], self.u_table[-1])
        return u if np.ndim(s) else float(u[0])

    def point(self, s):
        return self.gamma.eval(self.u_of_s(s), 0)

    def _near_junction(self, u):
        for j in self.raw_junctions:
            if abs(u - j) <= 1e-11 * max(1.0, abs(j)):
                return j
        return None

    def tangent_derivs(self, s, order, side=0):
        u = self.u_of_s(float(s))
        j = self._near_junction(u)
        if j is not None and side == 0:
            return self._junction_derivs(j, order)
        return self.chain.eval(u if j is None else j, order, side=side)

    def tangent_derivs_grid(self, s_arr, order):
        u = self.u_of_s(np.asarray(s_arr, dtype=float))
        out = [self.chain.levels[k].eval(u, 0) for k in range(order + 1)]
        for j in self.raw_junctions:
            for i in np.where(np.abs(u - j) <= 1e-11 * max(1.0, abs(j)))[0]:
                vals = self._junction_derivs(j, order)
                for k in range(order + 1):
                    out[k][i] = vals[k]
        return out

    def _junction_derivs(self, u_star, order):
        vals = []
        for k in range(order + 1):
            lev = self.chain.levels[k]
            left, _ = mp_one_sided_limit(lambda x: lev.eval_mp(x, 0, side=-1), u_star, -1)
            right, _ = mp_one_sided_limit(lambda x: lev.eval_mp(x, 0, side=+1), u_star, +1)
            vals.append(0.5 * (left + right))
        return vals

    def one_sided_chain_mp(self, side):
        """Callable x -> [T, T', ..., T'''](x) in mpmath for limit work."""
        return lambda x, order=1: self.chain.eval_mp(x, order, side=side)


class _TangentFieldEvaluator:
    """Curve given by its unit time-like tangent field in proper time."""

    def __init__(self, spec, step):
        pw = _as_piecewise(spec.field)
        a, b = spec.domain
        junctions = sorted(j for j in pw.junctions if a < j < b)
        self.chain = _SymbolicTangentChain(pw.branches, pw.sym, junctions, reparametrized=False)
        self.raw_junctions = junctions
        self.junctions_s = list(junctions)
        self.origin = float(a)
        self.total = float(b - a)
        self.speed_sq_table = None
        self.name = spec.name
        base = np.zeros(4) if spec.base_point is None else np.asarray(spec.base_point, float)

        n = max(64, int(np.ceil((b - a) / max(step, 1e-4))))
        nodes = np.linspace(a, b, n + 1)
        v2 = self._v2_samples(nodes)
        worst = float(np.max(np.abs(v2 - 1.0)))
        if worst > 1e-8:
            raise NotTimeLike(
                f"tangent field of {spec.name!r} is not unit time-like "
                f"(worst |<T,T>+1| = {worst:.2e})")

        gamma = np.empty((n + 1, 4))
        gamma[0] = base
        for i in range(n):
            gamma[i + 1] = gamma[i] + self._segment_integral(nodes[i], nodes[i + 1])
        self._gamma_interp = [PchipInterpolator(nodes, gamma[:, c]) for c in range(4)]

    def _v2_samples(self, nodes):
        out = np.empty(len(nodes))
        hit = np.zeros(len(nodes), dtype=bool)
        for j in self.raw_junctions:
            hit |= np.abs(nodes - j) <= 1e-12 * max(1.0, abs(j))
        if np.any(~hit):
            out[~hit] = self.chain.v2.eval(nodes[~hit], 0)[..., 0]
        out[hit] = 1.0  # junction rows carry the stated center value, unit by construction
        return out

    def _segment_integral(self, lo, hi):
        cuts = [lo] + [j for j in self.raw_junctions if lo < j < hi] + [hi]
        total = np.zeros(4)
        for l, h in zip(cuts[:-1], cuts[1:]):
            mid, half = 0.5 * (l + h), 0.5 * (h - l)
            x = mid + half * _GAUSS_X
            vals = self.chain.levels[0].eval(x, 0)
            total += half * np.tensordot(_GAUSS_W, vals, axes=(0, 0))
        return total

    def u_of_s(self, s):
        return np.asarray(s, dtype=float)

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return np.stack([f(s) for f in self._gamma_interp], axis=-1)

    def _near_junction(self, u):
        for j in self.raw_junctions:
            if abs(u - j) <= 1e-11 * max(1.0, abs(j)):
                return j
        return None

    def tangent_derivs(self, s, order, side=0):
        u = float(s)
        j = self._near_junction(u)
        if j is not None and side == 0:
            return self._junction_derivs(j, order)
        return self.chain.eval(u if j is None else j, order, side=side)

    def tangent_derivs_grid(self, s_arr, order):
        u = np.asarray(s_arr, dtype=float)
        out = [self.chain.levels[k].eval(u, 0) for k in range(order + 1)]
        for j in self.raw_junctions:
            for i in np.where(np.abs(u - j) <= 1e-11 * max(1.0, abs(j)))[0]:
                vals = self._junction_derivs(j, order)
                for k in range(order + 1):
                    out[k][i] = vals[k]
        return out

    def _junction_derivs(self, u_star, order):
        vals = []
        for k in range(order + 1):
            lev = self.chain.levels[k]
            left, _ = mp_one_sided_limit(lambda x: lev.eval_mp(x, 0, side=-1), u_star, -1)
            right, _ = mp_one_sided_limit(lambda x: lev.eval_mp(x, 0, side=+1), u_star, +1)
            vals.append(0.5 * (left + right))
        return vals

    def one_sided_chain_mp(self, side):
        return lambda x, order=1: self.chain.eval_mp(x, order, side=side)


class _BishopDataEvaluator:
    """Grid-sampled curve synthesized from Bishop coefficient data.

    Tangent derivatives at nodes follow from the structure equations
    T' = sum b_i B_i and B_i' = b_i T, so only the coefficient functions
    are ever differentiated.  Off-node queries interpolate node data.
    """

    def __init__(self, grid, gamma_nodes, frames, b_field, name):
        self.grid = np.asarray(grid, dtype=float)
        self.gamma_nodes = np.asarray(gamma_nodes, dtype=float)
        self.frames = np.asarray(frames, dtype=float)
        self.b_field = _as_piecewise(b_field)
        self.name = name
        self.origin = float(self.grid[0])
        self.total = float(self.grid[-1] - self.grid[0])
        self.speed_sq_table = None
        a, b = self.grid[0], self.grid[-1]
        self.raw_junctions = sorted(j for j in self.b_field.junctions if a < j < b)
        self.junctions_s = list(self.raw_junctions)
        self._gamma_interp = [PchipInterpolator(self.grid, self.gamma_nodes[:, c])
                              for c in range(4)]
        flat = self.frames.reshape(len(self.grid), 16)
        self._frame_interp = [PchipInterpolator(self.grid, flat[:, c]) for c in range(16)]

    def u_of_s(self, s):
        return np.asarray(s, dtype=float)

    def frame_at(self, s):
        return np.array([float(f(s)) for f in self._frame_interp]).reshape(4, 4)

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return np.stack([f(s) for f in self._gamma_interp], axis=-1)

    def _b(self, s, order=0, side=0):
        return np.asarray(self.b_field.eval(s, order, side=side), dtype=float)

    def _derivs_from_frame(self, z, s, order, side=0):
        t, normals = z[0], z[1:]
        out = [t]
        if order >= 1:
            b = self._b(s, 0, side)
            out.append(b @ normals)
        if order >= 2:
            b1 = self._b(s, 1, side)
            out.append(b1 @ normals + float(b @ b) * t)
        if order >= 3:
            b2 = self._b(s, 2, side)
            out.append(b2 @ normals + 3.0 * float(b @ b1) * t + float(b @ b) * (b @ normals))
        return out

    def tangent_derivs(self, s, order, side=0):
        s = float(s)
        return self._derivs_from_frame(self.frame_at(s), s, order, side)

    def tangent_derivs_grid(self, s_arr, order):
        s_arr = np.asarray(s_arr, dtype=float)
        if (len(s_arr) == len(self.grid)
                and np.allclose(s_arr, self.grid, rtol=0.0, atol=1e-12)):
            frames = self.frames
        else:
            frames = np.stack([self.frame_at(s) for s in s_arr])
        t = frames[:, 0, :]
        normals = frames[:, 1:, :]
        out = [t]
        if order >= 1:
            b = np.atleast_2d(self.b_field.eval(s_arr, 0))
            out.append(np.einsum("ni,nic->nc", b, normals))
        if order >= 2:
            b1 = np.atleast_2d(self.b_field.eval(s_arr, 1))
            bb = np.sum(b * b, axis=1)
            out.append(np.einsum("ni,nic->nc", b1, normals) + bb[:, None] * t)
        if order >= 3:
            b2 = np.atleast_2d(self.b_field.eval(s_arr, 2))
            bb1 = np.sum(b * b1, axis=1)
            out.append(np.einsum("ni,nic->nc", b2, normals)
                       + 3.0 * bb1[:, None] * t + bb[:, None] * out[1])
        return out

    def one_sided_chain_mp(self, side):
        """mp chain for limits: frame frozen at the junction, b in mpmath."""
        def chain(x, order=1):
            x_f = float(x)
            z = self.frame_at(x_f)
            b = self.b_field.eval_mp(x, 0, side=side)
            t = [mpmath.mpf(v) for v in z[0]]
            out = [t]
            if order >= 1:
                out.append([sum(b[i] * mpmath.mpf(z[1 + i][c]) for i in range(3))
                            for c in range(4)])
            if order >= 2:
                b1 = self.b_field.eval_mp(x, 1, side=side)
                bb = sum(bi * bi for bi in b)
                out.append([sum(b1[i] * mpmath.mpf(z[1 + i][c]) for i in range(3)) + bb * t[c]
                            for c in range(4)])
            return out
        return chain


class ProperTimeCurve:
    """A time-like curve carried on a uniform proper-time grid."""

    def __init__(self, spec, evaluator, step):
        self.spec = spec
        self.evaluator = evaluator
        self.step = float(step)
        s0 = evaluator.origin
        n = int(np.floor(evaluator.total / step + 1e-9))
        self.grid = s0 + step * np.arange(n + 1)
        self.junctions_s = list(evaluator.junctions_s)

    @property
    def name(self):
        return self.spec.name

    @property
    def domain_s(self):
        s0 = self.evaluator.origin
        return (s0, s0 + float(self.evaluator.total))

    def _check_s(self, s):
        lo, hi = self.domain_s
        tol = 1e-9 * max(1.0, abs(hi), abs(lo))
        s = np.asarray(s)
        if np.any(s < lo - tol) or np.any(s > hi + tol):
            raise OutOfDomain(f"s = {s} outside [{lo:.6g}, {hi:.6g}] for curve {self.name!r}")

    def point(self, s):
        self._check_s(s)
        return self.evaluator.point(s)

    def tangent(self, s):
        self._check_s(s)
        arr = np.asarray(s, dtype=float)
        if arr.ndim == 0:
            return self.evaluator.tangent_derivs(float(arr), 0)[0]
        return self.evaluator.tangent_derivs_grid(arr, 0)[0]

    def tangent_derivatives(self, s, order=1, method="auto"):
        """[T, T', ..., T^(order)] at proper time s; order at most 3.

        ``method='fd'`` forces the finite-difference fallback (4th-order
        stencils over exact tangent samples) even when the symbolic oracle
        is available.
        """
        if order > 3:
            raise ValueError("derivative oracle is limited to order 3")
        self._check_s(s)
        if method == "fd":
            return self._fd_derivs(float(s), order)
        return self.evaluator.tangent_derivs(float(s), order)

    def tangent_derivatives_grid(self, order=1):
        """Vectorized [T, T', ...] sampled on the whole grid."""
        return self.evaluator.tangent_derivs_grid(self.grid, order)

    def tangent_derivatives_at(self, s_arr, order=1):
        self._check_s(s_arr)
        return self.evaluator.tangent_derivs_grid(np.asarray(s_arr, dtype=float), order)

    def _fd_derivs(self, s, order, h=1e-2):
        lo, hi = self.domain_s
        h = min(h, (hi - lo) / 8.0)
        out = [self.tangent(s)]
        for m in range(1, order + 1):
            out.append(derivative_of_callable(self.tangent, s, m, h, lo=lo, hi=hi))
        return out

    def one_sided_tangent_derivatives(self, s, side, order=1):
        """Branchwise evaluation pinned to one side of a junction."""
        self._check_s(s)
        return self.evaluator.tangent_derivs(float(s), order, side=side)

    def raw_parameter(self, s):
        """Parameter of the underlying spec at proper time s."""
        return self.evaluator.u_of_s(s)


def load_curve_spec(source):
    """Build a CurveSpec from a JSON file path, JSON string, or dict."""
    if isinstance(source, (str, Path)):
        p = Path(source)
        text = p.read_text() if p.exists() else str(source)
        data = json.loads(text)
    else:
        data = dict(source)
    name = data.get("name", "curve")
    kind = data["kind"]
    domain = tuple(data["domain"])
    if kind == "analytic":
        vec = ex.vector_from_strings(data["components"], "u")
        if vec.dim != 4:
            raise ValueError("analytic curves need 4 components")
        return CurveSpec(name=name, kind="analytic", domain=domain, field=vec)
    if kind == "piecewise":
        pw = ex.piecewise_from_strings(data["branches"], "u")
        if pw.dim != 4:
            raise ValueError("piecewise curves need 4 components per branch")
        return CurveSpec(name=name, kind="piecewise", domain=domain, field=pw)
    if kind == "bishop-data":
        if "branches" in data:
            b = ex.piecewise_from_strings(data["branches"], "u")
        else:
            b = ex.vector_from_strings(data["components"], "u")
        if b.dim != 3:
            raise ValueError("bishop-data needs 3 coefficient components")
        initial = np.asarray(data.get("initial", np.eye(4)), dtype=float)
        origin = np.asarray(data.get("origin", np.zeros(4)), dtype=float)
        return CurveSpec(name=name, kind="bishop-data", domain=domain,
                         bishop_data={"b": b, "initial": initial, "origin": origin})
    raise ValueError(f"unknown curve kind {kind!r}")


def tangent_field_spec(name, field, domain, base_point=None):
    """Spec for a curve given by its unit tangent field in proper time."""
    return CurveSpec(name=name, kind="tangent", domain=tuple(domain),
                     field=field, base_point=base_point)


def proper_time(spec, u0, u):
    """Proper time from u0 to u by adaptive quadrature.

    Raises NotTimeLike when the squared speed is nonpositive at any
    quadrature node.
    """
    if isinstance(spec, ProperTimeCurve):
        return float(u - u0)
    pw = _as_piecewise(spec.field)
    chain = _SymbolicTangentChain(pw.branches, pw.sym, sorted(pw.junctions),
                                  reparametrized=(spec.kind != "tangent"))

    def speed(t):
        # -<gamma', gamma'> for raw-parameter curves, -<T, T> for tangent fields
        v2 = float(chain.v2.eval(t, 0)[0])
        if v2 <= 0.0:
            raise NotTimeLike(f"squared speed {v2:.3e} at parameter {t!r}")
        return float(np.sqrt(v2))

    sign, lo, hi = (1.0, u0, u) if u >= u0 else (-1.0, u, u0)
    cuts = [lo] + [j for j in sorted(pw.junctions) if lo < j < hi] + [hi]
    total = 0.0
    for l, h in zip(cuts[:-1], cuts[1:]):
        val, _ = quad(speed, l, h, limit=200)
        total += val
    return sign * total


def reparametrize(spec, step=DEFAULT_STEP):
    """Reparametrize a curve spec by proper time.

    Accepts an existing ProperTimeCurve and returns an equivalent curve on a
    fresh grid (idempotent up to the grid).
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if isinstance(spec, ProperTimeCurve):
        return ProperTimeCurve(spec.spec, spec.evaluator, step)
    if spec.kind in ("analytic", "piecewise"):
        return ProperTimeCurve(spec, _ReparamEvaluator(spec, step), step)
    if spec.kind == "tangent":
        return ProperTimeCurve(spec, _TangentFieldEvaluator(spec, step), step)
    if spec.kind == "bishop-data":
        raise ValueError("bishop-data specs are realized by construct.curve_from_bishop_data")
    raise ValueError(f"unknown curve kind {spec.kind!r}")


def tangent_and_derivatives(ptc, s, order=1):
    """T(s), T'(s), ... up to the requested order (at most 3)."""
    return ptc.tangent_derivatives(s, order)


def regularity_report(ptc, zero_tol=1e-8):
    """Grid scan for time-likeness and 2-regularity."""
    v2_table = getattr(ptc.evaluator, "speed_sq_table", None)
    if v2_table is not None:
        min_speed_sq = float(np.min(v2_table))
    else:
        t = ptc.tangent_derivatives_grid(0)[0]
        min_speed_sq = float(np.min(-inner(t, t)))
    tprime = ptc.tangent_derivatives_grid(1)[1]
    norms = np.sqrt(np.abs(inner(tprime, tprime)))
    max_norm = float(np.max(norms)) if len(norms) else 0.0
    floor = zero_tol * max(1.0, max_norm)
    offending = [float(s) for s in ptc.grid[norms <= floor]][:16]
    return RegularityReport(
        is_timelike_everywhere=bool(min_speed_sq > 0.0),
        min_speed_sq=min_speed_sq,
        is_2_regular=bool(np.min(norms) > floor),
        min_tangent_derivative_norm=float(np.min(norms)),
        offending=offending,
    )
