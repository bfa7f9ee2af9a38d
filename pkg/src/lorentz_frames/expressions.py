"""Symbolic scalar/vector fields of one variable with dual-precision evaluation.

Curve components, tangent fields and Bishop coefficient functions are all
held as sympy expressions. That gives exact derivatives of any order, fast
vectorized float evaluation through lambdify, and arbitrary-precision
evaluation through mpmath for one-sided limits at flat junctions, where
float64 under- and overflows (exp(-1/t) terms) would otherwise destroy the
samples.
"""

from __future__ import annotations

import mpmath
import numpy as np
import sympy as sp

#: Functions allowed inside curve-spec expression strings.
ALLOWED_FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos", "tan",
                     "sinh", "cosh", "tanh", "Abs", "sign", "Piecewise")

_ALLOWED = {name: getattr(sp, name) for name in ALLOWED_FUNCTIONS}
_ALLOWED.update({"pi": sp.pi, "E": sp.E})

#: Working precision (decimal digits) for mpmath limit evaluation.
MP_DPS = 60


def parse_expression(text, var="u"):
    """Parse an expression string in one variable against the whitelist."""
    sym = sp.Symbol(var, real=True)
    local = dict(_ALLOWED)
    local[var] = sym
    try:
        expr = sp.sympify(text, locals=local)
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise ValueError(f"cannot parse expression {text!r}: {exc}") from None
    extra = expr.free_symbols - {sym}
    if extra:
        raise ValueError(f"unknown symbols {sorted(map(str, extra))} in {text!r}")
    return expr, sym


def parse_condition(text, var="u"):
    """Parse a branch condition such as 'u < 0' or '0 < u' ('True' selects the rest)."""
    sym = sp.Symbol(var, real=True)
    local = dict(_ALLOWED)
    local[var] = sym
    cond = sp.sympify(text, locals=local)
    if isinstance(cond, bool):
        cond = sp.true if cond else sp.false
    if cond not in (sp.true, sp.false) and (cond.free_symbols - {sym}):
        raise ValueError(f"unknown symbols in condition {text!r}")
    return cond, sym


def condition_breakpoints(cond):
    """Numeric constants appearing in a relational condition (junction candidates)."""
    pts = set()
    if not isinstance(cond, sp.Basic):
        return pts
    for rel in cond.atoms(sp.core.relational.Relational):
        for side in (rel.lhs, rel.rhs):
            if side.is_number:
                pts.add(float(side))
    return pts


class SymbolicVector:
    """A vector of sympy expressions in one variable, with cached derivatives."""

    def __init__(self, exprs, sym):
        self.exprs = [sp.sympify(e) for e in exprs]
        self.sym = sym
        self._diffs = {0: self.exprs}
        self._np = {}
        self._mp = {}

    @property
    def dim(self):
        return len(self.exprs)

    def derivative(self, order):
        while order not in self._diffs:
            n = max(self._diffs)
            self._diffs[n + 1] = [sp.diff(e, self.sym) for e in self._diffs[n]]
        return self._diffs[order]

    def _np_fns(self, order):
        if order not in self._np:
            self._np[order] = [sp.lambdify(self.sym, e, modules="numpy")
                               for e in self.derivative(order)]
        return self._np[order]

    def _mp_fns(self, order):
        if order not in self._mp:
            self._mp[order] = [sp.lambdify(self.sym, e, modules="mpmath")
                               for e in self.derivative(order)]
        return self._mp[order]

    def eval(self, x, order=0):
        """Float evaluation; x may be a scalar or an array. Returns shape x.shape + (dim,)."""
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            cols = [np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
                    for f in self._np_fns(order)]
        return np.stack(cols, axis=-1)

    def eval_mp(self, x, order=0):
        """Arbitrary-precision evaluation at a scalar point; returns a list of mpf."""
        with mpmath.workdps(MP_DPS):
            xm = mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x
            return [f(xm) for f in self._mp_fns(order)]


class PiecewiseVector:
    """Branchwise SymbolicVector with explicit junctions.

    Each branch is (condition, SymbolicVector); the value at a point comes
    from the first branch whose condition holds. A branch whose condition is
    an equality supplies the stated value at the junction itself. One-sided
    evaluation near a junction always uses the branch formula of that side.
    """

    def __init__(self, branches, sym, junctions=None):
        self.branches = branches
        self.sym = sym
        if junctions is None:
            pts = set()
            for cond, _ in branches:
                pts |= condition_breakpoints(cond)
            junctions = sorted(pts)
        self.junctions = list(junctions)
        self._cond_np = [sp.lambdify(sym, cond, modules="numpy") for cond, _ in branches]

    @property
    def dim(self):
        return self.branches[0][1].dim

    def branch_at(self, x, side=0):
        """Branch index at x; side -1/+1 nudges off a junction before selecting."""
        if side:
            eps = 1e-9 * max(1.0, abs(x))
            x = x + side * eps
        for k, (cond, _) in enumerate(self.branches):
            if cond == sp.true or bool(cond.subs(self.sym, x)):
                return k
        raise ValueError(f"no branch covers x = {x}")

    def eval(self, x, order=0, side=0):
        x_arr = np.asarray(x, dtype=float)
        scalar = x_arr.ndim == 0
        pts = np.atleast_1d(x_arr)
        out = np.empty(pts.shape + (self.dim,))
        with np.errstate(all="ignore"):
            done = np.zeros(pts.shape, dtype=bool)
            for k, (cond, vec) in enumerate(self.branches):
                if cond == sp.true:
                    mask = ~done
                else:
                    sel = pts + (side * 1e-9 * np.maximum(1.0, np.abs(pts)) if side else 0.0)
                    mask = np.asarray(self._cond_np[k](sel), dtype=bool) & ~done
                if np.any(mask):
                    out[mask] = vec.eval(pts[mask], order)
                    done |= mask
        if not np.all(done):  # pragma: no cover - specs always carry a default branch
            raise ValueError("piecewise branches do not cover all requested points")
        return out[0] if scalar else out

    def eval_mp(self, x, order=0, side=0):
        k = self.branch_at(float(x), side)
        return self.branches[k][1].eval_mp(x, order)


def vector_from_strings(components, var="u"):
    """Build a SymbolicVector from expression strings."""
    exprs = []
    sym = None
    for text in components:
        e, sym = parse_expression(text, var)
        exprs.append(e)
    return SymbolicVector(exprs, sym)


def piecewise_from_strings(branches, var="u"):
    """Build a PiecewiseVector from [{'condition': str, 'components': [str, ...]}, ...]."""
    parsed = []
    sym = sp.Symbol(var, real=True)
    for branch in branches:
        cond, _ = parse_condition(branch["condition"], var)
        vec = vector_from_strings(branch["components"], var)
        parsed.append((cond, vec))
    return PiecewiseVector(parsed, sym)
