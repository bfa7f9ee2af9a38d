"""Frame constructions and transformations along time-like curves.

Everything here integrates structure equations with classical fixed-step
RK4 on the curve's proper-time grid.  Orthonormality is not enforced during
integration (so drift stays observable); an optional post-step projection
re-orthonormalizes against the indefinite metric.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .curves import ProperTimeCurve, CurveSpec, _BishopDataEvaluator, regularity_report
from .errors import (BadInitialFrame, BadNormalField, ClearanceTooSmall,
                     Not2Regular, NotFrenetRegular, NotOrthogonal, NotTypeB)
from .expressions import SymbolicVector, PiecewiseVector
from .frames import (FrameLabel, FramePath, classify_path, extract_coefficients,
                     transformation_between)
from .minkowski import (ETA_DIAG, frame_defect, inner, lorentz_cross,
                        lorentz_gram_schmidt)
from .numdiff import grid_derivative

#: Default minimal projective clearance (degrees) for the rotation selection.
CLEARANCE_DEG = 0.5

#: Candidate count of the spherical scan grid, about one point per square degree.
SCAN_CANDIDATES = 40000

_INITIAL_TOL = 1e-10


@dataclass
class PrincipalNormalField:
    """Unit space-like field D1 with T' = d1 * D1.

    Values and the derivative are callables of proper time so that RK4
    stages can sample between grid nodes; ``sampler``, when set, evaluates
    whole parameter arrays at once.
    """

    d1: object
    direction: object
    direction_prime: object
    sampler: object = None

    def samples(self, s_arr):
        s_arr = np.asarray(s_arr, dtype=float)
        if self.sampler is not None:
            return self.sampler(s_arr)
        d = np.array([self.d1(s) for s in s_arr])
        v = np.stack([self.direction(s) for s in s_arr])
        vp = np.stack([self.direction_prime(s) for s in s_arr])
        return d, v, vp


@dataclass
class RotationSelection:
    """Constant rotation carrying the scan direction xi to the second axis."""

    q: np.ndarray          # 3x3 orthogonal, second row equals xi
    xi: np.ndarray
    clearance_deg: float   # minimal projective distance from xi to the sampled curve


@dataclass
class TypeCTransformResult:
    """Output bundle of the D -> C pipeline; ``path`` is the type-C frame path."""

    path: FramePath
    rotated_bishop: FramePath
    rotation: RotationSelection
    theta: np.ndarray
    y: np.ndarray             # D1 coordinates in the input Bishop normal basis
    y_rotated: np.ndarray
    coefficients: np.ndarray  # nodewise (c1, c2, c3)


@dataclass
class FrenetResult:
    path: FramePath
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray


def _check_initial(initial, signature, what="initial frame"):
    initial = np.asarray(initial, dtype=float)
    defect = frame_defect(initial, signature)
    if defect > _INITIAL_TOL:
        raise BadInitialFrame(f"{what} violates orthonormality by {defect:.3e}")
    return initial


def _require_uniform(grid):
    steps = np.diff(grid)
    h = steps[0]
    if np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)):
        raise ValueError("construction requires a uniform grid")
    return float(h)


def _relatively_parallel(grid, base_nodes, base_mids, basep_nodes, basep_mids,
                         rows0, sign, projector=None):
    """RK4 for row' = sign * <base', row> * base along the grid.

    base and base' must be sampled at the nodes and at the midpoints.  The
    inner product is the indefinite one, evaluated as row . (eta * base').
    ``projector(k, rows) -> rows``, when given, re-orthonormalizes the state
    after the step onto node k.
    """
    h = _require_uniform(grid)
    n = len(grid)
    rows = np.asarray(rows0, dtype=float).copy()
    out = np.empty((n,) + rows.shape)
    out[0] = rows
    eta_bp_nodes = basep_nodes * ETA_DIAG
    eta_bp_mids = basep_mids * ETA_DIAG

    def rhs(rows, base, eta_bp):
        return sign * np.outer(rows @ eta_bp, base)

    for k in range(n - 1):
        b0, bp0 = base_nodes[k], eta_bp_nodes[k]
        bm, bpm = base_mids[k], eta_bp_mids[k]
        b1, bp1 = base_nodes[k + 1], eta_bp_nodes[k + 1]
        k1 = rhs(rows, b0, bp0)
        k2 = rhs(rows + 0.5 * h * k1, bm, bpm)
        k3 = rhs(rows + 0.5 * h * k2, bm, bpm)
        k4 = rhs(rows + h * k3, b1, bp1)
        rows = rows + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if projector is not None:
            rows = projector(k + 1, rows)
        out[k + 1] = rows
    return out


def construct_bishop(ptc, initial, variant="timelike", direction=None, project=False):
    """Integrate the relatively-parallel equations for a type-B frame.

    For the time-like variant the normal rows satisfy B_i' = <T', B_i> T
    with T the curve tangent.  The space-like variant flips the sign of the
    equation; its leading row is a space-like direction field supplied via
    ``direction`` (a callable s -> (vector, derivative)) and its second row
    is time-like.
    """
    if variant not in ("timelike", "spacelike"):
        raise ValueError("variant must be 'timelike' or 'spacelike'")
    grid = ptc.grid
    h = _require_uniform(grid)
    mids = grid[:-1] + 0.5 * h
    if variant == "timelike":
        signature = ETA_DIAG
        sign = +1.0
        t_nodes, tp_nodes = ptc.tangent_derivatives_at(grid, 1)
        t_mids, tp_mids = ptc.tangent_derivatives_at(mids, 1)
    else:
        if direction is None:
            raise ValueError("the spacelike variant needs a direction field")
        signature = np.array([1.0, -1.0, 1.0, 1.0])
        sign = -1.0
        pairs_nodes = [direction(s) for s in grid]
        pairs_mids = [direction(s) for s in mids]
        t_nodes = np.stack([p[0] for p in pairs_nodes])
        tp_nodes = np.stack([p[1] for p in pairs_nodes])
        t_mids = np.stack([p[0] for p in pairs_mids])
        tp_mids = np.stack([p[1] for p in pairs_mids])

    initial = _check_initial(initial, signature)
    gap = float(np.max(np.abs(initial[0] - t_nodes[0])))
    if gap > 1e-8:
        raise BadInitialFrame(f"row 0 of the initial frame is off the base field by {gap:.3e}")

    projector = None
    if project:
        time_index = 0 if variant == "timelike" else 1

        def projector(k, rows):
            return lorentz_gram_schmidt([t_nodes[k], *rows], time_index)[1:]

    normals = _relatively_parallel(grid, t_nodes, t_mids, tp_nodes, tp_mids,
                                   initial[1:], sign, projector=projector)
    frames = np.concatenate([t_nodes[:, None, :], normals], axis=1)
    return FramePath(grid=grid.copy(), frames=frames,
                     curve=ptc if variant == "timelike" else None)


def default_initial_frame(ptc, s=None):
    """Orthonormal start frame: the tangent completed from coordinate axes."""
    s0 = float(ptc.grid[0] if s is None else s)
    t0 = ptc.tangent(s0)
    basis = np.eye(4)
    for drop in range(4):
        cand = [t0] + [basis[i] for i in range(4) if i != drop]
        if abs(np.linalg.det(np.stack(cand))) > 1e-8:
            return lorentz_gram_schmidt(cand, 0)
    raise BadInitialFrame("could not complete the tangent to a basis")  # pragma: no cover


def principal_normal_from_2regular(ptc):
    """D1 = T'/|T'| and d1 = |T'| for a 2-regular curve."""
    report = regularity_report(ptc)
    if not report.is_2_regular:
        raise Not2Regular(
            f"|T'| reaches {report.min_tangent_derivative_norm:.3e} on the grid "
            f"(offending s: {report.offending[:4]})")

    def d1(s):
        t1 = ptc.tangent_derivatives(s, 1)[1]
        return float(np.sqrt(inner(t1, t1)))

    def direction(s):
        t1 = ptc.tangent_derivatives(s, 1)[1]
        return t1 / np.sqrt(inner(t1, t1))

    def direction_prime(s):
        _, t1, t2 = ptc.tangent_derivatives(s, 2)
        f1 = np.sqrt(inner(t1, t1))
        return t2 / f1 - t1 * (inner(t2, t1) / f1 ** 3)

    def sampler(s_arr):
        _, t1, t2 = ptc.tangent_derivatives_at(s_arr, 2)
        f1 = np.sqrt(np.abs(inner(t1, t1)))
        v = t1 / f1[:, None]
        vp = t2 / f1[:, None] - t1 * (inner(t2, t1) / f1 ** 3)[:, None]
        return f1, v, vp

    return PrincipalNormalField(d1=d1, direction=direction,
                                direction_prime=direction_prime, sampler=sampler)


def _validate_normal_field(ptc, normal, tol=1e-6):
    grid = ptc.grid
    t_nodes, tp_nodes = ptc.tangent_derivatives_at(grid, 1)
    d, v, _ = normal.samples(grid)
    unit = np.max(np.abs(inner(v, v) - 1.0))
    ortho = np.max(np.abs(inner(v, t_nodes)))
    resid = np.max(np.abs(tp_nodes - d[:, None] * v))
    worst = max(unit, ortho, resid)
    if worst > tol:
        raise BadNormalField(
            f"principal normal data violates its relations by {worst:.3e} "
            f"(unit {unit:.1e}, orthogonality {ortho:.1e}, T'-residual {resid:.1e})")


def construct_type_d(ptc, normal, initial_d2=None, initial_d3=None, project=False):
    """Frame {T, D1, D2, D3} with D2, D3 relatively parallel along D1.

    Integrates D_k' = -<D1', D_k> D1, the space-like Bishop equations of the
    auxiliary curve tangent to D1, written directly along the base curve.
    """
    _validate_normal_field(ptc, normal)
    grid = ptc.grid
    h = _require_uniform(grid)
    mids = grid[:-1] + 0.5 * h
    t_nodes = ptc.tangent_derivatives_at(grid, 0)[0]
    _, v_nodes, vp_nodes = normal.samples(grid)
    _, v_mids, vp_mids = normal.samples(mids)

    if initial_d2 is None or initial_d3 is None:
        z0 = _complete_type_d_start(t_nodes[0], v_nodes[0])
        initial_d2 = z0[2] if initial_d2 is None else initial_d2
        initial_d3 = z0[3] if initial_d3 is None else initial_d3
    start = np.stack([t_nodes[0], v_nodes[0],
                      np.asarray(initial_d2, float), np.asarray(initial_d3, float)])
    _check_initial(start, ETA_DIAG, "initial {T, D1, D2, D3} frame")

    projector = None
    if project:
        def projector(k, rows):
            return lorentz_gram_schmidt([t_nodes[k], v_nodes[k], *rows], 0)[2:]

    rows = _relatively_parallel(grid, v_nodes, v_mids, vp_nodes, vp_mids,
                                start[2:], -1.0, projector=projector)
    frames = np.concatenate([t_nodes[:, None, :], v_nodes[:, None, :], rows], axis=1)
    return FramePath(grid=grid.copy(), frames=frames, curve=ptc)


def _complete_type_d_start(t0, d1_0):
    basis = np.eye(4)
    for i in range(4):
        for j in range(i + 1, 4):
            cand = [t0, d1_0, basis[i], basis[j]]
            if abs(np.linalg.det(np.stack(cand))) > 1e-8:
                return lorentz_gram_schmidt(cand, 0)
    raise BadInitialFrame("could not complete {T, D1} to a basis")  # pragma: no cover


def construct_frenet(ptc, tol=1e-8):
    """Frenet frame and curvatures from successive tangent derivatives.

    F1 = T'/|T'|, F2 normalizes the part of F1' off span{T, F1}, and F3 is
    the orientation completion with det = +1.  The first two curvatures must
    stay positive; the third one is signed, f3 = <F2', F3>, with F2' taken
    as a grid derivative.
    """
    grid = ptc.grid
    h = _require_uniform(grid)
    t, t1, t2 = ptc.tangent_derivatives_grid(2)
    f1 = np.sqrt(np.abs(inner(t1, t1)))
    bad = np.where(f1 <= tol * max(1.0, float(np.max(f1))))[0]
    if bad.size:
        raise NotFrenetRegular(f"f1 vanishes near s = {grid[bad[0]]:.6g}")
    e1 = t1 / f1[:, None]
    f1p = inner(t2, t1) / f1
    e1p = t2 / f1[:, None] - t1 * (f1p / f1 ** 2)[:, None]
    # explicit projection off span{T, F1} is stabler than e1p - f1 T
    w2 = e1p + inner(e1p, t)[:, None] * t - inner(e1p, e1)[:, None] * e1
    f2 = np.sqrt(np.abs(inner(w2, w2)))
    bad = np.where(f2 <= tol * max(1.0, float(np.max(f2))))[0]
    if bad.size:
        raise NotFrenetRegular(f"f2 vanishes near s = {grid[bad[0]]:.6g}")
    e2 = w2 / f2[:, None]
    e3 = np.stack([lorentz_cross(t[k], e1[k], e2[k]) for k in range(len(grid))])
    e2p = grid_derivative(e2, h)
    f3 = inner(e2p, e3)
    frames = np.stack([t, e1, e2, e3], axis=1)
    path = FramePath(grid=grid.copy(), frames=frames, curve=ptc)
    return FrenetResult(path=path, f1=f1, f2=f2, f3=f3)


def conjugate_bishop(path, q, tol=1e-12):
    """Rotate the normal rows by a constant Q in O(3); coefficients become b Q^-1."""
    q = np.asarray(q, dtype=float)
    defect = float(np.max(np.abs(q @ q.T - np.eye(3))))
    if defect > tol:
        raise NotOrthogonal(f"Q Q^T deviates from identity by {defect:.3e}")
    frames = path.frames.copy()
    frames[:, 1:, :] = np.einsum("ij,njc->nic", q, path.frames[:, 1:, :])
    return FramePath(grid=path.grid.copy(), frames=frames, curve=path.curve)


def transformation_residual(path0, path1, tol=1e-8):
    """Max residual of G' = X1 G - G X0 for the nodewise transformation G."""
    trans = transformation_between(path0, path1, tol)
    g = trans.matrices
    h = _require_uniform(path0.grid)
    gp = grid_derivative(g, h)
    x0 = extract_coefficients(path0)
    x1 = extract_coefficients(path1)
    resid = gp - (np.einsum("nij,njk->nik", x1, g) - np.einsum("nij,njk->nik", g, x0))
    return float(np.max(np.abs(resid)))


def _fibonacci_sphere(n, seed=None):
    i = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = np.pi * (3.0 - np.sqrt(5.0))
    theta = golden * i
    pts = np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)
    if seed is not None:
        rng = np.random.default_rng(int(seed))
        m = rng.standard_normal((3, 3))
        qr, _ = np.linalg.qr(m)
        pts = pts @ qr.T
    return pts


def select_rotation(y, clearance_deg=CLEARANCE_DEG, candidates=SCAN_CANDIDATES, seed=None):
    """Pick xi maximizing projective clearance from the sampled [y] curve.

    Scans a Fibonacci grid on the sphere (about one candidate per square
    degree), maximizing the minimal projective angle to the normalized
    coordinate samples, then builds Q in O(3) with second row xi.
    """
    y = np.asarray(y, dtype=float)
    yn = y / np.linalg.norm(y, axis=1, keepdims=True)
    if seed is None:
        seed = os.environ.get("FRAMES_SEED")
    dirs = _fibonacci_sphere(candidates, seed=seed)
    worst = np.empty(len(dirs))
    chunk = 4096
    for k in range(0, len(dirs), chunk):
        block = dirs[k:k + chunk]
        worst[k:k + chunk] = np.max(np.abs(yn @ block.T), axis=0)
    best = int(np.argmin(worst))
    clearance = float(np.degrees(np.arccos(np.clip(worst[best], -1.0, 1.0))))
    if clearance < clearance_deg:
        raise ClearanceTooSmall(
            f"best projective clearance is {clearance:.3f} deg "
            f"(threshold {clearance_deg} deg); refine the grid or rotate the data")
    xi = dirs[best]
    pivot = int(np.argmin(np.abs(xi)))
    u = np.zeros(3)
    u[pivot] = 1.0
    u = u - float(u @ xi) * xi
    u /= np.linalg.norm(u)
    q = np.stack([u, xi, np.cross(u, xi)])
    return RotationSelection(q=q, xi=xi, clearance_deg=clearance)


def rotation_angle_rate(y1, y3, dy1, dy3):
    """d/ds of the angle of (y1, y3), valid while (y1, y3) != 0."""
    return (dy3 * y1 - y3 * dy1) / (y1 ** 2 + y3 ** 2)


def d_to_c_transform(bishop, normal, clearance_deg=CLEARANCE_DEG,
                     candidates=SCAN_CANDIDATES, seed=None, pattern_tol=None):
    """Turn a type-B path plus principal normal data into a type-C path.

    Steps: express D1 in the Bishop normal basis, pick a projective
    direction clear of the coordinate curve, rotate the Bishop frame so that
    direction becomes the second normal axis, then apply the angle rotation
    in the (1,3) normal plane whose rate is fixed by the rotated
    coordinates.
    """
    kwargs = {} if pattern_tol is None else {"tol": pattern_tol}
    cls = classify_path(bishop, **kwargs)
    if cls.label is not FrameLabel.B:
        raise NotTypeB(f"input path classifies as {cls.label}, not B")
    grid = bishop.grid
    ptc = bishop.curve
    d, v, vp = normal.samples(grid)
    normals = bishop.frames[:, 1:, :]
    eta_v = v * ETA_DIAG
    eta_vp = vp * ETA_DIAG
    y = np.einsum("nic,nc->ni", normals, eta_v)
    # y_i' = <D1', B_i>: the B_i' = b_i T terms drop because <D1, T> = 0.
    yp = np.einsum("nic,nc->ni", normals, eta_vp)

    selection = select_rotation(y, clearance_deg, candidates, seed)
    rotated = conjugate_bishop(bishop, selection.q)
    yh = y @ selection.q.T
    yhp = yp @ selection.q.T

    theta_rate = rotation_angle_rate(yh[:, 0], yh[:, 2], yhp[:, 0], yhp[:, 2])
    h = _require_uniform(grid)
    theta = np.empty(len(grid))
    theta[0] = np.arctan2(yh[0, 2], yh[0, 0])
    theta[1:] = theta[0] + np.cumsum(0.5 * h * (theta_rate[:-1] + theta_rate[1:]))

    c, s = np.cos(theta), np.sin(theta)
    b1, b2, b3 = rotated.frames[:, 1, :], rotated.frames[:, 2, :], rotated.frames[:, 3, :]
    frames = np.empty_like(rotated.frames)
    frames[:, 0, :] = rotated.frames[:, 0, :]
    frames[:, 1, :] = c[:, None] * b1 + s[:, None] * b3
    frames[:, 2, :] = b2
    frames[:, 3, :] = -s[:, None] * b1 + c[:, None] * b3
    path = FramePath(grid=grid.copy(), frames=frames, curve=ptc)

    bh = d[:, None] * yh  # rotated Bishop coefficients, since T' = d1 D1
    coeffs = np.stack([bh[:, 0] * c + bh[:, 2] * s, bh[:, 1], theta_rate], axis=1)
    return TypeCTransformResult(path=path, rotated_bishop=rotated,
                                rotation=selection, theta=theta, y=y,
                                y_rotated=yh, coefficients=coeffs)


def curve_from_bishop_data(b, initial, origin, domain, step, name="bishop-data",
                           project=False):
    """Integrate a curve and its type-B frame from coefficient functions.

    ``b`` is a 3-component SymbolicVector or PiecewiseVector (or a parsed
    bishop-data CurveSpec).  Returns (ProperTimeCurve, FramePath); the
    returned curve is unit-speed time-like and re-extracting coefficients
    reproduces the inputs.
    """
    if isinstance(b, CurveSpec):
        spec = b
        data = spec.bishop_data
        b, initial, origin = data["b"], data["initial"], data["origin"]
        domain = spec.domain
        name = spec.name
    if not isinstance(b, (SymbolicVector, PiecewiseVector)):
        raise TypeError("b must be a SymbolicVector or PiecewiseVector with 3 components")
    initial = _check_initial(np.asarray(initial, dtype=float), ETA_DIAG)
    origin = np.asarray(origin, dtype=float)
    a, bend = float(domain[0]), float(domain[1])
    n = int(np.round((bend - a) / step))
    grid = a + step * np.arange(n + 1)
    mids = grid[:-1] + 0.5 * step

    b_nodes = np.atleast_2d(b.eval(grid, 0))
    b_mids = np.atleast_2d(b.eval(mids, 0))

    def xmat(bv):
        x = np.zeros((4, 4))
        x[0, 1:] = bv
        x[1:, 0] = bv
        return x

    z = initial.copy()
    gamma = origin.copy()
    frames = np.empty((n + 1, 4, 4))
    points = np.empty((n + 1, 4))
    frames[0] = z
    points[0] = gamma
    for k in range(n):
        x0 = xmat(b_nodes[k])
        xm = xmat(b_mids[k])
        x1 = xmat(b_nodes[k + 1])
        k1z = x0 @ z
        k1g = z[0]
        k2z = xm @ (z + 0.5 * step * k1z)
        k2g = (z + 0.5 * step * k1z)[0]
        k3z = xm @ (z + 0.5 * step * k2z)
        k3g = (z + 0.5 * step * k2z)[0]
        k4z = x1 @ (z + step * k3z)
        k4g = (z + step * k3z)[0]
        z = z + (step / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        gamma = gamma + (step / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        if project:
            z = lorentz_gram_schmidt(z, 0)
        frames[k + 1] = z
        points[k + 1] = gamma

    spec = CurveSpec(name=name, kind="bishop-data", domain=(a, bend),
                     bishop_data={"b": b, "initial": initial, "origin": origin})
    evaluator = _BishopDataEvaluator(grid, points, frames, b, name)
    ptc = ProperTimeCurve(spec, evaluator, step)
    path = FramePath(grid=grid.copy(), frames=frames, curve=ptc)
    return ptc, path
