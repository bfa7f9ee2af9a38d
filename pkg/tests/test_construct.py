import math

import numpy as np
import pytest
import sympy as sp

import lorentz_frames as lf
from lorentz_frames.construct import construct_bishop, rotation_angle_rate, select_rotation
from lorentz_frames.curves import DEFAULT_STEP
from lorentz_frames.errors import (BadInitialFrame, BadNormalField,
                                   ClearanceTooSmall, GridMismatch,
                                   Not2Regular, NotFrenetRegular,
                                   NotOrthogonal, NotTypeB, TangentMismatch)
from lorentz_frames.expressions import SymbolicVector
from lorentz_frames.frames import FrameLabel
from lorentz_frames.minkowski import frame_defect
from lorentz_frames.numdiff import grid_derivative

from synthetic import random_fourier_tangent_spec


def _upper_row(path):
    x = lf.extract_coefficients(path)
    return np.stack([x[:, 0, 1], x[:, 0, 2], x[:, 0, 3]], axis=1)


def test_bishop_line_constant(line):
    path = lf.construct_bishop(line, lf.default_initial_frame(line))
    assert np.max(np.abs(path.frames - path.frames[0])) < 1e-14
    assert np.max(np.abs(lf.extract_coefficients(path))) == 0.0


def test_bishop_hyperbola_closed_form(hyperbola_bishop, hyperbola):
    s = hyperbola_bishop.grid
    b1_exact = np.stack([np.sinh(s), np.cosh(s), 0 * s, 0 * s], axis=1)
    assert np.max(np.abs(hyperbola_bishop.frames[:, 1, :] - b1_exact)) < 1e-10
    b = _upper_row(hyperbola_bishop)
    assert np.max(np.abs(b[:, 0] - 1.0)) < 1e-8
    assert np.max(np.abs(b[:, 1:])) < 1e-10
    assert lf.classify_path(hyperbola_bishop).label is FrameLabel.B


def test_bishop_satisfies_its_equation(helix_bishop, helix):
    # B_i' - <T', B_i> T = 0 at stencil accuracy
    t, t1 = helix.tangent_derivatives_grid(1)
    for i in (1, 2, 3):
        rows = helix_bishop.frames[:, i, :]
        lhs = grid_derivative(rows, helix_bishop.step)
        rhs = lf.inner(t1, rows)[:, None] * t
        assert np.max(np.abs(lhs - rhs)) < 1e-6


def test_bishop_initial_frame_checked(hyperbola):
    bad = np.eye(4)
    bad[1, 1] = 1.1
    with pytest.raises(BadInitialFrame):
        lf.construct_bishop(hyperbola, bad)
    wrong_row = np.eye(4)[[1, 0, 2, 3]]
    with pytest.raises(Exception):
        lf.construct_bishop(hyperbola, wrong_row)


def test_bishop_drift_across_gallery(request):
    for name in ("line", "hyperbola", "helix", "example_2_2"):
        ptc = request.getfixturevalue(name)
        path = lf.construct_bishop(ptc, lf.default_initial_frame(ptc))
        assert path.drift() <= 1e-8, name
        assert path.tangent_defect() < 1e-10


def test_bishop_random_fourier_drift():
    rng = np.random.default_rng(11)
    spec = random_fourier_tangent_spec(rng, "fourier")
    ptc = lf.reparametrize(spec, DEFAULT_STEP)
    path = lf.construct_bishop(ptc, lf.default_initial_frame(ptc))
    assert path.drift() <= 1e-8
    assert lf.classify_path(path).label is FrameLabel.B


def test_bishop_projection_option(helix):
    path = lf.construct_bishop(helix, lf.default_initial_frame(helix), project=True)
    assert path.drift() <= 1e-10
    assert lf.classify_path(path).label is FrameLabel.B


def test_type_d_projection_option(helix, helix_normal):
    path = lf.construct_type_d(helix, helix_normal, project=True)
    assert path.drift() <= 1e-10
    assert lf.classify_path(path).label is FrameLabel.D


def test_bishop_spacelike_variant(hyperbola):
    normal = lf.principal_normal_from_2regular(hyperbola)

    def direction(s):
        return normal.direction(s), normal.direction_prime(s)

    init = np.stack([normal.direction(0.0), hyperbola.tangent(0.0),
                     np.array([0.0, 0, 1, 0]), np.array([0.0, 0, 0, 1])])
    aux = construct_bishop(hyperbola, init, variant="spacelike", direction=direction)
    sig = np.array([1.0, -1.0, 1.0, 1.0])
    assert max(frame_defect(z, sig) for z in aux.frames[::50]) < 1e-10


def test_frenet_helix_curvatures(helix_frenet):
    # symbolic oracle: differentiate the closed-form curve directly
    s = sp.Symbol("s", real=True)
    gamma = sp.Matrix([sp.sinh(sp.sqrt(2) * s), sp.cosh(sp.sqrt(2) * s),
                       sp.cos(s), sp.sin(s)])
    eta = sp.diag(-1, 1, 1, 1)
    t = gamma.diff(s)
    t1 = t.diff(s)
    f1_sym = sp.sqrt((t1.T * eta * t1)[0, 0])
    assert sp.simplify(f1_sym.rewrite(sp.exp) - sp.sqrt(5)) == 0
    e1 = t1 / sp.sqrt(5)
    w2 = sp.simplify(e1.diff(s) - sp.sqrt(5) * t)
    f2_sq = sp.simplify(((w2.T * eta * w2)[0, 0]).rewrite(sp.exp))
    assert sp.simplify(f2_sq - sp.Rational(18, 5)) == 0

    assert np.max(np.abs(helix_frenet.f1 - math.sqrt(5))) < 1e-6
    assert np.max(np.abs(helix_frenet.f2 - math.sqrt(18 / 5))) < 1e-6
    assert np.max(np.abs(np.abs(helix_frenet.f3) - math.sqrt(2 / 5))) < 1e-6


def test_frenet_matches_template(helix_frenet):
    x = lf.extract_coefficients(helix_frenet.path)
    assert np.max(np.abs(x[:, 2, 3] - helix_frenet.f3)) < 1e-6
    cls = lf.classify_path(helix_frenet.path)
    assert cls.label is FrameLabel.F and cls.positivity


def test_frenet_rejects_planar_curve(hyperbola):
    with pytest.raises(NotFrenetRegular):
        lf.construct_frenet(hyperbola)


def test_principal_normal_hyperbola(hyperbola):
    normal = lf.principal_normal_from_2regular(hyperbola)
    s = 0.3
    assert normal.d1(s) == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(normal.direction(s),
                       [math.sinh(s), math.cosh(s), 0, 0], atol=1e-10)


def test_principal_normal_helix(helix_normal):
    d, v, vp = helix_normal.samples(np.linspace(0, 1.5, 7))
    assert np.max(np.abs(d - math.sqrt(5))) < 1e-10
    assert np.max(np.abs(lf.inner(v, v) - 1.0)) < 1e-10


def test_principal_normal_line_rejected(line):
    with pytest.raises(Not2Regular):
        lf.principal_normal_from_2regular(line)


def test_type_d_hyperbola_equals_bishop(hyperbola, hyperbola_bishop):
    normal = lf.principal_normal_from_2regular(hyperbola)
    dpath = lf.construct_type_d(hyperbola, normal,
                                initial_d2=np.array([0.0, 0, 1, 0]),
                                initial_d3=np.array([0.0, 0, 0, 1]))
    assert np.max(np.abs(dpath.frames - hyperbola_bishop.frames)) < 1e-10


def test_type_d_helix_pattern(helix, helix_normal):
    dpath = lf.construct_type_d(helix, helix_normal)
    assert dpath.drift() < 1e-8
    cls = lf.classify_path(dpath)
    assert cls.label is FrameLabel.D
    assert cls.pattern == frozenset({(0, 1), (1, 2), (1, 3)})


def test_type_d_rejects_bad_normal(helix):
    bad = lf.PrincipalNormalField(
        d1=lambda s: 1.0,
        direction=lambda s: np.array([0.0, 1, 0, 0]),
        direction_prime=lambda s: np.zeros(4))
    with pytest.raises(BadNormalField):
        lf.construct_type_d(helix, bad)


def test_rotation_angle_rate_circle():
    # symbolic oracle: d/ds atan2(sin, cos) = 1
    s = sp.Symbol("s", real=True)
    rate = sp.simplify(sp.diff(sp.atan2(sp.sin(s), sp.cos(s)), s))
    assert rate == 1
    grid = np.linspace(0.0, 2.0, 64)
    vals = rotation_angle_rate(np.cos(grid), np.sin(grid),
                               -np.sin(grid), np.cos(grid))
    assert np.max(np.abs(vals - 1.0)) < 1e-12


def test_select_rotation_invariants(helix_d_to_c):
    sel = helix_d_to_c.rotation
    assert np.max(np.abs(sel.q @ sel.q.T - np.eye(3))) < 1e-12
    assert np.max(np.abs(sel.xi @ sel.q.T - np.array([0, 1, 0]))) < 1e-12
    assert sel.clearance_deg > 0.5


def test_select_rotation_clearance_error():
    grid = np.linspace(0, 1, 50)
    y = np.stack([np.cos(grid), np.sin(grid), 0 * grid], axis=1)
    with pytest.raises(ClearanceTooSmall):
        select_rotation(y, clearance_deg=89.9)


def test_d_to_c_constant_coefficients():
    """Constant b = (3, 0, 4): c1 = sqrt(b1^2 + b3^2) = 5 and c2 = b2 = 0.

    The scan axis is only perpendicular to the constant coordinate point up
    to the angular quantization of the direction grid, so c2 vanishes to
    that resolution rather than to round-off.
    """
    s = sp.Symbol("s", real=True)
    b = SymbolicVector([sp.Integer(3), sp.Integer(0), sp.Integer(4)], s)
    ptc, path = lf.curve_from_bishop_data(b, np.eye(4), np.zeros(4), (0.0, 0.5), 1e-3)
    normal = lf.principal_normal_from_2regular(ptc)
    result = lf.d_to_c_transform(path, normal)
    c = result.coefficients
    assert np.max(np.abs(c[:, 0] - 5.0)) < 1e-6
    assert np.max(np.abs(c[:, 1])) < 5e-3
    x = lf.extract_coefficients(result.path)
    assert np.max(np.abs(x[:, 0, 1] - 5.0)) < 1e-6
    assert np.max(np.abs(x[:, 0, 2])) < 5e-3


def test_d_to_c_helix_full_pipeline(helix_bishop, helix_d_to_c):
    result = helix_d_to_c
    assert lf.classify_path(result.path).label is FrameLabel.C
    bh = _upper_row(result.rotated_bishop)
    x = lf.extract_coefficients(result.path)
    c1, c2 = x[:, 0, 1], x[:, 0, 2]
    assert np.max(np.abs(c1 ** 2 - bh[:, 0] ** 2 - bh[:, 2] ** 2)) < 1e-6
    assert np.max(np.abs(c2 - bh[:, 1])) < 1e-6
    assert lf.transformation_residual(helix_bishop, result.path) < 1e-6
    # rotated coordinates never meet the removed axis
    y13 = result.y_rotated[:, 0] ** 2 + result.y_rotated[:, 2] ** 2
    assert np.min(y13) > math.sin(math.radians(result.rotation.clearance_deg)) ** 2 / 2


def test_d_to_c_requires_type_b(helix, helix_normal):
    frenet = lf.construct_frenet(helix).path
    with pytest.raises(NotTypeB):
        lf.d_to_c_transform(frenet, helix_normal)


def test_conjugate_identity(hyperbola_bishop):
    same = lf.conjugate_bishop(hyperbola_bishop, np.eye(3))
    assert np.array_equal(same.frames, hyperbola_bishop.frames)


def test_conjugate_swap_axes(helix_bishop):
    swap = np.array([[1.0, 0, 0], [0, 0, 1], [0, 1, 0]])
    out = lf.conjugate_bishop(helix_bishop, swap)
    b = _upper_row(helix_bishop)
    bq = _upper_row(out)
    assert np.max(np.abs(bq - b[:, [0, 2, 1]])) < 1e-12


def test_conjugate_rotation_on_hyperbola(hyperbola_bishop):
    phi = 0.7
    q = np.array([[math.cos(phi), 0, math.sin(phi)],
                  [0.0, 1, 0],
                  [-math.sin(phi), 0, math.cos(phi)]])
    out = lf.conjugate_bishop(hyperbola_bishop, q)
    b = _upper_row(hyperbola_bishop)
    expected = b @ q.T  # b Q^-1 for the row convention
    assert np.allclose(expected[0], [math.cos(phi), 0.0, -math.sin(phi)], atol=1e-8)
    assert np.max(np.abs(_upper_row(out) - expected)) < 1e-9
    assert lf.classify_path(out).label is FrameLabel.B


def test_conjugate_rejects_non_orthogonal(hyperbola_bishop):
    with pytest.raises(NotOrthogonal):
        lf.conjugate_bishop(hyperbola_bishop, np.eye(3) * 1.1)


def test_conjugate_round_trip_random(helix_bishop):
    rng = np.random.default_rng(5)
    for _ in range(3):
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        out = lf.conjugate_bishop(helix_bishop, q)
        assert lf.classify_path(out).label is FrameLabel.B
        assert np.max(np.abs(_upper_row(out) - _upper_row(helix_bishop) @ q.T)) < 1e-9
        back = lf.conjugate_bishop(out, q.T)
        assert np.max(np.abs(back.frames - helix_bishop.frames)) < 1e-12


def test_transformation_residual_self(hyperbola_bishop):
    assert lf.transformation_residual(hyperbola_bishop, hyperbola_bishop) < 1e-9


def test_transformation_residual_conjugate(hyperbola_bishop):
    rng = np.random.default_rng(17)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    out = lf.conjugate_bishop(hyperbola_bishop, q)
    trans = lf.transformation_between(hyperbola_bishop, out)
    assert trans.block_defect < 1e-10
    assert np.max(np.abs(trans.matrices[0, 1:, 1:] - q)) < 1e-12
    assert lf.transformation_residual(hyperbola_bishop, out) < 1e-9


def test_transformation_residual_errors(hyperbola_bishop, helix_bishop, hyperbola):
    with pytest.raises(GridMismatch):
        lf.transformation_residual(hyperbola_bishop, helix_bishop)
    flipped = lf.FramePath(grid=hyperbola_bishop.grid.copy(),
                           frames=hyperbola_bishop.frames[:, [0, 1, 3, 2], :].copy())
    flipped.frames[:, 0, :] *= -1.0
    with pytest.raises(TangentMismatch):
        lf.transformation_residual(hyperbola_bishop, flipped)


def test_curve_from_zero_data_is_straight():
    s = sp.Symbol("s", real=True)
    b = SymbolicVector([sp.Integer(0)] * 3, s)
    ptc, path = lf.curve_from_bishop_data(b, np.eye(4), np.zeros(4), (0.0, 1.0), 1e-3)
    pts = ptc.point(path.grid)
    assert np.max(np.abs(pts - np.stack([path.grid, 0 * path.grid,
                                         0 * path.grid, 0 * path.grid], axis=1))) < 1e-12


def test_curve_from_constant_data_closed_form():
    s = sp.Symbol("s", real=True)
    b = SymbolicVector([sp.Integer(1), sp.Integer(0), sp.Integer(0)], s)
    ptc, path = lf.curve_from_bishop_data(b, np.eye(4), np.zeros(4), (0.0, 1.0), 1e-3)
    g = path.grid
    expected = np.stack([np.sinh(g), np.cosh(g) - 1.0, 0 * g, 0 * g], axis=1)
    assert np.max(np.abs(ptc.point(g) - expected)) < 1e-10
    b_back = _upper_row(path)
    assert np.max(np.abs(b_back - np.array([1.0, 0.0, 0.0]))) < 1e-8


def test_curve_from_bishop_data_checks_initial():
    s = sp.Symbol("s", real=True)
    b = SymbolicVector([sp.Integer(1), sp.Integer(0), sp.Integer(0)], s)
    skewed = np.eye(4)
    skewed[2, 1] = 0.5
    with pytest.raises(BadInitialFrame):
        lf.curve_from_bishop_data(b, skewed, np.zeros(4), (0.0, 1.0), 1e-3)


def test_bishop_data_round_trip_through_construct():
    rng = np.random.default_rng(23)
    spec = random_fourier_tangent_spec(rng, "roundtrip")
    ptc = lf.reparametrize(spec, DEFAULT_STEP)
    path = lf.construct_bishop(ptc, lf.default_initial_frame(ptc))
    b = _upper_row(path)
    t, t1 = ptc.tangent_derivatives_grid(1)
    for i in (1, 2, 3):
        direct = lf.inner(t1, path.frames[:, i, :])
        assert np.max(np.abs(b[:, i - 1] - direct)) < 1e-8


def test_sign_flip_rigidity(helix_frenet):
    x = lf.extract_coefficients(helix_frenet.path)
    for eps in ((1, -1, 1), (-1, 1, -1), (-1, -1, -1)):
        signs = np.array([1, *eps], dtype=float)
        flipped = lf.FramePath(grid=helix_frenet.path.grid.copy(),
                               frames=helix_frenet.path.frames * signs[None, :, None])
        xf = lf.extract_coefficients(flipped)
        assert np.max(np.abs(xf - x * np.outer(signs, signs))) < 1e-9
        assert lf.classify_path(flipped).label is FrameLabel.F
