import math

import numpy as np
import pytest

import lorentz_frames as lf
from lorentz_frames.curves import DEFAULT_STEP, proper_time
from lorentz_frames.errors import NotTimeLike, OutOfDomain


def _spec(components, domain, name="c"):
    return lf.load_curve_spec({"name": name, "kind": "analytic",
                               "components": components, "domain": list(domain)})


def test_proper_time_unit_line():
    spec = _spec(["u", "0", "0", "0"], (0, 6))
    assert proper_time(spec, 0.0, 5.0) == pytest.approx(5.0, abs=1e-12)


def test_proper_time_constant_speed():
    spec = _spec(["2*u", "u", "0", "0"], (0, 2))
    assert proper_time(spec, 0.0, 1.0) == pytest.approx(math.sqrt(3), abs=1e-12)


def test_proper_time_flat_branch_against_riemann_oracle():
    # dense-midpoint quadrature as an independent oracle on [0.5, 1]
    spec = _spec(["u", "exp(-1/u)", "0", "0"], (0.4, 1.1))
    t = np.linspace(0.5, 1.0, 200001)
    mid = 0.5 * (t[:-1] + t[1:])
    speed = np.sqrt(1.0 - (np.exp(-1.0 / mid) / mid ** 2) ** 2)
    oracle = float(np.sum(speed) * (t[1] - t[0]))
    assert proper_time(spec, 0.5, 1.0) == pytest.approx(oracle, abs=1e-8)


def test_proper_time_rejects_spacelike():
    spec = _spec(["u", "3*u", "0", "0"], (0, 1))
    with pytest.raises(NotTimeLike):
        proper_time(spec, 0.0, 1.0)


def test_reparametrize_rejects_spacelike():
    with pytest.raises(NotTimeLike):
        lf.reparametrize(_spec(["u", "3*u", "0", "0"], (0, 1)))


def test_reparametrize_line_constant_tangent():
    ptc = lf.reparametrize(_spec(["2*u", "u", "0", "0"], (0, 2)))
    t = ptc.tangent(ptc.grid)
    expected = np.array([2.0, 1, 0, 0]) / math.sqrt(3)
    assert np.max(np.abs(t - expected)) < 1e-10
    assert np.max(np.abs(lf.inner(t, t) + 1.0)) < 1e-12


def test_reparametrize_hyperbola_is_identity(hyperbola):
    # <gamma', gamma'> = -cosh^2 + sinh^2 = -1, so s = u
    assert hyperbola.domain_s[1] == pytest.approx(1.0, abs=1e-10)
    u = hyperbola.raw_parameter(np.array([0.25, 0.5]))
    assert np.allclose(u, [0.25, 0.5], atol=1e-10)


def test_reparametrize_example_2_1_unit_tangent(example_2_1):
    t = example_2_1.tangent(example_2_1.grid)
    assert np.max(np.abs(lf.inner(t, t) + 1.0)) < 1e-8


def test_reparametrize_idempotent(hyperbola):
    again = lf.reparametrize(hyperbola, step=DEFAULT_STEP)
    s = np.linspace(0.0, 0.9, 7)
    assert np.allclose(again.tangent(s), hyperbola.tangent(s), atol=1e-10)


def test_tangent_derivatives_hyperbola(hyperbola):
    t, t1 = lf.tangent_and_derivatives(hyperbola, 0.0, 1)
    assert np.allclose(t, [1, 0, 0, 0], atol=1e-12)
    assert np.allclose(t1, [0, 1, 0, 0], atol=1e-12)


def test_tangent_derivatives_line_flat(line):
    t, t1 = lf.tangent_and_derivatives(line, 0.5, 1)
    assert np.allclose(t1, np.zeros(4), atol=1e-12)


def test_tangent_derivatives_example_2_2_junction(example_2_2):
    t, t1 = lf.tangent_and_derivatives(example_2_2, 0.0, 1)
    assert np.allclose(t, [1, 0, 0, 0], atol=1e-10)
    assert np.allclose(t1, [0, 0, 0, 1], atol=1e-8)


def test_tangent_derivatives_order_capped(hyperbola):
    with pytest.raises(ValueError):
        hyperbola.tangent_derivatives(0.0, order=4)


def test_out_of_domain(hyperbola):
    with pytest.raises(OutOfDomain):
        hyperbola.point(5.0)


@pytest.mark.parametrize("name", ["line", "hyperbola", "helix", "example-2-1",
                                  "example-2-2", "prop-3-3"])
def test_tangent_orthogonal_to_derivative(name, request):
    fixture = {"example-2-1": "example_2_1", "example-2-2": "example_2_2"}.get(
        name, name.replace("-", "_"))
    obj = request.getfixturevalue(fixture)
    ptc = obj[0] if isinstance(obj, tuple) else obj
    t, t1 = ptc.tangent_derivatives_grid(1)
    assert np.max(np.abs(lf.inner(t1, t))) < 1e-6


def test_fd_derivatives_match_oracle_at_fourth_order(helix):
    s = 0.8
    exact = helix.tangent_derivatives(s, 2)
    for order in (1, 2):
        errs = []
        for h in (2e-2, 1e-2):
            fd = helix._fd_derivs(s, order, h=h)
            errs.append(np.max(np.abs(fd[order] - exact[order])))
        rate = math.log2(errs[0] / errs[1])
        assert rate > 3.5, f"order-{order} stencil converged at rate {rate:.2f}"


def test_fd_fallback_method(helix):
    fd = helix.tangent_derivatives(0.5, 2, method="fd")
    exact = helix.tangent_derivatives(0.5, 2)
    for a, b in zip(fd, exact):
        assert np.allclose(a, b, atol=1e-7)


def test_fd_fallback_one_sided_at_boundary(helix):
    # the stencil shifts inside the domain at s = 0
    fd = helix.tangent_derivatives(0.0, 1, method="fd")
    exact = helix.tangent_derivatives(0.0, 1)
    assert np.allclose(fd[1], exact[1], atol=1e-6)


def test_regularity_line_not_2_regular(line):
    rep = lf.regularity_report(line)
    assert rep.is_timelike_everywhere
    assert not rep.is_2_regular


def test_regularity_hyperbola(hyperbola):
    rep = lf.regularity_report(hyperbola)
    assert rep.is_2_regular
    # <T', T'> = -sinh^2 + cosh^2 = 1
    assert rep.min_tangent_derivative_norm == pytest.approx(1.0, abs=1e-10)


def test_regularity_example_2_2(example_2_2):
    assert lf.regularity_report(example_2_2).is_2_regular


def test_regularity_implication_all_gallery(request):
    for name in lf.gallery_names():
        fixture = {"example-2-1": "example_2_1", "example-2-2": "example_2_2"}.get(
            name, name.replace("-", "_"))
        obj = request.getfixturevalue(fixture)
        ptc = obj[0] if isinstance(obj, tuple) else obj
        rep = lf.regularity_report(ptc)
        assert rep.is_timelike_everywhere or not rep.is_2_regular


def test_load_curve_spec_rejects_unknown_symbols():
    with pytest.raises(ValueError):
        _spec(["u + q", "0", "0", "0"], (0, 1))


def test_load_curve_spec_rejects_wrong_arity():
    with pytest.raises(ValueError):
        _spec(["u", "0", "0"], (0, 1))


def test_load_curve_spec_json_string(tmp_path):
    p = tmp_path / "curve.json"
    p.write_text('{"name": "x", "kind": "analytic", '
                 '"components": ["u", "0", "0", "0"], "domain": [0, 1]}')
    spec = lf.load_curve_spec(p)
    assert spec.name == "x"
    assert spec.kind == "analytic"
