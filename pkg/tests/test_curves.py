import json
import math

import numpy as np
import pytest

from minkhelix import (BUILTIN_NAMES, DerivativeQuality, FiniteDifferenceCurve, SampleGrid,
                       builtin_curve, curve_from_spec, evaluate, load_curve_spec, tabulated_curve)
from minkhelix.errors import DomainError, FormatError, OrderError, UnknownCurve

R2, R3 = math.sqrt(2), math.sqrt(3)


@pytest.mark.parametrize("name, s, expected", [
    ("example1_gamma", 0.0, (1, 0, R2)),
    ("example3_gamma", 0.0, (1 / R3, R2 / R3, 0)),
    ("example1_alpha", 0.0, (0, 2, 0)),
    ("hyperbola2", 0.0, (0, 0, 2)),
    ("example2_gamma", 0.0, (R2, 0, 1)),
    ("s12_circle", 0.0, (1, 0, 0)),
    ("h02_geodesic", 0.0, (0, 0, 1)),
])
def test_builtin_values(name, s, expected):
    np.testing.assert_allclose(builtin_curve(name).eval(s), expected, atol=1e-15)


def test_first_derivative_of_example1_gamma():
    np.testing.assert_allclose(evaluate(builtin_curve("example1_gamma"), 0.0, 1), (0, 1, 0),
                               atol=1e-15)


def test_displayed_forms_hand_typed():
    s = np.linspace(-1, 1, 41)
    r = R2 * s
    ex1 = np.stack([-2 * np.cos(r) * np.sin(s) + 2 * R2 * np.cos(s) * np.sin(r),
                    2 * np.cos(s) * np.cos(r) + 2 * R2 * np.sin(s) * np.sin(r),
                    2 * np.sin(r)], axis=1)
    np.testing.assert_allclose(builtin_curve("example1_alpha").eval(s), ex1, atol=1e-14)
    c = math.sqrt(2 / 3)
    ex3 = np.stack([-2 * c * np.cosh(R3 * s) * np.sinh(r) + 2 * np.cosh(r) * np.sinh(R3 * s),
                    2 * np.sinh(r) / R3,
                    2 * np.cosh(r) * np.cosh(R3 * s) - 2 * c * np.sinh(r) * np.sinh(R3 * s)], axis=1)
    np.testing.assert_allclose(builtin_curve("example3_alpha").eval(s), ex3, atol=1e-13)


def test_evaluation_is_deterministic():
    c = builtin_curve("example3_alpha")
    assert c.eval(0.37).tobytes() == c.eval(0.37).tobytes()


def test_domain_and_order_errors():
    c = builtin_curve("example1_gamma")
    with pytest.raises(DomainError):
        c.eval(3.5)
    with pytest.raises(OrderError):
        c.eval(0.0, 4)
    with pytest.raises(UnknownCurve):
        builtin_curve("nope")
    with pytest.raises(DomainError):
        builtin_curve("example1_gamma", {"domain": [-5, 1]})


def test_tan_factor_curve_is_pole_clipped():
    lo, hi = builtin_curve("example1_alpha").domain
    assert hi == pytest.approx((math.pi / 2 - 0.05) / R2)
    assert lo == -hi and hi > 1.0


def test_builtin_analytic_derivatives_match_finite_differences():
    rng = np.random.default_rng(11)
    for name in BUILTIN_NAMES:
        exact = builtin_curve(name)
        fd = FiniteDifferenceCurve.from_curve(exact)
        lo, hi = fd.valid_domain(3)
        s = rng.uniform(max(lo, -2.5), min(hi, 2.5), size=20)
        for order, tol in ((1, 1e-6), (2, 1e-6), (3, 1e-4)):
            want = exact.eval(s, order)
            got = fd.eval(s, order)
            scale = np.maximum(1.0, np.abs(want).max(axis=1, keepdims=True))
            assert np.all(np.abs(got - want) <= tol * scale), (name, order)


def test_finite_difference_shrinks_domain():
    fd = FiniteDifferenceCurve.from_curve(builtin_curve("s12_circle"))
    lo, hi = fd.valid_domain(1)
    assert -3 < lo and hi < 3
    with pytest.raises(DomainError):
        fd.eval(3.0, 1)
    assert fd.quality is DerivativeQuality.FINITE_DIFFERENCE


def test_spline_interpolation_and_knots():
    grid = SampleGrid(-1, 1, 1001)
    exact = builtin_curve("example1_gamma")
    pts = exact.sample(grid)
    spline = tabulated_curve(grid.nodes, pts)
    np.testing.assert_allclose(spline.eval(0.3), exact.eval(0.3), atol=1e-9)
    np.testing.assert_array_equal(spline.eval(grid.nodes), pts)
    assert spline.quality is DerivativeQuality.SPLINE
    assert spline.tolerance_tier == 1e-3


def test_tabulated_validation():
    s = np.linspace(0, 1, 7)
    with pytest.raises(FormatError):
        tabulated_curve(s, np.zeros((7, 3)))
    s = np.linspace(0, 1, 10)
    bad = s.copy()
    bad[4], bad[5] = bad[5], bad[4]
    with pytest.raises(FormatError):
        tabulated_curve(bad, np.zeros((10, 3)))
    with pytest.raises(FormatError):
        tabulated_curve(s, np.zeros((9, 3)))
    pts = np.zeros((10, 3))
    pts[3, 1] = np.nan
    with pytest.raises(FormatError):
        tabulated_curve(s, pts)


def test_json_and_csv_specs(tmp_path):
    c = curve_from_spec({"kind": "builtin", "name": "hyperbola2", "params": {"domain": [-1, 1]}})
    assert c.domain == (-1.0, 1.0)
    s = np.linspace(-1, 1, 21)
    pts = builtin_curve("s12_circle").eval(s)
    spec = {"kind": "tabulated", "s": s.tolist(), "points": pts.tolist()}
    tab = load_curve_spec(json.dumps(spec))
    np.testing.assert_allclose(tab.eval(s), pts, atol=1e-15)
    path = tmp_path / "c.csv"
    path.write_text("s,x1,x2,x3\n" + "\n".join(f"{a},{b},{c},{d}" for a, (b, c, d) in zip(s, pts)))
    np.testing.assert_allclose(load_curve_spec(str(path)).eval(0.0), (1, 0, 0), atol=1e-12)
    assert load_curve_spec("example2_gamma").name == "example2_gamma"
    with pytest.raises(FormatError):
        load_curve_spec("{not json")
    with pytest.raises(FormatError):
        curve_from_spec({"kind": "weird"})
