import math

import numpy as np
import pytest

from minkhelix import (AnalyticCurve, ConstructionParams, CurveEvaluator, Family, KProfile,
                       SampleGrid, builtin_curve, construct_alpha, fit_lorentz_sphere,
                       ratio_constancy, run_theorem, slant_sigma, slant_verdict,
                       spherical_verdict, sphericity_value, synthesize_spherical_curve,
                       verify_theorem)
from minkhelix.detect import slant_values, sphericity_values
from minkhelix.errors import SingularSystem, VanishingTorsion
from minkhelix.frenet import invariants

R2 = math.sqrt(2)
G201 = SampleGrid(-1, 1, 201)
G401 = SampleGrid(-1, 1, 401)


class Scaled(CurveEvaluator):
    def __init__(self, base, lam):
        super().__init__(base.domain, base.quality, f"{lam}*{base.name}")
        self.base, self.lam = base, lam

    def _eval(self, s, order):
        return self.lam * self.base.eval(s, order)


def _helix_alpha(surface="S12", char="spacelike", kg=3.0, grid=G201):
    gam = synthesize_spherical_curve(surface, char, kg, grid)
    return construct_alpha(gam, KProfile(Family.ZERO), ConstructionParams(b=2.0), grid)


@pytest.mark.parametrize("name", ["example1_alpha", "example3_alpha"])
def test_ratio_constancy_examples(name):
    r = ratio_constancy(builtin_curve(name), G201)
    assert r.passed and r.mean == pytest.approx(R2, abs=1e-9)


def test_ratio_constancy_fails_for_slant_helix():
    alpha = run_theorem(4).alpha
    assert not ratio_constancy(alpha, G401).passed


def test_sigma_of_helix_is_zero():
    for name in ("example1_alpha", "example2_alpha_corrected", "example3_alpha"):
        assert abs(slant_sigma(builtin_curve(name), 0.3)) < 1e-6


@pytest.mark.parametrize("name, value", [
    ("example1_alpha", 4.0),
    ("example3_alpha", -4.0),
    ("example2_alpha_corrected", 4.0),
])
def test_sphericity_values(name, value):
    curve = builtin_curve(name)
    vals, reasons = sphericity_values(curve, G201.nodes)
    assert all(r is None for r in reasons)
    np.testing.assert_allclose(vals, value, atol=1e-6)
    assert sphericity_value(curve, 0.1) == pytest.approx(value, abs=1e-6)


def test_sphericity_raises_without_torsion():
    with pytest.raises(VanishingTorsion):
        sphericity_value(builtin_curve("hyperbola2"), 0.0)


def test_spherical_verdicts():
    r = spherical_verdict(builtin_curve("example1_alpha"), G201)
    assert r.passed and r.metrics["radius"] == pytest.approx(2.0, abs=1e-6)
    assert r.metrics["sphere"] == "lorentzian"
    r = spherical_verdict(builtin_curve("example3_alpha"), G201)
    assert r.passed and r.metrics["sphere"] == "hyperbolic"
    r = spherical_verdict(builtin_curve("hyperbola2"), G201)
    assert not r.passed and r.cause == "VanishingTorsion"
    assert r.excluded_nodes == G201.count
    assert r.metrics["signed_r2"] == pytest.approx(-4.0, abs=1e-9)


def test_dual_gate_rejects_non_spherical_helix():
    alpha = _helix_alpha()
    vals, _ = sphericity_values(alpha, G201.nodes)
    assert np.ptp(vals) < 1e-6
    r = spherical_verdict(alpha, G201)
    assert not r.passed and r.cause == "FitRejected"
    assert ratio_constancy(alpha, G201).mean == pytest.approx(3.0, abs=1e-6)


def test_fit_examples():
    pts = builtin_curve("example1_alpha").sample(G201)
    fit = fit_lorentz_sphere(pts)
    assert fit.signed_r2 == pytest.approx(4.0, abs=1e-9) and fit.rms_residual < 1e-9
    np.testing.assert_allclose(fit.center, (0, 0, 0), atol=1e-8)
    assert fit.radius == pytest.approx(2.0)
    fit = fit_lorentz_sphere(builtin_curve("example3_alpha").sample(G201))
    assert fit.signed_r2 == pytest.approx(-4.0, abs=1e-9)
    line = np.outer(np.linspace(0, 1, 8), [1.0, 2.0, 0.5])
    with pytest.raises(SingularSystem):
        fit_lorentz_sphere(line)
    with pytest.raises(ValueError):
        fit_lorentz_sphere(line[:5])


def test_fit_recovers_translated_spheres():
    rng = np.random.default_rng(8)
    for name in ("example1_alpha", "example2_alpha_corrected", "example3_alpha"):
        c = rng.uniform(-3, 3, size=3)
        pts = builtin_curve(name).sample(G201) + c
        fit = fit_lorentz_sphere(pts)
        value = sphericity_value(builtin_curve(name), 0.0)
        assert abs(fit.signed_r2 - value) < 1e-8
        assert np.linalg.norm(fit.center - c) < 1e-8


def test_scaling_covariance():
    base = builtin_curve("example3_alpha")
    lam = 2.5
    f1 = fit_lorentz_sphere(base.sample(G201))
    f2 = fit_lorentz_sphere(Scaled(base, lam).sample(G201))
    assert f2.signed_r2 == pytest.approx(lam ** 2 * f1.signed_r2, rel=1e-9)
    r1, r2 = ratio_constancy(base, G201), ratio_constancy(Scaled(base, lam), G201)
    assert r1.passed == r2.passed and r1.mean == pytest.approx(r2.mean, abs=1e-9)
    alpha = run_theorem(4).alpha
    s1, s2 = slant_verdict(alpha, G401), slant_verdict(Scaled(alpha, lam), G401)
    assert s1.passed and s2.passed
    assert s1.mean == pytest.approx(s2.mean, abs=1e-6)


def test_exclusion_bookkeeping():
    # planar spacelike circle in the x1-x2 plane: tau = 0 everywhere
    circle = builtin_curve("s12_circle")
    vals, reasons = sphericity_values(circle, G201.nodes)
    assert reasons.tolist().count("VanishingTorsion") == G201.count
    r = spherical_verdict(circle, G201)
    assert r.excluded_nodes == G201.count and r.cause == "VanishingTorsion"
    # tau = kappa: degenerate branch on every node
    deg = _helix_alpha(kg=1.0)
    _, reasons, _ = slant_values(deg, G201.nodes)
    assert all(r == "DegenerateBranch" for r in reasons)
    r = slant_verdict(deg, G201)
    assert not r.passed and r.cause == "DegenerateBranch" and r.excluded_nodes == G201.count


def test_branch_selection_defined():
    for theorem in (4, 5, 6):
        alpha = run_theorem(theorem).alpha
        vals, reasons, branch = slant_values(alpha, G401.nodes)
        assert all(r is None for r in reasons) and np.all(np.isfinite(vals))
        if theorem in (4, 5):
            inv = invariants(alpha, G401.nodes)
            assert np.all(inv.kappa ** 2 - inv.tau ** 2 > 0)
            assert set(branch) == {"kappa2-tau2"}
        else:
            assert set(branch) == {"kappa2+tau2"}


def test_slant_negative_control():
    grid = SampleGrid(-0.8, 0.8, 321)
    gam = synthesize_spherical_curve("S12", "spacelike", lambda s: s ** 2, grid,
                                     kg_derivative=lambda s: 2 * s)
    alpha = construct_alpha(gam, KProfile(Family.ZERO), ConstructionParams(b=1.0), grid)
    r = slant_verdict(alpha, grid)
    assert not r.passed and r.cause == "NotConstant"
    # sigma follows k_g' / (1 - k_g^2)^{3/2} in magnitude
    s = np.array([-0.5, 0.3, 0.6])
    vals, _, _ = slant_values(alpha, s)
    np.testing.assert_allclose(np.abs(vals), np.abs(2 * s / (1 - s ** 4) ** 1.5), rtol=1e-5)


@pytest.mark.parametrize("theorem, sphere", [(1, "lorentzian"), (2, "lorentzian"),
                                             (3, "hyperbolic")])
def test_spherical_theorems(theorem, sphere):
    r = verify_theorem(theorem)
    assert r.passed, r.summary()
    assert r.metrics["sphere"] == sphere
    assert r.metrics["radius"] == pytest.approx(2.0, abs=1e-6)
    assert r.metrics["tau_over_kappa_mean"] == pytest.approx(r.metrics["kg"], abs=1e-6)


@pytest.mark.parametrize("theorem, m, tangent, normal", [
    (4, 0.5, "spacelike", "spacelike"),
    (5, 0.5, "timelike", "spacelike"),
    (6, 0.25, "spacelike", "timelike"),
])
def test_slant_theorems(theorem, m, tangent, normal):
    r = verify_theorem(theorem)
    assert r.passed, r.summary()
    assert abs(r.mean) == pytest.approx(m, abs=1e-3) and r.spread <= 1e-3
    assert (r.metrics["alpha_tangent"], r.metrics["alpha_normal"]) == (tangent, normal)


def test_theorem_parameters_and_failures():
    r = verify_theorem(2, {"b": 3.0, "b2": 0.5})
    assert r.passed and r.metrics["radius"] == pytest.approx(1.5, abs=1e-6)
    r = verify_theorem(4, {"m": -0.5, "n": 1.5, "sign": -1})
    assert r.passed and abs(r.mean) == pytest.approx(0.5, abs=1e-3)
    # minus branch leaves its domain on the grid
    r = verify_theorem(6, {"m": 0.25, "n": 0.9})
    assert not r.passed and r.cause == "DomainError"
    # generator on the wrong surface for the claim
    r = verify_theorem(1, {"generator": "example1_gamma"})
    assert not r.passed and r.cause == "GeneratorCaseMismatch"
    with pytest.raises(ValueError):
        verify_theorem(7)


def test_report_serialisation():
    r = verify_theorem(3)
    d = r.to_dict()
    assert list(d)[:8] == ["subject", "theorem", "grid", "metric", "mean", "spread", "excluded",
                           "verdict"]
    assert r.to_json() == verify_theorem(3).to_json()
    assert r.to_json().endswith("\n")
