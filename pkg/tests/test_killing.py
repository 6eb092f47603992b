"""Killing families, the integrability chain, and the exact plane oracles."""

from fractions import Fraction

import numpy as np
import pytest

from weylspin.clifford import Spinor, build_representation
from weylspin.killing import (
    KillingDatum,
    example_killing_half,
    example_parallel_zero,
    flat_twistor_family,
    integrability_report,
    integrability_residual,
    killing_kernel_determinant,
    killing_residual,
    killing_transport,
)
from weylspin.fields import constant_field
from weylspin.spinops import GateError, dirac, twistor
from weylspin.weyl import Gauge


def sample(seed, n=2, count=12):
    return np.random.default_rng(seed).uniform(-1, 1, (count, n))


@pytest.mark.parametrize("sign", [1, -1])
def test_killing_half_family_satisfies_its_equation(sign):
    gauge, d, rep = example_killing_half(0.7 - 0.2j, sign=sign)
    assert d.psi.weight == Fraction(1, 2)
    assert d.beta.weight == Fraction(-1)
    for x in sample(80 + sign):
        res = killing_residual(gauge, d, x)
        assert np.max(np.abs(res.comp)) < 1e-13
        assert res.weight == Fraction(-1, 2)
        integ = integrability_residual(gauge, d, x)
        assert np.max(np.abs(integ.comp)) < 1e-11
        assert integ.weight == d.psi.weight - 2
        # the density is sign * (i/2) x_1
        assert abs(complex(d.beta.jet(x).v) - sign * 0.5j * x[0]) < 1e-14


def test_killing_half_rejects_bad_sign():
    with pytest.raises(ValueError, match="sign"):
        example_killing_half(1.0, sign=2)


def test_parallel_family_is_parallel():
    gauge, d, rep = example_parallel_zero(1.0, 0.5 + 0.5j)
    assert d.psi.weight == Fraction(0)
    for x in sample(81):
        res = killing_residual(gauge, d, x)
        assert np.max(np.abs(res.comp)) < 1e-13
        assert abs(complex(d.beta.jet(x).v)) == 0.0
        # explicit solution: exp(+i x1^2/4) and exp(-i x1^2/4) components
        q = 0.25j * x[0] ** 2
        expected = np.array([np.exp(q), (0.5 + 0.5j) * np.exp(-q)])
        assert np.allclose(d.psi(x), expected, atol=1e-14)


def test_split_representation_product_is_diagonal():
    _, _, rep = example_parallel_zero(1.0, 1.0)
    prod = rep.gammas[0] @ rep.gammas[1]
    assert np.array_equal(prod, np.diag([1j, -1j]))


def test_integrability_report_killing_half():
    gauge, d, rep = example_killing_half(1.0 + 0.3j)
    pts = sample(82, count=20)
    rep_out = integrability_report(gauge, d, pts)
    assert rep_out["beta_class"] == "imaginary"
    assert rep_out["n"] == 2
    assert rep_out["weight"] == "1/2"
    assert rep_out["points"] == 20
    items = rep_out["items"]
    for key in ("killing", "integrability", "dirac-eigen", "twistor"):
        assert items[key] < 1e-10, (key, items[key])
    # weight 1/2 in the plane makes the pairing coefficient 1/2
    assert abs(items["pairing-coefficient"] - 0.5) < 1e-15
    assert items["faraday-pairing"] < 1e-12
    # contraction-chain items need n >= 3
    assert "ric-contraction" not in items
    assert rep_out["notes"]


def test_integrability_report_parallel_zero():
    gauge, d, rep = example_parallel_zero(0.8, -0.6j)
    pts = sample(83, count=15)
    rep_out = integrability_report(gauge, d, pts)
    assert rep_out["beta_class"] == "zero"
    items = rep_out["items"]
    for key in ("killing", "integrability", "dirac-eigen", "twistor",
                "scalar-curvature", "norm-gradient"):
        assert items[key] < 1e-10, (key, items[key])
    # the pairing coefficient vanishes here, so the Faraday pairing is
    # unconstrained and genuinely nonzero for this family
    assert items["pairing-coefficient"] == 0.0
    assert items["faraday-pairing"] > 1e-3


def test_integrability_gate_rejects_non_killing_data():
    gauge, d, rep = example_killing_half(1.0)
    wrong = KillingDatum(psi=d.psi,
                         beta=constant_field(np.asarray(0.3 + 0j), weight=-1,
                                             arity=0),
                         rep=rep)
    x = np.array([0.5, -0.4])
    with pytest.raises(GateError, match="Killing equation"):
        integrability_residual(gauge, wrong, x)
    with pytest.raises(GateError, match="Killing equation"):
        integrability_report(gauge, wrong, x[None])
    # the defect itself is reportable without the gate
    assert np.max(np.abs(killing_residual(gauge, wrong, x).comp)) > 1e-3


def test_kernel_determinant_vanishes_exactly_on_the_two_branches():
    x1 = np.linspace(-1.0, 1.0, 41)
    for s in (1.0, -1.0):
        det = killing_kernel_determinant(s * 0.5j * x1, x1)
        assert np.max(np.abs(det)) < 1e-15
    # off the branches it is bounded away from zero
    det = killing_kernel_determinant(0.37 + 0.11j, x1)
    assert np.min(np.abs(det)) > 1e-3
    assert killing_kernel_determinant(0.5j, 1.0) == 0.0


@pytest.mark.parametrize("maker", [
    lambda: example_killing_half(0.9 - 0.1j, sign=1),
    lambda: example_killing_half(0.4 + 0.7j, sign=-1),
    lambda: example_parallel_zero(1.0, 0.25j),
])
def test_transport_integration_matches_the_field(maker):
    gauge, d, rep = maker()
    for x0, v in (
        (np.array([-0.5, 0.2]), np.array([1.0, 0.0])),
        (np.array([0.1, -0.6]), np.array([0.6, 0.8])),
    ):
        out = killing_transport(gauge, d, x0, v, length=0.9)
        assert np.allclose(out["endpoint"], x0 + 0.9 * v)
        assert out["residual"] < 1e-6, out["residual"]


def test_flat_family_dirac_image_and_twistor_kernel():
    rng = np.random.default_rng(84)
    for n in (2, 3, 4):
        rep = build_representation(n)
        c0 = rng.normal(size=rep.dim) + 1j * rng.normal(size=rep.dim)
        c1 = rng.normal(size=rep.dim) + 1j * rng.normal(size=rep.dim)
        fam = flat_twistor_family(Spinor(rep, c0), Spinor(rep, c1), weight="1/2")
        g = Gauge.flat(n)
        for x in sample(85 + n, n=n, count=3):
            assert np.allclose(fam(x),
                               np.einsum("a,ast,t->s", x, rep.gammas, c1) + c0,
                               atol=1e-14)
            D = dirac(g, rep, fam, x)
            assert np.allclose(D.comp, -n * c1, atol=1e-12)
            assert np.max(np.abs(twistor(g, rep, fam, x).comp)) < 1e-12


def test_flat_family_rejects_mismatched_representations():
    a = build_representation(2)
    b = build_representation(3)
    with pytest.raises(ValueError, match="representation"):
        flat_twistor_family(Spinor(a, np.ones(a.dim)), Spinor(b, np.ones(b.dim)))


def test_killing_datum_fields():
    gauge, d, rep = example_killing_half(2.0)
    assert d.rep is rep
    assert set(KillingDatum._fields) == {"psi", "beta", "rep"}
    assert np.allclose(d.psi(np.zeros(2)), [2.0, -2.0])
