"""Covariant spinor operators in a Weyl gauge.

Spinor fields carry a weight tag; their components are referred to the
orthonormal frame of the gauge, and every operator here returns either
frame components (leading slot axes, trailing spinor axis) or relative
residuals of the identity it checks.  Identities that only hold under a
hypothesis (twistor-type fields, vanishing Faraday action, a zero of the
field) verify the hypothesis numerically and raise :class:`GateError`
when it fails, rather than reporting a meaningless residual.
"""

from __future__ import annotations

from collections import namedtuple
from fractions import Fraction

import numpy as np

from .clifford import Density, Spinor, tensor_clifford
from .fields import as_fraction, coordinate_jets, jet_einsum, Jet, polynomial_field
from .weyl import curvature, relative_residual, weyl_christoffels

__all__ = [
    "GateError",
    "SpinorChartField",
    "constant_spinor",
    "polynomial_spinor",
    "gauge_transport_spinor",
    "spin_lc_derivative",
    "weyl_spinor_derivative",
    "dirac",
    "spinor_laplacian",
    "spinorial_curvature",
    "sl_residual",
    "curvature_contraction_checks",
    "twistor",
    "twistor_laplacian_residuals",
    "nabla_dirac_residual",
    "pair_parallel_residuals",
    "first_integrals",
    "ew_connection_apply",
    "hessian_identity_check",
]

# Letters reserved for leading slot axes in internal einsum specs.
_SLOT_LETTERS = "opqr"


class GateError(RuntimeError):
    """A hypothesis required by the requested identity fails numerically."""


class SpinorChartField:
    """Spinor components as a function of chart coordinates, with a weight.

    ``fn`` maps the coordinate jet at a point to the jet of the component
    vector (trailing spinor axis).  The weight is the scaling exponent of
    the components under a conformal change of gauge.
    """

    __slots__ = ("weight", "fn")

    def __init__(self, weight, fn):
        self.weight = as_fraction(weight)
        self.fn = fn

    def jet(self, point):
        return self.fn(coordinate_jets(point))

    def __call__(self, point):
        return self.jet(point).v

    def with_weight(self, weight):
        """Same component function, different weight tag."""
        return SpinorChartField(weight, self.fn)


def constant_spinor(values, weight=0):
    """Field with constant components (all derivatives vanish)."""
    arr = np.asarray(values, dtype=complex)

    def fn(X):
        n = X.n
        return Jet(arr, np.zeros(arr.shape + (n,), dtype=complex),
                   np.zeros(arr.shape + (n, n), dtype=complex))

    return SpinorChartField(weight, fn)


def polynomial_spinor(re_polys, im_polys=None, weight=0):
    """Field whose components are polynomials (plus i times polynomials)."""
    re_f = polynomial_field(np.asarray(re_polys, dtype=object))
    im_f = None if im_polys is None else polynomial_field(np.asarray(im_polys, dtype=object))

    def fn(X):
        j = re_f.fn(X) * (1.0 + 0j)
        if im_f is not None:
            j = j + im_f.fn(X) * 1j
        return j

    return SpinorChartField(weight, fn)


def gauge_transport_spinor(field, f):
    """Components of the same section in the gauge rescaled by exp(2 f).

    A weight-w field picks up the factor exp(w f); the weight tag is
    unchanged.
    """
    w = field.weight

    def fn(X):
        return (float(w) * f.fn(X)).exp() * field.fn(X)

    return SpinorChartField(w, fn)


# -- covariant differentiation -------------------------------------------


def _cov_frame(pack, rep, Q, weight, lc_only=False):
    """Frame covariant derivative of spinor-valued components.

    ``Q`` is a jet with value shape ``lead + (N,)`` where every lead axis
    is a frame slot.  Returns a jet of shape ``(n,) + lead + (N,)`` whose
    first axis is the derivative direction.  The spinor part uses the spin
    rotation coefficients plus the weight-dependent gauge terms (omitted
    when ``lc_only``); each lead slot is corrected with the full
    connection's frame coefficients.
    """
    lead = Q.shape[:-1]
    r = len(lead)
    if r > len(_SLOT_LETTERS):
        raise ValueError(f"at most {len(_SLOT_LETTERS)} slot axes supported")
    LL = _SLOT_LETTERS[:r]
    P = jet_einsum(f"ai,{LL}sa->i{LL}s", pack.S, Q.gradient())
    P = P + jet_einsum(f"kli,klst,{LL}t->i{LL}s",
                       pack.omega_lc_frame, 0.25 * rep.pair_products(), Q)
    if not lc_only:
        th = pack.theta_frame
        theta_cliff = jet_einsum("k,kst->st", th, rep.gammas)
        P = P - 0.5 * jet_einsum(f"ist,tu,{LL}u->i{LL}s", rep.gammas, theta_cliff, Q)
        P = P + (float(weight) - 0.5) * jet_einsum(f"i,{LL}s->i{LL}s", th, Q)
    omega = pack.omega_lc_frame if lc_only else pack.omega_weyl
    for p in range(r):
        sub_q = LL[:p] + "k" + LL[p + 1:]
        P = P - jet_einsum(f"{LL[p]}ki,{sub_q}s->i{LL}s", omega, Q)
    return P


_Stack = namedtuple("_Stack", ["pack", "psi", "P", "H", "dirac", "vd"])


def _derivative_stack(gauge, rep, field, x, pack=None):
    """Everything the second-order identities need, in one pass."""
    if rep.n != gauge.n:
        raise ValueError(f"representation dimension {rep.n} does not match gauge n={gauge.n}")
    if pack is None:
        pack = weyl_christoffels(gauge, x)
    w = field.weight
    psi = field.jet(x)
    P = _cov_frame(pack, rep, psi, w)
    H = _cov_frame(pack, rep, P, w).v            # [i, j, s] = second derivative
    dj = jet_einsum("ist,it->s", rep.gammas, P)
    vd = _cov_frame(pack, rep, dj, w - 1).v      # [i, s]
    return _Stack(pack, psi, P, H, dj, vd)


def spin_lc_derivative(gauge, rep, field, x):
    """Metric-only covariant derivative (gauge terms switched off)."""
    pack = weyl_christoffels(gauge, x)
    P = _cov_frame(pack, rep, field.jet(x), field.weight, lc_only=True)
    return Spinor(rep, P.v, field.weight - 1)


def weyl_spinor_derivative(gauge, rep, field, x, pack=None):
    """Covariant derivative; entry i is the derivative along frame vector i.

    ``pack`` may carry precomputed frame data for the same gauge and point.
    """
    if pack is None:
        pack = weyl_christoffels(gauge, x)
    P = _cov_frame(pack, rep, field.jet(x), field.weight)
    return Spinor(rep, P.v, field.weight - 1)


def dirac(gauge, rep, field, x):
    """Clifford contraction of the covariant derivative."""
    pack = weyl_christoffels(gauge, x)
    P = _cov_frame(pack, rep, field.jet(x), field.weight)
    return Spinor(rep, np.einsum("ist,it->s", rep.gammas, P.v), field.weight - 1)


def spinor_laplacian(gauge, rep, field, x):
    """Negative trace of the second covariant derivative."""
    st = _derivative_stack(gauge, rep, field, x)
    return Spinor(rep, -np.einsum("iis->s", st.H), field.weight - 2)


def spinorial_curvature(gauge, rep, field, x, pack=None):
    """Antisymmetrized second derivative: entry [i, j] is R(s_i, s_j) acting
    on the field."""
    st = _derivative_stack(gauge, rep, field, x, pack=pack)
    comp = st.H - np.transpose(st.H, (1, 0, 2))
    return Spinor(rep, comp, field.weight - 2)


def sl_residual(gauge, rep, field, x):
    """Relative residual of the Lichnerowicz-type formula: the square of
    the Dirac operator against the Laplacian plus scalar-curvature and
    Faraday terms."""
    st = _derivative_stack(gauge, rep, field, x)
    n, w = gauge.n, float(field.weight)
    bund = curvature(gauge, x, pack=st.pack)
    psi = Spinor(rep, st.psi.v, field.weight)
    d2 = np.einsum("ist,it->s", rep.gammas, st.vd)
    lap = -np.einsum("iis->s", st.H)
    rterm = 0.25 * bund.scalar.value * st.psi.v
    fterm = 0.25 * (n - 2 + 2 * w) * tensor_clifford(bund.faraday, psi).comp
    # The field norm joins the scale: on a flat structure in a rescaled
    # gauge every term vanishes analytically and the quotient would
    # otherwise compare rounding noise to rounding noise.
    return relative_residual(d2 - lap - rterm - fterm,
                             d2, lap, rterm, fterm, st.psi.v)


def curvature_contraction_checks(gauge, rep, field, x):
    """Relative residuals of the identities tying the spinor curvature to
    the metric-part curvature and its Clifford contractions.

    Keys: ``spinor-curvature-action`` (two-slot action plus the weighted
    Faraday term), ``curvature-partial-contraction`` (three-slot
    contraction against the trace terms), ``curvature-full-contraction``
    (full contraction against scalar curvature and Faraday action).
    """
    st = _derivative_stack(gauge, rep, field, x)
    n, w = gauge.n, float(field.weight)
    bund = curvature(gauge, x, pack=st.pack)
    psi = Spinor(rep, st.psi.v, field.weight)
    fhat = tensor_clifford(bund.faraday, psi).comp

    rs = st.H - np.transpose(st.H, (1, 0, 2))
    quarter = 0.25 * tensor_clifford(bund.rprime, psi, slots=(3, 4)).comp
    wf = w * np.einsum("ij,s->ijs", bund.faraday.comp, st.psi.v)
    r_action = relative_residual(rs - quarter - wf, rs, quarter, wf)

    lhs3 = tensor_clifford(bund.rprime, psi, slots=(2, 3, 4)).comp
    ricp1 = tensor_clifford(bund.ric_prime, psi, slots=(2,)).comp
    f1 = tensor_clifford(bund.faraday, psi, slots=(2,)).comp
    nf = np.einsum("ist,t->is", rep.gammas, fhat)
    r_partial = relative_residual(lhs3 + 2 * ricp1 + 2 * f1 + nf,
                                  lhs3, 2 * ricp1, 2 * f1, nf)

    lhs4 = tensor_clifford(bund.rprime, psi).comp
    rterm = 2.0 * bund.scalar.value * st.psi.v
    fterm = 2.0 * (n - 2) * fhat
    r_full = relative_residual(lhs4 - rterm - fterm, lhs4, rterm, fterm)

    return {
        "spinor-curvature-action": r_action,
        "curvature-partial-contraction": r_partial,
        "curvature-full-contraction": r_full,
    }


def twistor(gauge, rep, field, x):
    """Trace-free part of the covariant derivative (twistor operator)."""
    pack = weyl_christoffels(gauge, x)
    P = _cov_frame(pack, rep, field.jet(x), field.weight)
    d = np.einsum("ist,it->s", rep.gammas, P.v)
    comp = P.v + (1.0 / gauge.n) * np.einsum("ist,t->is", rep.gammas, d)
    return Spinor(rep, comp, field.weight - 1)


def _twistor_gate(rep, n, P, dval, psiv, gate_tol, what):
    # The field norm joins the scale so that exactly parallel data (zero
    # derivative and zero Dirac image) does not divide noise by noise.
    correction = (1.0 / n) * np.einsum("ist,t->is", rep.gammas, dval)
    gate = relative_residual(P.v + correction, P.v, correction, psiv)
    if gate > gate_tol:
        raise GateError(f"{what} applies to twistor-type fields only; "
                        f"twistor residual {gate:.3e} exceeds gate {gate_tol:.1e}")


def twistor_laplacian_residuals(gauge, rep, field, x, gate_tol=1e-8):
    """Relative residuals of the two twistor-type eigen identities.

    ``laplacian``: the Laplacian against 1/n times the Dirac square;
    ``dirac-square``: the Dirac square against its curvature expression.
    Gated on the field being twistor-type.
    """
    st = _derivative_stack(gauge, rep, field, x)
    n, w = gauge.n, float(field.weight)
    _twistor_gate(rep, n, st.P, st.dirac.v, st.psi.v, gate_tol, "the eigen identity")
    bund = curvature(gauge, x, pack=st.pack)
    psi = Spinor(rep, st.psi.v, field.weight)
    d2 = np.einsum("ist,it->s", rep.gammas, st.vd)
    lap = -np.einsum("iis->s", st.H)
    r_lap = relative_residual(lap - d2 / n, lap, d2 / n, st.psi.v)
    coef = n / (4.0 * (n - 1))
    rterm = coef * bund.scalar.value * st.psi.v
    fterm = coef * (n - 2 + 2 * w) * tensor_clifford(bund.faraday, psi).comp
    r_d2 = relative_residual(d2 - rterm - fterm, d2, rterm, fterm, st.psi.v)
    return {"laplacian": r_lap, "dirac-square": r_d2}


def _dirac_gradient_rhs(gauge, rep, bund, psi, w):
    """Algebraic expression for the derivative of the Dirac image of a
    twistor-type field; entry [i, s]."""
    n = gauge.n
    ricp1 = tensor_clifford(bund.ric_prime, psi, slots=(2,)).comp
    f1 = tensor_clifford(bund.faraday, psi, slots=(2,)).comp
    fhat = tensor_clifford(bund.faraday, psi).comp
    gam_psi = np.einsum("ist,t->is", rep.gammas, psi.comp)
    gam_fhat = np.einsum("ist,t->is", rep.gammas, fhat)
    R = bund.scalar.value
    return (n / (n - 2.0)) * (
        -0.5 * ricp1
        + (R / (4.0 * (n - 1))) * gam_psi
        + (w - 0.5) * (f1 + (1.0 / (2.0 * (n - 1))) * gam_fhat)
    )


def nabla_dirac_residual(gauge, rep, field, x, gate_tol=1e-8):
    """Relative residual of the covariant derivative of the Dirac image
    against its algebraic curvature expression (n >= 3, twistor-type)."""
    if gauge.n < 3:
        raise ValueError("the Dirac gradient identity needs n >= 3")
    st = _derivative_stack(gauge, rep, field, x)
    _twistor_gate(rep, gauge.n, st.P, st.dirac.v, st.psi.v, gate_tol,
                  "the Dirac gradient identity")
    bund = curvature(gauge, x, pack=st.pack)
    psi = Spinor(rep, st.psi.v, field.weight)
    rhs = _dirac_gradient_rhs(gauge, rep, bund, psi, float(field.weight))
    return relative_residual(st.vd - rhs, st.vd, rhs, st.dirac.v, st.psi.v)


def ew_connection_apply(gauge, rep, field, x, X=None):
    """Connection correction coupling a field to its Dirac image.

    Returns the entries K(s_i) psi (or the contraction K(X) psi for a
    chart vector X); for twistor-type fields, K(s_i) psi equals minus the
    derivative of the Dirac image along s_i.  Requires n >= 3.
    """
    if gauge.n < 3:
        raise ValueError("the connection correction needs n >= 3")
    pack = weyl_christoffels(gauge, x)
    bund = curvature(gauge, x, pack=pack)
    psi = Spinor(rep, field.jet(x).v, field.weight)
    comp = -_dirac_gradient_rhs(gauge, rep, bund, psi, float(field.weight))
    if X is not None:
        comp = np.einsum("i,is->s", pack.frame_components(X), comp)
    return Spinor(rep, comp, field.weight - 2)


def pair_parallel_residuals(gauge, rep, field, x):
    """Residuals of the parallel transport system for the pair
    (field, Dirac image).

    ``top``: derivative of the field plus 1/n times the Clifford insertion
    of the Dirac image (zero exactly for twistor-type fields);
    ``bottom``: derivative of the Dirac image plus the connection
    correction applied to the field (n >= 3).
    """
    if gauge.n < 3:
        raise ValueError("the pair system needs n >= 3")
    st = _derivative_stack(gauge, rep, field, x)
    bund = curvature(gauge, x, pack=st.pack)
    psi = Spinor(rep, st.psi.v, field.weight)
    correction = (1.0 / gauge.n) * np.einsum("ist,t->is", rep.gammas, st.dirac.v)
    top = relative_residual(st.P.v + correction, st.P.v, correction, st.psi.v)
    rhs = _dirac_gradient_rhs(gauge, rep, bund, psi, float(field.weight))
    bottom = relative_residual(st.vd - rhs, st.vd, rhs, st.dirac.v, st.psi.v)
    return {"top": top, "bottom": bottom}


def first_integrals(gauge, rep, field, x, gate_tol=1e-8):
    """Values and parallelism residuals of the two conserved densities of
    a twistor-type field.

    ``C``: the real pairing of the field with its Dirac image (weight
    2w - 1); ``Q``: the norm product minus the traced square of the
    vector pairing (weight 4w - 2).  ``dC`` and ``dQ`` are the relative
    residuals of the parallel-density equations.  Gated on the field
    being twistor-type and on weight 1/2 or vanishing Faraday action.
    """
    if rep.n != gauge.n:
        raise ValueError(f"representation dimension {rep.n} does not match gauge n={gauge.n}")
    pack = weyl_christoffels(gauge, x)
    w = field.weight
    psi = field.jet(x)
    P = _cov_frame(pack, rep, psi, w)
    dj = jet_einsum("ist,it->s", rep.gammas, P)
    _twistor_gate(rep, gauge.n, P, dj.v, psi.v, gate_tol, "the conserved densities")
    if w != Fraction(1, 2):
        fhat = np.einsum("ij,ist,jtu,u->s", pack.faraday_frame.v,
                         rep.gammas, rep.gammas, psi.v)
        gate = relative_residual(fhat, psi.v)
        if gate > gate_tol:
            raise GateError("the conserved densities need weight 1/2 or a vanishing "
                            f"Faraday action; relative action {gate:.3e} exceeds "
                            f"gate {gate_tol:.1e}")
    wc = float(2 * w - 1)
    wq = float(4 * w - 2)
    th = pack.TH.v
    c_jet = jet_einsum("s,s->", psi.conj(), dj).real()
    dC = c_jet.g + wc * th * c_jet.v
    r_c = relative_residual(dC, c_jet.g, wc * th * c_jet.v, np.atleast_1d(c_jet.v))
    u1 = jet_einsum("s,s->", psi.conj(), psi).real()
    u2 = jet_einsum("s,s->", dj.conj(), dj).real()
    cross = jet_einsum("s,ist,t->i", dj.conj(), rep.gammas, psi).real()
    q_jet = u1 * u2 - jet_einsum("i,i->", cross, cross)
    dQ = q_jet.g + wq * th * q_jet.v
    r_q = relative_residual(dQ, q_jet.g, wq * th * q_jet.v, np.atleast_1d(q_jet.v))
    return {
        "C": Density(float(c_jet.v), 2 * w - 1),
        "Q": Density(float(q_jet.v), 4 * w - 2),
        "dC": r_c,
        "dQ": r_q,
    }


def hessian_identity_check(gauge, rep, field, x, gate_tol=1e-8):
    """At a zero of the field: frame Hessian of the norm density against
    2/n^2 times delta times the squared Dirac norm.

    Returns the relative residual, both matrices, the first-derivative
    norm of the density at the point, and a ``degenerate`` flag (True when
    the Dirac image vanishes too, so the zero is not isolated at the
    numerical level).  Gated on the field actually vanishing at x.
    """
    pack = weyl_christoffels(gauge, x)
    n = gauge.n
    w2 = float(2 * field.weight)
    psi = field.jet(x)
    P = _cov_frame(pack, rep, psi, field.weight)
    d = np.einsum("ist,it->s", rep.gammas, P.v)
    dnorm2 = float(np.real(np.vdot(d, d)))
    if float(np.linalg.norm(psi.v)) > gate_tol * (1.0 + np.sqrt(dnorm2)):
        raise GateError("the Hessian identity holds at zeros of the field; "
                        f"|field| = {np.linalg.norm(psi.v):.3e} at this point")
    u = jet_einsum("s,s->", psi.conj(), psi).real()
    th = pack.TH
    V = u.g + w2 * th.v * u.v
    dV = u.h + w2 * (th.g * u.v + np.einsum("b,a->ba", th.v, u.g))
    gam = pack.gam_weyl.v
    Hc = (np.transpose(dV, (1, 0))
          - np.einsum("cab,c->ab", gam, V)
          + w2 * np.einsum("a,b->ab", th.v, V))
    Sv = pack.S.v
    Hf = np.einsum("ai,ab,bj->ij", Sv, Hc, Sv)
    expected = (2.0 / n ** 2) * dnorm2 * np.eye(n)
    return {
        "residual": relative_residual(Hf - expected, Hf, expected),
        "hessian": Hf,
        "expected": expected,
        "gradient": float(np.max(np.abs(V))),
        "degenerate": bool(dnorm2 < 1e-12),
    }
