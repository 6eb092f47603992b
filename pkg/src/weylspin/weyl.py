"""Weyl connections on coordinate charts.

A gauge is a chart metric g together with a 1-form theta; the associated
torsion-free connection satisfies nabla g = -2 theta (x) g.  All tensor
outputs are referred to the orthonormal frame obtained from the
inverse-transpose Cholesky factor of g, where the conformal pairing is the
plain delta, and carry the scaling exponent of their components under a
conformal change of gauge as a weight tag.
"""

from __future__ import annotations

from collections import namedtuple

import numpy as np

from .clifford import Density, SlotTensor
from .fields import (
    ChartField,
    Poly,
    constant_field,
    jet_cholesky,
    jet_einsum,
    jet_lower_inverse,
    jet_transpose,
    polynomial_field,
)

__all__ = [
    "Gauge",
    "FramePack",
    "CurvatureBundle",
    "EwResidual",
    "weyl_christoffels",
    "frame_pack",
    "curvature",
    "faraday",
    "einstein_weyl_residual",
    "change_gauge",
    "connection_residuals",
    "relative_residual",
]


def relative_residual(diff, *terms):
    """Max-norm of ``diff`` scaled by the largest magnitude among ``terms``.

    Residuals compared against tolerances are always normalized this way,
    so the tolerance ladder is scale-free.  A zero scale returns the raw
    difference norm.
    """
    d = float(np.max(np.abs(diff))) if np.size(diff) else 0.0
    scale = 0.0
    for t in terms:
        if np.size(t):
            scale = max(scale, float(np.max(np.abs(t))))
    return d / scale if scale > 0 else d


class Gauge:
    """A chart with metric components, a 1-form theta, and a sample domain.

    ``metric`` (arity 2, weight 2) and ``theta`` (arity 1) are chart fields;
    ``domain`` is an (n, 2) array of box bounds used for sampling.
    """

    __slots__ = ("n", "metric", "theta", "domain", "name", "metric_polys", "theta_polys")

    def __init__(self, n, metric, theta, domain=None, name=None,
                 metric_polys=None, theta_polys=None):
        self.n = int(n)
        self.metric = metric
        self.theta = theta
        if domain is None:
            domain = np.array([[-1.0, 1.0]] * self.n)
        self.domain = np.asarray(domain, dtype=float)
        if self.domain.shape != (self.n, 2):
            raise ValueError(f"domain must be an ({self.n}, 2) box")
        self.name = name
        self.metric_polys = metric_polys
        self.theta_polys = theta_polys

    @classmethod
    def from_polys(cls, metric_polys, theta_polys, domain=None, name=None):
        mp = np.asarray(metric_polys, dtype=object)
        tp = np.asarray(theta_polys, dtype=object)
        return cls(
            mp.shape[0],
            polynomial_field(mp, weight=2),
            polynomial_field(tp, weight=None),
            domain=domain,
            name=name,
            metric_polys=mp,
            theta_polys=tp,
        )

    @classmethod
    def flat(cls, n, domain=None):
        one = [(1.0, (0,) * n)]
        metric = [[Poly(one if i == j else [], n) for j in range(n)] for i in range(n)]
        theta = [Poly([], n) for _ in range(n)]
        return cls.from_polys(metric, theta, domain=domain, name="flat")

    def sample_points(self, rng, count):
        lo, hi = self.domain[:, 0], self.domain[:, 1]
        return lo + (hi - lo) * rng.random((count, self.n))

    def to_dict(self):
        if self.metric_polys is None or self.theta_polys is None:
            raise ValueError("only polynomial-backed gauges are serializable")
        return {
            "n": self.n,
            "name": self.name,
            "domain": self.domain.tolist(),
            "metric": [[p.to_dict() for p in row] for row in self.metric_polys],
            "theta": [p.to_dict() for p in self.theta_polys],
        }

    @classmethod
    def from_dict(cls, d):
        metric = [[Poly.from_dict(p) for p in row] for row in d["metric"]]
        theta = [Poly.from_dict(p) for p in d["theta"]]
        return cls.from_polys(metric, theta, domain=d["domain"], name=d.get("name"))

    def __repr__(self):
        return f"Gauge(n={self.n}, name={self.name!r})"


class FramePack:
    """Frame, Christoffel, and spin-rotation data of a gauge at one point.

    Jets (value + derivatives) unless noted:
      G, TH            metric and theta
      L, S             Cholesky factor and its inverse transpose; the
                       columns of S are the orthonormal frame vectors
      Ginv             inverse metric
      gam_lc, gam_weyl Christoffels [k, i, j] with i the direction slot
      omega_lc_frame   metric spin rotation [k, l, j] = g(D_{s_j} s_k, s_l)
      theta_frame      [i] = theta(s_i)
      omega_weyl       jet [j, k, i]: full-connection frame coefficients
                       (D_{s_i} s_j = sum_k omega_weyl[j, k, i] s_k)
      faraday_chart, faraday_frame  d(theta) as jets
    """

    __slots__ = ("gauge", "point", "n", "G", "TH", "L", "S", "Ginv", "gam_lc",
                 "gam_weyl", "omega_lc_frame", "theta_frame", "omega_weyl",
                 "faraday_chart", "faraday_frame")

    def frame_components(self, X):
        """Chart vector -> components in the orthonormal frame."""
        return self.L.v.T @ np.asarray(X, dtype=float)


def weyl_christoffels(gauge, point):
    """Frame and connection data of the gauge at a chart point."""
    point = np.asarray(point, dtype=float)
    n = gauge.n
    E = np.eye(n)
    pack = FramePack()
    pack.gauge = gauge
    pack.point = point
    pack.n = n
    G = gauge.metric.jet(point)
    TH = gauge.theta.jet(point)
    L = jet_cholesky(G)
    S = jet_transpose(jet_lower_inverse(L), (1, 0))
    Ginv = jet_einsum("ai,bi->ab", S, S)
    Gd = G.gradient()  # [a, b, c] = d_c g_ab
    term = jet_transpose(Gd, (0, 2, 1)) + Gd - jet_transpose(Gd, (2, 0, 1))
    gam_lc = 0.5 * jet_einsum("kl,lij->kij", Ginv, term)
    theta_up = jet_einsum("kl,l->k", Ginv, TH)
    gam_weyl = (gam_lc
                + jet_einsum("i,kj->kij", TH, E)
                + jet_einsum("j,ki->kij", TH, E)
                - jet_einsum("ij,k->kij", G, theta_up))
    # Metric spin rotation: project the frame derivative back onto the frame.
    V = S.gradient() + jet_einsum("bac,ci->bia", gam_lc, S)  # (D_a s_i)^b at [b, i, a]
    W1 = jet_einsum("bc,bka->cka", G, V)
    omega_chart = jet_einsum("cka,cl->kla", W1, S)           # [k, l, a] = g(D_a s_k, s_l)
    omega_lc_frame = jet_einsum("kla,aj->klj", omega_chart, S)
    theta_frame = jet_einsum("a,ai->i", TH, S)
    omega_weyl = (omega_lc_frame
                  + jet_einsum("i,jk->jki", theta_frame, E)
                  + jet_einsum("j,ik->jki", theta_frame, E)
                  - jet_einsum("ij,k->jki", E, theta_frame))
    THg = TH.gradient()  # [a, c] = d_c theta_a
    f_chart = jet_transpose(THg, (1, 0)) - THg  # [a, b] = d_a theta_b - d_b theta_a
    f_frame = jet_einsum("ab,ai,bj->ij", f_chart, S, S)
    pack.G, pack.TH, pack.L, pack.S, pack.Ginv = G, TH, L, S, Ginv
    pack.gam_lc, pack.gam_weyl = gam_lc, gam_weyl
    pack.omega_lc_frame, pack.theta_frame = omega_lc_frame, theta_frame
    pack.omega_weyl = omega_weyl
    pack.faraday_chart, pack.faraday_frame = f_chart, f_frame
    return pack


frame_pack = weyl_christoffels


def faraday(gauge):
    """The 2-form d(theta) as a chart field (chart components, gauge-invariant)."""

    def fn(X):
        THg = gauge.theta.fn(X).gradient()
        return jet_transpose(THg, (1, 0)) - THg

    return ChartField(2, 0, fn)


def _curvature_coeffs(gam):
    """R^l_{kij} at [l, k, i, j] from Christoffel jets [k, i, j] (i = direction)."""
    A = gam.g  # [l, i, j, c] = d_c Gamma^l_{ij}
    d_i = np.transpose(A, (0, 2, 3, 1))  # [l, k, i, j] = d_i Gamma^l_{jk}
    d_j = np.transpose(A, (0, 2, 1, 3))  # [l, k, i, j] = d_j Gamma^l_{ik}
    Gv = gam.v
    quad_i = np.einsum("lim,mjk->lkij", Gv, Gv)
    quad_j = np.einsum("ljm,mik->lkij", Gv, Gv)
    return d_i - d_j + quad_i - quad_j


CurvatureBundle = namedtuple(
    "CurvatureBundle",
    [
        "rfull",          # SlotTensor, frame components R(s_a, s_b, s_c, s_d)
        "rfull_chart",    # ndarray, all-lowered chart components
        "rprime",         # SlotTensor, metric-part curvature (direct route)
        "faraday",        # SlotTensor, frame components of d(theta)
        "faraday_chart",  # ndarray
        "ric",            # SlotTensor, tr of rfull over first/last slots
        "ric_prime",      # SlotTensor
        "scalar",         # Density, trace of ric
        "checks",         # dict of internal cross-route residuals (relative)
    ],
)


def curvature(gauge, point, pack=None):
    """Frame curvature data of the Weyl connection at a chart point.

    The metric-part curvature is computed twice, directly from the
    connection with its scalar part removed and as the full curvature
    minus the Faraday correction, and the relative gap between the two
    routes is reported in ``checks['rprime-route']`` together with the
    trace identities relating ric, ric_prime, and the Faraday form.
    ``pack`` lets callers reuse frame data already computed at the point.
    """
    if pack is None:
        pack = weyl_christoffels(gauge, point)
    n = gauge.n
    E = np.eye(n)
    Sv = pack.S.v
    Gv = pack.G.v

    def lowered_frame(coeffs):
        chart = np.einsum("mkij,ml->ijkl", coeffs, Gv)
        return chart, np.einsum("ijkl,ia,jb,kc,ld->abcd", chart, Sv, Sv, Sv, Sv)

    r_chart, r_frame = lowered_frame(_curvature_coeffs(pack.gam_weyl))
    gam_metric_part = pack.gam_weyl - jet_einsum("i,kj->kij", pack.TH, E)
    _, rp_frame = lowered_frame(_curvature_coeffs(gam_metric_part))
    Ff = pack.faraday_frame.v
    rp_alt = r_frame - np.einsum("ab,cd->abcd", Ff, E)
    ric = np.einsum("abca->bc", r_frame)
    ric_p = np.einsum("abca->bc", rp_frame)
    scal = float(np.trace(ric))
    checks = {
        "rprime-route": relative_residual(rp_frame - rp_alt, rp_frame, rp_alt),
        "ric-prime-sum": relative_residual(ric_p - ric - Ff, ric_p, ric, Ff),
        "alt-ric-faraday": relative_residual(
            0.5 * (ric - ric.T) + 0.5 * n * Ff, ric, Ff),
    }
    return CurvatureBundle(
        rfull=SlotTensor(r_frame, -2),
        rfull_chart=r_chart,
        rprime=SlotTensor(rp_frame, -2),
        faraday=SlotTensor(Ff, -2),
        faraday_chart=pack.faraday_chart.v,
        ric=SlotTensor(ric, -2),
        ric_prime=SlotTensor(ric_p, -2),
        scalar=Density(scal, -2),
        checks=checks,
    )


EwResidual = namedtuple("EwResidual", ["via_ric", "via_ric_prime"])


def einstein_weyl_residual(gauge, point):
    """Pointwise failure of the Einstein condition for the Weyl connection.

    Returns the residual computed from ric and, equivalently, from
    ric_prime; the two must agree (asserted to 1e-10 relative).  Requires
    n >= 3, where the condition is defined.
    """
    if gauge.n < 3:
        raise ValueError("the Einstein condition needs n >= 3")
    b = curvature(gauge, point)
    n = gauge.n
    E = np.eye(n)
    Ff = b.faraday.comp
    res1 = b.ric.comp - (b.scalar.value / n) * E + 0.5 * n * Ff
    res2 = b.ric_prime.comp - (b.scalar.value / n) * E + 0.5 * (n - 2) * Ff
    gap = relative_residual(res1 - res2, res1, res2, b.ric.comp, E * b.scalar.value / n)
    if gap > 1e-10:
        raise AssertionError(f"inconsistent Einstein residual forms (relative gap {gap:.3e})")
    return EwResidual(res1, res2)


def change_gauge(gauge, f):
    """Rescale the metric by exp(2 f) and shift theta by -df.

    The connection itself is unchanged; component fields of weight w pick
    up a factor exp(w f) in the new gauge.
    """

    def metric_fn(X):
        return (2.0 * f.fn(X)).exp() * gauge.metric.fn(X)

    def theta_fn(X):
        return gauge.theta.fn(X) - f.fn(X).gradient()

    name = None if gauge.name is None else f"{gauge.name}+rescaled"
    return Gauge(gauge.n,
                 ChartField(2, 2, metric_fn),
                 ChartField(1, None, theta_fn),
                 domain=gauge.domain,
                 name=name)


def connection_residuals(gauge, point):
    """Pointwise compatibility checks of the connection (all relative).

    torsion      Gamma^k_{ij} - Gamma^k_{ji}
    metric       nabla g + 2 theta (x) g
    trace        sum_b Gamma^b_{ba} - d_a log sqrt(det g) - n theta_a
    """
    pack = weyl_christoffels(gauge, point)
    n = gauge.n
    gam = pack.gam_weyl.v
    Gv, Gg = pack.G.v, pack.G.g
    th = pack.TH.v
    torsion = gam - np.transpose(gam, (0, 2, 1))
    nab = (np.einsum("ijc->cij", Gg)
           - np.einsum("mai,mj->aij", gam, Gv)
           - np.einsum("maj,im->aij", gam, Gv))
    metric_res = nab + 2.0 * np.einsum("a,ij->aij", th, Gv)
    half_trace = 0.5 * np.einsum("ij,ija->a", pack.Ginv.v, Gg)
    trace_res = np.einsum("bba->a", gam) - half_trace - n * th
    return {
        "torsion": relative_residual(torsion, gam, np.ones(1)),
        "metric": relative_residual(metric_res, nab, Gv),
        "trace": relative_residual(trace_res, half_trace, n * th, np.ones(1)),
    }
