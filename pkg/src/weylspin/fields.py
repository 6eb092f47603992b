"""Second-order jet arithmetic and the slot calculus for frame tensors.

A jet packs the value of a smooth quantity at a chart point together with
its first and second partial derivatives.  Values may be arrays of any
shape; derivative axes always trail the value axes, so ``j.g[..., a]`` is
the a-th partial of the value array and ``j.h[..., a, b]`` the (a, b)
second partial.  Arithmetic degrades gracefully: combining a second-order
jet with a first-order one yields a first-order jet, and plain numbers or
ndarrays act as constants of unlimited order.

The slot helpers (permute, sym, alt, zyk, zyk_four, conf_trace) act on
plain ndarrays or on any object exposing ``comp`` (an ndarray), ``arity``
(how many leading axes are tensor slots) and ``with_comp`` (rebuild with
new components).  Non-slot trailing axes ride along untouched.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

__all__ = [
    "Jet",
    "coordinate_jets",
    "jet_einsum",
    "jet_stack",
    "jet_transpose",
    "jet_cholesky",
    "jet_lower_inverse",
    "finite_difference_jet",
    "Poly",
    "ChartField",
    "constant_field",
    "polynomial_field",
    "jet_eval",
    "as_fraction",
    "permute",
    "compose",
    "transposition",
    "sym",
    "alt",
    "sym_alt",
    "zyk",
    "zyk_four",
    "conf_trace",
]

# Derivative axes in jet_einsum specs use these reserved labels.
_JET_LABELS = ("X", "Y")


def as_fraction(w):
    """Coerce a weight to an exact rational (int, Fraction, or '1/2' string)."""
    if isinstance(w, Fraction):
        return w
    if isinstance(w, (int, np.integer)):
        return Fraction(int(w))
    if isinstance(w, str):
        return Fraction(w)
    raise TypeError(f"weights must be exact rationals, got {w!r}")


def _const(x):
    # Fractions appear as scalar factors (weights); numpy would box them as objects.
    if isinstance(x, Fraction):
        return float(x)
    return x


def _widen(arr, vshape, tail):
    """Broadcast a derivative array (value axes + tail jet axes) to vshape + tail."""
    if arr is None:
        return None
    target = vshape + arr.shape[arr.ndim - tail:]
    return np.broadcast_to(arr, target)


class Jet:
    """Value plus trailing first/second derivative arrays.

    v : ndarray of any shape
    g : ndarray of shape ``v.shape + (n,)`` or None
    h : ndarray of shape ``v.shape + (n, n)`` or None (requires g)
    """

    __slots__ = ("v", "g", "h")

    def __init__(self, v, g=None, h=None):
        v = np.asarray(v)
        if g is None and h is not None:
            raise ValueError("jet with hessian but no gradient")
        if g is not None:
            g = np.asarray(g)
            if g.shape[:-1] != v.shape:
                raise ValueError(f"gradient shape {g.shape} does not extend value shape {v.shape}")
        if h is not None:
            h = np.asarray(h)
            if h.shape != v.shape + (g.shape[-1], g.shape[-1]):
                raise ValueError(f"hessian shape {h.shape} does not match {v.shape} + jet axes")
        self.v = v
        self.g = g
        self.h = h

    @property
    def order(self):
        return 0 if self.g is None else (1 if self.h is None else 2)

    @property
    def n(self):
        return None if self.g is None else self.g.shape[-1]

    @property
    def shape(self):
        return self.v.shape

    def __repr__(self):
        return f"Jet(shape={self.v.shape}, order={self.order}, n={self.n})"

    # -- structural ops -------------------------------------------------

    def partial(self, a):
        """Jet of the a-th partial derivative (order drops by one)."""
        if self.g is None:
            raise ValueError("jet carries no first derivatives")
        return Jet(self.g[..., a], None if self.h is None else self.h[..., a, :], None)

    def gradient(self):
        """Jet of the full gradient: value gains a trailing axis, order drops."""
        if self.g is None:
            raise ValueError("jet carries no first derivatives")
        return Jet(self.g, self.h, None)

    def reshape(self, shape):
        shape = tuple(shape)
        v = self.v.reshape(shape)
        g = None if self.g is None else self.g.reshape(v.shape + (self.n,))
        h = None if self.h is None else self.h.reshape(v.shape + (self.n, self.n))
        return Jet(v, g, h)

    def __getitem__(self, idx):
        # idx addresses value axes only (no Ellipsis): jet axes trail and survive.
        return Jet(
            self.v[idx],
            None if self.g is None else self.g[idx],
            None if self.h is None else self.h[idx],
        )

    # -- ring ops --------------------------------------------------------

    def __neg__(self):
        return Jet(-self.v, None if self.g is None else -self.g,
                   None if self.h is None else -self.h)

    def __add__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            v = self.v + other.v
            g = h = None
            if order >= 1:
                g = _widen(self.g, v.shape, 1) + _widen(other.g, v.shape, 1)
            if order == 2:
                h = _widen(self.h, v.shape, 2) + _widen(other.h, v.shape, 2)
            return Jet(v, g, h)
        c = np.asarray(_const(other))
        v = self.v + c
        return Jet(v, _widen(self.g, v.shape, 1), _widen(self.h, v.shape, 2))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(_const(other)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            v = self.v * other.v
            g = h = None
            if order >= 1:
                ag = _widen(self.g, v.shape, 1)
                bg = _widen(other.g, v.shape, 1)
                g = ag * other.v[..., None] + self.v[..., None] * bg
            if order == 2:
                ah = _widen(self.h, v.shape, 2)
                bh = _widen(other.h, v.shape, 2)
                cross = ag[..., :, None] * bg[..., None, :]
                h = (ah * other.v[..., None, None] + self.v[..., None, None] * bh
                     + cross + np.swapaxes(cross, -1, -2))
            return Jet(v, g, h)
        c = np.asarray(_const(other))
        v = self.v * c
        g = None if self.g is None else _widen(self.g, v.shape, 1) * c[..., None]
        h = None if self.h is None else _widen(self.h, v.shape, 2) * c[..., None, None]
        return Jet(v, g, h)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        return self * (1.0 / np.asarray(_const(other)))

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def _reciprocal(self):
        v = 1.0 / self.v
        g = h = None
        if self.g is not None:
            g = -self.g * (v * v)[..., None]
        if self.h is not None:
            h = (-self.h * (v * v)[..., None, None]
                 + 2.0 * (self.g[..., :, None] * self.g[..., None, :]) * (v ** 3)[..., None, None])
        return Jet(v, g, h)

    def __pow__(self, p):
        if isinstance(p, Jet):
            raise TypeError("jet exponents are not supported")
        p = float(p)
        return self._chain(lambda x: x ** p,
                           lambda x: p * x ** (p - 1),
                           lambda x: p * (p - 1) * x ** (p - 2))

    # -- analytic ops ----------------------------------------------------

    def _chain(self, f, df, d2f):
        v = f(self.v)
        g = h = None
        if self.g is not None:
            g = df(self.v)[..., None] * self.g
        if self.h is not None:
            h = (df(self.v)[..., None, None] * self.h
                 + d2f(self.v)[..., None, None] * (self.g[..., :, None] * self.g[..., None, :]))
        return Jet(v, g, h)

    def exp(self):
        return self._chain(np.exp, np.exp, np.exp)

    def log(self):
        return self._chain(np.log, lambda x: 1.0 / x, lambda x: -1.0 / (x * x))

    def sqrt(self):
        return self._chain(np.sqrt, lambda x: 0.5 / np.sqrt(x), lambda x: -0.25 * x ** -1.5)

    def sin(self):
        return self._chain(np.sin, np.cos, lambda x: -np.sin(x))

    def cos(self):
        return self._chain(np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x))

    # conj/real/imag are R-linear: valid because chart coordinates are real.

    def conj(self):
        return Jet(np.conj(self.v), None if self.g is None else np.conj(self.g),
                   None if self.h is None else np.conj(self.h))

    def real(self):
        return Jet(self.v.real, None if self.g is None else self.g.real,
                   None if self.h is None else self.h.real)

    def imag(self):
        return Jet(self.v.imag, None if self.g is None else self.g.imag,
                   None if self.h is None else self.h.imag)


def coordinate_jets(point):
    """Order-2 jet of the identity chart map at ``point``."""
    point = np.asarray(point, dtype=float)
    n = point.shape[-1]
    return Jet(point, np.eye(n), np.zeros((n, n, n)))


def jet_einsum(spec, *ops):
    """einsum over jet values with automatic Leibniz expansion.

    ``spec`` addresses value axes only and must name its output
    (``'ij,j->i'``); the labels X and Y are reserved for derivative axes.
    Operands may be Jet instances or plain ndarrays (constants).  The
    result order is the minimum order among the jet operands.
    """
    if "->" not in spec:
        raise ValueError("jet_einsum requires an explicit output spec")
    if any(lbl in spec for lbl in _JET_LABELS):
        raise ValueError("labels X and Y are reserved for derivative axes")
    lhs, out = spec.split("->")
    subs = lhs.split(",")
    if len(subs) != len(ops):
        raise ValueError(f"{len(subs)} subscripts for {len(ops)} operands")
    is_jet = [isinstance(op, Jet) for op in ops]
    if not any(is_jet):
        return np.einsum(spec, *ops)
    order = min(op.order for op, j in zip(ops, is_jet) if j)
    ns = {op.n for op, j in zip(ops, is_jet) if j and op.n is not None}
    if len(ns) > 1:
        raise ValueError(f"mixed jet dimensions {ns}")
    vals = [op.v if j else np.asarray(op) for op, j in zip(ops, is_jet)]
    v = np.einsum(",".join(subs) + "->" + out, *vals)
    g = h = None
    if order >= 1:
        g = 0
        for k, jk in enumerate(is_jet):
            if not jk:
                continue
            arrs = list(vals)
            arrs[k] = ops[k].g
            sl = list(subs)
            sl[k] = subs[k] + "X"
            g = g + np.einsum(",".join(sl) + "->" + out + "X", *arrs)
    if order == 2:
        h = 0
        jet_ix = [k for k, jk in enumerate(is_jet) if jk]
        for k in jet_ix:
            arrs = list(vals)
            arrs[k] = ops[k].h
            sl = list(subs)
            sl[k] = subs[k] + "XY"
            h = h + np.einsum(",".join(sl) + "->" + out + "XY", *arrs)
        for a, k in enumerate(jet_ix):
            for l in jet_ix[a + 1:]:
                arrs = list(vals)
                arrs[k] = ops[k].g
                arrs[l] = ops[l].g
                sl = list(subs)
                sl[k] = subs[k] + "X"
                sl[l] = subs[l] + "Y"
                cross = np.einsum(",".join(sl) + "->" + out + "XY", *arrs)
                h = h + cross + np.swapaxes(cross, -1, -2)
    return Jet(v, g, h)


def jet_stack(jets, axis=0):
    """Stack jets along a new leading value axis."""
    jets = list(jets)
    if axis < 0:
        raise ValueError("axis must address value axes from the front")
    order = min(j.order for j in jets)
    v = np.stack([j.v for j in jets], axis=axis)
    g = np.stack([j.g for j in jets], axis=axis) if order >= 1 else None
    h = np.stack([j.h for j in jets], axis=axis) if order == 2 else None
    return Jet(v, g, h)


def jet_transpose(jet, axes):
    """Permute the value axes of a jet; derivative axes stay trailing."""
    axes = tuple(axes)
    v = np.transpose(jet.v, axes)
    r = len(axes)
    g = None if jet.g is None else np.transpose(jet.g, axes + (r,))
    h = None if jet.h is None else np.transpose(jet.h, axes + (r, r + 1))
    return Jet(v, g, h)


def jet_cholesky(gram):
    """Lower-triangular jet L with L Lᵀ = gram (symmetric positive definite).

    Raises ValueError when a pivot is non-positive, i.e. the matrix is not
    positive definite at this point.
    """
    n = gram.shape[0]
    zero = gram[0, 0] * 0.0
    L = [[zero] * n for _ in range(n)]
    for j in range(n):
        acc = gram[j, j]
        for k in range(j):
            acc = acc - L[j][k] * L[j][k]
        if not acc.v > 0:
            raise ValueError("matrix is not positive definite at this point")
        L[j][j] = acc.sqrt()
        for i in range(j + 1, n):
            acc = gram[i, j]
            for k in range(j):
                acc = acc - L[i][k] * L[j][k]
            L[i][j] = acc / L[j][j]
    return jet_stack([jet_stack(row) for row in L])


def jet_lower_inverse(L):
    """Inverse of a lower-triangular jet matrix by forward substitution."""
    n = L.shape[0]
    zero = L[0, 0] * 0.0
    inv = [[zero] * n for _ in range(n)]
    for j in range(n):
        inv[j][j] = 1.0 / L[j, j]
        for i in range(j + 1, n):
            acc = zero
            for k in range(j, i):
                acc = acc + L[i, k] * inv[k][j]
            inv[i][j] = -acc / L[i, i]
    return jet_stack([jet_stack(row) for row in inv])


def finite_difference_jet(fn, point, step=1e-4):
    """Central-difference jet of ``fn`` at ``point`` (independent cross-check)."""
    x = np.asarray(point, dtype=float)
    n = x.size

    def at(*deltas):
        y = x.copy()
        for a, da in deltas:
            y[a] += da
        return np.asarray(fn(y))

    f0 = np.asarray(fn(x))
    g = np.stack([(at((a, step)) - at((a, -step))) / (2 * step) for a in range(n)], axis=-1)
    h = np.zeros(f0.shape + (n, n), dtype=np.result_type(g, float))
    for a in range(n):
        h[..., a, a] = (at((a, step)) - 2 * f0 + at((a, -step))) / step ** 2
        for b in range(a + 1, n):
            m = (at((a, step), (b, step)) - at((a, step), (b, -step))
                 - at((a, -step), (b, step)) + at((a, -step), (b, -step))) / (4 * step ** 2)
            h[..., a, b] = m
            h[..., b, a] = m
    return Jet(f0, g, h)


class Poly:
    """Real polynomial in n variables stored as ((coeff, exponent-tuple), ...).

    Evaluation produces jets from the closed-form derivatives, so polynomial
    fields double as an exactness oracle for the jet arithmetic.
    """

    __slots__ = ("terms", "n")

    def __init__(self, terms, n=None):
        self.terms = tuple((float(c), tuple(int(e) for e in exps)) for c, exps in terms)
        if n is None:
            if not self.terms:
                raise ValueError("empty polynomial needs an explicit variable count")
            n = len(self.terms[0][1])
        self.n = int(n)
        for _, exps in self.terms:
            if len(exps) != self.n:
                raise ValueError("inconsistent exponent tuple length")

    def jet(self, point):
        x = np.asarray(point, dtype=float)
        v = 0.0
        g = np.zeros(self.n)
        h = np.zeros((self.n, self.n))
        for c, exps in self.terms:
            powers = [x[i] ** e for i, e in enumerate(exps)]

            def rest(*skip):
                out = c
                for i, p in enumerate(powers):
                    if i not in skip:
                        out *= p
                return out

            v += rest()
            for a, ea in enumerate(exps):
                if ea == 0:
                    continue
                g[a] += ea * x[a] ** (ea - 1) * rest(a)
                if ea >= 2:
                    h[a, a] += ea * (ea - 1) * x[a] ** (ea - 2) * rest(a)
                for b in range(a + 1, self.n):
                    eb = exps[b]
                    if eb == 0:
                        continue
                    m = ea * eb * x[a] ** (ea - 1) * x[b] ** (eb - 1) * rest(a, b)
                    h[a, b] += m
                    h[b, a] += m
        return Jet(v, g, h)

    def values(self, points):
        pts = np.asarray(points, dtype=float)
        out = np.zeros(pts.shape[:-1])
        for c, exps in self.terms:
            term = np.full(pts.shape[:-1], c)
            for i, e in enumerate(exps):
                if e:
                    term = term * pts[..., i] ** e
            out += term
        return out

    def diff(self, a):
        terms = []
        for c, exps in self.terms:
            e = exps[a]
            if e:
                new = list(exps)
                new[a] = e - 1
                terms.append((c * e, tuple(new)))
        return Poly(terms, self.n)

    def to_dict(self):
        return {"n": self.n, "terms": [[c, list(e)] for c, e in self.terms]}

    @classmethod
    def from_dict(cls, d):
        return cls([(c, tuple(e)) for c, e in d["terms"]], d["n"])

    def __repr__(self):
        return f"Poly({self.terms!r}, n={self.n})"


class ChartField:
    """Tensor-valued function of chart coordinates with a weight tag.

    ``fn`` maps the coordinate jet at a point to the jet of the components;
    the value shape is ``(n,) * arity``.  The weight is the scaling exponent
    of the frame-referred components under a conformal gauge change (None
    for quantities that do not rescale multiplicatively, such as the gauge
    1-form itself).
    """

    __slots__ = ("arity", "weight", "fn")

    def __init__(self, arity, weight, fn):
        self.arity = int(arity)
        self.weight = None if weight is None else as_fraction(weight)
        self.fn = fn

    def jet(self, point):
        return self.fn(coordinate_jets(point))

    def __call__(self, point):
        return self.jet(point).v


def jet_eval(field, point):
    """Jets of all components of a field at a chart point."""
    return field.jet(point)


def constant_field(values, weight=0, arity=None):
    arr = np.asarray(values)
    if arity is None:
        arity = arr.ndim

    def fn(X):
        n = X.n
        return Jet(arr, np.zeros(arr.shape + (n,), dtype=arr.dtype),
                   np.zeros(arr.shape + (n, n), dtype=arr.dtype))

    return ChartField(arity, weight, fn)


def polynomial_field(polys, weight=0):
    arr = np.asarray(polys, dtype=object)
    flat = list(arr.ravel())
    if not flat:
        raise ValueError("a polynomial field needs at least one component")
    n = flat[0].n
    for p in flat:
        if p.n != n:
            raise ValueError("polynomials must share one variable count")
    k = len(flat)
    # All terms of all component polynomials in one block, tagged by owner,
    # so a jet evaluation is a handful of vectorized reductions instead of
    # a Python loop per term (matches Poly.jet; tested against it).
    owner = np.repeat(np.arange(k), [len(p.terms) for p in flat])
    coeff = np.array([c for p in flat for c, _ in p.terms], dtype=float)
    exps = np.array([e for p in flat for _, e in p.terms],
                    dtype=np.int64).reshape(-1, n)

    def fn(X):
        x = np.asarray(X.v, dtype=float)
        v = np.zeros(k)
        g = np.zeros((k, n))
        h = np.zeros((k, n, n))
        if coeff.size:
            P = x[None, :] ** exps
            Pm1 = np.where(exps > 0, x[None, :] ** np.maximum(exps - 1, 0), 0.0)
            Pm2 = np.where(exps > 1, x[None, :] ** np.maximum(exps - 2, 0), 0.0)
            v = np.bincount(owner, weights=coeff * P.prod(axis=1), minlength=k)
            rest = np.empty_like(P)
            for a in range(n):
                cols = P.copy()
                cols[:, a] = 1.0
                rest[:, a] = cols.prod(axis=1)
            da = exps * Pm1
            for a in range(n):
                g[:, a] = np.bincount(owner, weights=coeff * da[:, a] * rest[:, a],
                                      minlength=k)
                h[:, a, a] = np.bincount(
                    owner, weights=coeff * exps[:, a] * (exps[:, a] - 1)
                    * Pm2[:, a] * rest[:, a], minlength=k)
                for b in range(a + 1, n):
                    cols = P.copy()
                    cols[:, a] = 1.0
                    cols[:, b] = 1.0
                    m = np.bincount(owner, weights=coeff * da[:, a] * da[:, b]
                                    * cols.prod(axis=1), minlength=k)
                    h[:, a, b] = m
                    h[:, b, a] = m
        return Jet(v.reshape(arr.shape), g.reshape(arr.shape + (n,)),
                   h.reshape(arr.shape + (n, n)))

    return ChartField(arr.ndim, weight, fn)


# -- slot calculus ------------------------------------------------------


def _as_slots(A):
    """(arity, components, rebuild) for ndarrays or slot-tagged objects."""
    if hasattr(A, "comp") and hasattr(A, "arity"):
        return A.arity, np.asarray(A.comp), A.with_comp
    arr = np.asarray(A)
    return arr.ndim, arr, lambda c: c


def _permute_axes(comp, sigma, arity):
    sigma = tuple(int(s) for s in sigma)
    r = len(sigma)
    if sorted(sigma) != list(range(1, r + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{r}")
    if r > arity:
        raise ValueError(f"permutation of {r} slots on arity-{arity} tensor")
    axes = [0] * r
    for k in range(r):
        axes[sigma[k] - 1] = k
    axes += list(range(r, comp.ndim))
    return np.transpose(comp, axes)


def permute(A, sigma):
    """Pull slot indices back through sigma: result(i_1..i_r) = A(i_sigma(1), ..).

    A left group action: permute(permute(A, s), t) == permute(A, compose(t, s)).
    Shorter sigmas act on the leading slots, fixing the rest.
    """
    arity, comp, rebuild = _as_slots(A)
    return rebuild(_permute_axes(comp, sigma, arity))


def compose(tau, sigma):
    """Composite permutation tau∘sigma (apply sigma first)."""
    r = max(len(tau), len(sigma))
    t = tuple(tau) + tuple(range(len(tau) + 1, r + 1))
    s = tuple(sigma) + tuple(range(len(sigma) + 1, r + 1))
    return tuple(t[s[x] - 1] for x in range(r))


def transposition(a, b, r):
    """The permutation of 1..r exchanging slots a and b."""
    img = list(range(1, r + 1))
    img[a - 1], img[b - 1] = img[b - 1], img[a - 1]
    return tuple(img)


def sym(A, a=1, b=2):
    """A plus A with slots a and b exchanged (no 1/2 factor)."""
    arity, comp, rebuild = _as_slots(A)
    if arity < 2:
        raise ValueError("sym needs arity >= 2")
    return rebuild(comp + np.swapaxes(comp, a - 1, b - 1))


def alt(A, a=1, b=2):
    """A minus A with slots a and b exchanged (no 1/2 factor)."""
    arity, comp, rebuild = _as_slots(A)
    if arity < 2:
        raise ValueError("alt needs arity >= 2")
    return rebuild(comp - np.swapaxes(comp, a - 1, b - 1))


def sym_alt(A):
    """Both the symmetrized and antisymmetrized tensors, unhalved."""
    return sym(A), alt(A)


def zyk(A):
    """Sum over the cyclic permutations of the first three slots."""
    arity, comp, rebuild = _as_slots(A)
    if arity < 3:
        raise ValueError("cyclic sum needs arity >= 3")
    out = comp.copy()
    for sigma in ((2, 3, 1), (3, 1, 2)):
        out = out + _permute_axes(comp, sigma, arity)
    return rebuild(out)


def zyk_four(A):
    """Sum over the cyclic permutations of the first four slots."""
    arity, comp, rebuild = _as_slots(A)
    if arity < 4:
        raise ValueError("cyclic sum needs arity >= 4")
    out = comp.copy()
    for sigma in ((2, 3, 4, 1), (3, 4, 1, 2), (4, 1, 2, 3)):
        out = out + _permute_axes(comp, sigma, arity)
    return rebuild(out)


def conf_trace(A, a=1, b=2):
    """Contract slots a and b with the frame pairing (plain delta).

    The stored weight tag (the frame-component scaling exponent) is
    unchanged by the contraction.
    """
    arity, comp, rebuild = _as_slots(A)
    if arity < 2:
        raise ValueError("trace needs arity >= 2")
    if a == b or not (1 <= a <= arity and 1 <= b <= arity):
        raise ValueError(f"invalid trace slots ({a}, {b}) for arity {arity}")
    return rebuild(np.trace(comp, axis1=a - 1, axis2=b - 1))
