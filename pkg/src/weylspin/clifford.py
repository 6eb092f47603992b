"""Complex matrix representations of the Clifford algebra Cl(n).

Convention: X·Y + Y·X = -2 c(X, Y) with c the frame pairing (plain delta
on frame components), realized by skew-hermitian generators gamma_i acting
on spinors of dimension 2^(n//2).  The partial contraction operators
multiply a spinor by tensor slots in a stated order, the *last* listed
slot acting first (innermost factor).
"""

from __future__ import annotations

from collections import namedtuple
from fractions import Fraction

import numpy as np

from .fields import as_fraction

__all__ = [
    "CliffordRep",
    "Spinor",
    "SlotTensor",
    "Density",
    "build_representation",
    "clifford_mul",
    "tensor_clifford",
    "nu",
    "herm",
]

_PAULI_1 = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_3 = np.array([[1, 0], [0, -1]], dtype=complex)

#: A gauge-component number (or component array) with its scaling exponent.
Density = namedtuple("Density", ["value", "weight"])


def _kron_chain(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def _relation_residuals(gammas):
    n, N = gammas.shape[0], gammas.shape[-1]
    anti = np.einsum("iab,jbc->ijac", gammas, gammas)
    anti = anti + np.einsum("jab,ibc->ijac", gammas, gammas)
    anti = anti + 2.0 * np.einsum("ij,ab->ijab", np.eye(n), np.eye(N))
    skew = gammas + np.conj(np.swapaxes(gammas, -1, -2))
    return np.abs(anti).max(), np.abs(skew).max()


class CliffordRep:
    """n anticommuting skew-hermitian generators on C^(2^(n//2))."""

    __slots__ = ("n", "gammas", "_pair")

    def __init__(self, n, gammas):
        self.n = int(n)
        self.gammas = np.asarray(gammas, dtype=complex)
        if self.gammas.shape != (self.n, self.dim, self.dim):
            raise ValueError(f"expected {self.n} square matrices, got shape {self.gammas.shape}")
        self._pair = None

    @property
    def dim(self):
        return 2 ** (self.n // 2)

    def pair_products(self):
        """Cached gamma_i gamma_j products, shape (n, n, N, N)."""
        if self._pair is None:
            self._pair = np.einsum("iab,jbc->ijac", self.gammas, self.gammas)
        return self._pair

    def __repr__(self):
        return f"CliffordRep(n={self.n}, dim={self.dim})"


def build_representation(n, matrices=None):
    """A Clifford representation for dimension n, or validate a user-supplied one.

    The built-in generators are iterated tensor products of Pauli matrices
    (times i), which keeps every entry in {0, +-1, +-i} so the defining
    relations hold exactly.  User matrices are accepted only if they satisfy
    anticommutation and skew-hermiticity to 1e-12.
    """
    n = int(n)
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if matrices is not None:
        gam = np.asarray(matrices, dtype=complex)
        rep = CliffordRep(n, gam)
        anti, skew = _relation_residuals(rep.gammas)
        if anti > 1e-12:
            raise ValueError(f"anticommutation violated by {anti:.3e}")
        if skew > 1e-12:
            raise ValueError(f"skew-hermiticity violated by {skew:.3e}")
        return rep
    m = n // 2
    herms = []
    for k in range(1, m + 1):
        pre = [_PAULI_3] * (k - 1)
        post = [np.eye(2)] * (m - k)
        herms.append(_kron_chain(pre + [_PAULI_1] + post))
        herms.append(_kron_chain(pre + [_PAULI_2] + post))
    if n % 2:
        herms.append(_kron_chain([_PAULI_3] * m))
    return CliffordRep(n, 1j * np.stack(herms))


class Spinor:
    """Spinor components with optional leading frame slots and a weight tag.

    The trailing axis is the spinor axis; any leading axes are frame slots
    (so the slot calculus in :mod:`weylspin.fields` applies).  The weight
    is the scaling exponent of the components under a conformal gauge
    change of the underlying chart data.
    """

    __slots__ = ("rep", "comp", "weight")

    def __init__(self, rep, comp, weight=0):
        self.rep = rep
        self.comp = np.asarray(comp, dtype=complex)
        if self.comp.shape[-1] != rep.dim:
            raise ValueError(f"spinor axis {self.comp.shape[-1]} does not match rep dim {rep.dim}")
        self.weight = as_fraction(weight)

    @property
    def arity(self):
        return self.comp.ndim - 1

    def with_comp(self, comp):
        return Spinor(self.rep, comp, self.weight)

    def __add__(self, other):
        if other.weight != self.weight:
            raise ValueError("cannot add spinors of different weights")
        return Spinor(self.rep, self.comp + other.comp, self.weight)

    def __sub__(self, other):
        if other.weight != self.weight:
            raise ValueError("cannot subtract spinors of different weights")
        return Spinor(self.rep, self.comp - other.comp, self.weight)

    def __mul__(self, scalar):
        return Spinor(self.rep, self.comp * scalar, self.weight)

    __rmul__ = __mul__

    def __neg__(self):
        return Spinor(self.rep, -self.comp, self.weight)

    def norm(self):
        return float(np.linalg.norm(self.comp.ravel()))

    def __repr__(self):
        return f"Spinor(shape={self.comp.shape}, weight={self.weight})"


class SlotTensor:
    """Frame-indexed covariant tensor components with a weight tag."""

    __slots__ = ("comp", "weight")

    def __init__(self, comp, weight=0):
        self.comp = np.asarray(comp)
        self.weight = as_fraction(weight)

    @property
    def arity(self):
        return self.comp.ndim

    def with_comp(self, comp):
        return SlotTensor(comp, self.weight)

    def __repr__(self):
        return f"SlotTensor(shape={self.comp.shape}, weight={self.weight})"


def clifford_mul(X, psi):
    """Clifford product of a frame vector with a spinor: sum_i X_i gamma_i psi.

    Leading slots of ``psi`` are carried through untouched; weights add.
    """
    if isinstance(X, SlotTensor):
        if X.arity != 1:
            raise ValueError("clifford_mul takes a single-slot vector")
        xi, wx = X.comp, X.weight
    else:
        xi, wx = np.asarray(X), Fraction(0)
    if xi.shape != (psi.rep.n,):
        raise ValueError(f"vector shape {xi.shape} does not match dimension {psi.rep.n}")
    comp = np.einsum("i,iab,...b->...a", xi, psi.rep.gammas, psi.comp)
    return Spinor(psi.rep, comp, wx + psi.weight)


def tensor_clifford(A, psi, slots=None):
    """Contract the named slots of A against gamma matrices acting on psi.

    ``slots`` lists slot positions (1-based); the last listed slot is
    multiplied first (innermost), the first listed slot last (outermost).
    Unnamed slots remain free, leading the result.  Default: all slots in
    natural order, i.e. the full Clifford contraction
    sum A(i_1..i_r) gamma_{i_1} ... gamma_{i_r} psi.
    """
    rep = psi.rep
    if psi.comp.ndim != 1:
        raise ValueError("tensor_clifford expects a spinor without free slots")
    comp = np.asarray(A.comp)
    r = A.arity
    if comp.shape != (rep.n,) * r:
        raise ValueError(f"tensor shape {comp.shape} does not match dimension {rep.n}")
    if slots is None:
        slots = tuple(range(1, r + 1))
    slots = tuple(int(s) for s in slots)
    if len(set(slots)) != len(slots):
        raise ValueError("repeated slot index")
    if any(not 1 <= s <= r for s in slots):
        raise ValueError("slot out of range")
    op = np.eye(rep.dim, dtype=complex)
    for _ in slots:
        op = np.einsum("pab,...bc->p...ac", rep.gammas, op)
    letters = "cdefghijklm"
    a_sub = letters[:r]
    o_sub = "".join(a_sub[s - 1] for s in slots) + "ab"
    out_sub = "".join(a_sub[i] for i in range(r) if (i + 1) not in slots) + "a"
    out = np.einsum(f"{a_sub},{o_sub},b->{out_sub}", comp, op, psi.comp)
    return Spinor(rep, out, A.weight + psi.weight)


def nu(psi):
    """Prepend a frame slot whose i-th entry is gamma_i psi (weight preserved)."""
    comp = np.einsum("iab,...b->i...a", psi.rep.gammas, psi.comp)
    return Spinor(psi.rep, comp, psi.weight)


def herm(phi, psi):
    """Hermitian product of component vectors, conjugate-linear in the first.

    Slots broadcast elementwise; the result is a Density whose weight is
    the sum of the operand weights.
    """
    if phi.rep.dim != psi.rep.dim:
        raise ValueError("spinors from different representations")
    value = np.einsum("...a,...a->...", np.conj(phi.comp), psi.comp)
    return Density(value, phi.weight + psi.weight)
