"""Sparse exterior forms over a complex coframe, with optional Fourier weights.

A basis monomial is e_w * theta^{i_1} ^ ... ^ theta^{i_p} ^ tbar^{j_1} ^ ...
^ tbar^{j_q} with strictly increasing index sets and a weight w in Z^k (empty
for the invariant model).  Forms are sparse maps from monomials to Q(i)
coefficients; the wedge product carries the Koszul sign and adds weights, and
conjugation swaps the index sets, negates the weight and conjugates the
coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Mapping, NamedTuple

from .scalars import I, ONE, ZERO, Scalar, as_scalar


class BasisElement(NamedTuple):
    weight: tuple[int, ...]
    holo: tuple[int, ...]
    anti: tuple[int, ...]

    @property
    def bidegree(self) -> tuple[int, int]:
        return (len(self.holo), len(self.anti))

    @property
    def degree(self) -> int:
        return len(self.holo) + len(self.anti)


def merge_indices(a: tuple[int, ...], b: tuple[int, ...]):
    """Merge two strictly increasing tuples; (sign, merged), or (0, None) on overlap."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    if set(a) & set(b):
        return 0, None
    merged = sorted(a + b)
    # parity of the merge permutation: count of pairs (x in a, y in b) with x > y
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1) ** inversions, tuple(merged)


def wedge_elements(e1: BasisElement, e2: BasisElement):
    """(sign, element) for the product of two monomials; sign 0 when it dies."""
    if len(e1.weight) != len(e2.weight):
        raise ValueError("wedge of forms with different weight ranks")
    sh, holo = merge_indices(e1.holo, e2.holo)
    if sh == 0:
        return 0, None
    sa, anti = merge_indices(e1.anti, e2.anti)
    if sa == 0:
        return 0, None
    # move the second factor's holomorphic part across the first's antiholomorphic part
    cross = (-1) ** (len(e1.anti) * len(e2.holo))
    weight = tuple(x + y for x, y in zip(e1.weight, e2.weight))
    return sh * sa * cross, BasisElement(weight, holo, anti)


def conjugate_element(e: BasisElement):
    """(sign, element) under complex conjugation of the monomial."""
    sign = (-1) ** (len(e.holo) * len(e.anti))
    weight = tuple(-x for x in e.weight)
    return sign, BasisElement(weight, e.anti, e.holo)


class Form:
    """A finite Q(i)-combination of basis monomials."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[BasisElement, Scalar] | None = None):
        self.coeffs: dict[BasisElement, Scalar] = {}
        if coeffs:
            for k, v in coeffs.items():
                if v:
                    self.coeffs[k] = v

    @classmethod
    def zero(cls) -> "Form":
        return cls()

    @classmethod
    def monomial(cls, element: BasisElement, coeff: Scalar = ONE) -> "Form":
        return cls({element: coeff})

    def items(self):
        return sorted(self.coeffs.items())

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return isinstance(other, Form) and self.coeffs == other.coeffs

    def __add__(self, other: "Form") -> "Form":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = out.get(k, ZERO) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Form(out)

    def __sub__(self, other: "Form") -> "Form":
        return self + other.scale(as_scalar(-1))

    def __neg__(self) -> "Form":
        return self.scale(as_scalar(-1))

    def scale(self, a) -> "Form":
        a = as_scalar(a)
        if not a:
            return Form()
        return Form({k: a * v for k, v in self.coeffs.items()})

    def wedge(self, other: "Form") -> "Form":
        out: dict[BasisElement, Scalar] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                sign, elt = wedge_elements(e1, e2)
                if sign == 0:
                    continue
                val = c1 * c2 if sign == 1 else -(c1 * c2)
                s = out.get(elt, ZERO) + val
                if s:
                    out[elt] = s
                else:
                    out.pop(elt, None)
        return Form(out)

    def conjugate(self) -> "Form":
        out: dict[BasisElement, Scalar] = {}
        for e, c in self.coeffs.items():
            sign, elt = conjugate_element(e)
            out[elt] = c.conj() if sign == 1 else -(c.conj())
        return Form(out)

    def bidegree_part(self, p: int, q: int) -> "Form":
        return Form({e: c for e, c in self.coeffs.items() if e.bidegree == (p, q)})

    def bidegrees(self) -> set[tuple[int, int]]:
        return {e.bidegree for e in self.coeffs}

    def weights(self) -> set[tuple[int, ...]]:
        return {e.weight for e in self.coeffs}

    def is_homogeneous(self) -> bool:
        return len(self.bidegrees()) <= 1

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Form(0)"
        parts = [f"({c})*{e.weight}|{e.holo}|{e.anti}" for e, c in self.items()]
        return "Form(" + " + ".join(parts) + ")"


def with_weight_rank(form: Form, rank: int) -> Form:
    """Re-embed an invariant (rank-0) form at weight zero of the given rank."""
    zero = (0,) * rank
    out = {}
    for e, c in form.coeffs.items():
        if len(e.weight) == rank:
            out[e] = c
        elif not any(e.weight):
            out[BasisElement(zero, e.holo, e.anti)] = c
        else:
            raise ValueError("cannot re-rank a form with nonzero weights")
    return Form(out)


class InconsistentModel(Exception):
    """The Fourier coefficient model is incompatible with the Lie brackets."""


@dataclass(frozen=True)
class CoefficientModel:
    """Coefficient functions carried by the complex.

    Invariant: constants only (rank 0, no weights).  TorusFourier: each real
    frame vector acts on the mode of weight w in Z^k as multiplication by
    i * (row . w); the 2*pi of the underlying torus derivative is absorbed
    into this convention so eigenvalues stay in Q(i).  Truncation keeps all
    weights with |w_a| <= N, a box closed under every weight-preserving
    operator and under conjugation.
    """

    kind: str  # "invariant" | "torus_fourier"
    rank: int = 0
    actions: tuple[tuple[Scalar, ...], ...] = ()
    truncation: int = 0

    @classmethod
    def invariant(cls) -> "CoefficientModel":
        return cls(kind="invariant")

    def with_truncation(self, n: int) -> "CoefficientModel":
        if self.kind == "invariant":
            return self
        return CoefficientModel(self.kind, self.rank, self.actions, n)

    @property
    def zero_weight(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def weights(self) -> list[tuple[int, ...]]:
        if self.kind == "invariant":
            return [()]
        n = self.truncation
        return sorted(product(range(-n, n + 1), repeat=self.rank))

    def frame_eigenvalue(self, frame_index: int, weight: tuple[int, ...]) -> Scalar:
        """Action of real frame vector e_{frame_index} (1-based) on mode e_w."""
        if self.kind == "invariant":
            return ZERO
        row = self.actions[frame_index - 1]
        acc = ZERO
        for r, w in zip(row, weight):
            if r and w:
                acc = acc + r * as_scalar(w)
        return I * acc

    def acting_frame_indices(self) -> list[int]:
        if self.kind == "invariant":
            return []
        return [a + 1 for a, row in enumerate(self.actions) if any(row)]


def enumerate_basis(n: int, p: int, q: int, model: CoefficientModel) -> tuple[BasisElement, ...]:
    """Deterministic (weight, holo, anti)-lexicographic monomial basis of A^{p,q}."""
    if not (0 <= p <= n and 0 <= q <= n):
        return ()
    out = []
    holos = list(combinations(range(1, n + 1), p))
    antis = list(combinations(range(1, n + 1), q))
    for w in model.weights():
        for h in holos:
            for a in antis:
                out.append(BasisElement(w, h, a))
    return tuple(out)


GenAction = Mapping[tuple[str, int], Form]


def extend_derivation(
    gen_action: GenAction,
    coeff_action: Callable[[tuple[int, ...]], Form] | None,
    form: Form,
) -> Form:
    """Extend generator actions to an odd derivation of the full algebra.

    gen_action maps ('h', s) and ('a', s) to the image of theta^s and
    tbar^s; coeff_action(w) is the image of the weight-w mode (None for the
    zero-order operators).  The graded Leibniz rule fixes everything else.
    """
    out = Form()
    for elt, c in form.coeffs.items():
        w, holo, anti = elt
        if coeff_action is not None and any(w):
            df = coeff_action(w)
            if df:
                rest = Form.monomial(BasisElement(tuple(0 for _ in w), holo, anti))
                out = out + df.wedge(rest).scale(c)
        gens = [("h", s) for s in holo] + [("a", s) for s in anti]
        for t, g in enumerate(gens):
            action = gen_action.get(g)
            if not action:
                continue
            if t < len(holo):
                prefix = BasisElement(w, holo[:t], ())
                suffix = BasisElement(tuple(0 for _ in w), holo[t + 1 :], anti)
            else:
                j = t - len(holo)
                prefix = BasisElement(w, holo, anti[:j])
                suffix = BasisElement(tuple(0 for _ in w), (), anti[j + 1 :])
            sign = -1 if t % 2 else 1
            term = Form.monomial(prefix).wedge(action).wedge(Form.monomial(suffix))
            out = out + term.scale(c if sign == 1 else -c)
    return out
