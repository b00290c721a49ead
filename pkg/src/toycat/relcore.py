"""Finite sets and boolean relations: the ambient dagger compact category.

Objects are finite sets presented as ordered products of base factors.
Morphisms are binary relations stored as bit-packed boolean matrices over
the two-element semiring ({0,1}, or, and): composition is boolean matrix
product, the tensor is the cartesian product with row-major index
flattening (first factor most significant), and the dagger is the
relational converse.

All values are immutable after construction and every operation is pure,
so relations can be shared freely, hashed, and used as dictionary keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

__all__ = [
    "FinObject",
    "Relation",
    "ShapeMismatchError",
    "UNIT",
    "compose",
    "tensor",
    "dagger",
    "identity",
    "swap",
    "structural",
    "is_unitary",
    "transpose_star",
    "conjugate_star",
    "snake_holds",
    "scalar_identity",
    "scalar_empty",
    "is_scalar",
    "scalar_kind",
    "relation_to_json",
    "relation_from_json",
    "element_labels",
    "format_relation",
    "format_subset",
]


class ShapeMismatchError(TypeError):
    """Morphisms were combined at incompatible objects."""


_FACTOR_NAMES = {1: "I", 2: "II", 3: "III", 4: "IV", 5: "V", 6: "VI", 8: "VIII"}


@dataclass(frozen=True, init=False)
class FinObject:
    """A finite set given as an ordered product of base factors.

    Factors of size 1 are erased eagerly, so objects related by the unit
    congruence (A x I = I x A = A) compare equal; the empty factor list is
    the tensor unit I itself.
    """

    factors: tuple[int, ...]

    def __init__(self, *factors: int) -> None:
        for n in factors:
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"factors must be integers >= 1, got {factors!r}")
        kept = tuple(n for n in factors if n > 1)
        card = 1
        for n in kept:
            card *= n
        object.__setattr__(self, "factors", kept)
        object.__setattr__(self, "_card", card)

    @classmethod
    def from_factors(cls, factors: Iterable[int]) -> "FinObject":
        return cls(*factors)

    @property
    def cardinality(self) -> int:
        return self._card

    @property
    def arity(self) -> int:
        """Number of nontrivial factors (0 for the unit)."""
        return len(self.factors)

    def tensor(self, other: "FinObject") -> "FinObject":
        return _product(self.factors, other.factors)

    def __mul__(self, other: "FinObject") -> "FinObject":
        return _product(self.factors, other.factors)

    @property
    def name(self) -> str:
        if not self.factors:
            return "I"
        return "x".join(_FACTOR_NAMES.get(f, str(f)) for f in self.factors)

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"FinObject{self.factors!r}"


@lru_cache(maxsize=None)
def _product(fa: tuple[int, ...], fb: tuple[int, ...]) -> FinObject:
    return FinObject(*(fa + fb))


UNIT = FinObject()


def element_labels(obj: FinObject) -> list[str]:
    """Display labels for the elements of `obj`.

    Factors of size 4 are shown 1-based (1..4) and all other factors
    0-based, matching the usual presentation of these models; composite
    objects are labelled by tuples in row-major order.
    """
    per_factor = [
        [str(i + 1) for i in range(f)] if f == 4 else [str(i) for i in range(f)]
        for f in obj.factors
    ]
    labels = [""]
    for fac in per_factor:
        labels = [f"{a},{b}" if a else b for a in labels for b in fac]
    if len(obj.factors) > 1:
        return [f"({s})" for s in labels]
    if not obj.factors:
        return ["*"]
    return labels


@dataclass(frozen=True)
class Relation:
    """A relation dom -> cod stored as bit-packed rows keyed by codomain index.

    Bit j of rows[i] is set iff element j of the domain is related to
    element i of the codomain.
    """

    dom: FinObject
    cod: FinObject
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.cod.cardinality:
            raise ValueError(
                f"expected {self.cod.cardinality} rows for codomain {self.cod}, "
                f"got {len(self.rows)}"
            )
        full = (1 << self.dom.cardinality) - 1
        for i, row in enumerate(self.rows):
            if row < 0 or row & ~full:
                raise ValueError(f"row {i} has bits outside domain {self.dom}")

    @classmethod
    def _raw(cls, dom: FinObject, cod: FinObject, rows: tuple[int, ...]) -> "Relation":
        """Internal constructor for rows already known to be valid."""
        self = object.__new__(cls)
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "rows", rows)
        return self

    @classmethod
    def from_pairs(
        cls, dom: FinObject, cod: FinObject, pairs: Iterable[tuple[int, int]]
    ) -> "Relation":
        """Build from (domain index, codomain index) pairs, 0-indexed and flat."""
        rows = [0] * cod.cardinality
        for j, i in pairs:
            if not (0 <= j < dom.cardinality and 0 <= i < cod.cardinality):
                raise ValueError(f"pair ({j},{i}) out of range for {dom} -> {cod}")
            rows[i] |= 1 << j
        return cls(dom, cod, tuple(rows))

    @classmethod
    def empty(cls, dom: FinObject, cod: FinObject) -> "Relation":
        return cls(dom, cod, (0,) * cod.cardinality)

    @cached_property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Sorted (domain index, codomain index) pairs; the canonical form."""
        out = []
        for i, row in enumerate(self.rows):
            m = row
            while m:
                b = m & -m
                out.append((b.bit_length() - 1, i))
                m ^= b
        out.sort()
        return tuple(out)

    @property
    def key(self) -> tuple:
        """Canonical hashable key (dom factors, cod factors, sorted pairs)."""
        return (self.dom.factors, self.cod.factors, self.pairs)

    def related(self, j: int, i: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    @property
    def is_empty(self) -> bool:
        return not any(self.rows)

    def __str__(self) -> str:
        return format_relation(self)


def compose(g: Relation, f: Relation) -> Relation:
    """g after f: the boolean matrix product (exists-intermediate)."""
    if f.cod != g.dom:
        raise ShapeMismatchError(
            f"cannot compose: inner objects differ "
            f"(first argument has domain {g.dom}, second has codomain {f.cod})"
        )
    rows = []
    frows = f.rows
    for grow in g.rows:
        acc = 0
        m = grow
        while m:
            b = m & -m
            acc |= frows[b.bit_length() - 1]
            m ^= b
        rows.append(acc)
    return Relation._raw(f.dom, g.cod, tuple(rows))


def tensor(f: Relation, g: Relation) -> Relation:
    """Cartesian product of relations; first factor is most significant."""
    dom = f.dom * g.dom
    cod = f.cod * g.cod
    gw = g.dom.cardinality
    rows = []
    for frow in f.rows:
        for grow in g.rows:
            acc = 0
            m = frow
            while m:
                b = m & -m
                acc |= grow << ((b.bit_length() - 1) * gw)
                m ^= b
            rows.append(acc)
    return Relation._raw(dom, cod, tuple(rows))


def dagger(f: Relation) -> Relation:
    """The relational converse (matrix transpose)."""
    rows = [0] * f.dom.cardinality
    for i, row in enumerate(f.rows):
        m = row
        while m:
            b = m & -m
            rows[b.bit_length() - 1] |= 1 << i
            m ^= b
    return Relation._raw(f.cod, f.dom, tuple(rows))


def identity(obj: FinObject) -> Relation:
    return Relation._raw(obj, obj, tuple(1 << i for i in range(obj.cardinality)))


def swap(a: FinObject, b: FinObject) -> Relation:
    """The symmetry a x b -> b x a relating (x,y) to (y,x)."""
    bw = b.cardinality
    aw = a.cardinality
    rows = []
    for y in range(bw):
        for x in range(aw):
            rows.append(1 << (x * bw + y))
    return Relation._raw(a * b, b * a, tuple(rows))


def structural(a: FinObject, b: FinObject) -> tuple[Relation, Relation]:
    """The structural morphisms for a pair of objects: (identity on a, swap a,b)."""
    return identity(a), swap(a, b)


def is_unitary(f: Relation) -> bool:
    """True iff dagger(f) is a two-sided inverse of f."""
    fd = dagger(f)
    return compose(fd, f) == identity(f.dom) and compose(f, fd) == identity(f.cod)


def scalar_identity() -> Relation:
    return Relation(UNIT, UNIT, (1,))


def scalar_empty() -> Relation:
    return Relation(UNIT, UNIT, (0,))


def is_scalar(f: Relation) -> bool:
    return f.dom == UNIT and f.cod == UNIT


def scalar_kind(f: Relation) -> str:
    """'identity' or 'empty' for the two scalars I -> I."""
    if not is_scalar(f):
        raise ShapeMismatchError(f"not a scalar: {f.dom} -> {f.cod}")
    return "identity" if f.rows[0] else "empty"


def snake_holds(eta: Relation) -> bool:
    """Check both snake (compact closure) equations for a cup I -> A x A."""
    if eta.dom != UNIT:
        return False
    fs = eta.cod.factors
    if len(fs) % 2 or fs[: len(fs) // 2] != fs[len(fs) // 2 :]:
        return False
    a = FinObject(*fs[: len(fs) // 2])
    ida = identity(a)
    cap = dagger(eta)
    left = compose(tensor(cap, ida), tensor(ida, eta))
    right = compose(tensor(ida, cap), tensor(eta, ida))
    return left == ida and right == ida


def transpose_star(f: Relation, eta_a: Relation, eta_b: Relation) -> Relation:
    """Abstract transpose of f: A -> B against cups on A and B.

    Computes (1_A x eta_B†) o (1_A x f x 1_B) o (eta_A x 1_B). Both cups
    must satisfy the snake equations.
    """
    if not snake_holds(eta_a):
        raise ValueError("eta_A does not satisfy the snake equations")
    if not snake_holds(eta_b):
        raise ValueError("eta_B does not satisfy the snake equations")
    a, b = f.dom, f.cod
    if eta_a.cod != a * a or eta_b.cod != b * b:
        raise ShapeMismatchError(
            f"cups do not match morphism signature {a} -> {b}"
        )
    ida, idb = identity(a), identity(b)
    stage1 = tensor(eta_a, idb)
    stage2 = tensor(ida, tensor(f, idb))
    stage3 = tensor(ida, dagger(eta_b))
    return compose(stage3, compose(stage2, stage1))


def conjugate_star(f: Relation, eta_a: Relation, eta_b: Relation) -> Relation:
    """Abstract conjugate of f, the transpose of its dagger."""
    return transpose_star(dagger(f), eta_b, eta_a)


def least_diff_cell(a: Relation, b: Relation) -> tuple[int, int] | None:
    """Lexicographically least (row, col) where two same-shaped relations differ."""
    for i in range(len(a.rows)):
        diff = a.rows[i] ^ b.rows[i]
        if diff:
            return (i, (diff & -diff).bit_length() - 1)
    return None


def relation_to_json(f: Relation) -> dict:
    """Canonical JSON form: sorted 0-indexed flattened pairs."""
    return {
        "dom": list(f.dom.factors),
        "cod": list(f.cod.factors),
        "pairs": [[j, i] for j, i in f.pairs],
    }


def relation_from_json(data: Mapping) -> Relation:
    """Parse the canonical JSON form; rejects unsorted or duplicated pairs."""
    try:
        dom = FinObject(*data["dom"])
        cod = FinObject(*data["cod"])
        raw = [(int(j), int(i)) for j, i in data["pairs"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed relation record: {exc}") from exc
    if raw != sorted(set(raw)):
        raise ValueError("relation pairs must be sorted and duplicate-free")
    rel = Relation.from_pairs(dom, cod, raw)
    return rel


def format_subset(obj: FinObject, mask: int) -> str:
    """Render a bitmask over `obj` as an element set, e.g. {1,3}."""
    labels = element_labels(obj)
    members = []
    m = mask
    while m:
        b = m & -m
        members.append(labels[b.bit_length() - 1])
        m ^= b
    return "{" + ",".join(members) + "}"


def format_relation(f: Relation) -> str:
    """Human-readable listing, e.g. 'IV -> IVxIV :: 1 ~ {(1,1),(2,2)}; ...'."""
    dom_labels = element_labels(f.dom)
    cod_labels = element_labels(f.cod)
    by_dom: dict[int, list[str]] = {}
    for j, i in f.pairs:
        by_dom.setdefault(j, []).append(cod_labels[i])
    if not by_dom:
        body = "(empty)"
    else:
        parts = []
        for j in sorted(by_dom):
            images = by_dom[j]
            shown = images[0] if len(images) == 1 else "{" + ",".join(images) + "}"
            parts.append(f"{dom_labels[j]} ~ {shown}")
        body = "; ".join(parts)
    return f"{f.dom} -> {f.cod} :: {body}"
