"""Independent set-comprehension semantics for relations.

This is the second route used to cross-check the bit-packed matrix
implementation: relations are plain pair sets over tuple-shaped elements,
and every operation is written as a direct set comprehension. Nothing
here imports the matrix code paths beyond the public data types.
"""

from __future__ import annotations

import itertools
from typing import Iterable

from toycat.relcore import FinObject, Relation


def elements(obj: FinObject) -> list[tuple[int, ...]]:
    """All elements of an object as factor-index tuples (unit: the empty tuple)."""
    return list(itertools.product(*(range(f) for f in obj.factors)))


def flatten(obj: FinObject, element: tuple[int, ...]) -> int:
    idx = 0
    for size, coord in zip(obj.factors, element):
        idx = idx * size + coord
    return idx


def to_pairset(rel: Relation) -> set[tuple[tuple[int, ...], tuple[int, ...]]]:
    dom_elems = elements(rel.dom)
    cod_elems = elements(rel.cod)
    return {(dom_elems[j], cod_elems[i]) for j, i in rel.pairs}


def from_pairset(
    dom: FinObject,
    cod: FinObject,
    pairs: Iterable[tuple[tuple[int, ...], tuple[int, ...]]],
) -> Relation:
    return Relation.from_pairs(
        dom, cod, [(flatten(dom, a), flatten(cod, b)) for a, b in pairs]
    )


def compose_oracle(g: Relation, f: Relation) -> Relation:
    """g after f by explicit exists-intermediate comprehension."""
    assert f.cod == g.dom
    fp = to_pairset(f)
    gp = to_pairset(g)
    out = {(a, c) for a, b1 in fp for b2, c in gp if b1 == b2}
    return from_pairset(f.dom, g.cod, out)


def tensor_oracle(f: Relation, g: Relation) -> Relation:
    fp = to_pairset(f)
    gp = to_pairset(g)
    out = {(a + c, b + d) for a, b in fp for c, d in gp}
    return from_pairset(f.dom * g.dom, f.cod * g.cod, out)


def dagger_oracle(f: Relation) -> Relation:
    return from_pairset(f.cod, f.dom, {(b, a) for a, b in to_pairset(f)})


def random_relation(rng, dom: FinObject, cod: FinObject, density: float = 0.5) -> Relation:
    pairs = [
        (j, i)
        for j in range(dom.cardinality)
        for i in range(cod.cardinality)
        if rng.random() < density
    ]
    return Relation.from_pairs(dom, cod, pairs)


def all_relations(dom: FinObject, cod: FinObject):
    """Every relation dom -> cod (2^(|dom|*|cod|) of them); keep shapes small."""
    nd, nc = dom.cardinality, cod.cardinality
    cells = [(j, i) for j in range(nd) for i in range(nc)]
    for bits in range(1 << (nd * nc)):
        pairs = [cells[k] for k in range(nd * nc) if bits >> k & 1]
        yield Relation.from_pairs(dom, cod, pairs)


# -- comonoid laws by direct quantification -----------------------------------
#
# delta is given as a set of (a, (b, c)) with a in A and (b, c) in A x A,
# epsilon as the subset of A it deletes. No matrix code is involved.

def delta_pairs(delta: Relation) -> set[tuple[int, tuple[int, int]]]:
    n = delta.dom.cardinality
    return {(j, (i // n, i % n)) for j, i in delta.pairs}


def eps_subset(epsilon: Relation) -> set[int]:
    return {j for j, _ in epsilon.pairs}


def law_coassociativity(d: set, n: int) -> bool:
    lhs = {(a, b, c, e) for a, (f, e) in d for (g, (b, c)) in d if g == f}
    rhs = {(a, b, c, e) for a, (b, f) in d for (g, (c, e)) in d if g == f}
    return lhs == rhs


def law_counit_left(d: set, s: set, n: int) -> bool:
    lhs = {(a, b) for a, (e, b) in d if e in s}
    return lhs == {(a, a) for a in range(n)}


def law_counit_right(d: set, s: set, n: int) -> bool:
    lhs = {(a, b) for a, (b, e) in d if e in s}
    return lhs == {(a, a) for a in range(n)}


def law_cocommutativity(d: set, n: int) -> bool:
    return {(a, (c, b)) for a, (b, c) in d} == d


def law_isometry(d: set, n: int) -> bool:
    lhs = {(a, a2) for a, bc in d for (a2, bc2) in d if bc == bc2}
    return lhs == {(a, a) for a in range(n)}


def law_frobenius(d: set, n: int) -> bool:
    # (b,c) ~ (e,g) under delta o mu iff some a copies to both pairs;
    # under (mu x 1) o (1 x delta) iff some f has c ~ (f,g) and e ~ (b,f).
    lhs = {(b, c, e, g) for a, (b, c) in d for (a2, (e, g)) in d if a2 == a}
    rhs = {(b, c, e, g) for (c, (f, g)) in d for (e, (b, f2)) in d if f2 == f}
    return lhs == rhs


def basis_laws_oracle(delta: Relation, epsilon: Relation) -> dict[str, bool]:
    n = delta.dom.cardinality
    d = delta_pairs(delta)
    s = eps_subset(epsilon)
    return {
        "coassociativity": law_coassociativity(d, n),
        "counit_left": law_counit_left(d, s, n),
        "counit_right": law_counit_right(d, s, n),
        "cocommutativity": law_cocommutativity(d, n),
        "isometry": law_isometry(d, n),
        "frobenius": law_frobenius(d, n),
    }
