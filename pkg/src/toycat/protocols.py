"""Teleportation and dense coding, verified branch by branch.

Given a cup eta and a set of unitaries, the teleportation check builds
each measurement branch explicitly: the effect is the dagger of the
unitarily shifted cup, the post-measurement map is the effect applied
against a fresh copy of the cup, and the classical correction is the
unitary itself. A certificate is valid when every branch's map equals the
dagger of its unitary, the correction undoes it exactly, the effects are
pairwise disjoint, and together they cover every outcome. Dense coding
composes the same ingredients the other way around and demands an exact
identity pattern in the resulting scalar table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .basis import BasisStructure, check_complementary, verify_basis_structure
from .relcore import (
    FinObject,
    Relation,
    compose,
    dagger,
    identity,
    is_unitary,
    scalar_kind,
    snake_holds,
    swap,
    tensor,
)

__all__ = [
    "ComplementarityRequired",
    "BellBasis",
    "bell_basis",
    "PhaseGroup",
    "phase_unitaries",
    "BranchSearchResult",
    "find_branch_unitaries",
    "Branch",
    "TeleportationCertificate",
    "check_teleportation",
    "DenseCodingResult",
    "check_dense_coding",
    "measurement_projector",
    "all_unitary_permutations",
]


class ComplementarityRequired(ValueError):
    """The two structures handed to bell_basis are not complementary."""

    def __init__(self, report) -> None:
        super().__init__(f"structures are not complementary: {report.to_json()}")
        self.report = report


@dataclass(frozen=True)
class BellBasis:
    tensor_basis: BasisStructure
    bell_map: Relation


def bell_basis(bx: BasisStructure, bz: BasisStructure) -> BellBasis:
    """Basis structure on A x A and the basis-change map built from a pair.

    The comultiplication is (1 x swap x 1) o (delta_X x delta_Z) with
    counit eps_X x eps_Z; the Bell map is (delta_X-dagger x 1) o (1 x delta_Z).
    Requires the pair to be complementary and re-verifies all six laws on
    the product structure.
    """
    report = check_complementary(bx, bz)
    if not report.holds:
        raise ComplementarityRequired(report)
    a = bx.obj
    ida = identity(a)
    mid = tensor(ida, tensor(swap(a, a), ida))
    delta = compose(mid, tensor(bx.delta, bz.delta))
    epsilon = tensor(bx.epsilon, bz.epsilon)
    product = BasisStructure(a * a, delta, epsilon, name="bell-product")
    laws = verify_basis_structure(a * a, delta, epsilon)
    if not all(r.holds for r in laws):
        failed = [r.law for r in laws if not r.holds]
        raise AssertionError(f"product structure failed laws: {failed}")
    bell = compose(tensor(dagger(bx.delta), ida), tensor(ida, bz.delta))
    return BellBasis(product, bell)


@dataclass(frozen=True)
class PhaseGroup:
    """Unitaries induced by unbiased points, and their composition closure."""

    phases: tuple[Relation, ...]
    closed: tuple[Relation, ...]


def phase_unitaries(b: BasisStructure) -> PhaseGroup:
    from .basis import enumerate_points, lambda_map

    report = enumerate_points(b)
    phases = {}
    for psi in report.unbiased:
        u = lambda_map(b, psi)
        phases[u.key] = u
    closed = dict(phases)
    frontier = list(closed.values())
    while frontier:
        fresh = []
        for u in frontier:
            for v in list(closed.values()):
                for w in (compose(u, v), compose(v, u)):
                    if w.key not in closed:
                        closed[w.key] = w
                        fresh.append(w)
        frontier = fresh
    return PhaseGroup(
        tuple(phases[k] for k in sorted(phases)),
        tuple(closed[k] for k in sorted(closed)),
    )


def all_unitary_permutations(obj: FinObject) -> tuple[Relation, ...]:
    """Every bijection graph on obj, in canonical order (the widest pool)."""
    out = [
        Relation.from_pairs(obj, obj, list(enumerate(p)))
        for p in itertools.permutations(range(obj.cardinality))
    ]
    return tuple(sorted(out, key=lambda r: r.key))


@dataclass(frozen=True)
class BranchSearchResult:
    unitaries: tuple[Relation, ...] | None
    coverage: int
    total: int

    @property
    def ok(self) -> bool:
        return self.unitaries is not None


def find_branch_unitaries(eta: Relation, pool: tuple[Relation, ...] | list[Relation]) -> BranchSearchResult:
    """Smallest pool subset whose shifted cups tile A x A.

    The subsets are scanned in size order and, within a size, in
    lexicographic order over the canonically sorted pool, so the result is
    deterministic; on failure the result reports how much of A x A the
    whole pool can cover.
    """
    if not snake_holds(eta):
        raise ValueError("eta does not satisfy the snake equations")
    half = eta.cod.factors[: len(eta.cod.factors) // 2]
    a = FinObject(*half)
    for u in pool:
        if not is_unitary(u):
            raise ValueError("pool contains a non-unitary relation")
    pool = sorted(pool, key=lambda r: r.key)
    ida = identity(a)
    supports = []
    for u in pool:
        mask = 0
        for _, i in compose(tensor(u, ida), eta).pairs:
            mask |= 1 << i
        supports.append(mask)
    total = eta.cod.cardinality
    full = (1 << total) - 1
    per_branch = len(eta.pairs)
    min_size = -(-total // per_branch) if per_branch else 1
    max_size = total // per_branch if per_branch else 0
    for size in range(min_size, max_size + 1):
        for combo in itertools.combinations(range(len(pool)), size):
            acc = 0
            for idx in combo:
                if acc & supports[idx]:
                    break
                acc |= supports[idx]
            else:
                if acc == full:
                    return BranchSearchResult(tuple(pool[i] for i in combo), total, total)
    union = 0
    for m in supports:
        union |= m
    return BranchSearchResult(None, union.bit_count(), total)


@dataclass(frozen=True)
class Branch:
    unitary: Relation
    state: Relation      # (U x 1) o eta
    effect: Relation     # its dagger
    branch_map: Relation  # (effect x 1) o (1 x eta)
    correction: Relation  # the unitary itself
    ok: bool


@dataclass(frozen=True)
class TeleportationCertificate:
    eta: Relation
    branches: tuple[Branch, ...]
    disjoint: bool
    coverage_ok: bool

    @property
    def valid(self) -> bool:
        return self.disjoint and self.coverage_ok and all(b.ok for b in self.branches)

    @property
    def failing_branches(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.branches) if not b.ok)

    def to_json(self) -> dict:
        from .relcore import relation_to_json

        return {
            "valid": self.valid,
            "branch_count": len(self.branches),
            "disjoint": self.disjoint,
            "coverage_ok": self.coverage_ok,
            "eta": relation_to_json(self.eta),
            "branches": [
                {
                    "unitary": relation_to_json(b.unitary),
                    "effect": relation_to_json(b.effect),
                    "branch_map": relation_to_json(b.branch_map),
                    "correction": relation_to_json(b.correction),
                    "ok": b.ok,
                }
                for b in self.branches
            ],
        }


def check_teleportation(
    eta: Relation, unitaries: tuple[Relation, ...] | list[Relation]
) -> TeleportationCertificate:
    """Build and validate every measurement branch of the protocol."""
    if not snake_holds(eta):
        raise ValueError("eta does not satisfy the snake equations")
    half = eta.cod.factors[: len(eta.cod.factors) // 2]
    a = FinObject(*half)
    ida = identity(a)
    branches = []
    masks = []
    for u in unitaries:
        state = compose(tensor(u, ida), eta)
        effect = dagger(state)
        branch_map = compose(tensor(effect, ida), tensor(ida, eta))
        ok = branch_map == dagger(u) and compose(u, branch_map) == ida
        branches.append(Branch(u, state, effect, branch_map, u, ok))
        mask = 0
        for _, i in state.pairs:
            mask |= 1 << i
        masks.append(mask)
    disjoint = True
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            if masks[i] & masks[j]:
                disjoint = False
    union = 0
    for m in masks:
        union |= m
    coverage_ok = union == (1 << eta.cod.cardinality) - 1
    return TeleportationCertificate(eta, tuple(branches), disjoint, coverage_ok)


@dataclass(frozen=True)
class DenseCodingResult:
    ok: bool
    table: tuple[tuple[str, ...], ...]  # table[i][j] = scalar of decode j on encode i

    def to_json(self) -> dict:
        return {"ok": self.ok, "table": [list(row) for row in self.table]}


def check_dense_coding(
    eta: Relation, unitaries: tuple[Relation, ...] | list[Relation]
) -> DenseCodingResult:
    """Decode table: effect_j o (U_i x 1) o eta must be the identity pattern."""
    if not snake_holds(eta):
        raise ValueError("eta does not satisfy the snake equations")
    half = eta.cod.factors[: len(eta.cod.factors) // 2]
    ida = identity(FinObject(*half))
    states = [compose(tensor(u, ida), eta) for u in unitaries]
    effects = [dagger(s) for s in states]
    table = []
    ok = True
    for i, s in enumerate(states):
        row = []
        for j, e in enumerate(effects):
            kind = scalar_kind(compose(e, s))
            row.append(kind)
            expected = "identity" if i == j else "empty"
            if kind != expected:
                ok = False
        table.append(tuple(row))
    return DenseCodingResult(ok, tuple(table))


def measurement_projector(phi: Relation) -> Relation:
    """phi o phi-dagger: projection onto the support of a state."""
    return compose(phi, dagger(phi))
