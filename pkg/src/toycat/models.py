"""The concrete named models: the relational qubit on II and Spek on IV.

Module data is 0-indexed internally; display follows the usual convention
of labelling the four-element set 1..4 and the two-element set 0..1.
Comments give the 1-based form for the four-element listings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .basis import (
    BasisStructure,
    all_states,
    eta as basis_eta,
    induced_endomorphism,
    is_classical,
    is_unbiased,
)
from .relcore import (
    FinObject,
    Relation,
    UNIT,
    compose,
    dagger,
    element_labels,
    identity,
    is_unitary,
    swap,
    tensor,
)

__all__ = [
    "II",
    "IV",
    "IntegrityError",
    "NamedState",
    "Observable",
    "Model",
    "all_permutations",
    "perm_relation",
    "perm_name",
    "conjugate_delta",
    "frel_qubit",
    "spek_generators",
    "spek_states",
    "spek_observables",
    "observable_orbit",
    "spek",
    "ghz",
    "ghz_invariance",
    "bloch_table",
    "get_model",
]

II = FinObject(2)
IV = FinObject(4)


class IntegrityError(RuntimeError):
    """Model data failed a structural sanity check."""


@dataclass(frozen=True)
class NamedState:
    name: str
    state: Relation


@dataclass(frozen=True)
class Observable:
    """A family of basis structures sharing the same classical points."""

    label: str
    family: tuple[BasisStructure, ...]
    classical_points: tuple[Relation, ...]
    representative: BasisStructure


@dataclass(frozen=True)
class Model:
    """A named model: its object, verified structures, states, and term symbols."""

    name: str
    obj: FinObject
    structures: dict[str, BasisStructure]
    states: dict[str, Relation]
    symbols: dict[str, Relation]
    observables: dict[str, Observable] = field(default_factory=dict)


# -- permutations --------------------------------------------------------------

def perm_relation(obj: FinObject, image: list[int] | tuple[int, ...]) -> Relation:
    """The graph of the permutation sending index j to image[j]."""
    return Relation.from_pairs(obj, obj, [(j, image[j]) for j in range(obj.cardinality)])


def all_permutations(obj: FinObject) -> tuple[Relation, ...]:
    """All permutations of obj, in lexicographic one-line-notation order."""
    return tuple(
        perm_relation(obj, p) for p in itertools.permutations(range(obj.cardinality))
    )


def perm_image(rel: Relation) -> list[int]:
    img = [-1] * rel.dom.cardinality
    for j, i in rel.pairs:
        img[j] = i
    return img


def perm_name(rel: Relation) -> str:
    """Cycle-notation name, e.g. sigma_23 or sigma_12_34; identity is id_<obj>."""
    image = perm_image(rel)
    labels = element_labels(rel.dom)
    seen = [False] * len(image)
    cycles = []
    for start in range(len(image)):
        if seen[start] or image[start] == start:
            seen[start] = True
            continue
        cyc = []
        k = start
        while not seen[k]:
            seen[k] = True
            cyc.append(k)
            k = image[k]
        cycles.append(cyc)
    if not cycles:
        return f"id_{rel.dom.name}"
    return "sigma_" + "_".join("".join(labels[k] for k in cyc) for cyc in cycles)


def named_permutations(obj: FinObject) -> dict[str, Relation]:
    return {perm_name(p): p for p in all_permutations(obj)}


def conjugate_delta(delta: Relation, sigma: Relation) -> Relation:
    """(sigma x sigma) o delta o sigma-inverse."""
    return compose(tensor(sigma, sigma), compose(delta, dagger(sigma)))


# -- the relational qubit on II --------------------------------------------------

def _state(obj: FinObject, members: list[int]) -> Relation:
    return Relation.from_pairs(UNIT, obj, [(0, m) for m in members])


@lru_cache(maxsize=None)
def frel_qubit() -> Model:
    """The two-element-set model: structures Z, X and the exchanged variant X'."""
    flat = lambda a, b: a * 2 + b

    delta_z = Relation.from_pairs(
        II, II * II, [(0, flat(0, 0)), (1, flat(1, 1))]
    )
    eps_z = Relation.from_pairs(II, UNIT, [(0, 0), (1, 0)])
    delta_x = Relation.from_pairs(
        II, II * II, [(0, flat(0, 0)), (0, flat(1, 1)), (1, flat(0, 1)), (1, flat(1, 0))]
    )
    eps_x = Relation.from_pairs(II, UNIT, [(0, 0)])

    flip = perm_relation(II, [1, 0])
    delta_xp = conjugate_delta(delta_x, flip)
    eps_xp = compose(eps_x, dagger(flip))

    Z = BasisStructure(II, delta_z, eps_z, name="Z")
    X = BasisStructure(II, delta_x, eps_x, name="X")
    Xp = BasisStructure(II, delta_xp, eps_xp, name="X'")

    states = {"z0": _state(II, [0]), "z1": _state(II, [1]), "x0": _state(II, [0, 1])}

    symbols: dict[str, Relation] = {
        "delta_Z": delta_z,
        "eps_Z": eps_z,
        "delta_X": delta_x,
        "eps_X": eps_x,
        "delta_Xp": delta_xp,
        "eps_Xp": eps_xp,
        **states,
        "id_I": identity(UNIT),
        "id_II": identity(II),
        "id_IIxII": identity(II * II),
        "swap_II_II": swap(II, II),
        "sigma_01": flip,
        "eta": basis_eta(Z),
        "eta_Z": basis_eta(Z),
        "eta_X": basis_eta(X),
        "eta_Xp": basis_eta(Xp),
    }
    return Model(
        name="frel-qubit",
        obj=II,
        structures={"Z": Z, "X": X, "X'": Xp},
        states=states,
        symbols=symbols,
    )


# -- Spek generators, states, observables ------------------------------------------

@lru_cache(maxsize=None)
def spek_generators() -> tuple[tuple[Relation, ...], Relation, Relation]:
    """The 24 permutations, the copying relation delta_Z, the deleting eps_Z.

    1-based listing of delta_Z: 1~{(1,1),(2,2)}, 2~{(1,2),(2,1)},
    3~{(3,3),(4,4)}, 4~{(3,4),(4,3)}; eps_Z deletes {1,3}.
    """
    flat = lambda a, b: a * 4 + b
    delta_z = Relation.from_pairs(
        IV,
        IV * IV,
        [
            (0, flat(0, 0)), (0, flat(1, 1)),
            (1, flat(0, 1)), (1, flat(1, 0)),
            (2, flat(2, 2)), (2, flat(3, 3)),
            (3, flat(2, 3)), (3, flat(3, 2)),
        ],
    )
    eps_z = Relation.from_pairs(IV, UNIT, [(0, 0), (2, 0)])
    return all_permutations(IV), delta_z, eps_z


_SPEK_STATE_MEMBERS = {
    # 1-based: z0~{1,2} z1~{3,4} x0~{1,3} x1~{2,4} y0~{1,4} y1~{2,3}
    "z0": [0, 1],
    "z1": [2, 3],
    "x0": [0, 2],
    "x1": [1, 3],
    "y0": [0, 3],
    "y1": [1, 2],
}


@lru_cache(maxsize=None)
def spek_states() -> tuple[NamedState, ...]:
    """The six single-system states; each is a permutation image of x0."""
    perms, _, eps_z = spek_generators()
    x0 = dagger(eps_z)
    out = []
    for name, members in _SPEK_STATE_MEMBERS.items():
        st = _state(IV, members)
        if not any(compose(p, x0) == st for p in perms):
            raise IntegrityError(f"state {name} is not a permutation image of x0")
        out.append(NamedState(name, st))
    return tuple(out)


def _copyable_states(delta: Relation) -> tuple[Relation, ...]:
    """Nonempty states copied by delta (classicality without the counit half)."""
    return tuple(
        psi for psi in all_states(delta.dom) if compose(delta, psi) == tensor(psi, psi)
    )


def _unbiased_states_for_delta(delta: Relation) -> tuple[Relation, ...]:
    return tuple(
        psi
        for psi in all_states(delta.dom)
        if is_unitary(induced_endomorphism(delta, psi))
    )


@lru_cache(maxsize=None)
def observable_orbit() -> dict[tuple[Relation, ...], tuple[Relation, ...]]:
    """Conjugates of delta_Z under all permutations, grouped by copied points.

    Returns {classical-point set -> deduplicated conjugate comultiplications};
    the orbit decomposes into exactly the three observable families.
    """
    perms, delta_z, _ = spek_generators()
    conjugates: dict[tuple, Relation] = {}
    for sigma in perms:
        d = conjugate_delta(delta_z, sigma)
        conjugates.setdefault(d.key, d)
    groups: dict[tuple[Relation, ...], list[Relation]] = {}
    for d in conjugates.values():
        groups.setdefault(_copyable_states(d), []).append(d)
    ordered = {
        points: tuple(sorted(ds, key=lambda r: r.key)) for points, ds in groups.items()
    }
    return dict(sorted(ordered.items(), key=lambda kv: kv[1][0].key))


def _state_name(rel: Relation) -> str | None:
    for ns in spek_states():
        if ns.state == rel:
            return ns.name
    return None


@lru_cache(maxsize=None)
def spek_observables() -> dict[str, Observable]:
    """The observables X, Y, Z: families of four verified structures each.

    delta_X and delta_Y arise from delta_Z by conjugation with sigma(23)
    and sigma(24). Within each family, every conjugate comultiplication is
    paired with the unique counit (drawn from daggers of its unbiased
    points) that satisfies all six laws; a family size other than four is
    an integrity error.
    """
    _, delta_z, _ = spek_generators()
    named = named_permutations(IV)
    delta_x = conjugate_delta(delta_z, named["sigma_23"])
    delta_y = conjugate_delta(delta_z, named["sigma_24"])
    label_by_points = {
        ("z0", "z1"): "Z",
        ("x0", "x1"): "X",
        ("y0", "y1"): "Y",
    }
    representatives = {"Z": delta_z, "X": delta_x, "Y": delta_y}

    out: dict[str, Observable] = {}
    for points, deltas in observable_orbit().items():
        names = tuple(sorted(_state_name(p) or "?" for p in points))
        label = label_by_points.get(names)
        if label is None:
            raise IntegrityError(f"unexpected classical point set {names}")
        members = []
        for d in deltas:
            valid = []
            for u in _unbiased_states_for_delta(d):
                cand = BasisStructure(IV, d, dagger(u))
                if cand.all_laws_hold:
                    valid.append(cand)
            if len(valid) != 1:
                raise IntegrityError(
                    f"{label}-family comultiplication admits {len(valid)} counits"
                )
            eps_name = _state_name(dagger(valid[0].epsilon))
            members.append(
                BasisStructure(IV, d, valid[0].epsilon, name=f"{label}[{eps_name}^]")
            )
        if len(members) != 4:
            raise IntegrityError(f"{label} family has {len(members)} members, expected 4")
        rep = next((m for m in members if m.delta == representatives[label]), None)
        if rep is None:
            raise IntegrityError(f"conjugation representative missing from {label} family")
        out[label] = Observable(label, tuple(members), points, rep)
    if sorted(out) != ["X", "Y", "Z"]:
        raise IntegrityError(f"expected observables X, Y, Z, got {sorted(out)}")
    return out


@lru_cache(maxsize=None)
def spek() -> Model:
    """The Spek model: generators, six states, observables, term symbols."""
    obs = spek_observables()
    states = {ns.name: ns.state for ns in spek_states()}

    symbols: dict[str, Relation] = {}
    for label, ob in obs.items():
        symbols[f"delta_{label}"] = ob.representative.delta
        symbols[f"eps_{label}"] = ob.representative.epsilon
        symbols[f"eta_{label}"] = basis_eta(ob.representative)
    symbols.update(states)
    symbols["eta"] = symbols["eta_Z"]
    symbols["id_I"] = identity(UNIT)
    symbols["id_IV"] = identity(IV)
    symbols["id_IVxIV"] = identity(IV * IV)
    symbols["id_IVxIVxIV"] = identity(IV * IV * IV)
    symbols["swap_IV_IV"] = swap(IV, IV)
    symbols["swap_IV_IVxIV"] = swap(IV, IV * IV)
    symbols["swap_IVxIV_IV"] = swap(IV * IV, IV)
    for name, p in named_permutations(IV).items():
        if name != "id_IV":
            symbols[name] = p

    return Model(
        name="spek",
        obj=IV,
        structures={label: ob.representative for label, ob in obs.items()},
        states=states,
        symbols=symbols,
        observables=obs,
    )


def ghz() -> Relation:
    """The three-system state (delta_Z x 1) o eta."""
    _, delta_z, eps_z = spek_generators()
    eta_iv = compose(delta_z, dagger(eps_z))
    return compose(tensor(delta_z, identity(IV)), eta_iv)


def ghz_invariance() -> tuple[str, ...]:
    """Names of the permutations sigma with (sigma x sigma x sigma) o ghz = ghz."""
    g = ghz()
    out = []
    for p in all_permutations(IV):
        if compose(tensor(p, tensor(p, p)), g) == g:
            out.append(perm_name(p))
    return tuple(out)


# -- Bloch-style table ------------------------------------------------------------

_AXES = {"z0": "Z+", "z1": "Z-", "x0": "X+", "x1": "X-", "y0": "Y+", "y1": "Y-"}


def bloch_table(model: str | Model) -> list[dict]:
    """Rows (state, axis, classical-for, unbiased-for) for a model.

    The qubit table is computed against Z and X (the exchanged variant X'
    classifies identically to X) and carries an explicit absent row for
    the X- direction, which has no relational counterpart.
    """
    m = get_model(model) if isinstance(model, str) else model
    if m.name == "spek":
        axes = {label: ob.representative for label, ob in m.observables.items()}
        order = ["z0", "z1", "x0", "x1", "y0", "y1"]
    else:
        axes = {"Z": m.structures["Z"], "X": m.structures["X"]}
        order = ["z0", "z1", "x0"]
    rows = []
    for name in order:
        st = m.states[name]
        rows.append(
            {
                "state": name,
                "axis": _AXES[name],
                "classical_for": [a for a in sorted(axes) if is_classical(axes[a], st)],
                "unbiased_for": [a for a in sorted(axes) if is_unbiased(axes[a], st)],
                "absent": False,
            }
        )
    if m.name != "spek":
        rows.append(
            {
                "state": None,
                "axis": "X-",
                "classical_for": [],
                "unbiased_for": [],
                "absent": True,
            }
        )
    return rows


def get_model(name: str) -> Model:
    key = name.replace("_", "-").lower()
    if key in ("frel-qubit", "qubit"):
        return frel_qubit()
    if key == "spek":
        return spek()
    raise KeyError(f"unknown model {name!r} (expected 'spek' or 'frel-qubit')")
