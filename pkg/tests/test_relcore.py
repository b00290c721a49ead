import json
import random

import pytest
from hypothesis import given, strategies as st

from toycat.relcore import (
    FinObject,
    Relation,
    ShapeMismatchError,
    UNIT,
    compose,
    conjugate_star,
    dagger,
    identity,
    is_unitary,
    least_diff_cell,
    relation_from_json,
    relation_to_json,
    scalar_empty,
    scalar_identity,
    scalar_kind,
    snake_holds,
    swap,
    tensor,
    transpose_star,
)

from oracle import compose_oracle, dagger_oracle, random_relation, tensor_oracle

II = FinObject(2)
IV = FinObject(4)


def rel(dom, cod, pairs):
    return Relation.from_pairs(dom, cod, pairs)


# -- objects -----------------------------------------------------------------

def test_unit_congruence_erases_trivial_factors():
    assert FinObject(4, 1) == FinObject(1, 4) == FinObject(4)
    assert FinObject(1, 1) == UNIT
    assert UNIT.cardinality == 1
    assert FinObject(4, 4).cardinality == 16


def test_object_names():
    assert str(UNIT) == "I"
    assert str(II) == "II"
    assert str(IV * IV) == "IVxIV"


def test_bad_factor_rejected():
    with pytest.raises(ValueError):
        FinObject(0)


# -- constructors and canonical form ------------------------------------------

def test_pairs_round_trip_and_sorted():
    r = rel(IV, II, [(3, 1), (0, 0), (2, 0)])
    assert r.pairs == ((0, 0), (2, 0), (3, 1))
    assert Relation.from_pairs(IV, II, r.pairs) == r


def test_row_validation():
    with pytest.raises(ValueError):
        Relation(II, II, (1,))
    with pytest.raises(ValueError):
        Relation(II, II, (4, 0))


def test_out_of_range_pair_rejected():
    with pytest.raises(ValueError):
        rel(II, II, [(2, 0)])


# -- composition ---------------------------------------------------------------

def test_compose_mismatch_names_both_objects():
    z0 = rel(UNIT, IV, [(0, 0), (0, 1)])
    delta = rel(IV, IV * IV, [(0, 0)])
    with pytest.raises(ShapeMismatchError) as err:
        compose(z0, delta)
    assert "IVxIV" in str(err.value) and "I" in str(err.value)


def test_compose_matches_oracle_exhaustively_on_size_2():
    shapes = [UNIT, II]
    for a in shapes:
        for b in shapes:
            for c in shapes:
                for fbits in range(1 << (a.cardinality * b.cardinality)):
                    f = Relation(
                        a, b,
                        tuple(
                            sum(
                                1 << j
                                for j in range(a.cardinality)
                                if fbits >> (i * a.cardinality + j) & 1
                            )
                            for i in range(b.cardinality)
                        ),
                    )
                    for gbits in range(1 << (b.cardinality * c.cardinality)):
                        g = Relation(
                            b, c,
                            tuple(
                                sum(
                                    1 << j
                                    for j in range(b.cardinality)
                                    if gbits >> (i * b.cardinality + j) & 1
                                )
                                for i in range(c.cardinality)
                            ),
                        )
                        assert compose(g, f) == compose_oracle(g, f)


def test_compose_matches_oracle_random_sizes_3_4():
    rng = random.Random(20240917)
    sizes = [FinObject(3), FinObject(4), FinObject(2, 2), FinObject(3, 4) if False else FinObject(4)]
    for _ in range(2000):
        a, b, c = (rng.choice(sizes) for _ in range(3))
        f = random_relation(rng, a, b, rng.choice([0.2, 0.5, 0.8]))
        g = random_relation(rng, b, c, rng.choice([0.2, 0.5, 0.8]))
        assert compose(g, f) == compose_oracle(g, f)


# -- tensor ---------------------------------------------------------------------

def test_tensor_flattening_is_row_major():
    # single pairs land at index first*|second| + second
    f = rel(II, II, [(1, 0)])
    g = rel(II, II, [(0, 1)])
    t = tensor(f, g)
    assert t.pairs == ((2, 1),)  # dom (1,0) -> flat 2, cod (0,1) -> flat 1


def test_tensor_matches_oracle_random():
    rng = random.Random(7)
    sizes = [UNIT, II, FinObject(3), IV]
    for _ in range(300):
        f = random_relation(rng, rng.choice(sizes), rng.choice(sizes))
        g = random_relation(rng, rng.choice(sizes), rng.choice(sizes))
        assert tensor(f, g) == tensor_oracle(f, g)


def test_tensor_unit_is_identity_on_morphisms():
    rng = random.Random(11)
    f = random_relation(rng, IV, II)
    assert tensor(identity(UNIT), f) == f
    assert tensor(f, identity(UNIT)) == f


# -- dagger ----------------------------------------------------------------------

@st.composite
def relations(draw, max_card=4):
    sizes = [1, 2, 3, 4]
    dom = FinObject(draw(st.sampled_from(sizes)))
    cod = FinObject(draw(st.sampled_from(sizes)))
    nd, nc = dom.cardinality, cod.cardinality
    bits = draw(st.integers(min_value=0, max_value=(1 << (nd * nc)) - 1))
    pairs = [(j, i) for i in range(nc) for j in range(nd) if bits >> (i * nd + j) & 1]
    return Relation.from_pairs(dom, cod, pairs)


@given(relations())
def test_dagger_involution(f):
    assert dagger(dagger(f)) == f


@given(relations())
def test_dagger_matches_oracle(f):
    assert dagger(f) == dagger_oracle(f)


@given(relations(), relations())
def test_dagger_distributes_over_tensor(f, g):
    assert tensor(dagger(f), dagger(g)) == dagger(tensor(f, g))


def test_dagger_contravariant_over_compose():
    rng = random.Random(3)
    for _ in range(200):
        f = random_relation(rng, II, IV)
        g = random_relation(rng, IV, II)
        assert dagger(compose(g, f)) == compose(dagger(f), dagger(g))


# -- structural morphisms ---------------------------------------------------------

def test_identity_composes_neutrally():
    rng = random.Random(5)
    f = random_relation(rng, IV, II)
    assert compose(f, identity(IV)) == f
    assert compose(identity(II), f) == f


def test_identity_on_unit_is_identity_scalar():
    assert identity(UNIT) == scalar_identity()


def test_swap_self_inverse_and_naturality():
    rng = random.Random(13)
    s = swap(II, IV)
    assert compose(swap(IV, II), s) == identity(II * IV)
    for _ in range(100):
        f = random_relation(rng, II, II)
        g = random_relation(rng, IV, IV)
        lhs = compose(swap(II, IV), tensor(f, g))
        rhs = compose(tensor(g, f), swap(II, IV))
        assert lhs == rhs


def test_associativity_of_compose():
    rng = random.Random(17)
    for _ in range(300):
        objs = [UNIT, II, FinObject(3), IV]
        a, b, c, d = (rng.choice(objs) for _ in range(4))
        f = random_relation(rng, a, b)
        g = random_relation(rng, b, c)
        h = random_relation(rng, c, d)
        assert compose(h, compose(g, f)) == compose(compose(h, g), f)


def test_interchange_law():
    rng = random.Random(19)
    for _ in range(200):
        f1 = random_relation(rng, II, IV)
        f2 = random_relation(rng, IV, II)
        g1 = random_relation(rng, IV, II)
        g2 = random_relation(rng, II, IV)
        lhs = compose(tensor(g1, g2), tensor(f1, f2))
        rhs = tensor(compose(g1, f1), compose(g2, f2))
        assert lhs == rhs


# -- scalars -----------------------------------------------------------------------

def test_scalars_closed_under_composition():
    e, one = scalar_empty(), scalar_identity()
    assert compose(e, e) == e
    assert compose(e, one) == e
    assert compose(one, e) == e
    assert compose(one, one) == one
    assert scalar_kind(e) == "empty"
    assert scalar_kind(one) == "identity"


# -- unitarity ----------------------------------------------------------------------

def test_permutation_is_unitary():
    # sigma(23) on IV, 0-indexed elements: swaps indices 1 and 2
    sigma = rel(IV, IV, [(0, 0), (1, 2), (2, 1), (3, 3)])
    assert is_unitary(sigma)


def test_projector_is_not_unitary():
    z0 = rel(UNIT, IV, [(0, 0), (0, 1)])
    proj = compose(z0, dagger(z0))
    assert not is_unitary(proj)


def test_non_bijection_not_unitary():
    assert not is_unitary(rel(II, IV, [(0, 0), (1, 1)]))


# -- transpose ------------------------------------------------------------------------

def eta_diag(obj):
    return Relation.from_pairs(
        UNIT, obj * obj, [(0, i * obj.cardinality + i) for i in range(obj.cardinality)]
    )


def test_snake_holds_for_diagonal_cup():
    assert snake_holds(eta_diag(II))
    assert snake_holds(eta_diag(IV))


def test_snake_fails_for_degenerate_cup():
    cup = rel(UNIT, IV * IV, [(0, 0)])
    assert not snake_holds(cup)


def test_transpose_of_identity():
    eta = eta_diag(IV)
    assert transpose_star(identity(IV), eta, eta) == identity(IV)


def test_transpose_of_permutation_is_inverse_graph():
    eta = eta_diag(IV)
    sigma = rel(IV, IV, [(0, 1), (1, 2), (2, 0), (3, 3)])  # 3-cycle
    expected = dagger(sigma)  # for the diagonal cup, transpose = converse graph
    assert transpose_star(sigma, eta, eta) == expected


def test_transpose_is_involutive_exhaustively_on_II():
    eta = eta_diag(II)
    for bits in range(16):
        pairs = [(j, i) for i in range(2) for j in range(2) if bits >> (i * 2 + j) & 1]
        f = rel(II, II, pairs)
        assert transpose_star(transpose_star(f, eta, eta), eta, eta) == f


def test_transpose_rejects_bad_cup():
    bad = rel(UNIT, IV * IV, [(0, 0)])
    with pytest.raises(ValueError):
        transpose_star(identity(IV), bad, eta_diag(IV))


def test_conjugate_against_diagonal_cup_is_identity_operation():
    # with diagonal cups the transpose is the converse, so conjugation fixes f
    eta = eta_diag(IV)
    rng = random.Random(23)
    for _ in range(50):
        f = random_relation(rng, IV, IV)
        assert conjugate_star(f, eta, eta) == f


# -- serialization -----------------------------------------------------------------------

def test_json_round_trip_bit_exact():
    r = rel(IV * IV, IV, [(0, 0), (5, 1), (15, 3)])
    blob = json.dumps(relation_to_json(r), sort_keys=True)
    assert relation_from_json(json.loads(blob)) == r
    assert json.dumps(relation_to_json(relation_from_json(json.loads(blob))), sort_keys=True) == blob


def test_json_rejects_unsorted_or_duplicate_pairs():
    with pytest.raises(ValueError):
        relation_from_json({"dom": [4], "cod": [4], "pairs": [[1, 0], [0, 0]]})
    with pytest.raises(ValueError):
        relation_from_json({"dom": [4], "cod": [4], "pairs": [[0, 0], [0, 0]]})


def test_least_diff_cell_orders_by_row_then_col():
    a = rel(II, II, [(0, 0), (1, 1)])
    b = rel(II, II, [(1, 0), (1, 1)])
    assert least_diff_cell(a, b) == (0, 0)
    assert least_diff_cell(a, a) is None
