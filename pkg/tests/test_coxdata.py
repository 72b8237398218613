from hypothesis import given, settings, strategies as st
import pytest

from arrvar.arrangement import ArrangementData
from arrvar.coxdata import (CoxRingData, ExponentData, Grading, build_ring,
                            is_honestly_special, k_prime_variables, normalized_relations,
                            product_ring, relation_degree)
from conftest import RUN_A, RUN_L


def test_running_ring_dimensions(run_ring):
    assert (run_ring.r, run_ring.s, run_ring.c) == (4, 1, 2)
    assert run_ring.dim == 5 and run_ring.num_vars == 7


def test_running_class_group(run_ring):
    G = run_ring.grading
    assert G.rank == 2 and G.torsion == (2, 2, 2)
    assert G.degree_matrix() == [[1, 1, 1, 1, 1, 1, 1], [0, 2, 1, 1, 1, 1, 2]]


def test_relations_are_homogeneous(run_ring):
    degs = relation_degree(run_ring)
    assert degs[0] == degs[1] == (2, 2, 0, 0, 0)
    assert run_ring.relations == ((1, 1, 0, -1, 0), (1, 0, 1, 0, -1))


def test_p_rows_have_degree_zero(run_ring):
    G = run_ring.grading
    for row in run_ring.P:
        assert not any(G.element(row))


def test_honesty_and_kprime(run_ring):
    assert is_honestly_special(run_ring)[0]
    assert k_prime_variables(run_ring) == [True] * 7


def test_ring_without_d_rows():
    ring = build_ring(RUN_A, ExponentData(RUN_L, 1))
    assert ring.s == 0 and ring.grading.rank == 3


def test_not_honest_example():
    A = [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 0]]
    ring = build_ring(A, ExponentData(((2,), (2,), (2,), (2,))), [[-1, 1, 1, 1]])
    assert ring.P == [[-2, 2, 0, 0], [-2, 0, 2, 0], [-2, 0, 0, 2], [-1, 1, 1, 1]]
    honest, why = is_honestly_special(ring)
    assert not honest and "no relation" in why


def test_eliminable_variable_not_honest():
    ring = build_ring(RUN_A, ExponentData(((1,), (2,), (2,), (2,), (2,))))
    assert not is_honestly_special(ring)[0]


def test_general_position_not_honest():
    A = [[1, 0, 0, 1, 1], [0, 1, 0, 1, 2], [0, 0, 1, 1, 3]]
    ring = build_ring(A, ExponentData(((2,),) * 5))
    assert is_honestly_special(ring) == (False, "arrangement in general position")


def test_invalid_p_rejected():
    with pytest.raises(ValueError):
        build_ring(RUN_A, ExponentData(RUN_L, 1), [[-2, -3, 1, 1, 1, 1]])
    with pytest.raises(ValueError):      # T11 and T21 columns coincide
        build_ring(RUN_A, ExponentData(RUN_L, 1), [[0, 0, 0, 0, 0, 0, 0]])


def test_order_modulo():
    G = Grading([[2]], 1)
    assert G.torsion == (2,)
    assert G.order_modulo([1], []) == 2
    assert G.order_modulo([1], [0]) == 1


def test_product_ring_blocks():
    from arrvar.classifier import product_family
    ring = product_family(5, 5, (0, 0, 0, 0, 0)).ring
    assert ring.factors == ((0, 1, 2), (3, 4, 5))
    assert (ring.t, ring.r, ring.c) == (2, 4, 2) and len(ring.relations) == 2
    assert ring.grading.rank == 2 and ring.grading.torsion == ()


def test_product_ring_rejects_decomposable_factor():
    A = [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 0]]
    with pytest.raises(ValueError):
        product_ring([(A, ((2,),) * 4)], [[0] * 4])


def test_normalized_relations_sign():
    for v in normalized_relations(RUN_A):
        assert next(x for x in v if x) > 0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=7, max_size=7))
def test_grading_kills_p(d):
    try:
        ring = CoxRingData(ArrangementData(RUN_A), ExponentData(RUN_L, 1), [d])
    except ValueError:
        return
    G = ring.grading
    for row in ring.P:
        assert not any(G.element(row))
    assert G.rank == 7 - len(ring.P)
    degs = relation_degree(ring)
    assert len(set(degs)) == 1
