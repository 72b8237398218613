from fractions import Fraction

from arrvar.anticanon import (anticanonical_complex, check_vertex_consistency, ell_sigma,
                              gorenstein_check, ray_discrepancies, singularity_type,
                              vanishing_relations)
from arrvar.exactmath import dot
from arrvar.tropical import elementary_cones


def test_discrepancies_running(run_variety):
    disc = ray_discrepancies(run_variety)
    assert len(disc) == 12
    assert all(d.discrepancy == 0 for d in disc.values())
    for e in elementary_cones(run_variety):
        ell, k = ell_sigma(run_variety, e)
        assert ell == e.c_sigma
        assert k == (1 if e.kind == "special" else 2)


def test_vanishing_relations(run_ring):
    assert vanishing_relations(run_ring, (0, 1, 3)) == 1
    assert vanishing_relations(run_ring, (0, 1, 2, 3, 4)) == 2
    assert vanishing_relations(run_ring, (1, 2)) == 0


def test_complex_running(run_variety):
    ac = anticanonical_complex(run_variety)
    assert len(ac.cells) == 26 and ac.bounded
    assert check_vertex_consistency(ac) == []
    assert ac.unbounded_rays() == []
    for cell in ac.cells:
        for r in cell.cone.rays:
            assert dot(cell.u, r) == -1
    assert set(ac.vertices()) == {tuple(Fraction(x) for x in r) for r in ac.rays}


def test_verdict_running(run_variety):
    verdict = singularity_type(run_variety)
    assert verdict.kind == "canonical" and verdict.is_canonical
    assert str(verdict) == "canonical (not terminal)"
    assert verdict.witnesses
    assert singularity_type(run_variety, coarsen=True).kind == "canonical"


def test_gorenstein_running(run_variety):
    rep = gorenstein_check(run_variety)
    assert rep.q_gorenstein and rep.index == 2
    twos = sorted(sorted(c) for c, k in rep.charts.items() if k == 2)
    assert twos == [[0, 1, 2, 4], [0, 1, 3, 5]]
