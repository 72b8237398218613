"""Acceptance criteria; each test records one pass/fail line."""

import time
from fractions import Fraction
from itertools import product

import pytest

from arrvar.anticanon import anticanonical_complex, singularity_type
from arrvar.classifier import (CASE_SHAPES, SearchConfig, bound_parameters, default_case, dedupe,
                               enumerate_cases, normal_form_key, product_sweep, reference_rings,
                               run_search)
from arrvar.cli import parse_input
from arrvar.coxdata import is_honestly_special
from arrvar.exactmath import dot
from arrvar.tropical import classify_cones, elementary_cones, refined_fan, tropical_data
from arrvar.varietycore import (VarietyData, bits, is_fano, numeric_stratum_smooth,
                                smoothness_report, xbar_face_by_solving, xbar_face_test)
from conftest import FIXTURES, RUN_CONES, make_run_ring, record_acceptance
from randomdata import random_instances
from test_tropical import DELTA, FLAT_NAME


def fixture_specs():
    return [(p.name, parse_input(p.read_text())) for p in sorted(FIXTURES.glob("*.arr"))]


@pytest.fixture(scope="module")
def search():
    t = time.time()
    res = run_search(SearchConfig())
    return res, time.time() - t


# -- 1 ---------------------------------------------------------------------------------

def test_running_example_pipeline():
    t = time.time()
    ring = make_run_ring()
    v = VarietyData(ring, RUN_CONES)
    G = ring.grading
    kinds = sorted(classify_cones(v).values())
    trop = tropical_data(v, True)
    delta = {tuple(sorted(FLAT_NAME[F] for F in ch)) for ch in trop.base_cones}
    dt = time.time() - t
    checks = {
        "Cl": (G.rank, G.torsion) == (2, (2, 2, 2)),
        "ring dim": ring.dim == 5,
        "dim": v.dim == 3,
        "complexity": ring.complexity == 2,
        "types": kinds == ["big"] + ["leaf"] * 4 + ["special"] * 4,
        "trop": delta == DELTA,
        "time": dt < 5,
    }
    bad = [k for k, ok in checks.items() if not ok]
    record_acceptance(1, not bad, f"running example; failed: {bad}" if bad else
                      "running example: Cl = Z^2+(Z/2)^3, dims 5/3, c=2, 1 big/4 special/4 leaf, "
                      "10 trop cones", dt)
    assert not bad


# -- 2 ---------------------------------------------------------------------------------

# ranges stated for the five cases; None marks an unbounded side
STATED = {
    "1a": {"x": (-5, -5)},
    "1b": {"x": (-1, -1), "y": (-3, -3)},
    "2a": None,
    "2b": {"x": (None, -1), "y": (-3, -3)},
    "2c": {"x": (-2, -1), "y": (-3, -2), "z": (1, 2)},
}
FOUND = {"1a": [(-5,)], "1b": [(-1, -3)], "2a": [], "2b": [(-2, -3)],
         "2c": [(-2, -3, 1), (-2, -3, 2), (-1, -3, 1), (-1, -2, 1)]}


def within(points, stated, names):
    for p in points:
        for k, n in enumerate(names):
            lo, hi = stated[n]
            if (lo is not None and p[k] < lo) or (hi is not None and p[k] > hi):
                return False
    return True


def range_mismatches(res, stated):
    out = []
    for n, (lo, hi) in stated.items():
        got = res.ranges.get(n)
        if got is None or (lo is not None and got[0] != lo) or (hi is not None and got[1] != hi):
            out.append((n, got, (lo, hi)))
    return out


@pytest.fixture(scope="module")
def bounds():
    t = time.time()
    res = {name: bound_parameters(name) for name in CASE_SHAPES}
    return res, time.time() - t


def test_bound_reproduction(bounds):
    res, dt = bounds
    problems, notes = [], []
    for name, stated in STATED.items():
        r = res[name]
        if r.points != FOUND[name]:
            problems.append(f"{name}: {r.points}")
        if stated is None:
            if r.points:
                problems.append(f"{name} not empty")
            continue
        if not within(r.points, stated, r.case.shape.params):
            problems.append(f"{name} outside stated ranges")
        for n, got, want in range_mismatches(r, stated):
            notes.append(f"{name}: {n} attains {got}, stated {want}")
    ok = not problems and not notes and dt < 60
    detail = "; ".join(problems + notes) or "all five cases match the stated ranges"
    record_acceptance(2, ok, detail, dt)
    # the points found are fixed; the one unattained stated bound is tested below
    assert not problems and dt < 60
    assert [x for x in notes if not x.startswith("2b: x")] == []


@pytest.mark.xfail(strict=True, reason="x = -1 in case 2b puts -K on the boundary of the "
                                       "moving cone; the survivors stop at x = -2")
def test_case_2b_upper_bound_attained(bounds):
    res, _ = bounds
    assert res["2b"].ranges["x"][1] == -1


def test_bounds_do_not_depend_on_placement():
    for case in enumerate_cases():
        assert bound_parameters(case).points == FOUND[case.shape.name], case.name


# -- 3 ---------------------------------------------------------------------------------

def rho_one_varieties(window=6):
    for name in ("1a", "1b"):
        case = default_case(name)
        shape = case.shape
        for vals in product(range(-window, window + 1), repeat=len(shape.params)):
            if not shape.admissible(vals):
                continue
            try:
                ring = case.build(vals)
                yield f"{name}{vals}", VarietyData(ring, ample=(1,))
            except ValueError:
                continue


def discrepancy_cross_check(v):
    """Number of elementary cones checked; raises AssertionError on mismatch."""
    ac = anticanonical_complex(v)
    fan_rays = set(refined_fan(v).rays())
    count = 0
    for e in elementary_cones(v):
        assert e.ray in fan_rays
        d = ac.rays[e.ray]
        if d.bounded:
            vert = tuple(Fraction(x, d.ell) for x in e.v_sigma)
            assert vert == d.vertex
            for cell in ac.cells:
                if e.ray in cell.cone.rays:
                    assert dot(cell.u, vert) == -1
        count += 1
    return count


def test_discrepancy_cross_validation():
    t = time.time()
    cones = varieties = 0
    skipped = []
    for name, spec in fixture_specs():
        v = spec.variety()
        try:
            anticanonical_complex(v)
        except ValueError:
            skipped.append(name)
            continue
        cones += discrepancy_cross_check(v)
        varieties += 1
    for _, v in rho_one_varieties():
        cones += discrepancy_cross_check(v)
        varieties += 1
    dt = time.time() - t
    ok = dt < 30 and skipped == ["not-honest.arr"]
    record_acceptance(3, ok, f"{cones} elementary cones on {varieties} varieties agree "
                             f"(skipped: {', '.join(skipped)})", dt)
    assert ok


# -- 4 ---------------------------------------------------------------------------------

def test_no_smooth_honest_varieties(search):
    res, search_time = search
    t = time.time()
    sweep_smooth = [c for c in res.analyzed if c.smoothness == "smooth"]
    samples = random_instances(1000, seed=2024)
    random_smooth = []
    for ring, v in samples:
        assert is_honestly_special(ring)[0] and v.rho <= 2
        if smoothness_report(v).status == "smooth":
            random_smooth.append(ring)
    dt = time.time() - t + search_time
    ok = not sweep_smooth and not random_smooth and dt < 600
    record_acceptance(4, ok, f"{len(res.analyzed)} sweep points and {len(samples)} random "
                             f"instances, smooth: {len(sweep_smooth) + len(random_smooth)}", dt)
    assert ok


# -- 5 ---------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def sweep():
    t = time.time()
    members = list(product_sweep())
    return members, time.time() - t


def stated_fano(m):
    return 0 <= m.a[0] <= Fraction(m.k1 - 2, m.k2 - 2)


def on_boundary(m):
    return m.a[0] == Fraction(m.k1 - 2, m.k2 - 2)


def test_product_family(sweep):
    members, dt = sweep
    not_smooth = [m for m in members if m.smooth != "smooth"]
    inner = [m for m in members if not on_boundary(m)]
    boundary = [m for m in members if on_boundary(m)]
    wrong_inner = [m for m in inner if m.fano != stated_fano(m)]
    wrong_boundary = [m for m in boundary if m.fano != stated_fano(m)]
    min_dim = min(m.dim for m in members)
    ok = not not_smooth and not wrong_inner and not wrong_boundary and min_dim == 6 and dt < 120
    detail = (f"{len(members)} members smooth: {not not_smooth}, min dim {min_dim}, "
              f"Fano criterion holds off the boundary ({len(inner)}); "
              f"{len(wrong_boundary)} of {len(boundary)} boundary members with "
              f"a1 = (k1-2)/(k2-2) are not Fano")
    record_acceptance(5, ok, detail, dt)
    assert not not_smooth and not wrong_inner and min_dim == 6 and dt < 120
    assert all(m.fano == m.fano_criterion for m in members)


@pytest.mark.xfail(strict=True, reason="at a1 = (k1-2)/(k2-2) the anticanonical class lies "
                                       "on the boundary of the ample cone")
def test_product_family_boundary_is_fano(sweep):
    members, _ = sweep
    boundary = [m for m in members if on_boundary(m)]
    assert boundary and all(m.fano for m in boundary)


# -- 6 ---------------------------------------------------------------------------------

def test_oracle_equivalences():
    t = time.time()
    faces = numeric = 0
    for name, spec in fixture_specs():
        ring = spec.ring()
        v = spec.variety(ring)
        for mask in range(1 << ring.num_vars):
            face = bits(mask)
            assert xbar_face_test(v, face) == xbar_face_by_solving(ring, face), (name, face)
            faces += 1
            if v.xbar_array[mask]:
                got = numeric_stratum_smooth(ring, face, samples=100, seed=mask)
                assert got == v._stratum_smooth_mask(mask), (name, face)
                numeric += 1
    dt = time.time() - t
    record_acceptance(6, dt < 300, f"{faces} faces against the solver, {numeric} strata "
                                   f"against 100 numeric Jacobians each", dt)
    assert dt < 300


# -- 7 ---------------------------------------------------------------------------------

def test_search_output_properties(search):
    res, search_time = search
    t = time.time()
    accepted = res.accepted
    recheck_failures = []
    for c in accepted:
        ring, v = c.rebuild()
        if not (is_fano(v) and singularity_type(v).is_canonical and is_honestly_special(ring)[0]):
            recheck_failures.append(c.case)
    dd = dedupe(accepted)
    again = dedupe(dd.representatives)
    idempotent = [c.key for c in again.representatives] == [c.key for c in dd.representatives]
    run_key = normal_form_key(reference_rings()["running example"])
    present = run_key in dd.groups
    dt = time.time() - t + search_time
    ok = accepted and not recheck_failures and idempotent and present and not res.failures
    record_acceptance(7, bool(ok), f"{len(accepted)} accepted, {len(dd.representatives)} classes, "
                                   f"rechecks failed: {len(recheck_failures)}, running example "
                                   f"present: {present}, dedupe idempotent: {idempotent}", dt)
    assert ok
