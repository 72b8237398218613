"""Bounded search for canonical Fano honestly special arrangement
threefolds of Picard number at most two, and the smooth product family.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from math import gcd

from .anticanon import ell_sigma, singularity_type
from .arrangement import ArrangementData
from .coxdata import (ExponentData, build_ring, is_honestly_special, k_prime_variables,
                      p0_matrix, product_ring)
from .exactmath import (determinant, hermite_normal_form, kernel_basis, orthogonal_complement,
                        smith_normal_form, solve_linear, vector_gcd)
from .polyhedra import meets_coordinate_subspace
from .tropical import ElementaryCone, classify_cone, elementary_data, tropical_data
from .varietycore import (VarietyData, anticanonical_class, bits, fan_from_ample,
                          is_fano, smoothness_report)

# Kernel vectors of A for the two five-line configurations. The second
# relation of the first type carries a generic coefficient; 2 avoids the
# extra triple point that the coefficient 1 would create.
RELATION_TYPES = {
    "I": ((1, 1, 1, 1, 0), (0, 1, 2, 0, 1)),
    "II": ((1, 1, 0, 1, 0), (1, 0, 1, 0, 1)),
}


def arrangement_matrix(relation_type):
    """A with the given relations as a basis of its kernel."""
    rel = RELATION_TYPES[relation_type]
    return [list(r) for r in orthogonal_complement(rel, 5)]


def _automorphisms(arr):
    """Column permutations preserving the rank function."""
    n = arr.r + 1
    subsets = [S for S in product((0, 1), repeat=n)]
    sets = [tuple(i for i in range(n) if S[i]) for S in subsets]
    out = []
    for g in permutations(range(n)):
        if all(arr.rank_of([g[i] for i in S]) == arr.rank_of(S) for S in sets):
            out.append(g)
    return out


# -- cases ------------------------------------------------------------------------------

@dataclass(frozen=True)
class CaseShape:
    """A normalized P-shape; `d` maps parameters to the d rows."""
    name: str
    picard: int
    n: tuple
    m: int
    params: tuple
    d_template: tuple       # rows of entries: int or parameter name

    @property
    def exponents(self):
        return ExponentData(tuple((1, 1) if k == 2 else (2,) for k in self.n), self.m)

    def d_rows(self, values):
        env = dict(zip(self.params, values))
        return [[env[x] if isinstance(x, str) else x for x in row] for row in self.d_template]

    def admissible(self, values):
        env = dict(zip(self.params, values))
        if "y" in env and env["x"] <= env["y"]:
            return False
        if "z" in env and env["z"] <= 0:
            return False
        return True

    def block_signatures(self):
        """Per block: n and the d entries over its columns."""
        e = self.exponents
        out = []
        for b in range(5):
            out.append((self.n[b], tuple(tuple(row[j] for j in e.block_vars(b))
                                         for row in self.d_template)))
        return out


CASE_SHAPES = {
    "1a": CaseShape("1a", 1, (1, 1, 1, 1, 1), 1, ("x",),
                    (("x", 1, 1, 1, 1, 1),)),
    "1b": CaseShape("1b", 1, (2, 1, 1, 1, 1), 0, ("x", "y"),
                    (("x", "y", 1, 1, 1, 1),)),
    "2a": CaseShape("2a", 2, (1, 1, 1, 1, 1), 2, ("x",),
                    (("x", 1, 1, 1, 1, 1, -1),)),
    "2b": CaseShape("2b", 2, (1, 2, 1, 1, 1), 1, ("x", "y"),
                    ((1, "x", "y", 1, 1, 1, 1),)),
    "2c": CaseShape("2c", 2, (1, 2, 2, 1, 1), 0, ("x", "y", "z"),
                    ((1, "x", "y", "z", 0, 1, 1),)),
}


@dataclass(frozen=True)
class SearchCase:
    shape: CaseShape
    relation_type: str
    placement: tuple        # placement[b] = line carrying block b of the shape

    @property
    def name(self):
        return f"{self.shape.name}/{self.relation_type}/{''.join(map(str, self.placement))}"

    def arrangement(self):
        A = arrangement_matrix(self.relation_type)
        return [[row[self.placement[b]] for b in range(5)] for row in A]

    def build(self, values):
        return build_ring(self.arrangement(), self.shape.exponents, self.shape.d_rows(values))


def placements(shape, relation_type):
    """One placement per orbit under arrangement symmetries and
    interchangeable blocks of the shape."""
    arr = ArrangementData(arrangement_matrix(relation_type))
    autos = _automorphisms(arr)
    sig = shape.block_signatures()
    same = [h for h in permutations(range(5)) if all(sig[h[b]] == sig[b] for b in range(5))]
    seen, out = set(), []
    for pi in permutations(range(5)):
        if pi in seen:
            continue
        orbit = {tuple(g[pi[h[b]]] for b in range(5)) for g in autos for h in same}
        seen |= orbit
        out.append(min(orbit))
    return sorted(out)


def enumerate_cases(picard=None, relation_types=("I", "II")):
    out = []
    for key in sorted(CASE_SHAPES):
        shape = CASE_SHAPES[key]
        if picard is not None and shape.picard != picard:
            continue
        for t in relation_types:
            for pl in placements(shape, t):
                out.append(SearchCase(shape, t, pl))
    return out


def default_case(name):
    """The shape placed on the lines in order, first relation type."""
    return SearchCase(CASE_SHAPES[name], "I", (0, 1, 2, 3, 4))


# -- bounds -----------------------------------------------------------------------------

def big_cone_vertices(v):
    """(cone, ell_sigma, vertex) for the elementary big cones with one
    T generator in every block and no S generator."""
    ring = v.ring
    e = ring.exponents
    nblocks = len(e.l)
    out = []
    for mask in sorted(v.cone_masks):
        gens = frozenset(bits(mask))
        if len(gens) != nblocks or any(e.block_of(j) is None for j in gens):
            continue
        data = elementary_data(ring, gens)
        if data is None:
            continue
        sigma = v.cone_of(gens)
        if not meets_coordinate_subspace(sigma, ring.r):
            continue
        if sigma.dim <= ring.c + ring.s:
            if classify_cone(sigma, tropical_data(v)) != "big":
                continue
        chosen, weights, v_sigma, c_sigma = data
        cone = ElementaryCone(gens, "big", chosen, weights, v_sigma, c_sigma)
        ell, _ = ell_sigma(v, cone)
        vert = tuple(Fraction(x, ell) for x in v_sigma) if ell > 0 else None
        out.append((gens, ell, vert))
    return out


def vertex_admissible(vert):
    """Does the segment from 0 to the vertex avoid nonzero lattice points
    other than its endpoint?"""
    if vert is None or not any(vert):
        return False
    den = 1
    for x in vert:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in vert]
    g = vector_gcd(ints)
    # vert = (g / den) * primitive
    return Fraction(g, den) <= 1


@dataclass
class BoundResult:
    case: SearchCase
    window: int
    points: list            # admissible parameter tuples
    rejected: dict = field(default_factory=dict)

    @property
    def ranges(self):
        names = self.case.shape.params
        if not self.points:
            return {}
        return {n: (min(p[k] for p in self.points), max(p[k] for p in self.points))
                for k, n in enumerate(names)}


def fano_variety(ring):
    """(variety on which -K_X is ample, whether -K_X lies on a GIT wall).

    Raises ValueError when no such variety exists.
    """
    _, u = anticanonical_class(ring)
    try:
        return VarietyData(ring, ample=u), False
    except ValueError as exc:
        if "wall" not in str(exc):
            raise
    return VarietyData(ring, ample=u, allow_wall=True), True


def screen_point(case, values):
    """None if the point passes the Fano and big-cone vertex tests,
    otherwise the reason for rejection."""
    try:
        ring = case.build(values)
    except ValueError:
        return "invalid P"
    try:
        v, _ = fano_variety(ring)
    except ValueError:
        return "not Fano"
    for _, ell, vert in big_cone_vertices(v):
        if ell <= 0:
            return "unbounded big cone ray"
        if not vertex_admissible(vert):
            return "big cone vertex too far"
    return None


def bound_parameters(case, window=6):
    """Integer parameter points in [-window, window] surviving the Fano
    condition and the vertex conditions of the big cones."""
    if isinstance(case, str):
        case = default_case(case)
    shape = case.shape
    res = BoundResult(case, window, [])
    for values in product(range(-window, window + 1), repeat=len(shape.params)):
        if not shape.admissible(values):
            continue
        why = screen_point(case, values)
        if why is None:
            res.points.append(values)
        else:
            res.rejected[why] = res.rejected.get(why, 0) + 1
    for p in res.points:
        if any(abs(x) == window for x in p):
            raise ValueError(f"survivor {p} touches the search window; bound not found")
    return res


# -- candidates -----------------------------------------------------------------------

@dataclass
class Candidate:
    case: str
    relation_type: str
    params: tuple
    A: tuple
    n: tuple
    m: int
    P: tuple
    maximal_cones: tuple
    class_group: tuple      # (free rank, torsion orders)
    degrees: tuple          # generator degrees in K
    anticanonical: tuple    # -K_X in K
    honest: bool
    canonical: bool
    fano: bool
    singularity: str
    smoothness: str
    on_wall: bool = False
    key: tuple = None
    errors: list = field(default_factory=list)

    def rebuild(self):
        """Fresh ring and variety from the stored matrices."""
        ex = ExponentData(tuple((1, 1) if k == 2 else (2,) for k in self.n), self.m)
        r = len(self.A[0]) - 1
        ring = build_ring([list(row) for row in self.A], ex, [list(row) for row in self.P[r:]])
        return ring, VarietyData(ring, [list(c) for c in self.maximal_cones])

    def record(self):
        """Row of the result table."""
        return {
            "case": self.case,
            "relation_type": self.relation_type,
            "params": list(self.params),
            "n": list(self.n),
            "m": self.m,
            "class_group": {"free": self.class_group[0], "torsion": list(self.class_group[1])},
            "degrees": [list(d) for d in self.degrees],
            "anticanonical": list(self.anticanonical),
            "singularity": self.singularity,
        }


def analyze_point(case, values):
    """Full analysis of one grid point; None if it is not canonical Fano."""
    ring = case.build(values)
    v, on_wall = fano_variety(ring)
    G = ring.grading
    errors = []
    kp = k_prime_variables(ring)
    if any(x is False for x in kp):
        errors.append("a generator is not K-prime")
    elif any(x is None for x in kp):
        errors.append("K-primality undecided")
    honest, _ = is_honestly_special(ring)
    verdict = singularity_type(v)
    fano = is_fano(v)
    k, _ = anticanonical_class(ring)
    e = ring.exponents
    cand = Candidate(
        case=case.name, relation_type=case.relation_type, params=tuple(values),
        A=tuple(tuple(r) for r in ring.arrangement.A), n=e.n, m=e.m,
        P=tuple(tuple(r) for r in ring.P),
        maximal_cones=tuple(tuple(sorted(c)) for c in v.maximal_cones),
        class_group=(G.rank, tuple(G.torsion)), degrees=tuple(G.degrees()),
        anticanonical=tuple(k), honest=honest, canonical=verdict.is_canonical,
        fano=fano, singularity=str(verdict), smoothness=smoothness_report(v).status,
        on_wall=on_wall, errors=errors)
    cand.key = normal_form_key(ring)
    return cand


def _search_task(args):
    case, window = args
    out, failures = [], []
    for values in bound_parameters(case, window).points:
        try:
            c = analyze_point(case, values)
        except ValueError as exc:
            failures.append((case.name, values, str(exc)))
            continue
        out.append(c)
    return out, failures


@dataclass
class SearchConfig:
    picard: int = None      # None: both 1 and 2
    isotropy: int = 2
    cases: tuple = None     # shape names, e.g. ("2b",)
    window: int = 6
    jobs: int = 1


@dataclass
class SearchResult:
    analyzed: list          # every analyzed grid point
    failures: list

    @property
    def accepted(self):
        return [c for c in self.analyzed if c.canonical and c.fano and c.honest and not c.errors]


def run_search(config=None):
    config = config or SearchConfig()
    if config.isotropy != 2:
        raise ValueError("only isotropy order at most 2 is supported")
    cases = enumerate_cases(config.picard)
    if config.cases is not None:
        cases = [c for c in cases if c.shape.name in config.cases]
    tasks = [(c, config.window) for c in cases]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as ex:
            results = list(ex.map(_search_task, tasks))
    else:
        results = [_search_task(t) for t in tasks]
    analyzed, failures = [], []
    for out, fail in results:
        analyzed += out
        failures += fail
    analyzed.sort(key=lambda c: (c.key, c.case, c.params))
    return SearchResult(analyzed, sorted(failures))


# -- redundancy -----------------------------------------------------------------------

def normal_form_key(ring):
    """Invariant of (A, P) under the admissible operations.

    Up to row operations the ring only depends on the matroid of A, the
    exponents and the row lattice of P. The key is the least tuple
    (rank function, block sizes, Hermite form of the row lattice) over
    all orderings of the blocks, swaps inside blocks and permutations of
    the free variables.
    """
    e = ring.exponents
    arr = ring.arrangement
    nb = len(e.l)
    subsets = [tuple(i for i in range(nb) if S >> i & 1) for S in range(1 << nb)]
    s_perms = sorted(set(permutations(range(e.n_total, e.num_vars))))
    best = None
    for order in permutations(range(nb)):
        # new block k is old block order[k]
        ranks = tuple(arr.rank_of([order[k] for k in S]) for S in subsets)
        head = (ranks, tuple(e.l[b] for b in order), e.m)
        if best is not None and head > best[:3]:
            continue
        choices = [sorted(set(permutations(e.block_vars(b)))) for b in order]
        for combo in product(*choices, s_perms):
            cols = [j for part in combo for j in part]
            H, _ = hermite_normal_form([[row[j] for j in cols] for row in ring.P])
            key = head + (tuple(tuple(r) for r in H if any(r)),)
            if best is None or key < best:
                best = key
    return best


def reference_rings():
    """Named rings whose classes the search tables point out."""
    ex = ExponentData(((1, 1), (2,), (2,), (2,), (2,)), 1)
    A = [[1, 0, 0, 1, 1], [0, 1, 0, 1, 0], [0, 0, 1, 0, 1]]
    return {"running example": build_ring(A, ex, [[-2, -3, 1, 1, 1, 1, 1]])}


def coarse_invariants(c):
    free = [x for x in c.anticanonical[:c.class_group[0]]]
    return (c.relation_type, tuple(sorted(c.n)), c.m, c.class_group,
            vector_gcd(free) if any(free) else 0)


@dataclass
class DedupeResult:
    representatives: list
    groups: dict            # key -> list of candidates
    flags: list             # pairs of keys that might still be isomorphic


def dedupe(candidates):
    groups = {}
    for c in candidates:
        groups.setdefault(c.key, []).append(c)
    keys = sorted(groups)
    reps = [min(groups[k], key=lambda c: (c.case, c.params)) for k in keys]
    flags = []
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if coarse_invariants(reps[i]) == coarse_invariants(reps[j]):
                flags.append((keys[i], keys[j]))
    return DedupeResult(reps, groups, flags)


# -- product family -----------------------------------------------------------------------

def product_exponents(k):
    """Blocks for one factor: pairs with l = (1, 1) and a final square
    when k is odd."""
    blocks = [(1, 1)] * (k // 2)
    if k % 2:
        blocks.append((2,))
    return blocks


def product_arrangement(q):
    """q lines with the single relation 'sum of all monomials'."""
    return [[1 if i == j else 0 for j in range(q - 1)] + [-1] for i in range(q - 1)]


def check_a_vector(k2, a):
    a = list(a)
    if len(a) != k2:
        raise ValueError(f"a needs {k2} entries")
    for i in range(0, k2, 2):         # 0-based i is odd 1-based
        if i + 1 < k2 and a[i] + a[i + 1] != 0:
            raise ValueError(f"a_{i + 1} + a_{i + 2} must vanish")
        if i + 2 < k2 and not a[i] >= a[i + 2] >= 0:
            raise ValueError(f"need a_{i + 1} >= a_{i + 3} >= 0")
        if a[i] < 0:
            raise ValueError("a entries at odd positions must be nonnegative")
    if k2 % 2 and a[-1] != 0:
        raise ValueError("a_k2 must vanish for odd k2")
    return a


def admissible_a_vectors(k2, a1_max):
    """All admissible a with a_1 <= a1_max."""
    npairs = k2 // 2
    out = []

    def rec(prefix, bound):
        if len(prefix) == npairs:
            a = []
            for x in prefix:
                a += [x, -x]
            if k2 % 2:
                a.append(0)
            out.append(tuple(a))
            return
        for x in range(bound, -1, -1):
            rec(prefix + [x], x)

    for a1 in range(a1_max, -1, -1):
        rec([a1], a1)
    return sorted(out)


def _unimodular_inverse(V):
    n = len(V)
    cols = []
    for k in range(n):
        sol = solve_linear(V, [1 if i == k else 0 for i in range(n)], n)
        cols.append([int(x) for x in sol.particular])
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def complete_to_kernel(P0, Q):
    """d rows such that P0 and d together form a basis of ker_Z(Q)."""
    N = len(Q[0])
    L = kernel_basis(Q, N)
    Lt = [[L[k][j] for k in range(len(L))] for j in range(N)]
    C = []
    for row in P0:
        sol = solve_linear(Lt, row, len(L))
        if sol is None or any(x.denominator != 1 for x in sol.particular):
            raise ValueError("P0 rows do not lie in the kernel lattice")
        C.append([int(x) for x in sol.particular])
    snf = smith_normal_form(C, len(L))
    if any(x != 1 for x in snf.d[:len(C)]):
        raise ValueError("P0 rows do not span a saturated sublattice")
    Vinv = _unimodular_inverse([list(r) for r in snf.V])
    rows = Vinv[len(C):]
    return [[sum(r[k] * L[k][j] for k in range(len(L))) for j in range(N)] for r in rows]


def basis_change(ring, Q):
    """Matrix M with M * (degree matrix of ring) == free part of Q."""
    D = ring.grading.degree_matrix()
    rho = len(Q)
    D = [list(r[:len(Q[0])]) for r in D][:rho]
    for cols in combinations(range(len(Q[0])), rho):
        sub = [[D[i][j] for j in cols] for i in range(rho)]
        if determinant(sub) != 0:
            break
    else:
        raise ValueError("degree matrix has no full-rank minor")
    M = []
    for i in range(rho):
        # M_i * sub = Q_i restricted
        subT = [[sub[k][j] for k in range(rho)] for j in range(rho)]
        sol = solve_linear(subT, [Q[i][j] for j in cols], rho)
        M.append(list(sol.particular))
    for i in range(rho):
        for j in range(len(Q[0])):
            if sum(M[i][k] * D[k][j] for k in range(rho)) != Q[i][j]:
                raise ValueError("degree matrices are not related by a basis change")
    return M


@dataclass
class ProductMember:
    k1: int
    k2: int
    a: tuple
    ring: object
    variety: object
    Q: list
    anticanonical: tuple    # in the basis of Q
    smooth: str
    fano: bool
    dim: int

    @property
    def fano_criterion(self):
        """Closed-form Fano condition on a_1."""
        return 0 <= Fraction(self.a[0]) < Fraction(self.k1 - 2, self.k2 - 2)


def product_family(k1, k2, a):
    if k1 < 5 or k2 < 5:
        raise ValueError("need k1, k2 >= 5")
    a = check_a_vector(k2, a)
    blocks = []
    for k in (k1, k2):
        ls = product_exponents(k)
        blocks.append((ArrangementData(product_arrangement(len(ls))), ls))
    Q = [[1] * k1 + list(a), [0] * k1 + [1] * k2]
    ex = ExponentData(tuple(blocks[0][1]) + tuple(blocks[1][1]), 0)
    factors, col = [], 0
    for arr, _ in blocks:
        factors.append(tuple(range(col, col + arr.r + 1)))
        col += arr.r + 1
    P0 = p0_matrix(ex, factors)
    d = complete_to_kernel(P0, Q)
    ring = product_ring(blocks, d)
    M = basis_change(ring, Q)
    Minv_rows = _rational_inverse(M)
    u_q = (a[0] + 1, 1)
    u = tuple(sum(Minv_rows[i][k] * u_q[k] for k in range(2)) for i in range(2))
    v = VarietyData(ring, ample=u)
    _, k_free = anticanonical_class(ring)
    k_q = tuple(sum(M[i][k] * k_free[k] for k in range(2)) for i in range(2))
    return ProductMember(k1, k2, tuple(a), ring, v, Q, k_q,
                         smoothness_report(v).status, is_fano(v), v.dim)


def _rational_inverse(M):
    n = len(M)
    cols = []
    for k in range(n):
        sol = solve_linear(M, [1 if i == k else 0 for i in range(n)], n)
        cols.append(list(sol.particular))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def product_sweep(k_range=range(5, 9), a1_max=3):
    for k1 in k_range:
        for k2 in k_range:
            for a in admissible_a_vectors(k2, a1_max):
                yield product_family(k1, k2, a)

