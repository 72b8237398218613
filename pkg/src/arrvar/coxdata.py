"""Graded rings R(A, P0), R(A, P) and their arrangement products.

Variables are indexed 0..n+m-1 in the flattened order
T_01..T_0n_0, T_11, ..., T_rn_r, S_1..S_m.
"""

from dataclasses import dataclass
from math import gcd, lcm

from .arrangement import ArrangementData, decompose, position_type
from .exactmath import (as_matrix, hermite_normal_form, identity, rank, rational_kernel,
                        smith_normal_form, transpose, vector_gcd)


@dataclass(frozen=True)
class ExponentData:
    l: tuple
    m: int = 0

    def __post_init__(self):
        object.__setattr__(self, "l", tuple(tuple(int(x) for x in li) for li in self.l))
        if any(len(li) == 0 for li in self.l) or any(x < 1 for li in self.l for x in li):
            raise ValueError("exponent tuples must be nonempty and positive")
        if self.m < 0:
            raise ValueError("m must be nonnegative")

    @property
    def n(self):
        return tuple(len(li) for li in self.l)

    @property
    def n_total(self):
        return sum(self.n)

    @property
    def num_vars(self):
        return self.n_total + self.m

    @property
    def offsets(self):
        out, o = [], 0
        for li in self.l:
            out.append(o)
            o += len(li)
        return tuple(out)

    def block_vars(self, i):
        o = self.offsets[i]
        return tuple(range(o, o + len(self.l[i])))

    def block_of(self, var):
        """Block index of a variable, or None for a free variable S_k."""
        for i, o in enumerate(self.offsets):
            if o <= var < o + len(self.l[i]):
                return i
        return None

    def exponent(self, var):
        i = self.block_of(var)
        return None if i is None else self.l[i][var - self.offsets[i]]

    def monomial(self, i):
        """Exponent vector of T_i^{l_i} in Z^{n+m}."""
        v = [0] * self.num_vars
        for j, e in zip(self.block_vars(i), self.l[i]):
            v[j] = e
        return tuple(v)

    def labels(self):
        out = []
        for i, li in enumerate(self.l):
            out += [f"T{i}{j + 1}" for j in range(len(li))]
        out += [f"S{k + 1}" for k in range(self.m)]
        return out


class Grading:
    """K = Z^N / im(P^*) presented as Z^rho + sum Z/t_i.

    An element of K is a tuple (free coords..., torsion residues...).
    """

    def __init__(self, P, N):
        P = as_matrix(P)
        self.N = N
        Pt = transpose(P, N) if P else [[] for _ in range(N)]
        if P:
            snf = smith_normal_form(Pt, len(P))
            d, U = snf.d, snf.U
            rk = snf.rank
        else:
            d, U, rk = (), identity(N), 0
        free_rows = [list(U[k]) for k in range(rk, N)]
        tors = [(d[k], list(U[k])) for k in range(rk) if d[k] > 1]
        if free_rows:
            free_rows = [list(r) for r in hermite_normal_form(free_rows)[0]]
        # orient the free coordinates so that total degree is nonnegative
        for row in free_rows:
            if sum(row) < 0:
                row[:] = [-x for x in row]
        self.free_rows = tuple(tuple(r) for r in free_rows)
        self.torsion = tuple(t for t, _ in tors)
        self.torsion_rows = tuple(tuple(x % t for x in row) for t, row in tors)
        self._P = P

    @property
    def rank(self):
        return len(self.free_rows)

    def element(self, x):
        free = tuple(sum(a * b for a, b in zip(row, x)) for row in self.free_rows)
        tors = tuple(sum(a * b for a, b in zip(row, x)) % t
                     for t, row in zip(self.torsion, self.torsion_rows))
        return free + tors

    def add(self, a, b, sign=1):
        f = self.rank
        free = tuple(x + sign * y for x, y in zip(a[:f], b[:f]))
        tors = tuple((x + sign * y) % t for x, y, t in zip(a[f:], b[f:], self.torsion))
        return free + tors

    def free_part(self, a):
        return tuple(a[:self.rank])

    def degree(self, var):
        e = [0] * self.N
        e[var] = 1
        return self.element(e)

    def degrees(self):
        return [self.degree(j) for j in range(self.N)]

    def degree_matrix(self):
        """Free part of the degrees as a rho x N integer matrix."""
        return [list(r) for r in self.free_rows]

    def generated_index(self, indices):
        """Snf of the relation lattice im(P^*) + span(e_j, j in indices)."""
        gens = [list(r) for r in self._P]
        for j in indices:
            e = [0] * self.N
            e[j] = 1
            gens.append(e)
        return smith_normal_form(gens, self.N) if gens else None

    def generates(self, indices):
        """Do the degrees of the given variables generate K as a group?"""
        snf = self.generated_index(indices)
        if snf is None:
            return self.N == 0
        return snf.rank == self.N and all(x == 1 for x in snf.d)

    def order_modulo(self, x, indices):
        """Least k > 0 with k*Q(x) in the subgroup generated by Q(e_j).

        None if there is no such k.
        """
        gens = [list(r) for r in self._P]
        for j in indices:
            e = [0] * self.N
            e[j] = 1
            gens.append(e)
        if not gens:
            return 1 if not any(x) else None
        snf = smith_normal_form(transpose(gens, self.N), len(gens))
        y = [sum(a * b for a, b in zip(row, x)) for row in snf.U]
        k = 1
        for i, yi in enumerate(y):
            di = snf.d[i] if i < len(snf.d) else 0
            if di == 0:
                if yi != 0:
                    return None
                continue
            k = lcm(k, di // gcd(di, yi))
        return k

    def __repr__(self):
        return f"Grading(rank={self.rank}, torsion={self.torsion})"


def p0_matrix(exponents, factors=None):
    """Rows of P0 (block diagonal over the factors of a product ring)."""
    if factors is None:
        factors = [tuple(range(len(exponents.l)))]
    N = exponents.num_vars
    rows = []
    for fac in factors:
        ref = fac[0]
        for i in fac[1:]:
            row = [0] * N
            for j, e in zip(exponents.block_vars(ref), exponents.l[ref]):
                row[j] = -e
            for j, e in zip(exponents.block_vars(i), exponents.l[i]):
                row[j] = e
            rows.append(row)
    return rows


def normalized_relations(A):
    """Primitive kernel vectors of A, one per free column of its rref.

    Each vector is signed so that its first nonzero entry is positive.
    """
    out = []
    for v in rational_kernel(A, len(A[0])):
        lead = next(x for x in v if x)
        out.append(tuple(-x for x in v) if lead < 0 else tuple(v))
    return out


class CoxRingData:
    """The ring R(A, P) (or R(A, P0) when no d rows are given)."""

    def __init__(self, arrangement, exponents, d_rows=None, factors=None):
        self.arrangement = arrangement
        self.exponents = exponents
        ncols = arrangement.r + 1
        if len(exponents.l) != ncols:
            raise ValueError(f"{len(exponents.l)} exponent blocks for {ncols} columns")
        if factors is None:
            factors = [tuple(range(ncols))]
        self.factors = tuple(tuple(f) for f in factors)
        self.t = len(self.factors)
        self.r = ncols - self.t
        self.c = len(arrangement.A) - self.t
        N = exponents.num_vars
        self.P0 = [list(r) for r in p0_matrix(exponents, self.factors)]
        d_rows = [list(r) for r in as_matrix(d_rows)] if d_rows else []
        for row in d_rows:
            if len(row) != N:
                raise ValueError(f"d row has {len(row)} entries, expected {N}")
        self.d_rows = d_rows
        self.s = len(d_rows)
        self.P = self.P0 + d_rows
        if d_rows:
            self._check_P()
        self.relations = tuple(normalized_relations(arrangement.A))
        self.grading = Grading(self.P, N)

    def _check_P(self):
        cols = self.columns
        seen = set()
        for j, v in enumerate(cols):
            if vector_gcd(v) != 1:
                raise ValueError(f"column {j} of P is not primitive")
            if v in seen:
                raise ValueError(f"column {j} of P is repeated")
            seen.add(v)
        if rank(self.P) != len(self.P):
            raise ValueError("columns of P do not span")

    @property
    def columns(self):
        N = self.exponents.num_vars
        return [tuple(row[j] for row in self.P) for j in range(N)]

    @property
    def num_vars(self):
        return self.exponents.num_vars

    @property
    def dim(self):
        e = self.exponents
        return e.n_total + e.m - self.r + self.c

    @property
    def complexity(self):
        return self.c

    def monomial(self, i):
        return self.exponents.monomial(i)

    def relation_support(self, k):
        return frozenset(i for i, x in enumerate(self.relations[k]) if x)

    def relation_polynomial(self, k):
        """{exponent tuple: coefficient} for the k-th relation."""
        return {self.monomial(i): x for i, x in enumerate(self.relations[k]) if x}

    def __repr__(self):
        return (f"CoxRingData(n={self.exponents.n}, m={self.exponents.m}, "
                f"r={self.r}, s={self.s}, c={self.c}, K={self.grading})")


def build_ring(arr, exponents, d_rows=None):
    if not isinstance(arr, ArrangementData):
        arr = ArrangementData(arr)
    return CoxRingData(arr, exponents, d_rows)


def relation_degree(ring):
    """Common K-degree of the monomials of each relation."""
    G = ring.grading
    out = []
    for k, v in enumerate(ring.relations):
        degs = {G.element(ring.monomial(i)) for i, x in enumerate(v) if x}
        if len(degs) != 1:
            raise ValueError(f"relation {k} is inhomogeneous")
        out.append(degs.pop())
    return out


def is_honestly_special(ring):
    """(verdict, certificate)."""
    e = ring.exponents
    for i, li in enumerate(e.l):
        for j, lij in enumerate(li):
            if lij * len(li) == 1:
                return False, f"l_{i}{j + 1} * n_{i} = 1: T_{i}{j + 1} can be eliminated"
    comps = decompose(ring.arrangement)
    if len(comps) > 1:
        lone = [g[0] for g in comps if len(g) == 1]
        if lone:
            return False, f"free-variable reduction: block {lone[0]} occurs in no relation"
        return False, f"decomposable arrangement: {comps}"
    if position_type(ring.arrangement) == "general":
        return False, "arrangement in general position"
    return True, "indecomposable, special position, l_ij n_i > 1"


def _parallel_classes(arr, i):
    others = [k for k in range(arr.r + 1) if k != i]
    classes = []
    for k in others:
        for cl in classes:
            if arr.rank_of((i, k, cl[0])) == 2:
                cl.append(k)
                break
        else:
            classes.append([k])
    return classes


def k_prime_variables(ring):
    """K-primeness of each generator: True, False, or None if undecided.

    Setting T_ij = 0 kills monomial i; the residual relations are those of
    the contraction of column i. Columns that become parallel carry a
    binomial, which is K-irreducible iff the degree difference of its
    gcd-roots has order equal to the gcd. Classes of three or more
    parallel columns are left undecided.
    """
    e = ring.exponents
    G = ring.grading
    arr = ring.arrangement
    in_relation = set()
    for v in ring.relations:
        in_relation.update(i for i, x in enumerate(v) if x)
    verdict_by_block = {}
    for i in range(len(e.l)):
        if i not in in_relation:
            verdict_by_block[i] = True
            continue
        verdict = True
        for cl in _parallel_classes(arr, i):
            if len(cl) == 1:
                continue
            if len(cl) > 2:
                verdict = None
                continue
            a, b = e.monomial(cl[0]), e.monomial(cl[1])
            g = vector_gcd(a + b)
            if g == 1:
                continue
            root = [(x - y) // g for x, y in zip(a, b)]
            order = G.order_modulo(root, [])
            if order is None or order < g:
                verdict = False
                break
        verdict_by_block[i] = verdict
    out = []
    for var in range(e.num_vars):
        i = e.block_of(var)
        out.append(True if i is None else verdict_by_block[i])
    return out


def product_ring(blocks, d_rows, m=0):
    """Arrangement-product ring from (ArrangementData, exponent tuples) blocks.

    Each block must be indecomposable; A and P0 are assembled block
    diagonally and the grading is computed on the assembled P.
    """
    As, ls, factors = [], [], []
    col = 0
    for arr, l in blocks:
        if not isinstance(arr, ArrangementData):
            arr = ArrangementData(arr)
        ex = ExponentData(l, 0)
        if len(decompose(arr)) != 1 or any(x * len(li) <= 1 for li in ex.l for x in li):
            raise ValueError("product factors must be indecomposable")
        As.append(arr.A)
        ls += list(ex.l)
        factors.append(tuple(range(col, col + arr.r + 1)))
        col += arr.r + 1
    nrows = sum(len(A) for A in As)
    big = []
    c0 = 0
    for A in As:
        for row in A:
            big.append([0] * c0 + list(row) + [0] * (col - c0 - len(row)))
        c0 += len(A[0])
    arr = ArrangementData(big)
    assert len(big) == nrows
    return CoxRingData(arr, ExponentData(tuple(ls), m), d_rows, factors=factors)
