"""Hyperplane arrangements given by the columns of an integer matrix.

The matroid is never stored explicitly; everything goes through a
memoized rank oracle on column subsets.
"""

from itertools import combinations

from .exactmath import as_matrix, rank, rref


class ArrangementData:
    """Columns a_0..a_r of a (c+1) x (r+1) matrix A.

    A must have full row rank and pairwise linearly independent columns.
    """

    def __init__(self, A):
        self.A = tuple(tuple(row) for row in as_matrix(A))
        if not self.A:
            raise ValueError("empty arrangement matrix")
        self.columns = tuple(tuple(row[j] for row in self.A) for j in range(len(self.A[0])))
        self._ranks = {}
        if rank(self.A) != len(self.A):
            raise ValueError("A must have full row rank")
        for i, j in combinations(range(len(self.columns)), 2):
            if self.rank_of((i, j)) < 2:
                raise ValueError(f"columns {i} and {j} are linearly dependent")

    @property
    def c(self):
        return len(self.A) - 1

    @property
    def r(self):
        return len(self.columns) - 1

    @property
    def ground_set(self):
        return frozenset(range(self.r + 1))

    def rank_of(self, I):
        key = frozenset(I)
        k = self._ranks.get(key)
        if k is None:
            k = rank([list(self.columns[i]) for i in sorted(key)]) if key else 0
            self._ranks[key] = k
        return k

    rank_set = rank_of

    def closure(self, I):
        k = self.rank_set(I)
        return frozenset(j for j in range(self.r + 1)
                         if j in I or self.rank_set(set(I) | {j}) == k)

    def __eq__(self, other):
        return isinstance(other, ArrangementData) and self.A == other.A

    def __hash__(self):
        return hash(self.A)

    def __repr__(self):
        return f"ArrangementData({[list(r) for r in self.A]})"


def is_flat(arr, I):
    I = frozenset(I)
    return arr.closure(I) == I


def flats(arr):
    """All flats, as a dict rank -> sorted list of frozensets."""
    found = set()
    for k in range(arr.r + 2):
        for I in combinations(range(arr.r + 1), k):
            found.add(arr.closure(frozenset(I)))
    out = {}
    for F in found:
        out.setdefault(arr.rank_set(F), []).append(F)
    for k in out:
        out[k].sort(key=lambda F: (len(F), sorted(F)))
    return out


def lattice_of_flats(arr):
    """Maximal chains S_1 < ... < S_c of proper nonzero flats."""
    by_rank = flats(arr)
    c = arr.c
    chains = [[F] for F in by_rank.get(1, [])]
    for k in range(2, c + 1):
        chains = [ch + [F] for ch in chains for F in by_rank.get(k, []) if ch[-1] < F]
    return [tuple(ch) for ch in chains]


def position_type(arr):
    """'general' iff every k columns with k <= c+1 are independent."""
    for k in range(1, min(arr.c + 1, arr.r + 1) + 1):
        for I in combinations(range(arr.r + 1), k):
            if arr.rank_of(I) < k:
                return "special"
    return "general"


def decompose(arr):
    """Connected components of the column matroid, as sorted index tuples."""
    return matroid_components(arr.r + 1, arr.rank_of)


def matroid_components(n, rank_of):
    """Components of a matroid on range(n) given by a rank oracle.

    Two elements are joined when they lie on a common fundamental circuit
    with respect to a greedily chosen basis.
    """
    basis = []
    for j in range(n):
        if rank_of(tuple(basis + [j])) > len(basis):
            basis.append(j)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j in range(n):
        if j in basis:
            continue
        # fundamental circuit: basis elements needed to express a_j
        for b in basis:
            rest = tuple(x for x in basis if x != b) + (j,)
            if rank_of(rest) == len(basis):
                parent[find(b)] = find(j)
    groups = {}
    for j in range(n):
        groups.setdefault(find(j), []).append(j)
    return sorted(tuple(g) for g in groups.values())


def is_indecomposable(arr, exponents):
    """A indecomposable and l_ij * n_i > 1 for all i, j."""
    if len(decompose(arr)) != 1:
        return False
    return all(lij * len(li) > 1 for li in exponents.l for lij in li)


def is_connected_flat(arr, F):
    """Is the restriction of the matroid to F connected?"""
    F = tuple(sorted(F))
    if len(F) <= 1:
        return True
    comps = matroid_components(len(F), lambda I: arr.rank_of(F[i] for i in I))
    return len(comps) == 1


def reduced_row_echelon(arr):
    """rref of A over Q together with its pivot columns."""
    return rref(arr.A)
