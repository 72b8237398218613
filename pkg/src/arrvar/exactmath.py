"""Exact integer and rational linear algebra.

Matrices are plain lists of row lists holding Python ints (or Fractions
where noted). Nothing in here ever touches floating point.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from operator import mul


def as_matrix(rows):
    """Copy `rows` into a list-of-lists of ints, checking rectangularity."""
    M = [[int(x) for x in row] for row in rows]
    if M and any(len(row) != len(M[0]) for row in M):
        raise ValueError("ragged matrix")
    return M


def shape(M, ncols=None):
    if not M:
        return 0, (ncols or 0)
    return len(M), len(M[0])


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(M, ncols=None):
    m, n = shape(M, ncols)
    return [[M[i][j] for i in range(m)] for j in range(n)]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(M, v):
    return [sum(a * b for a, b in zip(row, v)) for row in M]


def dot(u, v):
    return sum(map(mul, u, v))


def vector_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def primitive_vector(v):
    """Divide an integer vector by the gcd of its entries."""
    g = vector_gcd(v)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(int(x) // g for x in v)


def clear_denominators(v):
    """Smallest positive integer multiple of a rational vector."""
    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    return tuple(int(Fraction(x) * den) for x in v)


def primitive_of_rational(v):
    return primitive_vector(clear_denominators(v))


# --- Smith and Hermite normal forms ---------------------------------------

@dataclass(frozen=True)
class SmithDecomposition:
    """U * M * V == diag(d), with d a divisor chain and U, V unimodular."""
    d: tuple
    U: tuple
    V: tuple

    @property
    def rank(self):
        return sum(1 for x in self.d if x != 0)

    def cokernel(self, nrows):
        """(free rank, torsion orders > 1) of Z^nrows / column span of M."""
        torsion = tuple(x for x in self.d if x > 1)
        return nrows - self.rank, torsion


def _swap_rows(M, i, j):
    M[i], M[j] = M[j], M[i]


def _swap_cols(M, i, j):
    for row in M:
        row[i], row[j] = row[j], row[i]


def _add_row(M, src, dst, q):
    # row dst += q * row src
    if q:
        rs, rd = M[src], M[dst]
        for k in range(len(rd)):
            rd[k] += q * rs[k]


def _add_col(M, src, dst, q):
    if q:
        for row in M:
            row[dst] += q * row[src]


def smith_normal_form(M, ncols=None):
    """Smith normal form with transforms.

    Pivoting always brings the nonzero entry of least absolute value into
    the pivot position, which makes the output deterministic.
    """
    A = as_matrix(M)
    m, n = shape(A, ncols)
    if not A:
        A = []
    U = identity(m)
    V = identity(n)
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = A[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i, j = best
        _swap_rows(A, t, i)
        _swap_rows(U, t, i)
        _swap_cols(A, t, j)
        _swap_cols(V, t, j)
        while True:
            p = A[t][t]
            for i in range(t + 1, m):
                q = A[i][t] // p
                _add_row(A, t, i, -q)
                _add_row(U, t, i, -q)
            for j in range(t + 1, n):
                q = A[t][j] // p
                _add_col(A, t, j, -q)
                _add_col(V, t, j, -q)
            # a nonzero remainder is smaller than the pivot: move it in
            rest = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
            if rest:
                _, i, j = min(rest)
                if j == t:
                    _swap_rows(A, t, i)
                    _swap_rows(U, t, i)
                else:
                    _swap_cols(A, t, j)
                    _swap_cols(V, t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            _add_row(A, bad[0], t, 1)
            _add_row(U, bad[0], t, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    d = tuple(A[i][i] for i in range(min(m, n)))
    return SmithDecomposition(d, tuple(map(tuple, U)), tuple(map(tuple, V)))


def hermite_normal_form(M):
    """Row-style Hermite normal form: returns (H, U) with U * M == H.

    H is in row echelon form with positive pivots and entries above each
    pivot reduced into [0, pivot). Zero rows are kept at the bottom.
    """
    A = as_matrix(M)
    m = len(A)
    n = len(A[0]) if A else 0
    U = identity(m)
    row = 0
    for col in range(n):
        if row >= m:
            break
        while True:
            nz = [(abs(A[i][col]), i) for i in range(row, m) if A[i][col]]
            if not nz:
                break
            _, i = min(nz)
            _swap_rows(A, row, i)
            _swap_rows(U, row, i)
            done = True
            for i in range(row + 1, m):
                q = A[i][col] // A[row][col]
                _add_row(A, row, i, -q)
                _add_row(U, row, i, -q)
                if A[i][col]:
                    done = False
            if done:
                break
        if row < m and A[row][col]:
            if A[row][col] < 0:
                A[row] = [-x for x in A[row]]
                U[row] = [-x for x in U[row]]
            p = A[row][col]
            for i in range(row):
                q = A[i][col] // p
                _add_row(A, row, i, -q)
                _add_row(U, row, i, -q)
            row += 1
    return A, U


def lattice_basis(rows):
    """Reduced basis (nonzero HNF rows) of the lattice spanned by `rows`."""
    if not rows:
        return []
    H, _ = hermite_normal_form(rows)
    return [tuple(r) for r in H if any(r)]


# --- rational elimination ---------------------------------------------------

def rref(M):
    """Reduced row echelon form over Q. Returns (rows as Fractions, pivots)."""
    A = [[Fraction(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def rank(M):
    """Rank over Q via fraction-free (Bareiss) elimination."""
    A = [list(row) for row in M]
    if not A or not A[0]:
        return 0
    if any(isinstance(x, Fraction) for row in A for x in row):
        A = [list(clear_denominators(row)) if any(row) else row for row in A]
    m, n = len(A), len(A[0])
    r = 0
    prev = 1
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(r + 1, m):
            for j in range(c + 1, n):
                A[i][j] = (A[r][c] * A[i][j] - A[i][c] * A[r][j]) // prev
            A[i][c] = 0
        prev = A[r][c]
        r += 1
        if r == m:
            break
    return r


def determinant(M):
    n = len(M)
    if n == 0:
        return 1
    R, piv = rref(M)
    if len(piv) < n:
        return 0
    # recompute with plain elimination to keep the sign
    A = [[Fraction(x) for x in row] for row in M]
    det = Fraction(1)
    for c in range(n):
        p = next(i for i in range(c, n) if A[i][c] != 0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return det


def kernel_basis(M, ncols=None):
    """Saturated lattice basis of {x in Z^n : M x = 0}, in Hermite form."""
    m, n = shape(M, ncols)
    if m == 0:
        return [tuple(row) for row in identity(n)]
    snf = smith_normal_form(M, n)
    k = snf.rank
    V = snf.V
    basis = [tuple(V[i][j] for i in range(n)) for j in range(k, n)]
    return lattice_basis(basis) if basis else []


def rational_kernel(M, ncols=None):
    """Integer vectors spanning ker(M) over Q, one per free column of rref."""
    m, n = shape(M, ncols)
    if m == 0:
        return [tuple(row) for row in identity(n)]
    R, piv = rref(M)
    out = []
    for f in range(n):
        if f in piv:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, p in enumerate(piv):
            v[p] = -R[r][f]
        out.append(primitive_of_rational(v))
    return out


@dataclass(frozen=True)
class LinearSolution:
    """All solutions: particular + rational span of kernel."""
    particular: tuple
    kernel: tuple


def solve_linear(M, b, ncols=None, kernel=True):
    """Solve M x = b exactly over Q. Returns None when inconsistent.

    With kernel=False the kernel of M is not computed (left empty).
    """
    m, n = shape(M, ncols)
    if m == 0:
        return LinearSolution(tuple(Fraction(0) for _ in range(n)),
                              tuple(rational_kernel([], n)) if kernel else ())
    aug = [list(row) + [b[i]] for i, row in enumerate(M)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for r, p in enumerate(piv):
        x[p] = R[r][n]
    return LinearSolution(tuple(x), tuple(rational_kernel(M, n)) if kernel else ())


def row_space_contains(rows, v):
    """Is v in the Q-span of `rows`?"""
    if not rows:
        return not any(v)
    return rank(list(rows) + [list(v)]) == rank(rows)


def orthogonal_complement(rows, n):
    """Integer basis of the Q-orthogonal complement of span(rows) in Q^n."""
    rows = [r for r in rows if any(r)]
    if not rows:
        return [tuple(r) for r in identity(n)]
    return rational_kernel(rows, n)
