from fractions import Fraction

from hypothesis import given, settings, strategies as st

from arrvar.exactmath import (clear_denominators, determinant, hermite_normal_form,
                              kernel_basis, matmul, orthogonal_complement, primitive_vector,
                              rank, rational_kernel, rref, smith_normal_form, solve_linear,
                              vector_gcd)

small = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m)))


def diag(d, m, n):
    return [[d[i] if i == j and i < len(d) else 0 for j in range(n)] for i in range(m)]


def test_smith_known_example():
    M = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    assert smith_normal_form(M).d == (2, 6, 12)


def test_smith_cokernel_of_running_grading():
    # transpose of P for the running example; cokernel is Z^2 + (Z/2)^3
    P = [[-1, -1, 2, 0, 0, 0, 0], [-1, -1, 0, 2, 0, 0, 0], [-1, -1, 0, 0, 2, 0, 0],
         [-1, -1, 0, 0, 0, 2, 0], [-2, -3, 1, 1, 1, 1, 1]]
    Pt = [[P[i][j] for i in range(5)] for j in range(7)]
    snf = smith_normal_form(Pt)
    assert snf.cokernel(7) == (2, (2, 2, 2))


def test_hermite_known_example():
    H, U = hermite_normal_form([[2, 3], [4, 5]])
    # (4,5) - 2(2,3) = (0,-1), then (2,3) - 3(0,1) = (2,0)
    assert H == [[2, 0], [0, 1]]
    assert matmul(U, [[2, 3], [4, 5]]) == H


def test_determinant_and_rank():
    assert determinant([[1, 2], [3, 4]]) == -2
    assert determinant([[0, 1], [1, 0]]) == -1
    assert rank([[1, 2, 3], [2, 4, 6]]) == 1
    assert rank([[Fraction(1, 2), 1], [1, 2]]) == 1


def test_kernel_is_saturated():
    # x + 2y = 0 over Z has kernel generated by (2, -1), not (4, -2)
    (k,) = kernel_basis([[1, 2]])
    assert vector_gcd(k) == 1 and k[0] + 2 * k[1] == 0


def test_solve_linear_inconsistent():
    assert solve_linear([[1, 1], [1, 1]], [0, 1]) is None
    sol = solve_linear([[1, 1]], [2])
    assert sol.particular[0] + sol.particular[1] == 2 and len(sol.kernel) == 1


def test_primitive_helpers():
    assert primitive_vector((4, -6, 0)) == (2, -3, 0)
    assert clear_denominators((Fraction(1, 2), Fraction(1, 3))) == (3, 2)
    R, piv = rref([[2, 4], [1, 3]])
    assert piv == [0, 1] and R == [[1, 0], [0, 1]]


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_smith_invariants(M):
    snf = smith_normal_form(M)
    m, n = len(M), len(M[0])
    assert matmul(matmul([list(r) for r in snf.U], M), [list(r) for r in snf.V]) == \
        diag(snf.d, m, n)
    nz = [x for x in snf.d if x]
    assert all(x > 0 for x in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert abs(determinant(snf.U)) == 1 and abs(determinant(snf.V)) == 1
    assert snf.rank == rank(M)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_hermite_invariants(M):
    H, U = hermite_normal_form(M)
    assert matmul(U, M) == H
    assert abs(determinant(U)) == 1
    last = -1
    for row in H:
        if not any(row):
            continue
        p = next(j for j, x in enumerate(row) if x)
        assert p > last and row[p] > 0
        last = p


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_kernels_annihilate(M):
    n = len(M[0])
    for k in kernel_basis(M, n) + rational_kernel(M, n):
        assert all(sum(a * b for a, b in zip(row, k)) == 0 for row in M)
    assert len(kernel_basis(M, n)) == n - rank(M)
    for c in orthogonal_complement(M, n):
        assert all(sum(a * b for a, b in zip(row, c)) == 0 for row in M)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.lists(small, min_size=4, max_size=4))
def test_solve_linear_solutions(M, x):
    n = len(M[0])
    b = [sum(a * c for a, c in zip(row, x[:n])) for row in M]
    sol = solve_linear(M, b, n)
    assert sol is not None
    assert [sum(a * c for a, c in zip(row, sol.particular)) for row in M] == b
