import itertools
import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from flatdef.field import FieldCtx, FieldScalar
from flatdef.intmat import det_int, hermite_form, integer_kernel, smith_form
from flatdef.linalg import (
    ComplexScalar,
    ExactMatrix,
    rational_relation_lattice,
    row_reduce,
    solve_linear,
)

Q5 = FieldCtx.get(5)


def fr(*vals):
    return [Fraction(v) for v in vals]


def minor_rank(rows, ncols):
    """Brute-force rank via minor expansion; oracle for matrices up to 4x4."""
    n = len(rows)
    best = 0
    for k in range(1, min(n, ncols) + 1):
        for ris in itertools.combinations(range(n), k):
            for cis in itertools.combinations(range(ncols), k):
                sub = [[rows[i][j] for j in cis] for i in ris]
                if not _det(sub).is_zero():
                    best = k
    return best


def _det(sub):
    n = len(sub)
    if n == 1:
        return sub[0][0]
    total = sub[0][0] * 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in sub[1:]]
        term = sub[0][j] * _det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


class TestRowReduce:
    def test_proportional_rows(self):
        rank, rows, null = row_reduce([fr(1, 2), fr(2, 4)])
        assert rank == 1
        assert len(null) == 1
        assert null[0] == [Fraction(-2), Fraction(1)]

    def test_identity(self):
        rank, rows, null = row_reduce([fr(1, 0, 0), fr(0, 1, 0), fr(0, 0, 1)])
        assert rank == 3
        assert null == []

    def test_quadratic_field_row(self):
        # single row (1 + sqrt5, 2 + 2 sqrt5, 3): hand reduction gives rank 1
        # and a two-dimensional null space over Q(sqrt5)
        row = [FieldScalar(1, 1, Q5), FieldScalar(2, 2, Q5), FieldScalar(3, 0, Q5)]
        rank, rows, null = row_reduce([row])
        assert rank == 1
        assert len(null) == 2
        for v in null:
            acc = FieldScalar(0, 0, Q5)
            for x, y in zip(row, v):
                acc = acc + x * y
            assert acc.is_zero()

    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10**4))
    @settings(max_examples=60, deadline=None)
    def test_rank_matches_minor_expansion(self, n, m, seed):
        rng = random.Random(seed)
        rows = [[FieldScalar(Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
                 for _ in range(m)] for _ in range(n)]
        rank, _, null = row_reduce(rows, ncols=m)
        assert rank == minor_rank(rows, m)
        assert rank + len(null) == m
        for v in null:
            for row in rows:
                acc = FieldScalar(0)
                for x, y in zip(row, v):
                    acc = acc + x * y
                assert acc.is_zero()

    def test_complex_scalars(self):
        i = ComplexScalar(0, 1)
        one = ComplexScalar(1, 0)
        rank, _, null = row_reduce([[one, i], [i, ComplexScalar(-1, 0)]])
        assert rank == 1
        assert len(null) == 1

    def test_exact_matrix_wrapper(self):
        m = ExactMatrix([[1, 2], [3, 4]])
        assert m.rank() == 2
        assert m.ctx.d == 0


class TestSolve:
    def test_unique(self):
        x = solve_linear([fr(2, 0), fr(0, 4)], fr(6, 8))
        assert x == [Fraction(3), Fraction(2)]

    def test_inconsistent(self):
        assert solve_linear([fr(1, 1), fr(1, 1)], fr(1, 2)) is None

    def test_underdetermined(self):
        x = solve_linear([fr(1, 1)], fr(5))
        acc = x[0] + x[1]
        assert acc == 5


class TestRelationLattice:
    def test_half_and_one(self):
        R, A = rational_relation_lattice([Fraction(1, 2), Fraction(1)])
        assert len(R) == 1 and len(A) == 1
        q = R[0]
        assert q[0] * Fraction(1, 2) + q[1] * Fraction(1) == 0
        a = A[0]
        assert a[1] == 2 * a[0]  # span{(1, 2)}

    def test_one_and_sqrt5(self):
        R, A = rational_relation_lattice(
            [FieldScalar(1, 0, Q5), FieldScalar(0, 1, Q5)])
        assert R == []
        assert len(A) == 2

    def test_all_equal(self):
        R, A = rational_relation_lattice([1, 1, 1])
        assert len(R) == 2
        assert len(A) == 1

    @given(st.integers(1, 5), st.integers(0, 10**4))
    @settings(max_examples=40, deadline=None)
    def test_properties(self, r, seed):
        rng = random.Random(seed)
        vals = [FieldScalar(Fraction(rng.randint(-4, 4), rng.randint(1, 4)),
                            Fraction(rng.randint(-2, 2)), Q5) for _ in range(r)]
        R, A = rational_relation_lattice(vals)
        assert len(R) + len(A) == r
        for q in R:
            acc = FieldScalar(0, 0, Q5)
            for qi, vi in zip(q, vals):
                acc = acc + vi * qi
            assert acc.is_zero()
            for a in A:
                dot = sum((qi * ai for qi, ai in zip(q, a)), Fraction(0))
                assert dot == 0


class TestIntegerForms:
    @given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 10**4))
    @settings(max_examples=60, deadline=None)
    def test_hermite(self, n, m, seed):
        rng = random.Random(seed)
        mat = [[rng.randint(-5, 5) for _ in range(m)] for _ in range(n)]
        h, u = hermite_form(mat)
        assert abs(det_int(u)) == 1
        for i in range(n):
            got = [sum(u[i][k] * mat[k][j] for k in range(n)) for j in range(m)]
            assert got == h[i]

    @given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 10**4))
    @settings(max_examples=60, deadline=None)
    def test_smith(self, n, m, seed):
        rng = random.Random(seed)
        mat = [[rng.randint(-5, 5) for _ in range(m)] for _ in range(n)]
        diag, u, v, vinv = smith_form(mat)
        assert abs(det_int(u)) == 1
        assert abs(det_int(v)) == 1
        prod = [[sum(v[i][k] * vinv[k][j] for k in range(m)) for j in range(m)]
                for i in range(m)]
        assert prod == [[1 if i == j else 0 for j in range(m)] for i in range(m)]
        uav = [[sum(sum(u[i][k] * mat[k][l] for k in range(n)) * v[l][j]
                    for l in range(m)) for j in range(m)] for i in range(n)]
        for i in range(n):
            for j in range(m):
                want = diag[i] if (i == j and i < len(diag)) else 0
                assert uav[i][j] == want

    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10**4))
    @settings(max_examples=60, deadline=None)
    def test_kernel(self, n, m, seed):
        rng = random.Random(seed)
        mat = [[rng.randint(-4, 4) for _ in range(m)] for _ in range(n)]
        ker = integer_kernel(mat)
        for x in ker:
            got = [sum(x[i] * mat[i][j] for i in range(n)) for j in range(m)]
            assert got == [0] * m
        rank_rows = row_reduce([[Fraction(x) for x in row] for row in mat],
                               ncols=m)[0]
        assert len(ker) == n - rank_rows
