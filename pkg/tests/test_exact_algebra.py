import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F2, F3, F5
from oracles import bareiss_det, bareiss_rank, rank_mod_p
from zkquotient.errors import ContractError, InputError
from zkquotient.exact_algebra import (QQ, ZZ, CoefficientRing, FieldEchelon, HomologyGroup, IntMatrix,
                                      express_in_quotient, homology_at, invariant_factors, kernel_basis,
                                      nullspace, rank_over, smith_normal_form)


def small_matrices(max_dim=8):
    return st.integers(0, max_dim).flatmap(
        lambda r: st.integers(0, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c),
                               min_size=r, max_size=r).map(lambda rows: (rows, c))))


def check_snf(A: IntMatrix):
    res = smith_normal_form(A)
    assert (res.U @ A @ res.V) == res.D
    assert abs(bareiss_det(res.U.to_dense())) == 1
    assert abs(bareiss_det(res.V.to_dense())) == 1
    D = res.D.to_dense()
    for i in range(A.rows):
        for j in range(A.cols):
            if i != j:
                assert D[i][j] == 0
    diag = [D[i][i] for i in range(min(A.shape))]
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert diag[:len(nz)] == nz  # zeros trail
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    return res


class TestCoefficientRing:
    def test_parse(self):
        assert CoefficientRing.parse("Z") == ZZ
        assert CoefficientRing.parse("Q") == QQ
        assert CoefficientRing.parse("Fp:7") == CoefficientRing.prime_field(7)
        assert CoefficientRing.parse("F2") == F2

    @pytest.mark.parametrize("bad", ["Fp:4", "Fp:1", "R", "Fp:x"])
    def test_rejects(self, bad):
        with pytest.raises(InputError):
            CoefficientRing.parse(bad)


class TestSmithNormalForm:
    def test_diag_2_3(self):
        res = check_snf(IntMatrix.from_rows([[2, 0], [0, 3]]))
        assert res.D.to_dense() == [[1, 0], [0, 6]]

    def test_zero(self):
        res = check_snf(IntMatrix.zeros(2, 3))
        assert res.D.is_zero() and res.rank == 0

    def test_identity(self):
        res = check_snf(IntMatrix.identity(4))
        assert res.D == IntMatrix.identity(4)

    @pytest.mark.parametrize("shape", [(0, 0), (0, 3), (3, 0)])
    def test_empty(self, shape):
        res = check_snf(IntMatrix.zeros(*shape))
        assert res.U.shape == (shape[0], shape[0]) and res.V.shape == (shape[1], shape[1])

    @settings(max_examples=150, deadline=None)
    @given(small_matrices())
    def test_invariants_random(self, data):
        rows, c = data
        A = IntMatrix.from_rows(rows, c)
        res = check_snf(A)
        assert res.rank == bareiss_rank(rows)
        assert invariant_factors(A) == res.invariant_factors

    def test_entry_growth_is_exact(self):
        rng = random.Random(5)
        rows = [[rng.randint(-10**12, 10**12) for _ in range(6)] for _ in range(6)]
        res = check_snf(IntMatrix.from_rows(rows))
        prod = 1
        for d in res.invariant_factors:
            prod *= d
        assert prod == abs(bareiss_det(rows))


class TestKernelBasis:
    def test_sum_zero(self):
        A = IntMatrix.from_rows([[1, 1, 1]])
        B = kernel_basis(A)
        assert B.shape == (2, 3)
        assert (A @ B.T).is_zero()
        assert invariant_factors(B) == [1, 1]

    def test_injective(self):
        assert kernel_basis(IntMatrix.identity(3)).shape == (0, 3)

    def test_zero_map(self):
        B = kernel_basis(IntMatrix.zeros(1, 2))
        assert B.shape == (2, 2) and invariant_factors(B) == [1, 1]

    @settings(max_examples=100, deadline=None)
    @given(small_matrices(6))
    def test_properties(self, data):
        rows, c = data
        A = IntMatrix.from_rows(rows, c)
        B = kernel_basis(A)
        assert B.rows == c - bareiss_rank(rows)
        assert (A @ B.T).is_zero()
        assert bareiss_rank(B.to_dense()) == B.rows
        assert all(f == 1 for f in invariant_factors(B))


class TestRank:
    def test_scalar(self):
        A = IntMatrix.from_rows([[2]])
        assert rank_over(A, QQ) == 1 and rank_over(A, F2) == 0

    def test_identity(self, ring):
        assert rank_over(IntMatrix.identity(3), ring) == 3

    def test_diag_6_10(self):
        A = IntMatrix.from_rows([[6, 0], [0, 10]])
        assert rank_over(A, F2) == 0
        assert rank_over(A, F3) == 1
        assert rank_over(A, F5) == 1

    @settings(max_examples=100, deadline=None)
    @given(small_matrices(), st.sampled_from([2, 3, 5]))
    def test_against_dense(self, data, p):
        rows, c = data
        A = IntMatrix.from_rows(rows, c)
        assert rank_over(A, QQ) == rank_over(A, ZZ) == bareiss_rank(rows)
        assert rank_over(A, CoefficientRing.prime_field(p)) == rank_mod_p(rows, p)


def random_complex_pair(rng, n0, n1, n2, torsion=2):
    """Integer d0: Z^n0 -> Z^n1 and d1: Z^n1 -> Z^n2 with d1 d0 = 0 and some torsion."""
    base = [[rng.randint(-3, 3) for _ in range(n0)] for _ in range(n1)]
    d0 = IntMatrix.from_rows([[torsion * x if i == 0 else x for x in r] for i, r in enumerate(base)], n0)
    left = kernel_basis(d0.T)  # rows y with y d0 = 0
    coeffs = [[rng.randint(-2, 2) for _ in range(left.rows)] for _ in range(n2)]
    d1 = IntMatrix.from_rows(coeffs, left.rows) @ left if left.rows else IntMatrix.zeros(n2, n1)
    return d0, d1


class TestHomology:
    def test_zero_differentials(self):
        g = homology_at(IntMatrix.zeros(2, 0), IntMatrix.zeros(0, 2), ZZ)
        assert g == HomologyGroup(2)

    def test_z_mod_2(self):
        d_in, d_out = IntMatrix.from_rows([[2]]), IntMatrix.zeros(0, 1)
        assert homology_at(d_in, d_out, ZZ) == HomologyGroup(0, (2,))
        assert homology_at(d_in, d_out, F2) == HomologyGroup(1)
        assert homology_at(d_in, d_out, QQ) == HomologyGroup(0)

    def test_contract_errors(self):
        with pytest.raises(ContractError):
            homology_at(IntMatrix.zeros(2, 1), IntMatrix.zeros(1, 3), ZZ)
        d = IntMatrix.from_rows([[1]])
        with pytest.raises(ContractError, match="degree 4"):
            homology_at(d, d, QQ, degree=4)

    def test_dd_checked_mod_p(self):
        d_in, d_out = IntMatrix.from_rows([[1]]), IntMatrix.from_rows([[2]])
        assert homology_at(d_in, d_out, F2) == HomologyGroup(0)

    @pytest.mark.parametrize("seed", range(30))
    def test_betti_matches_bareiss(self, seed):
        rng = random.Random(seed)
        d0, d1 = random_complex_pair(rng, rng.randint(1, 5), rng.randint(1, 6), rng.randint(1, 5))
        g = homology_at(d0, d1, QQ)
        assert g.betti == d0.rows - bareiss_rank(d1.to_dense()) - bareiss_rank(d0.to_dense())

    @pytest.mark.parametrize("seed", range(40))
    def test_universal_coefficients(self, seed):
        rng = random.Random(1000 + seed)
        n0, n1, n2 = rng.randint(1, 5), rng.randint(2, 6), rng.randint(1, 5)
        d0, d1 = random_complex_pair(rng, n0, n1, n2, torsion=rng.choice([2, 3, 6, 4]))
        top = IntMatrix.zeros(0, n2)
        h1 = homology_at(d0, d1, ZZ)
        h2 = homology_at(d1, top, ZZ)
        for p in (2, 3, 5):
            Fp = CoefficientRing.prime_field(p)
            expected = (homology_at(d0, d1, QQ).betti
                        + sum(1 for t in h1.torsion if t % p == 0)
                        + sum(1 for t in h2.torsion if t % p == 0))
            assert homology_at(d0, d1, Fp).betti == expected


class TestExpressInQuotient:
    def test_basis_vector(self):
        b = [[1, 0, 0], [0, 1, 0]]
        assert express_in_quotient(b[0], b, IntMatrix.zeros(3, 0), QQ) == [1, 0]

    def test_pure_coboundary(self):
        B = IntMatrix.from_rows([[1], [1], [0]])
        assert express_in_quotient([3, 3, 0], [[1, 0, 0], [0, 0, 1]], B, F5) == [0, 0]

    def test_f5_combination(self):
        # slice of dimension 4, coboundaries spanned by two columns
        B = IntMatrix.from_rows([[1, 0], [1, 1], [0, 2], [0, 0]])
        b0, b1 = [1, 0, 0, 0], [0, 0, 0, 1]
        x = [3, 4]  # coboundary coefficients
        boundary = [sum(B[i, j] * x[j] for j in range(2)) for i in range(4)]
        cocycle = [(2 * a + 3 * b + c) % 5 for a, b, c in zip(b0, b1, boundary)]
        assert express_in_quotient(cocycle, [b0, b1], B, F5) == [2, 3]

    def test_not_spanned(self):
        with pytest.raises(ContractError):
            express_in_quotient([0, 1], [[1, 0]], IntMatrix.zeros(2, 0), QQ)

    def test_needs_field(self):
        with pytest.raises(ContractError):
            express_in_quotient([1], [[1]], IntMatrix.zeros(1, 0), ZZ)


class TestNullspace:
    @pytest.mark.parametrize("seed", range(20))
    def test_dimension_and_kernel(self, seed):
        rng = random.Random(seed)
        rows = [[rng.randint(-2, 2) for _ in range(7)] for _ in range(4)]
        A = IntMatrix.from_rows(rows)
        for R in (QQ, F3):
            basis = nullspace(A, R)
            assert len(basis) == 7 - rank_over(A, R)
            for v in basis:
                img = A.apply(v)
                assert all(R.reduce(x) == 0 for x in img.values())
            ech = FieldEchelon(R)
            assert all(ech.add(v) for v in basis)


def test_matrix_json_roundtrip():
    A = IntMatrix.from_rows([[0, 5], [-3, 0], [0, 0]])
    obj = json.loads(json.dumps(A.to_json()))
    assert obj == {"rows": 3, "cols": 2, "entries": [[0, 1, 5], [1, 0, -3]]}
    assert IntMatrix.from_json(obj) == A
    with pytest.raises(InputError):
        IntMatrix.from_json({"rows": 1, "cols": 1, "entries": [[3, 0, 1]]})
