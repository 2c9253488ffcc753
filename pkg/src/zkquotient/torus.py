"""Subtori H of T^m, the freeness test on Z_K, and the annihilator linear forms.

A rank-k subtorus is given by a k x m integer matrix whose rows span its
lattice L_H in Z^m.  The quotient model holds an integer basis ``C`` of the
annihilator of L_H; row j of C is the linear form ``lambda_j = sum_i C[j,i] v_i``
that the Koszul differential assigns to ``t_j``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .complexes import SimplicialComplex, Simplex
from .errors import InputError, NotFreeError
from .exact_algebra import IntMatrix, invariant_factors, kernel_basis


def _is_primitive(A: IntMatrix, k: int) -> bool:
    """SNF of A has exactly k invariant factors, all equal to 1."""
    facs = invariant_factors(A)
    return len(facs) == k and all(f == 1 for f in facs)


@dataclass(frozen=True)
class SubtorusSpec:
    m: int
    basis: IntMatrix

    @property
    def k(self) -> int:
        return self.basis.rows

    @classmethod
    def from_rows(cls, m: int, rows) -> "SubtorusSpec":
        rows = [list(r) for r in rows]
        if any(len(r) != m for r in rows):
            raise InputError(f"every basis row needs exactly m={m} entries")
        return cls(m, IntMatrix.from_rows(rows, m))

    @classmethod
    def trivial(cls, m: int) -> "SubtorusSpec":
        return cls(m, IntMatrix(0, m))

    def rows(self) -> list[list[int]]:
        return self.basis.to_dense()

    def to_json(self) -> dict:
        return {"m": self.m, "basis": self.rows()}

    @classmethod
    def from_json(cls, obj) -> "SubtorusSpec":
        if isinstance(obj, str):
            try:
                obj = json.loads(obj)
            except json.JSONDecodeError as exc:
                raise InputError(f"invalid subtorus JSON: {exc}") from exc
        if not isinstance(obj, dict) or "m" not in obj or "basis" not in obj:
            raise InputError('subtorus JSON must look like {"m": 5, "basis": [[1, 1, 1, 1, 1]]}')
        m, basis = obj["m"], obj["basis"]
        if not isinstance(m, int) or isinstance(m, bool) or m < 0 or not isinstance(basis, list):
            raise InputError("subtorus JSON: m must be a non-negative integer and basis a list of rows")
        for r in basis:
            if not isinstance(r, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in r):
                raise InputError(f"subtorus JSON: row {r!r} is not a list of integers")
        return cls.from_rows(m, basis)


def validate(S: SubtorusSpec) -> bool:
    """True iff the basis rows span a rank-k direct summand of Z^m."""
    if S.basis.cols != S.m:
        raise InputError(f"basis has {S.basis.cols} columns, expected m={S.m}")
    if S.k > S.m:
        raise InputError(f"subtorus rank k={S.k} exceeds m={S.m}")
    return _is_primitive(S.basis, S.k)


def diagonal_circle(m: int) -> SubtorusSpec:
    if m < 1:
        raise InputError("the diagonal circle needs m >= 1")
    return SubtorusSpec.from_rows(m, [[1] * m])


def _require_valid(S: SubtorusSpec) -> None:
    if not validate(S):
        raise InputError(f"subtorus basis {S.rows()} is not primitive (its span is not a direct summand)")


def _splits_off(S: SubtorusSpec, face: Simplex) -> bool:
    """Is L_H -> Z^{[m] minus face} a split injection?"""
    face = set(face)
    keep = [c for c in range(S.m) if c + 1 not in face]
    return _is_primitive(S.basis.select_columns(keep), S.k)


def violating_facet(S: SubtorusSpec, K: SimplicialComplex) -> Simplex | None:
    """First facet (in K's order) whose coordinate stabiliser meets H nontrivially, or None."""
    _require_valid(S)
    if S.m != K.m:
        raise InputError(f"subtorus lives in T^{S.m} but the complex has m={K.m}")
    if S.k == 0:
        return None
    # a retraction for a facet restricts to each of its faces
    for facet in K.facets:
        if not _splits_off(S, facet):
            return facet
    return None


def acts_freely(S: SubtorusSpec, K: SimplicialComplex) -> bool:
    return violating_facet(S, K) is None


def require_free(S: SubtorusSpec, K: SimplicialComplex) -> None:
    bad = violating_facet(S, K)
    if bad is not None:
        raise NotFreeError(f"H does not act freely on Z_K: facet {list(bad)} violates split injectivity",
                           facet=bad)


@dataclass(frozen=True)
class QuotientModel:
    forms: IntMatrix
    source: SubtorusSpec

    @property
    def rank(self) -> int:
        """Number of exterior generators, m - k."""
        return self.forms.rows

    def form(self, j: int) -> dict[int, int]:
        """Linear form j (0-based) as {vertex index (0-based): coefficient}."""
        return self.forms.row(j)


def quotient_model(S: SubtorusSpec) -> QuotientModel:
    _require_valid(S)
    # C @ basis^T = 0  <=>  C's rows lie in the kernel of basis (as a k x m map)
    return QuotientModel(kernel_basis(S.basis), S)


def search_free_subtorus(K: SimplicialComplex, k: int, rng, entry_range: int = 1,
                         attempts: int = 20000) -> SubtorusSpec | None:
    """Random search for a primitive rank-k subtorus acting freely on Z_K.

    ``rng`` is a ``random.Random``; entries are drawn from
    ``[-entry_range, entry_range]``.
    """
    for _ in range(attempts):
        rows = [[rng.randint(-entry_range, entry_range) for _ in range(K.m)] for _ in range(k)]
        S = SubtorusSpec.from_rows(K.m, rows)
        if validate(S) and acts_freely(S, K):
            return S
    return None
