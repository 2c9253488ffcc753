"""Graded pieces of the Stanley-Reisner face ring R[K].

A monomial is its exponent vector: a tuple of length ``m`` whose entry
``i - 1`` is the exponent of ``v_i``.  Polynomial degree ``j`` sits in
cohomological degree ``2j``.  Multiplication returns ``None`` for the zero
of the ring, i.e. when the support of the product is not a face of K.
"""
from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Mapping

from .complexes import SimplicialComplex
from .errors import InputError
from .exact_algebra import QQ, IntMatrix, rank_over

Monomial = tuple[int, ...]


def monomial(m: int, exponents: Mapping[int, int] | None = None) -> Monomial:
    """Build the exponent vector of ``prod v_i^e_i`` from a vertex -> exponent map."""
    exps = [0] * m
    for v, e in (exponents or {}).items():
        if not 1 <= v <= m:
            raise InputError(f"variable v_{v} outside 1..{m}")
        if e < 0:
            raise InputError(f"negative exponent for v_{v}")
        exps[v - 1] = e
    return tuple(exps)


def support(w: Monomial) -> tuple[int, ...]:
    return tuple(i + 1 for i, e in enumerate(w) if e)


def degree(w: Monomial) -> int:
    """Polynomial degree; the cohomological degree is twice this."""
    return sum(w)


def monomial_survives(K: SimplicialComplex, w: Monomial) -> bool:
    if len(w) != K.m:
        raise InputError(f"monomial has {len(w)} exponents, complex has m={K.m}")
    return K.is_simplex(support(w))


def multiply(K: SimplicialComplex, w1: Monomial, w2: Monomial) -> Monomial | None:
    w = tuple(a + b for a, b in zip(w1, w2))
    return w if K.is_simplex(support(w)) else None


def _compositions(total: int, parts: int):
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def enumerate_slice(K: SimplicialComplex, j: int) -> tuple[Monomial, ...]:
    """Monomials of polynomial degree ``j`` that survive in R[K].

    Ordered lexicographically by exponent vector, largest first, so
    ``v1^2`` precedes ``v1 v2`` precedes ``v2^2``.
    """
    if j < 0:
        return ()
    if j == 0:
        return ((0,) * K.m,)
    out = []
    for d in range(0, min(j, K.dim + 1)):
        for face in K.faces(d):
            for exps in _compositions(j, len(face)):
                w = [0] * K.m
                for v, e in zip(face, exps):
                    w[v - 1] = e
                out.append(tuple(w))
    out.sort(reverse=True)
    return tuple(out)


def slice_index(K: SimplicialComplex, j: int) -> dict[Monomial, int]:
    return {w: n for n, w in enumerate(enumerate_slice(K, j))}


def restriction_matrix(K: SimplicialComplex, j: int) -> IntMatrix:
    """0/1 matrix of R[K]_j -> prod over facets I of R[v_i : i in I]_j."""
    cols = enumerate_slice(K, j)
    entries = []
    row = 0
    for facet in K.facets:
        fset = set(facet)
        targets = {}
        for w in cols:
            if set(support(w)) <= fset:
                targets.setdefault(w, len(targets))
        # every degree-j monomial in the facet's variables is a row; only
        # those coming from R[K] can be hit, the rest are zero rows
        n_rows = _count_monomials(len(facet), j)
        for n, w in enumerate(cols):
            if w in targets:
                entries.append((row + targets[w], n, 1))
        row += n_rows
    return IntMatrix(row, len(cols), entries)


def _count_monomials(nvars: int, j: int) -> int:
    if nvars == 0:
        return 1 if j == 0 else 0
    return comb(j + nvars - 1, nvars - 1)


def limit_injectivity_check(K: SimplicialComplex, j: int) -> bool:
    """Is R[K]_j -> prod_I R[v_i : i in I]_j injective (exact rank over Q)?"""
    A = restriction_matrix(K, j)
    return rank_over(A, QQ) == A.cols
