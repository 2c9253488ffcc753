"""Simplicial complexes on the vertex set {1, ..., m}.

A complex is stored by its facets.  Vertices that lie in no facet ("ghost
vertices") are allowed: they still count towards ``m``.  The empty simplex
always belongs to a complex; the complex consisting of the empty simplex
alone is represented by the single facet ``()``.
"""
from __future__ import annotations

import json
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import InputError
from .exact_algebra import CoefficientRing, HomologyGroup, IntMatrix, homology_at

Simplex = tuple[int, ...]


def _as_simplex(face: Iterable[int]) -> Simplex:
    try:
        verts = tuple(sorted({int(v) for v in face}))
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad face {face!r}: {exc}") from exc
    return verts


class SimplicialComplex:
    """Immutable simplicial complex given by facets on ``m`` vertices."""

    def __init__(self, m: int, faces: Iterable[Iterable[int]] = ()):
        if int(m) != m or m < 0:
            raise InputError(f"vertex count must be a non-negative integer, got {m!r}")
        self.m = int(m)
        cands = set()
        for face in faces:
            s = _as_simplex(face)
            if s and (s[0] < 1 or s[-1] > self.m):
                raise InputError(f"face {list(s)} has a vertex outside 1..{self.m}")
            cands.add(s)
        maximal = []
        # longest first so containment only has to look at already kept facets
        for s in sorted(cands, key=lambda f: (-len(f), f)):
            ss = set(s)
            if not any(ss <= set(f) for f in maximal):
                maximal.append(s)
        if not maximal:
            maximal = [()]
        self.facets: tuple[Simplex, ...] = tuple(sorted(maximal))

    # basic queries ------------------------------------------------------------
    @property
    def dim(self) -> int:
        return max(len(f) for f in self.facets) - 1

    @cached_property
    def _facet_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(f) for f in self.facets)

    def is_simplex(self, face: Iterable[int]) -> bool:
        s = frozenset(face)
        return any(s <= f for f in self._facet_sets)

    __contains__ = is_simplex

    @cached_property
    def _faces_by_dim(self) -> dict[int, tuple[Simplex, ...]]:
        seen: dict[int, set] = {}
        for f in self.facets:
            for k in range(len(f) + 1):
                seen.setdefault(k - 1, set()).update(combinations(f, k))
        return {d: tuple(sorted(s)) for d, s in seen.items()}

    def faces(self, dim: int) -> tuple[Simplex, ...]:
        """Simplices of dimension ``dim`` in lexicographic order (dim -1 gives the empty simplex)."""
        return self._faces_by_dim.get(dim, ())

    def all_faces(self) -> list[Simplex]:
        return [s for d in sorted(self._faces_by_dim) for s in self._faces_by_dim[d]]

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(v for (v,) in self.faces(0))

    def f_vector(self) -> list[int]:
        return [len(self.faces(d)) for d in range(-1, self.dim + 1)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.m == other.m and self.facets == other.facets

    def __hash__(self):
        return hash((self.m, self.facets))

    def __repr__(self) -> str:
        return f"SimplicialComplex(m={self.m}, facets={[list(f) for f in self.facets]})"

    # JSON -------------------------------------------------------------------
    def to_json(self) -> dict:
        return {"m": self.m, "facets": [list(f) for f in self.facets if f]}

    @classmethod
    def from_json(cls, obj) -> "SimplicialComplex":
        if isinstance(obj, str):
            try:
                obj = json.loads(obj)
            except json.JSONDecodeError as exc:
                raise InputError(f"invalid complex JSON: {exc}") from exc
        if not isinstance(obj, dict) or "m" not in obj or "facets" not in obj:
            raise InputError('complex JSON must look like {"m": 5, "facets": [[1, 2], ...]}')
        m, facets = obj["m"], obj["facets"]
        if not isinstance(m, int) or isinstance(m, bool) or not isinstance(facets, list):
            raise InputError("complex JSON: m must be an integer and facets a list")
        for f in facets:
            if not isinstance(f, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in f):
                raise InputError(f"complex JSON: facet {f!r} is not a list of integers")
            if any(v < 1 or v > m for v in f):
                raise InputError(f"complex JSON: facet {f} has an index outside 1..{m}")
        return cls(m, facets)


def new_complex(m: int, faces: Iterable[Iterable[int]]) -> SimplicialComplex:
    return SimplicialComplex(m, faces)


def full_subcomplex(K: SimplicialComplex, J: Iterable[int]) -> SimplicialComplex:
    """Full subcomplex on ``J``, relabelled order-preservingly onto 1..|J|."""
    js = sorted(set(J))
    if js and (js[0] < 1 or js[-1] > K.m):
        raise InputError(f"vertex set {js} not inside 1..{K.m}")
    pos = {v: n + 1 for n, v in enumerate(js)}
    jset = set(js)
    faces = [[pos[v] for v in f if v in jset] for f in K.facets]
    return SimplicialComplex(len(js), faces)


# ---------------------------------------------------------------------------
# standard complexes

def simplex(m: int) -> SimplicialComplex:
    """The full simplex on m vertices."""
    if m < 1:
        raise InputError("simplex needs m >= 1")
    return SimplicialComplex(m, [range(1, m + 1)])


def boundary_simplex(m: int) -> SimplicialComplex:
    """Boundary of the (m-1)-simplex: all proper subsets of {1..m}."""
    if m < 1:
        raise InputError("boundary_simplex needs m >= 1")
    return SimplicialComplex(m, combinations(range(1, m + 1), m - 1))


def polygon(m: int) -> SimplicialComplex:
    """Boundary of an m-gon with edges {i, i+1} and {1, m}."""
    if m < 3:
        raise InputError("polygon needs m >= 3")
    return SimplicialComplex(m, [(i, i % m + 1) for i in range(1, m + 1)])


def join(K1: SimplicialComplex, K2: SimplicialComplex) -> SimplicialComplex:
    shift = K1.m
    return SimplicialComplex(K1.m + K2.m,
                             [f + tuple(v + shift for v in g) for f in K1.facets for g in K2.facets])


def skeleton(K: SimplicialComplex, d: int) -> SimplicialComplex:
    if not 0 <= d <= K.dim:
        raise InputError(f"skeleton dimension {d} outside 0..{K.dim}")
    faces = [f for k in range(d + 1) for f in K.faces(k)]
    return SimplicialComplex(K.m, faces)


def disjoint_union(K1: SimplicialComplex, K2: SimplicialComplex) -> SimplicialComplex:
    shift = K1.m
    return SimplicialComplex(K1.m + K2.m,
                             [f for f in K1.facets] + [tuple(v + shift for v in g) for g in K2.facets])


RP2_FACETS = ((1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
              (2, 3, 5), (2, 4, 5), (2, 4, 6), (3, 4, 6), (3, 5, 6))


def rp2() -> SimplicialComplex:
    """Minimal 6-vertex triangulation of the real projective plane."""
    return SimplicialComplex(6, RP2_FACETS)


def two_disjoint_edges() -> SimplicialComplex:
    return SimplicialComplex(4, [(1, 2), (3, 4)])


# ---------------------------------------------------------------------------
# reduced simplicial cohomology

def coboundary_matrix(K: SimplicialComplex, d: int) -> IntMatrix:
    """Augmented coboundary from d-cochains to (d+1)-cochains.

    Inserting vertex v at position a of a sorted simplex carries sign (-1)^a.
    ``d = -1`` is the augmentation (the empty simplex maps to every vertex).
    """
    src = K.faces(d)
    tgt = K.faces(d + 1)
    spos = {s: n for n, s in enumerate(src)}
    return IntMatrix(len(tgt), len(src),
                     ((j, spos[tau[:a] + tau[a + 1:]], (-1) ** a)
                      for j, tau in enumerate(tgt) for a in range(len(tau))))


def reduced_cohomology(K: SimplicialComplex, ring: CoefficientRing) -> list[HomologyGroup]:
    """Reduced cohomology in degrees -1, 0, ..., dim K (list index = degree + 1)."""
    out = []
    for d in range(-1, K.dim + 1):
        d_in = coboundary_matrix(K, d - 1) if d >= 0 else IntMatrix(1, 0)
        d_out = coboundary_matrix(K, d)
        out.append(homology_at(d_in, d_out, ring, degree=d, check=False))
    return out


def random_complex(m: int, rng, max_facets: int | None = None, max_size: int | None = None) -> SimplicialComplex:
    """Random complex on m vertices: the downward closure of a few random subsets.

    ``rng`` is a ``random.Random``.  Ghost vertices can occur.
    """
    if m < 0:
        raise InputError("random_complex needs m >= 0")
    max_facets = max_facets if max_facets is not None else max(1, m)
    max_size = max_size if max_size is not None else m
    faces = []
    for _ in range(rng.randint(0, max_facets)):
        size = rng.randint(1, max(1, max_size)) if m else 0
        faces.append(rng.sample(range(1, m + 1), min(size, m)))
    return SimplicialComplex(m, faces)
