"""Koszul model Λ[t_1..t_r] ⊗ R[K] with d t_j = λ_j, d v_i = 0.

Its cohomology is H*(Z_K/H; R) when H acts freely.  Basis elements are pairs
``(S, w)``: a sorted tuple ``S`` of 1-based exterior indices and a face-ring
monomial ``w``, of total degree ``|S| + 2 deg(w)``.  The differential is

    d(t_S ⊗ w) = Σ_a (-1)^(a-1) t_{S minus j_a} ⊗ λ_{j_a} w

over the positions a = 1..|S| of S, with monomials outside R[K] dropped.

Every slice is split into blocks by a grading the differential preserves:
variables that occur together in some λ_j are merged into one class (union
find), t_j is given the class of its form, and an element is graded by how
many generators of each class it contains.  For the trivial subtorus this is
the full Z^m multigrading; for the diagonal circle it is the weight
|S| + deg(w).
"""
from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .complexes import SimplicialComplex
from .errors import ContractError, InputError, RefusalError
from .exact_algebra import (CoefficientRing, FieldEchelon, HomologyGroup, IntMatrix,
                            direct_sum, homology_at, nullspace, rank_over)
from .facering import Monomial, enumerate_slice, multiply
from .torus import QuotientModel, SubtorusSpec, quotient_model, require_free

BasisElement = tuple[tuple[int, ...], Monomial]


def cup_product(a: BasisElement, b: BasisElement, K: SimplicialComplex):
    """Product of two basis elements: ``(sign, element)`` or ``None`` for zero.

    The sign is the parity of the shuffle merging the exterior parts; the
    monomial parts have even degree and commute with everything.
    """
    (s1, w1), (s2, w2) = a, b
    if set(s1) & set(s2):
        return None
    w = multiply(K, w1, w2)
    if w is None:
        return None
    inversions = sum(1 for x in s1 for y in s2 if x > y)
    return (-1) ** inversions, (tuple(sorted(s1 + s2)), w)


def default_max_degree(K: SimplicialComplex, k: int) -> int:
    """Dimension of Z_K / H."""
    return K.m + K.dim + 1 - k


@dataclass
class KoszulSlice:
    degree: int
    basis: list[BasisElement]
    d_out: IntMatrix


class KoszulComplex:
    """Lazily built slices of the Koszul model for one (K, forms, ring)."""

    def __init__(self, K: SimplicialComplex, forms: IntMatrix, ring: CoefficientRing):
        if forms.cols != K.m:
            raise InputError(f"linear forms have {forms.cols} columns, complex has m={K.m}")
        self.K = K
        self.forms = forms
        self.ring = ring
        self.r = forms.rows
        self._lambda = [sorted(forms.row(j).items()) for j in range(self.r)]
        self._bases: dict[int, list[BasisElement]] = {}
        self._index: dict[int, dict[BasisElement, int]] = {}
        self._d: dict[int, IntMatrix] = {}
        self._blocks: dict[int, dict[tuple[int, ...], list[int]]] = {}
        self._classes = self._grading_classes()

    def _grading_classes(self) -> tuple[list[int], list[int], int]:
        parent = list(range(self.K.m))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for lam in self._lambda:
            idx = [i for i, _ in lam]
            for i in idx[1:]:
                a, b = find(idx[0]), find(i)
                if a != b:
                    parent[b] = a
        roots = sorted({find(i) for i in range(self.K.m)})
        label = {r: n for n, r in enumerate(roots)}
        var_class = [label[find(i)] for i in range(self.K.m)]
        t_class = [var_class[lam[0][0]] if lam else -1 for lam in self._lambda]
        return var_class, t_class, len(roots)

    def grading(self, e: BasisElement) -> tuple[int, ...]:
        var_class, t_class, n = self._classes
        g = [0] * (n + 1)  # last slot: forms that vanish identically
        for j in e[0]:
            g[t_class[j - 1]] += 1
        for i, x in enumerate(e[1]):
            if x:
                g[var_class[i]] += x
        return tuple(g)

    # slices -----------------------------------------------------------------
    def basis(self, n: int) -> list[BasisElement]:
        if n not in self._bases:
            out = []
            if n >= 0:
                for s in range(min(self.r, n), -1, -1):
                    if (n - s) % 2:
                        continue
                    monos = enumerate_slice(self.K, (n - s) // 2)
                    for S in combinations(range(1, self.r + 1), s):
                        out.extend((S, w) for w in monos)
            self._bases[n] = out
            self._index[n] = {e: i for i, e in enumerate(out)}
        return self._bases[n]

    def index(self, n: int) -> dict[BasisElement, int]:
        self.basis(n)
        return self._index[n]

    def d_out(self, n: int) -> IntMatrix:
        """Differential from slice n to slice n+1 as an integer matrix."""
        if n not in self._d:
            src = self.basis(n)
            tgt = self.index(n + 1)
            K = self.K
            entries = []
            for col, (S, w) in enumerate(src):
                for a, j in enumerate(S):
                    sign = -1 if a % 2 else 1
                    rest = S[:a] + S[a + 1:]
                    for i, c in self._lambda[j - 1]:
                        w2 = list(w)
                        w2[i] += 1
                        w2 = tuple(w2)
                        if w[i] == 0 and not K.is_simplex(tuple(v + 1 for v, x in enumerate(w2) if x)):
                            continue
                        entries.append((tgt[(rest, w2)], col, sign * c))
            M = IntMatrix(len(tgt), len(src), entries)
            if self.ring.kind == "F":
                p = self.ring.p
                M = IntMatrix(M.rows, M.cols, ((i, j, v % p) for i, j, v in M.entries()))
            self._d[n] = M
        return self._d[n]

    def slice(self, n: int) -> KoszulSlice:
        return KoszulSlice(n, list(self.basis(n)), self.d_out(n))

    def blocks(self, n: int) -> dict[tuple[int, ...], list[int]]:
        if n not in self._blocks:
            out: dict[tuple[int, ...], list[int]] = {}
            for i, e in enumerate(self.basis(n)):
                out.setdefault(self.grading(e), []).append(i)
            self._blocks[n] = out
        return self._blocks[n]

    def block_pair(self, n: int, key) -> tuple[IntMatrix, IntMatrix, list[int]]:
        """(d into the block, d out of the block, block indices) for grading ``key`` in degree n."""
        here = self.blocks(n).get(key, [])
        before = self.blocks(n - 1).get(key, []) if n > 0 else []
        after = self.blocks(n + 1).get(key, [])
        d_in = _submatrix(self.d_out(n - 1), here, before) if n > 0 else IntMatrix(len(here), 0)
        d_out = _submatrix(self.d_out(n), after, here)
        return d_in, d_out, here


def _submatrix(M: IntMatrix, rows: Sequence[int], cols: Sequence[int]) -> IntMatrix:
    cpos = {c: n for n, c in enumerate(cols)}
    entries = []
    for n, i in enumerate(rows):
        for j, v in M.row(i).items():
            if j in cpos:
                entries.append((n, cpos[j], v))
    return IntMatrix(len(rows), len(cols), entries)


def build_slice(K: SimplicialComplex, Q: QuotientModel, n: int, ring: CoefficientRing) -> KoszulSlice:
    if n < 0:
        raise InputError("slice degree must be non-negative")
    return KoszulComplex(K, Q.forms, ring).slice(n)


# ---------------------------------------------------------------------------
# additive cohomology

@dataclass
class CohomologyResult:
    ring: CoefficientRing
    max_degree: int
    degrees: list[HomologyGroup]
    bigraded: dict[tuple[int, int], int] = field(default_factory=dict)
    default_bound: bool = True

    def betti(self) -> list[int]:
        return [g.betti for g in self.degrees]

    def torsion(self) -> list[tuple[int, ...]]:
        return [g.torsion for g in self.degrees]

    def __getitem__(self, n: int) -> HomologyGroup:
        return self.degrees[n] if 0 <= n < len(self.degrees) else HomologyGroup()

    def to_json(self) -> dict:
        out = {"degrees": [{"n": n, **g.to_json()} for n, g in enumerate(self.degrees)]}
        if self.ring.is_field:
            out["bigraded"] = [{"exterior": s, "polynomial": j, "n": s + 2 * j, "dim": d}
                               for (s, j), d in sorted(self.bigraded.items())]
        out["max_degree"] = self.max_degree
        out["bound_is_dimension"] = self.default_bound
        return out


def _block_homology(args):
    d_in, d_out, ring, n = args
    return homology_at(d_in, d_out, ring, degree=n)


def koszul_cohomology(K: SimplicialComplex, Q: QuotientModel | IntMatrix, ring: CoefficientRing,
                      max_degree: int | None = None, workers: int = 1) -> CohomologyResult:
    """Cohomology of the Koszul model, no freeness gate.

    ``Q`` may be a QuotientModel or a bare matrix of linear forms.
    """
    forms = Q.forms if isinstance(Q, QuotientModel) else Q
    k = K.m - forms.rows
    default = max_degree is None
    if default:
        max_degree = default_max_degree(K, k)
    if max_degree < 0:
        raise InputError("max_degree must be non-negative")
    cx = KoszulComplex(K, forms, ring)
    tasks, keys = [], []
    for n in range(max_degree + 1):
        for key, idx in cx.blocks(n).items():
            d_in, d_out, _ = cx.block_pair(n, key)
            tasks.append((d_in, d_out, ring, n))
            s, w = cx.basis(n)[idx[0]]
            keys.append((n, len(s), sum(w)))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            groups = list(ex.map(_block_homology, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        groups = [_block_homology(t) for t in tasks]
    per_degree: list[list[HomologyGroup]] = [[] for _ in range(max_degree + 1)]
    bigraded: dict[tuple[int, int], int] = {}
    for (n, s, j), g in zip(keys, groups):
        per_degree[n].append(g)
        if ring.is_field and g.betti:
            bigraded[(s, j)] = bigraded.get((s, j), 0) + g.betti
    return CohomologyResult(ring, max_degree, [direct_sum(gs) for gs in per_degree],
                            bigraded, default)


def cohomology(K: SimplicialComplex, S: SubtorusSpec, ring: CoefficientRing,
               max_degree: int | None = None, workers: int = 1) -> CohomologyResult:
    """H*(Z_K/H; ring) degree by degree; refuses non-free actions."""
    if max_degree is not None and max_degree < 0:
        raise InputError("max_degree must be non-negative")
    require_free(S, K)
    return koszul_cohomology(K, quotient_model(S), ring, max_degree, workers)


# ---------------------------------------------------------------------------
# ring structure over a field

def scalar_to_json(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return int(x)


@dataclass
class RingPresentation:
    """Basis classes per degree and their products.

    ``classes[n]`` holds cocycle representatives as sparse vectors in the
    slice-n basis; ``products[(a, b)]`` with ``a = (deg, index)`` is the
    coefficient list of the product in the basis of degree ``deg_a + deg_b``.
    """

    ring: CoefficientRing
    max_degree: int
    classes: dict[int, list[dict]]
    products: dict[tuple[tuple[int, int], tuple[int, int]], list]
    basis_elements: dict[int, list[BasisElement]] = field(repr=False, default_factory=dict)
    bound_is_dimension: bool = True

    def dims(self) -> list[int]:
        return [len(self.classes.get(n, [])) for n in range(self.max_degree + 1)]

    def product(self, a: tuple[int, int], b: tuple[int, int]) -> list:
        return self.products[(a, b)]

    def multiply_vectors(self, p: int, x: Sequence, q: int, y: Sequence) -> list:
        """Product of two classes given by coordinate vectors in degrees p and q."""
        n = p + q
        if n > self.max_degree:
            if self.bound_is_dimension:
                return []
            raise ContractError(f"degree {n} lies above the computed range 0..{self.max_degree}")
        out = [0] * len(self.classes.get(n, []))
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                for t, c in enumerate(self.products[((p, i), (q, j))]):
                    out[t] += a * b * c
        return [self.ring.reduce(v) if self.ring.kind == "F" else v for v in out]

    def generators(self) -> list[tuple[int, int]]:
        """Basis classes not reachable as products of lower positive-degree classes."""
        gens = []
        for n in range(1, self.max_degree + 1):
            dim = len(self.classes.get(n, []))
            if not dim:
                continue
            ech = FieldEchelon(self.ring)
            for p in range(1, n):
                for i in range(len(self.classes.get(p, []))):
                    for j in range(len(self.classes.get(n - p, []))):
                        vec = self.products[((p, i), (n - p, j))]
                        ech.add({t: c for t, c in enumerate(vec) if c})
            for t in range(dim):
                if ech.add({t: 1}):
                    gens.append((n, t))
        return gens

    def to_json(self) -> dict:
        return {
            "dims": self.dims(),
            "generators": [{"degree": n, "index": i} for n, i in self.generators()],
            "representatives": {str(n): [[[list(self.basis_elements[n][c][0]),
                                           list(self.basis_elements[n][c][1]), scalar_to_json(v)]
                                          for c, v in sorted(vec.items())]
                                         for vec in vecs]
                                for n, vecs in sorted(self.classes.items())},
            "products": [{"a": list(a), "b": list(b), "coefficients": [scalar_to_json(c) for c in v]}
                         for (a, b), v in sorted(self.products.items())],
        }


def _ring_structure_from_forms(K: SimplicialComplex, forms: IntMatrix, field_ring: CoefficientRing,
                               max_degree: int, bound_is_dimension: bool) -> RingPresentation:
    cx = KoszulComplex(K, forms, field_ring)
    norm = field_ring.reduce
    classes: dict[int, list[dict]] = {}
    solvers: dict[int, FieldEchelon] = {}
    for n in range(max_degree + 1):
        solver = FieldEchelon(field_ring)
        reps: list[dict] = []
        for key in sorted(cx.blocks(n)):
            d_in, d_out, here = cx.block_pair(n, key)
            for col in d_in.T.row_dicts().values():
                solver.add({here[i]: v for i, v in col.items()})
            for z in nullspace(d_out, field_ring):
                vec = {here[i]: v for i, v in z.items()}
                if solver.add(vec, label=len(reps)):
                    reps.append(vec)
        classes[n] = reps
        solvers[n] = solver

    products = {}
    for p in range(max_degree + 1):
        for q in range(max_degree + 1 - p):
            n = p + q
            idx_n = cx.index(n)
            for i, x in enumerate(classes[p]):
                for j, y in enumerate(classes[q]):
                    chain: dict[int, object] = {}
                    for a, xa in x.items():
                        ea = cx.basis(p)[a]
                        for b, yb in y.items():
                            prod = cup_product(ea, cx.basis(q)[b], K)
                            if prod is None:
                                continue
                            sign, e = prod
                            t = idx_n[e]
                            chain[t] = norm(chain.get(t, 0) + sign * xa * yb)
                    chain = {t: c for t, c in chain.items() if c}
                    if any(norm(v) for v in cx.d_out(n).apply(chain).values()):
                        raise ContractError(f"product of classes {(p, i)} and {(q, j)} is not a cocycle")
                    rem, tag = solvers[n].reduce(chain)
                    if rem:
                        raise ContractError(f"product {(p, i)}·{(q, j)} not expressible in degree {n}")
                    products[((p, i), (q, j))] = [norm(tag.get(t, 0)) for t in range(len(classes[n]))]
    elements = {n: cx.basis(n) for n in range(max_degree + 1)}
    return RingPresentation(field_ring, max_degree, classes, products, elements, bound_is_dimension)


def ring_structure(K: SimplicialComplex, S: SubtorusSpec, field_ring: CoefficientRing,
                   max_degree: int | None = None) -> RingPresentation:
    """Multiplicative structure of H*(Z_K/H; F) for a field F."""
    if not field_ring.is_field:
        raise RefusalError("ring structure is only computed over fields (Q or F_p); "
                           "over Z only Betti numbers and torsion are reported")
    require_free(S, K)
    dimension = default_max_degree(K, S.k)
    if max_degree is None:
        max_degree = dimension
    if max_degree < 0:
        raise InputError("max_degree must be non-negative")
    return _ring_structure_from_forms(K, quotient_model(S).forms, field_ring, max_degree,
                                      max_degree >= dimension)


# ---------------------------------------------------------------------------
# validation helpers

def random_unimodular(n: int, rng: random.Random, steps: int = 12) -> IntMatrix:
    """Product of random elementary integer row operations (and sign flips / swaps)."""
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    if n == 0:
        return IntMatrix(0, 0)
    for _ in range(steps):
        op = rng.randrange(3)
        a = rng.randrange(n)
        if op == 0 and n > 1:
            b = rng.choice([x for x in range(n) if x != a])
            q = rng.choice([-2, -1, 1, 2])
            M[a] = [x + q * y for x, y in zip(M[a], M[b])]
        elif op == 1 and n > 1:
            b = rng.randrange(n)
            M[a], M[b] = M[b], M[a]
        else:
            M[a] = [-x for x in M[a]]
    return IntMatrix.from_rows(M, n)


def basis_invariance_check(K: SimplicialComplex, S: SubtorusSpec, ring: CoefficientRing, trials: int = 5,
                           seed: int = 0, max_degree: int | None = None) -> bool:
    """Cohomology is unchanged when the annihilator basis C is replaced by U·C."""
    require_free(S, K)
    Q = quotient_model(S)
    ref = koszul_cohomology(K, Q, ring, max_degree)
    rng = random.Random(seed)
    for _ in range(trials):
        U = random_unimodular(Q.rank, rng)
        other = koszul_cohomology(K, U @ Q.forms, ring, max_degree)
        if other.degrees != ref.degrees:
            return False
    return True


def check_d_squared(K: SimplicialComplex, forms: IntMatrix, ring: CoefficientRing, max_degree: int) -> bool:
    """Exact check that consecutive differentials compose to zero up to ``max_degree``."""
    cx = KoszulComplex(K, forms, ring)
    for n in range(max_degree):
        prod = cx.d_out(n + 1) @ cx.d_out(n)
        if ring.kind == "F":
            if any(v % ring.p for _, _, v in prod.entries()):
                return False
        elif not prod.is_zero():
            return False
    return True


def truncated_euler_defect(K: SimplicialComplex, forms: IntMatrix, ring: CoefficientRing, max_degree: int):
    """(Σ(-1)^n dim C^n, rank of d leaving the top degree) up to ``max_degree``."""
    cx = KoszulComplex(K, forms, ring)
    chi = sum((-1) ** n * len(cx.basis(n)) for n in range(max_degree + 1))
    return chi, rank_over(cx.d_out(max_degree), ring)
