"""Independent checks for the Koszul engine.

* Hochster decomposition (trivial subtorus): H^p(Z_K) is the sum over vertex
  subsets J of the reduced cohomology of the full subcomplex K_J in degree
  p - |J| - 1.  Uses only simplicial cochains and the exact linear algebra.
* Brute-force freeness over every simplex of K, via full Smith forms.
* Toric quotient ring: dimensions of R[K] / (λ_1, ..., λ_{m-k}) slice by slice.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

from .complexes import SimplicialComplex, full_subcomplex, reduced_cohomology
from .errors import RefusalError
from .exact_algebra import (CoefficientRing, HomologyGroup, IntMatrix, direct_sum, rank_over,
                            smith_normal_form)
from .facering import enumerate_slice, slice_index, support
from .koszul import cohomology, default_max_degree
from .torus import SubtorusSpec, acts_freely, quotient_model, validate


def _subset_summand(args):
    Kj, ring = args
    return reduced_cohomology(Kj, ring)


def hochster_betti(K: SimplicialComplex, ring: CoefficientRing, max_degree: int | None = None,
                   workers: int = 1) -> list[HomologyGroup]:
    """H^p(Z_K; ring) for p = 0..max_degree from full-subcomplex cohomology."""
    if max_degree is None:
        max_degree = default_max_degree(K, 0)
    subsets = [J for size in range(K.m + 1) for J in combinations(range(1, K.m + 1), size)]
    subs = [full_subcomplex(K, J) for J in subsets]
    # many full subcomplexes coincide after relabelling
    distinct = sorted(set(subs), key=lambda c: (c.m, c.facets))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_subset_summand, [(c, ring) for c in distinct]))
    else:
        results = [_subset_summand((c, ring)) for c in distinct]
    cache = dict(zip(distinct, results))
    summands: list[list[HomologyGroup]] = [[] for _ in range(max_degree + 1)]
    for J, Kj in zip(subsets, subs):
        for idx, g in enumerate(cache[Kj]):
            p = (idx - 1) + len(J) + 1
            if p <= max_degree and not g.is_zero():
                summands[p].append(g)
    return [direct_sum(gs) for gs in summands]


def brute_force_freeness(S: SubtorusSpec, K: SimplicialComplex) -> bool:
    """Split-injectivity of L_H -> Z^{[m] minus I} for every simplex I, empty one included."""
    if not validate(S):
        return False
    k = S.k
    if k == 0:
        return True
    dense = S.rows()
    for I in K.all_faces():
        keep = [c for c in range(S.m) if c + 1 not in I]
        sub = IntMatrix.from_rows([[row[c] for c in keep] for row in dense], len(keep))
        snf = smith_normal_form(sub)
        facs = snf.invariant_factors
        if len(facs) != k or any(f != 1 for f in facs):
            return False
    return True


def toric_quotient_dims(K: SimplicialComplex, S: SubtorusSpec, field_ring: CoefficientRing,
                        max_degree: int | None = None) -> list[int]:
    """Dimensions of R[K]/(λ) in cohomological degrees 0..max_degree over a field."""
    if not field_ring.is_field:
        raise RefusalError("toric quotient dimensions need field coefficients")
    if max_degree is None:
        max_degree = default_max_degree(K, S.k)
    forms = quotient_model(S).forms
    lams = [forms.row(f) for f in range(forms.rows)]
    dims = []
    for n in range(max_degree + 1):
        if n % 2:
            dims.append(0)
            continue
        j = n // 2
        target = slice_index(K, j)
        if j == 0:
            dims.append(len(target))
            continue
        entries = []
        col = 0
        for lam in lams:
            for w in enumerate_slice(K, j - 1):
                for i, c in lam.items():
                    w2 = w[:i] + (w[i] + 1,) + w[i + 1:]
                    if K.is_simplex(support(w2)):
                        entries.append((target[w2], col, c))
                col += 1
        image = IntMatrix(len(target), col, entries)
        dims.append(len(target) - rank_over(image, field_ring))
    return dims


@dataclass
class OracleReport:
    target: str
    oracle: str | None
    agreement: bool | None
    detail: list[dict] = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict:
        return {"target": self.target, "oracle": self.oracle, "agreement": self.agreement,
                "note": self.note, "table": self.detail}

    def render(self) -> str:
        lines = [f"target: {self.target}", f"oracle: {self.oracle or 'none'}"]
        if self.note:
            lines.append(f"note: {self.note}")
        if self.detail:
            lines.append(f"{'n':>3}  {'koszul':<18}{'oracle':<18}match")
            for row in self.detail:
                lines.append(f"{row['n']:>3}  {row['koszul']:<18}{row['oracle']:<18}"
                             f"{'yes' if row['match'] else 'NO'}")
        verdict = {True: "agree", False: "DISAGREE", None: "undefined"}[self.agreement]
        lines.append(f"agreement: {verdict}")
        return "\n".join(lines)


def compare(K: SimplicialComplex, S: SubtorusSpec, ring: CoefficientRing,
            max_degree: int | None = None, workers: int = 1) -> OracleReport:
    """Run the applicable oracle next to the Koszul engine.

    Dispatch: Hochster when H is trivial (any ring); the toric quotient ring
    when H has the maximal rank m - dim K - 1, acts freely, and the
    coefficients form a field.  Otherwise no oracle applies.
    """
    target = f"H*(Z_K/H; {ring}) for m={K.m}, facets={[list(f) for f in K.facets]}, H basis={S.rows()}"
    if S.k == 0:
        mine = cohomology(K, S, ring, max_degree, workers)
        theirs = hochster_betti(K, ring, mine.max_degree, workers)
        fmt = str if ring.kind == "Z" else (lambda g: str(g.betti))
        rows = [{"n": n, "koszul": fmt(a), "oracle": fmt(b), "match": a == b}
                for n, (a, b) in enumerate(zip(mine.degrees, theirs))]
        return OracleReport(target, "hochster", all(r["match"] for r in rows), rows)
    maximal = S.k == K.m - K.dim - 1
    if maximal and ring.is_field and acts_freely(S, K):
        mine = cohomology(K, S, ring, max_degree, workers)
        dims = toric_quotient_dims(K, S, ring, mine.max_degree)
        rows = [{"n": n, "koszul": str(a.betti), "oracle": str(b), "match": a.betti == b}
                for n, (a, b) in enumerate(zip(mine.degrees, dims))]
        return OracleReport(target, "toric-quotient", all(r["match"] for r in rows), rows)
    reasons = []
    if not maximal:
        reasons.append(f"subtorus rank {S.k} is neither 0 nor maximal ({K.m - K.dim - 1})")
    if not ring.is_field:
        reasons.append("the toric quotient oracle needs field coefficients")
    if maximal and not acts_freely(S, K):
        reasons.append("the action is not free")
    return OracleReport(target, None, None, [], "no applicable oracle: " + "; ".join(reasons))
