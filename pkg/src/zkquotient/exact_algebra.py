"""Exact linear algebra over Z, Q and F_p.

Matrices are integer matrices stored sparsely; the coefficient ring only
enters when a rank, kernel or homology group is requested.  All integers are
Python ints, so intermediate entry growth never overflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import ContractError, InputError


# ---------------------------------------------------------------------------
# coefficient rings

def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class CoefficientRing:
    """One of Z, Q or F_p.

    Use the module constants ``ZZ`` and ``QQ`` or ``CoefficientRing.prime_field(p)``.
    """

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "F"):
            raise InputError(f"unknown coefficient ring kind {self.kind!r}")
        if self.kind == "F" and not _is_prime(self.p):
            raise InputError(f"F_p requires a prime p, got {self.p}")
        if self.kind != "F" and self.p != 0:
            raise InputError("only prime fields carry a characteristic parameter")

    @classmethod
    def prime_field(cls, p: int) -> "CoefficientRing":
        return cls("F", int(p))

    @classmethod
    def parse(cls, text: str) -> "CoefficientRing":
        """Parse ``Z``, ``Q``, ``Fp:3``, ``F3`` or ``GF(3)``."""
        t = text.strip()
        if t in ("Z", "ZZ"):
            return ZZ
        if t in ("Q", "QQ"):
            return QQ
        for prefix in ("Fp:", "F_", "GF(", "F"):
            if t.startswith(prefix):
                body = t[len(prefix):].rstrip(")")
                try:
                    return cls.prime_field(int(body))
                except ValueError:
                    break
        raise InputError(f"cannot parse coefficient ring {text!r}; use Z, Q or Fp:<prime>")

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "F" else 0

    def reduce(self, value: int):
        """Image of an integer in the ring (Fraction for Q)."""
        if self.kind == "F":
            return value % self.p
        if self.kind == "Q":
            return Fraction(value)
        return value

    def __str__(self) -> str:
        return f"F{self.p}" if self.kind == "F" else self.kind


ZZ = CoefficientRing("Z")
QQ = CoefficientRing("Q")


# ---------------------------------------------------------------------------
# integer matrices

class IntMatrix:
    """Sparse integer matrix; rows are dicts ``{col: value}`` with no zeros.

    Instances are treated as immutable once built.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, entries: Iterable[tuple[int, int, int]] = ()):
        if rows < 0 or cols < 0:
            raise InputError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        data: dict[int, dict[int, int]] = {}
        for i, j, v in entries:
            if not (0 <= i < rows and 0 <= j < cols):
                raise InputError(f"entry ({i}, {j}) outside a {rows}x{cols} matrix")
            if v:
                r = data.setdefault(i, {})
                nv = r.get(j, 0) + int(v)
                if nv:
                    r[j] = nv
                else:
                    del r[j]
                    if not r:
                        del data[i]
        self._data = data

    # constructors ---------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        nrows = len(rows)
        if cols is None:
            cols = len(rows[0]) if nrows else 0
        for r in rows:
            if len(r) != cols:
                raise InputError("ragged row list")
        return cls(nrows, cols, ((i, j, v) for i, r in enumerate(rows) for j, v in enumerate(r) if v))

    @classmethod
    def from_row_dicts(cls, rows: int, cols: int, data: dict[int, dict[int, int]]) -> "IntMatrix":
        m = cls(rows, cols)
        m._data = {i: dict(r) for i, r in data.items() if r}
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, ((i, i, 1) for i in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None) -> "IntMatrix":
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        return cls(rows, cols, ((i, i, v) for i, v in enumerate(values)))

    # access -----------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._data.get(i, {}).get(j, 0)

    def row(self, i: int) -> dict[int, int]:
        return dict(self._data.get(i, {}))

    def row_dicts(self) -> dict[int, dict[int, int]]:
        """Copy of the sparse row storage."""
        return {i: dict(r) for i, r in self._data.items()}

    def entries(self) -> Iterator[tuple[int, int, int]]:
        for i in sorted(self._data):
            r = self._data[i]
            for j in sorted(r):
                yield i, j, r[j]

    def nnz(self) -> int:
        return sum(len(r) for r in self._data.values())

    def is_zero(self) -> bool:
        return not self._data

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for i, r in self._data.items():
            for j, v in r.items():
                out[i][j] = v
        return out

    # algebra ----------------------------------------------------------------
    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, ((j, i, v) for i, j, v in self.entries()))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ContractError(f"cannot multiply {self.shape} by {other.shape}")
        out: dict[int, dict[int, int]] = {}
        odata = other._data
        for i, r in self._data.items():
            acc: dict[int, int] = {}
            for k, a in r.items():
                orow = odata.get(k)
                if not orow:
                    continue
                for j, b in orow.items():
                    acc[j] = acc.get(j, 0) + a * b
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                out[i] = acc
        return IntMatrix.from_row_dicts(self.rows, other.cols, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.entries())))

    def select_columns(self, cols: Sequence[int]) -> "IntMatrix":
        pos = {c: n for n, c in enumerate(cols)}
        return IntMatrix(self.rows, len(cols),
                         ((i, pos[j], v) for i, j, v in self.entries() if j in pos))

    def select_rows(self, rows: Sequence[int]) -> "IntMatrix":
        return IntMatrix(len(rows), self.cols,
                         ((n, j, v) for n, i in enumerate(rows) for j, v in self._data.get(i, {}).items()))

    def apply(self, vec: dict[int, object]) -> dict[int, object]:
        """Sparse matrix-vector product; ``vec`` maps column index to scalar."""
        out: dict[int, object] = {}
        for i, r in self._data.items():
            s = 0
            for j, a in r.items():
                x = vec.get(j)
                if x:
                    s += a * x
            if s:
                out[i] = s
        return out

    # serialisation ----------------------------------------------------------
    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [[i, j, v] for i, j, v in self.entries()]}

    @classmethod
    def from_json(cls, obj: dict) -> "IntMatrix":
        try:
            return cls(int(obj["rows"]), int(obj["cols"]),
                       ((int(i), int(j), int(v)) for i, j, v in obj["entries"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed matrix JSON: {exc}") from exc

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_dense()!r})" if self.rows * self.cols <= 64 else \
            f"<IntMatrix {self.rows}x{self.cols}, nnz={self.nnz()}>"


def determinant(A: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = A.rows
    if n != A.cols:
        raise ContractError("determinant of a non-square matrix")
    M = A.to_dense()
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


# ---------------------------------------------------------------------------
# Smith normal form

@dataclass(frozen=True)
class SnfResult:
    """``U @ A @ V == D`` with U, V unimodular and D in Smith form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def invariant_factors(self) -> list[int]:
        out = []
        for i in range(min(self.D.rows, self.D.cols)):
            d = self.D[i, i]
            if not d:
                break
            out.append(d)
        return out

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def _snf_dense(A: list[list[int]], nrows: int, ncols: int, track: bool):
    """In-place Smith reduction of a dense list-of-lists matrix.

    Pivot rule: smallest nonzero absolute value in the remaining block.
    Returns (diagonal, U, V) where U and V are dense or None.
    """
    U = [[int(i == j) for j in range(nrows)] for i in range(nrows)] if track else None
    V = [[int(i == j) for j in range(ncols)] for i in range(ncols)] if track else None

    def swap_rows(a, b):
        A[a], A[b] = A[b], A[a]
        if track:
            U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        for r in A:
            r[a], r[b] = r[b], r[a]
        if track:
            for r in V:
                r[a], r[b] = r[b], r[a]

    def add_row(dst, src, q):  # row_dst += q * row_src
        rs, rd = A[src], A[dst]
        for j in range(ncols):
            if rs[j]:
                rd[j] += q * rs[j]
        if track:
            us, ud = U[src], U[dst]
            for j in range(nrows):
                if us[j]:
                    ud[j] += q * us[j]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for r in A:
            if r[src]:
                r[dst] += q * r[src]
        if track:
            for r in V:
                if r[src]:
                    r[dst] += q * r[src]

    diag = []
    t = 0
    while t < min(nrows, ncols):
        best = None
        for i in range(t, nrows):
            row = A[i]
            for j in range(t, ncols):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            p = A[t][t]
            moved = False
            for i in range(t + 1, nrows):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t] and abs(A[i][t]) < abs(p):
                        swap_rows(t, i)
                        moved = True
                        break
            if moved:
                continue
            for j in range(t + 1, ncols):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j] and abs(A[t][j]) < abs(p):
                        swap_cols(t, j)
                        moved = True
                        break
            if moved:
                continue
            if any(A[i][t] for i in range(t + 1, nrows)) or any(A[t][j] for j in range(t + 1, ncols)):
                continue
            bad = next((i for i in range(t + 1, nrows)
                        if any(A[i][j] % p for j in range(t + 1, ncols))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if track:
                U[t] = [-x for x in U[t]]
        diag.append(A[t][t])
        t += 1
    return diag, U, V


def smith_normal_form(A: IntMatrix) -> SnfResult:
    """Smith normal form with transforms: ``U @ A @ V == D``."""
    dense = A.to_dense()
    diag, U, V = _snf_dense(dense, A.rows, A.cols, track=True)
    return SnfResult(IntMatrix.from_rows(U, A.rows), IntMatrix.diagonal(diag, A.rows, A.cols),
                     IntMatrix.from_rows(V, A.cols))


def _chain_form(values: Iterable[int]) -> list[int]:
    """Invariant-factor form (each divides the next) of a direct sum of cyclic groups."""
    vals = sorted(abs(v) for v in values if v)
    changed = True
    while changed:
        changed = False
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                a, b = vals[i], vals[j]
                if b % a:
                    g = math.gcd(a, b)
                    vals[i], vals[j] = g, a * b // g
                    changed = True
        vals.sort()
    return vals


def invariant_factors(A: IntMatrix) -> list[int]:
    """Nonzero invariant factors of an integer matrix, in divisibility order.

    Unit entries are eliminated sparsely first; only the residual block goes
    through the dense Smith reduction.
    """
    rows = A.row_dicts()
    colrows: dict[int, set[int]] = {}
    for i, r in rows.items():
        for j in r:
            colrows.setdefault(j, set()).add(i)
    units = 0
    progress = True
    while progress:
        progress = False
        for r_idx in sorted(rows, key=lambda i: len(rows[i])):
            row = rows.get(r_idx)
            if not row:
                continue
            cands = [j for j, v in row.items() if v in (1, -1)]
            if not cands:
                continue
            c = min(cands, key=lambda j: (len(colrows[j]), j))
            u = row[c]
            for i in list(colrows[c]):
                if i == r_idx:
                    continue
                target = rows[i]
                q = target[c] * u
                for j, v in row.items():
                    nv = target.get(j, 0) - q * v
                    if nv:
                        if j not in target:
                            colrows.setdefault(j, set()).add(i)
                        target[j] = nv
                    elif j in target:
                        del target[j]
                        colrows[j].discard(i)
                if not target:
                    del rows[i]
            for j in row:
                colrows[j].discard(r_idx)
            del rows[r_idx]
            units += 1
            progress = True
    if not rows:
        return [1] * units
    rr = sorted(rows)
    cc = sorted({j for r in rows.values() for j in r})
    cpos = {c: n for n, c in enumerate(cc)}
    dense = [[0] * len(cc) for _ in rr]
    for n, i in enumerate(rr):
        for j, v in rows[i].items():
            dense[n][cpos[j]] = v
    diag, _, _ = _snf_dense(dense, len(rr), len(cc), track=False)
    return [1] * units + _chain_form(diag)


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Rows form a basis of the integer kernel ``{x : A x = 0}``.

    The span is a direct summand of Z^cols (taken from the column transform
    of the Smith form).
    """
    snf = smith_normal_form(A)
    r = snf.rank
    V = snf.V
    return IntMatrix(A.cols - r, A.cols,
                     ((n, i, V[i, r + n]) for n in range(A.cols - r) for i in range(A.cols) if V[i, r + n]))


# ---------------------------------------------------------------------------
# field elimination

def _field_ops(ring: CoefficientRing):
    if ring.kind == "F":
        p = ring.p
        return (lambda v: v % p), (lambda a: pow(a, -1, p)), p
    if ring.kind == "Q":
        return Fraction, (lambda a: 1 / Fraction(a)), 0
    raise ContractError("field elimination requested over Z")


class FieldEchelon:
    """Incremental sparse row echelon form over Q or F_p.

    Each stored row carries a *tag*: a sparse combination of user labels it is
    congruent to.  This is how cocycles are expressed in a chosen basis of
    cohomology modulo coboundaries.
    """

    def __init__(self, ring: CoefficientRing):
        self.ring = ring
        self._norm, self._inv, self._p = _field_ops(ring)
        self.pivots: dict[int, tuple[dict, dict]] = {}

    def _convert(self, vec: dict) -> dict:
        out = {}
        for j, v in vec.items():
            v = self._norm(v)
            if v:
                out[j] = v
        return out

    def reduce(self, vec: dict, tag: dict | None = None) -> tuple[dict, dict]:
        """Reduce ``vec`` against the stored rows.

        Returns ``(remainder, tag)`` where ``vec - remainder`` is congruent to
        the returned tag combination.
        """
        v = self._convert(vec)
        t = dict(tag) if tag else {}
        norm = self._norm
        remainder = {}
        while v:
            lead = min(v)
            piv = self.pivots.get(lead)
            if piv is None:
                remainder[lead] = v.pop(lead)
                continue
            prow, ptag = piv
            q = v[lead]
            for j, a in prow.items():
                nv = norm(v.get(j, 0) - q * a)
                if nv:
                    v[j] = nv
                else:
                    v.pop(j, None)
            for k, a in ptag.items():
                nc = norm(t.get(k, 0) + q * a)
                if nc:
                    t[k] = nc
                else:
                    t.pop(k, None)
        return remainder, t

    def add(self, vec: dict, label=None) -> bool:
        """Insert a row; return False if it was already in the span."""
        rem, t = self.reduce(vec)
        if not rem:
            return False
        # rem = vec - (combination of stored rows) ≡ label - tag
        tag = {k: self._norm(-c) for k, c in t.items()}
        tag = {k: c for k, c in tag.items() if c}
        if label is not None:
            tag[label] = self._norm(tag.get(label, 0) + 1)
            if not tag[label]:
                del tag[label]
        lead = min(rem)
        inv = self._inv(rem[lead])
        self.pivots[lead] = ({j: self._norm(x * inv) for j, x in rem.items()},
                             {k: self._norm(c * inv) for k, c in tag.items()})
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _field_rank_rows(rows: dict[int, dict[int, int]], ring: CoefficientRing) -> int:
    ech = FieldEchelon(ring)
    for i in sorted(rows, key=lambda i: len(rows[i])):
        ech.add(rows[i])
    return ech.rank


def rank_over(A: IntMatrix, ring: CoefficientRing) -> int:
    """Rank of ``A`` after reduction into ``ring``; Z and Q ranks coincide."""
    if A.is_zero():
        return 0
    if ring.kind == "Z":
        ring = QQ
    data = A.row_dicts() if A.rows <= A.cols else A.T.row_dicts()
    return _field_rank_rows(data, ring)


def nullspace(A: IntMatrix, ring: CoefficientRing) -> list[dict]:
    """Basis of ``{x : A x = 0}`` over a field as sparse dicts, from the reduced echelon form.

    One vector per free column, in increasing column order.
    """
    norm, inv, _ = _field_ops(ring)
    ech = FieldEchelon(ring)
    for i in sorted(A.row_dicts().items()):
        ech.add(i[1])
    piv = {c: dict(r) for c, (r, _) in ech.pivots.items()}
    # back-substitution to reduced echelon form
    for c in sorted(piv, reverse=True):
        row_c = piv[c]
        for c2 in piv:
            if c2 < c and c in piv[c2]:
                r2 = piv[c2]
                q = r2[c]
                for j, a in row_c.items():
                    nv = norm(r2.get(j, 0) - q * a)
                    if nv:
                        r2[j] = nv
                    else:
                        r2.pop(j, None)
    free = [j for j in range(A.cols) if j not in piv]
    basis = []
    for f in free:
        vec = {f: norm(1)}
        for c, r in piv.items():
            a = r.get(f)
            if a:
                vec[c] = norm(-a)
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# homology

@dataclass(frozen=True)
class HomologyGroup:
    """Free rank plus torsion invariants ``Z/t1 + Z/t2 + ...`` with t1 | t2 | ..."""

    betti: int = 0
    torsion: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(self.torsion))
        if self.betti < 0 or any(t < 2 for t in self.torsion):
            raise ContractError(f"invalid homology group {self.betti}, {self.torsion}")

    def __add__(self, other: "HomologyGroup") -> "HomologyGroup":
        return HomologyGroup(self.betti + other.betti,
                             tuple(_chain_form(self.torsion + other.torsion)))

    def is_zero(self) -> bool:
        return self.betti == 0 and not self.torsion

    def to_json(self) -> dict:
        return {"betti": self.betti, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = []
        if self.betti:
            parts.append("Z" if self.betti == 1 else f"Z^{self.betti}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def direct_sum(groups: Iterable[HomologyGroup]) -> HomologyGroup:
    betti, tors = 0, []
    for g in groups:
        betti += g.betti
        tors.extend(g.torsion)
    return HomologyGroup(betti, tuple(_chain_form(tors)))


def _is_zero_over(M: IntMatrix, ring: CoefficientRing) -> bool:
    if ring.kind == "F":
        return all(v % ring.p == 0 for _, _, v in M.entries())
    return M.is_zero()


def homology_at(d_in: IntMatrix, d_out: IntMatrix, ring: CoefficientRing,
                degree=None, check: bool = True) -> HomologyGroup:
    """``ker(d_out) / im(d_in)`` for integer matrices acting on column vectors.

    Over Z the torsion is read off the invariant factors of ``d_in`` (the
    kernel of ``d_out`` is a direct summand, so all torsion of the cokernel
    of ``d_in`` lives inside it).
    """
    where = f" at degree {degree}" if degree is not None else ""
    if d_in.rows != d_out.cols:
        raise ContractError(f"incomposable differentials{where}: "
                            f"{d_in.shape} into {d_out.shape}")
    if check and not _is_zero_over(d_out @ d_in, ring):
        raise ContractError(f"d∘d ≠ 0{where}")
    n = d_in.rows
    r_out = rank_over(d_out, ring)
    if ring.kind == "Z":
        facs = invariant_factors(d_in)
        return HomologyGroup(n - r_out - len(facs), tuple(f for f in facs if f > 1))
    return HomologyGroup(n - r_out - rank_over(d_in, ring))


def express_in_quotient(cocycle: dict | Sequence, basis_cocycles: Sequence, coboundary_matrix: IntMatrix,
                        ring: CoefficientRing) -> list:
    """Coefficients ``c`` with ``cocycle - sum(c_i * basis_i)`` in the column space of the coboundaries."""
    if not ring.is_field:
        raise ContractError("express_in_quotient needs field coefficients")

    def as_dict(v):
        return dict(v) if isinstance(v, dict) else {i: x for i, x in enumerate(v) if x}

    ech = FieldEchelon(ring)
    for col in coboundary_matrix.T.row_dicts().values():
        ech.add(col)
    for n, b in enumerate(basis_cocycles):
        if not ech.add(as_dict(b), label=n):
            raise ContractError(f"basis cocycle {n} is dependent modulo coboundaries")
    rem, tag = ech.reduce(as_dict(cocycle))
    if rem:
        raise ContractError("cocycle is not in the span of the basis modulo coboundaries")
    norm = _field_ops(ring)[0]
    return [norm(tag.get(n, 0)) for n in range(len(basis_cocycles))]
