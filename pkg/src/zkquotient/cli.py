"""Command-line interface: ``zkquotient {check,betti,ring,oracle,validate}``.

Exit statuses: 0 success / agreement, 1 input error, 2 freeness or policy
refusal, 3 no applicable oracle, 4 a validation check or oracle disagreed.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass

from . import complexes as cx
from .errors import InputError, NotFreeError, RefusalError
from .exact_algebra import CoefficientRing
from .koszul import (basis_invariance_check, check_d_squared, cohomology, default_max_degree,
                     ring_structure, truncated_euler_defect, scalar_to_json)
from .oracle import brute_force_freeness, compare
from .torus import (SubtorusSpec, acts_freely, diagonal_circle, quotient_model,
                    search_free_subtorus, validate, violating_facet)

EXIT_OK, EXIT_INPUT, EXIT_REFUSED, EXIT_NO_ORACLE, EXIT_FAILED = 0, 1, 2, 3, 4

COMPLEX_GRAMMAR = """\
complex sources (--complex):
  PATH                   JSON file {"m": 5, "facets": [[1,2],[2,3],...]}
  '{"m": ..., ...}'      the same JSON inline
  simplex:M              full simplex on M vertices
  simplex-boundary:M     boundary of the (M-1)-simplex (M >= 1)
  polygon:M              boundary of an M-gon (M >= 3)
  rp2                    6-vertex real projective plane
  disjoint-edges         the two edges {1,2}, {3,4}
  random:M               random complex on M vertices, drawn with --seed
  skeleton:D:of:GEN      D-skeleton of GEN
  join:GEN1+GEN2         join (split at the first '+')

subtorus sources (--subtorus):
  trivial | diagonal | toric (seeded search for a free subtorus of maximal rank)
  PATH or inline JSON {"m": 5, "basis": [[1,1,1,1,1]]}
"""


def parse_complex(text: str, seed: int = 0) -> cx.SimplicialComplex:
    t = text.strip()
    if t.startswith("{"):
        return cx.SimplicialComplex.from_json(t)
    if os.path.exists(t):
        with open(t) as fh:
            return cx.SimplicialComplex.from_json(fh.read())
    name, _, rest = t.partition(":")
    try:
        if name == "join":
            left, sep, right = rest.partition("+")
            if not sep:
                raise InputError("join needs the form join:GEN1+GEN2")
            return cx.join(parse_complex(left, seed), parse_complex(right, seed))
        if name == "skeleton":
            d, of, inner = rest.split(":", 2)
            if of != "of":
                raise InputError("skeleton needs the form skeleton:D:of:GEN")
            return cx.skeleton(parse_complex(inner, seed), int(d))
        if name == "rp2" and not rest:
            return cx.rp2()
        if name == "disjoint-edges" and not rest:
            return cx.two_disjoint_edges()
        gens = {"simplex": cx.simplex, "simplex-boundary": cx.boundary_simplex, "polygon": cx.polygon}
        if name in gens:
            return gens[name](int(rest))
        if name == "random":
            return cx.random_complex(int(rest), random.Random(seed))
    except ValueError as exc:
        raise InputError(f"bad complex spec {text!r}: {exc}") from exc
    raise InputError(f"unknown complex source {text!r} (not a file, JSON or generator)")


def parse_subtorus(text: str, K: cx.SimplicialComplex, seed: int = 0) -> SubtorusSpec:
    t = text.strip()
    if t == "trivial":
        return SubtorusSpec.trivial(K.m)
    if t == "diagonal":
        return diagonal_circle(K.m)
    if t == "toric":
        k = K.m - K.dim - 1
        S = search_free_subtorus(K, k, random.Random(seed)) if k > 0 else SubtorusSpec.trivial(K.m)
        if S is None:
            raise RefusalError(f"no free subtorus of rank {k} found by the seeded search")
        return S
    if t.startswith("{"):
        S = SubtorusSpec.from_json(t)
    elif os.path.exists(t):
        with open(t) as fh:
            S = SubtorusSpec.from_json(fh.read())
    else:
        raise InputError(f"unknown subtorus source {text!r}")
    if S.m != K.m:
        raise InputError(f"subtorus has m={S.m} but the complex has m={K.m}")
    return S


@dataclass
class JobSpec:
    complex: cx.SimplicialComplex
    subtorus: SubtorusSpec
    ring: CoefficientRing
    max_degree: int | None
    output: str
    seed: int
    threads: int

    def params(self) -> dict:
        return {"complex": self.complex.to_json(), "subtorus": self.subtorus.to_json(),
                "ring": str(self.ring), "max_degree": self.max_degree, "seed": self.seed}


def _job(args) -> JobSpec:
    K = parse_complex(args.complex, args.seed)
    S = parse_subtorus(args.subtorus, K, args.seed)
    if args.max_degree is not None and args.max_degree < 0:
        raise InputError("--max-degree must be non-negative")
    if args.threads < 1:
        raise InputError("--threads must be at least 1")
    return JobSpec(K, S, CoefficientRing.parse(args.ring), args.max_degree, args.format, args.seed, args.threads)


def _emit(job: JobSpec, payload: dict, text: str) -> None:
    if job.output == "json":
        payload = dict(payload, params=job.params())
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


def _group_text(g) -> str:
    parts = [str(g.betti)] + [f"Z/{t}" for t in g.torsion]
    return "+".join(parts)


def cmd_check(job: JobSpec) -> int:
    K, S = job.complex, job.subtorus
    if not validate(S):
        raise InputError(f"subtorus basis {S.rows()} is not primitive")
    bad = violating_facet(S, K)
    payload = {"primitive": True, "free": bad is None,
               "violating_facet": list(bad) if bad is not None else None}
    text = "H acts freely on Z_K" if bad is None else \
        f"H does not act freely: facet {list(bad)} violates split injectivity"
    _emit(job, payload, text)
    return EXIT_OK if bad is None else EXIT_REFUSED


def cmd_betti(job: JobSpec) -> int:
    res = cohomology(job.complex, job.subtorus, job.ring, job.max_degree, job.threads)
    lines = [f"H*(Z_K/H; {job.ring}) in degrees 0..{res.max_degree}",
             f"{'n':>4}  {'betti':>6}  torsion"]
    for n, g in enumerate(res.degrees):
        tors = ", ".join(f"Z/{t}" for t in g.torsion) or "-"
        lines.append(f"{n:>4}  {g.betti:>6}  {tors}")
    summary = ", ".join(f"{n}:{_group_text(g)}" for n, g in enumerate(res.degrees) if not g.is_zero())
    lines.append(f"nonzero: {summary}")
    _emit(job, res.to_json(), "\n".join(lines))
    return EXIT_OK


def cmd_ring(job: JobSpec) -> int:
    rp = ring_structure(job.complex, job.subtorus, job.ring, job.max_degree)
    gens = rp.generators()
    names = {}
    for n in range(rp.max_degree + 1):
        for i in range(len(rp.classes[n])):
            names[(n, i)] = f"x{n}_{i}"
    lines = [f"H*(Z_K/H; {job.ring}) ring structure, degrees 0..{rp.max_degree}",
             "dims: " + ", ".join(f"{n}:{d}" for n, d in enumerate(rp.dims()) if d),
             "generators: " + (", ".join(names[g] for g in gens) or "(none)"),
             "products (positive degrees, nonzero only):"]
    for (a, b), vec in sorted(rp.products.items()):
        if a[0] == 0 or b[0] == 0:
            continue
        terms = [f"{scalar_to_json(c)}*{names[(a[0] + b[0], t)]}" for t, c in enumerate(vec) if c]
        if terms:
            lines.append(f"  {names[a]} * {names[b]} = {' + '.join(terms)}")
    degrees = [{"n": n, "betti": d, "torsion": []} for n, d in enumerate(rp.dims())]
    _emit(job, {"degrees": degrees, "ring": rp.to_json()}, "\n".join(lines))
    return EXIT_OK


def cmd_oracle(job: JobSpec) -> int:
    report = compare(job.complex, job.subtorus, job.ring, job.max_degree, job.threads)
    _emit(job, {"report": report.to_json()}, report.render())
    if report.agreement is None:
        return EXIT_NO_ORACLE
    return EXIT_OK if report.agreement else EXIT_FAILED


def cmd_validate(job: JobSpec) -> int:
    """Structural invariants on one job; one pass/fail line each."""
    K, S, ring = job.complex, job.subtorus, job.ring
    top = job.max_degree if job.max_degree is not None else default_max_degree(K, S.k)
    forms = quotient_model(S).forms
    results = {}
    results["freeness facets == all simplices"] = acts_freely(S, K) == brute_force_freeness(S, K)
    results["d∘d = 0"] = check_d_squared(K, forms, ring, top + 1)
    if acts_freely(S, K):
        res = cohomology(K, S, ring, job.max_degree, job.threads)
        results["annihilator basis invariance (5 trials)"] = basis_invariance_check(
            K, S, ring, trials=5, seed=job.seed, max_degree=job.max_degree)
        if ring.is_field:
            chi, top_rank = truncated_euler_defect(K, forms, ring, res.max_degree)
            euler = sum((-1) ** n * b for n, b in enumerate(res.betti()))
            results["truncated Euler characteristic"] = chi - (-1) ** res.max_degree * top_rank == euler
            rp = ring_structure(K, S, ring, job.max_degree)
            results["graded commutativity"] = all(
                rp.products[(a, b)] == [ring.reduce((-1) ** (a[0] * b[0]) * c) for c in rp.products[(b, a)]]
                for (a, b) in rp.products)
            results["associativity"] = _associative(rp)
    lines = [f"{'PASS' if ok else 'FAIL'}  {name}" for name, ok in results.items()]
    _emit(job, {"checks": results}, "\n".join(lines))
    return EXIT_OK if all(results.values()) else EXIT_FAILED


def _associative(rp) -> bool:
    top = rp.max_degree
    dims = rp.dims()
    for p in range(top + 1):
        for q in range(top + 1 - p):
            for r in range(top + 1 - p - q):
                for i in range(dims[p]):
                    for j in range(dims[q]):
                        for k in range(dims[r]):
                            ab = rp.products[((p, i), (q, j))]
                            lhs = rp.multiply_vectors(p + q, ab, r, _unit(dims[r], k))
                            bc = rp.products[((q, j), (r, k))]
                            rhs = rp.multiply_vectors(p, _unit(dims[p], i), q + r, bc)
                            if lhs != rhs:
                                return False
    return True


def _unit(n: int, i: int) -> list[int]:
    return [int(t == i) for t in range(n)]


COMMANDS = {"check": cmd_check, "betti": cmd_betti, "ring": cmd_ring,
            "oracle": cmd_oracle, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zkquotient",
        description="Cohomology of quotients of moment-angle complexes by freely acting subtori.",
        epilog=COMPLEX_GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).splitlines()[0],
                           epilog=COMPLEX_GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--complex", required=True, help="file, inline JSON or generator (see below)")
        p.add_argument("--subtorus", default="trivial", help="trivial, diagonal, toric, file or inline JSON")
        p.add_argument("--ring", default="Z", help="Z, Q or Fp:<prime> (default Z)")
        p.add_argument("--max-degree", type=int, default=None)
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        job = _job(args)
        return COMMANDS[args.command](job)
    except NotFreeError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except RefusalError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
