"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 a size cap was hit.
"""

from __future__ import annotations

import argparse
import csv
import logging
import random
import sys
import time
from typing import Any, Sequence

from . import claims as claims_mod
from . import counting
from .slab27 import SlabError
from .req27 import CollapseError
from .serialize import ParseError, dumps, ledger_to_json, parse_factor_pair, parse_partition

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class GuardError(Exception):
    pass


class UsageError(Exception):
    pass


def _cell(v: Any) -> str:
    return v if isinstance(v, str) else dumps(v).replace("\n", "").replace("  ", "") if isinstance(v, (list, dict)) else str(v)


def _emit(obj: Any, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(dumps(obj) + "\n")
        return
    rows = obj if isinstance(obj, list) else [obj]
    keys: list[str] = []
    for r in rows:
        keys.extend(k for k in r if k not in keys)
    if fmt == "csv":
        w = csv.DictWriter(out, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(v) for k, v in r.items()})
        return
    if len(rows) == 1:
        width = max(map(len, keys))
        for k, v in rows[0].items():
            out.write(f"{k:<{width}}  {_cell(v)}\n")
        return
    cells = [[_cell(r.get(k, "")) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    out.write("  ".join(k.ljust(w) for k, w in zip(keys, widths)).rstrip() + "\n")
    for c in cells:
        out.write("  ".join(v.ljust(w) for v, w in zip(c, widths)).rstrip() + "\n")


# Default caps: full enumeration of Fact(n), the Sym(n) scan, and points of GF(q)^k.
FACT_CAP, PHASE_CAP, VECTOR_CAP = 12, 9, 400


def _cap(n: int, default: int, args: argparse.Namespace) -> None:
    limit = default if args.size_cap is None else args.size_cap
    if n > limit:
        raise GuardError(f"size {n} exceeds the cap {limit}; raise it with --size-cap")


def _vector(text: str) -> tuple[int, int]:
    try:
        q, k = (int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"--vector expects q,k, got {text!r}") from None
    if q < 2 or k < 1:
        raise UsageError("--vector needs q >= 2 and k >= 1")
    return q, k


def _structure(args: argparse.Namespace, elements: bool = False):
    from .fact_omp import build_fact
    from .vecfact import fact_v_structure

    if getattr(args, "vector", None):
        q, k = _vector(args.vector)
        _cap(q**k, VECTOR_CAP, args)
        try:
            return fact_v_structure(q, k, size_cap=q**k)
        except ValueError as e:
            raise UsageError(str(e)) from None
    if getattr(args, "size", None):
        if args.size < 1:
            raise UsageError("--size must be positive")
        _cap(args.size, FACT_CAP, args)
        return build_fact(args.size, with_elements=elements)
    raise UsageError("give --size N or --vector q,k")


def _generators(group: list) -> list:
    """A greedy generating set: keep an element when it enlarges the generated subgroup."""
    from .autom import compose

    gens: list = []
    span = {tuple(range(len(group[0])))}
    for g in sorted(group):
        if g in span:
            continue
        gens.append(g)
        frontier = list(span)
        while frontier:
            nxt = []
            for h in frontier:
                for t in gens:
                    u = compose(h, t)
                    if u not in span:
                        span.add(u)
                        nxt.append(u)
            frontier = nxt
    return gens


# ---------------------------------------------------------------- commands


def cmd_formulas(args):
    return [{"formula": r.label, "parameters": list(r.parameters), "value": r.value} for r in counting.standard_table()], True


def cmd_enumerate(args):
    from .fact_omp import enumerate_factor_pairs
    from .partition_core import enumerate_companions, enumerate_regular

    n = args.size
    if n < 2:
        raise UsageError("--size must be at least 2")
    _cap(n, FACT_CAP, args)
    rows = []
    for m in range(2, n):
        if n % m:
            continue
        k = n // m
        parts = list(enumerate_regular(n, m, k))
        got = [len(parts), sum(1 for _ in enumerate_companions(parts[0])), sum(1 for _ in enumerate_factor_pairs(n, m))]
        want = [counting.cf_factor_relations(m, k), counting.cf_companions(m, k), counting.cf_factor_pairs(m, k)]
        rows.append({"blocks": m, "block_size": k, "regular": got[0], "companions": got[1], "factor_pairs": got[2],
                     "match": got == want})
    return rows, all(r["match"] for r in rows)


def cmd_verify_omp(args):
    from .fact_omp import verify_omp

    s = _structure(args, elements=True)
    rep = verify_omp(s)
    out = {"structure": s.label, "elements": len(s.elements), **rep.checks, "ok": rep.ok}
    if rep.violations:
        out["violations"] = rep.violations
    out["literal_condition"] = rep.literal_condition
    return out, rep.ok


def cmd_horizontal_sum(args):
    from .fact_omp import horizontal_sum_decomposition
    from .serialize import structure_to_json

    s = _structure(args)
    if args.emit == "json":
        return structure_to_json(s), True
    hs = horizontal_sum_decomposition(s)
    sizes = sorted({(len(c.atoms), len(c.blocks)) for c in hs.components})
    return {"structure": s.label, "components": len(hs.components), "component_sizes": [list(t) for t in sizes],
            "isomorphic": hs.all_isomorphic}, True


def cmd_phase_group(args):
    from .autom import phase_group

    if args.size < 1:
        raise UsageError("--size must be positive")
    _cap(args.size, PHASE_CAP, args)
    g = phase_group(args.size, size_cap=args.size)
    return {"size": args.size, "order": len(g), "generators": [list(p) for p in _generators(g)]}, True


def cmd_aut_order(args):
    from .autom import aut_order

    s = _structure(args)
    return {"structure": s.label, "order": aut_order(s)}, True


def cmd_states(args):
    from .states import solve_states

    s = _structure(args)
    if args.matrix_csv:
        with open(args.matrix_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            for blk in s.blocks:
                members = set(blk)
                w.writerow([int(a in members) for a in range(len(s.atoms))])
    sol = solve_states(s)
    cv = sol.constant_value
    return {"structure": s.label, "consistent": sol.consistent, "nullity": sol.nullity, "unique": sol.unique,
            "constant_value": None if cv is None else str(cv)}, True


def cmd_measures(args):
    from .counting import is_prime
    from .states import count_gfp_measures, measure_nullity

    if not is_prime(args.p):
        raise UsageError("--p must be prime")
    s = _structure(args)
    return {"structure": s.label, "p": args.p, "nullity": measure_nullity(s, args.p),
            "count": count_gfp_measures(s, args.p)}, True


def _small_pair(args, rng):
    from .slab27 import random_orthogonal_partner, random_small

    if args.a:
        a = parse_partition(args.a, 27)
        b = parse_partition(args.b, 27) if args.b else random_orthogonal_partner(a, rng)
    else:
        if args.b:
            raise UsageError("--b needs --a")
        a = random_small(rng)
        b = random_orthogonal_partner(a, rng)
    return a, b


def cmd_slab(args):
    from .slab27 import build_slab, slab_orthogonality

    a, b = _small_pair(args, random.Random(args.seed))
    X, Y = build_slab(a, b, "X"), build_slab(a, b, "Y")
    ok = slab_orthogonality(X, Y)
    return {"a": str(a), "b": str(b), "X": sorted(map(str, X.atoms)), "Y": sorted(map(str, Y.atoms)),
            "orthogonal": ok}, ok


def cmd_z_set(args):
    from .slab27 import build_z

    a, b = _small_pair(args, random.Random(args.seed))
    Z = build_z(a, b)
    return {"a": str(a), "b": str(b), "size": len(Z), "Z": sorted(map(str, Z))}, True


def _atom_pair(args, same: str):
    from .fact_omp import FactorPair
    from .slab27 import random_atom, random_companion

    if args.x:
        if not args.y:
            raise UsageError("--x needs --y")
        return parse_factor_pair(args.x, 27), parse_factor_pair(args.y, 27)
    rng = random.Random(args.seed)
    x = random_atom(rng)
    if same == "first":
        return x, FactorPair(x.first, random_companion(x.first, rng))
    return x, FactorPair(random_companion(x.second, rng), x.second)


def cmd_chain(args, same: str):
    from .slab27 import chain_same_first, chain_same_second, is_chain, near_first, near_second

    x, y = _atom_pair(args, same)
    build, near = (chain_same_first, near_first) if same == "first" else (chain_same_second, near_second)
    chain = build(x, y)
    ok = is_chain(x, chain, near)
    return {"x": str(x), "y": str(y), "length": len(chain), "valid": ok, "chain": [str(z) for z in chain]}, ok


def cmd_collapse(args):
    from .partition_core import bits
    from .req27 import collapse_of, recognize_collapse

    a = parse_partition(args.a, 27)
    c = collapse_of(a, args.i, args.j)
    ok = bool(recognize_collapse(c.members))
    return {"a": str(a), "fused": bits(c.fused), "size": len(c.members), "recognized": ok,
            "members": [str(m) for m in c.members]}, ok


def cmd_countubs(args):
    from .req27 import UPPER_BOUND_TABLE, large_upper_bound_count, template_pair

    rng = random.Random(args.seed)
    rows = []
    for sig, want in UPPER_BOUND_TABLE.items():
        got = sorted({large_upper_bound_count(*template_pair(sig, rng))[1] for _ in range(args.samples)})
        rows.append({"shape": str(sig), "table": want, "computed": got, "match": got == [want]})
    return rows, all(r["match"] for r in rows)


def cmd_roundtrip27(args):
    from .autom import random_perm
    from .req27 import end_to_end_roundtrip

    rng = random.Random(args.seed)
    rows = []
    for t in range(args.trials):
        alpha = random_perm(27, rng)
        timings: dict[str, float] = {}
        t0 = time.perf_counter()
        good = end_to_end_roundtrip(alpha, seed=args.seed + t, timings=timings) == alpha
        timings["total"] = time.perf_counter() - t0
        rows.append({"trial": t, "recovered": good, **{f"{k}_s": round(v, 3) for k, v in timings.items()}})
    return rows, all(r["recovered"] for r in rows)


def cmd_fact_v(args):
    args.vector = f"{args.q},{args.k}"
    s = _structure(args)
    if args.emit == "json":
        from .serialize import structure_to_json

        return structure_to_json(s), True
    a, b, per = s.incidence_counts()
    return {"structure": s.label, "atoms": a, "blocks": b, "blocks_per_atom": sorted(per),
            "formula": [counting.cf_vec_atoms(args.q, args.k), counting.cf_vec_blocks(args.q, args.k)]}, True


def cmd_claims(args):
    try:
        recs = claims_mod.run_claims(args.filter, args.seed, args.threads)
    except claims_mod.UnknownClaim as e:
        raise UsageError(f"no claim matches {e.args[0]!r}") from None
    ok = all(r.status != "fail" for r in recs)
    if args.emit == "json":
        return ledger_to_json(recs, timing=not args.no_timing), ok
    rows = [{"id": r.id, "location": r.paper_location, "status": r.status} for r in recs]
    if not args.no_timing:
        for row, r in zip(rows, recs):
            row["ms"] = r.runtime_ms
    return rows, ok


# ---------------------------------------------------------------- parser


def _structure_args(sp: argparse.ArgumentParser, required: bool = True) -> None:
    g = sp.add_mutually_exclusive_group(required=required)
    g.add_argument("--size", type=int, help="factor pairs of an N-set")
    g.add_argument("--vector", metavar="q,k", help="complementary subspace pairs of GF(q)^k")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="factomp", description="Orthomodular posets of direct-product decompositions.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit", choices=["json", "csv", "text"], default="text")
    p.add_argument("--threads", type=int, default=1, help="worker processes for the claims runner")
    p.add_argument("--size-cap", type=int, default=None,
                   help=f"largest size accepted (defaults: Fact {FACT_CAP}, phase scan {PHASE_CAP}, GF(q)^k points {VECTOR_CAP})")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("formulas", help="closed-form counts")
    sp = sub.add_parser("enumerate", help="compare enumerated counts with the closed forms")
    sp.add_argument("--size", type=int, required=True)
    _structure_args(sub.add_parser("verify-omp", help="run the orthomodular axiom suite"))
    _structure_args(sub.add_parser("horizontal-sum", help="split into connected summands"))
    sp = sub.add_parser("phase-group", help="permutations fixing every atom")
    sp.add_argument("--size", type=int, required=True)
    _structure_args(sub.add_parser("aut-order", help="order of the automorphism group"))
    sp = sub.add_parser("states", help="solve for states in exact arithmetic")
    _structure_args(sp)
    sp.add_argument("--matrix-csv", metavar="PATH", help="also write the block-atom incidence matrix")
    sp = sub.add_parser("measures", help="count GF(p)-valued measures")
    _structure_args(sp)
    sp.add_argument("--p", type=int, required=True)
    for name, text in (("slab", "the two slabs of an orthogonal small pair"), ("z-set", "the third family of a pair")):
        sp = sub.add_parser(name, help=text + " on 27 points")
        sp.add_argument("--a", metavar="PARTITION")
        sp.add_argument("--b", metavar="PARTITION")
    for name in ("chain-first", "chain-second"):
        sp = sub.add_parser(name, help=f"near-chain between atoms sharing the {name[6:]} spot")
        sp.add_argument("--x", metavar="ATOM")
        sp.add_argument("--y", metavar="ATOM")
    sp = sub.add_parser("collapse", help="collapse of a small relation at two blocks")
    sp.add_argument("--a", required=True, metavar="PARTITION")
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--j", type=int, required=True)
    sp = sub.add_parser("countubs", help="large upper bounds of template pairs")
    sp.add_argument("--samples", type=int, default=100)
    sp = sub.add_parser("roundtrip27", help="recover point permutations from their atom maps")
    sp.add_argument("--trials", type=int, default=5)
    sp = sub.add_parser("claims", help="run the claim ledger")
    sp.add_argument("--filter", default="*", metavar="GLOB")
    sp.add_argument("--no-timing", action="store_true", help="omit runtimes so ledgers compare byte for byte")
    sp = sub.add_parser("fact-v", help="counts for subspace pairs of GF(q)^k")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    return p


COMMANDS = {
    "formulas": cmd_formulas,
    "enumerate": cmd_enumerate,
    "verify-omp": cmd_verify_omp,
    "horizontal-sum": cmd_horizontal_sum,
    "phase-group": cmd_phase_group,
    "aut-order": cmd_aut_order,
    "states": cmd_states,
    "measures": cmd_measures,
    "slab": cmd_slab,
    "z-set": cmd_z_set,
    "chain-first": lambda a: cmd_chain(a, "first"),
    "chain-second": lambda a: cmd_chain(a, "second"),
    "collapse": cmd_collapse,
    "countubs": cmd_countubs,
    "roundtrip27": cmd_roundtrip27,
    "claims": cmd_claims,
    "fact-v": cmd_fact_v,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        result, ok = COMMANDS[args.command](args)
    except GuardError as e:
        print(f"factomp: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, ParseError, SlabError, CollapseError) as e:
        print(f"factomp: {e}", file=sys.stderr)
        return EXIT_USAGE
    _emit(result, args.emit)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
