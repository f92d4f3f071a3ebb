"""Text and JSON forms of partitions, factor pairs, structures and claim ledgers.

A partition is written ``"0 1 | 2 3"``; a factor pair is two partitions
joined by ``" / "``.  JSON documents carry a ``schema`` field.
"""

from __future__ import annotations

import json
import re
from typing import Any

from .fact_omp import FactorPair, OmpStructure, horizontal_sum_decomposition
from .partition_core import Partition, PartitionError, make_partition
from .vecfact import SubspacePair, parse_subspace

SCHEMA_VERSION = 1

_TOKEN = re.compile(r"\s*(?:(\d+)|(\|)|(\S))")


class ParseError(ValueError):
    def __init__(self, message: str, text: str, offset: int):
        line = text.count("\n", 0, offset) + 1
        column = offset - (text.rfind("\n", 0, offset) + 1) + 1
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


def _tokens(text: str, base: int = 0) -> list[tuple[str, int, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1) is not None:
            out.append(("num", int(m.group(1)), base + m.start(1)))
        elif m.group(2) is not None:
            out.append(("bar", 0, base + m.start(2)))
        else:
            out.append(("bad", 0, base + m.start(3)))
        pos = m.end()
    return out


def _parse_blocks(text: str, full: str, base: int) -> tuple[list[list[int]], dict[int, int]]:
    blocks: list[list[int]] = [[]]
    where: dict[int, int] = {}
    bar_at = base
    for kind, val, off in _tokens(text, base):
        if kind == "bad":
            raise ParseError(f"unexpected character {full[off]!r}", full, off)
        if kind == "bar":
            if not blocks[-1]:
                raise ParseError("empty block", full, off)
            blocks.append([])
            bar_at = off
            continue
        if val in where:
            raise ParseError(f"point {val} appears twice", full, off)
        where[val] = off
        blocks[-1].append(val)
    if not blocks[-1]:
        raise ParseError("empty block", full, bar_at if len(blocks) > 1 else base)
    return blocks, where


def parse_partition(text: str, size: int | None = None, _full: str | None = None, _base: int = 0) -> Partition:
    """Parse ``"0 1 | 2 3"``; the size defaults to one more than the largest point."""
    full = text if _full is None else _full
    blocks, where = _parse_blocks(text, full, _base)
    n = size if size is not None else max(where) + 1
    try:
        return make_partition(n, blocks)
    except PartitionError as e:
        off = where.get(e.point, _base + len(text)) if e.point is not None else _base
        raise ParseError(str(e), full, off) from e


def format_partition(p: Partition) -> str:
    return str(p)


def parse_factor_pair(text: str, size: int | None = None) -> FactorPair:
    slashes = [i for i, ch in enumerate(text) if ch == "/"]
    if len(slashes) != 1:
        raise ParseError("expected exactly one '/'", text, slashes[1] if slashes else len(text))
    cut = slashes[0]
    left, right = text[:cut], text[cut + 1 :]
    first = parse_partition(left, size, text, 0)
    second = parse_partition(right, size or first.size, text, cut + 1)
    if first.size != second.size:
        raise ParseError("the two partitions cover different ground sets", text, cut)
    return FactorPair(first, second)


def format_factor_pair(x: FactorPair) -> str:
    return str(x)


def _encode_item(x: Any) -> list[str]:
    if isinstance(x, (FactorPair, SubspacePair)):
        return [str(x.first), str(x.second)]
    raise TypeError(f"cannot serialise {type(x).__name__}")


def structure_to_json(s: OmpStructure) -> dict:
    """``{ground, atoms, blocks, components}`` plus ``kind``, ``field`` and optional ``elements``."""
    first = s.atoms[0]
    doc: dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "label": s.label,
        "ground": s.ground,
        "atoms": [_encode_item(a) for a in s.atoms],
        "blocks": [list(b) for b in s.blocks],
        "components": [c.atoms for c in horizontal_sum_decomposition(s).components],
    }
    if isinstance(first, SubspacePair):
        doc["kind"] = "subspace_pair"
        doc["field"] = first.first.field.q
    else:
        doc["kind"] = "factor_pair"
    if s.elements is not None:
        doc["elements"] = [_encode_item(e) for e in s.elements]
    return doc


def structure_from_json(doc: dict) -> OmpStructure:
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    if doc["kind"] == "factor_pair":
        size = doc["ground"]

        def decode(t: list[str]) -> Any:
            return FactorPair(parse_partition(t[0], size), parse_partition(t[1], size))
    elif doc["kind"] == "subspace_pair":
        q = doc["field"]

        def decode(t: list[str]) -> Any:
            return SubspacePair(parse_subspace(q, t[0]), parse_subspace(q, t[1]))
    else:
        raise ValueError(f"unknown structure kind {doc['kind']!r}")
    atoms = [decode(t) for t in doc["atoms"]]
    elements = [decode(t) for t in doc["elements"]] if "elements" in doc else None
    return OmpStructure(doc["label"], atoms, [tuple(b) for b in doc["blocks"]], doc["ground"], elements)


def dumps(doc: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(doc, indent=2, sort_keys=True, default=_default)


def _default(x: Any) -> Any:
    if isinstance(x, (set, frozenset)):
        return sorted(x, key=str)
    return str(x)


def ledger_to_json(records: list, timing: bool = True) -> dict:
    rows = []
    for r in records:
        d = r.as_dict()
        if not timing:
            d.pop("runtime_ms", None)
        rows.append(d)
    return {"schema": SCHEMA_VERSION, "claims": rows}


def ledger_from_json(doc: dict) -> list:
    from .claims import ClaimRecord

    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    return [ClaimRecord(**row) for row in doc["claims"]]
