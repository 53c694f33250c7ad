"""Canonical text formats for simplicial sets, maps, posets and identification lists.

    sset v1
    cell 0 dim=0 faces=[]
    cell 0_1 dim=1 faces=[(1, [0]), (0, [0])]

    smap v1
    send 0_1 -> (a, [0, 0])

    poset v1
    le a b

    pairs v1
    pair (0_2, [0, 1]) (0, [0, 0])
"""
from __future__ import annotations

import re

from .constructors import Poset
from .sset import Cell, SMap, SSet, SSetError, Simplex

_ID = r"[^\s,()\[\]]+"
_SIMPLEX = re.compile(r"\(\s*(" + _ID + r")\s*,\s*\[([0-9,\s]*)\]\s*\)")
_CELL = re.compile(r"cell\s+(" + _ID + r")\s+dim=(\d+)\s+faces=\[(.*)\]\s*$")
_SEND = re.compile(r"send\s+(" + _ID + r")\s+->\s+(.*)$")
_ID_OK = re.compile(_ID + "$")


class ParseError(SSetError):
    """Malformed input text; the message names the offending line."""

    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _lines(text: str):
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield k, line


def _header(lines: list, kind: str):
    if not lines:
        raise ParseError(1, f"missing header '{kind} v1'")
    k, first = lines[0]
    if first.split() != [kind, "v1"]:
        raise ParseError(k, f"expected header '{kind} v1', got {first!r}")
    return lines[1:]


def format_simplex(x: Simplex) -> str:
    return f"({x.cell}, [{', '.join(map(str, x.deg))}])"


def parse_simplex(s: str, lineno: int = 0) -> Simplex:
    m = _SIMPLEX.fullmatch(s.strip())
    if not m:
        raise ParseError(lineno, f"malformed simplex {s!r}")
    return Simplex(m.group(1), _images(m.group(2), lineno))


def _images(body: str, lineno: int) -> tuple:
    parts = [p.strip() for p in body.split(",")]
    if parts == [""]:
        raise ParseError(lineno, "empty operator")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(lineno, f"bad operator images [{body}]") from None


def check_id(cid: str):
    if not _ID_OK.match(cid):
        raise SSetError(f"cell id {cid!r} contains whitespace, commas, parentheses or brackets")


# -- simplicial sets -------------------------------------------------------------


def emit_sset(X: SSet) -> str:
    out = ["sset v1"]
    for cid in X.order:
        c = X.cells[cid]
        check_id(cid)
        faces = ", ".join(format_simplex(f) for f in c.faces)
        out.append(f"cell {cid} dim={c.dim} faces=[{faces}]")
    return "\n".join(out) + "\n"


def parse_sset(text: str, name: str = "") -> SSet:
    lines = _header(list(_lines(text)), "sset")
    cells = []
    where = {}
    for k, line in lines:
        m = _CELL.match(line)
        if not m:
            raise ParseError(k, f"expected 'cell <id> dim=<d> faces=[...]', got {line!r}")
        cid, dim, body = m.group(1), int(m.group(2)), m.group(3).strip()
        found = list(_SIMPLEX.finditer(body))
        if _SIMPLEX.sub("", body).replace(",", "").strip():
            raise ParseError(k, f"malformed face list [{body}]")
        faces = [Simplex(fm.group(1), _images(fm.group(2), k)) for fm in found]
        if cid in where:
            raise ParseError(k, f"duplicate cell id {cid!r} (first on line {where[cid]})")
        where[cid] = k
        cells.append(Cell(cid, dim, tuple(faces)))
    try:
        return SSet(cells, name=name)
    except SSetError as exc:
        cid = _mentioned(str(exc), where)
        if cid is not None:
            raise ParseError(where[cid], str(exc)) from None
        raise


def _mentioned(msg: str, where: dict):
    m = re.search(r"cell '([^']*)'", msg)
    if m and m.group(1) in where:
        return m.group(1)
    return None


# -- maps ---------------------------------------------------------------------------


def emit_smap(f: SMap) -> str:
    out = ["smap v1"]
    for cid in f.source.order:
        out.append(f"send {cid} -> {format_simplex(f.assignment[cid])}")
    return "\n".join(out) + "\n"


def parse_smap(text: str, source: SSet, target: SSet) -> SMap:
    lines = _header(list(_lines(text)), "smap")
    assignment = {}
    for k, line in lines:
        m = _SEND.match(line)
        if not m:
            raise ParseError(k, f"expected 'send <id> -> (<id>, [deg])', got {line!r}")
        if m.group(1) in assignment:
            raise ParseError(k, f"cell {m.group(1)!r} is sent twice")
        assignment[m.group(1)] = parse_simplex(m.group(2), k)
    return SMap(source, target, assignment)


def emit_smap_list(maps: list) -> str:
    return "---\n".join(emit_smap(f) for f in maps)


def parse_smap_list(text: str, source: SSet, target: SSet) -> list:
    blocks = re.split(r"^---\s*$", text, flags=re.M)
    return [parse_smap(b, source, target) for b in blocks if b.strip()]


# -- posets and identification lists --------------------------------------------------


def parse_poset(text: str) -> Poset:
    """``le a b`` lines; ``elem a`` declares an element without relations."""
    lines = _header(list(_lines(text)), "poset")
    elements = []
    pairs = []
    for k, line in lines:
        parts = line.split()
        if parts[0] == "le" and len(parts) == 3:
            pairs.append((parts[1], parts[2]))
            elements.extend(parts[1:])
        elif parts[0] == "elem" and len(parts) == 2:
            elements.append(parts[1])
        else:
            raise ParseError(k, f"expected 'le <a> <b>' or 'elem <a>', got {line!r}")
        for e in parts[1:]:
            check_id(e)
    try:
        return Poset(elements, pairs)
    except ValueError as exc:
        raise ParseError(lines[-1][0] if lines else 1, str(exc)) from None


def emit_poset(P: Poset) -> str:
    out = ["poset v1"]
    related = set()
    for a in P.elements:
        for b in P.elements:
            if P.lt(a, b):
                out.append(f"le {a} {b}")
                related.update((a, b))
    for a in P.elements:
        if a not in related:
            out.append(f"elem {a}")
    return "\n".join(out) + "\n"


def parse_pairs(text: str) -> list:
    lines = _header(list(_lines(text)), "pairs")
    out = []
    pair = re.compile(r"pair\s+(\(.*?\))\s+(\(.*?\))\s*$")
    for k, line in lines:
        m = pair.match(line)
        if not m:
            raise ParseError(k, f"expected 'pair (<id>, [deg]) (<id>, [deg])', got {line!r}")
        out.append((parse_simplex(m.group(1), k), parse_simplex(m.group(2), k)))
    return out


def emit_pairs(pairs: list) -> str:
    return "pairs v1\n" + "".join(f"pair {format_simplex(a)} {format_simplex(b)}\n" for a, b in pairs)
