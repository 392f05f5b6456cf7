"""Text format for embedded weighted graphs.

    # comment
    surface counterclockwise
    vertex VID : HID HID ...          (rotation, counterclockwise)
    edge EID : HID HID weight W       (weight optional, defaults to x<EID>)
    coord VID : X Y                   (optional, all vertices or none)

W is a variable name, an exact rational or ``a+b*I``.  Edge ids are assigned
in file order and the first HID of an edge line becomes its forward half.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from .combmap import CombMap, MapError
from .exactalg.gaussrat import GaussRat
from .exactalg.poly import GPoly

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


class MapFileError(ValueError):
    def __init__(self, msg: str, line: Optional[int] = None, col: Optional[int] = None):
        self.line, self.col = line, col
        where = "" if line is None else f"line {line}" + ("" if col is None else f", column {col}") + ": "
        super().__init__(where + msg)


def _tokens(raw: str) -> List[Tuple[str, int]]:
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", raw)]


def _parse_weight(text: str, line: int, col: int) -> GPoly:
    try:
        return GPoly.const(GaussRat.parse(text))
    except ValueError:
        pass
    if _IDENT.match(text):
        return GPoly.var(text)
    raise MapFileError(f"bad weight {text!r}", line, col)


def parse_map(text: str) -> CombMap:
    vertices: List[Tuple[str, List[str]]] = []
    edges: List[Tuple[str, str, str, GPoly]] = []
    coords: Dict[str, Tuple[str, str]] = {}
    vseen: Dict[str, int] = {}
    eseen: Dict[str, int] = {}
    hid_vertex: Dict[str, int] = {}
    hid_edge: Dict[str, int] = {}
    header_ok = True
    for ln, raw in enumerate(text.splitlines(), start=1):
        raw = raw.split("#", 1)[0]
        toks = _tokens(raw)
        if not toks:
            continue
        kw, kcol = toks[0]
        if kw == "surface":
            if len(toks) != 2 or toks[1][0] != "counterclockwise":
                raise MapFileError("only 'surface counterclockwise' is supported", ln, kcol)
            if not header_ok:
                raise MapFileError("surface header must come first", ln, kcol)
            header_ok = False
            continue
        header_ok = False
        if kw not in ("vertex", "edge", "coord"):
            raise MapFileError(f"unknown keyword {kw!r}", ln, kcol)
        if len(toks) < 3 or toks[2][0] != ":":
            raise MapFileError(f"expected '{kw} ID : ...'", ln, kcol)
        ident, icol = toks[1]
        rest = toks[3:]
        if kw == "vertex":
            if ident in vseen:
                raise MapFileError(f"duplicate vertex {ident!r}", ln, icol)
            vseen[ident] = ln
            for h, hcol in rest:
                if h in hid_vertex:
                    raise MapFileError(f"half-edge {h!r} already listed at a vertex", ln, hcol)
                hid_vertex[h] = len(vertices)
            vertices.append((ident, [h for h, _ in rest]))
        elif kw == "edge":
            if ident in eseen:
                raise MapFileError(f"duplicate edge {ident!r}", ln, icol)
            eseen[ident] = ln
            if len(rest) not in (2, 4) or (len(rest) == 4 and rest[2][0] != "weight"):
                raise MapFileError("expected 'edge EID : HID HID [weight W]'", ln, kcol)
            (h1, c1), (h2, c2) = rest[0], rest[1]
            for h, c in ((h1, c1), (h2, c2)):
                if h in hid_edge:
                    raise MapFileError(f"half-edge {h!r} belongs to two edges", ln, c)
                hid_edge[h] = len(edges)
            if h1 == h2:
                raise MapFileError("an edge needs two distinct half-edges", ln, c2)
            if len(rest) == 4:
                w = _parse_weight(rest[3][0], ln, rest[3][1])
            else:
                name = f"x{ident}"
                if not _IDENT.match(name):
                    raise MapFileError(f"edge id {ident!r} gives no valid default weight name", ln, icol)
                w = GPoly.var(name)
            edges.append((ident, h1, h2, w))
        else:
            if ident in coords:
                raise MapFileError(f"duplicate coordinates for {ident!r}", ln, icol)
            if len(rest) != 2:
                raise MapFileError("expected 'coord VID : X Y'", ln, kcol)
            coords[ident] = (rest[0][0], rest[1][0])
    for h in hid_vertex:
        if h not in hid_edge:
            raise MapFileError(f"dangling half-edge {h!r}: listed at a vertex but in no edge")
    for h in hid_edge:
        if h not in hid_vertex:
            raise MapFileError(f"dangling half-edge {h!r}: in an edge but at no vertex")
    hid_int: Dict[str, int] = {}
    for k, (_, h1, h2, _) in enumerate(edges):
        hid_int[h1] = 2 * k
        hid_int[h2] = 2 * k + 1
    rotations = [[hid_int[h] for h in hs] for _, hs in vertices]
    pts = None
    if coords:
        missing = [v for v, _ in vertices if v not in coords]
        unknown = [v for v in coords if v not in vseen]
        if missing or unknown:
            raise MapFileError("coordinates must be given for every vertex and only for vertices")
        from fractions import Fraction

        try:
            pts = [tuple(Fraction(x) for x in coords[v]) for v, _ in vertices]
        except (ValueError, ZeroDivisionError):
            raise MapFileError("coordinates must be exact rationals") from None
    half_names = [None] * (2 * len(edges))
    for h, k in hid_int.items():
        half_names[k] = h
    try:
        return CombMap(rotations, [w for *_, w in edges], pts, [e for e, *_ in edges],
                       [v for v, _ in vertices], half_names)
    except MapError as exc:
        raise MapFileError(str(exc)) from None


def _weight_text(w: GPoly) -> str:
    if w.nterms() == 1 and w.total_degree() == 1:
        (m,) = w.monomials()
        if w.coeff(m) == 1:
            return str(w)
    if w.total_degree() <= 0:
        return str(w.constant_term()).replace(" ", "")
    raise ValueError(f"weight {w} is not expressible in the map format")


def serialize_map(m: CombMap) -> str:
    names = m.half_names or [f"h{m.edge_names[h >> 1]}" + ("'" if h % 2 else "") for h in range(m.n_half_edges)]
    out = ["surface counterclockwise"]
    for v, rot in enumerate(m.rotations):
        out.append(f"vertex {m.vertex_names[v]} : " + " ".join(names[h] for h in rot))
    for e in range(m.n_edges):
        line = f"edge {m.edge_names[e]} : {names[2 * e]} {names[2 * e + 1]}"
        default = f"x{m.edge_names[e]}"
        if not (_IDENT.match(default) and m.weights[e] == GPoly.var(default)):
            line += f" weight {_weight_text(m.weights[e])}"
        out.append(line)
    if m.coords is not None:
        for v, (x, y) in enumerate(m.coords):
            out.append(f"coord {m.vertex_names[v]} : {x} {y}")
    return "\n".join(out) + "\n"


def read_map(path: str) -> CombMap:
    with open(path, encoding="utf-8") as fh:
        return parse_map(fh.read())
