"""Polygraphs up to dimension 3: data model, textual format, validation.

The file grammar (comments run from '#' to end of line):

    file  := "polygraph" IDENT "{" decl* "}"
    decl  := "cell0" IDENT ";"
           | "cell1" IDENT ":" IDENT "->" IDENT ";"
           | "cell2" IDENT ":" word "=>" word ";"
           | "cell3" IDENT ":" dexpr "=>" dexpr ";"
           | "rule"  IDENT ":" word "=>" word ";"     (2-polygraph mode)
    word  := IDENT+ | "empty" "(" IDENT ")"
    dexpr := "id" "(" word ")" | IDENT
           | "(" dexpr "*" dexpr ")"                  (horizontal)
           | "(" dexpr ";" dexpr ")"                  (vertical, top to bottom)
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import diagram as dg
from .diagram import Diagram, Signature


class PolygraphError(ValueError):
    def __init__(self, msg, line=None, col=None):
        if line is not None:
            msg = f"line {line}, col {col}: {msg}"
        super().__init__(msg)
        self.line, self.col = line, col


@dataclass(frozen=True)
class TypedWord:
    """A word of 1-cells; empty words carry their 0-cell explicitly."""
    cells: tuple[str, ...]
    at: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))

    def is_empty(self) -> bool:
        return not self.cells


@dataclass(frozen=True)
class OneCell:
    name: str
    src: str
    tgt: str


@dataclass(frozen=True)
class TwoCell:
    name: str
    src: TypedWord
    tgt: TypedWord


@dataclass(frozen=True)
class ThreeCell:
    name: str
    src: Diagram
    tgt: Diagram


@dataclass(frozen=True)
class WordRule:
    name: str
    lhs: TypedWord
    rhs: TypedWord


@dataclass
class Polygraph:
    name: str
    cells0: tuple[str, ...] = ()
    cells1: tuple[OneCell, ...] = ()
    cells2: tuple[TwoCell, ...] = ()
    cells3: tuple[ThreeCell, ...] = ()
    rules2: tuple[WordRule, ...] = ()
    dimension: int = 3
    _sig: Signature | None = field(default=None, repr=False, compare=False)

    @property
    def sig(self) -> Signature:
        if self._sig is None:
            self._sig = Signature({c.name: (c.src.cells, c.tgt.cells) for c in self.cells2})
        return self._sig

    def one_cell(self, name: str) -> OneCell:
        for c in self.cells1:
            if c.name == name:
                return c
        raise KeyError(name)

    def two_cell(self, name: str) -> TwoCell:
        for c in self.cells2:
            if c.name == name:
                return c
        raise KeyError(name)

    def three_cell(self, name: str) -> ThreeCell:
        for c in self.cells3:
            if c.name == name:
                return c
        raise KeyError(name)

    def rule_boundaries(self) -> dict[str, tuple[Diagram, Diagram]]:
        return {c.name: (c.src, c.tgt) for c in self.cells3}

    def counts(self) -> tuple[int, int, int, int]:
        n3 = len(self.cells3) if self.dimension == 3 else len(self.rules2)
        return (len(self.cells0), len(self.cells1), len(self.cells2), n3)

    def word_endpoints(self, w: TypedWord) -> tuple[str, str]:
        if w.is_empty():
            if w.at is None:
                raise PolygraphError("empty word without 0-cell annotation")
            return (w.at, w.at)
        first = self.one_cell(w.cells[0])
        last = self.one_cell(w.cells[-1])
        return (first.src, last.tgt)


# ---------------------------------------------------------------------------
# Lexer / parser

_TOKEN = re.compile(r"(?m)(?P<ws>\s+|#[^\n]*)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
                    r"|(?P<punct>->|=>|[{}();:*])")


def _tokenize(text: str):
    toks = []
    pos, line, linestart = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolygraphError(f"unexpected character {text[pos]!r}",
                                 line, pos - linestart + 1)
        if m.lastgroup != "ws":
            toks.append((m.group(0), line, m.start() - linestart + 1))
        line += m.group(0).count("\n")
        if "\n" in m.group(0):
            linestart = m.start() + m.group(0).rindex("\n") + 1
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def next(self):
        if self.i >= len(self.toks):
            raise PolygraphError("unexpected end of input")
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, what):
        tok, line, col = self.next()
        if tok != what:
            raise PolygraphError(f"expected {what!r}, found {tok!r}", line, col)
        return tok

    def ident(self):
        tok, line, col = self.next()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", tok) or tok in ("empty", "id"):
            raise PolygraphError(f"expected identifier, found {tok!r}", line, col)
        return tok


def _parse_word(p: _Parser) -> TypedWord:
    if p.peek() == "empty":
        p.next()
        p.expect("(")
        at = p.ident()
        p.expect(")")
        return TypedWord((), at)
    cells = [p.ident()]
    while p.peek() not in ("=>", ";", ")", None) and re.fullmatch(
            r"[A-Za-z_][A-Za-z_0-9]*", p.peek() or ""):
        cells.append(p.ident())
    return TypedWord(tuple(cells))


def _parse_dexpr(p: _Parser, poly: Polygraph):
    tok = p.peek()
    if tok == "(":
        p.next()
        left = _parse_dexpr(p, poly)
        op, line, col = p.next()
        if op not in ("*", ";"):
            raise PolygraphError(f"expected '*' or ';', found {op!r}", line, col)
        right = _parse_dexpr(p, poly)
        p.expect(")")
        try:
            if op == "*":
                return dg.compose_h(poly.sig, left, right)
            return dg.compose_v(poly.sig, left, right)
        except dg.DiagramError as e:
            raise PolygraphError(str(e), line, col)
    if tok == "id":
        p.next()
        p.expect("(")
        w = _parse_word(p)
        p.expect(")")
        at = w.at
        if not w.is_empty():
            at = poly.one_cell(w.cells[0]).src if _has_cell1(poly, w.cells[0]) else None
        return dg.identity(w.cells, at)
    tok, line, col = p.next()
    try:
        cell = poly.two_cell(tok)
    except KeyError:
        raise PolygraphError(f"unknown 2-cell {tok!r} in diagram expression", line, col)
    at = cell.src.at
    if not cell.src.is_empty() and _has_cell1(poly, cell.src.cells[0]):
        at = poly.one_cell(cell.src.cells[0]).src
    return dg.generator(poly.sig, tok, at)


def _has_cell1(poly, name):
    return any(c.name == name for c in poly.cells1)


def parse_polygraph(text: str) -> Polygraph:
    p = _Parser(text)
    p.expect("polygraph")
    name = p.ident()
    p.expect("{")
    poly = Polygraph(name=name)
    pending3 = []  # 3-cell declarations are elaborated after all 2-cells are known
    while p.peek() != "}":
        kw, line, col = p.next()
        if kw == "cell0":
            poly.cells0 += (p.ident(),)
            p.expect(";")
        elif kw == "cell1":
            n = p.ident()
            p.expect(":")
            s = p.ident()
            p.expect("->")
            t = p.ident()
            p.expect(";")
            poly.cells1 += (OneCell(n, s, t),)
        elif kw == "cell2":
            n = p.ident()
            p.expect(":")
            s = _parse_word(p)
            p.expect("=>")
            t = _parse_word(p)
            p.expect(";")
            poly.cells2 += (TwoCell(n, s, t),)
            poly._sig = None
        elif kw == "cell3":
            n = p.ident()
            p.expect(":")
            mark = p.i
            _skip_dexpr(p)
            p.expect("=>")
            mark2 = p.i
            _skip_dexpr(p)
            p.expect(";")
            pending3.append((n, mark, mark2, line, col))
        elif kw == "rule":
            n = p.ident()
            p.expect(":")
            s = _parse_word(p)
            p.expect("=>")
            t = _parse_word(p)
            p.expect(";")
            poly.rules2 += (WordRule(n, s, t),)
            poly.dimension = 2
        else:
            raise PolygraphError(f"unknown declaration {kw!r}", line, col)
    p.expect("}")
    if poly.rules2 and pending3:
        raise PolygraphError("polygraph mixes 'rule' (2-polygraph mode) and 'cell3'")
    for (n, mark, mark2, line, col) in pending3:
        sub = _Parser.__new__(_Parser)
        sub.toks, sub.i = p.toks, mark
        src = dg.canonicalize(poly.sig, _parse_dexpr(sub, poly))
        sub.i = mark2
        tgt = dg.canonicalize(poly.sig, _parse_dexpr(sub, poly))
        if src.source != tgt.source or dg.target(poly.sig, src) != dg.target(poly.sig, tgt):
            raise PolygraphError(
                f"3-cell {n!r} violates globularity: boundary words differ", line, col)
        poly.cells3 += (ThreeCell(n, src, tgt),)
    report = validate(poly)
    if report:
        raise PolygraphError("; ".join(report))
    return poly


def _skip_dexpr(p: _Parser):
    depth = 0
    while True:
        tok = p.peek()
        if tok is None:
            raise PolygraphError("unexpected end of input in diagram expression")
        if depth == 0 and tok in ("=>", ";"):
            return
        p.next()
        if tok == "(":
            depth += 1
        elif tok == ")":
            depth -= 1
            if depth == 0 and p.peek() in ("=>", ";"):
                return


def validate(poly: Polygraph) -> list[str]:
    """All invariant violations; valid polygraphs give an empty list."""
    out = []
    for dim, names in (("0", poly.cells0),
                       ("1", [c.name for c in poly.cells1]),
                       ("2", [c.name for c in poly.cells2]),
                       ("3", [c.name for c in poly.cells3] +
                        [r.name for r in poly.rules2])):
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            out.append(f"duplicate {dim}-cell names: {sorted(dup)}")
    zero = set(poly.cells0)
    for c in poly.cells1:
        for e in (c.src, c.tgt):
            if e not in zero:
                out.append(f"1-cell {c.name}: unknown 0-cell {e!r}")

    def check_word(w: TypedWord, owner: str):
        if w.is_empty():
            if w.at not in zero:
                out.append(f"{owner}: empty word at unknown 0-cell {w.at!r}")
            return
        prev_t = None
        for nm in w.cells:
            try:
                c = poly.one_cell(nm)
            except KeyError:
                out.append(f"{owner}: unknown 1-cell {nm!r}")
                return
            if prev_t is not None and c.src != prev_t:
                out.append(f"{owner}: word not composable at {nm!r} "
                           f"({prev_t} vs {c.src})")
            prev_t = c.tgt

    for c in poly.cells2:
        check_word(c.src, f"2-cell {c.name}")
        check_word(c.tgt, f"2-cell {c.name}")
        try:
            if poly.word_endpoints(c.src) != poly.word_endpoints(c.tgt):
                out.append(f"2-cell {c.name}: source and target words have "
                           f"different endpoints")
        except (PolygraphError, KeyError):
            pass
    for r in poly.rules2:
        check_word(r.lhs, f"rule {r.name}")
        check_word(r.rhs, f"rule {r.name}")
        if not r.lhs.cells:
            out.append(f"rule {r.name}: empty left-hand side")
        else:
            try:
                if poly.word_endpoints(r.lhs) != poly.word_endpoints(r.rhs):
                    out.append(f"rule {r.name}: endpoint mismatch")
            except (PolygraphError, KeyError):
                pass
    for c in poly.cells3:
        for side, d in (("source", c.src), ("target", c.tgt)):
            if not dg.is_wellformed(poly.sig, d):
                out.append(f"3-cell {c.name}: {side} diagram ill-formed")
        if dg.is_wellformed(poly.sig, c.src) and dg.is_wellformed(poly.sig, c.tgt):
            if (c.src.source != c.tgt.source
                    or dg.target(poly.sig, c.src) != dg.target(poly.sig, c.tgt)):
                out.append(f"3-cell {c.name}: globularity violated")
    return out


# ---------------------------------------------------------------------------
# Serialization

def _word_text(w: TypedWord) -> str:
    if w.is_empty():
        return f"empty({w.at})"
    return " ".join(w.cells)


def _dexpr_text(poly: Polygraph, d: Diagram) -> str:
    if not d.slices:
        if d.source:
            return f"id({' '.join(d.source)})"
        return f"id(empty({d.at}))"
    parts = []
    word = d.source
    for (l, g, r) in d.slices:
        layer = g
        if l:
            layer = f"(id({' '.join(l)}) * {layer})"
        if r:
            layer = f"({layer} * id({' '.join(r)}))"
        parts.append(layer)
        word = l + poly.sig.tgt(g) + r
    expr = parts[0]
    for nxt in parts[1:]:
        expr = f"({expr} ; {nxt})"
    return expr


def serialize_polygraph(poly: Polygraph) -> str:
    lines = [f"polygraph {poly.name} {{"]
    for n in poly.cells0:
        lines.append(f"  cell0 {n};")
    for c in poly.cells1:
        lines.append(f"  cell1 {c.name} : {c.src} -> {c.tgt};")
    for c in poly.cells2:
        lines.append(f"  cell2 {c.name} : {_word_text(c.src)} => {_word_text(c.tgt)};")
    for r in poly.rules2:
        lines.append(f"  rule {r.name} : {_word_text(r.lhs)} => {_word_text(r.rhs)};")
    for c in poly.cells3:
        lines.append(f"  cell3 {c.name} : {_dexpr_text(poly, c.src)} => "
                     f"{_dexpr_text(poly, c.tgt)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_dexpr_text(poly: Polygraph, text: str) -> Diagram:
    """Parse a standalone diagram expression over the polygraph's 2-cells."""
    p = _Parser(text)
    d = _parse_dexpr(p, poly)
    if p.peek() is not None:
        tok, line, col = p.next()
        raise PolygraphError(f"trailing input {tok!r}", line, col)
    return dg.canonicalize(poly.sig, d)
