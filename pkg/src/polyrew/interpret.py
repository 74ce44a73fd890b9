"""Functorial interpretations and derivations used as termination measures.

An interpretation assigns to every 1-cell a natural-number coordinate (or
nothing, when trivial), to every 2-cell a monotone affine map, covariantly
for X and contravariantly for Y, and a derivation value d(gen) read at the
X-values flowing from above and the Y-values flowing from below.  Because
all maps are affine with nonnegative coefficients over upward-closed boxes,
comparisons over all admissible inputs reduce to coefficient dominance plus
one corner evaluation, which is what the certificate checker decides.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import diagram as dg
from .cells import Polygraph, PolygraphError
from .diagram import Diagram


class InterpError(ValueError):
    pass


@dataclass(frozen=True)
class Affine:
    """const + sum(coeffs[i] * var_i) over a fixed variable space."""
    coeffs: tuple[int, ...]
    const: int = 0

    @staticmethod
    def variable(i: int, nvars: int) -> "Affine":
        return Affine(tuple(1 if j == i else 0 for j in range(nvars)), 0)

    @staticmethod
    def constant(c: int, nvars: int) -> "Affine":
        return Affine((0,) * nvars, c)

    def __add__(self, other: "Affine") -> "Affine":
        return Affine(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                      self.const + other.const)

    def __sub__(self, other: "Affine") -> "Affine":
        return Affine(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)),
                      self.const - other.const)

    def scale(self, k: int) -> "Affine":
        return Affine(tuple(k * a for a in self.coeffs), k * self.const)

    def eval(self, args: list[int]) -> int:
        return self.const + sum(c * a for c, a in zip(self.coeffs, args))

    def subst(self, args: list["Affine"]) -> "Affine":
        out = Affine.constant(self.const, args[0].nvars() if args else 0)
        if not args:
            return Affine((), self.const)
        for c, a in zip(self.coeffs, args):
            if c:
                out = out + a.scale(c)
        return out

    def nvars(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return self.const == 0 and all(c == 0 for c in self.coeffs)


@dataclass(frozen=True)
class GExpr:
    """Group-valued derivation expression: an affine integer part plus
    integer combinations of free-abelian basis elements with affine indices."""
    affine: Affine
    basis: tuple[tuple[int, Affine], ...] = ()

    def has_basis(self) -> bool:
        return bool(self.basis)


@dataclass
class Interpretation:
    name: str
    group: str  # "Z" | "FreeAbelian"
    x_trivial: bool
    x_min: dict[str, int]               # per 1-cell (arity 1 each unless trivial)
    x_maps: dict[str, tuple[Affine, ...]]  # per 2-cell, inputs = source coords
    y_trivial: bool
    y_min: dict[str, int]
    y_maps: dict[str, tuple[Affine, ...]]  # per 2-cell, inputs = target coords
    d_exprs: dict[str, GExpr]           # per 2-cell, vars = x-coords then y-coords

    def x_arity(self, word) -> int:
        return 0 if self.x_trivial else len(word)

    def y_arity(self, word) -> int:
        return 0 if self.y_trivial else len(word)

    def x_mins(self, word) -> list[int]:
        return [] if self.x_trivial else [self.x_min[c] for c in word]

    def y_mins(self, word) -> list[int]:
        return [] if self.y_trivial else [self.y_min[c] for c in word]


# ---------------------------------------------------------------------------
# Parsing

_TOK = re.compile(r"(?m)(?P<ws>\s+|#[^\n]*)|(?P<num>\d+)"
                  r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
                  r"|(?P<punct>[{}();:,=+\-*|])")


def _lex(text: str):
    toks, pos = [], 0
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m:
            raise InterpError(f"unexpected character {text[pos]!r}")
        if m.lastgroup != "ws":
            toks.append(m.group(0))
        pos = m.end()
    return toks


class _P:
    def __init__(self, text):
        self.t = _lex(text)
        self.i = 0

    def peek(self):
        return self.t[self.i] if self.i < len(self.t) else None

    def next(self):
        if self.i >= len(self.t):
            raise InterpError("unexpected end of input")
        self.i += 1
        return self.t[self.i - 1]

    def expect(self, w):
        g = self.next()
        if g != w:
            raise InterpError(f"expected {w!r}, found {g!r}")

    def ident(self):
        g = self.next()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", g):
            raise InterpError(f"expected identifier, found {g!r}")
        return g

    def nat(self):
        g = self.next()
        if not g.isdigit():
            raise InterpError(f"expected number, found {g!r}")
        return int(g)


def _parse_affine(p: _P, vars_: list[str], signed: bool = False) -> Affine:
    n = len(vars_)
    acc = Affine.constant(0, n)
    sign = 1
    if p.peek() == "-":
        p.next()
        sign = -1
    while True:
        acc = acc + _parse_term(p, vars_).scale(sign)
        if p.peek() in ("+", "-") :
            sign = 1 if p.next() == "+" else -1
            if sign == -1 and not signed:
                raise InterpError("negative coefficients not allowed here")
            continue
        return acc
    return acc


def _parse_term(p: _P, vars_: list[str]) -> Affine:
    n = len(vars_)
    g = p.next()
    if g.isdigit():
        k = int(g)
        if p.peek() == "*":
            p.next()
            v = p.ident()
            if v not in vars_:
                raise InterpError(f"unknown variable {v!r}")
            return Affine.variable(vars_.index(v), n).scale(k)
        return Affine.constant(k, n)
    if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", g):
        raise InterpError(f"expected affine term, found {g!r}")
    if g not in vars_:
        raise InterpError(f"unknown variable {g!r}")
    return Affine.variable(vars_.index(g), n)


def _parse_vars(p: _P, closers=(")",)) -> list[str]:
    out = []
    while p.peek() not in closers:
        out.append(p.ident())
        if p.peek() == ",":
            p.next()
    return out


def _parse_gexpr(p: _P, vars_: list[str]) -> GExpr:
    n = len(vars_)
    affine = Affine.constant(0, n)
    basis: list[tuple[int, Affine]] = []
    sign = 1
    if p.peek() == "-":
        p.next()
        sign = -1
    while True:
        if p.peek() == "basis":
            p.next()
            p.expect("(")
            idx = _parse_affine(p, vars_, signed=True)
            p.expect(")")
            basis.append((sign, idx))
        else:
            affine = affine + _parse_term(p, vars_).scale(sign)
        if p.peek() in ("+", "-"):
            sign = 1 if p.next() == "+" else -1
            continue
        return GExpr(affine, tuple(basis))


def parse_interpretations(text: str, poly: Polygraph) -> list[Interpretation]:
    p = _P(text)
    out = []
    while p.peek() is not None:
        out.append(_parse_one(p, poly))
    if not out:
        raise InterpError("no interpretation block found")
    return out


def parse_interpretation(text: str, poly: Polygraph) -> Interpretation:
    interps = parse_interpretations(text, poly)
    if len(interps) != 1:
        raise InterpError(f"expected one interpretation, found {len(interps)}")
    return interps[0]


def _parse_side(p: _P, poly: Polygraph, contravariant: bool):
    trivial, mins, maps = True, {}, {}
    if p.peek() == "trivial":
        p.next()
        p.expect(";")
    else:
        trivial = False
        p.expect("{")
        while p.peek() != "}":
            name = p.ident()
            if any(c.name == name for c in poly.cells1):
                p.expect(":")
                p.expect("nat")
                p.expect("(")
                p.expect("min")
                p.expect("=")
                mins[name] = p.nat()
                p.expect(")")
                p.expect(";")
                continue
            cell = poly.two_cell(name)  # raises KeyError on unknown names
            p.expect("(")
            vars_ = _parse_vars(p)
            p.expect(")")
            p.expect("=")
            p.expect("(")
            forms = []
            while p.peek() != ")":
                forms.append(_parse_affine(p, vars_))
                if p.peek() == ",":
                    p.next()
            p.expect(")")
            p.expect(";")
            src, tgt = cell.src.cells, cell.tgt.cells
            n_in, n_out = (len(tgt), len(src)) if contravariant else (len(src), len(tgt))
            if len(vars_) != n_in:
                raise InterpError(f"{name}: arity mismatch, expected {n_in} "
                                  f"input variables, got {len(vars_)}")
            if len(forms) != n_out:
                raise InterpError(f"{name}: expected {n_out} output coordinates, "
                                  f"got {len(forms)}")
            maps[name] = tuple(forms)
        p.expect("}")
    if not trivial:
        for c in poly.cells1:
            if c.name not in mins:
                raise InterpError(f"missing wire declaration for 1-cell {c.name!r}")
        for c in poly.cells2:
            if c.name not in maps:
                side = (c.tgt, c.src) if contravariant else (c.src, c.tgt)
                if len(side[1].cells) == 0:
                    maps[c.name] = ()
                else:
                    raise InterpError(f"missing map for 2-cell {c.name!r}")
    return trivial, mins, maps


def _parse_one(p: _P, poly: Polygraph) -> Interpretation:
    p.expect("interpretation")
    name = p.ident()
    p.expect("{")
    p.expect("group")
    group = p.next()
    if group not in ("Z", "FreeAbelian"):
        raise InterpError(f"unknown group {group!r}")
    p.expect(";")
    p.expect("X")
    x_trivial, x_min, x_maps = _parse_side(p, poly, contravariant=False)
    p.expect("Y")
    y_trivial, y_min, y_maps = _parse_side(p, poly, contravariant=True)
    p.expect("d")
    p.expect("{")
    d_exprs = {}
    while p.peek() != "}":
        cname = p.ident()
        cell = poly.two_cell(cname)
        p.expect("(")
        xvars = _parse_vars(p, closers=("|",))
        p.expect("|")
        yvars = _parse_vars(p, closers=(")",))
        p.expect(")")
        p.expect("=")
        nx = 0 if x_trivial else len(cell.src.cells)
        ny = 0 if y_trivial else len(cell.tgt.cells)
        if len(xvars) != nx or len(yvars) != ny:
            raise InterpError(f"d({cname}): expected {nx} X-variables and "
                              f"{ny} Y-variables")
        d_exprs[cname] = _parse_gexpr(p, xvars + yvars)
        p.expect(";")
    p.expect("}")
    p.expect("}")
    for c in poly.cells2:
        if c.name not in d_exprs:
            raise InterpError(f"missing d value for 2-cell {c.name!r}")
    return Interpretation(name, group, x_trivial, x_min, x_maps,
                          y_trivial, y_min, y_maps, d_exprs)


def load_certificate(text: str) -> list[str]:
    """A certificate file is an ordered list of interpretation names."""
    names = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            names.append(line)
    return names


# ---------------------------------------------------------------------------
# Evaluation.  Values may be integers (numeric) or Affine forms (symbolic);
# both support the same arithmetic through `_apply`.

def _apply(forms: tuple[Affine, ...], args: list):
    if args and isinstance(args[0], Affine):
        return [f.subst(args) for f in forms]
    if args:
        return [f.eval(args) for f in forms]
    return [(f.const if not isinstance(f, int) else f) for f in forms] \
        if not forms or not isinstance(forms[0], Affine) else \
        [Affine((), f.const) for f in forms]


def _x_apply(interp, forms, args, nvars_sym=None):
    if nvars_sym is None:
        return [f.eval(args) for f in forms]
    if args:
        return [f.subst(args) for f in forms]
    return [Affine((0,) * nvars_sym, f.const) for f in forms]


def _x_levels(interp: Interpretation, poly: Polygraph, d: Diagram, seed, nvars_sym=None):
    """X-values per level, folding slices downward.  seed is the list of
    values for the source word (ints or Affine forms)."""
    if interp.x_trivial:
        return [[] for _ in range(len(d.slices) + 1)]
    vals = list(seed)
    out = [list(vals)]
    for (l, g, r) in d.slices:
        al, asrc = len(l), len(poly.sig.src(g))
        mid = vals[al:al + asrc]
        res = _x_apply(interp, interp.x_maps[g], mid, nvars_sym)
        vals = vals[:al] + res + vals[al + asrc:]
        out.append(list(vals))
    return out


def _y_levels(interp: Interpretation, poly: Polygraph, d: Diagram, seed, nvars_sym=None):
    """Y-values per level, folding slices upward from the target word."""
    if interp.y_trivial:
        return [[] for _ in range(len(d.slices) + 1)]
    vals = list(seed)
    out = [list(vals)]
    for (l, g, r) in reversed(d.slices):
        al, atgt = len(l), len(poly.sig.tgt(g))
        mid = vals[al:al + atgt]
        res = _x_apply(interp, interp.y_maps[g], mid, nvars_sym)
        vals = vals[:al] + res + vals[al + atgt:]
        out.append(list(vals))
    out.reverse()
    return out


def _check_box(interp, word, vals, mins):
    if len(vals) != len(mins):
        raise InterpError(f"arity mismatch: expected {len(mins)} values "
                          f"for word {word}, got {len(vals)}")
    for v, m in zip(vals, mins):
        if v < m:
            raise InterpError(f"input {v} below per-coordinate minimum {m}")


def eval_X(interp: Interpretation, poly: Polygraph, d: Diagram, inputs) -> tuple:
    inputs = list(inputs)
    _check_box(interp, d.source, inputs, interp.x_mins(d.source))
    return tuple(_x_levels(interp, poly, d, inputs)[-1])


def eval_Y(interp: Interpretation, poly: Polygraph, d: Diagram, inputs) -> tuple:
    inputs = list(inputs)
    tgt = dg.target(poly.sig, d)
    _check_box(interp, tgt, inputs, interp.y_mins(tgt))
    return tuple(_y_levels(interp, poly, d, inputs)[0])


@dataclass(frozen=True)
class GVal:
    const: int = 0
    basis: tuple[tuple[int, int], ...] = ()  # sorted (index, coeff)

    def __add__(self, other):
        d = dict(self.basis)
        for k, c in other.basis:
            d[k] = d.get(k, 0) + c
        items = tuple(sorted((k, c) for k, c in d.items() if c))
        return GVal(self.const + other.const, items)


def eval_d(interp: Interpretation, poly: Polygraph, d: Diagram, x_inputs, y_inputs):
    """Value of the derivation on d at the given boundary inputs.

    Returns an int when the group is Z, a GVal for the free abelian group.
    """
    x_inputs, y_inputs = list(x_inputs), list(y_inputs)
    _check_box(interp, d.source, x_inputs, interp.x_mins(d.source))
    tgt = dg.target(poly.sig, d)
    _check_box(interp, tgt, y_inputs, interp.y_mins(tgt))
    xs = _x_levels(interp, poly, d, x_inputs)
    ys = _y_levels(interp, poly, d, y_inputs)
    total = GVal() if interp.group == "FreeAbelian" else 0
    for i, (l, g, r) in enumerate(d.slices):
        xargs = [] if interp.x_trivial else xs[i][len(l):len(l) + len(poly.sig.src(g))]
        yargs = [] if interp.y_trivial else ys[i + 1][len(l):len(l) + len(poly.sig.tgt(g))]
        expr = interp.d_exprs[g]
        args = xargs + yargs
        if interp.group == "FreeAbelian":
            val = GVal(expr.affine.eval(args))
            for coef, idx in expr.basis:
                val = val + GVal(0, ((idx.eval(args), coef),))
            total = total + val
        else:
            if expr.has_basis():
                raise InterpError(f"basis(.) value for {g} requires group FreeAbelian")
            total = total + expr.affine.eval(args)
    return total


def _d_symbolic(interp: Interpretation, poly: Polygraph, d: Diagram) -> Affine:
    """d(d) as an affine form over source X-coords followed by target Y-coords."""
    tgt = dg.target(poly.sig, d)
    nx = interp.x_arity(d.source)
    ny = interp.y_arity(tgt)
    n = nx + ny
    xseed = [Affine.variable(i, n) for i in range(nx)]
    yseed = [Affine.variable(nx + i, n) for i in range(ny)]
    xs = _x_levels(interp, poly, d, xseed, nvars_sym=n)
    ys = _y_levels(interp, poly, d, yseed, nvars_sym=n)
    total = Affine.constant(0, n)
    for i, (l, g, r) in enumerate(d.slices):
        xargs = [] if interp.x_trivial else xs[i][len(l):len(l) + len(poly.sig.src(g))]
        yargs = [] if interp.y_trivial else ys[i + 1][len(l):len(l) + len(poly.sig.tgt(g))]
        expr = interp.d_exprs[g]
        if expr.has_basis():
            raise InterpError(f"basis(.) value for {g} cannot be ordered")
        args = xargs + yargs
        total = total + (expr.affine.subst(args) if args
                         else Affine.constant(expr.affine.const, n))
    return total


def _x_symbolic(interp, poly, d: Diagram) -> tuple[Affine, ...]:
    n = interp.x_arity(d.source)
    seed = [Affine.variable(i, n) for i in range(n)]
    return tuple(_x_levels(interp, poly, d, seed, nvars_sym=n)[-1])


def _y_symbolic(interp, poly, d: Diagram) -> tuple[Affine, ...]:
    tgt = dg.target(poly.sig, d)
    n = interp.y_arity(tgt)
    seed = [Affine.variable(i, n) for i in range(n)]
    return tuple(_y_levels(interp, poly, d, seed, nvars_sym=n)[0])


def _dominates(diff: Affine, mins: list[int], margin: int) -> bool:
    """diff >= margin over the whole admissible box."""
    if any(c < 0 for c in diff.coeffs):
        return False
    return diff.eval(mins) >= margin


# ---------------------------------------------------------------------------
# Certificates

@dataclass
class RuleLevelStatus:
    rule: str
    level: str
    x_ge: bool
    y_ge: bool
    x_eq: bool
    y_eq: bool
    d_strict: bool
    d_equal: bool
    status: str  # "strict" | "equal" | "fails"
    detail: str = ""


@dataclass
class CertificateReport:
    verdict: str  # "terminating" | "rejected"
    statuses: list[RuleLevelStatus] = field(default_factory=list)
    strict_level: dict[str, str] = field(default_factory=dict)
    reasons: list[str] = field(default_factory=list)

    def to_json(self):
        return {
            "verdict": self.verdict,
            "levels": [{
                "rule": s.rule, "level": s.level, "status": s.status,
                "x_ge": s.x_ge, "y_ge": s.y_ge,
                "d_strict": s.d_strict, "d_equal": s.d_equal,
                "detail": s.detail,
            } for s in self.statuses],
            "strict_level": self.strict_level,
            "reasons": self.reasons,
        }


def _rule_level_status(interp: Interpretation, poly: Polygraph, rule) -> RuleLevelStatus:
    src, tgt = rule.src, rule.tgt
    xs, xt = _x_symbolic(interp, poly, src), _x_symbolic(interp, poly, tgt)
    ys_, yt = _y_symbolic(interp, poly, src), _y_symbolic(interp, poly, tgt)
    xmins = interp.x_mins(dg.target(poly.sig, src))
    ymins = interp.y_mins(src.source)

    def cmp_maps(a, b, mins):
        ge = all(_dominates(f - g, mins, 0) for f, g in zip(a, b))
        eq = all((f - g).is_zero() for f, g in zip(a, b))
        return ge, eq

    # output coordinates of X live over the SOURCE coordinates box
    x_ge, x_eq = cmp_maps(xs, xt, interp.x_mins(src.source))
    y_ge, y_eq = cmp_maps(ys_, yt, interp.y_mins(dg.target(poly.sig, src)))
    ds = _d_symbolic(interp, poly, src)
    dt = _d_symbolic(interp, poly, tgt)
    box = interp.x_mins(src.source) + interp.y_mins(dg.target(poly.sig, src))
    diff = ds - dt
    d_strict = _dominates(diff, box, 1)
    d_equal = diff.is_zero()
    if not (x_ge and y_ge):
        status, detail = "fails", "X/Y monotonicity of the rule fails coordinatewise"
    elif d_strict:
        status, detail = "strict", ""
    elif d_equal:
        status, detail = "equal", ""
    else:
        status, detail = "fails", "d neither strictly decreasing nor constant"
    return RuleLevelStatus(rule.name, interp.name, x_ge, y_ge, x_eq, y_eq,
                           d_strict, d_equal, status, detail)


def check_certificate(poly: Polygraph, levels: list[Interpretation]) -> CertificateReport:
    rep = CertificateReport(verdict="terminating")
    if poly.dimension != 3:
        rep.verdict = "rejected"
        rep.reasons.append("certificates apply to 3-polygraphs")
        return rep
    if not levels:
        rep.verdict = "rejected"
        rep.reasons.append("empty certificate")
        return rep
    for interp in levels:
        for g, expr in interp.d_exprs.items():
            if expr.has_basis():
                rep.verdict = "rejected"
                rep.reasons.append(
                    f"level {interp.name}: basis(.) values cannot be used for "
                    f"ordering (free abelian comparisons are not decided)")
                return rep
            cell = poly.two_cell(g)
            box = interp.x_mins(cell.src.cells) + interp.y_mins(cell.tgt.cells)
            if not _dominates(expr.affine, box, 0):
                rep.verdict = "rejected"
                rep.reasons.append(f"level {interp.name}: d({g}) is not nonnegative "
                                   f"over the admissible box")
        for g, forms in list(interp.x_maps.items()) + list(interp.y_maps.items()):
            for f in forms:
                if any(c < 0 for c in f.coeffs):
                    rep.verdict = "rejected"
                    rep.reasons.append(f"level {interp.name}: map for {g} has a "
                                       f"negative coefficient")
    if rep.verdict == "rejected":
        return rep

    table: dict[str, list[RuleLevelStatus]] = {}
    for rule in poly.cells3:
        table[rule.name] = []
        for interp in levels:
            st = _rule_level_status(interp, poly, rule)
            table[rule.name].append(st)
            rep.statuses.append(st)
    for rule in poly.cells3:
        sts = table[rule.name]
        found = None
        for k, st in enumerate(sts):
            if st.status == "strict" and all(s.status == "equal" for s in sts[:k]):
                found = st.level
                break
        if found is None:
            rep.verdict = "rejected"
            chain = ", ".join(f"{s.level}:{s.status}" for s in sts)
            rep.reasons.append(f"rule {rule.name}: no level is strict with all "
                               f"earlier levels equal ({chain})")
        else:
            rep.strict_level[rule.name] = found
    return rep


def measure_vector(poly: Polygraph, levels: list[Interpretation],
                   d: Diagram, point_scale: int = 0) -> tuple:
    """Lexicographic measure of a diagram: per level, d evaluated at the
    corner of the admissible box shifted by point_scale."""
    out = []
    tgt = dg.target(poly.sig, d)
    for interp in levels:
        xi = [m + point_scale for m in interp.x_mins(d.source)]
        yi = [m + point_scale for m in interp.y_mins(tgt)]
        out.append(eval_d(interp, poly, d, xi, yi))
    return tuple(out)


# ---------------------------------------------------------------------------
# Derivation-based obstruction on homotopy bases

def trace_value(trace_rules_signed, dvals: dict[str, int]) -> int:
    return sum(sign * dvals.get(rule, 0) for rule, sign in trace_rules_signed)


def derivation_obstruction(candidates, target, dvals: dict[str, int]):
    """candidates/target are homotopy generators exposing signed rule lists
    for their two traces.  Returns (verdict, (target_lhs, target_rhs))."""
    for gen in candidates:
        va = trace_value(gen.lhs_signed(), dvals)
        vb = trace_value(gen.rhs_signed(), dvals)
        if va != vb:
            return "no_information", (va, vb)
    va = trace_value(target.lhs_signed(), dvals)
    vb = trace_value(target.rhs_signed(), dvals)
    if va != vb:
        return "obstructed", (va, vb)
    return "no_information", (va, vb)
