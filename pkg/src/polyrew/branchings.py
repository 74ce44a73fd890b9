"""Critical branchings of a 3-polygraph: enumeration, classification,
indexed families and their normal instances, confluence, homotopy bases,
and the finite-derivation-type report.

Enumeration is a bounded peak search: a minimal branching whose two redexes
share at least one slice has size at most |sa|+|sb|-1 and width at most the
sum of the rule-source widths, so scanning all canonical diagrams within
those bounds and keeping the minimal non-trivial redex pairs is complete
for concrete branchings and for the identity instances of indexed families.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from . import diagram as dg
from . import rewrite as rw
from .cells import Polygraph
from .diagram import Diagram, Signature, WhiskerContext
from .interpret import Interpretation, check_certificate
from .rewrite import FWD, RewriteStep, Trace


# ---------------------------------------------------------------------------
# Diagram generation

def composable_words(poly: Polygraph, max_len: int):
    """All composable 1-cell words up to max_len, plus one empty word per
    0-cell; yields (word, at)."""
    for z in poly.cells0:
        yield (), z
    frontier = [((c.name,), c.src, c.tgt) for c in poly.cells1]
    while frontier:
        nxt = []
        for word, a, b in frontier:
            if len(word) > max_len:
                continue
            yield word, a
            for c in poly.cells1:
                if c.src == b and len(word) < max_len:
                    nxt.append((word + (c.name,), a, c.tgt))
        frontier = nxt


def _slice_options(poly: Polygraph, word, at):
    """All slices applicable to a word (0-cell typing included)."""
    regions = [at]
    for nm in word:
        regions.append(poly.one_cell(nm).tgt)
    out = []
    for g in poly.sig.gens():
        cell = poly.two_cell(g)
        s = cell.src.cells
        k = len(s)
        for off in range(len(word) - k + 1):
            if word[off:off + k] != s:
                continue
            if k == 0 and cell.src.at is not None and regions[off] != cell.src.at:
                continue
            out.append((word[:off], g, word[off + k:]))
    return out


def gen_diagrams(poly: Polygraph, source, at, max_size: int, max_width: int,
                 prune=None, gen_budget=None):
    """All canonical diagrams from `source` with at most max_size slices and
    every level word at most max_width wide.  Canonical lists have canonical
    prefixes, so generation extends canonical prefixes only.

    prune(d) -> True cuts the whole subtree under d (d itself not yielded).
    gen_budget: optional {gen: max occurrences} cap.
    """
    sig = poly.sig
    source = tuple(source)
    if len(source) > max_width:
        return

    def rec(d: Diagram, word, counts):
        if prune is not None and prune(d):
            return
        yield d
        if d.size() >= max_size:
            return
        for sl in _slice_options(poly, word, at):
            g = sl[1]
            if gen_budget is not None and counts.get(g, 0) + 1 > gen_budget.get(g, 0):
                continue
            new_word = sl[0] + sig.tgt(g) + sl[2]
            if len(new_word) > max_width:
                continue
            new_slices = d.slices + (sl,)
            if dg._canon_slices(sig, source, new_slices) != new_slices:
                continue
            c2 = dict(counts)
            c2[g] = c2.get(g, 0) + 1
            yield from rec(Diagram(source, new_slices, at), new_word, c2)

    yield from rec(Diagram(source, (), at), source, {})


# ---------------------------------------------------------------------------
# Branchings

@dataclass(frozen=True)
class Branching:
    source: Diagram
    step_a: RewriteStep
    step_b: RewriteStep

    def key(self) -> tuple:
        return (self.source.source, self.source.slices, self.source.at,
                frozenset({self.step_a.key(), self.step_b.key()}))

    def rules(self) -> tuple[str, str]:
        return (self.step_a.rule, self.step_b.rule)


@dataclass(frozen=True)
class HoleSpec:
    anchor_left: tuple[str, ...]   # wires the hole shares with the first pattern
    anchor_right: tuple[str, ...]  # wires the hole shares with the second pattern
    free_source: tuple[int, int | None] = (0, None)
    free_target: tuple[int, int | None] = (0, None)


@dataclass(frozen=True)
class BranchingClass:
    tag: str  # trivial | inclusion | regular | right_indexed | left_indexed | multi_indexed
    subcase: int | None = None
    orientation: str | None = None  # corner | shared_top | shared_bottom
    holes: tuple[HoleSpec, ...] = ()


@dataclass(frozen=True)
class IndexedTemplate:
    rule_a: str
    rule_b: str
    f: Diagram          # upper remainder of the first rule source
    h: Diagram          # shared cell
    g: Diagram          # lower remainder of the second rule source
    u0: tuple[str, ...]  # wires right of h inside the first source
    v0: tuple[str, ...]  # wires right of h inside the second source
    side: str           # "right" (the only side the desk fixtures exercise)
    hole: HoleSpec

    def key(self) -> tuple:
        return (self.rule_a, self.rule_b, self.f.slices, self.h.slices,
                self.g.slices, self.u0, self.v0, self.side)


def _step_order_key(poly: Polygraph, step: RewriteStep) -> tuple:
    decl = [c.name for c in poly.cells3].index(step.rule)
    return (len(step.ctx.top.slices), len(step.ctx.left), decl,
            step.ctx.key())


def make_branching(poly: Polygraph, source: Diagram, s1: RewriteStep,
                   s2: RewriteStep) -> Branching:
    a, b = sorted((s1, s2), key=lambda s: _step_order_key(poly, s))
    return Branching(dg.canonicalize(poly.sig, source), a, b)


def is_trivial(poly: Polygraph, b: Branching) -> bool:
    if b.step_a.key() == b.step_b.key():
        return True
    return not (set(b.step_a.ctx.img) & set(b.step_b.ctx.img))


def is_minimal(poly: Polygraph, b: Branching) -> bool:
    """No common whisker can be stripped from the branching."""
    sig = poly.sig
    d = b.source
    if not d.slices:
        return False
    used = set(b.step_a.ctx.img) | set(b.step_b.ctx.img)
    if d.source and all(len(l) >= 1 for (l, _, _) in d.slices):
        return False  # leftmost wire passes through everything
    if d.source and all(len(r) >= 1 for (_, _, r) in d.slices):
        return False
    unused = set(range(len(d.slices))) - used
    if not unused:
        return True
    if unused & dg.first_positions(sig, d.source, d.slices):
        return False
    if unused & dg.last_positions(sig, d.source, d.slices):
        return False
    return True


# ---------------------------------------------------------------------------
# Classification

def _hull(sig: Signature, slices) -> tuple[int, int]:
    """(left trim, right trim) of the maximal whisker around a slice block."""
    lt = min(len(l) for (l, _, _) in slices)
    rt = min(len(r) for (_, _, r) in slices)
    return lt, rt


def _try_layered(sig: Signature, peak: Diagram, first: list[int],
                 mid: list[int], last: list[int]):
    """Find a representative layered as [first-ids, mid-ids, last-ids]
    (order within each layer free); returns its slice tuple or None."""
    n1, n2 = len(first), len(first) + len(mid)
    fs, ms, ls = set(first), set(mid), set(last)
    for rep in dg.decorated_class(sig, peak.source, peak.slices):
        ids = [i for i, _ in rep]
        if (set(ids[:n1]) == fs and set(ids[n1:n2]) == ms
                and set(ids[n2:]) == ls):
            return tuple(sl for _, sl in rep)
    return None


def classify(poly: Polygraph, b: Branching) -> BranchingClass:
    """Tag per the template cascade: inclusion, regular, then indexed."""
    sig = poly.sig
    pa, pb = set(b.step_a.ctx.img), set(b.step_b.ctx.img)
    if pa <= pb or pb <= pa:
        return BranchingClass("inclusion")
    shared = sorted(pa & pb)
    if not shared:
        return BranchingClass("trivial")

    def corner(first_step, last_step):
        """first's extra above the shared block, last's extra below."""
        fset = sorted(set(first_step.ctx.img) - set(shared))
        lset = sorted(set(last_step.ctx.img) - set(shared))
        rest = sorted(set(range(len(b.source.slices))) - set(first_step.ctx.img)
                      - set(last_step.ctx.img))
        res = _try_layered(sig, b.source, fset, shared + rest, lset)
        if res is None:
            return None
        n1, nm = len(fset), len(shared) + len(rest)
        words = dg.level_words(sig, Diagram(b.source.source, res, b.source.at))
        block = res[n1:n1 + nm]
        c1, rt = _hull(sig, block)
        wi = words[n1]
        c2 = len(wi) - rt
        la, ra = len(first_step.ctx.left), len(first_step.ctx.right)
        lb, rb = len(last_step.ctx.left), len(last_step.ctx.right)
        uL, uR = c1 - la, (len(wi) - ra) - c2
        vL, vR = c1 - lb, (len(wi) - rb) - c2
        if min(uL, uR, vL, vR) < 0:
            return None
        return (res, n1, nm, words, c1, c2, uL, uR, vL, vR)

    for first, last in ((b.step_a, b.step_b), (b.step_b, b.step_a)):
        got = corner(first, last)
        if got is None:
            continue
        res, n1, nm, words, c1, c2, uL, uR, vL, vR = got
        if uR == 0 and vL == 0:
            return BranchingClass("regular", 1, "corner")
        if uL == 0 and vR == 0:
            return BranchingClass("regular", 2, "corner")
        if vL == 0 and vR == 0:
            return BranchingClass("regular", 3, "corner")
        if uL == 0 and uR == 0:
            return BranchingClass("regular", 4, "corner")
        hole_side = []
        if uR > 0 and vR > 0:
            hole_side.append("right")
        if uL > 0 and vL > 0:
            hole_side.append("left")
        if len(hole_side) == 2:
            return BranchingClass("multi_indexed", None, "corner")
        if hole_side == ["right"]:
            # both anchor words are read at the shared block's source level
            wi = words[n1]
            u0 = wi[c2:len(wi) - len(first.ctx.right)]
            v0 = wi[c2:len(wi) - len(last.ctx.right)]
            return BranchingClass("right_indexed", None, "corner",
                                  (HoleSpec(u0, v0),))
        if hole_side == ["left"]:
            wi = words[n1]
            u0 = wi[len(first.ctx.left):c1]
            v0 = wi[len(last.ctx.left):c1]
            return BranchingClass("left_indexed", None, "corner",
                                  (HoleSpec(u0, v0),))
    # parallel orientations: shared block first or last
    others = sorted(set(range(len(b.source.slices))) - set(shared))
    if _try_layered(sig, b.source, shared, others, []) is not None:
        return BranchingClass("regular", None, "shared_top")
    if _try_layered(sig, b.source, others, shared, []) is not None:
        return BranchingClass("regular", None, "shared_bottom")
    return BranchingClass("multi_indexed")


def _extract_template(poly: Polygraph, b: Branching) -> IndexedTemplate | None:
    """Template data of a right-indexed identity instance."""
    sig = poly.sig
    shared = sorted(set(b.step_a.ctx.img) & set(b.step_b.ctx.img))
    for first, last in ((b.step_a, b.step_b), (b.step_b, b.step_a)):
        fset = sorted(set(first.ctx.img) - set(shared))
        lset = sorted(set(last.ctx.img) - set(shared))
        if set(first.ctx.img) | set(last.ctx.img) != set(range(len(b.source.slices))):
            continue
        res = _try_layered(sig, b.source, fset, list(shared), lset)
        if res is None:
            continue
        n1, nm = len(fset), len(shared)
        words = dg.level_words(sig, Diagram(b.source.source, res, b.source.at))
        block = res[n1:n1 + nm]
        c1, rt = _hull(sig, block)
        wi = words[n1]
        c2 = len(wi) - rt
        la, ra = len(first.ctx.left), len(first.ctx.right)
        lb, rb = len(last.ctx.left), len(last.ctx.right)
        uL, uR = c1 - la, (len(wi) - ra) - c2
        vL, vR = c1 - lb, (len(wi) - rb) - c2
        if not (uL == 0 and vL == 0 and uR > 0 and vR > 0 and la == lb == c1 == 0):
            continue
        f_slices = tuple((l, g, r[:len(r) - ra]) for (l, g, r) in res[:n1])
        f = dg.canonicalize(sig, Diagram(b.source.source[:len(b.source.source) - ra]
                                         if ra else b.source.source,
                                         f_slices, b.source.at))
        h_slices = tuple((l, g, r[:len(r) - rt]) for (l, g, r) in block)
        h = dg.canonicalize(sig, Diagram(wi[:c2], h_slices, b.source.at))
        u0 = wi[c2:len(wi) - ra]
        v0 = wi[c2:len(wi) - rb]
        wb = words[n1 + nm]
        g_src = wb[:len(wb) - rb]
        g_slices = tuple((l, g, r[:len(r) - rb]) for (l, g, r) in res[n1 + nm:])
        gdiag = dg.canonicalize(sig, Diagram(g_src, g_slices, b.source.at))
        return IndexedTemplate(first.rule, last.rule, f, h, gdiag, u0, v0,
                               "right", HoleSpec(u0, v0))
    return None


# ---------------------------------------------------------------------------
# Enumeration

def enumerate_critical_branchings(poly: Polygraph):
    """(concrete branchings, indexed templates), complete at the stated
    bounds: every critical branching is either listed or an instance of a
    listed template."""
    sig = poly.sig
    rules = poly.cells3
    concrete: dict[tuple, tuple[Branching, BranchingClass]] = {}
    templates: dict[tuple, IndexedTemplate] = {}
    for ia, ca in enumerate(rules):
        for ib in range(ia, len(rules)):
            cb = rules[ib]
            max_size = ca.src.size() + cb.src.size() - 1
            wa = max(len(w) for w in dg.level_words(sig, ca.src))
            wb = max(len(w) for w in dg.level_words(sig, cb.src))
            max_w = wa + wb
            budget: dict[str, int] = {}
            for cell in (ca, cb):
                for (_, g, _) in cell.src.slices:
                    budget[g] = budget.get(g, 0) + 1
            min_size = max(ca.src.size(), cb.src.size())
            for word, at in composable_words(poly, max_w):
                for peak in gen_diagrams(poly, word, at, max_size, max_w,
                                         gen_budget=budget):
                    if peak.size() < min_size:
                        continue
                    try:
                        ms_a = dg.enumerate_matches(sig, peak, ca.src)
                        ms_b = (ms_a if ib == ia
                                else dg.enumerate_matches(sig, peak, cb.src))
                    except dg.DiagramError:
                        continue
                    pairs = (combinations(ms_a, 2) if ia == ib
                             else product(ms_a, ms_b))
                    for mctx_a, mctx_b in pairs:
                        s1 = RewriteStep(ca.name, FWD, mctx_a)
                        s2 = RewriteStep(cb.name, FWD, mctx_b)
                        b = make_branching(poly, peak, s1, s2)
                        if is_trivial(poly, b) or not is_minimal(poly, b):
                            continue
                        cls = classify(poly, b)
                        if cls.tag in ("inclusion", "regular"):
                            concrete.setdefault(b.key(), (b, cls))
                        elif cls.tag == "right_indexed":
                            t = _extract_template(poly, b)
                            if t is not None:
                                templates.setdefault(t.key(), t)
                            else:
                                concrete.setdefault(b.key(), (b, cls))
                        else:
                            concrete.setdefault(b.key(), (b, cls))
    ordered = sorted(concrete.values(),
                     key=lambda bc: (bc[0].source.size(), bc[0].key()))
    tordered = sorted(templates.values(), key=lambda t: t.key())
    return ordered, tordered


# ---------------------------------------------------------------------------
# Normal instances of indexed templates

def fill_template(poly: Polygraph, t: IndexedTemplate, k: Diagram) -> Branching:
    sig = poly.sig
    r = k.source[len(t.u0):]
    rbar = dg.target(sig, k)[len(t.v0):]
    F = dg.whisker(sig, (), t.f, r)
    mid = dg.compose_h(sig, t.h, k)
    G = dg.whisker(sig, (), t.g, rbar)
    S = dg.compose_v(sig, dg.compose_v(sig, F, mid), G)
    th = dg.target(sig, t.h)
    bottom_a = dg.compose_v(sig, dg.whisker(sig, th, k, ()), G)
    ctx_a = WhiskerContext(dg.identity(S.source, S.at), (), r,
                           dg.canonicalize(sig, bottom_a))
    top_b = dg.compose_v(sig, F, dg.whisker(sig, t.h.source, k, ()))
    ctx_b = WhiskerContext(dg.canonicalize(sig, top_b), (), rbar,
                           dg.identity(dg.target(sig, S), S.at))
    sa = RewriteStep(t.rule_a, FWD, ctx_a)
    sb = RewriteStep(t.rule_b, FWD, ctx_b)
    # recover slice images through the matcher so minimality tests work
    sa = _locate(poly, S, sa)
    sb = _locate(poly, S, sb)
    return make_branching(poly, S, sa, sb)


def _locate(poly: Polygraph, S: Diagram, step: RewriteStep) -> RewriteStep:
    want = step.ctx.key()
    for ctx in dg.enumerate_matches(poly.sig, S, poly.three_cell(step.rule).src):
        if ctx.key() == want:
            return RewriteStep(step.rule, step.direction, ctx)
    raise dg.DiagramError(f"constructed {step.rule}-redex not found in filled source")


def enumerate_normal_instances(poly: Polygraph, t: IndexedTemplate,
                               size_bound: int, width_bound: int):
    """All minimal instances with a normal-form filler within the bounds,
    plus the saturation flag (top size stratum contributed nothing)."""
    sig = poly.sig
    out = []
    if width_bound < max(len(t.u0), len(t.v0)):
        return [], True

    def reducible(d: Diagram) -> bool:
        return bool(rw.find_redexes(poly, d))

    at = t.h.at
    seen = set()
    for rword, rat in composable_words(poly, width_bound - len(t.u0)):
        src = t.u0 + rword
        if len(src) > width_bound:
            continue
        for k in gen_diagrams(poly, src, at, size_bound, width_bound,
                              prune=reducible):
            tgt = dg.target(sig, k)
            if tgt[:len(t.v0)] != t.v0 or len(tgt) > width_bound:
                continue
            kk = dg.canonicalize(sig, k)
            key = (kk.source, kk.slices)
            if key in seen:
                continue
            seen.add(key)
            try:
                b = fill_template(poly, t, kk)
            except dg.DiagramError:
                continue
            if is_trivial(poly, b) or not is_minimal(poly, b):
                continue
            out.append((kk, b))
    out.sort(key=lambda kb: (kb[0].size(), kb[0].source, kb[0].slices))
    saturated = all(k.size() < size_bound for k, _ in out)
    return out, saturated


# ---------------------------------------------------------------------------
# Confluence and homotopy bases

@dataclass(frozen=True)
class HomotopyGenerator:
    name: str
    lhs_trace: Trace
    rhs_trace: Trace

    def lhs_signed(self):
        return self.lhs_trace.rules_signed()

    def rhs_signed(self):
        return self.rhs_trace.rules_signed()


@dataclass
class ConfluenceVerdict:
    status: str  # confluent | not_confluent | inconclusive
    generator: HomotopyGenerator | None = None
    nf_a: Diagram | None = None
    nf_b: Diagram | None = None


def check_branching_confluence(poly: Polygraph, b: Branching,
                               max_steps: int = 10_000,
                               cert_active: bool = False,
                               name: str = "gen") -> ConfluenceVerdict:
    ta = rw.apply_step(poly, b.step_a)
    tb = rw.apply_step(poly, b.step_b)
    na, tra, sta = rw.normalize(poly, ta, max_steps)
    nb, trb, stb = rw.normalize(poly, tb, max_steps)
    if sta != "normal" or stb != "normal":
        return ConfluenceVerdict("inconclusive", nf_a=na, nf_b=nb)
    if dg.equal_up_to_exchange(poly.sig, na, nb):
        lhs = Trace(b.source, (b.step_a,) + tra.steps)
        rhs = Trace(b.source, (b.step_b,) + trb.steps)
        return ConfluenceVerdict("confluent", HomotopyGenerator(name, lhs, rhs),
                                 na, nb)
    status = "not_confluent" if cert_active else "inconclusive"
    return ConfluenceVerdict(status, nf_a=na, nf_b=nb)


def _k_slug(poly: Polygraph, k: Diagram) -> str:
    if not k.slices:
        return "id" + str(len(k.source))
    return "-".join(f"{g}{len(l)}" for (l, g, r) in k.slices)


@dataclass
class BranchingReport:
    concrete: list = field(default_factory=list)  # (name, Branching, BranchingClass, ConfluenceVerdict)
    indexed: list = field(default_factory=list)   # (IndexedTemplate, [(name, k, Branching, verdict)], saturated)
    cert_report = None


def analyse_branchings(poly: Polygraph, levels: list[Interpretation] | None = None,
                       max_steps: int = 10_000, size_bound: int = 4,
                       width_bound: int = 4) -> BranchingReport:
    cert_ok = False
    cert_rep = None
    if levels:
        cert_rep = check_certificate(poly, levels)
        cert_ok = cert_rep.verdict == "terminating"
    concrete, templates = enumerate_critical_branchings(poly)
    rep = BranchingReport()
    rep.cert_report = cert_rep
    names_used: dict[str, int] = {}

    def fresh(base: str) -> str:
        n = names_used.get(base, 0) + 1
        names_used[base] = n
        return base if n == 1 else f"{base}_{n}"

    for b, cls in concrete:
        name = fresh(f"{b.step_a.rule}_{b.step_b.rule}")
        verdict = check_branching_confluence(poly, b, max_steps, cert_ok, name)
        rep.concrete.append((name, b, cls, verdict))
    for t in templates:
        insts, saturated = enumerate_normal_instances(poly, t, size_bound, width_bound)
        rows = []
        for k, b in insts:
            name = fresh(f"{t.rule_a}_{t.rule_b}__{_k_slug(poly, k)}")
            verdict = check_branching_confluence(poly, b, max_steps, cert_ok, name)
            rows.append((name, k, b, verdict))
        rep.indexed.append((t, rows, saturated))
    return rep


def build_homotopy_basis(poly: Polygraph, levels=None, max_steps=10_000,
                         size_bound=4, width_bound=4):
    rep = analyse_branchings(poly, levels, max_steps, size_bound, width_bound)
    gens = []
    for name, b, cls, verdict in rep.concrete:
        if verdict.status != "confluent":
            raise ValueError(f"branching {name} is {verdict.status}; "
                             f"no homotopy basis")
        gens.append(verdict.generator)
    for t, rows, saturated in rep.indexed:
        for name, k, b, verdict in rows:
            if verdict.status != "confluent":
                raise ValueError(f"instance {name} is {verdict.status}; "
                                 f"no homotopy basis")
            gens.append(verdict.generator)
    return gens, rep


def fdt_report(poly: Polygraph, levels=None, max_steps=10_000,
               size_bound=4, width_bound=4) -> dict:
    rep = analyse_branchings(poly, levels, max_steps, size_bound, width_bound)
    cert_ok = rep.cert_report is not None and rep.cert_report.verdict == "terminating"
    statuses = [v.status for (_, _, _, v) in rep.concrete]
    for t, rows, saturated in rep.indexed:
        statuses += [v.status for (_, _, _, v) in rows]
    all_confluent = all(s == "confluent" for s in statuses)
    some_nonconfluent = any(s == "not_confluent" for s in statuses)
    saturated_all = all(sat for (_, _, sat) in rep.indexed) if rep.indexed else True
    if some_nonconfluent:
        verdict = "not_confluent"
    elif not all_confluent:
        verdict = "inconclusive"
    elif not cert_ok:
        verdict = "inconclusive"
    elif not rep.indexed:
        verdict = "fdt_certified"
    elif saturated_all:
        verdict = f"fdt_bound_certified({size_bound})"
    else:
        verdict = "inconclusive"
    basis_size = sum(1 for s in statuses if s == "confluent") if all_confluent else 0
    return {
        "verdict": verdict,
        "report": rep,
        "basis_size": basis_size if all_confluent else None,
        "saturated": saturated_all,
        "certificate": (rep.cert_report.verdict if rep.cert_report else "absent"),
    }
