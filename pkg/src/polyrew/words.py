"""The 2-polygraph (word rewriting) case: normalization, critical pairs,
confluence, and the Squier homotopy basis from chosen confluences."""
from __future__ import annotations

from dataclasses import dataclass

from .cells import Polygraph, WordRule

Letters = tuple[str, ...]


@dataclass(frozen=True)
class WordStep:
    rule: str
    pos: int


@dataclass(frozen=True)
class WordTrace:
    start: Letters
    steps: tuple[WordStep, ...] = ()


@dataclass(frozen=True)
class WordCriticalPair:
    kind: str  # "overlap" | "inclusion"
    peak: Letters
    step_a: WordStep
    step_b: WordStep


def _rule(poly: Polygraph, name: str) -> WordRule:
    for r in poly.rules2:
        if r.name == name:
            return r
    raise KeyError(name)


def apply_word_step(poly: Polygraph, w: Letters, step: WordStep) -> Letters:
    r = _rule(poly, step.rule)
    k = len(r.lhs.cells)
    if w[step.pos:step.pos + k] != r.lhs.cells:
        raise ValueError(f"rule {step.rule} does not match {w} at {step.pos}")
    return w[:step.pos] + r.rhs.cells + w[step.pos + k:]


def word_redexes(poly: Polygraph, w: Letters) -> list[WordStep]:
    out = []
    for pos in range(len(w)):
        for r in poly.rules2:
            k = len(r.lhs.cells)
            if w[pos:pos + k] == r.lhs.cells:
                out.append(WordStep(r.name, pos))
    return out


def normalize_word(poly: Polygraph, w: Letters, max_steps: int = 10_000):
    """Leftmost reduction (rule declaration order breaks position ties)."""
    cur = tuple(w)
    steps = []
    start = cur
    for _ in range(max_steps):
        rs = word_redexes(poly, cur)
        if not rs:
            return cur, WordTrace(start, tuple(steps)), "normal"
        steps.append(rs[0])
        cur = apply_word_step(poly, cur, rs[0])
    if not word_redexes(poly, cur):
        return cur, WordTrace(start, tuple(steps)), "normal"
    return cur, WordTrace(start, tuple(steps)), "step_limit"


def word_critical_pairs(poly: Polygraph) -> list[WordCriticalPair]:
    """All overlap and inclusion pairs, deduplicated up to symmetry."""
    seen = set()
    out = []
    for r1 in poly.rules2:
        l1 = r1.lhs.cells
        for r2 in poly.rules2:
            l2 = r2.lhs.cells
            # proper overlap: a nonempty proper suffix of l1 is a prefix of l2
            for i in range(1, len(l1)):
                k = len(l1) - i
                if k >= len(l2):
                    continue
                if l1[i:] == l2[:k]:
                    peak = l1 + l2[k:]
                    a, b = WordStep(r1.name, 0), WordStep(r2.name, i)
                    key = (peak, frozenset({(a.rule, a.pos), (b.rule, b.pos)}))
                    if key not in seen and (a.rule, a.pos) != (b.rule, b.pos):
                        seen.add(key)
                        out.append(WordCriticalPair("overlap", peak, a, b))
            # inclusion: l2 occurs inside l1
            for j in range(len(l1) - len(l2) + 1):
                if l1[j:j + len(l2)] == l2:
                    a, b = WordStep(r1.name, 0), WordStep(r2.name, j)
                    if (a.rule, a.pos) == (b.rule, b.pos):
                        continue
                    key = (l1, frozenset({(a.rule, a.pos), (b.rule, b.pos)}))
                    if key not in seen:
                        seen.add(key)
                        out.append(WordCriticalPair("inclusion", l1, a, b))
    out.sort(key=lambda c: (c.peak, c.step_a.rule, c.step_a.pos, c.step_b.rule, c.step_b.pos))
    return out


def shortlex_decreasing(poly: Polygraph) -> bool:
    """Built-in termination certificate: every rule shrinks shortlex order."""
    for r in poly.rules2:
        a, b = r.lhs.cells, r.rhs.cells
        if (len(b), b) >= (len(a), a):
            return False
    return True


def word_confluence_report(poly: Polygraph, max_steps: int = 10_000) -> dict:
    """Joinability of every critical pair, plus the Squier basis of spheres."""
    pairs = word_critical_pairs(poly)
    terminating = shortlex_decreasing(poly)
    results = []
    basis = []
    all_joinable = True
    for cp in pairs:
        wa = apply_word_step(poly, cp.peak, cp.step_a)
        wb = apply_word_step(poly, cp.peak, cp.step_b)
        na, ta, sa = normalize_word(poly, wa, max_steps)
        nb, tb, sb = normalize_word(poly, wb, max_steps)
        joinable = sa == sb == "normal" and na == nb
        all_joinable = all_joinable and joinable
        results.append({
            "kind": cp.kind,
            "peak": list(cp.peak),
            "step_a": {"rule": cp.step_a.rule, "pos": cp.step_a.pos},
            "step_b": {"rule": cp.step_b.rule, "pos": cp.step_b.pos},
            "joinable": joinable,
            "nf_a": list(na),
            "nf_b": list(nb),
        })
        if joinable:
            basis.append({
                "name": f"{cp.step_a.rule}_{cp.step_b.rule}_{''.join(cp.peak)}",
                "lhs": WordTrace(cp.peak, (cp.step_a,) + ta.steps),
                "rhs": WordTrace(cp.peak, (cp.step_b,) + tb.steps),
            })
    if all_joinable and terminating:
        verdict = "fdt_certified"
    elif all_joinable:
        verdict = "confluent_conditional_on_termination"
    else:
        verdict = "not_confluent" if terminating else "inconclusive"
    return {
        "pairs": results,
        "joinable": all_joinable,
        "basis_size": len(basis),
        "basis": basis,
        "termination": "shortlex" if terminating else "unknown",
        "verdict": verdict,
    }
