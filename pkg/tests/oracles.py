"""Independent oracles used to cross-check the production algorithms.

The exchange oracle tracks wire identities instead of offset arithmetic:
a slice may hop above its predecessor when it consumes none of the wires
the predecessor produced and its consumed block maps back to a contiguous
block of older wires.  Classes are enumerated by breadth-first search over
these hops, which gives brute-force equality, matching and canonicalization
oracles for desk-scale diagrams.
"""
from __future__ import annotations

from itertools import count

from polyrew.diagram import Diagram, Signature


def _runs(sig: Signature, source, slices):
    """Wire-id levels plus (consumed ids, produced ids, insert position)."""
    fresh = count()
    level = [next(fresh) for _ in source]
    levels = [list(level)]
    info = []
    for (l, g, r) in slices:
        p = len(l)
        k = len(sig.src(g))
        consumed = level[p:p + k]
        produced = [next(fresh) for _ in sig.tgt(g)]
        level = level[:p] + produced + level[p + k:]
        levels.append(list(level))
        info.append((consumed, produced, p))
    return levels, info


def oracle_swaps(sig: Signature, source, slices, i):
    """All slice lists obtained by hopping slice i+1 above slice i."""
    levels, info = _runs(sig, source, slices)
    cons1, prod1, p1 = info[i]
    cons2, prod2, p2 = info[i + 1]
    if set(cons2) & set(prod1):
        return []
    above = levels[i]          # word (as ids) before slice i
    mid = levels[i + 1]        # word before slice i + 1
    out = []
    (l1, g1, r1), (l2, g2, r2) = slices[i], slices[i + 1]
    if cons2:
        # the consumed ids must be contiguous in the pre-slice-i word
        pos = [above.index(c) for c in cons2]
        if pos != list(range(pos[0], pos[0] + len(pos))):
            return []
        starts = [pos[0]]
    else:
        # a degenerate block inserts between wires; valid insertion points
        # are those that avoid the strict interior of slice i's output block
        lo, hi = p1, p1 + len(prod1)
        starts = []
        if p2 <= lo:
            starts.append(p2)
        if p2 >= hi:
            starts.append(p2 - len(prod1) + len(cons1))
    words = _words(sig, source, slices)
    w_above = words[i]
    for s in starts:
        new_first = (w_above[:s], g2, w_above[s + len(sig.src(g2)):])
        wi = w_above[:s] + sig.tgt(g2) + w_above[s + len(sig.src(g2)):]
        # slice i keeps its wires; recompute its padding inside wi
        if s <= p1:
            nl1 = p1 + len(sig.tgt(g2)) - len(sig.src(g2))
        else:
            nl1 = p1
        new_second = (wi[:nl1], g1, wi[nl1 + len(sig.src(g1)):])
        out.append(slices[:i] + (new_first, new_second) + slices[i + 2:])
    return out


def _words(sig: Signature, source, slices):
    words = [tuple(source)]
    for (l, g, r) in slices:
        words.append(tuple(l) + sig.tgt(g) + tuple(r))
    return words


def oracle_class(sig: Signature, d: Diagram, limit: int = 200_000):
    """The full exchange class of a diagram, as a set of slice tuples."""
    seen = {d.slices}
    frontier = [d.slices]
    while frontier:
        nxt = []
        for slices in frontier:
            for i in range(len(slices) - 1):
                for var in oracle_swaps(sig, d.source, slices, i):
                    if var not in seen:
                        seen.add(var)
                        nxt.append(var)
                        if len(seen) > limit:
                            raise RuntimeError("exchange class too large")
        frontier = nxt
    return seen


def oracle_equal(sig: Signature, d1: Diagram, d2: Diagram) -> bool:
    if d1.source != d2.source:
        return False
    return d2.slices in oracle_class(sig, d1)


def oracle_matches(sig: Signature, d: Diagram, pattern: Diagram):
    """All whisker decompositions d = top * (l . pattern . r) * bottom,
    by scanning every window of every representative."""
    pclass = oracle_class(sig, pattern)
    k = len(pattern.slices)
    found = set()
    for rep in oracle_class(sig, d):
        words = _words(sig, d.source, rep)
        for lo in range(len(rep) - k + 1):
            window = rep[lo:lo + k]
            w = words[lo]
            for dl in range(len(w) - len(pattern.source) + 1):
                rl = len(w) - dl - len(pattern.source)
                lw = w[:dl]
                rw = w[len(w) - rl:] if rl else ()
                block = []
                ok = True
                for (l, g, r) in window:
                    if l[:dl] != lw or (rl and r[len(r) - rl:] != rw):
                        ok = False
                        break
                    block.append((l[dl:], g, r[:len(r) - rl] if rl else r))
                if not ok or w[dl:len(w) - rl] != pattern.source:
                    continue
                if tuple(block) not in pclass:
                    continue
                top = min(oracle_class(sig, Diagram(d.source, rep[:lo], d.at)))
                bottom = min(oracle_class(
                    sig, Diagram(words[lo + k], rep[lo + k:], d.at)))
                found.add((top, lw, rw, bottom))
    return found


def oracle_canonical(sig: Signature, d: Diagram):
    """Lexicographically least representative by (offset, generator) keys."""
    def key(slices):
        return tuple((len(l), g) for (l, g, r) in slices)

    cls = oracle_class(sig, d)
    return min(cls, key=key)
