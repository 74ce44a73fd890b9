"""Layered diagrams in a free 2-category.

A diagram is a vertical list of slices, each slice a generator padded by
identity wires on both sides.  Two diagrams denote the same 2-cell when one
can be turned into the other by swapping adjacent independent slices (the
exchange law); `canonicalize` computes a distinguished representative of
that class, so equality and hashing are structural on canonical forms.
"""
from __future__ import annotations

from dataclasses import dataclass, field

Word = tuple[str, ...]
Slice = tuple[Word, str, Word]  # (left wires, generator, right wires)


class DiagramError(ValueError):
    pass


class Signature:
    """Boundary table for 2-cell generators, plus per-signature caches."""

    def __init__(self, boundaries: dict[str, tuple[Word, Word]]):
        self._b = {g: (tuple(s), tuple(t)) for g, (s, t) in boundaries.items()}
        self._canon: dict = {}
        self._class: dict = {}
        self._match: dict = {}

    def src(self, g: str) -> Word:
        return self._b[g][0]

    def tgt(self, g: str) -> Word:
        return self._b[g][1]

    def __contains__(self, g: str) -> bool:
        return g in self._b

    def gens(self):
        return self._b.keys()


@dataclass(frozen=True)
class Diagram:
    source: Word
    slices: tuple[Slice, ...]
    at: str | None = None  # 0-cell of the leftmost region; matters for empty boundaries

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "slices", tuple(
            (tuple(l), g, tuple(r)) for (l, g, r) in self.slices))

    def size(self) -> int:
        return len(self.slices)


def identity(word: Word, at: str | None = None) -> Diagram:
    return Diagram(tuple(word), (), at)


def generator(sig: Signature, g: str, at: str | None = None) -> Diagram:
    return Diagram(sig.src(g), (((), g, ()),), at)


def apply_slice(sig: Signature, word: Word, sl: Slice) -> Word:
    l, g, r = sl
    if word != l + sig.src(g) + r:
        raise DiagramError(f"slice {g} with padding {l}|{r} does not fit word {word}")
    return l + sig.tgt(g) + r


def level_words(sig: Signature, d: Diagram) -> list[Word]:
    """Words between slices, from the source down; validates composability."""
    words = [d.source]
    for sl in d.slices:
        words.append(apply_slice(sig, words[-1], sl))
    return words


def target(sig: Signature, d: Diagram) -> Word:
    return level_words(sig, d)[-1]


def is_wellformed(sig: Signature, d: Diagram) -> bool:
    try:
        level_words(sig, d)
        return True
    except (DiagramError, KeyError):
        return False


def compose_v(sig: Signature, d1: Diagram, d2: Diagram) -> Diagram:
    if target(sig, d1) != d2.source:
        raise DiagramError(
            f"vertical boundary mismatch: {target(sig, d1)} vs {d2.source}")
    return canonicalize(sig, Diagram(d1.source, d1.slices + d2.slices, d1.at))


def compose_h(sig: Signature, d1: Diagram, d2: Diagram) -> Diagram:
    t1 = target(sig, d1)
    first = tuple((l, g, r + d2.source) for (l, g, r) in d1.slices)
    second = tuple((t1 + l, g, r) for (l, g, r) in d2.slices)
    return canonicalize(sig, Diagram(d1.source + d2.source, first + second, d1.at))


def whisker(sig: Signature, left: Word, d: Diagram, right: Word,
            at: str | None = None) -> Diagram:
    left, right = tuple(left), tuple(right)
    slices = tuple((left + l, g, r + right) for (l, g, r) in d.slices)
    return Diagram(left + d.source + right, slices, at if at is not None else d.at)


# ---------------------------------------------------------------------------
# Exchange: adjacent swaps and the canonical representative.

def swap_variants(sig: Signature, above: Slice, below: Slice) -> list[tuple[Slice, Slice]]:
    """Ways to move `below` past `above`, for an adjacent pair (above, below).

    Returns the swapped pairs (mover first, old slice after).  The mover may
    pass on the left or on the right of `above`'s block; degenerate boundaries
    can allow both, giving two distinct representatives.
    """
    la, ga, ra = above
    lb, gb, rb = below
    x, sa, ta = len(la), len(sig.src(ga)), len(sig.tgt(ga))
    p, sb, tb = len(lb), len(sig.src(gb)), len(sig.tgt(gb))
    w_above = la + sig.src(ga) + ra
    out = []
    if p + sb <= x:  # mover passes on the left
        new_b = (w_above[:p], gb, w_above[p + sb:])
        wi = w_above[:p] + sig.tgt(gb) + w_above[p + sb:]
        new_a = (wi[: x + tb - sb], ga, ra)
        out.append((new_b, new_a))
    if p >= x + ta:  # mover passes on the right
        q = p - ta + sa
        new_b = (w_above[:q], gb, w_above[q + sb:])
        wi = w_above[:q] + sig.tgt(gb) + w_above[q + sb:]
        new_a = (la, ga, wi[x + sa:])
        out.append((new_b, new_a))
    return out


def _keyseq(slices) -> tuple:
    return tuple((len(l), g) for (l, g, r) in slices)


def decorated_class(sig: Signature, source: Word, slices: tuple[Slice, ...],
                    limit: int = 500_000):
    """The exchange class as tuples of (slice id, slice), ids taken from the
    input order.  Cached per signature; every plain member maps to the same
    canonical form afterwards."""
    key = (source, slices)
    hit = sig._class.get(key)
    if hit is not None:
        return hit
    start = tuple(enumerate(slices))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for rep in frontier:
            for i in range(len(rep) - 1):
                (ia, sa), (ib, sb) = rep[i], rep[i + 1]
                for new_b, new_a in swap_variants(sig, sa, sb):
                    var = rep[:i] + ((ib, new_b), (ia, new_a)) + rep[i + 2:]
                    if var not in seen:
                        seen.add(var)
                        nxt.append(var)
                        if len(seen) > limit:
                            raise DiagramError("exchange class too large")
        frontier = nxt
    cls = frozenset(seen)
    best = min((tuple(sl for _, sl in rep) for rep in cls), key=_keyseq)
    for rep in cls:
        plain = tuple(sl for _, sl in rep)
        sig._canon[(source, plain)] = best
        sig._class[(source, plain)] = cls
    return cls


def _canon_slices(sig: Signature, source: Word, slices: tuple[Slice, ...]) -> tuple[Slice, ...]:
    hit = sig._canon.get((source, slices))
    if hit is not None:
        return hit
    if not slices:
        sig._canon[(source, slices)] = ()
        return ()
    decorated_class(sig, source, slices)
    return sig._canon[(source, slices)]


def first_positions(sig: Signature, source: Word, slices: tuple[Slice, ...]) -> set[int]:
    """Slice ids that can appear first in some representative."""
    return {rep[0][0] for rep in decorated_class(sig, source, slices) if rep}


def last_positions(sig: Signature, source: Word, slices: tuple[Slice, ...]) -> set[int]:
    return {rep[-1][0] for rep in decorated_class(sig, source, slices) if rep}


def canonicalize(sig: Signature, d: Diagram) -> Diagram:
    if (d.source, d.slices) not in sig._canon:
        level_words(sig, d)  # reject ill-formed input with a precise error
    slices = _canon_slices(sig, d.source, d.slices)
    if slices == d.slices:
        return d
    return Diagram(d.source, slices, d.at)


def equal_up_to_exchange(sig: Signature, d1: Diagram, d2: Diagram) -> bool:
    if d1.source != d2.source or d1.at != d2.at:
        return False
    return _canon_slices(sig, d1.source, d1.slices) == _canon_slices(sig, d2.source, d2.slices)


def count_occurrences(d: Diagram, gen: str) -> int:
    return sum(1 for (_, g, _) in d.slices if g == gen)


# ---------------------------------------------------------------------------
# Pattern matching through whisker contexts.

@dataclass(frozen=True)
class WhiskerContext:
    top: Diagram
    left: Word
    right: Word
    bottom: Diagram
    img: tuple[int, ...] = field(default=(), compare=False)

    def key(self) -> tuple:
        return (self.top.source, self.top.slices, self.left, self.right,
                self.bottom.source, self.bottom.slices)


def enumerate_matches(sig: Signature, d: Diagram, pattern: Diagram) -> list[WhiskerContext]:
    """All whisker contexts C with C[pattern] equal to d up to exchange.

    Scans every window of every exchange representative of the host for a
    whisker-padded copy of the pattern; one context is reported per
    exchange class of decompositions.
    """
    pat = canonicalize(sig, pattern)
    if not pat.slices:
        raise DiagramError("degenerate pattern: identity diagrams match everywhere")
    host = canonicalize(sig, d)
    ck = (host.source, host.slices, pat.source, pat.slices)
    hit = sig._match.get(ck)
    if hit is not None:
        return hit

    k = len(pat.slices)
    out: dict[tuple, WhiskerContext] = {}
    pat_ms = sorted(g for (_, g, _) in pat.slices)
    pat_class = {tuple(sl for _, sl in rep)
                 for rep in decorated_class(sig, pat.source, pat.slices)}
    for rep in decorated_class(sig, host.source, host.slices):
        slices = tuple(sl for _, sl in rep)
        words = level_words(sig, Diagram(host.source, slices, host.at))
        for lo in range(len(slices) - k + 1):
            window = slices[lo:lo + k]
            if sorted(g for (_, g, _) in window) != pat_ms:
                continue
            w_mid = words[lo]
            for dl in range(0, len(w_mid) - len(pat.source) + 1):
                rlen = len(w_mid) - dl - len(pat.source)
                lw = w_mid[:dl]
                rw = w_mid[len(w_mid) - rlen:] if rlen else ()
                block = []
                good = True
                for (l, g, r) in window:
                    if len(l) < dl or l[:dl] != lw:
                        good = False
                        break
                    if rlen and (len(r) < rlen or r[len(r) - rlen:] != rw):
                        good = False
                        break
                    block.append((l[dl:], g, r[:len(r) - rlen] if rlen else r))
                if not good:
                    continue
                bsrc = w_mid[dl:len(w_mid) - rlen] if rlen else w_mid[dl:]
                if bsrc != pat.source:
                    continue
                if tuple(block) not in pat_class:
                    continue
                top = canonicalize(sig, Diagram(host.source, slices[:lo], host.at))
                bottom = canonicalize(
                    sig, Diagram(words[lo + k], slices[lo + k:], host.at))
                img = tuple(sorted(i for i, _ in rep[lo:lo + k]))
                ctx = WhiskerContext(top, lw, rw, bottom, img=img)
                out.setdefault(ctx.key(), ctx)
    res = sorted(out.values(), key=lambda c: (len(c.top.slices), len(c.left),
                                              _keyseq(c.top.slices), _keyseq(c.bottom.slices),
                                              c.left, c.right))
    sig._match[ck] = res
    return res


def plug(sig: Signature, ctx: WhiskerContext, inner: Diagram) -> Diagram:
    """C[inner]: recompose a whisker context around a diagram."""
    mid = whisker(sig, ctx.left, inner, ctx.right, at=ctx.top.at)
    return compose_v(sig, compose_v(sig, ctx.top, mid), ctx.bottom)


def dump(sig: Signature, d: Diagram) -> str:
    """Canonical textual dump, one slice per line as 'left | gen | right'."""
    c = canonicalize(sig, d)
    lines = [f"source {' '.join(c.source) if c.source else '(empty)'}"]
    for (l, g, r) in c.slices:
        lines.append(f"{' '.join(l) or '-'} | {g} | {' '.join(r) or '-'}")
    return "\n".join(lines)
