"""Rewriting 2-cells by 3-cells: redexes, steps, normalization, traces.

Traces are cells of the free track 3-category: signed sequences of steps,
where an inverse step undoes a rule application inside the same context.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import diagram as dg
from .cells import Polygraph
from .diagram import Diagram, DiagramError, WhiskerContext

FWD, INV = "fwd", "inv"


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    direction: str  # "fwd" | "inv"
    ctx: WhiskerContext

    def key(self) -> tuple:
        return (self.rule, self.direction) + self.ctx.key()


@dataclass(frozen=True)
class Trace:
    start: Diagram
    steps: tuple[RewriteStep, ...] = ()

    def rules_signed(self) -> list[tuple[str, int]]:
        return [(s.rule, 1 if s.direction == FWD else -1) for s in self.steps]


def step_source(poly: Polygraph, step: RewriteStep) -> Diagram:
    src, tgt = _sides(poly, step)
    return dg.plug(poly.sig, step.ctx, src)


def apply_step(poly: Polygraph, step: RewriteStep) -> Diagram:
    src, tgt = _sides(poly, step)
    return dg.plug(poly.sig, step.ctx, tgt)


def _sides(poly: Polygraph, step: RewriteStep) -> tuple[Diagram, Diagram]:
    cell = poly.three_cell(step.rule)
    if step.direction == FWD:
        return cell.src, cell.tgt
    return cell.tgt, cell.src


def invert_step(step: RewriteStep) -> RewriteStep:
    return RewriteStep(step.rule, INV if step.direction == FWD else FWD, step.ctx)


def find_redexes(poly: Polygraph, d: Diagram) -> list[RewriteStep]:
    """All forward steps with source d: rule declaration order, then
    topmost-leftmost context order."""
    out = []
    for cell in poly.cells3:
        if not cell.src.slices:
            raise DiagramError(f"rule {cell.name} has a degenerate source")
        for ctx in dg.enumerate_matches(poly.sig, d, cell.src):
            out.append(RewriteStep(cell.name, FWD, ctx))
    return out


def normalize(poly: Polygraph, d: Diagram, max_steps: int = 10_000):
    """Leftmost-topmost normalization.

    Returns (result, trace, status) with status "normal" or "step_limit".
    """
    cur = dg.canonicalize(poly.sig, d)
    steps: list[RewriteStep] = []
    start = cur
    for _ in range(max_steps):
        redexes = find_redexes(poly, cur)
        if not redexes:
            return cur, Trace(start, tuple(steps)), "normal"
        step = redexes[0]
        steps.append(step)
        cur = apply_step(poly, step)
    if not find_redexes(poly, cur):
        return cur, Trace(start, tuple(steps)), "normal"
    return cur, Trace(start, tuple(steps)), "step_limit"


def replay(poly: Polygraph, trace: Trace, check: bool = True) -> list[Diagram]:
    """Diagrams visited by the trace, starting at trace.start."""
    cur = dg.canonicalize(poly.sig, trace.start)
    out = [cur]
    for step in trace.steps:
        if check:
            src = dg.canonicalize(poly.sig, step_source(poly, step))
            if not dg.equal_up_to_exchange(poly.sig, src, cur):
                raise DiagramError(
                    f"trace replay: step {step.rule} does not apply, "
                    f"expected source differs")
        cur = apply_step(poly, step)
        out.append(cur)
    return out


def trace_end(poly: Polygraph, trace: Trace) -> Diagram:
    return replay(poly, trace, check=False)[-1]


def trace_inverse(poly: Polygraph, trace: Trace) -> Trace:
    end = trace_end(poly, trace)
    return Trace(end, tuple(invert_step(s) for s in reversed(trace.steps)))


def trace_compose(poly: Polygraph, t1: Trace, t2: Trace) -> Trace:
    e1 = trace_end(poly, t1)
    if not dg.equal_up_to_exchange(poly.sig, e1, dg.canonicalize(poly.sig, t2.start)):
        raise DiagramError("trace composition: boundary mismatch")
    return Trace(t1.start, t1.steps + t2.steps)


def trace_json(poly: Polygraph, trace: Trace) -> dict:
    def ddump(d):
        return dg.dump(poly.sig, d)

    return {
        "start": ddump(trace.start),
        "steps": [{
            "rule": s.rule,
            "dir": s.direction,
            "top": ddump(s.ctx.top),
            "left": list(s.ctx.left),
            "right": list(s.ctx.right),
            "bottom": ddump(s.ctx.bottom),
        } for s in trace.steps],
    }
