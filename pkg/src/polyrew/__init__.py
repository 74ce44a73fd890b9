"""Rewriting in free 2-categories presented by 3-polygraphs."""

from .cells import (Polygraph, PolygraphError, TypedWord, parse_dexpr_text,
                    parse_polygraph, serialize_polygraph, validate)
from .diagram import (Diagram, DiagramError, Signature, WhiskerContext,
                      canonicalize, compose_h, compose_v, count_occurrences,
                      enumerate_matches, equal_up_to_exchange)
from .rewrite import RewriteStep, Trace, apply_step, find_redexes, normalize

__all__ = [
    "Polygraph", "PolygraphError", "TypedWord", "parse_polygraph",
    "serialize_polygraph", "parse_dexpr_text", "validate",
    "Diagram", "DiagramError", "Signature", "WhiskerContext",
    "canonicalize", "compose_h", "compose_v", "count_occurrences",
    "enumerate_matches", "equal_up_to_exchange",
    "RewriteStep", "Trace", "apply_step", "find_redexes", "normalize",
]
