from __future__ import annotations

import pathlib
import random
import sys

import pytest

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
sys.path.insert(0, str(ROOT / "tests"))

from polyrew import interpret as ip
from polyrew.cells import parse_polygraph


def load_poly(name: str):
    return parse_polygraph((FIXTURES / name).read_text())


def load_levels(poly, interp_name: str, cert_name: str):
    pool = {i.name: i for i in
            ip.parse_interpretations((FIXTURES / interp_name).read_text(), poly)}
    names = ip.load_certificate((FIXTURES / cert_name).read_text())
    return [pool[n] for n in names]


@pytest.fixture(scope="session")
def monoid():
    return load_poly("monoid.poly")


@pytest.fixture(scope="session")
def monoid_levels(monoid):
    return load_levels(monoid, "monoid.interp", "monoid.cert")


@pytest.fixture(scope="session")
def perm():
    return load_poly("permutations.poly")


@pytest.fixture(scope="session")
def perm_levels(perm):
    return load_levels(perm, "permutations.interp", "permutations.cert")


@pytest.fixture(scope="session")
def ce():
    return load_poly("counterexample.poly")


@pytest.fixture(scope="session")
def ce_levels(ce):
    return load_levels(ce, "counterexample.interp", "counterexample.cert")


@pytest.fixture(scope="session")
def xi():
    return load_poly("xi.poly")


@pytest.fixture(scope="session")
def xi_levels(xi):
    return load_levels(xi, "xi.interp", "xi.cert")


@pytest.fixture(scope="session")
def squier():
    return load_poly("squier.poly")


def random_diagram(poly, rng: random.Random, max_size=4, max_width=4):
    """A random well-formed diagram over the polygraph's 2-cells."""
    from polyrew import diagram as dg
    from polyrew.branchings import _slice_options, composable_words

    words = list(composable_words(poly, max_width))
    word, at = rng.choice(words)
    d = dg.Diagram(word, (), at)
    cur = word
    for _ in range(rng.randrange(max_size + 1)):
        opts = [sl for sl in _slice_options(poly, cur, at)
                if len(sl[0]) + len(poly.sig.tgt(sl[1])) + len(sl[2]) <= max_width]
        if not opts:
            break
        sl = rng.choice(opts)
        d = dg.Diagram(word, d.slices + (sl,), at)
        cur = sl[0] + poly.sig.tgt(sl[1]) + sl[2]
    return dg.canonicalize(poly.sig, d)
