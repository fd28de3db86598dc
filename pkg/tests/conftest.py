from __future__ import annotations

import random
import sys

import pytest
from hypothesis import HealthCheck, settings

from cubefold.standard import rose, salvetti, torus
from cubefold.words import parse_word

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

RAAGS = {
    "P3": (list("abc"), [("a", "b"), ("b", "c")]),
    "P4": (list("abcd"), [("a", "b"), ("b", "c"), ("c", "d")]),
    "C4": (list("abcd"), [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]),
    "K3+1": (list("abcd"), [("a", "b"), ("b", "c"), ("a", "c")]),
}


def raag(name):
    gens, comm = RAAGS[name]
    return salvetti(gens, comm)


def words(Y, *texts):
    return [parse_word(Y, t) for t in texts]


def random_word_text(rng: random.Random, letters, lo=1, hi=6) -> str:
    toks = []
    for _ in range(rng.randint(lo, hi)):
        toks.append(rng.choice(letters) + rng.choice(["", "^-1"]))
    return " ".join(toks)


@pytest.fixture
def T2():
    return torus(2)


@pytest.fixture
def F2():
    return rose(2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
