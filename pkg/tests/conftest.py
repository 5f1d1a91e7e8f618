from pathlib import Path

import pytest

from lsinfer.core import DevSequence, derive_sequence, parse_lsystem
from lsinfer.genbench import GeneratorConfig, benchmark_sequence, generate_lsystem

DATA = Path(__file__).resolve().parent.parent / "data"
GOLDEN = ("dragon", "aphanocladia", "dipterosiphonia")


def golden(name: str):
    return parse_lsystem((DATA / f"{name}.lsys").read_text())


def golden_sequence(name: str) -> tuple:
    system = golden(name)
    return system, derive_sequence(system, len(system.alphabet.nonconstants))


def random_corpus(count: int = 200, seed: int = 2024):
    """``count`` generated systems with |nonconstants| cycling through 1..10."""
    out = []
    for i in range(count):
        system = generate_lsystem(GeneratorConfig(size=1 + i % 10, seed=seed + i))
        out.append((system, benchmark_sequence(system)))
    return out


@pytest.fixture(scope="session")
def corpus():
    return random_corpus()


@pytest.fixture
def algae():
    return DevSequence.of(["A", "AB", "ABA", "ABAAB"])
