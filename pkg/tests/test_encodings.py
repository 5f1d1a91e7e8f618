import numpy as np
import pytest

from lsinfer.core import DevSequence, LSystem, derive_sequence, growth_matrix
from lsinfer.encodings import (SCHEMES, ReducedSystem, SymbolDistribution, Unique, build_matrix_system,
                               check_scheme, growth_decode, length_decode, make_space, osos_decode)
from lsinfer.ga import fitness
from lsinfer.reduction import NoSolution, init_bounds, reduce

from conftest import golden_sequence


def test_unique_lengths_and_growth_for_algae(algae):
    assert build_matrix_system(algae, "lengths") == Unique({0: 2, 1: 1})
    assert build_matrix_system(algae, "growth", column=0) == Unique({0: 1, 1: 1})
    assert build_matrix_system(algae, "growth", column=1) == Unique({0: 1, 1: 0})


def test_underdetermined_system_rejects_fractional_pivots():
    red = build_matrix_system(DevSequence.of(["AAB", "ABABA"]), "lengths")
    assert isinstance(red, ReducedSystem)
    assert red.free == (1,) and red.pivots == (0,)
    assert red.solve([2]) is None
    assert red.solve([1]) == {0: 2, 1: 1}


def test_non_integral_unique_solution():
    with pytest.raises(NoSolution):
        build_matrix_system(DevSequence.of(["AA", "AAA"]), "lengths")


def test_matrix_identity_holds_on_golden_models():
    for name in ("dragon", "aphanocladia", "dipterosiphonia"):
        system, rho = golden_sequence(name)
        P = np.stack([rho.alphabet.parikh(w) for w in rho.words])
        idx = [system.alphabet.index[g] for g in rho.alphabet.symbols]
        M = growth_matrix(system)[np.ix_(idx, idx)]
        assert np.array_equal(P[:-1] @ M, P[1:])
        assert np.array_equal(P[:-1] @ np.array(system.lengths)[idx], P[1:].sum(axis=1))


def test_osos_context_distribution():
    d = SymbolDistribution(DevSequence.of(["AABAACAAB", "AABAACAAB"]), context=2)
    w = d.weights("AA")
    assert w["B"] == pytest.approx(2 / 3) and w["C"] == pytest.approx(1 / 3)
    # unseen two-symbol context falls back to one symbol of history
    assert d.weights("CB") == d.weights("B")


def test_osos_respects_growth_caps():
    rho = DevSequence.of(["A", "AB", "ABA"])
    state = init_bounds(rho)
    b = state.idx("B")
    state.g_max[:, b] = 0
    dist = SymbolDistribution(rho, 1)
    layout = {"A": ("", "", 3), "B": ("", "", 3)}
    for genes in ([0.99] * 6, [0.5] * 6, [0.0] * 6):
        succ = osos_decode(np.array(genes), state, dist, layout)
        assert all("B" not in s for s in succ)


def test_check_scheme():
    assert check_scheme("ml") == "ml"
    with pytest.raises(ValueError):
        check_scheme("xx")


@pytest.mark.parametrize("scheme", [s for s in SCHEMES if not s.startswith("osos")])
def test_genome_round_trip(scheme):
    system, rho = golden_sequence("dipterosiphonia")
    space = make_space(scheme, rho, init_bounds(rho))
    genome = space.genome_for(system)
    assert genome is not None
    decoded = space.decode(genome)
    assert fitness(decoded, rho) == 0.0
    assert decoded.successors == tuple(system.succ(g) for g in rho.alphabet.symbols)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_random_genomes_decode_or_fail_cleanly(scheme):
    system, rho = golden_sequence("dipterosiphonia")
    space = make_space(scheme, rho, reduce(rho))
    rng = np.random.default_rng(1)
    for _ in range(20):
        g = space.random_genome(rng)
        succ = space.decode_successors(g)
        assert succ is None or len(succ) == rho.alphabet.size


def test_strict_decoders(algae):
    assert length_decode([2, 1], algae).succ("A") == "AB"
    assert length_decode([1, 1], algae) is None
    assert growth_decode([[1, 1], [1, 0]], algae).succ("B") == "A"
    assert growth_decode([[1, 0], [1, 0]], algae) is None
