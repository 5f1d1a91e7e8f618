import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from lsinfer.core import DevSequence, LSystem, derive_sequence, growth_matrix
from lsinfer.genbench import GeneratorConfig, benchmark_sequence, generate_lsystem
from lsinfer.reduction import (NoSolution, _mirror, _shift_nest, build_marker_map, fixpoint, init_bounds,
                               marker_candidates, reduce, refine_fragments)

from conftest import golden


def assert_sound(system, state):
    assert state.violations(system) == []
    idx = [system.alphabet.index[g] for g in state.alphabet.symbols]
    lens = np.array(system.lengths)[idx]
    assert (state.len_min <= lens).all() and (lens <= state.len_max).all()
    M = growth_matrix(system)[np.ix_(idx, idx)]
    assert (state.g_min <= M).all() and (M <= state.g_max).all()
    for g in state.alphabet.nonconstants:
        succ = system.succ(g)
        assert succ.startswith(state.pre.get(g, ""))
        assert succ.endswith(state.suf.get(g, ""))
        assert state.sub.get(g, "") in succ


def test_fragments_from_shared_context():
    rho = DevSequence.of(["+++A[-FF][+F]BF", "++++A[-FF][-FF][+F][+F]BFF"])
    state = init_bounds(rho)
    a = state.idx("A")
    state.len_min[a], state.len_max[a] = 2, 8
    refine_fragments(state, rho)
    assert state.pre["A"] == "+A"
    assert state.sup_left["A"] == "+A[-FF]"


def test_markers_single_candidate():
    rho = DevSequence.of(["A+BC-", "A+BC+C-"])
    state = init_bounds(rho)
    build_marker_map(state, rho)
    assert state.marker_map[0] == [(1, 1, 1), (4, 1, 6)]


def test_markers_pruned_by_lengths():
    rho = DevSequence.of(["A+B", "ABA+BBB"])
    assert marker_candidates(init_bounds(rho), rho, 0) == {(1, 1): [3]}


def test_growth_bounds_example():
    rho = DevSequence.of(["ABA", "ABABBBABA"])
    state = reduce(rho)
    a, b = state.idx("A"), state.idx("B")
    assert state.g_min[a, a] >= 1 and state.g_max[a, a] <= 2
    assert state.g_max[b, b] <= 5
    # A -> AB, B -> BBB is one compatible system; A -> ABAB, B -> B another
    for succ in ({"A": "AB", "B": "BB"}, {"A": "ABAB", "B": "B"}):
        sys_ = LSystem.from_rules(rho.alphabet, "ABA", succ)
        if derive_sequence(sys_, 1).words == rho.words:
            assert_sound(sys_, state)


def test_length_bound_from_one_step():
    rho = DevSequence.of(["A", "AB"])
    state = init_bounds(rho)
    fixpoint(state, rho)
    assert state.len_max[state.idx("A")] == 2
    assert state.known("A") == "AB"


def test_identity_sequence_is_pinned():
    rho = DevSequence.of(["AB", "AB"])
    assert reduce(rho).known_all() == {"A": "A", "B": "B"}


def test_inconsistent_sequence():
    with pytest.raises(NoSolution):
        reduce(DevSequence.of(["A", "AA", "A"]))


def test_golden_models_reduce_soundly():
    for name in ("dragon", "aphanocladia", "dipterosiphonia"):
        system = golden(name)
        rho = derive_sequence(system, len(system.alphabet.nonconstants))
        assert_sound(system, reduce(rho))


def test_dragon_and_aphanocladia_fully_pinned():
    for name in ("dragon", "aphanocladia"):
        system = golden(name)
        rho = derive_sequence(system, len(system.alphabet.nonconstants))
        known = reduce(rho).known_all()
        assert known == {g: system.succ(g) for g in system.alphabet.nonconstants}


def test_shift_nest_and_mirror():
    assert _mirror("A[+B]") == "[B+]A"
    assert _shift_nest("A[+B]C", 2, True) == len("A[+B]")


def test_dump_mentions_every_nonconstant():
    rho = DevSequence.of(["A", "AB", "ABA"])
    text = reduce(rho).dump()
    assert "len A" in text and "len B" in text


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(1, 6), st.integers(0, 10**6), st.sampled_from(["[]+-F", "+-F", "F", ""]))
def test_bounds_are_sound(size, seed, consts):
    system = generate_lsystem(GeneratorConfig(size=size, seed=seed, constants=consts, max_len=6))
    rho = benchmark_sequence(system)
    assert_sound(system, reduce(rho))
