import pytest

from lsinfer.core import DevSequence, InputError, LSystem, derive_sequence, is_compatible
from lsinfer.ga import GAConfig
from lsinfer.genbench import GeneratorConfig, benchmark_sequence, generate_lsystem
from lsinfer.projection import (EXHAUSTED, SOLVED_STATUS, LiftOverflow, LiftProblem, PartialSolution,
                                certainty_map, constant_groups, infer, level_alphabet, lift_constant,
                                strip_constants)
from lsinfer.reduction import NoSolution

from conftest import golden_sequence

WORKED = DevSequence.of(["A+B−A", "B[+A]B++A−[+B]−B[+A]B"], "[]+-")


def test_constant_groups_pair_brackets():
    assert constant_groups("[]+-F") == [("[", "]"), ("+",), ("-",), ("F",)]
    assert constant_groups("+[") == [("+",), ("[",)]


def test_strip_levels():
    assert strip_constants(WORKED, 0).words == ("ABA", "BABABBAB")
    assert strip_constants(WORKED, 1).words == ("ABA", "B[A]BA[B]B[A]B")
    assert strip_constants(WORKED, 3) is WORKED
    assert level_alphabet(WORKED.alphabet, 2).constants == ("[", "]", "+")
    with pytest.raises(NoSolution):
        strip_constants(DevSequence.of(["+A", "+"]), 0)
    with pytest.raises(ValueError):
        strip_constants(WORKED, 9)


def _level0():
    alphabet = level_alphabet(WORKED.alphabet, 0)
    return PartialSolution(0, LSystem.from_rules(alphabet, "ABA", {"A": "BAB", "B": "AB"}))


def test_lift_brackets():
    lifted = lift_constant(_level0(), WORKED)
    assert [p.successors for p in lifted] == [{"A": "B[A]B", "B": "A[B]"}]
    assert lifted[0].level == 1


def test_lift_rejects_wrong_partial():
    alphabet = level_alphabet(WORKED.alphabet, 0)
    bad = PartialSolution(0, LSystem.from_rules(alphabet, "ABA", {"A": "BA", "B": "BAB"}))
    assert lift_constant(bad, WORKED) == []


def test_lift_overflow():
    # the two plus signs can split between succ(A) and succ(B) in three ways
    rho = DevSequence.of(["AB", "A++B"], "+")
    partial = PartialSolution(0, LSystem.from_rules(level_alphabet(rho.alphabet, 0), "AB",
                                                    {"A": "A", "B": "B"}))
    assert len(LiftProblem(partial, rho).solve(cap=10)) == 3
    with pytest.raises(LiftOverflow):
        LiftProblem(partial, rho).solve(cap=2)


def test_certainty_map():
    cert = certainty_map(_level0(), WORKED)
    assert len(cert) == 1 and len(cert[0]) == len("ABA")
    assert all(cert[0])


def test_worked_example_exact():
    res = infer(WORKED)
    assert res.status == SOLVED_STATUS
    assert res.system.succ("A") == "B[+A]B"
    assert res.system.succ("B") == "+A-[+B]"
    assert res.wall_time < 1.0


@pytest.mark.parametrize("queue", ["fifo", "lifo"])
def test_infer_round_trips_golden(queue):
    system, rho = golden_sequence("aphanocladia")
    res = infer(rho, queue=queue)
    assert res.status == SOLVED_STATUS
    assert is_compatible(res.system, rho.words)


def test_infer_generated_systems():
    for seed in range(8):
        system = generate_lsystem(GeneratorConfig(size=4, seed=seed))
        rho = benchmark_sequence(system)
        res = infer(rho, cfg=GAConfig.for_scheme("ml", time_limit=30))
        assert res.status == SOLVED_STATUS, seed
        assert is_compatible(res.system, rho.words)


def test_inconsistent_sequence_is_exhausted():
    res = infer(DevSequence.of(["A", "AA", "A"]))
    assert res.status == EXHAUSTED and res.system is None


def test_unseen_symbol_is_exhausted():
    res = infer(DevSequence.of(["A", "AB"]))
    assert res.status == EXHAUSTED
    assert "B" in res.message


def test_constants_override():
    rho = DevSequence.of(["A", "AQ", "AQQ"], "")
    res = infer(rho, constants="Q")
    assert res.status == SOLVED_STATUS and res.system.succ("A") == "AQ"
    with pytest.raises(InputError):
        infer(rho, constants="Z")


def test_identity_only_constants():
    rho = DevSequence.of(["F", "F"], "F")
    res = infer(rho)
    assert res.status == SOLVED_STATUS
