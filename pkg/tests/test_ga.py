import pytest

from lsinfer.core import DevSequence, LSystem
from lsinfer.encodings import make_space
from lsinfer.ga import (DEFAULTS, MAX_FITNESS, GAConfig, hyperparameter_search, fitness, run_ga,
                        word_errors)
from lsinfer.reduction import init_bounds

from conftest import golden_sequence


def test_worked_error_count():
    assert word_errors("XYXXXY", "XYYX") == 4
    assert word_errors("XYYX", "XYXXXY") == 4


def test_errors_identical_and_prefix():
    assert word_errors("ABC", "ABC") == 0
    assert word_errors("ABC", "AB") == 1
    assert word_errors("AB", "ABCD") == 2


def test_fitness_terms(algae):
    ab = algae.alphabet
    right = LSystem.from_rules(ab, "A", {"A": "AB", "B": "A"})
    assert fitness(right, algae) == 0.0
    wrong = LSystem.from_rules(ab, "A", {"A": "AB", "B": "B"})
    # first mismatch in word 3 of 4: capped error + one later word
    f = fitness(wrong, algae)
    assert 1.0 < f <= 2.0
    assert fitness(None, algae) == MAX_FITNESS
    huge = LSystem.from_rules(ab, "A", {"A": "ABBBB", "B": "A"})
    assert fitness(huge, algae) == MAX_FITNESS


def test_earlier_failures_score_worse(algae):
    ab = algae.alphabet
    early = LSystem.from_rules(ab, "A", {"A": "BA", "B": "A"})
    late = LSystem.from_rules(ab, "A", {"A": "AB", "B": "B"})
    assert fitness(early, algae) > fitness(late, algae)


def test_config_defaults():
    cfg = GAConfig.for_scheme("ml", seed=3)
    assert (cfg.pop, cfg.cx, cfg.mut, cfg.seed) == (*DEFAULTS["ml"], 3)
    with pytest.raises(ValueError):
        GAConfig(pop=1)
    with pytest.raises(ValueError):
        GAConfig(cx=1.5)


def _space(scheme="l"):
    system, rho = golden_sequence("dipterosiphonia")
    return make_space(scheme, rho, init_bounds(rho)), rho


def test_run_is_deterministic_under_seed():
    space, rho = _space()
    cfg = GAConfig(pop=20, min_gens=5, max_gens=30, seed=7)
    a, b = run_ga(space, cfg), run_ga(space, cfg)
    assert (a.best_fitness, a.generations) == (b.best_fitness, b.generations)


def test_best_fitness_is_reported_and_bounded():
    space, rho = _space()
    rep = run_ga(space, GAConfig(pop=20, min_gens=5, max_gens=15, seed=1))
    assert rep.generations <= 15
    assert rep.best_fitness >= 0
    if rep.best is not None:
        assert fitness(rep.best, rho) == rep.best_fitness


def test_elitism_never_worsens():
    space, rho = _space()
    prev = None
    for gens in (1, 5, 20):
        rep = run_ga(space, GAConfig(pop=20, min_gens=1, max_gens=gens, seed=4))
        if prev is not None and rep.generations >= gens:
            assert rep.best_fitness <= prev
        prev = rep.best_fitness


def test_solves_a_small_sequence():
    rho = DevSequence.of(["A", "AB", "ABA", "ABAAB", "ABAABABA"])
    rep = run_ga(make_space("l", rho, init_bounds(rho)), GAConfig(pop=20, seed=0, time_limit=10))
    assert rep.solved
    assert rep.solutions[0].succ("A") == "AB"


def test_exclusion_reports_other_solutions():
    rho = DevSequence.of(["AB", "AB"])
    space = make_space("l", rho, init_bounds(rho))
    rep = run_ga(space, GAConfig(pop=4, seed=0, min_gens=3, max_gens=5), exclude={("A", "B")})
    assert not rep.solved


def test_hyperparameter_search_stops_without_improvement():
    calls = []

    def evaluate(cfg):
        calls.append(cfg)
        return 1.0, 0.0

    cfg, history = hyperparameter_search(evaluate, trials=16, seed=0)
    assert len(calls) == 17 and len(history) == 17
    assert (cfg.pop, cfg.cx, cfg.mut) == (60, 0.8, 0.10)


def test_hyperparameter_search_moves_downhill():
    def evaluate(cfg):
        return abs(cfg.pop - 100) / 5 + abs(cfg.mut - 0.05) * 100, 0.0

    cfg, history = hyperparameter_search(evaluate, trials=16, seed=1, max_rounds=50)
    assert abs(cfg.pop - 100) <= 10
    scores = [evaluate(t.cfg)[0] for t in history]
    assert evaluate(cfg)[0] == min(scores)
