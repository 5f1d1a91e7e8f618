"""Genetic search over an encoding's genome space.

Selection is roulette-wheel with weight ``1 / (1 + fitness)``; a parent pair
is used at most once per generation, crossover is uniform, children that
come out identical to a parent get one forced mutation, genomes decoding to a
solution already present are culled, and the best ``pop`` individuals survive.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .core import DevSequence, LSystem, is_compatible

#: Fitness of candidates that over-produce or cannot be decoded.
MAX_FITNESS = 1e9

SOLVED, CONVERGED, TIMEOUT = "solved", "converged", "timeout"


@dataclass(frozen=True)
class GAConfig:
    pop: int = 100
    cx: float = 0.85
    mut: float = 0.10
    min_gens: int = 1000
    time_limit: float = 60.0
    seed: int | None = 0
    max_gens: int | None = None

    def __post_init__(self):
        if self.pop < 2:
            raise ValueError("population must be at least 2")
        if not (0 <= self.cx <= 1 and 0 <= self.mut <= 1):
            raise ValueError("crossover and mutation weights must lie in [0, 1]")

    @classmethod
    def for_scheme(cls, scheme: str, **overrides) -> "GAConfig":
        pop, cx, mut = DEFAULTS[scheme]
        return replace(cls(pop=pop, cx=cx, mut=mut), **overrides)


#: Tuned (population, crossover, mutation) per scheme.
DEFAULTS = {
    "osos1": (110, 0.80, 0.17),
    "osos2": (105, 0.80, 0.14),
    "g": (90, 0.85, 0.07),
    "mg": (95, 0.90, 0.09),
    "l": (105, 0.85, 0.10),
    "ml": (100, 0.85, 0.10),
}


def word_errors(expected: str, produced: str) -> int:
    """Symbols of either word without a matching counterpart.

    A mismatched position leaves one symbol unmatched in each word; surplus
    length leaves one per extra symbol.
    """
    n = min(len(expected), len(produced))
    if expected[:n] == produced[:n]:
        mism = 0
    else:
        mism = sum(1 for x, y in zip(expected, produced) if x != y)
    return 2 * mism + abs(len(expected) - len(produced))


def fitness(candidate: LSystem | None, rho: DevSequence) -> float:
    """0 iff ``candidate`` reproduces ``rho``; lower is better.

    The first word that differs contributes its error count over the expected
    length (capped at 1) and every later word adds 1.
    """
    if candidate is None:
        return MAX_FITNESS
    words = rho.words
    n = len(words)
    table = candidate._table
    w = words[0]
    for i in range(1, n):
        w = w.translate(table)
        target = words[i]
        if len(w) > 2 * len(target):
            return MAX_FITNESS
        if w != target:
            return min(1.0, word_errors(target, w) / len(target)) + (n - 1 - i)
    return 0.0


@dataclass
class SearchReport:
    best_fitness: float
    solutions: list = field(default_factory=list)
    generations: int = 0
    wall_time: float = 0.0
    reason: str = CONVERGED
    best: LSystem | None = None

    @property
    def solved(self) -> bool:
        return bool(self.solutions)


class _Evaluator:
    def __init__(self, space, rho, exclude):
        self.space = space
        self.rho = rho
        self.exclude = exclude
        self.memo: dict = {}
        self.found: dict = {}

    def __call__(self, genome):
        succ = self.space.decode_successors(genome)
        key = succ if succ is not None else ("genome", tuple(np.asarray(genome).tolist()))
        f = self.memo.get(key)
        if f is None:
            if succ is None or succ in self.exclude:
                f = MAX_FITNESS
            else:
                sys_ = LSystem(self.space.alphabet, self.rho.words[0], succ)
                f = fitness(sys_, self.rho)
                if f == 0.0:
                    self.found[succ] = sys_
            self.memo[key] = f
        return key, f


def run_ga(space, cfg: GAConfig, rho: DevSequence | None = None, exclude=frozenset(),
           deadline: float | None = None) -> SearchReport:
    """Search ``space`` until solved, converged or out of time.

    ``exclude`` holds successor tuples that count as failures (used to ask for
    further solutions). ``deadline`` is an absolute ``time.perf_counter``
    bound shared with the caller.
    """
    rho = rho or space.rho
    rng = np.random.default_rng(cfg.seed)
    t0 = time.perf_counter()
    stop = t0 + cfg.time_limit
    if deadline is not None:
        stop = min(stop, deadline)
    ev = _Evaluator(space, rho, exclude)

    def report(best_f, best_key, gen, reason):
        best = None
        if best_key is not None and best_key[0] != "genome":
            best = LSystem(space.alphabet, rho.words[0], best_key)
        return SearchReport(best_f, list(ev.found.values()), gen, time.perf_counter() - t0, reason, best)

    if space.n_genes == 0:
        key, f = ev(np.zeros(0))
        return report(f, key, 0, SOLVED if f == 0 else CONVERGED)

    pop_g, pop_k, pop_f = [], [], []
    seen = set()
    attempts = 0
    while len(pop_g) < cfg.pop and attempts < 20 * cfg.pop:
        attempts += 1
        g = space.random_genome(rng)
        key, f = ev(g)
        if key in seen:
            continue
        seen.add(key)
        pop_g.append(g)
        pop_k.append(key)
        pop_f.append(f)
    order = np.argsort(pop_f, kind="stable")
    pop_g = [pop_g[i] for i in order]
    pop_k = [pop_k[i] for i in order]
    pop_f = [pop_f[i] for i in order]
    best_f = pop_f[0]
    gen_best = 0
    gen = 0
    if best_f == 0:
        return report(best_f, pop_k[0], gen, SOLVED)
    n = space.n_genes
    while True:
        gen += 1
        weights = np.array([1e-12 if f >= MAX_FITNESS else 1.0 / (1.0 + f) for f in pop_f])
        weights /= weights.sum()
        m = len(pop_g)
        max_pairs = m * (m - 1) // 2
        n_pairs = min(max(1, cfg.pop // 2), max_pairs)
        used_pairs = set()
        children = []
        tries = 0
        while len(used_pairs) < n_pairs and tries < 10 * n_pairs:
            tries += 1
            i, j = rng.choice(m, size=2, p=weights)
            if i == j:
                continue
            pair = (min(i, j), max(i, j))
            if pair in used_pairs:
                continue
            used_pairs.add(pair)
            a, b = pop_g[i].copy(), pop_g[j].copy()
            swap = rng.random(n) < cfg.cx
            a[swap], b[swap] = pop_g[j][swap], pop_g[i][swap]
            for child in (a, b):
                for k in np.flatnonzero(rng.random(n) < cfg.mut):
                    child[k] = space.random_gene(k, rng)
                if np.array_equal(child, pop_g[i]) or np.array_equal(child, pop_g[j]):
                    k = rng.integers(n)
                    child[k] = space.random_gene(k, rng)
                children.append(child)
        for child in children:
            key, f = ev(child)
            if key in seen:
                continue
            seen.add(key)
            pop_g.append(child)
            pop_k.append(key)
            pop_f.append(f)
        order = np.argsort(pop_f, kind="stable")[:cfg.pop]
        keep = set(order.tolist())
        for i in range(len(pop_k)):
            if i not in keep:
                seen.discard(pop_k[i])
        pop_g = [pop_g[i] for i in order]
        pop_k = [pop_k[i] for i in order]
        pop_f = [pop_f[i] for i in order]
        if pop_f[0] < best_f:
            best_f = pop_f[0]
            gen_best = gen
        if best_f == 0:
            return report(best_f, pop_k[0], gen, SOLVED)
        if gen >= cfg.min_gens and gen - gen_best >= gen_best:
            return report(best_f, pop_k[0], gen, CONVERGED)
        if cfg.max_gens is not None and gen >= cfg.max_gens:
            return report(best_f, pop_k[0], gen, CONVERGED)
        if time.perf_counter() >= stop:
            return report(best_f, pop_k[0], gen, TIMEOUT)


# -- hyperparameter random search ------------------------------------------------

POP_GRID = tuple(range(10, 126, 5))
CX_GRID = tuple(round(0.6 + 0.05 * i, 2) for i in range(8))
MUT_GRID = (0.0001, 0.001) + tuple(round(0.01 * i, 2) for i in range(1, 21))
START = (60, 0.8, 0.10)


def _step(grid, value, delta):
    i = grid.index(value)
    return grid[min(max(i + delta, 0), len(grid) - 1)]


@dataclass
class TuneTrial:
    cfg: GAConfig
    score: float
    seconds: float


def hyperparameter_search(evaluate, trials: int = 16, max_rounds: int = 50, seed: int | None = 0,
                          start=START, base: GAConfig | None = None):
    """Random local search over (pop, cx, mut) on a fixed grid.

    ``evaluate(cfg)`` returns ``(score, seconds)`` for one configuration,
    lower score being better (e.g. unsolved count plus residual fitness).
    Each round tries ``trials`` neighbours, every parameter moved by at most
    two grid steps; the best trial (fastest among equal scores) replaces the
    current point only if its score is strictly lower. Returns the final
    config and the trial history.
    """
    rng = np.random.default_rng(seed)
    base = base or GAConfig()
    cur = replace(base, pop=start[0], cx=start[1], mut=start[2])
    score, secs = evaluate(cur)
    history = [TuneTrial(cur, score, secs)]
    for _ in range(max_rounds):
        round_trials = []
        for _ in range(trials):
            d = rng.integers(-2, 3, size=3)
            cfg = replace(cur, pop=_step(POP_GRID, cur.pop, int(d[0])),
                          cx=_step(CX_GRID, cur.cx, int(d[1])),
                          mut=_step(MUT_GRID, cur.mut, int(d[2])))
            s, t = evaluate(cfg)
            round_trials.append(TuneTrial(cfg, s, t))
        history.extend(round_trials)
        best = min(round_trials, key=lambda tr: (tr.score, tr.seconds))
        if best.score < score:
            cur, score = best.cfg, best.score
        else:
            break
    return cur, history
