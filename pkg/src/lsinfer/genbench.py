"""Random D0L-systems in the style of hand-made models, and benchmark runs.

Successors mix a few nonconstants with turtle constants: the chance of
emitting a nonconstant starts at 0.8 and drops by 0.2 for every nonconstant
already emitted in a row. Branches are kept nested and every ``[`` is
followed by a turn.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .core import Alphabet, DevSequence, LSystem, TURTLE_ORDER, derive_step, order_constants
from .ga import GAConfig
from .projection import SOLVED_STATUS, infer

DIRECTIONS = "+-&^\\/|"
DEFAULT_CONSTANTS = "[]+-F"
_POOL = ([chr(c) for c in range(ord("A"), ord("Z") + 1) if chr(c) != "F"]
         + [chr(c) for c in range(ord("a"), ord("z") + 1) if chr(c) != "f"]
         + [chr(c) for c in range(0x3B1, 0x3CA)]
         + [chr(c) for c in range(0x391, 0x3AA) if c != 0x3A2])


def symbol_names(n: int) -> tuple[str, ...]:
    if n > len(_POOL):
        raise ValueError(f"at most {len(_POOL)} nonconstants are supported")
    return tuple(_POOL[:n])


@dataclass(frozen=True)
class GeneratorConfig:
    size: int = 5
    constants: str = DEFAULT_CONSTANTS
    max_len: int = 10
    max_axiom: int = 4
    base_prob: float = 0.8
    decay: float = 0.2
    seed: int | None = 0
    retries: int = 1000
    max_word: int = 200_000

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("need at least one nonconstant")
        if self.max_len < 1 or self.max_axiom < 1:
            raise ValueError("length bounds must be positive")


class GenerationError(RuntimeError):
    pass


def nonconstant_prob(run: int, base: float = 0.8, decay: float = 0.2) -> float:
    """Chance of a nonconstant after ``run`` consecutive nonconstants."""
    return min(1.0, max(0.0, base - decay * run))


def _successor(rng, names, consts, cfg: GeneratorConfig) -> str:
    target = int(rng.integers(1, cfg.max_len + 1))
    plain = [c for c in consts if c not in "[]"]
    turns = [c for c in consts if c in DIRECTIONS]
    branching = "[" in consts and "]" in consts
    out: list[str] = []
    run = depth = 0
    while len(out) < target:
        pool = list(plain)
        if branching:
            pool.append("[")
            if depth:
                pool.append("]")
        if not pool or rng.random() < nonconstant_prob(run, cfg.base_prob, cfg.decay):
            out.append(names[int(rng.integers(len(names)))])
            run += 1
            continue
        run = 0
        c = pool[int(rng.integers(len(pool)))]
        out.append(c)
        if c == "[":
            depth += 1
            if turns:
                out.append(turns[int(rng.integers(len(turns)))])
        elif c == "]":
            depth -= 1
    out.extend("]" * depth)
    return "".join(out)


def validation_length(system: LSystem, cap: int = 200_000) -> int | None:
    """Least n such that every nonconstant occurs in w_1..w_{n-1}, or None.

    None when some nonconstant never appears within |nonconstants| words
    or a word grows past ``cap`` before that.
    """
    want = set(system.alphabet.nonconstants)
    seen: set[str] = set()
    w = system.axiom
    for i in range(1, len(want) + 1):
        seen.update(w)
        if want <= seen:
            return i + 1
        w = derive_step(system, w)
        if len(w) > cap:
            return None
    return None


def generate_lsystem(cfg: GeneratorConfig, rng: np.random.Generator | None = None) -> LSystem:
    """A random valid system; raises GenerationError after ``cfg.retries`` tries."""
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    names = symbol_names(cfg.size)
    consts = order_constants(cfg.constants)
    for c in consts:
        if c not in TURTLE_ORDER:
            raise ValueError(f"unsupported constant {c!r}")
    alphabet = Alphabet(names, consts)
    for _ in range(cfg.retries):
        axiom = "".join(names[int(j)] for j in rng.integers(len(names), size=int(rng.integers(1, cfg.max_axiom + 1))))
        rules = {g: _successor(rng, names, consts, cfg) for g in names}
        system = LSystem.from_rules(alphabet, axiom, rules)
        if validation_length(system, cfg.max_word) is not None:
            return system
    raise GenerationError(f"no valid system after {cfg.retries} attempts")


def benchmark_sequence(system: LSystem, min_words: int = 3, extra: int = 1,
                       cap: int = 200_000) -> DevSequence:
    """Developmental sequence used to benchmark ``system``.

    The shortest sequence in which every nonconstant occurs before the last
    word (at least ``min_words`` long), plus ``extra`` words, never more than
    |nonconstants| + 1 words.
    """
    n = validation_length(system, cap)
    if n is None:
        raise GenerationError("system fails the occurrence validation")
    n = max(min(max(n, min_words) + extra, len(system.alphabet.nonconstants) + 1), n)
    words = [system.axiom]
    while len(words) < n:
        words.append(derive_step(system, words[-1]))
    return DevSequence(tuple(words), system.alphabet)


# -- benchmarking ---------------------------------------------------------------------

@dataclass
class BenchmarkRecord:
    id: str
    size: int
    scheme: str
    solved: bool
    ms: int
    generations: int
    seed: int | None

    def line(self) -> str:
        return "\t".join(str(x) for x in (self.id, self.size, self.scheme, int(self.solved),
                                          self.ms, self.generations, self.seed))


@dataclass
class BenchmarkSummary:
    sizes: list[int] = field(default_factory=list)
    sr: list[float] = field(default_factory=list)
    mtts: list[float] = field(default_factory=list)
    trend: list[float] = field(default_factory=list)

    def text(self) -> str:
        lines = ["# size\tSR%\tMTTS_s"]
        for v, s, m in zip(self.sizes, self.sr, self.mtts):
            lines.append(f"# {v}\t{100 * s:.1f}\t{m:.3f}")
        if self.trend:
            lines.append(f"# trend degree {len(self.trend) - 1} (s): " + " ".join(f"{c:.6g}" for c in self.trend))
        return "\n".join(lines)


def _one(args):
    size, idx, scheme, gen_cfg, ga_cfg = args
    seed = None if gen_cfg.seed is None else gen_cfg.seed * 1_000_003 + size * 1009 + idx
    system = generate_lsystem(replace(gen_cfg, size=size, seed=seed))
    rho = benchmark_sequence(system)
    t0 = time.perf_counter()
    res = infer(rho, scheme=scheme, cfg=ga_cfg)
    ms = int(round(1000 * (time.perf_counter() - t0)))
    ok = res.status == SOLVED_STATUS and res.system is not None
    return BenchmarkRecord(f"v{size}-{idx}", size, scheme, ok, ms, res.generations, seed)


def summarize(records: list[BenchmarkRecord]) -> BenchmarkSummary:
    out = BenchmarkSummary()
    for v in sorted({r.size for r in records}):
        rs = [r for r in records if r.size == v]
        solved = [r for r in rs if r.solved]
        out.sizes.append(v)
        out.sr.append(len(solved) / len(rs))
        out.mtts.append(float(np.mean([r.ms for r in solved]) / 1000) if solved else float("nan"))
    good = [(v, m) for v, m in zip(out.sizes, out.mtts) if m == m]
    if len(good) >= 2:
        x, y = zip(*good)
        out.trend = [float(c) for c in np.polyfit(x, y, min(3, len(good) - 1))]
    return out


def run_benchmark(sizes, count: int, scheme: str = "ml", gen_cfg: GeneratorConfig | None = None,
                  ga_cfg: GAConfig | None = None, jobs: int = 1):
    """Generate ``count`` systems per size, infer each, return records and summary."""
    gen_cfg = gen_cfg or GeneratorConfig()
    ga_cfg = ga_cfg or GAConfig.for_scheme(scheme)
    tasks = [(v, i, scheme, gen_cfg, ga_cfg) for v in sizes for i in range(count)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_one, tasks))
    else:
        records = [_one(t) for t in tasks]
    return records, summarize(records)


def records_json(records: list[BenchmarkRecord], summary: BenchmarkSummary) -> str:
    return json.dumps({"records": [asdict(r) for r in records], "summary": asdict(summary)}, indent=2)
