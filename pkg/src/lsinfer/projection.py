"""Level-by-level inference: strip constants, solve, then re-add them.

Level ``k`` keeps the nonconstants and the first ``k`` constant groups (a
group is one constant, except that ``[`` and ``]`` travel together). A
partial solution at level ``k`` is lifted to ``k + 1`` by deciding where the
new group's glyphs go inside each successor. Those insertions are string
variables constrained by the gaps between already placed symbols in every
derivation; arc consistency over the gap equations plays the role of
position certainty, and whatever stays ambiguous is enumerated.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field, replace

from .core import Alphabet, DevSequence, InputError, LSystem, check_nesting, is_compatible
from .encodings import make_space
from .ga import GAConfig, SearchReport, SOLVED, TIMEOUT, run_ga
from .reduction import BoundsState, NoSolution, fixpoint, init_bounds, project_state, reduce
from .scanning import ScanIndex

SOLVED_STATUS, EXHAUSTED, TIMED_OUT = "solved", "exhausted", "timeout"


def constant_groups(constants) -> list[tuple[str, ...]]:
    """Constants in lifting order; ``[`` and ``]`` form one group."""
    groups = []
    for c in constants:
        if c == "]" and "[" in constants:
            continue
        if c == "[" and "]" in constants:
            groups.append(("[", "]"))
        else:
            groups.append((c,))
    return groups


def level_alphabet(alphabet: Alphabet, k: int) -> Alphabet:
    keep = [c for grp in constant_groups(alphabet.constants)[:k] for c in grp]
    return alphabet.restrict(keep)


def strip_constants(rho: DevSequence, k: int) -> DevSequence:
    """Erase every constant group from index ``k`` on. Raises NoSolution on an empty word."""
    groups = constant_groups(rho.alphabet.constants)
    if not 0 <= k <= len(groups):
        raise ValueError(f"level {k} outside 0..{len(groups)}")
    alphabet = level_alphabet(rho.alphabet, k)
    if k == len(groups):
        return rho
    erase = {ord(c): None for grp in groups[k:] for c in grp}
    words = tuple(w.translate(erase) for w in rho.words)
    if any(not w for w in words):
        raise NoSolution("a word vanishes when constants are stripped")
    return DevSequence(words, alphabet)


@dataclass(frozen=True)
class PartialSolution:
    """Successors (aligned with the level alphabet) at constant level ``level``."""

    level: int
    system: LSystem

    @property
    def successors(self) -> dict[str, str]:
        return {g: self.system.succ(g) for g in self.system.alphabet.nonconstants}


class LiftOverflow(Exception):
    """Too many placements to enumerate; carries per-symbol length ranges."""

    def __init__(self, len_lo: dict, len_hi: dict):
        super().__init__("placement enumeration cap reached")
        self.len_lo = len_lo
        self.len_hi = len_hi


# -- the lifting problem -----------------------------------------------------------

class LiftProblem:
    """Gap equations for inserting one constant group into level-k successors.

    Variable ``(A, j)`` is the string of new glyphs placed before the j-th
    symbol of succ_k(A) (j = len means after the last one).
    """

    def __init__(self, partial: PartialSolution, rho_next: DevSequence, state: BoundsState | None = None):
        self.partial = partial
        self.rho = rho_next
        self.alphabet = rho_next.alphabet
        old = partial.system.alphabet
        self.new = tuple(c for c in self.alphabet.constants if c not in old.index)
        newset = set(self.new)
        self.succ = partial.successors
        self.vars: list[tuple[str, int]] = []
        self.var_id: dict[tuple[str, int], int] = {}
        tokens = {}
        for g in self.alphabet.nonconstants:
            s = self.succ[g]
            toks = []
            for j in range(len(s) + 1):
                vid = len(self.vars)
                self.vars.append((g, j))
                self.var_id[(g, j)] = vid
                toks.append(vid)
                if j < len(s):
                    toks.append(("s", s[j]))
            tokens[g] = toks
        self.maxlen = [1 << 30] * len(self.vars)
        if state is not None:
            for vid, (g, _) in enumerate(self.vars):
                a = self.alphabet.index[g]
                self.maxlen[vid] = int(sum(state.g_max[a, self.alphabet.index[c]] for c in self.new))
        self.state = state
        eqs: dict[tuple, None] = {}
        self.occ_vars: list[list[list[int]]] = []
        words = rho_next.words
        for i in range(len(words) - 1):
            s, t = words[i], words[i + 1]
            occ = []
            template = []
            for ch in s:
                if ch in newset or self.alphabet.is_constant(ch):
                    template.append(("s", ch) if ch not in newset else ch)
                    occ.append([])
                else:
                    template.extend(tokens[ch])
                    occ.append([x for x in tokens[ch] if isinstance(x, int)])
            self.occ_vars.append(occ)
            items: list = []
            gap_start = 0
            p = 0
            n = len(t)
            for tok in template:
                if isinstance(tok, tuple):
                    while p < n and t[p] in newset:
                        p += 1
                    if p >= n or t[p] != tok[1]:
                        raise NoSolution("lifted word does not match the level solution")
                    eqs[(tuple(items), t[gap_start:p])] = None
                    items = []
                    p += 1
                    gap_start = p
                else:
                    items.append(tok)
            if any(ch not in newset for ch in t[p:]):
                raise NoSolution("lifted word has extra symbols")
            eqs[(tuple(items), t[gap_start:])] = None
        self.equations = list(eqs)
        self.by_var: dict[int, list[int]] = {}
        for e, (items, _) in enumerate(self.equations):
            for it in items:
                if isinstance(it, int):
                    self.by_var.setdefault(it, []).append(e)

    # GAC over one equation ------------------------------------------------------
    def _supports(self, e: int, dom: list):
        items, gap = self.equations[e]
        L = len(gap)
        m = len(items)

        def step(it, p):
            if isinstance(it, str):
                return [p + 1] if p < L and gap[p] == it else []
            d = dom[it]
            if d is None:
                return range(p, min(L, p + self.maxlen[it]) + 1)
            return [p + len(v) for v in d if gap.startswith(v, p)]

        fwd = [set() for _ in range(m + 1)]
        fwd[0].add(0)
        for j, it in enumerate(items):
            for p in fwd[j]:
                fwd[j + 1].update(step(it, p))
        if L not in fwd[m]:
            return None
        bwd = [set() for _ in range(m + 1)]
        bwd[m].add(L)
        for j in range(m - 1, -1, -1):
            for p in fwd[j]:
                if any(q in bwd[j + 1] for q in step(items[j], p)):
                    bwd[j].add(p)
        out: dict[int, set] = {}
        for j, it in enumerate(items):
            if isinstance(it, str):
                continue
            vals = out.setdefault(it, set())
            for p in bwd[j]:
                for q in step(it, p):
                    if q in bwd[j + 1]:
                        vals.add(gap[p:q])
        return out

    def propagate(self, dom: list, todo=None) -> bool:
        """Shrink domains to arc consistency; False if some domain empties."""
        queue = deque(range(len(self.equations)) if todo is None else todo)
        queued = set(queue)
        while queue:
            e = queue.popleft()
            queued.discard(e)
            sup = self._supports(e, dom)
            if sup is None:
                return False
            for v, vals in sup.items():
                cur = dom[v]
                new = vals if cur is None else cur & vals
                if not new:
                    return False
                if cur is None or len(new) < len(cur):
                    dom[v] = new
                    for e2 in self.by_var.get(v, ()):
                        if e2 not in queued:
                            queue.append(e2)
                            queued.add(e2)
        return True

    def initial_domains(self) -> list | None:
        dom: list = [None] * len(self.vars)
        if self.state is not None:
            for g in self.alphabet.nonconstants:
                known = self.state.known(g)
                if known is not None:
                    vals = self._split(g, known)
                    if vals is None:
                        return None
                    for j, v in enumerate(vals):
                        dom[self.var_id[(g, j)]] = {v}
        for vid in range(len(self.vars)):
            if vid not in self.by_var and dom[vid] is None:
                dom[vid] = {""}
        return dom if self.propagate(dom) else None

    def _split(self, g: str, full: str):
        """Insertion strings that turn succ_k(g) into ``full`` (None if impossible)."""
        newset = set(self.new)
        base = self.succ[g]
        if "".join(ch for ch in full if ch not in newset) != base:
            return None
        parts, cur = [], []
        for ch in full:
            if ch in newset:
                cur.append(ch)
            else:
                parts.append("".join(cur))
                cur = []
        parts.append("".join(cur))
        return parts

    def assemble(self, dom: list) -> LSystem:
        succ = []
        for g in self.alphabet.symbols:
            if self.alphabet.is_constant(g):
                succ.append(g)
                continue
            s = self.succ[g]
            parts = []
            for j in range(len(s) + 1):
                parts.append(next(iter(dom[self.var_id[(g, j)]])))
                if j < len(s):
                    parts.append(s[j])
            succ.append("".join(parts))
        return LSystem(self.alphabet, self.rho.words[0], tuple(succ))

    def acceptable(self, system: LSystem) -> bool:
        nonconst = [system.succ(g) for g in self.alphabet.nonconstants]
        if "[" in self.new and not all(check_nesting(s) for s in nonconst):
            return False
        if self.state is not None:
            floor = self.state.floor
            if any(len(system.succ(g)) < floor for g in self.alphabet.nonconstants):
                return False
            if self.state.violations(system):
                return False
        return is_compatible(system, self.rho)

    def solve(self, cap: int = 10_000) -> list[LSystem]:
        """All acceptable completions; raises LiftOverflow past ``cap``."""
        dom = self.initial_domains()
        if dom is None:
            return []
        out: list[LSystem] = []
        budget = [cap * 10]

        def rec(dom):
            budget[0] -= 1
            if budget[0] < 0:
                raise self._overflow(dom)
            open_ = [v for v, d in enumerate(dom) if len(d) > 1]
            if not open_:
                sys_ = self.assemble(dom)
                if self.acceptable(sys_):
                    out.append(sys_)
                    if len(out) > cap:
                        raise self._overflow(dom)
                return
            v = min(open_, key=lambda x: (len(dom[x]), x))
            for val in sorted(dom[v], key=lambda s: (len(s), s)):
                child = list(dom)
                child[v] = {val}
                if self.propagate(child, self.by_var.get(v, [])):
                    rec(child)

        rec(dom)
        return out

    def _overflow(self, dom) -> LiftOverflow:
        lo, hi = {}, {}
        for g in self.alphabet.nonconstants:
            ds = [dom[self.var_id[(g, j)]] for j in range(len(self.succ[g]) + 1)]
            lo[g] = len(self.succ[g]) + sum(min(map(len, d)) for d in ds)
            hi[g] = len(self.succ[g]) + sum(max(map(len, d)) for d in ds)
        return LiftOverflow(lo, hi)

    def certainty(self, dom: list | None = None) -> list[list[bool]]:
        """Per derivation, whether each position of w_i has a fully fixed image."""
        if dom is None:
            dom = self.initial_domains() or [set() for _ in self.vars]
        return [[all(len(dom[v]) == 1 for v in occ) for occ in per_word] for per_word in self.occ_vars]


def lift_constant(partial: PartialSolution, rho: DevSequence, state: BoundsState | None = None,
                  cap: int = 10_000) -> list[PartialSolution]:
    """Extend ``partial`` by the next constant group of ``rho``'s alphabet.

    ``rho`` is the full sequence; it is stripped to the next level here.
    Returns every consistent placement (possibly none). Raises
    :class:`LiftOverflow` when more than ``cap`` placements remain.
    """
    nxt = strip_constants(rho, partial.level + 1)
    try:
        problem = LiftProblem(partial, nxt, state)
    except NoSolution:
        return []
    return [PartialSolution(partial.level + 1, s) for s in problem.solve(cap)]


def certainty_map(partial: PartialSolution, rho: DevSequence, state: BoundsState | None = None):
    """Position certainty of every w_i after propagation, for the next lift."""
    nxt = strip_constants(rho, partial.level + 1)
    return LiftProblem(partial, nxt, state).certainty()


# -- driver ---------------------------------------------------------------------------------

@dataclass
class InferResult:
    system: LSystem | None
    status: str
    reports: list[SearchReport] = field(default_factory=list)
    wall_time: float = 0.0
    partials: int = 0
    message: str = ""

    @property
    def generations(self) -> int:
        return sum(r.generations for r in self.reports)

    @property
    def best_fitness(self) -> float:
        return min((r.best_fitness for r in self.reports), default=float("nan"))


def _with_constants(rho: DevSequence, constants) -> DevSequence:
    if constants is None:
        return rho
    consts = "".join(constants)
    present = set("".join(rho.words))
    extra = set(consts) - present
    if extra:
        raise InputError(f"constants {''.join(sorted(extra))!r} do not occur in the sequence")
    return DevSequence.of(rho.words, consts)


def infer(rho: DevSequence, constants=None, scheme: str = "ml", cfg: GAConfig | None = None,
          queue: str = "fifo", lift_cap: int = 10_000, time_limit: float | None = None) -> InferResult:
    """Find a D0L-system whose developmental sequence is exactly ``rho``.

    ``time_limit`` bounds the whole run (defaults to ``cfg.time_limit``).
    The result's status is ``solved``, ``exhausted`` (provably or after all
    searches converged) or ``timeout``.
    """
    t0 = time.perf_counter()
    cfg = cfg or GAConfig.for_scheme(scheme)
    deadline = t0 + (cfg.time_limit if time_limit is None else time_limit)
    rho = _with_constants(rho, constants)
    alphabet = rho.alphabet
    result = InferResult(None, EXHAUSTED)

    def done(status, system=None, message=""):
        result.status, result.system, result.message = status, system, message
        result.wall_time = time.perf_counter() - t0
        return result

    unseen = ScanIndex(rho).unseen()
    if unseen:
        return done(EXHAUSTED, message="no occurrence to learn from for " + "".join(unseen))
    groups = constant_groups(alphabet.constants)
    top = len(groups)
    try:
        full = reduce(rho)
    except NoSolution as exc:
        return done(EXHAUSTED, message=str(exc))

    levels: dict[int, tuple[DevSequence, BoundsState]] = {top: (rho, full)}

    def level(k):
        if k not in levels:
            rk = strip_constants(rho, k)
            levels[k] = (rk, fixpoint(project_state(full, rk, floor=0), rk))
        return levels[k]

    start = 0
    while start < top:
        try:
            level(start)
            break
        except NoSolution:
            start += 1

    pending: deque[PartialSolution] = deque()
    found_at: dict[int, set] = {}
    runs = [0]

    def search(k, state=None):
        rk, sk = level(k)
        space = make_space(scheme, rk, state or sk)
        seed = None if cfg.seed is None else cfg.seed + runs[0]
        runs[0] += 1
        exclude = frozenset(found_at.setdefault(k, set()))
        rep = run_ga(space, replace(cfg, seed=seed), rk, exclude, deadline)
        result.reports.append(rep)
        fresh = [s for s in rep.solutions if s.successors not in found_at[k]]
        for s in fresh:
            found_at[k].add(s.successors)
            pending.append(PartialSolution(k, s))
        return rep, fresh

    try:
        rep, _ = search(start)
        while True:
            while pending:
                if time.perf_counter() > deadline:
                    return done(TIMED_OUT)
                p = pending.popleft() if queue == "fifo" else pending.pop()
                result.partials += 1
                if p.level == top:
                    if not is_compatible(p.system, rho):  # pragma: no cover - defensive
                        raise AssertionError("returned system fails re-derivation")
                    return done(SOLVED_STATUS, p.system)
                _, state_next = level(p.level + 1)
                try:
                    lifted = lift_constant(p, rho, state_next, lift_cap)
                except LiftOverflow as ov:
                    narrowed = state_next.copy()
                    rk = level(p.level + 1)[0]
                    for g in rk.alphabet.nonconstants:
                        a = narrowed.idx(g)
                        narrowed.len_min[a] = max(narrowed.len_min[a], ov.len_lo[g])
                        narrowed.len_max[a] = min(narrowed.len_max[a], ov.len_hi[g])
                    try:
                        narrowed = fixpoint(narrowed, rk)
                    except NoSolution:
                        continue
                    search(p.level + 1, narrowed)
                    continue
                for q in lifted:
                    pending.append(q)
            if time.perf_counter() > deadline:
                return done(TIMED_OUT)
            if rep.reason != SOLVED:
                return done(TIMED_OUT if rep.reason == TIMEOUT else EXHAUSTED)
            rep, fresh = search(start)
            if not fresh and rep.reason != SOLVED:
                return done(TIMED_OUT if rep.reason == TIMEOUT else EXHAUSTED)
    except NoSolution as exc:
        return done(EXHAUSTED, message=str(exc))
