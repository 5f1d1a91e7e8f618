"""Genome layouts and decoders for the six search schemes.

Each scheme is a :class:`SearchSpace`: a fixed number of genes with per-gene
ranges plus a ``decode`` that turns a genome into a candidate system (or None
when the genome is rejected outright). Candidates are graded by the GA's
fitness, so the decoders here are lenient where the scheme allows it.

=========  ==========================================================
``osos1``  successor symbols drawn from corpus frequencies, 1 symbol context
``osos2``  same with 2 symbols of context
``g``      one integer gene per growth-matrix entry
``l``      one integer gene per successor length
``mg``     free variables of the row-reduced system  Y M = Z (per column)
``ml``     free variables of the row-reduced system  Y X = z
=========  ==========================================================
"""
from __future__ import annotations

from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from math import lcm

import numpy as np

from .core import DevSequence, LSystem, check_nesting
from .reduction import BoundsState, NoSolution
from .scanning import ScanError, ScanIndex, scan_successors

SCHEMES = ("osos1", "osos2", "g", "l", "mg", "ml")

#: The no-symbol sentinel of symbol-level genomes.
NO_SYMBOL = None


def check_scheme(name: str) -> str:
    if name not in SCHEMES:
        raise ValueError(f"unknown encoding {name!r}; choose from {', '.join(SCHEMES)}")
    return name


# -- symbol-level (osos) ---------------------------------------------------------

class SymbolDistribution:
    """Next-symbol weights estimated from the words of a sequence.

    ``context`` previous symbols condition the estimate; unseen contexts fall
    back to shorter ones down to plain symbol frequencies.
    """

    def __init__(self, rho: DevSequence, context: int = 1):
        self.alphabet = rho.alphabet
        self.context = context
        self.counts: dict[str, Counter] = {}
        for w in rho.words:
            for n in range(context + 1):
                for j in range(n, len(w)):
                    self.counts.setdefault(w[j - n:j], Counter())[w[j]] += 1

    def weights(self, history: str) -> dict[str, float]:
        """Normalized weights given the symbols decoded so far."""
        for n in range(min(self.context, len(history)), -1, -1):
            ctx = history[len(history) - n:] if n else ""
            c = self.counts.get(ctx)
            if c:
                total = sum(c.values())
                return {g: v / total for g, v in c.items()}
        return {}  # pragma: no cover - unigram counts are never empty


def _pick(options: list, weights: list[float], gene: float):
    """Map a real gene onto cumulative weight intervals (ties go low)."""
    cum = list(accumulate(weights))
    j = bisect_left(cum, gene * cum[-1])
    return options[min(j, len(options) - 1)]


def osos_decode(genes, state: BoundsState, dist: SymbolDistribution, layout) -> tuple[str, ...]:
    """Successor tuple (over ``state.alphabet.symbols``) for a real genome."""
    alphabet = state.alphabet
    out = []
    pos = 0
    for g in alphabet.symbols:
        if alphabet.is_constant(g):
            out.append(g)
            continue
        a = alphabet.index[g]
        pre, suf, n_mid = layout[g]
        lo = int(state.len_min[a])
        cap = state.g_max[a]
        used = Counter(pre) + Counter(suf)
        word = list(pre)
        for gene in genes[pos:pos + n_mid]:
            w = dist.weights("".join(word))
            opts = [s for s in w if used[s] < cap[alphabet.index[s]]]
            wts = [w[s] for s in opts]
            if len(word) + len(suf) >= lo:
                opts.append(NO_SYMBOL)
                wts.append(1.0 / len(opts) if len(opts) > 1 else 1.0)
            if not opts:
                break
            s = _pick(opts, wts, float(gene))
            if s is NO_SYMBOL:
                continue
            used[s] += 1
            word.append(s)
        pos += n_mid
        out.append("".join(word) + suf)
    return tuple(out)


# -- matrix systems --------------------------------------------------------------

@dataclass(frozen=True)
class ReducedSystem:
    """Row-reduced integer system: every pivot is an affine form of the free
    variables, ``(const + coeffs . free) / den``."""

    unknowns: tuple[int, ...]
    free: tuple[int, ...]
    pivots: tuple[int, ...]
    const: tuple[int, ...]
    coeffs: tuple[tuple[int, ...], ...]
    den: tuple[int, ...]

    def solve(self, free_values) -> dict[int, int] | None:
        """Full integer assignment, or None if some pivot is fractional."""
        vals = dict(zip(self.free, (int(v) for v in free_values)))
        for p, c0, cs, d in zip(self.pivots, self.const, self.coeffs, self.den):
            num = c0 + sum(c * vals[f] for c, f in zip(cs, self.free))
            if num % d:
                return None
            vals[p] = num // d
        return vals


@dataclass(frozen=True)
class Unique:
    """A linear system with exactly one solution."""

    values: dict


def _rref_solve(A: list[list[Fraction]], b: list[Fraction], unknowns: list[int]):
    """Exact Gauss-Jordan on [A | b]; returns ReducedSystem or Unique."""
    rows = [list(r) + [v] for r, v in zip(A, b)]
    ncol = len(unknowns)
    piv_cols = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            raise NoSolution("linear system is inconsistent")
    free_cols = [c for c in range(ncol) if c not in set(piv_cols)]
    if not free_cols:
        vals = {}
        for i, c in enumerate(piv_cols):
            v = rows[i][-1]
            if v.denominator != 1:
                raise NoSolution("unique rational solution is not integral")
            vals[unknowns[c]] = int(v)
        return Unique(vals)
    consts, coeffs, dens = [], [], []
    for i, c in enumerate(piv_cols):
        terms = [rows[i][-1]] + [-rows[i][f] for f in free_cols]
        d = lcm(*(t.denominator for t in terms))
        consts.append(int(terms[0] * d))
        coeffs.append(tuple(int(t * d) for t in terms[1:]))
        dens.append(d)
    return ReducedSystem(tuple(unknowns), tuple(unknowns[f] for f in free_cols),
                         tuple(unknowns[c] for c in piv_cols),
                         tuple(consts), tuple(coeffs), tuple(dens))


def build_matrix_system(rho: DevSequence, mode: str = "lengths", state: BoundsState | None = None,
                        column: int | None = None):
    """Linear system for successor lengths (``Y X = z``) or one growth column.

    Constants are substituted, and so are unknowns that ``state`` pins.
    ``mode='growth'`` needs ``column`` (the target symbol index).
    Returns :class:`Unique` or :class:`ReducedSystem`; raises NoSolution.
    """
    alphabet = rho.alphabet
    P = np.stack([alphabet.parikh(w) for w in rho.words]).astype(object)
    Y = P[:-1]
    if mode == "lengths":
        rhs = P[1:].sum(axis=1)
        lo = state.len_min if state is not None else None
        hi = state.len_max if state is not None else None
    elif mode == "growth":
        if column is None:
            raise ValueError("growth mode needs a column")
        rhs = P[1:, column]
        lo = state.g_min[:, column] if state is not None else None
        hi = state.g_max[:, column] if state is not None else None
    else:
        raise ValueError(f"unknown mode {mode!r}")
    known = {}
    for g in alphabet.constants:
        a = alphabet.index[g]
        known[a] = 1 if mode == "lengths" else int(a == column)
    if state is not None:
        for a in range(alphabet.size):
            if a not in known and lo[a] == hi[a]:
                known[a] = int(lo[a])
    unknowns = [a for a in range(alphabet.size) if a not in known]
    b = [Fraction(int(rhs[i] - sum(Y[i, a] * v for a, v in known.items()))) for i in range(len(Y))]
    A = [[Fraction(int(Y[i, a])) for a in unknowns] for i in range(len(Y))]
    if not unknowns:
        if any(v != 0 for v in b):
            raise NoSolution("pinned values violate the linear system")
        return Unique(dict(known))
    res = _rref_solve(A, b, unknowns)
    if isinstance(res, Unique):
        vals = {**known, **res.values}
        if state is not None and any(not lo[a] <= v <= hi[a] for a, v in vals.items()):
            raise NoSolution("unique solution outside the bounds")
        if any(v < 0 for v in vals.values()):
            raise NoSolution("unique solution is negative")
        return Unique(vals)
    return res


# -- search spaces -----------------------------------------------------------------

class SearchSpace:
    """Genome layout plus decoder for one scheme at one alphabet level."""

    scheme = "?"
    real = False

    def __init__(self, rho: DevSequence, state: BoundsState):
        self.rho = rho
        self.state = state
        self.alphabet = rho.alphabet
        self.lo = np.zeros(0, dtype=np.int64)
        self.hi = np.zeros(0, dtype=np.int64)
        self.index = ScanIndex(rho)
        self.allow_empty = state.floor == 0

    @property
    def n_genes(self) -> int:
        return int(self.lo.size)

    def random_genome(self, rng: np.random.Generator) -> np.ndarray:
        if self.real:
            return rng.random(self.n_genes)
        return rng.integers(self.lo, self.hi + 1)

    def random_gene(self, j: int, rng: np.random.Generator):
        if self.real:
            return rng.random()
        return rng.integers(self.lo[j], self.hi[j] + 1)

    def decode_successors(self, genome) -> tuple[str, ...] | None:
        raise NotImplementedError

    def decode(self, genome) -> LSystem | None:
        succ = self.decode_successors(genome)
        if succ is None:
            return None
        return LSystem(self.alphabet, self.rho.words[0], succ)

    def genome_for(self, system: LSystem) -> np.ndarray | None:
        """A genome decoding to ``system`` (integer schemes), if in range."""
        return None


def _read_checked(space: SearchSpace, lens) -> tuple[str, ...] | None:
    if not space.allow_empty and (np.asarray(lens) < 1).any():
        return None
    succ = space.index.read(lens)
    if succ is None:
        return None
    nc = len(space.alphabet.nonconstants)
    if "[" in space.alphabet.constants and not all(check_nesting(s) for s in succ[:nc]):
        return None
    return succ


class OsosSpace(SearchSpace):
    real = True

    def __init__(self, rho, state, context: int):
        super().__init__(rho, state)
        self.scheme = f"osos{context}"
        self.dist = SymbolDistribution(rho, context)
        self.layout = {}
        n = 0
        for g in self.alphabet.nonconstants:
            a = self.alphabet.index[g]
            pre, suf = state.pre[g], state.suf[g]
            if len(pre) + len(suf) > state.len_min[a]:
                suf = ""
            mid = int(state.len_max[a]) - len(pre) - len(suf)
            self.layout[g] = (pre, suf, mid)
            n += mid
        self.lo = np.zeros(n)
        self.hi = np.ones(n)

    def decode_successors(self, genome):
        succ = osos_decode(genome, self.state, self.dist, self.layout)
        if not self.allow_empty and not all(succ):
            return None
        return succ


class LengthSpace(SearchSpace):
    scheme = "l"

    def __init__(self, rho, state):
        super().__init__(rho, state)
        self.free = [self.alphabet.index[g] for g in self.alphabet.nonconstants
                     if state.len_min[self.alphabet.index[g]] < state.len_max[self.alphabet.index[g]]]
        self.base = state.len_min.copy()
        self.lo = state.len_min[self.free].astype(np.int64)
        self.hi = state.len_max[self.free].astype(np.int64)

    def lens(self, genome) -> np.ndarray:
        L = self.base.copy()
        L[self.free] = genome
        return L

    def decode_successors(self, genome):
        return _read_checked(self, self.lens(genome))

    def genome_for(self, system):
        return system.lengths[self.free]


class GrowthSpace(SearchSpace):
    scheme = "g"

    def __init__(self, rho, state):
        super().__init__(rho, state)
        k = self.alphabet.size
        nc = len(self.alphabet.nonconstants)
        cells = [(a, b) for a in range(nc) for b in range(k) if state.g_min[a, b] < state.g_max[a, b]]
        self.cells = tuple(zip(*cells)) if cells else ((), ())
        self.base = state.g_min.copy()
        self.lo = np.array([state.g_min[c] for c in cells], dtype=np.int64)
        self.hi = np.array([state.g_max[c] for c in cells], dtype=np.int64)

    def matrix(self, genome) -> np.ndarray:
        M = self.base.copy()
        if len(genome):
            M[self.cells] = genome
        return M

    def decode_matrix(self, M):
        succ = _read_checked(self, M.sum(axis=1))
        if succ is None:
            return None
        idx = self.alphabet.index
        for a, s in enumerate(succ[:len(self.alphabet.nonconstants)]):
            row = M[a]
            if sum(row) != len(s):
                return None  # pragma: no cover - lengths are row sums
            for ch in set(s):
                if s.count(ch) != row[idx[ch]]:
                    return None
        return succ

    def decode_successors(self, genome):
        return self.decode_matrix(self.matrix(genome))

    def genome_for(self, system):
        from .core import growth_matrix
        M = growth_matrix(system)
        return M[self.cells] if self.cells[0] else np.zeros(0, dtype=np.int64)


class MatrixLengthSpace(LengthSpace):
    scheme = "ml"

    def __init__(self, rho, state):
        SearchSpace.__init__(self, rho, state)
        self.system = build_matrix_system(rho, "lengths", state)
        self.base = state.len_min.copy()
        if isinstance(self.system, Unique):
            for a, v in self.system.values.items():
                self.base[a] = v
            self.free = []
        else:
            for a in range(self.alphabet.size):
                if a not in self.system.unknowns:
                    self.base[a] = state.len_min[a]
            self.free = list(self.system.free)
        self.lo = state.len_min[self.free].astype(np.int64)
        self.hi = state.len_max[self.free].astype(np.int64)

    def lens(self, genome):
        L = self.base.copy()
        if isinstance(self.system, Unique):
            return L
        vals = self.system.solve(genome)
        if vals is None:
            return None
        lo, hi = self.state.len_min, self.state.len_max
        for a, v in vals.items():
            if not lo[a] <= v <= hi[a]:
                return None
            L[a] = v
        return L

    def decode_successors(self, genome):
        L = self.lens(genome)
        if L is None:
            return None
        return _read_checked(self, L)


class MatrixGrowthSpace(GrowthSpace):
    scheme = "mg"

    def __init__(self, rho, state):
        SearchSpace.__init__(self, rho, state)
        self.base = state.g_min.copy()
        self.columns = []
        lo, hi = [], []
        for b in range(self.alphabet.size):
            rs = build_matrix_system(rho, "growth", state, column=b)
            if isinstance(rs, Unique):
                for a, v in rs.values.items():
                    self.base[a, b] = v
                continue
            self.columns.append((b, rs))
            for f in rs.free:
                lo.append(state.g_min[f, b])
                hi.append(state.g_max[f, b])
        self.lo = np.array(lo, dtype=np.int64)
        self.hi = np.array(hi, dtype=np.int64)

    def matrix(self, genome):
        M = self.base.copy()
        gmin, gmax = self.state.g_min, self.state.g_max
        pos = 0
        for b, rs in self.columns:
            n = len(rs.free)
            vals = rs.solve(genome[pos:pos + n])
            pos += n
            if vals is None:
                return None
            for a, v in vals.items():
                if not gmin[a, b] <= v <= gmax[a, b]:
                    return None
                M[a, b] = v
        return M

    def decode_successors(self, genome):
        M = self.matrix(genome)
        if M is None:
            return None
        return self.decode_matrix(M)

    def genome_for(self, system):
        from .core import growth_matrix
        M = growth_matrix(system)
        return np.array([M[f, b] for b, rs in self.columns for f in rs.free], dtype=np.int64)


def make_space(scheme: str, rho: DevSequence, state: BoundsState) -> SearchSpace:
    """Build the search space of ``scheme`` for ``rho`` under ``state``."""
    check_scheme(scheme)
    if scheme == "osos1":
        return OsosSpace(rho, state, 1)
    if scheme == "osos2":
        return OsosSpace(rho, state, 2)
    return {"g": GrowthSpace, "l": LengthSpace, "mg": MatrixGrowthSpace,
            "ml": MatrixLengthSpace}[scheme](rho, state)


# -- strict decoders -------------------------------------------------------------------

def length_decode(lens, rho: DevSequence) -> LSystem | None:
    """Strict length decoding: the full scanning walk, None on any failure."""
    try:
        return scan_successors(rho, lens)
    except ScanError:
        return None


def growth_decode(matrix, rho: DevSequence) -> LSystem | None:
    """Strict growth decoding: scan with row sums, then compare the matrix."""
    from .core import growth_matrix
    from .scanning import lens_from_growth
    try:
        system = scan_successors(rho, lens_from_growth(matrix))
    except ScanError:
        return None
    return system if np.array_equal(growth_matrix(system), np.asarray(matrix)) else None
