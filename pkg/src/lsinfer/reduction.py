"""Search-space reduction from necessary conditions.

The deduction state holds, per symbol, bounds on the successor length and on
each growth count, plus successor fragments (longest known prefix/suffix and
shortest known windows that contain the successor). Four rules tighten the
state and are run to a fixpoint:

* successor fragments read at the first/last unknown symbol of each word pair,
* a marker map that lines up constant runs between consecutive words and
  slices each derivation into independent segment pairs,
* unaccounted-growth bounds on the growth matrix,
* unaccounted-length bounds on successor lengths.

Every rule is sound: a D0L-system compatible with the sequence always stays
inside the bounds. A contradiction raises :class:`NoSolution`.
"""
from __future__ import annotations

import copy
import os
import re
from dataclasses import dataclass, field

import numpy as np

from .core import Alphabet, DevSequence, LSystem

BIG = 1 << 40


class NoSolution(Exception):
    """The bounds admit no compatible D0L-system."""


def _ceil_div(a, b):
    return -((-a) // b)


def _shift_nest(word: str, n_min: int, has_brackets: bool):
    """Shortest nesting-closed prefix of ``word`` with length >= n_min.

    Returns its length, None if ``word`` is too short, or -1 if a ``]``
    without partner appears inside the first ``n_min`` symbols.
    """
    if n_min > len(word):
        return None
    if not has_brackets:
        return n_min
    depth = 0
    for j, ch in enumerate(word):
        if j >= n_min and depth == 0:
            return j
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                return -1
    return len(word) if depth == 0 else None


def _window_cut(window: str, has_brackets: bool) -> int:
    """Longest prefix length of ``window`` that can end a nested word."""
    if not has_brackets:
        return len(window)
    depth = 0
    last = 0
    for j, ch in enumerate(window):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                return last
        if depth == 0:
            last = j + 1
    return last


_SWAP = str.maketrans("[]", "][")


def _mirror(word: str) -> str:
    return word[::-1].translate(_SWAP)


@dataclass
class BoundsState:
    """Mutable deduction state for one alphabet (one projection level)."""

    alphabet: Alphabet
    len_min: np.ndarray
    len_max: np.ndarray
    g_min: np.ndarray
    g_max: np.ndarray
    floor: int = 1
    pre: dict = field(default_factory=dict)
    suf: dict = field(default_factory=dict)
    sub: dict = field(default_factory=dict)
    sup_left: dict = field(default_factory=dict)
    sup_right: dict = field(default_factory=dict)
    marker_map: dict = field(default_factory=dict)

    def copy(self) -> "BoundsState":
        return copy.deepcopy(self)

    @property
    def sup(self) -> dict:
        """Shortest known superstring per symbol (None when unset)."""
        out = {}
        for g in self.alphabet.nonconstants:
            cands = [w for w in (self.sup_left.get(g), self.sup_right.get(g)) if w is not None]
            out[g] = min(cands, key=len) if cands else None
        return out

    def idx(self, g: str) -> int:
        return self.alphabet.index[g]

    def known(self, g: str) -> str | None:
        """The successor of ``g`` if the state pins it completely."""
        if self.alphabet.is_constant(g):
            return g
        a = self.idx(g)
        if self.len_min[a] == self.len_max[a] and len(self.pre[g]) == self.len_max[a]:
            return self.pre[g]
        return None

    def known_all(self) -> dict[str, str]:
        return {g: s for g in self.alphabet.nonconstants if (s := self.known(g)) is not None}

    def width(self) -> int:
        """Total bound slack; strictly decreases on every effective refinement."""
        return int((self.len_max - self.len_min).sum() + (self.g_max - self.g_min).sum())

    def check(self) -> None:
        if (self.len_min > self.len_max).any() or (self.g_min > self.g_max).any():
            raise NoSolution("empty bound interval")
        if (self.g_min.sum(axis=1) > self.len_max).any() or (self.g_max.sum(axis=1) < self.len_min).any():
            raise NoSolution("growth bounds incompatible with length bounds")
        for g in self.alphabet.nonconstants:
            a = self.idx(g)
            if len(self.pre[g]) > self.len_max[a] or len(self.suf[g]) > self.len_max[a]:
                raise NoSolution(f"fragment of {g} longer than its length bound")
            for w in (self.sup_left.get(g), self.sup_right.get(g)):
                if w is not None and len(w) < self.len_min[a]:
                    raise NoSolution(f"superstring of {g} shorter than its length bound")

    def violations(self, system: LSystem) -> list[str]:
        """Ways in which ``system`` escapes the state (empty for sound states)."""
        out = []
        M = np.stack([self.alphabet.parikh(system.succ(g)) for g in self.alphabet.symbols])
        lens = M.sum(axis=1)
        for g in self.alphabet.symbols:
            a = self.idx(g)
            s = system.succ(g)
            if not self.len_min[a] <= lens[a] <= self.len_max[a]:
                out.append(f"len {g}={lens[a]} not in [{self.len_min[a]},{self.len_max[a]}]")
            for b, h in enumerate(self.alphabet.symbols):
                if not self.g_min[a, b] <= M[a, b] <= self.g_max[a, b]:
                    out.append(f"growth ({g},{h})={M[a, b]} not in [{self.g_min[a, b]},{self.g_max[a, b]}]")
            if self.alphabet.is_constant(g):
                continue
            if not s.startswith(self.pre[g]):
                out.append(f"prefix {self.pre[g]!r} of {g} wrong")
            if not s.endswith(self.suf[g]):
                out.append(f"suffix {self.suf[g]!r} of {g} wrong")
            if self.sub[g] not in s:
                out.append(f"subword {self.sub[g]!r} of {g} wrong")
            sl, sr = self.sup_left.get(g), self.sup_right.get(g)
            if sl is not None and not sl.startswith(s):
                out.append(f"left window {sl!r} of {g} wrong")
            if sr is not None and not sr.endswith(s):
                out.append(f"right window {sr!r} of {g} wrong")
        return out

    def dump(self) -> str:
        """One line per symbol and per non-trivial symbol pair."""
        lines = []
        sup = self.sup
        for g in self.alphabet.symbols:
            a = self.idx(g)
            line = f"len {g} [{self.len_min[a]},{self.len_max[a]}]"
            if not self.alphabet.is_constant(g):
                line += f" pre={self.pre[g]!r} suf={self.suf[g]!r} sub={self.sub[g]!r} sup={sup[g]!r}"
            lines.append(line)
        for g in self.alphabet.nonconstants:
            a = self.idx(g)
            for b, h in enumerate(self.alphabet.symbols):
                if self.g_max[a, b] > 0:
                    lines.append(f"growth {g} {h} [{self.g_min[a, b]},{self.g_max[a, b]}]")
        for i in sorted(self.marker_map):
            for a, n, q in self.marker_map[i]:
                lines.append(f"marker {i + 1} src={a} len={n} dst={q}")
        return "\n".join(lines)


# -- word-pair evidence --------------------------------------------------------

class Evidence:
    """Precomputed per-sequence data shared by the refinement rules."""

    def __init__(self, rho: DevSequence):
        self.rho = rho
        self.alphabet = alphabet = rho.alphabet
        self.words = rho.words
        self.k = alphabet.size
        self.has_brackets = "[" in alphabet.constants and "]" in alphabet.constants
        self.is_const = np.array([alphabet.is_constant(g) for g in alphabet.symbols], dtype=bool)
        self.codes = [alphabet.codes(w) for w in self.words]
        self.parikh = np.stack([np.bincount(c, minlength=self.k) for c in self.codes]).astype(np.int64)
        self.lengths = np.array([len(w) for w in self.words], dtype=np.int64)
        self.runs = []
        for c in self.codes[:-1]:
            flags = self.is_const[c]
            runs = []
            j = 0
            n = len(flags)
            while j < n:
                if flags[j]:
                    s = j
                    while j < n and flags[j]:
                        j += 1
                    runs.append((s, j))
                else:
                    j += 1
            self.runs.append(runs)
        self._occ: dict = {}
        self._markers: dict = {}
        self._run_arrays: dict = {}
        self._run_groups: dict = {}
        self._pairs_key = None
        self._pairs = None

    def run_bounds(self, i: int):
        hit = self._run_arrays.get(i)
        if hit is None:
            runs = np.array(self.runs[i], dtype=np.int64).reshape(-1, 2)
            hit = self._run_arrays[i] = (runs[:, 0], runs[:, 1])
        return hit

    def run_groups(self, i: int) -> dict:
        """Run indices of w_i grouped by the run's text."""
        hit = self._run_groups.get(i)
        if hit is None:
            groups: dict = {}
            for r, (a, b) in enumerate(self.runs[i]):
                groups.setdefault(self.words[i][a:b], []).append(r)
            hit = self._run_groups[i] = {k: np.array(v) for k, v in groups.items()}
        return hit

    def occurrences(self, i: int, pattern: str) -> np.ndarray:
        key = (i, pattern)
        hit = self._occ.get(key)
        if hit is None:
            t = self.words[i + 1]
            rx = re.compile("(?=" + re.escape(pattern) + ")")
            hit = np.fromiter((m.start() for m in rx.finditer(t)), dtype=np.int64)
            self._occ[key] = hit
        return hit

    def segments(self, marker_map: dict) -> list[tuple[str, str]]:
        """Distinct (source, image) pairs: whole derivations plus marker slices."""
        out: dict[tuple[str, str], None] = {}
        for i in range(len(self.words) - 1):
            s, t = self.words[i], self.words[i + 1]
            out[(s, t)] = None
            prev_s, prev_t = 0, 0
            for a, n, q in marker_map.get(i, ()):
                seg = (s[prev_s:a], t[prev_t:q])
                if seg[0] or seg[1]:
                    out[seg] = None
                prev_s, prev_t = a + n, q + n
            if marker_map.get(i):
                seg = (s[prev_s:], t[prev_t:])
                if seg[0] or seg[1]:
                    out[seg] = None
        return list(out)

    def pair_matrices(self, state: BoundsState):
        """Parikh matrices (Y, Z) and image lengths T over all evidence pairs."""
        key = tuple((i, tuple(v)) for i, v in sorted(state.marker_map.items()))
        if key != self._pairs_key:
            segs = self.segments(state.marker_map)
            idx = self.alphabet.index
            Y = np.zeros((len(segs), self.k), dtype=np.int64)
            Z = np.zeros((len(segs), self.k), dtype=np.int64)
            for r, (s, t) in enumerate(segs):
                for g in set(s):
                    Y[r, idx[g]] = s.count(g)
                for g in set(t):
                    Z[r, idx[g]] = t.count(g)
            T = Z.sum(axis=1)
            self._pairs_key = key
            self._pairs = (segs, Y, Z, T)
        return self._pairs


# -- initialization ------------------------------------------------------------

def init_bounds(rho: DevSequence, alphabet: Alphabet | None = None, floor: int = 1) -> BoundsState:
    """Initial bounds: weakest necessary conditions from word sizes.

    ``floor`` is the least successor length of a nonconstant (1 for the full
    alphabet, 0 for projections in which some constants are erased).
    """
    alphabet = alphabet or rho.alphabet
    if alphabet is not rho.alphabet and alphabet != rho.alphabet:
        rho = DevSequence(rho.words, alphabet)
    k = alphabet.size
    P = np.stack([alphabet.parikh(w) for w in rho.words])
    Y, Z = P[:-1], P[1:]
    T = Z.sum(axis=1)
    Ls = Y.sum(axis=1)
    len_min = np.full(k, floor, dtype=np.int64)
    len_max = np.zeros(k, dtype=np.int64)
    g_min = np.zeros((k, k), dtype=np.int64)
    g_max = np.zeros((k, k), dtype=np.int64)
    cap_len = int(P.sum(axis=1).max())
    cap_g = P.max(axis=0)
    for g in alphabet.symbols:
        a = alphabet.index[g]
        if alphabet.is_constant(g):
            len_min[a] = len_max[a] = 1
            g_min[a, a] = g_max[a, a] = 1
            continue
        rows = Y[:, a] > 0
        if rows.any():
            len_max[a] = int((T[rows] - floor * (Ls[rows] - 1)).min())
            g_max[a] = Z[rows].min(axis=0)
        else:
            len_max[a] = cap_len
            g_max[a] = cap_g
    empty = {g: "" for g in alphabet.nonconstants}
    state = BoundsState(alphabet, len_min, len_max, g_min, g_max, floor,
                        pre=dict(empty), suf=dict(empty), sub=dict(empty),
                        sup_left={g: None for g in alphabet.nonconstants},
                        sup_right={g: None for g in alphabet.nonconstants})
    state.check()
    return state


# -- fragments -----------------------------------------------------------------

def _update_pre(state: BoundsState, g: str, p: str) -> bool:
    cur = state.pre[g]
    if len(p) <= len(cur):
        if not cur.startswith(p):
            raise NoSolution(f"conflicting prefixes for {g}: {cur!r} / {p!r}")
        return False
    if not p.startswith(cur):
        raise NoSolution(f"conflicting prefixes for {g}: {cur!r} / {p!r}")
    state.pre[g] = p
    return True


def _update_suf(state: BoundsState, g: str, p: str) -> bool:
    cur = state.suf[g]
    if len(p) <= len(cur):
        if not cur.endswith(p):
            raise NoSolution(f"conflicting suffixes for {g}: {cur!r} / {p!r}")
        return False
    if not p.endswith(cur):
        raise NoSolution(f"conflicting suffixes for {g}: {cur!r} / {p!r}")
    state.suf[g] = p
    return True


def _update_window(store: dict, g: str, w: str, left: bool) -> bool:
    """Intersect a window: the successor is a prefix (suffix) of both."""
    cur = store.get(g)
    if cur is None:
        store[g] = w
        return True
    if left:
        n = len(os.path.commonprefix([cur, w]))
        new = cur[:n]
    else:
        n = len(os.path.commonprefix([cur[::-1], w[::-1]]))
        new = cur[len(cur) - n:]
    if len(new) < len(cur):
        store[g] = new
        return True
    return False


def set_successor(state: BoundsState, g: str, s: str) -> bool:
    """Pin the successor of ``g`` to ``s`` (raises if the state excludes it)."""
    a = state.idx(g)
    if not state.len_min[a] <= len(s) <= state.len_max[a]:
        raise NoSolution(f"successor {g}->{s} violates length bounds")
    changed = _update_pre(state, g, s) | _update_suf(state, g, s)
    changed |= _update_window(state.sup_left, g, s, True)
    changed |= _update_window(state.sup_right, g, s, False)
    return _sync_fragments(state) or changed


def _sync_fragments(state: BoundsState) -> bool:
    """Propagate fragment knowledge into the numeric bounds (and back)."""
    alphabet = state.alphabet
    before = (state.len_min.copy(), state.len_max.copy(), state.g_min.copy(), state.g_max.copy())
    changed = False
    for g in alphabet.nonconstants:
        a = state.idx(g)
        pre, suf = state.pre[g], state.suf[g]
        sl, sr = state.sup_left.get(g), state.sup_right.get(g)
        # completion from windows or full-length fragments
        if sl is not None and len(sl) <= state.len_min[a]:
            changed |= _update_pre(state, g, sl)
        if sr is not None and len(sr) <= state.len_min[a]:
            changed |= _update_suf(state, g, sr)
        pre, suf = state.pre[g], state.suf[g]
        L = int(state.len_max[a])
        if len(pre) >= L or len(suf) >= L:
            full = pre if len(pre) >= len(suf) else suf
            changed |= _update_pre(state, g, full) | _update_suf(state, g, full)
        elif state.len_min[a] == L and len(pre) + len(suf) >= L:
            full = pre + suf[len(pre) + len(suf) - L:]
            if not full.endswith(suf):
                raise NoSolution(f"prefix and suffix of {g} do not overlap consistently")
            changed |= _update_pre(state, g, full) | _update_suf(state, g, full)
        pre, suf = state.pre[g], state.suf[g]
        if len(pre) == state.len_max[a]:
            changed |= _update_window(state.sup_left, g, pre, True)
            changed |= _update_window(state.sup_right, g, pre, False)
        sl, sr = state.sup_left.get(g), state.sup_right.get(g)
        if sl is not None and not sl.startswith(pre):
            raise NoSolution(f"prefix of {g} not inside its window")
        if sr is not None and not sr.endswith(suf):
            raise NoSolution(f"suffix of {g} not inside its window")
        longest = max((pre, suf, state.sub[g]), key=len)
        state.sub[g] = longest
        # numeric bounds
        state.len_min[a] = max(state.len_min[a], len(pre), len(suf))
        for w in (sl, sr):
            if w is not None:
                state.len_max[a] = min(state.len_max[a], len(w))
                state.g_max[a] = np.minimum(state.g_max[a], alphabet.parikh(w))
        for w in (pre, suf, longest):
            if w:
                state.g_min[a] = np.maximum(state.g_min[a], alphabet.parikh(w))
    state.check()
    after = (state.len_min, state.len_max, state.g_min, state.g_max)
    return changed or any(not np.array_equal(x, y) for x, y in zip(before, after))


def _fragment_pair(state: BoundsState, s: str, t: str, has_brackets: bool) -> bool:
    alphabet = state.alphabet
    consts = set(alphabet.constants)
    j = next((p for p, ch in enumerate(s) if ch not in consts), None)
    if j is None:
        if s != t:
            raise NoSolution("constant-only word does not reproduce itself")
        return False
    if t[:j] != s[:j]:
        raise NoSolution("leading constants not reproduced")
    changed = False
    g = s[j]
    a = state.idx(g)
    lo, hi = int(state.len_min[a]), int(state.len_max[a])
    rest = t[j:]
    n = _shift_nest(rest, lo, has_brackets)
    if n is None or n < 0:
        raise NoSolution(f"no room for a prefix of {g}")
    changed |= _update_pre(state, g, rest[:n])
    window = rest[:hi]
    changed |= _update_window(state.sup_left, g, window[:_window_cut(window, has_brackets)], True)
    # mirrored: trailing constants, then the last unknown symbol
    j = next(p for p in range(len(s) - 1, -1, -1) if s[p] not in consts)
    tail = len(s) - 1 - j
    if tail and t[len(t) - tail:] != s[j + 1:]:
        raise NoSolution("trailing constants not reproduced")
    g = s[j]
    a = state.idx(g)
    lo, hi = int(state.len_min[a]), int(state.len_max[a])
    rest = _mirror(t[:len(t) - tail])
    n = _shift_nest(rest, lo, has_brackets)
    if n is None or n < 0:
        raise NoSolution(f"no room for a suffix of {g}")
    changed |= _update_suf(state, g, _mirror(rest[:n]))
    window = rest[:hi]
    changed |= _update_window(state.sup_right, g, _mirror(window[:_window_cut(window, has_brackets)]), False)
    # a segment with a single unknown symbol pins its successor
    if sum(1 for ch in s if ch not in consts) == 1:
        lead = next(p for p, ch in enumerate(s) if ch not in consts)
        full = t[lead:len(t) - tail]
        changed |= set_successor(state, s[lead], full)
    return changed


def refine_fragments(state: BoundsState, rho: DevSequence, evidence: Evidence | None = None) -> bool:
    """Prefix/suffix/superstring fragments from every word pair and segment."""
    ev = evidence or Evidence(rho)
    changed = False
    for s, t in ev.segments(state.marker_map):
        if not s:
            if t:
                raise NoSolution("empty source segment with nonempty image")
            continue
        changed |= _fragment_pair(state, s, t, ev.has_brackets)
    changed |= _sync_fragments(state)
    return changed


# -- marker map ----------------------------------------------------------------

def _derivation_markers(state: BoundsState, ev: Evidence, i: int):
    runs = ev.runs[i]
    s = ev.words[i]
    t_len = int(ev.lengths[i + 1])
    codes = ev.codes[i]
    cm = np.concatenate(([0], np.cumsum(state.len_min[codes])))
    cM = np.concatenate(([0], np.cumsum(state.len_max[codes])))
    if cm[-1] > t_len or cM[-1] < t_len:
        raise NoSolution(f"derivation {i + 1}: length bounds exclude |w| = {t_len}")
    if not runs:
        return []
    ra, rb = ev.run_bounds(i)
    n = rb - ra
    los = np.maximum(cm[ra], t_len - (cM[-1] - cM[rb]) - n)
    his = np.minimum(cM[ra], t_len - (cm[-1] - cm[rb]) - n)
    cands = [None] * len(runs)
    for pattern, idx in ev.run_groups(i).items():
        occ = ev.occurrences(i, pattern)
        left = np.searchsorted(occ, los[idx], "left")
        right = np.searchsorted(occ, his[idx], "right")
        for r, a, b in zip(idx.tolist(), left.tolist(), right.tolist()):
            if a >= b:
                raise NoSolution(f"derivation {i + 1}: constant run at {runs[r][0]} has no image")
            cands[r] = occ[a:b]
    # gaps between consecutive runs, as [lo, hi] offsets from one start to the next
    gap_lo = (cm[ra[1:]] - cm[rb[:-1]] + n[:-1]).tolist()
    gap_hi = (cM[ra[1:]] - cM[rb[:-1]] + n[:-1]).tolist()
    for r in range(1, len(runs)):
        cands[r] = _reachable(cands[r - 1], cands[r], gap_lo[r - 1], gap_hi[r - 1])
        if cands[r].size == 0:
            raise NoSolution(f"derivation {i + 1}: markers cannot be ordered")
    for r in range(len(runs) - 2, -1, -1):
        cands[r] = -_reachable(-cands[r + 1][::-1], -cands[r][::-1], gap_lo[r], gap_hi[r])[::-1]
        if cands[r].size == 0:
            raise NoSolution(f"derivation {i + 1}: markers cannot be ordered")
    return [(a, b - a, int(c[0])) for (a, b), c in zip(runs, cands) if c.size == 1]


def _reachable(prev: np.ndarray, q: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Entries x of sorted ``q`` with some p in sorted ``prev``, lo <= x - p <= hi."""
    if prev.size == 1 and q.size == 1:
        d = int(q[0]) - int(prev[0])
        return q if lo <= d <= hi else q[:0]
    j = np.searchsorted(prev, q - hi, "left")
    ok = j < prev.size
    ok[ok] = prev[j[ok]] <= q[ok] - lo
    return q[ok]


def marker_candidates(state: BoundsState, rho: DevSequence, i: int, evidence: Evidence | None = None):
    """Feasible image positions of every constant run of w_i (before pruning)."""
    ev = evidence or Evidence(rho)
    runs = ev.runs[i]
    s = ev.words[i]
    t_len = int(ev.lengths[i + 1])
    codes = ev.codes[i]
    cm = np.concatenate(([0], np.cumsum(state.len_min[codes])))
    cM = np.concatenate(([0], np.cumsum(state.len_max[codes])))
    out = {}
    for a, b in runs:
        n = b - a
        lo = max(cm[a], t_len - (cM[-1] - cM[b]) - n)
        hi = min(cM[a], t_len - (cm[-1] - cm[b]) - n)
        occ = ev.occurrences(i, s[a:b])
        out[(a, n)] = [int(x) for x in occ if lo <= x <= hi]
    return out


def build_marker_map(state: BoundsState, rho: DevSequence, evidence: Evidence | None = None) -> bool:
    """Uniquely associate constant runs of w_i with their images in w_{i+1}."""
    ev = evidence or Evidence(rho)
    changed = False
    bounds = (state.len_min.tobytes(), state.len_max.tobytes())
    for i in range(len(ev.words) - 1):
        markers = ev._markers.get((i, bounds))
        if markers is None:
            markers = ev._markers[(i, bounds)] = _derivation_markers(state, ev, i)
        if markers != state.marker_map.get(i, []):
            old = set(state.marker_map.get(i, []))
            if not old <= set(markers):
                raise NoSolution("marker association changed")  # pragma: no cover
            state.marker_map[i] = markers
            changed = True
    return changed


# -- numeric rules -------------------------------------------------------------

def refine_growth_bounds(state: BoundsState, rho: DevSequence, evidence: Evidence | None = None) -> bool:
    """Unaccounted-growth rules on the growth bounds, over all evidence pairs."""
    ev = evidence or Evidence(rho)
    _, Y, Z, _ = ev.pair_matrices(state)
    gmin, gmax = state.g_min, state.g_max
    before = (gmin.copy(), gmax.copy())
    ua = Z - Y @ gmin
    if (ua < 0).any():
        raise NoSolution("growth lower bounds over-produce")
    for b in range(ev.k):
        rows = Y[:, b] > 0
        if not rows.any() or ev.is_const[b]:
            continue
        yb = Y[rows, b][:, None]
        np.minimum(gmax[b], gmin[b] + (ua[rows] // yb).min(axis=0), out=gmax[b])
    X = Y @ gmax
    for b in range(ev.k):
        rows = Y[:, b] > 0
        if not rows.any() or ev.is_const[b]:
            continue
        yb = Y[rows, b][:, None]
        need = Z[rows] - (X[rows] - yb * gmax[b])
        np.maximum(gmin[b], _ceil_div(need, yb).max(axis=0), out=gmin[b])
    state.check()
    return not (np.array_equal(before[0], gmin) and np.array_equal(before[1], gmax))


def refine_length_bounds(state: BoundsState, rho: DevSequence, evidence: Evidence | None = None) -> bool:
    """Unaccounted-length rules plus row-sum consistency with growth bounds."""
    ev = evidence or Evidence(rho)
    _, Y, _, T = ev.pair_matrices(state)
    lmin, lmax, gmin, gmax = state.len_min, state.len_max, state.g_min, state.g_max
    before = (lmin.copy(), lmax.copy(), gmin.copy(), gmax.copy())
    ua = T - Y @ lmin
    if (ua < 0).any():
        raise NoSolution("length lower bounds over-produce")
    pos = Y > 0
    safe = np.where(pos, Y, 1)
    cand = np.where(pos, ua[:, None] // safe, BIG).min(axis=0)
    upd = ~ev.is_const
    lmax[upd] = np.minimum(lmax[upd], (lmin + cand)[upd])
    over = T[:, None] - (Y @ lmax)[:, None] + Y * lmax[None, :]
    cand = np.where(pos, _ceil_div(over, safe), -BIG).max(axis=0)
    lmin[upd] = np.maximum(lmin[upd], cand[upd])
    lmin[upd] = np.maximum(lmin[upd], np.maximum(gmin.sum(axis=1), state.floor)[upd])
    lmax[upd] = np.minimum(lmax[upd], gmax.sum(axis=1)[upd])
    rs_min, rs_max = gmin.sum(axis=1, keepdims=True), gmax.sum(axis=1, keepdims=True)
    nc = upd
    gmax[nc] = np.minimum(gmax[nc], (lmax[:, None] - (rs_min - gmin))[nc])
    gmin[nc] = np.maximum(gmin[nc], (lmin[:, None] - (rs_max - gmax))[nc])
    state.check()
    after = (lmin, lmax, gmin, gmax)
    return any(not np.array_equal(x, y) for x, y in zip(before, after))


def fixpoint(state: BoundsState, rho: DevSequence, evidence: Evidence | None = None,
             max_sweeps: int = 10_000) -> BoundsState:
    """Run all rules until none changes the state. Raises :class:`NoSolution`."""
    ev = evidence or Evidence(rho)
    state.check()
    for _ in range(max_sweeps):
        changed = refine_fragments(state, rho, ev)
        changed |= build_marker_map(state, rho, ev)
        changed |= refine_growth_bounds(state, rho, ev)
        changed |= refine_length_bounds(state, rho, ev)
        if not changed:
            return state
    raise RuntimeError("fixpoint did not converge")  # pragma: no cover


def reduce(rho: DevSequence, floor: int = 1) -> BoundsState:
    """Initialize and refine bounds for ``rho`` in one call."""
    return fixpoint(init_bounds(rho, floor=floor), rho)


# -- projection between alphabets -----------------------------------------------

def project_state(src: BoundsState, rho: DevSequence, floor: int) -> BoundsState:
    """Carry the knowledge of ``src`` over to ``rho``'s (smaller) alphabet.

    Growth bounds between kept symbols are unchanged by erasing constants;
    length bounds shrink by the erased constants' growth bounds and the
    fragments are projected by deleting erased glyphs.
    """
    dst = init_bounds(rho, floor=floor)
    A, B = dst.alphabet, src.alphabet
    keep = [B.index[g] for g in A.symbols]
    dropped = [B.index[g] for g in B.constants if g not in A.index]
    dst.g_min = np.maximum(dst.g_min, src.g_min[np.ix_(keep, keep)])
    dst.g_max = np.minimum(dst.g_max, src.g_max[np.ix_(keep, keep)])
    for g in A.nonconstants:
        a, b = A.index[g], B.index[g]
        lo = src.len_min[b] - src.g_max[b, dropped].sum()
        hi = src.len_max[b] - src.g_min[b, dropped].sum()
        dst.len_min[a] = max(dst.len_min[a], lo)
        dst.len_max[a] = min(dst.len_max[a], hi)
    erase = {ord(B.symbols[d]): None for d in dropped}
    for g in A.nonconstants:
        dst.pre[g] = src.pre[g].translate(erase)
        dst.suf[g] = src.suf[g].translate(erase)
        dst.sub[g] = max(dst.pre[g], dst.suf[g], key=len)
        for store_s, store_d in ((src.sup_left, dst.sup_left), (src.sup_right, dst.sup_right)):
            w = store_s.get(g)
            store_d[g] = None if w is None else w.translate(erase)
    _sync_fragments(dst)
    return dst
