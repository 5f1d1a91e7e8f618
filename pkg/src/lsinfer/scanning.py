"""Reconstruct productions from successor lengths by scanning consecutive words.

If w_i = A1...Am then w_{i+1} = succ(A1)...succ(Am), so once every
|succ(A)| is fixed a left-to-right cursor walk reads the successors off the
sequence. :func:`scan_successors` is the strict walk that checks every
occurrence; :class:`ScanIndex` is the fast variant used inside the search,
which reads each successor at its first occurrence only and leaves the
verification to re-derivation.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .core import Alphabet, DevSequence, LSystem, check_nesting, is_compatible

CONFLICT = "conflict"
OVERRUN = "overrun"
UNDERRUN = "underrun"
NESTING = "nesting"
UNSEEN = "unseen"
EMPTY = "empty"


class ScanError(Exception):
    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind


def _lens_array(lens, alphabet: Alphabet) -> np.ndarray:
    if isinstance(lens, Mapping):
        out = np.ones(alphabet.size, dtype=np.int64)
        for g, v in lens.items():
            out[alphabet.index[g]] = v
        return out
    out = np.asarray(lens, dtype=np.int64)
    if out.shape != (alphabet.size,):
        raise ValueError("length vector does not match the alphabet")
    return out


def scan_successors(rho: DevSequence, lens, allow_empty: bool = False) -> LSystem:
    """Read successors off ``rho`` given one successor length per symbol.

    ``lens`` is a glyph->length mapping (constants may be omitted) or a
    vector aligned with ``rho.alphabet.symbols``. Raises :class:`ScanError`
    on any inconsistency; the result is re-derived before it is returned.
    """
    alphabet = rho.alphabet
    L = _lens_array(lens, alphabet)
    if not allow_empty and (L < 1).any():
        raise ScanError(EMPTY, "successor lengths must be positive")
    words = rho.words
    index = alphabet.index
    succ: dict[str, str] = {c: c for c in alphabet.constants}
    for i in range(len(words) - 1):
        w, nxt = words[i], words[i + 1]
        cur = 0
        for ch in w:
            n = int(L[index[ch]])
            end = cur + n
            if end > len(nxt):
                raise ScanError(OVERRUN, f"derivation {i + 1}, symbol {ch!r}")
            seg = nxt[cur:end]
            known = succ.get(ch)
            if known is None:
                if not check_nesting(seg):
                    raise ScanError(NESTING, f"{ch} -> {seg}")
                succ[ch] = seg
            elif known != seg:
                raise ScanError(CONFLICT, f"{ch} -> {known} vs {seg}")
            cur = end
        if cur != len(nxt):
            raise ScanError(UNDERRUN, f"derivation {i + 1} leaves {len(nxt) - cur} symbols")
    unseen = [g for g in alphabet.nonconstants if g not in succ]
    if unseen:
        raise ScanError(UNSEEN, "no successor for " + "".join(unseen))
    system = LSystem(alphabet, words[0], tuple(succ[g] for g in alphabet.symbols))
    if not is_compatible(system, rho):  # pragma: no cover - guarded by the walk above
        raise ScanError(CONFLICT, "re-derivation mismatch")
    return system


def lens_from_growth(matrix, allow_empty: bool = False) -> np.ndarray:
    """Successor lengths as the row sums of a candidate growth matrix."""
    m = np.asarray(matrix, dtype=np.int64)
    if (m < 0).any():
        raise ScanError(EMPTY, "negative growth entry")
    lens = m.sum(axis=1)
    if not allow_empty and (lens == 0).any():
        raise ScanError(EMPTY, "zero row in growth matrix")
    return lens


class ScanIndex:
    """First-occurrence table for fast successor reading.

    For each symbol the word index and the Parikh vector of the prefix before
    its first occurrence are stored, so the cursor position under any length
    vector is a single dot product.
    """

    def __init__(self, rho: DevSequence | Sequence[str], alphabet: Alphabet | None = None):
        if not isinstance(rho, DevSequence):
            rho = DevSequence(tuple(rho), alphabet)
        self.rho = rho
        self.alphabet = alphabet = rho.alphabet
        k = alphabet.size
        self.word_of = np.full(k, -1, dtype=np.int64)
        self.prefix = np.zeros((k, k), dtype=np.int64)
        found = 0
        for i, w in enumerate(rho.words[:-1]):
            for g in alphabet.symbols:
                a = alphabet.index[g]
                if self.word_of[a] >= 0:
                    continue
                p = w.find(g)
                if p >= 0:
                    self.word_of[a] = i
                    self.prefix[a] = alphabet.parikh(w[:p])
                    found += 1
            if found == k:
                break
        self.seen = self.word_of >= 0
        self._const = np.array([alphabet.is_constant(g) for g in alphabet.symbols])

    def unseen(self) -> list[str]:
        return [g for g, s, c in zip(self.alphabet.symbols, self.seen, self._const) if not s and not c]

    def read(self, lens) -> tuple[str, ...] | None:
        """Successor tuple implied by ``lens`` or None if a window overruns."""
        L = np.asarray(lens, dtype=np.int64)
        cur = self.prefix @ L
        words = self.rho.words
        out = []
        for a, g in enumerate(self.alphabet.symbols):
            if self._const[a]:
                out.append(g)
                continue
            i = self.word_of[a]
            if i < 0:
                return None
            nxt = words[i + 1]
            start = int(cur[a])
            end = start + int(L[a])
            if end > len(nxt) or L[a] < 0:
                return None
            out.append(nxt[start:end])
        return tuple(out)
