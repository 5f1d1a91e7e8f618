"""Alphabets, D0L-systems, derivation and Parikh/growth analytics.

Words are plain ``str`` objects whose characters are single-glyph symbols.
An :class:`Alphabet` fixes the symbol order used by every vector and matrix
in the package, with constants (identity productions) listed after the
nonconstant symbols in the fixed turtle order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

#: Turtle glyphs in the fixed constant order: branches, 2D turns, then
#: pitch, roll and turn-around, then the two forward moves.
TURTLE_ORDER = "[]+-&^\\/|Ff"

_GLYPH_ALIASES = {"−": "-"}


class InputError(ValueError):
    """Malformed input (unknown symbol, bad file, inconsistent alphabet)."""


def normalize(text: str) -> str:
    """Map typographic glyph variants (e.g. U+2212 minus) onto ASCII."""
    for src, dst in _GLYPH_ALIASES.items():
        text = text.replace(src, dst)
    return text


def order_constants(glyphs: Iterable[str]) -> tuple[str, ...]:
    """Sort constants into the fixed order; unknown glyphs go last, sorted."""
    glyphs = set(glyphs)
    ordered = [g for g in TURTLE_ORDER if g in glyphs]
    ordered += sorted(glyphs - set(TURTLE_ORDER))
    return tuple(ordered)


@dataclass(frozen=True)
class Alphabet:
    """Ordered symbol set. ``symbols`` is nonconstants followed by constants."""

    nonconstants: tuple[str, ...]
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        both = self.nonconstants + self.constants
        if len(set(both)) != len(both):
            raise InputError(f"duplicate glyphs in alphabet {both!r}")
        for g in both:
            if len(g) != 1 or g.isspace():
                raise InputError(f"invalid glyph {g!r}")

    @classmethod
    def from_words(cls, words: Iterable[str], constants: Iterable[str] | None = None) -> "Alphabet":
        """Infer an alphabet from the glyphs of ``words``.

        Nonconstants keep first-appearance order. When ``constants`` is None
        the turtle glyphs present are used.
        """
        seen: dict[str, None] = {}
        for w in words:
            for ch in w:
                seen.setdefault(ch, None)
        if constants is None:
            consts = [g for g in seen if g in TURTLE_ORDER]
        else:
            consts = list(constants)
        consts_t = order_constants(consts)
        nonconst = tuple(g for g in seen if g not in set(consts_t))
        return cls(nonconst, consts_t)

    @cached_property
    def symbols(self) -> tuple[str, ...]:
        return self.nonconstants + self.constants

    @cached_property
    def index(self) -> dict[str, int]:
        return {g: i for i, g in enumerate(self.symbols)}

    @property
    def size(self) -> int:
        return len(self.nonconstants) + len(self.constants)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, glyph: str) -> bool:
        return glyph in self.index

    def is_constant(self, glyph: str) -> bool:
        return glyph in self.constants

    def restrict(self, keep_constants: Iterable[str]) -> "Alphabet":
        """Same nonconstants, constants limited to ``keep_constants``."""
        keep = set(keep_constants)
        return Alphabet(self.nonconstants, tuple(c for c in self.constants if c in keep))

    def parikh(self, word: str) -> np.ndarray:
        return parikh(word, self)

    def codes(self, word: str) -> np.ndarray:
        """Symbol indices of ``word`` as an int array."""
        idx = self.index
        try:
            return np.fromiter((idx[c] for c in word), dtype=np.int64, count=len(word))
        except KeyError as exc:
            raise InputError(f"unknown symbol {exc.args[0]!r}") from None


@dataclass(frozen=True)
class LSystem:
    """A D0L-system. ``successors`` is aligned with ``alphabet.symbols``."""

    alphabet: Alphabet
    axiom: str
    successors: tuple[str, ...]

    def __post_init__(self):
        if len(self.successors) != self.alphabet.size:
            raise InputError("one successor per symbol required")
        for c in self.axiom:
            if c not in self.alphabet:
                raise InputError(f"axiom symbol {c!r} not in alphabet")

    @classmethod
    def from_rules(cls, alphabet: Alphabet, axiom: str, rules: Mapping[str, str]) -> "LSystem":
        """Build from a partial rule map; missing symbols get identity rules."""
        for g in rules:
            if g not in alphabet:
                raise InputError(f"production for unknown symbol {g!r}")
        succ = tuple(rules.get(g, g) for g in alphabet.symbols)
        return cls(alphabet, axiom, succ)

    def succ(self, glyph: str) -> str:
        return self.successors[self.alphabet.index[glyph]]

    @property
    def rules(self) -> dict[str, str]:
        return dict(zip(self.alphabet.symbols, self.successors))

    @cached_property
    def _table(self) -> dict[int, str]:
        return {ord(g): s for g, s in zip(self.alphabet.symbols, self.successors)}

    @cached_property
    def lengths(self) -> np.ndarray:
        return np.array([len(s) for s in self.successors], dtype=np.int64)

    def is_valid(self) -> bool:
        """Nonempty successors, identity constants, nested successors."""
        if not self.axiom:
            return False
        for g, s in zip(self.alphabet.symbols, self.successors):
            if not s:
                return False
            if self.alphabet.is_constant(g):
                if s != g:
                    return False
            elif not check_nesting(s):
                return False
        return True

    def __str__(self) -> str:
        return format_lsystem(self)


@dataclass(frozen=True)
class DevSequence:
    """An observed developmental sequence (w1, ..., wn) over one alphabet."""

    words: tuple[str, ...]
    alphabet: Alphabet = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        words = tuple(normalize(w) for w in self.words)
        object.__setattr__(self, "words", words)
        if len(words) < 2:
            raise InputError("a developmental sequence needs at least two words")
        if any(not w for w in words):
            raise InputError("empty word in developmental sequence")
        if self.alphabet is None:
            object.__setattr__(self, "alphabet", Alphabet.from_words(words))
        else:
            for w in words:
                for c in w:
                    if c not in self.alphabet:
                        raise InputError(f"symbol {c!r} not in alphabet")

    @classmethod
    def of(cls, words: Sequence[str], constants: Iterable[str] | None = None) -> "DevSequence":
        words = tuple(normalize(w) for w in words)
        return cls(words, Alphabet.from_words(words, constants))

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def __getitem__(self, i):
        return self.words[i]


def derive_step(system: LSystem, word: str) -> str:
    """Rewrite every symbol of ``word`` in parallel."""
    for c in set(word):
        if c not in system.alphabet:
            raise InputError(f"unknown symbol {c!r}")
    return word.translate(system._table)


def derive_sequence(system: LSystem, steps: int, start: str | None = None) -> DevSequence:
    """The (steps + 1)-word developmental sequence starting from the axiom."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    w = system.axiom if start is None else start
    words = [w]
    for _ in range(steps):
        w = derive_step(system, w)
        words.append(w)
    return DevSequence(tuple(words), system.alphabet)


def parikh(word: str, alphabet: Alphabet) -> np.ndarray:
    counts = np.array([word.count(g) for g in alphabet.symbols], dtype=np.int64)
    if counts.sum() != len(word):
        missing = set(word) - set(alphabet.symbols)
        raise InputError(f"symbols {sorted(missing)!r} not in alphabet")
    return counts


def growth_matrix(system: LSystem) -> np.ndarray:
    """M[a, b] = number of symbol b in succ(a)."""
    return np.stack([parikh(s, system.alphabet) for s in system.successors])


def is_compatible(system: LSystem, rho: DevSequence | Sequence[str]) -> bool:
    """True iff ``rho`` is exactly the developmental sequence of ``system`` from rho[0]."""
    words = rho.words if isinstance(rho, DevSequence) else tuple(rho)
    table = system._table
    for c in set(words[0]):
        if c not in system.alphabet:
            return False
    w = words[0]
    for target in words[1:]:
        w = w.translate(table)
        if w != target:
            return False
    return True


def check_nesting(word: str) -> bool:
    depth = 0
    for c in word:
        if c == "[":
            depth += 1
        elif c == "]":
            depth -= 1
            if depth < 0:
                return False
    return depth == 0


# -- text formats -----------------------------------------------------------

def parse_lsystem(text: str, constants: Iterable[str] | None = None) -> LSystem:
    """Parse ``axiom:``/``A -> w``/``constants:`` lines.

    Without a ``constants:`` line (and no ``constants`` argument) the turtle
    glyphs that have no explicit non-identity production are constants.
    """
    axiom = None
    rules: dict[str, str] = {}
    declared = None
    for lineno, raw in enumerate(normalize(text).splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("axiom:"):
            axiom = "".join(line[len("axiom:"):].split())
        elif line.startswith("constants:"):
            declared = "".join(line[len("constants:"):].split())
        elif "->" in line:
            lhs, rhs = line.split("->", 1)
            lhs, rhs = lhs.strip(), "".join(rhs.split())
            if len(lhs) != 1:
                raise InputError(f"line {lineno}: predecessor must be one glyph, got {lhs!r}")
            if lhs in rules:
                raise InputError(f"line {lineno}: duplicate production for {lhs!r}")
            rules[lhs] = rhs
        else:
            raise InputError(f"line {lineno}: cannot parse {raw!r}")
    if not axiom:
        raise InputError("missing axiom line")
    if constants is not None:
        declared = "".join(constants)
    words = [axiom, *rules.values(), *rules.keys()]
    if declared is None:
        consts = [g for g in TURTLE_ORDER if any(g in w for w in words)
                  and rules.get(g, g) == g]
    else:
        consts = list(declared)
    for c in consts:
        if c in rules and rules[c] != c:
            raise InputError(f"constant {c!r} has a non-identity production")
    alphabet = Alphabet.from_words(words + consts, consts)
    system = LSystem.from_rules(alphabet, axiom, rules)
    for g, s in zip(alphabet.symbols, system.successors):
        if not s:
            raise InputError(f"empty successor for {g!r}")
    return system


def format_lsystem(system: LSystem) -> str:
    lines = [f"axiom: {system.axiom}"]
    for g in system.alphabet.nonconstants:
        lines.append(f"{g} -> {system.succ(g)}")
    if system.alphabet.constants:
        lines.append(f"constants: {''.join(system.alphabet.constants)}")
    return "\n".join(lines) + "\n"


def parse_sequence(text: str) -> tuple[list[str], str | None]:
    """Parse a sequence file: optional ``constants:`` header, one word per line."""
    words: list[str] = []
    constants = None
    for raw in normalize(text).splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("constants:"):
            if words:
                raise InputError("constants header must precede the words")
            constants = "".join(line[len("constants:"):].split())
            continue
        if any(ch.isspace() for ch in line):
            raise InputError(f"whitespace inside word {line!r}")
        words.append(line)
    if len(words) < 2:
        raise InputError("sequence file needs at least two words")
    return words, constants


def format_sequence(rho: DevSequence | Sequence[str], constants: str | None = None) -> str:
    words = rho.words if isinstance(rho, DevSequence) else rho
    head = f"constants: {constants}\n" if constants else ""
    return head + "\n".join(words) + "\n"
