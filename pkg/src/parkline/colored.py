"""Colored letters: each car carries (preferred spot, color). Occupancy is
decided on the spot value alone; colors feed the parking rule, which may
be partial, defined only on a language of words closed under subwords and
value rotations."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, NamedTuple

from .enumeration import OrbitReport, OrbitViolation
from .procedures import Direction, RunResult, run_engine


class ColoredLetter(NamedTuple):
    value: int
    color: object  # ordered token; comparison is lexicographic on (value, color)

    def __str__(self) -> str:
        return f"{self.value}:{self.color}"


ColoredWord = tuple[ColoredLetter, ...]


def colored_word(pairs: Iterable[tuple[int, object]]) -> ColoredWord:
    return tuple(ColoredLetter(int(v), c) for v, c in pairs)


def parse_colored_word(text: str) -> ColoredWord:
    """Parse "1:a,2:b" tokens."""
    out = []
    for token in text.split(","):
        value, _, color = token.partition(":")
        out.append(ColoredLetter(int(value), color))
    return tuple(out)


class UndefinedRuleError(ValueError):
    """The rule has no defined decision for this input (outside its
    language)."""


class LanguageClosureError(ValueError):
    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class Language:
    """Membership predicate with declared closure properties."""

    name: str
    contains: Callable[[ColoredWord], bool]
    subword_closed: bool = True
    rotation_closed: bool = True


def distinct_letters_language() -> Language:
    return Language(
        name="distinct-letters",
        contains=lambda w: len(set(w)) == len(w),
    )


@dataclass(frozen=True)
class ColoredProcedure:
    name: str
    decide: Callable  # (state, history, occupied, block, letter) -> Direction
    init_state: Callable = lambda: None
    update: Callable | None = None
    language: Language | None = None
    is_memoryless: bool = True
    is_shift_invariant: bool = True
    is_locally_decided: bool = True


def colored_lbs_procedure() -> ColoredProcedure:
    """Last-block-setter with lexicographic comparison of full letters;
    defined where the new letter differs from the block record."""

    def decide(state, h, occ, blk, letter):
        _, last = max(state[s] for s in blk.spots())
        if letter == last:
            raise UndefinedRuleError(
                f"letter {letter} equals the block record; rule undefined"
            )
        return Direction.RIGHT if letter > last else Direction.LEFT

    def update(state, letter, spot):
        nxt = dict(state)
        nxt[spot] = (len(state) + 1, letter)
        return nxt

    return ColoredProcedure(
        name="colored-lbs",
        decide=decide,
        init_state=dict,
        update=update,
        language=distinct_letters_language(),
        is_memoryless=False,
    )


def colored_run(p: ColoredProcedure, word: Iterable) -> RunResult:
    """Run with occupancy keyed on letter values."""
    word = tuple(
        a if isinstance(a, ColoredLetter) else ColoredLetter(*a) for a in word
    )
    if p.language is not None and not p.language.contains(word):
        raise UndefinedRuleError(f"word outside language {p.language.name!r}")
    return run_engine(p, word, value_of=lambda a: a.value)


def colored_shift(word: ColoredWord, k: int) -> ColoredWord:
    return tuple(ColoredLetter(a.value + k, a.color) for a in word)


def rotate_values(word: ColoredWord, r: int) -> ColoredWord:
    """Rotate values mod r+1 (representatives {1..r+1}); colors fixed."""
    n = r + 1
    for a in word:
        if not 1 <= a.value <= n:
            raise ValueError(f"value {a.value} outside {{1..{n}}}")
    return tuple(ColoredLetter(a.value % n + 1, a.color) for a in word)


def is_parking_colored(p: ColoredProcedure, word) -> bool:
    word = tuple(
        a if isinstance(a, ColoredLetter) else ColoredLetter(*a) for a in word
    )
    return colored_run(p, word).spots == frozenset(range(1, len(word) + 1))


def _class_representative(word: ColoredWord, r: int) -> ColoredWord:
    best = word
    w = word
    for _ in range(r):
        w = rotate_values(w, r)
        if w < best:
            best = w
    return best


def iter_language_words(
    language: Language, r: int, colors: Iterable
) -> Iterator[ColoredWord]:
    """Words of length r with values in {1..r+1}, colors in the window,
    filtered by the language."""
    alphabet = [
        ColoredLetter(v, c)
        for v in range(1, r + 2)
        for c in colors
    ]
    for letters in itertools.product(alphabet, repeat=r):
        if language.contains(letters):
            yield letters


def verify_closures(
    language: Language, words: Iterable[ColoredWord], r: int
) -> None:
    """Spot-check declared closures on the given members; raises with a
    witness on violation."""
    for w in words:
        if language.subword_closed:
            for i in range(len(w)):
                sub = w[:i] + w[i + 1 :]
                if not language.contains(sub):
                    raise LanguageClosureError(
                        f"{language.name} not closed under deleting letter {i}",
                        (w, sub),
                    )
        if language.rotation_closed:
            rot = rotate_values(w, r)
            if not language.contains(rot):
                raise LanguageClosureError(
                    f"{language.name} not closed under value rotation", (w, rot)
                )


def colored_orbit_audit(
    p: ColoredProcedure,
    language: Language,
    r: int,
    colors: Iterable,
) -> OrbitReport:
    """Count parking words in every value-rotation class of the language
    slice with values in {1..r+1} and colors in the window."""
    if not (language.subword_closed and language.rotation_closed):
        raise ValueError(f"{language.name} lacks declared closure properties")
    colors = tuple(colors)
    words = list(iter_language_words(language, r, colors))
    verify_closures(language, words, r)

    classes: dict[ColoredWord, list[ColoredWord]] = {}
    for w in words:
        classes.setdefault(_class_representative(w, r), []).append(w)

    per_class = {
        rep: [w for w in members if is_parking_colored(p, w)]
        for rep, members in classes.items()
    }
    histogram = Counter(len(v) for v in per_class.values())
    violations = tuple(
        OrbitViolation(rep, tuple(classes[rep]), len(parking), tuple(parking))
        for rep, parking in sorted(per_class.items())
        if len(parking) != 1
    )
    return OrbitReport(
        procedure=p.name,
        r=r,
        orbit_count=len(classes),
        histogram=dict(sorted(histogram.items())),
        violations=violations,
    )
