"""Probabilistic bilateral procedures over exact rationals: occupancy
measures, parking probabilities, total-mass identities, the q-deformed
family, and abelianity checks.

Everything here is exact Fraction arithmetic; floats never enter. The
branching run is expanded depth first with merging keyed on (occupied
set, rule state), so distributions compare by strict equality.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable

from .procedures import Block, Direction, Procedure
from .words import SpotSet, Word, as_word, block_of, orbit_representative

DEFAULT_PROB_CAP = 6


class _Infinity:
    """Distinguished q value; right-probabilities [i]/[r+1] degenerate to 0."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"


INFINITY = _Infinity()

QValue = Fraction | _Infinity

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_q(text: str) -> QValue:
    text = text.strip().lower()
    if text in ("inf", "infinity", "oo"):
        return INFINITY
    q = Fraction(text)
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    return q


def q_integer(j: int, q: Fraction) -> Fraction:
    """1 + q + ... + q^(j-1), exactly."""
    if j < 1:
        raise ValueError(f"q-integer defined for j >= 1, got {j}")
    if isinstance(q, _Infinity):
        raise ValueError("q-integers diverge at q=inf; use pq_right_prob for ratios")
    q = Fraction(q)
    return sum((q**e for e in range(j)), ZERO)


def pq_right_prob(r: int, i: int, q: QValue) -> Fraction:
    """Right-probability [i]/[r+1] of the q-deformed rule; the q=inf limit
    is 0 for every i <= r."""
    if not 1 <= i <= r:
        raise ValueError(f"position {i} outside 1..{r}")
    if isinstance(q, _Infinity):
        return ZERO
    return q_integer(i, q) / q_integer(r + 1, q)


@dataclass(frozen=True)
class ProbProcedure:
    """A bilateral rule whose decision is a probability of going right."""

    name: str
    decide_prob: Callable[[Any, Word, frozenset, Block, int], Fraction]
    init_state: Callable[[], Any] = lambda: None
    update: Callable[[Any, int, int], Any] | None = None
    is_memoryless: bool = True
    is_shift_invariant: bool = True
    is_locally_decided: bool = True
    extended_cyclic: bool = False

    @property
    def is_local(self) -> bool:
        return self.is_shift_invariant and self.is_locally_decided

    def __repr__(self) -> str:
        return f"ProbProcedure({self.name!r})"


@dataclass
class Measure:
    """Finitely supported distribution over occupied spot sets."""

    probs: dict[SpotSet, Fraction]

    def prob(self, spots: Iterable[int]) -> Fraction:
        return self.probs.get(frozenset(spots), ZERO)

    def total(self) -> Fraction:
        return sum(self.probs.values(), ZERO)

    def support(self) -> list[SpotSet]:
        return sorted(self.probs, key=sorted)


def _branches(pp: ProbProcedure, state, history, occ: frozenset, a: int):
    """(spot, prob, next state) triples for one arriving car."""
    if a not in occ:
        yield a, ONE, state
        return
    blk = block_of(occ, a)
    pr = pp.decide_prob(state, history, occ, blk, a)
    if not ZERO <= pr <= ONE:
        raise ValueError(f"{pp.name} returned probability {pr} outside [0,1]")
    if pr > 0:
        yield blk.hi + 1, pr, state
    if pr < 1:
        yield blk.lo - 1, ONE - pr, state


def _state_key(state: Any):
    return frozenset(state.items()) if isinstance(state, dict) else state


def measure(pp: ProbProcedure, word: Iterable[int]) -> Measure:
    """Exact distribution of the occupied set after the whole word.

    Branches agreeing on (occupied set, rule state) are merged with summed
    weights.
    """
    word = as_word(word)
    current: dict[tuple[frozenset, Any], tuple[Fraction, Any]] = {
        (frozenset(), _state_key(pp.init_state())): (ONE, pp.init_state())
    }
    for idx, a in enumerate(word):
        history = word[:idx]
        nxt: dict[tuple[frozenset, Any], tuple[Fraction, Any]] = {}
        for (occ, _), (weight, state) in current.items():
            for spot, pr, st in _branches(pp, state, history, occ, a):
                new_state = st if pp.update is None else pp.update(st, a, spot)
                key = (occ | {spot}, _state_key(new_state))
                prev = nxt.get(key)
                nxt[key] = (
                    weight * pr if prev is None else prev[0] + weight * pr,
                    new_state,
                )
        current = nxt
    probs: dict[SpotSet, Fraction] = defaultdict(lambda: ZERO)
    for (occ, _), (weight, _) in current.items():
        probs[occ] += weight
    return Measure(dict(probs))


def path_distribution(pp: ProbProcedure, word: Iterable[int]) -> dict[tuple[int, ...], Fraction]:
    """Weight of every full parking trace (tuple of parked spots)."""
    word = as_word(word)
    current: dict[tuple[int, ...], tuple[Fraction, Any]] = {
        (): (ONE, pp.init_state())
    }
    for idx, a in enumerate(word):
        history = word[:idx]
        nxt: dict[tuple[int, ...], tuple[Fraction, Any]] = {}
        for parked, (weight, state) in current.items():
            occ = frozenset(parked)
            for spot, pr, st in _branches(pp, state, history, occ, a):
                new_state = st if pp.update is None else pp.update(st, a, spot)
                nxt[parked + (spot,)] = (weight * pr, new_state)
        current = nxt
    return {parked: weight for parked, (weight, _) in current.items()}


def parking_probability(pp: ProbProcedure, word: Iterable[int]) -> Fraction:
    """Probability that the run occupies exactly {1..r}."""
    word = as_word(word)
    return measure(pp, word).prob(range(1, len(word) + 1))


def total_parking_mass(
    pp: ProbProcedure, r: int, *, cap: int | None = DEFAULT_PROB_CAP
) -> Fraction:
    """Sum of parking probabilities over all words in {1..r+1}^r."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if cap is not None and r > cap:
        from .enumeration import CapExceededError

        raise CapExceededError(f"r={r} exceeds probabilistic cap {cap}")
    total = ZERO
    for word in itertools.product(range(1, r + 2), repeat=r):
        total += parking_probability(pp, word)
    return total


def orbit_parking_mass(
    pp: ProbProcedure, r: int, *, cap: int | None = DEFAULT_PROB_CAP
) -> dict[Word, Fraction]:
    """Parking mass of each cyclic orbit, keyed by its representative."""
    if cap is not None and r > cap:
        from .enumeration import CapExceededError

        raise CapExceededError(f"r={r} exceeds probabilistic cap {cap}")
    masses: dict[Word, Fraction] = defaultdict(lambda: ZERO)
    for word in itertools.product(range(1, r + 2), repeat=r):
        masses[orbit_representative(word, r)] += parking_probability(pp, word)
    return dict(masses)


# ---------------------------------------------------------------------------
# catalog


def kw_procedure(q: Fraction) -> ProbProcedure:
    """Constant coin: go right with probability q whenever bumped."""
    q = Fraction(q)
    if not ZERO <= q <= ONE:
        raise ValueError(f"q must be in [0,1], got {q}")
    return ProbProcedure(
        name=f"kw:q={q}",
        decide_prob=lambda st, h, occ, blk, a: q,
    )


def kw_sequence_procedure(qs: Iterable[Fraction]) -> ProbProcedure:
    """Per-car coins: the i-th car goes right with probability qs[i-1].

    The coin depends only on the car's index (= |occupied|+1), which makes
    the rule commute with rotations staying inside {1..r}.
    """
    qs = tuple(Fraction(q) for q in qs)
    for q in qs:
        if not ZERO <= q <= ONE:
            raise ValueError(f"coin {q} outside [0,1]")

    def decide(st, h, occ, blk, a):
        i = len(occ) + 1
        if i > len(qs):
            raise ValueError(f"no coin for car {i}")
        return qs[i - 1]

    return ProbProcedure(
        name="kwseq:qs=" + "+".join(str(q) for q in qs),
        decide_prob=decide,
        is_locally_decided=False,
        extended_cyclic=True,
    )


def pq_procedure(q: QValue) -> ProbProcedure:
    """Right-probability [i]/[r+1] on the standard block; q=0 degenerates
    to the deterministic right rule and q=inf to the left rule."""
    if not isinstance(q, _Infinity):
        q = Fraction(q)
        if q < 0:
            raise ValueError(f"q must be >= 0, got {q}")

    def decide(st, h, occ, blk, a):
        return pq_right_prob(blk.size, a - blk.lo + 1, q)

    return ProbProcedure(name=f"pq:q={q}", decide_prob=decide)


def from_procedure(p: Procedure) -> ProbProcedure:
    """Embed a deterministic rule as 0/1 right-probabilities."""

    def decide(st, h, occ, blk, a):
        return ONE if p.decide(st, h, occ, blk, a) is Direction.RIGHT else ZERO

    return ProbProcedure(
        name=p.name,
        decide_prob=decide,
        init_state=p.init_state,
        update=p.update,
        is_memoryless=p.is_memoryless,
        is_shift_invariant=p.is_shift_invariant,
        is_locally_decided=p.is_locally_decided,
        extended_cyclic=p.extended_cyclic,
    )


def parse_prob_spec(spec: str) -> ProbProcedure:
    """Parse "kw:q=1/2", "kwseq:qs=1/2+1/3", "pq:q=2" or any deterministic
    catalog spec (embedded as 0/1 probabilities)."""
    name, _, tail = spec.partition(":")
    params = dict(item.partition("=")[::2] for item in tail.split(",")) if tail else {}
    if name == "kw":
        return kw_procedure(parse_q(params["q"]))
    if name == "kwseq":
        return kw_sequence_procedure(parse_q(v) for v in params["qs"].split("+"))
    if name == "pq":
        return pq_procedure(parse_q(params["q"]))
    from .procedures import parse_proc_spec

    return from_procedure(parse_proc_spec(spec))


# ---------------------------------------------------------------------------
# abelianity


def right_prob_table(pp: ProbProcedure, r_max: int) -> dict[tuple[int, int], Fraction]:
    """Probe p(r, i) on the standard blocks {1..r}, r <= r_max."""
    if not pp.is_memoryless:
        raise ValueError(f"{pp.name} is not memoryless")
    table = {}
    for r in range(1, r_max + 1):
        occ = frozenset(range(1, r + 1))
        for i in range(1, r + 1):
            table[(r, i)] = pp.decide_prob(pp.init_state(), (), occ, Block(1, r), i)
    return table


@dataclass(frozen=True)
class AbelianReport:
    procedure: str
    r_max: int
    abelian: bool
    witness: tuple[Word, Word] | None  # two orderings with different measures


def is_abelian(pp: ProbProcedure, r_max: int) -> AbelianReport:
    """Exhaustively compare measures across reorderings of every word with
    letters in {1..r+1}, length r <= r_max."""
    for r in range(1, r_max + 1):
        for multiset in itertools.combinations_with_replacement(range(1, r + 2), r):
            orderings = sorted(set(itertools.permutations(multiset)))
            if len(orderings) == 1:
                continue
            reference = measure(pp, orderings[0])
            for other in orderings[1:]:
                if measure(pp, other) != reference:
                    return AbelianReport(pp.name, r_max, False, (orderings[0], other))
    return AbelianReport(pp.name, r_max, True, None)


@dataclass(frozen=True)
class UniquenessFailure:
    equation: str  # "ratio" or "recurrence"
    r: int
    i: int
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class UniquenessReport:
    q: QValue
    r_max: int
    failure: UniquenessFailure | None
    matches_pq: bool

    @property
    def passed(self) -> bool:
        return self.failure is None


def abelian_uniqueness_check(
    table: dict[tuple[int, int], Fraction], r_max: int
) -> UniquenessReport:
    """Verify the two recurrences that pin an abelian memoryless local rule
    to the q-deformed family:

      ratio       p(r,i) = ([i]/[r]) p(r,r)          for 1 <= i < r,
      recurrence  p(r,r) = 1/(1+q) + (q/(1+q)) p(r,r-1),

    with q read off p(1,1) = 1/(1+q) (p(1,1)=0 means q=inf). Passing both
    for 2 <= r <= r_max is equivalent to p(r,i) = [i]/[r+1] throughout,
    which is also reported explicitly.
    """
    p11 = Fraction(table[(1, 1)])
    if not ZERO <= p11 <= ONE:
        raise ValueError(f"p(1,1)={p11} outside [0,1]")
    q: QValue = INFINITY if p11 == 0 else ONE / p11 - 1

    failure = None
    for r in range(2, r_max + 1):
        for i in range(1, r):
            lhs = Fraction(table[(r, i)])
            if isinstance(q, _Infinity):
                rhs = ZERO
            else:
                rhs = q_integer(i, q) / q_integer(r, q) * table[(r, r)]
            if lhs != rhs:
                failure = UniquenessFailure("ratio", r, i, lhs, rhs)
                break
        if failure:
            break
        lhs = Fraction(table[(r, r)])
        if isinstance(q, _Infinity):
            rhs = Fraction(table[(r, r - 1)])
        else:
            rhs = ONE / (1 + q) + q / (1 + q) * table[(r, r - 1)]
        if lhs != rhs:
            failure = UniquenessFailure("recurrence", r, r, lhs, rhs)
            break

    matches = all(
        table[(r, i)] == pq_right_prob(r, i, q)
        for r in range(1, r_max + 1)
        for i in range(1, r + 1)
    )
    return UniquenessReport(q, r_max, failure, matches)
