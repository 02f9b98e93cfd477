"""Bilateral parking procedures as pluggable rules, the builtin catalog,
and the run/outcome machinery.

A procedure processes a preference word car by car. A car whose preferred
spot is free parks there; otherwise it parks immediately left or right of
the block of occupied spots containing its preference, as chosen by the
procedure's decision function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterable, Iterator

from .words import Block, SpotSet, Word, as_word, block_of, shift


class Direction(Enum):
    LEFT = "L"
    RIGHT = "R"

    def __repr__(self) -> str:  # pragma: no cover
        return f"Direction.{self.name}"


LEFT = Direction.LEFT
RIGHT = Direction.RIGHT

# decide(state, history, occupied, block, letter) -> Direction
# Consulted only when `letter` is occupied; `block` is its block.
DecideFn = Callable[[Any, Word, frozenset, Block, Any], Direction]
# update(state, letter, parked_spot) -> new state
UpdateFn = Callable[[Any, Any, int], Any]


def _no_state() -> None:
    return None


@dataclass(frozen=True)
class Procedure:
    """A deterministic bilateral parking rule.

    Memoryless rules must ignore `state` and `history` and depend only on
    (occupied, letter). `dir_rule`, when set, gives the direction chosen on
    the standard block {1..r} for a car preferring i, for any r; it exists
    exactly for the memoryless shift-invariant locally-decided rules and
    enables the fast table kernels.
    """

    name: str
    decide: DecideFn
    init_state: Callable[[], Any] = _no_state
    update: UpdateFn | None = None
    is_memoryless: bool = True
    is_shift_invariant: bool = True
    is_locally_decided: bool = True
    # Decisions commute with letterwise rotation whenever the rotated run
    # stays inside {1..r}; holds e.g. for rules that depend only on the
    # car's index. Weaker than is_local but still forces the one-parking-
    # word-per-orbit property.
    extended_cyclic: bool = False
    dir_rule: Callable[[int, int], Direction] | None = None
    kernel: str | None = None  # "table" | "lbs" fast-path tag
    strict_r_max: int | None = None  # refuse enumeration beyond this length

    @property
    def is_local(self) -> bool:
        return self.is_shift_invariant and self.is_locally_decided

    def __repr__(self) -> str:
        return f"Procedure({self.name!r})"


@dataclass(frozen=True)
class RunResult:
    """Trace of one run: the word, the final spot set, and where each car
    parked (parked[i] is the spot taken by car i+1)."""

    word: tuple
    spots: SpotSet
    parked: tuple[int, ...]

    @property
    def outcome(self) -> dict[int, int]:
        """Injection spot -> arrival index of the car that parked there."""
        return {spot: i + 1 for i, spot in enumerate(self.parked)}


def run_engine(p, letters: tuple, value_of=None) -> RunResult:
    """Shared run loop; `value_of` maps a letter to its preferred spot
    (identity for plain integer letters)."""
    occupied: set[int] = set()
    state = p.init_state()
    parked: list[int] = []
    history: tuple = ()
    for a in letters:
        spot_pref = value_of(a) if value_of is not None else a
        if spot_pref not in occupied:
            spot = spot_pref
        else:
            blk = block_of(occupied, spot_pref)
            d = p.decide(state, history, occupied, blk, a)
            spot = blk.lo - 1 if d is LEFT else blk.hi + 1
            # the block is maximal, so the adjacent spot is free
            assert spot not in occupied
        occupied.add(spot)
        parked.append(spot)
        if p.update is not None:
            state = p.update(state, a, spot)
        history += (a,)
    return RunResult(letters, frozenset(occupied), tuple(parked))


def run(p: Procedure, word: Iterable[int]) -> RunResult:
    return run_engine(p, as_word(word))


def last_spot(p: Procedure, word: Iterable[int]) -> int:
    """Spot where the last car parks."""
    word = as_word(word)
    if not word:
        raise ValueError("last_spot of the empty word")
    return run(p, word).parked[-1]


def is_parking(p: Procedure, word: Iterable[int]) -> bool:
    """True iff the run occupies exactly {1..r}."""
    word = as_word(word)
    return run(p, word).spots == frozenset(range(1, len(word) + 1))


def outcome(p: Procedure, word: Iterable[int]) -> dict[int, int]:
    return run(p, word).outcome


# ---------------------------------------------------------------------------
# builtin catalog


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def right_procedure() -> Procedure:
    return Procedure(
        name="right",
        decide=lambda st, h, occ, blk, a: RIGHT,
        dir_rule=lambda r, i: RIGHT,
        kernel="table",
    )


def left_procedure() -> Procedure:
    return Procedure(
        name="left",
        decide=lambda st, h, occ, blk, a: LEFT,
        dir_rule=lambda r, i: LEFT,
        kernel="table",
    )


def closest_procedure() -> Procedure:
    # nearest free spot wins; ties go right
    def decide(st, h, occ, blk, a):
        return RIGHT if (blk.hi + 1 - a) <= (a - blk.lo + 1) else LEFT

    return Procedure(
        name="closest",
        decide=decide,
        dir_rule=lambda r, i: RIGHT if (r + 1 - i) <= i else LEFT,
        kernel="table",
    )


def prime_procedure() -> Procedure:
    # right iff the block the car lands on has prime size
    def decide(st, h, occ, blk, a):
        return RIGHT if _is_prime(blk.size) else LEFT

    return Procedure(
        name="prime",
        decide=decide,
        dir_rule=lambda r, i: RIGHT if _is_prime(r) else LEFT,
        kernel="table",
    )


def evenodd_procedure() -> Procedure:
    def decide(st, h, occ, blk, a):
        return RIGHT if a % 2 == 0 else LEFT

    return Procedure(
        name="evenodd",
        decide=decide,
        is_shift_invariant=False,
    )


def naples_procedure(k: int) -> Procedure:
    """Back up at most k spots looking for a free one, but never to a spot
    below 1; otherwise go right."""
    if k < 1:
        raise ValueError("naples requires k >= 1")

    def decide(st, h, occ, blk, a):
        return LEFT if blk.lo > 1 and a - blk.lo < k else RIGHT

    return Procedure(
        name=f"naples:k={k}",
        decide=decide,
        is_shift_invariant=False,
    )


def far_procedure(convention: str = "prose") -> Procedure:
    """Compare the number of cars parked strictly right (R) and strictly
    left (L) of the preferred spot.

    convention "prose": go right iff R <= L (the default).
    convention "notation": go right iff R > L (the opposite reading).
    """
    if convention not in ("prose", "notation"):
        raise ValueError(f"unknown far convention {convention!r}")

    def decide(st, h, occ, blk, a):
        right_count = sum(1 for s in occ if s > a)
        left_count = sum(1 for s in occ if s < a)
        if convention == "prose":
            return RIGHT if right_count <= left_count else LEFT
        return RIGHT if right_count > left_count else LEFT

    name = "far" if convention == "prose" else f"far:convention={convention}"
    return Procedure(
        name=name,
        decide=decide,
        is_locally_decided=False,
    )


def lbs_procedure() -> Procedure:
    """Compare against the last car that parked on the block: park right
    iff the new preference is >= that car's preference.

    State maps each occupied spot to (arrival step, preference); the block
    record is the entry with the largest step among the block's spots.
    """

    def decide(state, h, occ, blk, a):
        _, pref = max(state[s] for s in blk.spots())
        return RIGHT if a >= pref else LEFT

    def update(state, letter, spot):
        nxt = dict(state)
        nxt[spot] = (len(state) + 1, letter)
        return nxt

    return Procedure(
        name="lbs",
        decide=decide,
        init_state=dict,
        update=update,
        is_memoryless=False,
        kernel="lbs",
    )


def index_rule_procedure(dirs, name: str | None = None) -> Procedure:
    """Direction chosen by the arrival index of the bumped car: car i uses
    dirs[i-1]. The index equals |occupied|+1, so the rule is memoryless
    and shift invariant but in general not locally decided; it does
    commute with rotations that keep the run inside {1..r}."""
    dirs = tuple(dirs)

    def decide(st, h, occ, blk, a):
        i = len(occ) + 1
        if i > len(dirs):
            raise ValueError(f"no direction for car {i}")
        return dirs[i - 1]

    return Procedure(
        name=name or "bycar(" + "".join(d.value for d in dirs) + ")",
        decide=decide,
        is_locally_decided=False,
        extended_cyclic=True,
    )


# ---------------------------------------------------------------------------
# direction tables


@dataclass(frozen=True)
class DirTable:
    """Row r gives the direction for each preferred position i in {1..r}
    on the standard occupied block {1..r}; blocks larger than r_max use
    `default_beyond`."""

    rows: tuple[tuple[Direction, ...], ...]
    default_beyond: Direction = RIGHT

    def __post_init__(self) -> None:
        for r, row in enumerate(self.rows, start=1):
            if len(row) != r:
                raise ValueError(f"row {r} must have {r} entries, got {len(row)}")

    @property
    def r_max(self) -> int:
        return len(self.rows)

    def direction(self, r: int, i: int) -> Direction:
        if not 1 <= i <= r:
            raise ValueError(f"position {i} outside 1..{r}")
        if r <= self.r_max:
            return self.rows[r - 1][i - 1]
        return self.default_beyond

    def to_json(self) -> dict:
        return {
            "type": "memoryless_local",
            "r_max": self.r_max,
            "rows": [[d.value for d in row] for row in self.rows],
            "default_beyond": self.default_beyond.value,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DirTable":
        if doc.get("type") != "memoryless_local":
            raise ValueError(f"unsupported table type {doc.get('type')!r}")
        rows = tuple(
            tuple(Direction(entry) for entry in row) for row in doc["rows"]
        )
        table = cls(rows, Direction(doc.get("default_beyond", "R")))
        if "r_max" in doc and doc["r_max"] != table.r_max:
            raise ValueError(
                f"declared r_max {doc['r_max']} != {table.r_max} rows"
            )
        return table


def load_dir_table(path: str) -> DirTable:
    with open(path, "r", encoding="utf-8") as fh:
        return DirTable.from_json(json.load(fh))


def table_procedure(
    table: DirTable, name: str | None = None, strict: bool = False
) -> Procedure:
    """Memoryless local procedure driven by an explicit direction table."""

    def decide(st, h, occ, blk, a):
        return table.direction(blk.size, a - blk.lo + 1)

    return Procedure(
        name=name or f"table(r_max={table.r_max})",
        decide=decide,
        dir_rule=table.direction,
        kernel="table",
        strict_r_max=table.r_max if strict else None,
    )


# ---------------------------------------------------------------------------
# memoryless direction probes


def dir_of(p: Procedure, r: int, i: int) -> Direction:
    """Direction chosen when {1..r} is occupied and the car prefers i."""
    if not p.is_memoryless:
        raise ValueError(f"{p.name} is not memoryless")
    if not 1 <= i <= r:
        raise ValueError(f"position {i} outside 1..{r}")
    return p.decide(p.init_state(), (), frozenset(range(1, r + 1)), Block(1, r), i)


def dir_of_set(p: Procedure, occupied: Iterable[int], a: int) -> Direction:
    """Direction chosen on an arbitrary occupied set (memoryless rules)."""
    if not p.is_memoryless:
        raise ValueError(f"{p.name} is not memoryless")
    occ = frozenset(occupied)
    return p.decide(p.init_state(), (), occ, block_of(occ, a), a)


# ---------------------------------------------------------------------------
# builtin registry and spec strings

_BUILTINS: dict[str, Callable[..., Procedure]] = {
    "right": right_procedure,
    "left": left_procedure,
    "closest": closest_procedure,
    "prime": prime_procedure,
    "evenodd": evenodd_procedure,
    "naples": naples_procedure,
    "far": far_procedure,
    "lbs": lbs_procedure,
    "table": table_procedure,
}


def builtin(name: str, **params) -> Procedure:
    """Catalog lookup: right, left, closest, prime, evenodd, naples(k),
    far(convention), lbs, table(DirTable)."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown procedure {name!r}") from None
    return factory(**params)


def parse_proc_spec(spec: str) -> Procedure:
    """Parse "name" or "name:k=v,..." into a catalog procedure."""
    name, _, tail = spec.partition(":")
    params: dict[str, Any] = {}
    if tail:
        for item in tail.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValueError(f"bad parameter {item!r} in {spec!r}")
            params[key] = int(value) if value.lstrip("-").isdigit() else value
    return builtin(name, **params)


# ---------------------------------------------------------------------------
# empirical flag verification


@dataclass(frozen=True)
class FlagCheck:
    declared: bool
    witness: tuple | None

    @property
    def observed(self) -> bool:
        return self.witness is None

    @property
    def consistent(self) -> bool:
        return self.declared == self.observed


@dataclass(frozen=True)
class FlagReport:
    procedure: str
    r_max: int
    shift_invariant: FlagCheck
    memoryless: FlagCheck
    locally_decided: FlagCheck

    @property
    def all_consistent(self) -> bool:
        return (
            self.shift_invariant.consistent
            and self.memoryless.consistent
            and self.locally_decided.consistent
        )


def _iter_test_words(r_max: int) -> Iterator[Word]:
    from itertools import product

    for n in range(1, r_max + 1):
        yield from product(range(1, r_max + 2), repeat=n)


def check_flags(p: Procedure, r_max: int) -> FlagReport:
    """Test the declared flags over every word with letters in
    {1..r_max+1} and length <= r_max; a found violation is returned as a
    witness. A flag declared false needs r_max large enough for a witness
    to exist."""
    shift_w = None
    memory_w = None
    local_w = None
    seen: dict[tuple[SpotSet, int], tuple[int, Word]] = {}

    for word in _iter_test_words(r_max):
        res = run(p, word)

        if shift_w is None:
            shifted = run(p, shift(word, 1))
            if shifted.parked != tuple(s + 1 for s in res.parked):
                shift_w = (word, shift(word, 1))

        occupied: set[int] = set()
        for idx, a in enumerate(word):
            if a in occupied:
                if memory_w is None:
                    key = (frozenset(occupied), a)
                    hit = seen.get(key)
                    if hit is None:
                        seen[key] = (res.parked[idx], word[: idx + 1])
                    elif hit[0] != res.parked[idx]:
                        memory_w = (hit[1], word[: idx + 1])
                if local_w is None:
                    blk = block_of(occupied, a)
                    sub = tuple(
                        word[j] for j in range(idx) if res.parked[j] in blk
                    )
                    if run(p, sub + (a,)).parked[-1] != res.parked[idx]:
                        local_w = (word, idx + 1, sub)
            occupied.add(res.parked[idx])

    return FlagReport(
        procedure=p.name,
        r_max=r_max,
        shift_invariant=FlagCheck(p.is_shift_invariant, shift_w),
        memoryless=FlagCheck(p.is_memoryless, memory_w),
        locally_decided=FlagCheck(p.is_locally_decided, local_w),
    )
