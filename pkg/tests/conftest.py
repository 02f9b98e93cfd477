"""Shared test helpers.

`oracle_run` is an independent reference simulator: it scans the line for
free spots operationally (nearest-free-to-the-right, distance comparison,
back-up-then-go-right, population counts) instead of using the library's
block-edge formulation, so agreement is a real cross-check.
"""

from __future__ import annotations

import random

from parkline.procedures import Direction, DirTable, table_procedure


def _nearest_free_left(occ: set[int], a: int) -> int:
    s = a
    while s in occ:
        s -= 1
    return s


def _nearest_free_right(occ: set[int], a: int) -> int:
    s = a
    while s in occ:
        s += 1
    return s


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, n))


def oracle_spot(rule: str, occ: set[int], a: int, k: int = 1) -> int:
    """Spot chosen for a car preferring the occupied spot `a`."""
    left = _nearest_free_left(occ, a)
    right = _nearest_free_right(occ, a)
    if rule == "right":
        return right
    if rule == "left":
        return left
    if rule == "closest":
        return right if right - a <= a - left else left
    if rule == "prime":
        return right if _is_prime(right - left - 1) else left
    if rule == "naples":
        for j in range(1, k + 1):
            if a - j not in occ:
                return a - j if a - j > 0 else right
        return right
    if rule == "far":
        nright = sum(1 for s in occ if s > a)
        nleft = sum(1 for s in occ if s < a)
        return right if nright <= nleft else left
    if rule == "evenodd":
        return right if a % 2 == 0 else left
    raise ValueError(rule)


def oracle_run(rule: str, word, k: int = 1) -> tuple[set[int], list[int]]:
    occ: set[int] = set()
    parked: list[int] = []
    for a in word:
        spot = a if a not in occ else oracle_spot(rule, occ, a, k)
        occ.add(spot)
        parked.append(spot)
    return occ, parked


def oracle_lbs_run(word) -> tuple[set[int], list[int]]:
    """Independent last-block-setter: recompute the block's last parker
    from the full trace at every step."""
    occ: set[int] = set()
    parked: list[int] = []
    for a in word:
        if a not in occ:
            spot = a
        else:
            lo = a
            while lo - 1 in occ:
                lo -= 1
            hi = a
            while hi + 1 in occ:
                hi += 1
            last_j = max(j for j, s in enumerate(parked) if lo <= s <= hi)
            spot = hi + 1 if a >= word[last_j] else lo - 1
        occ.add(spot)
        parked.append(spot)
    return occ, parked


def random_dir_tables(count: int, r_max: int, seed: int) -> list:
    """Deterministic batch of table procedures (memoryless local rules)."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        rows = tuple(
            tuple(rng.choice((Direction.LEFT, Direction.RIGHT)) for _ in range(r))
            for r in range(1, r_max + 1)
        )
        table = DirTable(rows, rng.choice((Direction.LEFT, Direction.RIGHT)))
        out.append(table_procedure(table, name=f"rand{i}"))
    return out
