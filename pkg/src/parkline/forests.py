"""Indexed binary forests and the two-labeling encoding of parking runs.

A run is encoded as a forest with one binary tree per block of the final
spot set. Nodes are canonically labeled by spots through in-order
traversal. The q-labeling records arrival order (a decreasing labeling:
the block root is the most recent arrival); the p-labeling records the
preference of the car that parked at each spot. The word is recoverable
from the pair, so the encoding is injective; forgetting the labels and
keeping the support projects back onto the plain run.

Serialized form (see pair_to_json): support as a sorted list, one shape
string per block ("()" is a single node, "(L|R)" nests children) and
the two label arrays in canonical (sorted-spot) order.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .procedures import Direction, Procedure, dir_of_set, run
from .words import Block, SpotSet, Word, as_word, blocks


@dataclass(frozen=True)
class Tree:
    """Nonempty binary tree; an absent child is None."""

    left: "Tree | None" = None
    right: "Tree | None" = None


def tree_size(t: Tree | None) -> int:
    return 0 if t is None else 1 + tree_size(t.left) + tree_size(t.right)


def tree_to_str(t: Tree | None) -> str:
    if t is None:
        return ""
    return f"({tree_to_str(t.left)}|{tree_to_str(t.right)})"


def tree_from_str(text: str) -> Tree | None:
    def parse(s: str, pos: int) -> tuple[Tree | None, int]:
        if pos >= len(s) or s[pos] != "(":
            return None, pos
        left, pos = parse(s, pos + 1)
        assert s[pos] == "|", f"bad shape string at {pos}"
        right, pos = parse(s, pos + 1)
        assert s[pos] == ")", f"bad shape string at {pos}"
        return Tree(left, right), pos + 1

    tree, end = parse(text, 0)
    if end != len(text):
        raise ValueError(f"trailing characters in shape string {text!r}")
    return tree


def decreasing_tree(seq: Sequence[int]) -> Tree | None:
    """Binary tree of a sequence of distinct values: root at the maximum,
    children built from the left and right remainders."""
    if not seq:
        return None
    k = max(range(len(seq)), key=seq.__getitem__)
    return Tree(decreasing_tree(seq[:k]), decreasing_tree(seq[k + 1 :]))


def node_intervals(t: Tree | None, lo: int) -> dict[int, tuple[int, int]]:
    """Subtree span of each node under canonical (in-order) labeling of a
    block starting at `lo`; node i maps to (l_i, r_i)."""
    out: dict[int, tuple[int, int]] = {}

    def walk(node: Tree | None, lo: int) -> int:
        if node is None:
            return lo
        mid = walk(node.left, lo)
        hi = walk(node.right, mid + 1)
        out[mid] = (lo, hi - 1)
        return hi

    walk(t, lo)
    return out


@dataclass(frozen=True)
class IndexedForest:
    """A spot set with one binary tree per block, tree sizes matching
    block sizes; nodes are the spots via in-order traversal."""

    support: SpotSet
    trees: tuple[Tree | None, ...]

    def __post_init__(self) -> None:
        bls = blocks(self.support)
        if len(bls) != len(self.trees):
            raise ValueError(f"{len(self.trees)} trees for {len(bls)} blocks")
        for b, t in zip(bls, self.trees):
            if tree_size(t) != b.size:
                raise ValueError(f"tree size {tree_size(t)} != block size {b.size}")

    @property
    def block_list(self) -> tuple[Block, ...]:
        return blocks(self.support)

    def intervals(self) -> dict[int, tuple[int, int]]:
        out: dict[int, tuple[int, int]] = {}
        for b, t in zip(self.block_list, self.trees):
            out.update(node_intervals(t, b.lo))
        return out


@dataclass(frozen=True)
class ForestPair:
    """Shape plus the two labelings, stored in canonical (sorted-spot)
    order: q_labels are arrival indices (decreasing along every tree),
    p_labels are preferences."""

    forest: IndexedForest
    p_labels: tuple[int, ...]
    q_labels: tuple[int, ...]

    def spots(self) -> list[int]:
        return sorted(self.forest.support)

    def p_label_of(self) -> dict[int, int]:
        return dict(zip(self.spots(), self.p_labels))

    def q_label_of(self) -> dict[int, int]:
        return dict(zip(self.spots(), self.q_labels))


def pair_from_trace(word, spots: SpotSet, parked: Sequence[int]) -> ForestPair:
    """Build the pair from a run trace; word letters may be any objects
    whose identity the p-labels should carry."""
    outcome = {spot: i + 1 for i, spot in enumerate(parked)}
    trees = tuple(
        decreasing_tree([outcome[s] for s in b.spots()]) for b in blocks(spots)
    )
    ordered = sorted(spots)
    q_labels = tuple(outcome[s] for s in ordered)
    p_labels = tuple(word[outcome[s] - 1] for s in ordered)
    return ForestPair(IndexedForest(frozenset(spots), trees), p_labels, q_labels)


def encode(p: Procedure, word: Iterable[int]) -> ForestPair:
    """The injective lift of a run: common shape, arrival labeling Q and
    preference labeling P."""
    word = as_word(word)
    res = run(p, word)
    return pair_from_trace(word, res.spots, res.parked)


def project(pair: ForestPair) -> SpotSet:
    """Support of the shape; composing with encode returns the plain run."""
    return pair.forest.support


def word_of_pair(pair: ForestPair) -> Word:
    """The only word that can map to this pair: car q_i prefers p_i."""
    r = len(pair.p_labels)
    letters = [0] * r
    for p_lab, q_lab in zip(pair.p_labels, pair.q_labels):
        letters[q_lab - 1] = p_lab
    return tuple(letters)


def is_decreasing(pair: ForestPair) -> bool:
    """q-labels are {1..r} and every node exceeds its whole subtree."""
    r = len(pair.q_labels)
    if sorted(pair.q_labels) != list(range(1, r + 1)):
        return False
    q = pair.q_label_of()
    return all(
        q[i] > q[j]
        for i, (lo, hi) in pair.forest.intervals().items()
        for j in range(lo, hi + 1)
        if j != i
    )


# ---------------------------------------------------------------------------
# label sets and fibers


def label_set(p: Procedure, node: int, lo: int, hi: int) -> frozenset[int]:
    """Preferences that can label `node` when its subtree spans [lo, hi]:
    the node itself, plus the left-span spots bounced right onto it, plus
    the right-span spots bounced left onto it."""
    if not (p.is_memoryless and p.is_locally_decided):
        raise ValueError(f"{p.name} must be memoryless and locally decided")
    if not lo <= node <= hi:
        raise ValueError(f"node {node} outside [{lo}, {hi}]")
    out = {node}
    left_span = frozenset(range(lo, node))
    for j in left_span:
        if dir_of_set(p, left_span, j) is Direction.RIGHT:
            out.add(j)
    right_span = frozenset(range(node + 1, hi + 1))
    for j in right_span:
        if dir_of_set(p, right_span, j) is Direction.LEFT:
            out.add(j)
    return frozenset(out)


def _as_sigma(sigma: Sequence[int]) -> tuple[int, ...]:
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(1, len(sigma) + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{len(sigma)}")
    return sigma


def fiber_count(p: Procedure, sigma: Sequence[int]) -> int:
    """Number of parking words whose outcome is sigma (sigma[i-1] = arrival
    index of the car at spot i), from the label-set product."""
    sigma = _as_sigma(sigma)
    tree = decreasing_tree(sigma)
    return math.prod(
        len(label_set(p, node, lo, hi))
        for node, (lo, hi) in node_intervals(tree, 1).items()
    )


def fiber_counts_brute(
    p: Procedure, r: int, backend: str | None = None
) -> dict[tuple[int, ...], int]:
    """Outcome histogram of all parking words of length r, by enumeration."""
    from . import _kernels
    from .enumeration import parked_matrix

    counts: Counter[tuple[int, ...]] = Counter()
    for words in _kernels.word_chunks(r, 1, r + 1):
        parked = parked_matrix(p, words, backend)
        ok = (parked.min(axis=1) >= 1) & (parked.max(axis=1) <= r)
        for row in parked[ok].tolist():
            sigma = [0] * r
            for idx, spot in enumerate(row):
                sigma[spot - 1] = idx + 1
            counts[tuple(sigma)] += 1
    return dict(counts)


def decreasing_labelings_count(t: Tree | None) -> int:
    """Number of ways to label the tree with {1..size} decreasingly."""
    if t is None:
        return 1
    ls, rs = tree_size(t.left), tree_size(t.right)
    return (
        math.comb(ls + rs, ls)
        * decreasing_labelings_count(t.left)
        * decreasing_labelings_count(t.right)
    )


def shape_count(p: Procedure, t: Tree) -> int:
    """Number of parking words of length size(t) whose pair has this tree
    as its shape (label-set product times decreasing labelings)."""
    labelings = math.prod(
        len(label_set(p, node, lo, hi))
        for node, (lo, hi) in node_intervals(t, 1).items()
    )
    return labelings * decreasing_labelings_count(t)


def iter_tree_shapes(r: int) -> Iterator[Tree | None]:
    """All binary tree shapes with r nodes."""
    if r == 0:
        yield None
        return
    for ls in range(r):
        for left in iter_tree_shapes(ls):
            for right in iter_tree_shapes(r - 1 - ls):
                yield Tree(left, right)


# ---------------------------------------------------------------------------
# good correspondences


def _labelings_of_tree(t: Tree | None, labels: frozenset[int]) -> Iterator[dict]:
    """Decreasing labelings of one tree with the given label set, as maps
    keyed by in-order position (0-based within the tree)."""
    if t is None:
        yield {}
        return
    root_pos = tree_size(t.left)
    rest = labels - {max(labels)}
    for left_labels in itertools.combinations(sorted(rest), tree_size(t.left)):
        right_labels = rest - set(left_labels)
        for lmap in _labelings_of_tree(t.left, frozenset(left_labels)):
            for rmap in _labelings_of_tree(t.right, frozenset(right_labels)):
                out = {root_pos: max(labels)}
                out.update(lmap)
                out.update({root_pos + 1 + pos: lab for pos, lab in rmap.items()})
                yield out


def iter_decreasing_labelings(forest: IndexedForest) -> Iterator[tuple[int, ...]]:
    """All decreasing labelings of the forest with {1..r}, in canonical
    spot order."""
    bls = forest.block_list
    r = len(forest.support)

    def rec(idx: int, remaining: frozenset[int]) -> Iterator[tuple[int, ...]]:
        if idx == len(bls):
            yield ()
            return
        size = bls[idx].size
        for chosen in itertools.combinations(sorted(remaining), size):
            for lmap in _labelings_of_tree(forest.trees[idx], frozenset(chosen)):
                head = tuple(lmap[pos] for pos in range(size))
                for tail in rec(idx + 1, remaining - set(chosen)):
                    yield head + tail

    yield from rec(0, frozenset(range(1, r + 1)))


@dataclass(frozen=True)
class GoodnessReport:
    procedure: str
    r_max: int
    good: bool
    # witness: (word, alternative q-labels, candidate word that fails)
    witness: tuple[Word, tuple[int, ...], Word] | None


def is_good_correspondence(p: Procedure, r_max: int) -> GoodnessReport:
    """Check that relabeling the arrival forest of any image pair with any
    other decreasing labeling stays in the image. Membership of (P, Q') is
    decided by replaying its unique candidate word."""
    for r in range(1, r_max + 1):
        for word in itertools.product(range(1, r_max + 2), repeat=r):
            pair = encode(p, word)
            for q_labels in iter_decreasing_labelings(pair.forest):
                if q_labels == pair.q_labels:
                    continue
                candidate = ForestPair(pair.forest, pair.p_labels, q_labels)
                if encode(p, word_of_pair(candidate)) != candidate:
                    return GoodnessReport(
                        p.name, r_max, False, (word, q_labels, word_of_pair(candidate))
                    )
    return GoodnessReport(p.name, r_max, True, None)


def total_displacement(p: Procedure, word: Iterable[int]) -> int:
    """Sum over cars of |preference - parked spot|."""
    word = as_word(word)
    res = run(p, word)
    return sum(abs(a - s) for a, s in zip(word, res.parked))


# ---------------------------------------------------------------------------
# probabilistic lift and serialization


def weighted_pairs(pp, word: Iterable[int]):
    """Pair-valued lift of a probabilistic rule: every branch of the run
    contributes its pair with the branch weight."""
    from .probabilistic import path_distribution

    word = as_word(word)
    out: dict[ForestPair, object] = {}
    for parked, weight in path_distribution(pp, word).items():
        pair = pair_from_trace(word, frozenset(parked), parked)
        out[pair] = out.get(pair, 0) + weight
    return out


def pair_to_json(pair: ForestPair) -> dict:
    return {
        "support": pair.spots(),
        "shapes": [tree_to_str(t) for t in pair.forest.trees],
        "p_labels": list(pair.p_labels),
        "q_labels": list(pair.q_labels),
    }


def pair_from_json(doc: dict) -> ForestPair:
    support = frozenset(doc["support"])
    trees = tuple(tree_from_str(s) for s in doc["shapes"])
    return ForestPair(
        IndexedForest(support, trees),
        tuple(doc["p_labels"]),
        tuple(doc["q_labels"]),
    )


# r=3 labeling multisets: this encoding gives (6,4,3,2,1) over the five
# shapes; the labeled-Dyck-path and Shi-tree encodings both give
# (6,3,3,3,1), so neither is a relabeling of ours.
DYCK_SHI_R3_LABELING_COUNTS = (6, 3, 3, 3, 1)
