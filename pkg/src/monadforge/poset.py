"""Finite posets viewed as finite T0 topological spaces.

On a finite T0 space the topology is determined by the specialization order:
open sets are exactly the upward-closed sets, closed sets the downward-closed
ones, and continuous maps the monotone ones.  Everything here is phrased in
terms of the order, which makes every construction in the rest of the library
decidable.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .rational import ExtRat, ZERO, ext, rat

UPSET_ENUM_BOUND = 12


class PosetError(ValueError):
    pass


class UpsetBoundError(RuntimeError):
    """Raised when up-set enumeration is requested beyond the configured bound."""


@dataclass(frozen=True)
class FinitePoset:
    """A finite poset: unique labels plus a reflexive-transitive-antisymmetric leq matrix."""

    elements: tuple[str, ...]
    leq: tuple[tuple[bool, ...], ...]

    @property
    def n(self) -> int:
        return len(self.elements)

    def index(self, label: str) -> int:
        try:
            return self.elements.index(label)
        except ValueError:
            raise PosetError(f"unknown element {label!r}") from None

    def leq_idx(self, i: int, j: int) -> bool:
        return self.leq[i][j]

    def __repr__(self):
        pairs = [
            f"{self.elements[i]}<{self.elements[j]}"
            for i in range(self.n)
            for j in range(self.n)
            if i != j and self.leq[i][j]
        ]
        return f"FinitePoset({list(self.elements)}, [{', '.join(pairs)}])"


def poset_from_pairs(labels: Iterable[str], pairs: Iterable[tuple[int, int]]) -> FinitePoset:
    """Build a poset from index pairs; reflexive pairs may be omitted."""
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise PosetError("element labels must be unique")
    n = len(labels)
    mat = [[False] * n for _ in range(n)]
    for i in range(n):
        mat[i][i] = True
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise PosetError(f"pair ({i},{j}) out of range")
        mat[i][j] = True
    p = FinitePoset(labels, tuple(tuple(row) for row in mat))
    violation = validate(p)
    if violation is not None:
        raise PosetError(violation)
    return p


def validate(p: FinitePoset) -> Optional[str]:
    """Check the order axioms; return None if fine, else name the failing pair."""
    n = p.n
    if len(set(p.elements)) != n:
        return "labels:duplicate"
    if len(p.leq) != n or any(len(row) != n for row in p.leq):
        return "shape:leq matrix does not match element count"
    for i in range(n):
        if not p.leq[i][i]:
            return f"reflexivity:{p.elements[i]}"
    for i in range(n):
        for j in range(n):
            if i != j and p.leq[i][j] and p.leq[j][i]:
                return f"antisymmetry:({p.elements[i]},{p.elements[j]})"
    for i in range(n):
        for j in range(n):
            if not p.leq[i][j]:
                continue
            for k in range(n):
                if p.leq[j][k] and not p.leq[i][k]:
                    return f"transitivity:({p.elements[i]},{p.elements[j]},{p.elements[k]})"
    return None


def up_closure(p: FinitePoset, points: Iterable[int]) -> frozenset[int]:
    pts = set(points)
    return frozenset(j for j in range(p.n) if any(p.leq[i][j] for i in pts))


def down_closure(p: FinitePoset, points: Iterable[int]) -> frozenset[int]:
    pts = set(points)
    return frozenset(j for j in range(p.n) if any(p.leq[j][i] for i in pts))


def order_convex_closure(p: FinitePoset, points: Iterable[int]) -> frozenset[int]:
    pts = set(points)
    return up_closure(p, pts) & down_closure(p, pts)


def is_upset(p: FinitePoset, s: frozenset[int]) -> bool:
    return all(p.leq[i][j] <= (j in s) for i in s for j in range(p.n))


_UPSET_CACHE: dict[FinitePoset, tuple[frozenset[int], ...]] = {}


def enumerate_upsets(p: FinitePoset, bound: int = UPSET_ENUM_BOUND) -> tuple[frozenset[int], ...]:
    """All up-sets of p, including the empty set and the full carrier."""
    if p.n > bound:
        raise UpsetBoundError(f"{p.n} points exceeds the up-set enumeration bound {bound}")
    cached = _UPSET_CACHE.get(p)
    if cached is not None:
        return cached
    out = []
    for mask in range(1 << p.n):
        s = frozenset(i for i in range(p.n) if mask >> i & 1)
        if is_upset(p, s):
            out.append(s)
    out.sort(key=lambda s: (len(s), sorted(s)))
    result = tuple(out)
    _UPSET_CACHE[p] = result
    return result


def _labels(n: int) -> tuple[str, ...]:
    alphabet = "abcdefghijklmnopqrstuvwxyz"
    if n <= len(alphabet):
        return tuple(alphabet[:n])
    return tuple(f"x{i}" for i in range(n))


def standard_poset(kind: str, n: int, seed: int = 0, density: float = 0.4) -> FinitePoset:
    """Seeded test-instance posets: chain, antichain, diamond, random."""
    if n < 1:
        raise PosetError("poset needs at least one element")
    labels = _labels(n)
    if kind == "chain":
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    elif kind == "antichain":
        pairs = []
    elif kind == "diamond":
        if n < 3:
            raise PosetError("diamond needs at least 3 elements")
        pairs = [(0, k) for k in range(1, n)]
        pairs += [(k, n - 1) for k in range(1, n - 1)]
    elif kind == "random":
        rng = random.Random(seed)
        mat = [[False] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < density:
                    mat[i][j] = True
        # transitive closure of the random DAG
        for k in range(n):
            for i in range(n):
                if mat[i][k]:
                    for j in range(n):
                        if mat[k][j]:
                            mat[i][j] = True
        pairs = [(i, j) for i in range(n) for j in range(n) if mat[i][j]]
    else:
        raise PosetError(f"unknown poset kind {kind!r}")
    return poset_from_pairs(labels, pairs)


@dataclass(frozen=True)
class MonotoneMap:
    """A continuous map between finite T0 spaces, i.e. a monotone map."""

    source: FinitePoset
    target: FinitePoset
    assignment: tuple[int, ...]

    def __post_init__(self):
        if len(self.assignment) != self.source.n:
            raise PosetError("assignment length does not match the source")
        for i in self.assignment:
            if not 0 <= i < self.target.n:
                raise PosetError("assignment value out of target range")
        for i in range(self.source.n):
            for j in range(self.source.n):
                if self.source.leq[i][j] and not self.target.leq[self.assignment[i]][self.assignment[j]]:
                    raise PosetError(
                        f"not monotone at ({self.source.elements[i]},{self.source.elements[j]})"
                    )

    def __call__(self, i: int) -> int:
        return self.assignment[i]


def random_monotone_map(source: FinitePoset, target: FinitePoset, rng: random.Random) -> MonotoneMap:
    """Draw a monotone map, by rejection with a constant-map fallback."""
    for _ in range(200):
        assignment = tuple(rng.randrange(target.n) for _ in range(source.n))
        ok = all(
            target.leq[assignment[i]][assignment[j]]
            for i in range(source.n)
            for j in range(source.n)
            if source.leq[i][j]
        )
        if ok:
            return MonotoneMap(source, target, assignment)
    c = rng.randrange(target.n)
    return MonotoneMap(source, target, (c,) * source.n)


@dataclass(frozen=True)
class LSCFunction:
    """A lower semicontinuous map to the extended nonnegative rationals.

    Under order duality these are exactly the monotone functions, so the
    invariant is x <= y implies values[x] <= values[y].
    """

    domain: FinitePoset
    values: tuple[ExtRat, ...]

    def __post_init__(self):
        if len(self.values) != self.domain.n:
            raise PosetError("value vector length does not match the domain")
        for i in range(self.domain.n):
            for j in range(self.domain.n):
                if self.domain.leq[i][j] and not self.values[i] <= self.values[j]:
                    raise PosetError(
                        f"not monotone at ({self.domain.elements[i]},{self.domain.elements[j]})"
                    )

    def __call__(self, i: int) -> ExtRat:
        return self.values[i]


def chi(p: FinitePoset, upset: frozenset[int]) -> LSCFunction:
    """Characteristic function of an up-set, as a 0/1 monotone map."""
    if not is_upset(p, upset):
        raise PosetError("chi requires an up-set")
    return LSCFunction(p, tuple(ext(1 if i in upset else 0) for i in range(p.n)))


def random_lsc(p: FinitePoset, rng: random.Random, max_num: int = 3, max_den: int = 4) -> LSCFunction:
    """A random finite-valued monotone function (values forced monotone by up-maxing)."""
    raw = [rat(rng.randrange(max_num * max_den + 1)) / rng.randrange(1, max_den + 1) for _ in range(p.n)]
    vals = []
    for j in range(p.n):
        best = raw[j]
        for i in range(p.n):
            if p.leq[i][j] and raw[i] > best:
                best = raw[i]
        vals.append(ext(best))
    return LSCFunction(p, tuple(vals))


def poset_to_json(p: FinitePoset) -> dict:
    pairs = [
        [i, j]
        for i in range(p.n)
        for j in range(p.n)
        if p.leq[i][j] and i != j
    ]
    return {"elements": list(p.elements), "leq": pairs}


def poset_from_json(obj: dict) -> FinitePoset:
    try:
        labels = obj["elements"]
        pairs = [(int(i), int(j)) for i, j in obj["leq"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise PosetError(f"malformed poset JSON: {exc}") from exc
    return poset_from_pairs(labels, pairs)
