"""The recursive element model: spaces, presented elements, and their oracles.

A SpaceDescriptor says which composite space an element inhabits (a base
poset, a valuation layer, one of the three hyperspaces, or a prevision layer).
Elements are finitely presented: valuations are weighted sums of Diracs,
hyperspace elements are generated sets (with an optional convexity flag over
valuation layers), previsions carry their generating valuations, forks carry a
pair of generator lists.

This module provides the three oracles everything else relies on:

* ``leq_elements`` decides the specialization order of any descriptor,
* ``equal_elements`` decides equality (order both ways),
* ``canonicalize`` reduces generator lists to their unique minimal form.

All values are immutable and all functions are pure; the module-level caches
only memoize pure results, so concurrent callers see the same answers as
sequential ones.

One representation caveat is inherited from the mathematics: a union of
several convex parts is kept as a list of parts, and containment queries
against such a union are only decidable when the containing side collapses to
a single convex part (or everything in sight is plain).  The shipped suites
only ever compare sides that have been collapsed; the honest failure mode for
user queries is ``UndecidableRepresentationError``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

from . import exactlp
from .poset import FinitePoset
from .rational import ExtRat, ZERO, ext, ext_max, ext_min, ext_sum, rat, rat_str


class SpaceMismatchError(TypeError):
    pass


class UndecidableRepresentationError(RuntimeError):
    """Both sides are irreducible unions of convex parts; see module docstring."""


# ---------------------------------------------------------------------------
# Space descriptors
# ---------------------------------------------------------------------------

FLAVORS = ("all", "sub1", "one")
PREV_KINDS = ("DN", "AN", "ADN")


@dataclass(frozen=True)
class BaseSpace:
    poset: FinitePoset


@dataclass(frozen=True)
class ValSpace:
    child: "Space"
    flavor: str

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise SpaceMismatchError(f"unknown flavor {self.flavor!r}")


@dataclass(frozen=True)
class SmythSpace:
    child: "Space"


@dataclass(frozen=True)
class HoareSpace:
    child: "Space"


@dataclass(frozen=True)
class PlotkinSpace:
    child: "Space"


@dataclass(frozen=True)
class PrevSpace:
    child: "Space"
    kind: str
    flavor: str

    def __post_init__(self):
        if self.kind not in PREV_KINDS:
            raise SpaceMismatchError(f"unknown prevision kind {self.kind!r}")
        if self.flavor not in FLAVORS:
            raise SpaceMismatchError(f"unknown flavor {self.flavor!r}")


Space = Union[BaseSpace, ValSpace, SmythSpace, HoareSpace, PlotkinSpace, PrevSpace]

HYPER_SPACES = (SmythSpace, HoareSpace, PlotkinSpace)


def convex_capable(space: Space) -> bool:
    """Spaces whose points can be mixed: valuation and prevision layers."""
    return isinstance(space, (ValSpace, PrevSpace))


def space_depth(space: Space) -> int:
    if isinstance(space, BaseSpace):
        return 0
    return 1 + space_depth(space.child)


def base_of(space: Space) -> FinitePoset:
    while not isinstance(space, BaseSpace):
        space = space.child
    return space.poset


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Point:
    index: int


@dataclass(frozen=True)
class Valuation:
    entries: tuple[tuple[Fraction, "Element"], ...]


@dataclass(frozen=True)
class SetPart:
    gens: tuple["Element", ...]
    convex: bool


@dataclass(frozen=True)
class UpSet:
    parts: tuple[SetPart, ...]


@dataclass(frozen=True)
class DownSet:
    parts: tuple[SetPart, ...]


@dataclass(frozen=True)
class LensElem:
    up: tuple[SetPart, ...]
    down: tuple[SetPart, ...]


@dataclass(frozen=True)
class Prevision:
    kind: str  # DN (value = min over generators) or AN (value = max)
    gens: tuple["Element", ...]


@dataclass(frozen=True)
class Fork:
    neg: tuple["Element", ...]  # superlinear part generators
    pos: tuple["Element", ...]  # sublinear part generators


Element = Union[Point, Valuation, UpSet, DownSet, LensElem, Prevision, Fork]


def point(i: int) -> Point:
    return Point(i)


def valuation(entries: Iterable[tuple[Fraction, Element]]) -> Valuation:
    return Valuation(tuple((rat(w), x) for w, x in entries))


def dirac(x: Element) -> Valuation:
    return Valuation(((rat(1), x),))


def up_set(gens: Iterable[Element], convex: bool = False) -> UpSet:
    return UpSet((SetPart(tuple(gens), convex),))


def down_set(gens: Iterable[Element], convex: bool = False) -> DownSet:
    return DownSet((SetPart(tuple(gens), convex),))


def lens_element(up_gens: Iterable[Element], down_gens: Iterable[Element], convex: bool = False) -> LensElem:
    return LensElem(
        (SetPart(tuple(up_gens), convex),),
        (SetPart(tuple(down_gens), convex),),
    )


def mass(v: Valuation) -> Fraction:
    return sum((w for w, _ in v.entries), rat(0))


def all_part_gens(parts: tuple[SetPart, ...]) -> tuple[Element, ...]:
    out: list[Element] = []
    for part in parts:
        out.extend(part.gens)
    return tuple(out)


# ---------------------------------------------------------------------------
# Deterministic structural sort key
# ---------------------------------------------------------------------------


def sort_key(e: Element):
    if isinstance(e, Point):
        return (0, e.index)
    if isinstance(e, Valuation):
        return (1, tuple((sort_key(x), w) for w, x in e.entries))
    if isinstance(e, UpSet):
        return (2, tuple(_part_key(p) for p in e.parts))
    if isinstance(e, DownSet):
        return (3, tuple(_part_key(p) for p in e.parts))
    if isinstance(e, LensElem):
        return (4, tuple(_part_key(p) for p in e.up), tuple(_part_key(p) for p in e.down))
    if isinstance(e, Prevision):
        return (5, e.kind, tuple(sort_key(g) for g in e.gens))
    if isinstance(e, Fork):
        return (6, tuple(sort_key(g) for g in e.neg), tuple(sort_key(g) for g in e.pos))
    raise SpaceMismatchError(f"not an element: {e!r}")


def _part_key(p: SetPart):
    return (p.convex, tuple(sort_key(g) for g in p.gens))


# ---------------------------------------------------------------------------
# Structure-preserving map over one functor layer
# ---------------------------------------------------------------------------


def functor_map(e: Element, fn: Callable[[Element], Element]) -> Element:
    """Apply fn to the children one functor layer below e, keeping all flags."""
    if isinstance(e, Valuation):
        return Valuation(tuple((w, fn(x)) for w, x in e.entries))
    if isinstance(e, UpSet):
        return UpSet(tuple(SetPart(tuple(fn(g) for g in p.gens), p.convex) for p in e.parts))
    if isinstance(e, DownSet):
        return DownSet(tuple(SetPart(tuple(fn(g) for g in p.gens), p.convex) for p in e.parts))
    if isinstance(e, LensElem):
        return LensElem(
            tuple(SetPart(tuple(fn(g) for g in p.gens), p.convex) for p in e.up),
            tuple(SetPart(tuple(fn(g) for g in p.gens), p.convex) for p in e.down),
        )
    if isinstance(e, Prevision):
        return Prevision(e.kind, tuple(functor_map(g, fn) for g in e.gens))
    if isinstance(e, Fork):
        return Fork(
            tuple(functor_map(g, fn) for g in e.neg),
            tuple(functor_map(g, fn) for g in e.pos),
        )
    raise SpaceMismatchError("a bare point has no functor layer to map under")


# ---------------------------------------------------------------------------
# Membership and containment over generated sets
# ---------------------------------------------------------------------------

_LEQ_CACHE: dict = {}
_CANON_CACHE: dict = {}
_UPMEM_CACHE: dict = {}
_DOWNMEM_CACHE: dict = {}


def clear_caches() -> None:
    _LEQ_CACHE.clear()
    _CANON_CACHE.clear()
    _UPMEM_CACHE.clear()
    _DOWNMEM_CACHE.clear()


def _convexish(part: SetPart) -> bool:
    # The upward/downward closure of a single point is already convex.
    return part.convex or len(part.gens) == 1


def _conv_up_member(child: Space, x: Element, gens: tuple[Element, ...]) -> bool:
    if len(gens) == 1:
        return leq_elements(child, gens[0], x)
    if not isinstance(child, ValSpace):
        raise UndecidableRepresentationError(
            "convex membership is only available over valuation layers"
        )
    key = (child, x, frozenset(gens))
    hit = _UPMEM_CACHE.get(key)
    if hit is None:
        hit = exactlp.convex_up_membership(child, x, gens)
        _UPMEM_CACHE[key] = hit
    return hit


def _conv_down_member(child: Space, x: Element, gens: tuple[Element, ...]) -> bool:
    if len(gens) == 1:
        return leq_elements(child, x, gens[0])
    if not isinstance(child, ValSpace):
        raise UndecidableRepresentationError(
            "convex membership is only available over valuation layers"
        )
    key = (child, x, frozenset(gens))
    hit = _DOWNMEM_CACHE.get(key)
    if hit is None:
        hit = exactlp.convex_down_membership(child, x, gens)
        _DOWNMEM_CACHE[key] = hit
    return hit


def member_up(child: Space, parts: tuple[SetPart, ...], x: Element) -> bool:
    """Is x in the union of upward(-convex) parts?"""
    for part in parts:
        if part.convex:
            if _conv_up_member(child, x, part.gens):
                return True
        elif any(leq_elements(child, g, x) for g in part.gens):
            return True
    return False


def member_down(child: Space, parts: tuple[SetPart, ...], x: Element) -> bool:
    for part in parts:
        if part.convex:
            if _conv_down_member(child, x, part.gens):
                return True
        elif any(leq_elements(child, x, g) for g in part.gens):
            return True
    return False


def _cover(child: Space, big: tuple[SetPart, ...], small: tuple[SetPart, ...], down: bool) -> bool:
    """Does the union denoted by ``big`` contain the union denoted by ``small``?

    Decidable whenever each convex part of ``small`` faces a single convex
    container; a convex part against a genuine union of parts is the
    documented undecidable corner.
    """
    member = member_down if down else member_up
    conv_member = _conv_down_member if down else _conv_up_member
    single_convex = len(big) == 1 and _convexish(big[0])
    for part in small:
        if part.convex and len(part.gens) > 1 and not single_convex:
            raise UndecidableRepresentationError(
                "containment of a convex part in a union of parts"
            )
        if single_convex:
            if not all(conv_member(child, g, big[0].gens) for g in part.gens):
                return False
        else:
            if not all(member(child, big, g) for g in part.gens):
                return False
    return True


# ---------------------------------------------------------------------------
# The specialization order
# ---------------------------------------------------------------------------


def leq_elements(space: Space, e1: Element, e2: Element) -> bool:
    """Decide the specialization order of ``space`` between two elements."""
    key = (space, e1, e2)
    hit = _LEQ_CACHE.get(key)
    if hit is not None:
        return hit
    result = _leq_elements(space, e1, e2)
    _LEQ_CACHE[key] = result
    return result


def _leq_elements(space: Space, e1: Element, e2: Element) -> bool:
    if isinstance(space, BaseSpace):
        if not isinstance(e1, Point) or not isinstance(e2, Point):
            raise SpaceMismatchError("base spaces contain points")
        return space.poset.leq[e1.index][e2.index]
    if isinstance(space, ValSpace):
        return exactlp.stochastic_leq(space, e1, e2, method="coupling")
    if isinstance(space, SmythSpace):
        # Smyth order is reverse inclusion.
        return _cover(space.child, e1.parts, e2.parts, down=False)
    if isinstance(space, HoareSpace):
        return _cover(space.child, e2.parts, e1.parts, down=True)
    if isinstance(space, PlotkinSpace):
        # Topological Egli-Milner: up parts by reverse inclusion, down parts by inclusion.
        return _cover(space.child, e1.up, e2.up, down=False) and _cover(
            space.child, e2.down, e1.down, down=True
        )
    if isinstance(space, PrevSpace):
        vsp = ValSpace(space.child, space.flavor)
        if space.kind == "DN":
            return all(_conv_up_member(vsp, g, e1.gens) for g in e2.gens)
        if space.kind == "AN":
            return all(_conv_down_member(vsp, g, e2.gens) for g in e1.gens)
        return all(_conv_up_member(vsp, g, e1.neg) for g in e2.neg) and all(
            _conv_down_member(vsp, g, e2.pos) for g in e1.pos
        )
    raise SpaceMismatchError(f"unknown space {space!r}")


def _single_part_canonical(e: Element) -> bool:
    if isinstance(e, (UpSet, DownSet)):
        return len(e.parts) == 1
    if isinstance(e, LensElem):
        return len(e.up) == 1 and len(e.down) == 1
    return True


def equal_elements(space: Space, e1: Element, e2: Element) -> bool:
    """Order-antisymmetric equality; canonical forms compare structurally first.

    Canonical generator lists are unique (minimal antichains for plain sets,
    hull vertices for convex ones, and a convex part with two or more vertices
    is never plainly generated), so two distinct canonical single-part sets
    always denote distinct sets.  That settles the comparisons whose raw
    containment test is representation-undecidable; only irreducible unions
    of convex parts remain honest errors.
    """
    c1 = canonicalize(space, e1)
    c2 = canonicalize(space, e2)
    if c1 == c2:
        return True
    try:
        return leq_elements(space, c1, c2) and leq_elements(space, c2, c1)
    except UndecidableRepresentationError:
        if _single_part_canonical(c1) and _single_part_canonical(c2):
            return False
        raise


# ---------------------------------------------------------------------------
# Canonical forms
# ---------------------------------------------------------------------------


def canonicalize(space: Space, e: Element) -> Element:
    key = (space, e)
    hit = _CANON_CACHE.get(key)
    if hit is not None:
        return hit
    result = _canonicalize(space, e)
    _CANON_CACHE[key] = result
    _CANON_CACHE[(space, result)] = result
    return result


def _canonicalize(space: Space, e: Element) -> Element:
    if isinstance(space, BaseSpace):
        if not isinstance(e, Point):
            raise SpaceMismatchError("base spaces contain points")
        return e
    if isinstance(space, ValSpace):
        if not isinstance(e, Valuation):
            raise SpaceMismatchError("valuation layer expects a Valuation")
        merged: dict[Element, Fraction] = {}
        order: list[Element] = []
        for w, x in e.entries:
            xc = canonicalize(space.child, x)
            if xc not in merged:
                merged[xc] = rat(0)
                order.append(xc)
            merged[xc] += rat(w)
        entries = [(merged[x], x) for x in order if merged[x] != 0]
        entries.sort(key=lambda wx: sort_key(wx[1]))
        return Valuation(tuple(entries))
    if isinstance(space, SmythSpace):
        if not isinstance(e, UpSet):
            raise SpaceMismatchError("Smyth layer expects an UpSet")
        return UpSet(_canon_parts(space.child, e.parts, down=False))
    if isinstance(space, HoareSpace):
        if not isinstance(e, DownSet):
            raise SpaceMismatchError("Hoare layer expects a DownSet")
        return DownSet(_canon_parts(space.child, e.parts, down=True))
    if isinstance(space, PlotkinSpace):
        if not isinstance(e, LensElem):
            raise SpaceMismatchError("Plotkin layer expects a lens")
        return LensElem(
            _canon_parts(space.child, e.up, down=False),
            _canon_parts(space.child, e.down, down=True),
        )
    if isinstance(space, PrevSpace):
        vsp = ValSpace(space.child, space.flavor)
        if space.kind in ("DN", "AN"):
            if not isinstance(e, Prevision) or e.kind != space.kind:
                raise SpaceMismatchError(f"prevision layer expects a {space.kind} prevision")
            gens = _reduce_convex(vsp, e.gens, down=(space.kind == "AN"))
            return Prevision(e.kind, gens)
        if not isinstance(e, Fork):
            raise SpaceMismatchError("fork layer expects a Fork")
        return Fork(
            _reduce_convex(vsp, e.neg, down=False),
            _reduce_convex(vsp, e.pos, down=True),
        )
    raise SpaceMismatchError(f"unknown space {space!r}")


def _reduce_plain(child: Space, gens: tuple[Element, ...], down: bool) -> tuple[Element, ...]:
    """Keep the minimal (up) or maximal (down) generators; unique antichain."""
    canon = []
    for g in gens:
        gc = canonicalize(child, g)
        if gc not in canon:
            canon.append(gc)
    kept = []
    for g in canon:
        dominated = any(
            h != g and (leq_elements(child, g, h) if down else leq_elements(child, h, g))
            for h in canon
        )
        if not dominated:
            kept.append(g)
    kept.sort(key=sort_key)
    return tuple(kept)


def _reduce_convex(child: Space, gens: tuple[Element, ...], down: bool) -> tuple[Element, ...]:
    """Greedy removal of generators inside the hull of the others; unique vertex set."""
    canon = []
    for g in gens:
        gc = canonicalize(child, g)
        if gc not in canon:
            canon.append(gc)
    canon.sort(key=sort_key)
    if not isinstance(child, ValSpace):
        # Minkowski-convex parts over hyperspaces are transient carriers for
        # the multiplication; leave their generator lists unreduced.
        return tuple(canon)
    member = _conv_down_member if down else _conv_up_member
    kept = list(canon)
    for g in list(canon):
        if len(kept) > 1:
            rest = tuple(h for h in kept if h != g)
            if member(child, g, rest):
                kept.remove(g)
    return tuple(kept)


def _canon_parts(child: Space, parts: tuple[SetPart, ...], down: bool) -> tuple[SetPart, ...]:
    if not parts or any(not p.gens for p in parts):
        raise SpaceMismatchError("hyperspace elements need nonempty generator parts")
    plain_gens: list[Element] = []
    convex_parts: list[SetPart] = []
    for p in parts:
        if p.convex and len(p.gens) > 1:
            convex_parts.append(p)
        else:
            plain_gens.extend(p.gens)
    out: list[SetPart] = []
    if plain_gens:
        out.append(SetPart(_reduce_plain(child, tuple(plain_gens), down), False))
    for p in convex_parts:
        gens = _reduce_convex(child, p.gens, down)
        out.append(SetPart(gens, len(gens) > 1))
    if len(out) > 1:
        out = _absorb_parts(child, out, down)
    out.sort(key=_part_key)
    return tuple(out)


def _absorb_parts(child: Space, parts: list[SetPart], down: bool) -> list[SetPart]:
    kept = list(parts)
    changed = True
    while changed:
        changed = False
        for p in list(kept):
            others = [q for q in kept if q is not p]
            if not others:
                break
            try:
                if _cover(child, tuple(others), (p,), down):
                    kept.remove(p)
                    changed = True
            except UndecidableRepresentationError:
                continue
    return kept


# ---------------------------------------------------------------------------
# Evaluation of valuations and previsions against test functions
# ---------------------------------------------------------------------------


def integrate_valuation(v: Valuation, fn: Callable[[Element], ExtRat]) -> ExtRat:
    """The integral of a test function against a simple valuation (0*inf = 0)."""
    return ext_sum(ext(w) * ext(fn(x)) for w, x in v.entries)


def prevision_value(F: Element, fn: Callable[[Element], ExtRat]) -> ExtRat:
    """Evaluate a prevision (min over generators for DN, max for AN)."""
    if isinstance(F, Prevision):
        vals = [integrate_valuation(g, fn) for g in F.gens]
        return ext_min(vals) if F.kind == "DN" else ext_max(vals)
    raise SpaceMismatchError("prevision_value expects a DN or AN prevision")


def fork_values(F: Fork, fn: Callable[[Element], ExtRat]) -> tuple[ExtRat, ExtRat]:
    lo = ext_min(integrate_valuation(g, fn) for g in F.neg)
    hi = ext_max(integrate_valuation(g, fn) for g in F.pos)
    return lo, hi


def walley_check(fneg: Element, fpos: Element, h, hp) -> bool:
    """Check F-(h+h') <= F-(h) + F+(h') <= F+(h+h') exactly.

    fneg and fpos are previsions over a base poset (min-type and max-type);
    h and hp are monotone test functions on that poset.
    """
    fn_h = lambda x: h(x.index)
    fn_hp = lambda x: hp(x.index)
    fn_sum = lambda x: ext(h(x.index)) + ext(hp(x.index))
    left = prevision_value(fneg, fn_sum)
    mid = prevision_value(fneg, fn_h) + prevision_value(fpos, fn_hp)
    right = prevision_value(fpos, fn_sum)
    return left <= mid and mid <= right


# ---------------------------------------------------------------------------
# Seeded random elements
# ---------------------------------------------------------------------------


def random_element(space: Space, seed: int, budget: int = 3) -> Element:
    """Deterministic per (space, seed, budget); weights use small denominators."""
    rng = random.Random(seed * 1_000_003 + space_depth(space) * 101 + budget)
    return draw_element(space, rng, budget)


def _random_weights(rng: random.Random, k: int, flavor: str) -> list[Fraction]:
    den = rng.randrange(max(2, k), 9)
    if flavor == "one":
        cuts = sorted(rng.sample(range(1, den), k - 1)) if k > 1 else []
        parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
        return [Fraction(c, den) for c in parts]
    if flavor == "sub1":
        total = rng.randrange(k, den + 1)
        cuts = sorted(rng.sample(range(1, total), k - 1)) if k > 1 else []
        parts = [b - a for a, b in zip([0] + cuts, cuts + [total])]
        return [Fraction(c, den) for c in parts]
    return [Fraction(rng.randrange(1, 9), rng.randrange(1, 9)) for _ in range(k)]


def draw_element(space: Space, rng: random.Random, budget: int, _styles: Optional[dict] = None) -> Element:
    """Draw one presented element; deterministic for a given rng state.

    Within one draw session every hyperspace layer over a valuation layer
    commits to a single style (all convex or all plain).  Mixing the two
    styles among siblings would force plain-versus-convex containment
    queries, which is exactly the representation corner the order oracle
    refuses to answer.
    """
    budget = max(1, budget)
    if _styles is None:
        _styles = {}
    if isinstance(space, BaseSpace):
        return Point(rng.randrange(space.poset.n))
    if isinstance(space, ValSpace):
        k = rng.randrange(1, budget + 1)
        if space.flavor != "one" and rng.random() < 0.08:
            return canonicalize(space, Valuation(()))
        weights = _random_weights(rng, k, space.flavor)
        children = [draw_element(space.child, rng, budget, _styles) for _ in range(k)]
        return canonicalize(space, Valuation(tuple(zip(weights, children))))
    if isinstance(space, (SmythSpace, HoareSpace)):
        k = rng.randrange(1, budget + 1)
        gens = tuple(draw_element(space.child, rng, budget, _styles) for _ in range(k))
        convex = convex_capable(space.child) and _style_for(space, rng, _styles)
        raw = up_set(gens, convex) if isinstance(space, SmythSpace) else down_set(gens, convex)
        return canonicalize(space, raw)
    if isinstance(space, PlotkinSpace):
        k = rng.randrange(1, budget + 1)
        gens = tuple(draw_element(space.child, rng, budget, _styles) for _ in range(k))
        convex = convex_capable(space.child) and _style_for(space, rng, _styles)
        return canonicalize(space, lens_element(gens, gens, convex))
    if isinstance(space, PrevSpace):
        vsp = ValSpace(space.child, space.flavor)
        k = rng.randrange(1, budget + 1)
        gens = tuple(draw_element(vsp, rng, budget, _styles) for _ in range(k))
        if space.kind == "DN":
            return canonicalize(space, Prevision("DN", gens))
        if space.kind == "AN":
            return canonicalize(space, Prevision("AN", gens))
        # Forks are built from a common generator list (the image of a lens
        # under the retraction), which satisfies Walley's condition.
        return canonicalize(space, Fork(gens, gens))
    raise SpaceMismatchError(f"unknown space {space!r}")


def _style_for(space: Space, rng: random.Random, styles: dict) -> bool:
    if space not in styles:
        styles[space] = rng.random() < 0.5
    return styles[space]


# ---------------------------------------------------------------------------
# Validation of presented elements against their descriptor
# ---------------------------------------------------------------------------


def check_element(space: Space, e: Element) -> None:
    """Raise if e does not inhabit space (shape, flavor mass, convex placement)."""
    if isinstance(space, BaseSpace):
        if not isinstance(e, Point) or not 0 <= e.index < space.poset.n:
            raise SpaceMismatchError("bad point")
        return
    if isinstance(space, ValSpace):
        if not isinstance(e, Valuation):
            raise SpaceMismatchError("expected a valuation")
        m = mass(e)
        if any(w < 0 for w, _ in e.entries):
            raise SpaceMismatchError("negative weight")
        if space.flavor == "one" and m != 1:
            raise SpaceMismatchError(f"flavor one needs mass 1, got {m}")
        if space.flavor == "sub1" and m > 1:
            raise SpaceMismatchError(f"flavor sub1 needs mass <= 1, got {m}")
        for _, x in e.entries:
            check_element(space.child, x)
        return
    if isinstance(space, (SmythSpace, HoareSpace, PlotkinSpace)):
        if isinstance(space, SmythSpace):
            if not isinstance(e, UpSet):
                raise SpaceMismatchError("expected an up-set")
            groups = (e.parts,)
        elif isinstance(space, HoareSpace):
            if not isinstance(e, DownSet):
                raise SpaceMismatchError("expected a down-set")
            groups = (e.parts,)
        else:
            if not isinstance(e, LensElem):
                raise SpaceMismatchError("expected a lens")
            groups = (e.up, e.down)
        for parts in groups:
            if not parts:
                raise SpaceMismatchError("hyperspace element needs generators")
            for p in parts:
                if not p.gens:
                    raise SpaceMismatchError("empty generator part")
                if p.convex and isinstance(space.child, BaseSpace):
                    raise SpaceMismatchError("no convex structure over a bare poset")
                for g in p.gens:
                    check_element(space.child, g)
        return
    if isinstance(space, PrevSpace):
        vsp = ValSpace(space.child, space.flavor)
        if space.kind in ("DN", "AN"):
            if not isinstance(e, Prevision) or e.kind != space.kind:
                raise SpaceMismatchError(f"expected a {space.kind} prevision")
            if not e.gens:
                raise SpaceMismatchError("prevision needs generators")
            for g in e.gens:
                check_element(vsp, g)
            return
        if not isinstance(e, Fork):
            raise SpaceMismatchError("expected a fork")
        if not e.neg or not e.pos:
            raise SpaceMismatchError("fork needs generators on both sides")
        for g in e.neg + e.pos:
            check_element(vsp, g)
        return
    raise SpaceMismatchError(f"unknown space {space!r}")


# ---------------------------------------------------------------------------
# JSON encoding (rationals as "p/q" strings, points by label)
# ---------------------------------------------------------------------------


def element_to_json(space: Space, e: Element) -> object:
    if isinstance(space, BaseSpace):
        return {"pt": space.poset.elements[e.index]}
    if isinstance(space, ValSpace):
        return {"val": [[rat_str(w), element_to_json(space.child, x)] for w, x in e.entries]}
    if isinstance(space, SmythSpace):
        return {"up": _parts_to_json(space.child, e.parts)}
    if isinstance(space, HoareSpace):
        return {"down": _parts_to_json(space.child, e.parts)}
    if isinstance(space, PlotkinSpace):
        return {
            "lens": {
                "up": _parts_to_json(space.child, e.up),
                "down": _parts_to_json(space.child, e.down),
            }
        }
    if isinstance(space, PrevSpace):
        vsp = ValSpace(space.child, space.flavor)
        if space.kind in ("DN", "AN"):
            return {"prev": {"kind": e.kind, "gens": [element_to_json(vsp, g) for g in e.gens]}}
        return {
            "prev": {
                "kind": "ADN",
                "neg": [element_to_json(vsp, g) for g in e.neg],
                "pos": [element_to_json(vsp, g) for g in e.pos],
            }
        }
    raise SpaceMismatchError(f"unknown space {space!r}")


def _parts_to_json(child: Space, parts: tuple[SetPart, ...]) -> dict:
    if len(parts) == 1:
        p = parts[0]
        return {"convex": p.convex, "gens": [element_to_json(child, g) for g in p.gens]}
    return {
        "parts": [
            {"convex": p.convex, "gens": [element_to_json(child, g) for g in p.gens]}
            for p in parts
        ]
    }


def _parts_from_json(child: Space, obj: dict) -> tuple[SetPart, ...]:
    if "parts" in obj:
        return tuple(
            SetPart(tuple(element_from_json(child, g) for g in p["gens"]), bool(p.get("convex", False)))
            for p in obj["parts"]
        )
    return (
        SetPart(
            tuple(element_from_json(child, g) for g in obj["gens"]),
            bool(obj.get("convex", False)),
        ),
    )


def element_from_json(space: Space, obj: dict) -> Element:
    try:
        if isinstance(space, BaseSpace):
            return Point(space.poset.index(obj["pt"]))
        if isinstance(space, ValSpace):
            return Valuation(
                tuple((rat(w), element_from_json(space.child, x)) for w, x in obj["val"])
            )
        if isinstance(space, SmythSpace):
            return UpSet(_parts_from_json(space.child, obj["up"]))
        if isinstance(space, HoareSpace):
            return DownSet(_parts_from_json(space.child, obj["down"]))
        if isinstance(space, PlotkinSpace):
            return LensElem(
                _parts_from_json(space.child, obj["lens"]["up"]),
                _parts_from_json(space.child, obj["lens"]["down"]),
            )
        if isinstance(space, PrevSpace):
            vsp = ValSpace(space.child, space.flavor)
            body = obj["prev"]
            if space.kind in ("DN", "AN"):
                if body["kind"] != space.kind:
                    raise SpaceMismatchError("prevision kind does not match the space")
                return Prevision(space.kind, tuple(element_from_json(vsp, g) for g in body["gens"]))
            return Fork(
                tuple(element_from_json(vsp, g) for g in body["neg"]),
                tuple(element_from_json(vsp, g) for g in body["pos"]),
            )
    except (KeyError, TypeError, IndexError) as exc:
        raise SpaceMismatchError(f"malformed element JSON for {type(space).__name__}: {exc}") from exc
    raise SpaceMismatchError(f"unknown space {space!r}")
