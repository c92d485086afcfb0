"""The five monads, presented through units and Kleisli extension.

All operations are generator-level: units wrap a point, functorial maps relabel
generators, multiplications flatten one layer.  The prevision multiplications
are deliberately not given by a one-line formula here; they are produced
constructively through the retraction machinery in ``distlaw`` so that the
result is a presented element, and the direct functional formula serves the
test suites as an evaluation oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from . import mutations
from .poset import FinitePoset, LSCFunction, MonotoneMap, enumerate_upsets
from .rational import ExtRat, ZERO, ext, rat
from .spaces import (
    BaseSpace,
    DownSet,
    Element,
    Fork,
    HoareSpace,
    LensElem,
    PlotkinSpace,
    Point,
    PrevSpace,
    Prevision,
    SetPart,
    SmythSpace,
    Space,
    SpaceMismatchError,
    UndecidableRepresentationError,
    UpSet,
    ValSpace,
    Valuation,
    all_part_gens,
    canonicalize,
    convex_capable,
    dirac,
    functor_map,
    lens_element,
    mass,
)


class KleisliCoverageError(KeyError):
    """A Kleisli table was applied to a generator it does not cover."""


@dataclass(frozen=True)
class MonadTag:
    name: str  # smyth | hoare | plotkin | val | prev
    kind: str = ""  # DN | AN | ADN for prev
    flavor: str = ""  # all | sub1 | one for val/prev


SMYTH = MonadTag("smyth")
HOARE = MonadTag("hoare")
PLOTKIN = MonadTag("plotkin")


def val_tag(flavor: str) -> MonadTag:
    return MonadTag("val", flavor=flavor)


def prev_tag(kind: str, flavor: str) -> MonadTag:
    return MonadTag("prev", kind=kind, flavor=flavor)


ALL_TAG_NAMES = ("smyth", "hoare", "plotkin", "val", "prev")


def lift_space(tag: MonadTag, space: Space) -> Space:
    if tag.name == "smyth":
        return SmythSpace(space)
    if tag.name == "hoare":
        return HoareSpace(space)
    if tag.name == "plotkin":
        return PlotkinSpace(space)
    if tag.name == "val":
        return ValSpace(space, tag.flavor)
    if tag.name == "prev":
        return PrevSpace(space, tag.kind, tag.flavor)
    raise SpaceMismatchError(f"unknown monad tag {tag!r}")


def unit(tag: MonadTag, space: Space, x: Element) -> Element:
    """The monad unit at ``space``, returned canonical in the lifted space."""
    lifted = lift_space(tag, space)
    if tag.name == "smyth":
        raw: Element = UpSet((SetPart((x,), False),))
    elif tag.name == "hoare":
        raw = DownSet((SetPart((x,), False),))
    elif tag.name == "plotkin":
        raw = lens_element((x,), (x,))
    elif tag.name == "val":
        raw = dirac(x)
    elif tag.name == "prev":
        if tag.kind == "ADN":
            raw = Fork((dirac(x),), (dirac(x),))
        else:
            raw = Prevision(tag.kind, (dirac(x),))
    else:
        raise SpaceMismatchError(f"unknown monad tag {tag!r}")
    return canonicalize(lifted, raw)


def as_element_fn(f, source: FinitePoset | None = None) -> Callable[[Element], Element]:
    """Accept a MonotoneMap or a plain element function."""
    if isinstance(f, MonotoneMap):
        return lambda e: Point(f.assignment[e.index])
    return f


def fmap(tag: MonadTag, f, target_space: Space, e: Element) -> Element:
    """Functorial action: relabel generators/children by f.

    ``target_space`` is the child space of the result, so the output can be
    canonicalized; f may be a MonotoneMap between base posets or any function
    on child elements.
    """
    fn = as_element_fn(f)
    lifted = lift_space(tag, target_space)
    return canonicalize(lifted, functor_map(e, fn))


def _flatten_valuation(outer: Valuation) -> Valuation:
    entries = list(outer.entries)
    if mutations.active("drop-mult-term") and len(entries) > 1:
        entries = entries[:-1]
    flat: list[tuple[Fraction, Element]] = []
    for b, inner in entries:
        if not isinstance(inner, Valuation):
            raise SpaceMismatchError("valuation multiplication expects valuation children")
        for a, x in inner.entries:
            flat.append((b * a, x))
    return Valuation(tuple(flat))


def _union_parts(groups) -> tuple[SetPart, ...]:
    """Flatten one hyperspace layer: each group is (outer_part, inner_sets).

    A plain outer part contributes the union of its generators' parts.  A
    convex outer part denotes the union of all mixtures of its generators;
    when every generator is itself a single convex(-ish) part, that union is
    the convex hull of the generators' combined generators, so it collapses
    to one convex part.  Any other combination has no presented form.
    """
    out: list[SetPart] = []
    for outer_part, inner_parts_list in groups:
        if not outer_part.convex or len(inner_parts_list) == 1:
            for parts in inner_parts_list:
                out.extend(parts)
        else:
            pooled: list[Element] = []
            for parts in inner_parts_list:
                if len(parts) != 1 or not (parts[0].convex or len(parts[0].gens) == 1):
                    raise UndecidableRepresentationError(
                        "union of a convex family of non-convex sets"
                    )
                pooled.extend(parts[0].gens)
            out.append(SetPart(tuple(pooled), True))
    return tuple(out)


def mult(tag: MonadTag, space: Space, ee: Element) -> Element:
    """Monad multiplication; ``space`` is the child space of the result."""
    lifted = lift_space(tag, space)
    if tag.name == "val":
        return canonicalize(lifted, _flatten_valuation(ee))
    if tag.name == "smyth":
        groups = [(p, [g.parts for g in p.gens]) for p in ee.parts]
        return canonicalize(lifted, UpSet(_union_parts(groups)))
    if tag.name == "hoare":
        groups = [(p, [g.parts for g in p.gens]) for p in ee.parts]
        return canonicalize(lifted, DownSet(_union_parts(groups)))
    if tag.name == "plotkin":
        up_groups = [(p, [g.up for g in p.gens]) for p in ee.up]
        down_groups = [(p, [g.down for g in p.gens]) for p in ee.down]
        return canonicalize(lifted, LensElem(_union_parts(up_groups), _union_parts(down_groups)))
    if tag.name == "prev":
        from . import distlaw

        case = tag.kind
        return distlaw.prev_mult(case, PrevSpace(lifted, tag.kind, tag.flavor), ee)
    raise SpaceMismatchError(f"unknown monad tag {tag!r}")


@dataclass(frozen=True)
class KleisliMap:
    """A finite table from source elements to elements of the lifted target."""

    tag: MonadTag
    source: Space
    target: Space  # child space of the outputs
    table: tuple[tuple[Element, Element], ...]

    def lookup(self) -> Callable[[Element], Element]:
        index = {canonicalize(self.source, k): v for k, v in self.table}

        def fn(x: Element) -> Element:
            key = canonicalize(self.source, x)
            try:
                return index[key]
            except KeyError:
                raise KleisliCoverageError(f"table does not cover generator {x!r}") from None

        return fn


def kleisli_from_fn(tag: MonadTag, source: Space, target: Space, fn, domain) -> KleisliMap:
    return KleisliMap(tag, source, target, tuple((x, fn(x)) for x in domain))


def extend(tag: MonadTag, f: KleisliMap, e: Element) -> Element:
    """Kleisli extension, realized as multiplication after the functorial map."""
    fn = f.lookup()
    mapped = functor_map(e, fn)
    return mult(tag, f.target, mapped)


# ---------------------------------------------------------------------------
# Integration: the linear formula and the threshold-sum oracle
# ---------------------------------------------------------------------------


def integrate(v: Valuation, h: LSCFunction) -> ExtRat:
    """Sum a(x) h(x); the linear route for simple valuations over a poset."""
    total = ZERO
    for w, x in v.entries:
        total = total + ext(w) * h.values[x.index]
    return total


def choquet_integral(p: FinitePoset, h: LSCFunction, v: Valuation) -> ExtRat:
    """The threshold formula: integral over t of v(h > t).

    For a simple valuation and a finite-valued monotone h this is the finite
    sum over consecutive thresholds; mass sitting at infinite values of h
    contributes infinity (with 0 * inf = 0).
    """
    weight_at = {x.index: w for w, x in v.entries}

    def measure_above(t: Fraction) -> Fraction:
        return sum(
            (w for i, w in weight_at.items() if h.values[i] > ext(t)),
            rat(0),
        )

    inf_mass = sum((w for i, w in weight_at.items() if h.values[i].is_infinite), rat(0))
    if inf_mass > 0:
        return ext(None)
    finite_vals = sorted({h.values[i].finite for i in weight_at} | {rat(0)})
    total = rat(0)
    for lo, hi in zip(finite_vals, finite_vals[1:]):
        total += (hi - lo) * measure_above(lo)
    return ext(total)
