"""Retraction pairs, the convexification idempotent, and the weak law.

The three cases wire one hyperspace monad over the valuation monad onto one
prevision monad:

* DN: Smyth sets of valuations  <->  min-type (superlinear) previsions,
* AN: Hoare sets of valuations  <->  max-type (sublinear) previsions,
* ADN: lenses of valuations     <->  forks (a min-type / max-type pair).

``retraction_r`` reads generators off a set, ``retraction_s`` rebuilds the
convex set of a prevision, and their composite ``e_closure`` computes convex
hulls.  ``lambda_formula`` is the closed form of the weak law on simple
inputs (enumerate choice functions through the generator lists);
``lambda_via_retraction`` is the composite route through the combined monad,
and ``lambda_membership_oracle`` is the open-set predicate available at depth
one.  The suites check all three against each other.

A printing note for users of the ADN case: the fork splitting intersects the
min-type component's upward hull with the max-type component's downward hull
(the up/down projection identities force the second factor to be the
max-type splitting), so ``s`` for forks is built from ``s_DN`` on the first
component and ``s_AN`` on the second.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

from . import mutations
from .poset import FinitePoset, down_closure, enumerate_upsets, up_closure
from .rational import rat
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
    UpSet,
    ValSpace,
    Valuation,
    all_part_gens,
    canonicalize,
    dirac,
    functor_map,
    mass,
    _reduce_convex,
)

CASES = ("DN", "AN", "ADN")

CHOICE_CAP = 256


class ChoiceBlowupError(RuntimeError):
    """The choice-function enumeration exceeded the configured cap."""


class DepthError(ValueError):
    """The membership oracle only applies over hyperspaces of a base poset."""


def hyper_space(case: str, child: Space) -> Space:
    if case == "DN":
        return SmythSpace(child)
    if case == "AN":
        return HoareSpace(child)
    if case == "ADN":
        return PlotkinSpace(child)
    raise SpaceMismatchError(f"unknown case {case!r}")


def prev_space(case: str, child: Space, flavor: str) -> PrevSpace:
    return PrevSpace(child, case, flavor)


def _st_child(case: str, space_ST: Space) -> ValSpace:
    expect = {"DN": SmythSpace, "AN": HoareSpace, "ADN": PlotkinSpace}[case]
    if not isinstance(space_ST, expect) or not isinstance(space_ST.child, ValSpace):
        raise SpaceMismatchError(f"case {case} needs a {expect.__name__} over a valuation layer")
    return space_ST.child


def retraction_r(case: str, space_ST: Space, e: Element) -> Element:
    """Collapse a set of valuations to the prevision it determines."""
    vsp = _st_child(case, space_ST)
    usp = prev_space(case, vsp.child, vsp.flavor)
    swap = mutations.active("swap-min-sup")
    if case == "DN":
        gens = all_part_gens(e.parts)
        if swap:
            gens = _reduce_convex(vsp, gens, down=True)
        return canonicalize(usp, Prevision("DN", gens))
    if case == "AN":
        gens = all_part_gens(e.parts)
        if swap:
            gens = _reduce_convex(vsp, gens, down=False)
        return canonicalize(usp, Prevision("AN", gens))
    up_gens, down_gens = all_part_gens(e.up), all_part_gens(e.down)
    if swap:
        up_gens, down_gens = down_gens, up_gens
    return canonicalize(usp, Fork(up_gens, down_gens))


def retraction_s(case: str, space_U: PrevSpace, F: Element) -> Element:
    """The convex set of all linear previsions dominating (DN) / dominated by (AN) F."""
    if not isinstance(space_U, PrevSpace) or space_U.kind != case:
        raise SpaceMismatchError(f"case {case} needs a matching prevision space")
    vsp = ValSpace(space_U.child, space_U.flavor)
    convex = not mutations.active("drop-convex")
    if case == "DN":
        raw: Element = UpSet((SetPart(F.gens, convex),))
        return canonicalize(SmythSpace(vsp), raw)
    if case == "AN":
        raw = DownSet((SetPart(F.gens, convex),))
        return canonicalize(HoareSpace(vsp), raw)
    raw = LensElem((SetPart(F.neg, convex),), (SetPart(F.pos, convex),))
    return canonicalize(PlotkinSpace(vsp), raw)


def e_closure(case: str, space_ST: Space, e: Element) -> Element:
    """The convexification idempotent, literally s after r."""
    vsp = _st_child(case, space_ST)
    usp = prev_space(case, vsp.child, vsp.flavor)
    return retraction_s(case, usp, retraction_r(case, space_ST, e))


def morphism_i(case: str, flavor: str, space_S: Space, Q: Element) -> Element:
    """The monad morphism from the hyperspace into previsions (Dirac generators)."""
    child = space_S.child
    usp = prev_space(case, child, flavor)
    if case == "DN":
        return canonicalize(usp, Prevision("DN", tuple(dirac(g) for g in all_part_gens(Q.parts))))
    if case == "AN":
        return canonicalize(usp, Prevision("AN", tuple(dirac(g) for g in all_part_gens(Q.parts))))
    return canonicalize(
        usp,
        Fork(
            tuple(dirac(g) for g in all_part_gens(Q.up)),
            tuple(dirac(g) for g in all_part_gens(Q.down)),
        ),
    )


def morphism_j(case: str, space_T: ValSpace, v: Element) -> Element:
    """The monad morphism from valuations into previsions (single generator)."""
    usp = prev_space(case, space_T.child, space_T.flavor)
    if case == "ADN":
        return canonicalize(usp, Fork((v,), (v,)))
    return canonicalize(usp, Prevision(case, (v,)))


# ---------------------------------------------------------------------------
# The weak law
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaOutput:
    element: Element
    space: Space
    choices: tuple[tuple[int, ...], ...]
    down_choices: Optional[tuple[tuple[int, ...], ...]] = None


def _choice_gens(entries, gen_lists, cap: int) -> tuple[list, tuple]:
    total = 1
    for lst in gen_lists:
        total *= len(lst)
        if total > cap:
            raise ChoiceBlowupError(f"choice enumeration needs {total} > {cap} combinations")
    out = []
    combos = []
    for combo in itertools.product(*(range(len(lst)) for lst in gen_lists)):
        picked = [(a, gen_lists[k][combo[k]]) for k, (a, _) in enumerate(entries)]
        out.append(Valuation(tuple(picked)))
        combos.append(tuple(combo))
    return out, tuple(combos)


def lambda_formula(case: str, space_TS: ValSpace, xi: Element, cap: int = CHOICE_CAP) -> LambdaOutput:
    """The closed form of the weak law on a simple valuation of generated sets.

    Enumerates choice functions through the generator lists of the sets in the
    support and returns the convex set they generate (upward for DN, downward
    for AN, a lens for ADN).
    """
    if not isinstance(space_TS, ValSpace):
        raise SpaceMismatchError("the weak law consumes a valuation over a hyperspace")
    space_S = space_TS.child
    child = space_S.child
    flavor = space_TS.flavor
    xi = canonicalize(space_TS, xi)
    entries = xi.entries
    vsp_out = ValSpace(child, flavor)

    if case in ("DN", "AN"):
        gen_lists = [all_part_gens(q.parts) for _, q in entries]
        vals, combos = _choice_gens(entries, gen_lists, cap)
        if case == "DN":
            out_space: Space = SmythSpace(vsp_out)
            raw: Element = UpSet((SetPart(tuple(vals), True),))
        else:
            out_space = HoareSpace(vsp_out)
            raw = DownSet((SetPart(tuple(vals), True),))
        return LambdaOutput(canonicalize(out_space, raw), out_space, combos)

    up_lists = [all_part_gens(q.up) for _, q in entries]
    down_lists = [all_part_gens(q.down) for _, q in entries]
    up_vals, up_combos = _choice_gens(entries, up_lists, cap)
    down_vals, down_combos = _choice_gens(entries, down_lists, cap)
    out_space = PlotkinSpace(vsp_out)
    raw = LensElem((SetPart(tuple(up_vals), True),), (SetPart(tuple(down_vals), True),))
    return LambdaOutput(canonicalize(out_space, raw), out_space, up_combos, down_combos)


def lambda_via_retraction(case: str, space_TS: ValSpace, xi: Element) -> Element:
    """The composite route: split the combined multiplication around j and i."""
    space_S = space_TS.child
    child = space_S.child
    flavor = space_TS.flavor
    usp = prev_space(case, child, flavor)
    j_img = morphism_j(case, ValSpace(space_S, flavor), xi)  # in U(S child)
    lifted = functor_map(j_img, lambda q: morphism_i(case, flavor, space_S, q))
    uusp = PrevSpace(usp, case, flavor)
    lifted = canonicalize(uusp, lifted)
    mu = prev_mult(case, uusp, lifted)
    return retraction_s(case, usp, mu)


def lambda_membership_oracle(case: str, space_TS: ValSpace, xi: Element, nu: Element) -> bool:
    """Depth-one membership test by quantifying over the open sets of the base.

    xi(box U) sums the weights of support sets contained in U; xi(diamond U)
    those meeting U.  DN requires nu(U) >= xi(box U) on every open U, AN
    requires nu(U) <= xi(diamond U), ADN requires both bounds.
    """
    space_S = space_TS.child
    if not isinstance(space_S.child, BaseSpace):
        raise DepthError("the membership oracle needs sets over a base poset")
    p = space_S.child.poset
    xi = canonicalize(space_TS, xi)

    def denotation(q: Element) -> frozenset[int]:
        if isinstance(q, UpSet):
            return up_closure(p, [g.index for g in all_part_gens(q.parts)])
        if isinstance(q, DownSet):
            return down_closure(p, [g.index for g in all_part_gens(q.parts)])
        if isinstance(q, LensElem):
            return up_closure(p, [g.index for g in all_part_gens(q.up)]) & down_closure(
                p, [g.index for g in all_part_gens(q.down)]
            )
        raise SpaceMismatchError("support sets must be hyperspace elements")

    supports = [(a, denotation(q)) for a, q in xi.entries]
    nu_weight = {x.index: w for w, x in canonicalize(ValSpace(space_S.child, space_TS.flavor), nu).entries}

    for upset in enumerate_upsets(p):
        nu_u = sum((w for i, w in nu_weight.items() if i in upset), rat(0))
        box = sum((a for a, den in supports if den <= upset), rat(0))
        diamond = sum((a for a, den in supports if den & upset), rat(0))
        if case == "DN" and nu_u < box:
            return False
        if case == "AN" and nu_u > diamond:
            return False
        if case == "ADN" and not (box <= nu_u <= diamond):
            return False
    return True


def build_e_from_lambda(case: str) -> Callable[[Space, Element], Element]:
    """The idempotent as multiplication after the weak law after a Dirac unit."""

    def e12(space_ST: Space, e: Element) -> Element:
        from . import monads

        vsp = _st_child(case, space_ST)
        flavor = vsp.flavor
        xi = canonicalize(ValSpace(space_ST, flavor), dirac(e))
        lam = lambda_formula(case, ValSpace(space_ST, flavor), xi)
        # lam.element lives in S T (T child); flatten the doubled valuation layer.
        val_tag = monads.val_tag(flavor)
        flattened = functor_map(lam.element, lambda vv: monads.mult(val_tag, vsp.child, vv))
        return canonicalize(space_ST, flattened)

    return e12


# ---------------------------------------------------------------------------
# The combined multiplication, built through the retraction
# ---------------------------------------------------------------------------


def prev_mult(case: str, space_UU: PrevSpace, F: Element) -> Element:
    """Multiplication of the prevision/fork monad.

    Constructed as: split both prevision layers into sets (s twice), push the
    weak law under the hyperspace, flatten both the valuation and hyperspace
    layers, and collapse with r.  The suites cross-check the result against
    the direct functional formula by evaluation.
    """
    from . import monads

    if not isinstance(space_UU, PrevSpace) or not isinstance(space_UU.child, PrevSpace):
        raise SpaceMismatchError("prevision multiplication expects a doubled prevision space")
    usp = space_UU.child
    child = usp.child
    flavor = usp.flavor
    vsp = ValSpace(child, flavor)
    st_sp = hyper_space(case, vsp)

    # U s : children of the generator valuations are previsions; split them.
    inner_split = functor_map(F, lambda g: retraction_s(case, usp, g))
    inner_split = canonicalize(PrevSpace(st_sp, case, flavor), inner_split)
    # s at the set level: the outer prevision becomes a convex set.
    doubled = retraction_s(case, PrevSpace(st_sp, case, flavor), inner_split)

    # Push the weak law under the outer hyperspace layer.
    lam_under = functor_map(
        doubled, lambda xi: lambda_formula(case, ValSpace(st_sp, flavor), xi).element
    )
    # Flatten the doubled valuation layer under two hyperspace layers.
    val_tag = monads.val_tag(flavor)
    flattened = functor_map(
        lam_under, lambda inner: functor_map(inner, lambda vv: monads.mult(val_tag, child, vv))
    )
    hyper_tag = {"DN": monads.SMYTH, "AN": monads.HOARE, "ADN": monads.PLOTKIN}[case]
    outer_sp = hyper_space(case, st_sp)
    flattened = canonicalize(outer_sp, flattened)
    unioned = monads.mult(hyper_tag, vsp, flattened)
    return retraction_r(case, hyper_space(case, vsp), unioned)
