"""Lie algebras o(4), e(3), o(3) and their maps from the rank-1 algebra.

Each enveloping algebra is a :class:`RewriteSystem` on a PBW order
``P+ < P- < P3 < J+ < J- < J3`` with rules ``XY -> YX + [X, Y]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping

from .errors import InvalidInput, InvalidPresentation
from .ncrewrite import NCPoly, RewriteSystem, is_confluent, normal_form
from .rank1 import Rank1Data, build_u_rank1, gl2_transform, relations_residual, transformed_constants
from .scalar import DEFAULT, Context

__all__ = [
    "LiePresentation",
    "HomImage",
    "presentation",
    "build_enveloping",
    "casimirs",
    "hom_image",
    "hom_data",
    "verify_hom",
    "center_residuals",
    "delta_commutators",
    "case_i_constants",
    "transformed_case_i",
    "CASE_I_TRANSFORM",
    "HOM_CONSTANTS",
]

SIX = ("P+", "P-", "P3", "J+", "J-", "J3")
THREE = ("J+", "J-", "J3")

# (X, Y) -> {Z: coefficient} meaning [X, Y] = sum coefficient * Z.
_COMMON = {
    ("J3", "J+"): {"J+": 1},
    ("J3", "J-"): {"J-": -1},
    ("J3", "P+"): {"P+": 1},
    ("J3", "P-"): {"P-": -1},
    ("P3", "J+"): {"P+": 1},
    ("P3", "J-"): {"P-": -1},
    ("J+", "P+"): {},
    ("J-", "P-"): {},
    ("J3", "P3"): {},
    ("J+", "J-"): {"J3": 2},
    ("J+", "P-"): {"P3": 2},
    ("P+", "J-"): {"P3": 2},
}
_TABLES = {
    "o4": {**_COMMON, ("P3", "P+"): {"J+": 1}, ("P3", "P-"): {"J-": -1}, ("P+", "P-"): {"J3": 2}},
    "e3": {**_COMMON, ("P3", "P+"): {}, ("P3", "P-"): {}, ("P+", "P-"): {}},
    "o3": {("J3", "J+"): {"J+": 1}, ("J3", "J-"): {"J-": -1}, ("J+", "J-"): {"J3": 2}},
}


@dataclass(frozen=True)
class LiePresentation:
    generators: tuple
    brackets: Mapping  # (X, Y) -> {Z: Fraction}

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        table: dict = {}
        for (x, y), val in self.brackets.items():
            if x not in gens or y not in gens:
                raise InvalidPresentation(f"bracket [{x},{y}] uses an undeclared generator")
            val = {z: Fraction(c) for z, c in val.items() if c}
            if any(z not in gens for z in val):
                raise InvalidPresentation(f"bracket [{x},{y}] is not a combination of generators")
            neg = {z: -c for z, c in val.items()}
            if x == y:
                if val:
                    raise InvalidPresentation(f"[{x},{x}] must vanish")
                continue
            if (y, x) in table and table[(y, x)] != neg:
                raise InvalidPresentation(f"[{x},{y}] and [{y},{x}] are not antisymmetric")
            table[(x, y)] = val
            table[(y, x)] = neg
        for x, y in combinations(gens, 2):
            if (x, y) not in table:
                raise InvalidPresentation(f"bracket [{x},{y}] is missing")
        object.__setattr__(self, "brackets", table)
        for x, y, z in combinations(gens, 3):
            if self.jacobiator(x, y, z):
                raise InvalidPresentation(f"Jacobi identity fails for ({x}, {y}, {z})")

    def bracket(self, x: str, y: str) -> dict:
        return {} if x == y else self.brackets[(x, y)]

    def bracket_vec(self, vec: Mapping, z: str) -> dict:
        out: dict = {}
        for w, c in vec.items():
            for t, k in self.bracket(w, z).items():
                out[t] = out.get(t, 0) + c * k
        return {t: c for t, c in out.items() if c}

    def jacobiator(self, x: str, y: str, z: str) -> dict:
        total: dict = {}
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            for t, k in self.bracket_vec(self.bracket(a, b), c).items():
                total[t] = total.get(t, 0) + k
        return {t: c for t, c in total.items() if c}


def presentation(which: str) -> LiePresentation:
    if which not in _TABLES:
        raise InvalidInput(f"unknown Lie algebra {which!r}; expected o4, e3 or o3")
    return LiePresentation(THREE if which == "o3" else SIX, _TABLES[which])


def build_enveloping(which, ctx: Context = DEFAULT, check: bool = True) -> RewriteSystem:
    """PBW rewrite system of U(g); ``which`` is a name or a :class:`LiePresentation`."""
    pres = which if isinstance(which, LiePresentation) else presentation(which)
    rank = {g: i for i, g in enumerate(pres.generators)}
    rules = {}
    for (x, y), val in pres.brackets.items():
        if rank[x] > rank[y]:
            rhs = NCPoly.word((y, x), 1, ctx)
            for z, c in val.items():
                rhs = rhs + NCPoly.word((z,), c, ctx)
            rules[(x, y)] = rhs
    rs = RewriteSystem(pres.generators, rules)
    if check and not is_confluent(rs):
        raise InvalidPresentation("PBW rewrite system is not confluent")
    return rs


def _g(ctx: Context):
    return {n: NCPoly.gen(n, ctx) for n in SIX}


def casimirs(which: str, ctx: Context = DEFAULT) -> tuple[NCPoly, NCPoly]:
    g = _g(ctx)
    Pp, Pm, P3, Jp, Jm, J3 = (g[n] for n in SIX)
    half = Fraction(1, 2)
    ct = (Pp * Jm + Pm * Jp).scale(half) + P3 * J3
    if which == "o4":
        c = P3 * P3 + Pp.anticommutator(Pm).scale(half) + J3 * J3 + Jp.anticommutator(Jm).scale(half)
    elif which == "e3":
        c = P3 * P3 + Pp * Pm
    else:
        raise InvalidInput(f"Casimir pair is defined for o4 and e3, not {which!r}")
    return c, ct


@dataclass(frozen=True)
class HomImage:
    case: str
    A1: NCPoly
    A0: NCPoly
    B0: NCPoly
    C0: NCPoly
    delta: object
    algebra: str


#: Constants used for each map: case i is realized with alpha=0, beta=gamma=1.
HOM_CONSTANTS = {
    "i": (Fraction(0), Fraction(1), Fraction(1)),
    "ii": (Fraction(0), Fraction(0), Fraction(1)),
    "iii": (Fraction(0), Fraction(0), Fraction(0)),
}

# Transform from (alpha, beta, gamma) = (0, 1, 1) to (1/2, 0, 1).  The form
# alpha^2 + beta*gamma scales by det(m)^2, which forces det(m) = +-1/2.
CASE_I_TRANSFORM = ((Fraction(1, 2), Fraction(1, 2)), (Fraction(0), Fraction(1)))


def hom_image(case: str, ctx: Context = DEFAULT) -> HomImage:
    g = _g(ctx)
    Pp, Pm, P3, Jp, Jm, J3 = (g[n] for n in SIX)
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    if case in ("i", "ii"):
        which = "o4" if case == "i" else "e3"
        _, ct = casimirs(which, ctx)
        A1 = P3
        A0 = (Pp * Jm - Pm * Jp).scale(half)
        if case == "i":
            B0 = -(J3 * J3) - Pp.anticommutator(Pm).scale(half) - quarter
        else:
            B0 = -(Pp * Pm)
        C0 = -(J3 * J3) - Jp.anticommutator(Jm).scale(half) - quarter
        return HomImage(case, A1, A0, B0, C0, -(ct * J3), which)
    if case == "iii":
        one = NCPoly.scalar(1, ctx)
        return HomImage(case, one.scale(-half), J3 - half, Jp, Jm, ctx.var("delta"), "o3")
    raise InvalidInput(f"unknown case {case!r}; expected i, ii or iii")


def hom_data(case: str, ctx: Context = DEFAULT) -> Rank1Data:
    img = hom_image(case, ctx)
    al, be, ga = HOM_CONSTANTS[case]
    return Rank1Data(img.A1, img.A0, img.B0, img.C0, al, be, ga, img.delta)


def verify_hom(case: str, ctx: Context = DEFAULT) -> tuple[NCPoly, ...]:
    """Six relation residuals in PBW normal form."""
    img = hom_image(case, ctx)
    rs = build_enveloping(img.algebra, ctx)
    return tuple(normal_form(r, rs) for r in relations_residual(hom_data(case, ctx)))


def center_residuals(element: NCPoly, which: str, ctx: Context = DEFAULT) -> dict[str, NCPoly]:
    """Normal forms of ``[element, X]`` for every generator X."""
    rs = build_enveloping(which, ctx)
    return {x: normal_form(element.commutator(NCPoly.gen(x, ctx)), rs) for x in rs.order}


def delta_commutators(case: str, ctx: Context = DEFAULT) -> dict[str, NCPoly]:
    """Normal forms of ``[delta, X]`` for X the images of A1, A0, B0, C0.

    The delta image need not be central in all of U(g); it has to commute
    with the image of the rank-1 algebra.
    """
    img = hom_image(case, ctx)
    rs = build_enveloping(img.algebra, ctx)
    d = img.delta if isinstance(img.delta, NCPoly) else NCPoly.scalar(img.delta, ctx)
    return {n: normal_form(d.commutator(getattr(img, n)), rs) for n in ("A1", "A0", "B0", "C0")}


def case_i_constants() -> tuple[Fraction, Fraction, Fraction]:
    """Constants reached from (0, 1, 1) by :data:`CASE_I_TRANSFORM`."""
    return transformed_constants(*HOM_CONSTANTS["i"], CASE_I_TRANSFORM)


def transformed_case_i(ctx: Context = DEFAULT, var: str = "u"):
    """U(u) of the o(4) image after the GL(2) move to case-i constants."""
    return gl2_transform(build_u_rank1(hom_data("i", ctx), var), CASE_I_TRANSFORM)
