"""Verification suites and the JSON report model.

A suite expands into picklable :class:`CaseSpec` items that run in the
current process or in a process pool.  Parameters are drawn from a seeded
``random.Random`` before any case runs, so reports are reproducible.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import mpmath

from . import __version__
from .errors import InvalidInput
from .scalar import format_rational, parse_rational

__all__ = [
    "SuiteConfig",
    "CaseSpec",
    "CaseResult",
    "SuiteReport",
    "SUITES",
    "run_suite",
    "emit_report",
    "parse_report",
    "sample_rational",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    jobs: int = 1
    digits: int = 40
    samples: int = 20
    approx_samples: int = 10
    ids: tuple = tuple(range(1, 46))
    triples: int = 5
    bound: int = 12
    max_termination: int = 8
    rules: dict | None = None

    def __post_init__(self):
        if self.jobs < 1 or self.samples < 0 or self.approx_samples < 0 or self.triples < 0:
            raise InvalidInput("jobs must be >= 1 and sample counts >= 0")
        if self.digits < 5:
            raise InvalidInput("digits must be at least 5")
        if self.bound < 2:
            raise InvalidInput("sampling bound must be at least 2")
        if any(not 1 <= i <= 45 for i in self.ids):
            raise InvalidInput("relation ids must lie in 1..45")


@dataclass(frozen=True)
class CaseSpec:
    case_id: str
    func: str
    args: tuple
    params: dict


@dataclass
class CaseResult:
    case_id: str
    params: dict
    passed: bool
    residual_sample: str
    time_ms: int

    @classmethod
    def from_json(cls, d: dict) -> CaseResult:
        return cls(d["case_id"], dict(d["params"]), bool(d["passed"]), d["residual_sample"], int(d["time_ms"]))


@dataclass
class SuiteReport:
    suite: str
    cases: list = field(default_factory=list)
    seed: int = 0
    version: str = __version__
    schema: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def failures(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.passed]

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "suite": self.suite,
            "seed": self.seed,
            "version": self.version,
            "passed": self.passed,
            "cases": [asdict(c) for c in self.cases],
        }

    @classmethod
    def from_json(cls, d: dict) -> SuiteReport:
        return cls(d["suite"], [CaseResult.from_json(c) for c in d["cases"]], int(d["seed"]), d["version"], int(d.get("schema", SCHEMA_VERSION)))


def emit_report(r: SuiteReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(r.to_json(), indent=2, sort_keys=True)
    if fmt != "text":
        raise InvalidInput(f"unknown format {fmt!r}")
    lines = [f"suite {r.suite} (seed {r.seed}, version {r.version})"]
    for c in r.cases:
        mark = "PASS" if c.passed else "FAIL"
        extra = "" if c.passed else f"  residual={c.residual_sample}"
        lines.append(f"  {mark} {c.case_id} [{c.time_ms} ms]{extra}")
    n_fail = len(r.failures())
    lines.append(f"{len(r.cases) - n_fail}/{len(r.cases)} passed")
    return "\n".join(lines)


def parse_report(text: str) -> SuiteReport:
    return SuiteReport.from_json(json.loads(text))


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def sample_rational(rng: random.Random, bound: int = 12, *, nonint: bool = False, lo: int | None = None, hi: int | None = None) -> Fraction:
    """Random ``p/q`` with ``|p|, q <= bound``, optionally in ``[lo, hi]``."""
    while True:
        q = rng.randint(2 if nonint else 1, bound)
        p = rng.randint(-bound, bound)
        f = Fraction(p, q)
        if nonint and f.denominator == 1:
            continue
        if lo is not None and f < lo or hi is not None and f > hi:
            continue
        return f


def _triples(cfg: SuiteConfig, rng: random.Random, nonint: bool = False) -> list[tuple[Fraction, Fraction, Fraction]]:
    return [tuple(sample_rational(rng, cfg.bound, nonint=nonint) for _ in range(3)) for _ in range(cfg.triples)]


def _ser(**kw) -> dict:
    out = {}
    for k, v in kw.items():
        if isinstance(v, Fraction):
            out[k] = format_rational(v)
        elif isinstance(v, (list, tuple)) and v and isinstance(v[0], Fraction):
            out[k] = [format_rational(x) for x in v]
        else:
            out[k] = v
    return out


# ---------------------------------------------------------------------------
# Case functions (module level so they pickle)
# ---------------------------------------------------------------------------


def _sample(values) -> tuple[bool, str]:
    for v in values:
        if not _is_zero(v):
            text = str(v)
            return False, text if len(text) <= 240 else text[:237] + "..."
    return True, "0"


def _is_zero(v) -> bool:
    if hasattr(v, "is_zero"):
        return v.is_zero()
    return v == 0


def _real(case: str, a, d, e):
    from .rank1 import RealizationParams, realization_build

    return realization_build(RealizationParams(a, d, e, case))


def c_reflection(case, a, d, e):
    from .rmatrix import reflection_residual

    U = _real(case, a, d, e).uoperator()
    return _sample(x for row in reflection_residual(U) for x in row)


def c_unitarity(case, a, d, e):
    from .rmatrix import unitarity_residual

    return _sample(unitarity_residual(_real(case, a, d, e).uoperator()))


def c_qdet(case, a, d, e):
    from .rank1 import determinant_polynomial
    from .rmatrix import quantum_determinant

    r = _real(case, a, d, e)
    U = r.uoperator()
    target = determinant_polynomial(r.center.Q2, r.center.Q0, r.delta)
    res = []
    for form in (1, 2, 3, 4):
        q = quantum_determinant(U, form)
        if not q.is_scalar():
            return False, f"form {form} is not a scalar operator"
        res.append(q.scalar_part() - target)
    return _sample(res)


def c_qdet_spot():
    from .rank1 import RealizationParams, realization_build

    vals = []
    for case in ("a", "b"):
        r = realization_build(RealizationParams(1, 2, 3, case))
        vals += [r.center.Q2 - Fraction(11, 16), r.printed_delta - Fraction(3, 16)]
        q2 = r.data.A1 * r.data.A1 - r.data.A0.scale(2 * Fraction(1, 2)) - r.data.B0
        vals.append(q2 - Fraction(11, 16))
    return _sample(vals)


def c_commutators(case, a, d, e):
    from .rmatrix import COMMUTATOR_RELATIONS, commutator_residual

    U = _real(case, a, d, e).uoperator()
    res = []
    for rid in COMMUTATOR_RELATIONS:
        res.extend(commutator_residual(U, rid))
    return _sample(res)


def _perturbed(kind: str):
    from dataclasses import replace

    from .rank1 import build_u_rank1

    r = _real("a", Fraction(1, 3), Fraction(7, 5), Fraction(-9, 4))
    data = r.data
    if kind == "B0+1":
        data = replace(data, B0=data.B0 + 1)
    elif kind == "2*C0":
        data = replace(data, C0=data.C0.scale(2))
    elif kind == "A0+x":
        data = replace(data, A0=data.A0 + data.ctx.var("x"))
    else:
        raise InvalidInput(kind)
    return build_u_rank1(data)


def c_detection(kind):
    """Passes when the perturbed operator fails at least one identity."""
    from .rmatrix import COMMUTATOR_RELATIONS, commutator_residual, reflection_residual, unitarity_residual

    U = _perturbed(kind)
    checks = {
        "reflection": [x for row in reflection_residual(U) for x in row],
        "unitarity": list(unitarity_residual(U)),
        "commutators": [r for rid in COMMUTATOR_RELATIONS for r in commutator_residual(U, rid)],
    }
    failing = [name for name, vals in checks.items() if not _sample(vals)[0]]
    return bool(failing), ",".join(failing) or "no check detected the perturbation"


def c_rank1(case, a, d, e):
    from .rank1 import center_elements, case_i_matrix, reduced_identity_residuals, relations_residual, tilde_kkk_residual

    r = _real(case, a, d, e)
    cp = center_elements(r.data)
    vals = list(relations_residual(r.data)) + list(tilde_kkk_residual(r.data))
    vals += [cp.Q2 - r.center.Q2, cp.Q0 - r.center.Q0]
    vals += list(reduced_identity_residuals(r.data, r.center.Q2, r.center.Q0))
    L = case_i_matrix(r.data.A1, r.data.A0, r.data.B0, r.data.C0, r.delta)
    vals += [x for row in (L - r.uoperator()).matrix for x in row]
    return _sample(vals)


def c_factorization(case, a, d, e):
    from .rank1 import RealizationParams, delta_factorization_check

    return _sample(delta_factorization_check(RealizationParams(a, d, e, case)))


def c_relation(rel_id, params, mode, digits):
    from .hyper import HypPoint, contiguous_residual

    p = HypPoint.of(params, mode, digits)
    if mode == "exact":
        res = contiguous_residual(rel_id, p)
        return res == 0, format_rational(res)
    with mpmath.workdps(digits + 15):
        res = contiguous_residual(rel_id, p)
        tol = mpmath.mpf(10) ** (-(digits - 5))
        return bool(abs(res) < tol), mpmath.nstr(res, 5)


def c_ladder(which, a, d, e, x_lo, x_hi, ms, xs):
    from .hyper import LadderFamily, ladder_residual

    fam = LadderFamily(a, d, e, x_lo, x_hi, count=max(ms) + 2)
    return _sample(ladder_residual(which, fam, fam.a + m, x) for m in ms for x in xs)


def c_lowering_boundary(a, d, e, xs):
    """At ``u = a`` both lowering coefficients vanish, so the bracket must kill F."""
    from .hyper import LadderFamily, ladder_coefficient, ladder_residual

    fam = LadderFamily(a, d, e, min(xs) - 1, max(xs) + 1, count=1)
    vals = []
    for which in ("down-minus", "down-plus"):
        if ladder_coefficient(which, a, d, e)({"u": fam.a}) != 0:
            return False, f"{which} coefficient does not vanish at u=a"
        vals += [ladder_residual(which, fam, fam.a, x) for x in xs]
    return _sample(vals)


def c_annihilation(a, d, e, x_lo, x_hi, ms, xs):
    from .hyper import LadderFamily, annihilation_residual

    fam = LadderFamily(a, d, e, x_lo, x_hi, count=max(ms) + 1)
    return _sample(annihilation_residual(fam, fam.a + m, x) for m in ms for x in xs)


def _rules(rules_json):
    from .ncrewrite import RewriteSystem, tilde_system

    return tilde_system() if rules_json is None else RewriteSystem.from_json(rules_json)


def c_pbw(n):
    from math import comb

    from .ncrewrite import count_normal_monomials, tilde_system

    got = count_normal_monomials(tilde_system(), n)
    return got == comb(n + 3, 3), str(got - comb(n + 3, 3))


def c_overlap(word, rules_json):
    from .ncrewrite import ambiguity_defect

    return _sample([ambiguity_defect(tuple(word), _rules(rules_json))])


def c_overlap_list(rules_json):
    """The overlap words are exactly the four claimed ones."""
    from .ncrewrite import overlap_words

    rs = _rules(rules_json)
    got = sorted(overlap_words(rs))
    expected = sorted([("C0~", "B0~", "A0~"), ("C0~", "B0~", "A1~"), ("B0~", "A0~", "A1~"), ("C0~", "A0~", "A1~")])
    return got == expected, str(got)


def c_hom(case):
    from .liehom import verify_hom

    return _sample(verify_hom(case))


def c_casimir(which, index):
    from .liehom import casimirs, center_residuals

    return _sample(center_residuals(casimirs(which)[index], which).values())


def c_delta_image(case):
    from .liehom import delta_commutators

    return _sample(delta_commutators(case).values())


def c_hahn(n, alpha, beta, N, check):
    from .hyper import HahnParams, hahn_residuals

    return _sample(hahn_residuals(HahnParams(n, alpha, beta, N), check))


_FUNCS: dict[str, Callable] = {name[2:]: fn for name, fn in globals().items() if name.startswith("c_")}


def _run_case(spec: CaseSpec) -> CaseResult:
    t0 = time.perf_counter()
    try:
        ok, sample = _FUNCS[spec.func](*spec.args)
    except Exception as exc:  # a crash is a failed case, not a crashed suite
        ok, sample = False, f"{type(exc).__name__}: {exc}"
    ms = int((time.perf_counter() - t0) * 1000)
    return CaseResult(spec.case_id, spec.params, bool(ok), sample, ms)


# ---------------------------------------------------------------------------
# Suite expansion
# ---------------------------------------------------------------------------


def _per_triple(name: str, func: str):
    def build(cfg: SuiteConfig, rng: random.Random) -> list[CaseSpec]:
        out = []
        for k, (a, d, e) in enumerate(_triples(cfg, rng), 1):
            for case in ("a", "b"):
                out.append(CaseSpec(f"{name}/{case}/{k}", func, (case, a, d, e), _ser(case=case, a=a, d=d, e=e)))
        return out

    return build


def _qdet(cfg, rng):
    return _per_triple("qdet", "qdet")(cfg, rng) + [
        CaseSpec("qdet/spot-1-2-3", "qdet_spot", (), _ser(a=Fraction(1), d=Fraction(2), e=Fraction(3), Q2=Fraction(11, 16), delta=Fraction(3, 16)))
    ]


def _commutators(cfg, rng):
    out = _per_triple("commutators", "commutators")(cfg, rng)
    out += [CaseSpec(f"commutators/detect/{k}", "detection", (k,), {"perturbation": k}) for k in ("B0+1", "2*C0", "A0+x")]
    return out


def _terminating(rng: random.Random, cfg: SuiteConfig) -> list[Fraction]:
    p = [sample_rational(rng, cfg.bound) for _ in range(3)]
    p[rng.randrange(3)] = Fraction(-rng.randint(1, cfg.max_termination))
    p += [sample_rational(rng, cfg.bound, nonint=True) for _ in range(2)]
    return p


def _convergent(rng: random.Random, cfg: SuiteConfig) -> list[Fraction]:
    p = [sample_rational(rng, cfg.bound, nonint=True, lo=-3, hi=3) for _ in range(3)]
    p += [Fraction(rng.randint(45, 75), 3) for _ in range(2)]
    return p


def _relations45(cfg, rng):
    out = []
    for rid in cfg.ids:
        for k in range(cfg.samples):
            p = _terminating(rng, cfg)
            out.append(CaseSpec(f"relations45/{rid}/exact/{k + 1}", "relation", (rid, tuple(p), "exact", cfg.digits), _ser(id=rid, params=p)))
        for k in range(cfg.approx_samples):
            p = _convergent(rng, cfg)
            out.append(CaseSpec(f"relations45/{rid}/approx/{k + 1}", "relation", (rid, tuple(p), "approx", cfg.digits), _ser(id=rid, params=p, digits=cfg.digits)))
    return out


_LADDER_TRIPLES = 3
_MS = tuple(range(1, 6))
_XS = tuple(range(-2, 4))


def sample_ladder_triple(rng: random.Random, bound: int = 12) -> tuple[Fraction, Fraction, Fraction]:
    """Non-integer ``(a, d, e)`` with ``a`` off the half-integers.

    Family members sit at ``u = a + m``; a half-integer ``a`` would put some
    member on the bracket poles ``u = 1/2`` or ``u = -1/2``.
    """
    while True:
        a = sample_rational(rng, bound, nonint=True)
        if a.denominator != 2:
            return a, sample_rational(rng, bound, nonint=True), sample_rational(rng, bound, nonint=True)


def _ladder_triples(cfg, rng):
    return [sample_ladder_triple(rng, cfg.bound) for _ in range(_LADDER_TRIPLES)]


def _ladders(cfg, rng):
    from .hyper import LADDERS

    out = []
    for k, (a, d, e) in enumerate(_ladder_triples(cfg, rng), 1):
        for which in LADDERS:
            out.append(CaseSpec(f"ladders/{which}/{k}", "ladder", (which, a, d, e, -3, 4, _MS, _XS), _ser(a=a, d=d, e=e)))
        out.append(CaseSpec(f"ladders/lowering-boundary/{k}", "lowering_boundary", (a, d, e, _XS), _ser(a=a, d=d, e=e)))
    return out


def _annihilation(cfg, rng):
    return [
        CaseSpec(f"annihilation/{k}", "annihilation", (a, d, e, -3, 4, (0,) + _MS, _XS), _ser(a=a, d=d, e=e))
        for k, (a, d, e) in enumerate(_ladder_triples(cfg, rng), 1)
    ]


def _pbw(cfg, rng):
    return [CaseSpec(f"pbw/degree-{n}", "pbw", (n,), {"n": n}) for n in range(7)]


def _diamond(cfg, rng):
    from .ncrewrite import overlap_words

    rs = _rules(cfg.rules)
    out = [CaseSpec(f"diamond/{''.join(w)}", "overlap", (w, cfg.rules), {"word": list(w)}) for w in overlap_words(rs)]
    if cfg.rules is None:
        out.append(CaseSpec("diamond/overlap-list", "overlap_list", (None,), {}))
    return out


def _hom(cfg, rng):
    out = [CaseSpec(f"hom/{c}", "hom", (c,), {"case": c}) for c in ("i", "ii", "iii")]
    out += [CaseSpec(f"hom/casimir/{w}/{i + 1}", "casimir", (w, i), {"algebra": w, "casimir": i + 1}) for w in ("o4", "e3") for i in (0, 1)]
    out += [CaseSpec(f"hom/delta/{c}", "delta_image", (c,), {"case": c}) for c in ("i", "ii", "iii")]
    return out


_HAHN = ((Fraction(1), Fraction(2)), (Fraction(1, 2), Fraction(3, 2)))


def _hahn(cfg, rng):
    out = []
    for al, be in _HAHN:
        for N in range(1, 9):
            for n in range(0, min(5, N) + 1):
                for check in ("difference-eq", "ladder", "orthogonality"):
                    out.append(
                        CaseSpec(f"hahn/{check}/{format_rational(al)}-{format_rational(be)}/N{N}/n{n}", "hahn", (n, al, be, N, check), _ser(n=n, alpha=al, beta=be, N=N, check=check))
                    )
    return out


SUITES: dict[str, Callable[[SuiteConfig, random.Random], list[CaseSpec]]] = {
    "reflection": _per_triple("reflection", "reflection"),
    "unitarity": _per_triple("unitarity", "unitarity"),
    "qdet": _qdet,
    "commutators": _commutators,
    "rank1": _per_triple("rank1", "rank1"),
    "factorization": _per_triple("factorization", "factorization"),
    "relations45": _relations45,
    "ladders": _ladders,
    "annihilation": _annihilation,
    "pbw": _pbw,
    "diamond": _diamond,
    "hom": _hom,
    "hahn": _hahn,
}


def expand_suite(name: str, cfg: SuiteConfig) -> list[CaseSpec]:
    if name == "all":
        return [s for n in SUITES for s in expand_suite(n, cfg)]
    if name not in SUITES:
        raise InvalidInput(f"unknown suite {name!r}; expected one of {', '.join(SUITES)} or all")
    # Each suite draws from its own stream so adding a suite never shifts another.
    rng = random.Random(f"{cfg.seed}:{name}")
    return SUITES[name](cfg, rng)


def run_specs(name: str, specs: Sequence[CaseSpec], cfg: SuiteConfig) -> SuiteReport:
    if cfg.jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_case, specs, chunksize=max(1, len(specs) // (4 * cfg.jobs))))
    else:
        results = [_run_case(s) for s in specs]
    return SuiteReport(name, results, cfg.seed)


def run_suite(name: str, cfg: SuiteConfig | None = None) -> SuiteReport:
    cfg = cfg or SuiteConfig()
    return run_specs(name, expand_suite(name, cfg), cfg)


def params_from_strings(values: Sequence[str]) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in values)
