import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflcheck.errors import InvalidInput
from reflcheck.suites import SUITES, SuiteConfig, expand_suite, run_suite, sample_ladder_triple, sample_rational


@pytest.mark.parametrize("name", list(SUITES))
def test_suite_passes(name):
    report = run_suite(name, SuiteConfig(seed=11))
    assert report.cases and report.passed, [c.case_id for c in report.failures()][:5]


def test_all_expands_every_suite():
    cfg = SuiteConfig(samples=1, approx_samples=1)
    names = {s.case_id.split("/")[0] for s in expand_suite("all", cfg)}
    assert names == set(SUITES)


def test_relation_case_count():
    assert len(expand_suite("relations45", SuiteConfig())) == 45 * 30


def test_streams_are_independent():
    a = expand_suite("ladders", SuiteConfig(seed=5))
    b = expand_suite("ladders", SuiteConfig(seed=5, samples=3))
    assert [s.params for s in a] == [s.params for s in b]


def test_unknown_suite():
    with pytest.raises(InvalidInput):
        expand_suite("everything", SuiteConfig())


@pytest.mark.parametrize("kw", [{"jobs": 0}, {"digits": 3}, {"bound": 1}, {"ids": (0,)}, {"samples": -1}])
def test_invalid_config(kw):
    with pytest.raises(InvalidInput):
        SuiteConfig(**kw)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 20))
def test_sampler_bounds(seed, bound):
    rng = random.Random(seed)
    q = sample_rational(rng, bound)
    assert abs(q.numerator) <= bound and q.denominator <= bound
    r = sample_rational(rng, bound, nonint=True)
    assert r.denominator != 1


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_ladder_triples_avoid_poles(seed):
    a, d, e = sample_ladder_triple(random.Random(seed))
    assert a.denominator not in (1, 2) and d.denominator != 1 and e.denominator != 1
