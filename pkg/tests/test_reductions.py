import pytest

from conftest import M4_ROOT, NONCLOSED2, RED2_DIM3, make_ideal
from rrfilt.errors import PreconditionError, ReductionSearchFailed
from rrfilt.filtration import FiltrationCache, Params
from rrfilt.hilbert import h_polynomial
from rrfilt.reductions import (
    certified_reduction,
    minimal_reduction,
    reduction_number_of_power,
    tilde_minimal_multiplicity,
)


def cache_of(spec, **params):
    return FiltrationCache(make_ideal(*spec), params=Params(**params) if params else None)


def test_maximal_ideal_has_red_zero():
    c = cache_of(("QQ[x,y]", "x, y"))
    R = c.ring
    cert = minimal_reduction(c, J=[R.poly("x"), R.poly("y")])
    assert cert.red == 0
    assert minimal_reduction(c).red == 0


def test_red2_dim3_given_reduction():
    c = cache_of(RED2_DIM3)
    R = c.ring
    cert = minimal_reduction(c, J=[R.poly("x^3"), R.poly("y^3"), R.poly("z^3")])
    assert cert.red == 2
    assert cert.colength_J == 27 == h_polynomial(c).e[0]


def test_m4_root_reduction_number_and_spread():
    cert = minimal_reduction(cache_of(M4_ROOT))
    assert cert.red == 2
    assert cert.red_min == cert.red_max == 2
    assert cert.colength_J == 8


def test_reduction_is_seed_stable():
    reds = {minimal_reduction(cache_of(spec), seed=s).red for spec in [M4_ROOT] for s in (0, 1)}
    assert reds == {2}
    reds = {minimal_reduction(cache_of(RED2_DIM3), seed=s).red for s in (0, 1)}
    assert reds == {2}


def test_reduction_of_powers():
    assert reduction_number_of_power(cache_of(M4_ROOT), 2).red == 2
    m = cache_of(("QQ[x,y]", "x, y"))
    assert reduction_number_of_power(m, 1).red == 0
    # m^3 needs four generators, so a two-generated reduction has red 1
    assert reduction_number_of_power(m, 3).red == 1
    assert reduction_number_of_power(cache_of(NONCLOSED2), 5).red == 1


def test_mixed_degree_generators_use_local_lengths():
    # generic J cuts out extra points away from the origin here
    c = cache_of(("QQ[x,y]", "y^6, x^3*y^2, x^6"))
    cert = minimal_reduction(c)
    assert cert.colength_J == h_polynomial(c).e[0] == 30


def test_given_J_must_fit():
    c = cache_of(("QQ[x,y]", "x^2, y^2"))
    R = c.ring
    with pytest.raises(PreconditionError):
        minimal_reduction(c, J=[R.poly("x^2")])
    with pytest.raises(PreconditionError):
        minimal_reduction(c, J=[R.poly("x"), R.poly("y^2")])


def test_search_failure_carries_spread():
    c = cache_of(NONCLOSED2)
    with pytest.raises(ReductionSearchFailed) as info:
        minimal_reduction(c, n_cap=2)
    assert len(info.value.partial["spread"]) == c.params.trials + 1


def test_certificate_is_memoized():
    c = cache_of(M4_ROOT)
    assert certified_reduction(c) is certified_reduction(c)


@pytest.mark.parametrize("spec", [NONCLOSED2, M4_ROOT, ("QQ[x,y]", "x^2, y^2")])
def test_tilde_minimal_multiplicity_holds(spec):
    v = tilde_minimal_multiplicity(cache_of(spec), corroborate=True)
    assert v.holds and v.complete
    assert v.h_tilde_degree <= 1


def test_tilde_minimal_multiplicity_fails_for_red2_dim3():
    v = tilde_minimal_multiplicity(cache_of(RED2_DIM3))
    assert not v.holds
    assert v.first_failure == 1
