import json
import random
from math import comb

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import M4_ROOT, NONCLOSED2, RED2_DIM3, make_ideal, random_monomial_ideal
from rrfilt import zpoly
from rrfilt.errors import PreconditionError, Undetermined
from rrfilt.filtration import FiltrationCache, Params
from rrfilt.hilbert import (
    h_polynomial,
    hilbert_coefficients,
    hilbert_function,
    hilbert_samuel,
    rr_hilbert,
    sigma_invariants,
    verify_superficial_identity,
)


def cache_of(spec, **params):
    return FiltrationCache(make_ideal(*spec), params=Params(**params) if params else None)


def test_hilbert_samuel_values():
    assert hilbert_samuel(cache_of(("QQ[x,y]", "x, y")), 4) == [1, 3, 6, 10, 15]
    assert hilbert_samuel(cache_of(("QQ[x,y]", "x^2, y^2")), 2) == [4, 12, 24]
    assert hilbert_samuel(cache_of(M4_ROOT), 0) == [5]


def test_hilbert_function_is_difference():
    c = cache_of(M4_ROOT)
    H = hilbert_function(c, 5)
    direct = [c.length(1)] + [c.length(n + 1) - c.length(n) for n in range(1, 6)]
    assert H == direct


def test_m4_root_h_polynomial():
    rep = h_polynomial(cache_of(M4_ROOT))
    assert list(rep.h_poly) == [5, 0, 6, -4, 1]
    assert zpoly.to_str(rep.h_poly) == "5 + 6z^2 - 4z^3 + z^4"
    assert hilbert_coefficients(rep)[:4] == [8, 4, 0, 0]
    assert rep.postulation_index == 4
    assert rep.e0_certificate == 8


@pytest.mark.parametrize("spec,h", [
    (("QQ[x,y]", "x, y"), [1]),
    (("QQ[x,y]", "x^2, y^2"), [4]),
    (("QQ[x,y,z]", "x, y, z"), [1]),
])
def test_simple_h_polynomials(spec, h):
    assert list(h_polynomial(cache_of(spec)).h_poly) == h


def test_nonclosed_coefficients():
    assert h_polynomial(cache_of(NONCLOSED2)).e[2] == 0
    assert h_polynomial(cache_of(RED2_DIM3)).e[3] == -1


def test_generating_function_reproduces_values():
    c = cache_of(NONCLOSED2)
    rep = h_polynomial(c)
    r = c.dim
    # coefficient of z^n in h / (1-z)^{r+1}
    for n, value in enumerate(rep.hs_values):
        assert value == sum(h * comb(n - i + r, r) for i, h in enumerate(rep.h_poly) if i <= n)


def test_small_max_n_is_undetermined():
    with pytest.raises(Undetermined) as info:
        h_polynomial(cache_of(NONCLOSED2), max_n=4)
    assert "values" in info.value.partial


def test_report_json_round_trip():
    rep = h_polynomial(cache_of(M4_ROOT))
    data = json.loads(json.dumps(rep.to_json()))
    assert data["h_poly"] == [5, 0, 6, -4, 1]


def test_rr_hilbert_complete_intersection():
    c = cache_of(("QQ[x,y]", "x^2, y^2"))
    rr = rr_hilbert(c)
    assert list(rr.h_tilde) == list(h_polynomial(c).h_poly)
    assert rr.holds


def test_rr_hilbert_nonclosed():
    c = cache_of(NONCLOSED2)
    rr = rr_hilbert(c)
    assert rr.holds
    assert rr.e_tilde[3] == 0
    e3 = h_polynomial(c).e[3]
    assert e3 == -zpoly.evaluate(rr.r_poly, 1) < 0


def test_rr_hilbert_maximal_ideal():
    rr = rr_hilbert(cache_of(("QQ[x,y]", "x, y")))
    assert list(rr.h_tilde) == [1] and rr.holds


def test_sigma_examples():
    s = sigma_invariants(cache_of(("QQ[x,y]", "x, y")))
    assert list(s.sigma) == [] and s.holds
    s = sigma_invariants(cache_of(NONCLOSED2))
    assert not any(s.sigma[1:]) and s.holds
    s = sigma_invariants(cache_of(("QQ[x,y]", "x^2, y^2")))
    assert s.chi1 == 0 == s.closure_excess


def test_sigma_needs_small_dimension():
    with pytest.raises(PreconditionError):
        sigma_invariants(cache_of(M4_ROOT))


def test_superficial_identity_updates_certificate():
    c = cache_of(NONCLOSED2)
    rep = verify_superficial_identity(c)
    assert rep.holds
    assert c.superficial().identity_check is True
    q = h_polynomial(c.quotient([c.superficial().element]))
    # e_0 and e_1 agree with the quotient
    assert h_polynomial(c).e[:2] == q.e[:2]


@pytest.mark.parametrize("spec", [("QQ[x,y]", "x^2, y^2"), ("QQ[x,y]", "x, y")])
def test_superficial_identity_trivial_b(spec):
    c = cache_of(spec)
    rep = verify_superficial_identity(c)
    assert rep.holds and rep.b_poly == () and rep.h == rep.h_quotient


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10**6))
def test_identities_on_random_monomial_ideals(seed):
    c = FiltrationCache(random_monomial_ideal(random.Random(seed)))
    assert verify_superficial_identity(c).holds
    assert rr_hilbert(c).holds
    assert sigma_invariants(c).holds
    assert h_polynomial(c).e[0] == h_polynomial(c).e0_certificate
