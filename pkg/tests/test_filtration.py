import random

import pytest

from conftest import M4_ROOT, NONCLOSED2, make_ideal, random_monomial_ideal
from rrfilt.errors import NotMPrimary, PreconditionError, SuperficialSearchFailed
from rrfilt.filtration import (
    FiltrationCache,
    Params,
    b_polynomial,
    behaves_well_mod,
    find_superficial,
    r_polynomial,
    rr_closure,
)
from rrfilt.groebner import Ideal


def cache_of(ring, gens, **params):
    return FiltrationCache(make_ideal(ring, gens), params=Params(**params) if params else None)


def contained(small: Ideal, big: Ideal) -> bool:
    return all(big.contains(g) for g in small.groebner_basis())


def test_maximal_ideal_is_closed():
    c = cache_of("QQ[x,y]", "x, y")
    for n in range(1, 5):
        assert rr_closure(c, n) == c.preimage(n)
    assert r_polynomial(c) == []
    assert c.superficial().window_start == 0


def test_closure_adds_missing_monomial():
    c = cache_of("QQ[x,y]", "x^4, x^3*y, x*y^3, y^4")
    expected = make_ideal("QQ[x,y]", "x^4, x^3*y, x*y^3, y^4, x^2*y^2")
    assert rr_closure(c, 1) == expected
    assert r_polynomial(c)[0] > 0
    assert str(c.closure_witness(1)) == "x^2*y^2"


def test_complete_intersection_powers_are_closed():
    c = cache_of("QQ[x,y]", "x^2, y^2")
    for n in range(1, 6):
        assert c.is_closed(n)
    assert r_polynomial(c) == []
    assert b_polynomial(c) == []


def test_nonclosed_data():
    c = cache_of(*NONCLOSED2)
    cert = c.superficial()
    assert cert.window_start <= c.c_max
    assert b_polynomial(c) != []
    assert r_polynomial(c) != []
    assert c.stabilization_bound() == 5
    assert [c.closure(n).colength() for n in range(1, 6)] == [28, 105, 231, 406, 630]
    assert not c.is_closed(1)


def test_no_trials_is_an_error():
    c = cache_of("QQ[x,y]", "x, y")
    with pytest.raises(SuperficialSearchFailed):
        find_superficial(c, trials=0)


def test_superficial_search_is_deterministic():
    a = cache_of(*NONCLOSED2, sparse_first=False)
    b = cache_of(*NONCLOSED2, sparse_first=False)
    assert a.superficial().element == b.superficial().element
    other = find_superficial(a, seed=7)
    assert other.element != a.superficial().element


def test_certificate_flags_cover_window():
    c = cache_of(*M4_ROOT)
    cert = c.superficial()
    start, W = cert.window_start, cert.window_length
    assert all(cert.colon_flags[start: start + W + 1])
    for n in range(start, start + W + 1):
        assert c.colon_flag(n, cert.element)


def test_not_m_primary_names_variable():
    with pytest.raises(NotMPrimary, match="z"):
        cache_of("QQ[x,y,z]", "x^2, y^2")


def test_quotient_dimension_and_preimages():
    c = cache_of(*M4_ROOT)
    x = c.superficial().element
    q = c.quotient([x])
    assert q.dim == 2
    assert q.preimage(2).contains(x)
    with pytest.raises(PreconditionError):
        FiltrationCache(make_ideal("QQ[x]", "x"), modulus=[make_ideal("QQ[x]", "x").ring.poly("x")] * 2)


def test_power_cache_reads_parent_closures():
    c = cache_of(*NONCLOSED2)
    p = c.power_cache(2)
    assert p.closure(1) == c.closure(2)
    assert p.length(3) == c.length(6)
    assert p.stabilization_bound() == 3


@pytest.mark.parametrize("spec", [
    ("QQ[x,y]", "x^4, x^3*y, x*y^3, y^4"),
    ("QQ[x,y]", "x^5, x^4*y, x*y^4, y^5"),
    NONCLOSED2,
    M4_ROOT,
    ("GF(32003)[x,y]", "x^4, x^3*y, x*y^3, y^4"),
])
def test_closure_invariants_and_oracle(spec):
    c = cache_of(*spec)
    top = min(c.stabilization_bound() + 1, 4)
    for n in range(1, top + 1):
        C = c.closure(n)
        assert contained(c.preimage(n), C)
        assert C == c.closure_by_colon_chain(n)
        assert c.closure(n) is C  # repeated computation returns the stored closure
        for m in (1, 2):
            prod = (Ideal(c.ring, C.groebner_basis()) * c.power(m)).interreduced()
            assert contained(prod, c.closure(n + m))


def test_closures_match_colon_chain_on_random_ideals():
    rng = random.Random(11)
    for _ in range(15):
        c = FiltrationCache(random_monomial_ideal(rng))
        for n in (1, 2):
            assert c.closure(n) == c.closure_by_colon_chain(n)


def test_behaves_well_examples():
    ci = cache_of("QQ[x,y]", "x^2, y^2")
    assert behaves_well_mod(ci, s=1).holds
    m2 = cache_of(*NONCLOSED2)
    a = behaves_well_mod(m2, s=1, seed=1)
    b = behaves_well_mod(m2, s=1, seed=2)
    assert a.holds and b.holds and a.complete
    assert a.sequence != b.sequence


def test_behaves_well_rejects_bad_length():
    c = cache_of("QQ[x,y]", "x^2, y^2")
    with pytest.raises(PreconditionError):
        behaves_well_mod(c, s=2)


def test_b_zero_iff_top_coefficient_agrees():
    from rrfilt.hilbert import h_polynomial
    for spec in [("QQ[x,y]", "x^2, y^2"), NONCLOSED2, ("QQ[x,y]", "x^4, x^3*y, x*y^3, y^4")]:
        c = cache_of(*spec)
        x = c.superficial().element
        r = c.dim
        e_top = h_polynomial(c).e[r]
        e_top_quot = h_polynomial(c.quotient([x])).e[r]
        assert (b_polynomial(c) == []) == (e_top == e_top_quot)
