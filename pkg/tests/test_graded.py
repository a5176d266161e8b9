import pytest

from conftest import M4_ROOT, NONCLOSED2, RED2_DIM3, make_ideal
from rrfilt.errors import Undetermined
from rrfilt.filtration import FiltrationCache, r_polynomial
from rrfilt.graded import XiReport, depth_assoc_graded, require_xi, xi_estimate


def cache_of(spec):
    return FiltrationCache(make_ideal(*spec))


@pytest.mark.parametrize("spec,depth", [
    (M4_ROOT, 0),
    (NONCLOSED2, 0),
    (("QQ[x,y]", "x^2, y^2"), 2),
    (("QQ[x,y,z]", "x, y, z"), 3),
    (RED2_DIM3, 1),
])
def test_depth_values(spec, depth):
    c = cache_of(spec)
    rep = depth_assoc_graded(c)
    assert rep.depth == depth
    assert (rep.depth > 0) == (r_polynomial(c) == [])


def test_depth_zero_has_witness():
    rep = depth_assoc_graded(cache_of(NONCLOSED2))
    assert rep.positivity_witness["n"] == 1
    assert rep.positivity_witness["element"] is not None
    assert rep.descent_chain[0].b_zero is False


def test_descent_chain_records_regular_steps():
    rep = depth_assoc_graded(cache_of(("QQ[x,y]", "x^2, y^2")))
    assert len(rep.descent_chain) == 2
    assert all(s.b_zero and s.r_zero for s in rep.descent_chain)
    assert rep.to_json()["cohen_macaulay"]


def test_b_and_r_agree_at_each_level():
    c = cache_of(RED2_DIM3)
    rep = depth_assoc_graded(c)
    first, second = rep.descent_chain
    assert first.b_zero and not second.b_zero


def test_xi_red2_dim3():
    rep = xi_estimate(cache_of(RED2_DIM3), max_power=6, window=2)
    assert rep.value == 1 and rep.estimate and rep.status == "stable"


def test_xi_maximal_ideal():
    assert xi_estimate(cache_of(("QQ[x,y]", "x, y"))).value == 2
    assert xi_estimate(cache_of(("QQ[x,y,z]", "x, y, z"))).value == 3


def test_xi_nonclosed2_counts_only_stable_powers():
    rep = xi_estimate(cache_of(NONCLOSED2))
    assert rep.first_power == 5
    assert [d for _, d in rep.per_power] == [0, 0, 0, 0, 2, 2]
    assert rep.value == 2


def test_xi_m4_root():
    assert xi_estimate(cache_of(M4_ROOT)).value == 3


def test_require_xi():
    rep = xi_estimate(cache_of(RED2_DIM3))
    assert require_xi(rep) == 1
    with pytest.raises(Undetermined):
        require_xi(XiReport(((1, 0),), None, 2, 1, status="undetermined"))
