"""Verifiers that test structural statements about the Ratliff-Rush filtration.

Each verifier returns a TheoremVerdict.  Hypotheses are evaluated first; a
failed hypothesis gives INAPPLICABLE and FAIL is reserved for the case where
every hypothesis holds and a conclusion does not (a potential
counterexample, reported with its witness data).  Statements quantified over
all n are checked up to the stabilization bound of the closures, which makes
closure-equality claims complete; such verdicts carry ``bounded: true``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

from . import zpoly
from .errors import RRFiltError
from .filtration import FiltrationCache, behaves_well_mod
from .graded import depth_assoc_graded, xi_estimate
from .hilbert import h_polynomial, rr_hilbert, sigma_invariants
from .reductions import minimal_reduction, tilde_minimal_multiplicity

PASS, FAIL, INAPPLICABLE, UNDETERMINED = "PASS", "FAIL", "INAPPLICABLE", "UNDETERMINED"
HOLDS, FAILS, UNKNOWN = "holds", "fails", "undetermined"


@dataclass
class TheoremVerdict:
    name: str
    hypotheses: list = field(default_factory=list)  # (condition, status, witness)
    conclusion: str = UNDETERMINED
    details: dict = field(default_factory=dict)

    def hyp(self, condition: str, ok: bool | None, witness=None) -> bool:
        self.hypotheses.append((condition, HOLDS if ok else UNKNOWN if ok is None else FAILS, witness))
        return bool(ok)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "hypotheses": [{"condition": c, "status": s, "witness": w} for c, s, w in self.hypotheses],
            "conclusion": self.conclusion,
            "details": self.details,
        }


def _guarded(fn):
    """Turn analysis errors (caps, failed searches) into UNDETERMINED verdicts."""
    @functools.wraps(fn)
    def wrapper(cache, *args, **kwargs):
        verdict = TheoremVerdict(fn.__name__.removeprefix("check_"))
        try:
            fn(cache, verdict, *args, **kwargs)
        except RRFiltError as exc:
            verdict.conclusion = UNDETERMINED
            verdict.details["error"] = {"type": type(exc).__name__, "message": str(exc),
                                        "partial": _jsonable(exc.partial)}
        return verdict
    return wrapper


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def _settle(verdict: TheoremVerdict, checks: dict, complete: bool = True):
    """PASS when every conclusion check holds; FAIL on any failure."""
    verdict.details["conclusions"] = dict(checks)
    if not all(checks.values()):
        verdict.conclusion = FAIL
    elif not complete:
        verdict.conclusion = UNDETERMINED
    else:
        verdict.conclusion = PASS


def _closure_inside_power(cache: FiltrationCache, upto: int) -> int | None:
    """First i in [1, upto] with closure(i+1) not inside I^i, else None."""
    for i in range(1, upto + 1):
        P = cache.preimage(i)
        if not all(P.contains(g) for g in cache.closure(i + 1).groebner_basis()):
            return i
    return None


@_guarded
def check_narita(cache: FiltrationCache, verdict: TheoremVerdict):
    """e_2 = ... = e_r = 0 exactly when the Ratliff-Rush graded ring has minimal multiplicity."""
    r = cache.dim
    if not verdict.hyp("dimension >= 2", r >= 2, {"dim": r}):
        verdict.conclusion = INAPPLICABLE
        return
    hil = h_polynomial(cache)
    vanish = all(e == 0 for e in hil.e[2: r + 1])
    mm = tilde_minimal_multiplicity(cache, corroborate=True)
    verdict.details.update({
        "e": list(hil.e),
        "e2_to_er_vanish": vanish,
        "minimal_multiplicity": mm.to_json(),
        "bounded": True,
    })
    if vanish:
        verdict.details["I_invariant"] = {
            "value": (-1) ** (r + 1) * r * hil.e[r + 1],
            "source": "formula-derived from e_{r+1}, not computed independently",
        }
    _settle(verdict, {"biconditional": vanish == mm.holds,
                      "minimal_multiplicity_gives_h_tilde_degree_at_most_1":
                          not mm.holds or mm.h_tilde_degree <= 1},
            mm.complete)


@_guarded
def check_e2_consequences(cache: FiltrationCache, verdict: TheoremVerdict,
                          assume_integrally_closed: bool = False):
    """Consequences of e_2 = 0 in dimension 2 and 3 (and the integrally closed variant)."""
    r = cache.dim
    if not verdict.hyp("dimension is 2 or 3", r in (2, 3), {"dim": r}):
        verdict.conclusion = INAPPLICABLE
        return
    hil = h_polynomial(cache)
    e = list(hil.e)
    verdict.details["e"] = e
    e2_zero = e[2] == 0
    lam = cache.length(1)
    chi_case = r == 2 and assume_integrally_closed and e[2] == e[1] - e[0] + lam
    if r == 2:
        gate = e2_zero or chi_case
        witness = {"e2": e[2], "e1 - e0 + length(A/I)": e[1] - e[0] + lam,
                   "assume_integrally_closed": assume_integrally_closed}
        if not verdict.hyp("e2 = 0, or I integrally closed (asserted) with e2 = e1 - e0 + length(A/I)",
                           gate, witness):
            verdict.conclusion = INAPPLICABLE
            return
        verdict.details["case"] = "e2 = 0" if e2_zero else "integrally closed"
        bound = cache.stabilization_bound()
        mm = tilde_minimal_multiplicity(cache)
        # in the integrally closed case the relation is only claimed from i = 2 on
        sigma_tail = mm.sigma if e2_zero else mm.sigma[1:]
        bad_ii = _closure_inside_power(cache, bound)
        bw = behaves_well_mod(cache, s=1)
        rr = rr_hilbert(cache)
        xi = xi_estimate(cache)
        r1 = zpoly.evaluate(rr.r_poly, 1)
        checks = {
            "closure_is_J_times_closure": not any(sigma_tail),
            "closure_inside_previous_power": bad_ii is None,
            "behaves_well_mod_superficial": bw.holds,
            "powers_eventually_cohen_macaulay": xi.value == 2,
        }
        if e2_zero:
            checks["e3_equals_minus_r_at_1"] = e[3] == -r1 and rr.e_tilde[3] == 0
            checks["e3_nonpositive"] = e[3] <= 0
        verdict.details.update({
            "stabilization_bound": bound,
            "sigma": list(mm.sigma),
            "first_closure_outside_power": bad_ii,
            "behaves_well": bw.to_json(),
            "xi": xi.to_json(),
            "r_at_1": r1,
            "e3_via_rr": rr.e_tilde[3] + (-1) ** 3 * r1,
            "I_invariant": {"value": -2 * e[3],
                            "source": "formula-derived from e3, not computed independently"},
            "bounded": True,
        })
        _settle(verdict, checks, mm.complete and bw.complete and xi.value is not None)
        return
    # dimension 3
    if not verdict.hyp("e2 = 0", e2_zero, {"e2": e[2]}):
        verdict.conclusion = INAPPLICABLE
        return
    xi = xi_estimate(cache)
    verdict.details.update({"e3": e[3], "xi": xi.to_json()})
    if xi.value is None:
        _settle(verdict, {"e3_nonpositive": e[3] <= 0}, complete=False)
        return
    _settle(verdict, {
        "e3_nonpositive": e[3] <= 0,
        "e3_zero_iff_xi_3": (e[3] == 0) == (xi.value == 3),
        "e3_negative_iff_xi_1": (e[3] < 0) == (xi.value == 1),
    })


@_guarded
def check_red2_dim3(cache: FiltrationCache, verdict: TheoremVerdict):
    """Reduction number 2 in dimension 3 forces e_3 <= 0, with e_3 = 0 exactly when ξ >= 2."""
    r = cache.dim
    if not verdict.hyp("dimension = 3", r == 3, {"dim": r}):
        verdict.conclusion = INAPPLICABLE
        return
    red = minimal_reduction(cache)
    verdict.details["reduction"] = red.to_json()
    if not verdict.hyp("reduction number = 2", red.red == 2, {"red": red.red}):
        verdict.conclusion = INAPPLICABLE
        return
    hil = h_polynomial(cache)
    xi = xi_estimate(cache)
    e3 = hil.e[3]
    verdict.details.update({"e": list(hil.e), "e3": e3, "xi": xi.to_json()})
    checks = {"e3_nonpositive": e3 <= 0}
    if xi.value is not None:
        checks["e3_zero_iff_xi_at_least_2"] = (e3 == 0) == (xi.value >= 2)
    _settle(verdict, checks, xi.value is not None)


@_guarded
def check_rr_mod_sequence(cache: FiltrationCache, verdict: TheoremVerdict,
                          s: int | None = None, seeds=None):
    """Behaving well modulo a superficial sequence does not depend on the sequence."""
    r = cache.dim
    lengths = [s] if s is not None else list(range(1, r))
    if not verdict.hyp("1 <= s <= dim - 1", bool(lengths) and all(1 <= k <= r - 1 for k in lengths),
                       {"dim": r, "s": lengths}):
        verdict.conclusion = INAPPLICABLE
        return
    base = cache.params.seed
    seeds = list(seeds) if seeds is not None else [base, base + 1]
    runs = {}
    checks = {}
    complete = True
    for k in lengths:
        got = [behaves_well_mod(cache, s=k, seed=sd) for sd in seeds]
        runs[str(k)] = [dict(v.to_json(), seed=sd) for v, sd in zip(got, seeds)]
        checks[f"s={k}: verdicts agree"] = len({v.holds for v in got}) == 1
        checks[f"s={k}: sequences distinct"] = len({v.sequence for v in got}) == len(got)
        complete = complete and all(v.complete for v in got)
        verdict.details.setdefault("common_verdict", {})[str(k)] = got[0].holds
    verdict.details["runs"] = runs
    verdict.details["bounded"] = True
    _settle(verdict, checks, complete)


def _sparse_superficial(cache: FiltrationCache):
    """A superficial generator of I if there is one (cheap quotients), else the default."""
    pure = cache.pure_power_generators()
    for g in pure + [g for g in cache.generators() if g not in pure]:
        if not isinstance(cache.certify(g), tuple):
            return g, "superficial generator"
    return cache.superficial().element, "certified superficial element"


@_guarded
def check_xi_descent(cache: FiltrationCache, verdict: TheoremVerdict, x=None, powers=(1, 2),
                     max_power: int = 6, window: int = 2):
    """ξ(B/x^n) >= ξ(B) - 1 for large n; strict inequalities are reported."""
    r = cache.dim
    if not verdict.hyp("dimension >= 2", r >= 2, {"dim": r}):
        verdict.conclusion = INAPPLICABLE
        return
    if x is None:
        x, source = _sparse_superficial(cache)
    else:
        got = cache.certify(x)
        if not verdict.hyp("x is superficial", not isinstance(got, tuple), {"element": str(x)}):
            verdict.conclusion = INAPPLICABLE
            return
        source = "given"
    xi = xi_estimate(cache, max_power, window)
    per = []
    for n in powers:
        q = cache.quotient([x ** n])
        per.append((n, xi_estimate(q, max_power, window)))
    verdict.details.update({
        "element": str(x),
        "element_source": source,
        "xi": xi.to_json(),
        "xi_mod_powers": [{"n": n, "xi": rep.to_json()} for n, rep in per],
    })
    values = [rep.value for _, rep in per]
    if xi.value is None or values[-1] is None:
        verdict.conclusion = UNDETERMINED
        return
    verdict.details["strict_at"] = [n for (n, rep) in per
                                    if rep.value is not None and rep.value > xi.value - 1]
    _settle(verdict, {"inequality_at_largest_power": values[-1] >= xi.value - 1})


@_guarded
def check_depth_criteria(cache: FiltrationCache, verdict: TheoremVerdict):
    """depth G > 0 exactly when the r-polynomial vanishes."""
    from .filtration import r_polynomial
    verdict.hyp("dimension >= 1", cache.dim >= 1, {"dim": cache.dim})
    if cache.dim < 1:
        verdict.conclusion = INAPPLICABLE
        return
    d = depth_assoc_graded(cache)
    rp = r_polynomial(cache)
    verdict.details.update({"depth": d.to_json(), "r_poly": rp})
    _settle(verdict, {"depth_positive_iff_r_zero": (d.depth > 0) == (not rp)})


@_guarded
def check_sigma(cache: FiltrationCache, verdict: TheoremVerdict):
    """σ-representation of ẽ_k and the χ₁ inequality (dimension 1 or 2)."""
    if not verdict.hyp("dimension is 1 or 2", cache.dim in (1, 2), {"dim": cache.dim}):
        verdict.conclusion = INAPPLICABLE
        return
    rep = sigma_invariants(cache)
    verdict.details["sigma"] = rep.to_json()
    _settle(verdict, dict(rep.checks))


@_guarded
def check_rr_identities(cache: FiltrationCache, verdict: TheoremVerdict):
    """h = h̃ + (1−z)^{r+1} r(z) and its coefficient consequences."""
    if not verdict.hyp("dimension >= 1", cache.dim >= 1, {"dim": cache.dim}):
        verdict.conclusion = INAPPLICABLE
        return
    rep = rr_hilbert(cache)
    verdict.details["rr_hilbert"] = rep.to_json()
    _settle(verdict, dict(rep.checks))


CHECKS = {
    "narita": check_narita,
    "e2": check_e2_consequences,
    "red2": check_red2_dim3,
    "rrmod": check_rr_mod_sequence,
    "xidescent": check_xi_descent,
    "depthcrit": check_depth_criteria,
    "sigma": check_sigma,
    "rrid": check_rr_identities,
}
