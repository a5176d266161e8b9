"""Depth of the associated graded ring and its asymptotic value ξ over powers.

Depth is found by superficial descent.  depth G > 0 exactly when every
closure(n) equals I^n, and for a superficial x this is also exactly when
b(x) = 0, in which case depth G_I(B) = 1 + depth G_I(B/x).  Both criteria are
evaluated at every level and must agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CriteriaDisagreement, RRFiltError, Undetermined
from .filtration import FiltrationCache, SuperficialCertificate, b_polynomial


@dataclass(frozen=True)
class DescentStep:
    element: str
    b_zero: bool
    r_zero: bool
    trial: int | str = 0

    def to_json(self) -> dict:
        return {"element": self.element, "b_zero": self.b_zero, "r_zero": self.r_zero,
                "trial": self.trial}


@dataclass(frozen=True)
class DepthReport:
    depth: int
    dim: int
    descent_chain: tuple = ()
    positivity_witness: dict | None = None  # {"n", "element"} when depth = 0 in positive dimension

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "dim": self.dim,
            "cohen_macaulay": self.depth == self.dim,
            "descent_chain": [s.to_json() for s in self.descent_chain],
            "positivity_witness": self.positivity_witness,
        }


@dataclass(frozen=True)
class XiReport:
    per_power: tuple  # (n, depth) pairs; depth None when that power failed
    value: int | None
    window: int
    first_power: int  # powers below this are not counted towards stabilization
    estimate: bool = True
    status: str = "stable"
    notes: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "per_power": [{"n": n, "depth": d} for n, d in self.per_power],
            "value": self.value,
            "window": self.window,
            "first_power": self.first_power,
            "estimate": self.estimate,
            "status": self.status,
            "notes": list(self.notes),
        }


def _first_unclosed(cache: FiltrationCache, cert: SuperficialCertificate) -> int | None:
    # closure(n) = I^n for n >= c, the superficial window start
    for n in range(1, max(cert.window_start, 1)):
        if not cache.is_closed(n):
            return n
    return None


def _b_zero_element(cache: FiltrationCache) -> tuple[SuperficialCertificate, list[int]]:
    """A superficial element with b = 0, retrying fresh seeds before giving up."""
    cert = cache.superficial()
    b = b_polynomial(cache, cert)
    if not b:
        return cert, b
    for t in range(cache.params.trials):
        alt = cache.find_superficial(seed=cache.params.seed, tag=f"depth-retry{t}")
        b = b_polynomial(cache, alt)
        if not b:
            return alt, b
    raise CriteriaDisagreement(
        "all closures equal powers yet no superficial element has b = 0",
        element=str(cert.element), b=b)


def depth_assoc_graded(cache: FiltrationCache) -> DepthReport:
    got = cache.memo.get("depth")
    if got is not None:
        return got
    r = cache.dim
    if r == 0:
        report = DepthReport(0, 0)
    else:
        cert = cache.superficial()
        n = _first_unclosed(cache, cert)
        if n is not None:
            b = b_polynomial(cache, cert)
            if not b:
                raise CriteriaDisagreement(
                    f"closure of I^{n} differs from the power but b = 0",
                    element=str(cert.element), n=n)
            wit = cache.closure_witness(n)
            step = DescentStep(str(cert.element), False, False, cert.trial)
            report = DepthReport(0, r, (step,),
                                 {"n": n, "element": None if wit is None else str(wit)})
        else:
            cert, _ = _b_zero_element(cache)
            sub = depth_assoc_graded(cache.quotient([cert.element]))
            step = DescentStep(str(cert.element), True, True, cert.trial)
            report = DepthReport(1 + sub.depth, r, (step,) + sub.descent_chain,
                                 sub.positivity_witness)
    cache.memo["depth"] = report
    return report


def xi_estimate(cache: FiltrationCache, max_power: int = 6, window: int = 2) -> XiReport:
    """Eventual depth of G over the powers of I, as a windowed estimate.

    For n at least the stabilization bound N of I, every closure of a power of
    I^n is that power, so depth G_{I^n} >= 1; the window is only counted from
    N on, where the sequence has settled into its eventual regime.  When
    N + window - 1 exceeds ``max_power`` the horizon is extended to it.
    """
    key = ("xi", max_power, window)
    got = cache.memo.get(key)
    if got is not None:
        return got
    notes = []
    if cache.dim == 0:
        report = XiReport((), 0, window, 1, status="stable")
        cache.memo[key] = report
        return report
    first = cache.stabilization_bound()
    horizon = max(max_power, first + window - 1)
    if horizon > max_power:
        notes.append(f"horizon extended to power {horizon} to fit a window after the "
                     f"stabilization bound {first}")
    per = []
    value = None
    status = "undetermined"
    for n in range(1, horizon + 1):
        try:
            d = depth_assoc_graded(cache.power_cache(n)).depth
        except RRFiltError as exc:
            notes.append(f"power {n}: {exc}")
            d = None
        per.append((n, d))
        tail = [dd for nn, dd in per if nn >= first][-window:]
        if len(tail) == window and None not in tail and len(set(tail)) == 1:
            value = tail[0]
            status = "stable"
            break
    if value is None:
        notes.append(f"no {window} consecutive equal depths among powers {first}..{horizon}")
    report = XiReport(tuple(per), value, window, first, True, status, tuple(notes))
    cache.memo[key] = report
    return report


def require_xi(report: XiReport) -> int:
    if report.value is None:
        raise Undetermined("ξ did not stabilize", per_power=[list(p) for p in report.per_power])
    return report.value
