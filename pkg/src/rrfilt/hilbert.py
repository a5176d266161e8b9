"""Hilbert-Samuel functions, h-polynomials and Hilbert coefficients.

For a filtration F of B with F_0 = B and L(n) = λ(B/F_{n+1}) we have
Σ L(n) z^n = h(z)/(1−z)^{r+1}, so the coefficients of (1−z)^{r+1}·Σ L(n) z^n
are the h-coefficients once the series is known far enough.  A window of W
vanishing coefficients is taken as the end of h; the value h(1) is then
checked against the colength of a certified minimal reduction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable

from . import zpoly
from .errors import PreconditionError, Undetermined
from .filtration import FiltrationCache, SuperficialCertificate, b_polynomial, r_polynomial
from .reductions import certified_reduction, product_length


@dataclass(frozen=True)
class HilbertReport:
    dim: int
    hs_values: tuple  # λ(B/I^{n+1}) for n = 0..N
    h_poly: tuple
    e: tuple  # e_0..e_{r+1}
    postulation_index: int
    certified_window: int
    e0_certificate: int | None = None  # colength of the certified reduction
    e_next_source: str | None = "h-polynomial"

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "hs_values": list(self.hs_values),
            "h_poly": list(self.h_poly),
            "h_poly_text": zpoly.to_str(self.h_poly),
            "e": list(self.e),
            "postulation_index": self.postulation_index,
            "certified_window": self.certified_window,
            "e0_certificate": self.e0_certificate,
            "e_next_source": self.e_next_source,
        }


@dataclass(frozen=True)
class RRHilbertReport:
    dim: int
    hs_values: tuple  # λ(B/closure(n+1))
    h_tilde: tuple
    e_tilde: tuple  # ẽ_0..ẽ_{r+1}
    r_poly: tuple
    checks: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "hs_values": list(self.hs_values),
            "h_tilde": list(self.h_tilde),
            "e_tilde": list(self.e_tilde),
            "r_poly": list(self.r_poly),
            "r_at_1": zpoly.evaluate(self.r_poly, 1),
            "checks": dict(self.checks),
        }


@dataclass(frozen=True)
class SigmaReport:
    J: tuple
    sigma: tuple  # σ_j for j = 0..len-1
    chi1: int
    closure_excess: int  # λ(closure(1)/I)
    checks: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "J": [str(g) for g in self.J],
            "sigma": list(self.sigma),
            "chi1": self.chi1,
            "closure_excess": self.closure_excess,
            "chi1_equality": self.chi1 == self.closure_excess,
            "checks": dict(self.checks),
        }


@dataclass(frozen=True)
class IdentityReport:
    holds: bool
    element: str
    h: tuple
    h_quotient: tuple
    b_poly: tuple

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "element": self.element,
            "h": list(self.h),
            "h_quotient": list(self.h_quotient),
            "b_poly": list(self.b_poly),
        }


def hilbert_samuel(cache: FiltrationCache, max_n: int | None = None) -> list[int]:
    """λ(B/I^{n+1}) for n = 0..max_n."""
    max_n = cache.params.max_n if max_n is None else max_n
    return [cache.length(n + 1) for n in range(max_n + 1)]


def hilbert_function(cache: FiltrationCache, max_n: int | None = None) -> list[int]:
    """λ(I^n/I^{n+1}) for n = 0..max_n, as first differences."""
    hs = hilbert_samuel(cache, max_n)
    return [hs[0]] + [b - a for a, b in zip(hs, hs[1:])]


def _tail_fit(L: Callable[[int], int], r: int, W: int, max_n: int) -> tuple[list[int], list[int], int]:
    """h-coefficients from lengths L(0..); returns (h, values used, first zero index).

    Accepts once the coefficients vanish on [j0, max(j0 + W − 1, r + 1)].
    """
    weights = zpoly.one_minus_z_pow(r + 1)
    vals: list[int] = []
    coeffs: list[int] = []
    for j in range(max_n + 1):
        vals.append(L(j))
        coeffs.append(sum(w * vals[j - i] for i, w in enumerate(weights) if j - i >= 0))
        j0 = len(zpoly.trim(coeffs))
        if j - j0 + 1 >= W and j >= r + 1:
            return zpoly.trim(coeffs), vals, j0
    raise Undetermined(f"h-polynomial tail did not vanish on a window of {W} within max_n = {max_n}",
                       values=vals, coefficients=coeffs, max_n=max_n)


def coefficients(h, r: int) -> list[int]:
    """e_0..e_{r+1} as Taylor coefficients of h at 1."""
    return [zpoly.taylor_at_one(h, i) for i in range(r + 2)]


def h_polynomial(cache: FiltrationCache, max_n: int | None = None, window: int | None = None,
                 certify: bool = True) -> HilbertReport:
    """The h-polynomial of the I-adic filtration with its certificates."""
    max_n = cache.params.max_n if max_n is None else max_n
    W = cache.params.window if window is None else window
    key = ("hilbert", max_n, W, certify)
    got = cache.memo.get(key)
    if got is not None:
        return got
    r = cache.dim
    h, vals, j0 = _tail_fit(lambda n: cache.length(n + 1), r, W, max_n)
    e = coefficients(h, r)
    e0_cert = None
    if certify:
        e0_cert = certified_reduction(cache).colength_J
        if e0_cert != e[0]:
            raise Undetermined("h(1) disagrees with the colength of a certified reduction; "
                               "raise max_n", h=h, colength_J=e0_cert)
    report = HilbertReport(r, tuple(vals), tuple(h), tuple(e), len(h) - 1, W, e0_cert)
    cache.memo[key] = report
    return report


def hilbert_coefficients(report: HilbertReport) -> list:
    return list(report.e)


def rr_hilbert(cache: FiltrationCache, max_n: int | None = None,
               window: int | None = None) -> RRHilbertReport:
    """h̃ of the Ratliff-Rush filtration and the identities linking it to h."""
    if cache.dim < 1:
        raise PreconditionError("the Ratliff-Rush filtration needs positive dimension")
    max_n = cache.params.max_n if max_n is None else max_n
    W = cache.params.window if window is None else window
    key = ("rr_hilbert", max_n, W)
    got = cache.memo.get(key)
    if got is not None:
        return got
    r = cache.dim
    hil = h_polynomial(cache, max_n, W)
    rp = r_polynomial(cache)
    ht, vals, _ = _tail_fit(lambda n: cache.closure(n + 1).colength(), r, W,
                            max(max_n, cache.stabilization_bound() + W + r + 1))
    et = coefficients(ht, r)
    rhs = zpoly.add(ht, zpoly.mul(zpoly.one_minus_z_pow(r + 1), rp))
    e_next = et[r + 1] + (-1) ** (r + 1) * zpoly.evaluate(rp, 1)
    checks = {
        "h_equals_h_tilde_plus_r": list(hil.h_poly) == rhs,
        "e_tilde_equals_e_up_to_dim": et[: r + 1] == list(hil.e[: r + 1]),
        "e_next_relation": e_next == hil.e[r + 1],
    }
    report = RRHilbertReport(r, tuple(vals), tuple(ht), tuple(et), tuple(rp), checks)
    cache.memo[key] = report
    return report


def sigma_invariants(cache: FiltrationCache, J=None, max_n: int | None = None) -> SigmaReport:
    """σ_j = λ(closure(j+1) / J·closure(j)) and the χ₁ inequality, in dimension 1 or 2."""
    r = cache.dim
    if r not in (1, 2):
        raise PreconditionError(f"σ-invariants are defined here for dimension 1 or 2, not {r}")
    from .reductions import minimal_reduction
    cert = certified_reduction(cache) if J is None else minimal_reduction(cache, J=J)
    J = cert.J
    W = cache.params.window
    N = cache.stabilization_bound()
    hil = h_polynomial(cache, max_n)
    rr = rr_hilbert(cache, max_n)
    cap = max(N, cert.red) + W + cache.params.n_cap
    sigma: list[int] = []
    j = 0
    while True:
        K = cache.closure(j) if j else cache.preimage(0)
        # J·closure(j) ⊇ J·I^j ⊇ I^{j+red+1} at the origin
        sigma.append(product_length(cache, J, K, j + cert.red + 1) - cache.closure(j + 1).colength())
        if j >= max(N, cert.red) and len(sigma) >= W and not any(sigma[-W:]):
            break
        j += 1
        if j > cap:
            raise Undetermined("σ-invariants did not vanish", sigma=sigma)
    sigma = zpoly.trim(sigma)
    e0 = hil.e[0]
    lam_I = cache.length(1)
    excess = lam_I - cache.closure(1).colength()
    chi1 = hil.e[1] - e0 + lam_I
    tail_zero = not any(sigma[1:])
    e_from_sigma = [sum(comb(jj, k - 1) * s for jj, s in enumerate(sigma) if jj >= k - 1)
                    for k in range(1, r + 2)]
    h_from_sigma = zpoly.sub([e0], zpoly.mul([1, -1], sigma))
    checks = {
        "e_tilde_from_sigma": e_from_sigma == list(rr.e_tilde[1: r + 2]),
        "h_tilde_from_sigma": h_from_sigma == list(rr.h_tilde),
        "chi1_inequality": chi1 >= excess,
        "chi1_equality_iff_sigma_tail_zero": (chi1 == excess) == tail_zero,
    }
    return SigmaReport(J, tuple(sigma), chi1, excess, checks)


def verify_superficial_identity(cache: FiltrationCache,
                                cert: SuperficialCertificate | None = None) -> IdentityReport:
    """h(B) = h(B/x) − (1−z)^r b(z); updates the certificate's identity_check."""
    if cache.dim < 1:
        raise PreconditionError("needs positive dimension")
    default = cert is None
    cert = cert or cache.superficial()
    r = cache.dim
    h = h_polynomial(cache).h_poly
    hq = h_polynomial(cache.quotient([cert.element])).h_poly
    b = b_polynomial(cache, cert)
    holds = list(h) == zpoly.sub(hq, zpoly.mul(zpoly.one_minus_z_pow(r), b))
    if default:
        cache.set_identity_check(holds)
    return IdentityReport(holds, str(cert.element), tuple(h), tuple(hq), tuple(b))
