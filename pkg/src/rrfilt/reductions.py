"""Minimal reductions, reduction numbers and the minimal-multiplicity test.

A reduction of I in B = A/(X) is stored, like every ideal of B, through its
preimage J + X.  All containments used here go one way for free
(J·I^n ⊆ I^{n+1}, J·closure(j) ⊆ closure(j+1)), so equalities are decided by
comparing colengths.

Generic combinations of generators of different degrees cut out points away
from the origin, so J-products are measured locally: a power of I that lies
in the product at the origin is added before counting.  For the reduction
test itself Nakayama gives I^{n+1} = J·I^n locally iff J·I^n + I^{n+2} = I^{n+1}.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import Polynomial
from .errors import PreconditionError, ReductionSearchFailed
from .filtration import FiltrationCache
from .groebner import Ideal


@dataclass(frozen=True)
class ReductionCertificate:
    J: tuple  # generators of the reduction (without the modulus)
    red: int
    checked_n: int
    colength_J: int
    trial: int | str = 0
    support: str = "all"
    spread: tuple = ()  # (trial label, red or None) for every candidate tried

    @property
    def red_min(self) -> int:
        return min(r for _, r in self.spread if r is not None) if self.spread else self.red

    @property
    def red_max(self) -> int:
        return max(r for _, r in self.spread if r is not None) if self.spread else self.red

    def to_json(self) -> dict:
        return {
            "J": [str(g) for g in self.J],
            "red": self.red,
            "checked_n": self.checked_n,
            "colength_J": self.colength_J,
            "trial": self.trial,
            "support": self.support,
            "red_min": self.red_min,
            "red_max": self.red_max,
            "trials_agree": self.red_min == self.red_max,
            "spread": [[str(t), r] for t, r in self.spread],
        }


@dataclass(frozen=True)
class MinimalMultiplicityVerdict:
    holds: bool
    first_failure: int | None
    checked_up_to: int
    complete: bool
    sigma: tuple = ()  # λ(closure(j+1) / J·closure(j)) for j = 1..checked_up_to
    h_tilde_degree: int | None = None
    J: tuple = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "first_failure": self.first_failure,
            "checked_up_to": self.checked_up_to,
            "complete": self.complete,
            "sigma": list(self.sigma),
            "h_tilde_degree": self.h_tilde_degree,
            "h_tilde_degree_at_most_1": None if self.h_tilde_degree is None else self.h_tilde_degree <= 1,
            "J": [str(g) for g in self.J],
        }


def product_length(cache: FiltrationCache, J: Sequence[Polynomial], K: Ideal, pad: int) -> int:
    """λ(B / (J·K + I^pad + X)); the local length of B/J·K when I^pad ⊆ J·K at the origin."""
    extra = cache.preimage(pad)
    if not J:
        return extra.colength()
    return (Ideal(cache.ring, J) * K + extra).colength()


def _reduction_number(cache: FiltrationCache, J: Sequence[Polynomial], n_cap: int) -> int | None:
    """Least n <= n_cap with I^{n+1} B = J·I^n B at the origin, or None."""
    for n in range(n_cap + 1):
        if _relation_holds(cache, J, n):
            return n
    return None


def _relation_holds(cache: FiltrationCache, J: Sequence[Polynomial], n: int) -> bool:
    return product_length(cache, J, cache.power(n), n + 2) == cache.length(n + 1)


def _candidates(cache: FiltrationCache, trials: int, seed: int):
    d = cache.dim
    pure = cache.pure_power_generators() if cache.params.sparse_first else []
    if d and len(pure) >= d:
        rng = random.Random(f"{seed}:reduction:sparse:{cache.modulus}")
        yield -1, "pure-powers", tuple(cache.random_combination(rng, pure) for _ in range(d))
    rng = random.Random(f"{seed}:reduction:{cache.modulus}")
    for t in range(trials):
        yield t, "all", tuple(cache.random_combination(rng) for _ in range(d))


def minimal_reduction(cache: FiltrationCache, trials: int | None = None, seed: int | None = None,
                      J: Sequence[Polynomial] | None = None, n_cap: int | None = None,
                      all_trials: bool = True) -> ReductionCertificate:
    """Certified minimal reduction with the least reduction number found.

    With ``J`` given only that ideal is certified.  Otherwise dim B generic
    combinations of the generators are drawn per trial; ``all_trials=False``
    returns the first success.
    """
    trials = cache.params.trials if trials is None else trials
    seed = cache.params.seed if seed is None else seed
    n_cap = cache.params.n_cap if n_cap is None else n_cap
    if J is not None:
        J = tuple(J)
        if len(J) != cache.dim:
            raise PreconditionError(f"a minimal reduction needs {cache.dim} generators, got {len(J)}")
        base = cache.preimage(1)
        if not all(base.contains(g) for g in J):
            raise PreconditionError("the given J is not contained in I")
        candidates = [("given", "given", J)]
    else:
        candidates = _candidates(cache, trials, seed)
    spread = []
    best = None
    for label, support, gens in candidates:
        red = _reduction_number(cache, gens, n_cap)
        spread.append((label, red))
        if red is None:
            continue
        if best is None or red < best[0]:
            best = (red, label, support, gens)
        if not all_trials:
            break
    if best is None:
        raise ReductionSearchFailed(
            f"no candidate satisfied I^(n+1) = J·I^n for n <= {n_cap}",
            spread=[[str(t), r] for t, r in spread], n_cap=n_cap)
    red, label, support, gens = best
    # persistence: the relation keeps holding one step further
    checked = red + 1
    if not _relation_holds(cache, gens, checked):
        raise ReductionSearchFailed("reduction relation did not persist", J=[str(g) for g in gens])
    # I^{red+1} = J·I^red ⊆ J at the origin
    col = product_length(cache, gens, cache.preimage(0), red + 1)
    return ReductionCertificate(gens, red, checked, col, label, support, tuple(spread))


def certified_reduction(cache: FiltrationCache) -> ReductionCertificate:
    """The first certified reduction of the cache (memoized)."""
    got = cache.memo.get("reduction")
    if got is None:
        got = minimal_reduction(cache, all_trials=False)
        cache.memo["reduction"] = got
    return got


def reduction_number_of_power(cache: FiltrationCache, n: int, trials: int | None = None,
                              seed: int | None = None) -> ReductionCertificate:
    return minimal_reduction(cache.power_cache(n), trials=trials, seed=seed)


def tilde_minimal_multiplicity(cache: FiltrationCache, J: Sequence[Polynomial] | None = None,
                               max_n: int | None = None,
                               corroborate: bool = False) -> MinimalMultiplicityVerdict:
    """Whether closure(j+1) = J·closure(j) for every j >= 1.

    Past the stabilization bound N closures are powers, so the relation holds
    for j >= max(N, red_J) automatically; checking j up to that point is
    therefore complete.
    """
    if cache.dim < 1:
        raise PreconditionError("needs positive dimension")
    max_n = cache.params.max_n if max_n is None else max_n
    if J is None:
        cert = certified_reduction(cache)
    else:
        cert = minimal_reduction(cache, J=J)
    J = cert.J
    top = max(cache.stabilization_bound(), cert.red, 1)
    upto = min(top, max_n)
    sigma = []
    first = None
    for j in range(1, upto + 1):
        s = product_length(cache, J, cache.closure(j), j + cert.red + 1) - cache.closure(j + 1).colength()
        sigma.append(s)
        if s and first is None:
            first = j
    h_deg = None
    if corroborate:
        from .hilbert import rr_hilbert
        h_deg = len(rr_hilbert(cache).h_tilde) - 1
    return MinimalMultiplicityVerdict(first is None, first, upto, upto >= top,
                                      tuple(sigma), h_deg, J)
