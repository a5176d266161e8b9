"""Ratliff-Rush closures, superficial elements and the auxiliary polynomials b and r.

Everything is computed for an m-primary ideal I of a quotient B = A/(X) of
the polynomial ring A, where X is generated by part of a system of
parameters (empty for B = A).  Ideals of B are stored as their preimages in A,
i.e. ideals containing X, so that colons and closures commute with the
representation.

Lengths are counts of standard monomials.  For K ⊇ X and x in I we use the
exact sequence 0 → B/(K : x) → B/K → B/(K + (x)) → 0, so
λ(B/(K : x)) = λ(B/K) − λ(B/(K + (x))); together with I^n ⊆ (I^{n+1} : x)
this decides colon equalities without building the colon ideal.
"""
from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field, replace
from typing import Sequence

from .algebra import Polynomial
from .errors import (
    NotMPrimary,
    NotSuperficial,
    PreconditionError,
    SuperficialSearchFailed,
    UnstableClosure,
)
from .groebner import INFINITE, Ideal, colon_element, intersection
from . import zpoly


@dataclass(frozen=True)
class Params:
    """Search and stabilization bounds; all overridable from the CLI."""

    window: int = 3
    c_max: int | None = None  # default 2 * (number of generators) + 6
    k_max: int = 12
    max_n: int = 10
    trials: int = 5
    seed: int = 0
    n_cap: int = 10
    coeff_bound: int = 16
    sparse_first: bool = True  # try a combination of pure-power generators first


@dataclass(frozen=True)
class SuperficialCertificate:
    element: Polynomial
    window_start: int
    window_length: int
    colon_flags: tuple  # (I^{n+1} : x) == I^n for n = 0, 1, ...
    trial: int = 0
    identity_check: bool | None = None
    support: str = "all"  # "all" generators or only the "pure-powers"

    def to_json(self) -> dict:
        return {
            "element": str(self.element),
            "window_start": self.window_start,
            "window_length": self.window_length,
            "colon_flags": list(self.colon_flags),
            "trial": self.trial,
            "support": self.support,
            "identity_check": self.identity_check,
        }


@dataclass(frozen=True)
class BehavesWellVerdict:
    holds: bool
    first_failure: int | None
    checked_up_to: int
    complete: bool  # the check reached both stabilization bounds
    sequence: tuple = ()
    lengths: tuple = field(default=(), compare=False)  # (n, λ image closure, λ closure in quotient)

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "first_failure": self.first_failure,
            "checked_up_to": self.checked_up_to,
            "complete": self.complete,
            "sequence": [str(x) for x in self.sequence],
            "lengths": [list(t) for t in self.lengths],
        }


class FiltrationCache:
    """Powers, lengths and Ratliff-Rush closures of an m-primary ideal of A/(X).

    ``modulus`` lists the generators of X.  The cache is single-writer: reads of
    distinct degrees may interleave, insertion is serialized by a lock.
    """

    def __init__(self, ideal: Ideal, modulus: Sequence[Polynomial] = (),
                 params: Params | None = None, *, _parent: "FiltrationCache | None" = None,
                 _scale: int = 1, _power_root: Ideal | None = None, _power_scale: int = 1):
        self.ring = ideal.ring
        self.base = ideal
        self.modulus = tuple(modulus)
        self.params = params or Params()
        self.dim = self.ring.ngens - len(self.modulus)
        self._parent = _parent
        self._scale = _scale
        # I^n is read as root^(scale * n) so quotients and powers share one table
        self._power_root = _power_root if _power_root is not None else ideal
        self._power_scale = _power_scale if _power_root is not None else 1
        self._lock = threading.RLock()
        self._pre: dict[int, Ideal] = {}
        self._colons: dict[tuple[int, int], Ideal] = {}
        self._closures: dict[int, Ideal] = {}
        self._sum_lengths: dict = {}
        self._xpowers: dict = {}
        self._superficial: SuperficialCertificate | None = None
        self._stable_from: int | None = None
        self._children: dict = {}
        self.memo: dict = {}  # derived reports, keyed by the computing layer
        self.closure_log: list[dict] = []
        if self.dim < 0:
            raise PreconditionError("modulus has more generators than the ring has variables")
        if self.preimage(1).colength() == INFINITE:
            missing = _missing_pure_powers(self.preimage(1))
            raise NotMPrimary(
                f"ideal is not primary to the maximal ideal (no pure power of {', '.join(missing)})",
                missing=missing)

    # -- construction of related caches
    def quotient(self, xs: Sequence[Polynomial]) -> "FiltrationCache":
        """The cache of I in B/(xs)."""
        key = ("q",) + tuple(xs)
        with self._lock:
            child = self._children.get(key)
            if child is None:
                child = FiltrationCache(self.base, self.modulus + tuple(xs), self.params,
                                        _power_root=self._power_root,
                                        _power_scale=self._power_scale)
                self._children[key] = child
        return child

    def power_cache(self, k: int) -> "FiltrationCache":
        """The cache of I^k; its powers and closures are read from this cache."""
        if k == 1:
            return self
        key = ("p", k)
        with self._lock:
            child = self._children.get(key)
            if child is None:
                child = FiltrationCache(self.power(k), self.modulus, self.params,
                                        _parent=self, _scale=k,
                                        _power_root=self._power_root,
                                        _power_scale=self._power_scale * k)
                self._children[key] = child
        return child

    def with_params(self, params: Params) -> "FiltrationCache":
        return FiltrationCache(self.base, self.modulus, params,
                               _power_root=self._power_root, _power_scale=self._power_scale)

    @property
    def c_max(self) -> int:
        if self.params.c_max is not None:
            return self.params.c_max
        return 2 * len(self.generators()) + 6

    # -- powers and lengths
    def power(self, n: int) -> Ideal:
        """I^n in A (without the modulus)."""
        if n == 1:
            return self.base
        return self._power_root ** (self._power_scale * n)

    def preimage(self, n: int) -> Ideal:
        """Preimage in A of I^n B, i.e. I^n + X, generated by its reduced GB."""
        if n <= 0:
            return Ideal(self.ring, [self.ring.one()])
        if self._parent is not None:
            return self._parent.preimage(self._scale * n)
        got = self._pre.get(n)
        if got is not None:
            return got
        ideal = (self.power(n) + self.modulus_ideal()).interreduced()
        with self._lock:
            self._pre.setdefault(n, ideal)
        return self._pre[n]

    def modulus_ideal(self) -> Ideal:
        return Ideal(self.ring, self.modulus)

    def generators(self) -> list[Polynomial]:
        """Generators of I B: the given generators of I that do not lie in X."""
        gens = self.base.minimal_generators()
        if self.modulus:
            X = self.modulus_ideal()
            gens = [g for g in gens if not X.contains(g)]
        return list(gens)

    def length(self, n: int) -> int:
        """λ(B / I^n B)."""
        return self.preimage(n).colength()

    def sum_length(self, n: int, x: Polynomial) -> int:
        """λ(B / (I^n B + xB))."""
        key = (n, x)
        got = self._sum_lengths.get(key)
        if got is None:
            got = (self.preimage(n) + Ideal(self.ring, [x])).colength()
            self._sum_lengths[key] = got
        return got

    def colon_element_length(self, n: int, x: Polynomial) -> int:
        """λ(B / (I^n B : x))."""
        return self.length(n) - self.sum_length(n, x)

    def x_power(self, x: Polynomial, k: int) -> Polynomial:
        key = (x, k)
        got = self._xpowers.get(key)
        if got is None:
            got = x ** k
            if self.modulus:
                got = self.modulus_ideal().reduce(got)
            self._xpowers[key] = got
        return got

    # -- superficial elements
    def pure_power_generators(self) -> list[Polynomial]:
        return [g for g in self.generators()
                if g.is_monomial() and sum(1 for v in g.leading_exponent() if v) == 1]

    def random_combination(self, rng: random.Random,
                           gens: Sequence[Polynomial] | None = None) -> Polynomial:
        fld = self.ring.field
        bound = self.params.coeff_bound
        if fld.characteristic:
            bound = min(bound, fld.characteristic - 1)
        acc = self.ring.zero()
        for g in (self.generators() if gens is None else gens):
            acc = acc + g.scale(rng.randint(1, bound))
        return acc

    def colon_flag(self, n: int, x: Polynomial) -> bool:
        """Whether (I^{n+1} B : x) = I^n B."""
        return self.colon_element_length(n + 1, x) == self.length(n)

    def certify(self, x: Polynomial, window: int | None = None,
                trial: int = 0) -> SuperficialCertificate | tuple:
        """Least c <= c_max with (I^{n+1} : x) = I^n for all n in [c, c + W].

        Returns a certificate, or ``(flags, best_run_start)`` on failure.
        """
        W = self.params.window if window is None else window
        flags: list[bool] = []
        run_start = None
        for n in range(self.c_max + W + 1):
            ok = self.colon_flag(n, x)
            flags.append(ok)
            if ok:
                if run_start is None:
                    run_start = n
                if n - run_start >= W:
                    return SuperficialCertificate(x, run_start, W, tuple(flags), trial)
            else:
                run_start = None
                if n >= self.c_max:
                    break
        return tuple(flags), run_start

    def find_superficial(self, trials: int | None = None, window: int | None = None,
                         seed: int | None = None, tag: str = "") -> SuperficialCertificate:
        trials = self.params.trials if trials is None else trials
        seed = self.params.seed if seed is None else seed
        if self.dim < 1:
            raise PreconditionError("superficial elements need positive dimension")
        if trials <= 0:
            raise SuperficialSearchFailed("no trials requested", trials=trials)
        # the stream depends on the modulus so each quotient level draws afresh
        tag = f"{tag}|" + ",".join(str(g) for g in self.modulus)
        rng = random.Random(f"{seed}:superficial:{tag}")
        X = self.modulus_ideal()
        best = None
        # When the pure powers form a reduction their general combinations are
        # superficial, and sparse elements keep quotient computations cheap.
        pure = self.pure_power_generators() if self.params.sparse_first else []
        if len(pure) >= self.dim:
            x = self.random_combination(random.Random(f"{seed}:sparse:{tag}"), pure)
            if not X.contains(x):
                got = self.certify(x, window, trial=-1)
                if isinstance(got, SuperficialCertificate):
                    return replace(got, support="pure-powers")
        for t in range(trials):
            x = self.random_combination(rng)
            if X.contains(x):
                continue
            got = self.certify(x, window, trial=t)
            if isinstance(got, SuperficialCertificate):
                return got
            flags, _ = got
            failing = [n for n, ok in enumerate(flags) if not ok]
            if best is None or len(failing) < len(best[1]):
                best = (x, failing)
        if best is None:
            raise SuperficialSearchFailed(f"every candidate in {trials} trials vanished modulo X",
                                          trials=trials)
        raise SuperficialSearchFailed(
            f"no superficial element certified in {trials} trials",
            best_candidate=str(best[0]), failing_indices=best[1])

    def superficial(self) -> SuperficialCertificate:
        """The cache's default certified superficial element (seeded)."""
        if self._superficial is None:
            cert = self.find_superficial()
            with self._lock:
                if self._superficial is None:
                    self._superficial = cert
        return self._superficial

    def set_identity_check(self, ok: bool):
        with self._lock:
            if self._superficial is not None:
                self._superficial = replace(self._superficial, identity_check=ok)

    def superficial_sequence(self, s: int, seed: int | None = None) -> list[SuperficialCertificate]:
        """x_1 superficial for I, x_2 for the image of I in B/(x_1), and so on."""
        if not 1 <= s <= self.dim:
            raise PreconditionError(f"sequence length {s} outside [1, {self.dim}]")
        certs = []
        cache = self
        for i in range(s):
            if seed is None:
                cert = cache.superficial()
            else:
                cert = cache.find_superficial(seed=seed, tag=f"seq{i}")
            certs.append(cert)
            cache = cache.quotient([cert.element])
        return certs

    # -- Ratliff-Rush closures
    def _colon_by_I(self, K: Ideal) -> Ideal:
        result = None
        for g in self.generators():
            q = colon_element(K, g)
            if q.is_unit():
                continue
            result = q if result is None else intersection(result, q)
        if result is None:
            return Ideal(self.ring, [self.ring.one()])
        return result.interreduced()

    def colon_chain(self, m: int, j: int) -> Ideal:
        """(I^m B : I^j B) as a preimage, via j successive colons by I."""
        if j == 0:
            return self.preimage(m)
        key = (m, j)
        got = self._colons.get(key)
        if got is None:
            got = self._colon_by_I(self.colon_chain(m, j - 1))
            with self._lock:
                self._colons.setdefault(key, got)
        return self._colons[key]

    def _x_colon_length(self, n: int, k: int) -> int:
        """λ(B / (I^{n+k} B : x^k)) for the certified superficial x."""
        x = self.superficial().element
        return self.length(n + k) - self.sum_length(n + k, self.x_power(x, k))

    def _chain_contains(self, C: Ideal, n: int, k: int) -> bool:
        """C · I^k ⊆ I^{n+k}, i.e. C ⊆ (I^{n+k} : I^k)."""
        big = self.preimage(n + k)
        mult = self.preimage(k).groebner_basis()
        return all(big.contains(c * h) for c in C.groebner_basis() for h in mult)

    def closure(self, n: int) -> Ideal:
        """Ratliff-Rush closure of I^n B (as a preimage in A).

        With x superficial, C_k = (I^{n+k} : x^k) contains the chain term
        T_k = (I^{n+k} : I^k), and T_k = C_k exactly when C_k · I^k ⊆ I^{n+k}.
        We stop at the first k with C_k = C_{k+1} (compared by length, as
        C_k ⊆ C_{k+1}) and T_k = C_k; then T_{k+1} = C_{k+1} follows, so the
        I-chain has two equal consecutive terms and agrees with the x-chain.
        """
        if n <= 0:
            return Ideal(self.ring, [self.ring.one()])
        if self._parent is not None:
            return self._parent.closure(self._scale * n)
        got = self._closures.get(n)
        if got is not None:
            return got
        if self.dim < 1:
            raise PreconditionError("Ratliff-Rush closures need positive dimension")
        stable = self._stable_from
        if stable is not None and n >= stable + self.params.window:
            # beyond the certified window the closure is the power itself
            return self.preimage(n)
        x = self.superficial().element
        k_cap = self.params.k_max
        base = self.length(n)
        lengths = [self._x_colon_length(n, 1)]
        result = None
        k = 1
        while result is None:
            if k + 1 > k_cap:
                raise UnstableClosure(
                    f"closure of I^{n} did not stabilize within k <= {k_cap}",
                    n=n, colengths=lengths)
            lengths.append(self._x_colon_length(n, k + 1))
            if lengths[-1] == lengths[-2]:
                if lengths[-1] == base:
                    result = self.preimage(n)  # I^n ⊆ T_k ⊆ C_k and equal lengths
                else:
                    C = colon_element(self.preimage(n + k), self.x_power(x, k)).interreduced()
                    if self._chain_contains(C, n, k):
                        result = C
            k += 1
        with self._lock:
            self._closures.setdefault(n, result)
            self.closure_log.append({"n": n, "k": k, "colengths": lengths})
        return self._closures[n]

    def closure_by_colon_chain(self, n: int) -> Ideal:
        """Closure from the I-chain alone (first repeated term); an oracle."""
        if n <= 0:
            return Ideal(self.ring, [self.ring.one()])
        prev = self.colon_chain(n + 1, 1)
        for k in range(2, self.params.k_max + 1):
            nxt = self.colon_chain(n + k, k)
            if nxt == prev:
                return nxt
            prev = nxt
        raise UnstableClosure(f"colon chain for I^{n} did not repeat within {self.params.k_max}", n=n)

    def is_closed(self, n: int) -> bool:
        return self.closure(n).colength() == self.length(n)

    def stabilization_bound(self) -> int:
        """Least N >= c with closure(n) = I^n verified for n in [N, N + W - 1].

        For n >= c (the superficial certificate start) the closure equals the
        power, so from N on every closure is the power.
        """
        if self._parent is not None:
            parent_bound = self._parent.stabilization_bound()
            return -(-parent_bound // self._scale)
        if self._stable_from is not None:
            return self._stable_from
        c = max(1, self.superficial().window_start)
        W = self.params.window
        n = 1
        run_start = None
        while True:
            if self.is_closed(n):
                if run_start is None:
                    run_start = n
                if run_start >= c and n - run_start + 1 >= W:
                    break
            else:
                run_start = None
            n += 1
            if n > c + W + self.params.k_max:
                raise UnstableClosure("closures keep differing from powers past the "
                                      "superficial window", superficial_start=c, n=n)
        self._stable_from = run_start
        return run_start

    def closure_witness(self, n: int) -> Polynomial | None:
        """A generator of closure(n) outside I^n, if any."""
        P = self.preimage(n)
        for g in self.closure(n).groebner_basis():
            if not P.contains(g):
                return g
        return None


def _missing_pure_powers(ideal: Ideal) -> list[str]:
    lts = ideal.leading_exponents()
    names = ideal.ring.variables
    have = set()
    for e in lts:
        nz = [i for i, v in enumerate(e) if v]
        if len(nz) == 1:
            have.add(nz[0])
    return [names[i] for i in range(len(names)) if i not in have]


# ---------------------------------------------------------------------------
# Module-level operations


def rr_closure(cache: FiltrationCache, n: int) -> Ideal:
    return cache.closure(n)


def find_superficial(cache: FiltrationCache, trials: int | None = None,
                     window: int | None = None, seed: int | None = None) -> SuperficialCertificate:
    return cache.find_superficial(trials, window, seed)


def b_polynomial(cache: FiltrationCache, cert: SuperficialCertificate | None = None) -> list[int]:
    """Coefficients λ((I^{n+1} : x)/I^n) of b_I(z), lowest degree first."""
    cert = cert or cache.superficial()
    x = cert.element
    W = cache.params.window
    start = cert.window_start
    coeffs: list[int] = []
    n = 0
    cap = cache.c_max + W + cache.params.k_max
    while True:
        coeffs.append(cache.length(n) - cache.colon_element_length(n + 1, x))
        if n >= start + W and all(c == 0 for c in coeffs[-W:]):
            break
        n += 1
        if n > cap:
            raise NotSuperficial("b-polynomial coefficients keep growing",
                                 element=str(x), coefficients=coeffs)
    return zpoly.trim(coeffs)


def r_polynomial(cache: FiltrationCache) -> list[int]:
    """Coefficients λ(closure(n+1)/I^{n+1}) of r_I(z), lowest degree first."""
    bound = cache.stabilization_bound()
    coeffs = []
    for n in range(0, bound + cache.params.window):
        coeffs.append(cache.length(n + 1) - cache.closure(n + 1).colength())
    return zpoly.trim(coeffs)


def behaves_well_mod(cache: FiltrationCache, xs: Sequence[Polynomial] | None = None,
                     max_n: int | None = None, s: int = 1,
                     seed: int | None = None) -> BehavesWellVerdict:
    """Whether the Ratliff-Rush filtration of B surjects onto that of B/(xs).

    With ``xs`` omitted a certified superficial sequence of length ``s`` is drawn.
    """
    max_n = cache.params.max_n if max_n is None else max_n
    if xs is None:
        if not 1 <= s <= cache.dim - 1:
            raise PreconditionError(f"sequence length must lie in [1, {cache.dim - 1}]")
        xs = [c.element for c in cache.superficial_sequence(s, seed)]
    else:
        xs = list(xs)
        if not 1 <= len(xs) <= cache.dim - 1:
            raise PreconditionError(f"sequence length must lie in [1, {cache.dim - 1}]")
        step = cache
        for x in xs:
            got = step.certify(x)
            if not isinstance(got, SuperficialCertificate):
                raise PreconditionError("sequence is not certified superficial",
                                        element=str(x))
            step = step.quotient([x])
    quot = cache.quotient(xs)
    X = Ideal(cache.ring, xs)
    bound = max(cache.stabilization_bound(), quot.stabilization_bound())
    top = min(bound, max_n)
    lengths = []
    first_fail = None
    for n in range(1, top + 1):
        image = (cache.closure(n) + X).interreduced()
        target = quot.closure(n)
        lengths.append((n, image.colength(), target.colength()))
        if image != target and first_fail is None:
            first_fail = n
    return BehavesWellVerdict(first_fail is None, first_fail, top, top >= bound,
                              tuple(xs), tuple(lengths))
