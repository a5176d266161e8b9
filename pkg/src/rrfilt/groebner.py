"""Buchberger-based ideal arithmetic.

The engine works on raw ``{exponent: coefficient}`` dicts; :class:`Ideal`
wraps it with caching.  Every ideal handled by the rest of the package is
primary to the irrelevant maximal ideal, which is what makes the colength
(number of standard monomials) meaningful.
"""
from __future__ import annotations

import threading
from heapq import heappop, heappush
from math import inf
from typing import Iterable, Sequence

from gmpy2 import mpq

from .algebra import (
    AlgebraError,
    MonomialOrder,
    Polynomial,
    RingContext,
    mono_divides,
    mono_lcm,
)

INFINITE = inf


class _NegKey:
    """Memoized negated order keys, so ``heapq`` pops the largest monomial first."""

    __slots__ = ("key", "memo")

    def __init__(self, order: MonomialOrder):
        self.key = order.key
        self.memo: dict = {}

    def __call__(self, e):
        k = self.memo.get(e)
        if k is None:
            k = tuple(-v for v in self.key(e))
            self.memo[e] = k
        return k


_NEG_KEYS: dict = {}


def _negkey(order: MonomialOrder) -> _NegKey:
    nk = _NEG_KEYS.get(order)
    if nk is None:
        nk = _NEG_KEYS[order] = _NegKey(order)
    return nk


_QONE = mpq(1)


def _inv(c, p):
    return pow(int(c), -1, p) if p else _QONE / c


def _monic(f: dict, lt, p) -> dict:
    c = f[lt]
    if c == 1:
        return f
    inv = _inv(c, p)
    if p:
        return {e: v * inv % p for e, v in f.items()}
    return {e: v * inv for e, v in f.items()}


class _Basis:
    """Monic divisors indexed for the division algorithm."""

    __slots__ = ("lts", "tails", "degs")

    def __init__(self, polys: Iterable[tuple[tuple, dict]] = ()):
        self.lts: list = []
        self.tails: list = []
        self.degs: list = []
        for lt, f in polys:
            self.add(lt, f)

    def add(self, lt, f: dict):
        self.lts.append(lt)
        self.tails.append([(e, c) for e, c in f.items() if e != lt])
        self.degs.append(sum(lt))

    def drop_multiples(self, m):
        keep = [i for i, a in enumerate(self.lts) if not mono_divides(m, a)]
        if len(keep) != len(self.lts):
            self.lts = [self.lts[i] for i in keep]
            self.tails = [self.tails[i] for i in keep]
            self.degs = [self.degs[i] for i in keep]

    def find(self, e, de):
        lts, degs = self.lts, self.degs
        for i in range(len(lts)):
            if degs[i] <= de:
                a = lts[i]
                for x, y in zip(a, e):
                    if x > y:
                        break
                else:
                    return i
        return -1


def _reduce(f: dict, basis: _Basis, nk: _NegKey, p: int, full: bool = True) -> dict:
    """Normal form of ``f`` modulo monic ``basis``.  Does not mutate ``f``."""
    if not f or not basis.lts:
        return dict(f)
    f = dict(f)
    heap = [(nk(e), e) for e in f]
    heap.sort()
    rem: dict = {}
    lts, tails = basis.lts, basis.tails
    find = basis.find
    while heap:
        _, e = heappop(heap)
        c = f.pop(e, None)
        if c is None:
            continue
        i = find(e, sum(e))
        if i < 0:
            rem[e] = c
            if not full:
                for _, e2 in heap:
                    if e2 in f:
                        rem[e2] = f.pop(e2)
                return rem
            continue
        a = lts[i]
        q = tuple(y - x for x, y in zip(a, e))
        for ge, gc in tails[i]:
            ne = tuple(x + y for x, y in zip(q, ge))
            v = f.get(ne)
            if v is None:
                v = -c * gc
                if p:
                    v %= p
                f[ne] = v
                heappush(heap, (nk(ne), ne))
            else:
                v -= c * gc
                if p:
                    v %= p
                if v:
                    f[ne] = v
                else:
                    del f[ne]
    return rem


def _lead(f: dict, key):
    return max(f, key=key)


def _minimalize_monomials(exps: Iterable[tuple]) -> list[tuple]:
    """Minimal generators of a monomial ideal."""
    out: list = []
    for e in sorted(set(exps), key=sum):
        if not any(mono_divides(g, e) for g in out):
            out.append(e)
    return out


def buchberger(polys: Sequence[dict], order: MonomialOrder, p: int) -> list[dict]:
    """Reduced Gröbner basis (monic, sorted by decreasing leading term)."""
    key = order.key
    nk = _negkey(order)
    polys = [f for f in polys if f]
    if not polys:
        return []
    one = 1 if p else _QONE
    for f in polys:
        if len(f) == 1 and not any(next(iter(f))):
            return [{next(iter(f)): one}]
    if all(len(f) == 1 for f in polys):
        mons = _minimalize_monomials(next(iter(f)) for f in polys)
        return [{e: one} for e in sorted(mons, key=key, reverse=True)]

    # Normal strategy: pairs are processed by smallest lcm.
    store: list[dict] = []
    lts: list = []
    G: list[int] = []
    pairs: list[tuple] = []  # (sortkey, i, j, lcm)

    def update(ih: int) -> bool:
        """Gebauer-Möller update; returns True when elements left G."""
        nonlocal G, pairs
        mh = lts[ih]
        h_mono = len(store[ih]) == 1
        # a new pair is skipped when another new pair's lcm properly divides
        # its lcm, or equals it and comes first; only pairs with a nonzero
        # S-polynomial are examined, all others still serve as witnesses
        lcms = [mono_lcm(mh, lts[ig]) for ig in G]
        degs = [sum(l) for l in lcms]
        fresh = []
        for pos, ig in enumerate(G):
            if h_mono and len(store[ig]) == 1:
                continue  # S-polynomial of two monomials vanishes
            l, dl = lcms[pos], degs[pos]
            redundant = False
            for pos2, l2 in enumerate(lcms):
                if pos2 != pos and degs[pos2] <= dl and mono_divides(l2, l) \
                        and (l2 != l or pos2 < pos):
                    redundant = True
                    break
            if redundant:
                continue
            if any(a and b for a, b in zip(mh, lts[ig])):
                fresh.append(((dl, key(l)), ig, ih, l))
        # drop old pairs made redundant by the new leading term
        kept = []
        for item in pairs:
            _, i, j, l = item
            if mono_divides(mh, l) and mono_lcm(lts[i], mh) != l and mono_lcm(lts[j], mh) != l:
                continue
            kept.append(item)
        kept.extend(fresh)
        pairs = kept
        newG = [ig for ig in G if not mono_divides(mh, lts[ig])]
        dropped = len(newG) != len(G)
        newG.append(ih)
        G = newG
        return dropped

    basis = _Basis()

    def add(f: dict):
        lt = _lead(f, key)
        f = _monic(f, lt, p)
        store.append(f)
        lts.append(lt)
        if update(len(store) - 1):
            basis.drop_multiples(lt)
        basis.add(lt, f)

    # monomials first and without pairs: they make later reductions cheaper
    for e in _minimalize_monomials(next(iter(f)) for f in polys if len(f) == 1):
        store.append({e: one})
        lts.append(e)
        G.append(len(store) - 1)
        basis.add(e, store[-1])
    polys = sorted((f for f in polys if len(f) > 1), key=lambda f: key(_lead(f, key)))
    for f in polys:
        r = _reduce(f, basis, nk, p) if basis.lts else dict(f)
        if r:
            add(r)

    while pairs:
        best = min(range(len(pairs)), key=lambda t: pairs[t][0])
        _, i, j, l = pairs.pop(best)
        fi, fj = store[i], store[j]
        qi = tuple(a - b for a, b in zip(l, lts[i]))
        qj = tuple(a - b for a, b in zip(l, lts[j]))
        s: dict = {}
        for e, c in fi.items():
            s[tuple(a + b for a, b in zip(e, qi))] = c
        for e, c in fj.items():
            ne = tuple(a + b for a, b in zip(e, qj))
            v = s.get(ne, 0) - c
            if p:
                v %= p
            if v:
                s[ne] = v
            else:
                s.pop(ne, None)
        r = _reduce(s, basis, nk, p)
        if r:
            add(r)

    # interreduce; an element never reduces its own tail since every tail
    # term is smaller than its leading term
    reduced: list[tuple] = []
    for i in G:
        f = store[i]
        lt = lts[i]
        tail = {e: c for e, c in f.items() if e != lt}
        r = _reduce(tail, basis, nk, p)
        r[lt] = one
        reduced.append((lt, r))
    reduced.sort(key=lambda t: key(t[0]), reverse=True)
    return [f for _, f in reduced]


# ---------------------------------------------------------------------------
# Standard monomials


def is_mprimary_lts(lts: Sequence[tuple], n: int) -> bool:
    """The leading-term ideal contains a pure power of every variable."""
    found = [False] * n
    for e in lts:
        nz = [i for i, v in enumerate(e) if v]
        if len(nz) == 1:
            found[nz[0]] = True
        elif not nz:
            return True
    return all(found)


def count_standard_monomials(lts: Sequence[tuple], n: int):
    """Number of monomials outside the monomial ideal generated by ``lts``."""
    if any(not any(e) for e in lts):
        return 0
    if not is_mprimary_lts(lts, n):
        return INFINITE
    return _count(tuple(_minimalize_monomials(lts)), n)


def _count(gens: tuple, n: int) -> int:
    # Slice along the last variable: for each standard monomial of the
    # projection, the fibre length is the least last exponent that lands in I.
    if n == 1:
        return min(g[0] for g in gens)
    if n == 2:
        # staircase: fibre over x^u has length min{b : (a, b) in gens, a <= u}
        pts = sorted(gens)
        total, best, idx = 0, inf, 0
        stop = min(a for a, b in gens if b == 0)
        for u in range(stop):
            while idx < len(pts) and pts[idx][0] <= u:
                best = min(best, pts[idx][1])
                idx += 1
            total += best
        return total
    last = n - 1
    bound = min(g[last] for g in gens if not any(g[:last]))
    total = 0
    # Slice along the last variable: level t contributes the standard
    # monomials of (I : x_n^t) restricted to the first n - 1 variables.
    for t in range(bound):
        total += _count(tuple(g[:last] for g in gens if g[last] <= t), last)
    return total


def standard_monomials(lts: Sequence[tuple], n: int) -> list[tuple]:
    """All monomials outside the ideal of ``lts`` (requires m-primary)."""
    if not is_mprimary_lts(lts, n):
        raise AlgebraError("ideal is not primary to the maximal ideal")
    lts = _minimalize_monomials(lts)
    out = []

    def rec(prefix: tuple, k: int):
        if k == n:
            out.append(prefix)
            return
        v = 0
        while True:
            cand = prefix + (v,)
            # cand extended by zeros lies in the ideal iff some generator divides it
            if any(all(g[i] <= cand[i] for i in range(k + 1)) and not any(g[k + 1:])
                   for g in lts):
                break
            rec(cand, k + 1)
            v += 1

    rec((), 0)
    return out


# ---------------------------------------------------------------------------
# Ideal handle


class Ideal:
    """An ideal of a polynomial ring with cached reduced Gröbner bases."""

    def __init__(self, ring: RingContext, generators: Iterable[Polynomial]):
        gens = []
        for g in generators:
            if isinstance(g, str):
                g = ring.poly(g)
            if g.ring != ring:
                raise AlgebraError("generator lives in a different ring")
            if g:
                gens.append(g)
        self.ring = ring
        self.generators: tuple[Polynomial, ...] = tuple(gens)
        self._gb: dict = {}
        self._lock = threading.Lock()
        self._colength = None
        self._powers: dict[int, "Ideal"] = {}

    @classmethod
    def maximal(cls, ring: RingContext) -> "Ideal":
        return cls(ring, ring.gens())

    @classmethod
    def from_raw(cls, ring: RingContext, raw: Iterable[dict], order: MonomialOrder | None = None,
                 is_gb: bool = False) -> "Ideal":
        raw = list(raw)
        ideal = cls(ring, [Polynomial(ring, f) for f in raw])
        if is_gb:
            ideal._gb[order or ring.order] = raw
        return ideal

    # -- Gröbner data
    def _raw_gb(self, order: MonomialOrder | None = None) -> list[dict]:
        order = order or self.ring.order
        gb = self._gb.get(order)
        if gb is None:
            with self._lock:
                gb = self._gb.get(order)
                if gb is None:
                    gb = buchberger([g.terms for g in self.generators], order,
                                    self.ring.field.characteristic)
                    self._gb[order] = gb
        return gb

    def groebner_basis(self, order: MonomialOrder | None = None) -> list[Polynomial]:
        return [Polynomial(self.ring, f) for f in self._raw_gb(order)]

    def leading_exponents(self, order: MonomialOrder | None = None) -> list[tuple]:
        key = (order or self.ring.order).key
        return [_lead(f, key) for f in self._raw_gb(order)]

    def _basis(self, order: MonomialOrder | None = None) -> _Basis:
        order = order or self.ring.order
        key = order.key
        return _Basis((_lead(f, key), f) for f in self._raw_gb(order))

    def reduce(self, f: Polynomial, order: MonomialOrder | None = None) -> Polynomial:
        self._check(f)
        order = order or self.ring.order
        return Polynomial(self.ring, _reduce(f.terms, self._basis(order), _negkey(order),
                                             self.ring.field.characteristic))

    def contains(self, f: Polynomial) -> bool:
        self._check(f)
        if not f:
            return True
        order = self.ring.order
        r = _reduce(f.terms, self._basis(order), _negkey(order),
                    self.ring.field.characteristic, full=False)
        return not r

    __contains__ = contains

    def contains_ideal(self, other: "Ideal") -> bool:
        self._check(other)
        return all(self.contains(g) for g in other.generators)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        self._check(other)
        return self._raw_gb() == other._raw_gb()

    def __hash__(self):
        return hash(tuple(frozenset(f.items()) for f in self._raw_gb()))

    def is_zero(self) -> bool:
        return not self.generators

    def is_unit(self) -> bool:
        gb = self._raw_gb()
        return len(gb) == 1 and not any(next(iter(gb[0])))

    def is_monomial(self) -> bool:
        return all(len(f) == 1 for f in self._raw_gb())

    # -- combinations
    def __add__(self, other: "Ideal") -> "Ideal":
        self._check(other)
        return Ideal(self.ring, self.generators + other.generators)

    def __mul__(self, other: "Ideal") -> "Ideal":
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Ideal(self.ring, [])
        prods = {f * g for f in self.minimal_generators() for g in other.minimal_generators()}
        out = Ideal(self.ring, sorted(prods, key=_poly_sort_key))
        return out.interreduced()

    def __pow__(self, n: int) -> "Ideal":
        return power(self, n)

    def minimal_generators(self) -> tuple[Polynomial, ...]:
        """The reduced Gröbner basis when the ideal is monomial, else the generators."""
        gb = self._gb.get(self.ring.order)
        if gb is not None and (len(gb) <= len(self.generators) or all(len(f) == 1 for f in gb)):
            return tuple(Polynomial(self.ring, f) for f in gb)
        return self.generators

    def interreduced(self) -> "Ideal":
        """Same ideal, generated by its reduced Gröbner basis."""
        gb = self._raw_gb()
        return Ideal.from_raw(self.ring, gb, self.ring.order, is_gb=True)

    # -- finiteness
    def is_mprimary(self) -> bool:
        return is_mprimary_lts(self.leading_exponents(), self.ring.ngens)

    def colength(self):
        if self._colength is None:
            self._colength = count_standard_monomials(self.leading_exponents(), self.ring.ngens)
        return self._colength

    def standard_monomials(self) -> list[tuple]:
        return standard_monomials(self.leading_exponents(), self.ring.ngens)

    def _check(self, other):
        if other.ring != self.ring:
            raise AlgebraError("objects live in different rings")

    def __repr__(self):
        return f"Ideal({', '.join(str(g) for g in self.generators)})"

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.generators) + ")"


def _poly_sort_key(f: Polynomial):
    return (f.degree(), sorted(f.terms))


# ---------------------------------------------------------------------------
# Operations


def reduce(f: Polynomial, basis: Sequence[Polynomial], order: MonomialOrder | None = None) -> Polynomial:
    """Multivariate division of ``f`` by ``basis`` (in the given sequence).

    Returns the remainder; the remainder has no term divisible by a leading
    term of the basis.
    """
    ring = f.ring
    order = order or ring.order
    key = order.key
    p = ring.field.characteristic
    items = []
    for g in basis:
        if g.ring != ring:
            raise AlgebraError("objects live in different rings")
        if not g:
            raise AlgebraError("division by the zero polynomial")
        lt = _lead(g.terms, key)
        items.append((lt, _monic(dict(g.terms), lt, p)))
    return Polynomial(ring, _reduce(f.terms, _Basis(items), _negkey(order), p))


def groebner_basis(ideal: Ideal, order: MonomialOrder | None = None) -> list[Polynomial]:
    return ideal.groebner_basis(order)


def ideal_membership(ideal: Ideal, f: Polynomial) -> bool:
    return ideal.contains(f)


def ideal_equal(a: Ideal, b: Ideal) -> bool:
    return a == b


def ideal_sum(a: Ideal, b: Ideal) -> Ideal:
    return a + b


def ideal_product(a: Ideal, b: Ideal) -> Ideal:
    return a * b


def power(ideal: Ideal, n: int) -> Ideal:
    """``ideal**n`` by repeated multiplication with interreduction after each step."""
    if n < 0:
        raise AlgebraError("ideal powers need a natural exponent")
    ring = ideal.ring
    if n == 0:
        return Ideal(ring, [ring.one()])
    cache = ideal._powers
    got = cache.get(n)
    if got is not None:
        return got
    # memoized per handle; start from the largest cached power below n
    k = max((m for m in cache if m < n), default=0)
    result = cache[k] if k else ideal.interreduced()
    for m in range(max(k, 1) + 1, n + 1):
        result = result * ideal
        cache.setdefault(m, result)
    if n == 1:
        cache.setdefault(1, result)
    return cache[n]


def ideal_combine(op: str, a: Ideal, b: Ideal | None = None, n: int | None = None) -> Ideal:
    if op == "sum":
        return a + b
    if op == "product":
        return a * b
    if op == "power":
        return power(a, n)
    raise AlgebraError(f"unknown ideal operation {op!r}")


def _tagged_ring(ring: RingContext) -> tuple[RingContext, MonomialOrder]:
    name = "t"
    while name in ring.variables:
        name += "_"
    order = MonomialOrder("elimination", 1)
    return RingContext((name,) + ring.variables, ring.field, order), order


def intersection(a: Ideal, b: Ideal) -> Ideal:
    """``a ∩ b`` by eliminating t from t·a + (1 − t)·b."""
    a._check(b)
    ring = a.ring
    if a.is_zero() or b.is_zero():
        return Ideal(ring, [])
    if a.is_monomial() and b.is_monomial():
        lts_a, lts_b = a.leading_exponents(), b.leading_exponents()
        mons = _minimalize_monomials(mono_lcm(x, y) for x in lts_a for y in lts_b)
        return Ideal(ring, [ring.monomial(e) for e in mons]).interreduced()
    ext, order = _tagged_ring(ring)
    p = ring.field.characteristic
    polys = []
    for g in a.minimal_generators():
        polys.append({(1,) + e: c for e, c in g.terms.items()})
    for g in b.minimal_generators():
        h = {(0,) + e: c for e, c in g.terms.items()}
        for e, c in g.terms.items():
            h[(1,) + e] = (-c) % p if p else -c
        polys.append(h)
    gb = buchberger(polys, order, p)
    kept = [{e[1:]: c for e, c in f.items()} for f in gb if all(e[0] == 0 for e in f)]
    return Ideal(ring, [Polynomial(ring, f) for f in kept]).interreduced()


def exact_division(h: Polynomial, g: Polynomial) -> Polynomial:
    """Quotient ``h / g``; raises if ``g`` does not divide ``h``."""
    ring = h.ring
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    order = ring.order
    key = order.key
    p = ring.field.characteristic
    lt = _lead(g.terms, key)
    lc_inv = _inv(g.terms[lt], p)
    rest = dict(h.terms)
    quot: dict = {}
    gterms = list(g.terms.items())
    while rest:
        e = _lead(rest, key)
        if not mono_divides(lt, e):
            raise AlgebraError("polynomial does not divide exactly")
        c = rest[e] * lc_inv
        if p:
            c %= p
        q = tuple(x - y for x, y in zip(e, lt))
        quot[q] = c
        for ge, gc in gterms:
            ne = tuple(x + y for x, y in zip(q, ge))
            v = rest.get(ne, 0) - c * gc
            if p:
                v %= p
            if v:
                rest[ne] = v
            else:
                rest.pop(ne, None)
    return Polynomial(ring, quot)


def colon_element(a: Ideal, g: Polynomial) -> Ideal:
    """``(a : g)`` as ``(a ∩ (g)) / g``."""
    ring = a.ring
    if not g:
        raise AlgebraError("colon by the zero ideal")
    if g.is_constant():
        return a
    if a.is_monomial() and g.is_monomial():
        (ge,) = g.terms
        mons = _minimalize_monomials(
            tuple(max(x - y, 0) for x, y in zip(e, ge)) for e in a.leading_exponents())
        return Ideal(ring, [ring.monomial(e) for e in mons]).interreduced()
    inter = intersection(a, Ideal(ring, [g]))
    return Ideal(ring, [exact_division(h, g) for h in inter.generators]).interreduced()


def colon(a: Ideal, b: Ideal) -> Ideal:
    """``(a : b) = {f : f·b ⊆ a}``, intersecting the colons by each generator of b."""
    a._check(b)
    gens = [g for g in b.minimal_generators() if g]
    if not gens:
        raise AlgebraError("colon by the zero ideal")
    result = None
    for g in gens:
        q = colon_element(a, g)
        if q.is_unit():
            continue
        result = q if result is None else intersection(result, q)
    if result is None:
        return Ideal(a.ring, [a.ring.one()])
    return result


def colength(ideal: Ideal):
    return ideal.colength()


def is_mprimary(ideal: Ideal) -> bool:
    return ideal.is_mprimary()
