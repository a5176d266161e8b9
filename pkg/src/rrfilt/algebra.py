"""Exact coefficient fields, monomial orders and sparse multivariate polynomials."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

import gmpy2
from gmpy2 import mpq

Exponent = tuple  # tuple[int, ...]

# Exponents are bounded like machine words; anything larger is a hard error.
MAX_EXPONENT = 2**31 - 1


class AlgebraError(ValueError):
    """Raised for malformed algebraic input or inconsistent rings."""


class ParseError(AlgebraError):
    def __init__(self, message: str, text: str, pos: int, line: int = 1):
        self.text = text
        self.pos = pos
        self.line = line
        self.column = pos + 1
        super().__init__(f"{message} (line {line}, column {self.column})")


class ExponentOverflow(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# Fields


@dataclass(frozen=True)
class Field:
    """Either the rationals (``characteristic == 0``) or GF(p) for an odd prime p."""

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p != 0 and (p <= 2 or not gmpy2.is_prime(p)):
            raise AlgebraError(f"prime field needs an odd prime, got {p}")

    @classmethod
    def rationals(cls) -> "Field":
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(p)

    @property
    def is_prime_field(self) -> bool:
        return self.characteristic != 0

    def __call__(self, value):
        p = self.characteristic
        if p:
            if isinstance(value, (Fraction, type(mpq()))):
                num, den = int(value.numerator), int(value.denominator)
                if den % p == 0:
                    raise ZeroDivisionError(f"denominator divisible by {p}")
                return num * pow(den, -1, p) % p
            return int(value) % p
        if isinstance(value, Fraction):
            return mpq(value.numerator, value.denominator)
        return mpq(value)

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def add(self, a, b):
        return (a + b) % self.characteristic if self.characteristic else a + b

    def sub(self, a, b):
        return (a - b) % self.characteristic if self.characteristic else a - b

    def mul(self, a, b):
        return a * b % self.characteristic if self.characteristic else a * b

    def neg(self, a):
        return -a % self.characteristic if self.characteristic else -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        p = self.characteristic
        return pow(int(a), -1, p) if p else mpq(1) / a

    def to_str(self, c) -> str:
        if self.characteristic:
            return str(int(c))
        if c.denominator == 1:
            return str(c.numerator)
        return f"{c.numerator}/{c.denominator}"

    def __str__(self) -> str:
        return f"GF({self.characteristic})" if self.characteristic else "QQ"


QQ = Field(0)


# ---------------------------------------------------------------------------
# Monomials and orders


def check_exponent(exp: Exponent) -> Exponent:
    for e in exp:
        if e > MAX_EXPONENT:
            raise ExponentOverflow(f"exponent {e} exceeds {MAX_EXPONENT}")
    return exp


def mono_mul(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Exponent, b: Exponent) -> bool:
    """True when the monomial ``a`` divides ``b``."""
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def mono_div(b: Exponent, a: Exponent) -> Exponent:
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x if x > y else y for x, y in zip(a, b))


def mono_gcd(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x if x < y else y for x, y in zip(a, b))


def mono_degree(a: Exponent) -> int:
    return sum(a)


@dataclass(frozen=True)
class MonomialOrder:
    """A multiplicative total order on monomials.

    ``kind`` is ``"degrevlex"``, ``"lex"`` or ``"elimination"``; the elimination
    order compares the first ``block`` variables by degrevlex before looking at
    the rest, so it eliminates that block.
    """

    kind: str = "degrevlex"
    block: int = 0
    _memo: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex", "elimination"):
            raise AlgebraError(f"unknown monomial order {self.kind!r}")
        if self.kind == "elimination" and self.block < 1:
            raise AlgebraError("elimination order needs a block size >= 1")

    def key(self, exp: Exponent) -> tuple:
        """Sort key: larger key means larger monomial."""
        k = self._memo.get(exp)
        if k is not None:
            return k
        if self.kind == "degrevlex":
            k = (sum(exp),) + tuple(-e for e in reversed(exp))
        elif self.kind == "lex":
            k = exp
        else:
            head, tail = exp[: self.block], exp[self.block:]
            k = ((sum(head),) + tuple(-e for e in reversed(head))
                 + (sum(tail),) + tuple(-e for e in reversed(tail)))
        self._memo[exp] = k
        return k

    def compare(self, a: Exponent, b: Exponent) -> int:
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)

    def __str__(self) -> str:
        return f"elimination({self.block})" if self.kind == "elimination" else self.kind


DEGREVLEX = MonomialOrder("degrevlex")
LEX = MonomialOrder("lex")


# ---------------------------------------------------------------------------
# Rings


_RING_RE = re.compile(r"^\s*(QQ|GF\(\s*(\d+)\s*\))\s*\[\s*([^\]]*)\]\s*$")
_VAR_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class RingContext:
    """Polynomial ring k[x_1, ..., x_d]; immutable and compared by value."""

    __slots__ = ("variables", "field", "order", "_index")

    def __init__(self, variables: Iterable[str], field: Field = QQ,
                 order: MonomialOrder = DEGREVLEX):
        variables = tuple(variables)
        if not variables:
            raise AlgebraError("a ring needs at least one variable")
        for v in variables:
            if not _VAR_RE.match(v):
                raise AlgebraError(f"invalid variable name {v!r}")
        if len(set(variables)) != len(variables):
            dup = next(v for v in variables if variables.count(v) > 1)
            raise AlgebraError(f"duplicate variable {dup!r}")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(variables)})

    def __setattr__(self, name, value):
        raise AttributeError("RingContext is immutable")

    @classmethod
    def parse(cls, text: str) -> "RingContext":
        """Parse ``QQ[x,y,z]`` or ``GF(32003)[x,y]``."""
        m = _RING_RE.match(text)
        if not m:
            raise AlgebraError(f"malformed ring {text.strip()!r}; expected QQ[x,y] or GF(p)[x,y]")
        fld = QQ if m.group(1) == "QQ" else Field(int(m.group(2)))
        names = [v.strip() for v in m.group(3).split(",")]
        if names == [""]:
            raise AlgebraError("a ring needs at least one variable")
        return cls(names, fld)

    @property
    def ngens(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlgebraError(f"unknown variable {name!r}") from None

    def _key(self):
        return (self.variables, self.field, self.order.kind, self.order.block)

    def __eq__(self, other):
        return isinstance(other, RingContext) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"{self.field}[{','.join(self.variables)}]"

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {(0,) * self.ngens: c} if c != 0 else {})

    def gen(self, name_or_index) -> "Polynomial":
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        exp = tuple(1 if j == i else 0 for j in range(self.ngens))
        return Polynomial(self, {exp: self.field(1)})

    def gens(self) -> list["Polynomial"]:
        return [self.gen(i) for i in range(self.ngens)]

    def monomial(self, exp: Exponent, coeff=1) -> "Polynomial":
        if len(exp) != self.ngens:
            raise AlgebraError("exponent length does not match the ring")
        c = self.field(coeff)
        return Polynomial(self, {tuple(exp): c} if c != 0 else {})

    def poly(self, text: str) -> "Polynomial":
        return poly_canonical(self, text)

    def with_variables(self, variables: Iterable[str],
                       order: MonomialOrder | None = None) -> "RingContext":
        return RingContext(variables, self.field, order or self.order)


# ---------------------------------------------------------------------------
# Polynomials


Scalar = Union[int, Fraction]


class Polynomial:
    """Immutable sparse polynomial: a map exponent tuple -> nonzero coefficient."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: RingContext, terms: Mapping[Exponent, object]):
        self.ring = ring
        self.terms = terms  # treated as read-only
        self._hash = None

    # -- construction helpers
    def _new(self, terms) -> "Polynomial":
        return Polynomial(self.ring, terms)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise AlgebraError("polynomials live in different rings")
            return other
        if isinstance(other, (int, Fraction)) or type(other) is type(mpq()):
            return self.ring.constant(other)
        return NotImplemented

    # -- queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def leading_exponent(self, order: MonomialOrder | None = None) -> Exponent:
        if not self.terms:
            raise AlgebraError("zero polynomial has no leading term")
        return max(self.terms, key=(order or self.ring.order).key)

    def leading_coefficient(self, order: MonomialOrder | None = None):
        return self.terms[self.leading_exponent(order)]

    def monic(self, order: MonomialOrder | None = None) -> "Polynomial":
        if not self.terms:
            return self
        fld = self.ring.field
        inv = fld.inv(self.leading_coefficient(order))
        return self._new({e: fld.mul(c, inv) for e, c in self.terms.items()})

    def sorted_terms(self, order: MonomialOrder | None = None) -> list:
        key = (order or self.ring.order).key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    # -- arithmetic
    def __neg__(self):
        neg = self.ring.field.neg
        return self._new({e: neg(c) for e, c in self.terms.items()})

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._new(_add_terms(self.terms, other.terms, self.ring.field.characteristic, 1))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._new(_add_terms(self.terms, other.terms, self.ring.field.characteristic, -1))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._new(_mul_terms(self.terms, other.terms, self.ring.field.characteristic))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise AlgebraError("polynomial powers need a natural exponent")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "Polynomial":
        fld = self.ring.field
        c = fld(c)
        if c == 0:
            return self.ring.zero()
        return self._new({e: fld.mul(v, c) for e, v in self.terms.items()})

    def mul_monomial(self, exp: Exponent, c=1) -> "Polynomial":
        fld = self.ring.field
        c = fld(c)
        return self._new({mono_mul(e, exp): fld.mul(v, c) for e, v in self.terms.items()})

    # -- identity
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.constant(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def to_str(self, order: MonomialOrder | None = None) -> str:
        if not self.terms:
            return "0"
        fld = self.ring.field
        names = self.ring.variables
        p = fld.characteristic
        parts = []
        for exp, c in self.sorted_terms(order):
            negative = False
            if not p and c < 0:
                negative, c = True, -c
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, exp) if e
            )
            cs = fld.to_str(c)
            if not mono:
                body = cs
            elif cs == "1":
                body = mono
            else:
                body = f"{cs}*{mono}"
            parts.append(("- " if negative else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Polynomial({self.to_str()!r})"


def _add_terms(a: Mapping, b: Mapping, p: int, sign: int) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        v = (c if sign > 0 else -c) if v is None else (v + c if sign > 0 else v - c)
        if p:
            v %= p
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _mul_terms(a: Mapping, b: Mapping, p: int) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    for eb, cb in b.items():
        for ea, ca in a.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = get(e, 0) + ca * cb
    if p:
        out = {e: c % p for e, c in out.items()}
    return {e: c for e, c in out.items() if c}


# ---------------------------------------------------------------------------
# Parsing
#
# expr   := ['+'|'-'] term (('+'|'-') term)*
# term   := factor ('*' factor)*
# factor := atom ('^' natural)?
# atom   := natural ['/' natural] | variable | '(' expr ')'


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class _Parser:
    def __init__(self, ring: RingContext, text: str, line: int = 1, offset: int = 0):
        self.ring = ring
        self.text = text
        self.line = line
        self.offset = offset
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:  # only trailing whitespace is left
                break
            if m.group(1):
                self.tokens.append(("num", m.group(1), m.start(1)))
            elif m.group(2):
                self.tokens.append(("var", m.group(2), m.start(2)))
            elif m.group(3):
                self.tokens.append(("op", m.group(3), m.start(3)))
            pos = m.end()
        self.i = 0

    def error(self, msg: str, pos: int | None = None):
        if pos is None:
            pos = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        raise ParseError(msg, self.text, pos + self.offset, self.line)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if not self.tokens:
            self.error("empty polynomial")
        result = self.expr()
        if self.i < len(self.tokens):
            self.error(f"unexpected {self.tokens[self.i][1]!r}")
        return result

    def expr(self) -> Polynomial:
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                acc = acc + t if val == "+" else acc - t
            else:
                return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> Polynomial:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                self.error("exponent must be a natural number", pos)
            n = int(val)
            if n > MAX_EXPONENT:
                raise ExponentOverflow(f"exponent {n} exceeds {MAX_EXPONENT}")
            return base ** n
        return base

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind is None:
            self.error("unexpected end of input", pos)
        if kind == "num":
            k2, v2, p2 = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                k3, v3, p3 = self.take()
                if k3 != "num":
                    self.error("division is only allowed between integer literals", p2)
                if int(v3) == 0:
                    self.error("division by zero", p3)
                return self.ring.constant(Fraction(int(val), int(v3)))
            return self.ring.constant(int(val))
        if kind == "var":
            if val not in self.ring._index:
                self.error(f"unknown variable {val!r}", pos)
            return self.ring.gen(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            k2, v2, p2 = self.take()
            if v2 != ")":
                self.error("expected ')'", p2)
            return inner
        if kind == "op" and val == "/":
            self.error("division is only allowed between integer literals", pos)
        self.error(f"unexpected {val!r}", pos)


def poly_canonical(ring: RingContext, text: str, line: int = 1, offset: int = 0) -> Polynomial:
    """Parse ``text`` into canonical sparse form over ``ring``."""
    return _Parser(ring, text, line, offset).parse()


def split_top_level(text: str, sep: str = ",") -> list[tuple[str, int]]:
    """Split on ``sep`` outside parentheses; returns (piece, start offset) pairs."""
    pieces, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            pieces.append((text[start:i], start))
            start = i + 1
    pieces.append((text[start:], start))
    return pieces
