"""Integer polynomials in z as coefficient lists, lowest degree first."""
from __future__ import annotations

from math import comb
from typing import Sequence

ZPoly = list  # list[int]


def trim(a: Sequence[int]) -> ZPoly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def add(a: Sequence[int], b: Sequence[int]) -> ZPoly:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def sub(a: Sequence[int], b: Sequence[int]) -> ZPoly:
    return add(a, [-c for c in b])


def mul(a: Sequence[int], b: Sequence[int]) -> ZPoly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def one_minus_z_pow(k: int) -> ZPoly:
    return [(-1) ** i * comb(k, i) for i in range(k + 1)]


def evaluate(a: Sequence[int], z: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = acc * z + c
    return acc


def taylor_at_one(a: Sequence[int], i: int) -> int:
    """``a^{(i)}(1) / i!`` computed exactly as ``sum_j C(j, i) a_j``."""
    return sum(comb(j, i) * c for j, c in enumerate(a) if j >= i)


def to_str(a: Sequence[int], var: str = "z") -> str:
    a = trim(a)
    if not a:
        return "0"
    parts = []
    for j, c in enumerate(a):
        if c == 0:
            continue
        mono = "" if j == 0 else (var if j == 1 else f"{var}^{j}")
        mag = abs(c)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}{mono}")
        parts.append(("-" if c < 0 else "+", body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s
