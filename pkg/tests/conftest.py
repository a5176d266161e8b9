import pytest

from rrfilt.algebra import RingContext
from rrfilt.algebra import split_top_level
from rrfilt.groebner import Ideal

M4_ROOT = ("QQ[x,y,z]", "x^2 - y^2, y^2 - z^2, x*y, x*z, y*z")
NONCLOSED2 = ("QQ[x,y]", "x^7, x^6*y, x*y^6, y^7")
RED2_DIM3 = ("QQ[x,y,z]", "x^3, y^3, z^3, x^2*y, x*y^2, y*z^2, x*y*z")
XI_DROP = ("QQ[x,y,X]", "x^7, x^6*y, x*y^6, y^7, X")


def make_ideal(ring_text: str, gens_text: str) -> Ideal:
    R = RingContext.parse(ring_text)
    return Ideal(R, [R.poly(piece) for piece, _ in split_top_level(gens_text)])


@pytest.fixture
def ideal():
    return make_ideal


def random_monomial_ideal(rng, max_deg: int = 6, max_gens: int = 5) -> Ideal:
    """An m-primary monomial ideal of QQ[x,y] with generators of degree <= max_deg."""
    R = RingContext.parse("QQ[x,y]")
    a, b = rng.randint(1, max_deg), rng.randint(1, max_deg)
    exps = {(a, 0), (0, b)}
    for _ in range(rng.randint(0, max_gens - 2)):
        i = rng.randint(1, max_deg - 1)
        j = rng.randint(1, max_deg - i)
        exps.add((i, j))
    return Ideal(R, [R.monomial(e) for e in sorted(exps)])


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_line():
    """Record one pass/fail line; all lines are printed in the terminal summary."""
    def record(label: str, ok: bool, detail: str = ""):
        line = f"{label}: {'PASS' if ok else 'FAIL'}"
        ACCEPTANCE_LINES.append(line + (f"  ({detail})" if detail else ""))
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
