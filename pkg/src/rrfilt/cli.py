"""Command-line front end: ``rrfilt analyze <file> ...``.

The input file holds ``key: value`` lines; ``ring`` and ``ideal`` are
required, and the optional keys ``checks``, ``max-n``, ``max-power``,
``window``, ``trials``, ``seed`` and ``assume-integrally-closed`` are
overridden by the matching command-line options.  ``#`` starts a comment.

The report is a single JSON document.  Exit status: 0 when every verdict is
PASS or INAPPLICABLE, 1 when any is FAIL, 2 when none fails but some analysis
is UNDETERMINED, 3 for unreadable input.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .algebra import AlgebraError, ExponentOverflow, ParseError, RingContext, poly_canonical, split_top_level
from .errors import NotMPrimary, RRFiltError
from .filtration import FiltrationCache, Params, b_polynomial, r_polynomial
from .graded import depth_assoc_graded, xi_estimate
from .groebner import INFINITE, Ideal
from .hilbert import h_polynomial, hilbert_samuel, rr_hilbert, verify_superficial_identity
from .reductions import minimal_reduction
from .theorems import CHECKS, FAIL, UNDETERMINED

SCHEMA_VERSION = "1.0"
CACHE_ENV = "RRFILT_CACHE_DIR"

ANALYSES = ("hilbert", "rr", "reduction", "superficial", "depth", "xi")
ALL_CHECKS = ANALYSES + tuple(CHECKS)

# failures that end one analysis but not the run
_SOFT_ERRORS = (RRFiltError, ArithmeticError, MemoryError, RecursionError)


class InputError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass
class AnalysisRequest:
    ring: RingContext
    generators: list
    ring_text: str
    checks: list = field(default_factory=lambda: list(ALL_CHECKS))
    max_n: int = 10
    max_power: int = 6
    window: int = 2
    trials: int = 5
    seed: int = 0
    assume_integrally_closed: bool = False
    json_path: str | None = None

    def params(self) -> Params:
        return Params(max_n=self.max_n, trials=self.trials, seed=self.seed)

    def echo(self) -> dict:
        return {
            "ring": self.ring_text,
            "ideal": [str(g) for g in self.generators],
            "checks": list(self.checks),
            "parameters": {
                "max_n": self.max_n,
                "max_power": self.max_power,
                "window": self.window,
                "trials": self.trials,
                "seed": self.seed,
                "assume_integrally_closed": self.assume_integrally_closed,
            },
        }


_INT_KEYS = {"max-n": "max_n", "max-power": "max_power", "window": "window",
             "trials": "trials", "seed": "seed"}


def parse_checks(text: str, line: int | None = None, column: int | None = None) -> list[str]:
    names = [c.strip() for c in text.split(",") if c.strip()]
    for name in names:
        if name not in ALL_CHECKS:
            raise InputError(f"unknown check {name!r}; known: {', '.join(ALL_CHECKS)}", line, column)
    return names


def _ring_text(ring: RingContext) -> str:
    return f"{ring.field}[{','.join(ring.variables)}]"


def parse_input(text: str) -> AnalysisRequest:
    """Parse an analysis file; raises InputError with line/column positions."""
    fields: dict[str, tuple[str, int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if ":" not in body:
            raise InputError("expected 'key: value'", lineno, len(body) - len(body.lstrip()) + 1)
        key, value = body.split(":", 1)
        key = key.strip().lower().replace("_", "-")
        col = len(body) - len(value) + 1  # 1-based column where the value starts
        if key in fields:
            raise InputError(f"duplicate key {key!r}", lineno, 1)
        if key not in ("ring", "ideal", "checks", "assume-integrally-closed") and key not in _INT_KEYS:
            raise InputError(f"unknown key {key!r}", lineno, 1)
        fields[key] = (value, lineno, col)
    for required in ("ring", "ideal"):
        if required not in fields:
            raise InputError(f"missing '{required}:' line")
    value, lineno, col = fields["ring"]
    try:
        ring = RingContext.parse(value)
    except AlgebraError as exc:
        raise InputError(str(exc), lineno, col) from None
    value, lineno, col = fields["ideal"]
    gens = []
    for piece, off in split_top_level(value):
        try:
            gens.append(poly_canonical(ring, piece, lineno, col - 1 + off))
        except ParseError as exc:
            raise InputError(str(exc).rsplit(" (line", 1)[0], lineno, exc.column) from None
        except ExponentOverflow as exc:
            raise InputError(str(exc), lineno, col + off) from None
    req = AnalysisRequest(ring, gens, _ring_text(ring))
    if "checks" in fields:
        v, ln, c = fields["checks"]
        req.checks = parse_checks(v, ln, c)
    for key, attr in _INT_KEYS.items():
        if key in fields:
            v, ln, c = fields[key]
            try:
                setattr(req, attr, int(v.strip()))
            except ValueError:
                raise InputError(f"{key} must be an integer", ln, c) from None
    if "assume-integrally-closed" in fields:
        v, ln, c = fields["assume-integrally-closed"]
        flag = v.strip().lower()
        if flag not in ("true", "false", "yes", "no", "1", "0"):
            raise InputError("assume-integrally-closed must be true or false", ln, c)
        req.assume_integrally_closed = flag in ("true", "yes", "1")
    check_m_primary(req.ring, req.generators, fields["ideal"][1])
    return req


def check_m_primary(ring: RingContext, gens, line: int | None = None):
    ideal = Ideal(ring, gens)
    if ideal.colength() != INFINITE:
        return
    have = set()
    for e in ideal.leading_exponents():
        nz = [i for i, v in enumerate(e) if v]
        if len(nz) == 1:
            have.add(nz[0])
    missing = [v for i, v in enumerate(ring.variables) if i not in have]
    raise InputError("ideal is not primary to the maximal ideal: no power of "
                     f"{', '.join(missing)} lies in it", line)


# ---------------------------------------------------------------------------
# on-disk cache: reduced Gröbner bases of I^n and of the closures, as text


class DiskCache:
    def __init__(self, root: str | os.PathLike, request: AnalysisRequest, ideal: Ideal):
        self.root = Path(root)
        key = json.dumps({
            "ring": request.ring_text,
            "gb": [str(g) for g in ideal.groebner_basis()],
            "params": request.echo()["parameters"],
        }, sort_keys=True)
        self.path = self.root / (hashlib.sha256(key.encode()).hexdigest()[:32] + ".json")

    def load(self, cache: FiltrationCache) -> bool:
        try:
            data = json.loads(self.path.read_text())
        except (OSError, ValueError):
            return False
        ring = cache.ring
        try:
            for n, gens in data.get("powers", {}).items():
                ideal = Ideal.from_raw(ring, [ring.poly(g).terms for g in gens], is_gb=True)
                cache._pre.setdefault(int(n), ideal)
                cache.base._powers.setdefault(int(n), ideal)
            for n, gens in data.get("closures", {}).items():
                ideal = Ideal.from_raw(ring, [ring.poly(g).terms for g in gens], is_gb=True)
                cache._closures.setdefault(int(n), ideal)
        except (AlgebraError, ValueError):
            return False  # a damaged cache file is ignored and rewritten
        return True

    def save(self, cache: FiltrationCache):
        data = {
            "schema_version": SCHEMA_VERSION,
            "ring": _ring_text(cache.ring),
            "powers": {str(n): [str(g) for g in I.groebner_basis()]
                       for n, I in sorted(cache._pre.items())},
            "closures": {str(n): [str(g) for g in C.groebner_basis()]
                         for n, C in sorted(cache._closures.items())},
        }
        self.root.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(data, fh, indent=1)
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


# ---------------------------------------------------------------------------
# orchestration


def _error_entry(exc: BaseException) -> dict:
    partial = getattr(exc, "partial", {})
    return {"status": UNDETERMINED, "error": {"type": type(exc).__name__, "message": str(exc),
                                              "partial": _plain(partial)}}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def _analysis(name: str, cache: FiltrationCache, req: AnalysisRequest) -> dict:
    if name == "hilbert":
        rep = h_polynomial(cache)
        return dict(rep.to_json(), hs_values=hilbert_samuel(cache, len(rep.hs_values) - 1))
    if name == "rr":
        rep = rr_hilbert(cache)
        bound = cache.stabilization_bound()
        closures = [{"n": n, "colength": cache.closure(n).colength(), "power_colength": cache.length(n)}
                    for n in range(1, bound + 1)]
        wit = next((c["n"] for c in closures if c["colength"] != c["power_colength"]), None)
        out = rep.to_json()
        out.update({"stabilization_bound": bound, "closures": closures,
                    "r_poly": r_polynomial(cache), "first_unclosed_power": wit,
                    "witness": None if wit is None else str(cache.closure_witness(wit))})
        return out
    if name == "reduction":
        return minimal_reduction(cache).to_json()
    if name == "superficial":
        ident = verify_superficial_identity(cache)
        cert = cache.superficial()
        return {"certificate": cert.to_json(), "b_poly": b_polynomial(cache, cert),
                "identity": ident.to_json()}
    if name == "depth":
        return depth_assoc_graded(cache).to_json()
    if name == "xi":
        return xi_estimate(cache, req.max_power, req.window).to_json()
    raise KeyError(name)


def _verdict(name: str, cache: FiltrationCache, req: AnalysisRequest) -> dict:
    fn = CHECKS[name]
    if name == "e2":
        v = fn(cache, assume_integrally_closed=req.assume_integrally_closed)
    elif name == "xidescent":
        v = fn(cache, max_power=req.max_power, window=req.window)
    else:
        v = fn(cache)
    return v.to_json()


def run_report(req: AnalysisRequest, cache_dir: str | None = None) -> tuple[dict, int]:
    """Run the requested analyses; returns the JSON document and the exit code."""
    ideal = Ideal(req.ring, req.generators)
    doc: dict = {"schema_version": SCHEMA_VERSION, "tool_version": __version__,
                 "request": req.echo()}
    analyses: dict = {}
    verdicts: dict = {}
    try:
        cache = FiltrationCache(ideal, params=req.params())
    except NotMPrimary as exc:
        doc.update(_error_entry(exc))
        return doc, 2
    disk = DiskCache(cache_dir, req, ideal) if cache_dir else None
    if disk is not None:
        disk.load(cache)
    for name in req.checks:
        if name in CHECKS:
            try:
                verdicts[name] = _verdict(name, cache, req)
            except _SOFT_ERRORS as exc:
                verdicts[name] = dict(name=name, conclusion=UNDETERMINED, **_error_entry(exc))
        else:
            try:
                analyses[name] = {"status": "OK", "report": _analysis(name, cache, req)}
            except _SOFT_ERRORS as exc:
                analyses[name] = _error_entry(exc)
    provenance: dict = {"seed": req.seed, "params": _plain(vars(req.params())), "dim": cache.dim}
    if cache.dim >= 1 and req.checks:
        try:
            provenance["stabilization_bound"] = cache.stabilization_bound()
            provenance["superficial"] = cache.superficial().to_json()
        except _SOFT_ERRORS as exc:
            provenance["stabilization_bound"] = None
            provenance["stabilization_error"] = str(exc)
    doc["provenance"] = provenance
    doc["analyses"] = analyses
    doc["verdicts"] = verdicts
    conclusions = [v["conclusion"] for v in verdicts.values()]
    undetermined = UNDETERMINED in conclusions or any(a.get("status") == UNDETERMINED
                                                       for a in analyses.values())
    if FAIL in conclusions:
        code = 1
    elif undetermined:
        code = 2
    else:
        code = 0
    doc["summary"] = {
        "verdicts": {k: v["conclusion"] for k, v in verdicts.items()},
        "analyses": {k: a.get("status") for k, a in analyses.items()},
        "exit_code": code,
    }
    if disk is not None:
        try:
            disk.save(cache)
        except OSError as exc:
            print(f"rrfilt: cache not written: {exc}", file=sys.stderr)
    return doc, code


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def summary_lines(doc: dict) -> list[str]:
    req = doc["request"]
    lines = [f"ring {req['ring']}, ideal ({', '.join(req['ideal'])})"]
    an = doc.get("analyses", {})
    if an.get("hilbert", {}).get("status") == "OK":
        h = an["hilbert"]["report"]
        lines.append(f"h(z) = {h['h_poly_text']}; e = {h['e']}")
    for key, field_name in (("reduction", "red"), ("depth", "depth"), ("xi", "value")):
        a = an.get(key)
        if a and a.get("status") == "OK":
            val = a["report"].get(field_name)
            lines.append(f"{key}: {val}")
        elif a:
            lines.append(f"{key}: {a['status']} ({a['error']['message']})")
    for name, verdict in doc.get("verdicts", {}).items():
        lines.append(f"{name}: {verdict['conclusion']}")
    lines.append(f"exit code {doc.get('summary', {}).get('exit_code')}")
    return lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rrfilt", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"rrfilt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    an = sub.add_parser("analyze", help="analyze the ideal described in a file")
    an.add_argument("file", help="input file, or - for standard input")
    an.add_argument("--checks", help=f"comma-separated subset of: {', '.join(ALL_CHECKS)}")
    an.add_argument("--max-power", type=int, help="largest power used for the ξ estimate (default 6)")
    an.add_argument("--max-n", type=int, help="largest degree used for Hilbert data (default 10)")
    an.add_argument("--window", type=int, help="stability window of the ξ estimate (default 2)")
    an.add_argument("--trials", type=int, help="random trials per search (default 5)")
    an.add_argument("--seed", type=int, help="seed for every random draw (default 0)")
    an.add_argument("--assume-integrally-closed", action="store_true", default=None,
                    help="assert that I is integrally closed (not verified)")
    an.add_argument("--json", metavar="PATH", help="write the JSON report here and print a summary")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text()
    except OSError as exc:
        print(f"rrfilt: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return 3
    try:
        req = parse_input(text)
        if args.checks is not None:
            req.checks = parse_checks(args.checks)
    except InputError as exc:
        print(f"rrfilt: {args.file}: {exc}", file=sys.stderr)
        return 3
    for attr in ("max_n", "max_power", "window", "trials", "seed", "assume_integrally_closed"):
        val = getattr(args, attr)
        if val is not None:
            setattr(req, attr, val)
    for attr in ("max_n", "max_power", "window", "trials"):
        if getattr(req, attr) < 1:
            print(f"rrfilt: --{attr.replace('_', '-')} must be positive", file=sys.stderr)
            return 3
    req.json_path = args.json
    doc, code = run_report(req, os.environ.get(CACHE_ENV) or None)
    text = dumps(doc)
    if args.json:
        tmp = f"{args.json}.tmp{os.getpid()}"
        with open(tmp, "w") as fh:
            fh.write(text)
        os.replace(tmp, args.json)
        print("\n".join(summary_lines(doc)))
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
