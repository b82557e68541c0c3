"""Runs of consecutive primes in one residue class with a bounded spread.

A run of length ``m + 1`` starts at ``p_n`` with ``x/2 < p_n <= x``; the
primes ``p_n, ..., p_{n+m}`` are consecutive in the full prime sequence, all
``a (mod q)``, and ``p_{n+m} - p_n <= y``. ``p_{n+m}`` may exceed ``x``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _backend, sieve
from .errors import BudgetExceeded, DomainError

SCHEMA_VERSION = 1
SCAN_MAX_X = 10**10
MAX_WITNESSES = 10
_BLOCK = 1 << 24


@dataclass(frozen=True)
class ClusterQuery:
    x: int
    y: float
    m: int
    q: int = 1
    a: int = 1

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("m must be >= 1")
        if self.q < 1:
            raise DomainError("q must be >= 1")
        if math.gcd(self.a, self.q) != 1:
            raise DomainError(f"(a, q) = ({self.a}, {self.q}) is not 1")
        if self.y < 1:
            raise DomainError("y must be >= 1")
        if self.x < 4:
            raise DomainError("x must be >= 4")

    @property
    def in_theorem_range(self) -> bool:
        """Whether ``1 <= y <= ln x`` and ``q <= y`` (constants aside)."""
        return self.y <= math.log(self.x) and self.q <= self.y


@dataclass(frozen=True)
class ClusterReport:
    query: ClusterQuery
    count: int
    witnesses: tuple[tuple[int, int], ...] = ()
    bound_at_C: tuple[float, float] | None = None

    def with_bound(self, C: float) -> "ClusterReport":
        q = self.query
        return ClusterReport(q, self.count, self.witnesses, (C, lower_bound(q.x, q.y, q.m, q.q, C)))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "query": asdict(self.query),
            "count": self.count,
            "bound_at_C": None if self.bound_at_C is None else {"C": self.bound_at_C[0], "bound": self.bound_at_C[1]},
            "witnesses": [{"first_prime": p, "gap": g} for p, g in self.witnesses],
            "in_theorem_range": self.query.in_theorem_range,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    CSV_FIELDS = ("schema_version", "x", "y", "m", "q", "a", "count", "C", "bound")

    def csv_row(self) -> dict:
        q = self.query
        C, bound = self.bound_at_C if self.bound_at_C else ("", "")
        return {
            "schema_version": SCHEMA_VERSION,
            "x": q.x, "y": repr(float(q.y)), "m": q.m, "q": q.q, "a": q.a,
            "count": self.count,
            "C": "" if C == "" else repr(float(C)),
            "bound": "" if bound == "" else repr(float(bound)),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClusterReport":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise DomainError(f"unsupported schema version {data.get('schema_version')}")
        b = data.get("bound_at_C")
        return cls(
            ClusterQuery(**data["query"]),
            int(data["count"]),
            tuple((w["first_prime"], w["gap"]) for w in data["witnesses"]),
            None if b is None else (b["C"], b["bound"]),
        )


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=ClusterReport.CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()


# -- scanning ---------------------------------------------------------------------

def _primes_from(start: int, need: int) -> np.ndarray:
    """The first ``need`` primes ``>= start``."""
    out: list[np.ndarray] = []
    got = 0
    width = max(1024, int(need * max(2.0, math.log(max(start, 3)))) * 2)
    lo = start
    while got < need:
        chunk = sieve.primes_in(lo, lo + width)
        out.append(chunk)
        got += len(chunk)
        lo += width
        width *= 2
    return np.concatenate(out)[:need]


def _scan_block(lo: int, hi: int, query: ClusterQuery, start_lo: int, start_hi: int, max_gap: int):
    """Count runs whose first prime lies in ``[lo, hi)``."""
    primes = sieve.primes_in(lo, hi)
    tail = _primes_from(hi, query.m)
    arr = np.ascontiguousarray(np.concatenate((primes, tail)))
    return _backend.kernels().count_runs(
        arr, query.m, query.q, query.a, max_gap, start_lo, start_hi, MAX_WITNESSES
    )


def scan(query: ClusterQuery, block: int | None = None, threads: int | None = None) -> ClusterReport:
    """Count runs starting in ``(x/2, x]``; see the module docstring."""
    if query.x > SCAN_MAX_X:
        raise BudgetExceeded(f"scan is limited to x <= {SCAN_MAX_X}")
    x = query.x
    start_lo = x // 2  # p > x/2  <=>  p > floor(x/2) for integer p
    # integer gaps: gap <= y  <=>  gap <= floor(y)
    max_gap = int(min(math.floor(query.y), 2**62))
    size = block or _BLOCK
    spans = [(s, min(s + size, x + 1)) for s in range(start_lo + 1, x + 1, size)]
    workers = threads or sieve._settings["threads"]
    task = lambda b: _scan_block(b[0], b[1], query, start_lo, x, max_gap)
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, spans))
    else:
        results = [task(b) for b in spans]
    count = sum(r[0] for r in results)
    witnesses = [w for r in results for w in r[1]][:MAX_WITNESSES]
    return ClusterReport(query, count, tuple(witnesses))


def corollary_scan(x: int, y: float, m: int) -> ClusterReport:
    """Scan with ``q = 1, a = 1``: no congruence constraint."""
    return scan(ClusterQuery(x, y, m, 1, 1))


# -- the lower bound ---------------------------------------------------------------

def bound_base(x, y, q) -> float:
    return y / (2.0 * q * math.log(x))


def lower_bound(x, y, m, q, C) -> float:
    """``pi(x) * (y / (2 q ln x)) ** exp(C m)``."""
    return sieve.pi(x) * bound_base(x, y, q) ** math.exp(C * m)


UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class CalibrationResult:
    grid: tuple[ClusterQuery, ...]
    C_min: float | str
    ratios: tuple[float, ...]
    flagged: tuple[int, ...] = ()
    tolerance: float = 1e-3
    notes: tuple[str, ...] = field(default=())


def _satisfied(count: int, pi_x: int, base: float, m: int, C: float) -> bool:
    # count >= pi_x * base ** exp(C m), compared in logs
    if pi_x == 0:
        return True
    if count <= 0:
        return False
    return math.log(count) >= math.log(pi_x) + math.exp(C * m) * math.log(base)


def calibrate_C(reports, tol: float = 1e-3, c_max: float = 64.0) -> CalibrationResult:
    """Smallest ``C >= 0`` (to ``tol``) with ``count >= lower_bound`` at every grid point.

    Points whose base ``y/(2 q ln x)`` is at least 1 are flagged and left
    out: there the bound does not shrink with ``C``. ``C_min`` is
    ``"unbounded"`` when some point has ``count = 0`` (no finite ``C`` works)
    or when no ``C <= c_max`` suffices.
    """
    reports = list(reports)
    if not reports:
        raise DomainError("empty calibration grid")
    grid = tuple(r.query for r in reports)
    points = []
    flagged = []
    notes = []
    for i, r in enumerate(reports):
        q = r.query
        base = bound_base(q.x, q.y, q.q)
        if base >= 1:
            flagged.append(i)
            notes.append(f"point {i}: base {base:.6g} >= 1, excluded")
            continue
        points.append((r.count, sieve.pi(q.x), base, q.m))

    def ok(C: float) -> bool:
        return all(_satisfied(c, p, b, m, C) for c, p, b, m in points)

    if any(c <= 0 and p > 0 for c, p, _, _ in points):
        c_min: float | str = UNBOUNDED
    elif ok(0.0):
        c_min = 0.0
    elif not ok(c_max):
        c_min = UNBOUNDED
    else:
        lo, hi = 0.0, c_max
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if ok(mid):
                hi = mid
            else:
                lo = mid
        c_min = hi
    ratios = []
    for r in reports:
        q = r.query
        if isinstance(c_min, str):
            ratios.append(math.nan)
        else:
            b = lower_bound(q.x, q.y, q.m, q.q, c_min)
            ratios.append(r.count / b if b > 0 else math.inf)
    return CalibrationResult(grid, c_min, tuple(ratios), tuple(flagged), tol, tuple(notes))


# -- preparatory inequalities ------------------------------------------------------

def _f_sqrt(t: float) -> float:
    return math.sqrt(t) - 2.0 * math.log(t)


def _f_half(x: float) -> float:
    return x / 2.0 - math.log(2.0 * x)


@dataclass(frozen=True)
class PrepRow:
    t: float
    margins: tuple[float, float, float, float]

    @property
    def holds(self) -> bool:
        return all(m >= 0 for m in self.margins)


@dataclass(frozen=True)
class PrepReport:
    rows: tuple[PrepRow, ...]
    anchor_sqrt_100: float
    anchor_half_4_5: float

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.rows) and self.anchor_sqrt_100 > 0 and self.anchor_half_4_5 > 0


def preparatory_checks(t_grid) -> PrepReport:
    """Margins of the four inequalities used to set ``y = ln(t / (2 ln t))``.

    For each ``t >= 100``: ``sqrt t - 2 ln t``, ``ln(t/(2 ln t)) - ln(t)/2``,
    ``lnln(t/(2 ln t)) - lnln(t)/2`` and ``1/2 - ln(2 ln t)/ln t``; all are
    non-negative when the inequalities hold. Anchors are
    ``sqrt(100) - 2 ln 100`` and ``4.5/2 - ln 9``.
    """
    rows = []
    for t in t_grid:
        t = float(t)
        if t < 100:
            raise DomainError(f"t must be >= 100, got {t}")
        lt = math.log(t)
        w = math.log(t / (2.0 * lt))
        rows.append(
            PrepRow(
                t,
                (
                    _f_sqrt(t),
                    w - lt / 2.0,
                    math.log(w) - math.log(lt) / 2.0,
                    0.5 - math.log(2.0 * lt) / lt,
                ),
            )
        )
    return PrepReport(tuple(rows), _f_sqrt(100.0), _f_half(4.5))
