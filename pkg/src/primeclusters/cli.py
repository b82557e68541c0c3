"""``primeclusters`` command-line front end.

Every subcommand prints one envelope: a JSON object with ``command``,
``parameters`` (all effective values, defaults included), ``results`` and
``deviations``; or, with ``--format csv``, a header row and data rows.
Exit status is 0 on success, 2 on bad input and 3 when a work budget
refuses the request.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import admissible, arith, characters, clusters, sieve
from .errors import BudgetExceeded, DomainError


# -- output -----------------------------------------------------------------------

def _float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    s = format(v, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _plain(obj):
    """Normalize numpy scalars, fractions, complex and tuples for dumping."""
    if hasattr(obj, "item") and not isinstance(obj, (list, dict, str)):
        obj = obj.item()
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    obj = _plain(obj)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, list):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {dumps(v)}" for k, v in obj.items()) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    v = _plain(v)
    if isinstance(v, float):
        return _float(v)
    if isinstance(v, (list, dict)):
        return dumps(v)
    return "" if v is None else str(v)


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    fields = list(rows[0])
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for r in rows:
        writer.writerow([_cell(r.get(f)) for f in fields])
    return buf.getvalue()


class Outcome:
    """What a handler hands back: results, optional CSV rows and deviation notes."""

    def __init__(self, results, rows=None, deviations=()):
        self.results = results
        self.rows = rows
        self.deviations = list(deviations)

    def csv_rows(self) -> list[dict]:
        if self.rows is not None:
            return self.rows
        if isinstance(self.results, dict):
            return [{k: v for k, v in self.results.items() if not isinstance(v, (list, tuple, dict))}]
        return [{"value": self.results}]


# -- helpers -----------------------------------------------------------------------

def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int(text: str) -> int:
    """Integers, also written as ``1e9`` or ``10**9``."""
    try:
        if "**" in text:
            b, e = text.split("**")
            return int(b) ** int(e)
        if "e" in text.lower():
            v = float(text)
            if v != int(v):
                raise ValueError
            return int(v)
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")


def _char(q: int, index: int) -> characters.DirichletCharacter:
    chars = characters.enumerate_characters(q)
    if not 0 <= index < len(chars):
        raise DomainError(f"index must lie in [0, {len(chars)}) for q = {q}")
    return chars[index]


def _turn_text(t: Fraction | None) -> str:
    return "zero" if t is None else f"{t.numerator}/{t.denominator}"


# -- handlers ----------------------------------------------------------------------

def cmd_factor(a):
    f = arith.factorize(a.n)
    return Outcome(
        {"n": a.n, "factors": [[p, e] for p, e in f.parts]},
        rows=[{"prime": p, "exponent": e} for p, e in f.parts],
    )


def cmd_phi(a):
    return Outcome({"n": a.n, "phi": arith.phi(a.n)})


def cmd_mu(a):
    return Outcome({"n": a.n, "mu": arith.mu(a.n)})


def cmd_sieve(a):
    primes = sieve.primes_in(a.lo, a.hi)
    res = {"count": len(primes)}
    if a.list:
        res["primes"] = primes.tolist()
    rows = [{"prime": int(p)} for p in primes] if a.list else None
    return Outcome(res, rows=rows)


def cmd_pi(a):
    if a.q is None:
        return Outcome({"x": a.x, "pi": sieve.pi(a.x)})
    return Outcome({"x": a.x, "q": a.q, "a": a.a, "pi": sieve.pi_ap(a.x, a.q, a.a)})


def cmd_psi(a):
    if a.q is None:
        return Outcome({"x": a.x, "psi": sieve.psi(a.x), "theta": sieve.theta(a.x)})
    return Outcome({"x": a.x, "q": a.q, "a": a.a, "psi": sieve.psi_ap(a.x, a.q, a.a)})


def cmd_li(a):
    return Outcome({"x": a.x, "li": sieve.li(a.x)})


def cmd_rough(a):
    return Outcome({"x": a.x, "z": a.z, "phi_rough": sieve.phi_rough(a.x, a.z)})


def cmd_char(a):
    chi = _char(a.q, a.index)
    if a.n is not None:
        v = characters.eval_char(chi, a.n)
        return Outcome({"q": a.q, "index": a.index, "n": a.n, "value": str(v),
                        "turn": _turn_text(v.turn)})
    table = [{"n": n, "turn": _turn_text(chi.turn(n))} for n in range(a.q)]
    return Outcome(
        {"q": a.q, "index": a.index, "exponents": list(chi.exponents),
         "generators": list(chi.group.generators), "orders": list(chi.group.orders),
         "real": characters.is_real(chi), "principal": characters.is_principal(chi),
         "values": [r["turn"] for r in table]},
        rows=table,
    )


def cmd_conductor(a):
    chi = _char(a.q, a.index)
    c = characters.conductor(chi)
    return Outcome({"q": a.q, "index": a.index, "conductor": c, "primitive": c == a.q})


def cmd_induce(a):
    chi = _char(a.q, a.index)
    c, chi1 = characters.induce_primitive(chi)
    lifted = characters.lift(chi1, a.q)
    return Outcome({
        "q": a.q, "index": a.index, "conductor": c,
        "primitive_exponents": list(chi1.exponents),
        "primitive_values": [_turn_text(chi1.turn(n)) for n in range(c)],
        "values_match": characters.same_values(lifted, chi),
    })


def cmd_decompose(a):
    chi = _char(a.q, a.index)
    parts = characters.decompose(chi)
    rows = [{"modulus": p.modulus, "exponents": list(p.exponents),
             "conductor": characters.conductor(p)} for p in parts]
    return Outcome({"q": a.q, "index": a.index, "components": rows}, rows=rows)


def cmd_psi_chi(a):
    chi = _char(a.q, a.index)
    return Outcome({
        "u": a.u, "q": a.q, "index": a.index,
        "psi": characters.psi_chi(a.u, chi),
        "psi_prime": characters.psi_prime_chi(a.u, chi),
    })


def cmd_ortho_check(a):
    ns = [a.n] if a.n is not None else list(range(a.q))
    ph = arith.phi(a.q)
    rows = []
    for n in ns:
        s = characters.orthogonality_sum(a.q, a.w, n)
        expected = ph if math.gcd(n, a.q) == 1 and (n - a.w) % a.q == 0 else 0
        rows.append({"n": n, "sum": s, "expected": expected, "ok": s == expected})
    return Outcome({"q": a.q, "w": a.w, "checks": rows, "all_ok": all(r["ok"] for r in rows)}, rows=rows)


def cmd_admissible(a):
    ls = admissible.LinearSet(a.q, a.a, a.b)
    d = admissible.is_admissible_definition(ls)
    c = admissible.is_admissible_criterion(ls)
    return Outcome({"set": ls.to_line(), "definition": d, "criterion": c, "agree": d == c})


def cmd_omega(a):
    om = admissible.omega_set(a.N, a.k)
    return Outcome({"N": a.N, "k": a.k, "count": len(om), "elements": om.tolist()},
                   rows=[{"n": int(v)} for v in om])


def cmd_tuple(a):
    k = a.k if a.k is not None else admissible.k_recipe(a.m, a.c_tilde)
    clamped = False
    eta = a.eta
    if eta is None:
        eta, clamped = admissible.eta_recipe(k, a.q, a.c6)
    ls = admissible.choose_tuple(k, eta, a.y, a.q, a.a)
    return Outcome({
        "k": k, "eta": eta, "eta_clamped": clamped, "set": ls.to_line(), "b": list(ls.b),
        "admissible": admissible.is_admissible_criterion(ls),
    })


def cmd_delta_sum(a):
    ctx = admissible.DeltaContext(a.a_coeff, a.b, a.x, a.eta)
    s, ratio = admissible.sum_delta_ratio(ctx)
    return Outcome({"range_len": ctx.range_len, "sum": s, "ratio": ratio})


def _scan_result(rep: clusters.ClusterReport) -> dict:
    d = rep.to_dict()
    d.pop("query")
    return d


def cmd_scan(a):
    rep = clusters.scan(clusters.ClusterQuery(a.x, a.y, a.m, a.q, a.a))
    if a.C is not None:
        rep = rep.with_bound(a.C)
    res = _scan_result(rep)
    notes = [] if rep.query.in_theorem_range else ["query outside 1 <= q <= y <= ln x"]
    row = {"x": a.x, "y": a.y, "m": a.m, "q": a.q, "a": a.a, "count": rep.count}
    if rep.bound_at_C:
        row.update(C=rep.bound_at_C[0], bound=rep.bound_at_C[1])
    return Outcome(res, rows=[row], deviations=notes)


def cmd_bound(a):
    return Outcome({"bound": clusters.lower_bound(a.x, a.y, a.m, a.q, a.C),
                    "base": clusters.bound_base(a.x, a.y, a.q)})


def cmd_calibrate(a):
    reports = []
    for x in a.x:
        y = a.y if a.y is not None else math.log(x)
        for m in a.m:
            for q in a.q:
                reports.append(clusters.scan(clusters.ClusterQuery(x, y, m, q, a.a)))
    cal = clusters.calibrate_C(reports, tol=a.tol)
    rows = [{"x": r.query.x, "y": r.query.y, "m": r.query.m, "q": r.query.q,
             "count": r.count, "ratio": ratio}
            for r, ratio in zip(reports, cal.ratios)]
    return Outcome({"C_min": cal.C_min, "tolerance": cal.tolerance, "points": rows,
                    "flagged": list(cal.flagged)}, rows=rows, deviations=cal.notes)


def cmd_bv(a):
    res = sieve.bv_error_sum(sieve.BVQuery(a.x, a.q_max, a.exclude, a.mode))
    rows = [{"modulus": t.modulus, "worst_residue": t.worst_residue, "error": t.error}
            for t in res.terms]
    return Outcome({"total": res.total, "normalized": res.total / a.x, "terms": rows},
                   rows=rows, deviations=res.deviations)


def cmd_prep_check(a):
    ts = list(a.t) if a.t else []
    if a.random:
        rng = random.Random(a.seed)
        ts += [rng.uniform(100.0, 1e12) for _ in range(a.random)]
    if not ts:
        ts = [100.0]
    rep = clusters.preparatory_checks(ts)
    rows = [{"t": r.t, "m1": r.margins[0], "m2": r.margins[1], "m3": r.margins[2],
             "m4": r.margins[3], "holds": r.holds} for r in rep.rows]
    return Outcome({"all_hold": rep.all_hold, "anchor_f_100": rep.anchor_sqrt_100,
                    "anchor_f_4_5": rep.anchor_half_4_5,
                    "min_margin": min(min(r.margins) for r in rep.rows),
                    "rows": rows}, rows=rows)


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="primeclusters", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=fn)
        return sp

    for name, fn, h in (("factor", cmd_factor, "prime factorization"),
                        ("phi", cmd_phi, "Euler totient"),
                        ("mu", cmd_mu, "Moebius function")):
        add(name, fn, h).add_argument("n", type=_int)

    sp = add("sieve", cmd_sieve, "primes in [lo, hi)")
    sp.add_argument("--lo", type=_int, required=True)
    sp.add_argument("--hi", type=_int, required=True)
    sp.add_argument("--list", action="store_true")

    for name, fn, h in (("pi", cmd_pi, "prime counting"), ("psi", cmd_psi, "Chebyshev psi")):
        sp = add(name, fn, h)
        sp.add_argument("x", type=_int)
        sp.add_argument("--q", type=int)
        sp.add_argument("--a", type=int, default=1)

    add("li", cmd_li, "logarithmic integral").add_argument("x", type=float)

    sp = add("rough", cmd_rough, "count of n <= x with no prime factor <= z")
    sp.add_argument("--x", type=_int, required=True)
    sp.add_argument("--z", type=_int, required=True)

    for name, fn, h in (("char", cmd_char, "character values"),
                        ("conductor", cmd_conductor, "conductor of a character"),
                        ("induce", cmd_induce, "inducing primitive character"),
                        ("decompose", cmd_decompose, "prime-power components"),
                        ("psi-chi", cmd_psi_chi, "twisted Chebyshev sum")):
        sp = add(name, fn, h)
        sp.add_argument("--q", type=int, required=True)
        sp.add_argument("--index", type=int, required=True)
        if name == "char":
            sp.add_argument("--n", type=int)
        if name == "psi-chi":
            sp.add_argument("--u", type=_int, required=True)

    sp = add("ortho-check", cmd_ortho_check, "exact orthogonality sums")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--w", type=int, required=True)
    sp.add_argument("--n", type=int)

    sp = add("admissible", cmd_admissible, "admissibility of q n + a + q b_i")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=_int_list, required=True)

    sp = add("omega", cmd_omega, "n <= N free of primes <= k")
    sp.add_argument("--N", type=_int, required=True)
    sp.add_argument("--k", type=int, required=True)

    sp = add("tuple", cmd_tuple, "choose an admissible tuple")
    sp.add_argument("--k", type=int)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--c-tilde", type=float, default=1.0)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--c6", type=float, default=1.0)
    sp.add_argument("--y", type=float, required=True)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--a", type=int, default=1)

    sp = add("delta-sum", cmd_delta_sum, "sum of Delta/phi(Delta)")
    sp.add_argument("--a-coeff", type=int, required=True)
    sp.add_argument("--b", type=_int_list, required=True)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--eta", type=float, required=True)

    sp = add("scan", cmd_scan, "count prime clusters")
    sp.add_argument("--x", type=_int, required=True)
    sp.add_argument("--y", type=float, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--C", type=float)

    sp = add("bound", cmd_bound, "lower bound pi(x) (y/(2 q ln x))^exp(C m)")
    sp.add_argument("--x", type=_int, required=True)
    sp.add_argument("--y", type=float, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--C", type=float, default=1.0)

    sp = add("calibrate", cmd_calibrate, "smallest C consistent with scan counts")
    sp.add_argument("--x", type=lambda s: tuple(_int(v) for v in s.split(",")), required=True)
    sp.add_argument("--m", type=_int_list, default=(1,))
    sp.add_argument("--q", type=_int_list, default=(1,))
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--y", type=float, help="default: ln x per grid point")
    sp.add_argument("--tol", type=float, default=1e-3)

    sp = add("bv", cmd_bv, "worst-residue error sum over moduli")
    sp.add_argument("--x", type=_int, required=True)
    sp.add_argument("--q-max", type=int, required=True)
    sp.add_argument("--exclude", type=int, default=1)
    sp.add_argument("--mode", choices=("psi", "pi"), default="psi")

    sp = add("prep-check", cmd_prep_check, "preparatory inequalities")
    sp.add_argument("--t", type=_float_list)
    sp.add_argument("--random", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)
    return p


# threads is left out so output is byte-identical for any thread count
_GLOBAL = ("format", "no_timestamp", "func", "command", "threads")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    sieve.configure(threads=max(1, args.threads))
    try:
        out = args.func(args)
    except BudgetExceeded as exc:
        print(f"budget refused: {exc}", file=sys.stderr)
        return 3
    except (DomainError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "csv":
        sys.stdout.write(to_csv(out.csv_rows()))
        return 0
    envelope = {
        "command": args.command,
        "parameters": {k: v for k, v in vars(args).items() if k not in _GLOBAL},
        "results": out.results,
        "deviations": out.deviations,
    }
    if not args.no_timestamp:
        envelope["timestamp"] = datetime.now(timezone.utc).isoformat()
    sys.stdout.write(dumps(envelope) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
