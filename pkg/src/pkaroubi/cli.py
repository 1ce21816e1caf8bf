"""Command line entry point.

    pkaroubi verify|idempotents|split|localize|pairs|presheaf|metric|report FILE
             [--field q|fp:<p>] [--rmax R] [--depth N] [--budget R] [--threads N] [--machine]

Exit codes: 0 success, 1 verification failure, 2 parse error, 3 search bound exhausted.
"""
from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import fchain, idem, pairs, presheaf, semiloc, tpcw
from .field import INF, fmt_level
from .fileformat import ParseError, parse
from .reports import Report, dumps

OK, FAIL, PARSE, EXHAUSTED = 0, 1, 2, 3
COMMANDS = ("verify", "idempotents", "split", "localize", "pairs", "presheaf", "metric", "report")


class Session:
    """Parsed file plus the resolved configuration; collects output records."""

    def __init__(self, args, pf):
        self.args = args
        self.pf = pf
        self.field = pf.get_field(args.field)
        self.rmax = Fraction(args.rmax) if args.rmax is not None else pf.rmax
        params = pf.params
        self.depth = int(args.depth if args.depth is not None else params.get("depth", 3))
        self.budget = Fraction(args.budget if args.budget is not None else params.get("budget", 2))
        self.threads = int(args.threads)
        self.records = []
        self.human = []
        self.complexes = pf.build_complexes(self.field)
        self._P = None
        self._hfch = None

    @property
    def P(self):
        """The file's presentation, or the homology category of its complexes when it has no objects."""
        if self._P is None:
            if self.pf.objects or not self.complexes:
                self._P = self.pf.presentation(self.field, self.rmax)
            else:
                self._hfch = fchain.HFCh(self.complexes, rmax=self.rmax, name=self.pf.name or "hfch")
                self._P = self._hfch.P
        return self._P

    @property
    def bound(self):
        return self.P.rmax

    def config(self):
        return {"field": self.field.name, "rmax": fmt_level(self.bound), "depth": self.depth,
                "budget": fmt_level(self.budget)}

    def emit(self, rec: dict):
        self.records.append(rec)

    def report(self, rep: Report):
        self.records.extend(rep.records())
        self.human.append(rep.summary())
        return rep.ok


def _fmt_vec(v):
    return [str(x) if not isinstance(x, Fraction) else fmt_level(x) for x in v]


# -- commands ------------------------------------------------------------------

def cmd_verify(s: Session) -> int:
    code = OK
    for name, C in sorted(s.complexes.items()):
        rep = fchain.validate_fcc(C)
        rep.title = "fcc[%s]" % name
        if not s.report(rep):
            code = FAIL
    if code:
        return code
    rep = s.P.validate()
    if not s.report(rep):
        return FAIL
    if not s.report(semiloc.verify_cf_axioms(s.P)):
        code = FAIL
    return code


def _valid(s: Session) -> bool:
    """Validation gate shared by the analysis commands."""
    for name, C in sorted(s.complexes.items()):
        rep = fchain.validate_fcc(C)
        if not rep.ok:
            rep.title = "fcc[%s]" % name
            s.report(rep)
            return False
    rep = s.P.validate()
    if not rep.ok:
        s.report(rep)
        return False
    return True


def _discovered(s: Session):
    out = []
    P = s.P
    for A in P.objects:
        if P.floor(A)[0] is INF:
            s.emit({"record": "skip", "object": A, "why": "no r-identity within rmax"})
            continue
        ids, complete = idem.stable_idempotents(P, A)
        for k, eb in enumerate(ids):
            res = idem.min_representation_weight(P, A, eb, s.bound)
            out.append((A, k, tuple(eb), res, complete))
    return out


def cmd_idempotents(s: Session) -> int:
    if not _valid(s):
        return FAIL
    code = OK
    rows = []
    for A, k, eb, res, complete in _discovered(s):
        s.emit({"record": "idempotent", "object": A, "index": k, "class": _fmt_vec(eb),
                "enumeration_complete": complete, "min_weight": res.to_json()})
        rows.append("%s #%d class=%s weight in [%s, %s]%s" % (
            A, k, ",".join(str(x) for x in eb), res.lower, res.upper,
            "" if res.exact else " (loose)"))
        if res.rep is None:
            code = EXHAUSTED
    s.human.append("idempotents: %d found\n" % len(rows) + "\n".join("  " + r for r in rows))
    return code


def cmd_split(s: Session) -> int:
    if not _valid(s):
        return FAIL
    P = s.P
    cat = presheaf.PresheafCat(P)
    rep = Report("split")
    code = OK
    for A, k, eb, res, _ in _discovered(s):
        if res.rep is None:
            code = EXHAUSTED
            continue
        e = res.rep.e
        key = "[%s#%d]" % (A, k)
        try:
            T1, T2, wit = presheaf.split_uniqueness(cat, A, e, "%s#%d" % (A, k))
            rep.add("kernel_splitting" + key, True, weight=T1.weight)
            rep.add("uniqueness" + key, idem.verify_strong_iso(cat, wit), r=wit.r)
        except (ValueError, AssertionError) as exc:
            rep.add("uniqueness" + key, False, why=str(exc))
        fl = P.floor(A)[0]
        if e.weight >= fl:
            try:
                X = pairs.pair_object(P, A, e)
                pairs.canonical_weak_splitting(P, X)
                rep.add("pairs_weak_splitting" + key, True, weight=2 * X.r)
            except ValueError as exc:
                rep.add("pairs_weak_splitting" + key, False, why=str(exc))
    if not s.report(rep):
        return FAIL
    return code


def cmd_localize(s: Session) -> int:
    if not _valid(s):
        return FAIL
    P = s.P
    for a in P.objects:
        if P.floor(a)[0] is INF:
            continue
        for b in P.objects:
            if P.floor(b)[0] is INF:
                continue
            d, basis = semiloc.localized_hom(P, a, b)
            s.emit({"record": "localized_hom", "src": a, "tgt": b, "dim": d,
                    "basis": [_roof_json(R) for R in basis]})
    return OK if s.report(semiloc.xi_report(P)) else FAIL


def _roof_json(R):
    return {"left": R.left.to_json(), "right": R.right.to_json()}


def cmd_pairs(s: Session) -> int:
    if not _valid(s):
        return FAIL
    rep = pairs.verify_gamma_equivalence(s.P, s.bound)
    return _code(s.report(rep), rep, "essential_surjectivity")


def _code(ok, rep, search_check):
    """FAIL, or EXHAUSTED when the only failure is a representative search that ran out."""
    if ok:
        return OK
    return EXHAUSTED if [c.name for c in rep.failures()] == [search_check] else FAIL


def cmd_presheaf(s: Session) -> int:
    if not _valid(s):
        return FAIL
    cat = presheaf.PresheafCat(s.P)
    if not s.report(presheaf.yoneda_report(s.P, cat)):
        return FAIL
    rep = presheaf.verify_ztilde(s.P, s.bound, cat)
    return _code(s.report(rep), rep, "representations_found")


def cmd_metric(s: Session) -> int:
    if not _valid(s):
        return FAIL
    cs = s.complexes
    fam_names = sorted(set(s.pf.family)) if s.pf.family else sorted(cs)
    family = {n: cs[n] for n in fam_names}
    pairs_ = s.pf.compare or [(a, b) for i, a in enumerate(sorted(cs)) for b in sorted(cs)[i:]]
    code = OK
    rep = Report("metric")
    lines = []
    for a, b in pairs_:
        d, (c1, c2) = tpcw.fragmentation_d_ub(cs[a], cs[b], family, s.depth, s.budget, s.threads)
        certs = []
        for c in (c1, c2):
            if c is not None:
                vr = tpcw.verify_decomposition(c)
                rep.add("certificate[%s,%s]" % (c.A.name, c.B.name), vr.ok,
                        failures=[x.name for x in vr.failures()])
                certs.append(c.to_json())
            else:
                certs.append(None)
        s.emit({"record": "metric", "A": a, "B": b, "family": fam_names,
                "d_ub": fmt_level(d) if d is not None else None,
                "delta_ub": [fmt_level(c.total) if c else None for c in (c1, c2)],
                "certificates": certs})
        lines.append("d(%s, %s) <= %s" % (a, b, d if d is not None else "? (no certificate)"))
        if d is None:
            code = EXHAUSTED
    s.human.append("metric (family %s, depth %d, budget %s)\n" % (",".join(fam_names), s.depth, s.budget)
                   + "\n".join("  " + x for x in lines))
    if not s.report(rep):
        return FAIL
    return code


def cmd_report(s: Session) -> int:
    codes = []
    for name in COMMANDS[:-1]:
        if name == "metric" and not s.complexes:
            continue
        s.emit({"record": "section", "command": name})
        codes.append(HANDLERS[name](s))
        if name == "verify" and codes[-1] == FAIL:
            break
    if FAIL in codes:
        return FAIL
    return EXHAUSTED if EXHAUSTED in codes else OK


HANDLERS = {"verify": cmd_verify, "idempotents": cmd_idempotents, "split": cmd_split,
            "localize": cmd_localize, "pairs": cmd_pairs, "presheaf": cmd_presheaf,
            "metric": cmd_metric, "report": cmd_report}


def build_parser():
    ap = argparse.ArgumentParser(prog="pkaroubi", description="Weighted idempotents in persistence categories.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("file")
    ap.add_argument("--field", help="q or fp:<p>; overrides the file")
    ap.add_argument("--rmax", help="search horizon for weights")
    ap.add_argument("--depth", type=int, help="fragmentation search depth")
    ap.add_argument("--budget", help="fragmentation weight budget")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for the metric search")
    ap.add_argument("--machine", action="store_true", help="JSON lines on stdout")
    return ap


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        pf = parse(args.file)
        s = Session(args, pf)
    except ParseError as exc:
        return _fail(args, exc.to_json(), str(exc), out, err)
    except OSError as exc:
        return _fail(args, {"record": "error", "kind": "io", "message": str(exc)}, str(exc), out, err)
    except ValueError as exc:
        return _fail(args, {"record": "error", "kind": "semantic", "message": str(exc)}, str(exc), out, err)
    head = {"record": "command", "command": args.command, "file": args.file, "config": s.config()}
    try:
        code = HANDLERS[args.command](s)
    except ValueError as exc:
        s.emit({"record": "error", "kind": "semantic", "message": str(exc)})
        s.human.append("error: %s" % exc)
        code = FAIL
    tail = {"record": "exit", "code": code}
    if args.machine:
        for rec in [head] + s.records + [tail]:
            out.write(dumps(rec) + "\n")
    else:
        cfg = s.config()
        out.write("%s %s  [field %s, rmax %s, depth %s, budget %s]\n" % (
            args.command, args.file, cfg["field"], cfg["rmax"], cfg["depth"], cfg["budget"]))
        for h in s.human:
            out.write(h + "\n")
        out.write("exit %d  (%.2fs)\n" % (code, time.perf_counter() - t0))
    return code


def _fail(args, rec, text, out, err):
    if args.machine:
        out.write(dumps(rec) + "\n")
        out.write(dumps({"record": "exit", "code": PARSE}) + "\n")
    else:
        err.write(text + "\n")
    return PARSE


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
