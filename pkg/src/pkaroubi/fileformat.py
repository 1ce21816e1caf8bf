"""Text format for presentations and filtered complexes.

One statement per line, ``#`` starts a comment::

    name demo
    field fp:2
    rmax 4
    object *
    hom * * a 0
    hom * * e 1
    rel * * 3 = a - e
    comp * * * e e = e            # g∘f for f: A -> B, g: B -> C
    identity * = a
    complex A
      gen x 0 0                   # name degree birth
      gen y 1 2
      d y x 1                     # d(y) contains 1*x
    end
    family A
    compare A A
    param depth 3

Scalars and levels are written as integers or ``p/q``.  Scalars are kept as
rationals until a field is chosen, so ``--field`` can override the file.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .field import Field
from .fchain import FilteredComplex, validate_fcc
from .pcat import PCatPresentation
from .pmod import FPModule

_NAME = re.compile(r"^[^\s=#]+$")
_TERM = re.compile(r"^([+-]?\d+(?:/\d+)?)\*(.+)$")


class ParseError(ValueError):
    def __init__(self, msg, line=0, col=0, path="<input>"):
        super().__init__("%s:%d:%d: %s" % (path, line, col, msg))
        self.msg, self.line, self.col, self.path = msg, line, col, path

    def to_json(self):
        return {"record": "error", "kind": "parse", "path": self.path, "line": self.line,
                "col": self.col, "message": self.msg}


@dataclass
class ComplexBlock:
    gens: list = dc_field(default_factory=list)        # (name, degree, birth)
    diff: list = dc_field(default_factory=list)        # (src, tgt, coeff)


@dataclass
class PresentationFile:
    name: str = ""
    field: str = "q"
    rmax: Fraction | None = None
    objects: list = dc_field(default_factory=list)
    homs: dict = dc_field(default_factory=dict)        # (A, B) -> [(gen, birth)]
    rels: list = dc_field(default_factory=list)        # (A, B, weight, {gen: c})
    comps: list = dc_field(default_factory=list)       # (A, B, C, f, g, {gen: c})
    identities: dict = dc_field(default_factory=dict)  # A -> {gen: c}
    complexes: dict = dc_field(default_factory=dict)   # name -> ComplexBlock
    family: list = dc_field(default_factory=list)
    compare: list = dc_field(default_factory=list)
    params: dict = dc_field(default_factory=dict)

    # -- building ---------------------------------------------------------
    def get_field(self, override=None) -> Field:
        return Field.from_spec(override or self.field)

    def presentation(self, field: Field | None = None, rmax=None) -> PCatPresentation:
        F = field or self.get_field()
        mods = {}
        for A in self.objects:
            for B in self.objects:
                gens = self.homs.get((A, B), [])
                rels = [(w, {g: F(c) for g, c in combo.items()})
                        for a, b, w, combo in self.rels if (a, b) == (A, B)]
                if gens or rels:
                    mods[(A, B)] = FPModule(F, gens, rels)
        zero = FPModule(F)
        table = {}
        for A, B, C, f, g, combo in self.comps:
            mf, mg, mh = mods.get((A, B), zero), mods.get((B, C), zero), mods.get((A, C), zero)
            vec = mh.vector({k: F(c) for k, c in combo.items()})
            table.setdefault((A, B, C), {})[(mf.index(f), mg.index(g))] = vec
        idents = {A: mods.get((A, A), zero).vector({k: F(c) for k, c in combo.items()})
                  for A, combo in self.identities.items()}
        rm = rmax if rmax is not None else self.rmax
        return PCatPresentation(F, self.objects, mods, table, idents, rmax=rm, name=self.name)

    def build_complexes(self, field: Field | None = None) -> dict:
        F = field or self.get_field()
        out = {}
        for name, blk in self.complexes.items():
            diff = {}
            for s, t, c in blk.diff:
                diff.setdefault(s, {})[t] = F(c)
            out[name] = FilteredComplex(F, blk.gens, diff, name)
        return out


def _level(tok, line, col, path):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError("expected a rational, got %r" % tok, line, col, path) from None


def _combo(tokens, line, cols, path) -> dict:
    out = {}
    sign = 1
    for tok, col in zip(tokens, cols):
        if tok == "+":
            continue
        if tok == "-":
            sign = -sign
            continue
        if tok == "0" and len(tokens) == 1:
            return {}
        c, name = Fraction(1), tok
        m = _TERM.match(tok)
        if m:
            c, name = Fraction(m.group(1)), m.group(2)
        elif tok.startswith("-") and len(tok) > 1:
            c, name = Fraction(-1), tok[1:]
        elif tok.startswith("+") and len(tok) > 1:
            name = tok[1:]
        if not _NAME.match(name) or re.match(r"^[+-]?\d", name):
            raise ParseError("bad term %r" % tok, line, col, path)
        out[name] = out.get(name, Fraction(0)) + sign * c
        sign = 1
    return {k: v for k, v in out.items() if v}


def _tokens(line):
    out = []
    for m in re.finditer(r"\S+", line):
        out.append((m.group(0), m.start() + 1))
    return out


def parse_text(text: str, path: str = "<input>") -> PresentationFile:
    pf = PresentationFile()
    block = None
    block_line = 0
    seen_gens = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        words = [t for t, _ in toks]
        cols = [c for _, c in toks]
        kw = words[0]

        def need(n, usage):
            if len(words) != n:
                raise ParseError("usage: %s" % usage, ln, cols[min(len(cols) - 1, n)] if len(cols) > n else
                                 cols[-1] + len(words[-1]), path)

        if block is not None:
            blk = pf.complexes[block]
            if kw == "end":
                need(1, "end")
                block = None
            elif kw == "gen":
                need(4, "gen <name> <degree> <birth>")
                if words[1] in {g[0] for g in blk.gens}:
                    raise ParseError("duplicate generator %r" % words[1], ln, cols[1], path)
                try:
                    deg = int(words[2])
                except ValueError:
                    raise ParseError("degree must be an integer", ln, cols[2], path) from None
                blk.gens.append((words[1], deg, _level(words[3], ln, cols[3], path)))
            elif kw == "d":
                need(4, "d <source> <target> <coeff>")
                names = {g[0] for g in blk.gens}
                for i in (1, 2):
                    if words[i] not in names:
                        raise ParseError("unknown generator %r" % words[i], ln, cols[i], path)
                blk.diff.append((words[1], words[2], _level(words[3], ln, cols[3], path)))
            else:
                raise ParseError("unexpected %r inside complex block" % kw, ln, cols[0], path)
            continue
        if kw == "name":
            need(2, "name <name>")
            pf.name = words[1]
        elif kw == "field":
            need(2, "field q|fp:<p>")
            try:
                Field.from_spec(words[1])
            except ValueError as exc:
                raise ParseError(str(exc), ln, cols[1], path) from None
            pf.field = Field.from_spec(words[1]).name
        elif kw == "rmax":
            need(2, "rmax <rational>")
            pf.rmax = _level(words[1], ln, cols[1], path)
        elif kw == "object":
            if len(words) < 2:
                raise ParseError("usage: object <name>...", ln, cols[0] + 6, path)
            for w, c in zip(words[1:], cols[1:]):
                if w in pf.objects:
                    raise ParseError("duplicate object %r" % w, ln, c, path)
                pf.objects.append(w)
        elif kw == "hom":
            need(5, "hom <A> <B> <gen> <birth>")
            _objects(pf, words, cols, (1, 2), ln, path)
            key = (words[1], words[2], words[3])
            if key in seen_gens:
                raise ParseError("duplicate hom generator %r" % words[3], ln, cols[3], path)
            seen_gens.add(key)
            pf.homs.setdefault((words[1], words[2]), []).append((words[3], _level(words[4], ln, cols[4], path)))
        elif kw == "rel":
            eq = _expect_eq(words, cols, 4, ln, path)
            _objects(pf, words, cols, (1, 2), ln, path)
            combo = _combo(words[eq + 1:], ln, cols[eq + 1:], path)
            _known_gens(pf, words[1], words[2], combo, ln, cols[eq + 1] if len(cols) > eq + 1 else cols[eq], path)
            pf.rels.append((words[1], words[2], _level(words[3], ln, cols[3], path), combo))
        elif kw == "comp":
            eq = _expect_eq(words, cols, 6, ln, path)
            _objects(pf, words, cols, (1, 2, 3), ln, path)
            A, B, C, f, g = words[1:6]
            _known_gens(pf, A, B, {f: 1}, ln, cols[4], path)
            _known_gens(pf, B, C, {g: 1}, ln, cols[5], path)
            combo = _combo(words[eq + 1:], ln, cols[eq + 1:], path)
            _known_gens(pf, A, C, combo, ln, cols[eq + 1] if len(cols) > eq + 1 else cols[eq], path)
            if any(x[:5] == (A, B, C, f, g) for x in pf.comps):
                raise ParseError("duplicate composition entry", ln, cols[0], path)
            pf.comps.append((A, B, C, f, g, combo))
        elif kw == "identity":
            eq = _expect_eq(words, cols, 2, ln, path)
            _objects(pf, words, cols, (1,), ln, path)
            combo = _combo(words[eq + 1:], ln, cols[eq + 1:], path)
            _known_gens(pf, words[1], words[1], combo, ln, cols[eq + 1] if len(cols) > eq + 1 else cols[eq], path)
            pf.identities[words[1]] = combo
        elif kw == "complex":
            need(2, "complex <name>")
            if words[1] in pf.complexes:
                raise ParseError("duplicate complex %r" % words[1], ln, cols[1], path)
            pf.complexes[words[1]] = ComplexBlock()
            block, block_line = words[1], ln
        elif kw == "family":
            pf.family.extend(words[1:])
        elif kw == "compare":
            need(3, "compare <complex> <complex>")
            pf.compare.append((words[1], words[2]))
        elif kw == "param":
            need(3, "param <key> <value>")
            pf.params[words[1]] = words[2]
        else:
            raise ParseError("unknown statement %r" % kw, ln, cols[0], path)
    if block is not None:
        raise ParseError("complex %r is not closed by 'end'" % block, block_line, 1, path)
    for n in pf.family + [x for pair in pf.compare for x in pair]:
        if n not in pf.complexes:
            raise ParseError("unknown complex %r" % n, 0, 0, path)
    return pf


def _expect_eq(words, cols, pos, ln, path):
    if len(words) <= pos or words[pos] != "=":
        c = cols[pos] if len(cols) > pos else cols[-1] + len(words[-1])
        raise ParseError("expected '=' here", ln, c, path)
    return pos


def _objects(pf, words, cols, idx, ln, path):
    for i in idx:
        if words[i] not in pf.objects:
            raise ParseError("unknown object %r" % words[i], ln, cols[i], path)


def _known_gens(pf, A, B, combo, ln, col, path):
    names = {g for g, _ in pf.homs.get((A, B), [])}
    for g in combo:
        if g not in names:
            raise ParseError("no generator %r in Hom(%s, %s)" % (g, A, B), ln, col, path)


def parse(path) -> PresentationFile:
    with open(path, encoding="utf-8") as fh:
        return parse_text(fh.read(), str(path))


def _q(x) -> str:
    return str(Fraction(x))


def _fmt_combo(combo) -> str:
    if not combo:
        return "0"
    parts = []
    for k in sorted(combo):
        c = combo[k]
        parts.append(k if c == 1 else "%s*%s" % (_q(c), k))
    return " + ".join(parts)


def serialize(pf: PresentationFile) -> str:
    """Canonical text: statements in a fixed order, generators sorted."""
    out = []
    if pf.name:
        out.append("name %s" % pf.name)
    out.append("field %s" % pf.field)
    if pf.rmax is not None:
        out.append("rmax %s" % _q(pf.rmax))
    if pf.objects:
        out.append("object %s" % " ".join(pf.objects))
    for (A, B) in sorted(pf.homs):
        for g, b in sorted(pf.homs[(A, B)], key=lambda x: (x[1], x[0])):
            out.append("hom %s %s %s %s" % (A, B, g, _q(b)))
    for A, B, w, combo in sorted(pf.rels, key=lambda r: (r[0], r[1], r[2], _fmt_combo(r[3]))):
        out.append("rel %s %s %s = %s" % (A, B, _q(w), _fmt_combo(combo)))
    for A, B, C, f, g, combo in sorted(pf.comps, key=lambda r: r[:5]):
        out.append("comp %s %s %s %s %s = %s" % (A, B, C, f, g, _fmt_combo(combo)))
    for A in sorted(pf.identities):
        out.append("identity %s = %s" % (A, _fmt_combo(pf.identities[A])))
    for name in sorted(pf.complexes):
        blk = pf.complexes[name]
        out.append("complex %s" % name)
        for g, d, b in sorted(blk.gens, key=lambda x: (x[1], x[2], x[0])):
            out.append("  gen %s %d %s" % (g, d, _q(b)))
        for s, t, c in sorted(blk.diff):
            out.append("  d %s %s %s" % (s, t, _q(c)))
        out.append("end")
    if pf.family:
        out.append("family %s" % " ".join(sorted(set(pf.family))))
    for a, b in pf.compare:
        out.append("compare %s %s" % (a, b))
    for k in sorted(pf.params):
        out.append("param %s %s" % (k, pf.params[k]))
    return "\n".join(out) + "\n"


def from_presentation(P: PCatPresentation, complexes: dict | None = None) -> PresentationFile:
    """File form of an in-memory presentation (scalars written as rationals or residues)."""
    F = P.field
    pf = PresentationFile(name=P.name or "", field=F.name,
                          rmax=P.rmax, objects=list(P.objects))
    val = lambda c: Fraction(int(c)) if F.p else Fraction(c)
    for (A, B), m in sorted(P.homs.items()):
        pf.homs[(A, B)] = list(m.gens)
        for w, vec in m.rels:
            pf.rels.append((A, B, w, {m.names[i]: val(c) for i, c in enumerate(vec) if c}))
    for (A, B, C), tab in sorted(P.table.items()):
        mf, mg, mh = P.hom(A, B), P.hom(B, C), P.hom(A, C)
        for (i, j), vec in sorted(tab.items()):
            pf.comps.append((A, B, C, mf.names[i], mg.names[j],
                             {mh.names[k]: val(c) for k, c in enumerate(vec) if c}))
    for A, vec in P.identities.items():
        m = P.hom(A, A)
        pf.identities[A] = {m.names[k]: val(c) for k, c in enumerate(vec) if c}
    for name, C in sorted((complexes or {}).items()):
        blk = ComplexBlock(list(C.gens), [(s, t, val(c)) for s, row in sorted(C.d.items())
                                          for t, c in sorted(row.items())])
        pf.complexes[name] = blk
    return pf


def check_complexes(pf: PresentationFile, field: Field | None = None):
    """Build the complexes and validate each; returns (complexes, reports)."""
    cs = pf.build_complexes(field)
    return cs, {n: validate_fcc(C) for n, C in cs.items()}
