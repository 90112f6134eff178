"""Reader and writer for the BIF interchange format.

Supported dialect::

    network NAME { property ...; }
    variable NAME { type discrete [ k ] { l1, ..., lk }; property ...; }
    probability ( CHILD | P1, ..., Pm ) {
        (c1, ..., cm) v1, ..., vn;
        table v1, ..., vn;          // root nodes, or every row in canonical order
        default v1, ..., vn;        // fills rows not listed explicitly
        property ...;
    }

Explicit row tuples may come in any order.  ``property`` lines are kept
verbatim and written back; ``property ordinal = true`` on a variable sets its
ordinal flag.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

from ..errors import BifSyntaxError, DuplicateName, MissingRow, ParentMismatch, UnknownLevel, UnknownVariable
from ..model import ROW_TOL, BayesNet, Cpt, DiscreteVariable, build_network

ORDINAL_PROPERTY = "ordinal = true"

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<string>"[^"\n]*")
  | (?P<punct>[{}()\[\],;|])
  | (?P<word>[^\s{}()\[\],;|"]+)
    """,
    re.VERBOSE | re.DOTALL,
)
_PLAIN = re.compile(r"^[^\s{}()\[\],;|\"=]+$")
_KEYWORDS = {"network", "variable", "probability", "property", "type", "discrete", "table", "default"}


@dataclass(frozen=True)
class NetworkDocument:
    format: str
    network: BayesNet
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int
    start: int
    end: int

    @property
    def value(self) -> str:
        return self.text[1:-1] if self.kind == "string" else self.text


def _tokenize(text: str) -> list[_Tok]:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise BifSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1, pos, m.end()))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        if tok is None:
            lines = self.text.split("\n")
            raise BifSyntaxError(msg + " (unexpected end of input)", len(lines), len(lines[-1]) + 1)
        raise BifSyntaxError(msg, tok.line, tok.col)

    def next(self):
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text):
        tok = self.next()
        if tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text!r}", tok)
        return tok

    def name(self, what="name"):
        tok = self.next()
        if tok.kind not in ("word", "string"):
            self.fail(f"expected {what}, found {tok.text!r}", tok)
        return tok

    def accept(self, text):
        tok = self.peek()
        if tok is not None and tok.text == text:
            self.i += 1
            return True
        return False

    def raw_until_semicolon(self, first: _Tok) -> str:
        start = first.end
        while True:
            tok = self.next()
            if tok.text == ";":
                return self.text[start:tok.start].strip()

    def name_list(self, closer):
        out = []
        while not self.accept(closer):
            if out:
                self.accept(",")
                if self.accept(closer):
                    break
            out.append(self.name("level name"))
        return out

    def numbers(self):
        vals = []
        while True:
            tok = self.next()
            if tok.text == ";":
                return vals
            if tok.text == ",":
                continue
            try:
                vals.append(float(tok.text))
            except ValueError:
                self.fail(f"expected a probability, found {tok.text!r}", tok)


def parse_bif(text: str, *, tol: float = ROW_TOL) -> NetworkDocument:
    """Parse BIF text into a validated network.

    Raises
    ------
    BifSyntaxError
        With line and column of the offending token.
    MissingRow, UnknownLevel, RowSumViolation, ParentMismatch
    """
    p = _Parser(text)
    name, net_props = "network", []
    variables: dict[str, dict] = {}
    blocks: list[dict] = []
    while p.peek() is not None:
        kw = p.next()
        if kw.text == "network":
            name = p.name("network name").value
            p.expect("{")
            while not p.accept("}"):
                tok = p.next()
                if tok.text != "property":
                    p.fail(f"unexpected {tok.text!r} in network block", tok)
                net_props.append(p.raw_until_semicolon(tok))
        elif kw.text == "variable":
            tok = p.name("variable name")
            if tok.value in variables:
                raise DuplicateName(tok.value)
            info = {"tok": tok, "levels": None, "props": [], "ordinal": False}
            p.expect("{")
            while not p.accept("}"):
                t = p.next()
                if t.text == "type":
                    p.expect("discrete")
                    p.expect("[")
                    k_tok = p.next()
                    if not k_tok.text.isdigit():
                        p.fail("expected level count", k_tok)
                    p.expect("]")
                    p.expect("{")
                    levels = p.name_list("}")
                    p.expect(";")
                    if len(levels) != int(k_tok.text):
                        p.fail(f"declared {k_tok.text} levels but listed {len(levels)}", k_tok)
                    info["levels"] = [l.value for l in levels]
                elif t.text == "property":
                    raw = p.raw_until_semicolon(t)
                    if re.sub(r"\s+", " ", raw) == ORDINAL_PROPERTY:
                        info["ordinal"] = True
                    else:
                        info["props"].append(raw)
                else:
                    p.fail(f"unexpected {t.text!r} in variable block", t)
            if info["levels"] is None:
                p.fail(f"variable {tok.value!r} has no type declaration", tok)
            variables[tok.value] = info
        elif kw.text == "probability":
            p.expect("(")
            child = p.name("child name")
            parents = []
            if p.accept("|"):
                parents = p.name_list(")")
            else:
                p.expect(")")
            block = {"tok": kw, "child": child, "parents": parents, "rows": [], "table": None,
                     "default": None, "props": []}
            p.expect("{")
            while not p.accept("}"):
                t = p.next()
                if t.text == "table":
                    block["table"] = (t, p.numbers())
                elif t.text == "default":
                    block["default"] = (t, p.numbers())
                elif t.text == "property":
                    block["props"].append(p.raw_until_semicolon(t))
                elif t.text == "(":
                    levels = p.name_list(")")
                    block["rows"].append((t, levels, p.numbers()))
                else:
                    p.fail(f"unexpected {t.text!r} in probability block", t)
            blocks.append(block)
        else:
            p.fail(f"expected 'network', 'variable' or 'probability', found {kw.text!r}", kw)

    var_objs = {
        n: DiscreteVariable(n, info["levels"], info["ordinal"], tuple(info["props"]))
        for n, info in variables.items()
    }
    cpts, edges, seen = [], [], set()
    for b in blocks:
        child_name = b["child"].value
        if child_name not in var_objs:
            raise UnknownVariable(child_name)
        if child_name in seen:
            raise ParentMismatch(child_name, "more than one probability block")
        seen.add(child_name)
        parents = []
        for tok in b["parents"]:
            if tok.value not in var_objs:
                raise UnknownVariable(tok.value)
            parents.append(var_objs[tok.value])
            edges.append((tok.value, child_name))
        child = var_objs[child_name]
        cpts.append(Cpt(child, parents, _assemble(p, b, child, parents), tol=tol, properties=b["props"]))
    missing = [n for n in var_objs if n not in seen]
    if missing:
        raise ParentMismatch(missing[0], "no probability block")
    bn = build_network(list(var_objs.values()), edges, cpts, name=name, properties=net_props)
    return NetworkDocument("bif", bn, bn.warnings)


def _assemble(p: _Parser, block, child, parents) -> np.ndarray:
    k = child.cardinality
    cards = [v.cardinality for v in parents]
    n_rows = int(np.prod(cards, dtype=np.int64))
    table = np.full((n_rows, k), np.nan)
    filled = np.zeros(n_rows, dtype=bool)

    def check_len(tok, vals, n):
        if len(vals) != n:
            p.fail(f"expected {n} probabilities for {child.name!r}, found {len(vals)}", tok)

    if block["table"] is not None:
        tok, vals = block["table"]
        check_len(tok, vals, n_rows * k)
        table[:] = np.array(vals).reshape(n_rows, k)
        filled[:] = True
    for tok, levels, vals in block["rows"]:
        if len(levels) != len(parents):
            p.fail(f"row for {child.name!r} lists {len(levels)} parent levels, expected {len(parents)}", tok)
        idx = []
        for var, lt in zip(parents, levels):
            if lt.value not in var.levels:
                raise UnknownLevel(var.name, lt.value)
            idx.append(var.levels.index(lt.value))
        check_len(tok, vals, k)
        row = int(np.ravel_multi_index(idx, cards)) if parents else 0
        if filled[row] and block["table"] is None:
            p.fail(f"duplicate row ({', '.join(l.value for l in levels)}) for {child.name!r}", tok)
        table[row] = vals
        filled[row] = True
    if block["default"] is not None:
        tok, vals = block["default"]
        check_len(tok, vals, k)
        table[~filled] = vals
        filled[:] = True
    if not filled.all():
        first = int(np.flatnonzero(~filled)[0])
        if not parents:
            raise MissingRow(child.name, ())
        combo = np.unravel_index(first, cards)
        raise MissingRow(child.name, [v.levels[int(i)] for v, i in zip(parents, combo)])
    return table


def _q(name: str) -> str:
    return name if _PLAIN.match(name) and name not in _KEYWORDS else f'"{name}"'


def _num(x: float) -> str:
    return repr(float(x))


def write_bif(bn: BayesNet) -> str:
    """Serialize ``bn`` to BIF, rows in canonical order, values at full precision."""
    out = [f"network {_q(bn.name)} {{"]
    out += [f"  property {prop} ;" for prop in bn.properties]
    out.append("}")
    for v in bn.variables:
        out.append(f"variable {_q(v.name)} {{")
        out.append(f"  type discrete [ {v.cardinality} ] {{ {', '.join(_q(l) for l in v.levels)} }};")
        if v.ordinal:
            out.append(f"  property {ORDINAL_PROPERTY} ;")
        out += [f"  property {prop} ;" for prop in v.properties]
        out.append("}")
    for c in bn.cpts:
        head = _q(c.child.name)
        if c.parents:
            head += " | " + ", ".join(_q(n) for n in c.parent_names)
        out.append(f"probability ( {head} ) {{")
        if not c.parents:
            out.append("  table " + ", ".join(_num(x) for x in c.table[0]) + ";")
        else:
            combos = itertools.product(*(p.levels for p in c.parents))
            for combo, row in zip(combos, c.table):
                out.append(f"  ({', '.join(_q(l) for l in combo)}) " + ", ".join(_num(x) for x in row) + ";")
        out += [f"  property {prop} ;" for prop in c.properties]
        out.append("}")
    return "\n".join(out) + "\n"
