"""Line-oriented recursive-descent parser for scenario files."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from . import ast
from .diagnostics import SdlSyntaxError, SourceSpan

KEYWORDS = frozenset(
    """system state obs classical step assert labels on pauli spin pointer sectors projector
    measurement ready targets omega mix report evolve from to samples track tol note
    true false i pi sqrt log2""".split()
)
STATEMENT_KEYWORDS = ("system", "state", "obs", "classical", "step", "assert")
INFO_FUNCS = ("I", "H", "Imax", "fact", "relfact")
MAX_DIM = 1024

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<ket>\|[A-Za-z0-9_+\-, \t]*>)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<op>[=\{\},\(\)\|:\*/\+\-])
    """,
    re.VERBOSE | re.ASCII,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan

    def describe(self) -> str:
        if self.kind == "newline":
            return "end of line"
        if self.kind == "eof":
            return "end of input"
        return f"'{self.text}'"


class _Positions:
    """Map character offsets to (line, col, byte offset)."""

    def __init__(self, text: str):
        self.text = text
        self.ascii = text.isascii()
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", text)]
        if not self.ascii:
            self.bytes_before = [0]
            for ch in text:
                self.bytes_before.append(self.bytes_before[-1] + len(ch.encode("utf-8", "surrogatepass")))

    def byte(self, pos: int) -> int:
        return pos if self.ascii else self.bytes_before[pos]

    def span(self, start: int, end: int) -> SourceSpan:
        lo, hi = 0, len(self.line_starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.line_starts[mid] <= start:
                lo = mid
            else:
                hi = mid - 1
        return SourceSpan(lo + 1, start - self.line_starts[lo] + 1, self.byte(start), self.byte(end))


def tokenize(text: str) -> list[Token]:
    pos_map = _Positions(text)
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            ch = text[pos]
            span = pos_map.span(pos, pos + 1)
            if ch == '"':
                raise SdlSyntaxError(span, "unterminated string literal")
            if ch == "|":
                raise SdlSyntaxError(span, "malformed ket; expected |entry,...>")
            raise SdlSyntaxError(span, f"unexpected character {ch!r}")
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), pos_map.span(m.start(), m.end())))
        pos = m.end()
    tokens.append(Token("eof", "", pos_map.span(n, n)))
    return tokens


def normalize_number(text: str, span: SourceSpan) -> str:
    """Canonical spelling of a numeric literal: integers as ``int``, others as ``repr(float)``."""
    if re.fullmatch(r"\d+", text):
        return str(int(text))
    value = float(text)
    if not math.isfinite(value):
        raise SdlSyntaxError(span, f"numeric literal {text} is out of range")
    return repr(value)


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    # token helpers ------------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, message: str, tok: Token | None = None) -> SdlSyntaxError:
        return SdlSyntaxError((tok or self.tok).span, message)

    def at_op(self, op: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == op

    def at_word(self, word: str) -> bool:
        return self.tok.kind == "ident" and self.tok.text == word

    def at_eol(self) -> bool:
        return self.tok.kind in ("newline", "eof")

    def expect_op(self, op: str) -> Token:
        if not self.at_op(op):
            raise self.error(f"expected '{op}', found {self.tok.describe()}")
        return self.advance()

    def expect_word(self, word: str) -> Token:
        if not self.at_word(word):
            raise self.error(f"expected '{word}', found {self.tok.describe()}")
        return self.advance()

    def expect_name(self, what: str = "name") -> Token:
        t = self.tok
        if t.kind != "ident":
            raise self.error(f"expected {what}, found {t.describe()}")
        if t.text in KEYWORDS:
            raise self.error(f"'{t.text}' is a reserved word and cannot be used as {what}")
        return self.advance()

    def expect_int(self, what: str = "integer") -> tuple[int, Token]:
        t = self.tok
        if t.kind != "number" or not t.text.isdigit():
            raise self.error(f"expected {what}, found {t.describe()}")
        self.advance()
        return int(t.text), t

    def names_until_eol(self, what: str, stop: tuple[str, ...] = ()) -> list[Token]:
        out = []
        while not self.at_eol() and not (self.tok.kind == "ident" and self.tok.text in stop):
            out.append(self.expect_name(what))
        return out

    def end_statement(self) -> None:
        if not self.at_eol():
            raise self.error(f"unexpected {self.tok.describe()}, expected end of line")
        self.advance()

    def span_from(self, start: Token) -> SourceSpan:
        last = self.tokens[self.pos - 1] if self.pos > 0 else start
        if last.span.end < start.span.start:
            last = start
        return start.span.cover(last.span)

    # document -------------------------------------------------------------------

    def parse_document(self) -> ast.Document:
        statements = []
        first = self.tok
        while self.tok.kind != "eof":
            if self.tok.kind == "newline":
                self.advance()
                continue
            statements.append(self.parse_statement())
        if statements:
            span = statements[0].span.cover(statements[-1].span)
        else:
            span = first.span
        return ast.Document(tuple(statements), span)

    def parse_statement(self):
        t = self.tok
        if t.kind != "ident" or t.text not in STATEMENT_KEYWORDS:
            raise self.error(f"expected a statement ({', '.join(STATEMENT_KEYWORDS)}), found {t.describe()}")
        node = getattr(self, f"parse_{t.text}")()
        self.end_statement()
        return node

    def parse_system(self) -> ast.SystemDecl:
        start = self.advance()
        name = self.expect_name("system name").text
        dim, dim_tok = self.expect_int("system dimension")
        if dim < 1 or dim > MAX_DIM:
            raise self.error(f"system dimension must be between 1 and {MAX_DIM}, got {dim}", dim_tok)
        labels: tuple[str, ...] = ()
        if self.at_word("labels"):
            self.advance()
            found = []
            while not self.at_eol():
                if self.tok.kind != "ident":
                    raise self.error(f"expected label, found {self.tok.describe()}")
                found.append(self.advance().text)
            labels = tuple(found)
            if not labels:
                raise self.error("expected at least one label after 'labels'")
        return ast.SystemDecl(name, dim, labels, self.span_from(start))

    def parse_state(self) -> ast.StateDecl:
        start = self.advance()
        name = self.expect_name("state name").text
        systems: tuple[str, ...] = ()
        if self.at_word("on"):
            self.advance()
            systems = self._systems_before("=")
            if not systems:
                raise self.error("expected at least one system after 'on'")
        self.expect_op("=")
        expr = self.parse_sum()
        return ast.StateDecl(name, systems, expr, self.span_from(start))

    def _systems_before(self, op: str) -> tuple[str, ...]:
        out = []
        while not self.at_op(op) and not self.at_eol():
            out.append(self.expect_name("system name").text)
        return tuple(out)

    def parse_obs(self) -> ast.ObsDecl:
        start = self.advance()
        name = self.expect_name("observable name").text
        systems = []
        while self.tok.kind == "ident" and self.tok.text not in KEYWORDS:
            systems.append(self.advance().text)
        if not systems:
            raise self.error(f"expected system name, found {self.tok.describe()}")
        kind = self.parse_obs_kind()
        return ast.ObsDecl(name, tuple(systems), kind, self.span_from(start))

    def parse_obs_kind(self):
        start = self.tok
        if self.at_word("pauli"):
            self.advance()
            t = self.tok
            if t.kind != "ident" or t.text not in ("X", "Y", "Z"):
                raise self.error(f"expected X, Y or Z after 'pauli', found {t.describe()}")
            self.advance()
            return ast.PauliKind(t.text, self.span_from(start))
        if self.at_word("spin"):
            self.advance()
            angle = self.parse_coef(allow_negative=True)
            return ast.SpinKind(angle, self.span_from(start))
        if self.at_word("pointer"):
            self.advance()
            return ast.PointerKind(self.span_from(start))
        if self.at_word("sectors"):
            self.advance()
            groups = []
            while self.at_op("{"):
                self.advance()
                entries = []
                while not self.at_op("}"):
                    entries.append(self.parse_basis_entry())
                self.expect_op("}")
                if not entries:
                    raise self.error("empty sector", self.tokens[self.pos - 1])
                groups.append(tuple(entries))
            if not groups:
                raise self.error(f"expected '{{' after 'sectors', found {self.tok.describe()}")
            return ast.SectorsKind(tuple(groups), self.span_from(start))
        if self.at_word("projector"):
            self.advance()
            state = self.expect_name("state name").text
            return ast.ProjectorKind(state, self.span_from(start))
        if self.at_word("measurement"):
            self.advance()
            observable = self.expect_name("observable name").text
            self.expect_word("ready")
            ready = self.parse_basis_entry()
            self.expect_word("targets")
            targets = []
            while not self.at_word("omega"):
                if self.at_eol():
                    raise self.error("expected 'omega', found end of line")
                targets.append(self.parse_basis_entry(stop=("omega",)))
            if not targets:
                raise self.error("expected at least one pointer target")
            self.expect_word("omega")
            omega = self.parse_coef()
            return ast.MeasurementKind(observable, ready, tuple(targets), omega, self.span_from(start))
        raise self.error(
            f"expected observable kind (pauli, spin, pointer, sectors, projector, measurement), found {start.describe()}"
        )

    def parse_basis_entry(self, stop: tuple[str, ...] = ()) -> str:
        """A basis index or label; labels may be any identifier, even a keyword."""
        t = self.tok
        if t.kind == "number" and t.text.isdigit():
            self.advance()
            return str(int(t.text))
        if t.kind == "ident" and t.text not in stop:
            self.advance()
            return t.text
        raise self.error(f"expected basis index or label, found {t.describe()}")

    def parse_classical(self) -> ast.ClassicalDecl:
        start = self.advance()
        name = self.expect_name("subsystem name").text
        self.expect_op("=")
        self.expect_op("{")
        members = [self.expect_name("observable name").text]
        while self.at_op(","):
            self.advance()
            members.append(self.expect_name("observable name").text)
        self.expect_op("}")
        return ast.ClassicalDecl(name, tuple(members), self.span_from(start))

    def parse_step(self):
        start = self.advance()
        t = self.tok
        if self.at_word("state"):
            self.advance()
            name = self.expect_name("state name").text
            return ast.StateStep(name, self.span_from(start))
        if self.at_word("mix"):
            self.advance()
            return ast.MixStep(self.parse_coef(), self.span_from(start))
        if self.at_word("report"):
            self.advance()
            cs = self.expect_name("subsystem name").text
            self.expect_word("targets")
            targets = tuple(x.text for x in self.names_until_eol("observable name", stop=("tol",)))
            if not targets:
                raise self.error("expected at least one target observable")
            tol = self.parse_tol()
            return ast.ReportStep(cs, targets, tol, self.span_from(start))
        if self.at_word("evolve"):
            self.advance()
            h = self.expect_name("observable name").text
            self.expect_word("from")
            t0 = self.parse_coef(allow_negative=True)
            self.expect_word("to")
            t1 = self.parse_coef(allow_negative=True)
            self.expect_word("samples")
            n, n_tok = self.expect_int("sample count")
            if n < 2:
                raise self.error("a sweep needs at least 2 samples", n_tok)
            track = None
            if self.at_word("track"):
                self.advance()
                cs = self.expect_name("subsystem name").text
                target = self.expect_name("observable name").text
                track = (cs, target)
            return ast.EvolveStep(h, t0, t1, n, track, self.span_from(start))
        raise self.error(f"expected step kind (state, mix, report, evolve), found {t.describe()}")

    def parse_tol(self) -> str | None:
        if not self.at_word("tol"):
            return None
        self.advance()
        t = self.tok
        if t.kind != "number":
            raise self.error(f"expected tolerance, found {t.describe()}")
        self.advance()
        return normalize_number(t.text, t.span)

    def parse_assert(self) -> ast.AssertStmt:
        start = self.advance()
        query = self.parse_query()
        self.expect_op("=")
        expected = self.parse_value()
        tol = self.parse_tol()
        note = None
        if self.at_word("note"):
            self.advance()
            t = self.tok
            if t.kind != "string":
                raise self.error(f"expected quoted note, found {t.describe()}")
            self.advance()
            note = t.text[1:-1]
        return ast.AssertStmt(query, expected, tol, note, self.span_from(start))

    def parse_value(self):
        if self.at_word("true") or self.at_word("false"):
            t = self.advance()
            return ast.BoolLit(t.text == "true", t.span)
        return self.parse_coef(allow_negative=True)

    def parse_query(self):
        start = self.tok
        if start.kind != "ident":
            raise self.error(f"expected a query, found {start.describe()}")
        func = start.text
        if func in INFO_FUNCS:
            self.advance()
            self.expect_op("(")
            target = self.parse_name_list()
            op = None
            given: tuple[str, ...] = ()
            value: tuple[int, ...] = ()
            if self.at_op("|") or self.at_op(":"):
                op = self.advance().text
                given = self.parse_name_list()
                if op == "|" and self.at_op("="):
                    self.advance()
                    vals = [self.expect_int("outcome index")[0]]
                    while self.at_op(","):
                        self.advance()
                        vals.append(self.expect_int("outcome index")[0])
                    value = tuple(vals)
            self.expect_op(")")
            node = ast.InfoQuery(func, target, op, given, value, self.span_from(start))
            self._check_query_shape(node)
            return node
        if func == "agree":
            self.advance()
            self.expect_op("(")
            a = self.expect_name("subsystem name").text
            self.expect_op(",")
            b = self.expect_name("subsystem name").text
            self.expect_op(",")
            target = self.expect_name("observable name").text
            self.expect_op(")")
            return ast.AgreeQuery(a, b, target, self.span_from(start))
        if func == "P":
            self.advance()
            self.expect_op("(")
            obs = self.expect_name("observable name").text
            self.expect_op("=")
            k = self.expect_int("outcome index")[0]
            self.expect_op(")")
            return ast.ProbQuery(obs, k, self.span_from(start))
        if func == "commutes":
            self.advance()
            self.expect_op("(")
            a = self.expect_name("observable name").text
            self.expect_op(",")
            b = self.expect_name("observable name").text
            self.expect_op(")")
            return ast.CommutesQuery(a, b, self.span_from(start))
        raise self.error(
            f"unknown query '{func}'; expected one of {', '.join(INFO_FUNCS + ('agree', 'P', 'commutes'))}"
        )

    @staticmethod
    def _check_query_shape(q: ast.InfoQuery) -> None:
        if q.func in ("H", "Imax", "fact") and q.op is not None:
            raise SdlSyntaxError(q.span, f"{q.func}() takes a single variable list")
        if q.func == "relfact" and q.op != "|":
            raise SdlSyntaxError(q.span, "relfact() needs the form relfact(target|given)")

    def parse_name_list(self) -> tuple[str, ...]:
        names = [self.expect_name("observable name").text]
        while self.at_op(","):
            self.advance()
            names.append(self.expect_name("observable name").text)
        return tuple(names)

    # coefficients and state expressions ----------------------------------------------

    def parse_coef(self, allow_negative: bool = False) -> ast.Coef:
        start = self.tok
        negative = False
        if allow_negative and self.at_op("-"):
            self.advance()
            negative = True
        atoms = [self.parse_atom()]
        ops = [""]
        while self.at_op("*") or self.at_op("/"):
            ops.append(self.advance().text)
            atoms.append(self.parse_atom())
        return ast.Coef(tuple(atoms), tuple(ops), negative, self.span_from(start))

    def at_atom(self) -> bool:
        t = self.tok
        return t.kind == "number" or (t.kind == "ident" and t.text in ("i", "pi", "sqrt", "log2"))

    def parse_atom(self) -> ast.Atom:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return ast.Atom("num", normalize_number(t.text, t.span), t.span)
        if t.kind == "ident" and t.text in ("i", "pi"):
            self.advance()
            return ast.Atom(t.text, "", t.span)
        if t.kind == "ident" and t.text in ("sqrt", "log2"):
            self.advance()
            self.expect_op("(")
            n = self.tok
            if n.kind != "number":
                raise self.error(f"expected number inside {t.text}(), found {n.describe()}")
            self.advance()
            self.expect_op(")")
            return ast.Atom(t.text, normalize_number(n.text, n.span), self.span_from(t))
        raise self.error(f"expected a number, i, pi, sqrt(...) or log2(...), found {t.describe()}")

    def parse_sum(self) -> ast.Sum:
        start = self.tok
        terms = []
        sign = "+"
        if self.at_op("-") or self.at_op("+"):
            sign = self.advance().text
        terms.append(self.parse_term(sign, start))
        while self.at_op("+") or self.at_op("-"):
            op = self.advance()
            terms.append(self.parse_term(op.text, op))
        return ast.Sum(tuple(terms), self.span_from(start))

    def parse_term(self, sign: str, start: Token) -> ast.Term:
        coef = self.parse_coef() if self.at_atom() else None
        factors = []
        while True:
            t = self.tok
            if t.kind == "ket":
                self.advance()
                factors.append(ast.KetLit(self._ket_entries(t), t.span))
            elif self.at_op("("):
                self.advance()
                body = self.parse_sum()
                self.expect_op(")")
                factors.append(ast.Group(body, self.span_from(t)))
            elif t.kind == "ident" and t.text not in KEYWORDS:
                self.advance()
                factors.append(ast.StateRef(t.text, t.span))
            else:
                break
        if not factors:
            raise self.error(f"expected a ket, a state name or '(', found {self.tok.describe()}")
        first = coef.span if coef is not None else factors[0].span
        span = first.cover(factors[-1].span)
        if start.kind == "op":
            span = start.span.cover(span)
        return ast.Term(sign, coef, tuple(factors), span)

    def _ket_entries(self, t: Token) -> tuple[str, ...]:
        body = t.text[1:-1]
        entries = tuple(e.strip() for e in body.split(","))
        for e in entries:
            if not e:
                raise SdlSyntaxError(t.span, "empty entry in ket")
            if not re.fullmatch(r"\d+|[+-]|[A-Za-z_][A-Za-z0-9_]*", e):
                raise SdlSyntaxError(t.span, f"malformed ket entry {e!r}")
        return tuple(str(int(e)) if e.isdigit() else e for e in entries)


def parse_syntax(text: str) -> ast.Document:
    """Parse without semantic checks."""
    return Parser(text).parse_document()
