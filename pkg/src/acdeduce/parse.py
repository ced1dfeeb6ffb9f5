"""Concrete syntax for terms, theory files and knowledge files.

Term syntax::

    a            name (or nullary symbol if declared, e.g. ``0``)
    ?x           variable
    f(t1, t2)    application
    a + b + c    infix use of a declared AC symbol
    <a, b>       pair(a, b)
    {m}_k        enc(m, k)
    _            hole (contexts only)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from .terms import HOLE, App, Hole, Name, Signature, Term, TermError, Var

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z0-9_]+)
  | (?P<encend>\}_)
  | (?P<op>[+*^&|⊕⊗·]+)
  | (?P<punct>[(),<>{}])
    """,
    re.VERBOSE,
)

PAIR = "pair"
ENC = "enc"


class ParseError(TermError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnknownSymbol(ParseError):
    pass


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int) -> List[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind, m.group(), pos + 1))
        pos = m.end()
    out.append(_Tok("eof", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature, line: int, allow_holes: bool):
        self.toks = _tokenize(text, line)
        self.i = 0
        self.sig = sig
        self.line = line
        self.allow_holes = allow_holes

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[_Tok] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(msg, self.line, tok.col)

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text:
            raise self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def _infix_symbol(self, tok: _Tok) -> Optional[str]:
        if tok.kind in ("op", "ident") and self.sig.is_ac(tok.text):
            return tok.text
        if tok.kind == "op":
            raise UnknownSymbol(f"unknown infix symbol {tok.text!r}", self.line, tok.col)
        return None

    def expr(self) -> Term:
        left = self.primary()
        while True:
            op = self._infix_symbol(self.peek())
            if op is None:
                return left
            self.next()
            left = self.sig.app(op, left, self.primary())

    def primary(self) -> Term:
        tok = self.next()
        if tok.kind == "var":
            return Var(tok.text[1:])
        if tok.text == "(":
            t = self.expr()
            self.expect(")")
            return t
        if tok.text == "<":
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect(">")
            return self._apply(PAIR, [a, b], tok)
        if tok.text == "{":
            m = self.expr()
            self.expect("}_")
            k = self.primary()
            return self._apply(ENC, [m, k], tok)
        if tok.kind == "ident":
            if tok.text == "_" and self.allow_holes:
                return HOLE
            if self.peek().text == "(":
                self.next()
                args = []
                if self.peek().text != ")":
                    args.append(self.expr())
                    while self.peek().text == ",":
                        self.next()
                        args.append(self.expr())
                self.expect(")")
                return self._apply(tok.text, args, tok)
            sym = self.sig.symbols.get(tok.text)
            if sym is not None:
                return self._apply(tok.text, [], tok)
            return Name(tok.text)
        raise self.error(f"unexpected {tok.text or 'end of input'!r}", tok)

    def _apply(self, head: str, args: List[Term], tok: _Tok) -> Term:
        sym = self.sig.symbols.get(head)
        if sym is None:
            raise UnknownSymbol(f"unknown symbol {head!r}", self.line, tok.col)
        if self.sig.is_ac(head):
            if len(args) < 2:
                raise ParseError(f"{head} needs at least 2 arguments", self.line, tok.col)
        elif len(args) != sym.arity:
            raise ParseError(
                f"{head} expects {sym.arity} arguments, got {len(args)}", self.line, tok.col
            )
        if any(type(a) is Hole for a in args):
            return App(head, args)
        return self.sig.app(head, *args)


def parse_term(text: str, sig: Signature, line: int = 1) -> Term:
    p = _Parser(text, sig, line, allow_holes=False)
    t = p.expr()
    if p.peek().kind != "eof":
        raise p.error(f"trailing input {p.peek().text!r}")
    return t


def parse_context(text: str, sig: Signature, line: int = 1) -> Term:
    """Parse a context term where ``_`` denotes a hole (kept uncanonicalized)."""
    p = _Parser(text, sig, line, allow_holes=True)
    t = p.expr()
    if p.peek().kind != "eof":
        raise p.error(f"trailing input {p.peek().text!r}")
    return t


def format_term(t: Term, sig: Signature) -> str:
    if type(t) is Name or type(t) is Var:
        return ("?" if type(t) is Var else "") + t.id
    if type(t) is Hole:
        return "_"
    if sig.is_ac(t.head) and len(t.args) >= 2:
        parts = []
        for a in t.args:
            s = format_term(a, sig)
            if type(a) is App and sig.is_ac(a.head) and len(a.args) >= 2:
                s = f"({s})"
            parts.append(s)
        sep = f" {t.head} "
        return sep.join(parts)
    if not t.args:
        return t.head
    return f"{t.head}({', '.join(format_term(a, sig) for a in t.args)})"


# -- files ----------------------------------------------------------------


def _lines(text: str) -> Iterable[Tuple[int, str]]:
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


@dataclass
class Knowledge:
    public: List[str]
    private: List[str]
    terms: List[Term]


def parse_knowledge(text: str, sig: Signature) -> Tuple[Signature, Knowledge]:
    """Parse ``name <id> public|private`` and ``know <term>`` lines.

    Returns the signature extended with the public names and the known terms.
    """
    public, private, raw_terms = [], [], []
    for n, line in _lines(text):
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "name":
            parts = rest.split()
            if len(parts) != 2 or parts[1] not in ("public", "private"):
                raise ParseError("expected 'name <id> public|private'", n, 1)
            (public if parts[1] == "public" else private).append(parts[0])
        elif word == "know":
            raw_terms.append((n, rest))
        else:
            raise ParseError(f"unknown directive {word!r}", n, 1)
    sig = sig.with_public(public)
    terms = []
    for n, t in raw_terms:
        term = parse_term(t, sig, n)
        if any(type(s) is Var for s in _walk(term)):
            raise ParseError("known terms must be ground", n, 1)
        terms.append(term)
    return sig, Knowledge(public, private, terms)


def _walk(t: Term):
    yield t
    if type(t) is App:
        for a in t.args:
            yield from _walk(a)
