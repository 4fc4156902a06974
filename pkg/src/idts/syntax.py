"""Surface syntax: a line-oriented spec-file format, its parser and printer.

::

    # comments run to end of line; every statement ends with '.'
    option allow-constructor-rules .
    inductive nat = zero : nat | succ : nat -> nat .
    symbol plus : nat -> nat -> nat arity 2 status lex(mul 1, mul 2) .
    precedence plus > succ .
    rule plus(X, succ(Y)) --> succ(plus(X, Y)) .
    rule insert(X, cons(Y, L)) --> cons(X, cons(Y, L)) if inf(X, Y) = true .
    term two = succ(succ(zero)) .

Identifiers that are not declared symbols and not bound by ``\\x:T.``
are rule variables; their types are inferred per statement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, TermTypeError
from .rewriting import Rule, RuleSystem
from .signature import FunctionDecl, InductiveDecl, Signature, Status, seal
from .terms import Abs, App, FunApp, Symbol, Term, Var, show
from .types import Arrow, Ind, Type, split_arrow

RESERVED_PREFIX = "bot_"
KEYWORDS = {"inductive", "symbol", "precedence", "rule", "term", "option",
            "arity", "status", "lex", "mul", "if"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<rarrow>-->)
  | (?P<arrow>->)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[()\[\],.:=|>~\\-])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    tokens, line, start, pos = [], 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, m.start() - start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - start + 1))
    return tokens


# -- raw syntax trees ---------------------------------------------------------------

@dataclass(frozen=True)
class PName:
    name: str
    tok: Token


@dataclass(frozen=True)
class PCall:
    name: str
    args: tuple
    tok: Token


@dataclass(frozen=True)
class PApp:
    fun: object
    arg: object
    tok: Token


@dataclass(frozen=True)
class PLam:
    name: str
    type: Type
    body: object
    tok: Token


@dataclass
class SpecFile:
    options: list = field(default_factory=list)
    inductives: list = field(default_factory=list)
    functions: list = field(default_factory=list)
    strict: list = field(default_factory=list)
    equivalent: list = field(default_factory=list)
    rules: list = field(default_factory=list)
    terms: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def signature(self) -> Signature:
        return Signature(tuple(self.inductives), tuple(self.functions),
                         tuple(self.strict), tuple(self.equivalent),
                         frozenset(self.options))

    def sealed_signature(self) -> Signature:
        return seal(self.signature())

    def rule_system(self) -> RuleSystem:
        return RuleSystem(self.sealed_signature(), self.rules)

    def abstract(self) -> tuple:
        """Order-insensitive view used for round-trip comparisons."""
        return (sorted(self.options), tuple(self.inductives), tuple(self.functions),
                sorted(self.strict), sorted(self.equivalent), tuple(self.rules),
                tuple(sorted(self.terms.items(), key=lambda kv: kv[0])))


# -- parser --------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected '{text}', found '{found}'")
        return self.next()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            raise self.error(f"expected {what}, found '{self.tok.text or 'end of input'}'")
        return self.next()

    def integer(self) -> int:
        if self.tok.kind != "int":
            raise self.error(f"expected a number, found '{self.tok.text}'")
        return int(self.next().text)

    # types
    def type_(self) -> Type:
        left = self.type_atom()
        if self.at("->"):
            self.next()
            return Arrow(left, self.type_())
        return left

    def type_atom(self) -> Type:
        if self.at("("):
            self.next()
            t = self.type_()
            self.expect(")")
            return t
        return Ind(self.ident("type name").text)

    # terms
    def term(self):
        items = []
        while True:
            if self.at("\\"):
                items.append(self.lam())
                break
            atom = self.atom()
            if atom is None:
                break
            items.append(atom)
        if not items:
            raise self.error(f"expected a term, found '{self.tok.text or 'end of input'}'")
        head = items[0]
        for a in items[1:]:
            head = PApp(head, a, getattr(a, "tok", None))
        return head

    def lam(self):
        start = self.expect("\\")
        name = self.ident("bound variable").text
        self.expect(":")
        ty = self.type_()
        self.expect(".")
        return PLam(name, ty, self.term(), start)

    def atom(self):
        t = self.tok
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.next()
            nxt = self.tok
            if (self.at("(") and nxt.line == t.line
                    and nxt.col == t.col + len(t.text)):
                self.next()
                args = []
                if not self.at(")"):
                    args.append(self.term())
                    while self.at(","):
                        self.next()
                        args.append(self.term())
                self.expect(")")
                return PCall(t.text, tuple(args), t)
            return PName(t.text, t)
        if self.at("("):
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        return None

    # statements
    def statements(self):
        while self.tok.kind != "eof":
            kw = self.tok
            if kw.text == "inductive":
                yield self.inductive_stmt()
            elif kw.text == "symbol":
                yield self.symbol_stmt()
            elif kw.text == "precedence":
                yield self.precedence_stmt()
            elif kw.text == "rule":
                yield self.rule_stmt()
            elif kw.text == "term":
                yield self.term_stmt()
            elif kw.text == "option":
                yield self.option_stmt()
            else:
                raise self.error(f"expected a statement keyword, found '{kw.text}'")

    def end(self):
        if not self.at("."):
            found = self.tok.text or "end of input"
            raise self.error(f"unterminated statement: expected '.', found '{found}'")
        self.next()

    def inductive_stmt(self):
        kw = self.next()
        name = self.ident("inductive type name")
        ctors = []
        if self.at("="):
            self.next()
            if not self.at("."):
                ctors.append(self.ctor())
                while self.at("|"):
                    self.next()
                    ctors.append(self.ctor())
        self.end()
        return ("inductive", kw, name.text, ctors)

    def ctor(self):
        name = self.ident("constructor name")
        self.expect(":")
        return name, self.type_()

    def symbol_stmt(self):
        kw = self.next()
        name = self.ident("symbol name")
        self.expect(":")
        ty = self.type_()
        self.expect("arity")
        arity = self.integer()
        status = None
        if self.at("status"):
            self.next()
            self.expect("lex")
            self.expect("(")
            groups = [self.group()]
            while self.at(","):
                self.next()
                groups.append(self.group())
            self.expect(")")
            status = Status(tuple(groups))
        self.end()
        return ("symbol", kw, name, ty, arity, status)

    def group(self):
        self.expect("mul")
        idx = [self.integer()]
        while self.tok.kind == "int":
            idx.append(self.integer())
        return tuple(idx)

    def precedence_stmt(self):
        kw = self.next()
        a = self.ident("symbol name")
        if not (self.at(">") or self.at("~")):
            raise self.error("expected '>' or '~' in precedence")
        op = self.next().text
        b = self.ident("symbol name")
        self.end()
        return ("precedence", kw, a, op, b)

    def option_stmt(self):
        kw = self.next()
        parts = [self.ident("option name").text]
        while self.at("-"):
            self.next()
            parts.append(self.ident("option name").text)
        self.end()
        return ("option", kw, "-".join(parts))

    def rule_stmt(self):
        kw = self.next()
        lhs = self.term()
        self.expect("-->")
        rhs = self.term()
        cond = []
        if self.at("if"):
            self.next()
            cond.append(self.equation())
            while self.at(","):
                self.next()
                cond.append(self.equation())
        self.end()
        return ("rule", kw, lhs, rhs, cond)

    def equation(self):
        u = self.term()
        self.expect("=")
        return u, self.term()

    def term_stmt(self):
        kw = self.next()
        name = self.ident("term name")
        self.expect("=")
        body = self.term()
        self.end()
        return ("term", kw, name.text, body)


# -- elaboration: raw trees to typed terms -------------------------------------------

@dataclass(frozen=True)
class _Meta:
    n: int


class _Elaborator:
    """Per-statement type inference for rule variables, then typed term building."""

    def __init__(self, symbols: dict):
        self.symbols = symbols
        self.subst = {}
        self.counter = 0
        self.free = {}        # name -> type (maybe meta)
        self.first_use = {}

    def fresh(self):
        self.counter += 1
        return _Meta(self.counter)

    def resolve(self, t):
        while isinstance(t, _Meta) and t in self.subst:
            t = self.subst[t]
        if isinstance(t, Arrow):
            return Arrow(self.resolve(t.domain), self.resolve(t.codomain))
        return t

    def occurs(self, m, t):
        t = self.resolve(t)
        if t == m:
            return True
        return isinstance(t, Arrow) and (self.occurs(m, t.domain) or self.occurs(m, t.codomain))

    def unify(self, a, b, tok, what):
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, _Meta):
            if self.occurs(a, b):
                raise ParseError(f"{what}: infinite type", tok.line, tok.col)
            self.subst[a] = b
            return
        if isinstance(b, _Meta):
            self.unify(b, a, tok, what)
            return
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.domain, b.domain, tok, what)
            self.unify(a.codomain, b.codomain, tok, what)
            return
        raise ParseError(f"{what}: type mismatch, {_show_type(a)} vs {_show_type(b)}",
                         tok.line, tok.col)

    def infer(self, p, env):
        if isinstance(p, PLam):
            return Arrow(p.type, self.infer(p.body, {**env, p.name: p.type}))
        if isinstance(p, PApp):
            ft = self.resolve(self.infer(p.fun, env))
            at = self.infer(p.arg, env)
            tok = _tok(p)
            if isinstance(ft, Ind):
                raise ParseError(f"cannot apply a term of type {ft}", tok.line, tok.col)
            res = self.fresh()
            self.unify(ft, Arrow(at, res), tok, "application")
            return res
        if isinstance(p, PCall):
            sym = self.symbols.get(p.name)
            if sym is None:
                raise ParseError(f"unknown function symbol {p.name}", p.tok.line, p.tok.col)
            if p.name in env:
                raise ParseError(f"{p.name} is a bound variable, not a symbol", p.tok.line, p.tok.col)
            if len(p.args) != sym.arity:
                raise ParseError(f"{p.name} expects {sym.arity} argument(s), got {len(p.args)}",
                                 p.tok.line, p.tok.col)
            for k, (a, t) in enumerate(zip(p.args, sym.arg_types), 1):
                self.unify(self.infer(a, env), t, _tok(a) or p.tok,
                           f"argument {k} of {p.name}")
            return sym.result
        name = p.name
        if name in env:
            return env[name]
        sym = self.symbols.get(name)
        if sym is not None:
            if sym.arity != 0:
                raise ParseError(f"symbol {name} of arity {sym.arity} must be applied to all "
                                 f"its arguments", p.tok.line, p.tok.col)
            return sym.result
        if name.startswith(RESERVED_PREFIX):
            raise ParseError(f"identifier {name} uses the reserved prefix {RESERVED_PREFIX}",
                             p.tok.line, p.tok.col)
        if name not in self.free:
            self.free[name] = self.fresh()
            self.first_use[name] = p.tok
        return self.free[name]

    def free_var(self, name):
        t = self.resolve(self.free[name])
        if _has_meta(t):
            tok = self.first_use[name]
            raise ParseError(f"cannot infer the type of variable {name}", tok.line, tok.col)
        return Var(name, t)

    def build(self, p, env):
        try:
            if isinstance(p, PLam):
                x = Var(p.name, p.type)
                return Abs(x, self.build(p.body, {**env, p.name: x}))
            if isinstance(p, PApp):
                return App(self.build(p.fun, env), self.build(p.arg, env))
            if isinstance(p, PCall):
                return FunApp(self.symbols[p.name], tuple(self.build(a, env) for a in p.args))
            if p.name in env:
                return env[p.name]
            if p.name in self.symbols:
                return FunApp(self.symbols[p.name], ())
            return self.free_var(p.name)
        except TermTypeError as exc:
            tok = _tok(p)
            raise ParseError(str(exc), tok.line if tok else None, tok.col if tok else None)


def _tok(p):
    if isinstance(p, PApp):
        return _tok(p.fun)
    return getattr(p, "tok", None)


def _has_meta(t) -> bool:
    if isinstance(t, _Meta):
        return True
    return isinstance(t, Arrow) and (_has_meta(t.domain) or _has_meta(t.codomain))


def _show_type(t) -> str:
    if isinstance(t, _Meta):
        return f"?{t.n}"
    if isinstance(t, Arrow):
        dom = _show_type(t.domain)
        if isinstance(t.domain, Arrow):
            dom = f"({dom})"
        return f"{dom} -> {_show_type(t.codomain)}"
    return str(t)


def _split_at(ty: Type, arity: int, tok: Token):
    args = []
    for _ in range(arity):
        if not isinstance(ty, Arrow):
            raise ParseError(f"type has fewer than {arity} arguments", tok.line, tok.col)
        args.append(ty.domain)
        ty = ty.codomain
    return tuple(args), ty


def elaborate_term(raw, symbols: dict, variables: Optional[dict] = None) -> Term:
    el = _Elaborator(symbols)
    for name, v in (variables or {}).items():
        el.free[name] = v.type
    el.infer(raw, {})
    return el.build(raw, {})


def parse(text: str) -> SpecFile:
    """Parse a spec file.  Raises :class:`ParseError` with line/column."""
    p = _Parser(text)
    stmts = list(p.statements())
    spec = SpecFile()
    symbols = {}

    def declare(sym, tok):
        if sym.name in symbols:
            raise ParseError(f"symbol {sym.name} declared twice", tok.line, tok.col)
        if sym.name.startswith(RESERVED_PREFIX):
            raise ParseError(f"symbol name {sym.name} uses the reserved prefix "
                             f"{RESERVED_PREFIX}", tok.line, tok.col)
        symbols[sym.name] = sym

    inductive_names = {s[2] for s in stmts if s[0] == "inductive"}
    for s in stmts:
        kind, kw = s[0], s[1]
        if kind == "option":
            spec.options.append(s[2])
        elif kind == "inductive":
            _, _, name, ctors = s
            decls = []
            for ctok, ty in ctors:
                args, res = split_arrow(ty)
                _check_type_names(ty, inductive_names, ctok)
                if res != Ind(name):
                    raise ParseError(f"constructor {ctok.text} must produce {name}, not {res}",
                                     ctok.line, ctok.col)
                sym = Symbol(ctok.text, args, res, constructor=True)
                declare(sym, ctok)
                decls.append(sym)
            spec.inductives.append(InductiveDecl(name, tuple(decls)))
        elif kind == "symbol":
            _, _, ntok, ty, arity, status = s
            _check_type_names(ty, inductive_names, ntok)
            args, res = _split_at(ty, arity, ntok)
            sym = Symbol(ntok.text, args, res)
            declare(sym, ntok)
            spec.functions.append(FunctionDecl(sym, status))
    for s in stmts:
        kind = s[0]
        if kind == "precedence":
            _, _, a, op, b = s
            for t in (a, b):
                if t.text not in symbols:
                    raise ParseError(f"unknown symbol {t.text} in precedence", t.line, t.col)
            (spec.strict if op == ">" else spec.equivalent).append((a.text, b.text))
        elif kind == "rule":
            _, kw, lhs, rhs, cond = s
            el = _Elaborator(symbols)
            el.unify(el.infer(lhs, {}), el.infer(rhs, {}), kw, "rule sides")
            for u, v in cond:
                el.unify(el.infer(u, {}), el.infer(v, {}), _tok(u) or kw, "condition")
            rule = Rule(el.build(lhs, {}), el.build(rhs, {}),
                        tuple((el.build(u, {}), el.build(v, {})) for u, v in cond))
            spec.rules.append(rule)
            for name in el.free:
                if name[:1].islower():
                    tok = el.first_use[name]
                    spec.warnings.append(
                        f"{tok.line}:{tok.col}: lowercase rule variable {name} "
                        f"is not a declared symbol")
        elif kind == "term":
            _, kw, name, body = s
            spec.terms[name] = elaborate_term(body, symbols)
    return spec


def _check_type_names(ty, names, tok):
    for leaf in _leaves(ty):
        if leaf not in names:
            raise ParseError(f"undeclared inductive type {leaf}", tok.line, tok.col)


def _leaves(ty):
    if isinstance(ty, Ind):
        yield ty.name
    else:
        yield from _leaves(ty.domain)
        yield from _leaves(ty.codomain)


def parse_term(text: str, signature: Signature) -> Term:
    """Parse a single term against a signature (free variables allowed)."""
    p = _Parser(text)
    raw = p.term()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected '{p.tok.text}' after term")
    symbols = {s.name: s for s in signature.symbols}
    return elaborate_term(raw, symbols)


# -- printing --------------------------------------------------------------------------

def print_type(t: Type) -> str:
    return str(t)


def print_term(t: Term) -> str:
    return show(t)


def print_rule(r: Rule) -> str:
    return f"rule {r} ."


def print_spec(spec: SpecFile) -> str:
    out = []
    for opt in spec.options:
        out.append(f"option {opt} .")
    for ind in spec.inductives:
        ctors = " | ".join(f"{c.name} : {c.type}" for c in ind.constructors)
        out.append(f"inductive {ind.name} = {ctors} ." if ctors else f"inductive {ind.name} .")
    for fd in spec.functions:
        out.append(print_symbol(fd))
    for a, b in spec.strict:
        out.append(f"precedence {a} > {b} .")
    for a, b in spec.equivalent:
        out.append(f"precedence {a} ~ {b} .")
    for r in spec.rules:
        out.append(print_rule(r))
    for name, t in spec.terms.items():
        out.append(f"term {name} = {show(t)} .")
    return "\n".join(out) + "\n"


def print_symbol(fd: FunctionDecl) -> str:
    text = f"symbol {fd.name} : {fd.symbol.type} arity {fd.arity}"
    if fd.status is not None:
        text += f" status {fd.status}"
    return text + " ."


def spec_from(signature: Signature, rules=(), terms=None) -> SpecFile:
    return SpecFile(sorted(signature.flags), list(signature.inductives),
                    list(signature.functions), list(signature.strict),
                    list(signature.equivalent), list(rules), dict(terms or {}))


def load(path) -> SpecFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
