"""The ``.mtt`` surface language and command line.

A source file is an optional mode-theory block followed by declarations::

    theory { modes n m; mod mu : n -> m; decider free }

    def k @m : Pi (mu | x : Bool) -> Mod mu Bool := \\(mu | x) -> box mu x

Shipped theories can be selected by name (``theory walking``) or forced
from the command line with ``--mode-theory``.  Surface terms use names;
parsing resolves them to de Bruijn indices, attaches the binder's modality
as the identity cell on bare occurrences (``x^CELL`` for explicit keys),
and splices the bodies of earlier ``def``s in place of their names, so the
kernel only ever sees closed declarations.

Identity modalities written bare (``id``) resolve at the lexically
enclosing mode; ``id(m)`` names a mode explicitly.  Exit codes: 0 success,
1 type error, 2 parse error.  Diagnostics go to stderr; all stdout output
is a deterministic function of the input.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass

from . import check as C
from . import normal as N
from . import syntax as S
from .modeth import (
    Cell2,
    CellExpr,
    CellGen,
    CellVComp,
    CellWhiskL,
    CellWhiskR,
    ModeError,
    ModeTheory,
    Modality,
    RewriteDecider,
    FreeDecider,
    adjoint,
    cell_atoms,
    cell_boundary,
    compose_mod,
    id_cell,
    id_mod,
    pointed,
    trivial,
    validate,
    walking,
)
from .normal import (
    Ne,
    Nf,
    NfTy,
)
from .syntax import Term


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(msg)
        self.msg = msg
        self.line = line
        self.col = col


SHIPPED = {
    "trivial": trivial,
    "walking": walking,
    "pointed": pointed,
    "adjoint": adjoint,
}


# ---------------------------------------------------------------------------
# Tokens


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "num", "op", "eof"
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>--[^\n]*)
    | (?P<op>:=|->|=>|~>|[(){}\[\]|,;:.*\\^<>@=])
    | (?P<num>[0-9]+)
    | (?P<ident>iso-inv|[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            out.append(Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# ---------------------------------------------------------------------------
# Parser


@dataclass(frozen=True)
class Decl:
    name: str
    mode: str
    ty: Term
    body: Term
    line: int
    col: int


_TERM_KEYWORDS = {
    "true",
    "false",
    "box",
    "letbox",
    "if",
    "then",
    "else",
    "in",
    "iso",
    "iso-inv",
    "PiC",
    "SigC",
    "BoolC",
    "ModC",
    "Pi",
    "Sig",
    "Bool",
    "Uni",
    "Mod",
    "dec",
    "def",
    "theory",
    "id",
}


class Parser:
    def __init__(self, toks: list[Token], mt: ModeTheory):
        self.toks = toks
        self.pos = 0
        self.mt = mt
        self.defs: dict[str, Decl] = {}

    # -- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "eof"

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind == "eof":
            got = t.text if t.kind != "eof" else "end of input"
            raise ParseError(f"expected {text!r}, found {got!r}", t.line, t.col)
        return self.advance()

    def expect_ident(self, what: str) -> Token:
        t = self.peek()
        if t.kind != "ident":
            got = t.text if t.kind != "eof" else "end of input"
            raise ParseError(f"expected {what}, found {got!r}", t.line, t.col)
        return self.advance()

    def fail(self, msg: str) -> "ParseError":
        t = self.peek()
        return ParseError(msg, t.line, t.col)

    # -- modalities

    def parse_mode(self) -> str:
        t = self.expect_ident("a mode name")
        if t.text not in self.mt.modes:
            raise ParseError(f"unknown mode {t.text!r}", t.line, t.col)
        return t.text

    def parse_modexpr(self, amb: "str | None") -> Modality:
        """A modality: ``id``, ``id(m)``, or generator names dotted in
        composition order (last applied leftmost)."""
        t = self.peek()
        if t.text == "id":
            self.advance()
            if self.accept("("):
                mode = self.parse_mode()
                self.expect(")")
                return id_mod(mode)
            if amb is None:
                raise ParseError("bare 'id' needs a mode here: write id(<mode>)", t.line, t.col)
            return id_mod(amb)
        names = [self.expect_ident("a modality name").text]
        while self.peek().text == "." and self.peek(1).kind == "ident" and self.peek(1).text in self.mt.modality_gens:
            self.advance()
            names.append(self.advance().text)
        word = tuple(reversed(names))  # application order
        cur: "str | None" = None
        for g in word:
            if g not in self.mt.modality_gens:
                raise ParseError(f"unknown modality {g!r}", t.line, t.col)
            src, tgt = self.mt.modality_gens[g]
            if cur is not None and src != cur:
                raise ParseError(
                    f"modality word does not compose: {g!r} starts at {src}, "
                    f"previous part ended at {cur}",
                    t.line,
                    t.col,
                )
            if cur is None:
                start = src
            cur = tgt
        return Modality(start, cur, word)

    def _one_gen(self, name: str, tok: Token) -> Modality:
        if name not in self.mt.modality_gens:
            raise ParseError(f"unknown modality {name!r}", tok.line, tok.col)
        src, tgt = self.mt.modality_gens[name]
        return Modality(src, tgt, (name,))

    # -- 2-cells (after ^)

    def parse_cell(self, ann: Modality) -> Cell2:
        """grammar: cell := part ('.' part)* ; part := NAME '<' part
        | unit ('>' NAME)* ; unit := '(' cell ')' | NAME | 'id'."""
        t = self.peek()
        expr = self._cell_expr()
        if isinstance(expr, str):  # the whole cell is the bare identity
            return id_cell(ann)
        try:
            src, tgt = cell_boundary(self.mt, expr)
        except ModeError as e:
            raise ParseError(f"ill-formed 2-cell: {e}", t.line, t.col) from None
        return Cell2(src, tgt, expr)

    def _cell_expr(self) -> "CellExpr | str":
        first = self._cell_part()
        if isinstance(first, str):
            if self.at("."):
                raise self.fail("bare 'id' cannot appear inside a composite cell")
            return first
        out = first
        while self.accept("."):
            nxt = self._cell_part()
            if isinstance(nxt, str):
                raise self.fail("bare 'id' cannot appear inside a composite cell")
            out = CellVComp(out, nxt)  # left side applied later
        return out

    def _cell_part(self) -> "CellExpr | str":
        t = self.peek()
        if t.kind == "ident" and t.text != "id" and self.peek(1).text == "<":
            self.advance()
            self.advance()
            inner = self._cell_part()
            if isinstance(inner, str):
                raise self.fail("bare 'id' cannot appear inside a composite cell")
            return CellWhiskL(self._one_gen(t.text, t), inner)
        base = self._cell_unit()
        while self.at(">"):
            if isinstance(base, str):
                raise self.fail("bare 'id' cannot appear inside a composite cell")
            self.advance()
            g = self.expect_ident("a modality name")
            base = CellWhiskR(base, self._one_gen(g.text, g))
        return base

    def _cell_unit(self) -> "CellExpr | str":
        t = self.peek()
        if self.accept("("):
            inner = self._cell_expr()
            self.expect(")")
            if isinstance(inner, str):
                raise self.fail("bare 'id' cannot appear inside a composite cell")
            return inner
        if t.text == "id":
            self.advance()
            return "id"
        name = self.expect_ident("a 2-cell name").text
        if name not in self.mt.cell_gens:
            raise ParseError(f"unknown 2-cell {name!r}", t.line, t.col)
        return CellGen(name)

    # -- binders

    def _binder(self, amb: str) -> "tuple[Modality, str]":
        """``( mod | x`` or ``( x`` after the opening paren is consumed by
        the caller's lookahead decision; here we parse from '(' inclusive."""
        self.expect("(")
        save = self.pos
        try:
            mod = self.parse_modexpr(amb)
            if self.at("|"):
                self.advance()
                name = self.expect_ident("a variable name").text
                return mod, name
        except ParseError:
            pass
        self.pos = save
        name = self.expect_ident("a variable name").text
        return id_mod(amb), name

    def _guard_mode(self, mod: Modality, amb: str, tok: Token) -> None:
        if mod.mode_tgt != amb:
            raise ParseError(
                f"modality {mod} lands in mode {mod.mode_tgt}, "
                f"but the ambient mode is {amb}",
                tok.line,
                tok.col,
            )

    # -- types

    def parse_type(self, amb: str, scope: list) -> Term:
        t = self.peek()
        if self.accept("Pi"):
            mod, name = self._binder(amb)
            self._guard_mode(mod, amb, t)
            self.expect(":")
            dom = self.parse_type(mod.mode_src, scope)
            self.expect(")")
            self.expect("->")
            cod = self.parse_type(amb, scope + [(name, mod)])
            return S.Pi(mod, dom, cod)
        if self.accept("Sig"):
            self.expect("(")
            name = self.expect_ident("a variable name").text
            self.expect(":")
            fst = self.parse_type(amb, scope)
            self.expect(")")
            self.expect("*")
            snd = self.parse_type(amb, scope + [(name, id_mod(amb))])
            return S.Sig(fst, snd)
        if self.accept("Bool"):
            return S.Bool()
        if self.accept("Uni"):
            return S.Uni()
        if self.accept("Mod"):
            mod = self.parse_modexpr(amb)
            self._guard_mode(mod, amb, t)
            return S.Mod(mod, self.parse_type(mod.mode_src, scope))
        if self.accept("dec"):
            return S.Dec(self.parse_atom(amb, scope))
        if self.accept("("):
            inner = self.parse_type(amb, scope)
            self.expect(")")
            return inner
        raise self.fail(f"expected a type, found {t.text!r}")

    # -- terms

    def parse_term(self, amb: str, scope: list) -> Term:
        t = self.peek()
        if self.accept("\\"):
            if self.at("("):
                mod, name = self._binder(amb)
                self._guard_mode(mod, amb, t)
                self.expect(")")
            else:
                mod = id_mod(amb)
                name = self.expect_ident("a variable name").text
            self.expect("->")
            return S.Lam(self.parse_term(amb, scope + [(name, mod)]))
        if self.accept("letbox"):
            self.expect("(")
            mu = self.parse_modexpr(amb)
            self._guard_mode(mu, amb, t)
            self.expect("|")
            nu = self.parse_modexpr(mu.mode_src)
            if nu.mode_tgt != mu.mode_src:
                raise ParseError(
                    f"eliminated modality {nu} lands in mode {nu.mode_tgt}, "
                    f"but the lock opens mode {mu.mode_src}",
                    t.line,
                    t.col,
                )
            self.expect(")")
            self.expect("[")
            bname = self.expect_ident("a variable name").text
            self.expect(".")
            motive = self.parse_type(amb, scope + [(bname, mu)])
            self.expect("]")
            yname = self.expect_ident("a variable name").text
            self.expect("=")
            scrut = self.parse_term(mu.mode_src, scope)
            self.expect("in")
            branch = self.parse_term(amb, scope + [(yname, compose_mod(mu, nu))])
            return S.LetMod(mu, nu, motive, scrut, branch)
        if self.accept("if"):
            self.expect("[")
            bname = self.expect_ident("a variable name").text
            self.expect(".")
            motive = self.parse_type(amb, scope + [(bname, id_mod(amb))])
            self.expect("]")
            scrut = self.parse_term(amb, scope)
            self.expect("then")
            tcase = self.parse_term(amb, scope)
            self.expect("else")
            fcase = self.parse_term(amb, scope)
            return S.If(motive, tcase, fcase, scrut)
        if self.accept("PiC"):
            mod, name = self._binder(amb)
            self._guard_mode(mod, amb, t)
            self.expect(":")
            dom = self.parse_term(mod.mode_src, scope)
            self.expect(")")
            self.expect("->")
            cod = self.parse_term(amb, scope + [(name, mod)])
            return S.PiCode(mod, dom, cod)
        if self.accept("SigC"):
            self.expect("(")
            name = self.expect_ident("a variable name").text
            self.expect(":")
            fst = self.parse_term(amb, scope)
            self.expect(")")
            self.expect("*")
            snd = self.parse_term(amb, scope + [(name, id_mod(amb))])
            return S.SigCode(fst, snd)
        return self.parse_app(amb, scope)

    _ATOM_START = {"true", "false", "box", "iso", "iso-inv", "BoolC", "ModC", "("}

    def parse_app(self, amb: str, scope: list) -> Term:
        out = self.parse_atom(amb, scope)
        while True:
            t = self.peek()
            if t.text in self._ATOM_START or (
                t.kind == "ident" and t.text not in _TERM_KEYWORDS
            ):
                out = S.App(out, self.parse_atom(amb, scope))
            else:
                return out

    def parse_atom(self, amb: str, scope: list) -> Term:
        t = self.peek()
        out: Term
        if self.accept("true"):
            out = S.True_()
        elif self.accept("false"):
            out = S.False_()
        elif self.accept("BoolC"):
            out = S.BoolCode()
        elif self.accept("box"):
            mod = self.parse_modexpr(amb)
            self._guard_mode(mod, amb, t)
            out = S.MkBox(mod, self.parse_atom(mod.mode_src, scope))
        elif self.accept("ModC"):
            mod = self.parse_modexpr(amb)
            self._guard_mode(mod, amb, t)
            out = S.ModCode(mod, self.parse_atom(mod.mode_src, scope))
        elif self.accept("iso"):
            out = S.DecIso(self.parse_atom(amb, scope))
        elif self.accept("iso-inv"):
            out = S.DecIsoInv(self.parse_atom(amb, scope))
        elif self.accept("("):
            out = self.parse_term(amb, scope)
            if self.accept(","):
                out = S.Pair(out, self.parse_term(amb, scope))
            self.expect(")")
        elif t.kind == "ident" and t.text not in _TERM_KEYWORDS:
            self.advance()
            out = self._name_ref(t, amb, scope)
        else:
            raise self.fail(f"expected a term, found {t.text!r}")
        while self.peek().text == "." and self.peek(1).kind == "num":
            self.advance()
            proj = self.advance()
            if proj.text == "1":
                out = S.Proj1(out)
            elif proj.text == "2":
                out = S.Proj2(out)
            else:
                raise ParseError(
                    f"projections are .1 and .2, found .{proj.text}",
                    proj.line,
                    proj.col,
                )
        return out

    def _name_ref(self, t: Token, amb: str, scope: list) -> Term:
        for back, (name, ann) in enumerate(reversed(scope)):
            if name == t.text:
                if self.accept("^"):
                    return S.Var(back, self.parse_cell(ann))
                return S.Var(back, id_cell(ann))
        if t.text in self.defs:
            if self.at("^"):
                raise ParseError(
                    f"cannot key the definition {t.text!r}: keys apply to variables",
                    t.line,
                    t.col,
                )
            d = self.defs[t.text]
            if d.mode != amb:
                raise ParseError(
                    f"definition {t.text!r} lives at mode {d.mode}, "
                    f"used at mode {amb}",
                    t.line,
                    t.col,
                )
            if isinstance(d.body, (S.Lam, S.Pair, S.DecIsoInv)):
                # Checking-only introductions cannot head an application, so
                # attach the declared type through a Bool elimination that
                # computes away: if [_. ty] true then body else body.
                return S.If(d.ty, d.body, d.body, S.True_())
            return d.body
        raise ParseError(f"unknown identifier {t.text!r}", t.line, t.col)

    # -- theory block

    def parse_theory(self) -> ModeTheory:
        t = self.expect("theory")
        if self.peek().kind == "ident" and self.peek().text != "{":
            name = self.advance()
            if name.text not in SHIPPED:
                raise ParseError(
                    f"unknown mode theory {name.text!r} "
                    f"(shipped: {', '.join(sorted(SHIPPED))})",
                    name.line,
                    name.col,
                )
            return SHIPPED[name.text]()
        self.expect("{")
        modes: list[str] = []
        mods: dict[str, tuple[str, str]] = {}
        cells: dict[str, tuple[Modality, Modality]] = {}
        rules: list[tuple[tuple, tuple]] = []
        kind = "free"
        while not self.accept("}"):
            item = self.expect_ident("a theory item")
            if item.text == "modes":
                while self.peek().kind == "ident":
                    modes.append(self.advance().text)
                    self.accept(",")
                self.expect(";")
            elif item.text == "mod":
                g = self.expect_ident("a modality name").text
                self.expect(":")
                src = self.expect_ident("a mode name").text
                self.expect("->")
                tgt = self.expect_ident("a mode name").text
                mods[g] = (src, tgt)
                self.expect(";")
            elif item.text == "cell":
                self.mt = ModeTheory("scratch", tuple(modes), mods, cells, FreeDecider())
                g = self.expect_ident("a 2-cell name").text
                self.expect(":")
                src = self.parse_modexpr(None)
                self.expect("=>")
                tgt = self.parse_modexpr(None)
                cells[g] = (src, tgt)
                self.expect(";")
            elif item.text == "rule":
                self.mt = ModeTheory("scratch", tuple(modes), mods, cells, FreeDecider())
                lhs = self.parse_modexpr(None)
                self.expect("~>")
                rhs = self.parse_modexpr(None)
                rules.append((lhs.word, rhs.word))
                self.expect(";")
            elif item.text == "decider":
                k = self.expect_ident("a decider kind (free or rewrite)")
                if k.text not in ("free", "rewrite"):
                    raise ParseError(
                        f"unsupported decider {k.text!r} in a file "
                        "(table deciders ship by name)",
                        k.line,
                        k.col,
                    )
                kind = k.text
                self.expect(";")
            else:
                raise ParseError(
                    f"unknown theory item {item.text!r}", item.line, item.col
                )
        decider = RewriteDecider(tuple(rules)) if kind == "rewrite" else FreeDecider()
        if kind == "free" and rules:
            raise ParseError(
                "word rules given but the decider is 'free'; say 'decider rewrite'",
                t.line,
                t.col,
            )
        try:
            return validate(ModeTheory("file", tuple(modes), mods, cells, decider))
        except ModeError as e:
            raise ParseError(f"ill-formed mode theory: {e}", t.line, t.col) from None

    # -- declarations

    def parse_decl(self) -> Decl:
        t = self.expect("def")
        name = self.expect_ident("a definition name")
        if name.text in self.defs:
            raise ParseError(f"duplicate definition {name.text!r}", name.line, name.col)
        self.expect("@")
        mode = self.parse_mode()
        self.expect(":")
        ty = self.parse_type(mode, [])
        self.expect(":=")
        body = self.parse_term(mode, [])
        self.accept(";")
        d = Decl(name.text, mode, ty, body, t.line, t.col)
        self.defs[name.text] = d
        return d


def parse_file(text: str, mt_override: "ModeTheory | None" = None):
    """Parse a source file into its mode theory and declaration list."""
    toks = tokenize(text)
    bootstrap = mt_override if mt_override is not None else trivial()
    p = Parser(toks, bootstrap)
    if p.at("theory"):
        file_mt = p.parse_theory()
        if mt_override is None:
            p.mt = file_mt
        else:
            p.mt = mt_override
    decls: list[Decl] = []
    while p.peek().kind != "eof":
        decls.append(p.parse_decl())
    return p.mt, decls


# ---------------------------------------------------------------------------
# Surface rendering of normal forms (round-trips through the parser)


def _render_mod(mod: Modality) -> str:
    if not mod.word:
        return f"id({mod.mode_src})"
    return ".".join(reversed(mod.word))


def _render_cell(mt: ModeTheory, cell: Cell2) -> "str | None":
    atoms = cell_atoms(mt, cell)
    if not atoms:
        return None
    parts = []
    for a in reversed(atoms):
        s = a.gen
        for g in reversed(a.pre):
            s = f"{s}>{g}"
        for g in a.post:
            s = f"{g}<{s}"
        parts.append(s)
    return ".".join(parts)


def _wrap(s: str) -> str:
    if re.fullmatch(r"[A-Za-z0-9_'^.<>|]+", s) or (s.startswith("(") and s.endswith(")")):
        return s
    return f"({s})"


def surface_nf(mt: ModeTheory, u: Nf, amb: str, depth: int = 0) -> str:
    match u:
        case N.NfTrue():
            return "true"
        case N.NfFalse():
            return "false"
        case N.NfLam(mod, body):
            b = surface_nf(mt, body, amb, depth + 1)
            return f"\\({_render_mod(mod)} | x{depth}) -> {b}"
        case N.NfPair(a, b):
            return f"({surface_nf(mt, a, amb, depth)}, {surface_nf(mt, b, amb, depth)})"
        case N.NfMkBox(mod, body):
            return f"box {_render_mod(mod)} {_wrap(surface_nf(mt, body, mod.mode_src, depth))}"
        case N.NfInj(e):
            return surface_ne(mt, e, amb, depth)
        case N.NfFnCode(mod, dom, cod):
            d = surface_nf(mt, dom, mod.mode_src, depth)
            c = surface_nf(mt, cod, amb, depth + 1)
            return f"PiC ({_render_mod(mod)} | x{depth} : {d}) -> {c}"
        case N.NfProdCode(fst, snd):
            f = surface_nf(mt, fst, amb, depth)
            s = surface_nf(mt, snd, amb, depth + 1)
            return f"SigC (x{depth} : {f}) * {s}"
        case N.NfBoolCode():
            return "BoolC"
        case N.NfModifyCode(mod, code):
            return f"ModC {_render_mod(mod)} {_wrap(surface_nf(mt, code, mod.mode_src, depth))}"
        case N.NfDecIsoStar(body):
            return f"iso-inv {_wrap(surface_nf(mt, body, amb, depth))}"
    raise ValueError(f"cannot render {type(u).__name__}")


def surface_ne(mt: ModeTheory, e: Ne, amb: str, depth: int = 0) -> str:
    match e:
        case N.NeVar(idx, cell):
            name = f"x{depth - 1 - idx}"
            key = _render_cell(mt, cell)
            return name if key is None else f"{name}^{key}"
        case N.NeApp(fn, mod, arg):
            f = surface_ne(mt, fn, amb, depth)
            a = surface_nf(mt, arg, mod.mode_src, depth)
            return f"({f} {_wrap(a)})"
        case N.NeProj1(p):
            return f"{_wrap(surface_ne(mt, p, amb, depth))}.1"
        case N.NeProj2(p):
            return f"{_wrap(surface_ne(mt, p, amb, depth))}.2"
        case N.NeBoolRec(motive, scrut, tcase, fcase):
            m = surface_nfty(mt, motive, amb, depth + 1)
            s = surface_ne(mt, scrut, amb, depth)
            t = surface_nf(mt, tcase, amb, depth)
            f = surface_nf(mt, fcase, amb, depth)
            return f"(if [x{depth}. {m}] {_wrap(s)} then {_wrap(t)} else {_wrap(f)})"
        case N.NeLetMod(mu, nu, motive, scrut, branch):
            m = surface_nfty(mt, motive, amb, depth + 1)
            s = surface_ne(mt, scrut, mu.mode_src, depth)
            b = surface_nf(mt, branch, amb, depth + 1)
            return (
                f"(letbox ({_render_mod(mu)} | {_render_mod(nu)}) "
                f"[x{depth}. {m}] x{depth} = {_wrap(s)} in {b})"
            )
        case N.NeDecIso(body):
            return f"iso {_wrap(surface_ne(mt, body, amb, depth))}"
    raise ValueError(f"cannot render {type(e).__name__}")


def surface_nfty(mt: ModeTheory, t: NfTy, amb: str, depth: int = 0) -> str:
    match t:
        case N.NfBool():
            return "Bool"
        case N.NfUni():
            return "Uni"
        case N.NfFn(mod, dom, cod):
            d = surface_nfty(mt, dom, mod.mode_src, depth)
            c = surface_nfty(mt, cod, amb, depth + 1)
            return f"Pi ({_render_mod(mod)} | x{depth} : {d}) -> {c}"
        case N.NfProd(fst, snd):
            f = surface_nfty(mt, fst, amb, depth)
            s = surface_nfty(mt, snd, amb, depth + 1)
            return f"Sig (x{depth} : {f}) * {s}"
        case N.NfModify(mod, inner):
            return f"Mod {_render_mod(mod)} ({surface_nfty(mt, inner, mod.mode_src, depth)})"
        case N.NfDec(code):
            return f"dec {_wrap(surface_nf(mt, code, amb, depth))}"
    raise ValueError(f"cannot render {type(t).__name__}")


# ---------------------------------------------------------------------------
# Commands


def _load(path: str, override_name: "str | None"):
    if override_name is not None and override_name not in SHIPPED:
        print(
            f"unknown mode theory {override_name!r} "
            f"(shipped: {', '.join(sorted(SHIPPED))})",
            file=sys.stderr,
        )
        return None
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        print(f"{path}: {e.strerror or e}", file=sys.stderr)
        return None
    override = SHIPPED[override_name]() if override_name else None
    try:
        return parse_file(text, override)
    except ParseError as e:
        print(f"{path}:{e.line}:{e.col}: {e.msg}", file=sys.stderr)
        return None


def _print_core(decls) -> None:
    for d in decls:
        print(f"core {d.name} : {S.show_term(d.ty)}")
        print(f"core {d.name} = {S.show_term(d.body)}")


def cmd_check(path: str, override: "str | None" = None, print_core: bool = False) -> int:
    loaded = _load(path, override)
    if loaded is None:
        return 2
    mt, decls = loaded
    if print_core:
        _print_core(decls)
    report = C.check_program(mt, [(d.name, d.mode, d.ty, d.body) for d in decls])
    status = 0
    for d, r in zip(decls, report.results):
        if r.ok:
            print(f"checked {r.name} : {surface_nfty(mt, r.ty_nf, r.mode)}")
        else:
            print(f"{path}:{d.line}:{d.col}: error: {r.name}: {r.error}", file=sys.stderr)
            status = 1
    return status


def cmd_normalize(
    path: str,
    name: "str | None" = None,
    override: "str | None" = None,
    print_core: bool = False,
) -> int:
    loaded = _load(path, override)
    if loaded is None:
        return 2
    mt, decls = loaded
    if print_core:
        _print_core(decls)
    if name is not None:
        wanted = [d for d in decls if d.name == name]
        if not wanted:
            print(f"{path}: no declaration named {name!r}", file=sys.stderr)
            return 1
        decls = wanted
    report = C.check_program(mt, [(d.name, d.mode, d.ty, d.body) for d in decls])
    status = 0
    for d, r in zip(decls, report.results):
        if r.ok:
            print(f"{r.name} : {surface_nfty(mt, r.ty_nf, r.mode)}")
            print(f"{r.name} = {surface_nf(mt, r.body_nf, r.mode)}")
        else:
            print(f"{path}:{d.line}:{d.col}: error: {r.name}: {r.error}", file=sys.stderr)
            status = 1
    return status


def main(argv: "list[str] | None" = None) -> int:
    ap = argparse.ArgumentParser(
        prog="mtt", description="Check and normalize .mtt files."
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for cmd in ("check", "normalize"):
        p = sub.add_parser(cmd)
        p.add_argument("file")
        if cmd == "normalize":
            p.add_argument("name", nargs="?", default=None)
        p.add_argument(
            "--mode-theory",
            default=None,
            help="use a shipped mode theory instead of the file's block",
        )
        p.add_argument(
            "--print-core",
            action="store_true",
            help="dump the elaborated core terms before checking",
        )
    args = ap.parse_args(argv)
    if args.command == "check":
        return cmd_check(args.file, args.mode_theory, args.print_core)
    return cmd_normalize(args.file, args.name, args.mode_theory, args.print_core)


if __name__ == "__main__":
    sys.exit(main())
