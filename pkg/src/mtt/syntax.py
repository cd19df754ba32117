"""Core abstract syntax: de Bruijn terms, contexts with locks, scope checking.

Terms are quotient-free trees.  Variables carry an explicit 2-cell (the key
used to reach them through the locks in scope); binders are nameless and each
introduces exactly one variable entry.  De Bruijn indices count variable
entries only — locks are transparent to indexing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .modeth import Cell2, Modality, ModeError, ModeTheory, canon_word, compose_mod


class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    idx: int
    cell: Cell2


@dataclass(frozen=True)
class Pi(Term):
    mod: Modality
    dom: Term
    cod: Term  # binds 1


@dataclass(frozen=True)
class Sig(Term):
    fst: Term
    snd: Term  # binds 1


@dataclass(frozen=True)
class Bool(Term):
    pass


@dataclass(frozen=True)
class Uni(Term):
    pass


@dataclass(frozen=True)
class Mod(Term):
    mod: Modality
    ty: Term


@dataclass(frozen=True)
class Dec(Term):
    code: Term


@dataclass(frozen=True)
class Lam(Term):
    body: Term  # binds 1


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Proj1(Term):
    pair: Term


@dataclass(frozen=True)
class Proj2(Term):
    pair: Term


@dataclass(frozen=True)
class True_(Term):
    pass


@dataclass(frozen=True)
class False_(Term):
    pass


@dataclass(frozen=True)
class If(Term):
    motive: Term  # binds 1 (a Bool variable, identity annotation)
    tcase: Term
    fcase: Term
    scrut: Term


@dataclass(frozen=True)
class MkBox(Term):
    mod: Modality
    body: Term


@dataclass(frozen=True)
class LetMod(Term):
    """Modal eliminator.  mu frames the scrutinee, nu is the boxed modality;
    the motive binds one (mu | Mod nu A) variable and the branch one
    (mu.nu | A) variable."""

    mu: Modality
    nu: Modality
    motive: Term  # binds 1
    scrut: Term
    branch: Term  # binds 1


@dataclass(frozen=True)
class PiCode(Term):
    mod: Modality
    dom: Term
    cod: Term  # binds 1


@dataclass(frozen=True)
class SigCode(Term):
    fst: Term
    snd: Term  # binds 1


@dataclass(frozen=True)
class BoolCode(Term):
    pass


@dataclass(frozen=True)
class ModCode(Term):
    mod: Modality
    code: Term


@dataclass(frozen=True)
class DecIso(Term):
    """Coerce from Dec of a canonical code to the connective it encodes."""

    body: Term


@dataclass(frozen=True)
class DecIsoInv(Term):
    """Coerce a value of the encoded connective back under Dec."""

    body: Term


TermT = Union[
    Var, Pi, Sig, Bool, Uni, Mod, Dec, Lam, App, Pair, Proj1, Proj2,
    True_, False_, If, MkBox, LetMod, PiCode, SigCode, BoolCode, ModCode,
    DecIso, DecIsoInv,
]


# ---------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True)
class ELock:
    mod: Modality


@dataclass(frozen=True)
class EVar:
    mod: Modality
    ty: Term


Entry = Union[ELock, EVar]


@dataclass(frozen=True)
class Context:
    """Entries oldest first; ``mode`` is the ambient mode at the context's end."""

    mode: str
    entries: tuple[Entry, ...] = ()


def ctx_lock(ctx: Context, mu: Modality) -> Context:
    """Push a lock.  mu : n -> m moves the ambient mode from m to n."""
    if mu.mode_tgt != ctx.mode:
        raise ModeError(f"lock {mu} targets mode {mu.mode_tgt}, context is at {ctx.mode}")
    return Context(mu.mode_src, ctx.entries + (ELock(mu),))


def ctx_extend(ctx: Context, mu: Modality, ty: Term) -> Context:
    """Push a variable annotated mu; its type lives behind an extra mu-lock."""
    if mu.mode_tgt != ctx.mode:
        raise ModeError(
            f"annotation {mu} targets mode {mu.mode_tgt}, context is at {ctx.mode}"
        )
    return Context(ctx.mode, ctx.entries + (EVar(mu, ty),))


def ctx_var_count(ctx: Context) -> int:
    return sum(1 for e in ctx.entries if isinstance(e, EVar))


def canon_entries(mt: ModeTheory, ctx: Context) -> tuple[Entry, ...]:
    """Normal form under the lock equations: identity locks erased, composite
    locks split into generator locks (words canonicalized first)."""
    out: list[Entry] = []
    for e in ctx.entries:
        if isinstance(e, ELock):
            word = canon_word(mt, e.mod.word)
            # split into single-generator locks, first applied nearest the end:
            # a lock for mu with word (g0, g1) is the two locks for g1 then g0,
            # since lock(mu.nu) == lock(mu) then lock(nu) and composition
            # prepends the inner word.
            at = e.mod.mode_tgt
            for g in reversed(word):
                src = mt.modality_gens[g][0]
                out.append(ELock(Modality(src, at, (g,))))
                at = src
        else:
            out.append(e)
    return tuple(out)


# ---------------------------------------------------------------------------
# Scope checking


def scope_check(ctx: Context, t: Term) -> bool:
    """True iff every variable resolves to a variable entry.

    Purely structural: types and 2-cell boundaries are the checker's job.
    """
    return _scope(ctx_var_count(ctx), t)


def _scope(depth: int, t: Term) -> bool:
    match t:
        case Var(idx, _):
            return 0 <= idx < depth
        case Pi(_, dom, cod) | PiCode(_, dom, cod):
            return _scope(depth, dom) and _scope(depth + 1, cod)
        case Sig(fst, snd) | SigCode(fst, snd):
            return _scope(depth, fst) and _scope(depth + 1, snd)
        case Bool() | Uni() | True_() | False_() | BoolCode():
            return True
        case Mod(_, ty):
            return _scope(depth, ty)
        case ModCode(_, code):
            return _scope(depth, code)
        case Dec(code):
            return _scope(depth, code)
        case Lam(body):
            return _scope(depth + 1, body)
        case App(fn, arg):
            return _scope(depth, fn) and _scope(depth, arg)
        case Pair(fst, snd):
            return _scope(depth, fst) and _scope(depth, snd)
        case Proj1(p) | Proj2(p):
            return _scope(depth, p)
        case If(motive, tcase, fcase, scrut):
            return (
                _scope(depth + 1, motive)
                and _scope(depth, tcase)
                and _scope(depth, fcase)
                and _scope(depth, scrut)
            )
        case MkBox(_, body):
            return _scope(depth, body)
        case LetMod(_, _, motive, scrut, branch):
            return (
                _scope(depth + 1, motive)
                and _scope(depth, scrut)
                and _scope(depth + 1, branch)
            )
        case DecIso(body) | DecIsoInv(body):
            return _scope(depth, body)
    raise AssertionError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Printing (debug surface; the CLI has the documented printer)


def show_term(t: Term) -> str:
    match t:
        case Var(idx, cell):
            return f"x{idx}^{cell}"
        case Pi(mod, dom, cod):
            return f"(Pi ({mod} | {show_term(dom)}) -> {show_term(cod)})"
        case Sig(fst, snd):
            return f"(Sig {show_term(fst)} * {show_term(snd)})"
        case Bool():
            return "Bool"
        case Uni():
            return "Uni"
        case Mod(mod, ty):
            return f"(Mod {mod} {show_term(ty)})"
        case Dec(code):
            return f"(dec {show_term(code)})"
        case Lam(body):
            return f"(lam {show_term(body)})"
        case App(fn, arg):
            return f"({show_term(fn)} {show_term(arg)})"
        case Pair(fst, snd):
            return f"({show_term(fst)}, {show_term(snd)})"
        case Proj1(p):
            return f"(fst {show_term(p)})"
        case Proj2(p):
            return f"(snd {show_term(p)})"
        case True_():
            return "true"
        case False_():
            return "false"
        case If(motive, tcase, fcase, scrut):
            return (
                f"(if [{show_term(motive)}] {show_term(scrut)} "
                f"then {show_term(tcase)} else {show_term(fcase)})"
            )
        case MkBox(mod, body):
            return f"(box {mod} {show_term(body)})"
        case LetMod(mu, nu, motive, scrut, branch):
            return (
                f"(letbox {mu} {nu} [{show_term(motive)}] "
                f"{show_term(scrut)} in {show_term(branch)})"
            )
        case PiCode(mod, dom, cod):
            return f"(PiC ({mod} | {show_term(dom)}) -> {show_term(cod)})"
        case SigCode(fst, snd):
            return f"(SigC {show_term(fst)} * {show_term(snd)})"
        case BoolCode():
            return "BoolC"
        case ModCode(mod, code):
            return f"(ModC {mod} {show_term(code)})"
        case DecIso(body):
            return f"(iso {show_term(body)})"
        case DecIsoInv(body):
            return f"(iso-inv {show_term(body)})"
    raise AssertionError(f"not a term: {t!r}")
