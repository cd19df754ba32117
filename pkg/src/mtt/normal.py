"""Telescopes, renamings, and unquotiented normal/neutral forms.

Normal forms are indexed by *telescopes*: formal sequences of locks and
annotated variable entries that present a context without quotienting by the
lock equations.  Renamings are the structural morphisms between telescopes
(weakening, locks, keys, variable-for-variable extension); they act on
neutrals and normals, and on variables the action composes 2-cells onto the
head.  Renamings are kept as unevaluated trees: only their actions are ever
compared, never the trees themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .modeth import (
    Cell2,
    Modality,
    ModeTheory,
    compose_mod,
    eq_cell,
    eq_mod,
    id_cell,
    id_mod,
    vcomp,
    whisker_left,
    whisker_right,
)
from . import syntax as S
from .syntax import ELock, EVar, Entry, Term


class NormalError(Exception):
    pass


# ---------------------------------------------------------------------------
# Telescopes


@dataclass(frozen=True)
class Telescope:
    """Entries oldest first; ``mode`` is the ambient mode at the end."""

    mode: str
    entries: tuple[Entry, ...] = ()


def tele_lock(tele: Telescope, mu: Modality) -> Telescope:
    if mu.mode_tgt != tele.mode:
        raise NormalError(f"lock {mu} targets {mu.mode_tgt}, telescope is at {tele.mode}")
    return Telescope(mu.mode_src, tele.entries + (ELock(mu),))


def tele_extend(tele: Telescope, mu: Modality, ty: Term) -> Telescope:
    if mu.mode_tgt != tele.mode:
        raise NormalError(f"annotation {mu} targets {mu.mode_tgt}, telescope is at {tele.mode}")
    return Telescope(tele.mode, tele.entries + (EVar(mu, ty),))


def depth(tele: Telescope) -> int:
    """Number of variable entries."""
    return sum(1 for e in tele.entries if isinstance(e, EVar))


def erase(tele: Telescope) -> S.Context:
    return S.Context(tele.mode, tele.entries)


def _var_position(tele: Telescope, k: int) -> int:
    """Position in ``entries`` of the variable with de Bruijn index k."""
    seen = 0
    for pos in range(len(tele.entries) - 1, -1, -1):
        if isinstance(tele.entries[pos], EVar):
            if seen == k:
                return pos
            seen += 1
    raise NormalError(f"variable index {k} does not resolve in telescope of depth {seen}")


def tele_entry(tele: Telescope, k: int) -> EVar:
    e = tele.entries[_var_position(tele, k)]
    assert isinstance(e, EVar)
    return e


def locks_of(tele: Telescope, k: int) -> Modality:
    """Composite of the locks strictly between variable k and the end.

    The lock nearest the entry is the outer factor: crossing lock(mu) then
    lock(nu) from the entry outward yields mu.nu, matching lock(mu.nu).
    """
    pos = _var_position(tele, k)
    rest = tele.entries[pos + 1 :]
    # ambient mode at the entry's insertion point
    mode = tele.mode
    for e in reversed(rest):
        if isinstance(e, ELock):
            mode = e.mod.mode_tgt
    w = id_mod(mode)
    for e in rest:
        if isinstance(e, ELock):
            w = compose_mod(w, e.mod)
    return w


# ---------------------------------------------------------------------------
# Normal, neutral, and normal-type forms


class Nf:
    pass


class Ne:
    pass


class NfTy:
    pass


@dataclass(frozen=True)
class NfBool(NfTy):
    pass


@dataclass(frozen=True)
class NfUni(NfTy):
    pass


@dataclass(frozen=True)
class NfFn(NfTy):
    mod: Modality
    dom: NfTy  # in the mod-locked telescope
    cod: NfTy  # binds 1, annotated mod


@dataclass(frozen=True)
class NfProd(NfTy):
    fst: NfTy
    snd: NfTy  # binds 1, identity annotation


@dataclass(frozen=True)
class NfModify(NfTy):
    mod: Modality
    ty: NfTy  # in the mod-locked telescope


@dataclass(frozen=True)
class NfDec(NfTy):
    code: Nf  # a normal form at the universe


@dataclass(frozen=True)
class NeVar(Ne):
    idx: int
    cell: Cell2  # annotation of idx  =>  lock composite at the use site


@dataclass(frozen=True)
class NeApp(Ne):
    fn: Ne
    mod: Modality  # the function type's domain annotation
    arg: Nf  # lives in the mod-locked telescope


@dataclass(frozen=True)
class NeProj1(Ne):
    pair: Ne


@dataclass(frozen=True)
class NeProj2(Ne):
    pair: Ne


@dataclass(frozen=True)
class NeBoolRec(Ne):
    motive: NfTy  # binds 1 (identity-annotated Bool)
    scrut: Ne
    tcase: Nf
    fcase: Nf


@dataclass(frozen=True)
class NeLetMod(Ne):
    mu: Modality
    nu: Modality
    motive: NfTy  # binds 1, annotated mu
    scrut: Ne  # in the mu-locked telescope
    branch: Nf  # binds 1, annotated mu.nu


@dataclass(frozen=True)
class NeDecIso(Ne):
    """A stuck coercion out of Dec at a canonical code."""

    body: Ne


@dataclass(frozen=True)
class NfLam(Nf):
    mod: Modality  # binder annotation
    body: Nf


@dataclass(frozen=True)
class NfPair(Nf):
    fst: Nf
    snd: Nf


@dataclass(frozen=True)
class NfTrue(Nf):
    pass


@dataclass(frozen=True)
class NfFalse(Nf):
    pass


@dataclass(frozen=True)
class NfMkBox(Nf):
    mod: Modality
    body: Nf  # in the mod-locked telescope


@dataclass(frozen=True)
class NfInj(Nf):
    """A neutral included as a normal form.

    Only legal at Bool, modal types, the universe, and Dec of a neutral code;
    the reifier never produces it at a function or pair type.
    """

    ne: Ne


@dataclass(frozen=True)
class NfFnCode(Nf):
    mod: Modality
    dom: Nf  # code, in the mod-locked telescope
    cod: Nf  # code, binds 1 annotated mod at Dec(dom)


@dataclass(frozen=True)
class NfProdCode(Nf):
    fst: Nf
    snd: Nf  # binds 1, identity annotation


@dataclass(frozen=True)
class NfBoolCode(Nf):
    pass


@dataclass(frozen=True)
class NfModifyCode(Nf):
    mod: Modality
    code: Nf  # in the mod-locked telescope


@dataclass(frozen=True)
class NfDecIsoStar(Nf):
    """A canonical form coerced back under Dec at a canonical code."""

    body: Nf


# ---------------------------------------------------------------------------
# Renamings


class Renaming:
    pass


@dataclass(frozen=True)
class RenEmpty(Renaming):
    """Into the empty telescope."""


@dataclass(frozen=True)
class RenId(Renaming):
    pass


@dataclass(frozen=True)
class RenWeaken(Renaming):
    """Drops the top variable entry of the source."""


@dataclass(frozen=True)
class RenComp(Renaming):
    """``r`` acts first, then ``s`` (as telescope maps: r after s)."""

    r: Renaming
    s: Renaming


@dataclass(frozen=True)
class RenLock(Renaming):
    mod: Modality
    ren: Renaming


@dataclass(frozen=True)
class RenKey(Renaming):
    """A key: for cell : nu => mu, maps the mu-locked telescope to the
    nu-locked one.  Carries the unlocked telescope for its lock composites."""

    cell: Cell2
    tele: Telescope


@dataclass(frozen=True)
class RenExt(Renaming):
    """Extension by a variable neutral.  ``plocks`` is the lock composite
    over the payload variable in the (locked) source telescope."""

    ren: Renaming
    payload: NeVar
    plocks: Modality


def lift(r: Renaming, mu: Modality) -> Renaming:
    """Extend a renaming through one binder annotated mu."""
    return RenExt(RenComp(r, RenWeaken()), NeVar(0, id_cell(mu)), id_mod(mu.mode_tgt))


# The action on variables.  Keys compose whisker-adjusted cells onto the
# head; extension substitutes its payload variable, keyed by the incoming
# cell; everything else is index arithmetic.


def _act_var(mt: ModeTheory, r: Renaming, k: int, cell: Cell2, mode: str) -> Ne:
    match r:
        case RenId():
            return NeVar(k, cell)
        case RenWeaken():
            return NeVar(k + 1, cell)
        case RenComp(r1, r2):
            return rename_ne(mt, r2, _act_var(mt, r1, k, cell, mode), mode)
        case RenKey(beta, tele):
            lk = locks_of(tele, k)
            return NeVar(k, vcomp(whisker_left(lk, beta), cell, mt))
        case RenExt(inner, payload, plocks):
            if k == 0:
                return NeVar(payload.idx, vcomp(whisker_left(plocks, cell), payload.cell, mt))
            return _act_var(mt, inner, k - 1, cell, mode)
        case RenLock(kappa, inner):
            match inner:
                case RenId():
                    return NeVar(k, cell)
                case RenWeaken():
                    return NeVar(k + 1, cell)
                case RenComp(r1, r2):
                    return rename_ne(
                        mt, RenLock(kappa, r2),
                        _act_var(mt, RenLock(kappa, r1), k, cell, mode), mode,
                    )
                case RenExt(inner2, payload, plocks):
                    if k == 0:
                        return NeVar(
                            payload.idx,
                            vcomp(whisker_left(plocks, cell), payload.cell, mt),
                        )
                    return _act_var(mt, RenLock(kappa, inner2), k - 1, cell, mode)
                case RenKey(beta, tele):
                    return _act_var(
                        mt, RenKey(whisker_right(beta, kappa), tele), k, cell, mode
                    )
                case RenLock(kappa2, inner2):
                    return _act_var(
                        mt, RenLock(compose_mod(kappa2, kappa), inner2), k, cell, mode
                    )
                case RenEmpty():
                    raise NormalError("variable under a renaming into the empty telescope")
        case RenEmpty():
            raise NormalError("variable under a renaming into the empty telescope")
    raise AssertionError(r)


def rename_ne(mt: ModeTheory, r: Renaming, e: Ne, mode: str) -> Ne:
    match e:
        case NeVar(k, cell):
            return _act_var(mt, r, k, cell, mode)
        case NeApp(fn, mod, arg):
            return NeApp(
                rename_ne(mt, r, fn, mode),
                mod,
                rename_nf(mt, RenLock(mod, r), arg, mod.mode_src),
            )
        case NeProj1(p):
            return NeProj1(rename_ne(mt, r, p, mode))
        case NeProj2(p):
            return NeProj2(rename_ne(mt, r, p, mode))
        case NeBoolRec(motive, scrut, t, f):
            return NeBoolRec(
                rename_nfty(mt, lift(r, id_mod(mode)), motive, mode),
                rename_ne(mt, r, scrut, mode),
                rename_nf(mt, r, t, mode),
                rename_nf(mt, r, f, mode),
            )
        case NeLetMod(mu, nu, motive, scrut, branch):
            return NeLetMod(
                mu,
                nu,
                rename_nfty(mt, lift(r, mu), motive, mode),
                rename_ne(mt, RenLock(mu, r), scrut, mu.mode_src),
                rename_nf(mt, lift(r, compose_mod(mu, nu)), branch, mode),
            )
        case NeDecIso(body):
            return NeDecIso(rename_ne(mt, r, body, mode))
    raise AssertionError(e)


def rename_nf(mt: ModeTheory, r: Renaming, u: Nf, mode: str) -> Nf:
    match u:
        case NfTrue() | NfFalse() | NfBoolCode():
            return u
        case NfLam(mod, body):
            return NfLam(mod, rename_nf(mt, lift(r, mod), body, mode))
        case NfPair(a, b):
            return NfPair(rename_nf(mt, r, a, mode), rename_nf(mt, r, b, mode))
        case NfMkBox(mod, body):
            return NfMkBox(mod, rename_nf(mt, RenLock(mod, r), body, mod.mode_src))
        case NfInj(e):
            return NfInj(rename_ne(mt, r, e, mode))
        case NfFnCode(mod, a, b):
            return NfFnCode(
                mod,
                rename_nf(mt, RenLock(mod, r), a, mod.mode_src),
                rename_nf(mt, lift(r, mod), b, mode),
            )
        case NfProdCode(a, b):
            return NfProdCode(
                rename_nf(mt, r, a, mode),
                rename_nf(mt, lift(r, id_mod(mode)), b, mode),
            )
        case NfModifyCode(mod, a):
            return NfModifyCode(mod, rename_nf(mt, RenLock(mod, r), a, mod.mode_src))
        case NfDecIsoStar(body):
            return NfDecIsoStar(rename_nf(mt, r, body, mode))
    raise AssertionError(u)


def rename_nfty(mt: ModeTheory, r: Renaming, t: NfTy, mode: str) -> NfTy:
    match t:
        case NfBool() | NfUni():
            return t
        case NfFn(mod, dom, cod):
            return NfFn(
                mod,
                rename_nfty(mt, RenLock(mod, r), dom, mod.mode_src),
                rename_nfty(mt, lift(r, mod), cod, mode),
            )
        case NfProd(a, b):
            return NfProd(
                rename_nfty(mt, r, a, mode),
                rename_nfty(mt, lift(r, id_mod(mode)), b, mode),
            )
        case NfModify(mod, a):
            return NfModify(mod, rename_nfty(mt, RenLock(mod, r), a, mod.mode_src))
        case NfDec(u):
            return NfDec(rename_nf(mt, r, u, mode))
    raise AssertionError(t)


def ren_respects_equations(
    mt: ModeTheory, r1: Renaming, r2: Renaming, x: Ne, mode: str
) -> bool:
    """Test oracle: do two parallel renamings act identically on x?"""
    return eq_ne(mt, rename_ne(mt, r1, x, mode), rename_ne(mt, r2, x, mode))


# ---------------------------------------------------------------------------
# Decoding into quotiented terms


def decode_nf(u: Nf) -> Term:
    match u:
        case NfTrue():
            return S.True_()
        case NfFalse():
            return S.False_()
        case NfLam(_, body):
            return S.Lam(decode_nf(body))
        case NfPair(a, b):
            return S.Pair(decode_nf(a), decode_nf(b))
        case NfMkBox(mod, body):
            return S.MkBox(mod, decode_nf(body))
        case NfInj(e):
            return decode_ne(e)
        case NfFnCode(mod, a, b):
            return S.PiCode(mod, decode_nf(a), decode_nf(b))
        case NfProdCode(a, b):
            return S.SigCode(decode_nf(a), decode_nf(b))
        case NfBoolCode():
            return S.BoolCode()
        case NfModifyCode(mod, a):
            return S.ModCode(mod, decode_nf(a))
        case NfDecIsoStar(body):
            return S.DecIsoInv(decode_nf(body))
    raise AssertionError(u)


def decode_ne(e: Ne) -> Term:
    match e:
        case NeVar(k, cell):
            return S.Var(k, cell)
        case NeApp(fn, _, arg):
            return S.App(decode_ne(fn), decode_nf(arg))
        case NeProj1(p):
            return S.Proj1(decode_ne(p))
        case NeProj2(p):
            return S.Proj2(decode_ne(p))
        case NeBoolRec(motive, scrut, t, f):
            return S.If(decode_nfty(motive), decode_nf(t), decode_nf(f), decode_ne(scrut))
        case NeLetMod(mu, nu, motive, scrut, branch):
            return S.LetMod(mu, nu, decode_nfty(motive), decode_ne(scrut), decode_nf(branch))
        case NeDecIso(body):
            return S.DecIso(decode_ne(body))
    raise AssertionError(e)


def decode_nfty(t: NfTy) -> Term:
    match t:
        case NfBool():
            return S.Bool()
        case NfUni():
            return S.Uni()
        case NfFn(mod, dom, cod):
            return S.Pi(mod, decode_nfty(dom), decode_nfty(cod))
        case NfProd(a, b):
            return S.Sig(decode_nfty(a), decode_nfty(b))
        case NfModify(mod, a):
            return S.Mod(mod, decode_nfty(a))
        case NfDec(u):
            return S.Dec(decode_nf(u))
    raise AssertionError(t)


# ---------------------------------------------------------------------------
# Equality: structural, with the mode theory deciding embedded cells


def eq_nf(mt: ModeTheory, a: Nf, b: Nf) -> bool:
    match (a, b):
        case (NfTrue(), NfTrue()) | (NfFalse(), NfFalse()) | (NfBoolCode(), NfBoolCode()):
            return True
        case (NfLam(m1, b1), NfLam(m2, b2)):
            return eq_mod(mt, m1, m2) and eq_nf(mt, b1, b2)
        case (NfPair(a1, b1), NfPair(a2, b2)):
            return eq_nf(mt, a1, a2) and eq_nf(mt, b1, b2)
        case (NfMkBox(m1, b1), NfMkBox(m2, b2)):
            return eq_mod(mt, m1, m2) and eq_nf(mt, b1, b2)
        case (NfInj(e1), NfInj(e2)):
            return eq_ne(mt, e1, e2)
        case (NfFnCode(m1, a1, b1), NfFnCode(m2, a2, b2)):
            return eq_mod(mt, m1, m2) and eq_nf(mt, a1, a2) and eq_nf(mt, b1, b2)
        case (NfProdCode(a1, b1), NfProdCode(a2, b2)):
            return eq_nf(mt, a1, a2) and eq_nf(mt, b1, b2)
        case (NfModifyCode(m1, a1), NfModifyCode(m2, a2)):
            return eq_mod(mt, m1, m2) and eq_nf(mt, a1, a2)
        case (NfDecIsoStar(b1), NfDecIsoStar(b2)):
            return eq_nf(mt, b1, b2)
    return False


def eq_ne(mt: ModeTheory, a: Ne, b: Ne) -> bool:
    match (a, b):
        case (NeVar(k1, c1), NeVar(k2, c2)):
            return k1 == k2 and eq_cell(mt, c1, c2)
        case (NeApp(f1, m1, a1), NeApp(f2, m2, a2)):
            return eq_ne(mt, f1, f2) and eq_mod(mt, m1, m2) and eq_nf(mt, a1, a2)
        case (NeProj1(p1), NeProj1(p2)) | (NeProj2(p1), NeProj2(p2)):
            return eq_ne(mt, p1, p2)
        case (NeBoolRec(t1, s1, x1, y1), NeBoolRec(t2, s2, x2, y2)):
            return (
                eq_nfty(mt, t1, t2)
                and eq_ne(mt, s1, s2)
                and eq_nf(mt, x1, x2)
                and eq_nf(mt, y1, y2)
            )
        case (NeLetMod(mu1, nu1, t1, s1, b1), NeLetMod(mu2, nu2, t2, s2, b2)):
            return (
                eq_mod(mt, mu1, mu2)
                and eq_mod(mt, nu1, nu2)
                and eq_nfty(mt, t1, t2)
                and eq_ne(mt, s1, s2)
                and eq_nf(mt, b1, b2)
            )
        case (NeDecIso(b1), NeDecIso(b2)):
            return eq_ne(mt, b1, b2)
    return False


def eq_nfty(mt: ModeTheory, a: NfTy, b: NfTy) -> bool:
    match (a, b):
        case (NfBool(), NfBool()) | (NfUni(), NfUni()):
            return True
        case (NfFn(m1, d1, c1), NfFn(m2, d2, c2)):
            return eq_mod(mt, m1, m2) and eq_nfty(mt, d1, d2) and eq_nfty(mt, c1, c2)
        case (NfProd(a1, b1), NfProd(a2, b2)):
            return eq_nfty(mt, a1, a2) and eq_nfty(mt, b1, b2)
        case (NfModify(m1, t1), NfModify(m2, t2)):
            return eq_mod(mt, m1, m2) and eq_nfty(mt, t1, t2)
        case (NfDec(u1), NfDec(u2)):
            return eq_nf(mt, u1, u2)
    return False


# ---------------------------------------------------------------------------
# Printing.  Layout: prefix constructors, de Bruijn indices, cells in
# canonical form.  Deterministic; the CLI's output contract lives here.


def show_cell(mt: ModeTheory, cell: Cell2) -> str:
    from .modeth import TableDecider, _canon_atoms, _table_value

    if isinstance(mt.decider, TableDecider):
        v = _table_value(mt, cell)
        return "id" if v is None else v
    atoms = _canon_atoms(mt, cell)
    if not atoms:
        return "id"
    parts = []
    for a in reversed(atoms):  # composition order: last applied leftmost
        if not a.pre and not a.post:
            parts.append(a.gen)
        else:
            post = ".".join(reversed(a.post)) or "id"
            pre = ".".join(reversed(a.pre)) or "id"
            parts.append(f"[{post}|{a.gen}|{pre}]")
    return "*".join(parts)


def show_nf(mt: ModeTheory, u: Nf) -> str:
    match u:
        case NfTrue():
            return "true"
        case NfFalse():
            return "false"
        case NfLam(mod, body):
            return f"(lam {mod} {show_nf(mt, body)})"
        case NfPair(a, b):
            return f"(pair {show_nf(mt, a)} {show_nf(mt, b)})"
        case NfMkBox(mod, body):
            return f"(box {mod} {show_nf(mt, body)})"
        case NfInj(e):
            return show_ne(mt, e)
        case NfFnCode(mod, a, b):
            return f"(PiC {mod} {show_nf(mt, a)} {show_nf(mt, b)})"
        case NfProdCode(a, b):
            return f"(SigC {show_nf(mt, a)} {show_nf(mt, b)})"
        case NfBoolCode():
            return "BoolC"
        case NfModifyCode(mod, a):
            return f"(ModC {mod} {show_nf(mt, a)})"
        case NfDecIsoStar(body):
            return f"(iso-inv {show_nf(mt, body)})"
    raise AssertionError(u)


def show_ne(mt: ModeTheory, e: Ne) -> str:
    match e:
        case NeVar(k, cell):
            return f"x{k}^{show_cell(mt, cell)}"
        case NeApp(fn, _, arg):
            return f"({show_ne(mt, fn)} {show_nf(mt, arg)})"
        case NeProj1(p):
            return f"(fst {show_ne(mt, p)})"
        case NeProj2(p):
            return f"(snd {show_ne(mt, p)})"
        case NeBoolRec(motive, scrut, t, f):
            return (
                f"(boolrec [{show_nfty(mt, motive)}] {show_ne(mt, scrut)} "
                f"{show_nf(mt, t)} {show_nf(mt, f)})"
            )
        case NeLetMod(mu, nu, motive, scrut, branch):
            return (
                f"(letbox {mu} {nu} [{show_nfty(mt, motive)}] {show_ne(mt, scrut)} "
                f"{show_nf(mt, branch)})"
            )
        case NeDecIso(body):
            return f"(iso {show_ne(mt, body)})"
    raise AssertionError(e)


def show_nfty(mt: ModeTheory, t: NfTy) -> str:
    match t:
        case NfBool():
            return "Bool"
        case NfUni():
            return "Uni"
        case NfFn(mod, dom, cod):
            return f"(Pi ({mod} | {show_nfty(mt, dom)}) -> {show_nfty(mt, cod)})"
        case NfProd(a, b):
            return f"(Sig {show_nfty(mt, a)} * {show_nfty(mt, b)})"
        case NfModify(mod, a):
            return f"(Mod {mod} {show_nfty(mt, a)})"
        case NfDec(u):
            return f"(dec {show_nf(mt, u)})"
    raise AssertionError(t)
