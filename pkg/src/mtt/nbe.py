"""Normalization by evaluation.

Terms evaluate into a semantic domain of values; values reify back into the
unquotiented normal forms of the normal module.  Neutral spines use absolute
levels with a 2-cell on the head, so weakening is free and the key action is
cell composition; levels convert to de Bruijn indices only at reify time
(index = depth - 1 - level).  Fresh variables come from the depth parameter —
the kernel holds no counter and no mutable state.

The universe is weak Tarski: a decoded code ``Dec c`` is a type distinct from
the connective it unfolds to.  The two coercions evaluate to the identity on
payloads; reify wraps the boundary markers back on, so normal forms at
``Dec c`` record the coercion exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass

from .modeth import (
    Cell2,
    CellId,
    Modality,
    ModeTheory,
    compose_mod,
    eq_mod,
    id_cell,
    id_mod,
    is_id_cell,
    vcomp,
)
from . import syntax as S
from .syntax import Term
from .normal import (
    Ne,
    NeApp,
    NeBoolRec,
    NeDecIso,
    NeLetMod,
    NeProj1,
    NeProj2,
    NeVar,
    Nf,
    NfBool,
    NfBoolCode,
    NfDec,
    NfDecIsoStar,
    NfFalse,
    NfFn,
    NfFnCode,
    NfInj,
    NfLam,
    NfMkBox,
    NfModify,
    NfModifyCode,
    NfPair,
    NfProd,
    NfProdCode,
    NfTrue,
    NfTy,
    NfUni,
    Telescope,
    depth as tele_depth,
)


class NbeError(Exception):
    pass


# ---------------------------------------------------------------------------
# Semantic domain


class Value:
    pass


class TypeValue:
    pass


class CodeValue:
    pass


@dataclass(frozen=True)
class Env:
    """One value per variable entry; locks contribute nothing.  The mode is
    carried for inspection only — evaluation never consults it."""

    mode: str
    vals: tuple[Value, ...] = ()


def env_push(env: Env, v: Value) -> Env:
    return Env(env.mode, env.vals + (v,))


@dataclass(frozen=True)
class Closure:
    """A term body binding one variable over a captured environment."""

    env: Env
    body: Term


@dataclass(frozen=True)
class DecClosure:
    """A type closure arising from unfolding a code: instantiating the code
    closure and re-wrapping the result under the decoding type former."""

    code_clo: Closure


@dataclass(frozen=True)
class NeAbs:
    """Level-indexed neutral: head variable plus eliminator frames."""

    level: int
    cell: Cell2
    frames: tuple = ()

    def push(self, frame) -> "NeAbs":
        return NeAbs(self.level, self.cell, self.frames + (frame,))


@dataclass(frozen=True)
class FrApp:
    mod: Modality
    arg: Value
    dom: TypeValue


@dataclass(frozen=True)
class FrProj1:
    pass


@dataclass(frozen=True)
class FrProj2:
    pass


@dataclass(frozen=True)
class FrIf:
    motive: Closure
    tcase: Value
    fcase: Value


@dataclass(frozen=True)
class FrLetMod:
    mu: Modality
    nu: Modality
    motive: Closure
    branch: Closure
    inner: TypeValue


@dataclass(frozen=True)
class FrDecIso:
    pass


@dataclass(frozen=True)
class VLam(Value):
    clo: Closure


@dataclass(frozen=True)
class VPair(Value):
    fst: Value
    snd: Value


@dataclass(frozen=True)
class VTrue(Value):
    pass


@dataclass(frozen=True)
class VFalse(Value):
    pass


@dataclass(frozen=True)
class VBoolNeutral(Value):
    ne: NeAbs


@dataclass(frozen=True)
class ModNeutral:
    ne: NeAbs
    inner: TypeValue  # the boxed content's type, needed to reify letmod frames


@dataclass(frozen=True)
class ModBoxed:
    val: Value


@dataclass(frozen=True)
class VMod(Value):
    payload: "ModNeutral | ModBoxed"


@dataclass(frozen=True)
class VCode(Value):
    code: CodeValue


@dataclass(frozen=True)
class VCodeNeutral(Value):
    ne: NeAbs


@dataclass(frozen=True)
class VNeutral(Value):
    """Neutral at a type with no eta law driving further expansion
    (functions before application, decoded neutral codes)."""

    ty: TypeValue
    ne: NeAbs


@dataclass(frozen=True)
class TPi(TypeValue):
    mod: Modality
    dom: TypeValue
    cod: "Closure | DecClosure"


@dataclass(frozen=True)
class TSig(TypeValue):
    fst: TypeValue
    snd: "Closure | DecClosure"


@dataclass(frozen=True)
class TBool(TypeValue):
    pass


@dataclass(frozen=True)
class TUni(TypeValue):
    pass


@dataclass(frozen=True)
class TMod(TypeValue):
    mod: Modality
    inner: TypeValue


@dataclass(frozen=True)
class TDec(TypeValue):
    code: CodeValue


@dataclass(frozen=True)
class CPi(CodeValue):
    mod: Modality
    dom: CodeValue
    cod: Closure


@dataclass(frozen=True)
class CSig(CodeValue):
    fst: CodeValue
    snd: Closure


@dataclass(frozen=True)
class CBool(CodeValue):
    pass


@dataclass(frozen=True)
class CMod(CodeValue):
    mod: Modality
    code: CodeValue


@dataclass(frozen=True)
class CNeutral(CodeValue):
    ne: NeAbs


def code_of(v: Value) -> CodeValue:
    match v:
        case VCode(c):
            return c
        case VCodeNeutral(e):
            return CNeutral(e)
    raise NbeError(f"not a universe element: {type(v).__name__}")


def code_value(c: CodeValue) -> Value:
    if isinstance(c, CNeutral):
        return VCodeNeutral(c.ne)
    return VCode(c)


# ---------------------------------------------------------------------------
# Evaluation


def eval_tm(mt: ModeTheory, env: Env, t: Term) -> Value:
    match t:
        case S.Var(k, cell):
            if k < 0 or k >= len(env.vals):
                raise NbeError(f"variable {k} out of range")
            v = env.vals[len(env.vals) - 1 - k]
            if isinstance(cell.expr, CellId) or is_id_cell(mt, cell):
                return v
            return key_val(mt, cell, v)
        case S.Lam(body):
            return VLam(Closure(env, body))
        case S.App(fn, arg):
            return do_app(mt, eval_tm(mt, env, fn), eval_tm(mt, env, arg))
        case S.Pair(a, b):
            return VPair(eval_tm(mt, env, a), eval_tm(mt, env, b))
        case S.Proj1(p):
            return do_proj(mt, 1, eval_tm(mt, env, p))
        case S.Proj2(p):
            return do_proj(mt, 2, eval_tm(mt, env, p))
        case S.True_():
            return VTrue()
        case S.False_():
            return VFalse()
        case S.If(motive, tcase, fcase, scrut):
            return do_if(
                mt,
                Closure(env, motive),
                eval_tm(mt, env, tcase),
                eval_tm(mt, env, fcase),
                eval_tm(mt, env, scrut),
            )
        case S.MkBox(_, body):
            return VMod(ModBoxed(eval_tm(mt, env, body)))
        case S.LetMod(mu, nu, motive, scrut, branch):
            return do_letmod(
                mt, mu, nu, Closure(env, motive),
                eval_tm(mt, env, scrut), Closure(env, branch),
            )
        case S.PiCode(mod, dom, cod):
            return VCode(CPi(mod, code_of(eval_tm(mt, env, dom)), Closure(env, cod)))
        case S.SigCode(fst, snd):
            return VCode(CSig(code_of(eval_tm(mt, env, fst)), Closure(env, snd)))
        case S.BoolCode():
            return VCode(CBool())
        case S.ModCode(mod, code):
            return VCode(CMod(mod, code_of(eval_tm(mt, env, code))))
        case S.DecIso(body) | S.DecIsoInv(body):
            return eval_tm(mt, env, body)
    raise NbeError(f"not a term former: {type(t).__name__}")


def eval_ty(mt: ModeTheory, env: Env, t: Term) -> TypeValue:
    match t:
        case S.Pi(mod, dom, cod):
            return TPi(mod, eval_ty(mt, env, dom), Closure(env, cod))
        case S.Sig(fst, snd):
            return TSig(eval_ty(mt, env, fst), Closure(env, snd))
        case S.Bool():
            return TBool()
        case S.Uni():
            return TUni()
        case S.Mod(mod, inner):
            return TMod(mod, eval_ty(mt, env, inner))
        case S.Dec(code):
            return TDec(code_of(eval_tm(mt, env, code)))
    raise NbeError(f"not a type former: {type(t).__name__}")


def instantiate(mt: ModeTheory, clo: Closure, v: Value) -> Value:
    return eval_tm(mt, env_push(clo.env, v), clo.body)


def inst_ty(mt: ModeTheory, clo: "Closure | DecClosure", v: Value) -> TypeValue:
    if isinstance(clo, DecClosure):
        return TDec(code_of(instantiate(mt, clo.code_clo, v)))
    return eval_ty(mt, env_push(clo.env, v), clo.body)


def dec_unfold(mt: ModeTheory, c: CodeValue) -> TypeValue:
    """The connective a canonical code decodes to, one layer deep."""
    match c:
        case CPi(mod, dom, cod):
            return TPi(mod, TDec(dom), DecClosure(cod))
        case CSig(fst, snd):
            return TSig(TDec(fst), DecClosure(snd))
        case CBool():
            return TBool()
        case CMod(mod, code):
            return TMod(mod, TDec(code))
    raise NbeError("cannot unfold a neutral code")


# ---------------------------------------------------------------------------
# Eliminators


def do_app(mt: ModeTheory, f: Value, a: Value) -> Value:
    match f:
        case VLam(clo):
            return instantiate(mt, clo, a)
        case VNeutral(TPi(mod, dom, cod), ne):
            return reflect(mt, inst_ty(mt, cod, a), ne.push(FrApp(mod, a, dom)))
    raise NbeError(f"application of a non-function: {type(f).__name__}")


def do_proj(mt: ModeTheory, which: int, p: Value) -> Value:
    match p:
        case VPair(a, b):
            return a if which == 1 else b
    raise NbeError(f"projection from a non-pair: {type(p).__name__}")


def do_if(mt: ModeTheory, motive: Closure, tcase: Value, fcase: Value, scrut: Value) -> Value:
    match scrut:
        case VTrue():
            return tcase
        case VFalse():
            return fcase
        case VBoolNeutral(ne):
            return reflect(
                mt, inst_ty(mt, motive, scrut), ne.push(FrIf(motive, tcase, fcase))
            )
    raise NbeError(f"boolean elimination of {type(scrut).__name__}")


def do_letmod(
    mt: ModeTheory,
    mu: Modality,
    nu: Modality,
    motive: Closure,
    scrut: Value,
    branch: Closure,
) -> Value:
    match scrut:
        case VMod(ModBoxed(a)):
            return instantiate(mt, branch, a)
        case VMod(ModNeutral(ne, inner)):
            return reflect(
                mt,
                inst_ty(mt, motive, scrut),
                ne.push(FrLetMod(mu, nu, motive, branch, inner)),
            )
    raise NbeError(f"modal elimination of {type(scrut).__name__}")


def key_val(mt: ModeTheory, cell: Cell2, v: Value) -> Value:
    """Compose a key onto a stored value's neutral head(s).

    Environment atoms are reflections with identity head cells, so the
    composite is defined; on canonical values (possible only after a
    substitution) the key acts trivially.
    """

    def on_ne(ne: NeAbs) -> NeAbs | None:
        if eq_mod(mt, ne.cell.tgt, cell.src):
            return NeAbs(ne.level, vcomp(cell, ne.cell, mt), ne.frames)
        return None

    match v:
        case VBoolNeutral(ne):
            k = on_ne(ne)
            return VBoolNeutral(k) if k is not None else v
        case VCodeNeutral(ne):
            k = on_ne(ne)
            return VCodeNeutral(k) if k is not None else v
        case VNeutral(ty, ne):
            k = on_ne(ne)
            return VNeutral(ty, k) if k is not None else v
        case VMod(ModNeutral(ne, inner)):
            k = on_ne(ne)
            return VMod(ModNeutral(k, inner)) if k is not None else v
        case VPair(a, b):
            return VPair(key_val(mt, cell, a), key_val(mt, cell, b))
        case _:
            return v


# ---------------------------------------------------------------------------
# Reflect / reify


def reflect(mt: ModeTheory, T: TypeValue, ne: NeAbs) -> Value:
    match T:
        case TPi(_, _, _):
            return VNeutral(T, ne)
        case TSig(fst, snd):
            a = reflect(mt, fst, ne.push(FrProj1()))
            b = reflect(mt, inst_ty(mt, snd, a), ne.push(FrProj2()))
            return VPair(a, b)
        case TBool():
            return VBoolNeutral(ne)
        case TMod(_, inner):
            return VMod(ModNeutral(ne, inner))
        case TUni():
            return VCodeNeutral(ne)
        case TDec(c):
            if isinstance(c, CNeutral):
                return VNeutral(T, ne)
            return reflect(mt, dec_unfold(mt, c), ne.push(FrDecIso()))
    raise NbeError(f"cannot reflect at {type(T).__name__}")


def reify(mt: ModeTheory, d: int, mode: str, T: TypeValue, v: Value) -> Nf:
    match T:
        case TPi(mod, dom, cod):
            fresh = reflect(mt, dom, NeAbs(d, id_cell(mod)))
            body = do_app(mt, v, fresh)
            return NfLam(mod, reify(mt, d + 1, mode, inst_ty(mt, cod, fresh), body))
        case TSig(fst, snd):
            a = do_proj(mt, 1, v)
            b = do_proj(mt, 2, v)
            return NfPair(
                reify(mt, d, mode, fst, a),
                reify(mt, d, mode, inst_ty(mt, snd, a), b),
            )
        case TBool():
            match v:
                case VTrue():
                    return NfTrue()
                case VFalse():
                    return NfFalse()
                case VBoolNeutral(ne):
                    return NfInj(reify_ne(mt, d, mode, ne))
            raise NbeError(f"not a boolean value: {type(v).__name__}")
        case TMod(mod, inner):
            match v:
                case VMod(ModBoxed(a)):
                    return NfMkBox(mod, reify(mt, d, mod.mode_src, inner, a))
                case VMod(ModNeutral(ne, _)):
                    return NfInj(reify_ne(mt, d, mode, ne))
            raise NbeError(f"not a modal value: {type(v).__name__}")
        case TUni():
            match v:
                case VCode(c):
                    return _reify_code(mt, d, mode, c)
                case VCodeNeutral(ne):
                    return NfInj(reify_ne(mt, d, mode, ne))
            raise NbeError(f"not a universe value: {type(v).__name__}")
        case TDec(c):
            if isinstance(c, CNeutral):
                match v:
                    case VNeutral(_, ne):
                        return NfInj(reify_ne(mt, d, mode, ne))
                raise NbeError(f"canonical value at a neutral code: {type(v).__name__}")
            return NfDecIsoStar(reify(mt, d, mode, dec_unfold(mt, c), v))
    raise NbeError(f"cannot reify at {type(T).__name__}")


def _reify_code(mt: ModeTheory, d: int, mode: str, c: CodeValue) -> Nf:
    match c:
        case CPi(mod, dom, cod):
            fresh = reflect(mt, TDec(dom), NeAbs(d, id_cell(mod)))
            return NfFnCode(
                mod,
                reify(mt, d, mod.mode_src, TUni(), code_value(dom)),
                reify(mt, d + 1, mode, TUni(), instantiate(mt, cod, fresh)),
            )
        case CSig(fst, snd):
            fresh = reflect(mt, TDec(fst), NeAbs(d, id_cell(id_mod(mode))))
            return NfProdCode(
                reify(mt, d, mode, TUni(), code_value(fst)),
                reify(mt, d + 1, mode, TUni(), instantiate(mt, snd, fresh)),
            )
        case CBool():
            return NfBoolCode()
        case CMod(mod, code):
            return NfModifyCode(mod, reify(mt, d, mod.mode_src, TUni(), code_value(code)))
        case CNeutral(ne):
            return NfInj(reify_ne(mt, d, mode, ne))
    raise NbeError(f"cannot reify code {type(c).__name__}")


def reify_ne(mt: ModeTheory, d: int, mode: str, ne: NeAbs) -> Ne:
    idx = d - 1 - ne.level
    if idx < 0:
        raise NbeError(f"level {ne.level} escapes depth {d}")
    out: Ne = NeVar(idx, ne.cell)
    for fr in ne.frames:
        match fr:
            case FrApp(mod, arg, dom):
                out = NeApp(out, mod, reify(mt, d, mod.mode_src, dom, arg))
            case FrProj1():
                out = NeProj1(out)
            case FrProj2():
                out = NeProj2(out)
            case FrIf(motive, tcase, fcase):
                fresh = reflect(mt, TBool(), NeAbs(d, id_cell(id_mod(mode))))
                tau = reify_ty(mt, d + 1, mode, inst_ty(mt, motive, fresh))
                out = NeBoolRec(
                    tau,
                    out,
                    reify(mt, d, mode, inst_ty(mt, motive, VTrue()), tcase),
                    reify(mt, d, mode, inst_ty(mt, motive, VFalse()), fcase),
                )
            case FrLetMod(mu, nu, motive, branch, inner):
                box_fresh = reflect(mt, TMod(nu, inner), NeAbs(d, id_cell(mu)))
                tau = reify_ty(mt, d + 1, mode, inst_ty(mt, motive, box_fresh))
                arg_fresh = reflect(mt, inner, NeAbs(d, id_cell(compose_mod(mu, nu))))
                branch_ty = inst_ty(mt, motive, VMod(ModBoxed(arg_fresh)))
                u = reify(mt, d + 1, mode, branch_ty, instantiate(mt, branch, arg_fresh))
                out = NeLetMod(mu, nu, tau, out, u)
            case FrDecIso():
                out = NeDecIso(out)
            case _:
                raise NbeError(f"unknown frame {type(fr).__name__}")
    return out


def reify_ty(mt: ModeTheory, d: int, mode: str, T: TypeValue) -> NfTy:
    match T:
        case TBool():
            return NfBool()
        case TUni():
            return NfUni()
        case TPi(mod, dom, cod):
            fresh = reflect(mt, dom, NeAbs(d, id_cell(mod)))
            return NfFn(
                mod,
                reify_ty(mt, d, mod.mode_src, dom),
                reify_ty(mt, d + 1, mode, inst_ty(mt, cod, fresh)),
            )
        case TSig(fst, snd):
            fresh = reflect(mt, fst, NeAbs(d, id_cell(id_mod(mode))))
            return NfProd(
                reify_ty(mt, d, mode, fst),
                reify_ty(mt, d + 1, mode, inst_ty(mt, snd, fresh)),
            )
        case TMod(mod, inner):
            return NfModify(mod, reify_ty(mt, d, mod.mode_src, inner))
        case TDec(c):
            return NfDec(reify(mt, d, mode, TUni(), code_value(c)))
    raise NbeError(f"cannot reify type {type(T).__name__}")


# ---------------------------------------------------------------------------
# Entry points


def atoms_env(mt: ModeTheory, tele: Telescope) -> Env:
    """The initial environment: each variable entry reflected at its own type
    with an identity cell at its level."""
    vals: list[Value] = []
    level = 0
    for e in tele.entries:
        if isinstance(e, S.EVar):
            tyv = eval_ty(mt, Env(e.mod.mode_src, tuple(vals)), e.ty)
            vals.append(reflect(mt, tyv, NeAbs(level, id_cell(e.mod))))
            level += 1
    return Env(tele.mode, tuple(vals))


def normalize(mt: ModeTheory, tele: Telescope, ty: Term, tm: Term) -> Nf:
    env = atoms_env(mt, tele)
    return reify(
        mt, tele_depth(tele), tele.mode, eval_ty(mt, env, ty), eval_tm(mt, env, tm)
    )


def normalize_ty(mt: ModeTheory, tele: Telescope, ty: Term) -> NfTy:
    env = atoms_env(mt, tele)
    return reify_ty(mt, tele_depth(tele), tele.mode, eval_ty(mt, env, ty))
