"""Bidirectional type checking with conversion by normalization.

The checker carries a telescope together with its atom environment and the
semantic types of its variables.  Inference and checking follow the usual
bidirectional split: eliminations and annotated introductions infer,
unannotated introductions (lambdas, pairs, the inverse decoding coercion)
only check.  Conversion reifies both sides to normal forms and compares
them structurally, with all 2-cell equality questions delegated to the
mode theory's decider.

Accessing a variable demands an explicit 2-cell from its annotation to the
composite of the locks in front of it; no search is performed.  When that
cell is not an identity, the variable's stored type is transported to the
use site by reifying it in its own prefix, pushing it through the key
renaming (composed with the weakenings and locks separating the entry from
the use site), and re-evaluating the result.
"""

from __future__ import annotations

from dataclasses import dataclass

from .modeth import (
    Cell2,
    CellId,
    ModeError,
    ModeTheory,
    Modality,
    cell_check,
    compose_mod,
    eq_mod,
    id_cell,
    id_mod,
    is_id_cell,
)
from . import syntax as S
from .syntax import Term
from .normal import (
    Nf,
    NfTy,
    NormalError,
    RenComp,
    RenId,
    RenKey,
    RenLock,
    RenWeaken,
    Renaming,
    Telescope,
    decode_nfty,
    depth,
    eq_nf,
    eq_nfty,
    locks_of,
    rename_nfty,
    show_nfty,
    tele_entry,
    tele_extend,
    tele_lock,
)
from .nbe import (
    CNeutral,
    Closure,
    Env,
    ModBoxed,
    NbeError,
    NeAbs,
    TBool,
    TDec,
    TMod,
    TPi,
    TSig,
    TUni,
    TypeValue,
    VFalse,
    VMod,
    VTrue,
    Value,
    code_of,
    dec_unfold,
    do_proj,
    env_push,
    eval_tm,
    eval_ty,
    inst_ty,
    normalize,
    normalize_ty,
    reflect,
    reify,
    reify_ty,
)


class CheckError(Exception):
    pass


@dataclass(frozen=True)
class CheckCtx:
    """A telescope paired with its atoms and semantic variable types.

    ``types`` is parallel to the telescope's variable entries in telescope
    order (first entry first); ``env`` is always the atom environment of
    ``telescope``, extended incrementally instead of rebuilt.
    """

    mt: ModeTheory
    telescope: Telescope
    env: Env
    types: tuple[TypeValue, ...] = ()

    @property
    def mode(self) -> str:
        return self.telescope.mode


def empty_ctx(mt: ModeTheory, mode: str) -> CheckCtx:
    if mode not in mt.modes:
        raise CheckError(f"unknown mode {mode!r} in mode theory {mt.name!r}")
    return CheckCtx(mt, Telescope(mode, ()), Env(mode, ()))


def ctx_lock(ctx: CheckCtx, mu: Modality) -> CheckCtx:
    try:
        tele = tele_lock(ctx.telescope, mu)
    except NormalError as e:
        raise CheckError(str(e)) from None
    return CheckCtx(ctx.mt, tele, Env(mu.mode_src, ctx.env.vals), ctx.types)


def ctx_extend(ctx: CheckCtx, mu: Modality, ty_term: Term, tyv: TypeValue) -> CheckCtx:
    """Extend with a variable entry; ``ty_term`` must be ``tyv``'s syntax,
    well-scoped under the entry's lock (it is stored, never re-checked)."""
    try:
        tele = tele_extend(ctx.telescope, mu, ty_term)
    except NormalError as e:
        raise CheckError(str(e)) from None
    atom = reflect(ctx.mt, tyv, NeAbs(depth(ctx.telescope), id_cell(mu)))
    return CheckCtx(ctx.mt, tele, env_push(ctx.env, atom), ctx.types + (tyv,))


# ---------------------------------------------------------------------------
# Variables


def _drop_tail(entries: tuple) -> Renaming:
    """The renaming that forgets a telescope suffix, fusing its locks into
    one composite lock (acting: neutrals under the fused lock embed into
    the full telescope with their indices shifted past the suffix's
    variables)."""
    if not entries:
        return RenId()
    init, last = entries[:-1], entries[-1]
    inner = _drop_tail(init)
    if isinstance(last, S.ELock):
        return RenLock(last.mod, inner)
    return RenComp(inner, RenWeaken())


def lookup_var(ctx: CheckCtx, k: int, alpha: Cell2) -> TypeValue:
    try:
        entry = tele_entry(ctx.telescope, k)
    except NormalError:
        raise CheckError(f"unbound variable index {k}") from None
    ann = entry.mod
    nu = locks_of(ctx.telescope, k)
    if not cell_check(ctx.mt, alpha):
        raise CheckError(f"ill-formed 2-cell {alpha} on variable {k}")
    if not (eq_mod(ctx.mt, alpha.src, ann) and eq_mod(ctx.mt, alpha.tgt, nu)):
        raise CheckError(
            f"variable not accessible: no 2-cell {ann} => {nu} declared "
            f"(variable {k} carries {alpha.src} => {alpha.tgt})"
        )
    stored = ctx.types[len(ctx.types) - 1 - k]
    if isinstance(alpha.expr, CellId) or is_id_cell(ctx.mt, alpha):
        return stored
    # Transport along the key: reify in the entry's prefix, rename through
    # the key followed by the suffix embedding, and re-evaluate here.
    positions = [
        i for i, e in enumerate(ctx.telescope.entries) if isinstance(e, S.EVar)
    ]
    pos = positions[len(ctx.types) - 1 - k]
    prefix = Telescope(ann.mode_tgt, ctx.telescope.entries[:pos])
    nf = reify_ty(ctx.mt, depth(prefix), ann.mode_src, stored)
    r = RenComp(RenKey(alpha, prefix), _drop_tail(ctx.telescope.entries[pos:]))
    moved = rename_nfty(ctx.mt, r, nf, ann.mode_src)
    return eval_ty(ctx.mt, ctx.env, decode_nfty(moved))


# ---------------------------------------------------------------------------
# Conversion


def convert_ty(ctx: CheckCtx, a: TypeValue, b: TypeValue) -> bool:
    d = depth(ctx.telescope)
    return eq_nfty(
        ctx.mt,
        reify_ty(ctx.mt, d, ctx.mode, a),
        reify_ty(ctx.mt, d, ctx.mode, b),
    )


def convert_tm(ctx: CheckCtx, ty: TypeValue, v: Value, w: Value) -> bool:
    d = depth(ctx.telescope)
    return eq_nf(
        ctx.mt,
        reify(ctx.mt, d, ctx.mode, ty, v),
        reify(ctx.mt, d, ctx.mode, ty, w),
    )


def _show_ty(ctx: CheckCtx, ty: TypeValue) -> str:
    return show_nfty(ctx.mt, reify_ty(ctx.mt, depth(ctx.telescope), ctx.mode, ty))


def _require_mode(ctx: CheckCtx, mod: Modality, role: str) -> None:
    if mod.mode_tgt != ctx.mode:
        raise CheckError(
            f"mode mismatch: {role} modality {mod} lands in mode "
            f"{mod.mode_tgt}, but the ambient mode is {ctx.mode}"
        )


# ---------------------------------------------------------------------------
# Types


def check_type(ctx: CheckCtx, t: Term) -> TypeValue:
    match t:
        case S.Bool() | S.Uni():
            pass
        case S.Pi(mod, dom, cod):
            _require_mode(ctx, mod, "function domain")
            domv = check_type(ctx_lock(ctx, mod), dom)
            check_type(ctx_extend(ctx, mod, dom, domv), cod)
        case S.Sig(fst, snd):
            fstv = check_type(ctx, fst)
            check_type(ctx_extend(ctx, id_mod(ctx.mode), fst, fstv), snd)
        case S.Mod(mod, inner):
            _require_mode(ctx, mod, "modal type")
            check_type(ctx_lock(ctx, mod), inner)
        case S.Dec(code):
            check_tm(ctx, code, TUni())
        case _:
            raise CheckError(f"not a type: {S.show_term(t)}")
    return eval_ty(ctx.mt, ctx.env, t)


# ---------------------------------------------------------------------------
# Terms


def infer(ctx: CheckCtx, t: Term) -> TypeValue:
    mt = ctx.mt
    match t:
        case S.Var(k, cell):
            return lookup_var(ctx, k, cell)
        case S.App(fn, arg):
            tf = infer(ctx, fn)
            if not isinstance(tf, TPi):
                raise CheckError(f"application of a non-function: {_show_ty(ctx, tf)}")
            check_tm(ctx_lock(ctx, tf.mod), arg, tf.dom)
            return inst_ty(mt, tf.cod, eval_tm(mt, ctx.env, arg))
        case S.Proj1(p):
            tp = infer(ctx, p)
            if not isinstance(tp, TSig):
                raise CheckError(f"projection from a non-pair: {_show_ty(ctx, tp)}")
            return tp.fst
        case S.Proj2(p):
            tp = infer(ctx, p)
            if not isinstance(tp, TSig):
                raise CheckError(f"projection from a non-pair: {_show_ty(ctx, tp)}")
            return inst_ty(mt, tp.snd, do_proj(mt, 1, eval_tm(mt, ctx.env, p)))
        case S.True_() | S.False_():
            return TBool()
        case S.If(motive, tcase, fcase, scrut):
            check_tm(ctx, scrut, TBool())
            check_type(ctx_extend(ctx, id_mod(ctx.mode), S.Bool(), TBool()), motive)
            mot = Closure(ctx.env, motive)
            check_tm(ctx, tcase, inst_ty(mt, mot, VTrue()))
            check_tm(ctx, fcase, inst_ty(mt, mot, VFalse()))
            return inst_ty(mt, mot, eval_tm(mt, ctx.env, scrut))
        case S.MkBox(mod, body):
            _require_mode(ctx, mod, "box")
            return TMod(mod, infer(ctx_lock(ctx, mod), body))
        case S.LetMod(mu, nu, motive, scrut, branch):
            _require_mode(ctx, mu, "modal elimination")
            if nu.mode_tgt != mu.mode_src:
                raise CheckError(
                    f"mode mismatch: eliminated modality {nu} lands in mode "
                    f"{nu.mode_tgt}, but the lock opens mode {mu.mode_src}"
                )
            ts = infer(ctx_lock(ctx, mu), scrut)
            if not isinstance(ts, TMod) or not eq_mod(mt, ts.mod, nu):
                raise CheckError(
                    f"modal scrutinee mismatch: expected a value of Mod {nu}, "
                    f"got {_show_ty(ctx_lock(ctx, mu), ts)}"
                )
            inner = ts.inner
            inner_term = decode_nfty(
                reify_ty(mt, depth(ctx.telescope), nu.mode_src, inner)
            )
            check_type(
                ctx_extend(ctx, mu, S.Mod(nu, inner_term), TMod(nu, inner)), motive
            )
            mot = Closure(ctx.env, motive)
            comp = compose_mod(mu, nu)
            fresh = reflect(mt, inner, NeAbs(depth(ctx.telescope), id_cell(comp)))
            check_tm(
                ctx_extend(ctx, comp, inner_term, inner),
                branch,
                inst_ty(mt, mot, VMod(ModBoxed(fresh))),
            )
            return inst_ty(mt, mot, eval_tm(mt, ctx.env, scrut))
        case S.DecIso(body):
            tb = infer(ctx, body)
            if not isinstance(tb, TDec):
                raise CheckError(
                    f"decoding coercion applied at a non-decoded type: {_show_ty(ctx, tb)}"
                )
            if isinstance(tb.code, CNeutral):
                raise CheckError("cannot unfold a neutral code")
            return dec_unfold(mt, tb.code)
        case S.PiCode(mod, dom, cod):
            _require_mode(ctx, mod, "function-code domain")
            check_tm(ctx_lock(ctx, mod), dom, TUni())
            dom_code = code_of(eval_tm(mt, ctx.env, dom))
            check_tm(ctx_extend(ctx, mod, S.Dec(dom), TDec(dom_code)), cod, TUni())
            return TUni()
        case S.SigCode(fst, snd):
            check_tm(ctx, fst, TUni())
            fst_code = code_of(eval_tm(mt, ctx.env, fst))
            check_tm(
                ctx_extend(ctx, id_mod(ctx.mode), S.Dec(fst), TDec(fst_code)),
                snd,
                TUni(),
            )
            return TUni()
        case S.BoolCode():
            return TUni()
        case S.ModCode(mod, code):
            _require_mode(ctx, mod, "modal code")
            check_tm(ctx_lock(ctx, mod), code, TUni())
            return TUni()
        case S.Lam(_) | S.Pair(_, _) | S.DecIsoInv(_):
            raise CheckError(
                f"cannot infer a type for {type(t).__name__}: "
                "it must appear in a checking position"
            )
        case S.Pi(_, _, _) | S.Sig(_, _) | S.Bool() | S.Uni() | S.Mod(_, _) | S.Dec(_):
            raise CheckError(
                "type formers are not terms; the universe contains codes only"
            )
    raise CheckError(f"cannot infer {type(t).__name__}")


def check_tm(ctx: CheckCtx, t: Term, ty: TypeValue) -> None:
    mt = ctx.mt
    match t, ty:
        case S.Lam(body), TPi(mod, dom, cod):
            fresh = reflect(mt, dom, NeAbs(depth(ctx.telescope), id_cell(mod)))
            dom_term = decode_nfty(
                reify_ty(mt, depth(ctx.telescope), mod.mode_src, dom)
            )
            check_tm(ctx_extend(ctx, mod, dom_term, dom), body, inst_ty(mt, cod, fresh))
        case S.Lam(_), _:
            raise CheckError(f"function literal at non-function type {_show_ty(ctx, ty)}")
        case S.Pair(a, b), TSig(fst, snd):
            check_tm(ctx, a, fst)
            check_tm(ctx, b, inst_ty(mt, snd, eval_tm(mt, ctx.env, a)))
        case S.Pair(_, _), _:
            raise CheckError(f"pair literal at non-pair type {_show_ty(ctx, ty)}")
        case S.MkBox(mod, body), TMod(tmod, inner):
            if not eq_mod(mt, mod, tmod):
                raise CheckError(
                    f"modality mismatch: box {mod} at modal type Mod {tmod}"
                )
            check_tm(ctx_lock(ctx, mod), body, inner)
        case S.MkBox(_, _), _:
            raise CheckError(f"boxed term at non-modal type {_show_ty(ctx, ty)}")
        case S.DecIsoInv(body), TDec(code):
            if isinstance(code, CNeutral):
                raise CheckError("cannot unfold a neutral code")
            check_tm(ctx, body, dec_unfold(mt, code))
        case S.DecIsoInv(_), _:
            raise CheckError(
                f"inverse decoding coercion at a non-decoded type {_show_ty(ctx, ty)}"
            )
        case _:
            actual = infer(ctx, t)
            if not convert_ty(ctx, actual, ty):
                raise CheckError(
                    f"type mismatch: expected {_show_ty(ctx, ty)}, "
                    f"actual {_show_ty(ctx, actual)}"
                )


# ---------------------------------------------------------------------------
# Programs


@dataclass(frozen=True)
class DeclResult:
    name: str
    mode: str
    ok: bool
    ty_nf: "NfTy | None" = None
    body_nf: "Nf | None" = None
    error: "str | None" = None


@dataclass(frozen=True)
class Report:
    results: tuple[DeclResult, ...] = ()

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)


def check_program(mt: ModeTheory, decls) -> Report:
    """Check a sequence of (name, mode, type, body) declarations.

    Declarations are closed: any earlier-name references were inlined
    before reaching the kernel.  A failing declaration does not stop the
    rest; each result carries either normal forms or an error message.
    """
    results: list[DeclResult] = []
    for name, mode, ty, body in decls:
        try:
            ctx = empty_ctx(mt, mode)
            for part in (ty, body):
                if not S.scope_check(S.Context(mode), part):
                    raise CheckError(f"declaration {name!r} has an out-of-scope variable")
            tyv = check_type(ctx, ty)
            check_tm(ctx, body, tyv)
            tele = Telescope(mode, ())
            results.append(
                DeclResult(
                    name,
                    mode,
                    True,
                    normalize_ty(mt, tele, ty),
                    normalize(mt, tele, ty, body),
                )
            )
        except (CheckError, NormalError, NbeError, ModeError) as e:
            results.append(DeclResult(name, mode, False, error=str(e)))
    return Report(tuple(results))
