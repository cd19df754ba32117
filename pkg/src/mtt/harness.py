"""Randomized well-typed term generation and kernel-independent oracles.

Three instruments for exercising the kernel:

- ``gen_typed_term`` builds random terms at a requested type, directed by
  the type's head and by which context variables are reachable through
  declared 2-cells.  Its output always passes the checker; when the target
  admits no term within the size budget it raises ``GenExhausted`` instead
  of guessing.
- ``oracle_eval_bool`` evaluates closed boolean terms (functions, pairs,
  boolean elimination; one mode, no codes) by leftmost-outermost
  rewriting with explicit term-level substitution.  It shares nothing
  with the evaluator used for normalization, so agreement between the two
  is evidence, not tautology.
- ``beta_eta_pairs`` is a fixed table of convertible pairs, one for each
  computation or extensionality rule, together with the telescope and
  type at which conversion must accept them.

Run ``python3 -m mtt.harness --trials N --seed S`` to fuzz all three
invariants from the command line.  The same seed always reproduces the
same sequence of cases.
"""

from __future__ import annotations

import argparse
import enum
import random
import sys
from dataclasses import dataclass

from . import syntax as S
from .syntax import Term
from .check import (
    CheckCtx,
    CheckError,
    check_tm,
    check_type,
    convert_ty,
    ctx_extend,
    ctx_lock,
    empty_ctx,
    lookup_var,
)
from .modeth import (
    Cell2,
    CellGen,
    ModeTheory,
    Modality,
    adjoint,
    compose_mod,
    eq_mod,
    id_cell,
    id_mod,
    pointed,
    trivial,
    walking,
)
from .nbe import (
    CNeutral,
    NeAbs,
    TBool,
    TDec,
    TMod,
    TPi,
    TSig,
    TUni,
    TypeValue,
    atoms_env,
    code_of,
    dec_unfold,
    do_proj,
    eval_tm,
    inst_ty,
    reflect,
    reify_ty,
)
from .normal import (
    Telescope,
    decode_nfty,
    depth,
    locks_of,
    tele_entry,
)


class HarnessError(Exception):
    pass


class GenExhausted(HarnessError):
    """The generator found no term of the requested type within budget."""


THEORIES = {
    "trivial": trivial,
    "walking": walking,
    "pointed": pointed,
    "adjoint": adjoint,
}


DEFAULT_WEIGHTS = (
    ("bool", 4.0),
    ("pi", 2.0),
    ("sigma", 2.0),
    ("mod", 2.0),
    ("dec", 1.0),
    ("uni", 0.5),
)


@dataclass(frozen=True)
class GenConfig:
    """Reproducible generation parameters.

    ``weights`` biases which connective heads invented types use; the
    production mix (variables versus introductions versus redexes) is
    fixed.  Equal configurations generate equal sequences.
    """

    seed: int = 0
    max_size: int = 12
    theory: str = "trivial"
    weights: tuple[tuple[str, float], ...] = DEFAULT_WEIGHTS


def theory_of(cfg: GenConfig) -> ModeTheory:
    if cfg.theory not in THEORIES:
        raise HarnessError(f"unknown mode theory {cfg.theory!r}")
    return THEORIES[cfg.theory]()


# ---------------------------------------------------------------------------
# Explicit substitution on core terms


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add ``by`` to every variable index at or above ``cutoff``."""
    match t:
        case S.Var(k, cell):
            return S.Var(k + by, cell) if k >= cutoff else t
        case S.Lam(b):
            return S.Lam(shift(b, by, cutoff + 1))
        case S.App(f, a):
            return S.App(shift(f, by, cutoff), shift(a, by, cutoff))
        case S.Pair(a, b):
            return S.Pair(shift(a, by, cutoff), shift(b, by, cutoff))
        case S.Proj1(p):
            return S.Proj1(shift(p, by, cutoff))
        case S.Proj2(p):
            return S.Proj2(shift(p, by, cutoff))
        case S.If(m, tc, fc, sc):
            return S.If(
                shift(m, by, cutoff + 1),
                shift(tc, by, cutoff),
                shift(fc, by, cutoff),
                shift(sc, by, cutoff),
            )
        case S.MkBox(mod, b):
            return S.MkBox(mod, shift(b, by, cutoff))
        case S.LetMod(mu, nu, m, sc, br):
            return S.LetMod(
                mu,
                nu,
                shift(m, by, cutoff + 1),
                shift(sc, by, cutoff),
                shift(br, by, cutoff + 1),
            )
        case S.DecIso(b):
            return S.DecIso(shift(b, by, cutoff))
        case S.DecIsoInv(b):
            return S.DecIsoInv(shift(b, by, cutoff))
        case S.Pi(mod, dom, cod):
            return S.Pi(mod, shift(dom, by, cutoff), shift(cod, by, cutoff + 1))
        case S.Sig(fst, snd):
            return S.Sig(shift(fst, by, cutoff), shift(snd, by, cutoff + 1))
        case S.Mod(mod, inner):
            return S.Mod(mod, shift(inner, by, cutoff))
        case S.Dec(c):
            return S.Dec(shift(c, by, cutoff))
        case S.PiCode(mod, dom, cod):
            return S.PiCode(mod, shift(dom, by, cutoff), shift(cod, by, cutoff + 1))
        case S.SigCode(fst, snd):
            return S.SigCode(shift(fst, by, cutoff), shift(snd, by, cutoff + 1))
        case S.ModCode(mod, c):
            return S.ModCode(mod, shift(c, by, cutoff))
        case _:
            return t  # constants: Bool, Uni, BoolCode, True_, False_


def subst(t: Term, s: Term, k: int = 0) -> Term:
    """Replace variable ``k`` by ``s`` in ``t`` and close the gap.

    Keys on the replaced variable are dropped: the oracle fragment lives
    in the one-mode theory, where every 2-cell is an identity.
    """
    match t:
        case S.Var(j, _):
            if j == k:
                return shift(s, k)
            return S.Var(j - 1, t.cell) if j > k else t
        case S.Lam(b):
            return S.Lam(subst(b, s, k + 1))
        case S.App(f, a):
            return S.App(subst(f, s, k), subst(a, s, k))
        case S.Pair(a, b):
            return S.Pair(subst(a, s, k), subst(b, s, k))
        case S.Proj1(p):
            return S.Proj1(subst(p, s, k))
        case S.Proj2(p):
            return S.Proj2(subst(p, s, k))
        case S.If(m, tc, fc, sc):
            return S.If(
                subst(m, s, k + 1),
                subst(tc, s, k),
                subst(fc, s, k),
                subst(sc, s, k),
            )
        case S.MkBox(mod, b):
            return S.MkBox(mod, subst(b, s, k))
        case S.LetMod(mu, nu, m, sc, br):
            return S.LetMod(
                mu, nu, subst(m, s, k + 1), subst(sc, s, k), subst(br, s, k + 1)
            )
        case S.Pi(mod, dom, cod):
            return S.Pi(mod, subst(dom, s, k), subst(cod, s, k + 1))
        case S.Sig(fst, snd):
            return S.Sig(subst(fst, s, k), subst(snd, s, k + 1))
        case S.Mod(mod, inner):
            return S.Mod(mod, subst(inner, s, k))
        case S.Dec(c):
            return S.Dec(subst(c, s, k))
        case _:
            return t


# ---------------------------------------------------------------------------
# Independent boolean oracle


class Oracle(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    OUT_OF_FUEL = "out-of-fuel"


def oracle_step(t: Term) -> "Term | None":
    """One leftmost-outermost rewrite, or None if ``t`` is normal."""
    match t:
        case S.App(S.Lam(b), a):
            return subst(b, a)
        case S.App(f, a):
            f2 = oracle_step(f)
            if f2 is not None:
                return S.App(f2, a)
            a2 = oracle_step(a)
            return S.App(f, a2) if a2 is not None else None
        case S.Lam(b):
            b2 = oracle_step(b)
            return S.Lam(b2) if b2 is not None else None
        case S.Proj1(S.Pair(a, _)):
            return a
        case S.Proj2(S.Pair(_, b)):
            return b
        case S.Proj1(p):
            p2 = oracle_step(p)
            return S.Proj1(p2) if p2 is not None else None
        case S.Proj2(p):
            p2 = oracle_step(p)
            return S.Proj2(p2) if p2 is not None else None
        case S.Pair(a, b):
            a2 = oracle_step(a)
            if a2 is not None:
                return S.Pair(a2, b)
            b2 = oracle_step(b)
            return S.Pair(a, b2) if b2 is not None else None
        case S.If(_, tc, _, S.True_()):
            return tc
        case S.If(_, _, fc, S.False_()):
            return fc
        case S.If(m, tc, fc, sc):
            sc2 = oracle_step(sc)
            if sc2 is not None:
                return S.If(m, tc, fc, sc2)
            tc2 = oracle_step(tc)
            if tc2 is not None:
                return S.If(m, tc2, fc, sc)
            fc2 = oracle_step(fc)
            return S.If(m, tc, fc2, sc) if fc2 is not None else None
        case S.True_() | S.False_() | S.Var(_, _):
            return None
    raise HarnessError(f"outside the boolean fragment: {type(t).__name__}")


def oracle_eval_bool(t: Term, fuel: int):
    """Evaluate a closed boolean term by rewriting, ``fuel`` steps at most."""
    for _ in range(fuel):
        match t:
            case S.True_():
                return Oracle.TRUE
            case S.False_():
                return Oracle.FALSE
        t2 = oracle_step(t)
        if t2 is None:
            raise HarnessError("stuck: not a closed boolean term")
        t = t2
    return Oracle.OUT_OF_FUEL


# ---------------------------------------------------------------------------
# Type-directed generation


class _Gen:
    def __init__(self, mt: ModeTheory, rng: random.Random, weights: dict):
        self.mt = mt
        self.rng = rng
        self.w = weights

    def _weighted(self, names: list) -> str:
        weights = [max(self.w.get(n, 1.0), 0.0) for n in names]
        if not any(weights):
            weights = [1.0] * len(names)
        return self.rng.choices(names, weights)[0]

    def _modality(self, mode: str) -> Modality:
        gens = [
            Modality(s, t, (g,))
            for g, (s, t) in self.mt.modality_gens.items()
            if t == mode
        ]
        return self.rng.choice([id_mod(mode)] + gens)

    # -- types

    def type_term(self, ctx: CheckCtx, size: int) -> Term:
        """A random type, returned as a checkable term."""
        if size <= 1:
            return S.Bool()
        head = self._weighted(["bool", "pi", "sigma", "dec", "uni", "mod"])
        if head == "bool":
            return S.Bool()
        if head == "uni":
            return S.Uni()
        if head == "dec":
            return S.Dec(self.code(ctx, size - 1))
        if head == "mod":
            mod = self._modality(ctx.mode)
            return S.Mod(mod, self.type_term(ctx_lock(ctx, mod), size - 1))
        if head == "pi":
            mod = self._modality(ctx.mode)
            dom = self.type_term(ctx_lock(ctx, mod), size // 2)
            domv = check_type(ctx_lock(ctx, mod), dom)
            cod = self.type_term(ctx_extend(ctx, mod, dom, domv), size // 2)
            return S.Pi(mod, dom, cod)
        fst = self.type_term(ctx, size // 2)
        fstv = check_type(ctx, fst)
        snd = self.type_term(
            ctx_extend(ctx, id_mod(ctx.mode), fst, fstv), size // 2
        )
        return S.Sig(fst, snd)

    def code(self, ctx: CheckCtx, size: int) -> Term:
        """A random universe element, mirroring the type grammar."""
        if size <= 1:
            return S.BoolCode()
        head = self._weighted(["bool", "pi", "sigma", "mod"])
        if head == "bool":
            return S.BoolCode()
        if head == "mod":
            mod = self._modality(ctx.mode)
            return S.ModCode(mod, self.code(ctx_lock(ctx, mod), size - 1))
        if head == "pi":
            mod = self._modality(ctx.mode)
            dom = self.code(ctx_lock(ctx, mod), size // 2)
            dom_code = code_of(eval_tm(self.mt, ctx.env, dom))
            ctx2 = ctx_extend(ctx, mod, S.Dec(dom), TDec(dom_code))
            return S.PiCode(mod, dom, self.code(ctx2, size // 2))
        fst = self.code(ctx, size // 2)
        fst_code = code_of(eval_tm(self.mt, ctx.env, fst))
        ctx2 = ctx_extend(ctx, id_mod(ctx.mode), S.Dec(fst), TDec(fst_code))
        return S.SigCode(fst, self.code(ctx2, size // 2))

    # -- terms

    def term(self, ctx: CheckCtx, ty: TypeValue, size: int) -> Term:
        builders = [(4.0, self._intro)]
        if size > 1:
            builders.append((3.0, self._spine))
            builders.append((1.5, self._redex))
        order = sorted(
            builders, key=lambda wb: -self.rng.random() * wb[0]
        )
        for _, build in order:
            try:
                return build(ctx, ty, size)
            except GenExhausted:
                continue
        raise GenExhausted(f"no term found at size {size}")

    def _intro(self, ctx: CheckCtx, ty: TypeValue, size: int) -> Term:
        mt = self.mt
        match ty:
            case TPi(mod, dom, cod):
                d = depth(ctx.telescope)
                dom_term = decode_nfty(reify_ty(mt, d, mod.mode_src, dom))
                fresh = reflect(mt, dom, NeAbs(d, id_cell(mod)))
                ctx2 = ctx_extend(ctx, mod, dom_term, dom)
                return S.Lam(self.term(ctx2, inst_ty(mt, cod, fresh), size - 1))
            case TSig(fst, snd):
                a = self.term(ctx, fst, size // 2)
                b_ty = inst_ty(mt, snd, eval_tm(mt, ctx.env, a))
                return S.Pair(a, self.term(ctx, b_ty, size // 2))
            case TBool():
                return S.True_() if self.rng.random() < 0.5 else S.False_()
            case TMod(mod, inner):
                return S.MkBox(
                    mod, self.term(ctx_lock(ctx, mod), inner, size - 1)
                )
            case TDec(code):
                if isinstance(code, CNeutral):
                    raise GenExhausted("opaque code")
                return S.DecIsoInv(self.term(ctx, dec_unfold(mt, code), size - 1))
            case TUni():
                return self.code(ctx, min(size, 6))
        raise GenExhausted(f"no introduction at {type(ty).__name__}")

    def _accessible(self, ctx: CheckCtx) -> list:
        """(index, key) pairs for every variable reachable from here."""
        out = []
        for k in range(len(ctx.types)):
            ann = tele_entry(ctx.telescope, k).mod
            nu = locks_of(ctx.telescope, k)
            if eq_mod(self.mt, ann, nu):
                out.append((k, id_cell(ann)))
            for name, (src, tgt) in self.mt.cell_gens.items():
                if eq_mod(self.mt, src, ann) and eq_mod(self.mt, tgt, nu):
                    out.append((k, Cell2(src, tgt, CellGen(name))))
        return out

    def _weaken_ty(self, ctx: CheckCtx, ty: TypeValue) -> Term:
        """The type as a term, shifted to sit under one more binder."""
        return shift(
            decode_nfty(reify_ty(self.mt, depth(ctx.telescope), ctx.mode, ty)), 1
        )

    def _spine(self, ctx: CheckCtx, ty: TypeValue, size: int) -> Term:
        mt = self.mt
        options = self._accessible(ctx)
        if not options:
            raise GenExhausted("no reachable variables")
        k, alpha = self.rng.choice(options)
        head: Term = S.Var(k, alpha)
        head_ty = lookup_var(ctx, k, alpha)
        budget = size
        while True:
            if convert_ty(ctx, head_ty, ty):
                return head
            if budget <= 0:
                raise GenExhausted("spine budget exhausted")
            budget -= 1
            match head_ty:
                case TPi(mod, dom, cod):
                    arg = self.term(ctx_lock(ctx, mod), dom, budget // 2)
                    head_ty = inst_ty(mt, cod, eval_tm(mt, ctx.env, arg))
                    head = S.App(head, arg)
                case TSig(fst, snd):
                    if self.rng.random() < 0.5:
                        head_ty, head = fst, S.Proj1(head)
                    else:
                        first = do_proj(mt, 1, eval_tm(mt, ctx.env, head))
                        head_ty, head = inst_ty(mt, snd, first), S.Proj2(head)
                case TDec(code):
                    if isinstance(code, CNeutral):
                        raise GenExhausted("opaque code in spine")
                    head_ty, head = dec_unfold(mt, code), S.DecIso(head)
                case TBool():
                    motive = self._weaken_ty(ctx, ty)
                    tc = self.term(ctx, ty, budget // 2)
                    fc = self.term(ctx, ty, budget // 2)
                    head, head_ty = S.If(motive, tc, fc, head), ty
                case TMod(nu, inner):
                    d = depth(ctx.telescope)
                    motive = self._weaken_ty(ctx, ty)
                    inner_term = decode_nfty(reify_ty(mt, d, nu.mode_src, inner))
                    comp = compose_mod(id_mod(ctx.mode), nu)
                    ctx2 = ctx_extend(ctx, comp, inner_term, inner)
                    branch = self.term(ctx2, ty, budget // 2)
                    head = S.LetMod(id_mod(ctx.mode), nu, motive, head, branch)
                    head_ty = ty
                case _:
                    raise GenExhausted(
                        f"cannot eliminate {type(head_ty).__name__} further"
                    )

    def _redex(self, ctx: CheckCtx, ty: TypeValue, size: int) -> Term:
        mt = self.mt
        if self.rng.random() < 0.5:
            motive = self._weaken_ty(ctx, ty)
            tc = self.term(ctx, ty, size // 2)
            fc = self.term(ctx, ty, size // 2)
            scrut = self.term(ctx, TBool(), max(size // 3, 1))
            return S.If(motive, tc, fc, scrut)
        nu = self._modality(ctx.mode)
        scrut = S.MkBox(nu, self.term(ctx_lock(ctx, nu), TBool(), size // 3))
        motive = self._weaken_ty(ctx, ty)
        inner_term = S.Bool()
        comp = compose_mod(id_mod(ctx.mode), nu)
        ctx2 = ctx_extend(ctx, comp, inner_term, TBool())
        branch = self.term(ctx2, ty, size // 2)
        return S.LetMod(id_mod(ctx.mode), nu, motive, scrut, branch)


def gen_type(cfg: GenConfig, ctx: CheckCtx, rng: "random.Random | None" = None) -> Term:
    """A random well-formed type in ``ctx``, as a term."""
    rng = rng if rng is not None else random.Random(cfg.seed)
    return _Gen(ctx.mt, rng, dict(cfg.weights)).type_term(ctx, cfg.max_size // 2)


def gen_typed_term(
    cfg: GenConfig,
    ctx: CheckCtx,
    ty: TypeValue,
    rng: "random.Random | None" = None,
) -> Term:
    """A random term of type ``ty``, or ``GenExhausted``."""
    rng = rng if rng is not None else random.Random(cfg.seed)
    return _Gen(ctx.mt, rng, dict(cfg.weights)).term(ctx, ty, cfg.max_size)


def gen_distinct_pair(
    cfg: GenConfig,
    ctx: CheckCtx,
    ty: TypeValue,
    rng: "random.Random | None" = None,
) -> "tuple[Term, Term]":
    """Two terms of type ``ty`` whose normal forms provably differ.

    The pair differs at a boolean or universe leaf reached through
    canonical structure, so conversion must reject it; every other
    component is generated randomly.
    """
    rng = rng if rng is not None else random.Random(cfg.seed)
    g = _Gen(ctx.mt, rng, dict(cfg.weights))

    def go(ctx: CheckCtx, ty: TypeValue) -> "tuple[Term, Term]":
        mt = ctx.mt
        match ty:
            case TBool():
                return S.True_(), S.False_()
            case TPi(mod, dom, cod):
                d = depth(ctx.telescope)
                dom_term = decode_nfty(reify_ty(mt, d, mod.mode_src, dom))
                fresh = reflect(mt, dom, NeAbs(d, id_cell(mod)))
                ctx2 = ctx_extend(ctx, mod, dom_term, dom)
                a, b = go(ctx2, inst_ty(mt, cod, fresh))
                return S.Lam(a), S.Lam(b)
            case TSig(fst, snd):
                a1, a2 = go(ctx, fst)
                b1 = g.term(ctx, inst_ty(mt, snd, eval_tm(mt, ctx.env, a1)), 2)
                b2 = g.term(ctx, inst_ty(mt, snd, eval_tm(mt, ctx.env, a2)), 2)
                return S.Pair(a1, b1), S.Pair(a2, b2)
            case TMod(mod, inner):
                a, b = go(ctx_lock(ctx, mod), inner)
                return S.MkBox(mod, a), S.MkBox(mod, b)
            case TDec(code):
                if isinstance(code, CNeutral):
                    raise GenExhausted("opaque code")
                a, b = go(ctx, dec_unfold(ctx.mt, code))
                return S.DecIsoInv(a), S.DecIsoInv(b)
            case TUni():
                return S.BoolCode(), S.SigCode(S.BoolCode(), S.BoolCode())
        raise GenExhausted(f"no distinct pair at {type(ty).__name__}")

    return go(ctx, ty)


# ---------------------------------------------------------------------------
# Closed boolean terms for differential testing


_BOOL = ("bool",)


def _simple_to_term(tau) -> Term:
    if tau == _BOOL:
        return S.Bool()
    if tau[0] == "fn":
        return S.Pi(id_mod("m"), _simple_to_term(tau[1]), _simple_to_term(tau[2]))
    return S.Sig(_simple_to_term(tau[1]), _simple_to_term(tau[2]))


def gen_closed_bool(cfg: GenConfig, rng: "random.Random | None" = None) -> Term:
    """A closed boolean term full of redexes, simply typed by construction.

    The terms deliberately contain function literals in applied position,
    which the bidirectional checker has no annotation for; both
    normalization and the oracle handle them, making the two comparable on
    exactly this fragment.
    """
    rng = rng if rng is not None else random.Random(cfg.seed)

    def simple_type(size: int):
        if size <= 1 or rng.random() < 0.5:
            return _BOOL
        if rng.random() < 0.6:
            return ("fn", simple_type(size // 2), simple_type(size // 2))
        return ("prod", simple_type(size // 2), simple_type(size // 2))

    def gen(env: list, tau, size: int) -> Term:
        hits = [i for i, sigma in enumerate(env) if sigma == tau]
        choices = ["intro"]
        if hits:
            choices += ["var"] * 2
        if size > 1:
            choices += ["beta", "ite", "app", "proj"]
        match rng.choice(choices):
            case "var":
                idx = len(env) - 1 - rng.choice(hits)
                return S.Var(idx, id_cell(id_mod("m")))
            case "beta":
                sigma = simple_type(size // 3)
                body = gen(env + [sigma], tau, size // 2)
                return S.App(S.Lam(body), gen(env, sigma, size // 2))
            case "ite":
                return S.If(
                    _simple_to_term(tau),
                    gen(env, tau, size // 2),
                    gen(env, tau, size // 2),
                    gen(env, _BOOL, size // 3),
                )
            case "app":
                fn = gen(env, ("fn", _BOOL, tau), size // 2)
                return S.App(fn, gen(env, _BOOL, size // 3))
            case "proj":
                other = simple_type(size // 3)
                if rng.random() < 0.5:
                    return S.Proj1(gen(env, ("prod", tau, other), size // 2))
                return S.Proj2(gen(env, ("prod", other, tau), size // 2))
            case _:
                if tau == _BOOL:
                    return S.True_() if rng.random() < 0.5 else S.False_()
                if tau[0] == "fn":
                    return S.Lam(gen(env + [tau[1]], tau[2], size - 1))
                return S.Pair(
                    gen(env, tau[1], size // 2), gen(env, tau[2], size // 2)
                )

    return gen([], _BOOL, cfg.max_size)


# ---------------------------------------------------------------------------
# Convertible pairs, one per rule


_IDM = id_mod("m")
_MU = Modality("n", "m", ("mu",))
_B = S.Bool()


def _v(k: int, mod: Modality = _IDM) -> Term:
    return S.Var(k, id_cell(mod))


PAIRS_THEORY = walking  # every listed pair lives at mode m of this theory

_PAIRS = {
    "pi-beta": (
        S.App(S.Lam(_v(0)), _v(0)),
        _v(0),
        Telescope("m", (S.EVar(_IDM, _B),)),
        _B,
    ),
    "pi-eta": (
        S.Lam(S.App(_v(1), _v(0))),
        _v(0),
        Telescope("m", (S.EVar(_IDM, S.Pi(_IDM, _B, _B)),)),
        S.Pi(_IDM, _B, _B),
    ),
    "sigma-beta": (
        S.Proj1(S.Pair(_v(1), _v(0))),
        _v(1),
        Telescope("m", (S.EVar(_IDM, _B), S.EVar(_IDM, _B))),
        _B,
    ),
    "sigma-eta": (
        S.Pair(S.Proj1(_v(0)), S.Proj2(_v(0))),
        _v(0),
        Telescope("m", (S.EVar(_IDM, S.Sig(_B, _B)),)),
        S.Sig(_B, _B),
    ),
    "bool-beta": (
        S.If(_B, S.True_(), S.False_(), S.True_()),
        S.True_(),
        Telescope("m", ()),
        _B,
    ),
    "modal-beta": (
        S.LetMod(
            _IDM,
            _MU,
            S.Mod(_MU, _B),
            S.MkBox(_MU, S.True_()),
            S.MkBox(_MU, _v(0, _MU)),
        ),
        S.MkBox(_MU, S.True_()),
        Telescope("m", ()),
        S.Mod(_MU, _B),
    ),
    "deciso-beta": (
        S.DecIso(S.DecIsoInv(_v(0))),
        _v(0),
        Telescope("m", (S.EVar(_IDM, _B),)),
        _B,
    ),
    "deciso-eta": (
        S.DecIsoInv(S.DecIso(_v(0))),
        _v(0),
        Telescope("m", (S.EVar(_IDM, S.Dec(S.BoolCode())),)),
        S.Dec(S.BoolCode()),
    ),
}


def beta_eta_pairs(connective: str) -> "tuple[Term, Term, Telescope, Term]":
    """(lhs, rhs, telescope, type) for one computation or eta rule."""
    if connective not in _PAIRS:
        raise HarnessError(f"unknown connective {connective!r}")
    return _PAIRS[connective]


CONNECTIVES = tuple(_PAIRS)


# ---------------------------------------------------------------------------
# Invariant campaigns


def _ctx_for(mt: ModeTheory, rng: random.Random) -> CheckCtx:
    return empty_ctx(mt, rng.choice(list(mt.modes)))


def run_soundness(trials: int, seed: int, out=None) -> bool:
    """Every generated term checks at its generated type."""
    out = sys.stdout if out is None else out
    checked = exhausted = 0
    names = sorted(THEORIES)
    for i in range(trials):
        cfg = GenConfig(seed=seed + i, theory=names[i % len(names)])
        rng = random.Random(cfg.seed)
        mt = theory_of(cfg)
        ctx = _ctx_for(mt, rng)
        try:
            ty_term = gen_type(cfg, ctx, rng)
            tyv = check_type(ctx, ty_term)
            tm = gen_typed_term(cfg, ctx, tyv, rng)
        except GenExhausted:
            exhausted += 1
            continue
        check_tm(ctx, tm, tyv)  # CheckError here is a soundness failure
        checked += 1
    print(
        f"soundness: {checked} generated terms checked, {exhausted} exhausted",
        file=out,
    )
    return True


def run_differential(trials: int, seed: int, fuel: int = 10_000, out=None) -> bool:
    """Normalization agrees with the rewriting oracle on closed booleans."""
    out = sys.stdout if out is None else out
    from .nbe import normalize
    from .normal import NfFalse, NfTrue

    agree = ran_out = 0
    mt = trivial()
    tele = Telescope("m", ())
    for i in range(trials):
        cfg = GenConfig(seed=seed + i)
        tm = gen_closed_bool(cfg)
        verdict = oracle_eval_bool(tm, fuel)
        if verdict is Oracle.OUT_OF_FUEL:
            ran_out += 1
            continue
        nf = normalize(mt, tele, S.Bool(), tm)
        expect = NfTrue() if verdict is Oracle.TRUE else NfFalse()
        if nf != expect:
            print(f"differential mismatch at seed {cfg.seed}", file=out)
            return False
        agree += 1
    print(
        f"differential: {agree} terms agreed, {ran_out} exhausted the fuel",
        file=out,
    )
    return True


def run_pairs(out=None) -> bool:
    """Conversion accepts every listed computation and eta rule."""
    out = sys.stdout if out is None else out
    from .check import convert_tm

    mt = PAIRS_THEORY()
    for name in CONNECTIVES:
        lhs, rhs, tele, ty = beta_eta_pairs(name)
        ctx = ctx_of_telescope(mt, tele)
        tyv = check_type(ctx, ty)
        # The left side may hold a redex with an unannotated introduction,
        # which bidirectional syntax cannot type; conversion compares the
        # values, where the redex has already computed.
        check_tm(ctx, rhs, tyv)
        if not convert_tm(
            ctx, tyv, eval_tm(mt, ctx.env, lhs), eval_tm(mt, ctx.env, rhs)
        ):
            print(f"pair not convertible: {name}", file=out)
            return False
    print(f"pairs: {len(CONNECTIVES)} rules convert", file=out)
    return True


def ctx_of_telescope(mt: ModeTheory, tele: Telescope) -> CheckCtx:
    """A checking context for a telescope (entry types re-checked)."""
    # A telescope records its final mode; the starting mode is the final
    # one unless a lock intervenes, in which case it is the first lock's
    # target.
    start = tele.mode
    for e in tele.entries:
        if isinstance(e, S.ELock):
            start = e.mod.mode_tgt
            break
    ctx = empty_ctx(mt, start)
    for e in tele.entries:
        if isinstance(e, S.ELock):
            ctx = ctx_lock(ctx, e.mod)
        else:
            ctx = ctx_extend(ctx, e.mod, e.ty, check_type(ctx_lock(ctx, e.mod), e.ty))
    return ctx


def main(argv: "list[str] | None" = None) -> int:
    ap = argparse.ArgumentParser(
        prog="python3 -m mtt.harness",
        description="Fuzz the kernel's generator, oracle, and conversion invariants.",
    )
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    ok = True
    try:
        ok &= run_soundness(args.trials, args.seed)
        ok &= run_differential(args.trials, args.seed)
        ok &= run_pairs()
    except (CheckError, HarnessError) as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return 1
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
