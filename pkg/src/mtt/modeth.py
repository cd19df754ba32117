"""Mode theories: finitely presented strict 2-categories with total equality.

A mode theory has a finite set of modes (objects), named modality generators
(1-cells between modes), named cell generators (2-cells between parallel
modality words), and a *decider* — a total procedure for equality of
modalities and of 2-cells.  Three decider kinds exist:

- ``FreeDecider``: no relations.  Words compare literally; 2-cells compare by
  the layered interchange normal form (see ``left_normal``).
- ``RewriteDecider``: a confluent, terminating word rewrite system supplied by
  the presenter normalizes 1-cells; 2-cells compare as in the free case with
  whisker words normalized piecewise.
- ``TableDecider``: for theories with finitely many cells.  Every whiskered
  generator layer is looked up in an explicit table and vertical composites
  are folded through a composition table.

Everything here is immutable and pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

Word = tuple[str, ...]


class ModeError(Exception):
    """Raised for mode mismatches and malformed presentations."""


# ---------------------------------------------------------------------------
# 1-cells


@dataclass(frozen=True)
class Modality:
    """A 1-cell: a word of generator names in application order.

    ``word[0]`` is applied first; the empty word is the identity on a mode.
    """

    mode_src: str
    mode_tgt: str
    word: Word = ()

    def is_identity_word(self) -> bool:
        return self.word == ()

    def __str__(self) -> str:
        if not self.word:
            return f"id_{self.mode_src}"
        # display in composition order (last applied leftmost)
        return ".".join(reversed(self.word))


def id_mod(mode: str) -> Modality:
    return Modality(mode, mode, ())


def gen_mod(mt: "ModeTheory", name: str) -> Modality:
    try:
        src, tgt = mt.modality_gens[name]
    except KeyError:
        raise ModeError(f"unknown modality generator {name!r}") from None
    return Modality(src, tgt, (name,))


def compose_mod(outer: Modality, inner: Modality) -> Modality:
    """Compose 1-cells: ``inner`` is applied first, then ``outer``."""
    if inner.mode_tgt != outer.mode_src:
        raise ModeError(
            f"cannot compose {outer} : {outer.mode_src} -> {outer.mode_tgt} "
            f"after {inner} : {inner.mode_src} -> {inner.mode_tgt}"
        )
    return Modality(inner.mode_src, outer.mode_tgt, inner.word + outer.word)


def check_word(mt: "ModeTheory", word: Word, start: str) -> str:
    """Check a word chains mode-correctly from ``start``; return its target."""
    at = start
    for g in word:
        if g not in mt.modality_gens:
            raise ModeError(f"unknown modality generator {g!r}")
        src, tgt = mt.modality_gens[g]
        if src != at:
            raise ModeError(f"word {word} breaks at {g!r}: expected source {at}, has {src}")
        at = tgt
    return at


def canon_word(mt: "ModeTheory", word: Word) -> Word:
    """Rewrite a word to its normal form under the decider's word rules."""
    rules = getattr(mt.decider, "word_rules", ())
    if not rules:
        return word
    w = list(word)
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            n = len(lhs)
            i = 0
            while i + n <= len(w):
                if tuple(w[i : i + n]) == lhs:
                    w[i : i + n] = list(rhs)
                    changed = True
                else:
                    i += 1
    return tuple(w)


def eq_mod(mt: "ModeTheory", a: Modality, b: Modality) -> bool:
    """Decide equality of 1-cells.  Non-parallel inputs are unequal, not errors."""
    if a.mode_src != b.mode_src or a.mode_tgt != b.mode_tgt:
        return False
    return canon_word(mt, a.word) == canon_word(mt, b.word)


# ---------------------------------------------------------------------------
# 2-cells

# Expression trees.  Boundaries are not stored per node; the wrapping Cell2
# carries the overall boundary and the canonicalizer recomputes the rest.


@dataclass(frozen=True)
class CellId:
    mod: Modality


@dataclass(frozen=True)
class CellGen:
    name: str


@dataclass(frozen=True)
class CellVComp:
    later: "CellExpr"
    earlier: "CellExpr"


@dataclass(frozen=True)
class CellWhiskL:
    mod: Modality
    cell: "CellExpr"


@dataclass(frozen=True)
class CellWhiskR:
    cell: "CellExpr"
    mod: Modality


CellExpr = Union[CellId, CellGen, CellVComp, CellWhiskL, CellWhiskR]


@dataclass(frozen=True)
class Cell2:
    """A 2-cell between parallel modalities, as an unevaluated expression."""

    src: Modality
    tgt: Modality
    expr: CellExpr

    def __str__(self) -> str:
        return show_cell_expr(self.expr)


def show_cell_expr(e: CellExpr) -> str:
    match e:
        case CellId(_):
            return "id"
        case CellGen(name):
            return name
        case CellVComp(later, earlier):
            return f"{show_cell_expr(later)}.{show_cell_expr(earlier)}"
        case CellWhiskL(mod, cell):
            return f"{mod}<{show_cell_expr(cell)}"
        case CellWhiskR(cell, mod):
            return f"{show_cell_expr(cell)}>{mod}"
    raise AssertionError(e)


def id_cell(mod: Modality) -> Cell2:
    return Cell2(mod, mod, CellId(mod))


def gen_cell(mt: "ModeTheory", name: str) -> Cell2:
    try:
        src, tgt = mt.cell_gens[name]
    except KeyError:
        raise ModeError(f"unknown cell generator {name!r}") from None
    return Cell2(src, tgt, CellGen(name))


def vcomp(later: Cell2, earlier: Cell2, mt: "ModeTheory | None" = None) -> Cell2:
    """Vertical composite: ``earlier`` first, then ``later``."""
    ok = (
        eq_mod(mt, earlier.tgt, later.src)
        if mt is not None
        else earlier.tgt == later.src
    )
    if not ok:
        raise ModeError(
            f"vertical composite boundary mismatch: {earlier.tgt} then {later.src}"
        )
    return Cell2(earlier.src, later.tgt, CellVComp(later.expr, earlier.expr))


def whisker_left(nu: Modality, alpha: Cell2) -> Cell2:
    """Whisker on the outer side: boundary ``nu . src  =>  nu . tgt``."""
    return Cell2(
        compose_mod(nu, alpha.src),
        compose_mod(nu, alpha.tgt),
        CellWhiskL(nu, alpha.expr),
    )


def whisker_right(alpha: Cell2, nu: Modality) -> Cell2:
    """Whisker on the inner side: boundary ``src . nu  =>  tgt . nu``."""
    return Cell2(
        compose_mod(alpha.src, nu),
        compose_mod(alpha.tgt, nu),
        CellWhiskR(alpha.expr, nu),
    )


# ---------------------------------------------------------------------------
# Canonical form of 2-cells: application-ordered single-generator layers


@dataclass(frozen=True)
class Atom:
    """One layer: a generator cell whiskered by an inner and an outer word.

    The layer acts on the subword at offset ``len(pre)``; ``pre`` is the part
    of the boundary word applied before the generator's boundary, ``post``
    after.
    """

    pre: Word
    gen: str
    post: Word


def cell_atoms(mt: "ModeTheory", cell: Cell2) -> list[Atom]:
    """Flatten a 2-cell expression into layers, in application order."""

    def go(e: CellExpr) -> list[Atom]:
        match e:
            case CellId(_):
                return []
            case CellGen(name):
                if name not in mt.cell_gens:
                    raise ModeError(f"unknown cell generator {name!r}")
                return [Atom((), name, ())]
            case CellVComp(later, earlier):
                return go(earlier) + go(later)
            case CellWhiskL(mod, inner):
                return [Atom(a.pre, a.gen, a.post + mod.word) for a in go(inner)]
            case CellWhiskR(inner, mod):
                return [Atom(mod.word + a.pre, a.gen, a.post) for a in go(inner)]
        raise AssertionError(e)

    return go(cell.expr)


def _gen_src_word(mt: "ModeTheory", name: str) -> Word:
    return mt.cell_gens[name][0].word


def _gen_tgt_word(mt: "ModeTheory", name: str) -> Word:
    return mt.cell_gens[name][1].word


def left_normal(mt: "ModeTheory", atoms: list[Atom]) -> tuple[Atom, ...]:
    """Interchange normal form: move every layer as early as it can go.

    A later layer whose input subword lies entirely at or left of an earlier
    layer's output subword is independent of it and bubbles past, with the
    whisker words adjusted.  The result is the unique left-handed
    representative of the diagram's interchange class.  Complete for
    presentations without scalar generators (both boundary words empty).
    """
    out = list(atoms)
    changed = True
    while changed:
        changed = False
        for i in range(len(out) - 1):
            a, b = out[i], out[i + 1]  # a applied first
            a_src, a_tgt = _gen_src_word(mt, a.gen), _gen_tgt_word(mt, a.gen)
            b_src = _gen_src_word(mt, b.gen)
            ao, bo = len(a.pre), len(b.pre)
            if bo + len(b_src) <= ao:
                # b reads left of a's write: swap, b now acts on a's source
                w0 = a.pre + a_src + a.post
                b2 = Atom(b.pre, b.gen, w0[bo + len(b_src) :])
                b_tgt = _gen_tgt_word(mt, b.gen)
                a2 = Atom(a.pre[:bo] + b_tgt + a.pre[bo + len(b_src) :], a.gen, a.post)
                out[i], out[i + 1] = b2, a2
                changed = True
    return tuple(out)


def _canon_atoms(mt: "ModeTheory", cell: Cell2) -> tuple[Atom, ...]:
    atoms = cell_atoms(mt, cell)
    if getattr(mt.decider, "word_rules", ()):
        atoms = [
            Atom(canon_word(mt, a.pre), a.gen, canon_word(mt, a.post)) for a in atoms
        ]
    return left_normal(mt, atoms)


def _table_value(mt: "ModeTheory", cell: Cell2) -> "str | None":
    """Fold a cell's layers through a TableDecider; None means identity."""
    dec = mt.decider
    assert isinstance(dec, TableDecider)
    value: str | None = None
    for a in cell_atoms(mt, cell):
        key = (canon_word(mt, a.pre), a.gen, canon_word(mt, a.post))
        try:
            name = dec.atom_map[key]
        except KeyError:
            raise ModeError(f"cell table does not cover layer {key}") from None
        if name is None:
            continue
        if value is None:
            value = name
        else:
            try:
                value = dec.vcomp_map[(name, value)]
            except KeyError:
                raise ModeError(
                    f"cell table does not cover composite {name} after {value}"
                ) from None
    return value


def eq_cell(mt: "ModeTheory", a: Cell2, b: Cell2) -> bool:
    """Decide 2-cell equality modulo the 2-category laws and the presentation."""
    if not (eq_mod(mt, a.src, b.src) and eq_mod(mt, a.tgt, b.tgt)):
        return False
    if isinstance(mt.decider, TableDecider):
        return _table_value(mt, a) == _table_value(mt, b)
    return _canon_atoms(mt, a) == _canon_atoms(mt, b)


def is_id_cell(mt: "ModeTheory", a: Cell2) -> bool:
    """True iff the cell equals the identity on its (necessarily equal) boundary."""
    if not eq_mod(mt, a.src, a.tgt):
        return False
    if isinstance(mt.decider, TableDecider):
        return _table_value(mt, a) is None
    return _canon_atoms(mt, a) == ()


def cell_boundary(mt: "ModeTheory", e: CellExpr) -> tuple[Modality, Modality]:
    """Recompute an expression's boundary (for validation in tests)."""
    match e:
        case CellId(mod):
            return mod, mod
        case CellGen(name):
            if name not in mt.cell_gens:
                raise ModeError(f"unknown cell generator {name!r}")
            return mt.cell_gens[name]
        case CellVComp(later, earlier):
            esrc, etgt = cell_boundary(mt, earlier)
            lsrc, ltgt = cell_boundary(mt, later)
            if not eq_mod(mt, etgt, lsrc):
                raise ModeError(f"ill-formed vertical composite: {etgt} then {lsrc}")
            return esrc, ltgt
        case CellWhiskL(mod, inner):
            isrc, itgt = cell_boundary(mt, inner)
            return compose_mod(mod, isrc), compose_mod(mod, itgt)
        case CellWhiskR(inner, mod):
            isrc, itgt = cell_boundary(mt, inner)
            return compose_mod(isrc, mod), compose_mod(itgt, mod)
    raise AssertionError(e)


def cell_check(mt: "ModeTheory", cell: Cell2) -> bool:
    """True iff the stored boundary matches the expression's computed one."""
    try:
        src, tgt = cell_boundary(mt, cell.expr)
    except ModeError:
        return False
    return eq_mod(mt, src, cell.src) and eq_mod(mt, tgt, cell.tgt)


# ---------------------------------------------------------------------------
# Deciders and the theory record


@dataclass(frozen=True)
class FreeDecider:
    """No relations: words literal, cells by interchange normal form."""


@dataclass(frozen=True, eq=False)
class RewriteDecider:
    """Word rules (lhs -> rhs), declared confluent and terminating."""

    word_rules: tuple[tuple[Word, Word], ...]


@dataclass(frozen=True, eq=False)
class TableDecider:
    """Finite enumeration: every layer and composite resolved by lookup.

    ``atom_map`` sends (normalized pre, generator, normalized post) to a cell
    name, or None for layers that the presentation collapses to an identity.
    ``vcomp_map`` composes named cells (identities are handled as units).
    """

    word_rules: tuple[tuple[Word, Word], ...]
    cells: Mapping[str, tuple[Modality, Modality]]
    atom_map: Mapping[tuple[Word, str, Word], "str | None"]
    vcomp_map: Mapping[tuple[str, str], str]


Decider = Union[FreeDecider, RewriteDecider, TableDecider]


@dataclass(frozen=True, eq=False)
class ModeTheory:
    """An immutable presentation plus its equality decider."""

    name: str
    modes: tuple[str, ...]
    modality_gens: Mapping[str, tuple[str, str]]  # name -> (src mode, tgt mode)
    cell_gens: Mapping[str, tuple[Modality, Modality]]  # name -> (src, tgt)
    decider: Decider


def validate(mt: ModeTheory) -> ModeTheory:
    """Check the presentation's invariants; return the theory for chaining."""
    for g, (src, tgt) in mt.modality_gens.items():
        if src not in mt.modes or tgt not in mt.modes:
            raise ModeError(f"modality generator {g!r} uses unknown mode(s) {src}, {tgt}")
    for c, (src, tgt) in mt.cell_gens.items():
        check_word(mt, src.word, src.mode_src)
        check_word(mt, tgt.word, tgt.mode_src)
        if (src.mode_src, src.mode_tgt) != (tgt.mode_src, tgt.mode_tgt):
            raise ModeError(f"cell generator {c!r} is not between parallel modalities")
    for lhs, rhs in getattr(mt.decider, "word_rules", ()):
        start = check_word_any(mt, lhs)
        end = check_word(mt, lhs, start)
        if check_word(mt, rhs, start) != end:
            raise ModeError(f"word rule {lhs} -> {rhs} does not preserve boundaries")
    return mt


def check_word_any(mt: ModeTheory, word: Word) -> str:
    """Find the unique start mode making ``word`` well-formed."""
    if not word:
        raise ModeError("empty rule left-hand side")
    return mt.modality_gens[word[0]][0] if word[0] in mt.modality_gens else _bad(word)


def _bad(word: Word) -> str:
    raise ModeError(f"unknown modality generator {word[0]!r}")


def mod_from_word(mt: ModeTheory, word: Word, start: str) -> Modality:
    """Build a modality from a word, checking mode chaining."""
    end = check_word(mt, word, start)
    return Modality(start, end, word)


# ---------------------------------------------------------------------------
# Shipped mode theories


def trivial() -> ModeTheory:
    """One mode, no generators: every modality and cell is an identity."""
    return validate(ModeTheory("trivial", ("m",), {}, {}, FreeDecider()))


def walking() -> ModeTheory:
    """Two modes and a single modality mu : n -> m with no cells."""
    return validate(
        ModeTheory("walking", ("n", "m"), {"mu": ("n", "m")}, {}, FreeDecider())
    )


def pointed() -> ModeTheory:
    """One mode, an endomodality l, and a point pt : id => l."""
    l = Modality("m", "m", ("l",))
    return validate(
        ModeTheory(
            "pointed",
            ("m",),
            {"l": ("m", "m")},
            {"pt": (id_mod("m"), l)},
            FreeDecider(),
        )
    )


def adjoint() -> ModeTheory:
    """A split coreflection: l : n -> m retracts along r with counit eps.

    The word rule collapses the round trip r.l (word [l, r]) to the identity
    on n, leaving five 1-cells; eps : l.r => id_m is the only non-identity
    2-cell.  Every whiskered copy of eps collapses to an identity (the
    triangle laws with a strict unit), which the finite table records.
    """
    lr = Modality("m", "m", ("r", "l"))  # l after r
    rules = ((("l", "r"), ()),)
    atom_map: dict[tuple[Word, str, Word], str | None] = {}
    for pre in ((), ("l",), ("r", "l")):
        for post in ((), ("r",), ("r", "l")):
            atom_map[(pre, "eps", post)] = "eps" if not pre and not post else None
    return validate(
        ModeTheory(
            "adjoint",
            ("n", "m"),
            {"l": ("n", "m"), "r": ("m", "n")},
            {"eps": (lr, id_mod("m"))},
            TableDecider(rules, {"eps": (lr, id_mod("m"))}, atom_map, {}),
        )
    )


THEORIES = {
    "trivial": trivial,
    "walking": walking,
    "pointed": pointed,
    "adjoint": adjoint,
}
