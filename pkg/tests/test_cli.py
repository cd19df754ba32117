"""Tests for the surface language: lexing, parsing, commands, round-trips."""

import pathlib

import pytest

from mtt import cli
from mtt import syntax as S
from mtt.check import check_program, check_tm, check_type, empty_ctx
from mtt.cli import ParseError, main, parse_file, surface_nf, tokenize
from mtt.modeth import (
    CellGen,
    CellVComp,
    CellWhiskL,
    CellWhiskR,
    Modality,
    compose_mod,
    id_cell,
    id_mod,
    pointed,
    walking,
)
from mtt.nbe import normalize
from mtt.normal import Telescope, eq_nf

IDM = id_mod("m")
MU = Modality("n", "m", ("mu",))
L = Modality("m", "m", ("l",))


def parse_term(src: str, mt, mode: str = "m"):
    p = cli.Parser(tokenize(src), mt)
    t = p.parse_term(mode, [])
    assert p.peek().kind == "eof"
    return t


def parse_type(src: str, mt, mode: str = "m"):
    p = cli.Parser(tokenize(src), mt)
    t = p.parse_type(mode, [])
    assert p.peek().kind == "eof"
    return t


# ---------------------------------------------------------------------------
# Tokenizer


def test_tokenizer_tracks_lines_and_columns():
    toks = tokenize("def x\n  := true")
    assert [(t.text, t.line, t.col) for t in toks[:4]] == [
        ("def", 1, 1),
        ("x", 1, 5),
        (":=", 2, 3),
        ("true", 2, 6),
    ]


def test_tokenizer_keeps_iso_inv_as_one_token():
    toks = tokenize("iso-inv iso")
    assert [t.text for t in toks[:2]] == ["iso-inv", "iso"]


def test_tokenizer_skips_comments():
    toks = tokenize("true -- ignored -> := junk\nfalse")
    assert [t.text for t in toks[:2]] == ["true", "false"]


def test_tokenizer_rejects_stray_characters():
    with pytest.raises(ParseError) as e:
        tokenize("def $")
    assert e.value.col == 5


# ---------------------------------------------------------------------------
# Types and terms


def test_parse_annotated_pi():
    t = parse_type("Pi (mu | x : Bool) -> Bool", walking())
    assert t == S.Pi(MU, S.Bool(), S.Bool())


def test_parse_pi_sugar_defaults_to_identity():
    t = parse_type("Pi (x : Bool) -> Bool", walking())
    assert t == S.Pi(IDM, S.Bool(), S.Bool())


def test_parse_sigma_and_dependent_use():
    t = parse_type("Sig (x : Uni) * dec x", walking())
    assert t == S.Sig(S.Uni(), S.Dec(S.Var(0, id_cell(IDM))))


def test_parse_modal_type_switches_ambient_mode():
    t = parse_type("Mod mu (Pi (x : Bool) -> Bool)", walking())
    assert t == S.Mod(MU, S.Pi(id_mod("n"), S.Bool(), S.Bool()))


def test_parse_lambda_and_application():
    t = parse_term("(\\f -> \\x -> f x) (\\y -> y)", walking())
    inner = S.Lam(S.Lam(S.App(S.Var(1, id_cell(IDM)), S.Var(0, id_cell(IDM)))))
    assert t == S.App(inner, S.Lam(S.Var(0, id_cell(IDM))))


def test_parse_projections_bind_tighter_than_application():
    t = parse_term("(\\p -> p.1 p.2) ", walking())
    p0 = S.Var(0, id_cell(IDM))
    assert t == S.Lam(S.App(S.Proj1(p0), S.Proj2(p0)))


def test_parse_letbox_annotations():
    t = parse_term(
        "\\(mu | x) -> letbox (id(m) | mu) [b. Bool] y = box mu true in true",
        walking(),
    )
    assert t == S.Lam(
        S.LetMod(IDM, MU, S.Bool(), S.MkBox(MU, S.True_()), S.True_())
    )
    # the branch variable carries the composite annotation
    t2 = parse_term(
        "letbox (id(m) | mu) [b. Bool] y = box mu true in true", walking()
    )
    assert t2.nu == MU and t2.mu == IDM


def test_parse_if_with_motive():
    t = parse_term("if [b. Bool] true then false else true", walking())
    assert t == S.If(S.Bool(), S.False_(), S.True_(), S.True_())


def test_parse_codes():
    t = parse_term("PiC (mu | x : BoolC) -> ModC mu x", walking())
    assert t == S.PiCode(MU, S.BoolCode(), S.ModCode(MU, S.Var(0, id_cell(MU))))


def test_parse_keyed_variable():
    t = parse_term("\\x -> box l x^pt", pointed())
    cell = t.body.body.cell
    assert t.body.body.idx == 0
    assert cell.expr == CellGen("pt")
    assert cell.src == IDM and cell.tgt == L


def test_parse_composite_cells():
    t = parse_term("\\x -> box l (box l x^(pt>l).pt)", pointed())
    cell = t.body.body.body.cell
    assert cell.expr == CellVComp(CellWhiskR(CellGen("pt"), L), CellGen("pt"))
    t2 = parse_term("\\x -> box l (box l x^l<pt.pt)", pointed())
    cell2 = t2.body.body.body.cell
    assert cell2.expr == CellVComp(CellWhiskL(L, CellGen("pt")), CellGen("pt"))


def test_parse_bare_id_key_means_identity():
    t = parse_term("\\x -> x^id", walking())
    assert t == S.Lam(S.Var(0, id_cell(IDM)))


def test_parse_errors_carry_positions():
    with pytest.raises(ParseError) as e:
        parse_term("\\x -> y", walking())
    assert "unknown identifier 'y'" in e.value.msg
    assert (e.value.line, e.value.col) == (1, 7)


def test_parse_rejects_unknown_cell():
    with pytest.raises(ParseError) as e:
        parse_term("\\x -> x^zap", pointed())
    assert "unknown 2-cell 'zap'" in e.value.msg


def test_parse_rejects_wrong_mode_modality():
    with pytest.raises(ParseError) as e:
        parse_type("Pi (mu | x : Bool) -> Bool", walking(), mode="n")
    assert "ambient mode is n" in e.value.msg


# ---------------------------------------------------------------------------
# Files, theories, declarations


def test_parse_file_defaults_to_trivial():
    mt, decls = parse_file("def t @m : Bool := true")
    assert mt.name == "trivial"
    assert decls[0].name == "t" and decls[0].body == S.True_()


def test_parse_file_shipped_theory_by_name():
    mt, _ = parse_file("theory adjoint\ndef t @m : Bool := true")
    assert mt.name == "adjoint"


def test_parse_file_inline_theory_block():
    mt, _ = parse_file(
        "theory { modes s; mod c : s -> s; rule c.c ~> c; decider rewrite; }"
    )
    assert mt.modes == ("s",)
    assert mt.modality_gens == {"c": ("s", "s")}
    assert mt.decider.word_rules == ((("c", "c"), ("c",)),)


def test_parse_file_theory_block_with_cell():
    mt, _ = parse_file(
        "theory { modes w; mod f : w -> w; cell step : id(w) => f; decider free; }"
    )
    src, tgt = mt.cell_gens["step"]
    assert src == id_mod("w") and tgt == Modality("w", "w", ("f",))


def test_parse_file_override_wins_over_block():
    mt, _ = parse_file("theory walking\ndef t @m : Bool := true", cli.SHIPPED["trivial"]())
    assert mt.name == "trivial"


def test_parse_file_rejects_duplicate_definitions():
    with pytest.raises(ParseError) as e:
        parse_file("def t @m : Bool := true\ndef t @m : Bool := false")
    assert "duplicate definition 't'" in e.value.msg


def test_definition_reference_splices_body():
    _, decls = parse_file("def t @m : Bool := true\ndef u @m : Bool := t")
    assert decls[1].body == S.True_()


def test_lambda_definition_reference_is_inferable():
    mt, decls = parse_file(
        "theory walking\n"
        "def k @m : Pi (mu | x : Bool) -> Mod mu Bool := \\(mu | x) -> box mu x\n"
        "def use @m : Mod mu Bool := k true"
    )
    report = check_program(mt, [(d.name, d.mode, d.ty, d.body) for d in decls])
    assert report.ok
    # the inferability wrapper computes away during normalization
    from mtt.normal import NfMkBox, NfTrue

    assert report.results[1].body_nf == NfMkBox(MU, NfTrue())


def test_definition_used_at_wrong_mode_is_rejected():
    with pytest.raises(ParseError) as e:
        parse_file(
            "theory walking\n"
            "def t @m : Bool := true\n"
            "def u @n : Bool := t"
        )
    assert "lives at mode m, used at mode n" in e.value.msg


# ---------------------------------------------------------------------------
# Commands


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


GOOD = """theory walking

-- constant modal function
def k @m : Pi (mu | x : Bool) -> Mod mu Bool := \\(mu | x) -> box mu x
def use @m : Mod mu Bool := k true
"""


def test_check_command_reports_and_exits_zero(tmp_path, capsys):
    path = write(tmp_path, "good.mtt", GOOD)
    assert main(["check", path]) == 0
    cap = capsys.readouterr()
    assert "checked k : Pi (mu | x0 : Bool) -> Mod mu (Bool)" in cap.out
    assert "checked use : Mod mu (Bool)" in cap.out
    assert cap.err == ""


def test_normalize_command_prints_normal_forms(tmp_path, capsys):
    path = write(tmp_path, "good.mtt", GOOD)
    assert main(["normalize", path, "use"]) == 0
    cap = capsys.readouterr()
    assert cap.out == "use : Mod mu (Bool)\nuse = box mu true\n"


def test_type_errors_exit_one_on_stderr(tmp_path, capsys):
    path = write(tmp_path, "bad.mtt", "def oops @m : Bool := (true, false)")
    assert main(["check", path]) == 1
    cap = capsys.readouterr()
    assert cap.out == ""
    assert f"{path}:1:1: error: oops:" in cap.err


def test_parse_errors_exit_two_on_stderr(tmp_path, capsys):
    path = write(tmp_path, "syn.mtt", "def broken @m : Bool :=")
    assert main(["check", path]) == 2
    cap = capsys.readouterr()
    assert cap.out == ""
    assert f"{path}:1:24:" in cap.err


def test_missing_file_exits_two(tmp_path, capsys):
    assert main(["check", str(tmp_path / "nope.mtt")]) == 2
    assert "nope.mtt" in capsys.readouterr().err


def test_checking_continues_past_a_failing_declaration(tmp_path, capsys):
    path = write(
        tmp_path,
        "mixed.mtt",
        "def fine @m : Bool := true\n"
        "def broken @m : Bool := (true, false)\n"
        "def after @m : Sig (x : Bool) * Bool := (true, false)\n",
    )
    assert main(["check", path]) == 1
    cap = capsys.readouterr()
    assert "checked fine : Bool" in cap.out
    assert "checked after : Sig (x0 : Bool) * Bool" in cap.out
    assert "error: broken:" in cap.err


def test_mode_theory_override_flag(tmp_path, capsys):
    path = write(tmp_path, "good.mtt", GOOD)
    assert main(["check", path, "--mode-theory", "trivial"]) == 2
    capsys.readouterr()
    assert main(["check", path, "--mode-theory", "walking"]) == 0
    capsys.readouterr()


def test_unknown_mode_theory_name(tmp_path, capsys):
    path = write(tmp_path, "good.mtt", GOOD)
    assert main(["check", path, "--mode-theory", "exotic"]) == 2
    assert "unknown mode theory 'exotic'" in capsys.readouterr().err


def test_print_core_dumps_elaborated_terms(tmp_path, capsys):
    path = write(tmp_path, "good.mtt", GOOD)
    assert main(["check", path, "--print-core"]) == 0
    cap = capsys.readouterr()
    assert "core k = (lam (box mu x0^id))" in cap.out


def test_normalize_unknown_name_exits_one(tmp_path, capsys):
    path = write(tmp_path, "good.mtt", GOOD)
    assert main(["normalize", path, "nosuch"]) == 1
    assert "no declaration named 'nosuch'" in capsys.readouterr().err


def test_output_is_deterministic(tmp_path, capsys):
    path = write(tmp_path, "good.mtt", GOOD)
    main(["normalize", path])
    first = capsys.readouterr()
    main(["normalize", path])
    second = capsys.readouterr()
    assert first.out == second.out and first.out


# ---------------------------------------------------------------------------
# Round trips: printed normal forms parse back to the same normal form


ROUNDTRIP_SOURCES = [
    (
        "trivial",
        "def f @m : Pi (x : Bool) -> Sig (y : Bool) * Bool := \\x -> (x, false)",
    ),
    (
        "trivial",
        "def g @m : Pi (c : Uni) -> Pi (x : dec c) -> dec c := \\c -> \\x -> x",
    ),
    (
        "trivial",
        "def h @m : dec BoolC := iso-inv true",
    ),
    (
        "walking",
        "def k @m : Pi (mu | x : Bool) -> Mod mu Bool := \\(mu | x) -> box mu x",
    ),
    (
        "walking",
        "def r @m : Pi (f : Mod mu Bool) -> Mod mu Bool :="
        "  \\f -> letbox (id(m) | mu) [b. Mod mu Bool] y = f in box mu y",
    ),
    (
        "pointed",
        "def p @m : Pi (x : Bool) -> Mod l Bool := \\x -> box l (x^pt)",
    ),
    (
        "pointed",
        "def q @m : Pi (x : Bool) -> Mod l (Mod l Bool) :="
        "  \\x -> box l (box l (x^(pt>l).pt))",
    ),
    (
        "adjoint",
        "def e @m : Pi (l.r | x : Bool) -> Bool := \\(l.r | x) -> x^eps",
    ),
]


@pytest.mark.parametrize("theory,src", ROUNDTRIP_SOURCES)
def test_normal_forms_roundtrip_through_the_parser(theory, src):
    mt, decls = parse_file(f"theory {theory}\n{src}")
    d = decls[0]
    report = check_program(mt, [(d.name, d.mode, d.ty, d.body)])
    assert report.ok, report.results[0].error
    nf = report.results[0].body_nf
    rendered = surface_nf(mt, nf, d.mode)
    reparsed = cli.Parser(tokenize(rendered), mt).parse_term(d.mode, [])
    ctx = empty_ctx(mt, d.mode)
    check_tm(ctx, reparsed, check_type(ctx, d.ty))
    nf2 = normalize(mt, Telescope(d.mode, ()), d.ty, reparsed)
    assert eq_nf(mt, nf, nf2)


# ---------------------------------------------------------------------------
# Corpus


CORPUS = sorted((pathlib.Path(__file__).parent / "corpus").glob("*.mtt"))


def test_corpus_is_large_enough():
    assert len(CORPUS) >= 30


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_file_checks(path, capsys):
    assert main(["check", str(path)]) == 0
    cap = capsys.readouterr()
    assert cap.err == ""
    assert cap.out.startswith("checked ")


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_normal_forms_roundtrip(path):
    mt, decls = parse_file(path.read_text(encoding="utf-8"))
    report = check_program(mt, [(d.name, d.mode, d.ty, d.body) for d in decls])
    assert report.ok
    for d, r in zip(decls, report.results):
        rendered = surface_nf(mt, r.body_nf, d.mode)
        reparsed = cli.Parser(tokenize(rendered), mt).parse_term(d.mode, [])
        ctx = empty_ctx(mt, d.mode)
        check_tm(ctx, reparsed, check_type(ctx, d.ty))
        nf2 = normalize(mt, Telescope(d.mode, ()), d.ty, reparsed)
        assert eq_nf(mt, r.body_nf, nf2), d.name
