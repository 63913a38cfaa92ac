import io

import pytest

from snpforge import cli
from snpforge.logic import parse_sentence
from snpforge.structures import parse_structure
from snpforge.turing import trajectory

from conftest import SAMPLES


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def sample(name):
    return SAMPLES / name


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", sample("two_col.snp"))
    assert code == 0 and out == "MMSNP GMMSNP≠ GMSNP MPART connected\n"


def test_classify_verbose_gives_reasons(capsys, tmp_path):
    _, out, _ = run(capsys, "classify", "--verbose", sample("two_col.snp"))
    assert len(out.splitlines()) == 12 and " no" not in out
    binary = tmp_path / "binary.snp"
    binary.write_text("input E/2; exists Y/2; forbid E(x,y), Y(x,y);")
    _, out, _ = run(capsys, "classify", "--verbose", binary)
    monadic = next(l for l in out.splitlines() if l.startswith("is_monadic "))
    assert monadic.startswith("is_monadic no  # ")


class TestCheck:
    def test_satisfied_with_witness(self, capsys):
        code, out, _ = run(capsys, "check", "--sentence", sample("two_col.snp"),
                           "--structure", sample("path.struct"), "--witness")
        assert code == 0
        verdict, witness = out.splitlines()
        assert verdict == "satisfied"
        w = parse_structure(witness)
        assert w["E"] == {(0, 1), (1, 2)} and len(w["C"]) in (1, 2)

    def test_unsatisfied_exit_one(self, capsys):
        code, out, _ = run(capsys, "check", "--sentence", sample("two_col.snp"), "--structure", sample("triangle.struct"))
        assert code == 1 and out == "unsatisfied\n"

    def test_budget_exit_three(self, capsys):
        code, out, _ = run(capsys, "check", "--sentence", sample("two_col.snp"),
                           "--structure", sample("triangle.struct"), "--budget", "1")
        assert code == 3 and out == "budget_exceeded\n"

    def test_missing_file_exit_two(self, capsys, tmp_path):
        code, _, err = run(capsys, "check", "--sentence", tmp_path / "none.snp", "--structure", sample("path.struct"))
        assert code == 2 and err.startswith("error: cannot read")

    def test_parse_error_exit_two(self, capsys, tmp_path):
        bad = tmp_path / "bad.snp"
        bad.write_text("input E/2; exists ; forbid E(x);")
        code, _, err = run(capsys, "classify", bad)
        assert code == 2 and "error:" in err

    def test_argparse_error_exit_two(self, capsys):
        with pytest.raises(SystemExit) as e:
            cli.main(["check", "--sentence", "x"])
        assert e.value.code == 2

    def test_stdin(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO((SAMPLES / "triangle.struct").read_text()))
        code, out, _ = run(capsys, "check", "--sentence", sample("two_col.snp"), "--structure", "-")
        assert code == 1 and out == "unsatisfied\n"


class TestFormat:
    def test_header_written_and_stripped(self, capsys, tmp_path):
        target = tmp_path / "out.snp"
        code, _, _ = run(capsys, "transform", "gmsnp-concat", sample("two_col.snp"), "-o", target)
        text = target.read_text()
        assert code == 0 and text.startswith("snpforge-format 1\n")
        code, out, _ = run(capsys, "classify", target)
        assert code == 0 and "MMSNP" in out
        assert parse_sentence(text.split("\n", 1)[1]).input_sig.names == ("P",)

    def test_unknown_version(self, capsys, tmp_path):
        f = tmp_path / "v2.snp"
        f.write_text("snpforge-format 2\n" + (SAMPLES / "two_col.snp").read_text())
        code, _, err = run(capsys, "classify", f)
        assert code == 2 and "version" in err

    def test_concat_trace(self, capsys, tmp_path):
        trace = tmp_path / "trace.txt"
        run(capsys, "transform", "gmsnp-concat", sample("two_col.snp"), "--trace", trace)
        assert trace.read_text() == "snpforge-format 1\nlayout E@0..2\n"


def test_transform_to_mmsnp_exports_derived(capsys, tmp_path):
    trace = tmp_path / "derived.txt"
    code, out, _ = run(capsys, "transform", "gmmsnp2mmsnp", sample("two_col.snp"), "--trace", trace)
    assert code == 0 and "input E__1/2, E__2/1;" in out
    assert "E__2 <- E : {1,2}" in trace.read_text()


def test_reduce_forward_loop(capsys, tmp_path):
    loop = tmp_path / "loop.struct"
    loop.write_text("domain 1; E(0,0);")
    code, out, _ = run(capsys, "reduce", "fwd", "--stage", "gmmsnp", "--sentence", sample("two_col.snp"), "--structure", loop)
    assert code == 0
    assert parse_structure(out.split("\n", 1)[1])["E__2"] == {(0,)}


def test_reduce_enrich_has_no_backward(capsys):
    code, _, _ = run(capsys, "reduce", "bwd", "--stage", "gmsnp-enrich", "--sentence", sample("two_col.snp"),
                     "--structure", sample("path.struct"))
    assert code == 2


class TestMatrix:
    def test_check(self, capsys):
        assert run(capsys, "matrix", "check", "--matrix", sample("diag2.matrix"), "--graph", sample("path.struct"))[:2] == (0, "yes\n")
        assert run(capsys, "matrix", "check", "--matrix", sample("diag2.matrix"), "--graph", sample("triangle.struct"))[:2] == (1, "no\n")

    def test_needs_graph(self, capsys):
        assert run(capsys, "matrix", "check", "--matrix", sample("diag2.matrix"))[0] == 2


class TestMachines:
    def test_simulate(self, capsys):
        args = ("tm", "simulate", "--machine", sample("toy.tm"), "--steps", "0,1")
        assert run(capsys, *args, "--input", "a a")[:2] == (0, "accept\n")
        assert run(capsys, *args, "--input", "b a")[:2] == (1, "reject\n")

    def test_simulate_compiled(self, capsys):
        code, out, _ = run(capsys, "tm", "simulate", "--machine", sample("toy.tm"), "--steps", "0,1",
                           "--input", "a b", "--oblivious", "--traces")
        assert code == 0 and out.splitlines()[0] == "accept"
        assert out.splitlines()[1] == "trace " + " ".join(map(str, trajectory(2, 2)))

    def test_step_cap_exit_three(self, capsys):
        code, _, _ = run(capsys, "tm", "simulate", "--machine", sample("toy.tm"), "--steps", "0,1",
                         "--input", "a a", "--oblivious", "--step-cap", "3")
        assert code == 3

    def test_verify(self, capsys):
        code, out, _ = run(capsys, "tm", "verify", "--machine", sample("toy.tm"), "--steps", "0,1", "--n", "1", "2")
        assert len(out.strip().splitlines()) >= 2


class TestEmbed:
    def test_reverse_empty(self, capsys):
        code, out, _ = run(capsys, "embed", "reverse", "--bundle", sample("toy.bundle"), "--structure", sample("empty.struct"))
        assert (code, out) == (0, "case2 FixedYes\n")

    def test_grid_then_reverse(self, capsys, tmp_path):
        grid = tmp_path / "g.struct"
        run(capsys, "embed", "grid", "--bundle", sample("sweeper.bundle"), "--input", "a b", "-o", grid)
        code, out, _ = run(capsys, "embed", "reverse", "--bundle", sample("sweeper.bundle"), "--structure", grid)
        assert code == 0 and out.startswith("case3 MachineInput [a b] moves ")
        assert run(capsys, "embed", "decide", "--bundle", sample("sweeper.bundle"), "--structure", grid)[:2] == (0, "true\n")

    def test_decide_false(self, capsys, tmp_path):
        grid = tmp_path / "g.struct"
        run(capsys, "embed", "grid", "--bundle", sample("sweeper.bundle"), "--input", "a a", "-o", grid)
        assert run(capsys, "embed", "decide", "--bundle", sample("sweeper.bundle"), "--structure", grid)[:2] == (1, "false\n")

    def test_sentence(self, capsys):
        code, out, _ = run(capsys, "embed", "sentence", "--bundle", sample("sweeper.bundle"))
        assert code == 0 and "exists " in out and "Mark/1" in out


class TestFuzz:
    def test_certify_gmmsnp(self, capsys):
        code, out, _ = run(capsys, "fuzz", "certify", "--reduction", "gmmsnp-to-mmsnp", "--trials", "200", "--seed", "7")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "snpforge-format 1" and len(lines) == 202
        assert lines[-1].startswith("totals reduction=gmmsnp-to-mmsnp trials=200 ")
        assert lines[-1].endswith(" seed=7 prng=blake2b-counter-v1")

    def test_budget_exit(self, capsys):
        code, out, _ = run(capsys, "fuzz", "certify", "--reduction", "gmmsnp-enrich", "--trials", "5", "--seed", "1",
                           "--budget", "1")
        assert code in (0, 3)
        if code == 3:
            assert "BUDGET" in out
