import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from arrvar.cli import (InputError, InputSpec, fmt_class, fmt_q, main, parse_input, render,
                        run_command, serialize)
from conftest import RUN_A, RUN_CONES, RUN_D

def run_text(fixture_dir):
    return (fixture_dir / "run.arr").read_text()


def test_parse_running_fixture(fixture_dir):
    spec = parse_input(run_text(fixture_dir))
    assert spec.A == RUN_A
    assert spec.n == (2, 1, 1, 1, 1)
    assert spec.l == ((1, 1), (2,), (2,), (2,), (2,))
    assert spec.m == 1 and spec.d_rows == RUN_D
    assert spec.cones == [sorted(c) for c in RUN_CONES] and len(spec.cones) == 9
    assert spec.task == "singtype"


def test_parse_ample_fixture(fixture_dir):
    spec = parse_input((fixture_dir / "run-ample.arr").read_text())
    assert spec.cones is None and spec.ample == (3, 4)
    v = spec.variety()
    assert sorted(map(sorted, v.maximal_cones)) == sorted(map(sorted, RUN_CONES))


def error_line(text):
    with pytest.raises(InputError) as exc:
        parse_input(text)
    return exc.value.line, str(exc.value)


BASE = """[arrangement]
1 0 0 1 1
0 1 0 1 0
0 0 1 0 1
[exponents]
n = 2 1 1 1 1
l = 1 1 2 2 2 2
m = 1
[P]
-2 -3 1 1 1 1 1
"""


def test_wrong_l_length_reports_its_line():
    line, msg = error_line(BASE.replace("l = 1 1 2 2 2 2", "l = 1 1 2 2 2"))
    assert line == 7 and "l has 5 entries" in msg


def test_other_errors():
    assert error_line(BASE + "[fans]\n")[0] == 11
    assert "unknown section" in error_line(BASE + "[fans]\n")[1]
    line, msg = error_line(BASE.replace("0 1 0 1 0", "0 1 x 1 0"))
    assert line == 3 and "non-integer" in msg
    line, msg = error_line(BASE.replace("0 1 0 1 0", "0 1 0 1"))
    assert line == 3
    line, msg = error_line(BASE.replace("-2 -3 1 1 1 1 1", "-2 -3 1 1 1 1"))
    assert line == 10 and "n+m" in msg
    line, msg = error_line(BASE + "[fan]\n0 1 9\n")
    assert line == 12 and "out of range" in msg
    line, _ = error_line(BASE.replace("n = 2 1 1 1 1", "n = 2 1 1 1"))
    assert line == 6
    assert error_line("1 2 3\n")[0] == 1


def test_comments_and_brackets():
    text = BASE.replace("[P]", "# d rows follow\n[P]  # with a comment") + "[fan]\nample = [3/1, 4]\n"
    spec = parse_input(text)
    assert spec.ample == (3, 4)


def test_serialize_roundtrip(fixture_dir):
    for path in sorted(fixture_dir.glob("*.arr")):
        spec = parse_input(path.read_text())
        once = serialize(spec)
        assert serialize(parse_input(once)) == once
        assert parse_input(once) == spec


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 2), min_size=3, max_size=5),
       st.integers(0, 2), st.data())
def test_serialize_idempotent(n, m, data):
    ncols = len(n)
    A = [data.draw(st.lists(st.integers(-3, 3), min_size=ncols, max_size=ncols)) for _ in range(2)]
    N = sum(n) + m
    l = tuple(tuple(data.draw(st.integers(1, 3)) for _ in range(k)) for k in n)
    d = [data.draw(st.lists(st.integers(-5, 5), min_size=N, max_size=N))]
    if data.draw(st.booleans()):
        cones = [sorted(data.draw(st.sets(st.integers(0, N - 1), min_size=1, max_size=N)))]
        ample = None
    else:
        cones = None
        ample = tuple(Fraction(data.draw(st.integers(-9, 9)), data.draw(st.integers(1, 4)))
                      for _ in range(2))
    spec = InputSpec(A, l, m, d, cones, ample)
    text = serialize(spec)
    assert parse_input(text) == spec
    assert serialize(parse_input(text)) == text


def test_formatting(run_ring):
    assert fmt_q(Fraction(3, 6)) == "1/2" and fmt_q(4) == "4"
    assert fmt_class(run_ring.grading, (3, 4, 1, 0, 1)) == "(3, 4, [1 mod 2], [0 mod 2], [1 mod 2])"


def test_singtype_command(fixture_dir, capsys):
    assert main(["singtype", str(fixture_dir / "run.arr")]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "variables:"
    assert "  0 = T01" in out and "  6 = S1" in out
    assert out.splitlines()[-1] == "canonical (not terminal)"


def test_product_command(capsys):
    assert main(["product", "--k1", "6", "--k2", "5", "--a", "0,0,0,0,0"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "smooth, Fano, dim 7"


def test_run_uses_task(fixture_dir, capsys):
    assert main(["run", str(fixture_dir / "run.arr")]) == 0
    assert capsys.readouterr().out.endswith("canonical (not terminal)\n")


def test_json_reports_are_deterministic(fixture_dir, capsys):
    outs = []
    for _ in range(2):
        assert main(["trop", str(fixture_dir / "run.arr"), "--output", "json"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["structure"] == "nested sets" and len(rep["maximal_cones"]) == 10


def test_every_file_command(fixture_dir):
    spec = parse_input(run_text(fixture_dir))
    for cmd in ("ring", "variety", "trop", "acomplex", "singtype", "fano", "decompose"):
        rep = run_command(spec, cmd)
        assert rep["summary"]
        assert render(rep, "text").endswith(rep["summary"] + "\n")
        json.loads(render(rep, "json"))
    assert run_command(spec, "ring")["class_group"] == "Z^2 + (Z/2)^3"
    assert run_command(spec, "variety")["gorenstein_index"] == 2
    assert run_command(spec, "fano")["anticanonical"] == "(3, 4, [1 mod 2], [1 mod 2], [1 mod 2])"


def test_fine_trop_flag(fixture_dir, capsys):
    assert main(["trop", str(fixture_dir / "run.arr"), "--coarsen-trop", "no",
                 "--output", "json"]) == 0
    assert len(json.loads(capsys.readouterr().out)["maximal_cones"]) == 14


def test_classify_marks_running_example(capsys):
    assert main(["classify", "--picard", "2", "--case", "2b", "--output", "json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert any(row["known_as"] == "running example" for row in rep["classes"])


def test_exit_codes(tmp_path, fixture_dir, capsys):
    bad = tmp_path / "bad.arr"
    bad.write_text(BASE.replace("l = 1 1 2 2 2 2", "l = 1 1 2 2 2"))
    assert main(["ring", str(bad)]) == 2
    assert "line 7" in capsys.readouterr().err
    assert main(["ring", str(tmp_path / "missing.arr")]) == 2
    wall = tmp_path / "wall.arr"
    wall.write_text(BASE + "[fan]\nample = [1, 1]\n")
    assert main(["variety", str(wall)]) == 1
    assert "wall" in capsys.readouterr().err
    assert main(["singtype", str(fixture_dir / "not-honest.arr")]) == 1
    with pytest.raises(SystemExit):
        main(["ring"])


def test_classify_same_bytes_for_any_job_count(capsys):
    outs = []
    for jobs in ("1", "2"):
        assert main(["classify", "--picard", "1", "--jobs", jobs, "--output", "json"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
