import json

import pytest

from semistab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_table1(capsys):
    code, out, _ = run(capsys, "table1")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 6
    assert lines[0] == "ell=2 p=3 n=1 bound=2^(2)*3^(1/2) ~6.9282 degree<=10"
    assert [l.rsplit("<=", 1)[1] for l in lines] == ["10", "22", "14", "68", "40", "168"]


def test_bound(capsys):
    code, out, _ = run(capsys, "bound", "--ell", "3", "--p", "5", "--n", "1")
    assert code == 0 and out.strip().endswith("degree<=68")
    code, out, _ = run(capsys, "bound", "--ell", "3", "--p", "2", "--n", "2")
    assert code == 0 and "2^(8/9)*3^(5/2)" in out


def test_exclude(capsys, tmp_path):
    code, out, _ = run(capsys, "exclude", "--ell", "3", "--p", "2")
    assert code == 0 and out.endswith("VERDICT CONTAINED Q(mu_3, 2^(1/3))\n")
    dest = tmp_path / "trace.txt"
    code, out, _ = run(capsys, "exclude", "--ell", "2", "--p", "7", "--out", str(dest))
    assert code == 0 and out == "VERDICT CONTAINED Q(mu_4, sqrt(7))\n"
    assert dest.read_text().startswith("TRACE")
    assert json.loads((tmp_path / "trace.txt.json").read_text())["verdict"]["kind"] == "CONTAINED"


def test_exclude_stuck_is_a_failure(capsys):
    code, out, _ = run(capsys, "exclude", "--ell", "3", "--p", "5", "--disable", "odd_class_number")
    assert code == 1 and "VERDICT STUCK" in out


def test_theorem42_and_prop43(capsys):
    code, out, _ = run(capsys, "theorem42", "--p", "5")
    assert code == 0 and "VERDICT EXCLUDED" in out
    code, out, _ = run(capsys, "prop43", "--p", "7")
    assert code == 0 and out.endswith("CONCLUSION NONEXISTENT\n")
    code, out, _ = run(capsys, "prop43", "--p", "17")
    assert code == 0 and out.endswith("CONCLUSION NO-OBSTRUCTION\n")


def test_herbrand(capsys):
    assert run(capsys, "herbrand", "--orders", "4,2,1", "--eval", "3/2") == (0, "5/8\n", "")
    assert run(capsys, "herbrand", "--orders", "4,2,1", "--eval", "5/8", "--psi")[1] == "3/2\n"


def test_symplectic(capsys):
    code, out, _ = run(capsys, "symplectic", "--q", "2", "--n", "1")
    assert code == 0 and out.splitlines()[:3] == ["span{(1,0)}", "span{(1,1)}", "span{(0,1)}"]
    code, out, _ = run(capsys, "symplectic", "--q", "3", "--n", "2", "--count-only")
    assert out == "q=3 n=2 enumerated=40 formula=40 OK\n"


@pytest.mark.parametrize("argv", [
    ["tower", "--ell", "3", "--t", "1", "--a", "1", "--steps", "3", "--monodromy", "1"],
    ["tower", "--ell", "2", "--t", "2", "--a", "1", "--steps", "3", "--strategy", "LAGRANGIAN_2GROUP", "--seed", "4"],
    ["tower", "--ell", "5", "--t", "1", "--a", "2", "--steps", "2", "--strategy", "lagrangian_tau"],
])
def test_tower(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.endswith("GROWTH OK\n")


def test_tower_output_for_unit_monodromy(capsys):
    _, out, _ = run(capsys, "tower", "--ell", "3", "--t", "1", "--a", "1", "--steps", "3", "--monodromy", "1")
    assert [l for l in out.splitlines() if l.startswith("step")] == [
        "step 0 stage=1 comp_order=0", "step 1 stage=2 comp_order=1",
        "step 2 stage=3 comp_order=2", "step 3 stage=4 comp_order=3",
    ]


def test_lemma24_fuzz(capsys):
    code, out, _ = run(capsys, "lemma24-fuzz", "--iters", "40", "--seed", "9")
    assert code == 0 and out.strip().endswith("OK")


@pytest.mark.parametrize("argv", [
    ["tower", "--ell", "3", "--t", "2", "--a", "1", "--steps", "4", "--seed", "11"],
    ["lemma24-fuzz", "--iters", "30", "--seed", "2"],
    ["exclude", "--ell", "5", "--p", "3"],
])
def test_output_is_deterministic(capsys, argv):
    assert run(capsys, *argv) == run(capsys, *argv)


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["table1", "--unknown"],
    ["herbrand", "--orders", "4,3", "--eval", "1"],
    ["herbrand", "--orders", "4,2", "--eval", "x"],
    ["exclude", "--ell", "2", "--p", "5"],
    ["symplectic", "--q", "6", "--n", "1"],
    ["tower", "--ell", "2", "--t", "1", "--a", "1", "--steps", "1", "--strategy", "LAGRANGIAN_TAU"],
    ["tower", "--ell", "3", "--t", "1", "--a", "0", "--steps", "1", "--strategy", "sideways"],
    ["prop43", "--p", "9"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_data_directory_override(capsys, monkeypatch, tmp_path):
    from semistab import discbounds

    (tmp_path / "odlyzko.txt").write_text("100,7\n")
    monkeypatch.setenv("SEMISTAB_DATA", str(tmp_path))
    discbounds.default_table.cache_clear()
    try:
        code, out, _ = run(capsys, "table1")
        assert code == 0 and all(l.endswith("degree<=7") for l in out.splitlines())
    finally:
        monkeypatch.delenv("SEMISTAB_DATA")
        discbounds.default_table.cache_clear()
