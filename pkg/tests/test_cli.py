import json

import pytest

from ssforge.cli import parse_window, run, verify
from ssforge.pages import Window, loads


def test_parse_window():
    assert parse_window("0:16,-2:8") == Window((0, 16), (-2, 8))


def test_compute_json_round_trips(tmp_path, capsys):
    out = tmp_path / "page.json"
    code = run(["compute", "--preset", "hfpss-en", "--height", "1", "--out", str(out)])
    assert code == 0
    page = loads(out.read_text())
    assert page.n == 1 and page.window == Window((0, 16), (0, 8))
    assert capsys.readouterr().out == ""


def test_compute_svg_is_deterministic(tmp_path):
    args = ["compute", "--preset", "hfpss-en", "--height", "2", "--window", "0:16,0:16",
            "--page", "einf", "--format", "svg"]
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("<svg") and "<rect x=" in text and 'stroke="red"' in text


def test_compute_page_with_arrows(capsys):
    args = ["compute", "--preset", "tate-en-mod-ik", "--height", "2", "--k", "1",
            "--window", "0:16,-4:12", "--page", "3", "--format", "svg"]
    assert run(args) == 0
    assert 'class="d3"' in capsys.readouterr().out


def test_compute_ro_and_txt(capsys):
    assert run(["compute", "--preset", "hfpss-en", "--height", "1", "--ro",
                "--window", "0:8,0:4", "--page", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["page"] == 2
    assert run(["compute", "--preset", "hoss-en-mod-in", "--height", "1", "--format", "txt"]) == 0
    assert "hoss-en-mod-in n=1" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["compute", "--preset", "nope", "--height", "2"],
        ["compute", "--preset", "hfpss-en", "--height", "0"],
        ["compute", "--preset", "hfpss-en", "--height", "2", "--window", "0-16"],
        ["compute", "--preset", "hfpss-en", "--height", "2", "--page", "1"],
        ["compute", "--preset", "hoss", "--height", "2", "--ro"],
        ["compute", "--preset", "tate-en-mod-ik", "--height", "2", "--k", "5"],
        ["gh-shift", "--height", "1", "--method", "guess"],
    ],
)
def test_usage_errors_exit_2_and_write_nothing(tmp_path, argv):
    out = tmp_path / "out"
    assert run(argv + ["--out", str(out)]) == 2
    assert list(tmp_path.iterdir()) == []


def test_picard_and_shift(capsys):
    assert run(["picard", "--height", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["total_order"] == 8
    assert run(["picard", "--height", "2", "--format", "txt"]) == 0
    assert "Z/16" in capsys.readouterr().out
    assert run(["gh-shift", "--height", "3", "--method", "both", "--format", "txt"]) == 0
    assert capsys.readouterr().out == "7\n"


def test_verify(tmp_path):
    doc = verify(2)
    assert doc["ok"] and all(doc["checks"].values())
    out = tmp_path / "v.json"
    assert run(["verify", "--height", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["picard"]["total_order"] == 8


def test_chart_from_dump(tmp_path, capsys):
    page = tmp_path / "page.json"
    assert run(["compute", "--preset", "hfpss-en", "--height", "2", "--out", str(page)]) == 0
    assert run(["chart", "--input", str(page), "--format", "txt"]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0].startswith("hfpss-en n=2 page")
    assert run(["chart", "--input", str(tmp_path / "missing.json")]) == 2
