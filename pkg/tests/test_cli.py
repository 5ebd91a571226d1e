import json
import math
from pathlib import Path
from typing import Any, Dict, List

import pytest

from zexp import verify
from zexp.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED, main
from zexp.verify import CheckResult


def _run(capsys: pytest.CaptureFixture, argv: List[str]) -> str:
    code = main(argv)
    assert code == EXIT_OK
    return capsys.readouterr().out


def _json(capsys: pytest.CaptureFixture, argv: List[str]) -> Dict[str, Any]:
    return json.loads(_run(capsys, argv))


def _write_pair(path: Path, a: List[List[float]], b: List[List[float]]) -> Path:
    path.write_text(
        json.dumps({"A": {"dim": len(a), "rows": a}, "B": {"dim": len(b), "rows": b}}),
        encoding="utf-8",
    )
    return path


def test_expand_right_degree_two(capsys: pytest.CaptureFixture) -> None:
    data = _json(capsys, ["expand", "--side", "right", "--degree", "2", "--format", "json"])
    terms = [(t["composition"], t["coefficient"]["num"], t["coefficient"]["den"]) for t in data["terms"]]
    assert terms == [([1], "1", "1"), ([1, 1], "1", "2"), ([2], "1", "1")]
    assert data["unit"] == {"num": "1", "den": "1"}


def test_expand_left_degree_two_carries_sign(capsys: pytest.CaptureFixture) -> None:
    data = _json(capsys, ["expand", "--side", "left", "--degree", "2", "--format", "json"])
    by_parts = {tuple(t["composition"]): t["coefficient"] for t in data["terms"]}
    assert by_parts[(2,)] == {"num": "-1", "den": "1"}


def test_expand_degree_zero_is_only_the_unit(capsys: pytest.CaptureFixture) -> None:
    data = _json(capsys, ["expand", "--degree", "0", "--format", "json"])
    assert data["terms"] == []
    assert data["degree"] == 0


def test_expand_text_and_latex(capsys: pytest.CaptureFixture) -> None:
    assert _run(capsys, ["expand", "--degree", "2"]) == "unit\t1/1\n(1,)\t1/1\n(1, 1)\t1/2\n(2,)\t1/1\n"
    latex = _run(capsys, ["expand", "--side", "left", "--degree", "2", "--format", "latex"])
    assert latex == "1 + \\mathcal{B}_{1} + \\frac{1}{2}\\mathcal{B}_{1}^{2} - \\mathcal{B}_{2}\n"


def test_expand_factor_cap(capsys: pytest.CaptureFixture) -> None:
    data = _json(capsys, ["expand", "--degree", "4", "--factors", "1", "--format", "json"])
    assert [t["composition"] for t in data["terms"]] == [[1], [2], [3], [4]]


def test_expand_rejects_negative_degree() -> None:
    with pytest.raises(SystemExit) as excinfo:
        main(["expand", "--degree", "-1"])
    assert excinfo.value.code == EXIT_USAGE


@pytest.mark.parametrize(
    "m,p,expected",
    [
        (2, 1, "X_{2,1} = \\mathcal{B}'_{2}\n"),
        (3, 3, "X_{3,3} = B^{3}\n"),
        (4, 3, "X_{4,3} = \\mathcal{B}'_{2}B^{2} + 2B\\mathcal{B}'_{2}B + 3B^{2}\\mathcal{B}'_{2}\n"),
    ],
)
def test_xmp_latex(capsys: pytest.CaptureFixture, m: int, p: int, expected: str) -> None:
    assert _run(capsys, ["xmp", str(m), str(p), "--format", "latex"]) == expected


def test_xmp_text_and_json(capsys: pytest.CaptureFixture) -> None:
    assert _run(capsys, ["xmp", "2", "1"]) == "degree 2: AB - BA\n"
    data = _json(capsys, ["xmp", "5", "2", "--format", "json"])
    assert [(t["composition"], t["coefficient"]["num"]) for t in data["factorized"]] == [
        ([4, 1], "1"),
        ([3, 2], "4"),
        ([2, 3], "6"),
        ([1, 4], "4"),
    ]


@pytest.mark.parametrize("m,p", [("2", "3"), ("13", "1"), ("0", "0")])
def test_xmp_out_of_range(m: str, p: str) -> None:
    assert main(["xmp", m, p]) == EXIT_USAGE


def test_verify_xmp_reports_36_identities(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    metrics = tmp_path / "metrics.prom"
    out = _run(capsys, ["verify", "xmp", "--metrics-file", str(metrics)])
    assert out.endswith("36 identities checked, 0 failed\n")
    assert "zexp_identities_checked_total" in metrics.read_text(encoding="utf-8")


def test_verify_json(capsys: pytest.CaptureFixture) -> None:
    data = _json(capsys, ["verify", "appendix", "--format", "json"])
    assert data["passed"] is True
    assert all(check["suite"] == "appendix" for check in data["checks"])


def test_verify_failure_exits_one(capsys: pytest.CaptureFixture, monkeypatch: pytest.MonkeyPatch) -> None:
    def _failing(bounds):
        yield CheckResult("xmp", "planted", False, "difference = AB")

    monkeypatch.setitem(verify.SUITES, "xmp", _failing)
    assert main(["verify", "xmp"]) == EXIT_VERIFY_FAILED
    assert "FAIL xmp: planted: difference = AB" in capsys.readouterr().out


def test_bch_symmetrized_text(capsys: pytest.CaptureFixture) -> None:
    out = _run(capsys, ["bch", "--degree", "2"])
    assert out == "degree 0: 1\ndegree 1: X + Y\ndegree 2: 1/2 XX + XY + 1/2 YY\n"


def test_bch_family_terms(capsys: pytest.CaptureFixture) -> None:
    data = _json(capsys, ["bch", "--family", "x", "--degree", "3", "--format", "json"])
    by_parts = {tuple(t["composition"]): t["coefficient"] for t in data["terms"]}
    assert by_parts[(2, 1)] == {"num": "-2", "den": "3"}
    latex = _run(capsys, ["bch", "--family", "y", "--degree", "2", "--format", "latex"])
    assert latex == "1 + \\mathcal{Y}_{1} + \\frac{1}{2}\\mathcal{Y}_{1}^{2} + \\mathcal{Y}_{2}\n"


def test_bch_symmetrized_latex_averages_both_forms(capsys: pytest.CaptureFixture) -> None:
    latex = _run(capsys, ["bch", "--degree", "1", "--format", "latex"])
    assert latex == (
        "\\frac{1}{2}\\left(1 + \\mathcal{X}_{1}\\right) + \\frac{1}{2}\\left(1 + \\mathcal{Y}_{1}\\right)\n"
    )


def test_eval_triangular_fixture(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    path = _write_pair(tmp_path / "pair.json", [[1.0, 0.0], [0.0, 2.0]], [[0.0, 1.0], [0.0, 0.0]])
    data = _json(capsys, ["eval", str(path), "--degree", "30", "--factors", "1", "--format", "json"])
    assert data["frobenius_error"] <= 1e-12
    assert data["result"]["rows"][0][1] == pytest.approx(math.e**2 - math.e, abs=1e-12)


def test_eval_zero_b(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    path = _write_pair(tmp_path / "pair.json", [[0.1, 0.2], [0.3, -0.1]], [[0.0, 0.0], [0.0, 0.0]])
    data = _json(capsys, ["eval", str(path), "--side", "left", "--degree", "5", "--format", "json"])
    assert data["frobenius_error"] <= 1e-13


def test_eval_input_errors(tmp_path: Path) -> None:
    mismatched = _write_pair(tmp_path / "bad.json", [[1.0]], [[0.0, 1.0], [0.0, 0.0]])
    assert main(["eval", str(mismatched), "--degree", "3"]) == EXIT_USAGE
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert main(["eval", str(broken), "--degree", "3"]) == EXIT_USAGE
    assert main(["eval", str(tmp_path / "missing.json"), "--degree", "3"]) == EXIT_USAGE


def test_eval_overflowing_input_is_reported(tmp_path: Path, caplog: pytest.LogCaptureFixture) -> None:
    path = _write_pair(tmp_path / "huge.json", [[1e308]], [[1e308]])
    with caplog.at_level("ERROR"):
        assert main(["eval", str(path), "--degree", "3"]) == EXIT_USAGE
    assert "overflows double precision" in caplog.text


def test_bench_random_fixture_is_monotone(capsys: pytest.CaptureFixture) -> None:
    data = _json(capsys, ["bench", "--dims", "4", "--degrees", "2,4,6,8,10,12", "--format", "json"])
    errors = [row["frobenius_error"] for row in data["reports"][0]["rows"]]
    assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
    assert errors[-1] <= 1e-8


def test_bench_triangular_fixture_uses_dim_minus_one_factors(capsys: pytest.CaptureFixture) -> None:
    data = _json(capsys, ["bench", "--dims", "2", "--degrees", "20,30", "--triangular", "--format", "json"])
    rows = data["reports"][0]["rows"]
    assert [row["factor_cap"] for row in rows] == [1, 1]
    assert rows[-1]["frobenius_error"] <= 1e-12


def test_bench_empty_degrees_is_a_usage_error() -> None:
    assert main(["bench", "--degrees", ""]) == EXIT_USAGE


@pytest.mark.parametrize("dims", ["0", "2,-1"])
def test_bench_non_positive_dimension_is_a_usage_error(dims: str) -> None:
    assert main(["bench", "--dims", dims, "--degrees", "2"]) == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        ["expand", "--degree", "5", "--format", "json"],
        ["xmp", "6", "3", "--format", "json"],
        ["verify", "duality"],
        ["bch", "--degree", "4", "--format", "json"],
    ],
)
def test_repeat_runs_are_byte_identical(capsys: pytest.CaptureFixture, argv: List[str]) -> None:
    assert _run(capsys, argv) == _run(capsys, argv)
