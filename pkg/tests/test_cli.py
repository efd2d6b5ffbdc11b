from __future__ import annotations

import math
import re

import numpy as np
import pytest

import sphere
import test_data
from entangle_sphere import entangle, linalg
from entangle_sphere.documents import read_grid


def _value(output: str, key: str) -> float:
    match = re.search(rf"^{re.escape(key)} = (\S+)", output, re.MULTILINE)
    assert match, f"{key!r} not found in output"
    return float(match.group(1))


def _probabilities(output: str) -> list[str]:
    return re.findall(r"^\[[+-]\] probability = (.*)$", output, re.MULTILINE)


@pytest.mark.parametrize(
    "path, expected",
    [
        (test_data.FILE_SINGLET, 0.0),
        (test_data.FILE_PRODUCT_00, 1.0),
        (test_data.FILE_SCHMIDT_06_08, 0.28),
    ],
)
def test_schmidt(capsys, path, expected):
    assert sphere.main(["schmidt", str(path)]) == 0
    output = capsys.readouterr().out
    assert _value(output, "r") == pytest.approx(expected, abs=1e-12)
    assert "x2^2:" in output


def test_collapse_diagonal_state(capsys):
    assert sphere.main(["collapse", str(test_data.FILE_SCHMIDT_06_08), "--theta", "0"]) == 0
    output = capsys.readouterr().out
    assert [float(p) for p in _probabilities(output)] == pytest.approx([0.36, 0.64])
    assert _value(output, "probability sum") == pytest.approx(1.0)


def test_collapse_product_reports_impossible_outcome(capsys):
    assert sphere.main(["collapse", str(test_data.FILE_PRODUCT_00), "--theta", "0"]) == 0
    up, down = _probabilities(capsys.readouterr().out)
    assert float(up) == pytest.approx(1.0)
    assert down == "0 (impossible)"


def test_collapse_singlet_in_degrees(capsys):
    argv = ["collapse", str(test_data.FILE_SINGLET), "--theta", "90", "--phi", "45", "--side", "2", "--degrees"]
    assert sphere.main(argv) == 0
    output = capsys.readouterr().out
    assert [float(p) for p in _probabilities(output)] == pytest.approx([0.5, 0.5])
    assert "theta=90, phi=45" in output


def test_luder_reports_unchanged_remote_trace(capsys):
    argv = ["luder", str(test_data.FILE_SCHMIDT_06_08), "--theta", "1.0", "--phi", "0.5"]
    assert sphere.main(argv) == 0
    output = capsys.readouterr().out
    assert "(unchanged)" in output
    assert "D1 after, Schmidt frame:" in output


def test_spheremap_writes_grid(tmp_path, capsys):
    out = tmp_path / "cone.csv"
    argv = ["spheremap", str(test_data.FILE_CONE_06), "--ntheta", "5", "--nphi", "8", "--out", str(out)]
    assert sphere.main(argv) == 0
    assert "wrote 40 rows" in capsys.readouterr().out

    table = read_grid(out)
    assert table.rows.shape == (40, 6)
    np.testing.assert_allclose(table.rows[16:24, 5], 0.6, atol=1e-9)
    r = 0.6
    cos_theta = np.cos(table.column("theta1"))
    np.testing.assert_allclose(table.column("norm2"), (1 + r * cos_theta) / 2, atol=1e-9)
    np.testing.assert_allclose(table.column("axis_projection"), (r + cos_theta) / (1 + r * cos_theta), atol=1e-9)


def test_spheremap_singlet_equator(tmp_path):
    out = tmp_path / "singlet.csv"
    argv = ["spheremap", str(test_data.FILE_SINGLET), "--ntheta", "5", "--nphi", "8", "--out", str(out)]
    assert sphere.main(argv) == 0
    np.testing.assert_allclose(read_grid(out).rows[16:24, 5], 0.0, atol=1e-9)


def test_spheremap_unwritable_path(tmp_path, capsys):
    out = tmp_path / "missing" / "grid.csv"
    argv = ["spheremap", str(test_data.FILE_SINGLET), "--ntheta", "5", "--nphi", "8", "--out", str(out)]
    assert sphere.main(argv) == 2
    assert "ERROR:" in capsys.readouterr().err


def test_malformed_document_names_field(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"amplitudes": [[1, 0], [0, 0], [0, "x"], [0, 0]]}')
    assert sphere.main(["schmidt", str(path)]) == 2
    assert "amplitudes.2.1" in capsys.readouterr().err


def test_invalid_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{amplitudes")
    assert sphere.main(["schmidt", str(path)]) == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert sphere.main(["schmidt", str(tmp_path / "nope.json")]) == 2


def test_normalize_flag(capsys):
    assert sphere.main(["schmidt", str(test_data.FILE_UNNORMALIZED)]) == 2
    capsys.readouterr()
    assert sphere.main(["schmidt", str(test_data.FILE_UNNORMALIZED), "--normalize"]) == 0
    assert _value(capsys.readouterr().out, "r") == pytest.approx(0.0, abs=1e-12)


def test_direction_out_of_range(capsys):
    argv = ["collapse", str(test_data.FILE_SINGLET), "--theta", "4"]
    assert sphere.main(argv) == 2
    assert "polar angle" in capsys.readouterr().err


def test_verify_with_no_cases(capsys):
    assert sphere.main(["verify", "--cases", "0"]) == 0
    assert "WARNING" in capsys.readouterr().out


def test_verify_passes(tmp_path, capsys):
    report = tmp_path / "VERIFY.md"
    argv = ["verify", "--cases", "20", "--skip-monte-carlo", "--output", str(report)]
    assert sphere.main(argv) == 0
    output = capsys.readouterr().out
    assert "FAIL" not in output
    assert "[verify] entangle/conjugate-linearity ... PASS" in output
    assert "[verify] oracle/monte-carlo-3-sigma ... SKIPPED" in output
    assert "[verify] entangle/near-product-schmidt ... PASS" in output
    assert "[verify] cli/document-round-trip ... PASS" in output
    assert "[verify] cli/grid-reparse ... PASS" in output
    text = report.read_text()
    assert "## Results" in text
    assert "| numpy |" in text
    assert "- Python: " in text


def test_verify_catches_linear_constraint(monkeypatch, capsys):
    def linear(constraint, x):
        return constraint.matrix @ linalg.as_vector2(x)

    monkeypatch.setattr(entangle, "apply_constraint", linear)
    assert sphere.main(["verify", "--cases", "10", "--skip-monte-carlo"]) == 1
    output = capsys.readouterr().out
    assert "[verify] entangle/conjugate-linearity ... FAIL" in output
    assert "first:" in output


def test_verify_rejects_bad_seed(capsys):
    assert sphere.main(["verify", "--seed", "-3", "--cases", "1"]) == 2
    assert sphere.main(["verify", "--seed", "-3", "--cases", "0"]) == 2


@pytest.mark.parametrize(
    "extra",
    [
        ["--workers", "0"],
        ["--workers", "-2"],
        ["--tolerance", "-1"],
        ["--tolerance", "nan"],
        ["--cases", "-5"],
    ],
)
def test_verify_rejects_bad_arguments(capsys, extra):
    assert sphere.main(["verify", "--cases", "3", "--skip-monte-carlo", *extra]) == 2
    captured = capsys.readouterr()
    assert "ERROR:" in captured.err
    assert "[verify]" not in captured.out
    assert "WARNING" not in captured.out


def test_tolerance_must_be_positive_for_every_command(capsys):
    argv = ["luder", str(test_data.FILE_SINGLET), "--theta", "0", "--tolerance", "0"]
    assert sphere.main(argv) == 2
    assert "--tolerance" in capsys.readouterr().err


def test_schmidt_of_nearly_product_document(tmp_path, capsys):
    r = 1 - 1e-8
    a, b = math.sqrt((1 + r) / 2), math.sqrt((1 - r) / 2)
    path = tmp_path / "near.json"
    # Hadamard on spin 1 moves the state off the computational axes
    s = 1 / math.sqrt(2)
    path.write_text(
        f'{{"amplitudes": [[{s * a!r}, 0], [{s * b!r}, 0], [{s * a!r}, 0], [{-s * b!r}, 0]]}}'
    )
    assert sphere.main(["schmidt", str(path)]) == 0
    assert _value(capsys.readouterr().out, "r") == pytest.approx(r, abs=1e-12)
    argv = ["spheremap", str(path), "--ntheta", "5", "--nphi", "4", "--out", str(tmp_path / "grid.csv")]
    assert sphere.main(argv) == 0


def test_bad_side_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        sphere.main(["collapse", str(test_data.FILE_SINGLET), "--theta", "0", "--side", "3"])
    assert excinfo.value.code == 2


def test_angles_are_in_radians_by_default(capsys):
    assert sphere.main(["collapse", str(test_data.FILE_SINGLET), "--theta", str(math.pi / 2)]) == 0
    assert "theta=1.57079632679" in capsys.readouterr().out
