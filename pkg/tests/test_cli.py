"""End-to-end tests for kr.py, run as a subprocess."""

import json
import pytest
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).parent.parent

Z = {"rank": 1, "torsion": []}
Z2 = {"rank": 0, "torsion": [2]}

TWO_SPOT_PAGE = {
    "r": 2,
    "window": {"p": [0, 3], "q": [-3, 0]},
    "entries": [{"p": 0, "q": 0, "group": Z}, {"p": 2, "q": -1, "group": Z}],
    "differentials": [{"p": 0, "q": 0, "matrix": [[2]]}],
}


def run_script(args: list[str], timeout: int = 120) -> tuple:
    """Run kr.py; returns (exit code, parsed JSON or None, raw stdout)."""
    cmd = [sys.executable, str(ROOT / "kr.py")] + args

    result = subprocess.run(
        cmd,
        capture_output=True,
        text=True,
        timeout=timeout,
    )

    try:
        parsed = json.loads(result.stdout)
    except json.JSONDecodeError:
        parsed = None
    return result.returncode, parsed, result.stdout


def write_json(path: Path, data) -> str:
    path.write_text(json.dumps(data))
    return str(path)


class TestCurve:
    """Tests for the curve subcommand."""

    def test_genus_one_without_real_points(self, cache_dir):
        code, out, _ = run_script(["curve", "--genus", "1", "--real-components", "0", "--projective"])
        assert code == 0
        values = out["result"]["table"]["values"]
        assert values["0"] == {"rank": 2, "torsion": []}
        assert values["-1"] == {"rank": 1, "torsion": [2]}
        assert out["result"]["agree"] is True

    def test_affine(self, cache_dir):
        code, out, _ = run_script(["curve", "--affine", "--real-components", "3"])
        assert code == 0
        assert out["result"]["table"]["values"]["0"] == {"rank": 1, "torsion": [2, 2, 2]}

    def test_harnack_violation(self, cache_dir):
        code, out, _ = run_script(["curve", "--genus", "0", "--real-components", "5"])
        assert code == 2
        assert out["success"] is False
        assert out["error"].startswith("HarnackViolation:")

    def test_projective_needs_genus(self, cache_dir):
        code, out, _ = run_script(["curve", "--real-components", "0"])
        assert code == 2


class TestSphere:
    """Tests for the sphere subcommand."""

    def test_mod(self, cache_dir):
        code, out, _ = run_script(["sphere", "--dim", "2", "--mod", "8", "--degrees", "0..8"])
        assert code == 0
        rows = out["result"]["rows"]
        assert len(rows) == 9
        assert rows[0]["ko"] == rows[8]["ko"]

    def test_text_format(self, cache_dir):
        code, _, stdout = run_script(["--format", "text", "sphere", "--dim", "1", "--degrees", "0"])
        assert code == 0
        assert "Z + Z/2" in stdout

    def test_bad_degrees(self, cache_dir):
        code, out, _ = run_script(["sphere", "--dim", "1", "--degrees", "x..y"])
        assert code == 2


class TestSpectralSequences:
    """Tests for ss run and ss compare."""

    def test_run(self, cache_dir, tmp_path):
        page = write_json(tmp_path / "page.json", TWO_SPOT_PAGE)
        code, out, _ = run_script(["ss", "run", page])
        assert code == 0
        assert out["result"]["stable_at"] == 3
        assert out["result"]["abutment"] == {"1": [Z2]}

    def test_malformed_page(self, cache_dir, tmp_path):
        page = write_json(tmp_path / "page.json", {"r": 2})
        code, out, _ = run_script(["ss", "run", page])
        assert code == 2
        assert out["error"].startswith("InputError:")

    def test_compare_identity(self, cache_dir, tmp_path):
        a = write_json(tmp_path / "a.json", TWO_SPOT_PAGE)
        b = write_json(tmp_path / "b.json", TWO_SPOT_PAGE)
        code, out, _ = run_script(["ss", "compare", a, b, "--N", "3", "--r0", "2"])
        assert code == 0
        assert out["result"]["verdict"] == "confirmed"

    def test_compare_failed_hypothesis(self, cache_dir, tmp_path):
        target = dict(TWO_SPOT_PAGE, entries=[{"p": 2, "q": -1, "group": Z}], differentials=[])
        a = write_json(tmp_path / "a.json", dict(TWO_SPOT_PAGE, differentials=[]))
        b = write_json(tmp_path / "b.json", target)
        code, out, _ = run_script(["ss", "compare", a, b, "--N", "0"])
        assert code == 0
        assert out["result"]["verdict"] == "hypothesis_failed"
        assert out["result"]["spot"] == [0, 0]


class TestGcoh:
    """Tests for the gcoh subcommand."""

    def test_trivial_module(self, cache_dir, tmp_path):
        module = write_json(tmp_path / "module.json", {"kind": "trivial"})
        code, out, _ = run_script(["gcoh", module, "--degrees", "0..2"])
        assert code == 0
        assert [row["text"] for row in out["result"]["rows"]] == ["Z", "0", "Z/2"]

    def test_times_two_complex(self, cache_dir, tmp_path):
        data = {"terms": [{"kind": "trivial"}, {"kind": "trivial"}], "differentials": [[[2]]]}
        module = write_json(tmp_path / "complex.json", data)
        code, out, _ = run_script(["gcoh", module, "--degrees", "1"])
        assert out["result"]["kind"] == "hypercohomology"
        assert out["result"]["rows"][0]["group"] == Z2


class TestCache:
    """Tests for caching through the CLI."""

    def test_warm_run_is_byte_identical(self, cache_dir):
        args = ["sphere", "--dim", "3", "--degrees", "0..7", "--mod", "2"]
        _, _, cold = run_script(args)
        assert len(list(cache_dir.glob("*.json"))) == 1
        _, _, warm = run_script(args)
        assert cold == warm

    def test_no_cache(self, cache_dir):
        run_script(["--no-cache", "sphere", "--dim", "3"])
        assert not cache_dir.exists() or not list(cache_dir.glob("*.json"))

    def test_clear(self, cache_dir):
        run_script(["sphere", "--dim", "1"])
        code, out, _ = run_script(["cache", "clear"])
        assert code == 0
        assert out["result"]["removed"] == 1

    def test_get(self, cache_dir):
        run_script(["sphere", "--dim", "1", "--degrees", "0"])
        params = json.dumps({"dim": 1, "degrees": "0", "mod": None})
        code, out, _ = run_script(["cache", "get", "--command", "sphere", "--params", params])
        assert code == 0
        assert out["result"]["hit"] is True


class TestCheck:
    """Tests for the check subcommand."""

    def test_version(self):
        code, _, stdout = run_script(["--version"])
        assert code == 0
        assert "1.0.0" in stdout

    @pytest.mark.slow
    def test_lemmas(self, cache_dir):
        code, out, _ = run_script(["check", "lemmas", "--seed", "5"], timeout=1800)
        assert code == 0
        assert out["result"]["failed"] == []
