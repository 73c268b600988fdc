"""Tests for the result cache and config loading."""

import json
import pytest
import sys
from pathlib import Path

# Add parent to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from lib.cache import CACHE_DIR_ENV, ResultCache, cache_key
from lib.commands import cache_command, cache_params, run_job
from lib.config import DEFAULTS, load_config


class TestCacheKey:
    """Tests for cache_key."""

    def test_param_order_does_not_matter(self):
        a = cache_key("sphere", {"dim": 2, "mod": 8}, "1.0.0")
        b = cache_key("sphere", {"mod": 8, "dim": 2}, "1.0.0")
        assert a == b
        assert len(a) == 64

    def test_version_changes_key(self):
        assert cache_key("sphere", {"dim": 2}, "1.0.0") != cache_key("sphere", {"dim": 2}, "1.0.1")

    def test_file_params_use_content(self, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        first.write_text('{"r": 2}')
        second.write_text('{"r": 2}')
        assert cache_params("ss-run", {"page": str(first)}) == cache_params("ss-run", {"page": str(second)})
        second.write_text('{"r": 3}')
        assert cache_params("ss-run", {"page": str(first)}) != cache_params("ss-run", {"page": str(second)})


class TestResultCache:
    """Tests for ResultCache."""

    def test_put_get_clear(self, tmp_path):
        cache = ResultCache(tmp_path / "cache", "1.0.0")
        assert cache.get("sphere", {"dim": 1}) is None
        path = cache.put("sphere", {"dim": 1}, {"rows": [1, 2]})
        assert path.exists()
        assert cache.get("sphere", {"dim": 1}) == {"rows": [1, 2]}
        assert len(cache.entries()) == 1
        assert cache.clear() == 1
        assert cache.get("sphere", {"dim": 1}) is None

    def test_other_version_misses(self, tmp_path):
        ResultCache(tmp_path, "1.0.0").put("sphere", {"dim": 1}, {"x": 1})
        assert ResultCache(tmp_path, "2.0.0").get("sphere", {"dim": 1}) is None

    def test_corrupt_entry_is_a_miss(self, tmp_path):
        cache = ResultCache(tmp_path, "1.0.0")
        path = cache.put("sphere", {"dim": 1}, {"x": 1})
        path.write_text("{not json")
        assert cache.get("sphere", {"dim": 1}) is None

    def test_no_temporary_files_left(self, tmp_path):
        cache = ResultCache(tmp_path, "1.0.0")
        cache.put("sphere", {"dim": 1}, {"x": 1})
        assert not list(tmp_path.glob(".tmp-*"))

    def test_directory_from_environment(self, cache_dir):
        cache = ResultCache.from_config(load_config(), "1.0.0")
        assert cache.directory == cache_dir

    def test_clear_missing_directory(self, tmp_path):
        assert ResultCache(tmp_path / "never", "1.0.0").clear() == 0

    def test_run_job_uses_cache(self, tmp_path):
        cache = ResultCache(tmp_path, "1.0.0")
        params = {"dim": 3, "degrees": "0..2", "mod": None}
        cold = run_job("sphere", params, cache)
        cache.put("sphere", params, {"planted": True})
        warm = run_job("sphere", params, cache)
        assert cold["result"]["dim"] == 3
        assert warm["result"] == {"planted": True}

    def test_failures_are_not_cached(self, tmp_path):
        cache = ResultCache(tmp_path, "1.0.0")
        run_job("sphere", {"dim": -1, "degrees": "0", "mod": None}, cache)
        assert cache.entries() == []


class TestCacheCommand:
    """Tests for the cache get/put/clear command."""

    def test_put_then_get(self, tmp_path):
        cache = ResultCache(tmp_path / "cache", "1.0.0")
        value = tmp_path / "value.json"
        value.write_text(json.dumps({"answer": 42}))
        put = cache_command("put", cache, "sphere", {"dim": 1}, str(value))
        assert put["success"] is True
        got = cache_command("get", cache, "sphere", {"dim": 1})
        assert got["result"] == {"hit": True, "value": {"answer": 42}}

    def test_get_needs_params(self, tmp_path):
        result = cache_command("get", ResultCache(tmp_path, "1.0.0"), "sphere", None)
        assert result["exit_code"] == 2

    def test_clear(self, tmp_path):
        cache = ResultCache(tmp_path, "1.0.0")
        cache.put("sphere", {"dim": 1}, {"x": 1})
        result = cache_command("clear", cache)
        assert result["result"]["removed"] == 1


class TestConfig:
    """Tests for load_config."""

    def test_missing_file_gives_defaults(self, tmp_path):
        assert load_config(tmp_path / "none.json") == DEFAULTS

    def test_partial_override(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"check": {"fuzz_trials": 5}, "output": {"format": "text"}}))
        config = load_config(path)
        assert config["check"]["fuzz_trials"] == 5
        assert config["check"]["snf_trials"] == DEFAULTS["check"]["snf_trials"]
        assert config["output"]["format"] == "text"
        assert config["cache"] == DEFAULTS["cache"]

    def test_shipped_config_is_complete(self):
        config = load_config()
        assert set(config) == set(DEFAULTS)
        assert CACHE_DIR_ENV == "KR_CACHE_DIR"
