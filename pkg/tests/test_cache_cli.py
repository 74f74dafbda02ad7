import json
import multiprocessing as mp
import subprocess
import sys

import pytest

from mulab import cache
from mulab.cache import JobSpec, cache_lookup_store
from mulab.cli import run_command

CURVE = "11:0 -1 1 -10 -20"


@pytest.fixture(autouse=True)
def tmp_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("MULAB_CACHE", str(tmp_path / "cache"))
    return tmp_path / "cache"


def test_hit_skips_the_producer(tmp_cache):
    calls = []
    spec = JobSpec("demo", {"b": 2, "a": [1, 2]})
    f = lambda: calls.append(1) or {"value": 42}
    assert cache_lookup_store(spec, f) == {"value": 42}
    assert cache_lookup_store(spec, f) == {"value": 42}
    assert len(calls) == 1


def test_canonical_key_ignores_dict_order():
    assert JobSpec("x", {"a": 1, "b": 2}).key == JobSpec("x", {"b": 2, "a": 1}).key
    assert JobSpec("x", {"a": 1}).key != JobSpec("x", {"a": 2}).key


def test_version_change_forces_recompute(tmp_cache):
    calls = []
    f = lambda: calls.append(1) or 7
    cache_lookup_store(JobSpec("demo", {}, version="1"), f)
    cache_lookup_store(JobSpec("demo", {}, version="2"), f)
    assert len(calls) == 2


def test_corrupt_entry_is_a_miss(tmp_cache, caplog):
    spec = JobSpec("demo", {"k": 1})
    cache_lookup_store(spec, lambda: {"v": 1})
    path = tmp_cache / f"{spec.key}.bin"
    path.write_bytes(path.read_bytes()[:-3] + b"xyz")
    assert cache_lookup_store(spec, lambda: {"v": 1}) == {"v": 1}
    assert "corrupt" in caplog.text
    assert cache_lookup_store(spec, lambda: 1 / 0) == {"v": 1}    # repaired entry


def _worker(args):
    directory, i = args
    from pathlib import Path
    return cache_lookup_store(JobSpec("race", {"n": 1}), lambda: {"v": [1, 2, 3]},
                              directory=Path(directory))


def test_concurrent_writers_leave_one_entry(tmp_cache):
    with mp.get_context("spawn").Pool(6) as pool:
        out = pool.map(_worker, [(str(tmp_cache), i) for i in range(24)])
    assert all(o == {"v": [1, 2, 3]} for o in out)
    files = sorted(p.name for p in tmp_cache.iterdir())
    assert len(files) == 1 and files[0].endswith(".bin")


def test_disabled_cache_writes_nothing(tmp_cache):
    cache_lookup_store(JobSpec("demo", {}), lambda: 1, enabled=False)
    assert not tmp_cache.exists()


# CLI -------------------------------------------------------------------------------

def test_split_level_command():
    code, out = run_command(["split-level", "--N", "14", "--disc", "-3"])
    d = json.loads(out)
    assert code == 0 and (d["Nplus"], d["Nminus"], d["parity"]) == (7, 2, "odd")


def test_eta_command():
    code, out = run_command(["eta", "--N", "11", "--N2", "1", "--p", "7", "--curve", CURVE])
    assert code == 0 and json.loads(out)["exponent"] == 0


def test_verify_mu_command_and_cache_identity():
    argv = ["verify-mu", "--curve", CURVE, "--disc", "-3", "--p", "7"]
    c1, a = run_command(argv)
    c2, b = run_command(argv)
    c3, c = run_command(argv + ["--no-cache"])
    assert c1 == c2 == c3 == 0 and a == b == c
    assert json.loads(a)["verdict"] == "pass"


def test_skip_exits_zero():
    code, out = run_command(["verify-mu", "--curve", CURVE, "--disc", "-3", "--p", "5"])
    assert code == 0 and json.loads(out)["verdict"] == "skipped"


def test_error_exits_one():
    code, out = run_command(["eta", "--N", "12", "--p", "7", "--curve", CURVE])
    assert code == 1 and "error" in json.loads(out)


def test_bad_curve_line():
    code, out = run_command(["tamagawa", "--curve", "12:0 -1 1 -10 -20", "--ell", "11", "--p", "5"])
    assert code == 1 and "conductor" in json.loads(out)["error"]


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as e:
        run_command(["no-such-command"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        run_command(["eta", "--bogus"])
    assert e.value.code == 2


def test_console_script_entry_point(tmp_cache):
    r = subprocess.run([sys.executable, "-m", "mulab.cli", "split-level", "--N", "14", "--disc", "-3"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["Nminus"] == 2


def test_output_is_sorted_json():
    _, out = run_command(["brandt", "--Nminus", "11", "--n", "2"])
    d = json.loads(out)
    assert out == json.dumps(d, sort_keys=True)
    assert d["matrix"] == [[1, 3], [2, 0]]


def test_corpus_scan_reads_file(tmp_path):
    f = tmp_path / "c.txt"
    f.write_text("# two curves\n11 : 0 -1 1 -10 -20\n46 : 1 -1 0 -10 -12\n")
    code, out = run_command(["corpus-scan", "--input", str(f)])
    d = json.loads(out)
    assert code == 0 and d["curves"] == 2
    assert any(t["tsum"] > 0 for t in d["triples_with_positive_t"])
