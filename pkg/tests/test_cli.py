import json
import subprocess
import sys

import pytest

from dualforge.cli import main
from dualforge.library import builtin


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_hom_count_exact_output(capsys):
    code, out, _ = run(capsys, "hom", "--dom", "builtin:2chain", "--cod", "builtin:2chain",
                       "--count")
    assert code == 0
    assert out.strip() == '{"count":3}'


def test_hom_list(capsys):
    code, out, _ = run(capsys, "hom", "--dom", "builtin:2antichain", "--cod", "builtin:2chain",
                       "--list")
    assert json.loads(out) == {"count": 4, "homs": [[0, 0], [0, 1], [1, 0], [1, 1]]}


def test_hom_from_files(tmp_path, capsys):
    a = tmp_path / "a.json"
    a.write_text(builtin("3dl").to_json())
    code, out, _ = run(capsys, "hom", "--dom", str(a), "--cod", "builtin:2dl")
    assert json.loads(out)["count"] == 2


def test_hom_manifest_flag(capsys):
    _, out, _ = run(capsys, "hom", "--dom", "builtin:2chain", "--cod", "builtin:2chain",
                    "--manifest")
    m = json.loads(out)["manifest"]
    assert m["command"] == "hom" and "version" in m


def test_deterministic_across_workers(capsys):
    outs = set()
    for w in ("1", "2", "4"):
        _, out, _ = run(capsys, "hom", "--dom", "builtin:S3", "--cod", "builtin:S3", "--list",
                        "--workers", w, "--manifest")
        outs.add(out)
    assert len(outs) == 1


def test_list_builtins(capsys):
    code, out, _ = run(capsys, "list-builtins")
    d = json.loads(out)
    assert code == 0 and "2dl" in d["structures"] and "priestley" in d["pairs"]


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "hom", "--dom", "builtin:nope", "--cod", "builtin:2dl")[0] == 2
    assert run(capsys, "hom", "--dom", "/does/not/exist.json", "--cod", "builtin:2dl")[0] == 2
    assert run(capsys, "ockham", "--m", "2")[0] == 2


def test_budget_from_environment():
    env = {"DUALFORGE_BUDGET": "3", "PATH": ""}
    r = subprocess.run([sys.executable, "-m", "dualforge", "hom", "--dom", "builtin:z6",
                        "--cod", "builtin:z6"], capture_output=True, text=True, env=env)
    assert r.returncode == 2 and "BudgetExceeded" in r.stderr


def test_check_duality_scan(capsys):
    code, out, _ = run(capsys, "check-duality", "--pair", "builtin:stone", "--power-bound", "2")
    d = json.loads(out)
    assert code == 0 and d["holds"] and d["manifest"]["command"] == "check-duality"


def test_check_duality_ghost_exit_code(tmp_path, capsys):
    from dualforge.library import implication_binary_alter_ego
    pair = tmp_path / "imp.json"
    pair.write_text(json.dumps(implication_binary_alter_ego().to_dict()))
    code, out, _ = run(capsys, "check-duality", "--pair", str(pair), "--power-bound", "3")
    assert code == 1
    assert any("ghost" in c for c in json.loads(out)["classes"])


def test_dualize(capsys):
    code, out, _ = run(capsys, "dualize", "--alg", "builtin:diamond", "--pair", "builtin:priestley")
    assert code == 0 and json.loads(out)["hom_count"] == 2


@pytest.fixture
def pres(tmp_path):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"ambient": "builtin:2dl", "exponent": 2, "generators": [[0, 1]]}))
    return str(p)


def test_natext_crosscheck(pres, capsys):
    code, out, _ = run(capsys, "natext", "--pres", pres, "--pair", "builtin:priestley",
                       "--crosscheck")
    d = json.loads(out)
    assert code == 0 and d["size"] == 3 and d["crosscheck"]["agree"]
    assert d["crosscheck"]["sizes"]["alter-ego"] == 3


def test_b0(pres, capsys):
    code, out, _ = run(capsys, "b0", "--pres", pres, "--class", "distributive-lattice")
    d = json.loads(out)
    assert code == 0 and d["claims"][0]["relation"] == "=" and d["claims"][0]["cite"]
    assert run(capsys, "b0", "--pres", pres, "--class", "nope")[0] == 2


def test_compactification_commands(capsys):
    code, out, _ = run(capsys, "nachbin", "--poset", "builtin:3chain")
    assert code == 0 and json.loads(out)["round_trip"]
    code, out, _ = run(capsys, "stonecech", "--n", "3")
    assert code == 0 and json.loads(out)["dual_size"] == 3
    code, out, _ = run(capsys, "filt", "--slat", "builtin:diamond-slat", "--double-check")
    d = json.loads(out)
    assert code == 0 and d["filters"] == 4 and d["double_check"]["holds"]


def test_ockham_emit(tmp_path, capsys):
    target = tmp_path / "s3.json"
    code, out, _ = run(capsys, "ockham", "--m", "3", "--emit-algebra", str(target))
    assert code == 0 and json.loads(out)["algebra_size"] == 12
    from dualforge.structure import Structure
    assert Structure.from_json(target.read_text()).size == 12


def test_ockham_search(capsys):
    code, out, _ = run(capsys, "ockham-search", "--m", "1")
    d = json.loads(out)
    assert code == 0 and d["found"] == 1 and d["alter_egos"][0]["u"] == [0, 2, 2]


def test_topswap(capsys):
    code, out, _ = run(capsys, "topswap", "--pair", "builtin:priestley", "--scan-bound", "2")
    assert code == 0 and json.loads(out)["holds"]


def test_out_file_and_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        assert main(["check-duality", "--pair", "builtin:hms", "--power-bound", "2",
                     "--out", str(target)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_suite_quick(capsys):
    code, out, err = run(capsys, "suite", "--quick")
    d = json.loads(out)
    assert code == 0 and d["passed"]
    assert len(d["criteria"]) == 10
    assert err.count("[PASS]") == 10
