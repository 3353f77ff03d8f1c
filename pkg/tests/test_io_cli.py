import json

import pytest
from click.testing import CliRunner

from superairy.catalog import instantiate, list_entries
from superairy.cli import main
from superairy.io import (DocumentError, canonicalize, dumps, loads, structure_from_doc, structure_to_doc,
                         table_to_doc)
from superairy.recursion import compute_free_energy


@pytest.mark.parametrize("id_", list_entries())
def test_structure_round_trip(id_):
    doc = structure_to_doc(instantiate(id_))
    text = dumps(doc)
    assert dumps(structure_to_doc(structure_from_doc(loads(text)))) == text
    assert canonicalize(doc) == doc


def test_canonicalize_sorts_symmetric_slots():
    doc = structure_to_doc(instantiate("1|2-susy"))
    row = next(r for r in doc["A"] if r["indices"] == [1, 2, 3])
    row["indices"] = [1, 3, 2]
    row["value"] = "-" + row["value"]
    assert canonicalize(doc) == structure_to_doc(instantiate("1|2-susy"))


def test_conflicting_entries_rejected():
    doc = structure_to_doc(instantiate("1|2-susy"))
    doc["A"].append({"indices": [1, 3, 2], "value": "5"})
    with pytest.raises(DocumentError):
        structure_from_doc(doc)


def test_table_document_sorted():
    doc = table_to_doc(compute_free_energy(instantiate("osp(1|2)"), 3), 3)
    keys = [(e["g"], e["indices"]) for e in doc["entries"]]
    assert keys == sorted(keys)
    assert doc["level"] == 3 and doc["structure"]


@pytest.fixture
def runner():
    return CliRunner()


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_cli_verify(runner, tmp_path):
    good = _write(tmp_path, "osp.json", structure_to_doc(instantiate("osp(1|2)")))
    r = runner.invoke(main, ["verify", good])
    assert r.exit_code == 0 and json.loads(r.output)["passed"]

    t = instantiate("osp(1|2)")
    (i, a, b), v = next((k, v) for k, v in t.A.items() if k[0] != k[1])
    t.A.set((i, a, b), v + 1)
    bad = _write(tmp_path, "bad.json", structure_to_doc(t))
    r = runner.invoke(main, ["verify", bad])
    assert r.exit_code == 1
    assert len([x for x in json.loads(r.output)["violations"] if x["constraint"] == "A"]) == 1

    assert runner.invoke(main, ["verify", _write(tmp_path, "junk.json", "{nope")]).exit_code == 2
    assert runner.invoke(main, ["verify", "no-such-thing"]).exit_code == 2


def test_cli_compute(runner, tmp_path):
    out = tmp_path / "t.json"
    r = runner.invoke(main, ["compute", "1|2-susy", "--max-level", "3", "--out", str(out)])
    assert r.exit_code == 0
    doc = json.loads(out.read_text())
    assert {"g": 0, "indices": [1, 1, 1], "value": "2"} in doc["entries"]
    again = runner.invoke(main, ["compute", "1|2-susy", "--max-level", "3"])
    assert again.output == out.read_text()            # byte-for-byte deterministic

    zero = runner.invoke(main, ["compute", "1|1-abelian-1", "--max-level", "4"])
    assert json.loads(zero.output)["entries"] == []

    tb = runner.invoke(main, ["compute", "twisted-boson/1", "--params", '{"N": -1}', "--max-level", "4"])
    assert tb.exit_code == 0
    from superairy.oracles import oracle_free_energy
    names = instantiate("twisted-boson/1", {"N": -1}, 10).basis.names
    got = {(e["g"], tuple(int(names[a][1:]) for a in e["indices"])): e["value"] for e in json.loads(tb.output)["entries"]}
    want = {k: str(v) for k, v in oracle_free_energy(-1, 4).items() if v}
    assert got == want


def test_cli_compare_oracle(runner, tmp_path):
    assert runner.invoke(main, ["compare-oracle", "1|2-susy", "--max-level", "3"]).exit_code == 0
    r = runner.invoke(main, ["compare-oracle", "sv-mu/1", "--max-level", "2"])
    assert r.exit_code == 3
    doc = table_to_doc(compute_free_energy(instantiate("1|2-susy"), 3), 3)
    doc["entries"][0]["value"] = "17"
    path = _write(tmp_path, "tab.json", doc)
    assert runner.invoke(main, ["compare-oracle", "1|2-susy", "--max-level", "3", "--table", path]).exit_code == 1


def test_cli_gauge_classical_catalog(runner):
    s = '{"s":[{"indices":[1,1],"value":"1/2"},{"indices":[2,3],"value":"1/2"}]}'
    r = runner.invoke(main, ["gauge", "1|2-susy", "--gauge", s])
    assert r.exit_code == 0
    assert structure_from_doc(json.loads(r.output)).C.entries == {}
    r = runner.invoke(main, ["gauge", "1|2-susy", "--gauge", s, "--series", "3"])
    assert r.exit_code == 0 and json.loads(r.output)["series"]
    r = runner.invoke(main, ["gauge", "1|2-susy", "--gauge", '{"s":[{"indices":[1,1,1],"value":"1"}]}'])
    assert r.exit_code == 3
    r = runner.invoke(main, ["classical", "1|2-susy", "--max-degree", "7"])
    assert r.exit_code == 0 and json.loads(r.output)["lagrangian"]["passed"]
    r = runner.invoke(main, ["catalog", "list"])
    assert "osp(1|2)" in r.output.split()
    r = runner.invoke(main, ["catalog", "show", "twisted-boson/1", "--params", '{"N": 0, "D": {"1": "1/16"}}',
                             "--truncation", "8", "--format", "pretty"])
    assert r.exit_code == 0 and json.loads(r.output)["basis"]["size"] == 9
    assert runner.invoke(main, ["catalog", "show", "untwisted-boson/1", "--params", '{"N": -3}']).exit_code == 2
