import json
import math
import os

import pytest

from gbsaxes import jsonio
from gbsaxes.cli import main
from gbsaxes.moves import random_deform
from gbsaxes.words import words_equal


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_examples_and_validate(tmp_path, capsys):
    code, out = run(capsys, "examples", "--name", "bs24", "--out", str(tmp_path))
    assert code == 0
    path = os.path.join(str(tmp_path), "bs24.json")
    assert out["written"] == [path]
    code, out = run(capsys, "graph", "validate", path)
    assert code == 0 and out["ok"]


def test_traintrack_example_checks(tmp_path, capsys):
    run(capsys, "examples", "--name", "traintrack", "--out", str(tmp_path))
    phi = os.path.join(str(tmp_path), "traintrack-phi.json")
    inv = os.path.join(str(tmp_path), "traintrack-phi-inv.json")
    for p in (phi, inv):
        code, out = run(capsys, "tt", "check", p)
        assert code == 0
        assert out["train_track"] and out["map_valid"]
        assert out["lambda"] == pytest.approx(1 + math.sqrt(2), abs=1e-9)


def test_dist_self_is_zero(tmp_path, capsys):
    run(capsys, "examples", "--name", "traintrack", "--out", str(tmp_path))
    pf = os.path.join(str(tmp_path), "traintrack-pf.json")
    code, out = run(capsys, "dist", pf, pf)
    assert code == 0
    assert out["d_lip"] == pytest.approx(0.0, abs=1e-12)


def test_json_roundtrip_is_canonical(ttex, tmp_path):
    m = random_deform(ttex.marked, 5, 3)
    data = jsonio.marked_to_json(m)
    again = jsonio.marked_from_json(json.loads(json.dumps(data)))
    assert jsonio.marked_to_json(again) == data
    assert again.graph.forward == m.graph.forward
    for name, w in m.marking.images.items():
        assert words_equal(m.graph, again.marking.images[name], w)


def test_ttmap_roundtrip(ttex):
    data = jsonio.ttmap_to_json(ttex.tt_plus)
    tt = jsonio.ttmap_from_json(json.loads(json.dumps(data)))
    assert tt.lam == pytest.approx(ttex.tt_plus.lam)
    assert tt.verdict()[0]
    assert jsonio.ttmap_to_json(tt) == data


def test_domain_error_exits_one(tmp_path, capsys):
    run(capsys, "examples", "--name", "bs24", "--out", str(tmp_path))
    path = os.path.join(str(tmp_path), "bs24.json")
    code = main(["move", "collapse", path, "--edge", "e", "--out",
                 os.path.join(str(tmp_path), "x.json")])
    capsys.readouterr()
    assert code == 1                    # loops are not collapsible


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["not-a-command"])
    assert exc.value.code == 2
