import json
import os
import sys

import separata

DATA = os.environ.get("SEPARATA_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


def test_normalize():
    assert separata.normalize("a*b->a") == separata.normalize("(a * b) -> a")
    try:
        separata.normalize("a *")
    except ValueError:
        pass
    else:
        raise AssertionError("parse error not raised")


def test_prove_and_refute():
    r = separata.prove("emp & (a * b) -> a", system="pasl+d", timeout=30)
    assert r["verdict"] == "Proved", r
    assert r["proof_size"] and r["proof_size"] > 0
    r = separata.prove("emp & (a * b) -> a", system="pasl", timeout=30, saturate=True)
    assert r["verdict"] == "Refuted", r
    model = r["model"]
    assert not separata.check_model(model, "emp & (a * b) -> a")["holds"]
    assert separata.check_frame(model, "pasl") == []
    r = separata.prove("(a * b) -> (b * a)", system="bbi-nd", timeout=30, proof=True)
    assert r["verdict"] == "Proved"
    json.loads(r["proof"])


def test_z2_model():
    with open(os.path.join(DATA, "z2.json")) as fh:
        text = fh.read()
    res = separata.check_model(text, "emp & (a * b) -> a")
    assert res["falsified_at"] == ["0"], res


def test_gen_and_synth():
    a = separata.gen(n=5, i=3, count=4, seed=11)
    assert a == separata.gen(n=5, i=3, count=4, seed=11)
    assert len(a) == 4
    assert len(separata.synth("pasl")) == 6
    assert len(separata.synth("pasl+d", subst=True)) == 9
    rows = separata.table2()
    assert [r for r, _ in rows] == list(range(1, 20))


def test_unknown_system():
    try:
        separata.prove("a -> a", system="nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown system accepted")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print("ok", t.__name__)
    sys.exit(0)
