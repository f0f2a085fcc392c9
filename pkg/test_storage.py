import json

import pytest

from mrc.errors import ShapeMismatch
from mrc.models import Certificate, hl_params
from storage.bundle import (
    INSTANCE_FILE,
    MATRIX_FILE,
    bundle_digest,
    compute_sha256,
    load_instance,
    save_instance,
)
from storage.database import initialize, query_certificates, store_certificate
from tower.matrix import format_matrix


def test_bundle_roundtrip(hl16, tmp_path):
    first = save_instance(hl16, tmp_path / "a")
    loaded = load_instance(first)
    assert loaded == hl16
    assert loaded.notes["alpha_method"] == hl16.notes["alpha_method"]
    second = save_instance(loaded, tmp_path / "b")
    for name in (INSTANCE_FILE, MATRIX_FILE, "alphas.txt"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    assert not (first / "lambdas.txt").exists()
    assert bundle_digest(first) == compute_sha256(format_matrix(hl16.H))


def test_derived_bundle_keeps_log(hdl_derived, tmp_path):
    path = save_instance(hdl_derived, tmp_path)
    log = (path / "derivation.log").read_text(encoding="utf-8").splitlines()
    assert log[-2] == "kept 1,2,3,4,5,6,7,13"
    loaded = load_instance(path)
    assert loaded.notes["kept"] == [1, 2, 3, 4, 5, 6, 7, 13]
    assert loaded.groups.tail == (8,)


def test_bundle_rejects_foreign_moduli(hl16, tmp_path):
    path = save_instance(hl16, tmp_path)
    meta = json.loads((path / INSTANCE_FILE).read_text(encoding="utf-8"))
    meta["tower"]["top_modulus"] = [1, 1]
    (path / INSTANCE_FILE).write_text(json.dumps(meta), encoding="utf-8")
    with pytest.raises(ValueError):
        load_instance(path)


def test_bundle_rejects_wrong_width(hl16, tmp_path):
    path = save_instance(hl16, tmp_path)
    meta = json.loads((path / INSTANCE_FILE).read_text(encoding="utf-8"))
    meta["params"]["k"] = 2
    (path / INSTANCE_FILE).write_text(json.dumps(meta), encoding="utf-8")
    with pytest.raises(ShapeMismatch):
        load_instance(path)


def test_missing_bundle(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_instance(tmp_path / "nowhere")


def test_certificate_ledger(tmp_path):
    db = str(tmp_path / "data" / "certs.db")
    assert query_certificates(db_path=db) == []
    initialize(db)
    params = hl_params(5, 3, 2, 1, 1, 2)
    store_certificate("aaa", params, Certificate(verdict="pass", checks=13824, millis=12), db_path=db)
    store_certificate(
        "bbb", params, Certificate(verdict="fail", checks=1, witness_E=(1, 2, 5, 9, 10, 13), witness_T=(1,)), db_path=db
    )
    records = query_certificates(db_path=db)
    assert [r["verdict"] for r in records] == ["pass", "fail"]
    assert records[0]["params"] == params.core()
    only = query_certificates("bbb", db_path=db)
    assert len(only) == 1
    assert only[0]["witness_E"] == "1,2,5,9,10,13"
    assert only[0]["witness_T"] == "1"
