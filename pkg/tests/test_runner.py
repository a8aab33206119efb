from __future__ import annotations

import json

import pytest

from decaylaw.errors import InvalidInput, PreconditionError
from decaylaw.experiments.runner import (CSV_FIELDS, ExperimentConfig, read_csv, records_to_csv, run_experiment,
                                         summarize)
from decaylaw.patterns import BUILTIN


def cfg(kind="extensions", name="pendant", **kw):
    base = dict(n_grid=(200, 400, 800), trials=2, placements=2, seed=3)
    base.update(kw)
    return ExperimentConfig(kind, name, BUILTIN[name], **base)


def test_csv_header_and_roundtrip():
    rows = run_experiment(cfg())
    text = records_to_csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_FIELDS)
    assert read_csv(text) == rows
    with pytest.raises(InvalidInput):
        read_csv("a,b\n1,2\n")


def test_jobs_do_not_change_rows():
    c = cfg("far", "common_neighbor")
    assert records_to_csv(run_experiment(c, jobs=1)) == records_to_csv(run_experiment(c, jobs=2))


def test_modes_default_per_kind():
    assert cfg().mode == "induced"
    assert cfg("disjoint").mode == "positive"
    assert cfg("witness", k=2, t=4).mode == "induced"
    with pytest.raises(InvalidInput):
        cfg("nope")
    with pytest.raises(InvalidInput):
        cfg(pass_fraction=0)


def test_placement_labels():
    rows = run_experiment(cfg())
    labels = {r.placement for r in rows}
    assert labels == {"u0", "u1", "boundary-left", "boundary-right"}
    assert {r.statistic for r in rows} == {"extensions"}


def test_summary_schema_and_claims():
    c = cfg("far", "common_neighbor")
    out = summarize(c, run_experiment(c))
    assert out["schema"] == 1
    json.dumps(out)
    assert set(out["rates"]) == {"far_exists", "fact23_ok"}
    assert set(out["claims"]) == {"far_absent_at_max_n", "fact23_all"}
    assert out["theory"]["xi"] is None
    ext = summarize(cfg(), run_experiment(cfg()))
    assert ext["theory"]["xi"] == "3/10"
    assert "extensions:mean:uniform" in ext["fits"]


def test_witness_precondition():
    with pytest.raises(PreconditionError):
        run_experiment(cfg("witness", "common_neighbor", k=2, t=5))


def test_witness_rows():
    c = cfg("witness", n_grid=(600,), trials=1, placements=2, boundary=False, k=2, t=4)
    rows = run_experiment(c)
    stats = {r.statistic for r in rows}
    assert {"witness_found", "witness_verified", "examined", "rejected_i", "closure_t_size"} <= stats
    for f, v in zip([r for r in rows if r.statistic == "witness_found"],
                    [r for r in rows if r.statistic == "witness_verified"]):
        assert f.value == v.value
