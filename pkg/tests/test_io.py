import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from hmmident import io
from hmmident.casestudy import ssh_A, ssh_B, ssh_multi, ssh_single
from hmmident.hmm import HmmParams, MultiHmmParams, QuasiHmm, random_hmm
from hmmident.identifiability import construct_rank1_recombination, construct_state_inflation
from hmmident.matrix import InputError, Tolerance

ROOT = Path(__file__).resolve().parents[1]
MODEL_SCHEMA = json.loads((ROOT / "docs" / "model_schema.json").read_text())


def same(a, b):
    return np.array_equal(np.asarray(a), np.asarray(b))


def roundtrip(model, tol=None):
    text = io.dumps(model, tol)
    jsonschema.validate(json.loads(text), MODEL_SCHEMA)
    return io.loads(text, check=False)


def test_roundtrip_hmm(rng):
    h = random_hmm(4, 3, rng)
    back = roundtrip(h).model
    assert isinstance(back, HmmParams)
    assert same(back.pi, h.pi) and same(back.A, h.A) and same(back.B, h.B)


def test_roundtrip_multi():
    h = ssh_multi((0.05, 0.1))
    back = roundtrip(h).model
    assert isinstance(back, MultiHmmParams) and not back.homogeneous
    assert all(same(x, y) for x, y in zip(back.Bs, h.Bs))
    assert same(back.A, h.A)


def test_roundtrip_schedule():
    sched = [(ssh_A(), ssh_B(e)) for e in (0.05, 0.1)]
    mf = roundtrip(sched)
    assert mf.kind == "schedule"
    assert all(same(A, sched[t][0]) and same(B, sched[t][1]) for t, (A, B) in enumerate(mf.model))


def test_roundtrip_quasi(ssh, rng):
    for ce in (construct_rank1_recombination(ssh), construct_state_inflation(ssh, 8, rng=rng)):
        back = roundtrip(ce).model
        assert isinstance(back, QuasiHmm)
        assert same(back.W, ce.W) and same(back.one, ce.one) and same(back.pi, ce.pi)
        assert back.provenance == ce.provenance
    back = roundtrip(construct_rank1_recombination(ssh)).model
    assert back.tensor_factors is not None


def test_roundtrip_tolerance():
    tol = Tolerance(1e-7, 1e-10)
    mf = roundtrip(ssh_single(0.1), tol)
    assert mf.tol == tol


def test_pi_optional():
    doc = {"kind": "hmm", "A": [[0.5, 0.5], [0.5, 0.5]], "B": [["0.9", "0.1"], [0.2, 0.8]]}
    mf = io.parse_model(doc)
    np.testing.assert_allclose(mf.model.pi, [0.5, 0.5])
    assert mf.notes and "stationary" in mf.notes[0]


@pytest.mark.parametrize("text,match", [
    ('{"kind": "hmm", "A": [[NaN, 1]], "B": [[1, 0]]}', "non-finite"),
    ('{"kind": "hmm", "A": [[Infinity, 1]], "B": [[1, 0]]}', "non-finite"),
    ('{"kind": "hmm", "A": [["nan", 1]], "B": [[1, 0]]}', "non-finite"),
    ('{"kind": "hmm", "A": [["abc", 1]], "B": [[1, 0]]}', "not a decimal"),
    ('{"kind": "hmm", "A": [[0.5, 0.5], [1]], "B": [[1, 0]]}', "unequal"),
    ('{"kind": "hmm", "B": [[1, 0]]}', "missing field 'A'"),
    ('{"kind": "weird"}', "kind"),
    ('[1, 2]', "JSON object"),
    ('{"kind": "hmm",', "invalid JSON"),
    ('{"kind": "hmm", "pi": [0.5, 0.5], "A": [[0.5, 0.5], [0.5, 0.4]], "B": [[1, 0], [0, 1]]}',
     "row 1 sums"),
    ('{"kind": "hmm", "q": 3, "pi": [0.5, 0.5], "A": [[0.5, 0.5], [0.5, 0.5]], "B": [[1, 0], [0, 1]]}',
     "declared"),
    ('{"kind": "multi-hmm", "homogeneous": "yes", "A": [[1]], "Bs": [[[1]]]}', "true or false"),
    ('{"kind": "hmm", "A": [[true, 1]], "B": [[1, 0]]}', "expected a number"),
])
def test_parse_errors(text, match):
    with pytest.raises(InputError, match=match):
        io.loads(text)


def test_file_helpers(tmp_path, rng):
    h = random_hmm(2, 2, rng)
    p = tmp_path / "m.json"
    io.dump(h, p)
    assert same(io.load(p).model.A, h.A)
    with pytest.raises(InputError, match="cannot read"):
        io.load(tmp_path / "missing.json")


def test_shipped_models_parse_and_validate():
    files = sorted((ROOT / "models").glob("*.json"))
    assert len(files) >= 5
    for f in files:
        doc = json.loads(f.read_text())
        jsonschema.validate(doc, MODEL_SCHEMA)
        mf = io.load(f)
        assert mf.kind in io.KINDS
        assert io.dumps(mf.model) == f.read_text()


def test_fmt_is_exact(rng):
    for x in rng.standard_normal(200):
        assert float(io.fmt(x)) == x
