"""JSON model files.

Kinds: ``hmm``, ``multi-hmm``, ``schedule`` and ``quasi-hmm``. Matrices are
arrays of rows. Numbers may be JSON numbers or decimal strings; writers emit
17-significant-digit strings so every float round-trips exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .hmm import HmmParams, MultiHmmParams, QuasiHmm, stationary_distribution, validate
from .matrix import DEFAULT_TOL, InputError, Tolerance

KINDS = ("hmm", "multi-hmm", "schedule", "quasi-hmm")


@dataclass
class ModelFile:
    kind: str
    model: Any  # HmmParams | MultiHmmParams | QuasiHmm | list[(A, B)]
    tol: Tolerance = DEFAULT_TOL
    notes: list[str] = field(default_factory=list)


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _encode(a) -> Any:
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return fmt(a)
    return [_encode(r) for r in a]


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise InputError(f"{where}: expected a number, got {v!r}")
    try:
        x = float(v)
    except ValueError:
        raise InputError(f"{where}: not a decimal number: {v!r}") from None
    if not math.isfinite(x):
        raise InputError(f"{where}: non-finite value {v!r}")
    return x


def _vector(v, where: str) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise InputError(f"{where}: expected a non-empty array")
    return np.array([_number(x, f"{where}[{i}]") for i, x in enumerate(v)])


def _matrix(v, where: str) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise InputError(f"{where}: expected a non-empty array of rows")
    rows = [_vector(r, f"{where}[{i}]") for i, r in enumerate(v)]
    if len({r.size for r in rows}) != 1:
        raise InputError(f"{where}: rows have unequal lengths")
    return np.vstack(rows)


def _require(doc: dict, key: str) -> Any:
    if key not in doc:
        raise InputError(f"missing field '{key}'")
    return doc[key]


def _reject_constant(name: str):
    raise InputError(f"non-finite token {name} is not allowed")


def _tolerance(doc: dict) -> Tolerance:
    t = doc.get("tolerance")
    if t is None:
        return DEFAULT_TOL
    if not isinstance(t, dict):
        raise InputError("tolerance: expected an object")
    return Tolerance(_number(t.get("rel_eps", DEFAULT_TOL.rel_eps), "tolerance.rel_eps"),
                     _number(t.get("abs_eps", DEFAULT_TOL.abs_eps), "tolerance.abs_eps"))


def _check_int(doc: dict, key: str, actual: int) -> None:
    if key in doc and doc[key] != actual:
        raise InputError(f"{key}: declared {doc[key]!r} but matrices give {actual}")


def _pi(doc: dict, A: np.ndarray, tol: Tolerance, notes: list[str]) -> np.ndarray:
    if doc.get("pi") is not None:
        return _vector(doc["pi"], "pi")
    notes.append("pi absent: using the stationary distribution of A")
    return stationary_distribution(A, tol)


def parse_model(doc: dict, tol: Tolerance | None = None, *, check: bool = True) -> ModelFile:
    """Build a model from a decoded JSON document.

    ``tol`` overrides the file's own tolerance block. With ``check`` the
    stochastic kinds are validated and violations raise InputError.
    """
    if not isinstance(doc, dict):
        raise InputError("model file must be a JSON object")
    kind = _require(doc, "kind")
    if kind not in KINDS:
        raise InputError(f"kind: expected one of {KINDS}, got {kind!r}")
    tol = _tolerance(doc) if tol is None else tol
    notes: list[str] = []

    if kind == "hmm":
        A, B = _matrix(_require(doc, "A"), "A"), _matrix(_require(doc, "B"), "B")
        _check_int(doc, "q", A.shape[0])
        _check_int(doc, "kappa", B.shape[1])
        model = HmmParams(_pi(doc, A, tol, notes), A, B)
    elif kind == "multi-hmm":
        A = _matrix(_require(doc, "A"), "A")
        Bs = _require(doc, "Bs")
        if not isinstance(Bs, list) or not Bs:
            raise InputError("Bs: expected a non-empty array of matrices")
        Bs = tuple(_matrix(b, f"Bs[{j}]") for j, b in enumerate(Bs))
        hom = _require(doc, "homogeneous")
        if not isinstance(hom, bool):
            raise InputError("homogeneous: expected true or false")
        _check_int(doc, "q", A.shape[0])
        if "kappas" in doc and list(doc["kappas"]) != [b.shape[1] for b in Bs]:
            raise InputError(f"kappas: declared {doc['kappas']} but matrices give "
                             f"{[b.shape[1] for b in Bs]}")
        model = MultiHmmParams(_pi(doc, A, tol, notes), A, Bs, hom)
    elif kind == "schedule":
        steps = _require(doc, "steps")
        if not isinstance(steps, list) or not steps:
            raise InputError("steps: expected a non-empty array")
        model = [(_matrix(_require(s, "A"), f"steps[{t}].A"),
                  _matrix(_require(s, "B"), f"steps[{t}].B")) for t, s in enumerate(steps)]
        return ModelFile(kind, model, tol, notes)
    else:
        kappas = _require(doc, "kappas")
        if not isinstance(kappas, list) or not all(isinstance(k, int) for k in kappas):
            raise InputError("kappas: expected an array of integers")
        factors = None
        if doc.get("tensor_factors") is not None:
            factors = tuple(_matrix(f, f"tensor_factors[{i}]")
                            for i, f in enumerate(doc["tensor_factors"]))
        model = QuasiHmm(_vector(_require(doc, "pi"), "pi"), _matrix(_require(doc, "W"), "W"),
                         _vector(_require(doc, "one_vector"), "one_vector"), tuple(kappas),
                         str(doc.get("provenance", "")), factors)
        _check_int(doc, "q", model.q)
        return ModelFile(kind, model, tol, notes)

    if check:
        problems = validate(model, tol)
        if problems:
            raise InputError("; ".join(problems))
    return ModelFile(kind, model, tol, notes)


def loads(text: str, tol: Tolerance | None = None, *, check: bool = True) -> ModelFile:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e}") from None
    return parse_model(doc, tol, check=check)


def load(path, tol: Tolerance | None = None, *, check: bool = True) -> ModelFile:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    return loads(text, tol, check=check)


def _tol_block(tol: Tolerance | None) -> dict:
    if tol is None or tol == DEFAULT_TOL:
        return {}
    return {"tolerance": {"rel_eps": fmt(tol.rel_eps), "abs_eps": fmt(tol.abs_eps)}}


def to_document(model, tol: Tolerance | None = None) -> dict:
    if isinstance(model, HmmParams):
        doc = {"kind": "hmm", "q": model.q, "kappa": model.kappa, "pi": _encode(model.pi),
               "A": _encode(model.A), "B": _encode(model.B)}
    elif isinstance(model, MultiHmmParams):
        doc = {"kind": "multi-hmm", "q": model.q, "kappas": list(model.kappas),
               "homogeneous": model.homogeneous, "pi": _encode(model.pi),
               "A": _encode(model.A), "Bs": [_encode(b) for b in model.Bs]}
    elif isinstance(model, QuasiHmm):
        doc = {"kind": "quasi-hmm", "q": model.q, "kappas": list(model.kappas),
               "provenance": model.provenance, "pi": _encode(model.pi),
               "W": _encode(model.W), "one_vector": _encode(model.one)}
        if model.tensor_factors is not None:
            doc["tensor_factors"] = [_encode(f) for f in model.tensor_factors]
    elif isinstance(model, (list, tuple)):
        steps = [{"A": _encode(A), "B": _encode(B)} for A, B in model]
        doc = {"kind": "schedule", "steps": steps}
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    doc.update(_tol_block(tol))
    return doc


def dumps(model, tol: Tolerance | None = None) -> str:
    return json.dumps(to_document(model, tol), indent=2) + "\n"


def dump(model, path, tol: Tolerance | None = None) -> None:
    Path(path).write_text(dumps(model, tol))
