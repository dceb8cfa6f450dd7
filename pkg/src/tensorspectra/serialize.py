"""JSON interchange for tensors, decompositions and reports.

Numbers are written with 17 significant decimal digits, which round-trips
binary64 values exactly; arrays are flattened row-major (last index
fastest). Parse errors name the offending field.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .odeco import OdecoRep, make_odeco
from .spectral import Hosvd
from .tensor import as_tensor

__all__ = [
    "dumps_json",
    "dumps_tensor",
    "loads_tensor",
    "dump_tensor",
    "load_tensor",
    "dumps_odeco",
    "loads_odeco",
    "dump_odeco",
    "load_odeco",
    "dumps_hosvd",
    "loads_hosvd",
    "load_dense",
]


def _fmt_float(value: float) -> str:
    value = float(value)
    if not np.isfinite(value):
        return "null"
    return format(value, ".17g")


def dumps_json(payload: Any) -> str:
    """Serialize nested dicts/lists/arrays with 17-significant-digit floats."""
    if payload is None:
        return "null"
    if isinstance(payload, (bool, np.bool_)):
        return "true" if payload else "false"
    if isinstance(payload, (int, np.integer)):
        return str(int(payload))
    if isinstance(payload, (float, np.floating)):
        return _fmt_float(payload)
    if isinstance(payload, str):
        return json.dumps(payload)
    if isinstance(payload, np.ndarray):
        return dumps_json(payload.tolist())
    if isinstance(payload, (list, tuple)):
        return "[" + ", ".join(dumps_json(item) for item in payload) + "]"
    if isinstance(payload, dict):
        parts = (f"{json.dumps(str(k))}: {dumps_json(v)}" for k, v in payload.items())
        return "{" + ", ".join(parts) + "}"
    raise TypeError(f"cannot serialize {type(payload).__name__}")


def _require_field(doc: dict, field: str, context: str):
    if not isinstance(doc, dict):
        raise ValueError(f"{context}: expected a JSON object")
    if field not in doc:
        raise ValueError(f"{field}: missing in {context}")
    return doc[field]


def _parse_shape(raw, context: str) -> tuple[int, ...]:
    if not isinstance(raw, list) or not raw:
        raise ValueError(f"shape: expected a nonempty list in {context}")
    dims = []
    for entry in raw:
        if isinstance(entry, bool) or not isinstance(entry, int) or entry < 1:
            raise ValueError(f"shape: mode sizes must be positive integers, got {entry!r}")
        dims.append(entry)
    return tuple(dims)


def dumps_tensor(x) -> str:
    x = as_tensor(x)
    data = ", ".join(_fmt_float(v) for v in x.ravel())
    shape = ", ".join(str(n) for n in x.shape)
    return f'{{"shape": [{shape}], "data": [{data}]}}'


def loads_tensor(text: str) -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"document: invalid JSON ({exc})") from exc
    return _tensor_from_doc(doc, "tensor document")


def _tensor_from_doc(doc, context: str) -> np.ndarray:
    shape = _parse_shape(_require_field(doc, "shape", context), context)
    data = _require_field(doc, "data", context)
    if not isinstance(data, list):
        raise ValueError(f"data: expected a list in {context}")
    for v in data:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValueError(f"data: entries must be numbers, got {v!r}")
    return as_tensor(np.array(data, dtype=float), shape)


def dump_tensor(x, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_tensor(x))
        handle.write("\n")


def load_tensor(path) -> np.ndarray:
    with open(path, encoding="utf-8") as handle:
        return loads_tensor(handle.read())


def dumps_odeco(rep: OdecoRep) -> str:
    shape = ", ".join(str(n) for n in rep.shape)
    alphas = ", ".join(_fmt_float(a) for a in rep.alphas)
    factors = ", ".join(dumps_tensor(f) for f in rep.factors)
    return (
        f'{{"shape": [{shape}], "alphas": [{alphas}], "factors": [{factors}]}}'
    )


def loads_odeco(text: str) -> OdecoRep:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"document: invalid JSON ({exc})") from exc
    context = "odeco document"
    shape = _parse_shape(_require_field(doc, "shape", context), context)
    alphas = _require_field(doc, "alphas", context)
    if not isinstance(alphas, list) or not alphas:
        raise ValueError("alphas: expected a nonempty list")
    raw_factors = _require_field(doc, "factors", context)
    if not isinstance(raw_factors, list) or not raw_factors:
        raise ValueError("factors: expected a nonempty list")
    factors = [_tensor_from_doc(f, f"factors[{i}]") for i, f in enumerate(raw_factors)]
    return make_odeco(np.array(alphas, dtype=float), factors, shape)


def dump_odeco(rep: OdecoRep, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_odeco(rep))
        handle.write("\n")


def load_odeco(path) -> OdecoRep:
    with open(path, encoding="utf-8") as handle:
        return loads_odeco(handle.read())


def dumps_hosvd(h: Hosvd) -> str:
    core = dumps_tensor(h.core)
    factors = ", ".join(dumps_tensor(f) for f in h.factors)
    return f'{{"core": {core}, "factors": [{factors}]}}'


def loads_hosvd(text: str) -> Hosvd:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"document: invalid JSON ({exc})") from exc
    context = "hosvd document"
    core = _tensor_from_doc(_require_field(doc, "core", context), "core")
    raw_factors = _require_field(doc, "factors", context)
    if not isinstance(raw_factors, list) or len(raw_factors) != core.ndim:
        raise ValueError("factors: expected one matrix per mode")
    factors = tuple(
        _tensor_from_doc(f, f"factors[{i}]") for i, f in enumerate(raw_factors)
    )
    for i, f in enumerate(factors):
        if f.ndim != 2 or f.shape[0] != f.shape[1] or f.shape[0] != core.shape[i]:
            raise ValueError(f"factors[{i}]: expected a {core.shape[i]}-square matrix")
    return Hosvd(core=core, factors=factors)


def load_dense(path) -> np.ndarray:
    """Load a tensor document; odeco documents are densified transparently."""
    from .odeco import to_dense

    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"document: invalid JSON ({exc})") from exc
    if isinstance(doc, dict) and "alphas" in doc:
        return to_dense(loads_odeco(text))
    return _tensor_from_doc(doc, "tensor document")


def loads_matrices(text: str) -> list[np.ndarray]:
    """Parse a JSON list of matrix documents (tensor format with D = 2)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"document: invalid JSON ({exc})") from exc
    if not isinstance(doc, list) or not doc:
        raise ValueError("document: expected a nonempty list of matrices")
    matrices = []
    for i, entry in enumerate(doc):
        m = _tensor_from_doc(entry, f"matrices[{i}]")
        if m.ndim != 2:
            raise ValueError(f"matrices[{i}]: expected 2 modes, got {m.ndim}")
        matrices.append(m)
    return matrices
