"""JSON and CSV serialization.

Complex numbers are written as [re, im] pairs.  A basis file holds the
computational-frame matrix under "basis", row-major, columns being the basis
vectors.  Floats go through Python's shortest round-trip repr, so equal
inputs give byte-identical files.
"""

import json
import os
import tempfile

import numpy as np


class InvalidInput(ValueError):
    """Input data is malformed or violates a precondition."""


def complex_to_json(m):
    a = np.asarray(m, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [complex_to_json(x) for x in a]


def complex_from_json(data):
    try:
        a = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"not a nested array of [re, im] pairs: {exc}") from None
    if a.ndim == 0 or a.shape[-1] != 2:
        raise InvalidInput("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def basis_to_dict(m, **meta):
    out = dict(meta)
    out["basis"] = complex_to_json(m)
    return out


def basis_from_dict(d):
    if isinstance(d, dict):
        if "basis" not in d:
            raise InvalidInput("basis file has no 'basis' entry")
        d = d["basis"]
    m = complex_from_json(d)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput(f"basis must be a square matrix, got shape {m.shape}")
    return m


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from None


def read_basis(path):
    return basis_from_dict(read_json(path))


def _finite(obj):
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps(obj):
    """Indented JSON; NaN and infinities become null."""
    return json.dumps(_finite(obj), indent=2, allow_nan=False) + "\n"


def write_text(path, text):
    """Write ``text`` to ``path`` atomically (temp file in the same directory, then rename)."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj):
    write_text(path, dumps(obj))
