"""JSON documents for instances, parameters, states and channels.

Every document carries ``schema_version`` and ``type``.  Rationals are
``{"num": int, "den": int}``; reals are decimal strings with 17 significant
digits (so floats round-trip exactly); complex matrices are row-major lists of
``[re, im]`` pairs.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction

import numpy as np

from .bloch import BlochVector
from .channels import ChoiOperator, KrausSet
from .errors import SephardError, ValidationError
from .reduction import RsdfInstance, WmemParams, WoptInstance

SCHEMA_VERSION = 1


class InstanceFileError(SephardError):
    """A document could not be read or does not follow the schema; carries the path."""

    def __init__(self, path, message):
        self.path = str(path)
        super().__init__(f"{path}: {message}")


def real(x) -> str:
    return "%.17g" % float(x)


def parse_real(s) -> float:
    if isinstance(s, (int, float)) and not isinstance(s, bool):
        return float(s)
    if not isinstance(s, str):
        raise ValidationError(f"expected a real number, got {s!r}")
    return float(s)


def rational(q) -> dict:
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


def parse_rational(d) -> Fraction:
    try:
        return Fraction(int(d["num"]), int(d["den"]))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"malformed rational {d!r}") from exc


def complex_matrix(A) -> dict:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise ValidationError(f"expected a matrix, got shape {A.shape}")
    return {
        "rows": A.shape[0],
        "cols": A.shape[1],
        "entries": [[real(z.real), real(z.imag)] for z in A.reshape(-1)],
    }


def parse_complex_matrix(d) -> np.ndarray:
    try:
        rows, cols, entries = int(d["rows"]), int(d["cols"]), d["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("matrix needs 'rows', 'cols' and 'entries'") from exc
    if len(entries) != rows * cols:
        raise ValidationError(f"matrix has {len(entries)} entries, expected {rows * cols}")
    vals = np.empty(rows * cols, dtype=complex)
    for i, pair in enumerate(entries):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValidationError(f"entry {i} is not a [re, im] pair")
        vals[i] = complex(parse_real(pair[0]), parse_real(pair[1]))
    return vals.reshape(rows, cols)


def real_vector(v) -> list:
    return [real(x) for x in np.asarray(v, dtype=float).reshape(-1)]


def parse_real_vector(v) -> np.ndarray:
    if not isinstance(v, list):
        raise ValidationError("expected a list of reals")
    return np.array([parse_real(x) for x in v], dtype=float)


def _doc(kind, **fields):
    return {"schema_version": SCHEMA_VERSION, "type": kind, **fields}


# ---------------------------------------------------------------------------
# encoders


def encode_rsdf(inst: RsdfInstance) -> dict:
    return _doc(
        "rsdf",
        k=inst.k,
        l=inst.l,
        zeta=rational(inst.zeta),
        eta=rational(inst.eta),
        delta_sq=rational(inst.delta_sq),
        B=[[real_vector(row) for row in b] for b in inst.B],
    )


def encode_wopt(w: WoptInstance) -> dict:
    fields = dict(M=w.M, N=w.N, m=w.m, c_hat=real_vector(w.c_hat), gamma=real(w.gamma), epsilon=real(w.epsilon),
                  delta=real(w.delta))
    for name in ("zeta", "eta", "c_hat_norm_sq", "delta_sq"):
        value = getattr(w, name)
        if value is not None:
            fields[name] = rational(value)
    return _doc("wopt", **fields)


def encode_wmem_params(p: WmemParams) -> dict:
    return _doc(
        "wmem_params",
        M=p.M,
        N=p.N,
        m=p.m,
        beta=real(p.beta),
        inner_radius=real(p.inner_radius),
        outer_radius=real(p.outer_radius),
        epsilon=real(p.epsilon),
    )


def encode_state(rho, M, N) -> dict:
    return _doc("state", M=M, N=N, rho=complex_matrix(rho))


def encode_bloch(v: BlochVector, M=None, N=None) -> dict:
    fields = {"dim": v.dim, "coords": real_vector(v.coords)}
    if M is not None:
        fields.update(M=M, N=N)
    return _doc("bloch", **fields)


def encode_kraus(ks: KrausSet) -> dict:
    return _doc("kraus", M=ks.M, N=ks.N, operators=[complex_matrix(K) for K in ks.operators])


def encode_choi(choi: ChoiOperator) -> dict:
    return _doc("choi", M=choi.M, N=choi.N, J=complex_matrix(choi.J))


# ---------------------------------------------------------------------------
# decoders


def _decode_rsdf(d):
    B = tuple(np.array([[parse_real(x) for x in row] for row in b]) for b in d["B"])
    inst = RsdfInstance(B, parse_rational(d["zeta"]), parse_rational(d["eta"]))
    if inst.k != d["k"] or inst.l != d["l"]:
        raise ValidationError("declared k/l do not match the stored matrices")
    return inst


def _decode_wopt(d):
    opt = {name: parse_rational(d[name]) for name in ("zeta", "eta", "c_hat_norm_sq", "delta_sq") if name in d}
    return WoptInstance(
        M=int(d["M"]),
        N=int(d["N"]),
        c_hat=parse_real_vector(d["c_hat"]),
        gamma=parse_real(d["gamma"]),
        epsilon=parse_real(d["epsilon"]),
        delta=parse_real(d.get("delta", "nan")),
        **opt,
    )


def _decode_wmem(d):
    return WmemParams(
        beta=parse_real(d["beta"]),
        inner_radius=parse_real(d["inner_radius"]),
        outer_radius=parse_real(d["outer_radius"]),
        m=int(d["m"]),
        epsilon=parse_real(d["epsilon"]),
        M=int(d["M"]),
        N=int(d["N"]),
    )


def _decode_state(d):
    return {"M": int(d["M"]), "N": int(d["N"]), "rho": parse_complex_matrix(d["rho"])}


def _decode_bloch(d):
    out = {"vector": BlochVector(int(d["dim"]), parse_real_vector(d["coords"]))}
    if "M" in d:
        out.update(M=int(d["M"]), N=int(d["N"]))
    return out


def _decode_kraus(d):
    ks = KrausSet(tuple(parse_complex_matrix(K) for K in d["operators"]))
    if (ks.M, ks.N) != (int(d["M"]), int(d["N"])):
        raise ValidationError("declared M/N do not match the Kraus operator shape")
    return ks


def _decode_choi(d):
    return ChoiOperator(int(d["M"]), int(d["N"]), parse_complex_matrix(d["J"]))


DECODERS = {
    "rsdf": _decode_rsdf,
    "wopt": _decode_wopt,
    "wmem_params": _decode_wmem,
    "state": _decode_state,
    "bloch": _decode_bloch,
    "kraus": _decode_kraus,
    "choi": _decode_choi,
}


def decode(doc: dict):
    """Return ``(type, object)`` for a parsed document."""
    if not isinstance(doc, dict):
        raise ValidationError("document must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {doc.get('schema_version')!r}")
    kind = doc.get("type")
    if kind not in DECODERS:
        raise ValidationError(f"unknown document type {kind!r}")
    try:
        return kind, DECODERS[kind](doc)
    except KeyError as exc:
        raise ValidationError(f"missing field {exc.args[0]!r}") from exc


def load(path, expect=None):
    """Read and decode a document, wrapping every failure with the file path."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InstanceFileError(path, exc.strerror or str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise InstanceFileError(path, f"invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    try:
        kind, obj = decode(doc)
    except ValidationError as exc:
        raise InstanceFileError(path, str(exc)) from exc
    if expect is not None and kind not in ((expect,) if isinstance(expect, str) else expect):
        raise InstanceFileError(path, f"expected a {expect} document, found {kind}")
    return kind, obj


def dump(doc: dict, path) -> str:
    """Write atomically (temporary file then rename) and return the path."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)
    return path
