"""JSON file formats. Complex scalars are stored as ``[re, im]`` pairs."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import KrausChannel
from .resource import ResourceMPS

RESOURCE_FIELDS = {"d", "D", "tensors", "left", "right", "n_sites"}
CHANNEL_FIELDS = {"dim", "kraus"}


class FormatError(ValueError):
    pass


def encode_complex(a) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex(data, shape=None) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"malformed complex array: {exc}") from None
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise FormatError("complex entries must be [re, im] pairs")
    out = arr[..., 0] + 1j * arr[..., 1]
    if shape is not None and out.shape != tuple(shape):
        raise FormatError(f"expected shape {tuple(shape)}, got {out.shape}")
    return out


def _check_fields(data, required: set, kind: str) -> None:
    if not isinstance(data, dict):
        raise FormatError(f"{kind} file must hold a JSON object")
    missing = required - data.keys()
    extra = data.keys() - required
    if missing:
        raise FormatError(f"{kind} file is missing fields {sorted(missing)}")
    if extra:
        raise FormatError(f"{kind} file has unknown fields {sorted(extra)}")


def resource_to_dict(mps: ResourceMPS) -> dict:
    return {
        "d": mps.d,
        "D": mps.D,
        "tensors": encode_complex(mps.tensors),
        "left": encode_complex(mps.left),
        "right": encode_complex(mps.right),
        "n_sites": mps.n_sites,
    }


def resource_from_dict(data) -> ResourceMPS:
    _check_fields(data, RESOURCE_FIELDS, "resource")
    d, D = int(data["d"]), int(data["D"])
    try:
        return ResourceMPS(
            decode_complex(data["tensors"], (d, D, D)),
            decode_complex(data["left"], (D,)),
            decode_complex(data["right"], (D,)),
            int(data["n_sites"]),
        )
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def channel_to_dict(ch: KrausChannel) -> dict:
    return {"dim": ch.dim, "kraus": encode_complex(ch.kraus)}


def channel_from_dict(data) -> KrausChannel:
    _check_fields(data, CHANNEL_FIELDS, "channel")
    dim = int(data["dim"])
    ops = decode_complex(data["kraus"])
    if ops.ndim != 3 or ops.shape[1:] != (dim, dim):
        raise FormatError(f"kraus must be a list of {dim}x{dim} matrices")
    try:
        return KrausChannel(ops, tol=1e-9)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_resource(path) -> ResourceMPS:
    return resource_from_dict(read_json(path))


def save_resource(mps: ResourceMPS, path) -> None:
    Path(path).write_text(json.dumps(resource_to_dict(mps), indent=1))


def load_channel(path) -> KrausChannel:
    return channel_from_dict(read_json(path))


def save_channel(ch: KrausChannel, path) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(ch), indent=1))


def jsonable(obj):
    """Convert numpy values (and complex arrays) into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode_complex(obj)
        return obj.tolist()
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj
