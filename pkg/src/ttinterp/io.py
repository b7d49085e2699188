"""Binary container for tensor trains and operators, plus grid headers.

Layout (all integers little-endian int64)::

    b"TTv1" | endian tag (=1) | mode (0 vector, 1 operator) | d
    | row dims (d) | col dims (d, operator only) | ranks (d + 1)
    | cores as little-endian float64, C order, one after another
"""
from __future__ import annotations

import io as _io
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .errors import FormatError
from .tt import TensorTrain, TTOperator

MAGIC = b"TTv1"
SEQ_MAGIC = b"TTsq"
_I8 = np.dtype("<i8")
_F8 = np.dtype("<f8")


def _write_ints(fh: BinaryIO, values) -> None:
    fh.write(np.asarray(values, dtype=_I8).tobytes())


def _read_ints(fh: BinaryIO, count: int) -> np.ndarray:
    raw = fh.read(8 * count)
    if len(raw) != 8 * count:
        raise FormatError("truncated header")
    return np.frombuffer(raw, dtype=_I8)


def dumps(obj: TensorTrain | TTOperator) -> bytes:
    buf = _io.BytesIO()
    dump(obj, buf)
    return buf.getvalue()


def loads(data: bytes) -> TensorTrain | TTOperator:
    return load(_io.BytesIO(data))


def dump(obj: TensorTrain | TTOperator, fh: BinaryIO) -> None:
    if isinstance(obj, TensorTrain):
        mode, rows, cols = 0, obj.dims, None
    elif isinstance(obj, TTOperator):
        mode, rows, cols = 1, obj.row_dims, obj.col_dims
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    fh.write(MAGIC)
    _write_ints(fh, [1, mode, len(rows)])
    _write_ints(fh, rows)
    if cols is not None:
        _write_ints(fh, cols)
    _write_ints(fh, obj.ranks)
    for c in obj.cores:
        fh.write(np.ascontiguousarray(c, dtype=_F8).tobytes())


def load(fh: BinaryIO) -> TensorTrain | TTOperator:
    obj = _load_one(fh)
    if fh.read(1):
        raise FormatError("trailing bytes after last core")
    return obj


def _load_one(fh: BinaryIO) -> TensorTrain | TTOperator:
    if fh.read(4) != MAGIC:
        raise FormatError("bad magic, not a TTv1 file")
    tag, mode, d = (int(x) for x in _read_ints(fh, 3))
    if tag != 1:
        raise FormatError(f"unsupported endianness tag {tag}")
    if mode not in (0, 1) or d < 1:
        raise FormatError("corrupt header")
    rows = [int(x) for x in _read_ints(fh, d)]
    cols = [int(x) for x in _read_ints(fh, d)] if mode == 1 else None
    ranks = [int(x) for x in _read_ints(fh, d + 1)]
    cores = []
    for k in range(d):
        shape = (ranks[k], rows[k]) + ((cols[k],) if cols else ()) + (ranks[k + 1],)
        n = int(np.prod(shape))
        raw = fh.read(8 * n)
        if len(raw) != 8 * n:
            raise FormatError(f"truncated data in core {k}")
        cores.append(np.frombuffer(raw, dtype=_F8).reshape(shape).copy())
    return TTOperator(cores) if mode == 1 else TensorTrain(cores)


def dump_many(objs, fh: BinaryIO) -> None:
    """Several trains back to back, preceded by ``b"TTsq"`` and a count."""
    objs = list(objs)
    fh.write(SEQ_MAGIC)
    _write_ints(fh, [len(objs)])
    for o in objs:
        dump(o, fh)


def load_many(fh: BinaryIO) -> list:
    if fh.read(4) != SEQ_MAGIC:
        raise FormatError("bad magic, not a TT sequence file")
    (count,) = (int(x) for x in _read_ints(fh, 1))
    if count < 0:
        raise FormatError("negative part count")
    out = [_load_one(fh) for _ in range(count)]
    if fh.read(1):
        raise FormatError("trailing bytes after last part")
    return out


def save(obj, path) -> None:
    """Write a train, an operator, or a Tucker tensor (core then factors)."""
    from .encoders import TuckerTT

    path = Path(path)
    try:
        with path.open("wb") as fh:
            if isinstance(obj, TuckerTT):
                dump_many((obj.core,) + tuple(obj.factors), fh)
            else:
                dump(obj, fh)
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc}") from exc


def read(path):
    path = Path(path)
    try:
        with path.open("rb") as fh:
            head = fh.read(4)
            fh.seek(0)
            if head != SEQ_MAGIC:
                return load(fh)
            parts = load_many(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    from .encoders import TuckerTT

    if len(parts) < 2 or not all(isinstance(p, TensorTrain) for p in parts):
        raise FormatError("a Tucker file needs a core and at least one factor")
    try:
        return TuckerTT(parts[0], tuple(parts[1:]))
    except ValueError as exc:
        raise FormatError(f"inconsistent Tucker file: {exc}") from exc


def write_header(path, fields: dict) -> None:
    """Write a key=value text header."""
    lines = [f"{k}={v}" for k, v in fields.items()]
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc}") from exc


def read_header(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    return parse_header(text)


def parse_header(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError(f"line {lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out
