"""
Plain-text formats and the small spec languages used on the command line.

Reals are written with 17 significant digits so a write/read cycle is
lossless; combinatorial data (indices, matrix digits) are plain integers.
Lines starting with ``#`` and trailing ``# ...`` comments are ignored by
every reader.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .cbc import ProductWeights
from .errors import DimensionMismatchError, InvalidParameterError, ParseError
from .pointset import (ReducedGeneratingVector, ReductionIndices,
                       log_reduction_indices)

__all__ = [
    "parse_weight_spec",
    "parse_w_spec",
    "parse_shift_spec",
    "read_matrix",
    "write_matrix",
    "read_vector",
    "read_genvec",
    "write_genvec",
    "read_genmat",
    "write_genmat",
    "read_config",
    "output_dir",
]

OUTPUT_DIR_ENV = "REDQMC_OUTPUT_DIR"


def _lines(path):
    """``(line_number, stripped_text)`` of the non-comment lines, keeping
    blank lines as empty strings."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if raw.lstrip().startswith("#"):
            continue
        out.append((i, line))
    return out


def _numbers(line, lineno, conv=float):
    try:
        return [conv(tok) for tok in line.split()]
    except ValueError:
        raise ParseError(f"not a number in {line!r}", line=lineno) from None


def _split_spec(spec):
    kind, _, arg = spec.partition(":")
    return kind.strip(), arg.strip()


def read_vector(path) -> np.ndarray:
    """All whitespace-separated reals of a file, in order."""
    vals = []
    for lineno, line in _lines(path):
        vals.extend(_numbers(line, lineno))
    if not vals:
        raise ParseError(f"{path} holds no numbers")
    return np.array(vals)


def parse_weight_spec(spec: str, s: int) -> ProductWeights:
    """``geo:<c>`` gives ``gamma_j = c**j``; ``file:<path>`` reads one weight
    per entry and checks they are positive and nonincreasing."""
    kind, arg = _split_spec(spec)
    if kind == "geo":
        try:
            c = float(arg)
        except ValueError:
            raise ParseError(f"bad weight spec {spec!r}") from None
        if not c > 0:
            raise InvalidParameterError(f"geometric ratio must be positive, got {c}")
        return ProductWeights.geometric(c, s)
    if kind == "file":
        g = read_vector(arg)
        if len(g) < s:
            raise DimensionMismatchError(f"{arg} has {len(g)} weights, need {s}")
        return ProductWeights(tuple(g[:s]))
    raise ParseError(f"unknown weight spec {spec!r}; use geo:<c> or file:<path>")


def parse_w_spec(spec: str, b: int, m: int, s: int,
                 weights: ProductWeights | None = None) -> ReductionIndices:
    """Reduction indices from ``zero``, ``log:<c>``, ``file:<path>`` or
    ``wchoice:<kappa>`` (the latter needs ``weights``)."""
    kind, arg = _split_spec(spec)
    if kind == "zero":
        return ReductionIndices(b, m, (0,) * s)
    if kind == "log":
        try:
            c = float(arg)
        except ValueError:
            raise ParseError(f"bad w spec {spec!r}") from None
        return log_reduction_indices(b, m, s, c)
    if kind == "file":
        vals = read_vector(arg)
        if len(vals) != s:
            raise DimensionMismatchError(f"{arg} has {len(vals)} indices, need {s}")
        if np.any(vals != np.round(vals)):
            raise ParseError(f"{arg}: reduction indices must be integers")
        return ReductionIndices(b, m, tuple(int(v) for v in vals))
    if kind == "wchoice":
        if weights is None:
            raise InvalidParameterError("wchoice needs weights")
        from .digitalnet.bounds import choose_w
        try:
            kappa = float(arg)
        except ValueError:
            raise ParseError(f"bad w spec {spec!r}") from None
        return choose_w(weights, b, m, s, kappa)
    raise ParseError(
        f"unknown w spec {spec!r}; use zero, log:<c>, file:<path> or wchoice:<kappa>")


def parse_shift_spec(spec: str, s: int) -> np.ndarray | None:
    """``none``, ``seed:<int>`` (uniform shifts) or ``file:<path>``."""
    kind, arg = _split_spec(spec)
    if kind == "none":
        return None
    if kind == "seed":
        try:
            seed = int(arg)
        except ValueError:
            raise ParseError(f"bad shift spec {spec!r}") from None
        return np.random.default_rng(seed).random(s)
    if kind == "file":
        d = read_vector(arg)
        if len(d) != s:
            raise DimensionMismatchError(f"{arg} has {len(d)} shifts, need {s}")
        bad = np.flatnonzero((d < 0) | (d >= 1))
        if bad.size:
            raise InvalidParameterError("shifts must lie in [0, 1)", index=int(bad[0]) + 1)
        return d
    raise ParseError(f"unknown shift spec {spec!r}; use none, seed:<int> or file:<path>")


def write_matrix(path, M) -> None:
    """Header ``rows cols`` then one row per line at 17 significant digits."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_matrix(path) -> np.ndarray:
    rows = [(n, ln) for n, ln in _lines(path) if ln]
    if not rows:
        raise ParseError(f"{path} is empty")
    head_no, head = rows[0]
    dims = _numbers(head, head_no, int)
    if len(dims) != 2 or min(dims) < 1:
        raise ParseError("header must be 'rows cols'", line=head_no)
    r, c = dims
    body = rows[1:]
    if len(body) != r:
        raise ParseError(f"expected {r} rows, found {len(body)}", line=head_no)
    out = np.empty((r, c))
    for i, (lineno, line) in enumerate(body):
        vals = _numbers(line, lineno)
        if len(vals) != c:
            raise ParseError(f"expected {c} columns, found {len(vals)}", line=lineno)
        out[i] = vals
    return out


def write_genvec(path, g: ReducedGeneratingVector) -> None:
    """Header ``b m s`` then one ``w_j z_j`` line per coordinate."""
    with open(path, "w") as fh:
        fh.write(f"{g.b} {g.m} {g.s}\n")
        for wj, zj in zip(g.indices.w, g.z):
            fh.write(f"{wj} {zj}\n")


def read_genvec(path) -> ReducedGeneratingVector:
    rows = [(n, ln) for n, ln in _lines(path) if ln]
    if not rows:
        raise ParseError(f"{path} is empty")
    head_no, head = rows[0]
    dims = _numbers(head, head_no, int)
    if len(dims) != 3:
        raise ParseError("header must be 'b m s'", line=head_no)
    b, m, s = dims
    if len(rows) - 1 != s:
        raise ParseError(f"expected {s} coordinate lines, found {len(rows) - 1}", line=head_no)
    w, z = [], []
    for lineno, line in rows[1:]:
        vals = _numbers(line, lineno, int)
        if len(vals) != 2:
            raise ParseError("coordinate lines are 'w_j z_j'", line=lineno)
        w.append(vals[0])
        z.append(vals[1])
    return ReducedGeneratingVector(ReductionIndices(b, m, tuple(w)), tuple(z))


def write_genmat(path, C) -> None:
    """Header ``b m s`` then ``s`` blank-line separated blocks of ``m`` digit
    rows."""
    with open(path, "w") as fh:
        fh.write(f"{C.b} {C.m} {C.s}\n")
        for mat in C.mats:
            fh.write("\n")
            for row in mat:
                fh.write(" ".join(str(int(v)) for v in row) + "\n")


def read_genmat(path):
    from .digitalnet.nets import GeneratingMatrixSet

    lines = _lines(path)
    content = [(n, ln) for n, ln in lines if ln]
    if not content:
        raise ParseError(f"{path} is empty")
    head_no, head = content[0]
    dims = _numbers(head, head_no, int)
    if len(dims) != 3:
        raise ParseError("header must be 'b m s'", line=head_no)
    b, m, s = dims
    blocks, cur = [], []
    for lineno, line in lines[lines.index((head_no, head)) + 1:]:
        if not line:
            if cur:
                blocks.append(cur)
                cur = []
            continue
        cur.append((lineno, line))
    if cur:
        blocks.append(cur)
    if len(blocks) != s:
        raise ParseError(f"expected {s} matrix blocks, found {len(blocks)}", line=head_no)
    mats = np.empty((s, m, m), dtype=np.int64)
    for j, block in enumerate(blocks):
        if len(block) != m:
            raise ParseError(f"matrix {j + 1} has {len(block)} rows, expected {m}",
                             line=block[0][0])
        for p, (lineno, line) in enumerate(block):
            digits = _numbers(line, lineno, int)
            if len(digits) != m:
                raise ParseError(f"expected {m} digits, found {len(digits)}", line=lineno)
            if any(not 0 <= d < b for d in digits):
                raise ParseError(f"digits must lie in 0..{b - 1}", line=lineno)
            mats[j, p] = digits
    return GeneratingMatrixSet(b, m, mats)


def read_config(path) -> dict[str, str]:
    """``key = value`` lines into a dict of strings."""
    out = {}
    for lineno, line in _lines(path):
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ParseError(f"expected 'key = value', got {line!r}", line=lineno)
        out[key.strip()] = value.strip().strip('"').strip("'")
    return out


def output_dir(default: str | os.PathLike = ".") -> Path:
    """Directory for outputs given as bare file names: ``$REDQMC_OUTPUT_DIR``
    if set, else ``default``."""
    return Path(os.environ.get(OUTPUT_DIR_ENV, default))
