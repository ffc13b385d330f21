"""Plain-text file formats: spectrum/vector lists and tensor component lists.

Vector files hold comma- or whitespace-separated decimals (scientific
notation allowed) with ``#`` comments; values are printed back with
Python's shortest round-tripping representation, so write-read is
bit-exact.

Tensor files hold one component per line as ``i j k l value`` with 1-based
indices.  Only entries with i < j, k < l and (i, j) <= (k, l) in
lexicographic order may appear; every other component follows from the
algebraic symmetries.  An optional ``dim n`` line fixes the frame dimension,
otherwise the largest index seen is used.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .curvature import CurvatureTensor

__all__ = [
    "VectorParseError",
    "parse_vector_text",
    "read_vector_file",
    "format_vector",
    "parse_tensor_text",
    "read_tensor_file",
]


class VectorParseError(ValueError):
    """Malformed numeric file; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def parse_vector_text(text: str) -> np.ndarray:
    """Parse decimals separated by commas and/or whitespace.

    Surrounding parentheses or brackets are ignored, so tuple-style files
    like ``(1,2,3)`` load as written.
    """
    values: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        for ch in ",()[]":
            body = body.replace(ch, " ")
        for token in body.split():
            try:
                value = float(token)
            except ValueError:
                raise VectorParseError(f"not a number: {token!r}", lineno) from None
            if not np.isfinite(value):
                raise VectorParseError(f"non-finite value: {token!r}", lineno)
            values.append(value)
    if not values:
        raise VectorParseError("no numeric entries found", 1)
    return np.array(values, dtype=float)


def read_vector_file(path: str | Path) -> np.ndarray:
    return parse_vector_text(Path(path).read_text(encoding="utf-8"))


def format_vector(values) -> str:
    """Comma-separated shortest-representation decimals (bit-exact reload)."""
    return ",".join(repr(float(v)) for v in np.asarray(values, dtype=float))


def parse_tensor_text(text: str) -> CurvatureTensor:
    """Parse an ``i j k l value`` component list into a curvature tensor."""
    entries: dict[tuple[int, int, int, int], float] = {}
    dim: int | None = None
    max_index = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw).strip()
        if not body:
            continue
        tokens = body.replace(",", " ").split()
        if tokens[0].lower() == "dim":
            if len(tokens) != 2:
                raise VectorParseError("dim line must be 'dim n'", lineno)
            try:
                dim = int(tokens[1])
            except ValueError:
                raise VectorParseError(f"bad dimension {tokens[1]!r}", lineno) from None
            continue
        if len(tokens) != 5:
            raise VectorParseError(
                f"expected 'i j k l value', got {len(tokens)} fields", lineno
            )
        try:
            i, j, k, l = (int(t) for t in tokens[:4])
            value = float(tokens[4])
        except ValueError:
            raise VectorParseError(f"bad component line: {body!r}", lineno) from None
        if min(i, j, k, l) < 1:
            raise VectorParseError("indices are 1-based", lineno)
        if not (i < j and k < l and (i, j) <= (k, l)):
            raise VectorParseError(
                "need i < j, k < l and (i,j) <= (k,l); other components "
                "follow by symmetry",
                lineno,
            )
        key = (i, j, k, l)
        if key in entries and entries[key] != value:
            raise VectorParseError(f"conflicting duplicate for {key}", lineno)
        entries[key] = value
        max_index = max(max_index, i, j, k, l)
    n = dim if dim is not None else max_index
    if n < 3:
        raise VectorParseError("need dimension >= 3 (add a 'dim n' line?)", 1)
    if max_index > n:
        raise VectorParseError(f"index {max_index} exceeds dim {n}", 1)
    comps = np.zeros((n, n, n, n))
    for (i, j, k, l), value in entries.items():
        a, b, c, d = i - 1, j - 1, k - 1, l - 1
        for (p, q, sp) in ((a, b, 1.0), (b, a, -1.0)):
            for (r, s, ss) in ((c, d, 1.0), (d, c, -1.0)):
                comps[p, q, r, s] = sp * ss * value
                comps[r, s, p, q] = sp * ss * value
    return CurvatureTensor.from_components(comps)


def read_tensor_file(path: str | Path) -> CurvatureTensor:
    return parse_tensor_text(Path(path).read_text(encoding="utf-8"))
