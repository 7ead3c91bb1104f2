"""Cubical filtrations of grayscale images by lower-level-set thresholding.

Cells live on a doubled grid: pixel ``(i, j)`` is the square with id
``(2i+1, 2j+1)``; its edges and corners have one or two even coordinates.
Sorting ids lexicographically orders cells by (row, col, kind).
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .complex_core import Cell, CellComplex, Filtration, InputError


class GrayscaleImage:
    """Integer gray levels on a ``height x width`` grid (row-major)."""

    def __init__(self, levels):
        arr = np.asarray(levels)
        if arr.ndim != 2:
            raise InputError("image must be 2-D, got shape %r" % (arr.shape,))
        if arr.size and (not np.issubdtype(arr.dtype, np.integer) or arr.min() < 0):
            raise InputError("gray levels must be non-negative integers")
        self.levels = arr.astype(np.int64)
        self.levels.setflags(write=False)

    @property
    def height(self) -> int:
        return self.levels.shape[0]

    @property
    def width(self) -> int:
        return self.levels.shape[1]

    def __add__(self, k: int) -> "GrayscaleImage":
        return GrayscaleImage(self.levels + k)


def _square_cells(y: int, x: int, p: int) -> list[Cell]:
    """The closed square at doubled coordinates (y, x) with oriented faces."""
    verts = [Cell((y + dy, x + dx), 0) for dy in (-1, 1) for dx in (-1, 1)]
    # horizontal edges point in +x, vertical edges in +y
    top = Cell((y - 1, x), 1, (((y - 1, x + 1), 1), ((y - 1, x - 1), p - 1)))
    bottom = Cell((y + 1, x), 1, (((y + 1, x + 1), 1), ((y + 1, x - 1), p - 1)))
    left = Cell((y, x - 1), 1, (((y + 1, x - 1), 1), ((y - 1, x - 1), p - 1)))
    right = Cell((y, x + 1), 1, (((y + 1, x + 1), 1), ((y - 1, x + 1), p - 1)))
    square = Cell((y, x), 2, (((y - 1, x), 1), ((y, x + 1), 1),
                              ((y + 1, x), p - 1), ((y, x - 1), p - 1)))
    return verts + [top, bottom, left, right, square]


def _cells_with_values(img: GrayscaleImage, p: int) -> list[tuple[Cell, int]]:
    """Every cell of the full image with the least gray level of a pixel containing it.

    The cell belongs to the complex at threshold ``r`` exactly when that value is
    below ``r``.  The list is sorted by ``(dim, id)``.
    """
    value: dict = {}
    cells: dict = {}
    for (i, j), level in np.ndenumerate(img.levels):
        for c in _square_cells(2 * i + 1, 2 * j + 1, p):
            if c.id not in cells or level < value[c.id]:
                cells.setdefault(c.id, c)
                value[c.id] = int(level)
    order = sorted(cells, key=lambda cid: (cells[cid].dim, cid))
    return [(cells[cid], value[cid]) for cid in order]


def binary_cubical(img: GrayscaleImage, r: float, p: int = 2) -> CellComplex:
    """Cubical complex of the pixels with value strictly below ``r``."""
    return CellComplex([c for c, v in _cells_with_values(img, p) if v < r], p)


def default_thresholds(img: GrayscaleImage) -> list[int]:
    return [int(v) + 1 for v in np.unique(img.levels)]


def threshold_filtration(img: GrayscaleImage, thresholds: Sequence[float] | None = None,
                         p: int = 2) -> Filtration:
    if thresholds is None:
        thresholds = default_thresholds(img)
    thresholds = list(thresholds)
    if not thresholds:
        raise InputError("at least one threshold is required")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise InputError("thresholds must strictly increase: %r" % (thresholds,))
    valued = _cells_with_values(img, p)
    steps = [CellComplex([c for c, v in valued if v < r], p) for r in thresholds]
    return Filtration(steps, thresholds, p)


# --- PGM ------------------------------------------------------------------

def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens, i, n = [], 0, len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not data[i:i + 1].isspace() and data[i:i + 1] != b"#":
            i += 1
        if start == i:
            raise InputError("truncated PGM header")
        tokens.append(data[start:i])
    return tokens, i


def parse_pgm(data: bytes) -> GrayscaleImage:
    """Decode a P2 (ASCII) or P5 (binary, 8- or 16-bit big-endian) PGM."""
    tokens, end = _pgm_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise InputError("not a PGM file (magic %r)" % magic)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise InputError("non-numeric PGM header") from None
    if width < 0 or height < 0 or not 0 < maxval < 65536:
        raise InputError("invalid PGM dimensions or maxval")
    n = width * height
    if magic == b"P2":
        body = data[end:].split()
        if len(body) < n:
            raise InputError("PGM has %d samples, expected %d" % (len(body), n))
        try:
            values = np.array([int(t) for t in body[:n]], dtype=np.int64)
        except ValueError:
            raise InputError("non-numeric PGM sample") from None
    else:
        raster = data[end + 1:]
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        if len(raster) < n * dtype.itemsize:
            raise InputError("PGM raster truncated")
        values = np.frombuffer(raster[:n * dtype.itemsize], dtype=dtype).astype(np.int64)
    if values.size and (values.min() < 0 or values.max() > maxval):
        raise InputError("PGM sample outside 0..maxval")
    return GrayscaleImage(values.reshape(height, width))


def read_pgm(path) -> GrayscaleImage:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc.strerror)) from None
    return parse_pgm(data)


def write_pgm(path, img: GrayscaleImage, binary: bool = False) -> None:
    maxval = max(int(img.levels.max()) if img.levels.size else 0, 1)
    header = b"%s\n%d %d\n%d\n" % (b"P5" if binary else b"P2", img.width, img.height, maxval)
    if binary:
        dtype = ">u2" if maxval > 255 else "u1"
        Path(path).write_bytes(header + img.levels.astype(dtype).tobytes())
    else:
        rows = [" ".join(str(int(v)) for v in row) for row in img.levels]
        Path(path).write_bytes(header + ("\n".join(rows) + "\n").encode())
