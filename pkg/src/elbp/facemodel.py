"""Cell-grid histogram face models and their binary file format."""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .descriptor import CodeImage, OperatorParams, code_image
from .errors import ModelFormatError, ModelTruncatedError, ModelVersionError
from .imaging import GrayImage

NUM_BINS = 256
MAGIC = b"ELBPMODL"
FORMAT_VERSION = 1
# version, x, y, r, cell_size, W, H, cols, rows
_HEADER = struct.Struct("<HBBHHHHHH")


@dataclass(frozen=True, eq=False)
class CellHistogram:
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def normalized(self) -> np.ndarray:
        return self.counts / self.counts.sum()


def build_histograms(codes: CodeImage, cell_size: int) -> List[CellHistogram]:
    """256-bin histograms of square cells tiled from the top-left, row-major.

    Trailing cells at the right and bottom edges are kept even if partial.
    """
    return [CellHistogram(c) for c in _cell_counts(codes, cell_size)]


def grid_shape(code_w: int, code_h: int, cell_size: int) -> Tuple[int, int]:
    return math.ceil(code_w / cell_size), math.ceil(code_h / cell_size)


def _cell_counts(codes: CodeImage, cell_size: int) -> np.ndarray:
    if cell_size < 1:
        raise ValueError(f"cell_size must be >= 1, got {cell_size}")
    if codes.codes.size == 0:
        raise ValueError("empty code image")
    h, w = codes.codes.shape
    cols, rows = grid_shape(w, h, cell_size)
    cell_col = np.arange(w) // cell_size
    cell_row = np.arange(h) // cell_size
    cell_idx = cell_row[:, None] * cols + cell_col[None, :]
    flat = cell_idx * NUM_BINS + codes.codes.astype(np.int64)
    counts = np.bincount(flat.ravel(), minlength=rows * cols * NUM_BINS)
    return counts.reshape(rows * cols, NUM_BINS).astype(np.uint32)


def normalize_counts(counts: np.ndarray) -> np.ndarray:
    c = counts.astype(np.float64)
    return c / c.sum(axis=-1, keepdims=True)


@dataclass(eq=False)
class FaceModel:
    params: OperatorParams
    cell_size: int
    grid: Tuple[int, int]  # (cols, rows)
    counts: np.ndarray  # (cols * rows, 256) uint32, row-major cells
    source_dims: Tuple[int, int]  # (W, H)
    _normalized: np.ndarray = field(default=None, init=False, repr=False)

    def __post_init__(self):
        cols, rows = self.grid
        if self.counts.shape != (cols * rows, NUM_BINS):
            raise ValueError(f"counts shape {self.counts.shape} does not match grid {self.grid}")
        if (self.counts.sum(axis=1) == 0).any():
            raise ValueError("every cell needs at least one code")

    @property
    def cells(self) -> List[CellHistogram]:
        return [CellHistogram(c) for c in self.counts]

    @property
    def normalized(self) -> np.ndarray:
        """(cells, 256) float64 matrix of per-cell normalized histograms."""
        if self._normalized is None:
            self._normalized = normalize_counts(self.counts)
        return self._normalized

    @property
    def fingerprint(self) -> tuple:
        return (self.params.x, self.params.y, self.params.r, self.cell_size, self.source_dims)

    @property
    def vector_length(self) -> int:
        return self.counts.size

    def __eq__(self, other):
        if not isinstance(other, FaceModel):
            return NotImplemented
        return (
            self.params == other.params
            and self.cell_size == other.cell_size
            and tuple(self.grid) == tuple(other.grid)
            and tuple(self.source_dims) == tuple(other.source_dims)
            and np.array_equal(self.counts, other.counts)
        )


def build_face_model(img: GrayImage, params: OperatorParams, cell_size: int) -> FaceModel:
    codes = code_image(img, params)
    counts = _cell_counts(codes, cell_size)
    grid = grid_shape(codes.width, codes.height, cell_size)
    return FaceModel(params, cell_size, grid, counts, (img.width, img.height))


def encode_model(model: FaceModel) -> bytes:
    cols, rows = model.grid
    w, h = model.source_dims
    header = _HEADER.pack(
        FORMAT_VERSION, model.params.x, model.params.y, model.params.r,
        model.cell_size, w, h, cols, rows,
    )
    return MAGIC + header + model.counts.astype("<u4").tobytes()


def decode_model(buf: bytes) -> FaceModel:
    if len(buf) < len(MAGIC):
        raise ModelTruncatedError("model file shorter than its magic")
    if buf[: len(MAGIC)] != MAGIC:
        raise ModelFormatError(f"bad model magic {buf[:len(MAGIC)]!r}")
    off = len(MAGIC)
    if len(buf) < off + 2:
        raise ModelTruncatedError("model header truncated")
    (version,) = struct.unpack_from("<H", buf, off)
    if version != FORMAT_VERSION:
        raise ModelVersionError(f"model format version {version}, expected {FORMAT_VERSION}")
    if len(buf) < off + _HEADER.size:
        raise ModelTruncatedError("model header truncated")
    _, x, y, r, cell, w, h, cols, rows = _HEADER.unpack_from(buf, off)
    off += _HEADER.size
    need = cols * rows * NUM_BINS * 4
    payload = buf[off:]
    if len(payload) < need:
        raise ModelTruncatedError(f"model payload has {len(payload)} bytes, expected {need}")
    if len(payload) > need:
        raise ModelFormatError(f"{len(payload) - need} trailing bytes after model payload")
    try:
        params = OperatorParams.create(x, y, r)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None
    counts = np.frombuffer(payload, dtype="<u4").reshape(cols * rows, NUM_BINS).astype(np.uint32)
    try:
        return FaceModel(params, cell, (cols, rows), counts, (w, h))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None


def save_model(model: FaceModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_model(model))


def load_model(path) -> FaceModel:
    with open(path, "rb") as fh:
        return decode_model(fh.read())
