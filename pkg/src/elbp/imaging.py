"""Grayscale image I/O, geometric normalization and synthetic fixtures."""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import (
    CorruptImageError,
    GeometryError,
    ImageFormatError,
    UnsupportedDepthError,
)

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
TEXTURE_KINDS = ("ramp", "checker", "noise", "blobs")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit single-channel raster stored as a read-only ``(height, width)`` array."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D raster, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("intensities must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_bytes(cls, width: int, height: int, data: bytes) -> "GrayImage":
        if len(data) != width * height:
            raise ValueError("data length must equal width * height")
        return cls(np.frombuffer(data, dtype=np.uint8).reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def data(self) -> bytes:
        return self.pixels.tobytes()

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


# --------------------------------------------------------------------------- I/O


def _pgm_tokens(buf: bytes, count: int) -> Tuple[list, int]:
    """Read ``count`` whitespace separated header tokens, skipping ``#`` comments.

    Returns the tokens and the offset of the single whitespace byte that ends
    the last token.
    """
    tokens = []
    pos = 2  # past magic
    n = len(buf)
    while len(tokens) < count:
        while pos < n and buf[pos : pos + 1].isspace():
            pos += 1
        if pos < n and buf[pos : pos + 1] == b"#":
            while pos < n and buf[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not buf[pos : pos + 1].isspace() and buf[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise CorruptImageError("truncated PGM header")
        tokens.append(buf[start:pos])
    if pos >= n or not buf[pos : pos + 1].isspace():
        raise CorruptImageError("PGM header must end with a single whitespace byte")
    return tokens, pos


def decode_pgm(buf: bytes) -> GrayImage:
    if buf[:2] != b"P5":
        raise ImageFormatError(f"not a binary PGM (magic {buf[:2]!r})")
    tokens, pos = _pgm_tokens(buf, 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise CorruptImageError(f"non-numeric PGM header field in {tokens!r}") from None
    if width < 1 or height < 1 or maxval < 1:
        raise CorruptImageError(f"invalid PGM header {width}x{height} maxval {maxval}")
    if maxval > 255:
        raise UnsupportedDepthError(f"PGM maxval {maxval} > 255 is not supported")
    payload = buf[pos + 1 :]
    need = width * height
    if len(payload) < need:
        raise CorruptImageError(f"PGM payload has {len(payload)} bytes, expected {need}")
    arr = np.frombuffer(payload[:need], dtype=np.uint8).reshape(height, width)
    if arr.max() > maxval:
        raise CorruptImageError("PGM sample exceeds declared maxval")
    return GrayImage(arr.copy())


def encode_pgm(img: GrayImage) -> bytes:
    return b"P5\n%d %d\n255\n" % (img.width, img.height) + img.data


def rgb_to_luma(rgb: np.ndarray) -> np.ndarray:
    """round(0.299 R + 0.587 G + 0.114 B) with halves rounded up, in integer arithmetic."""
    rgb = np.asarray(rgb, dtype=np.int64)
    acc = 299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2]
    return ((acc + 500) // 1000).astype(np.uint8)


def decode_png(buf: bytes) -> GrayImage:
    import io

    from PIL import Image

    try:
        im = Image.open(io.BytesIO(buf))
        im.load()
    except OSError as exc:
        raise CorruptImageError(f"cannot decode PNG: {exc}") from exc
    if im.mode in ("L", "1"):
        return GrayImage(np.array(im.convert("L")))
    if im.mode in ("RGB", "RGBA", "P", "LA"):
        if im.mode == "LA":
            return GrayImage(np.array(im)[..., 0])
        return GrayImage(rgb_to_luma(np.array(im.convert("RGB"))))
    raise UnsupportedDepthError(f"PNG mode {im.mode!r} is not 8-bit gray or RGB")


def load_image(path) -> GrayImage:
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:2] == b"P5":
        return decode_pgm(buf)
    if buf[:8] == PNG_SIGNATURE:
        return decode_png(buf)
    raise ImageFormatError(f"{os.fspath(path)}: unrecognized image format")


def save_pgm(img: GrayImage, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pgm(img))


# ---------------------------------------------------------------- geometry


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5)


def _bilinear(src: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample ``src`` at float positions; callers guarantee positions are in range."""
    h, w = src.shape
    x0 = np.clip(np.floor(xs).astype(np.int64), 0, w - 1)
    y0 = np.clip(np.floor(ys).astype(np.int64), 0, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xs - x0
    fy = ys - y0
    s = src.astype(np.float64)
    top = s[y0, x0] * (1.0 - fx) + s[y0, x1] * fx
    bot = s[y1, x0] * (1.0 - fx) + s[y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


def _sample_positions(src_dim: int, dst_dim: int) -> np.ndarray:
    if dst_dim == 1:
        return np.array([(src_dim - 1) / 2.0])
    return np.arange(dst_dim) * ((src_dim - 1) / (dst_dim - 1))


def resize_bilinear(img: GrayImage, out_w: int, out_h: int) -> GrayImage:
    """Bilinear resize, align-corners sampling, clamped at the edges."""
    if out_w < 1 or out_h < 1:
        raise ValueError(f"target size must be positive, got {out_w}x{out_h}")
    if (out_w, out_h) == (img.width, img.height):
        return img
    xs = _sample_positions(img.width, out_w)
    ys = _sample_positions(img.height, out_h)
    gx, gy = np.meshgrid(xs, ys)
    vals = _bilinear(img.pixels, gx, gy)
    return GrayImage(np.clip(_round_half_up(vals), 0, 255).astype(np.uint8))


def eye_targets(out_w: int, out_h: int, eye_row_frac: float, eye_dist_frac: float):
    """Output-space positions the left and right eye are mapped onto."""
    cx = out_w / 2.0
    row = eye_row_frac * out_h
    half = eye_dist_frac * out_w / 2.0
    return (cx - half, row), (cx + half, row)


def crop_by_eyes(
    img: GrayImage,
    left_eye,
    right_eye,
    out_w: int,
    out_h: int,
    eye_row_frac: float = 0.35,
    eye_dist_frac: float = 0.5,
) -> GrayImage:
    """Similarity-warp ``img`` so the eyes land on a horizontal line in the output.

    The eyes end up at row ``eye_row_frac * out_h``, ``eye_dist_frac * out_w``
    apart and centred on ``out_w / 2``. Samples falling outside the source are 0.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError(f"target size must be positive, got {out_w}x{out_h}")
    lx, ly = (float(v) for v in left_eye)
    rx, ry = (float(v) for v in right_eye)
    for x, y in ((lx, ly), (rx, ry)):
        if not (0 <= x <= img.width - 1 and 0 <= y <= img.height - 1):
            raise GeometryError(f"eye point ({x}, {y}) outside the image")
    if lx == rx and ly == ry:
        raise GeometryError("eye points coincide")
    (tlx, tly), (trx, _) = eye_targets(out_w, out_h, eye_row_frac, eye_dist_frac)
    dist = trx - tlx
    if dist <= 0:
        raise GeometryError("eye_dist_frac must be positive")
    # dst -> src: src = M @ (dst - target_mid) + eye_mid, M = scale * rotation.
    # Anchoring at the midpoints keeps swapped-eye calls exact mirror images.
    a = (rx - lx) / dist
    b = (ry - ly) / dist
    mid_x, mid_y = (lx + rx) / 2.0, (ly + ry) / 2.0
    gx, gy = np.meshgrid(np.arange(out_w, dtype=np.float64), np.arange(out_h, dtype=np.float64))
    dx = gx - (tlx + trx) / 2.0
    dy = gy - tly
    sx = (a * dx - b * dy) + mid_x
    sy = (b * dx + a * dy) + mid_y
    inside = (sx >= 0) & (sx <= img.width - 1) & (sy >= 0) & (sy <= img.height - 1)
    vals = _bilinear(img.pixels, np.where(inside, sx, 0.0), np.where(inside, sy, 0.0))
    out = np.where(inside, _round_half_up(vals), 0.0)
    return GrayImage(np.clip(out, 0, 255).astype(np.uint8))


# ---------------------------------------------------------------- fixtures


def gen_texture(seed: int, kind: str, w: int, h: int) -> GrayImage:
    """Deterministic synthetic texture.

    ramp     I(x, y) = floor(255 x / (w - 1))   (0 everywhere when w == 1)
    checker  8-pixel squares, 0 on the top-left square, 255 on the next
    noise    uniform bytes from ``numpy.random.default_rng(seed)``
    blobs    12 seeded isotropic Gaussians of random sign, min-max stretched
             to [0, 255] and rounded half up
    """
    if w < 1 or h < 1:
        raise ValueError(f"texture size must be positive, got {w}x{h}")
    ys, xs = np.mgrid[0:h, 0:w]
    if kind == "ramp":
        if w == 1:
            return GrayImage(np.zeros((h, w), np.uint8))
        return GrayImage((255 * xs) // (w - 1))
    if kind == "checker":
        return GrayImage((((xs // 8) + (ys // 8)) % 2) * 255)
    rng = np.random.default_rng(seed)
    if kind == "noise":
        return GrayImage(rng.integers(0, 256, size=(h, w), dtype=np.uint8))
    if kind == "blobs":
        n = 12
        cx = rng.uniform(0, w, n)
        cy = rng.uniform(0, h, n)
        scale = min(w, h)
        sigma = rng.uniform(scale / 20.0, scale / 6.0, n)
        amp = rng.uniform(-1.0, 1.0, n)
        field = np.zeros((h, w))
        for k in range(n):
            d2 = (xs - cx[k]) ** 2 + (ys - cy[k]) ** 2
            field += amp[k] * np.exp(-d2 / (2.0 * sigma[k] ** 2))
        lo, hi = field.min(), field.max()
        if hi - lo < 1e-12:
            return GrayImage(np.full((h, w), 128, np.uint8))
        return GrayImage(_round_half_up(255.0 * (field - lo) / (hi - lo)).astype(np.uint8))
    raise ValueError(f"unknown texture kind {kind!r}; expected one of {TEXTURE_KINDS}")


def add_noise(img: GrayImage, amplitude: int, rng: np.random.Generator) -> GrayImage:
    """Add uniform integer noise in [-amplitude, amplitude], clipped to [0, 255]."""
    noise = rng.integers(-amplitude, amplitude + 1, size=img.pixels.shape)
    return GrayImage(np.clip(img.pixels.astype(np.int64) + noise, 0, 255).astype(np.uint8))
