import hashlib

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from elbp.errors import CorruptImageError, GeometryError, ImageFormatError, UnsupportedDepthError
from elbp.imaging import (
    GrayImage,
    crop_by_eyes,
    decode_pgm,
    encode_pgm,
    eye_targets,
    gen_texture,
    load_image,
    resize_bilinear,
    rgb_to_luma,
    save_pgm,
)

rasters = arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12)))


def test_gray_image_fields():
    img = GrayImage.from_bytes(3, 2, bytes(range(6)))
    assert (img.width, img.height) == (3, 2)
    assert img.data == bytes(range(6))
    with pytest.raises(ValueError):
        GrayImage(np.array([[0, 300]]))
    with pytest.raises(ValueError):
        GrayImage.from_bytes(2, 2, b"\x00")


def test_pgm_decode_example(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P5 2 2 255\n" + bytes([0, 1, 2, 3]))
    img = load_image(path)
    assert (img.width, img.height, img.data) == (2, 2, bytes([0, 1, 2, 3]))


def test_pgm_header_comments():
    img = decode_pgm(b"P5\n# made by hand\n3 1\n# depth\n255\n\x01\x02\x03")
    assert img.data == b"\x01\x02\x03"


def test_pgm_low_maxval_accepted():
    assert decode_pgm(b"P5 1 1 15\n\x0f").data == b"\x0f"


@pytest.mark.parametrize(
    "blob, exc",
    [
        (b"P2 1 1 255\n0", ImageFormatError),
        (b"P5 2 2 255\n\x00\x01\x02", CorruptImageError),
        (b"P5 2 2", CorruptImageError),
        (b"P5 1 1 65535\n\x00\x00", UnsupportedDepthError),
    ],
)
def test_pgm_errors(blob, exc):
    with pytest.raises(exc):
        decode_pgm(blob)


def test_unknown_format(tmp_path):
    path = tmp_path / "x.bin"
    path.write_bytes(b"GIF89a....")
    with pytest.raises(ImageFormatError):
        load_image(path)


@given(rasters)
def test_pgm_round_trip(arr):
    img = GrayImage(arr)
    again = decode_pgm(encode_pgm(img))
    assert again == img
    assert encode_pgm(again) == encode_pgm(img)


def test_pgm_file_round_trip(tmp_path, rng):
    img = GrayImage(rng.integers(0, 256, (7, 5), dtype=np.uint8))
    save_pgm(img, tmp_path / "a.pgm")
    once = load_image(tmp_path / "a.pgm")
    save_pgm(once, tmp_path / "b.pgm")
    assert load_image(tmp_path / "b.pgm") == img
    assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()


def test_luma_values():
    assert rgb_to_luma(np.array([255, 255, 255])) == 255
    # 0.299*100 + 0.587*200 + 0.114*50 = 29.9 + 117.4 + 5.7 = 153.0
    assert rgb_to_luma(np.array([100, 200, 50])) == 153
    # 0.299*1 + 0.587*1 + 0.114*0 = 0.886 -> 1; 0.5 exactly rounds up
    assert rgb_to_luma(np.array([1, 1, 0])) == 1
    assert rgb_to_luma(np.array([0, 0, 0])) == 0


def test_png_gray_and_rgb(tmp_path):
    from PIL import Image

    gray = np.array([[0, 50], [100, 255]], dtype=np.uint8)
    Image.fromarray(gray, "L").save(tmp_path / "g.png")
    assert np.array_equal(load_image(tmp_path / "g.png").pixels, gray)

    rgb = np.zeros((1, 2, 3), dtype=np.uint8)
    rgb[0, 0] = (100, 200, 50)
    rgb[0, 1] = (255, 255, 255)
    Image.fromarray(rgb, "RGB").save(tmp_path / "c.png")
    assert load_image(tmp_path / "c.png").pixels.tolist() == [[153, 255]]


def test_png_16bit_rejected(tmp_path):
    from PIL import Image

    Image.fromarray(np.array([[1000, 2]], dtype=np.uint16)).save(tmp_path / "d.png")
    with pytest.raises(UnsupportedDepthError):
        load_image(tmp_path / "d.png")


def test_resize_examples():
    src = GrayImage(np.array([[0, 255]]))
    # align corners: samples at 0, 0.5, 1 -> 0, 127.5 -> 128, 255
    assert resize_bilinear(src, 3, 1).pixels.tolist() == [[0, 128, 255]]
    assert resize_bilinear(src, 2, 1) == src
    assert resize_bilinear(src, 1, 1).pixels.tolist() == [[128]]
    with pytest.raises(ValueError):
        resize_bilinear(src, 0, 3)


@given(st.integers(0, 255), st.integers(1, 9), st.integers(1, 9), st.integers(1, 20), st.integers(1, 20))
def test_resize_constant(v, w, h, ow, oh):
    out = resize_bilinear(GrayImage(np.full((h, w), v)), ow, oh)
    assert (out.width, out.height) == (ow, oh)
    assert (out.pixels == v).all()


@given(rasters, st.integers(1, 20), st.integers(1, 20))
def test_resize_within_input_range(arr, ow, oh):
    out = resize_bilinear(GrayImage(arr), ow, oh).pixels
    assert out.min() >= arr.min() and out.max() <= arr.max()


def test_crop_identity_window(rng):
    src = GrayImage(rng.integers(0, 256, (60, 70), dtype=np.uint8))
    out_w, out_h = 40, 40
    (lx, ly), (rx, ry) = eye_targets(out_w, out_h, 0.35, 0.5)
    ox, oy = 13, 7
    crop = crop_by_eyes(src, (lx + ox, ly + oy), (rx + ox, ry + oy), out_w, out_h)
    assert crop == GrayImage(src.pixels[oy : oy + out_h, ox : ox + out_w])


def test_crop_swapped_eyes_rotates_about_eye_midpoint(rng):
    src = GrayImage(rng.integers(0, 256, (80, 80), dtype=np.uint8))
    left, right = (30.0, 35.0), (52.0, 39.0)
    out_w = out_h = 40  # eye midpoint lands on (20, 14)
    a = crop_by_eyes(src, left, right, out_w, out_h).pixels
    b = crop_by_eyes(src, right, left, out_w, out_h).pixels
    mx, my = 20, 14
    for y in range(out_h):
        for x in range(out_w):
            x2, y2 = 2 * mx - x, 2 * my - y
            if 0 <= x2 < out_w and 0 <= y2 < out_h:
                assert a[y, x] == b[y2, x2]


def test_crop_marks_land_on_targets():
    src = np.zeros((120, 100), dtype=np.uint8)
    left, right = (31, 52), (68, 44)
    for x, y in (left, right):
        src[y - 1 : y + 2, x - 1 : x + 2] = 255
    out_w, out_h = 64, 72
    out = crop_by_eyes(GrayImage(src), left, right, out_w, out_h).pixels.astype(float)
    targets = eye_targets(out_w, out_h, 0.35, 0.5)
    for tx, ty in targets:
        # intensity-weighted centroid of the mark in a window around the target
        x0, y0 = int(tx) - 5, int(ty) - 5
        win = out[y0 : y0 + 11, x0 : x0 + 11]
        ys, xs = np.mgrid[y0 : y0 + 11, x0 : x0 + 11]
        cx, cy = (win * xs).sum() / win.sum(), (win * ys).sum() / win.sum()
        assert abs(cx - tx) <= 1 and abs(cy - ty) <= 1


def test_crop_fill_and_errors():
    src = GrayImage(np.full((20, 20), 200))
    out = crop_by_eyes(src, (2, 2), (4, 2), 40, 40)  # tiny eye distance zooms in
    assert out.pixels.max() == 200
    far = crop_by_eyes(src, (0, 0), (19, 0), 40, 40)
    assert far.pixels[0, 0] == 0  # above the eye line falls outside the source
    with pytest.raises(GeometryError):
        crop_by_eyes(src, (5, 5), (5, 5), 10, 10)
    with pytest.raises(GeometryError):
        crop_by_eyes(src, (5, 5), (50, 5), 10, 10)


def test_gen_texture_ramp_and_checker():
    ramp = gen_texture(3, "ramp", 9, 9).pixels
    assert (ramp[:, 0] == 0).all() and (ramp[:, -1] == 255).all()
    assert ramp[0].tolist() == [255 * x // 8 for x in range(9)]
    chk = gen_texture(0, "checker", 20, 20).pixels
    assert chk[0, 0] == 0 and chk[0, 8] == 255 and chk[8, 8] == 0 and chk[8, 0] == 255


@pytest.mark.parametrize("kind", ["ramp", "checker", "noise", "blobs"])
def test_gen_texture_deterministic(kind):
    a = gen_texture(11, kind, 33, 21)
    assert a == gen_texture(11, kind, 33, 21)
    assert (a.width, a.height) == (33, 21)


def test_gen_texture_noise_golden():
    img = gen_texture(7, "noise", 16, 16)
    assert hashlib.sha256(img.data).hexdigest() == (
        "3145fb166e5e3fd23c7b399225228fc0703ae000daf584a32b28ca950f1e5a48"
    )


def test_gen_texture_blobs_span_full_range():
    img = gen_texture(5, "blobs", 40, 40).pixels
    assert img.min() == 0 and img.max() == 255
    assert gen_texture(5, "blobs", 40, 40) != gen_texture(6, "blobs", 40, 40)


def test_gen_texture_unknown_kind():
    with pytest.raises(ValueError):
        gen_texture(0, "plaid", 4, 4)
