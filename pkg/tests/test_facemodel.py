import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from elbp.descriptor import CodeImage, OperatorParams
from elbp.errors import ModelFormatError, ModelTruncatedError, ModelVersionError
from elbp.facemodel import (
    MAGIC,
    build_face_model,
    build_histograms,
    decode_model,
    encode_model,
    load_model,
    save_model,
)
from elbp.imaging import GrayImage, gen_texture


def codes(arr):
    return CodeImage((0, 0), np.asarray(arr, dtype=np.uint8))


def test_constant_codes_four_cells():
    cells = build_histograms(codes(np.full((20, 20), 255)), 10)
    assert len(cells) == 4
    for c in cells:
        assert c.counts[255] == 100 and c.total == 100
        assert c.normalized[255] == 1.0


def test_partial_cells_row_major():
    cells = build_histograms(codes(np.zeros((10, 10))), 4)
    assert [int(c.counts[0]) for c in cells] == [16, 16, 8, 16, 16, 8, 8, 8, 4]


def test_row_major_order():
    arr = np.zeros((4, 6), np.uint8)
    arr[:2, 2:4] = 7  # second cell of the first row
    arr[2:, :2] = 9  # first cell of the second row
    cells = build_histograms(codes(arr), 2)
    assert cells[1].counts[7] == 4 and cells[3].counts[9] == 4


def test_bad_arguments():
    with pytest.raises(ValueError):
        build_histograms(codes(np.zeros((4, 4))), 0)
    with pytest.raises(ValueError):
        build_histograms(codes(np.zeros((0, 4))), 2)


@given(arrays(np.uint8, st.tuples(st.integers(1, 30), st.integers(1, 30))), st.integers(1, 31))
def test_histograms_partition_codes(arr, cell):
    cells = build_histograms(codes(arr), cell)
    total = np.sum([c.counts for c in cells], axis=0)
    assert np.array_equal(total, np.bincount(arr.ravel(), minlength=256))
    for c in cells:
        assert abs(c.normalized.sum() - 1.0) <= 1e-9


def test_ufi_sized_model():
    img = gen_texture(1, "blobs", 128, 128)
    m = build_face_model(img, OperatorParams.create(4, 9, 5), 10)
    assert m.grid == (12, 12)
    assert len(m.cells) == 144
    assert m.vector_length == 144 * 256 == 36864
    assert m.source_dims == (128, 128)


def test_feret_sized_model():
    img = gen_texture(1, "blobs", 130, 150)
    m = build_face_model(img, OperatorParams.create(4, 9, 5), 10)
    assert m.grid == (12, 14)  # 118x138 code region


def test_constant_image_model():
    m = build_face_model(GrayImage(np.full((40, 40), 9)), OperatorParams.create(), 10)
    assert (m.counts[:, 255] == m.counts.sum(axis=1)).all()


def test_model_deterministic():
    img = gen_texture(4, "noise", 50, 50)
    p = OperatorParams.create(9, 4, 3)
    a, b = build_face_model(img, p, 7), build_face_model(img, p, 7)
    assert a == b and encode_model(a) == encode_model(b)


@given(arrays(np.uint8, (20, 24), elements=st.integers(10, 100)), st.integers(1, 2), st.integers(-10, 10))
def test_model_affine_invariance(arr, a, b):
    p = OperatorParams.create(4, 4, 2)
    m1 = build_face_model(GrayImage(arr), p, 5)
    m2 = build_face_model(GrayImage(arr.astype(int) * a + b), p, 5)
    assert m1 == m2


@given(st.sampled_from([1, 4, 9]), st.sampled_from([1, 4, 9]), st.integers(1, 4),
       st.integers(1, 12), st.integers(0, 1000))
def test_serialization_round_trip(x, y, r, cell, seed):
    img = gen_texture(seed, "noise", 27, 23)
    m = build_face_model(img, OperatorParams.create(x, y, r), cell)
    back = decode_model(encode_model(m))
    assert back == m
    assert np.array_equal(back.normalized, m.normalized)


def test_file_layout(tmp_path):
    m = build_face_model(gen_texture(0, "noise", 30, 20), OperatorParams.create(4, 9, 2), 8)
    path = tmp_path / "m.elbpm"
    save_model(m, path)
    raw = path.read_bytes()
    assert raw[:8] == b"ELBPMODL"
    version, x, y, r, cell, w, h, cols, rows = struct.unpack_from("<HBBHHHHHH", raw, 8)
    assert (version, x, y, r, cell, w, h) == (1, 4, 9, 2, 8, 30, 20)
    assert (cols, rows) == m.grid == (3, 2)  # 24x14 code region
    assert len(raw) == 8 + 16 + cols * rows * 256 * 4
    assert load_model(path) == m


def test_decode_errors():
    m = build_face_model(gen_texture(0, "noise", 20, 20), OperatorParams.create(1, 1, 1), 6)
    raw = encode_model(m)
    with pytest.raises(ModelFormatError) as err:
        decode_model(b"NOTMODEL" + raw[8:])
    assert type(err.value) is ModelFormatError
    bumped = raw[:8] + struct.pack("<H", 2) + raw[10:]
    with pytest.raises(ModelVersionError):
        decode_model(bumped)
    with pytest.raises(ModelTruncatedError):
        decode_model(raw[:-1])
    with pytest.raises(ModelTruncatedError):
        decode_model(raw[:12])
    with pytest.raises(ModelFormatError):
        decode_model(raw + b"\x00")
    assert MAGIC == b"ELBPMODL"
