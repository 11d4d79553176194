#!/usr/bin/env python3
"""Timing of code-map extraction, model building and gallery scoring.

Informational only; nothing here is a pass/fail gate.
"""
import argparse
import time

import numpy as np

from elbp.descriptor import OperatorParams, code_image
from elbp.facemodel import build_face_model
from elbp.imaging import GrayImage
from elbp.matcher import Gallery


def timed(fn, reps):
    t = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t) / reps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=128)
    ap.add_argument("--gallery", type=int, default=1000)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    img = GrayImage(rng.integers(0, 256, (args.size, args.size), dtype=np.uint8))
    print("operator,code_image_ms,build_model_ms")
    for x, y, r in ((1, 1, 1), (4, 4, 5), (4, 9, 5), (9, 9, 5)):
        p = OperatorParams.create(x, y, r)
        ci = timed(lambda: code_image(img, p), 50) * 1e3
        bm = timed(lambda: build_face_model(img, p, 10), 50) * 1e3
        print(f"{p.name},{ci:.3f},{bm:.3f}")

    p = OperatorParams.create()
    models = [build_face_model(GrayImage(rng.integers(0, 256, img.pixels.shape, dtype=np.uint8)), p, 10)
              for _ in range(args.gallery)]
    gallery = Gallery([(str(i), m) for i, m in enumerate(models)])
    gallery.scores(models[0])
    per_probe = timed(lambda: gallery.scores(models[1], threads=args.threads), 10)
    print(f"scoring one probe against {args.gallery} models: {per_probe * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
