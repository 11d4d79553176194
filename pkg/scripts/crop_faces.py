#!/usr/bin/env python3
"""Eye-aligned cropping for FERET-style data.

Input is a CSV with columns ``path,left_x,left_y,right_x,right_y`` (eye
coordinates in source pixels, left/right as seen in the image). Each image is
warped so the eyes sit on a horizontal line and written as PGM into --out,
keeping its base name.
"""
import argparse
import csv
import os

from elbp.imaging import crop_by_eyes, load_image, save_pgm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eyes", required=True, help="CSV path,left_x,left_y,right_x,right_y")
    ap.add_argument("--out", required=True)
    ap.add_argument("--width", type=int, default=130)
    ap.add_argument("--height", type=int, default=150)
    ap.add_argument("--eye-row", type=float, default=0.35)
    ap.add_argument("--eye-dist", type=float, default=0.5)
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    base = os.path.dirname(os.path.abspath(args.eyes))
    with open(args.eyes, newline="") as fh:
        for row in csv.DictReader(fh):
            src = row["path"] if os.path.isabs(row["path"]) else os.path.join(base, row["path"])
            img = load_image(src)
            left = (float(row["left_x"]), float(row["left_y"]))
            right = (float(row["right_x"]), float(row["right_y"]))
            out = crop_by_eyes(img, left, right, args.width, args.height, args.eye_row, args.eye_dist)
            stem = os.path.splitext(os.path.basename(src))[0]
            save_pgm(out, os.path.join(args.out, stem + ".pgm"))


if __name__ == "__main__":
    main()
