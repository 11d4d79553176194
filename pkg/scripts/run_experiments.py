#!/usr/bin/env python3
"""Run the face identification experiments on one corpus and write CSVs.

    python scripts/run_experiments.py --manifest ufi.tsv --out results/ufi --threads 4

Produces:
    final.csv        E-LBP_4_9_5 and classic LBP at cell 10
    cell_sweep.csv   E-LBP_4_9_5 and LBP accuracy vs cell size
    range_sweep.csv  accuracy vs range for the four 4/9 topologies
"""
import argparse
import logging
import os

from elbp.descriptor import OperatorParams
from elbp.evaluation import (
    evaluate_images,
    load_images,
    load_manifest,
    results_csv,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--manifest", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--cell", type=int, default=10)
    ap.add_argument("--cells", default="4-20")
    ap.add_argument("--ranges", default="1-8")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    def span(text):
        lo, hi = (int(v) for v in text.split("-"))
        return range(lo, hi + 1)

    os.makedirs(args.out, exist_ok=True)
    manifest = load_manifest(args.manifest)
    images = load_images(manifest)
    final_op, lbp = OperatorParams.create(4, 9, 5), OperatorParams.classic()

    def run(params, cell):
        return evaluate_images(manifest, images, params, cell, args.threads)

    def write(name, reports):
        with open(os.path.join(args.out, name), "w", newline="") as fh:
            fh.write(results_csv(reports))

    write("final.csv", [run(final_op, args.cell), run(lbp, args.cell)])
    write("cell_sweep.csv", [run(p, c) for p in (final_op, lbp) for c in span(args.cells)])
    write("range_sweep.csv", [
        run(OperatorParams.create(x, y, r), args.cell)
        for x, y in ((4, 4), (4, 9), (9, 4), (9, 9))
        for r in span(args.ranges)
    ])


if __name__ == "__main__":
    main()
