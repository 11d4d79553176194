#!/usr/bin/env python3
"""Write a gallery/probe manifest TSV from two image directories.

UFI cropped layout (subject = parent directory name):

    python scripts/make_manifest.py --gallery UFI-cropped/train --probe UFI-cropped/test > ufi.tsv

FERET fa/fb after cropping (subject = leading digits of the file name):

    python scripts/make_manifest.py --gallery feret/fa --probe feret/fb \
        --subject-regex '^(\\d{5})' > feret.tsv
"""
import argparse
import os
import re
import sys

EXTS = (".pgm", ".png")


def scan(root, subject_regex):
    for dirpath, _, files in sorted(os.walk(root)):
        for name in sorted(files):
            if not name.lower().endswith(EXTS):
                continue
            path = os.path.abspath(os.path.join(dirpath, name))
            if subject_regex:
                m = re.search(subject_regex, name)
                if not m:
                    sys.exit(f"{name}: no subject match for {subject_regex!r}")
                subject = m.group(1)
            else:
                subject = os.path.basename(dirpath)
            yield path, subject


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gallery", required=True)
    ap.add_argument("--probe", required=True)
    ap.add_argument("--subject-regex", help="regex with one group applied to file names")
    ap.add_argument("--drop-unmatched", action="store_true",
                    help="skip probes whose subject has no gallery image")
    args = ap.parse_args()

    gallery = list(scan(args.gallery, args.subject_regex))
    known = {s for _, s in gallery}
    out = sys.stdout
    for path, subject in gallery:
        out.write(f"{path}\t{subject}\tgallery\n")
    for path, subject in scan(args.probe, args.subject_regex):
        if subject not in known:
            if args.drop_unmatched:
                print(f"skipping {path}: subject {subject} not in gallery", file=sys.stderr)
                continue
        out.write(f"{path}\t{subject}\tprobe\n")


if __name__ == "__main__":
    main()
