"""Closed-set gallery/probe experiments, rank-1 accuracy and parameter sweeps."""
from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .descriptor import OperatorParams
from .errors import DatasetError, ElbpError, ManifestError
from .facemodel import FaceModel, build_face_model
from .imaging import GrayImage, load_image
from .matcher import Gallery, rank

log = logging.getLogger(__name__)

SPLITS = ("gallery", "probe")
RESULT_COLUMNS = ("config", "cell_size", "x", "y", "r", "accuracy_percent", "total", "correct")
DETAIL_COLUMNS = ("path", "true_subject", "predicted_subject", "score")


class ManifestParseError(ManifestError):
    pass


class ManifestValidationError(ManifestError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    subject_id: str
    split: str


@dataclass
class Manifest:
    entries: List[ManifestEntry]

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.split not in SPLITS:
                raise ManifestParseError(f"unknown split {e.split!r}; allowed: {', '.join(SPLITS)}")
            if not e.subject_id:
                raise ManifestValidationError(f"{e.path}: empty subject id")
            if e.path in seen:
                raise ManifestValidationError(f"duplicate path {e.path!r}")
            seen.add(e.path)
        known = {e.subject_id for e in self.gallery}
        for e in self.probes:
            if e.subject_id not in known:
                raise ManifestValidationError(
                    f"probe {e.path!r} has subject {e.subject_id!r} absent from the gallery"
                )

    @property
    def gallery(self) -> List[ManifestEntry]:
        return [e for e in self.entries if e.split == "gallery"]

    @property
    def probes(self) -> List[ManifestEntry]:
        return [e for e in self.entries if e.split == "probe"]


def parse_manifest(text: str, base_dir: Optional[str] = None) -> Manifest:
    """Parse ``path<TAB>subject<TAB>split`` lines; blank lines and ``#`` comments are skipped.

    Relative paths are resolved against ``base_dir`` when given.
    """
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ManifestParseError(f"line {lineno}: expected 3 tab-separated columns, got {len(cols)}")
        path, subject, split = (c.strip() for c in cols)
        if split not in SPLITS:
            raise ManifestParseError(
                f"line {lineno}: unknown split {split!r}; allowed: {', '.join(SPLITS)}"
            )
        if base_dir is not None and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        entries.append(ManifestEntry(path, subject, split))
    return Manifest(entries)


def load_manifest(path) -> Manifest:
    p = Path(path)
    return parse_manifest(p.read_text(encoding="utf-8"), base_dir=str(p.parent))


@dataclass(frozen=True)
class ProbeRecord:
    path: str
    true_subject: str
    predicted_subject: str
    score: float

    @property
    def correct(self) -> bool:
        return self.true_subject == self.predicted_subject


@dataclass
class AccuracyReport:
    params: OperatorParams
    cell_size: int
    records: List[ProbeRecord] = field(default_factory=list)

    @property
    def total_probes(self) -> int:
        return len(self.records)

    @property
    def correct_rank1(self) -> int:
        return sum(r.correct for r in self.records)

    @property
    def accuracy(self) -> float:
        if not self.records:
            return 0.0
        return 100.0 * self.correct_rank1 / self.total_probes

    def row(self) -> Dict[str, str]:
        p = self.params
        return {
            "config": p.name,
            "cell_size": str(self.cell_size),
            "x": str(p.x),
            "y": str(p.y),
            "r": str(p.r),
            "accuracy_percent": f"{self.accuracy:.2f}",
            "total": str(self.total_probes),
            "correct": str(self.correct_rank1),
        }


def load_images(manifest: Manifest) -> Dict[str, GrayImage]:
    images = {}
    dims = None
    for e in manifest.entries:
        try:
            img = load_image(e.path)
        except (OSError, ElbpError) as exc:
            raise DatasetError(f"{e.path}: {exc}") from exc
        if dims is None:
            dims = (img.width, img.height, e.path)
        elif (img.width, img.height) != dims[:2]:
            raise DatasetError(
                f"{e.path} is {img.width}x{img.height}, but {dims[2]} is {dims[0]}x{dims[1]}"
            )
        images[e.path] = img
    return images


def _map(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def evaluate_images(
    manifest: Manifest,
    images: Dict[str, GrayImage],
    params: OperatorParams,
    cell_size: int,
    threads: int = 1,
) -> AccuracyReport:
    def model(entry: ManifestEntry) -> FaceModel:
        try:
            return build_face_model(images[entry.path], params, cell_size)
        except ElbpError as exc:
            raise DatasetError(f"{entry.path}: {exc}") from exc

    gallery_entries = manifest.gallery
    if not gallery_entries:
        raise DatasetError("manifest has no gallery entries")
    gallery = Gallery(list(zip((e.subject_id for e in gallery_entries),
                               _map(model, gallery_entries, threads))))

    def one(entry: ManifestEntry) -> ProbeRecord:
        ranked = rank(gallery.subjects, gallery.scores(model(entry)))
        subject, score = ranked[0]
        return ProbeRecord(entry.path, entry.subject_id, subject, score)

    report = AccuracyReport(params, cell_size, _map(one, manifest.probes, threads))
    log.info("%s cell=%d: %d/%d = %.2f%%", params.name, cell_size,
             report.correct_rank1, report.total_probes, report.accuracy)
    return report


def evaluate(manifest: Manifest, params: OperatorParams, cell_size: int, threads: int = 1) -> AccuracyReport:
    """Rank-1 identification accuracy of every probe against the enrolled gallery."""
    return evaluate_images(manifest, load_images(manifest), params, cell_size, threads)


def sweep_cell_size(
    manifest: Manifest, params: OperatorParams, sizes: Sequence[int], threads: int = 1
) -> List[AccuracyReport]:
    if not sizes:
        raise ValueError("sizes must be non-empty")
    images = load_images(manifest)
    return [evaluate_images(manifest, images, params, s, threads) for s in sizes]


def sweep_range(
    manifest: Manifest,
    topologies: Sequence[Tuple[int, int]],
    cell_size: int,
    ranges: Sequence[int],
    threads: int = 1,
) -> List[AccuracyReport]:
    """Cross product of topologies (outer loop) and ranges (inner loop)."""
    if not topologies or not ranges:
        raise ValueError("topologies and ranges must be non-empty")
    images = load_images(manifest)
    return [
        evaluate_images(manifest, images, OperatorParams.create(x, y, r), cell_size, threads)
        for x, y in topologies
        for r in ranges
    ]


def results_csv(reports: Iterable[AccuracyReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RESULT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.row())
    return buf.getvalue()


def details_csv(reports: Iterable[AccuracyReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("config", "cell_size") + DETAIL_COLUMNS)
    for rep in reports:
        for r in rep.records:
            writer.writerow((rep.params.name, rep.cell_size, r.path, r.true_subject,
                             r.predicted_subject, f"{r.score:.6f}"))
    return buf.getvalue()
