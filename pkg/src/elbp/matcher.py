"""Histogram-intersection similarity and 1-NN identification against a gallery.

Models built with the same fingerprint have identical per-cell pixel counts,
so the intersection of normalized histograms in a cell equals the integer
intersection of raw counts divided by the cell area. Scores are computed that
way (exact integer work, one division per cell); rows whose cell totals differ
from the probe's fall back to the normalized float formula.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import IncompatibleModelsError
from .facemodel import FaceModel, normalize_counts

CHUNK = 256


def _check_compatible(a: FaceModel, b: FaceModel) -> None:
    if a.fingerprint != b.fingerprint or tuple(a.grid) != tuple(b.grid):
        raise IncompatibleModelsError(
            f"model fingerprints differ: {a.fingerprint} vs {b.fingerprint}"
        )


def _compact(counts: np.ndarray) -> np.ndarray:
    peak = int(counts.max()) if counts.size else 0
    dtype = np.uint8 if peak <= 0xFF else np.uint16 if peak <= 0xFFFF else np.uint32
    return counts.astype(dtype, copy=False)


def _scores(probe: np.ndarray, block: np.ndarray, block_totals: Optional[np.ndarray] = None) -> np.ndarray:
    """Mean per-cell histogram intersection of ``probe`` (cells, 256) with each
    model in ``block`` (n, cells, 256); both hold raw counts."""
    n_cells = probe.shape[0]
    p_tot = probe.sum(axis=1, dtype=np.int64)
    if block_totals is None:
        block_totals = block.sum(axis=2, dtype=np.int64)
    same = (block_totals == p_tot).all(axis=1)
    common = np.promote_types(probe.dtype, block.dtype)
    # a cell's intersection never exceeds the probe's cell total
    acc = np.uint16 if p_tot.max() <= 0xFFFF else np.int64
    inter = np.minimum(block, probe.astype(common)[None]).sum(axis=2, dtype=acc)
    out = (inter / p_tot).sum(axis=1) / n_cells
    if not same.all():
        pn = normalize_counts(probe)
        for i in np.flatnonzero(~same):
            out[i] = np.minimum(normalize_counts(block[i]), pn).sum(axis=1).sum() / n_cells
    return out


def intersection_similarity(a: FaceModel, b: FaceModel) -> float:
    """(1/cells) * sum over cells and bins of min(a, b) on normalized histograms."""
    _check_compatible(a, b)
    return float(_scores(_compact(a.counts), _compact(b.counts)[None])[0])


@dataclass
class Gallery:
    entries: List[Tuple[str, FaceModel]] = field(default_factory=list)
    _stack: Optional[np.ndarray] = field(default=None, init=False, repr=False)
    _totals: Optional[np.ndarray] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        entries, self.entries = list(self.entries), []
        for subject, model in entries:
            self.add(subject, model)

    def add(self, subject_id: str, model: FaceModel) -> None:
        if not subject_id:
            raise ValueError("subject_id must be non-empty")
        if self.entries:
            _check_compatible(self.entries[0][1], model)
        self.entries.append((subject_id, model))
        self._stack = self._totals = None

    @property
    def fingerprint(self) -> Optional[tuple]:
        return self.entries[0][1].fingerprint if self.entries else None

    @property
    def subjects(self) -> List[str]:
        return [s for s, _ in self.entries]

    def __len__(self):
        return len(self.entries)

    def stack(self) -> np.ndarray:
        """(n, cells, 256) compact integer counts of every gallery model."""
        if self._stack is None:
            self._stack = _compact(np.stack([m.counts for _, m in self.entries]))
            self._totals = self._stack.sum(axis=2, dtype=np.int64)
        return self._stack

    def scores(self, probe: FaceModel, threads: int = 1) -> np.ndarray:
        """Similarity of ``probe`` to every gallery image, in insertion order."""
        if not self.entries:
            raise ValueError("gallery is empty")
        _check_compatible(self.entries[0][1], probe)
        stack = self.stack()
        p = _compact(probe.counts)
        spans = [(i, min(i + CHUNK, len(self))) for i in range(0, len(self), CHUNK)]

        def run(span):
            return _scores(p, stack[span[0] : span[1]], self._totals[span[0] : span[1]])

        if threads > 1 and len(spans) > 1:
            with ThreadPoolExecutor(threads) as pool:
                parts = list(pool.map(run, spans))
        else:
            parts = [run(s) for s in spans]
        return np.concatenate(parts)


def rank(subjects: Sequence[str], scores: np.ndarray) -> List[Tuple[str, float]]:
    # stable sort keeps insertion order among equal scores
    order = sorted(range(len(subjects)), key=lambda i: -scores[i])
    return [(subjects[i], float(scores[i])) for i in order]


def identify(probe: FaceModel, gallery: Gallery, threads: int = 1) -> List[Tuple[str, float]]:
    """Gallery images ranked by similarity to ``probe``; rank 1 is the prediction."""
    if len(gallery) == 0:
        raise ValueError("gallery is empty")
    return rank(gallery.subjects, gallery.scores(probe, threads=threads))
