"""Dataset manifests.

A manifest is a small UTF-8 text file with a fixed layout::

    # halfsym manifest v1
    class: airplane
    kind: full
    source: ShapeNetCore.v2.PC15K
    stats.mean: 0.0 0.0 0.0
    stats.scale: 0.25
    stats.split: val
    stats.estimator: population
    param.dedup_boundary: false
    note: free text, one line per note
    entries: 2
    id	split	points	status	path
    1a2b	train	15000	ok	train/1a2b.npy
    3c4d	val	15000	ok	../source/val/3c4d.npy

Keys always appear in this order (``param.*`` sorted by name); optional
keys are omitted when unset. Paths are relative to the manifest's
directory. Floats are written with ``repr`` so they read back exactly.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..exceptions import CloudIOError, DatasetError, HalfsymError, InvalidInputError
from .io import FORMATS, count_points, load_cloud

MAGIC = "# halfsym manifest v1"
MANIFEST_NAME = "manifest.txt"
SPLITS = ("train", "val", "test")
COLUMNS = ("id", "split", "points", "status", "path")


@dataclass
class ManifestEntry:
    id: str
    split: str
    path: str  # relative to the manifest root
    n_points: int
    status: str = "ok"

    @property
    def ok(self):
        return self.status == "ok"


@dataclass
class DatasetManifest:
    label: str
    entries: list = field(default_factory=list)
    kind: str = "full"
    source: str = ""
    mean: np.ndarray = None
    scale: float = None
    stats_split: str = ""
    stats_estimator: str = ""
    params: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    root: Path = field(default_factory=Path.cwd)

    @property
    def has_stats(self):
        return self.mean is not None and self.scale is not None

    def set_stats(self, mean, scale, split, estimator="population"):
        if not scale > 0:
            raise InvalidInputError(f"normalization scale must be > 0, got {scale}")
        self.mean = np.asarray(mean, dtype=np.float64).reshape(3)
        self.scale = float(scale)
        self.stats_split = split
        self.stats_estimator = estimator

    def select(self, split=None, ok_only=True):
        return [
            e for e in self.entries
            if (split is None or e.split == split) and (e.ok or not ok_only)
        ]

    def splits(self):
        present = {e.split for e in self.entries}
        return [s for s in SPLITS if s in present] + sorted(present - set(SPLITS))

    def resolve(self, entry):
        return (self.root / entry.path).resolve()

    def load(self, entry):
        return load_cloud(self.resolve(entry))

    def relative(self, path):
        return Path(os.path.relpath(Path(path).resolve(), self.root.resolve())).as_posix()

    # --- serialization -------------------------------------------------

    def to_text(self):
        lines = [MAGIC, f"class: {self.label}", f"kind: {self.kind}"]
        if self.source:
            lines.append(f"source: {self.source}")
        if self.has_stats:
            lines.append("stats.mean: " + " ".join(repr(float(v)) for v in self.mean))
            lines.append(f"stats.scale: {self.scale!r}")
            lines.append(f"stats.split: {self.stats_split}")
            lines.append(f"stats.estimator: {self.stats_estimator}")
        for key in sorted(self.params):
            lines.append(f"param.{key}: {self.params[key]}")
        for note in self.notes:
            lines.append(f"note: {note}")
        lines.append(f"entries: {len(self.entries)}")
        lines.append("\t".join(COLUMNS))
        for e in self.entries:
            lines.append("\t".join([e.id, e.split, str(e.n_points), e.status, e.path]))
        return "\n".join(lines) + "\n"

    def write(self, path=None):
        path = Path(path) if path is not None else self.root / MANIFEST_NAME
        try:
            path.write_text(self.to_text(), encoding="utf-8")
        except OSError as exc:
            raise CloudIOError(f"cannot write manifest {path}: {exc.strerror or exc}") from None
        return path

    @classmethod
    def read(cls, path):
        path = Path(path)
        if path.is_dir():
            path = path / MANIFEST_NAME
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise CloudIOError(f"cannot read manifest {path}: {exc.strerror or exc}") from None
        lines = text.splitlines()
        if not lines or lines[0] != MAGIC:
            raise DatasetError(f"{path}: not a halfsym manifest (missing {MAGIC!r})")
        m = cls(label="", root=path.parent.resolve())
        mean = scale = None
        n_entries = None
        pos = 1
        while pos < len(lines):
            line = lines[pos]
            pos += 1
            key, sep, value = line.partition(": ")
            if not sep:
                raise DatasetError(f"{path}:{pos}: expected 'key: value', got {line!r}")
            if key == "class":
                m.label = value
            elif key == "kind":
                m.kind = value
            elif key == "source":
                m.source = value
            elif key == "stats.mean":
                mean = [float(v) for v in value.split()]
            elif key == "stats.scale":
                scale = float(value)
            elif key == "stats.split":
                m.stats_split = value
            elif key == "stats.estimator":
                m.stats_estimator = value
            elif key.startswith("param."):
                m.params[key[len("param."):]] = value
            elif key == "note":
                m.notes.append(value)
            elif key == "entries":
                n_entries = int(value)
                break
            else:
                raise DatasetError(f"{path}:{pos}: unknown manifest key {key!r}")
        if n_entries is None:
            raise DatasetError(f"{path}: missing 'entries:' line")
        if pos >= len(lines) or tuple(lines[pos].split("\t")) != COLUMNS:
            raise DatasetError(f"{path}: missing entry table header")
        rows = lines[pos + 1:]
        if len(rows) != n_entries:
            raise DatasetError(f"{path}: declares {n_entries} entries, found {len(rows)}")
        seen = set()
        for k, row in enumerate(rows):
            cells = row.split("\t")
            if len(cells) != len(COLUMNS):
                raise DatasetError(f"{path}:{pos + 2 + k}: expected {len(COLUMNS)} columns")
            sid, split, points, status, rel = cells
            if sid in seen:
                raise DatasetError(f"{path}: duplicate shape id {sid!r}")
            seen.add(sid)
            m.entries.append(ManifestEntry(sid, split, rel, int(points), status))
        if mean is not None and scale is not None:
            m.set_stats(mean, scale, m.stats_split, m.stats_estimator)
        return m

    @classmethod
    def from_directory(cls, directory, label=None, source=""):
        """Index point-cloud files under ``directory``.

        ``directory/{train,val,test}/`` subfolders give the split; files
        directly inside ``directory`` are treated as training shapes.
        """
        directory = Path(directory).resolve()
        if not directory.is_dir():
            raise CloudIOError(f"input directory does not exist: {directory}")
        m = cls(label=label or directory.name, source=source, root=directory)
        groups = [(s, directory / s) for s in SPLITS if (directory / s).is_dir()]
        if not groups:
            groups = [("train", directory)]
        seen = {}
        for split, folder in groups:
            for f in sorted(folder.iterdir()):
                if not f.is_file() or f.suffix.lower().lstrip(".") not in FORMATS:
                    continue
                if f.stem in seen:
                    raise DatasetError(f"shape id {f.stem!r} appears in both {seen[f.stem]} and {split}")
                seen[f.stem] = split
                try:
                    n = count_points(f)
                    status = "ok"
                except HalfsymError as exc:
                    n, status = 0, "failed: " + _one_line(exc)
                m.entries.append(ManifestEntry(f.stem, split, m.relative(f), n, status))
        return m


def _one_line(exc):
    return " ".join(str(exc).split()).replace("\t", " ")


def load_manifest(path, label=None):
    """A manifest file, a directory holding ``manifest.txt``, or a bare directory."""
    path = Path(path)
    if path.is_file() or (path / MANIFEST_NAME).is_file():
        return DatasetManifest.read(path)
    if path.is_dir():
        return DatasetManifest.from_directory(path, label=label)
    raise CloudIOError(f"input does not exist: {path}")


def verify_manifest(manifest):
    """Check every ok entry exists and parses to its declared count.

    Returns a list of ``(entry_id, problem)`` tuples; empty means valid.
    """
    problems = []
    if manifest.has_stats and not manifest.scale > 0:
        problems.append(("-", f"normalization scale must be > 0, got {manifest.scale}"))
    for e in manifest.select(ok_only=True):
        try:
            n = manifest.load(e).shape[0]
        except HalfsymError as exc:
            problems.append((e.id, _one_line(exc)))
            continue
        if n != e.n_points:
            problems.append((e.id, f"declared {e.n_points} points, file has {n}"))
    return problems
