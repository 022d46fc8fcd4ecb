"""
SampleSet file format

    n s m sigma quality-kind seed
    <quality> <label_1> ... <label_n>      (one line per sample)

Floats are written with repr(), which round-trips doubles exactly.
"""
from pathlib import Path

import numpy as np

from metapart.core.errors import ParseError, ReportIOError
from metapart.sampler.schemas import SampleSet


def write_sample_set(path, z: SampleSet) -> Path:
    path = Path(path)
    lines = [f"{z.n} {z.s} {z.m} {z.sigma!r} {z.quality_kind} {z.seed}"]
    for q, row in zip(z.qualities.tolist(), z.labels.tolist()):
        lines.append(f"{q!r} " + " ".join(map(str, row)))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise ReportIOError(f"cannot write {path}: {e}")
    return path


def read_sample_set(path) -> SampleSet:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ReportIOError(f"cannot read {path}: {e}")
    if not lines:
        raise ParseError(1, "empty sample file")

    header = lines[0].split()
    if len(header) != 6:
        raise ParseError(1, "header must be 'n s m sigma quality-kind seed'")
    try:
        n, s, m = int(header[0]), int(header[1]), int(header[2])
        sigma, kind, seed = float(header[3]), header[4], int(header[5])
    except ValueError as e:
        raise ParseError(1, f"bad header: {e}")

    if kind not in ("kernel", "kmeans"):
        raise ParseError(1, f"unknown quality kind {kind!r}")

    body = [line for line in lines[1:] if line.strip()]
    if len(body) != m:
        raise ParseError(len(lines), f"header announces {m} samples, file has {len(body)}")

    labels = np.empty((m, n), dtype=np.int64)
    qualities = np.empty(m)
    for i, line in enumerate(body):
        tokens = line.split()
        if len(tokens) != n + 1:
            raise ParseError(i + 2, f"expected {n + 1} fields, saw {len(tokens)}")
        try:
            qualities[i] = float(tokens[0])
            labels[i] = [int(t) for t in tokens[1:]]
        except ValueError as e:
            raise ParseError(i + 2, str(e))

    return SampleSet(labels=labels, qualities=qualities, s=s, sigma=sigma, quality_kind=kind, seed=seed)
