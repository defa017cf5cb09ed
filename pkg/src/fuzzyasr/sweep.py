"""Exhaustive grid evaluation of a FIS response surface."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .fuzzy_core import DEFAULT_RESOLUTION, FisDefinition, infer_batch

CHUNK = 8192
FIELDS = ("env", "win", "overlap", "accuracy", "fired")

# Published parameter steps; the environment axis has no published step.
COARSE_AXES = {"env": (10.0, 50.0, 5.0), "win": (240.0, 270.0, 10.0), "overlap": (20.0, 60.0, 5.0)}
# Window and overlap enumeration of the first result table.
TABLE_AXES = {"env": (10.0, 50.0, 5.0), "win": (240.0, 270.0, 5.0), "overlap": (20.0, 60.0, 5.0)}
FINE_AXES = {"env": (10.0, 50.0, 1.0), "win": (240.0, 270.0, 1.0), "overlap": (20.0, 60.0, 0.5)}


class SweepError(ValueError):
    pass


class EmptyRegionError(SweepError):
    pass


@dataclass(frozen=True)
class SweepGrid:
    env_axis: tuple[float, ...]
    win_axis: tuple[float, ...]
    overlap_axis: tuple[float, ...]

    def __post_init__(self):
        for name in ("env_axis", "win_axis", "overlap_axis"):
            axis = tuple(float(v) for v in getattr(self, name))
            if not axis:
                raise SweepError(f"{name} is empty")
            if any(b <= a for a, b in zip(axis, axis[1:])):
                raise SweepError(f"{name} must be strictly increasing")
            object.__setattr__(self, name, axis)

    @property
    def shape(self) -> tuple[int, int, int]:
        return len(self.env_axis), len(self.win_axis), len(self.overlap_axis)

    def cells(self) -> np.ndarray:
        """All (env, win, overlap) triples in lexicographic order."""
        e, w, o = np.meshgrid(self.env_axis, self.win_axis, self.overlap_axis, indexing="ij")
        return np.column_stack([e.ravel(), w.ravel(), o.ravel()])


@dataclass(frozen=True)
class SurfacePoint:
    env: float
    win: float
    overlap: float
    accuracy: float
    fired: bool

    @property
    def key(self) -> tuple[float, float, float]:
        return self.env, self.win, self.overlap


@dataclass(frozen=True)
class FeasibleRegion:
    env_range: tuple[float, float]
    win_range: tuple[float, float]
    overlap_range: tuple[float, float]
    threshold: float

    def contains(self, point: SurfacePoint) -> bool:
        return all(lo <= v <= hi for v, (lo, hi) in zip(
            point.key, (self.env_range, self.win_range, self.overlap_range)))

    def to_dict(self) -> dict:
        return asdict(self)


def axis(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive arithmetic progression from ``lo`` towards ``hi``."""
    if not step > 0:
        raise SweepError(f"axis step must be positive, got {step}")
    if lo > hi:
        raise SweepError(f"axis bounds inverted: {lo} > {hi}")
    span = (hi - lo) / step
    n = int(math.floor(span + 1e-9))
    values = [lo + i * step for i in range(n + 1)]
    if abs(span - round(span)) <= 1e-9:
        values[-1] = float(hi)
    return values


def build_grid(env, win, overlap) -> SweepGrid:
    """Grid from three ``(lo, hi, step)`` triples."""
    return SweepGrid(tuple(axis(*env)), tuple(axis(*win)), tuple(axis(*overlap)))


def coarse_grid() -> SweepGrid:
    return build_grid(COARSE_AXES["env"], COARSE_AXES["win"], COARSE_AXES["overlap"])


def table_grid() -> SweepGrid:
    return build_grid(TABLE_AXES["env"], TABLE_AXES["win"], TABLE_AXES["overlap"])


def fine_grid() -> SweepGrid:
    return build_grid(FINE_AXES["env"], FINE_AXES["win"], FINE_AXES["overlap"])


def evaluate_surface(
    fis: FisDefinition,
    grid: SweepGrid,
    resolution: int = DEFAULT_RESOLUTION,
    n_jobs: int = 1,
    chunk: int = CHUNK,
) -> list[SurfacePoint]:
    """Crisp FIS output at every grid cell, in (env, win, overlap) order.

    Cells are processed in fixed-size chunks, so the result does not depend
    on ``n_jobs``.
    """
    if len(fis.inputs) != 3:
        raise SweepError(f"surface sweeps need a 3-input FIS, got {len(fis.inputs)} inputs")
    if chunk < 1:
        raise SweepError(f"chunk size must be positive, got {chunk}")
    cells = grid.cells()
    chunks = [cells[i : i + chunk] for i in range(0, len(cells), chunk)]

    def run(chunk):
        return infer_batch(fis, chunk, resolution)

    if n_jobs == 1 or len(chunks) == 1:
        results = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as pool:
            results = list(pool.map(run, chunks))
    crisp = np.concatenate([r[0] for r in results])
    fired = np.concatenate([r[1] for r in results])
    return [
        SurfacePoint(float(e), float(w), float(o), float(a), bool(f))
        for (e, w, o), a, f in zip(cells.tolist(), crisp.tolist(), fired.tolist())
    ]


def argmax(points) -> SurfacePoint:
    """Highest-accuracy point; ties go to the smallest (env, win, overlap)."""
    points = list(points)
    if not points:
        raise SweepError("argmax of an empty surface")
    return min(points, key=lambda p: (-p.accuracy, p.key))


def feasible_region(points, threshold: float) -> FeasibleRegion:
    """Bounding box of every point whose accuracy reaches ``threshold``."""
    points = list(points)
    if not points:
        raise SweepError("feasible region of an empty surface")
    good = [p for p in points if p.accuracy >= threshold]
    if not good:
        raise EmptyRegionError(f"no point reaches accuracy {threshold}")

    def span(values):
        values = list(values)
        return min(values), max(values)

    return FeasibleRegion(
        env_range=span(p.env for p in good),
        win_range=span(p.win for p in good),
        overlap_range=span(p.overlap for p in good),
        threshold=float(threshold),
    )


def percentile_threshold(points, q: float = 90.0) -> float:
    return float(np.percentile([p.accuracy for p in points], q))


def surface_to_csv(points, fh=None) -> str | None:
    """Write ``env,win,overlap,accuracy,fired`` rows; returns text if ``fh`` is None."""
    buf = io.StringIO() if fh is None else fh
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIELDS)
    for p in points:
        writer.writerow([repr(p.env), repr(p.win), repr(p.overlap), repr(p.accuracy), str(p.fired).lower()])
    return buf.getvalue() if fh is None else None


def surface_to_json(points) -> str:
    return json.dumps([asdict(p) for p in points], indent=1)


def surface_from_csv(text: str) -> list[SurfacePoint]:
    rows = csv.DictReader(io.StringIO(text))
    if tuple(rows.fieldnames or ()) != FIELDS:
        raise SweepError(f"surface CSV header must be {','.join(FIELDS)}")
    return [
        SurfacePoint(float(r["env"]), float(r["win"]), float(r["overlap"]), float(r["accuracy"]),
                     r["fired"] == "true")
        for r in rows
    ]


def surface_from_json(text: str) -> list[SurfacePoint]:
    return [SurfacePoint(**{k: d[k] for k in FIELDS}) for d in json.loads(text)]
