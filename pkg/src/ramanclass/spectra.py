"""Spectrum data model and ingestion.

A spectrum is an intensity vector on a fixed, strictly increasing
wavenumber grid, carrying a class label and a provenance tag. Sets of
spectra share one grid. All objects are immutable after construction,
so they are safe to share between concurrent readers.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DegenerateSpectrumError,
    FormatError,
    GridMismatchError,
    LabelError,
    OutOfRangeError,
    ParseError,
    ShapeError,
)

PRINCIPAL_GRID_LENGTH = 2473
MODEL_INPUT_WIDTH = 2470


class Label(enum.Enum):
    POSITIVE = "pos"
    NEGATIVE = "neg"
    UNLABELED = "unk"

    @classmethod
    def from_token(cls, token: str) -> "Label":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise ParseError(f"unknown label token {token!r}") from None


class Source(enum.Enum):
    REAL = "real"
    BLENDED = "blended"
    VAE_GENERATED = "vae"
    OUTLIER_CORPUS = "outlier"

    @classmethod
    def from_token(cls, token: str) -> "Source":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise ParseError(f"unknown source token {token!r}") from None


def _readonly(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class WavenumberGrid:
    """Strictly increasing wavenumber axis (cm^-1)."""

    __slots__ = ("values",)

    def __init__(self, values):
        arr = _readonly(values)
        if arr.ndim != 1 or arr.size < 2:
            raise FormatError("grid needs at least 2 wavenumbers")
        if not np.all(np.isfinite(arr)):
            raise FormatError("grid contains non-finite wavenumbers")
        if not np.all(np.diff(arr) > 0):
            raise FormatError("grid wavenumbers must be strictly increasing")
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("WavenumberGrid is immutable")

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WavenumberGrid):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.values.size, float(self.values[0]), float(self.values[-1])))

    def __repr__(self):
        return f"WavenumberGrid(n={len(self)}, {self.values[0]:g}..{self.values[-1]:g})"

    def truncated(self, width: int) -> "WavenumberGrid":
        if width > len(self):
            raise ShapeError(f"cannot truncate grid of length {len(self)} to {width}")
        return WavenumberGrid(self.values[:width])


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One sample: intensities on a grid plus label and provenance."""

    grid: WavenumberGrid
    intensities: np.ndarray
    label: Label = Label.UNLABELED
    source: Source = Source.REAL

    def __post_init__(self):
        arr = _readonly(self.intensities)
        if arr.ndim != 1:
            raise ShapeError("intensities must be a 1-d vector")
        if arr.size != len(self.grid):
            raise ShapeError(
                f"intensity vector of length {arr.size} does not match grid of length {len(self.grid)}"
            )
        if not np.all(np.isfinite(arr)):
            raise FormatError("intensities contain non-finite values")
        object.__setattr__(self, "intensities", arr)

    def __len__(self) -> int:
        return int(self.intensities.size)

    def with_label(self, label: Label) -> "Spectrum":
        return replace(self, label=label)


class SpectraSet:
    """Collection of spectra sharing a single wavenumber grid."""

    def __init__(self, spectra: Sequence[Spectrum], grid: WavenumberGrid | None = None):
        spectra = tuple(spectra)
        if grid is None:
            if not spectra:
                raise ShapeError("empty SpectraSet needs an explicit grid")
            grid = spectra[0].grid
        for i, s in enumerate(spectra):
            if not (s.grid is grid or s.grid == grid):
                raise GridMismatchError(f"spectrum {i} is on a different grid")
        self.spectra = spectra
        self.grid = grid
        self._matrix: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.spectra)

    def __iter__(self) -> Iterator[Spectrum]:
        return iter(self.spectra)

    def __getitem__(self, i: int) -> Spectrum:
        return self.spectra[i]

    def matrix(self) -> np.ndarray:
        """Stacked (n, grid length) intensity matrix; cached, read-only."""
        if self._matrix is None:
            m = np.stack([s.intensities for s in self.spectra]) if self.spectra else np.empty((0, len(self.grid)))
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    def labels(self) -> list[Label]:
        return [s.label for s in self.spectra]

    def targets(self) -> np.ndarray:
        """Binary targets: positive -> 1, negative -> 0."""
        out = np.empty(len(self), dtype=float)
        for i, s in enumerate(self.spectra):
            if s.label is Label.UNLABELED:
                raise LabelError(f"spectrum {i} is unlabeled")
            out[i] = 1.0 if s.label is Label.POSITIVE else 0.0
        return out

    def counts(self) -> tuple[int, int]:
        """(n_positive, n_negative); unlabeled spectra are not counted."""
        labels = self.labels()
        return labels.count(Label.POSITIVE), labels.count(Label.NEGATIVE)

    def subset(self, indices: Iterable[int]) -> "SpectraSet":
        return SpectraSet([self.spectra[i] for i in indices], grid=self.grid)

    def filter_label(self, label: Label) -> "SpectraSet":
        return SpectraSet([s for s in self.spectra if s.label is label], grid=self.grid)

    def positives(self) -> "SpectraSet":
        return self.filter_label(Label.POSITIVE)

    def negatives(self) -> "SpectraSet":
        return self.filter_label(Label.NEGATIVE)

    def __repr__(self):
        pos, neg = self.counts()
        return f"SpectraSet(n={len(self)}, pos={pos}, neg={neg}, grid_len={len(self.grid)})"


def concat_sets(*sets: SpectraSet) -> SpectraSet:
    sets = [s for s in sets if s is not None]
    if not sets:
        raise ShapeError("nothing to concatenate")
    grid = sets[0].grid
    spectra: list[Spectrum] = []
    for s in sets:
        if s.grid != grid:
            raise GridMismatchError("cannot concatenate sets on different grids")
        spectra.extend(s.spectra)
    return SpectraSet(spectra, grid=grid)


def min_max_normalize(s: Spectrum) -> Spectrum:
    """Affine map of intensities onto [0, 1]; min -> 0, max -> 1."""
    lo = float(np.min(s.intensities))
    hi = float(np.max(s.intensities))
    if hi <= lo:
        raise DegenerateSpectrumError("constant spectrum cannot be min-max normalized")
    return replace(s, intensities=(s.intensities - lo) / (hi - lo))


def resample_to_grid(s: Spectrum, target: WavenumberGrid) -> Spectrum:
    """Linear interpolation of a spectrum onto another grid.

    Every target wavenumber must lie inside the source support; there is
    no extrapolation. Values at coinciding wavenumbers are preserved.
    """
    src = s.grid.values
    if target.values[0] < src[0] or target.values[-1] > src[-1]:
        raise OutOfRangeError(
            f"target grid [{target.values[0]:g}, {target.values[-1]:g}] exceeds "
            f"source support [{src[0]:g}, {src[-1]:g}]"
        )
    values = np.interp(target.values, src, s.intensities)
    return Spectrum(grid=target, intensities=values, label=s.label, source=s.source)


def truncate_for_model(s: Spectrum, width: int = MODEL_INPUT_WIDTH) -> Spectrum:
    """First `width` intensity values, so receptive fields tile exactly."""
    if len(s) < width:
        raise ShapeError(f"spectrum of length {len(s)} is shorter than model width {width}")
    if len(s) == width:
        return s
    return Spectrum(
        grid=s.grid.truncated(width),
        intensities=s.intensities[:width],
        label=s.label,
        source=s.source,
    )


def truncate_set(sset: SpectraSet, width: int = MODEL_INPUT_WIDTH) -> SpectraSet:
    if len(sset.grid) == width:
        return sset
    grid = sset.grid.truncated(width)
    return SpectraSet([truncate_for_model(s, width) for s in sset], grid=grid)


def load_spectra(
    path,
    normalize: bool = False,
    default_source: Source = Source.REAL,
) -> SpectraSet:
    """Read a spectra CSV.

    Expected header: ``label,<w1>,<w2>,...`` with wavenumbers as column
    names, optionally ``label,source,<w1>,...``. Each data row starts
    with a label token (``pos``/``neg``/``unk``) followed by one
    intensity per wavenumber. Row numbers in error messages count data
    rows from 1.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path.name}: empty file") from None
        if not header or header[0].strip().lower() != "label":
            raise FormatError(f"{path.name}: first header column must be 'label'")
        has_source = len(header) > 1 and header[1].strip().lower() == "source"
        first_value_col = 2 if has_source else 1
        try:
            grid_values = [float(tok) for tok in header[first_value_col:]]
        except ValueError as exc:
            raise FormatError(f"{path.name}: non-numeric wavenumber in header: {exc}") from None
        grid = WavenumberGrid(grid_values)

        spectra: list[Spectrum] = []
        n_cols = len(header)
        for row_no, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != n_cols:
                raise ParseError(
                    f"{path.name}: row {row_no}: expected {n_cols} fields, got {len(row)}"
                )
            try:
                label = Label.from_token(row[0])
                source = Source.from_token(row[1]) if has_source else default_source
            except ParseError as exc:
                raise ParseError(f"{path.name}: row {row_no}: {exc}") from None
            try:
                values = np.array(row[first_value_col:], dtype=float)
            except ValueError:
                raise ParseError(f"{path.name}: row {row_no}: non-numeric intensity value") from None
            if not np.all(np.isfinite(values)):
                raise ParseError(f"{path.name}: row {row_no}: non-finite intensity value")
            spectrum = Spectrum(grid=grid, intensities=values, label=label, source=source)
            if normalize:
                try:
                    spectrum = min_max_normalize(spectrum)
                except DegenerateSpectrumError:
                    raise DegenerateSpectrumError(
                        f"{path.name}: row {row_no}: constant spectrum cannot be normalized"
                    ) from None
            spectra.append(spectrum)
    if not spectra:
        raise ParseError(f"{path.name}: no spectra rows")
    return SpectraSet(spectra, grid=grid)


def save_spectra(sset: SpectraSet, path, include_source: bool = False) -> None:
    """Write a SpectraSet in the spectra CSV format."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["label"] + (["source"] if include_source else [])
        header += [repr(float(w)) for w in sset.grid.values]
        writer.writerow(header)
        for s in sset:
            row = [s.label.value] + ([s.source.value] if include_source else [])
            row += [repr(float(v)) for v in s.intensities]
            writer.writerow(row)
