"""Scalar fields on uniform 2D grids: loading, normalization, synthesis.

Grid convention: ``values[row, col]``; row 0 / col 0 sit at the lower-left
corner of the unit square, so a vertex maps to normalized coordinates
``x = col / (cols - 1)`` and ``y = row / (rows - 1)``.

Noise is drawn from NumPy's ``PCG64`` bit generator, whose output stream is
specified and platform independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "ScalarField",
    "FieldError",
    "FieldParseError",
    "load_field",
    "save_field",
    "normalize_field",
    "grid_coordinates",
    "gen_sine_mixture",
    "gen_gaussian_mixture",
    "euclidean_scalar_distance",
]


class FieldError(ValueError):
    """Invalid scalar field or generator parameters."""


class FieldParseError(FieldError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Immutable rows x cols grid of finite real values."""

    values: np.ndarray
    domain_extent: tuple[float, float] = (1.0, 1.0)
    name: str = ""
    value_range: tuple[float, float] = field(init=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise FieldError("field values must be a 2D array")
        if arr.shape[0] < 2 or arr.shape[1] < 2:
            raise FieldError("grid must be at least 2x2")
        if not np.all(np.isfinite(arr)):
            raise FieldError("field contains NaN or infinite values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "value_range", (float(arr.min()), float(arr.max())))

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def with_values(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(values, domain_extent=self.domain_extent, name=self.name)


def _parse_number(token: str, line: int, row: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise FieldParseError(f"row {row}: non-numeric token {token!r}", line) from None
    if not math.isfinite(value):
        raise FieldParseError(f"row {row}: non-finite value {token!r}", line)
    return value


def load_field(path, format: str = "plain-text") -> ScalarField:
    """Read a grid from disk.

    ``plain-text``: a ``rows cols`` header line followed by ``rows`` lines of
    whitespace separated values. ``csv``: comma separated rows, no header.
    Row numbers in error messages count data rows from 1; line numbers count
    physical lines of the file.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    if format in ("plain-text", "txt", "text"):
        rows_data = _parse_plain(lines)
    elif format == "csv":
        rows_data = _parse_csv(lines)
    else:
        raise FieldError(f"unknown field format {format!r}")
    if len(rows_data) < 2 or len(rows_data[0]) < 2:
        raise FieldParseError("grid must be at least 2x2")
    return ScalarField(np.array(rows_data), name=path.stem)


def _parse_plain(lines: list[str]) -> list[list[float]]:
    content = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not content:
        raise FieldParseError("empty file", 1)
    lineno, header = content[0]
    parts = header.split()
    if len(parts) != 2:
        raise FieldParseError("malformed header, expected 'rows cols'", lineno)
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        raise FieldParseError("malformed header, expected 'rows cols'", lineno) from None
    if rows < 2 or cols < 2:
        raise FieldParseError("grid must be at least 2x2", lineno)
    body = content[1:]
    if len(body) != rows:
        raise FieldParseError(f"expected {rows} data rows, found {len(body)}", lineno)
    out = []
    for r, (lineno, ln) in enumerate(body, start=1):
        tokens = ln.split()
        if len(tokens) != cols:
            raise FieldParseError(f"row {r} has {len(tokens)} values, expected {cols}", lineno)
        out.append([_parse_number(t, lineno, r) for t in tokens])
    return out


def _parse_csv(lines: list[str]) -> list[list[float]]:
    out = []
    width = None
    r = 0
    for i, ln in enumerate(lines):
        if not ln.strip():
            continue
        r += 1
        tokens = [t.strip() for t in ln.split(",")]
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise FieldParseError(f"row {r} has {len(tokens)} values, expected {width}", i + 1)
        out.append([_parse_number(t, i + 1, r) for t in tokens])
    if len(out) < 2 or (width or 0) < 2:
        raise FieldParseError("grid must be at least 2x2")
    return out


def save_field(f: ScalarField, path, format: str = "plain-text") -> None:
    """Write a field so that :func:`load_field` reads back identical values."""
    path = Path(path)
    rows = [[repr(float(v)) for v in row] for row in f.values]
    if format == "csv":
        text = "\n".join(",".join(r) for r in rows) + "\n"
    else:
        text = f"{f.rows} {f.cols}\n" + "\n".join(" ".join(r) for r in rows) + "\n"
    path.write_text(text)


def normalize_field(f: ScalarField) -> ScalarField:
    """Affinely rescale values to exactly [0, 1]."""
    lo, hi = f.value_range
    if not hi > lo:
        raise FieldError("degenerate constant field")
    if lo == 0.0 and hi == 1.0:
        return f
    out = (f.values - lo) / (hi - lo)
    # guard the endpoints against rounding in the division
    out[f.values == lo] = 0.0
    out[f.values == hi] = 1.0
    return f.with_values(out)


def grid_coordinates(rows: int, cols: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (u, v) arrays of shape (rows, cols) with u along cols, v along rows."""
    u = np.linspace(0.0, 1.0, cols)
    v = np.linspace(0.0, 1.0, rows)
    return np.meshgrid(u, v)


def _noise(rows: int, cols: int, amp: float, seed: int) -> np.ndarray:
    if amp == 0:
        return np.zeros((rows, cols))
    rng = np.random.Generator(np.random.PCG64(seed))
    return amp * rng.uniform(-1.0, 1.0, size=(rows, cols))


def gen_sine_mixture(
    rows: int,
    cols: int,
    freq1: Sequence[float],
    freq2: Sequence[float],
    noise_amp: float = 0.0,
    seed: int = 0,
) -> ScalarField:
    """Sum of two planar sine waves plus optional uniform noise.

    ``sin(2 pi (fx1 u + fy1 v)) + sin(2 pi (fx2 u + fy2 v)) + noise_amp * eta``
    with eta i.i.d. uniform on [-1, 1].
    """
    if noise_amp < 0:
        raise FieldError("noise_amp must be non-negative")
    u, v = grid_coordinates(rows, cols)
    (fx1, fy1), (fx2, fy2) = freq1, freq2
    vals = np.sin(2 * np.pi * (fx1 * u + fy1 * v)) + np.sin(2 * np.pi * (fx2 * u + fy2 * v))
    vals = vals + _noise(rows, cols, noise_amp, seed)
    return ScalarField(vals, name="sine")


def gen_gaussian_mixture(
    rows: int,
    cols: int,
    components,
    rotation_angle: float = 0.0,
    noise_amp: float = 0.0,
    seed: int = 0,
) -> ScalarField:
    """Sum of isotropic Gaussian bumps with centers rotated about (0.5, 0.5).

    ``components`` is a sequence of ``(center, sigma, amplitude)`` with
    ``center = (u, v)`` in the unit square.
    """
    components = list(components)
    if not components:
        raise FieldError("at least one Gaussian component is required")
    if noise_amp < 0:
        raise FieldError("noise_amp must be non-negative")
    theta = math.fmod(rotation_angle, 2 * math.pi)
    if theta < 0:
        theta += 2 * math.pi
    c, s = math.cos(theta), math.sin(theta)
    u, v = grid_coordinates(rows, cols)
    vals = np.zeros((rows, cols))
    for center, sigma, amplitude in components:
        cu, cv = float(center[0]), float(center[1])
        if not (0.0 <= cu <= 1.0 and 0.0 <= cv <= 1.0):
            raise FieldError(f"component center {center} outside the unit square")
        if sigma <= 0:
            raise FieldError("Gaussian bandwidth must be positive")
        du, dv = cu - 0.5, cv - 0.5
        ru, rv = 0.5 + c * du - s * dv, 0.5 + s * du + c * dv
        vals += amplitude * np.exp(-((u - ru) ** 2 + (v - rv) ** 2) / (2 * sigma**2))
    vals = vals + _noise(rows, cols, noise_amp, seed)
    return ScalarField(vals, name="gaussians")


def euclidean_scalar_distance(f1: ScalarField, f2: ScalarField) -> float:
    """Frobenius norm of the difference of two equally sized grids."""
    if f1.shape != f2.shape:
        raise FieldError(f"dimension mismatch: {f1.shape} vs {f2.shape}")
    return float(np.linalg.norm(f1.values - f2.values))
