"""
On-disk formats.

State documents are JSON objects

    {"label": "singlet", "amplitudes": [[0, 0], [0.7071, 0], [-0.7071, 0], [0, 0]]}

with one [re, im] pair per basis state |00>, |01>, |10>, |11>. They are parsed
with orjson and validated by the ``StateDocument`` pydantic model. Grid
documents are comma-separated text with a mandatory header row.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Annotated, NamedTuple

import numpy as np
import numpy.typing as npt
import orjson
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, model_validator

from entangle_sphere.entangle import TwoQubitState
from entangle_sphere.errors import SphereModelError
from entangle_sphere.measurement import GRID_COLUMNS, DeformationGrid

DOCUMENT_NORM_TOL = 1e-9

ComplexPair = tuple[FiniteFloat, FiniteFloat]


class StateDocument(BaseModel):
    """A pure two-spin state as stored in a state file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    amplitudes: Annotated[list[ComplexPair], Field(min_length=4, max_length=4)]
    label: str | None = None
    normalize: bool = False

    @model_validator(mode="after")
    def _check_norm(self) -> StateDocument:
        norm2 = math.fsum(re * re + im * im for re, im in self.amplitudes)
        if norm2 == 0.0:
            raise ValueError("amplitudes must not all be zero")
        if not self.normalize and abs(norm2 - 1.0) > DOCUMENT_NORM_TOL:
            raise ValueError(f"amplitudes must have unit norm (got squared norm {norm2!r}); set normalize to rescale")
        return self

    @property
    def vector(self) -> npt.NDArray[np.complex128]:
        return np.array([complex(re, im) for re, im in self.amplitudes], dtype=np.complex128)

    def to_state(self) -> TwoQubitState:
        # documents within DOCUMENT_NORM_TOL of unit norm are rescaled exactly
        return TwoQubitState.normalized(self.vector)

    @classmethod
    def from_state(cls, psi: TwoQubitState, label: str | None = None) -> StateDocument:
        amplitudes = [(float(a.real), float(a.imag)) for a in psi.vector]
        return cls(amplitudes=amplitudes, label=label)

    @classmethod
    def load(cls, path: Path | str, normalize: bool = False) -> StateDocument:
        data = orjson.loads(Path(path).read_bytes())
        if normalize and isinstance(data, dict):
            data["normalize"] = True
        return cls.model_validate(data)

    def dump(self, path: Path | str) -> None:
        payload = self.model_dump(exclude_none=True, exclude_defaults=False)
        Path(path).write_bytes(orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE))


class GridTable(NamedTuple):
    columns: tuple[str, ...]
    rows: npt.NDArray[np.float64]

    def column(self, name: str) -> npt.NDArray[np.float64]:
        return self.rows[:, self.columns.index(name)]


def write_grid(path: Path | str, grid: DeformationGrid) -> None:
    """17 significant digits per value; degenerate rows are written as nan."""
    np.savetxt(path, grid.rows, fmt="%.17g", delimiter=",", header=",".join(grid.columns), comments="")


def read_grid(path: Path | str) -> GridTable:
    path = Path(path)
    with path.open() as handle:
        header = tuple(handle.readline().strip().split(","))
    if header != GRID_COLUMNS:
        raise SphereModelError(f"{path}: grid header must be {','.join(GRID_COLUMNS)}, got {','.join(header)}")
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return GridTable(header, rows)
