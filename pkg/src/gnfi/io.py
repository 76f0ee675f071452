"""Binary field dumps and surface CSV files.

Dump layout (little endian)::

    offset  size  field
    0       5     tag b"GNFI1"
    5       3     padding (zero)
    8       4     N1 (uint32)
    12      4     N2 (uint32)
    16      8     period1 (float64)
    24      8     period2 (float64)
    32      8     z-plane (float64)
    40      4     component j (int32)
    44      4     side (int32; 0 reflection, 1 transmission)
    48      16*N1*N2  payload, (re, im) float64 pairs, row-major over (i, j)
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DumpFormatError
from .spectral import ComplexGrid, PeriodicGrid

__all__ = ["FieldDump", "write_dump", "read_dump", "write_surface_csv", "read_surface_csv"]

MAGIC = b"GNFI1"
HEADER = struct.Struct("<5sxxxIIdddii")
SIDE_CODES = {"reflection": 0, "transmission": 1}
SIDE_NAMES = {v: k for k, v in SIDE_CODES.items()}


@dataclass(frozen=True)
class FieldDump:
    field: ComplexGrid
    z: float
    component: int
    side: str

    def __post_init__(self):
        if self.side not in SIDE_CODES:
            raise DumpFormatError(f"side must be reflection or transmission, got {self.side!r}")
        if self.component not in (1, 2, 3):
            raise DumpFormatError(f"component must be 1, 2 or 3, got {self.component}")

    @property
    def grid(self):
        return self.field.grid

    def to_bytes(self) -> bytes:
        g = self.grid
        head = HEADER.pack(MAGIC, g.n1, g.n2, g.period1, g.period2, float(self.z),
                           int(self.component), SIDE_CODES[self.side])
        payload = np.ascontiguousarray(self.field.values, dtype="<c16").tobytes()
        return head + payload

    @classmethod
    def from_bytes(cls, raw: bytes) -> "FieldDump":
        if len(raw) < HEADER.size:
            raise DumpFormatError(f"dump too short for header ({len(raw)} bytes)")
        tag, n1, n2, p1, p2, z, comp, side = HEADER.unpack_from(raw)
        if tag != MAGIC:
            raise DumpFormatError(f"bad format tag {tag!r}, expected {MAGIC!r}")
        if side not in SIDE_NAMES:
            raise DumpFormatError(f"bad side code {side}")
        expected = 16 * n1 * n2
        body = raw[HEADER.size:]
        if len(body) != expected:
            raise DumpFormatError(f"payload has {len(body)} bytes, expected {expected}")
        vals = np.frombuffer(body, dtype="<c16").reshape(n1, n2)
        grid = PeriodicGrid(p1, p2, n1, n2)
        return cls(ComplexGrid(grid, vals), z, comp, SIDE_NAMES[side])


def write_dump(path, dump: FieldDump):
    Path(path).write_bytes(dump.to_bytes())


def read_dump(path) -> FieldDump:
    return FieldDump.from_bytes(Path(path).read_bytes())


def write_surface_csv(path, surface: ComplexGrid):
    """Columns ``x, y, phi`` (real part), one row per node, row-major."""
    X, Y = surface.grid.nodes()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "phi"])
        for x, y, v in zip(X.ravel(), Y.ravel(), surface.values.real.ravel()):
            w.writerow([repr(float(x)), repr(float(y)), repr(float(v))])


def read_surface_csv(path, grid: PeriodicGrid) -> ComplexGrid:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape != (grid.size, 3):
        raise DumpFormatError(f"surface CSV has shape {data.shape}, expected ({grid.size}, 3)")
    return ComplexGrid(grid, data[:, 2].reshape(grid.shape).astype(complex))
