"""Tabulated dispersive refractive index of the particle material.

File format: UTF-8 text, ``#`` comments, whitespace-separated columns
``wavelength_nm  n  k`` with strictly increasing wavelengths.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

MATERIAL_DIR_ENV = "HELSCAT_MATERIAL_DIR"
DEFAULT_MATERIAL = "silicon.txt"


class MaterialError(ValueError):
    """Malformed, missing or out-of-range material data."""


@dataclass(frozen=True, eq=False)
class RefractiveIndexTable:
    wavelength_nm: np.ndarray
    n: np.ndarray
    k: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        lam = np.asarray(self.wavelength_nm, dtype=float)
        n = np.asarray(self.n, dtype=float)
        k = np.asarray(self.k, dtype=float)
        if not (lam.shape == n.shape == k.shape) or lam.ndim != 1:
            raise MaterialError("wavelength, n and k must be 1-D of equal length")
        if lam.size < 2:
            raise MaterialError("a table needs at least 2 rows")
        bad = np.nonzero(np.diff(lam) <= 0)[0]
        if bad.size:
            raise MaterialError(
                f"wavelengths must be strictly increasing (row {bad[0] + 2}: "
                f"{lam[bad[0] + 1]} after {lam[bad[0]]})"
            )
        if np.any(k < 0):
            raise MaterialError("k must be >= 0 (passive material)")
        for arr in (lam, n, k):
            arr.setflags(write=False)
        object.__setattr__(self, "wavelength_nm", lam)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)

    def __len__(self):
        return self.wavelength_nm.size

    @property
    def wavelength_range(self) -> tuple[float, float]:
        return float(self.wavelength_nm[0]), float(self.wavelength_nm[-1])


def load_table(path) -> RefractiveIndexTable:
    """Read and validate a material file."""
    path = Path(path)
    if not path.is_file():
        raise MaterialError(f"material file not found: {path}")
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 3:
                raise MaterialError(f"{path}:{lineno}: expected 3 columns, got {len(parts)}")
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError as exc:
                raise MaterialError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise MaterialError(f"{path}: no data rows")
    data = np.array(rows)
    return RefractiveIndexTable(data[:, 0], data[:, 1], data[:, 2], source_label=str(path))


def bundled_path(name: str = DEFAULT_MATERIAL) -> Path:
    return Path(str(resources.files("helscat") / "data" / name))


def resolve_material(spec=None) -> Path:
    """Locate a material file.

    An existing path wins; otherwise the name is looked up in the
    directories of ``$HELSCAT_MATERIAL_DIR`` (``os.pathsep`` separated) and
    finally among the bundled tables.
    """
    if spec is None:
        return bundled_path()
    candidate = Path(spec)
    if candidate.is_file():
        return candidate
    for directory in filter(None, os.environ.get(MATERIAL_DIR_ENV, "").split(os.pathsep)):
        found = Path(directory) / spec
        if found.is_file():
            return found
    found = bundled_path(str(spec))
    if found.is_file():
        return found
    raise MaterialError(f"material file not found: {spec}")


def load_silicon() -> RefractiveIndexTable:
    return load_table(bundled_path())


def refractive_index(table: RefractiveIndexTable, wavelength_nm):
    """Complex index ``n + i k``, linearly interpolated in wavelength.

    Raises
    ------
    MaterialError
        For any wavelength outside the tabulated range (no extrapolation).
    """
    lam = np.asarray(wavelength_nm, dtype=float)
    lo, hi = table.wavelength_range
    if np.any(lam < lo) or np.any(lam > hi) or not np.all(np.isfinite(lam)):
        raise MaterialError(f"wavelength {wavelength_nm} nm outside table range [{lo}, {hi}] nm")
    n = np.interp(lam, table.wavelength_nm, table.n)
    k = np.interp(lam, table.wavelength_nm, table.k)
    out = n + 1j * k
    return complex(out) if out.ndim == 0 else out


def permittivity(table: RefractiveIndexTable, wavelength_nm):
    return refractive_index(table, wavelength_nm) ** 2
