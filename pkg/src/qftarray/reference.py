"""Classical reference: zero-padded DFT array factor and power pattern.

Sample ``m`` of a size-M transform looks in direction
``u_m = -m * lambda / (M * d)``.  The array factor is periodic in ``u`` with
period ``lambda / d``, so the M samples are wrapped into the centred interval
``[-lambda/(2d), lambda/(2d))`` (``[-1, 1)`` at half-wavelength spacing) and
sorted.  That permutation, the *display order*, is stored on every
:class:`PatternSamples` so QFT histograms and DFT patterns line up index by
index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from os import PathLike
from typing import IO

import numpy as np

from .errors import DomainError, NullNotFoundError, ParameterError, SizingError
from .excitations import ExcitationSet

__all__ = [
    "GridSpec",
    "PatternSamples",
    "DB_FLOOR",
    "display_order",
    "u_grid",
    "dft_array_factor",
    "power_pattern",
    "periodic_sinc",
    "interpolate",
    "find_mainlobe_nulls",
    "to_db",
    "write_pattern_csv",
]

DB_FLOOR = -120.0


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Array size N, sample count M (a power of two) and spacing d/lambda."""

    n_elements: int
    n_samples: int
    spacing: float = 0.5

    def __post_init__(self):
        if self.n_elements < 1:
            raise ParameterError(f"n_elements must be >= 1, got {self.n_elements}")
        if not _is_power_of_two(self.n_samples):
            raise ParameterError(f"n_samples must be a power of two, got {self.n_samples}")
        if self.n_samples < self.n_elements:
            raise SizingError(
                f"M={self.n_samples} samples cannot hold N={self.n_elements} excitations"
            )
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise ParameterError(f"spacing must be positive (in wavelengths), got {self.spacing}")

    @property
    def n_qubits(self) -> int:
        return self.n_samples.bit_length() - 1


def display_order(n_samples: int, spacing: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Ascending direction cosines and the natural index behind each one.

    Returns ``(u, order)`` with ``u[i]`` the direction of transform bin
    ``order[i]``.  Integer arithmetic keeps the wrap exact.
    """
    m = int(n_samples)
    i = np.arange(m)
    k = i - m // 2
    order = np.mod(-k, m)
    u = k / (m * spacing)
    return u, order


def u_grid(grid: GridSpec) -> np.ndarray:
    return display_order(grid.n_samples, grid.spacing)[0]


@dataclass(frozen=True, eq=False)
class PatternSamples:
    """M power-pattern samples in display order.

    ``order[i]`` is the transform bin (basis state) shown at position ``i``.
    ``p_max`` is the peak of the raw pattern, whether or not ``values`` have
    been divided by it yet.
    """

    values: np.ndarray
    u_grid: np.ndarray
    order: np.ndarray
    p_max: float
    is_normalized: bool = False

    def __post_init__(self):
        for name in ("values", "u_grid", "order"):
            arr = np.array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        m = self.values.size
        if self.u_grid.size != m or self.order.size != m:
            raise ParameterError("values, u_grid and order must share one length")
        if not _is_power_of_two(m):
            raise ParameterError(f"pattern length must be a power of two, got {m}")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ParameterError("pattern values must be finite and non-negative")

    @classmethod
    def from_natural(cls, values, spacing: float = 0.5, normalize: bool = False) -> "PatternSamples":
        """Build from values indexed by transform bin ``m``."""
        values = np.asarray(values, dtype=np.float64)
        u, order = display_order(values.size, spacing)
        shown = values[order]
        peak = float(shown.max()) if shown.size else 0.0
        pattern = cls(shown, u, order, peak, False)
        return pattern.normalized() if normalize else pattern

    def __len__(self):
        return int(self.values.size)

    @property
    def m_peak(self) -> int:
        return int(np.argmax(self.values))

    def normalized(self) -> "PatternSamples":
        if self.is_normalized:
            return self
        peak = float(self.values.max())
        if peak <= 0:
            raise ParameterError("cannot normalize an all-zero pattern")
        return replace(self, values=self.values / peak, p_max=peak, is_normalized=True)

    def natural(self) -> np.ndarray:
        """Values re-indexed by transform bin."""
        out = np.empty_like(self.values)
        out[self.order] = self.values
        return out

    def nulls(self) -> tuple[int, int]:
        return find_mainlobe_nulls(self)

    def same_layout(self, other: "PatternSamples") -> bool:
        return self.values.size == other.values.size and np.array_equal(self.order, other.order)


def dft_array_factor(excitations: ExcitationSet, grid: GridSpec) -> np.ndarray:
    """Size-M transform of the zero-padded excitations, natural order.

    ``A_m = sum_n w_n exp(-2j pi n m / M)``, the array factor at ``u_m``.
    """
    n = excitations.n_elements
    if grid.n_samples < n:
        raise SizingError(f"M={grid.n_samples} < N={n}")
    if grid.n_elements != n:
        raise ParameterError(f"grid is for N={grid.n_elements}, excitation set has N={n}")
    return np.fft.fft(excitations.weights, n=grid.n_samples)


def power_pattern(array_factor, spacing: float = 0.5, element_gain: float = 1.0) -> PatternSamples:
    """Raw power samples ``|g|^2 |A_m|^2`` in display order (not normalized)."""
    a = np.asarray(array_factor)
    if a.size == 0:
        raise ParameterError("empty array factor")
    return PatternSamples.from_natural(abs(element_gain) ** 2 * (a.real**2 + a.imag**2), spacing)


def periodic_sinc(x, m: int) -> np.ndarray:
    """``sin(m x) / (m sin x)`` with the removable singularities filled in.

    At ``x = p pi`` the limit is ``(-1)**(p (m - 1))``.
    """
    x = np.asarray(x, dtype=np.float64)
    s = np.sin(x)
    near = np.abs(s) < 1e-12
    safe = np.where(near, 1.0, s)
    out = np.sin(m * x) / (m * safe)
    if np.any(near):
        p = np.rint(x[near] / np.pi).astype(np.int64)
        out = np.array(out, copy=True)
        out[near] = np.where((p * (m - 1)) % 2 == 0, 1.0, -1.0)
    return out


def interpolate(array_factor, u, grid: GridSpec):
    """Continuous array factor A(u) from its M samples (natural order).

    Band-limited reconstruction: the samples are those of a degree < M
    trigonometric polynomial, so ``A(u) = sum_m A_m D(x_m)`` with
    ``x_m = pi (d/lambda) u + m pi / M`` and the Dirichlet kernel
    ``D(x) = exp(j (M-1) x) sin(M x) / (M sin x)``.  The phase factor comes
    from placing element 0 at the origin.
    """
    a = np.asarray(array_factor, dtype=np.complex128)
    m_total = grid.n_samples
    if a.size != m_total:
        raise SizingError(f"expected {m_total} samples, got {a.size}")
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(np.abs(u_arr) > 1.0) or not np.all(np.isfinite(u_arr)):
        raise DomainError("direction cosine outside [-1, 1]")
    x = math.pi * grid.spacing * u_arr[..., None] + np.arange(m_total) * (math.pi / m_total)
    kernel = np.exp(1j * (m_total - 1) * x) * periodic_sinc(x, m_total)
    out = kernel @ a
    return complex(out) if np.ndim(u) == 0 else out


def find_mainlobe_nulls(pattern: PatternSamples) -> tuple[int, int]:
    """Display indices of the first local minima either side of the peak.

    Walks outward from the peak while the pattern keeps falling; a plateau
    stops the walk at its sample nearest the peak.
    """
    p = pattern.values
    peak = pattern.m_peak
    left = peak
    while left > 0 and p[left - 1] < p[left]:
        left -= 1
    right = peak
    last = p.size - 1
    while right < last and p[right + 1] < p[right]:
        right += 1
    if left == 0 or left == peak:
        raise NullNotFoundError("no local minimum left of the mainlobe peak")
    if right == last or right == peak:
        raise NullNotFoundError("no local minimum right of the mainlobe peak")
    return left, right


def to_db(values, floor_db: float = DB_FLOOR) -> np.ndarray:
    """``10 log10`` with zeros (and anything below the floor) clamped to ``floor_db``."""
    v = np.asarray(values, dtype=np.float64)
    out = np.full(v.shape, floor_db)
    pos = v > 0
    out[pos] = 10.0 * np.log10(v[pos])
    return np.maximum(out, floor_db)


def write_pattern_csv(pattern: PatternSamples, dest: str | PathLike | IO[str], floor_db: float = DB_FLOOR):
    """Rows ``u,value_db,value_linear`` in display order."""
    db = to_db(pattern.values, floor_db)

    def _write(fh):
        fh.write("u,value_db,value_linear\n")
        for u, vdb, v in zip(pattern.u_grid, db, pattern.values):
            fh.write(f"{float(u)!r},{float(vdb)!r},{float(v)!r}\n")

    if hasattr(dest, "write"):
        _write(dest)
    else:
        with open(dest, "w", newline="") as fh:
            _write(fh)
