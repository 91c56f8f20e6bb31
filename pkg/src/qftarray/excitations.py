"""Element excitation sets: Dolph-Chebyshev and Taylor tapers, CSV I/O.

Generated tapers are real, broadside (zero phase) and exactly symmetric.
Shaped beams with arbitrary complex weights come in through
:func:`load_excitations`.

CSV format, one element per row, zero-based contiguous indices::

    index,real,imag
    0,0.5,0.0
    1,0.5,0.0

The header line is optional; blank lines and lines starting with ``#`` are
skipped.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from os import PathLike
from typing import IO, Iterable

import numpy as np

from .errors import DegenerateInputError, ParameterError, ParseError

__all__ = [
    "ExcitationSet",
    "dolph_chebyshev",
    "taylor",
    "woodward_lawson",
    "flat_top",
    "cosecant_squared",
    "normalize",
    "load_excitations",
    "read_excitations",
    "dump_excitations",
    "write_excitations",
]

NORM_TOL = 1e-12
CSV_HEADER = ("index", "real", "imag")


@dataclass(frozen=True, eq=False)
class ExcitationSet:
    """Complex element weights ``w_n``, ``n = 0 .. N-1``.

    ``weights`` is stored as a read-only complex128 array.  When
    ``normalized`` is true the squared moduli sum to one within 1e-12.
    """

    weights: np.ndarray
    label: str = ""
    normalized: bool = False

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.complex128).ravel()
        if w.size < 1:
            raise ParameterError("an excitation set needs at least one element")
        if not np.all(np.isfinite(w)):
            raise ParameterError("excitation weights must be finite")
        if self.normalized:
            total = float(np.sum(np.abs(w) ** 2))
            if abs(total - 1.0) >= NORM_TOL:
                raise ParameterError(
                    f"set flagged normalized but sum |w|^2 = {total!r}"
                )
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n_elements(self) -> int:
        return int(self.weights.size)

    def __len__(self):
        return self.n_elements

    @property
    def amplitudes(self) -> np.ndarray:
        return np.abs(self.weights)

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.weights)

    def __repr__(self):
        return (
            f"ExcitationSet(N={self.n_elements}, label={self.label!r}, "
            f"normalized={self.normalized})"
        )


def normalize(excitations: ExcitationSet) -> ExcitationSet:
    """Scale to unit Euclidean norm so the set can be amplitude-encoded."""
    w = excitations.weights
    norm = float(np.linalg.norm(w))
    if norm == 0.0:
        raise DegenerateInputError("cannot normalize an all-zero excitation set")
    return ExcitationSet(w / norm, label=excitations.label, normalized=True)


def _weights_from_zeros(zeros: Iterable[float], n_elements: int) -> np.ndarray:
    """Real symmetric weights of the array polynomial with the given zeros.

    ``zeros`` are the pattern nulls in ``psi = k d u`` on ``(0, pi]``; each
    ``psi < pi`` contributes the conjugate pair ``exp(+-j psi)``.  The
    polynomial is evaluated on the N roots of unity and inverted with a DFT,
    which stays well conditioned where expanding the product does not.
    """
    roots = []
    for psi in zeros:
        if math.isclose(psi, math.pi, rel_tol=0.0, abs_tol=1e-12):
            roots.append(-1.0 + 0.0j)
        else:
            z = complex(math.cos(psi), math.sin(psi))
            roots.extend((z, z.conjugate()))
    if len(roots) != n_elements - 1:
        raise AssertionError(f"{len(roots)} roots for {n_elements} elements")
    z = np.exp(2j * np.pi * np.arange(n_elements) / n_elements)
    values = np.ones(n_elements, dtype=np.complex128)
    for r in roots:
        values *= z - r
    coeffs = np.fft.fft(values).real / n_elements
    w = 0.5 * (coeffs + coeffs[::-1])
    if w.sum() < 0:
        w = -w
    return w


def _chebyshev_zeros(n_elements: int, sll_db: float) -> np.ndarray:
    """Nulls of the N-element Chebyshev pattern on (0, pi], ascending."""
    ratio = 10.0 ** (-sll_db / 20.0)
    order = n_elements - 1
    x0 = math.cosh(math.acosh(ratio) / order)
    p = np.arange(1, n_elements // 2 + 1)
    c = np.cos((2 * p - 1) * np.pi / (2 * order)) / x0
    return 2.0 * np.arccos(c)


def _check_taper_args(n_elements, sll_db):
    if int(n_elements) != n_elements or n_elements < 2:
        raise ParameterError(f"n_elements must be an integer >= 2, got {n_elements!r}")
    if not (sll_db < 0) or not math.isfinite(sll_db):
        raise ParameterError(f"sll_db must be a finite negative dB value, got {sll_db!r}")


def dolph_chebyshev(n_elements: int, sll_db: float) -> ExcitationSet:
    """Dolph-Chebyshev taper with equi-ripple sidelobes at ``sll_db``.

    >>> w = dolph_chebyshev(16, -15.0)
    >>> round(float(w.weights[0].real), 4)
    0.4129
    """
    _check_taper_args(n_elements, sll_db)
    n_elements = int(n_elements)
    w = _weights_from_zeros(_chebyshev_zeros(n_elements, sll_db), n_elements)
    return normalize(ExcitationSet(w, label=f"DC {sll_db:g} dB"))


def taylor(n_elements: int, sll_db: float, n_bar: int) -> ExcitationSet:
    """Discrete Taylor n-bar taper (Villeneuve zero placement).

    The first ``n_bar - 1`` Chebyshev nulls are dilated so that the
    ``n_bar``-th lands on the uniform-array null ``2 pi n_bar / N``; every
    null from there on stays at the uniform position.  The near-in sidelobes
    sit close to ``sll_db`` and the far ones decay like the uniform array's.
    """
    _check_taper_args(n_elements, sll_db)
    n_elements = int(n_elements)
    if int(n_bar) != n_bar or n_bar < 1:
        raise ParameterError(f"n_bar must be a positive integer, got {n_bar!r}")
    n_bar = int(n_bar)
    n_half = n_elements // 2
    if n_bar > n_half:
        raise ParameterError(
            f"n_bar={n_bar} exceeds the {n_half} nulls available on (0, pi] "
            f"for N={n_elements}"
        )
    cheb = _chebyshev_zeros(n_elements, sll_db)
    uniform = 2.0 * np.pi * np.arange(1, n_half + 1) / n_elements
    sigma = uniform[n_bar - 1] / cheb[n_bar - 1]
    zeros = uniform.copy()
    zeros[: n_bar - 1] = sigma * cheb[: n_bar - 1]
    if np.any(np.diff(zeros) <= 0):
        raise ParameterError(f"n_bar={n_bar} incompatible with sll_db={sll_db}")
    w = _weights_from_zeros(zeros, n_elements)
    return normalize(ExcitationSet(w, label=f"Taylor {sll_db:g} dB nbar={n_bar}"))


def woodward_lawson(n_elements: int, field, spacing: float = 0.5, label: str = "") -> ExcitationSet:
    """Woodward-Lawson synthesis of a shaped beam.

    ``field(u)`` is the wanted field magnitude.  It is sampled at the N
    directions ``u_k = k / (N d)``, ``k = -N/2 .. N/2 - 1``, where the
    composing beams are orthogonal, and each beam is phased about the array
    centre.  The synthesized pattern passes exactly through the samples and
    ripples between them.  Returns a normalized set.
    """
    n_elements = int(n_elements)
    if n_elements < 2:
        raise ParameterError("need at least two elements")
    k = np.arange(n_elements) - n_elements // 2
    u = k / (n_elements * spacing)
    psi = 2.0 * np.pi * spacing * u
    samples = np.array([float(field(x)) for x in u])
    if not np.all(np.isfinite(samples)):
        raise ParameterError("field samples must be finite")
    centre = np.arange(n_elements)[:, None] - (n_elements - 1) / 2.0
    w = (samples[None, :] * np.exp(-1j * centre * psi[None, :])).sum(axis=1) / n_elements
    return normalize(ExcitationSet(w, label=label))


def flat_top(n_elements: int = 16, half_width: float = 0.3, spacing: float = 0.5) -> ExcitationSet:
    """Flat-topped sector beam over ``|u| <= half_width`` (illustrative)."""
    return woodward_lawson(
        n_elements, lambda u: 1.0 if abs(u) <= half_width else 0.0, spacing,
        label=f"flat-top |u|<={half_width:g}",
    )


def cosecant_squared(n_elements: int = 16, u0: float = 0.1, u_max: float = 0.6,
                     spacing: float = 0.5) -> ExcitationSet:
    """Cosecant-squared power beam: flat near broadside, then ``(u0/u)^2`` in power
    out to ``u_max`` (illustrative)."""

    def field(u):
        if -0.05 <= u < u0:
            return 1.0
        if u0 <= u <= u_max:
            return u0 / u
        return 0.0

    return woodward_lawson(n_elements, field, spacing, label=f"csc^2 u0={u0:g}")


def _parse_rows(lines: Iterable[str]) -> list[complex]:
    weights: list[complex] = []
    reader = csv.reader(lines)
    for lineno, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if row[0].lstrip().startswith("#"):
            continue
        fields = [f.strip() for f in row]
        if tuple(f.lower() for f in fields) == CSV_HEADER:
            if weights:
                raise ParseError("header after data", row=lineno)
            continue
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields (index,real,imag), got {len(fields)}", row=lineno)
        try:
            index = int(fields[0])
            re, im = float(fields[1]), float(fields[2])
        except ValueError:
            raise ParseError(f"non-numeric field in {row!r}", row=lineno) from None
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ParseError("non-finite weight", row=lineno)
        expected = len(weights)
        if index < expected:
            raise ParseError(f"duplicate or out-of-order index {index}", row=lineno)
        if index > expected:
            raise ParseError(f"gap in indices: expected {expected}, got {index}", row=lineno)
        weights.append(complex(re, im))
    if not weights:
        raise ParseError("no excitation rows found")
    return weights


def load_excitations(source: IO, label: str = "") -> ExcitationSet:
    """Parse an ``index,real,imag`` stream (bytes or text) in file order.

    The result is not normalized; call :func:`normalize` before encoding.
    """
    data = source.read()
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8 text: {exc}") from None
    return ExcitationSet(_parse_rows(io.StringIO(data)), label=label)


def read_excitations(path: str | PathLike) -> ExcitationSet:
    with open(path, "rb") as fh:
        return load_excitations(fh, label=str(path))


def dump_excitations(excitations: ExcitationSet, stream: IO[str], header: bool = True):
    """Write in the CSV format; ``repr`` floats make the round trip exact."""
    if header:
        stream.write(",".join(CSV_HEADER) + "\n")
    for i, w in enumerate(excitations.weights):
        stream.write(f"{i},{float(w.real)!r},{float(w.imag)!r}\n")


def write_excitations(excitations: ExcitationSet, path: str | PathLike):
    with open(path, "w", newline="") as fh:
        dump_excitations(excitations, fh)
