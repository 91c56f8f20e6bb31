"""Dense statevector register: amplitude encoding, gate-level QFT, shots.

Qubit ``l`` is bit ``l`` of the basis-state index (little endian).  The QFT
is built from Hadamards, controlled phases and a final swap layer, so its
output is in natural index order.  With ``sign=-1`` (the default) it
computes ``(1/sqrt(Q)) sum_q a_q exp(-2j pi q m / Q)``, which lines up with
the classical array-factor DFT bin for bin.

Shots are drawn with Walker/Vose alias tables from Philox streams.  A run of
``T`` shots is cut into fixed-size chunks, chunk ``c`` seeded by
``SeedSequence(seed, spawn_key=(c,))``, so a histogram depends only on
``(state, T, seed)`` and never on how many workers drew it.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import EncodingError, ParameterError
from .excitations import NORM_TOL, ExcitationSet
from .reference import PatternSamples

__all__ = [
    "QuantumState",
    "ShotHistogram",
    "Gate",
    "AliasTable",
    "register_size",
    "encode",
    "qft_circuit",
    "format_circuit",
    "apply_circuit",
    "apply_qft",
    "dense_qft",
    "exact_probabilities",
    "sample_shots",
    "estimate_pattern",
    "SHOT_CHUNK",
]

STATE_TOL = 1e-10
SHOT_CHUNK = 1 << 22


@dataclass(frozen=True, eq=False)
class QuantumState:
    """``2**n_qubits`` complex amplitudes with unit norm (1e-10)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128).ravel()
        size = a.size
        if size < 1 or size & (size - 1):
            raise ParameterError(f"state length must be a power of two, got {size}")
        norm2 = float(np.vdot(a, a).real)
        if abs(norm2 - 1.0) > STATE_TOL:
            raise ParameterError(f"state is not normalized: sum |a|^2 = {norm2!r}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def __len__(self):
        return int(self.amplitudes.size)


@dataclass(frozen=True, eq=False)
class ShotHistogram:
    """Counts ``V_m`` over the basis states from ``total_shots`` shots."""

    counts: np.ndarray
    total_shots: int
    seed: int | None = None

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64).ravel()
        if self.total_shots < 1:
            raise ParameterError("a histogram needs at least one shot")
        if np.any(c < 0):
            raise ParameterError("negative counts")
        if int(c.sum()) != self.total_shots:
            raise ParameterError(f"counts sum to {int(c.sum())}, expected {self.total_shots}")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def v_max(self) -> int:
        return int(self.counts.max())

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.total_shots


class Gate(NamedTuple):
    name: str
    qubits: tuple[int, ...]
    angle: float | None = None
    # angle as a signed fraction of pi, kept exact for the text dump
    turns: Fraction | None = None

    def __str__(self):
        qs = " ".join(f"q{q}" for q in self.qubits)
        if self.name == "CP":
            return f"CP({_format_pi(self.turns)}) {qs}"
        return f"{self.name} {qs}"


def _format_pi(frac: Fraction) -> str:
    sign = "-" if frac < 0 else ""
    frac = abs(frac)
    num = "π" if frac.numerator == 1 else f"{frac.numerator}π"
    return f"{sign}{num}" if frac.denominator == 1 else f"{sign}{num}/{frac.denominator}"


def register_size(n_elements: int, n_samples: int) -> int:
    """Qubits needed to hold N excitations and M pattern samples."""
    if n_elements < 1 or n_samples < 1:
        raise ParameterError("N and M must both be >= 1")
    q = max(int(n_elements), int(n_samples))
    return (q - 1).bit_length()


def encode(excitations: ExcitationSet, n_qubits: int) -> QuantumState:
    """Load the normalized weights into the first N basis amplitudes."""
    if not excitations.normalized:
        raise EncodingError("excitations must be normalized before encoding")
    size = 1 << int(n_qubits)
    n = excitations.n_elements
    if n > size:
        raise EncodingError(f"N={n} excitations do not fit in {n_qubits} qubits")
    amps = np.zeros(size, dtype=np.complex128)
    amps[:n] = excitations.weights
    return QuantumState(amps)


def qft_circuit(n_qubits: int, sign: int = -1) -> list[Gate]:
    """Gate list for the L-qubit QFT, in application order.

    L Hadamards, L(L-1)/2 controlled phases and floor(L/2) swaps.
    """
    if sign not in (1, -1):
        raise ParameterError("sign must be +1 or -1")
    gates: list[Gate] = []
    for j in reversed(range(n_qubits)):
        gates.append(Gate("H", (j,)))
        for k in reversed(range(j)):
            turns = Fraction(sign, 2 ** (j - k))
            gates.append(Gate("CP", (k, j), sign * math.pi / 2 ** (j - k), turns))
    for q in range(n_qubits // 2):
        gates.append(Gate("SWAP", (q, n_qubits - 1 - q)))
    return gates


def format_circuit(gates: Iterable[Gate]) -> str:
    return "".join(f"{g}\n" for g in gates)


def apply_circuit(state: QuantumState, gates: Sequence[Gate], backend=None) -> QuantumState:
    k = kernels.get_backend(backend)
    amps = np.array(state.amplitudes, dtype=np.complex128, copy=True)
    for g in gates:
        if g.name == "H":
            k.apply_h(amps, g.qubits[0])
        elif g.name == "CP":
            k.apply_cphase(amps, g.qubits[0], g.qubits[1], g.angle)
        elif g.name == "SWAP":
            k.apply_swap(amps, g.qubits[0], g.qubits[1])
        else:
            raise ParameterError(f"unknown gate {g.name!r}")
    return QuantumState(amps)


def apply_qft(state: QuantumState, sign: int = -1, backend=None) -> QuantumState:
    """Run the QFT gate sequence on a copy of ``state``."""
    return apply_circuit(state, qft_circuit(state.n_qubits, sign), backend)


def dense_qft(amplitudes, sign: int = -1) -> np.ndarray:
    """Direct ``Q x Q`` matrix transform; an oracle for :func:`apply_qft`.

    ``amplitudes`` may hold a batch of states along its last axis.
    """
    a = np.asarray(amplitudes, dtype=np.complex128)
    q = a.shape[-1]
    idx = np.arange(q)
    # reduce q*m mod Q before scaling so the phases stay exact for large Q
    phase = np.outer(idx, idx) % q
    mat = np.exp(sign * 2j * np.pi * phase / q) / math.sqrt(q)
    return a @ mat.T


def exact_probabilities(state: QuantumState) -> np.ndarray:
    """Born-rule probabilities ``|a_m|^2``."""
    a = state.amplitudes
    return a.real**2 + a.imag**2


class AliasTable:
    """Vose alias table for O(1) draws from a discrete distribution."""

    def __init__(self, probabilities):
        p = np.asarray(probabilities, dtype=np.float64)
        if p.ndim != 1 or p.size < 1:
            raise ParameterError("need a non-empty 1-D probability vector")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ParameterError("probabilities must be finite and non-negative")
        total = p.sum()
        if total <= 0:
            raise ParameterError("probabilities sum to zero")
        k = p.size
        scaled = (p / total) * k
        prob = np.zeros(k)
        alias = np.arange(k, dtype=np.int64)
        small = [i for i in range(k) if scaled[i] < 1.0]
        large = [i for i in range(k) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            g = large.pop()
            prob[s] = scaled[s]
            alias[s] = g
            scaled[g] = (scaled[g] + scaled[s]) - 1.0
            (small if scaled[g] < 1.0 else large).append(g)
        # leftovers are 1 up to rounding
        for i in large + small:
            prob[i] = 1.0
        self.prob = prob
        self.alias = alias

    def __len__(self):
        return int(self.prob.size)

    def marginals(self) -> np.ndarray:
        """Distribution the table actually samples from (for checks)."""
        k = self.prob.size
        out = self.prob.copy()
        np.add.at(out, self.alias, 1.0 - self.prob)
        return out / k


def _chunk_counts(table: AliasTable, seed: int, chunk: int, n: int, backend) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(chunk,))
    bitgen = np.random.Philox(ss)
    counts = np.zeros(len(table), dtype=np.int64)
    backend.alias_counts(table.prob, table.alias, bitgen, n, counts)
    return counts


def sample_shots(
    state: QuantumState | np.ndarray,
    shots: int,
    seed: int,
    workers: int = 1,
    backend=None,
    table: AliasTable | None = None,
) -> ShotHistogram:
    """Measure ``shots`` times; deterministic in ``(state, shots, seed)``.

    ``state`` may also be a probability vector.  Pass a prebuilt ``table``
    to skip the O(Q) alias construction when sampling one state repeatedly.
    """
    shots = int(shots)
    if shots < 1:
        raise ParameterError("shots must be >= 1")
    if seed is None or int(seed) < 0:
        raise ParameterError("seed must be a non-negative integer")
    seed = int(seed)
    if table is None:
        probs = exact_probabilities(state) if isinstance(state, QuantumState) else state
        table = AliasTable(probs)
    k = kernels.get_backend(backend)
    sizes = [SHOT_CHUNK] * (shots // SHOT_CHUNK)
    if shots % SHOT_CHUNK:
        sizes.append(shots % SHOT_CHUNK)
    jobs = list(enumerate(sizes))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _chunk_counts(table, seed, job[0], job[1], k), jobs))
    else:
        parts = [_chunk_counts(table, seed, c, n, k) for c, n in jobs]
    counts = np.sum(parts, axis=0) if len(parts) > 1 else parts[0]
    return ShotHistogram(counts, shots, seed)


def estimate_pattern(hist: ShotHistogram, spacing: float = 0.5) -> PatternSamples:
    """Peak-normalized pattern estimate ``V_m / V_MAX`` in display order.

    Dividing the counts directly (rather than the frequencies ``V_m / T``)
    keeps single-count bins at exactly ``1 / V_MAX``.  ``p_max`` holds the
    estimated peak probability ``V_MAX / T``.
    """
    v_max = hist.v_max
    raw = PatternSamples.from_natural(hist.counts / v_max, spacing)
    return replace(raw, p_max=v_max / hist.total_shots, is_normalized=True)
