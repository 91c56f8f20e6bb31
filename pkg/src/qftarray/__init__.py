"""Phased-array power patterns from an emulated quantum Fourier transform.

Normalized element excitations are amplitude-encoded into a qubit register,
transformed by a gate-level QFT on a statevector simulator and measured a
finite number of times.  The shot histogram is compared with a classical
zero-padded DFT pattern.
"""

__version__ = "0.1.0"

from .errors import (
    ComparisonError,
    DegenerateInputError,
    DomainError,
    EncodingError,
    NullNotFoundError,
    ParameterError,
    ParseError,
    QftArrayError,
    SizingError,
)
from .excitations import (
    ExcitationSet,
    dolph_chebyshev,
    dump_excitations,
    load_excitations,
    normalize,
    read_excitations,
    taylor,
    write_excitations,
)
from .reference import (
    DB_FLOOR,
    GridSpec,
    PatternSamples,
    dft_array_factor,
    find_mainlobe_nulls,
    interpolate,
    periodic_sinc,
    power_pattern,
    u_grid,
)
from .qsim import (
    QuantumState,
    ShotHistogram,
    apply_qft,
    dense_qft,
    encode,
    estimate_pattern,
    exact_probabilities,
    qft_circuit,
    register_size,
    sample_shots,
)
from .metrics import MatchReport, delta_statistics, gamma, gamma_split, match, resolution_threshold
from .harness import (
    Experiment,
    ExperimentConfig,
    emit_plotdata,
    run_single,
    search_shots,
    sweep_shots,
)
