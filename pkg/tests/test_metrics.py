import io
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qftarray.errors import ComparisonError, ParameterError
from qftarray.excitations import dolph_chebyshev
from qftarray.metrics import (
    delta_statistics,
    gamma,
    gamma_split,
    match,
    resolution_threshold,
    write_report_csv,
)
from qftarray.qsim import AliasTable, ShotHistogram, apply_qft, encode, estimate_pattern, exact_probabilities, sample_shots
from qftarray.reference import DB_FLOOR, GridSpec, PatternSamples, dft_array_factor, power_pattern


def pattern(values):
    return PatternSamples.from_natural(np.asarray(values, dtype=float), normalize=True)


def raw(values):
    values = np.asarray(values, dtype=float)
    m = values.size
    return PatternSamples(values, np.linspace(-1, 1, m, endpoint=False), np.arange(m), values.max())


def test_resolution_threshold():
    lin, db = resolution_threshold(ShotHistogram([100, 1, 0, 0], 101))
    assert lin == 0.01 and db == -20.0


def test_delta_statistics_identical():
    h = ShotHistogram([10, 5, 1, 0], 16)
    mean, lo, hi = delta_statistics([h, h, h])
    assert mean == lo == hi == resolution_threshold(h)[1]
    with pytest.raises(ParameterError):
        delta_statistics([])


def test_gamma_identity():
    ref = pattern([1, 0.5, 0.2, 0.0])
    assert gamma(ref, [ref, ref]) == 0.0


def test_gamma_two():
    assert gamma(raw([1, 0]), [raw([0, 1])]) == 2.0


def test_gamma_mean_over_runs():
    ref = raw([1.0, 0.0])
    assert gamma(ref, [ref, raw([0.0, 1.0])]) == 1.0


def test_gamma_length_mismatch():
    with pytest.raises(ComparisonError):
        gamma(pattern(np.ones(4)), [pattern(np.ones(8))])
    with pytest.raises(ParameterError):
        gamma(pattern(np.ones(4)), [])
    with pytest.raises(ParameterError):
        gamma(pattern(np.ones(4)), [pattern(np.ones(4))], scale="log")


def test_split_partition():
    ref = raw([0.0, 0.2, 1.0, 0.2, 0.0, 0.1, 0.05, 0.1])
    est = raw([0.0, 0.5, 1.0, 0.3, 0.0, 0.1, 0.05, 0.1])
    ml, sl = gamma_split(ref, [est], 0, 4)
    assert sl == 0.0
    assert ml == gamma(ref, [est])
    assert gamma_split(ref, [ref], 0, 4) == (0.0, 0.0)
    with pytest.raises(ParameterError):
        gamma_split(ref, [est], 4, 2)
    with pytest.raises(ParameterError):
        gamma_split(ref, [est], 0, 8)


def test_match_exact_bits():
    rng = np.random.default_rng(0)
    ref = pattern(rng.random(64))
    runs = [pattern(rng.random(64)) for _ in range(7)]
    rep = match(ref, runs, nulls=(20, 40))
    assert rep.gamma == rep.gamma_ml + rep.gamma_sl
    for r in rep.per_run:
        assert r.gamma == r.gamma_ml + r.gamma_sl
    assert rep.repetitions == 7
    assert rep.delta_db == -math.inf
    assert abs(rep.gamma - gamma(ref, runs)) < 1e-12


def test_match_permutation_invariant():
    rng = np.random.default_rng(1)
    a, b = rng.random(32), rng.random(32)
    perm = rng.permutation(32)
    ra, rb = raw(a), raw(b)
    pa = PatternSamples(a[perm], np.zeros(32), perm, a.max())
    pb = PatternSamples(b[perm], np.zeros(32), perm, b.max())
    assert abs(gamma(ra, [rb]) - gamma(pa, [pb])) < 1e-15


def test_exact_pathway_vanishes():
    w = dolph_chebyshev(16, -15)
    ref = power_pattern(dft_array_factor(w, GridSpec(16, 1024))).normalized()
    exact = PatternSamples.from_natural(exact_probabilities(apply_qft(encode(w, 10))), normalize=True)
    rep = match(ref, [exact])
    assert rep.gamma < 1e-9 and rep.gamma_sl < 1e-9


def test_match_histogram_count_check():
    ref = pattern([1, 0.5, 0.1, 0.5])
    with pytest.raises(ParameterError):
        match(ref, [ref], histograms=[], nulls=(0, 2))


@pytest.fixture(scope="module")
def dc15():
    w = dolph_chebyshev(16, -15)
    ref = power_pattern(dft_array_factor(w, GridSpec(16, 1024))).normalized()
    state = apply_qft(encode(w, 10))
    return ref, state, AliasTable(exact_probabilities(state))


def run_report(dc15, shots, reps=20, scale="linear"):
    ref, state, table = dc15
    hists = [sample_shots(state, shots, seed=1000 + r, table=table) for r in range(reps)]
    return match(ref, [estimate_pattern(h) for h in hists], hists, scale=scale)


def test_dc15_gamma_small_at_large_t(dc15):
    rep = run_report(dc15, 1024 * 1000)
    assert rep.gamma < 0.1
    assert -42.1 < rep.delta_db < -41.1
    assert rep.delta_min_db <= rep.delta_db <= rep.delta_max_db <= 0


def test_delta_decreases_with_t(dc15):
    means = [run_report(dc15, 1024 * k).delta_db for k in (8, 20, 40, 80)]
    assert all(a >= b for a, b in zip(means, means[1:]))
    assert_allclose(means, [-21.5, -25.0, -27.8, -30.9], atol=1.0)


def test_gamma_sl_decreases_with_t(dc15):
    sl = [run_report(dc15, 1024 * k).gamma_sl for k in (10, 40, 160)]
    assert sl[0] > sl[1] > sl[2]


def test_db_scale_floor_and_identity(dc15):
    ref = dc15[0]
    rep = match(ref, [ref], scale="db")
    assert rep.gamma == 0.0
    rep = run_report(dc15, 1024 * 100, reps=3, scale="db")
    assert rep.scale == "db"
    assert rep.gamma == rep.gamma_ml + rep.gamma_sl
    assert rep.gamma_sl > rep.gamma_ml
    # an estimate clamped at the reference floor everywhere it is zero
    z = PatternSamples(np.where(ref.values > 0.5, ref.values, 0.0), ref.u_grid, ref.order, 1.0, True)
    assert gamma(ref, [z], scale="db", floors=[10 ** (DB_FLOOR / 10)]) > 0


def test_report_csv():
    ref = pattern([1.0, 0.4, 0.1, 0.4])
    h = ShotHistogram([10, 4, 1, 4], 19)
    rep = match(ref, [estimate_pattern(h)], [h], nulls=(0, 2))
    buf = io.StringIO()
    write_report_csv(rep, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "run,gamma,gamma_ml,gamma_sl,delta_db"
    assert lines[1].startswith("1,") and lines[-1].startswith("mean,")
    assert float(lines[-1].split(",")[-1]) == -10.0
