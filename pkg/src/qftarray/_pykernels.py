"""Pure numpy fallback for the compiled kernels in ``_kernels.pyx``.

The sampling path consumes the bit generator exactly like the compiled one
(``Generator.random`` is one ``next_double`` per value), so histograms are
bit-identical across backends.
"""
import math

import numpy as np

BACKEND = "python"

_CHUNK = 1 << 18


def _pairs(state, qubit):
    # view with axis 1 selecting the value of `qubit`
    return state.reshape(-1, 2, 1 << qubit)


def apply_h(state, qubit):
    v = _pairs(state, qubit)
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    r = 1.0 / math.sqrt(2.0)
    v[:, 0, :] = (a + b) * r
    v[:, 1, :] = (a - b) * r


def apply_cphase(state, control, target, theta):
    idx = np.arange(state.size)
    mask = (1 << control) | (1 << target)
    sel = (idx & mask) == mask
    state[sel] *= complex(math.cos(theta), math.sin(theta))


def apply_swap(state, q1, q2):
    if q1 == q2:
        return
    idx = np.arange(state.size)
    b1, b2 = 1 << q1, 1 << q2
    i = idx[((idx & b1) != 0) & ((idx & b2) == 0)]
    j = (i ^ b1) | b2
    state[i], state[j] = state[j], state[i].copy()


def alias_counts(prob, alias, bit_generator, n_draws, counts):
    k = prob.shape[0]
    gen = np.random.Generator(bit_generator)
    left = int(n_draws)
    while left > 0:
        n = min(left, _CHUNK)
        x = gen.random(n) * float(k)
        j = x.astype(np.int64)
        frac = x - j
        picked = np.where(frac < prob[j], j, alias[j])
        counts += np.bincount(picked, minlength=k)
        left -= n
