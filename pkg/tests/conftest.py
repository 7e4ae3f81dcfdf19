"""Shared independent oracles for the test suite.

These deliberately avoid the library's own assembly code paths: the stacked
mean is built with explicit loops and the information matrix is obtained from
central finite differences of that mean.
"""

import numpy as np
import pytest

from mmwsync import SyncParams, TrainingBlock
from mmwsync.crlb import parameter_names


def stacked_mean(params: SyncParams, t: TrainingBlock) -> np.ndarray:
    """Noise-free observation stacked chain-major per time step, via loops."""
    l_r = params.n_chains
    n = t.n_samples
    mu = np.zeros(n * l_r, dtype=complex)
    for k in range(n):
        rot = np.exp(1j * 2.0 * np.pi * params.cfo * k)
        for i in range(l_r):
            gain = params.amplitudes[i] * np.exp(1j * params.phases[i])
            mu[k * l_r + i] = rot * gain * t.symbols[k]
    return mu


def _params_with(params: SyncParams, name: str, value: float) -> SyncParams:
    amplitudes = params.amplitudes.copy()
    phases = params.phases.copy()
    cfo = params.cfo
    noise_var = params.noise_var
    if name.startswith("alpha_"):
        amplitudes[int(name.split("_")[1]) - 1] = value
    elif name.startswith("beta_"):
        phases[int(name.split("_")[1]) - 1] = value
    elif name == "cfo":
        cfo = value
    elif name == "noise_var":
        noise_var = value
    else:
        raise KeyError(name)
    # bypass range validation: finite-difference probes may leave [0, 2pi) etc.
    out = object.__new__(SyncParams)
    object.__setattr__(out, "amplitudes", amplitudes)
    object.__setattr__(out, "phases", phases)
    object.__setattr__(out, "cfo", cfo)
    object.__setattr__(out, "noise_var", noise_var)
    return out


def _param_value(params: SyncParams, name: str) -> float:
    if name.startswith("alpha_"):
        return float(params.amplitudes[int(name.split("_")[1]) - 1])
    if name.startswith("beta_"):
        return float(params.phases[int(name.split("_")[1]) - 1])
    if name == "cfo":
        return params.cfo
    if name == "noise_var":
        return params.noise_var
    raise KeyError(name)


def fd_fim(params: SyncParams, t: TrainingBlock) -> np.ndarray:
    """Gaussian-model information matrix from finite differences of the mean.

    The covariance is noise_var * I, so only its own diagonal element carries
    the trace term; every mean derivative is a central difference with step
    1e-6 * max(1, |value|).
    """
    names = parameter_names(params.n_chains)
    dim = len(names)
    n_obs = params.n_chains * t.n_samples
    s2 = params.noise_var
    jac = np.zeros((n_obs, dim), dtype=complex)
    for j, name in enumerate(names):
        value = _param_value(params, name)
        h = 1e-6 * max(1.0, abs(value))
        hi = stacked_mean(_params_with(params, name, value + h), t)
        lo = stacked_mean(_params_with(params, name, value - h), t)
        jac[:, j] = (hi - lo) / (2.0 * h)
    info = 2.0 / s2 * np.real(jac.conj().T @ jac)
    k = names.index("noise_var")
    info[k, k] += t.n_samples * params.n_chains / s2**2
    return info


def naive_effective_gains(front, channel) -> np.ndarray:
    """Dense loop evaluation of D^{-H} W^H H F q for cross-checking."""
    w = np.asarray(front.combiner)
    h = np.asarray(channel.matrix)
    f = np.asarray(front.precoder)
    q = np.asarray(front.spatial_filter)

    def matvec(m, v):
        rows, cols = m.shape
        out = np.zeros(rows, dtype=complex)
        for r in range(rows):
            acc = 0.0 + 0.0j
            for c in range(cols):
                acc += m[r, c] * v[c]
            out[r] = acc
        return out

    x = matvec(f, q)
    x = matvec(h, x)
    x = matvec(w.conj().T, x)
    # forward substitution on the lower-triangular D^H
    d_h = np.asarray(front.whitener).conj().T
    l_r = d_h.shape[0]
    out = np.zeros(l_r, dtype=complex)
    for i in range(l_r):
        acc = x[i]
        for j in range(i):
            acc -= d_h[i, j] * out[j]
        out[i] = acc / d_h[i, i]
    return out


def compare_fim_to_oracle(analytic, oracle, rel=1e-4):
    """Elementwise relative comparison; structural zeros checked absolutely.

    Returns the worst relative error over the non-zero entries.
    """
    scale = np.max(np.abs(analytic))
    worst = 0.0
    for i in range(analytic.shape[0]):
        for j in range(analytic.shape[1]):
            a, o = analytic[i, j], oracle[i, j]
            if abs(a) > 1e-9 * scale:
                err = abs(a - o) / abs(a)
                worst = max(worst, err)
                assert err < rel, (i, j, a, o)
            else:
                assert abs(o) < 1e-6 * scale, (i, j, a, o)
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sync_params(rng, l_r: int, noise_var=None) -> SyncParams:
    amplitudes = rng.uniform(0.1, 1.0, l_r)
    phases = rng.uniform(0.0, 2.0 * np.pi, l_r)
    cfo = float(rng.uniform(-0.5, 0.5))
    if noise_var is None:
        noise_var = float(rng.uniform(0.05, 2.0))
    return SyncParams(amplitudes=amplitudes, phases=phases, cfo=cfo, noise_var=noise_var)
