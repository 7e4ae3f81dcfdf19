"""Fisher information and Cramer-Rao lower bounds for the whitened model.

The information matrix is assembled element-by-element from the closed-form
Gaussian-model expressions and is block diagonal across two groups: F1 holds
the amplitudes and the noise variance (all mutually orthogonal), F2 holds the
carrier frequency offset coupled with the per-chain phase offsets.

Parameter ordering everywhere in this module is
(alpha_1 .. alpha_Lr, noise_var, cfo, beta_1 .. beta_Lr), which keeps the two
blocks contiguous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, SingularFim
from .signal_model import (
    TWO_PI,
    SyncParams,
    TrainingBlock,
    model_block,
    synthesize,
)


def parameter_names(l_r: int) -> list:
    """Canonical parameter order used for FIM rows and report vectors."""
    return ([f"alpha_{i + 1}" for i in range(l_r)] + ["noise_var", "cfo"]
            + [f"beta_{i + 1}" for i in range(l_r)])


@dataclass(frozen=True)
class FisherMatrix:
    """Assembled real FIM with its two diagonal blocks."""

    matrix: np.ndarray    # (2*l_r + 2, 2*l_r + 2)
    block_f1: np.ndarray  # (l_r + 1, l_r + 1): amplitudes then noise_var
    block_f2: np.ndarray  # (l_r + 1, l_r + 1): cfo then phases

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class CrlbReport:
    """Variance lower bounds in the model's natural parameters plus the
    transformed-parameter bounds for per-chain and average SNR."""

    var_alpha: np.ndarray  # (l_r,)
    var_noise_var: float
    var_cfo: float
    var_beta: np.ndarray   # (l_r,)
    var_gamma: np.ndarray  # (l_r,)
    var_snr: float

    def rows(self) -> list:
        """(parameter, bound) pairs in canonical order, then SNR transforms."""
        l_r = self.var_alpha.shape[0]
        out = [(f"alpha_{i + 1}", float(self.var_alpha[i])) for i in range(l_r)]
        out += [("noise_var", self.var_noise_var), ("cfo", self.var_cfo)]
        out += [(f"beta_{i + 1}", float(self.var_beta[i])) for i in range(l_r)]
        out += [(f"gamma_{i + 1}", float(self.var_gamma[i])) for i in range(l_r)]
        out += [("snr", self.var_snr)]
        return out


def _check(params: SyncParams, n: int) -> None:
    if n < 2:
        raise InvalidParams("block length must be >= 2")
    if params.noise_var <= 0:
        raise InvalidParams("Fisher information requires noise_var > 0")


def fim(params: SyncParams, n: int) -> FisherMatrix:
    """Closed-form FIM for (alpha_1.., noise_var, cfo, beta_1..).

    Nonzero elements: 2N/s2 per amplitude, N*Lr/s2^2 for the noise variance,
    (2/s2)*trace(P)*sum (2 pi n)^2 for the CFO, 2N a_i^2/s2 per phase, and the
    CFO-phase coupling (2 a_i^2/s2)*sum(2 pi n).  Everything else is zero.
    """
    _check(params, n)
    l_r = params.n_chains
    s2 = params.noise_var
    a2 = params.amplitudes**2
    grid = TWO_PI * np.arange(n)
    s1 = float(np.sum(grid))
    s2sum = float(np.sum(grid**2))

    f1 = np.diag(np.concatenate([np.full(l_r, 2.0 * n / s2), [n * l_r / s2**2]]))
    f2 = np.zeros((l_r + 1, l_r + 1))
    f2[0, 0] = 2.0 / s2 * params.trace_p * s2sum
    f2[0, 1:] = 2.0 * a2 / s2 * s1
    f2[1:, 0] = f2[0, 1:]
    f2[1:, 1:] = np.diag(2.0 * n * a2 / s2)

    full = np.zeros((2 * l_r + 2, 2 * l_r + 2))
    full[: l_r + 1, : l_r + 1] = f1
    full[l_r + 1:, l_r + 1:] = f2
    return FisherMatrix(matrix=full, block_f1=f1, block_f2=f2)


def crlb_closed_alpha(params: SyncParams, n: int) -> np.ndarray:
    """Closed-form amplitude bound noise_var/(2N), identical for every chain."""
    _check(params, n)
    return np.full(params.n_chains, params.noise_var / (2.0 * n))


def crlb_closed_noise_var(params: SyncParams, n: int) -> float:
    """Closed-form noise-variance bound noise_var^2/(Lr*N)."""
    _check(params, n)
    return params.noise_var**2 / (params.n_chains * n)


def crlb_gamma(gamma: np.ndarray, n: int) -> np.ndarray:
    """Transformed-parameter bound for per-chain SNR: 4*g/N + g^2/N."""
    gamma = np.asarray(gamma, dtype=float)
    return 4.0 * gamma / n + gamma**2 / n


def crlb_snr(snr: float, l_r: int, n: int) -> float:
    """Transformed-parameter bound for average SNR: 2*S/(Lr*N) + S^2/(Lr*N)."""
    return 2.0 * snr / (l_r * n) + snr**2 / (l_r * n)


def crlb_numeric(params: SyncParams, n: int) -> CrlbReport:
    """Bounds from numerically inverting the assembled FIM.

    The CFO and phase bounds come from the inverse of the coupled block and
    are the authoritative values.  A zero amplitude makes the phase of that
    chain unidentifiable and raises SingularFim naming the chain.
    """
    _check(params, n)
    zero = np.flatnonzero(params.amplitudes == 0)
    if zero.size:
        raise SingularFim(
            f"amplitude of chain {zero[0] + 1} is zero; its phase is unidentifiable",
            chain=int(zero[0]),
        )
    info = fim(params, n)
    try:
        inv = np.linalg.inv(info.matrix)
    except np.linalg.LinAlgError as exc:
        raise SingularFim("Fisher information matrix is singular") from exc
    diag = np.diag(inv)
    l_r = params.n_chains
    return CrlbReport(
        var_alpha=diag[:l_r].copy(),
        var_noise_var=float(diag[l_r]),
        var_cfo=float(diag[l_r + 1]),
        var_beta=diag[l_r + 2:].copy(),
        var_gamma=crlb_gamma(params.gamma, n),
        var_snr=crlb_snr(params.snr, l_r, n),
    )


def crlb_closed_cfo_phase(params: SyncParams, n: int):
    """Closed-form rendering of the CFO and phase bounds, kept for comparison.

    These expressions carry known algebraic defects: the N^Lr determinant
    factors cancel, the bracketed polynomials drop the 2*pi weights, and the
    denominator goes negative for N >= 3.  Authoritative values come from
    :func:`crlb_numeric`; tests log the discrepancy instead of asserting it.
    """
    _check(params, n)
    l_r = params.n_chains
    a2 = params.amplitudes**2
    n_pow = float(n) ** l_r
    denom = (n * (n - 1) * (2 * n - 1) / 6.0) * params.trace_p * n_pow \
        - np.sum(a2 * (n * (n + 1) ** 2 / 4.0) * n_pow)
    var_cfo = params.noise_var / 2.0 * n_pow / denom
    var_beta = np.empty(l_r)
    for i in range(l_r):
        others = np.delete(a2, i)
        prod_others = np.prod(others)
        head = ((n - 1) * (2 * n - 1) / 6.0) * params.trace_p * n_pow * prod_others
        tail = 0.0
        for k in range(l_r):
            if k == i:
                continue
            rest = np.prod(np.delete(a2, [k, i]))
            tail += a2[k] ** 2 * ((n + 1) ** 2 / 4.0) * n_pow * rest
        var_beta[i] = params.noise_var / 2.0 * (head - tail) / denom
    return float(var_cfo), var_beta


@dataclass(frozen=True)
class RegularityReport:
    """Monte Carlo means, standard errors, and variances of the score at truth."""

    names: list
    means: np.ndarray
    std_errors: np.ndarray
    variances: np.ndarray
    n_trials: int

    def within_band(self, n_sigma: float = 4.0) -> np.ndarray:
        """Boolean per component: |mean| within n_sigma standard errors of 0."""
        return np.abs(self.means) <= n_sigma * self.std_errors


def score_vector(params: SyncParams, t: TrainingBlock, samples: np.ndarray) -> np.ndarray:
    """Analytic gradient of the log-likelihood at the true parameters.

    Components follow the canonical order (alpha_1.., noise_var, cfo, beta_1..).
    """
    if params.noise_var <= 0:
        raise InvalidParams("score undefined for noise_var = 0")
    s2 = params.noise_var
    l_r = params.n_chains
    n = t.n_samples
    idx = np.arange(n)
    rotation = np.exp(-1j * TWO_PI * params.cfo * idx)
    corrected = samples * (np.conj(t.symbols) * rotation)[None, :]  # t*[n] e^{-j2pi f n} r_i[n]
    gains_conj = np.conj(params.complex_gains)

    sums = np.sum(corrected, axis=1)
    score_alpha = 2.0 / s2 * (np.real(np.exp(-1j * params.phases) * sums)
                              - params.amplitudes * n)
    score_beta = 2.0 * params.amplitudes / s2 * np.imag(np.exp(-1j * params.phases) * sums)
    weighted = np.sum(gains_conj[:, None] * corrected, axis=0)  # alpha^H Omega_n^* r[n] t*[n]
    score_cfo = 2.0 / s2 * float(np.sum(TWO_PI * idx * np.imag(weighted)))
    resid = samples - model_block(params.complex_gains, params.cfo, t.symbols)
    score_s2 = -n * l_r / s2 + float(np.sum(np.abs(resid) ** 2)) / s2**2

    out = np.empty(2 * l_r + 2)
    out[:l_r] = score_alpha
    out[l_r] = score_s2
    out[l_r + 1] = score_cfo
    out[l_r + 2:] = score_beta
    return out


def regularity_check(params: SyncParams, t: TrainingBlock, n_trials: int,
                     seed=0) -> RegularityReport:
    """Monte Carlo test that the expected score vanishes at the true parameters."""
    if n_trials < 100:
        raise InvalidParams("regularity check needs at least 100 trials")
    ss = np.random.SeedSequence(seed)
    scores = np.empty((n_trials, 2 * params.n_chains + 2))
    for k, child in enumerate(ss.spawn(n_trials)):
        block = synthesize(params, t, seed=child)
        scores[k] = score_vector(params, t, block.samples)
    means = scores.mean(axis=0)
    variances = scores.var(axis=0, ddof=1)
    std_errors = np.sqrt(variances / n_trials)
    return RegularityReport(names=parameter_names(params.n_chains), means=means,
                            std_errors=std_errors, variances=variances,
                            n_trials=n_trials)
