"""Maximum-likelihood estimation chain for the whitened multi-chain model.

Order of estimation: the carrier frequency offset comes first from the peak of
the summed squared matched-filter periodograms (FFT search plus parabolic
refinement), then per-chain phase and amplitude from the CFO-corrected matched
sums, then the noise variance from the model residual, and finally per-chain
and average SNR through the invariance property.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrum, InvalidParams, LengthMismatch
from .signal_model import (
    TWO_PI,
    ReceivedBlock,
    TrainingBlock,
    model_block,
    wrap_cfo,
    wrap_phase,
)


@dataclass(frozen=True)
class PeriodogramSearch:
    """FFT search state: per-chain matched-filter spectra and their summed power."""

    spectrum: np.ndarray         # (fft_size,), non-negative
    matched_outputs: np.ndarray  # complex, (l_r, fft_size)


@dataclass(frozen=True)
class EstimateReport:
    """Joint ML estimates for one received block."""

    cfo_hat: float
    beta_hat: np.ndarray       # (l_r,), radians in [0, 2*pi)
    alpha_hat: np.ndarray      # (l_r,), >= 0
    noise_var_hat: float
    gamma_hat: np.ndarray      # (l_r,), +inf when the residual vanishes
    snr_hat: float
    fft_size: int
    peak_bin: int
    peak_offset: float
    noiseless: bool = False    # True when the fitted residual is exactly zero

    def csv_header(self) -> list:
        cols = ["cfo_hat"]
        l_r = self.beta_hat.shape[0]
        cols += [f"beta_hat_{i + 1}" for i in range(l_r)]
        cols += [f"alpha_hat_{i + 1}" for i in range(l_r)]
        cols += ["noise_var_hat"]
        cols += [f"gamma_hat_{i + 1}" for i in range(l_r)]
        cols += ["snr_hat", "fft_size", "peak_bin", "peak_offset"]
        return cols

    def csv_row(self) -> list:
        row = [self.cfo_hat]
        row += list(self.beta_hat)
        row += list(self.alpha_hat)
        row += [self.noise_var_hat]
        row += list(self.gamma_hat)
        row += [self.snr_hat, self.fft_size, self.peak_bin, self.peak_offset]
        return row


def default_fft_size(n: int) -> int:
    """Power-of-two FFT length with at least 16x zero padding."""
    return 1 << int(np.ceil(np.log2(16 * n)))


def matched_filter(r_i: np.ndarray, t: TrainingBlock) -> np.ndarray:
    """Multiply one chain by the conjugate training sequence: y[n] = t*[n] r_i[n]."""
    r_i = np.asarray(r_i, dtype=complex)
    if r_i.shape != t.symbols.shape:
        raise LengthMismatch("chain and training sequence lengths differ")
    return np.conj(t.symbols) * r_i


def parabolic_interp(y_left: float, y_center: float, y_right: float):
    """Vertex of the parabola through three equispaced samples around a peak.

    Returns ``(p, y_peak)`` with p in [-1/2, 1/2] bins relative to the center
    sample.  A flat triple (zero curvature) yields p = 0.
    """
    if y_center < y_left or y_center < y_right:
        raise InvalidParams("center sample must be a local maximum")
    denom = y_left - 2.0 * y_center + y_right
    if denom == 0.0:
        return 0.0, float(y_center)
    p = 0.5 * (y_left - y_right) / denom
    y_peak = y_center - 0.25 * (y_left - y_right) * p
    return float(p), float(y_peak)


def estimate_cfo(r: ReceivedBlock, t: TrainingBlock, fft_size: int):
    """CFO from the peak of the summed squared periodograms of the matched outputs.

    Returns ``(cfo_hat, peak_bin, peak_offset, search)``.  The spectrum is
    evaluated on a zero-padded FFT grid of length ``fft_size`` and the peak is
    refined by parabolic interpolation over its cyclic neighbors.  The refined
    point is kept only when it does not lower the objective relative to the
    grid peak, so the estimate never loses to any grid frequency.
    """
    if fft_size < r.n_samples:
        raise InvalidParams("fft_size must be >= the block length")
    if fft_size & (fft_size - 1):
        raise InvalidParams("fft_size must be a power of two")
    if r.n_samples != t.n_samples:
        raise LengthMismatch("block and training sequence lengths differ")
    matched = r.samples * np.conj(t.symbols)[None, :]
    outputs = np.fft.fft(matched, n=fft_size, axis=1)
    spectrum = np.sum(np.abs(outputs) ** 2, axis=0)
    if not np.any(spectrum > 0):
        raise DegenerateSpectrum("periodogram is identically zero")
    peak_bin = int(np.argmax(spectrum))  # ties resolve to the lowest bin
    left = spectrum[(peak_bin - 1) % fft_size]
    right = spectrum[(peak_bin + 1) % fft_size]
    peak_offset, _ = parabolic_interp(left, spectrum[peak_bin], right)
    refined = float(wrap_cfo((peak_bin + peak_offset) / fft_size))
    on_grid = float(wrap_cfo(peak_bin / fft_size))
    if periodogram_objective(r, t, refined) >= periodogram_objective(r, t, on_grid):
        cfo_hat = refined
    else:
        cfo_hat, peak_offset = on_grid, 0.0
    search = PeriodogramSearch(spectrum=spectrum, matched_outputs=outputs)
    return cfo_hat, peak_bin, peak_offset, search


def estimate_phase(r_i: np.ndarray, t: TrainingBlock, cfo_hat: float) -> float:
    """Phase offset of one chain: four-quadrant angle of the corrected matched sum.

    A statistic of exactly zero carries no phase information and maps to 0.
    """
    y = matched_filter(r_i, t)
    n = np.arange(y.shape[0])
    statistic = np.sum(y * np.exp(-1j * TWO_PI * cfo_hat * n))
    if statistic == 0:
        return 0.0
    return float(wrap_phase(np.angle(statistic)))


def estimate_amplitude(r_i: np.ndarray, t: TrainingBlock, cfo_hat: float) -> float:
    """Amplitude of one chain: modulus of the corrected matched sum over N."""
    y = matched_filter(r_i, t)
    n = np.arange(y.shape[0])
    statistic = np.sum(y * np.exp(-1j * TWO_PI * cfo_hat * n))
    return float(np.abs(statistic) / y.shape[0])


def estimate_noise_var(r: ReceivedBlock, t: TrainingBlock, cfo_hat: float,
                       alpha_hat: np.ndarray, beta_hat: np.ndarray) -> float:
    """Mean squared residual per complex sample against the fitted model."""
    gains = np.asarray(alpha_hat) * np.exp(1j * np.asarray(beta_hat))
    fitted = model_block(gains, cfo_hat, t.symbols)
    resid = r.samples - fitted
    return float(np.sum(np.abs(resid) ** 2) / (r.n_chains * r.n_samples))


def estimate_all(r: ReceivedBlock, t: TrainingBlock, fft_size: int = None) -> EstimateReport:
    """Run the full chain: CFO, then phases, amplitudes, noise variance, SNRs."""
    if fft_size is None:
        fft_size = default_fft_size(r.n_samples)
    cfo_hat, peak_bin, peak_offset, _ = estimate_cfo(r, t, fft_size)

    n = np.arange(r.n_samples)
    rotation = np.exp(-1j * TWO_PI * cfo_hat * n)
    statistics = np.sum(r.samples * (np.conj(t.symbols) * rotation)[None, :], axis=1)
    beta_hat = wrap_phase(np.angle(statistics))
    beta_hat[statistics == 0] = 0.0
    alpha_hat = np.abs(statistics) / r.n_samples

    noise_var_hat = estimate_noise_var(r, t, cfo_hat, alpha_hat, beta_hat)
    noiseless = noise_var_hat == 0.0
    if noiseless:
        gamma_hat = np.full(r.n_chains, np.inf)
        snr_hat = np.inf
    else:
        gamma_hat = alpha_hat**2 / noise_var_hat
        snr_hat = float(np.mean(gamma_hat))
    return EstimateReport(cfo_hat=cfo_hat, beta_hat=beta_hat, alpha_hat=alpha_hat,
                          noise_var_hat=noise_var_hat, gamma_hat=gamma_hat,
                          snr_hat=snr_hat, fft_size=fft_size, peak_bin=peak_bin,
                          peak_offset=peak_offset, noiseless=noiseless)


def periodogram_objective(r: ReceivedBlock, t: TrainingBlock, freq: float) -> float:
    """Direct evaluation of the CFO objective (1/N) sum_i |sum_n t*[n] r_i[n] e^{-j2pi f n}|^2."""
    n = np.arange(r.n_samples)
    rotation = np.exp(-1j * TWO_PI * freq * n)
    sums = np.sum(r.samples * (np.conj(t.symbols) * rotation)[None, :], axis=1)
    return float(np.sum(np.abs(sums) ** 2) / r.n_samples)
