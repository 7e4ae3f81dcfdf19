"""Synthetic multi-chain receiver blocks: clustered channels, hybrid front ends,
QPSK training, and whitened observations.

The observation model for chain i at time n is

    r_i[n] = alpha_i * exp(j*(beta_i + 2*pi*cfo*n)) * t[n] + w_i[n],

with w_i[n] circular complex Gaussian of total variance ``noise_var`` per
complex sample.  The per-chain complex gains collapse the channel, precoder,
combiner, and noise whitener into ``effective_gains``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CholeskyFailure, DimensionMismatch, InvalidParams, LengthMismatch

TWO_PI = 2.0 * np.pi

# normalized QPSK alphabet: unit modulus, 45-degree offset
QPSK_ALPHABET = np.exp(1j * (np.pi / 4.0 + np.pi / 2.0 * np.arange(4)))


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def wrap_phase(x):
    """Wrap angle(s) to [0, 2*pi)."""
    return np.mod(x, TWO_PI)


def wrap_cfo(x):
    """Wrap normalized frequency(ies) to [-1/2, 1/2)."""
    return np.mod(np.asarray(x) + 0.5, 1.0) - 0.5


@dataclass(frozen=True)
class ChannelConfig:
    """Geometry-free clustered channel description.

    Attributes
    ----------
    n_tx, n_rx : int
        Transmit / receive antenna counts.
    clusters : int
        Number of scattering clusters.
    rays_per_cluster : tuple of int
        Ray count per cluster (length ``clusters``).
    path_loss : float
        Scalar path loss, > 0.
    seed : int
        RNG seed for gain/angle draws.
    """

    n_tx: int
    n_rx: int
    clusters: int
    rays_per_cluster: tuple
    path_loss: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_tx < 1 or self.n_rx < 1:
            raise InvalidParams("antenna counts must be >= 1")
        if self.clusters < 1:
            raise InvalidParams("cluster count must be >= 1")
        rays = tuple(int(r) for r in self.rays_per_cluster)
        if len(rays) != self.clusters or any(r < 1 for r in rays):
            raise InvalidParams("rays_per_cluster must list >= 1 rays for each cluster")
        object.__setattr__(self, "rays_per_cluster", rays)
        if not self.path_loss > 0:
            raise InvalidParams("path_loss must be > 0")

    @property
    def total_rays(self) -> int:
        return sum(self.rays_per_cluster)


@dataclass(frozen=True)
class ChannelRealization:
    """One channel draw: per-ray gains/angles plus the assembled matrix."""

    gains: np.ndarray      # complex, (total_rays,)
    aoa: np.ndarray        # radians in [0, 2*pi), (total_rays,)
    aod: np.ndarray        # radians in [0, 2*pi), (total_rays,)
    matrix: np.ndarray     # complex, (n_rx, n_tx)
    scale: float           # sqrt(n_rx*n_tx / (path_loss*total_rays))

    def __post_init__(self):
        for name in ("gains", "aoa", "aod", "matrix"):
            object.__setattr__(self, name, _freeze(np.asarray(getattr(self, name))))

    @property
    def n_rx(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_tx(self) -> int:
        return self.matrix.shape[1]

    def receive_steering(self) -> np.ndarray:
        """Stacked receive steering vectors, one column per ray."""
        return np.column_stack([steering_vector(a, self.n_rx) for a in self.aoa])

    def transmit_steering(self) -> np.ndarray:
        """Stacked transmit steering vectors, one column per ray."""
        return np.column_stack([steering_vector(a, self.n_tx) for a in self.aod])

    def gain_diagonal(self) -> np.ndarray:
        """Diagonal gain matrix including the normalization scale."""
        return np.diag(self.scale * self.gains)


def steering_vector(angle: float, n_ant: int) -> np.ndarray:
    """Unit-norm array response for a half-wavelength uniform linear array.

    Entry k is exp(j*pi*k*sin(angle)) / sqrt(n_ant).
    """
    if n_ant < 1:
        raise InvalidParams("n_ant must be >= 1")
    k = np.arange(n_ant)
    return np.exp(1j * np.pi * k * np.sin(angle)) / np.sqrt(n_ant)


def assemble_channel(cfg: ChannelConfig, gains: np.ndarray, aoa: np.ndarray,
                     aod: np.ndarray) -> ChannelRealization:
    """Build the channel matrix from explicit per-ray gains and angles."""
    gains = np.asarray(gains, dtype=complex)
    aoa = np.asarray(aoa, dtype=float)
    aod = np.asarray(aod, dtype=float)
    r_tot = cfg.total_rays
    if not (gains.shape == aoa.shape == aod.shape == (r_tot,)):
        raise DimensionMismatch("gains/aoa/aod must all have one entry per ray")
    scale = np.sqrt(cfg.n_rx * cfg.n_tx / (cfg.path_loss * r_tot))
    h = np.zeros((cfg.n_rx, cfg.n_tx), dtype=complex)
    for g, phi, theta in zip(gains, aoa, aod):
        a_r = steering_vector(phi, cfg.n_rx)
        a_t = steering_vector(theta, cfg.n_tx)
        h += g * np.outer(a_r, a_t.conj())
    h *= scale
    return ChannelRealization(gains=gains, aoa=aoa, aod=aod, matrix=h, scale=scale)


def gen_channel(cfg: ChannelConfig) -> ChannelRealization:
    """Draw a channel realization: CN(0,1) ray gains, uniform angles."""
    rng = np.random.default_rng(cfg.seed)
    r_tot = cfg.total_rays
    gains = (rng.standard_normal(r_tot) + 1j * rng.standard_normal(r_tot)) / np.sqrt(2.0)
    aoa = rng.uniform(0.0, TWO_PI, r_tot)
    aod = rng.uniform(0.0, TWO_PI, r_tot)
    return assemble_channel(cfg, gains, aoa, aod)


@dataclass(frozen=True)
class FrontEnd:
    """Hybrid precoder/combiner pair with the noise whitener of the combiner.

    ``whitener`` is the upper-triangular Cholesky factor D of C = W^H W with
    the convention D^H D = C, so D^{-H} W^H whitens the combined noise.
    """

    precoder: np.ndarray        # (n_tx, n_s)
    combiner: np.ndarray        # (n_rx, l_rx)
    spatial_filter: np.ndarray  # (l_tx,), unit norm
    whitener: np.ndarray        # (l_rx, l_rx), upper triangular
    precoder_rf: np.ndarray = None   # analog factors kept for introspection
    combiner_rf: np.ndarray = None

    def __post_init__(self):
        for name in ("precoder", "combiner", "spatial_filter", "whitener",
                     "precoder_rf", "combiner_rf"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _freeze(np.asarray(value, dtype=complex)))

    @classmethod
    def from_parts(cls, precoder, combiner, spatial_filter,
                   precoder_rf=None, combiner_rf=None) -> "FrontEnd":
        """Assemble a front end, computing the whitener from the combiner."""
        combiner = np.asarray(combiner, dtype=complex)
        gram = combiner.conj().T @ combiner
        try:
            lower = np.linalg.cholesky(gram)
        except np.linalg.LinAlgError as exc:
            raise CholeskyFailure("combiner Gram matrix W^H W is not positive definite") from exc
        return cls(precoder=np.asarray(precoder, dtype=complex),
                   combiner=combiner,
                   spatial_filter=np.asarray(spatial_filter, dtype=complex),
                   whitener=lower.conj().T,
                   precoder_rf=precoder_rf, combiner_rf=combiner_rf)

    @property
    def n_chains(self) -> int:
        return self.combiner.shape[1]


def gen_front_end(n_tx: int, n_rx: int, l_tx: int, l_rx: int, n_s: int,
                  seed=0) -> FrontEnd:
    """Draw a random hybrid front end.

    RF factors get i.i.d. uniform-phase unit-modulus entries; baseband factors
    are i.i.d. complex Gaussian with normalized columns; the spatial filter is
    unit-modulus QPSK scaled to unit norm.
    """
    if l_rx > n_rx or l_tx > n_tx:
        raise InvalidParams("chain counts cannot exceed antenna counts")
    if n_s > l_tx:
        raise InvalidParams("stream count cannot exceed transmit chains")
    rng = np.random.default_rng(seed)

    def rf(rows, cols):
        return np.exp(1j * rng.uniform(0.0, TWO_PI, (rows, cols)))

    def bb(rows, cols):
        m = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))
        return m / np.linalg.norm(m, axis=0, keepdims=True)

    f_rf = rf(n_tx, l_tx)
    w_rf = rf(n_rx, l_rx)
    precoder = f_rf @ bb(l_tx, n_s)
    combiner = w_rf @ bb(l_rx, l_rx)
    q = QPSK_ALPHABET[rng.integers(0, 4, l_tx)] / np.sqrt(l_tx)
    return FrontEnd.from_parts(precoder, combiner, q, precoder_rf=f_rf, combiner_rf=w_rf)


def effective_gains(fe: FrontEnd, ch: ChannelRealization) -> np.ndarray:
    """Per-chain complex gains D^{-H} W^H H F q of the whitened model."""
    w, h, f, q = fe.combiner, ch.matrix, fe.precoder, fe.spatial_filter
    if w.shape[0] != h.shape[0]:
        raise DimensionMismatch("combiner rows must match channel receive dimension")
    if h.shape[1] != f.shape[0]:
        raise DimensionMismatch("channel transmit dimension must match precoder rows")
    if f.shape[1] != q.shape[0]:
        raise DimensionMismatch("spatial filter length must match precoder columns")
    combined = w.conj().T @ (h @ (f @ q))
    # D^{-H} x via one triangular solve; D^H is lower triangular
    return np.linalg.solve(fe.whitener.conj().T, combined)


@dataclass(frozen=True)
class SyncParams:
    """Parameter vector of the whitened model: per-chain amplitudes and phase
    offsets, carrier frequency offset (cycles/sample), and noise variance."""

    amplitudes: np.ndarray  # (l_r,), >= 0
    phases: np.ndarray      # (l_r,), in [0, 2*pi)
    cfo: float              # in [-1/2, 1/2)
    noise_var: float        # >= 0 (0 means noiseless synthesis)

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=float)
        phases = np.asarray(self.phases, dtype=float)
        if amplitudes.ndim != 1 or phases.shape != amplitudes.shape:
            raise InvalidParams("amplitudes and phases must be 1-D with equal length")
        if np.any(amplitudes < 0):
            raise InvalidParams("amplitudes must be non-negative")
        if np.any((phases < 0) | (phases >= TWO_PI)):
            raise InvalidParams("phases must lie in [0, 2*pi)")
        if not (-0.5 <= self.cfo < 0.5):
            raise InvalidParams("cfo must lie in [-1/2, 1/2)")
        if self.noise_var < 0:
            raise InvalidParams("noise_var must be >= 0")
        object.__setattr__(self, "amplitudes", _freeze(amplitudes))
        object.__setattr__(self, "phases", _freeze(phases))
        object.__setattr__(self, "cfo", float(self.cfo))
        object.__setattr__(self, "noise_var", float(self.noise_var))

    @classmethod
    def from_effective_gains(cls, gains, cfo, noise_var) -> "SyncParams":
        """Split complex per-chain gains into amplitudes and wrapped phases."""
        gains = np.asarray(gains, dtype=complex)
        return cls(amplitudes=np.abs(gains), phases=wrap_phase(np.angle(gains)),
                   cfo=cfo, noise_var=noise_var)

    @property
    def n_chains(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def complex_gains(self) -> np.ndarray:
        return self.amplitudes * np.exp(1j * self.phases)

    @property
    def trace_p(self) -> float:
        """Sum of squared amplitudes (trace of the gain power matrix)."""
        return float(np.sum(self.amplitudes**2))

    @property
    def gamma(self) -> np.ndarray:
        """Per-chain SNR amplitudes^2 / noise_var."""
        if self.noise_var <= 0:
            raise InvalidParams("per-chain SNR undefined for noise_var = 0")
        return self.amplitudes**2 / self.noise_var

    @property
    def snr(self) -> float:
        """Average post-combining SNR across chains."""
        return float(np.mean(self.gamma))


@dataclass(frozen=True)
class TrainingBlock:
    """Known unit-modulus scalar training sequence."""

    symbols: np.ndarray  # complex, (n,)

    def __post_init__(self):
        symbols = np.asarray(self.symbols, dtype=complex)
        if symbols.ndim != 1 or symbols.shape[0] < 2:
            raise InvalidParams("training sequence needs at least 2 symbols")
        if np.max(np.abs(np.abs(symbols) - 1.0)) > 1e-12:
            raise InvalidParams("training symbols must have unit modulus")
        object.__setattr__(self, "symbols", _freeze(symbols))

    @property
    def n_samples(self) -> int:
        return self.symbols.shape[0]


def gen_training(n: int, seed=0) -> TrainingBlock:
    """Draw n i.i.d. normalized QPSK training symbols."""
    if n < 2:
        raise InvalidParams("training length must be >= 2")
    rng = np.random.default_rng(seed)
    return TrainingBlock(symbols=QPSK_ALPHABET[rng.integers(0, 4, n)])


@dataclass(frozen=True)
class ReceivedBlock:
    """Whitened multi-chain observation, one row per RF chain."""

    samples: np.ndarray  # complex, (l_r, n)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 2:
            raise InvalidParams("samples must be a 2-D (chains x time) array")
        object.__setattr__(self, "samples", _freeze(samples))

    @property
    def n_chains(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    def to_csv(self, path) -> None:
        """Write one row per chain with alternating re,im columns."""
        flat = np.empty((self.n_chains, 2 * self.n_samples))
        flat[:, 0::2] = self.samples.real
        flat[:, 1::2] = self.samples.imag
        with open(path, "w", encoding="utf-8") as fh:
            for row in flat:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "ReceivedBlock":
        """Read a block written by :meth:`to_csv`.

        Raises LengthMismatch when rows disagree in length or a row has an
        odd number of columns.
        """
        rows = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    vals = [float(v) for v in line.split(",")]
                except ValueError as exc:
                    raise LengthMismatch(f"row {lineno}: non-numeric field") from exc
                if len(vals) % 2 != 0:
                    raise LengthMismatch(f"row {lineno}: odd column count {len(vals)}")
                rows.append(vals)
        if not rows:
            raise LengthMismatch("sample CSV is empty")
        if len({len(r) for r in rows}) != 1:
            raise LengthMismatch("rows have differing column counts")
        arr = np.asarray(rows)
        return cls(samples=arr[:, 0::2] + 1j * arr[:, 1::2])


def model_block(gains: np.ndarray, cfo: float, symbols: np.ndarray) -> np.ndarray:
    """Noise-free observation matrix: column n is exp(j*2*pi*cfo*n)*gains*t[n]."""
    gains = np.asarray(gains, dtype=complex)
    symbols = np.asarray(symbols, dtype=complex)
    n = np.arange(symbols.shape[0])
    rotation = np.exp(1j * TWO_PI * cfo * n)
    return gains[:, None] * (rotation * symbols)[None, :]


def synthesize(params: SyncParams, t: TrainingBlock, seed=0) -> ReceivedBlock:
    """Generate one whitened received block for the given parameters."""
    rng = np.random.default_rng(seed)
    mean = model_block(params.complex_gains, params.cfo, t.symbols)
    shape = mean.shape
    if params.noise_var > 0:
        scale = np.sqrt(params.noise_var / 2.0)
        noise = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    else:
        noise = 0.0
    return ReceivedBlock(samples=mean + noise)
