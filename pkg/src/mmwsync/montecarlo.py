"""SNR-sweep simulation campaign: synthesize, estimate, and aggregate
normalized bias, normalized sample variance, and normalized bounds.

Per SNR point the campaign draws amplitudes from U[0,1], phase offsets from
U(0,2*pi), and the CFO from U[-1/2,1/2), then fixes the noise variance so the
average post-combining SNR hits the grid point exactly.  Parameters are
redrawn every trial by default; the fixed-parameter mode draws them once per
campaign, which is the right conditioning for variance-versus-bound studies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import crlb as crlb_mod
from .errors import InvalidParams, MmwSyncError, ZeroTruth
from .estimators import EstimateReport, default_fft_size, estimate_all
from .signal_model import SyncParams, gen_training, synthesize, wrap_cfo

_MAX_REDRAWS = 100


def default_snr_grid() -> tuple:
    """-15 dB to +10 dB in 2.5 dB steps."""
    return tuple(-15.0 + 2.5 * k for k in range(11))


@dataclass(frozen=True)
class McConfig:
    """Campaign configuration; defaults reproduce the reference simulation."""

    snr_grid_db: tuple = field(default_factory=default_snr_grid)
    n_trials: int = 1000
    n: int = 64
    l_r: int = 4
    l_t: int = 4
    n_tx: int = 32
    n_rx: int = 32
    fft_size: int = None
    seed: int = 3
    redraw_params_per_trial: bool = True

    def __post_init__(self):
        if self.n_trials < 1:
            raise InvalidParams("n_trials must be >= 1")
        if not self.snr_grid_db:
            raise InvalidParams("SNR grid must be non-empty")
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        if self.fft_size is None:
            object.__setattr__(self, "fft_size", default_fft_size(self.n))

    def to_dict(self) -> dict:
        return {
            "snr_grid_db": list(self.snr_grid_db),
            "n_trials": self.n_trials,
            "n": self.n,
            "l_r": self.l_r,
            "l_t": self.l_t,
            "n_tx": self.n_tx,
            "n_rx": self.n_rx,
            "fft_size": self.fft_size,
            "seed": self.seed,
            "redraw_params_per_trial": self.redraw_params_per_trial,
        }


@dataclass(frozen=True)
class McCell:
    """Aggregated result for one (SNR point, parameter) pair.

    The standard errors are Monte Carlo uncertainties of the aggregate
    itself: ``bias_std_error`` for the mean, ``variance_std_error`` for the
    sample variance (fourth-moment formula), ``ncrlb_std_error`` for the mean
    per-trial bound (zero in fixed-parameter mode).
    """

    snr_db: float
    parameter: str
    normalized_bias: float
    normalized_variance: float
    normalized_crlb: float
    n_trials_effective: int
    bias_std_error: float
    variance_std_error: float
    ncrlb_std_error: float

    def ratio(self) -> float:
        return self.normalized_variance / self.normalized_crlb

    def ratio_std_error(self) -> float:
        rel_v = self.variance_std_error / self.normalized_variance
        rel_c = self.ncrlb_std_error / self.normalized_crlb
        return self.ratio() * float(np.hypot(rel_v, rel_c))


@dataclass(frozen=True)
class McReport:
    """Full campaign output in stable (grid, parameter) order."""

    config: McConfig
    cells: tuple
    n_redrawn: int
    n_failed: int

    def cell(self, snr_db: float, parameter: str) -> McCell:
        for c in self.cells:
            if c.snr_db == snr_db and c.parameter == parameter:
                return c
        raise KeyError((snr_db, parameter))

    def parameters(self) -> list:
        seen = []
        for c in self.cells:
            if c.parameter not in seen:
                seen.append(c.parameter)
        return seen

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("snr_db,parameter,normalized_bias,normalized_variance,"
                     "normalized_crlb,n_trials_effective\n")
            for c in self.cells:
                fh.write(f"{c.snr_db!r},{c.parameter},{c.normalized_bias!r},"
                         f"{c.normalized_variance!r},{c.normalized_crlb!r},"
                         f"{c.n_trials_effective}\n")

    def write_metadata(self, path) -> None:
        meta = {
            "config": self.config.to_dict(),
            "n_redrawn": self.n_redrawn,
            "n_failed": self.n_failed,
            "crlb_aggregation": "mean of per-trial normalized bounds",
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def report_parameter_names(l_r: int) -> list:
    return crlb_mod.parameter_names(l_r) + [f"gamma_{i + 1}" for i in range(l_r)] + ["snr"]


def wrap_principal_phase(x):
    """Wrap phase difference(s) into (-pi, pi]."""
    d = np.mod(x, 2.0 * np.pi)
    return np.where(d > np.pi, d - 2.0 * np.pi, d)


def normalized_error(truth: SyncParams, est: EstimateReport) -> dict:
    """Per-parameter (estimate - truth)/truth with principal wrapping for the
    circular parameters.  Raises ZeroTruth when a normalizer is exactly zero."""
    l_r = truth.n_chains
    values = {}
    for i in range(l_r):
        values[f"alpha_{i + 1}"] = (truth.amplitudes[i], est.alpha_hat[i] - truth.amplitudes[i])
        values[f"beta_{i + 1}"] = (truth.phases[i],
                                   float(wrap_principal_phase(est.beta_hat[i] - truth.phases[i])))
    values["noise_var"] = (truth.noise_var, est.noise_var_hat - truth.noise_var)
    values["cfo"] = (truth.cfo, float(wrap_cfo(est.cfo_hat - truth.cfo)))
    gamma = truth.gamma
    for i in range(l_r):
        values[f"gamma_{i + 1}"] = (gamma[i], est.gamma_hat[i] - gamma[i])
    values["snr"] = (truth.snr, est.snr_hat - truth.snr)

    out = {}
    for name in report_parameter_names(l_r):
        ref, err = values[name]
        if ref == 0:
            raise ZeroTruth(f"true {name} is zero; normalized error undefined",
                            parameter=name)
        out[name] = err / ref
    return out


def _normalized_crlb(truth: SyncParams, n: int) -> dict:
    report = crlb_mod.crlb_numeric(truth, n)
    l_r = truth.n_chains
    gamma = truth.gamma
    out = {}
    for i in range(l_r):
        out[f"alpha_{i + 1}"] = report.var_alpha[i] / truth.amplitudes[i] ** 2
        out[f"beta_{i + 1}"] = report.var_beta[i] / truth.phases[i] ** 2
        out[f"gamma_{i + 1}"] = report.var_gamma[i] / gamma[i] ** 2
    out["noise_var"] = report.var_noise_var / truth.noise_var**2
    out["cfo"] = report.var_cfo / truth.cfo**2
    out["snr"] = report.var_snr / truth.snr**2
    return out


def draw_raw_params(rng, l_r: int):
    """Draw (amplitudes, phases, cfo) from the reference distributions.

    Raises ZeroTruth when any drawn value lands exactly on zero.
    """
    amplitudes = rng.uniform(0.0, 1.0, l_r)
    phases = rng.uniform(0.0, 2.0 * np.pi, l_r)
    cfo = rng.uniform(-0.5, 0.5)
    if np.any(amplitudes == 0):
        raise ZeroTruth("drew a zero amplitude", parameter="alpha")
    if np.any(phases == 0):
        raise ZeroTruth("drew a zero phase", parameter="beta")
    if cfo == 0:
        raise ZeroTruth("drew a zero CFO", parameter="cfo")
    return amplitudes, phases, cfo


def sync_params_at_snr(amplitudes, phases, cfo, l_r: int, snr_db: float) -> SyncParams:
    """Pin the noise variance so the average post-combining SNR hits the target."""
    snr_lin = 10.0 ** (snr_db / 10.0)
    noise_var = float(np.sum(np.asarray(amplitudes) ** 2)) / (l_r * snr_lin)
    return SyncParams(amplitudes=amplitudes, phases=phases, cfo=cfo, noise_var=noise_var)


def _draw_with_retry(seed_seq, l_r: int):
    """Draw raw parameters, redrawing on ZeroTruth; returns (triple, n_redrawn)."""
    for attempt, child in enumerate(seed_seq.spawn(_MAX_REDRAWS)):
        try:
            return draw_raw_params(np.random.default_rng(child), l_r), attempt
        except ZeroTruth:
            continue
    raise MmwSyncError("exceeded redraw budget for zero-valued truth draws")


def run_campaign(cfg: McConfig) -> McReport:
    """Execute the campaign described by ``cfg`` and aggregate per-cell stats.

    In redraw mode a fresh parameter triple is drawn for every trial.  In
    fixed mode one triple is drawn for the whole campaign and only the noise
    variance moves with the SNR grid, keeping cells comparable across points.
    """
    master = np.random.SeedSequence(cfg.seed)
    children = master.spawn(2 + len(cfg.snr_grid_db))
    training = gen_training(cfg.n, seed=children[0])
    names = report_parameter_names(cfg.l_r)

    cells = []
    n_redrawn = 0
    n_failed = 0
    if not cfg.redraw_params_per_trial:
        fixed_triple, redraws = _draw_with_retry(children[1], cfg.l_r)
        n_redrawn += redraws

    for point_idx, snr_db in enumerate(cfg.snr_grid_db):
        point_seq = children[2 + point_idx]
        param_seq, noise_seq = point_seq.spawn(2)
        noise_children = noise_seq.spawn(cfg.n_trials)

        errors = {name: [] for name in names}
        ncrlbs = {name: [] for name in names}

        if not cfg.redraw_params_per_trial:
            params = sync_params_at_snr(*fixed_triple, cfg.l_r, snr_db)
            fixed_ncrlb = _normalized_crlb(params, cfg.n)

        param_children = param_seq.spawn(cfg.n_trials) if cfg.redraw_params_per_trial else None
        for trial in range(cfg.n_trials):
            if cfg.redraw_params_per_trial:
                triple, redraws = _draw_with_retry(param_children[trial], cfg.l_r)
                n_redrawn += redraws
                params = sync_params_at_snr(*triple, cfg.l_r, snr_db)
                trial_ncrlb = _normalized_crlb(params, cfg.n)
            else:
                trial_ncrlb = fixed_ncrlb
            block = synthesize(params, training, seed=noise_children[trial])
            try:
                est = estimate_all(block, training, cfg.fft_size)
                errs = normalized_error(params, est)
            except MmwSyncError:
                n_failed += 1
                continue
            for name in names:
                errors[name].append(errs[name])
                ncrlbs[name].append(trial_ncrlb[name])

        for name in names:
            cells.append(_aggregate_cell(snr_db, name, errors[name], ncrlbs[name]))
    return McReport(config=cfg, cells=tuple(cells), n_redrawn=n_redrawn, n_failed=n_failed)


def _aggregate_cell(snr_db: float, name: str, errors: list, ncrlbs: list) -> McCell:
    e = np.asarray(errors)
    c = np.asarray(ncrlbs)
    n_eff = e.shape[0]
    if n_eff < 2:
        nan = float("nan")
        return McCell(snr_db=snr_db, parameter=name,
                      normalized_bias=float(e.mean()) if n_eff else nan,
                      normalized_variance=nan,
                      normalized_crlb=float(c.mean()) if n_eff else nan,
                      n_trials_effective=n_eff, bias_std_error=nan,
                      variance_std_error=nan, ncrlb_std_error=nan)
    nvar = float(e.var(ddof=1))
    centered = e - e.mean()
    m2 = float(np.mean(centered**2))
    m4 = float(np.mean(centered**4))
    var_of_var = max(m4 - m2**2 * (n_eff - 3) / (n_eff - 1), 0.0) / n_eff
    return McCell(snr_db=snr_db, parameter=name,
                  normalized_bias=float(e.mean()),
                  normalized_variance=nvar,
                  normalized_crlb=float(c.mean()),
                  n_trials_effective=n_eff,
                  bias_std_error=float(e.std(ddof=1) / np.sqrt(n_eff)),
                  variance_std_error=float(np.sqrt(var_of_var)),
                  ncrlb_std_error=float(c.std(ddof=1) / np.sqrt(n_eff)))
