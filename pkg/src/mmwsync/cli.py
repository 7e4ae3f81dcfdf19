"""Command-line front end.

Subcommands
-----------
campaign    run the SNR-sweep simulation and write CSV/SVG reports
estimate    run the estimator chain on a synthesized scenario or a sample CSV
crlb        print closed-form and numeric bounds side by side
regularity  Monte Carlo check that the expected score vanishes at truth

Every command is deterministic given its config file; seeds come from the
config (or flags), never the clock.  Exit codes: 0 success, 2 input error,
3 numerical/singularity error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import crlb as crlb_mod
from . import config as cfg_mod
from . import svgplot
from .errors import ConfigError, MmwSyncError, SingularFim
from .estimators import default_fft_size, estimate_all
from .montecarlo import McConfig, default_snr_grid, run_campaign
from .signal_model import (
    ChannelConfig,
    ReceivedBlock,
    SyncParams,
    effective_gains,
    gen_channel,
    gen_front_end,
    gen_training,
    synthesize,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


def _load_config(path):
    if path is None:
        return {}
    return cfg_mod.parse_config(path)


def _out_dir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def _sync_params_from_config(cfg: dict) -> SyncParams:
    alphas = cfg_mod.get_float_list(cfg, "alphas")
    betas = cfg_mod.get_float_list(cfg, "betas")
    cfo = cfg_mod.get_float(cfg, "cfo")
    noise_var = cfg_mod.get_float(cfg, "noise_var")
    if len(alphas) != len(betas):
        raise ConfigError("alphas and betas must have the same length")
    return SyncParams(amplitudes=np.asarray(alphas), phases=np.asarray(betas),
                      cfo=cfo, noise_var=noise_var)


def _channel_sync_params(cfg: dict) -> SyncParams:
    """Derive per-chain gains through the channel/front-end chain."""
    chan_cfg = ChannelConfig(
        n_tx=cfg_mod.get_int(cfg, "n_tx", 32),
        n_rx=cfg_mod.get_int(cfg, "n_rx", 32),
        clusters=cfg_mod.get_int(cfg, "clusters", 4),
        rays_per_cluster=tuple(int(v) for v in cfg_mod.get_float_list(
            cfg, "rays_per_cluster", [10.0] * cfg_mod.get_int(cfg, "clusters", 4))),
        path_loss=cfg_mod.get_float(cfg, "path_loss", 1.0),
        seed=cfg_mod.get_int(cfg, "channel_seed", 0),
    )
    l_t = cfg_mod.get_int(cfg, "l_t", 4)
    l_r = cfg_mod.get_int(cfg, "l_r", 4)
    front = gen_front_end(chan_cfg.n_tx, chan_cfg.n_rx, l_t, l_r, n_s=l_t,
                          seed=cfg_mod.get_int(cfg, "front_end_seed", 0))
    gains = effective_gains(front, gen_channel(chan_cfg))
    return SyncParams.from_effective_gains(gains,
                                           cfo=cfg_mod.get_float(cfg, "cfo"),
                                           noise_var=cfg_mod.get_float(cfg, "noise_var"))


def cmd_campaign(args) -> int:
    cfg = _load_config(args.config)
    mc = McConfig(
        snr_grid_db=tuple(cfg_mod.get_float_list(cfg, "snr_grid_db", list(default_snr_grid()))),
        n_trials=args.trials or cfg_mod.get_int(cfg, "trials", 1000),
        n=cfg_mod.get_int(cfg, "n", 64),
        l_r=cfg_mod.get_int(cfg, "l_r", 4),
        l_t=cfg_mod.get_int(cfg, "l_t", 4),
        n_tx=cfg_mod.get_int(cfg, "n_tx", 32),
        n_rx=cfg_mod.get_int(cfg, "n_rx", 32),
        fft_size=args.fft_size or cfg_mod.get_int(cfg, "fft_size", 0) or None,
        seed=args.seed if args.seed is not None else cfg_mod.get_int(cfg, "seed", 1),
        redraw_params_per_trial=cfg_mod.get_bool(cfg, "redraw_params_per_trial", True),
    )
    out = _out_dir(args)
    report = run_campaign(mc)
    report.to_csv(os.path.join(out, "mc_report.csv"))
    report.write_metadata(os.path.join(out, "metadata.json"))
    print(f"wrote {os.path.join(out, 'mc_report.csv')} "
          f"({len(report.cells)} cells, {report.n_failed} failed trials)")
    if args.plot:
        _campaign_plots(report, out)
    return EXIT_OK


def _campaign_plots(report, out: str) -> None:
    grid = list(report.config.snr_grid_db)
    l_r = report.config.l_r

    def series(names, field, dashed=False):
        result = []
        for name in names:
            ys = [getattr(report.cell(s, name), field) for s in grid]
            label = name + (" bound" if dashed else "")
            result.append((label, grid, ys, dashed))
        return result

    amp_names = [f"alpha_{i + 1}" for i in range(l_r)] + ["noise_var"] \
        + [f"gamma_{i + 1}" for i in range(l_r)] + ["snr"]
    ang_names = [f"beta_{i + 1}" for i in range(l_r)] + ["cfo"]
    svgplot.line_plot(os.path.join(out, "bias_amplitude_snr.svg"),
                      "Normalized bias: amplitude and SNR parameters",
                      "average SNR [dB]", "normalized bias",
                      series(amp_names, "normalized_bias"))
    svgplot.line_plot(os.path.join(out, "bias_angular.svg"),
                      "Normalized bias: angular parameters",
                      "average SNR [dB]", "normalized bias",
                      series(ang_names, "normalized_bias"))
    var_names_amp = [f"alpha_{i + 1}" for i in range(l_r)] + ["snr"]
    svgplot.line_plot(os.path.join(out, "variance_amplitude_snr.svg"),
                      "Normalized variance vs bound: amplitudes and SNR",
                      "average SNR [dB]", "normalized variance",
                      series(var_names_amp, "normalized_variance")
                      + series(var_names_amp, "normalized_crlb", dashed=True),
                      log_y=True)
    svgplot.line_plot(os.path.join(out, "variance_angular.svg"),
                      "Normalized variance vs bound: angular parameters",
                      "average SNR [dB]", "normalized variance",
                      series(ang_names, "normalized_variance")
                      + series(ang_names, "normalized_crlb", dashed=True),
                      log_y=True)
    print(f"wrote 4 SVG plots to {out}")


def cmd_estimate(args) -> int:
    if args.config is None:
        raise ConfigError("estimate requires --config")
    cfg = _load_config(args.config)
    training_seed = cfg_mod.get_int(cfg, "training_seed", 0)

    if "samples_csv" in cfg:
        block = ReceivedBlock.from_csv(cfg_mod.get_str(cfg, "samples_csv"))
        training = gen_training(block.n_samples, seed=training_seed)
    else:
        if cfg_mod.get_bool(cfg, "channel", False):
            params = _channel_sync_params(cfg)
        else:
            params = _sync_params_from_config(cfg)
        n = cfg_mod.get_int(cfg, "n", 64)
        training = gen_training(n, seed=training_seed)
        block = synthesize(params, training, seed=cfg_mod.get_int(cfg, "seed", 0))

    fft_size = args.fft_size or cfg_mod.get_int(cfg, "fft_size", 0) \
        or default_fft_size(block.n_samples)
    report = estimate_all(block, training, fft_size)

    rows = list(zip(report.csv_header(), report.csv_row()))
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value}")

    out = _out_dir(args)
    path = os.path.join(out, "estimate.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(report.csv_header()) + "\n")
        fh.write(",".join(repr(v) if isinstance(v, float) else str(v)
                          for v in report.csv_row()) + "\n")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_crlb(args) -> int:
    if args.config is None:
        raise ConfigError("crlb requires --config")
    cfg = _load_config(args.config)
    params = _sync_params_from_config(cfg)
    n = cfg_mod.get_int(cfg, "n", 64)
    numeric = crlb_mod.crlb_numeric(params, n)
    closed_alpha = crlb_mod.crlb_closed_alpha(params, n)
    closed_nv = crlb_mod.crlb_closed_noise_var(params, n)
    snr_db = 10.0 * np.log10(params.snr)

    closed = {f"alpha_{i + 1}": closed_alpha[i] for i in range(params.n_chains)}
    closed["noise_var"] = closed_nv
    print(f"average SNR: {snr_db:.4f} dB   N = {n}   chains = {params.n_chains}")
    print(f"{'parameter':<12}{'closed-form':>16}{'numeric':>16}")
    for name, bound in numeric.rows():
        closed_str = f"{closed[name]:.10g}" if name in closed else "-"
        print(f"{name:<12}{closed_str:>16}{bound:>16.10g}")

    out = _out_dir(args)
    path = os.path.join(out, "crlb.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("snr_db,parameter,bound\n")
        for name, bound in numeric.rows():
            fh.write(f"{float(snr_db)!r},{name},{bound!r}\n")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_regularity(args) -> int:
    if args.config is None:
        raise ConfigError("regularity requires --config")
    cfg = _load_config(args.config)
    params = _sync_params_from_config(cfg)
    if params.noise_var <= 0:
        raise ConfigError("regularity requires noise_var > 0 (score undefined)")
    n = cfg_mod.get_int(cfg, "n", 64)
    trials = args.trials or cfg_mod.get_int(cfg, "trials", 10000)
    seed = args.seed if args.seed is not None else cfg_mod.get_int(cfg, "seed", 0)
    training = gen_training(n, seed=cfg_mod.get_int(cfg, "training_seed", 0))
    report = crlb_mod.regularity_check(params, training, trials, seed=seed)
    ok = report.within_band(4.0)
    print(f"score means over {trials} trials (4-sigma band):")
    print(f"{'parameter':<12}{'mean':>15}{'std error':>15}  verdict")
    for name, mean, se, good in zip(report.names, report.means, report.std_errors, ok):
        print(f"{name:<12}{mean:>15.6g}{se:>15.6g}  {'PASS' if good else 'FAIL'}")
    return EXIT_OK if bool(np.all(ok)) else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmwsync",
        description="Joint CFO/phase/amplitude/SNR estimation, bounds, and "
                    "Monte Carlo reports for a hybrid multi-chain receiver.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("campaign", cmd_campaign), ("estimate", cmd_estimate),
                     ("crlb", cmd_crlb), ("regularity", cmd_regularity)):
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH", help="key = value config file")
        p.add_argument("--out", metavar="DIR", help="output directory (default: cwd)")
        p.add_argument("--trials", type=int, metavar="N", help="override trial count")
        p.add_argument("--fft-size", type=int, metavar="K", help="override FFT length")
        p.add_argument("--seed", type=int, metavar="S", help="override master seed")
        p.add_argument("--plot", action="store_true", help="emit SVG plots")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SingularFim as exc:
        chain = "" if exc.chain is None else f" (chain {exc.chain + 1})"
        print(f"error: {exc}{chain}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, OSError, MmwSyncError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
