"""Command line entry point: ``proxdec {sweep,curve,pullin,gen-code}``."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .bench import (DETECTORS, ExperimentSpec, emit_csv, run_error_curve, run_hamming_pullin,
                    run_sweep)
from .codepoly import write_trajectory_csv
from .detect import DecoderConfig
from .ldpc import make_regular_ldpc, save_alist



def _floats(text: str) -> tuple[float, ...]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            # start:stop:step, stop inclusive
            start, stop, step = (float(v) for v in part.split(":"))
            out.extend(np.round(np.arange(start, stop + step / 2, step), 10).tolist())
        elif part:
            out.append(float(part))
    return tuple(out)


def _detectors(text: str) -> tuple[str, ...]:
    dets = tuple(d.strip() for d in text.split(",") if d.strip())
    bad = [d for d in dets if d not in DETECTORS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown detector(s) {bad}; choose from {DETECTORS}")
    return dets


def _eta(text: str) -> float:
    return math.inf if text.lower() in ("inf", "none") else float(text)


def _add_common(p: argparse.ArgumentParser, detectors: str) -> None:
    p.add_argument("--code", default="gen:204,3,6,1",
                   help="alist path, 'gen:n,wc,wr,seed' or 'hamming' (default: %(default)s)")
    p.add_argument("--detectors", type=_detectors, default=_detectors(detectors))
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--M", type=int, default=102, help="receive antennas")
    p.add_argument("--N", type=int, default=102, help="transmit antennas")
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--eta", type=_eta, default=1.5, help="box half-width, 'inf' disables")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--xi", type=float, default=5.0)
    p.add_argument("--omega", type=float, default=None, help="fixed step size (default: per channel)")
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--bp-iters", type=int, default=20)
    p.add_argument("--no-early-stop", action="store_true")
    p.add_argument("--warm-start", choices=("zero", "mmse"), default="zero")
    p.add_argument("--seed", type=int, default=2020)
    p.add_argument("--out", required=True, type=Path)


def _spec(args, snrs) -> ExperimentSpec:
    cfg = DecoderConfig(gamma=args.gamma, eta=args.eta, omega=args.omega, max_iters=args.iters,
                        alpha=args.alpha, xi=args.xi, bp_iters=args.bp_iters,
                        early_stop=not args.no_early_stop, warm_start=args.warm_start)
    return ExperimentSpec(code_source=args.code, detectors=args.detectors, snr_db_list=snrs,
                          rho=args.rho, trials=args.trials, M=args.M, N=args.N, decoder=cfg,
                          master_seed=args.seed)


def cmd_sweep(args) -> int:
    spec = _spec(args, args.snr_db)
    table = run_sweep(spec, workers=args.workers)
    emit_csv(table, args.out)
    for row in sorted(table.rows):
        print(f"{row[0]:>9s}  {row[1]:6.2f} dB  BER {row[6]:.3e}  ({row[5]}/{row[4]})")
    return 0


def cmd_curve(args) -> int:
    spec = _spec(args, (args.snr_db,))
    table = run_error_curve(spec, args.snr_db)
    emit_csv(table, args.out)
    for det in sorted({r[0] for r in table.rows}):
        s = table.series(det)
        print(f"{det:>9s}  start {s[0]:.3f}  final {s[-1]:.3f}")
    return 0


def cmd_pullin(args) -> int:
    res = run_hamming_pullin(args.sigma, args.gamma, args.trials, args.iters, args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    for k, traj in enumerate(res.trajectories):
        write_trajectory_csv(traj, args.out / f"trajectory_{k:03d}.csv")
    print(f"trials {len(res.trajectories)}  converged {int(res.converged.sum())}  "
          f"codeword {int(res.at_codeword.sum())}  transmitted {int(res.at_transmitted.sum())}")
    return 0


def cmd_gen_code(args) -> int:
    H = make_regular_ldpc(args.n, args.wc, args.wr, np.random.default_rng(args.seed))
    save_alist(H, args.out)
    print(f"wrote {H.m}x{H.n} ({args.wc},{args.wr})-regular matrix to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proxdec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="BER sweep over an SNR grid")
    _add_common(p, ",".join(DETECTORS))
    p.add_argument("--snr-db", type=_floats, default=_floats("6:12:1"),
                   help="comma list and/or start:stop:step ranges (default: 6..12)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("curve", help="mean error value against iteration")
    _add_common(p, "proximal,tanh,mmse")
    p.add_argument("--snr-db", type=float, default=10.0)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("pullin", help="code-proximal iteration on the (7,4) Hamming code")
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=6)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--seed", type=int, default=2020)
    p.add_argument("--out", required=True, type=Path, help="directory for trajectory CSVs")
    p.set_defaults(func=cmd_pullin)

    p = sub.add_parser("gen-code", help="write a random regular LDPC matrix as alist")
    p.add_argument("--n", type=int, default=204)
    p.add_argument("--wc", type=int, default=3)
    p.add_argument("--wr", type=int, default=6)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_gen_code)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
