"""decode-sim command line interface.

Subcommands:
  run    Monte-Carlo FER/BER simulation over a list of Eb/N0 points.
  sweep  FER / iteration count as a function of mu or alpha.
  bench  Per-iteration scaling benchmark across codes (optionally
         comparing the numba and numpy backends).

Exit codes: 0 success, 2 validation error.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys

from .admm import DecodeError, DecoderParams
from .bp import BpParams
from .sim import (
    SimConfig,
    run_sim,
    scaling_bench,
    sweep,
    write_bench_csv,
    write_sweep_csv,
)


def parse_grid(spec: str) -> list[float]:
    """Either 'start:step:stop' (inclusive) or a comma-separated list."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                f"expected start:step:stop, got {spec!r}"
            )
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise argparse.ArgumentTypeError("grid step must be positive")
        out = []
        x = start
        while x <= stop + 1e-9:
            out.append(round(x, 10))
            x += step
        return out
    return [float(p) for p in spec.split(",") if p.strip()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=0.6)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--min-errors", type=int, default=200)
    p.add_argument("--max-frames", type=float, default=1e7)
    p.add_argument("--source", choices=("zeros", "random"), default="zeros")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--rate", type=float, default=None,
                   help="override the (n-m)/n rate used for sigma^2")
    p.add_argument("--out", default="report.csv")


def _sim_config(args, ebno_list) -> SimConfig:
    return SimConfig(
        code_path=args.code,
        decoder=getattr(args, "decoder", "qpadmm"),
        ebno_list=tuple(ebno_list),
        params=DecoderParams(
            mu=args.mu, alpha=args.alpha, epsilon=args.epsilon,
            max_iters=args.max_iters,
        ),
        bp_params=BpParams(max_iters=args.max_iters),
        min_errors=args.min_errors,
        max_frames=int(args.max_frames),
        codeword_source="all_zeros" if args.source == "zeros" else "random",
        seed=args.seed,
        workers=args.workers,
        rate_override=args.rate,
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="decode-sim")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="FER/BER vs Eb/N0")
    run.add_argument("--code", required=True, help="alist file")
    run.add_argument("--decoder", choices=("qpadmm", "bp", "both"),
                     default="qpadmm")
    run.add_argument("--ebno", required=True, type=parse_grid,
                     help="dB points, start:step:stop or comma list")
    _add_common(run)

    sw = sub.add_parser("sweep", help="FER vs mu or alpha at fixed SNR")
    sw.add_argument("--code", required=True)
    sw.add_argument("--axis", choices=("mu", "alpha"), required=True)
    sw.add_argument("--grid", required=True, type=parse_grid)
    sw.add_argument("--ebno", required=True, type=float)
    _add_common(sw)

    be = sub.add_parser("bench", help="per-iteration scaling benchmark")
    be.add_argument("--codes", required=True,
                    help="comma-separated alist files, increasing n")
    be.add_argument("--iters", type=int, default=10_000)
    be.add_argument("--mu", type=float, default=1.0)
    be.add_argument("--alpha", type=float, default=0.6)
    be.add_argument("--bp", action="store_true",
                    help="also time the sum-product BP decoder")
    be.add_argument("--compare-backends", action="store_true",
                    help="rerun the benchmark under the other kernel backend")
    be.add_argument("--out", default="bench.csv")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = _sim_config(args, args.ebno)
            report = run_sim(cfg)
            report.write_csv(args.out)
            manifest = os.path.splitext(args.out)[0] + ".json"
            report.write_manifest(manifest)
            for p in report.points:
                print(
                    f"{p.decoder} @ {p.ebno_db} dB: FER={p.fer:.4g} "
                    f"BER={p.ber:.4g} frames={p.frames} "
                    f"mean_iters={p.mean_iters:.1f}"
                )
            print(f"wrote {args.out} and {manifest}")
        elif args.command == "sweep":
            cfg = _sim_config(args, [args.ebno])
            rows = sweep(cfg, args.axis, args.grid)
            write_sweep_csv(args.out, args.axis, rows)
            for r in rows:
                status = f"FER={r.fer:.4g} iters={r.mean_iters:.1f}" if r.valid \
                    else f"invalid: {r.note}"
                print(f"{args.axis}={r.value}: {status}")
            print(f"wrote {args.out}")
        elif args.command == "bench":
            paths = [p for p in args.codes.split(",") if p.strip()]
            params = DecoderParams(mu=args.mu, alpha=args.alpha)
            rows = scaling_bench(
                paths, params, iters_per_code=args.iters, include_bp=args.bp
            )
            if args.compare_backends:
                rows += _other_backend_rows(args, paths)
            write_bench_csv(args.out, rows)
            for r in rows:
                print(
                    f"{r.code_path} ({r.decoder}, {r.backend}): "
                    f"n_ext={r.n_ext} {r.ns_per_iter:.0f} ns/iter"
                )
            print(f"wrote {args.out}")
    except (DecodeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def _other_backend_rows(args, paths):
    """Rerun the bench in a subprocess with the alternate kernel backend."""
    from . import kernels
    from .sim import BenchRow

    other = "numpy" if kernels.backend_name() == "numba" else "numba"
    code = (
        "import json\n"
        "from qpadmm_ldpc.admm import DecoderParams\n"
        "from qpadmm_ldpc.sim import scaling_bench\n"
        f"rows = scaling_bench({paths!r}, DecoderParams(mu={args.mu}, "
        f"alpha={args.alpha}), iters_per_code={args.iters}, "
        f"include_bp={args.bp})\n"
        "print(json.dumps([r.__dict__ for r in rows]))\n"
    )
    env = dict(os.environ, QPADMM_LDPC_BACKEND=other)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True,
        check=True,
    )
    import json

    return [BenchRow(**d) for d in json.loads(out.stdout.strip().splitlines()[-1])]


if __name__ == "__main__":
    sys.exit(main())
