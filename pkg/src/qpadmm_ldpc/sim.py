"""Monte-Carlo FER/BER simulation engine, parameter sweeps, and the
per-iteration scaling benchmark.

Frames are generated on independent per-frame RNG substreams keyed by
(seed, SNR point, frame index), so tallies are identical for any worker
count. The stopping rule follows the experimental protocol: run until the
configured number of error frames is collected or the frame cap is hit.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

import numpy as np

from . import kernels
from .admm import DecodeError, DecoderParams, _decode_fused, decode
from .alist import ParityCheckMatrix, load_alist
from .bp import BpDecoder, BpParams
from .certify import codebook, gf2_nullspace
from .channel import RNG_ALGORITHM, ChannelConfig, frame_rng, llr, transmit
from .model import DecomposedModel, decompose

BATCH_FRAMES = 1000  # stop-rule granularity; keeps tallies worker-independent

# Iteration histogram bin edges, log-spaced up to the 1000-iteration cap.
ITER_BIN_EDGES = [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1001]


@dataclass(frozen=True)
class SimConfig:
    code_path: str
    decoder: str = "qpadmm"  # qpadmm | bp | both
    ebno_list: tuple[float, ...] = (2.0,)
    params: DecoderParams = field(default_factory=DecoderParams)
    bp_params: BpParams = field(default_factory=BpParams)
    min_errors: int = 200
    max_frames: int = 10_000_000
    codeword_source: str = "all_zeros"  # all_zeros | random
    seed: int = 0
    workers: int = 1
    rate_override: Optional[float] = None

    def validate(self) -> None:
        if self.decoder not in ("qpadmm", "bp", "both"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.codeword_source not in ("all_zeros", "random"):
            raise ValueError(f"unknown codeword source {self.codeword_source!r}")
        if not self.ebno_list:
            raise ValueError("ebno_list must be nonempty")
        if self.min_errors < 1:
            raise ValueError("min_errors must be >= 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class PointReport:
    decoder: str
    ebno_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    iters_sum: int
    iters: list[int] = field(default_factory=list)
    decode_time_s: float = 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self._n) if self.frames else 0.0

    _n: int = 1

    @property
    def mean_iters(self) -> float:
        return self.iters_sum / self.frames if self.frames else 0.0

    @property
    def median_iters(self) -> float:
        return float(np.median(self.iters)) if self.iters else 0.0

    @property
    def mean_decode_time_s(self) -> float:
        return self.decode_time_s / self.frames if self.frames else 0.0

    def fer_ci95(self) -> tuple[float, float]:
        return wilson_ci(self.frame_errors, self.frames)

    def iter_histogram(self) -> dict[str, int]:
        counts, _ = np.histogram(self.iters, bins=ITER_BIN_EDGES)
        return {
            f"[{ITER_BIN_EDGES[i]},{ITER_BIN_EDGES[i + 1]})": int(c)
            for i, c in enumerate(counts)
        }


@dataclass
class SimReport:
    config: dict
    code_digest: str
    rng_algorithm: str
    points: list[PointReport]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(
                [
                    "decoder", "ebno_db", "frames", "frame_errors", "bit_errors",
                    "fer", "ber", "fer_ci_lo", "fer_ci_hi",
                    "mean_iters", "median_iters", "mean_decode_time_s",
                ]
            )
            for p in self.points:
                lo, hi = p.fer_ci95()
                w.writerow(
                    [
                        p.decoder, p.ebno_db, p.frames, p.frame_errors,
                        p.bit_errors, f"{p.fer:.6g}", f"{p.ber:.6g}",
                        f"{lo:.6g}", f"{hi:.6g}", f"{p.mean_iters:.4f}",
                        f"{p.median_iters:.1f}", f"{p.mean_decode_time_s:.6g}",
                    ]
                )

    def write_manifest(self, path) -> None:
        payload = {
            "config": self.config,
            "code_digest": self.code_digest,
            "rng_algorithm": self.rng_algorithm,
            "points": [
                {
                    "decoder": p.decoder,
                    "ebno_db": p.ebno_db,
                    "frames": p.frames,
                    "frame_errors": p.frame_errors,
                    "bit_errors": p.bit_errors,
                    "fer": p.fer,
                    "ber": p.ber,
                    "fer_ci95": list(p.fer_ci95()),
                    "mean_iters": p.mean_iters,
                    "median_iters": p.median_iters,
                    "mean_decode_time_s": p.mean_decode_time_s,
                    "iter_histogram": p.iter_histogram(),
                }
                for p in self.points
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)


def wilson_ci(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (
        z
        * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
        / denom
    )
    return (max(0.0, center - half), min(1.0, center + half))


# -- per-frame worker ---------------------------------------------------------

_CTX: dict = {}


def _init_worker(H, model, cfg: SimConfig, decoders: tuple[str, ...]):
    _CTX["H"] = H
    _CTX["model"] = model
    _CTX["cfg"] = cfg
    _CTX["decoders"] = decoders
    _CTX["bp"] = BpDecoder(H) if ("bp" in decoders) else None
    _CTX["gen_basis"] = (
        gf2_nullspace(H.to_dense()) if cfg.codeword_source == "random" else None
    )


def _draw_codeword(rng: np.random.Generator) -> np.ndarray:
    basis = _CTX["gen_basis"]
    if basis is None:
        return np.zeros(_CTX["H"].n, dtype=np.uint8)
    bits = rng.integers(0, 2, size=basis.shape[0]).astype(np.uint8)
    return (bits @ basis % 2).astype(np.uint8)


def _run_frames(args) -> list[tuple]:
    point_idx, ebno, frame_lo, frame_hi = args
    H: ParityCheckMatrix = _CTX["H"]
    model: DecomposedModel = _CTX["model"]
    cfg: SimConfig = _CTX["cfg"]
    rate = cfg.rate_override or (H.n - H.m) / H.n
    chan = ChannelConfig(ebno_db=ebno, rate=rate)
    records = []
    for frame in range(frame_lo, frame_hi):
        noise_rng = frame_rng(cfg.seed, point_idx, frame, 0)
        code_rng = frame_rng(cfg.seed, point_idx, frame, 1)
        c = _draw_codeword(code_rng)
        r = transmit(c, chan, noise_rng)
        gamma = llr(r, chan)
        rec = [frame]
        for dec in _CTX["decoders"]:
            t0 = time.perf_counter()
            if dec == "qpadmm":
                res = decode(model, gamma, cfg.params)
            else:
                res = _CTX["bp"].decode(gamma, cfg.bp_params)
            dt = time.perf_counter() - t0
            bit_err = int(np.sum(res.x_hat != c))
            rec.append((bit_err, res.iters, dt))
        records.append(tuple(rec))
    return records


def run_sim(cfg: SimConfig, pool: Optional[ProcessPoolExecutor] = None) -> SimReport:
    """Simulate every SNR point until min_errors error frames or max_frames."""
    cfg.validate()
    H = load_alist(cfg.code_path)
    model = decompose(H)
    if cfg.decoder in ("qpadmm", "both"):
        cfg.params.validate(model)
    decoders = ("qpadmm", "bp") if cfg.decoder == "both" else (cfg.decoder,)
    _init_worker(H, model, cfg, decoders)

    own_pool = None
    if cfg.workers > 1 and pool is None:
        own_pool = ProcessPoolExecutor(
            max_workers=cfg.workers,
            initializer=_init_worker,
            initargs=(H, model, cfg, decoders),
        )
        pool = own_pool

    points: list[PointReport] = []
    try:
        for point_idx, ebno in enumerate(cfg.ebno_list):
            per_dec = {
                d: PointReport(decoder=d, ebno_db=ebno, frames=0, frame_errors=0,
                               bit_errors=0, iters_sum=0)
                for d in decoders
            }
            for d in per_dec.values():
                d._n = H.n
            frame = 0
            while frame < cfg.max_frames:
                batch = min(BATCH_FRAMES, cfg.max_frames - frame)
                tasks = _chunk(point_idx, ebno, frame, frame + batch, cfg.workers)
                if pool is None:
                    results = [_run_frames(t) for t in tasks]
                else:
                    results = list(pool.map(_run_frames, tasks))
                records = [rec for chunk in results for rec in chunk]
                records.sort(key=lambda r: r[0])  # merge by frame index
                for rec in records:
                    for di, d in enumerate(decoders):
                        bit_err, iters, dt = rec[1 + di]
                        rep = per_dec[d]
                        rep.frames += 1
                        rep.bit_errors += bit_err
                        rep.frame_errors += int(bit_err > 0)
                        rep.iters_sum += iters
                        rep.iters.append(iters)
                        rep.decode_time_s += dt
                frame += batch
                if all(r.frame_errors >= cfg.min_errors for r in per_dec.values()):
                    break
            points.extend(per_dec[d] for d in decoders)
    finally:
        if own_pool is not None:
            own_pool.shutdown()

    return SimReport(
        config=_config_dict(cfg),
        code_digest=H.digest(),
        rng_algorithm=RNG_ALGORITHM,
        points=points,
    )


def _chunk(point_idx, ebno, lo, hi, workers) -> list[tuple]:
    if workers <= 1:
        return [(point_idx, ebno, lo, hi)]
    span = max(1, (hi - lo + workers - 1) // workers)
    return [
        (point_idx, ebno, s, min(hi, s + span)) for s in range(lo, hi, span)
    ]


def _config_dict(cfg: SimConfig) -> dict:
    d = asdict(cfg)
    d["params"] = asdict(cfg.params)
    d["bp_params"] = asdict(cfg.bp_params)
    return d


# -- parameter sweeps ---------------------------------------------------------

@dataclass
class SweepRow:
    value: float
    valid: bool
    fer: float = float("nan")
    mean_iters: float = float("nan")
    frames: int = 0
    frame_errors: int = 0
    note: str = ""


def sweep(cfg: SimConfig, axis: str, grid: list[float]) -> list[SweepRow]:
    """One run_sim per grid value of mu or alpha at the configured SNR."""
    if axis not in ("mu", "alpha"):
        raise ValueError(f"sweep axis must be mu or alpha, got {axis!r}")
    if len(cfg.ebno_list) != 1:
        raise ValueError("sweep expects exactly one SNR point")
    H = load_alist(cfg.code_path)
    model = decompose(H)
    rows = []
    for value in grid:
        p = cfg.params
        params = DecoderParams(
            mu=value if axis == "mu" else p.mu,
            alpha=value if axis == "alpha" else p.alpha,
            epsilon=p.epsilon,
            max_iters=p.max_iters,
        )
        try:
            params.validate(model)
        except DecodeError as exc:
            rows.append(SweepRow(value=value, valid=False, note=str(exc)))
            continue
        sub = SimConfig(
            code_path=cfg.code_path, decoder="qpadmm", ebno_list=cfg.ebno_list,
            params=params, bp_params=cfg.bp_params, min_errors=cfg.min_errors,
            max_frames=cfg.max_frames, codeword_source=cfg.codeword_source,
            seed=cfg.seed, workers=cfg.workers, rate_override=cfg.rate_override,
        )
        rep = run_sim(sub)
        pt = rep.points[0]
        rows.append(
            SweepRow(
                value=value, valid=True, fer=pt.fer, mean_iters=pt.mean_iters,
                frames=pt.frames, frame_errors=pt.frame_errors,
            )
        )
    return rows


def write_sweep_csv(path, axis: str, rows: list[SweepRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([axis, "valid", "fer", "mean_iters", "frames", "frame_errors", "note"])
        for r in rows:
            w.writerow(
                [r.value, int(r.valid), f"{r.fer:.6g}", f"{r.mean_iters:.4f}",
                 r.frames, r.frame_errors, r.note]
            )


# -- scaling benchmark --------------------------------------------------------

@dataclass
class BenchRow:
    code_path: str
    n: int
    n_ext: int
    ns_per_iter: float
    decoder: str
    backend: str


def _bench_workload(model: DecomposedModel, seed: int = 7) -> np.ndarray:
    """Fixed noisy all-zeros LLRs at a low SNR so iterations do not stall."""
    rate = (model.H.n - model.H.m) / model.H.n
    chan = ChannelConfig(ebno_db=1.0, rate=rate)
    rng = frame_rng(seed, 0, 0, 0)
    r = transmit(np.zeros(model.n_orig, dtype=np.uint8), chan, rng)
    return llr(r, chan)


_BENCH_REPEATS = 5


def _admm_pass_seconds(model, gamma, params, total_iters: int) -> float:
    """Fastest per-iteration time over chunks of total_iters iterations,
    scaled back to seconds per total_iters. Timing every ~250-iteration
    chunk separately and keeping the minimum filters out scheduler noise,
    which arrives in bursts much longer than one chunk."""
    per_run = min(total_iters, 250)
    run_params = DecoderParams(
        mu=params.mu, alpha=params.alpha, epsilon=1e-300, max_iters=per_run,
    )
    done = 0
    best = math.inf
    while done < total_iters:
        t0 = time.perf_counter()
        _decode_fused(model, gamma, run_params)
        best = min(best, time.perf_counter() - t0)
        done += per_run
    return best / per_run * total_iters


def _bp_pass_seconds(dec, gamma, total_iters: int) -> float:
    per_run = min(total_iters, 250)
    params = BpParams(max_iters=per_run, early_stop=False)
    done = 0
    best = math.inf
    while done < total_iters:
        t0 = time.perf_counter()
        dec.decode(gamma, params)
        best = min(best, time.perf_counter() - t0)
        done += per_run
    return best / per_run * total_iters


def scaling_bench(
    code_paths: list[str],
    params: DecoderParams = DecoderParams(alpha=0.6),
    iters_per_code: int = 10_000,
    include_bp: bool = False,
) -> list[BenchRow]:
    """Per-iteration wall time on fixed workloads, one row per code.

    Each decoder runs a fixed iteration count with an unreachable stopping
    threshold so the measured loop never stops early. Background load on a
    shared machine drifts over minutes, so the codes are timed round-robin
    (one pass per code per round) and each code keeps its fastest round;
    that way every code samples the same load conditions and the cross-code
    ratios stay meaningful even under noise.
    """
    backend = kernels.backend_name()
    setups = []
    for path in code_paths:
        H = load_alist(path)
        model = decompose(H)
        gamma = _bench_workload(model)
        bench_params = DecoderParams(
            mu=params.mu, alpha=params.alpha, epsilon=1e-300,
            max_iters=iters_per_code,
        )
        bench_params.validate(model)
        # warm up JIT and caches before timing
        warm = DecoderParams(mu=params.mu, alpha=params.alpha,
                             epsilon=1e-300, max_iters=10)
        _decode_fused(model, gamma, warm)
        dec = None
        if include_bp:
            dec = BpDecoder(H)
            _bp_pass_seconds(dec, gamma, 100)  # warm up
        setups.append((path, H, model, gamma, bench_params, dec))

    best_admm = [math.inf] * len(setups)
    best_bp = [math.inf] * len(setups)
    for _ in range(_BENCH_REPEATS):
        for idx, (_, H, model, gamma, bench_params, dec) in enumerate(setups):
            secs = _admm_pass_seconds(model, gamma, bench_params, iters_per_code)
            best_admm[idx] = min(best_admm[idx], secs)
            if dec is not None:
                bp_iters = max(1000, iters_per_code // 10)
                best_bp[idx] = min(best_bp[idx], _bp_pass_seconds(dec, gamma, bp_iters))

    rows = []
    for idx, (path, H, model, gamma, _, dec) in enumerate(setups):
        rows.append(
            BenchRow(
                code_path=str(path), n=H.n, n_ext=model.n_ext,
                ns_per_iter=best_admm[idx] / iters_per_code * 1e9,
                decoder="qpadmm", backend=backend,
            )
        )
        if dec is not None:
            bp_iters = max(1000, iters_per_code // 10)
            rows.append(
                BenchRow(
                    code_path=str(path), n=H.n, n_ext=model.n_ext,
                    ns_per_iter=best_bp[idx] / bp_iters * 1e9,
                    decoder="bp", backend=backend,
                )
            )
    return rows


def write_bench_csv(path, rows: list[BenchRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["code", "n", "n_ext", "decoder", "backend", "ns_per_iter"])
        for r in rows:
            w.writerow(
                [r.code_path, r.n, r.n_ext, r.decoder, r.backend,
                 f"{r.ns_per_iter:.1f}"]
            )
