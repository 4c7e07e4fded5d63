"""BPSK over AWGN and the matching LLR computation.

Bit 0 maps to +1, bit 1 to -1. Noise variance follows the Eb/N0
convention sigma^2 = 1 / (2 R 10^(EbN0_dB/10)) with R the code rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# RNG algorithm identifier recorded in run manifests: per-frame substreams
# are numpy PCG64 generators seeded from SeedSequence entropy tuples.
RNG_ALGORITHM = "numpy-seedsequence-pcg64"


@dataclass(frozen=True)
class ChannelConfig:
    ebno_db: float
    rate: float
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.rate < 1.0):
            raise ValueError(f"rate must be in (0,1), got {self.rate}")

    @property
    def sigma2(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebno_db / 10.0))

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.sigma2))


def frame_rng(seed: int, *stream: int) -> np.random.Generator:
    """Deterministic per-frame substream, independent of worker layout."""
    return np.random.default_rng(np.random.SeedSequence([seed, *stream]))


def transmit(c, cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """r_i = (1 - 2 c_i) + N(0, sigma^2)."""
    c = np.asarray(c)
    return (1.0 - 2.0 * c) + cfg.sigma * rng.standard_normal(c.shape[0])


def llr(r, cfg: ChannelConfig) -> np.ndarray:
    """gamma_i = 2 r_i / sigma^2, the BPSK-AWGN closed form."""
    return 2.0 * np.asarray(r, dtype=np.float64) / cfg.sigma2
