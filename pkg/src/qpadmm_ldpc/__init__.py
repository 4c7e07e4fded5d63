"""QP-ADMM decoding of binary LDPC codes.

ML decoding is relaxed to a box-constrained non-convex quadratic program
over a three-variable parity-check decomposition and solved by an ADMM
whose v/z/y updates are all closed-form projections, giving linear
per-iteration cost in the code length. Includes a sum-product BP reference
decoder, ML-certification and codeword-symmetry test machinery, and a
Monte-Carlo FER/BER simulation harness (CLI: decode-sim).
"""

from .admm import (
    AdmmState,
    DecodeError,
    DecodeResult,
    DecoderParams,
    decode,
    residual,
    stationarity_report,
)
from .alist import (
    AlistError,
    ParityCheckMatrix,
    check_parity,
    from_dense,
    load_alist,
    parse_alist,
    write_alist,
)
from .bp import BpDecoder, BpParams, bp_decode
from .certify import (
    RelativeMap,
    brute_force_ml,
    codebook,
    ml_certificate,
    symmetry_replay,
)
from .channel import ChannelConfig, frame_rng, llr, transmit
from .kernels import backend_name
from .model import (
    DecomposedModel,
    aux_extend,
    col_dot,
    decompose,
    materialize_dense,
    row_dot,
)
from .sim import SimConfig, SimReport, run_sim, scaling_bench, sweep

__all__ = [
    "AdmmState", "AlistError", "BpDecoder", "BpParams", "ChannelConfig",
    "DecodeError", "DecodeResult", "DecomposedModel", "DecoderParams",
    "ParityCheckMatrix", "RelativeMap", "SimConfig", "SimReport",
    "aux_extend", "backend_name", "bp_decode", "brute_force_ml",
    "check_parity", "codebook", "col_dot", "decode", "decompose",
    "frame_rng", "from_dense", "llr", "load_alist", "materialize_dense",
    "ml_certificate", "parse_alist", "residual", "row_dot", "run_sim",
    "scaling_bench", "stationarity_report", "sweep", "symmetry_replay",
    "transmit", "write_alist",
]

__version__ = "0.1.0"
