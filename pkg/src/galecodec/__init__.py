"""Martingale-driven enumerative block compression.

Sequences are cut into blocks and each block is replaced by its rank among
the extensions on which a betting strategy (a martingale) earns at least a
threshold amount of capital.  The decoder is an oracle machine whose query
usage per output bit approaches the information density the strategy can
exploit.
"""

from .bits import dec, e0, enc_nat, enc_string, sigma, sigma_inverse, BitReader, BitWriter
from .blockcodec import (
    BlockSchedule,
    OracleStream,
    capped_schedule,
    decode_prefix,
    encode_blocks,
    enumerate_admitted,
    index_to_string,
    locate_block,
    triangular_schedule,
    passthrough_decode,
    passthrough_encode,
    string_to_index,
)
from .gales import (
    MartingaleModel,
    ScaledPow2,
    bernoulli_model,
    compare_pow2,
    count_exceeding,
    count_exceeding_prefix_max,
    induced_sgale,
    kt_model,
    mixture_model,
    slow_staged_wrapper,
    uniform_model,
)
from .threshold import Dyadic, approximate_below, decode_threshold, encode_threshold

__version__ = "0.1.0"
