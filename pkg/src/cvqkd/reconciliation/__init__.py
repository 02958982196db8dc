from .decoder import DecodeResult, DecoderGraph, decode
from .discretization import (
    CodeRateError,
    DiscretizationScheme,
    ReconciliationError,
    a_priori_probabilities,
    approx_entropy,
    combine,
    compute_code_rate,
    discretize,
    empirical_entropy,
    normalize,
    split,
    symbols_to_bits,
)
from .ldpc import ConstructionError, SparseParityMatrix, build_parity_matrix, syndrome
from .verification import EcStatistics, ec_success_accounting, hash_output_bits, verify
