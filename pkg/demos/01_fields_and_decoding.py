"""Finite fields, syndromes and one round of belief propagation on a toy code."""

import numpy as np

from cvqkd.gf import canonical_field
from cvqkd.reconciliation import DecoderGraph, SparseParityMatrix, decode, syndrome

# GF(4) from x^2 + x + 1; addition is XOR, multiplication uses lookup tables
f = canonical_field(2)
print("GF(4) multiplication table:\n", f.mul_table)

# a 3 x 5 parity-check matrix over GF(4); zeros are absent edges
H = SparseParityMatrix.from_dense(np.array([[0, 0, 3, 0, 1],
                                            [2, 0, 0, 1, 0],
                                            [0, 1, 0, 2, 3]]), 2)
sent = np.array([0, 0, 1, 1, 0])
sd = syndrome(f, H, sent)
print("syndrome of", sent, "is", sd)

# the receiver only has noisy beliefs about each symbol
priors = np.full((5, 4), 0.1)
priors[np.arange(5), sent] = 0.7
priors[3] = [0.45, 0.4, 0.1, 0.05]  # symbol 3 leans towards the wrong value
res = decode(DecoderGraph(H, f), sd, priors, iter_max=10)
print("decoded", res.K_hat, "found:", res.found, "in round", res.found_round)
