"""Non-binary sum-product decoding of the syndrome over GF(2^q).

Check-node update: for check ``j`` and neighbour ``i`` the message
``r[j, i, k]`` is the probability that the partial sum of the other
neighbours equals ``z_j - H_ji k``. The distribution of the sum of the
neighbours left of ``i`` (forward partial sum) and right of ``i`` (backward
partial sum) are XOR-convolutions of the permuted variable messages. XOR
convolution is a pointwise product in the Walsh-Hadamard domain, so forward
and backward partial sums are exclusive cumulative products there, and
combining them costs one more product and an inverse transform.

Variable-node update and tentative decisions run in the log domain with the
check messages floored at ``PROB_FLOOR``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import hadamard

from ..gf import GfField
from .ldpc import SparseParityMatrix

PROB_FLOOR = 1e-300


@dataclass
class DecodeResult:
    K_hat: np.ndarray
    found: bool
    found_round: int
    iterations: int


class DecoderGraph:
    """Tanner graph of ``H`` prepared for vectorized message passing.

    Edges are reordered so that checks of equal weight are contiguous and,
    inside each weight class, stored slot-major: the class is a contiguous
    ``(weight, checks, Q)`` array.
    """

    def __init__(self, H: SparseParityMatrix, field: GfField):
        if H.q != field.k:
            raise ValueError("matrix and field disagree on q")
        self.H = H
        self.field = field
        self.Q = field.order
        w = H.row_weights()
        row_order = np.lexsort((np.arange(H.l), w))
        rank = np.empty(H.l, dtype=np.int64)
        rank[row_order] = np.arange(H.l)
        order = np.lexsort((H.edge_cols, rank[H.edge_rows]))

        self.groups = []  # (start, stop, weight)
        start = 0
        for weight in np.unique(w[w > 0]):
            count = int(np.sum(w == weight))
            stop = start + count * int(weight)
            self.groups.append((start, stop, int(weight)))
            order[start:stop] = order[start:stop].reshape(count, weight).T.ravel()
            start = stop

        self.rows = H.edge_rows[order]
        self.cols = H.edge_cols[order]
        self.vals = H.edge_vals[order]
        self.n_edges = len(order)

        mul, inv = field.mul_table.astype(np.intp), field.inv_table.astype(np.intp)
        # gather index turning q(k) into the distribution of H_ji * k
        self.perm_in = mul[inv[self.vals]]
        self.mul_rows = mul[self.vals]
        base = np.arange(self.n_edges, dtype=np.intp)[:, None] * self.Q
        self._flat_in = base + self.perm_in
        self._base = base
        self.wht = hadamard(self.Q).astype(float)
        self.var_sum = sparse.csr_matrix(
            (np.ones(self.n_edges), (self.cols, np.arange(self.n_edges))),
            shape=(H.n, self.n_edges))

    def variable_messages(self, totals: np.ndarray, log_r: np.ndarray) -> np.ndarray:
        """Vertical step: per-edge posterior without that edge's check, normalized."""
        log_q = totals[self.cols] - log_r
        log_q -= log_q.max(axis=1, keepdims=True)
        q_msg = np.exp(log_q)
        q_msg /= q_msg.sum(axis=1, keepdims=True)
        return q_msg

    def gather_index(self, K_sd: np.ndarray) -> np.ndarray:
        """Flat positions of ``z_j ^ (H_ji * k)`` for every edge and symbol ``k``."""
        return self._base + (K_sd[self.rows][:, None] ^ self.mul_rows)

    def syndrome(self, v: np.ndarray) -> np.ndarray:
        prods = self.field.mul_table[self.vals, v[self.cols]].astype(np.int64)
        out = np.zeros(self.H.l, dtype=np.int64)
        np.bitwise_xor.at(out, self.rows, prods)
        return out

    def check_messages(self, q_msg: np.ndarray, r_gather: np.ndarray) -> np.ndarray:
        """Horizontal step; returns normalized ``r`` per edge.

        ``r_gather`` holds flat indices into the ``(edges, Q)`` array of
        partial-sum distributions, see :meth:`gather_index`.
        """
        shifted = np.take(q_msg.ravel(), self._flat_in)
        spec = shifted @ self.wht
        excl = np.empty_like(spec)
        for start, stop, weight in self.groups:
            g = spec[start:stop].reshape(weight, -1, self.Q)
            out = excl[start:stop].reshape(weight, -1, self.Q)
            # exclusive forward then backward running products
            acc = np.ones_like(g[0])
            for i in range(weight):
                out[i] = acc
                acc *= g[i]
            acc.fill(1.0)
            for i in range(weight - 1, -1, -1):
                out[i] *= acc
                acc *= g[i]
        others = (excl @ self.wht) / self.Q
        r = np.take(others.ravel(), r_gather)
        np.maximum(r, PROB_FLOOR, out=r)
        r /= r.sum(axis=1, keepdims=True)
        return r


def decode(graph: DecoderGraph, K_sd, priors, iter_max: int) -> DecodeResult:
    """Sum-product search for ``K_hat`` with ``H K_hat = K_sd``.

    :param priors: ``(n, Q)`` a-priori probabilities of the top symbols.
    :return: the first tentative decision matching the syndrome, or the last
        one with ``found=False`` after ``iter_max`` rounds.
    """
    K_sd = np.asarray(K_sd, dtype=np.int64)
    priors = np.asarray(priors, dtype=float)
    if priors.shape != (graph.H.n, graph.Q):
        raise ValueError(f"priors must have shape {(graph.H.n, graph.Q)}")
    if K_sd.shape != (graph.H.l,):
        raise ValueError("syndrome length does not match the matrix")

    log_f = np.log(np.maximum(priors, PROB_FLOOR))
    # r[e, k] = Prob[others = z_j ^ (H_ji * k)]
    r_gather = graph.gather_index(K_sd)
    q_msg = priors[graph.cols]
    K_hat = np.argmax(log_f, axis=1)

    for it in range(1, iter_max + 1):
        r = graph.check_messages(q_msg, r_gather)
        log_r = np.log(r)
        totals = log_f + graph.var_sum @ log_r
        K_hat = np.argmax(totals, axis=1)  # first maximum, i.e. smallest symbol on ties
        if np.array_equal(graph.syndrome(K_hat), K_sd):
            return DecodeResult(K_hat, True, it, it)
        q_msg = graph.variable_messages(totals, log_r)

    return DecodeResult(K_hat, False, 0, iter_max)
