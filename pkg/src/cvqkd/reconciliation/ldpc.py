"""Regular column-weight-2 parity-check matrices over GF(2^q).

With two nonzeros per column, each column is an edge joining two checks, so
"any two columns share at most one row" is the same as asking the check graph
to be simple (no repeated edges, no loops).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from ..gf import GfField, gf_matvec
from .discretization import ReconciliationError

COLUMN_WEIGHT = 2
MAX_RESTARTS = 200


class ConstructionError(ReconciliationError):
    pass


@dataclass(eq=False)
class SparseParityMatrix:
    """``l x n`` matrix stored as coordinate triples sorted by (row, col)."""

    l: int
    n: int
    q: int
    edge_rows: np.ndarray
    edge_cols: np.ndarray
    edge_vals: np.ndarray
    requested_rate: float | None = field(default=None)

    def __post_init__(self):
        order = np.lexsort((self.edge_cols, self.edge_rows))
        self.edge_rows = np.asarray(self.edge_rows, dtype=np.int64)[order]
        self.edge_cols = np.asarray(self.edge_cols, dtype=np.int64)[order]
        self.edge_vals = np.asarray(self.edge_vals, dtype=np.int64)[order]
        if np.any(self.edge_vals == 0):
            raise ReconciliationError("stored entries must be nonzero")
        if np.any(self.edge_vals >= 1 << self.q):
            raise ReconciliationError("entry outside GF(2^q)")

    @classmethod
    def from_dense(cls, H, q: int) -> "SparseParityMatrix":
        H = np.asarray(H)
        rows, cols = np.nonzero(H)
        return cls(H.shape[0], H.shape[1], q, rows, cols, H[rows, cols])

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.l, self.n), dtype=np.int64)
        H[self.edge_rows, self.edge_cols] = self.edge_vals
        return H

    @property
    def n_edges(self) -> int:
        return len(self.edge_rows)

    @property
    def rate(self) -> float:
        """Realized code rate ``1 - l/n``."""
        return 1 - self.l / self.n

    def row_weights(self) -> np.ndarray:
        return np.bincount(self.edge_rows, minlength=self.l)

    def column_weights(self) -> np.ndarray:
        return np.bincount(self.edge_cols, minlength=self.n)

    def rows(self) -> list[list[tuple[int, int]]]:
        out = [[] for _ in range(self.l)]
        for r, c, v in zip(self.edge_rows, self.edge_cols, self.edge_vals):
            out[r].append((int(c), int(v)))
        return out

    def cols(self) -> list[list[tuple[int, int]]]:
        out = [[] for _ in range(self.n)]
        for r, c, v in zip(self.edge_rows, self.edge_cols, self.edge_vals):
            out[c].append((int(r), int(v)))
        return out

    def max_overlap(self) -> int:
        """Largest number of rows shared by two distinct columns."""
        B = sparse.csc_matrix(
            (np.ones(self.n_edges, dtype=np.int64), (self.edge_rows, self.edge_cols)),
            shape=(self.l, self.n))
        G = (B.T @ B).tocoo()
        off = G.row != G.col
        return int(G.data[off].max()) if off.any() else 0

    def export_text(self, path) -> Path:
        """Header ``l n q`` then one ``row col value`` line per stored entry."""
        path = Path(path)
        with path.open("w") as fh:
            fh.write(f"{self.l} {self.n} {self.q}\n")
            for r, c, v in zip(self.edge_rows, self.edge_cols, self.edge_vals):
                fh.write(f"{r} {c} {v}\n")
        return path

    @classmethod
    def load_text(cls, path) -> "SparseParityMatrix":
        with Path(path).open() as fh:
            l, n, q = (int(t) for t in fh.readline().split())
            data = np.loadtxt(fh, dtype=np.int64, ndmin=2)
        if data.size == 0:
            data = np.zeros((0, 3), dtype=np.int64)
        return cls(l, n, q, data[:, 0], data[:, 1], data[:, 2])


def _pair_keys(a, b, l):
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    return lo * l + hi


def _simple_graph_edges(degrees: np.ndarray, n_edges: int, rng: np.random.Generator,
                        max_sweeps: int = 50) -> np.ndarray | None:
    """Random simple graph with the given vertex degrees, one row per edge.

    Stubs are paired at random, then loops and repeated pairs are removed by
    degree-preserving endpoint swaps with randomly chosen edges.
    """
    l = len(degrees)
    stubs = rng.permutation(np.repeat(np.arange(l), degrees))
    ends = stubs.reshape(n_edges, 2)
    keys = _pair_keys(ends[:, 0], ends[:, 1], l)
    counts: dict[int, int] = {}
    uniq, cnt = np.unique(keys, return_counts=True)
    counts.update(zip(uniq.tolist(), cnt.tolist()))

    def bad(e):
        a, b = ends[e]
        return a == b or counts[int(_pair_keys(a, b, l))] > 1

    def bump(a, b, delta):
        k = int(_pair_keys(a, b, l))
        counts[k] = counts.get(k, 0) + delta

    for _ in range(max_sweeps):
        loops = ends[:, 0] == ends[:, 1]
        keyv = _pair_keys(ends[:, 0], ends[:, 1], l)
        _, inv, cnt = np.unique(keyv, return_inverse=True, return_counts=True)
        bad_edges = np.flatnonzero(loops | (cnt[inv] > 1))
        if bad_edges.size == 0:
            return ends
        for e in bad_edges:
            if not bad(e):
                continue
            for _attempt in range(100):
                f = int(rng.integers(n_edges))
                if f == e:
                    continue
                a, b = ends[e]
                c, d = ends[f]
                if rng.random() < 0.5:
                    c, d = d, c
                # candidate rewiring (a, c), (b, d)
                if a == c or b == d:
                    continue
                k1, k2 = int(_pair_keys(a, c, l)), int(_pair_keys(b, d, l))
                if k1 == k2 or counts.get(k1, 0) or counts.get(k2, 0):
                    continue
                bump(a, b, -1)
                bump(*ends[f], -1)
                ends[e] = (a, c)
                ends[f] = (b, d)
                bump(a, c, 1)
                bump(b, d, 1)
                break
    return None


def build_parity_matrix(n: int, R_code: float, field: GfField,
                        rng: np.random.Generator) -> SparseParityMatrix:
    """Random regular LDPC matrix: column weight 2, near-uniform row weight.

    ``l = round(n (1 - R_code))``; row weights are ``floor(2n/l)`` or one
    more. Nonzero entries are uniform over the nonzero field elements.

    :raises ConstructionError: if no simple check graph exists for these sizes
        or none is found within the restart budget.
    """
    if not 0 < R_code < 1:
        raise ConstructionError("R_code must lie in (0, 1)")
    l = int(round(n * (1 - R_code)))
    if l < 2:
        raise ConstructionError(f"l = {l} checks is too few")
    n_edges = COLUMN_WEIGHT * n
    base, extra = divmod(n_edges, l)
    if n > l * (l - 1) // 2 or base + (extra > 0) > l - 1:
        raise ConstructionError(
            f"no column pair overlap <= 1 possible with l={l} checks and n={n} columns")
    degrees = np.full(l, base)
    degrees[rng.permutation(l)[:extra]] += 1

    for _ in range(MAX_RESTARTS):
        ends = _simple_graph_edges(degrees, n, rng)
        if ends is not None:
            break
    else:
        raise ConstructionError("failed to build a parity matrix with overlap <= 1")

    cols = np.repeat(np.arange(n), COLUMN_WEIGHT)
    vals = rng.integers(1, field.order, size=n_edges)
    return SparseParityMatrix(l, n, field.k, ends.ravel(), cols, vals, requested_rate=R_code)


def syndrome(field: GfField, H: SparseParityMatrix, K_top) -> np.ndarray:
    return gf_matvec(field, H, np.asarray(K_top, dtype=np.int64))
