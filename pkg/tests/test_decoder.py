import itertools

import numpy as np
import pytest

from cvqkd.gf import canonical_field, gf_matvec
from cvqkd.reconciliation import (DecoderGraph, DiscretizationScheme, SparseParityMatrix,
                                  a_priori_probabilities, build_parity_matrix, decode,
                                  discretize, split, syndrome)

TOY_H = np.array([[0, 0, 3, 0, 1], [2, 0, 0, 1, 0], [0, 1, 0, 2, 3]])


def brute_check_messages(H_dense, field, q_edges, z):
    """r[j, i, k]: probability that the other neighbours of check j complete z_j."""
    out = {}
    M = field.mul_table
    for j, row in enumerate(H_dense):
        nb = list(np.flatnonzero(row))
        for i in nb:
            others = [k for k in nb if k != i]
            r = np.zeros(field.order)
            for assign in itertools.product(range(field.order), repeat=len(others)):
                prob = np.prod([q_edges[j, o][a] for o, a in zip(others, assign)])
                acc = 0
                for o, a in zip(others, assign):
                    acc ^= M[row[o], a]
                for kk in range(field.order):
                    if acc ^ M[row[i], kk] == z[j]:
                        r[kk] += prob
            out[j, i] = r / r.sum()
    return out


def test_check_step_matches_enumeration():
    f = canonical_field(2)
    rng = np.random.default_rng(0)
    D = np.array([[1, 2, 0, 3, 0, 1], [0, 3, 1, 0, 2, 0], [2, 0, 3, 1, 1, 0]])
    H = SparseParityMatrix.from_dense(D, 2)
    g = DecoderGraph(H, f)
    q = rng.random((g.n_edges, 4))
    q /= q.sum(1, keepdims=True)
    z = np.array([1, 3, 2])
    r = g.check_messages(q, g.gather_index(z))
    q_edges = {(int(j), int(i)): q[e] for e, (j, i) in enumerate(zip(g.rows, g.cols))}
    expected = brute_check_messages(D, f, q_edges, z)
    for e, (j, i) in enumerate(zip(g.rows, g.cols)):
        np.testing.assert_allclose(r[e], expected[int(j), int(i)], atol=1e-12)


def test_variable_messages_normalized():
    f = canonical_field(4)
    rng = np.random.default_rng(1)
    H = build_parity_matrix(300, 0.8, f, rng)
    g = DecoderGraph(H, f)
    log_r = np.log(rng.random((g.n_edges, 16)))
    totals = np.log(rng.random((300, 16))) + g.var_sum @ log_r
    q = g.variable_messages(totals, log_r)
    np.testing.assert_allclose(q.sum(axis=1), 1, atol=1e-9)
    assert np.all(q >= 0)


def test_toy_matrix_decode():
    f = canonical_field(2)
    g = DecoderGraph(SparseParityMatrix.from_dense(TOY_H, 2), f)
    truth = np.array([0, 0, 1, 1, 0])
    priors = np.full((5, 4), 0.02)
    priors[np.arange(5), truth] = 0.94
    res = decode(g, [3, 1, 2], priors, 10)
    assert res.found and res.found_round <= 2
    np.testing.assert_array_equal(res.K_hat, truth)


def test_toy_matrix_decode_corrects_one_symbol():
    f = canonical_field(2)
    g = DecoderGraph(SparseParityMatrix.from_dense(TOY_H, 2), f)
    truth = np.array([0, 0, 1, 1, 0])
    priors = np.full((5, 4), 0.1)
    priors[np.arange(5), truth] = 0.7
    priors[3] = [0.45, 0.4, 0.1, 0.05]  # position 4 leans the wrong way
    res = decode(g, [3, 1, 2], priors, 20)
    assert res.found
    np.testing.assert_array_equal(gf_matvec(f, TOY_H, res.K_hat), [3, 1, 2])
    np.testing.assert_array_equal(res.K_hat, truth)


def test_certain_priors_decode_first_round():
    f = canonical_field(4)
    rng = np.random.default_rng(2)
    H = build_parity_matrix(500, 0.8, f, rng)
    truth = rng.integers(0, 16, 500)
    priors = np.zeros((500, 16))
    priors[np.arange(500), truth] = 1
    res = decode(DecoderGraph(H, f), syndrome(f, H, truth), priors, 5)
    assert (res.found, res.found_round) == (True, 1)


def test_flat_priors_fail():
    f = canonical_field(4)
    for seed in range(5):
        rng = np.random.default_rng(seed)
        H = build_parity_matrix(300, 0.8, f, rng)
        sd = rng.integers(0, 16, H.l)
        res = decode(DecoderGraph(H, f), sd, np.full((300, 16), 1 / 16), 10)
        assert not res.found and res.found_round == 0 and res.iterations == 10


def test_ties_break_to_smallest():
    f = canonical_field(2)
    H = SparseParityMatrix.from_dense(np.array([[1, 1]]), 2)
    res = decode(DecoderGraph(H, f), [1], np.full((2, 4), 0.25), 1)
    # flat posteriors everywhere: decisions are all 0, which misses syndrome 1
    np.testing.assert_array_equal(res.K_hat, [0, 0])


def test_soundness_and_completeness_high_correlation():
    f = canonical_field(4)
    s = DiscretizationScheme(7, 6, 4)
    fast = 0
    for seed in range(30):
        rng = np.random.default_rng(seed)
        H = build_parity_matrix(1000, 0.866, f, rng)
        X = rng.standard_normal(1000)
        Y = 0.999 * X + np.sqrt(1 - 0.999**2) * rng.standard_normal(1000)
        top, bottom = split(discretize(Y, s), 4, 2)
        sd = syndrome(f, H, top)
        res = decode(DecoderGraph(H, f), sd, a_priori_probabilities(X, bottom, 0.999, s), 50)
        if res.found:
            np.testing.assert_array_equal(syndrome(f, H, res.K_hat), sd)
            fast += res.found_round <= 2
    assert fast >= 29


def test_input_validation():
    f = canonical_field(2)
    g = DecoderGraph(SparseParityMatrix.from_dense(TOY_H, 2), f)
    with pytest.raises(ValueError):
        decode(g, [3, 1], np.full((5, 4), 0.25), 1)
    with pytest.raises(ValueError):
        decode(g, [3, 1, 2], np.full((5, 3), 1 / 3), 1)
    with pytest.raises(ValueError):
        DecoderGraph(SparseParityMatrix.from_dense(TOY_H, 2), canonical_field(4))
