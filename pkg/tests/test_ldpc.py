import numpy as np
import pytest
from hypothesis import given, strategies as st

from cvqkd.gf import canonical_field, gf_matvec
from cvqkd.reconciliation import ConstructionError, SparseParityMatrix, build_parity_matrix, syndrome


def check_invariants(H, R_code):
    assert np.all(H.column_weights() == 2)
    dc = 2 / (1 - R_code)
    w = H.row_weights()
    assert set(np.unique(w)) <= {int(np.floor(2 * H.n / H.l)), int(np.ceil(2 * H.n / H.l))}
    assert abs(w.mean() - dc) < 1 + 1e-9
    assert H.max_overlap() <= 1
    assert H.n_edges == 2 * H.n
    assert np.all(H.edge_vals > 0)


@pytest.mark.parametrize("n,R", [(1000, 0.866), (2000, 0.75), (500, 0.5), (180000, 0.8666)])
def test_construction_invariants(n, R):
    f = canonical_field(4)
    H = build_parity_matrix(n, R, f, np.random.default_rng(n))
    assert H.l == round(n * (1 - R))
    assert H.requested_rate == R and H.rate == pytest.approx(1 - H.l / n)
    check_invariants(H, R)


@given(st.integers(40, 400), st.floats(0.3, 0.9), st.integers(0, 2**32 - 1))
def test_construction_property(n, R, seed):
    f = canonical_field(4)
    try:
        H = build_parity_matrix(n, R, f, np.random.default_rng(seed))
    except ConstructionError:
        l = round(n * (1 - R))
        assert n > l * (l - 1) // 2 or l < 2
        return
    check_invariants(H, R)


def test_small_rows_need_more_checks():
    f = canonical_field(4)
    # two checks cannot host 15 (or 8) weight-2 columns with pairwise overlap <= 1
    with pytest.raises(ConstructionError):
        build_parity_matrix(15, 13 / 15, f, np.random.default_rng(0))
    with pytest.raises(ConstructionError):
        build_parity_matrix(8, 0.75, f, np.random.default_rng(0))
    # row weight targets d_c = 15 and 8 are realized on larger blocks
    for n, R, dc in ((1500, 13 / 15, 15), (800, 0.75, 8)):
        H = build_parity_matrix(n, R, f, np.random.default_rng(1))
        assert np.all(H.row_weights() == dc)


def test_entries_uniform():
    f = canonical_field(4)
    H = build_parity_matrix(30000, 0.8, f, np.random.default_rng(2))
    counts = np.bincount(H.edge_vals, minlength=16)
    assert counts[0] == 0
    assert np.all(np.abs(counts[1:] / counts[1:].mean() - 1) < 0.05)


def test_seeded_reproducible():
    f = canonical_field(4)
    a = build_parity_matrix(500, 0.8, f, np.random.default_rng(3))
    b = build_parity_matrix(500, 0.8, f, np.random.default_rng(3))
    np.testing.assert_array_equal(a.to_dense(), b.to_dense())


def test_text_roundtrip(tmp_path):
    f = canonical_field(4)
    H = build_parity_matrix(300, 0.8, f, np.random.default_rng(4))
    path = H.export_text(tmp_path / "H.txt")
    first = path.read_text().splitlines()[:2]
    assert first[0] == f"{H.l} {H.n} 4"
    assert len(first[1].split()) == 3
    back = SparseParityMatrix.load_text(path)
    np.testing.assert_array_equal(back.to_dense(), H.to_dense())


def test_dense_roundtrip_and_views():
    D = np.array([[0, 0, 3, 0, 1], [2, 0, 0, 1, 0], [0, 1, 0, 2, 3]])
    H = SparseParityMatrix.from_dense(D, 2)
    np.testing.assert_array_equal(H.to_dense(), D)
    assert H.rows()[2] == [(1, 1), (3, 2), (4, 3)]
    assert H.cols()[4] == [(0, 1), (2, 3)]


def test_syndrome_matches_dense():
    f = canonical_field(4)
    rng = np.random.default_rng(5)
    H = build_parity_matrix(400, 0.8, f, rng)
    v = rng.integers(0, 16, 400)
    np.testing.assert_array_equal(syndrome(f, H, v), gf_matvec(f, H.to_dense(), v))
    assert not syndrome(f, H, np.zeros(400, int)).any()
