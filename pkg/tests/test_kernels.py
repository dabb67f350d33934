"""Both kernel backends against direct loops."""
import itertools

import numpy as np
import pytest

from eamkit import _kernels_py


def loop_cut_sums(s, n):
    out = []
    for i, j in itertools.combinations(range(n), 2):
        out.append(sum(s[m] for m in range(1 << n) if ((m >> i) & 1) != ((m >> j) & 1)))
    return np.array(out)


def loop_predict(w, n):
    out = np.zeros(1 << n)
    for m in range(1 << n):
        out[m] = sum(w[i, j] for i in range(n) for j in range(n) if (m >> i) & 1 and not (m >> j) & 1)
    return out


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_cut_sums(backend, n):
    s = np.random.default_rng(n).random(1 << n)
    np.testing.assert_allclose(backend.cut_sums(s, n), loop_cut_sums(s, n), rtol=1e-13)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_predict_all(backend, n):
    rng = np.random.default_rng(10 + n)
    w = rng.normal(size=(n, n))
    w = w + w.T
    np.fill_diagonal(w, 0)
    np.testing.assert_allclose(backend.predict_all(w, n), loop_predict(w, n), atol=1e-12)


@pytest.mark.parametrize("mask", [0b0, 0b1, 0b1010, 0b0110, 0b11111])
def test_schmidt_indices(backend, mask):
    n = 5
    table = backend.schmidt_indices(mask, n)
    inside = [k for k in range(n) if (mask >> k) & 1]
    outside = [k for k in range(n) if not (mask >> k) & 1]
    assert table.shape == (1 << len(inside), 1 << len(outside))
    for r in range(table.shape[0]):
        for c in range(table.shape[1]):
            idx = int(table[r, c])
            assert [(idx >> k) & 1 for k in inside] == [(r >> b) & 1 for b in range(len(inside))]
            assert [(idx >> k) & 1 for k in outside] == [(c >> b) & 1 for b in range(len(outside))]


def test_sector_states(backend):
    got = backend.sector_states(8, 4)
    want = [m for m in range(256) if bin(m).count("1") == 4]
    assert got.tolist() == want


@pytest.mark.parametrize("delta", [0.0, 1.0, 2.5])
def test_xxz_sector_matches_full_space(backend, delta):
    import scipy.sparse as sp
    from conftest import full_xxz_hamiltonian

    n = 6
    bonds = [(k, (k + 1) % n) for k in range(n)]
    weights = [1.0, 0.5, 1.5, 1.0, 0.7, 1.2]
    states, rows, cols, vals = backend.xxz_sector(
        n, np.array([b[0] for b in bonds]), np.array([b[1] for b in bonds]), np.array(weights), delta
    )
    dim = len(states)
    sector = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim)).toarray()
    full = full_xxz_hamiltonian(n, delta, bonds, weights).toarray()
    np.testing.assert_allclose(sector, full[np.ix_(states, states)].real, atol=1e-14)


def test_backends_agree_on_random_inputs():
    pytest.importorskip("eamkit._ckernels")
    from eamkit import _ckernels

    n = 9
    s = np.random.default_rng(0).random(1 << n)
    np.testing.assert_allclose(_ckernels.cut_sums(s, n), _kernels_py.cut_sums(s, n), rtol=1e-12)
    w = np.random.default_rng(1).random((n, n))
    w = w + w.T
    np.fill_diagonal(w, 0)
    np.testing.assert_allclose(_ckernels.predict_all(w, n), _kernels_py.predict_all(w, n), atol=1e-12)
    assert np.array_equal(_ckernels.schmidt_indices(0b101100101, n), _kernels_py.schmidt_indices(0b101100101, n))


@pytest.mark.parametrize("mask", [0b0, 0b101, 0b11010, 0b111111])
def test_fermion_signs(backend, mask):
    n = 6
    got = backend.fermion_signs(mask, n)
    for x in range(1 << n):
        count = sum(
            1
            for i in range(n)
            for j in range(i)
            if (mask >> i) & 1 and not (mask >> j) & 1 and (x >> i) & 1 and (x >> j) & 1
        )
        assert got[x] == (-1) ** count
