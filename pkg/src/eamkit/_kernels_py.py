"""Pure numpy implementations of the bitmask kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
The numpy versions vectorize over masks; the compiled ones loop.
"""
import numpy as np


def pair_list(n):
    """Lexicographic (i, j), i < j, as two int64 arrays."""
    i, j = np.triu_indices(n, k=1)
    return i.astype(np.int64), j.astype(np.int64)


def cut_sums(entropies, n):
    """Sum of ``entropies[m]`` over all masks ``m`` that cut each pair.

    Returns a vector of length n(n-1)/2 in lexicographic pair order.
    """
    s = np.ascontiguousarray(entropies, dtype=np.float64)
    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)
    ii, jj = pair_list(n)
    out = np.empty(len(ii), dtype=np.float64)
    for p in range(len(ii)):
        out[p] = s[bits[:, ii[p]] != bits[:, jj[p]]].sum()
    return out


def predict_all(weights, n):
    """Cut weight ``sum_{i in m, j not in m} w[i, j]`` for every mask ``m``.

    Built bit by bit: adding site k to a mask over sites < k changes the cut
    by ``rowsum[k] - 2 * sum_{i in m} w[i, k]``.
    """
    w = np.ascontiguousarray(weights, dtype=np.float64)
    rowsum = w.sum(axis=1)
    out = np.zeros(1 << n, dtype=np.float64)
    for k in range(n):
        lo = np.arange(1 << k, dtype=np.int64)
        bits = ((lo[:, None] >> np.arange(k, dtype=np.int64)) & 1).astype(np.float64)
        inner = bits @ w[:k, k] if k else np.zeros(1)
        out[(1 << k):(2 << k)] = out[:1 << k] + rowsum[k] - 2.0 * inner
    return out


def _deposit(values, positions):
    # scatter the low bits of ``values`` onto the bit positions listed
    out = np.zeros_like(values)
    for b, pos in enumerate(positions):
        out |= ((values >> b) & 1) << pos
    return out


def schmidt_indices(mask, n):
    """Index table ``T`` with ``psi[T]`` the Schmidt matrix across ``mask``.

    Rows enumerate configurations of the sites in ``mask`` (ascending site
    order, lowest site = least significant), columns those of the complement.
    """
    inside = [k for k in range(n) if (mask >> k) & 1]
    outside = [k for k in range(n) if not (mask >> k) & 1]
    rows = _deposit(np.arange(1 << len(inside), dtype=np.int64), inside)
    cols = _deposit(np.arange(1 << len(outside), dtype=np.int64), outside)
    return rows[:, None] | cols[None, :]


def sector_states(n, n_up):
    """All n-bit integers with popcount ``n_up``, ascending."""
    masks = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros_like(masks)
    for k in range(n):
        pop += (masks >> k) & 1
    return masks[pop == n_up]


def xxz_sector(n, bonds_i, bonds_j, weights, delta):
    """Sparse XXZ Hamiltonian in the fixed-magnetization sector with N/2 up spins.

    Bond b couples sites ``bonds_i[b]`` and ``bonds_j[b]`` with
    ``weights[b] * (Sx Sx + Sy Sy + delta Sz Sz)``, spin-1/2 operators.

    Returns
    -------
    states, rows, cols, vals
        Sector basis and COO triplets (duplicates are summed by the caller).
    """
    states = sector_states(n, n // 2)
    lookup = np.full(1 << n, -1, dtype=np.int64)
    lookup[states] = np.arange(len(states), dtype=np.int64)
    diag = np.zeros(len(states), dtype=np.float64)
    rows, cols, vals = [], [], []
    for a, b, w in zip(bonds_i, bonds_j, weights):
        ba = (states >> a) & 1
        bb = (states >> b) & 1
        same = ba == bb
        diag += np.where(same, 0.25, -0.25) * delta * w
        flip = np.nonzero(~same)[0]
        target = states[flip] ^ ((1 << int(a)) | (1 << int(b)))
        rows.append(flip)
        cols.append(lookup[target])
        vals.append(np.full(len(flip), 0.5 * w))
    idx = np.arange(len(states), dtype=np.int64)
    rows = np.concatenate(rows + [idx])
    cols = np.concatenate(cols + [idx])
    vals = np.concatenate(vals + [diag])
    return states, rows, cols, vals


def fermion_signs(mask, n):
    """Sign of moving the occupied modes of ``mask`` ahead of the rest.

    For each Fock configuration ``x`` (mode order = site order) this is
    ``(-1)**sum_{i in mask, x_i = 1} #{j not in mask : j < i, x_j = 1}``.
    """
    x = np.arange(1 << n, dtype=np.int64)
    below = np.zeros_like(x)
    parity = np.zeros_like(x)
    for i in range(n):
        occ = (x >> i) & 1
        if (mask >> i) & 1:
            parity ^= occ & below
        else:
            below ^= occ
    return 1.0 - 2.0 * parity
