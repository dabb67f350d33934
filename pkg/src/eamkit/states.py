"""Pure states and free-fermion ground states.

Conventions
-----------
* Basis index bit ``i`` is the local state of site ``i``; site 0 is the least
  significant bit. Bit value 1 is spin up (and, under Jordan-Wigner, an
  occupied fermion mode).
* Spin operators are ``S = sigma / 2``.
* Sites are 0-based. The dimerized hopping formula ``1 + delta * (-1)**i``
  uses the 1-based index of the bond's left site, so the bond between 0-based
  sites ``k`` and ``k + 1`` has amplitude ``1 + delta * (-1)**(k + 1)``.
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .errors import CapExceededError, ConvergenceError, DegeneracyError, DegeneracyWarning

DEFAULT_STATEVECTOR_CAP = 14
_DENSE_SECTOR_LIMIT = 400


def statevector_cap() -> int:
    """Largest N accepted on the state-vector path (``EAMKIT_MAX_N`` overrides)."""
    raw = os.environ.get("EAMKIT_MAX_N")
    return int(raw) if raw else DEFAULT_STATEVECTOR_CAP


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over ``n_sites`` qubits."""

    n_sites: int
    amplitudes: np.ndarray
    label: str = ""

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")
        if amps.shape != (1 << self.n_sites,):
            raise ValueError(
                f"expected {1 << self.n_sites} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


def _check_matching(n: int, pairs: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    pairs = [(int(a), int(b)) for a, b in pairs]
    seen = [s for p in pairs for s in p]
    if sorted(seen) != list(range(n)):
        raise ValueError(f"{pairs} is not a perfect matching on {n} sites")
    return pairs


def nearest_neighbor_matching(n: int) -> list[tuple[int, int]]:
    return [(k, k + 1) for k in range(0, n, 2)]


def rainbow_matching(n: int) -> list[tuple[int, int]]:
    # 1-based (k, N + 1 - k) -> 0-based (k, N - 1 - k)
    return [(k, n - 1 - k) for k in range(n // 2)]


def build_dimer(n: int, matching: Sequence[tuple[int, int]], label: str = "dimer") -> PureState:
    """Product of singlets over a perfect matching.

    Each pair ``(a, b)`` carries ``(|up_a down_b> - |down_a up_b>) / sqrt(2)``.
    """
    if n % 2:
        raise ValueError(f"dimer states need an even number of sites, got {n}")
    pairs = _check_matching(n, matching)
    # iterate over the 2^(n/2) choices of which member of each pair is up
    idx = np.zeros(1, dtype=np.int64)
    sign = np.ones(1)
    for a, b in pairs:
        idx = np.concatenate([idx | (1 << a), idx | (1 << b)])
        sign = np.concatenate([sign, -sign])
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[idx] = sign / math.sqrt(1 << len(pairs))
    return PureState(n, amps, label)


def build_rainbow(n: int) -> PureState:
    if n % 2:
        raise ValueError(f"rainbow states need an even number of sites, got {n}")
    return build_dimer(n, rainbow_matching(n), label="rainbow")


def build_ghz(n: int) -> PureState:
    if n < 2:
        raise ValueError("GHZ needs at least 2 sites")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return PureState(n, amps, "ghz")


@dataclass(frozen=True)
class XxzSpec:
    """XXZ chain ``sum_b w_b (Sx Sx + Sy Sy + delta Sz Sz)`` on nearest neighbors.

    ``bond_weights`` (one per bond, open chain order then the wrap bond)
    defaults to all ones.
    """

    n_sites: int
    delta: float = 1.0
    boundary: str = "periodic"
    bond_weights: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("XXZ chain needs n_sites >= 2")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.bond_weights is not None and len(self.bond_weights) != len(self.bonds()):
            raise ValueError(
                f"need {len(self.bonds())} bond weights, got {len(self.bond_weights)}"
            )

    def bonds(self) -> list[tuple[int, int]]:
        n = self.n_sites
        out = [(k, k + 1) for k in range(n - 1)]
        if self.boundary == "periodic" and n > 2:
            out.append((n - 1, 0))
        return out

    def describe(self) -> str:
        text = f"xxz(delta={self.delta:g},boundary={self.boundary}"
        if self.bond_weights is not None:
            text += ",weights=" + "/".join(f"{w:g}" for w in self.bond_weights)
        return text + ")"


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    mags = np.abs(vec)
    k = int(np.argmax(mags >= mags.max() - 1e-12))
    return vec * (abs(vec[k]) / vec[k])


def xxz_ground_state(spec: XxzSpec, cap: Optional[int] = None, tol: float = 1e-10) -> PureState:
    """Lowest eigenvector of the XXZ chain in the zero-magnetization sector.

    Small sectors are diagonalized densely, larger ones with ARPACK. The
    result is embedded in the full ``2**N`` space with its largest amplitude
    made real and positive.

    Raises
    ------
    CapExceededError
        ``n_sites`` exceeds ``cap`` (default :func:`statevector_cap`).
    ConvergenceError
        Eigenvector residual above ``tol``.
    """
    n = spec.n_sites
    cap = statevector_cap() if cap is None else cap
    if n > cap:
        raise CapExceededError(f"xxz ground state with N={n} exceeds cap {cap}")
    if n % 2:
        raise ValueError("zero-magnetization sector needs an even number of sites")
    bonds = spec.bonds()
    weights = np.ones(len(bonds)) if spec.bond_weights is None else np.asarray(spec.bond_weights, float)
    bi = np.array([b[0] for b in bonds], dtype=np.int64)
    bj = np.array([b[1] for b in bonds], dtype=np.int64)
    states, rows, cols, vals = kernels.xxz_sector(n, bi, bj, weights, float(spec.delta))
    dim = len(states)
    ham = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))

    if dim <= _DENSE_SECTOR_LIMIT:
        evals, evecs = np.linalg.eigh(ham.toarray())
        evals, evecs = evals[:2], evecs[:, :2]
    else:
        v0 = np.ones(dim) / math.sqrt(dim)
        try:
            evals, evecs = spla.eigsh(ham, k=2, which="SA", tol=1e-14, v0=v0, maxiter=20 * dim)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(f"ARPACK did not converge for {spec.describe()}") from exc
        order = np.argsort(evals)
        evals, evecs = evals[order], evecs[:, order]

    vec = evecs[:, 0]
    residual = float(np.linalg.norm(ham @ vec - evals[0] * vec))
    if residual > tol:
        raise ConvergenceError(
            f"ground state residual {residual:.3e} > {tol:g} for {spec.describe()}"
        )
    if len(evals) > 1 and evals[1] - evals[0] < 1e-10:
        warnings.warn(
            f"degenerate ground space in {spec.describe()} "
            f"(gap {evals[1] - evals[0]:.2e}); returning the solver's lowest vector",
            DegeneracyWarning,
            stacklevel=2,
        )
    full = np.zeros(1 << n, dtype=np.complex128)
    full[states] = vec / np.linalg.norm(vec)
    return PureState(n, _fix_phase(full), spec.describe())


@dataclass(frozen=True, eq=False)
class HoppingMatrix:
    """Real symmetric hopping amplitudes ``t[i, j]``."""

    t: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.array(self.t, dtype=np.float64)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("hopping matrix must be square")
        if not np.array_equal(t, t.T):
            raise ValueError("hopping matrix must be symmetric")
        if not np.all(np.isfinite(t)):
            raise ValueError("hopping matrix has non-finite entries")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    @property
    def n_sites(self) -> int:
        return self.t.shape[0]


def dimerized_hopping(n: int, delta: float, periodic: bool = False) -> HoppingMatrix:
    """Nearest-neighbor chain with bond amplitudes ``1 + delta * (-1)**i``.

    ``i`` is the 1-based left site of the bond. ``periodic`` adds the wrap
    bond between sites ``n-1`` and ``0`` (left site ``n`` in 1-based terms).
    """
    if n < 2:
        raise ValueError("need at least 2 sites")
    t = np.zeros((n, n))
    for k in range(n - 1):
        t[k, k + 1] = t[k + 1, k] = 1 + delta * (-1) ** (k + 1)
    if periodic and n > 2:
        t[n - 1, 0] = t[0, n - 1] = 1 + delta * (-1) ** n
    label = f"hopping(dimerized={delta:g},boundary={'periodic' if periodic else 'open'})"
    return HoppingMatrix(t, label)


@dataclass(frozen=True, eq=False)
class FreeFermionGround:
    """Slater-determinant ground state of ``-1/2 sum t_ij (c_i^+ c_j + h.c.)``."""

    hopping: HoppingMatrix
    occupied_modes: tuple[int, ...]
    energies: np.ndarray
    mode_vectors: np.ndarray
    correlation: np.ndarray = field(repr=False)

    @property
    def n_sites(self) -> int:
        return self.hopping.n_sites

    @property
    def label(self) -> str:
        return f"freefermion({self.hopping.label},particles={len(self.occupied_modes)})"


def freefermion_ground(hopping: HoppingMatrix, n_particles: Optional[int] = None) -> FreeFermionGround:
    """Fill the ``n_particles`` lowest modes of ``-t/2`` (default: half filling).

    Raises
    ------
    DegeneracyError
        The highest occupied and lowest empty levels coincide within 1e-12.
    """
    n = hopping.n_sites
    if n_particles is None:
        n_particles = n // 2
    if not 0 <= n_particles <= n:
        raise ValueError(f"n_particles={n_particles} outside [0, {n}]")
    energies, vecs = np.linalg.eigh(-0.5 * hopping.t)
    if 0 < n_particles < n and energies[n_particles] - energies[n_particles - 1] < 1e-12:
        raise DegeneracyError(
            f"Fermi level degenerate at filling {n_particles}/{n} "
            f"(E={energies[n_particles - 1]:.6g}); change boundary or filling"
        )
    occ = vecs[:, :n_particles]
    corr = occ @ occ.T
    corr = 0.5 * (corr + corr.T)
    for arr in (energies, vecs, corr):
        arr.setflags(write=False)
    return FreeFermionGround(hopping, tuple(range(n_particles)), energies, vecs, corr)
