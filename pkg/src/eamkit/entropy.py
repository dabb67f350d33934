"""Von Neumann block entropies and full bipartition sweeps.

Two engines produce the same :class:`EntropyTable`:

``statevector``
    Schmidt decomposition of a :class:`~eamkit.states.PureState` across
    qubits. ``fermionic=True`` reads the amplitudes as a Fock state of
    spinless fermions instead (engine id ``statevector-fermionic``).
``freefermion``
    Spectrum of the restricted correlation matrix of a
    :class:`~eamkit.states.FreeFermionGround`.

All entropies are in nats.
"""
from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from itertools import combinations
from typing import Optional, Union

import numpy as np

from . import kernels
from .errors import CapExceededError, EamkitError, TableFormatError
from .states import FreeFermionGround, PureState, statevector_cap

DEFAULT_FREEFERMION_CAP = 20
_CLAMP_TOL = 1e-8
_CHUNK_BYTES = 1 << 25

Source = Union[PureState, FreeFermionGround]


def von_neumann(spectrum) -> float:
    """``-sum p ln p`` of a probability vector, with ``0 ln 0 = 0``.

    Entries down to -1e-12 are clamped to zero; the sum must be 1 within 1e-8.
    """
    p = np.asarray(spectrum, dtype=np.float64).ravel()
    if p.size and p.min() < -1e-12:
        raise ValueError(f"negative spectrum entry {p.min():.3e}")
    total = p.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"spectrum sums to {total!r}, not 1")
    p = np.clip(p, 0.0, 1.0)
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum()) + 0.0


def binary_entropy(x: float) -> float:
    """``-[x ln x + (1-x) ln(1-x)]`` for ``x`` in [0, 1] (1e-10 slack, clamped)."""
    x = float(x)
    if x < -1e-10 or x > 1 + 1e-10:
        raise ValueError(f"binary_entropy argument {x!r} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    if x == 0.0 or x == 1.0:
        return 0.0
    # log1p keeps the small-argument side accurate
    if x <= 0.5:
        return -(x * math.log(x) + (1.0 - x) * math.log1p(-x))
    y = 1.0 - x
    return -(y * math.log(y) + x * math.log1p(-y))


def _binary_entropy_sum(nu: np.ndarray, tol: float = _CLAMP_TOL) -> np.ndarray:
    # rows of eigenvalues -> sum of binary entropies per row
    if nu.size and (nu.min() < -tol or nu.max() > 1 + tol):
        bad = nu.min() if nu.min() < -tol else nu.max()
        raise EamkitError(f"correlation eigenvalue {bad!r} outside [0, 1]")
    nu = np.clip(nu, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(nu > 0, nu * np.log(nu), 0.0) + np.where(nu < 1, (1 - nu) * np.log1p(-nu), 0.0))
    return h.sum(axis=-1) + 0.0


def _schmidt_entropies(mats: np.ndarray) -> np.ndarray:
    sv = np.linalg.svd(mats, compute_uv=False)
    p = sv * sv
    total = p.sum(axis=-1)
    if np.any(np.abs(total - 1.0) > _CLAMP_TOL):
        raise EamkitError("Schmidt spectrum does not sum to 1; state not normalized?")
    p = np.clip(p, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log(p), 0.0)
    return -terms.sum(axis=-1) + 0.0


def _sites(mask: int, n: int) -> list[int]:
    return [k for k in range(n) if (mask >> k) & 1]


def _check_mask(mask: int, n: int) -> int:
    mask = int(mask)
    if not 0 <= mask < (1 << n):
        raise ValueError(f"mask {mask} invalid for {n} sites")
    return mask


def block_entropy_statevector(state: PureState, mask: int, fermionic: bool = False) -> float:
    """Entanglement entropy of the sites in ``mask`` via singular values.

    With ``fermionic=True`` the amplitudes are read as Fock amplitudes of
    spinless fermions (mode order = site order, bit 1 = occupied) and the
    block is the set of fermion modes in ``mask``. This differs from the
    qubit entropy whenever neither ``mask`` nor its complement is an interval.
    """
    n = state.n_sites
    mask = _check_mask(mask, n)
    full = (1 << n) - 1
    if bin(mask).count("1") > n // 2:
        mask ^= full
    if mask == 0:
        return 0.0
    amps = state.amplitudes
    if fermionic:
        amps = amps * kernels.fermion_signs(mask, n)
    mat = amps[kernels.schmidt_indices(mask, n)]
    return float(_schmidt_entropies(mat[None])[0])


def block_entropy_freefermion(ffg: FreeFermionGround, mask: int) -> float:
    """Sum of binary entropies of the correlation-matrix spectrum on ``mask``."""
    n = ffg.n_sites
    mask = _check_mask(mask, n)
    sites = _sites(mask, n)
    if not sites:
        return 0.0
    try:
        nu = np.linalg.eigvalsh(ffg.correlation[np.ix_(sites, sites)])
    except np.linalg.LinAlgError as exc:
        raise EamkitError(f"eigensolver failed for mask {mask}") from exc
    return float(_binary_entropy_sum(nu))


@dataclass(eq=False)
class EntropyTable:
    """All ``2**n_sites`` block entropies indexed by mask."""

    n_sites: int
    entropies: np.ndarray
    engine: str = "unknown"
    model: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.entropies = np.asarray(self.entropies, dtype=np.float64)
        if self.entropies.shape != (1 << self.n_sites,):
            raise TableFormatError(
                f"table for N={self.n_sites} needs {1 << self.n_sites} entries, "
                f"got {self.entropies.shape}"
            )

    def __getitem__(self, mask: int) -> float:
        return float(self.entropies[mask])

    def scaled(self, factor: float) -> "EntropyTable":
        return EntropyTable(self.n_sites, self.entropies * factor, self.engine, self.model)


def canonical_masks(n: int) -> np.ndarray:
    """Masks with popcount < N/2, plus the half-size masks containing site 0."""
    out = []
    for k in range(n // 2 + 1):
        for combo in combinations(range(n), k):
            if 2 * k == n and combo[0] != 0:
                continue
            out.append(sum(1 << s for s in combo))
    return np.array(sorted(out), dtype=np.int64)


def _chunks(masks_by_size: dict, n: int, bytes_per_item) -> list[tuple[int, np.ndarray]]:
    jobs = []
    for k, masks in masks_by_size.items():
        step = max(1, _CHUNK_BYTES // max(1, bytes_per_item(k)))
        for start in range(0, len(masks), step):
            jobs.append((k, masks[start:start + step]))
    return jobs


def _sweep_statevector(state: PureState, masks: np.ndarray, fermionic: bool) -> np.ndarray:
    n = state.n_sites
    amps = state.amplitudes
    if fermionic:
        mats = np.stack([
            (amps * kernels.fermion_signs(int(m), n))[kernels.schmidt_indices(int(m), n)] for m in masks
        ])
    else:
        mats = amps[np.stack([kernels.schmidt_indices(int(m), n) for m in masks])]
    return _schmidt_entropies(mats)


def _sweep_freefermion(ffg: FreeFermionGround, masks: np.ndarray, k: int) -> np.ndarray:
    n = ffg.n_sites
    bits = (masks[:, None] >> np.arange(n)) & 1
    sites = np.nonzero(bits)[1].reshape(len(masks), k)
    blocks = ffg.correlation[sites[:, :, None], sites[:, None, :]]
    return _binary_entropy_sum(np.linalg.eigvalsh(blocks))


def all_entropies(
    source: Source,
    threads: Optional[int] = None,
    cap: Optional[int] = None,
    fermionic: bool = False,
) -> EntropyTable:
    """Sweep every bipartition of ``source`` into an :class:`EntropyTable`.

    Only canonical masks are computed; complements are copied from them.
    ``threads`` sets the width of the thread pool over mask chunks.
    ``fermionic`` applies to state vectors only (see
    :func:`block_entropy_statevector`).
    """
    n = source.n_sites
    if isinstance(source, PureState):
        engine = "statevector-fermionic" if fermionic else "statevector"
        cap = statevector_cap() if cap is None else cap
    elif isinstance(source, FreeFermionGround):
        if fermionic:
            raise ValueError("fermionic=True only applies to state vectors")
        engine = "freefermion"
        cap = DEFAULT_FREEFERMION_CAP if cap is None else cap
    else:
        raise TypeError(f"unsupported entropy source {type(source).__name__}")
    if n > cap:
        raise CapExceededError(f"{engine} sweep with N={n} exceeds cap {cap}")

    masks = canonical_masks(n)
    pops = np.array([bin(int(m)).count("1") for m in masks])
    by_size = {k: masks[pops == k] for k in range(1, n // 2 + 1) if np.any(pops == k)}
    if isinstance(source, PureState):
        jobs = _chunks(by_size, n, lambda k: 16 << n)
        work = lambda job: _sweep_statevector(source, job[1], fermionic)
    else:
        jobs = _chunks(by_size, n, lambda k: 8 * k * k)
        work = lambda job: _sweep_freefermion(source, job[1], job[0])

    out = np.zeros(1 << n, dtype=np.float64)
    width = threads or os.cpu_count() or 1
    if width > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=width) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(job) for job in jobs]
    for (_, chunk), values in zip(jobs, results):
        out[chunk] = values
    full = (1 << n) - 1
    out[full ^ masks] = out[masks]
    out[0] = out[full] = 0.0
    return EntropyTable(n, out, engine, getattr(source, "label", ""))


# -- serialization -----------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def round_sig(values: np.ndarray) -> np.ndarray:
    """Round to the 12 significant digits used in files."""
    return np.array([float(_fmt(v)) for v in np.ravel(values)]).reshape(np.shape(values))


def _stamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def table_to_csv(table: EntropyTable, timestamp: bool = True, scale: float = 1.0) -> str:
    buf = io.StringIO()
    buf.write(f"# n_sites={table.n_sites}\n# engine={table.engine}\n# model={table.model}\n")
    if scale != 1.0:
        buf.write("# units=bits\n")
    if timestamp:
        buf.write(f"# created={_stamp()}\n")
    for m, s in enumerate(table.entropies):
        buf.write(f"{m},{bin(m).count('1')},{_fmt(s * scale)}\n")
    return buf.getvalue()


def table_to_json(table: EntropyTable, timestamp: bool = True) -> str:
    doc = {
        "n_sites": table.n_sites,
        "engine": table.engine,
        "model": table.model,
        "masks": list(range(1 << table.n_sites)),
        "popcounts": [bin(m).count("1") for m in range(1 << table.n_sites)],
        "entropies_nats": [float(_fmt(s)) for s in table.entropies],
    }
    if timestamp:
        doc["created"] = _stamp()
    return json.dumps(doc, indent=1) + "\n"


def _validate_rows(n: int, masks, pops, values) -> np.ndarray:
    expected = 1 << n
    if len(values) != expected:
        raise TableFormatError(f"table for N={n} has {len(values)} rows, expected {expected}")
    if list(masks) != list(range(expected)):
        raise TableFormatError("masks must run 0..2^N-1 in ascending order")
    for m, p in zip(masks, pops):
        if bin(m).count("1") != p:
            raise TableFormatError(f"popcount column wrong at mask {m}")
    return np.asarray(values, dtype=np.float64)


def table_from_csv(text: str) -> EntropyTable:
    meta, masks, pops, values = {}, [], [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key.strip()] = val.strip()
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise TableFormatError(f"line {lineno}: expected 3 fields, got {len(parts)}")
        try:
            masks.append(int(parts[0]))
            pops.append(int(parts[1]))
            values.append(float(parts[2]))
        except ValueError as exc:
            raise TableFormatError(f"line {lineno}: {exc}") from exc
    if "n_sites" not in meta:
        raise TableFormatError("missing '# n_sites=' header")
    if meta.get("units", "nats") != "nats":
        raise TableFormatError("table files must be in nats")
    n = int(meta["n_sites"])
    ent = _validate_rows(n, masks, pops, values)
    return EntropyTable(n, ent, meta.get("engine", "unknown"), meta.get("model", ""))


def table_from_json(text: str) -> EntropyTable:
    try:
        doc = json.loads(text)
        n = int(doc["n_sites"])
        ent = _validate_rows(n, doc["masks"], doc["popcounts"], doc["entropies_nats"])
    except (KeyError, TypeError, ValueError) as exc:
        raise TableFormatError(f"bad JSON entropy table: {exc}") from exc
    return EntropyTable(n, ent, doc.get("engine", "unknown"), doc.get("model", ""))


def read_table(path: str) -> EntropyTable:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return table_from_json(text)
    return table_from_csv(text)
