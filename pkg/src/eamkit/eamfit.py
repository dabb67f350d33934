"""Least-squares fit of the entanglement adjacency matrix.

Every block entropy is modeled as the total weight of the links cut by the
block, ``S(A) ~ sum_{i in A, j not in A} J[i, j] (+ s0)``. Over all ``2**N``
masks the Gram matrix of the design system is ``2**(N-2) (I + 11^T)``, so the
no-offset fit has a closed form that only needs the per-pair cut sums of the
table. The design matrix itself is never built except by
:func:`design_matrix` (small N, used for cross-checks).
"""
from __future__ import annotations

import io
import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import kernels
from .entropy import EntropyTable, _fmt
from .errors import TableFormatError


@dataclass(eq=False)
class EntanglementAdjacency:
    """Symmetric link weights with zero diagonal, plus optional offset ``s0``."""

    n_sites: int
    j: np.ndarray
    s0: Optional[float] = None

    def __post_init__(self):
        j = np.array(self.j, dtype=np.float64)
        if j.shape != (self.n_sites, self.n_sites):
            raise ValueError(f"weight matrix shape {j.shape} != ({self.n_sites}, {self.n_sites})")
        if not np.array_equal(j, j.T):
            raise ValueError("weight matrix must be symmetric")
        if np.any(np.diag(j) != 0):
            raise ValueError("weight matrix must have zero diagonal")
        self.j = j

    @classmethod
    def from_pairs(cls, n: int, weights, s0: Optional[float] = None) -> "EntanglementAdjacency":
        ii, jj = kernels.pair_list(n)
        j = np.zeros((n, n))
        j[ii, jj] = weights
        j[jj, ii] = weights
        return cls(n, j, s0)

    def pair_weights(self) -> np.ndarray:
        ii, jj = kernels.pair_list(self.n_sites)
        return self.j[ii, jj]

    def scaled(self, factor: float) -> "EntanglementAdjacency":
        s0 = None if self.s0 is None else self.s0 * factor
        return EntanglementAdjacency(self.n_sites, self.j * factor, s0)


@dataclass
class FitReport:
    error: float
    max_residual: float
    n_equations: int
    method: str = "closed_form"
    offset_enabled: bool = False
    rank_deficient: bool = False


def n_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(i: int, j: int, n: int) -> int:
    """Position of pair ``(i, j)``, ``i < j``, in lexicographic order."""
    if not 0 <= i < j < n:
        raise ValueError(f"invalid pair ({i}, {j}) for {n} sites")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def design_coefficient(mask: int, pair: tuple[int, int]) -> int:
    """1 if exactly one site of ``pair`` lies in ``mask``."""
    i, j = pair
    return ((mask >> i) ^ (mask >> j)) & 1


def design_matrix(n: int) -> np.ndarray:
    """Dense ``2**N x M`` design matrix (rows = masks, columns = pairs)."""
    if n > 12:
        raise ValueError("dense design matrix only for N <= 12")
    masks = np.arange(1 << n, dtype=np.int64)
    ii, jj = kernels.pair_list(n)
    return (((masks[:, None] >> ii) ^ (masks[:, None] >> jj)) & 1).astype(np.float64)


def predict_all(eam: EntanglementAdjacency) -> np.ndarray:
    """Predicted entropy of every mask; trivial masks are 0."""
    out = kernels.predict_all(eam.j, eam.n_sites)
    if eam.s0 is not None:
        out[1:-1] += eam.s0
    return out


def predict_entropy(eam: EntanglementAdjacency, mask: int) -> float:
    n = eam.n_sites
    if not 0 <= mask < (1 << n):
        raise ValueError(f"mask {mask} invalid for {n} sites")
    if mask == 0 or mask == (1 << n) - 1:
        return 0.0
    inside = np.array([(mask >> k) & 1 for k in range(n)], dtype=bool)
    total = float(eam.j[np.ix_(inside, ~inside)].sum())
    return total + (eam.s0 or 0.0)


def fit_error(table: EntropyTable, eam: EntanglementAdjacency) -> FitReport:
    """Mean absolute residual over all ``2**N`` masks, plus the max residual."""
    if table.n_sites != eam.n_sites:
        raise ValueError("table and EAM disagree on n_sites")
    resid = np.abs(table.entropies - predict_all(eam))
    return FitReport(
        error=float(resid.mean()),
        max_residual=float(resid.max()),
        n_equations=len(resid),
        offset_enabled=eam.s0 is not None,
    )


def _check_table(table: EntropyTable):
    if table.entropies.shape != (1 << table.n_sites,) or not np.all(np.isfinite(table.entropies)):
        raise TableFormatError("fit needs a complete, finite entropy table")
    if table.n_sites < 2:
        raise ValueError("fit needs at least 2 sites")


def fit_eam(table: EntropyTable, offset: bool = False) -> tuple[EntanglementAdjacency, FitReport]:
    """Least-squares adjacency (and offset) for a complete entropy table.

    Without offset every mask enters the fit and the closed form is used.
    With offset the two trivial masks are dropped, and the ``(M+1)``
    normal equations are solved by SVD (minimum-norm if singular).
    """
    _check_table(table)
    n = table.n_sites
    m = n_pairs(n)
    rhs = kernels.cut_sums(table.entropies, n)
    scale = 2.0 ** (n - 2)
    rank_deficient = False
    if not offset:
        weights = (rhs - rhs.sum() / (m + 1)) / scale
        eam = EntanglementAdjacency.from_pairs(n, weights)
        n_eq = 1 << n
    else:
        gram = np.empty((m + 1, m + 1))
        gram[:m, :m] = scale * (np.eye(m) + 1.0)
        gram[:m, m] = gram[m, :m] = 2.0 ** (n - 1)
        gram[m, m] = (1 << n) - 2
        b = np.append(rhs, table.entropies[1:-1].sum())
        sol, _, rank, _ = np.linalg.lstsq(gram, b, rcond=None)
        rank_deficient = rank < m + 1
        eam = EntanglementAdjacency.from_pairs(n, sol[:m], float(sol[m]))
        n_eq = (1 << n) - 2
    report = fit_error(table, eam)
    report.n_equations = n_eq
    report.method = "closed_form" if not offset else "generic_least_squares"
    report.rank_deficient = bool(rank_deficient)
    return eam, report


def fit_eam_dense(table: EntropyTable, offset: bool = False) -> tuple[EntanglementAdjacency, FitReport]:
    """Same fit by a dense ``lstsq`` on the materialized design matrix."""
    _check_table(table)
    n = table.n_sites
    d = design_matrix(n)
    s = table.entropies
    if offset:
        d = np.hstack([d, np.ones((len(d), 1))])[1:-1]
        s = s[1:-1]
    sol, _, rank, _ = np.linalg.lstsq(d, s, rcond=None)
    m = n_pairs(n)
    eam = EntanglementAdjacency.from_pairs(n, sol[:m], float(sol[m]) if offset else None)
    report = fit_error(table, eam)
    report.n_equations = len(s)
    report.method = "generic_least_squares"
    report.rank_deficient = bool(rank < d.shape[1])
    return eam, report


def mutual_information_matrix(table: EntropyTable) -> np.ndarray:
    """``I(i:j) = S_i + S_j - S_ij`` from the single- and two-site entries."""
    n = table.n_sites
    s = table.entropies
    mi = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            mi[i, j] = mi[j, i] = s[1 << i] + s[1 << j] - s[(1 << i) | (1 << j)]
    return mi


# -- serialization -----------------------------------------------------------

def eam_to_json(eam: EntanglementAdjacency) -> str:
    ii, jj = kernels.pair_list(eam.n_sites)
    links = [[int(a), int(b), float(_fmt(eam.j[a, b]))] for a, b in zip(ii, jj)]
    s0 = None if eam.s0 is None else float(_fmt(eam.s0))
    return json.dumps({"n_sites": eam.n_sites, "s0": s0, "links": links}) + "\n"


def eam_from_json(text: str) -> EntanglementAdjacency:
    try:
        doc = json.loads(text)
        n = int(doc["n_sites"])
        j = np.zeros((n, n))
        seen = set()
        for a, b, w in doc["links"]:
            a, b = int(a), int(b)
            if not 0 <= a < b < n:
                raise ValueError(f"bad link ({a}, {b})")
            seen.add((a, b))
            j[a, b] = j[b, a] = float(w)
        if len(seen) != n_pairs(n):
            raise ValueError(f"expected {n_pairs(n)} links, got {len(seen)}")
        s0 = doc.get("s0")
        return EntanglementAdjacency(n, j, None if s0 is None else float(s0))
    except (KeyError, TypeError, ValueError) as exc:
        raise TableFormatError(f"bad EAM file: {exc}") from exc


def eam_to_csv(eam: EntanglementAdjacency) -> str:
    buf = io.StringIO()
    buf.write(f"# n_sites={eam.n_sites}\n")
    buf.write(f"# s0={'' if eam.s0 is None else _fmt(eam.s0)}\n")
    for row in eam.j:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def report_to_json(report: FitReport) -> str:
    doc = asdict(report)
    doc["error"] = float(_fmt(doc["error"]))
    doc["max_residual"] = float(_fmt(doc["max_residual"]))
    return json.dumps(doc) + "\n"
