"""Per-site entanglement contours of a block.

``contour_from_eam`` works for any state with a fitted adjacency matrix;
``contour_freefermion`` uses the restricted correlation matrix and only
applies to Slater determinants.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from .eamfit import EntanglementAdjacency
from .entropy import _binary_entropy_sum, _fmt, _sites
from .errors import EamkitError
from .states import FreeFermionGround


@dataclass(eq=False)
class ContourVector:
    mask: int
    sites: tuple[int, ...]
    values: np.ndarray
    route: str = ""

    def total(self) -> float:
        return float(self.values.sum())

    def as_dict(self) -> dict[int, float]:
        return {s: float(v) for s, v in zip(self.sites, self.values)}


def half_chain_mask(n: int) -> int:
    return (1 << (n // 2)) - 1


def contour_from_eam(eam: EntanglementAdjacency, mask: int) -> ContourVector:
    """``values[i] = sum_{j not in A} J[i, j]`` for each site ``i`` of the block."""
    n = eam.n_sites
    if not 0 < mask < (1 << n) - 1:
        raise ValueError(f"contour needs a nontrivial mask, got {mask}")
    inside = np.array([(mask >> k) & 1 for k in range(n)], dtype=bool)
    values = eam.j[np.ix_(inside, ~inside)].sum(axis=1)
    return ContourVector(mask, tuple(_sites(mask, n)), values, "eam")


def contour_freefermion(ffg: FreeFermionGround, mask: int) -> ContourVector:
    """``values[i] = sum_p |phi_p(i)|^2 H(nu_p)`` over eigenpairs of ``C_A``."""
    n = ffg.n_sites
    if not 0 <= mask < (1 << n):
        raise ValueError(f"mask {mask} invalid for {n} sites")
    sites = _sites(mask, n)
    if not sites:
        return ContourVector(mask, (), np.zeros(0), "freefermion")
    try:
        nu, phi = np.linalg.eigh(ffg.correlation[np.ix_(sites, sites)])
    except np.linalg.LinAlgError as exc:
        raise EamkitError(f"eigensolver failed for mask {mask}") from exc
    h = _binary_entropy_sum(nu[:, None])
    values = (phi * phi) @ h
    return ContourVector(mask, tuple(sites), values, "freefermion")


@dataclass
class ContourComparison:
    l1: float
    normalized_l1: float
    correlation: float
    sum_a: float
    sum_b: float


def compare_contours(a: ContourVector, b: ContourVector) -> ContourComparison:
    """L1 distance, normalized L1 and Pearson correlation across sites."""
    if a.mask != b.mask:
        raise ValueError(f"contours are on different blocks ({a.mask} vs {b.mask})")
    diff = float(np.abs(a.values - b.values).sum())
    norm = float(np.abs(a.values).sum())
    if len(a.values) > 1 and np.std(a.values) > 0 and np.std(b.values) > 0:
        corr = float(np.corrcoef(a.values, b.values)[0, 1])
    elif np.allclose(a.values - a.values.mean(), b.values - b.values.mean()):
        corr = 1.0
    else:
        corr = float("nan")
    return ContourComparison(
        l1=diff,
        normalized_l1=diff / norm if norm > 0 else float("nan"),
        correlation=corr,
        sum_a=a.total(),
        sum_b=b.total(),
    )


def decay_violations(contour: ContourVector, slack: float = 1e-9) -> list[int]:
    """Sites where a half-chain contour fails to grow toward the cut.

    For a block ``{0..k-1}`` the cut sits to the right of site ``k-1``; a
    violation is a site ``i`` with ``values[i] > values[i+1] + slack``.
    """
    v = contour.values
    return [contour.sites[i] for i in range(len(v) - 1) if v[i] > v[i + 1] + slack]


def contour_to_csv(contour: ContourVector, model: str = "") -> str:
    buf = io.StringIO()
    buf.write(f"# route={contour.route}\n# mask={contour.mask}\n# model={model}\n")
    buf.write("site,value_nats\n")
    for s, v in zip(contour.sites, contour.values):
        buf.write(f"{s},{_fmt(v)}\n")
    return buf.getvalue()


def comparison_to_json(cmp: ContourComparison) -> str:
    return json.dumps({k: float(_fmt(v)) for k, v in cmp.__dict__.items()}) + "\n"
