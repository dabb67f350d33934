"""Continuum checks: interval entropy from the inverse-square link density."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .eamfit import EntanglementAdjacency
from .errors import ConvergenceError, EamkitError


@dataclass(frozen=True)
class IntervalSpec:
    """Interval ``(u, v)`` with UV cutoff ``epsilon`` and central charge ``c``."""

    u: float
    v: float
    epsilon: float
    c: float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.v - self.u <= 2 * self.epsilon:
            raise ValueError("interval must be longer than 2 * epsilon")


def current_correlator(x: float, y: float) -> float:
    if x == y:
        raise ValueError("correlator is singular at x == y")
    return 1.0 / (x - y) ** 2


def interval_entropy_cft(spec: IntervalSpec) -> float:
    return spec.c / 3.0 * math.log((spec.v - spec.u) / spec.epsilon)


def interval_entropy_analytic(spec: IntervalSpec) -> float:
    """Closed form of :func:`interval_entropy_integral`."""
    return spec.c / 3.0 * math.log((spec.v - spec.u - spec.epsilon) / spec.epsilon)


def interval_entropy_integral(spec: IntervalSpec, tol: float = 1e-10) -> float:
    """``(c/6) * int_{u+eps}^{v-eps} dx int_{outside} dy (x-y)^-2`` by quadrature.

    The inner integral over the complement is ``1/(x-u) + 1/(v-x)``.
    """
    u, v = spec.u, spec.v
    inner = lambda x: 1.0 / (x - u) + 1.0 / (v - x)
    val, err = integrate.quad(inner, u + spec.epsilon, v - spec.epsilon, epsabs=tol, epsrel=0.0, limit=500)
    if err > tol:
        raise ConvergenceError(f"quadrature error estimate {err:.3e} > {tol:g}")
    return spec.c / 6.0 * val


@dataclass
class PowerLawFit:
    exponent: float
    amplitude: float
    r2: float
    separations: list[int]
    mean_weights: list[float]


def separation_profile(eam: EntanglementAdjacency) -> dict[int, float]:
    """Mean link weight at each open-chain separation ``|i - j|``."""
    n = eam.n_sites
    return {d: float(np.mean(np.diagonal(eam.j, offset=d))) for d in range(1, n)}


def power_law_exponent(eam: EntanglementAdjacency, min_sep: int = 2, max_sep: int = 6) -> PowerLawFit:
    """Log-log OLS fit of the mean link weight against separation."""
    if not 1 <= min_sep < max_sep:
        raise ValueError("need 1 <= min_sep < max_sep")
    if max_sep > eam.n_sites - 1:
        raise ValueError(f"max_sep {max_sep} has no pairs on {eam.n_sites} sites")
    profile = separation_profile(eam)
    seps = list(range(min_sep, max_sep + 1))
    means = [profile[d] for d in seps]
    bad = [d for d, w in zip(seps, means) if w <= 0]
    if bad:
        raise EamkitError(f"nonpositive mean weight at separations {bad}")
    fit = stats.linregress(np.log(seps), np.log(means))
    return PowerLawFit(
        exponent=float(fit.slope),
        amplitude=float(math.exp(fit.intercept)),
        r2=float(fit.rvalue ** 2),
        separations=seps,
        mean_weights=means,
    )
