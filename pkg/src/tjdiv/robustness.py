"""Influence of an outlier on the symmetric Jensen centroid.

For a scalar generator, planting mass eps at an outlier y next to an
inlier p moves the alpha=1/2 centroid to first order by eps * z(y) with

    z(y) = 2 (f'((p+y)/2) - f'(p)) / f''(p).

Bounded z means a robust centroid (burg: |z| -> 2p), unbounded z means
not robust (shannon: z grows like 2p log y). The empirical harness
recomputes the centroid with the outlier actually present and compares.
The total-variant chord factor rho_J(p, y) is swept alongside since it
is the quantity that tames the outlier's weight in the total loss.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .centroids import WeightedPointSet
from .divergences import conformal_factors
from .errors import CapabilityError, ValidationError
from .generators import Generator, as_point, ensure_domain


@dataclass(frozen=True)
class InfluenceResult:
    z_analytic: float
    z_empirical: float
    x_tilde: float       # perturbed centroid
    epsilon: float
    bounded_estimate: Optional[bool] = None


@dataclass(frozen=True)
class SweepReport:
    ys: np.ndarray
    z_values: np.ndarray
    rho_values: np.ndarray
    sup_abs_z: float
    classification: str  # "bounded-flat" or "unbounded-trending"
    tail_rho_log: float  # rho_J(p, y_last) * log(y_last)


def _scalar_gen(g: Generator):
    if g.dim != 1:
        raise CapabilityError("influence analysis is scalar-generator only")
    if not g.has_second_deriv:
        raise CapabilityError(f"{g.name} exposes no second derivative")


def influence_analytic(g: Generator, p, y) -> float:
    _scalar_gen(g)
    p = as_point(p, 1)
    y = as_point(y, 1)
    ensure_domain(g, p, interior=True)
    ensure_domain(g, y)
    mid = 0.5 * (p + y)
    ensure_domain(g, mid, interior=True)
    fpp = float(g.second_deriv(p)[0])
    num = float(g.grad(mid)[0] - g.grad(p)[0])
    return 2.0 * num / fpp


def influence_empirical(g: Generator, p, y, epsilon: float) -> InfluenceResult:
    """Centroid shift per unit outlier mass, measured by actually
    computing the alpha=1/2 centroid of {(p, 1/(1+eps)), (y, eps/(1+eps))}."""
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 0.5:
        raise ValidationError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    z_a = influence_analytic(g, p, y)
    data = WeightedPointSet.make(
        [[float(np.atleast_1d(p)[0])], [float(np.atleast_1d(y)[0])]],
        [1.0 / (1.0 + epsilon), epsilon / (1.0 + epsilon)])
    c = data.weights @ data.points
    # tight fixed-point run: the first-order comparison needs the exact
    # minimizer, not a budgeted approximation
    for _ in range(500):
        c_next = kernels.cccp_steps(g, 0.5, data.points, data.weights, c, 1)
        if abs(float(c_next[0]) - float(c[0])) < 1e-14:
            c = c_next
            break
        c = c_next
    x_tilde = float(c[0])
    p0 = float(data.points[0, 0])
    return InfluenceResult(
        z_analytic=z_a, z_empirical=(x_tilde - p0) / epsilon,
        x_tilde=x_tilde, epsilon=epsilon)


def boundedness_sweep(g: Generator, p, y_max: float,
                      per_decade: int = 40) -> SweepReport:
    """|z(y)| over a geometric grid up to y_max, plus the chord factor
    decay rho_J(p, y). Classification compares the first and last decade
    of |z|: a bounded influence flattens, an unbounded one keeps growing."""
    _scalar_gen(g)
    p = as_point(p, 1)
    p0 = float(p[0])
    y0 = 2.0 * abs(p0) if p0 != 0.0 else 1.0
    y_max = float(y_max)
    if y_max <= y0:
        raise ValidationError(f"y_max must exceed {y0}")
    if not g.domain.contains(np.array([y_max])):
        raise ValidationError(
            f"y_max {y_max} is outside {g.name}'s domain "
            f"{g.domain.describe()}")
    decades = math.log10(y_max / y0)
    n = max(2, int(math.ceil(per_decade * decades)) + 1)
    ys = np.geomspace(y0, y_max, n)
    zs = np.array([influence_analytic(g, p, np.array([y])) for y in ys])
    rhos = np.array(
        [conformal_factors(g, p, np.array([y])).rho_j for y in ys])

    azs = np.abs(zs)
    first = azs[ys <= y0 * 10.0]
    last = azs[ys >= y_max / 10.0]
    growth = float(last.max() / max(first.max(), 1e-300))
    classification = "unbounded-trending" if growth > 2.0 else "bounded-flat"
    return SweepReport(
        ys=ys, z_values=zs, rho_values=rhos,
        sup_abs_z=float(azs.max()),
        classification=classification,
        tail_rho_log=float(rhos[-1] * math.log(ys[-1])))
