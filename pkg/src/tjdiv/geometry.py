"""Epigraph cross-section geometry.

Everything here lives in the 2D vertical plane through (p, F(p)) and
(q, F(q)): abscissa along the chord ground direction (arc length |Delta|
for multivariate inputs), ordinate the generator value. The orthogonal
projection of the graph point ((pq)_a, F((pq)_a)) onto the chord yields
the unscaled total Jensen value as a plain Euclidean distance, which
makes this module an independent oracle for the conformal-factor
formula: no rho_J expression appears anywhere below.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .divergences import jensen_raw
from .errors import DomainError, SearchError, ValidationError
from .generators import Generator, as_point, ensure_domain


@dataclass(frozen=True)
class ProjectionResult:
    """Foot of the orthogonal projection onto the chord.

    beta is the chord parameter of the foot (beta=0 at q, beta=1 at p);
    it may fall outside [0, 1] for strongly curved generators. foot is
    the pair (beta*p + (1-beta)*q, beta*F(p) + (1-beta)*F(q)); distance
    is the unscaled total Jensen value.
    """

    beta: float
    foot: Tuple[np.ndarray, float]
    distance: float


def _chord_data(g, alpha, p, q):
    p = as_point(p, g.dim)
    q = as_point(q, g.dim)
    ensure_domain(g, p)
    ensure_domain(g, q)
    if np.array_equal(p, q):
        raise DomainError("the chord degenerates at p = q")
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0,1), got {alpha}")
    delta = p - q
    dd = float(delta @ delta)
    fp = float(g.f(p))
    fq = float(g.f(q))
    mix = alpha * p + (1.0 - alpha) * q
    fmix = float(g.f(mix))
    return p, q, alpha, delta, dd, fp, fq, mix, fmix


def project_beta(g: Generator, alpha, p, q) -> ProjectionResult:
    p, q, alpha, delta, dd, fp, fq, mix, fmix = _chord_data(g, alpha, p, q)
    df = fp - fq
    beta = (df * (fmix - fq) + alpha * dd) / (dd + df * df)
    foot_pt = beta * p + (1.0 - beta) * q
    foot_val = beta * fp + (1.0 - beta) * fq
    ground = (alpha - beta) * delta
    distance = math.hypot(math.sqrt(float(ground @ ground)), fmix - foot_val)
    return ProjectionResult(beta=float(beta), foot=(foot_pt, float(foot_val)),
                            distance=float(distance))


def geometric_oracle_tj(g: Generator, alpha, p, q, rotation: float = 0.0) -> float:
    """Unscaled total Jensen value as a raw 2D point-to-line distance.

    Computed with nothing but Euclidean geometry in the cross-section;
    `rotation` spins the three section points by an angle first, which
    cannot change the answer (the testable form of rotation invariance).
    """
    _, _, alpha, _, dd, fp, fq, _, fmix = _chord_data(g, alpha, p, q)
    width = math.sqrt(dd)
    pts = np.array([
        [0.0, fq],            # chord end at q
        [width, fp],          # chord end at p
        [alpha * width, fmix],  # graph point
    ])
    if rotation != 0.0:
        ca, sa = math.cos(rotation), math.sin(rotation)
        pts = pts @ np.array([[ca, sa], [-sa, ca]])
    chord = pts[1] - pts[0]
    rel = pts[2] - pts[0]
    cross = chord[0] * rel[1] - chord[1] * rel[0]
    return abs(float(cross)) / math.sqrt(float(chord @ chord))


def pythagoras_residual(g: Generator, alpha, p, q) -> float:
    """Relative residual of l^2 + tJ'^2 = J'^2 at the projection foot."""
    res = project_beta(g, alpha, p, q)
    p = as_point(p, g.dim)
    q = as_point(q, g.dim)
    delta = p - q
    dd = float(delta @ delta)
    df = float(g.f(p) - g.f(q))
    jr = jensen_raw(g, alpha, p, q).value
    leg = abs(alpha - res.beta) * math.sqrt(dd + df * df)
    lhs = leg * leg + res.distance * res.distance
    rhs = jr * jr
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


def _feasible_alpha_interval(g, p, q):
    # alphas for which q + alpha*(p - q) stays evaluable, shrunk a hair
    # inside any open boundary
    lo, hi = -math.inf, math.inf
    dom = g.domain
    for j in range(p.shape[0]):
        dj = p[j] - q[j]
        if dj == 0.0:
            if not dom.contains(np.array([q[j]])):
                raise DomainError("stationary coordinate outside the domain")
            continue
        if math.isfinite(dom.lo):
            b = (dom.lo - q[j]) / dj
            if dj > 0:
                lo = max(lo, b)
            else:
                hi = min(hi, b)
        if math.isfinite(dom.hi):
            b = (dom.hi - q[j]) / dj
            if dj > 0:
                hi = min(hi, b)
            else:
                lo = max(lo, b)
    margin = 1e-12 * max(1.0, abs(lo) if math.isfinite(lo) else 0.0,
                         abs(hi) if math.isfinite(hi) else 0.0)
    if math.isfinite(lo) and not dom.eval_closed_lo:
        lo += margin
    if math.isfinite(hi) and not dom.eval_closed_hi:
        hi -= margin
    return lo, hi


def second_kind_tj(g: Generator, beta: float, p, q, tol: float = 1e-12) -> float:
    """Distance-to-graph variant: drop a perpendicular from the chord
    point at parameter beta onto the generator's graph.

    The foot parameter alpha solves Delta_F*F(q + alpha*Delta) +
    alpha*<Delta,Delta> = a, found by bracketed bisection (no closed
    form in general). The returned value is scaled by 1/(beta(1-beta)).
    """
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise ValidationError(f"beta must lie in (0,1), got {beta}")
    p = as_point(p, g.dim)
    q = as_point(q, g.dim)
    ensure_domain(g, p)
    ensure_domain(g, q)
    if np.array_equal(p, q):
        raise DomainError("the chord degenerates at p = q")
    delta = p - q
    dd = float(delta @ delta)
    fp = float(g.f(p))
    fq = float(g.f(q))
    df = fp - fq
    a = beta * (dd + df * df) + df * fq

    def resid(al):
        return df * float(g.f(q + al * delta)) + al * dd - a

    flo, fhi = _feasible_alpha_interval(g, p, q)
    lo = max(-2.0, flo)
    hi = min(3.0, fhi)
    if not lo < hi:
        raise SearchError("empty search interval for the foot parameter")

    found = None
    for _ in range(60):
        grid = np.linspace(lo, hi, 129)
        vals = np.array([resid(x) for x in grid])
        sign = np.sign(vals)
        flips = np.nonzero(np.diff(sign) != 0)[0]
        if len(flips):
            i = flips[0]
            found = (grid[i], grid[i + 1])
            break
        # widen geometrically, clipped to the feasible interval
        span = hi - lo
        nlo = max(flo, lo - span)
        nhi = min(fhi, hi + span)
        if nlo == lo and nhi == hi:
            break
        lo, hi = nlo, nhi
    if found is None:
        raise SearchError("no sign change found for the foot parameter")

    lo, hi = found
    rlo = resid(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        rm = resid(mid)
        if abs(rm) <= tol or (hi - lo) < 1e-15 * max(1.0, abs(mid)):
            lo = hi = mid
            break
        if (rm < 0.0) == (rlo < 0.0):
            lo, rlo = mid, rm
        else:
            hi = mid
    alpha = 0.5 * (lo + hi)

    fmix = float(g.f(q + alpha * delta))
    chord_val = beta * fp + (1.0 - beta) * fq
    dist = math.hypot((alpha - beta) * math.sqrt(dd), fmix - chord_val)
    return dist / (beta * (1.0 - beta))
