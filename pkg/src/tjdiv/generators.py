"""Strictly convex generators and the builtin family.

A Generator bundles F, its gradient, the inverse gradient, and (for
separable generators) the coordinatewise second derivative. Callables
are batched: `f` maps (..., d) arrays to (...) values, `grad`,
`grad_inverse` and `second_deriv` map (..., d) to (..., d).

Boundary conventions: evaluation at a closed boundary returns the limit
value (0*log 0 = 0 for shannon and bit), but gradients are only defined
on the open interior and requesting one at a boundary raises.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import DomainError, ValidationError

BUILTIN_NAMES = (
    "shannon", "burg", "bit", "squared-mahalanobis", "squared-euclidean")


@dataclass(frozen=True)
class Domain:
    """Per-coordinate box with optional closed endpoints for evaluation."""

    lo: float
    hi: float
    eval_closed_lo: bool = False
    eval_closed_hi: bool = False

    def contains(self, x: np.ndarray, interior: bool = False) -> bool:
        lo_ok = x > self.lo
        hi_ok = x < self.hi
        if not interior:
            if self.eval_closed_lo:
                lo_ok = x >= self.lo
            if self.eval_closed_hi:
                hi_ok = x <= self.hi
        return bool(np.all(lo_ok & hi_ok))

    def describe(self) -> str:
        lb = "[" if self.eval_closed_lo else "("
        rb = "]" if self.eval_closed_hi else ")"
        return f"{lb}{self.lo}, {self.hi}{rb}"


@dataclass(frozen=True)
class Generator:
    name: str
    dim: int
    domain: Domain
    f: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    grad_inverse: Optional[Callable[[np.ndarray], np.ndarray]] = None
    second_deriv: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    separable: bool = True
    kernel_code: Optional[int] = field(default=None, repr=False)

    @property
    def has_grad_inverse(self) -> bool:
        return self.grad_inverse is not None

    @property
    def has_second_deriv(self) -> bool:
        return self.second_deriv is not None


def as_point(x, dim: Optional[int] = None) -> np.ndarray:
    p = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if p.ndim != 1:
        raise ValidationError(f"expected a point vector, got shape {p.shape}")
    if dim is not None and p.shape[0] != dim:
        raise ValidationError(
            f"point has dimension {p.shape[0]}, generator expects {dim}")
    if not np.all(np.isfinite(p)):
        raise ValidationError("point contains NaN or Inf")
    return p


def ensure_domain(g: Generator, x: np.ndarray, interior: bool = False) -> None:
    if not g.domain.contains(x, interior=interior):
        where = "the interior of " if interior else ""
        raise DomainError(
            f"point {np.asarray(x).tolist()} is outside {where}"
            f"{g.name}'s domain {g.domain.describe()}")


def _xlogx(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    m = x > 0.0
    out[m] = x[m] * np.log(x[m])
    return out


def _shannon(dim):
    def f(x):
        x = np.asarray(x, dtype=np.float64)
        return (_xlogx(x) - x).sum(axis=-1)

    return Generator(
        name="shannon", dim=dim,
        domain=Domain(0.0, math.inf, eval_closed_lo=True),
        f=f,
        grad=lambda x: np.log(np.asarray(x, dtype=np.float64)),
        grad_inverse=lambda y: np.exp(np.asarray(y, dtype=np.float64)),
        second_deriv=lambda x: 1.0 / np.asarray(x, dtype=np.float64),
        kernel_code=kernels.SHANNON)


def _burg(dim):
    return Generator(
        name="burg", dim=dim,
        domain=Domain(0.0, math.inf),
        f=lambda x: (-np.log(np.asarray(x, dtype=np.float64))).sum(axis=-1),
        grad=lambda x: -1.0 / np.asarray(x, dtype=np.float64),
        grad_inverse=lambda y: -1.0 / np.asarray(y, dtype=np.float64),
        second_deriv=lambda x: np.asarray(x, dtype=np.float64) ** -2.0,
        kernel_code=kernels.BURG)


def _logistic(y):
    y = np.asarray(y, dtype=np.float64)
    out = np.empty_like(y)
    pos = y >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-y[pos]))
    ey = np.exp(y[~pos])
    out[~pos] = ey / (1.0 + ey)
    return out


def _bit(dim):
    def f(x):
        x = np.asarray(x, dtype=np.float64)
        return (_xlogx(x) + _xlogx(1.0 - x)).sum(axis=-1)

    def grad(x):
        x = np.asarray(x, dtype=np.float64)
        return np.log(x / (1.0 - x))

    def second(x):
        x = np.asarray(x, dtype=np.float64)
        return 1.0 / (x * (1.0 - x))

    return Generator(
        name="bit", dim=dim,
        domain=Domain(0.0, 1.0, eval_closed_lo=True, eval_closed_hi=True),
        f=f, grad=grad, grad_inverse=_logistic, second_deriv=second,
        kernel_code=kernels.BIT)


def _quadratic(name, dim, q):
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (dim, dim):
        raise ValidationError(
            f"matrix shape {q.shape} does not match dimension {dim}")
    if not np.allclose(q, q.T, atol=1e-12):
        raise ValidationError("matrix must be symmetric")
    try:
        np.linalg.cholesky(q)
    except np.linalg.LinAlgError:
        raise ValidationError("matrix must be positive-definite")
    q_inv = np.linalg.inv(q)
    is_identity = bool(np.array_equal(q, np.eye(dim)))

    def f(x):
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * ((x @ q) * x).sum(axis=-1)

    second = None
    if is_identity:
        second = lambda x: np.ones_like(np.asarray(x, dtype=np.float64))
    elif dim == 1:
        qq = float(q[0, 0])
        second = lambda x: np.full_like(np.asarray(x, dtype=np.float64), qq)

    return Generator(
        name=name, dim=dim,
        domain=Domain(-math.inf, math.inf),
        f=f,
        grad=lambda x: np.asarray(x, dtype=np.float64) @ q,
        grad_inverse=lambda y: np.asarray(y, dtype=np.float64) @ q_inv,
        second_deriv=second,
        hessian=lambda x: q,
        separable=is_identity,
        kernel_code=kernels.HALF_SQUARE if is_identity else None)


def make_builtin(name: str, dimension: int = 1, matrix=None) -> Generator:
    """Construct a builtin generator by name.

    `matrix` is required (and must be symmetric positive-definite) for
    squared-mahalanobis and rejected for every other name.
    """
    if dimension < 1:
        raise ValidationError(f"dimension must be >= 1, got {dimension}")
    if name not in BUILTIN_NAMES:
        raise ValidationError(
            f"unknown generator {name!r}; choose from {BUILTIN_NAMES}")
    if name == "squared-mahalanobis":
        if matrix is None:
            raise ValidationError("squared-mahalanobis needs a matrix")
        return _quadratic(name, dimension, matrix)
    if matrix is not None:
        raise ValidationError(f"{name} does not take a matrix")
    if name == "shannon":
        g = _shannon(dimension)
    elif name == "burg":
        g = _burg(dimension)
    elif name == "bit":
        g = _bit(dimension)
    else:
        g = _quadratic("squared-euclidean", dimension, np.eye(dimension))
    return g


def _separable_hessian(g):
    def hess(x):
        x = np.asarray(x, dtype=np.float64)
        return np.diag(g.second_deriv(x))

    return hess


def hessian_at(g: Generator, x: np.ndarray) -> np.ndarray:
    """Hessian matrix of F at a point (diagonal for separable generators)."""
    if g.hessian is not None:
        return np.asarray(g.hessian(x), dtype=np.float64)
    if g.separable and g.second_deriv is not None:
        return _separable_hessian(g)(x)
    raise DomainError(f"{g.name} exposes no Hessian information")


def affine_precompose(g: Generator, a: float, b: float = 0.0) -> Generator:
    """G(x) = F(a*x) + b. Strict convexity survives any nonzero a."""
    if a == 0:
        raise ValidationError("scale a must be nonzero")
    a = float(a)
    b = float(b)
    if a > 0:
        dom = Domain(g.domain.lo / a, g.domain.hi / a,
                     g.domain.eval_closed_lo, g.domain.eval_closed_hi)
    else:
        dom = Domain(g.domain.hi / a, g.domain.lo / a,
                     g.domain.eval_closed_hi, g.domain.eval_closed_lo)

    ginv = None
    if g.grad_inverse is not None:
        ginv = lambda y: g.grad_inverse(np.asarray(y) / a) / a
    second = None
    if g.second_deriv is not None:
        second = lambda x: (a * a) * g.second_deriv(a * np.asarray(x))
    hess = None
    if g.hessian is not None:
        hess = lambda x: (a * a) * np.asarray(g.hessian(a * np.asarray(x)))

    return Generator(
        name=f"{g.name}(pre a={a:g}, b={b:g})", dim=g.dim, domain=dom,
        f=lambda x: g.f(a * np.asarray(x)) + b,
        grad=lambda x: a * g.grad(a * np.asarray(x)),
        grad_inverse=ginv, second_deriv=second, hessian=hess,
        separable=g.separable, kernel_code=None)


def affine_postcompose(g: Generator, lam: float, c: float = 0.0) -> Generator:
    """G(x) = lam*F(x) + c for lam > 0; same domain, scaled geometry."""
    if lam <= 0:
        raise ValidationError("lam must be positive to preserve convexity")
    lam = float(lam)
    c = float(c)
    ginv = None
    if g.grad_inverse is not None:
        ginv = lambda y: g.grad_inverse(np.asarray(y) / lam)
    second = None
    if g.second_deriv is not None:
        second = lambda x: lam * g.second_deriv(x)
    hess = None
    if g.hessian is not None:
        hess = lambda x: lam * np.asarray(g.hessian(x))

    return Generator(
        name=f"{g.name}(post lam={lam:g}, c={c:g})", dim=g.dim,
        domain=g.domain,
        f=lambda x: lam * g.f(x) + c,
        grad=lambda x: lam * g.grad(x),
        grad_inverse=ginv, second_deriv=second, hessian=hess,
        separable=g.separable, kernel_code=None)
