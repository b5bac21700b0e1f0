"""Nested composite Gauss-Legendre quadrature over polytopes.

Each variable is integrated over the interval left by the outer ones,
split at every known breakpoint (integrand kinks, ties between competing
bounds), and each segment is covered by ``nsub`` panels of a 5-point
Gauss rule.  ``nsub`` doubles until two successive totals agree to the
tolerance.  All contributions are summed with ``math.fsum`` so the result
does not depend on chunking or evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import BudgetExceededError, CapacityError
from .integrands import Integrand
from .region import LinearConstraint, Polytope

MAX_DIM = 6
DEFAULT_BUDGET = 10**7
CHUNK_POINTS = 400_000
GAUSS_ORDER = 5
MIN_SUBDIVISIONS = 4

_xi, _wi = np.polynomial.legendre.leggauss(GAUSS_ORDER)
GAUSS_NODES = 0.5 * (_xi + 1.0)
GAUSS_WEIGHTS = 0.5 * _wi


def default_tolerance(dim: int) -> float:
    return 1e-6 if dim <= 2 else 1e-4


@dataclass
class IntegralTask:
    dimension: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    integrand: Integrand
    ordered: bool = False
    constraints: tuple[LinearConstraint, ...] = ()
    tolerance: float | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if not 1 <= self.dimension <= MAX_DIM:
            raise CapacityError(f"dimension {self.dimension} outside 1..{MAX_DIM}")
        if len(self.lower) != self.dimension or len(self.upper) != self.dimension:
            raise ValueError("lower/upper must have one entry per variable")
        self.lower = tuple(float(x) for x in self.lower)
        self.upper = tuple(float(x) for x in self.upper)
        self.constraints = tuple(self.constraints)
        if self.tolerance is None:
            self.tolerance = default_tolerance(self.dimension)
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")

    def leq_rows(self) -> list[tuple[np.ndarray, float]]:
        d = self.dimension
        rows = []
        for k in range(d):
            e = np.zeros(d)
            e[k] = 1.0
            rows.append((e, self.upper[k]))
            rows.append((-e, -self.lower[k]))
        if self.ordered:
            for k in range(d - 1):
                a = np.zeros(d)
                a[k], a[k + 1] = 1.0, -1.0
                rows.append((a, 0.0))
        for c in self.constraints:
            if len(c.coef) != d:
                raise ValueError("constraint length does not match task dimension")
            rows.append(c.as_leq())
        return rows

    def contains(self, x: np.ndarray) -> np.ndarray:
        """Membership mask for points of shape (n, d) (strict ordering)."""
        ok = np.all((x >= np.array(self.lower)) & (x <= np.array(self.upper)), axis=1)
        if self.ordered and self.dimension > 1:
            ok &= np.all(np.diff(x, axis=1) > 0, axis=1)
        for c in self.constraints:
            a, b = c.as_leq()
            ok &= x @ a <= b
        return ok

    def describe(self) -> dict:
        return {
            "label": self.label,
            "dimension": self.dimension,
            "lower": list(self.lower),
            "upper": list(self.upper),
            "ordered": self.ordered,
            "constraints": [
                {"coef": list(c.coef), "bound": c.bound, "sense": c.sense} for c in self.constraints
            ],
            "integrand": self.integrand.describe(),
            "tolerance": self.tolerance,
        }


@dataclass
class IntegralResult:
    value: float
    error_estimate: float
    label: str = ""
    points: int = 0
    subdivisions: int = 0
    meta: dict = field(default_factory=dict)

    def __iter__(self):
        yield self.value
        yield self.error_estimate


class _Nested:
    def __init__(self, task: IntegralTask):
        self.task = task
        self.f = task.integrand
        self.d = task.dimension
        self.poly = Polytope(task.leq_rows(), self.d)
        if not self.poly.empty:
            self.breaks = self.poly.derived_kinks(self.f.kinks(self.d))
        self.points = 0

    def run(self, nsub: int) -> float:
        self.points = 0
        partials: list[float] = []
        self._level(np.zeros((1, 0)), np.ones(1), 0, nsub, partials)
        return math.fsum(partials)

    def _segments(self, X: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.poly.bounds(k, X)
        hi = np.maximum(hi, lo)
        br = self.breaks[k]
        if br is None:
            return lo[:, None], hi[:, None]
        coef, off = br
        bp = X @ coef.T + off if k else np.broadcast_to(off, (len(X), len(off)))
        bp = np.clip(bp, lo[:, None], hi[:, None])
        edges = np.sort(np.concatenate([lo[:, None], bp, hi[:, None]], axis=1), axis=1)
        return edges[:, :-1], edges[:, 1:]

    def _expand(self, X, W, k, nsub):
        a, b = self._segments(X, k)
        width = (b - a) / nsub  # (n, nseg)
        s = (np.arange(nsub)[:, None] + GAUSS_NODES[None, :]).ravel()  # (nsub*q,)
        w = np.tile(GAUSS_WEIGHTS, nsub)
        nodes = a[:, :, None] + width[:, :, None] * s[None, None, :]
        weights = W[:, None, None] * width[:, :, None] * w[None, None, :]
        keep = (width > 0)[:, :, None] & np.ones_like(s, dtype=bool)[None, None, :]
        rows = np.broadcast_to(np.arange(len(X))[:, None, None], nodes.shape)[keep]
        X2 = np.concatenate([X[rows], nodes[keep][:, None]], axis=1)
        return X2, weights[keep]

    def _level(self, X, W, k, nsub, partials):
        last = k == self.d - 1
        if last and self.f.exact_inner:
            lo, hi = self.poly.bounds(k, X)
            ok = hi > lo
            vals = np.zeros(len(X))
            if np.any(ok):
                vals[ok] = self.f.inner_integral(X[ok], lo[ok], hi[ok])
            self.points += len(X)
            partials.append(math.fsum((W * vals).tolist()))
            return
        nseg = 1 if self.breaks[k] is None else self.breaks[k][1].size + 1
        per_row = nseg * nsub * GAUSS_ORDER
        step = max(1, CHUNK_POINTS // per_row)
        for i in range(0, len(X), step):
            X2, W2 = self._expand(X[i : i + step], W[i : i + step], k, nsub)
            if not len(X2):
                continue
            if last:
                self.points += len(X2)
                partials.append(math.fsum((W2 * self.f(X2)).tolist()))
            else:
                self._level(X2, W2, k + 1, nsub, partials)


def integrate(task: IntegralTask, budget: int = DEFAULT_BUDGET, max_doublings: int = 9) -> IntegralResult:
    """Integrate ``task``; the error estimate is the last doubling difference."""
    nested = _Nested(task)
    if nested.poly.empty:
        return IntegralResult(0.0, 0.0, label=task.label, meta={"empty": True})
    numeric_levels = task.dimension - (1 if task.integrand.exact_inner else 0)
    if numeric_levels == 0:
        value = nested.run(1)
        return IntegralResult(value, 0.0, label=task.label, points=nested.points, subdivisions=1)
    nsub = 1
    prev = nested.run(nsub)
    total_points = nested.points
    delta = math.inf
    for _ in range(max_doublings):
        projected = nested.points * 2**numeric_levels
        if total_points + projected > budget:
            raise BudgetExceededError(
                f"{task.label or 'integral'}: cell budget {budget} exhausted "
                f"(last difference {delta:.3e})",
                partial_value=prev,
                error_estimate=delta,
            )
        nsub *= 2
        cur = nested.run(nsub)
        total_points += nested.points
        delta = abs(cur - prev)
        prev = cur
        # the first difference is often pre-asymptotic; insist on nsub >= 4
        if delta <= task.tolerance and nsub >= MIN_SUBDIVISIONS:
            return IntegralResult(cur, delta, label=task.label, points=total_points, subdivisions=nsub)
    raise BudgetExceededError(
        f"{task.label or 'integral'}: no convergence after {max_doublings} doublings "
        f"(last difference {delta:.3e})",
        partial_value=prev,
        error_estimate=delta,
    )
