"""Polytope description of integration regions and its iterated projections.

A region is {x : A x <= b}.  Fourier-Motzkin elimination of the innermost
variables yields, for each level k, the interval of x_k as a max/min of
affine functions of x_0..x_{k-1}; this is what nested quadrature needs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

_EPS = 1e-12


@dataclass(frozen=True)
class LinearConstraint:
    """coef . x  (<= or >=)  bound."""

    coef: tuple[float, ...]
    bound: float
    sense: str = "<="

    def __post_init__(self) -> None:
        if self.sense not in ("<=", ">="):
            raise ValueError(f"constraint sense must be '<=' or '>=', got {self.sense!r}")
        object.__setattr__(self, "coef", tuple(float(c) for c in self.coef))

    def as_leq(self) -> tuple[np.ndarray, float]:
        a = np.asarray(self.coef, dtype=float)
        if self.sense == ">=":
            return -a, -float(self.bound)
        return a, float(self.bound)


def _normalize(a: np.ndarray, b: float) -> tuple[np.ndarray, float]:
    scale = np.max(np.abs(a))
    if scale == 0:
        return a, b
    return a / scale, b / scale


def _dedupe(rows: list[tuple[np.ndarray, float]]) -> list[tuple[np.ndarray, float]]:
    seen = {}
    for a, b in rows:
        a, b = _normalize(a, b)
        key = tuple(np.round(a, 12)) + (round(b, 12),)
        seen.setdefault(key, (a, b))
    return list(seen.values())


def _prune(rows: list[tuple[np.ndarray, float]], dim: int) -> list[tuple[np.ndarray, float]]:
    """Drop rows implied by the others (one small LP per row)."""
    if len(rows) <= dim + 1:
        return rows
    keep = list(rows)
    i = 0
    while i < len(keep):
        a_i, b_i = keep[i]
        others = keep[:i] + keep[i + 1 :]
        A = np.array([a for a, _ in others])
        b = np.array([bb for _, bb in others])
        res = linprog(-a_i, A_ub=A, b_ub=b, bounds=[(None, None)] * dim, method="highs")
        if res.status == 0 and -res.fun <= b_i + 1e-10:
            keep.pop(i)
        else:
            i += 1
    return keep


class Polytope:
    """Projected bound structure of {A x <= b} for nested integration."""

    def __init__(self, rows: list[tuple[np.ndarray, float]], dim: int):
        self.dim = dim
        self.empty = False
        full = _dedupe([(np.asarray(a, float), float(b)) for a, b in rows])
        if not self._feasible(full):
            self.empty = True
            return
        full = _prune(full, dim)
        systems: list[list[tuple[np.ndarray, float]]] = [None] * dim  # type: ignore[list-item]
        systems[dim - 1] = full
        for k in range(dim - 1, 0, -1):
            systems[k - 1] = self._eliminate(systems[k], k)
        # lower/upper bound rows per level, restricted to the first k+1 coords
        self.lower: list[tuple[np.ndarray, np.ndarray]] = []
        self.upper: list[tuple[np.ndarray, np.ndarray]] = []
        for k in range(dim):
            lo_rows, up_rows = [], []
            for a, b in systems[k]:
                ak = a[k]
                if ak > _EPS:
                    up_rows.append((-a[:k] / ak, b / ak))
                elif ak < -_EPS:
                    lo_rows.append((-a[:k] / ak, b / ak))
            if not lo_rows or not up_rows:
                raise ValueError(f"variable {k} is unbounded in the integration region")
            self.lower.append(_stack(lo_rows, k))
            self.upper.append(_stack(up_rows, k))

    @staticmethod
    def _feasible(rows) -> bool:
        dim = len(rows[0][0])
        A = np.array([a for a, _ in rows])
        b = np.array([bb for _, bb in rows])
        res = linprog(np.zeros(dim), A_ub=A, b_ub=b, bounds=[(None, None)] * dim, method="highs")
        return res.status == 0

    def _eliminate(self, rows, k: int):
        keep, pos, neg = [], [], []
        for a, b in rows:
            if a[k] > _EPS:
                pos.append((a, b))
            elif a[k] < -_EPS:
                neg.append((a, b))
            else:
                keep.append((a, b))
        for (ap, bp), (an, bn) in itertools.product(pos, neg):
            a = ap / ap[k] - an / an[k]
            b = bp / ap[k] - bn / an[k]
            a[k] = 0.0
            keep.append((a, b))
        out = []
        for a, b in _dedupe(keep):
            if np.all(np.abs(a[:k]) <= _EPS):
                if b < -1e-12:
                    self.empty = True
                continue
            out.append((a, b))
        return _prune(out, self.dim) if out else out

    def bounds(self, k: int, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Interval of x_k given the first k coordinates (rows of X)."""
        ca, cb = self.lower[k]
        lo = np.max(X @ ca.T + cb, axis=1) if k else np.full(len(X), np.max(cb))
        ca, cb = self.upper[k]
        hi = np.min(X @ ca.T + cb, axis=1) if k else np.full(len(X), np.min(cb))
        return lo, hi

    def derived_kinks(self, integrand_kinks):
        """Hyperplanes where the nested bound structure is non-smooth.

        Includes the integrand's own kinks, the loci where two candidate
        bounds of a level tie, and where an integrand kink meets a bound.
        Returned per level as (coef matrix over x_<k, offset) with the
        breakpoint x_k = coef . x_<k + offset.
        """
        planes = [(np.asarray(c, float), float(beta)) for c, beta in integrand_kinks]
        for k in range(self.dim):
            for ca, cb in (self.lower[k], self.upper[k]):
                for i, j in itertools.combinations(range(len(cb)), 2):
                    # x_k-bound_i - bound_j = 0 as a plane in full coordinates
                    c = np.zeros(self.dim)
                    c[:k] = ca[i] - ca[j]
                    planes.append((c, cb[j] - cb[i]))
        for c, beta in list(planes):
            k = _last_nonzero(c)
            if k is None:
                continue
            # kink:  x_k = (beta - c_<k . x)/c_k ; bound: x_k = ca . x + cb
            for ca, cb in (self.lower[k], self.upper[k]):
                for i in range(len(cb)):
                    cc = np.zeros(self.dim)
                    cc[:k] = -c[:k] / c[k] - ca[i]
                    planes.append((cc, cb[i] - beta / c[k]))
        per_level: list[list[tuple[np.ndarray, float]]] = [[] for _ in range(self.dim)]
        for c, beta in _dedupe(planes):
            k = _last_nonzero(c)
            if k is None:
                continue
            per_level[k].append((-c[:k] / c[k], beta / c[k]))
        return [_stack(rows, k) if rows else None for k, rows in enumerate(per_level)]


def _last_nonzero(c: np.ndarray) -> int | None:
    nz = np.nonzero(np.abs(c) > _EPS)[0]
    return int(nz[-1]) if len(nz) else None


def _stack(rows, k: int) -> tuple[np.ndarray, np.ndarray]:
    coef = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), k)
    off = np.array([r[1] for r in rows], dtype=float)
    return coef, off
