"""Integrands of the normalized lower and upper bound coefficients.

Coordinates are the log-scaled prime sizes alpha_i = log p_i / log x.
"""

from __future__ import annotations

import math

import numpy as np

from ..quad.integrands import Integrand
from ..sievefn import SieveFunctions
from ..weights import WeightSpec
from .theta import ThetaSpec


def _integer_knots(lo: float, hi: float) -> range:
    return range(max(int(math.floor(lo)), 0), int(math.ceil(hi)) + 1)


class Sigma1Window(Integrand):
    """w(alpha)/alpha * F(v (theta1 - alpha))."""

    tag = "sigma1_window"

    def __init__(self, w: WeightSpec, theta: ThetaSpec, sf: SieveFunctions):
        self.w, self.theta, self.sf = w, theta, sf

    def __call__(self, x):
        a = x[:, 0]
        return self.w(a) / a * self.sf.F(self.w.v * (self.theta.theta1 - a))

    def kinks(self, dim):
        out = [(np.ones(1), b) for b in self.w.kinks()]
        v, t1 = self.w.v, self.theta.theta1
        for n in _integer_knots(0, v * t1):
            out.append((np.ones(1), t1 - n / v))
        return out

    def params(self):
        return {"weight": self.w.to_dict(), "theta": self.theta.to_dict()}


class U2WindowK1(Integrand):
    """(1 - w(alpha)) C_S(u (1 - alpha)) / (theta2(alpha) alpha (1 - alpha))."""

    tag = "u2_k1_window"

    def __init__(self, w: WeightSpec, theta: ThetaSpec, S: int, sf: SieveFunctions):
        self.w, self.theta, self.S, self.sf = w, theta, S, sf

    def __call__(self, x):
        a = x[:, 0]
        c = self.sf.big_C_ext(self.S, self.w.u * (1.0 - a))
        return (1.0 - self.w(a)) * c / (self.theta.theta2(a) * a * (1.0 - a))

    def kinks(self, dim):
        u = self.w.u
        out = [(np.ones(1), b) for b in self.w.kinks()]
        out += [(np.ones(1), 1.0 - n / u) for n in _integer_knots(0, u)]
        return out

    def params(self):
        return {"weight": self.w.to_dict(), "theta": self.theta.to_dict(), "S": self.S}


class U2Tail(Integrand):
    """C_S((1 - alpha)/alpha) / (theta2(alpha) alpha (1 - alpha)), for alpha >= 1/u."""

    tag = "u2_tail"

    def __init__(self, theta: ThetaSpec, S: int, sf: SieveFunctions, v: float):
        self.theta, self.S, self.sf, self.v = theta, S, sf, v

    def __call__(self, x):
        a = x[:, 0]
        c = self.sf.big_C_ext(self.S, (1.0 - a) / a)
        return c / (self.theta.theta2(a) * a * (1.0 - a))

    def kinks(self, dim):
        return [(np.ones(1), 1.0 / (n + 1)) for n in range(1, int(math.ceil(self.v)) + 1)]

    def params(self):
        return {"theta": self.theta.to_dict(), "S": self.S}


class WeightedSimplex(Integrand):
    """N / (theta2(a_1) a_1 ... a_m (1 - sum a)) over ordered primes.

    N is (1 - sum_i w(a_i) - w(1 - sum a))^+ in weighted mode, or the
    constant ``lam`` in pointwise mode.  Both are piecewise linear in the
    innermost variable, so the innermost integral is done in closed form
    via  (A + B t)/(t (c - t)) = (A/c)/t + (B + A/c)/(c - t).
    """

    tag = "weighted_simplex"

    def __init__(self, w: WeightSpec, theta: ThetaSpec, dim: int, lam: float | None = None):
        self.w, self.theta, self.dim, self.lam = w, theta, dim, lam
        self.exact_inner = dim >= 2

    def _numerator(self, x: np.ndarray) -> np.ndarray:
        if self.lam is not None:
            return np.full(len(x), self.lam)
        rest = 1.0 - x.sum(axis=1)
        return np.maximum(1.0 - self.w(x).sum(axis=1) - self.w(rest), 0.0)

    def __call__(self, x):
        rest = 1.0 - x.sum(axis=1)
        denom = self.theta.theta2(x[:, 0]) * np.prod(x, axis=1) * rest
        return self._numerator(x) / denom

    def kinks(self, dim):
        if self.lam is not None:
            return []
        out = []
        for b in self.w.kinks():
            for i in range(dim):
                e = np.zeros(dim)
                e[i] = 1.0
                out.append((e, b))
            out.append((np.ones(dim), 1.0 - b))
        return out

    def inner_integral(self, outer, lo, hi):
        c = 1.0 - outer.sum(axis=1)
        pref = 1.0 / (self.theta.theta2(outer[:, 0]) * np.prod(outer, axis=1))
        if self.lam is not None:
            return pref * self.lam / c * (np.log(hi / lo) + np.log((c - lo) / (c - hi)))
        base = 1.0 - self.w(outer).sum(axis=1)
        kinks = np.array(self.w.kinks())
        if kinks.size:
            pts = np.concatenate([np.broadcast_to(kinks, (len(c), kinks.size)), c[:, None] - kinks], axis=1)
            pts = np.clip(pts, lo[:, None], hi[:, None])
            edges = np.sort(np.concatenate([lo[:, None], pts, hi[:, None]], axis=1), axis=1)
        else:
            edges = np.stack([lo, hi], axis=1)
        t0, t1 = edges[:, :-1], edges[:, 1:]
        cc = c[:, None]
        bb = base[:, None]
        ta = t0 + (t1 - t0) / 3.0
        tb = t0 + 2.0 * (t1 - t0) / 3.0
        na = bb - self.w(ta) - self.w(cc - ta)
        nb = bb - self.w(tb) - self.w(cc - tb)
        width = tb - ta
        slope = np.divide(nb - na, width, out=np.zeros_like(width), where=width > 0)
        icpt = na - slope * ta
        n0 = icpt + slope * t0
        n1 = icpt + slope * t1
        with np.errstate(divide="ignore", invalid="ignore"):
            root = np.where(slope != 0, -icpt / slope, 0.0)
        p0 = np.where((n0 < 0) & (n1 > 0), root, t0)
        p1 = np.where((n0 > 0) & (n1 < 0), root, t1)
        dead = (n0 <= 0) & (n1 <= 0)
        p0 = np.where(dead, t0, p0)
        p1 = np.where(dead, t0, p1)
        A = icpt / cc
        B = slope + A
        with np.errstate(divide="ignore", invalid="ignore"):
            seg = A * np.log(p1 / p0) + B * np.log((cc - p0) / (cc - p1))
        seg = np.where(p1 > p0, seg, 0.0)
        return pref * seg.sum(axis=1)

    def params(self):
        d = {"weight": self.w.to_dict(), "theta": self.theta.to_dict(), "dim": self.dim}
        if self.lam is not None:
            d["pointwise_lambda"] = self.lam
        return d


class WindowRoughTail(Integrand):
    """(1 - sum w(a_i))^+ C_{S+1-J}(u (1 - sum a)) / (theta2(a_1) prod a_i (1 - sum a)).

    J = dim window primes, followed by a rough cofactor whose primes are all
    at least x^(1/u).
    """

    tag = "window_rough_tail"

    def __init__(self, w: WeightSpec, theta: ThetaSpec, S: int, dim: int, sf: SieveFunctions):
        self.w, self.theta, self.S, self.dim, self.sf = w, theta, S, dim, sf

    def __call__(self, x):
        s = x.sum(axis=1)
        num = np.maximum(1.0 - self.w(x).sum(axis=1), 0.0)
        c = self.sf.big_C_ext(self.S + 1 - self.dim, self.w.u * (1.0 - s))
        return num * c / (self.theta.theta2(x[:, 0]) * np.prod(x, axis=1) * (1.0 - s))

    def kinks(self, dim):
        out = []
        for b in self.w.kinks():
            for i in range(dim):
                e = np.zeros(dim)
                e[i] = 1.0
                out.append((e, b))
        for n in _integer_knots(0, self.w.u):
            out.append((np.ones(dim), 1.0 - n / self.w.u))
        return out

    def params(self):
        return {"weight": self.w.to_dict(), "theta": self.theta.to_dict(), "S": self.S, "dim": self.dim}
