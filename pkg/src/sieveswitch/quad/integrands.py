"""Integrand protocol used by the quadrature engine, plus generic integrands."""

from __future__ import annotations

import numpy as np


class Integrand:
    """Vectorized integrand over points of shape (n, d).

    Subclasses may declare kink hyperplanes ``c . x = beta`` (used as
    breakpoints) and may provide a closed-form innermost integral by
    setting ``exact_inner`` and implementing :meth:`inner_integral`.
    """

    tag = "generic"
    exact_inner = False

    def __call__(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def kinks(self, dim: int) -> list[tuple[np.ndarray, float]]:
        return []

    def inner_integral(self, outer: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"tag": self.tag, "params": self.params()}


class Constant(Integrand):
    tag = "constant"

    def __init__(self, value: float = 1.0):
        self.value = float(value)

    def __call__(self, x):
        return np.full(len(x), self.value)

    def params(self):
        return {"value": self.value}


class Monomial(Integrand):
    """x[index] ** power."""

    tag = "monomial"

    def __init__(self, index: int = 0, power: float = 1.0):
        self.index = index
        self.power = power

    def __call__(self, x):
        return x[:, self.index] ** self.power

    def params(self):
        return {"index": self.index, "power": self.power}


class PositivePart(Integrand):
    """(bound - coef . x)^+ ; the zero set is declared as a kink."""

    tag = "positive_part"

    def __init__(self, coef, bound: float):
        self.coef = np.asarray(coef, dtype=float)
        self.bound = float(bound)

    def __call__(self, x):
        return np.maximum(self.bound - x @ self.coef, 0.0)

    def kinks(self, dim):
        return [(self.coef, self.bound)]

    def params(self):
        return {"coef": self.coef.tolist(), "bound": self.bound}


class Product(Integrand):
    """Product of integrands; kinks are the union of the factors' kinks."""

    tag = "product"

    def __init__(self, *factors: Integrand):
        self.factors = factors

    def __call__(self, x):
        out = np.ones(len(x))
        for f in self.factors:
            out = out * f(x)
        return out

    def kinks(self, dim):
        return [k for f in self.factors for k in f.kinks(dim)]

    def params(self):
        return {"factors": [f.describe() for f in self.factors]}
