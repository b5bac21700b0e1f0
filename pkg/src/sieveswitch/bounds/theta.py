from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..weights import WeightSpec

DELTA = 0.01


@dataclass(frozen=True)
class ThetaSpec:
    """Levels of distribution: constant theta1, affine theta2(alpha) = c0 + c1*alpha."""

    theta1: float
    c0: float
    c1: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.theta1 < 1.0:
            raise ConfigError(f"theta1 must lie in (0, 1), got {self.theta1}")

    @classmethod
    def constant(cls, theta: float) -> "ThetaSpec":
        return cls(theta1=theta, c0=theta, c1=0.0)

    def theta2(self, alpha):
        return self.c0 + self.c1 * np.asarray(alpha, dtype=float)

    def validity_interval(self, w: WeightSpec) -> tuple[float, float]:
        return 1.0 / w.v, 1.0 / (w.S + 1)

    def warnings(self, w: WeightSpec) -> list[str]:
        """Soft checks against the standing assumptions; never raises."""
        out = []
        a, b = self.validity_interval(w)
        low = float(min(self.theta2(a), self.theta2(b)))
        if low < DELTA:
            out.append(f"theta2 drops to {low:.4g} < delta = {DELTA} on [1/v, 1/(S+1)]")
        if float(max(self.theta2(a), self.theta2(b))) >= 1.0:
            out.append("theta2 reaches 1 on [1/v, 1/(S+1)]")
        if self.theta1 < 1.0 / w.u + DELTA:
            out.append(f"theta1 = {self.theta1:.6g} < 1/u + delta = {1.0 / w.u + DELTA:.6g}")
        return out

    def to_dict(self) -> dict:
        return {"theta1": self.theta1, "c0": self.c0, "c1": self.c1}
