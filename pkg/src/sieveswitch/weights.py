"""Weight functions w(alpha) attached to window primes x^(1/v) <= p < x^(1/u).

Four families are supported: trivial (w = 0, u = v), Kuhn (w = 1/2 on the
window), Richert (w = lam * (1 - u*alpha) on the window) and a general
piecewise-linear family that vanishes at both window ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

FAMILIES = ("trivial", "kuhn", "richert", "piecewise_linear")


def ceil_tol(x: float, tol: float = 1e-9) -> int:
    """Ceiling that treats values within ``tol`` of an integer as that integer."""
    r = round(x)
    if abs(x - r) <= tol:
        return int(r)
    return math.ceil(x)


@dataclass(frozen=True)
class WeightSpec:
    family: str
    u: float
    v: float
    S: int = 3
    lam: float | None = None
    breakpoints: tuple[tuple[float, float], ...] = ()
    lipschitz_bound: float = field(init=False)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"weight.family: unknown family {self.family!r}")
        if self.family == "trivial" and self.u != self.v:
            raise ConfigError("weight.u: trivial weights require u == v")
        if not 2.0 < self.u <= self.v:
            raise ConfigError(f"weight.u/v: need 2 < u <= v, got u={self.u}, v={self.v}")
        if self.S < 1:
            raise ConfigError("S must be a positive integer")
        if self.v < self.S + 1:
            raise ConfigError(f"weight.v: need v >= S + 1 = {self.S + 1}, got {self.v}")
        if self.family == "richert":
            if self.lam is None or self.lam <= 0:
                raise ConfigError("weight.lam: Richert weights need lam > 0")
            if self.lam * (1.0 - self.u / self.v) > 1.0 + 1e-12:
                raise ConfigError("weight.lam: Richert weight exceeds 1 on the window")
        if self.family == "piecewise_linear":
            self._check_breakpoints()
        object.__setattr__(self, "breakpoints", tuple(tuple(map(float, b)) for b in self.breakpoints))
        object.__setattr__(self, "lipschitz_bound", self._lipschitz())

    def _check_breakpoints(self) -> None:
        bp = self.breakpoints
        if len(bp) < 2:
            raise ConfigError("weight.breakpoints: need at least two points")
        xs = [a for a, _ in bp]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ConfigError("weight.breakpoints: alphas must be strictly increasing")
        if abs(xs[0] - 1 / self.v) > 1e-12 or abs(xs[-1] - 1 / self.u) > 1e-12:
            raise ConfigError("weight.breakpoints: must start at 1/v and end at 1/u")
        if bp[0][1] != 0.0 or bp[-1][1] != 0.0:
            raise ConfigError("weight.breakpoints: w must vanish at 1/v and 1/u")
        if any(not 0.0 <= w <= 1.0 for _, w in bp):
            raise ConfigError("weight.breakpoints: values must lie in [0, 1]")

    def _lipschitz(self) -> float:
        if self.family in ("trivial", "kuhn"):
            # Kuhn's indicator has no finite constant; kept at 0 for bookkeeping
            return 0.0
        if self.family == "richert":
            return self.lam * self.u
        slopes = [
            abs(w1 - w0) / (a1 - a0)
            for (a0, w0), (a1, w1) in zip(self.breakpoints, self.breakpoints[1:])
        ]
        return max(slopes)

    # ------------------------------------------------------------------

    @property
    def window(self) -> tuple[float, float]:
        return 1.0 / self.v, 1.0 / self.u

    def __call__(self, alpha):
        a = np.asarray(alpha, dtype=float)
        lo, hi = self.window
        inside = (a >= lo) & (a < hi)
        if self.family == "trivial":
            out = np.zeros_like(a)
        elif self.family == "kuhn":
            out = np.where(inside, 0.5, 0.0)
        elif self.family == "richert":
            out = np.where(inside, self.lam * (1.0 - self.u * a), 0.0)
        else:
            xs, ws = zip(*self.breakpoints)
            out = np.where(inside, np.interp(a, xs, ws), 0.0)
        return float(out) if np.ndim(alpha) == 0 else out

    def kinks(self) -> list[float]:
        """Alphas where w fails to be smooth (jumps or slope changes)."""
        if self.family == "trivial":
            return []
        if self.family == "piecewise_linear":
            return [a for a, _ in self.breakpoints]
        return list(self.window)

    def window_infimum(self) -> float | None:
        """inf of w over the half-open window; None when the window is empty."""
        lo, hi = self.window
        if hi <= lo:
            return None
        if self.family == "kuhn":
            return 0.5
        if self.family == "trivial":
            return 0.0
        # Richert and piecewise-linear weights both reach 0 at the window ends
        return 0.0

    def to_dict(self) -> dict:
        d = {"family": self.family, "u": self.u, "v": self.v, "S": self.S}
        if self.lam is not None:
            d["lam"] = self.lam
        if self.breakpoints:
            d["breakpoints"] = [list(b) for b in self.breakpoints]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "WeightSpec":
        unknown = set(d) - {"family", "u", "v", "S", "lam", "breakpoints"}
        if unknown:
            raise ConfigError(f"weight: unknown field(s) {sorted(unknown)}")
        if d.get("family") == "trivial" and "u" not in d and "v" in d:
            d = {**d, "u": d["v"]}
        for key in ("family", "u", "v"):
            if key not in d:
                raise ConfigError(f"weight.{key}: missing")
        try:
            return cls(
                family=d["family"],
                u=float(d["u"]),
                v=float(d["v"]),
                S=int(d.get("S", 3)),
                lam=None if d.get("lam") is None else float(d["lam"]),
                breakpoints=tuple(tuple(b) for b in d.get("breakpoints", ())),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"weight: {exc}") from exc


def trivial(v: float, S: int = 3) -> WeightSpec:
    return WeightSpec("trivial", u=v, v=v, S=S)


def kuhn(u: float, v: float, S: int = 3) -> WeightSpec:
    return WeightSpec("kuhn", u=u, v=v, S=S)


def richert(u: float, v: float, lam: float, S: int = 3) -> WeightSpec:
    return WeightSpec("richert", u=u, v=v, S=S, lam=lam)


def weight_value(spec: WeightSpec, alpha: float) -> float:
    return spec(alpha)


def capital_R(spec: WeightSpec) -> int:
    """Largest number of prime factors compatible with a positive weight."""
    if spec.family == "kuhn":
        return ceil_tol(spec.u * (1.0 - 1.0 / spec.v))
    if spec.family == "richert":
        return ceil_tol(1.0 / spec.lam + spec.u - 1.0)
    return ceil_tol(spec.v - 1.0)


def r_zero(spec: WeightSpec) -> int | None:
    """Smallest R0 with (R0 + 1) * inf(window w) >= 1, or None if inf w = 0."""
    inf = spec.window_infimum()
    if inf is None:
        return 0
    if inf <= 0.0:
        return None
    return max(ceil_tol(1.0 / inf) - 1, 0)


def k1_route_valid(spec: WeightSpec) -> bool:
    r0 = r_zero(spec)
    return r0 is not None and r0 <= 1
