"""Plain Monte Carlo over the bounding box, used as an independent oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import IntegralTask

MIN_SAMPLES = 10_000
DEGENERATE_RATE = 1e-6


@dataclass
class MCResult:
    value: float
    standard_error: float
    acceptance_rate: float
    warning: str | None = None

    def __iter__(self):
        yield self.value
        yield self.standard_error

    def agrees_with(self, value: float, sigmas: float = 3.0, floor: float = 0.0) -> bool:
        return abs(value - self.value) <= max(sigmas * self.standard_error, floor)


def mc_integrate(task: IntegralTask, samples: int, seed: int, chunk: int = 200_000) -> MCResult:
    """Uniform sampling with rejection; pointwise integrand only (no closed forms)."""
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    rng = np.random.default_rng(seed)
    lo = np.array(task.lower)
    hi = np.array(task.upper)
    volume = float(np.prod(hi - lo))
    sums: list[float] = []
    squares: list[float] = []
    accepted = 0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        x = lo + (hi - lo) * rng.random((n, task.dimension))
        mask = task.contains(x)
        accepted += int(mask.sum())
        if mask.any():
            g = volume * task.integrand(x[mask])
            sums.append(math.fsum(g.tolist()))
            squares.append(math.fsum((g * g).tolist()))
        done += n
    rate = accepted / samples
    if accepted == 0:
        return MCResult(0.0, 0.0, 0.0, warning="degenerate region: no sample accepted")
    mean = math.fsum(sums) / samples
    second = math.fsum(squares) / samples
    var = max(second - mean * mean, 0.0)
    warning = None
    if rate < DEGENERATE_RATE:
        warning = f"degenerate region: acceptance rate {rate:.2e}"
    return MCResult(mean, math.sqrt(var / samples), rate, warning)
