"""Grid tabulation of the delay-equation special functions.

Every function handled here is smooth on each unit panel [k, k+1] and has
derivative (or value) jumps only at integers.  Grids are therefore aligned
so that every integer is a grid point, integration steps never cross an
integer, and interpolation stencils stay inside a single panel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConvergenceError, OutOfRangeError

EULER_GAMMA = 0.57721566490153286061
EXP_GAMMA = math.exp(EULER_GAMMA)
TWO_EXP_GAMMA = 2.0 * EXP_GAMMA

KINDS = ("omega_B", "little_f", "big_F", "c_j", "C_J")

# start of the stored grid per kind; arguments below are handled analytically
GRID_START = {"omega_B": 0.0, "little_f": 1.0, "big_F": 1.0, "c_j": 0.0, "C_J": 1.0}

REFINE_TOL = 1e-8
MAX_REFINEMENTS = 8


@dataclass(frozen=True, eq=False)
class FunctionTable:
    kind: str
    grid_start: float
    grid_step: float
    values: np.ndarray = field(repr=False)
    s_max: float
    refinement_level: int = 0
    index_j: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown table kind {self.kind!r}")
        if self.grid_step <= 0:
            raise ValueError("grid_step must be positive")
        expected = int(round((self.s_max - self.grid_start) / self.grid_step)) + 1
        if len(self.values) != expected:
            raise ValueError(f"table holds {len(self.values)} values, expected {expected}")
        self.values.setflags(write=False)

    @property
    def points_per_unit(self) -> int:
        return int(round(1.0 / self.grid_step))

    @property
    def grid(self) -> np.ndarray:
        return self.grid_start + self.grid_step * np.arange(len(self.values))

    def __call__(self, s):
        """Panel-local cubic interpolation; accepts scalars or arrays."""
        arr = np.asarray(s, dtype=float)
        if arr.size and (np.nanmax(arr) > self.s_max + 1e-12 or np.nanmin(arr) < self.grid_start - 1e-12):
            bad = arr[(arr > self.s_max + 1e-12) | (arr < self.grid_start - 1e-12)].flat[0]
            raise OutOfRangeError(
                f"{self.kind} table covers [{self.grid_start}, {self.s_max}]; got {bad!r}"
            )
        out = _panel_cubic(self.values, self.grid_start, self.points_per_unit, arr)
        return float(out) if np.ndim(s) == 0 else out


def _panel_cubic(values: np.ndarray, start: float, n: int, s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    last_panel = (len(values) - 1) // n - 1
    rel = s - start
    panel = np.clip(np.floor(rel), 0, last_panel).astype(np.int64)
    x = (rel - panel) * n  # position in steps within the panel, in [0, n]
    i = np.clip(np.floor(x).astype(np.int64) - 1, 0, n - 3)
    base = panel * n + i
    t = x - i  # stencil nodes at 0, 1, 2, 3
    y0, y1, y2, y3 = (values[base + k] for k in range(4))
    l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0
    l1 = t * (t - 2) * (t - 3) / 2.0
    l2 = -t * (t - 1) * (t - 3) / 2.0
    l3 = t * (t - 1) * (t - 2) / 6.0
    return l0 * y0 + l1 * y1 + l2 * y2 + l3 * y3


def _panel_cumint(y: np.ndarray, h: float) -> np.ndarray:
    """Running integral of equispaced samples using local cubic fits."""
    steps = np.empty(len(y) - 1)
    steps[0] = 9 * y[0] + 19 * y[1] - 5 * y[2] + y[3]
    steps[1:-1] = -y[:-3] + 13 * y[1:-2] + 13 * y[2:-1] - y[3:]
    steps[-1] = y[-4] - 5 * y[-3] + 19 * y[-2] + 9 * y[-1]
    out = np.empty(len(y))
    out[0] = 0.0
    np.cumsum(steps * (h / 24.0), out=out[1:])
    return out


def _check_step(grid_step: float) -> int:
    if not 1e-5 <= grid_step <= 1e-2 + 1e-15:
        raise OutOfRangeError(f"grid_step must lie in [1e-5, 1e-2], got {grid_step}")
    n = int(round(1.0 / grid_step))
    if abs(n * grid_step - 1.0) > 1e-9:
        raise ValueError(f"grid_step must divide 1 exactly, got {grid_step}")
    return n


def _units(s_max: float) -> int:
    k = int(math.ceil(s_max - 1e-12))
    return k


def _build_fF(s_max: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Solve the f/F delay system on [1, s_max] with n points per unit."""
    h = 1.0 / n
    npts = (s_max - 1) * n + 1
    s = 1.0 + h * np.arange(npts)
    sF = np.empty(npts)
    sf = np.empty(npts)
    # seeds: sF = 2e^g on (0, 3], sf = 0 on (0, 2]
    upto3 = min(2 * n, npts - 1)
    sF[: upto3 + 1] = TWO_EXP_GAMMA
    sf[: min(n, npts - 1) + 1] = 0.0
    F = lambda i0, i1: sF[i0:i1] / s[i0:i1]  # noqa: E731
    f = lambda i0, i1: sf[i0:i1] / s[i0:i1]  # noqa: E731
    for k in range(2, s_max):
        lo, hi = (k - 1) * n, k * n  # panel [k, k+1] in table indices
        prev = slice(lo - n, hi - n + 1)  # panel [k-1, k]
        # (s f)' = F(s - 1) for s > 2
        sf[lo : hi + 1] = sf[lo] + _panel_cumint(F(prev.start, prev.stop), h)
        if k >= 3:
            # (s F)' = f(s - 1) for s > 3
            sF[lo : hi + 1] = sF[lo] + _panel_cumint(f(prev.start, prev.stop), h)
    return sf / s, sF / s


def _build_omega(s_max: int, n: int) -> np.ndarray:
    h = 1.0 / n
    npts = s_max * n + 1
    u = h * np.arange(npts)
    g = np.zeros(npts)  # u * omega(u)
    g[n : 2 * n + 1] = 1.0
    for k in range(2, s_max):
        lo, hi = k * n, (k + 1) * n
        prev = slice(lo - n, hi - n + 1)
        g[lo : hi + 1] = g[lo] + _panel_cumint(g[prev] / u[prev], h)
    out = np.zeros(npts)
    out[n:] = g[n:] / u[n:]
    return out


def _build_cj(j: int, s_max: int, n: int, prev_table: np.ndarray | None) -> np.ndarray:
    """c_j on [0, s_max]; prev_table holds c_{j-1} on the same grid (j >= 3)."""
    h = 1.0 / n
    npts = s_max * n + 1
    t = h * np.arange(npts)
    c = np.zeros(npts)
    if j == 1:
        c[n:] = 1.0
        return c
    for k in range(j, s_max):
        lo, hi = k * n, (k + 1) * n
        a = t[lo : hi + 1] - 1.0  # alpha - 1 on the panel
        if j == 2:
            integrand = 1.0 / a
        else:
            integrand = prev_table[lo - n : hi - n + 1] / a
        c[lo : hi + 1] = c[lo] + _panel_cumint(integrand, h)
    return c


def _raw_table(kind: str, j: int | None, s_max: int, n: int) -> np.ndarray:
    if kind == "little_f":
        return _build_fF(s_max, n)[0]
    if kind == "big_F":
        return _build_fF(s_max, n)[1]
    if kind == "omega_B":
        return _build_omega(s_max, n)
    if kind == "c_j":
        prev = None
        for i in range(1, j + 1):
            prev = _build_cj(i, s_max, n, prev)
        return prev
    if kind == "C_J":
        g = _build_omega(s_max, n) * (np.arange(s_max * n + 1) / n)
        prev = None
        for i in range(1, j):
            prev = _build_cj(i, s_max, n, prev)
            g = g - prev
        # C_J vanishes identically on [0, J]; remove cancellation noise there
        g[: j * n + 1] = 0.0
        return g[n:]
    raise ValueError(f"unknown table kind {kind!r}")


def tabulate(
    kind: str,
    s_max: float,
    grid_step: float = 1e-3,
    j: int | None = None,
    tol: float = REFINE_TOL,
    max_refinements: int = MAX_REFINEMENTS,
) -> FunctionTable:
    """Build a table by repeated step halving until successive grids agree to ``tol``."""
    if kind not in KINDS:
        raise ValueError(f"unknown table kind {kind!r}")
    if kind in ("c_j", "C_J") and (j is None or j < 1):
        raise ValueError(f"{kind} needs a positive index j")
    n = _check_step(grid_step)
    top = _units(s_max)
    if top < 4:
        raise OutOfRangeError("s_max must be at least 4")
    coarse = _raw_table(kind, j, top, n)
    delta = math.inf
    for level in range(1, max_refinements + 1):
        fine = _raw_table(kind, j, top, 2 * n)
        delta = float(np.max(np.abs(fine[::2] - coarse)))
        n *= 2
        coarse = fine
        if delta <= tol:
            return FunctionTable(
                kind=kind,
                grid_start=GRID_START[kind],
                grid_step=1.0 / n,
                values=fine,
                s_max=float(top),
                refinement_level=level,
                index_j=j if kind in ("c_j", "C_J") else None,
            )
        if n > 10**6:
            break
    raise ConvergenceError(
        f"{kind} table did not converge after {max_refinements} refinements "
        f"(last sup-norm delta {delta:.3e})",
        last_delta=delta,
    )
