"""Point evaluation of the Buchstab, rough-number and linear sieve functions."""

from __future__ import annotations

import functools
import math
import threading

import numpy as np

from ..errors import CapacityError, InconsistencyError, OutOfRangeError
from .tables import TWO_EXP_GAMMA, FunctionTable, tabulate

DEFAULT_FF_SMAX = 12.0
DEFAULT_OMEGA_SMAX = 30.0
DEFAULT_J_MAX = 8
DEFAULT_STEP = 1e-3
NEGATIVE_SLACK = 1e-6


class SieveFunctions:
    """Lazily built, immutable-once-built set of special function tables.

    Tables are created on first use and then shared; construction is
    serialized by a lock so concurrent readers see a fully built table.
    """

    def __init__(
        self,
        ff_smax: float = DEFAULT_FF_SMAX,
        omega_smax: float = DEFAULT_OMEGA_SMAX,
        j_max: int = DEFAULT_J_MAX,
        grid_step: float = DEFAULT_STEP,
    ):
        self.ff_smax = float(ff_smax)
        self.omega_smax = float(omega_smax)
        self.j_max = int(j_max)
        self.grid_step = float(grid_step)
        self._tables: dict[tuple[str, int | None], FunctionTable] = {}
        self._lock = threading.Lock()

    def s_max_for(self, kind: str) -> float:
        return self.ff_smax if kind in ("little_f", "big_F") else self.omega_smax

    def table(self, kind: str, j: int | None = None) -> FunctionTable:
        key = (kind, j)
        tab = self._tables.get(key)
        if tab is None:
            with self._lock:
                tab = self._tables.get(key)
                if tab is None:
                    tab = tabulate(kind, self.s_max_for(kind), self.grid_step, j=j)
                    self._tables[key] = tab
        return tab

    def install(self, table: FunctionTable) -> None:
        """Use a pre-built (e.g. cached on disk) table."""
        with self._lock:
            self._tables[(table.kind, table.index_j)] = table

    def tables(self) -> list[FunctionTable]:
        return [self._tables[k] for k in sorted(self._tables, key=lambda k: (k[0], k[1] or 0))]

    def build_all(self) -> list[FunctionTable]:
        self.table("little_f")
        self.table("big_F")
        self.table("omega_B")
        for j in range(2, self.j_max + 1):
            self.table("c_j", j)
        for j in range(2, self.j_max + 1):
            self.table("C_J", j)
        return self.tables()

    # -- point evaluation -------------------------------------------------

    def _check_max(self, x, limit: float, name: str) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.size and np.nanmax(arr) > limit + 1e-12:
            raise OutOfRangeError(f"{name} argument {np.nanmax(arr)!r} exceeds s_max = {limit}")
        return arr

    def buchstab(self, u):
        arr = self._check_max(u, self.omega_smax, "buchstab")
        if arr.size and np.nanmin(arr) < 0:
            raise OutOfRangeError("buchstab argument must be nonnegative")
        out = np.zeros_like(arr)
        hi = arr >= 1.0
        if np.any(hi):
            out[hi] = self.table("omega_B")(arr[hi])
            exact = hi & (arr <= 2.0)
            out[exact] = 1.0 / arr[exact]
        return _scalar_like(u, out)

    def little_c(self, j: int, t):
        self._check_j(j)
        arr = self._check_max(t, self.omega_smax, "c_j")
        if j == 1:
            return _scalar_like(t, (arr >= 1.0).astype(float))
        out = np.zeros_like(arr)
        above = arr > j
        if np.any(above):
            out[above] = self.table("c_j", j)(arr[above])
        return _scalar_like(t, out)

    def big_C(self, J: int, t):
        """C_J(t) = t*omega(t) - sum_{j<J} c_j(t), for t >= 1."""
        self._check_j(J)
        arr = self._check_max(t, self.omega_smax, "C_J")
        if arr.size and np.nanmin(arr) < 1.0 - 1e-12:
            raise OutOfRangeError("C_J is defined for t >= 1")
        if J == 1:
            out = arr * self.buchstab(arr)
        else:
            out = np.where(arr <= J, 0.0, self.table("C_J", J)(np.maximum(arr, 1.0)))
        low = float(np.min(out)) if out.size else 0.0
        if low < -NEGATIVE_SLACK:
            raise InconsistencyError(f"C_{J} evaluated to {low:.3e} < 0; tables disagree")
        return _scalar_like(t, np.maximum(out, 0.0))

    def big_C_ext(self, J: int, t):
        """C_J extended to all t >= 0 and J <= 1: zero below 1, C_1 for J <= 1.

        Below 1 only the empty product is rough, which carries no mass; an
        index J <= 1 puts no constraint on the number of prime factors.
        """
        J = max(int(J), 1)
        arr = np.asarray(t, dtype=float)
        out = np.zeros_like(arr)
        ok = arr >= 1.0
        if np.any(ok):
            out[ok] = self.big_C(J, arr[ok])
        return _scalar_like(t, out)

    def f(self, s):
        arr = self._check_max(s, self.ff_smax, "f")
        if arr.size and np.nanmin(arr) <= 0:
            raise OutOfRangeError("f is defined for s > 0")
        out = np.zeros_like(arr)
        hi = arr > 2.0
        if np.any(hi):
            out[hi] = self.table("little_f")(arr[hi])
        return _scalar_like(s, out)

    def F(self, s):
        arr = self._check_max(s, self.ff_smax, "F")
        if arr.size and np.nanmin(arr) <= 0:
            raise OutOfRangeError("F is defined for s > 0")
        out = np.empty_like(arr)
        low = arr <= 3.0
        out[low] = TWO_EXP_GAMMA / arr[low]
        if np.any(~low):
            out[~low] = self.table("big_F")(arr[~low])
        return _scalar_like(s, out)

    def _check_j(self, j: int) -> None:
        if j < 1:
            raise ValueError("index must be a positive integer")
        if j > self.j_max:
            raise CapacityError(f"index {j} exceeds j_max = {self.j_max}")


def _scalar_like(template, arr: np.ndarray):
    return float(arr) if np.ndim(template) == 0 else arr


@functools.lru_cache(maxsize=1)
def default_functions() -> SieveFunctions:
    return SieveFunctions()


def buchstab(u: float) -> float:
    return default_functions().buchstab(u)


def little_c(j: int, t: float) -> float:
    return default_functions().little_c(j, t)


def big_C(J: int, t: float) -> float:
    return default_functions().big_C(J, t)


def linear_sieve_f(s: float) -> float:
    return default_functions().f(s)


def linear_sieve_F(s: float) -> float:
    return default_functions().F(s)


def f_closed_form(s: float) -> float:
    """f(s) on [2, 4], where it has an elementary expression."""
    if not 2.0 <= s <= 4.0:
        raise OutOfRangeError("closed form of f holds on [2, 4] only")
    return TWO_EXP_GAMMA / s * math.log(s - 1.0)
