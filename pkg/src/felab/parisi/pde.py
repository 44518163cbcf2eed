"""Parisi PDE for step order parameters and the Parisi functional.

On an interval where ``zeta = m`` is constant the PDE
``d_t Phi + xi''/2 (d_xx Phi + m (d_x Phi)^2) = 0`` is linearised by the
Cole-Hopf substitution ``exp(m Phi)``, giving the exact backward step

    Phi(a, x) = (1/m) log E exp(m Phi(b, x + sqrt(v) Z)),   v = xi'(b) - xi'(a),

and ``Phi(a, x) = E Phi(b, x + sqrt(v) Z)`` when ``m = 0``.  The Gaussian
expectation uses Gauss-Hermite quadrature on a cubic spline of the grid
function, extended linearly beyond the grid (``Phi`` is asymptotically
``|x| + const``).
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import roots_hermitenorm

from felab.classical.xi import MixtureXi
from felab.core.free_energy import NumericalError
from felab.parisi.zeta import StepZeta

MIN_NX = 2049
CONVEXITY_TOL = 1e-8
SLOPE_TOL = 1e-8


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridConfig:
    """Spatial grid and quadrature.

    ``n_nodes`` is the minimum Gauss-Hermite size; steps of large variance
    use more (see :func:`nodes_for_variance`).
    ``half_width`` defaults to ``max(10, 6 sqrt(xi'(1)))``.  ``dt_max`` caps
    the spacing of stored times (each step interval is split uniformly);
    ``None`` stores only the breakpoints.
    """

    nx: int = 4097
    half_width: Optional[float] = None
    n_nodes: int = 128
    dt_max: Optional[float] = None

    def __post_init__(self):
        if self.nx < MIN_NX or self.nx % 2 == 0:
            raise GridError(f"nx must be odd and >= {MIN_NX}, got {self.nx}")
        if self.n_nodes < 64:
            raise GridError("need at least 64 quadrature nodes")
        if self.dt_max is not None and not 0 < self.dt_max <= 1:
            raise GridError("dt_max must lie in (0, 1]")

    def resolve_half_width(self, xi: MixtureXi) -> float:
        need = 4.0 * math.sqrt(xi.d1(1.0))
        L = self.half_width if self.half_width is not None else max(10.0, 1.5 * need)
        if L < need:
            raise GridError(f"half width {L} below 4 sqrt(xi'(1)) = {need}: quadrature mass would leave the grid")
        return float(L)

    def refined(self) -> "GridConfig":
        """Twice the resolution in space and quadrature."""
        return GridConfig(2 * self.nx - 1, self.half_width, 2 * self.n_nodes, self.dt_max)


@functools.lru_cache(maxsize=16)
def gauss_hermite(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and normalised weights for ``E f(Z)`` with standard normal ``Z``."""
    z, w = roots_hermitenorm(n)
    w = w / w.sum()
    z.setflags(write=False)
    w.setflags(write=False)
    return z, w


def nodes_for_variance(v: float, n_nodes: int) -> int:
    """Quadrature size for ``E f(x + sqrt(v) Z)``.

    ``log cosh`` is analytic in a strip of half-width ``pi/2``, so the
    Gauss-Hermite error depends on ``n / v``; the node count grows linearly
    in ``v`` beyond ``n_nodes`` (rounded up to a multiple of 32).
    """
    need = max(n_nodes, math.ceil(64.0 * v))
    return 32 * math.ceil(need / 32)


def log_cosh(x):
    """Overflow-free ``log cosh x``."""
    a = np.abs(np.asarray(x, dtype=float))
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


def _extended(x: np.ndarray, values: np.ndarray):
    """Cubic spline inside the grid, linear with the end slopes outside."""
    spline = CubicSpline(x, values)
    lo, hi = x[0], x[-1]
    s_lo, s_hi = float(spline(lo, 1)), float(spline(hi, 1))

    def f(pts):
        out = spline(np.clip(pts, lo, hi))
        out = np.where(pts < lo, values[0] + s_lo * (pts - lo), out)
        return np.where(pts > hi, values[-1] + s_hi * (pts - hi), out)

    return f


def cole_hopf_step(x: np.ndarray, values: np.ndarray, m: float, v: float, n_nodes: int) -> np.ndarray:
    """One exact backward step over an interval of constant ``zeta = m`` and variance ``v``."""
    if v <= 0.0:
        return values.copy()
    z, w = gauss_hermite(nodes_for_variance(v, n_nodes))
    f = _extended(x, values)
    vals = f(x[:, None] + math.sqrt(v) * z[None, :])
    mean = vals @ w
    if m == 0.0:
        return mean
    dev = m * (vals - mean[:, None])
    if np.max(dev) > 700.0:
        # log E exp(m Phi) directly, shifted by the row maximum
        top = np.max(dev, axis=1, keepdims=True)
        return mean + (top[:, 0] + np.log(np.exp(dev - top) @ w)) / m
    # (1/m) log(1 + E expm1(m (Phi - E Phi))) stays accurate as m -> 0
    return mean + np.log1p(np.expm1(dev) @ w) / m


@dataclass(frozen=True)
class PdeSolution:
    """``Phi`` on a uniform grid at the stored times (ascending, from 0 to 1)."""

    xi: MixtureXi
    zeta: StepZeta
    config: GridConfig
    x: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    dphi: np.ndarray = field(repr=False)

    @property
    def phi00(self) -> float:
        return float(self.phi[0, len(self.x) // 2])

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def time_index(self, t) -> np.ndarray:
        """Index of the stored time nearest to ``t``."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t)
        idx = np.clip(idx, 1, len(self.times) - 1)
        left = self.times[idx - 1]
        return np.where(t - left <= self.times[idx] - t, idx - 1, idx)

    def grad(self, index: int, s: np.ndarray) -> np.ndarray:
        """``d_x Phi`` at stored time ``index``, linearly interpolated, held constant beyond the grid."""
        return np.interp(s, self.x, self.dphi[index])

    def dump_csv(self, path) -> None:
        """Rows ``t, x, phi`` for plotting."""
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["t", "x", "phi"])
            for t, row in zip(self.times, self.phi):
                for xv, pv in zip(self.x, row):
                    out.writerow([repr(float(t)), repr(float(xv)), repr(float(pv))])


def _check_xi(xi: MixtureXi) -> None:
    if xi.degree >= 1 and xi.coefficients[0] != 0.0:
        raise ValueError("the Parisi PDE here has no external field: c_1 must be 0")


def _time_grid(zeta: StepZeta, dt_max: Optional[float]) -> list:
    """``(t_start, t_end, m)`` pieces, splitting each step so no piece exceeds ``dt_max``."""
    pieces = []
    for a, b, m in zeta.intervals():
        n = 1 if dt_max is None else max(1, math.ceil((b - a) / dt_max - 1e-12))
        edges = np.linspace(a, b, n + 1)
        pieces.extend((float(edges[j]), float(edges[j + 1]), m) for j in range(n))
    return pieces


def parisi_pde_solve(xi: MixtureXi, zeta: StepZeta, config: GridConfig = GridConfig()) -> PdeSolution:
    """Backward Cole-Hopf recursion from ``Phi(1, x) = log cosh x`` to ``t = 0``.

    Raises :class:`NumericalError` if a stored slice is not convex or has
    slope beyond 1 in absolute value.
    """
    _check_xi(xi)
    L = config.resolve_half_width(xi)
    x = np.linspace(-L, L, config.nx)
    pieces = _time_grid(zeta, config.dt_max)
    slices = [log_cosh(x)]
    times = [1.0]
    for a, b, m in reversed(pieces):
        v = float(xi.d1(b) - xi.d1(a))
        slices.append(cole_hopf_step(x, slices[-1], m, v, config.n_nodes))
        times.append(a)
    phi = np.array(slices[::-1])
    dphi = np.gradient(phi, x, axis=1)
    sol = PdeSolution(xi, zeta, config, x, np.array(times[::-1]), phi, dphi)
    _check_invariants(sol)
    return sol


def _check_invariants(sol: PdeSolution) -> None:
    if not np.all(np.isfinite(sol.phi)):
        raise NumericalError("non-finite values in the PDE solution")
    second = sol.phi[:, 2:] - 2.0 * sol.phi[:, 1:-1] + sol.phi[:, :-2]
    if np.min(second) < -CONVEXITY_TOL:
        raise NumericalError(f"Phi lost convexity: second difference {np.min(second):.3e}")
    slope = np.max(np.abs(sol.dphi))
    if slope > 1.0 + SLOPE_TOL:
        raise NumericalError(f"|d_x Phi| reached {slope}")


def correction_integral(xi: MixtureXi, zeta: StepZeta) -> float:
    """``(1/2) int_0^1 t xi''(t) zeta(t) dt`` in closed form per step."""
    return 0.5 * math.fsum(m * xi.t_d2_integral(a, b) for a, b, m in zeta.intervals())


def parisi_functional(xi: MixtureXi, zeta: StepZeta, config: GridConfig = GridConfig()) -> float:
    """``Phi(0, 0) - (1/2) int t xi'' zeta``."""
    if xi.is_zero:
        return 0.0
    return parisi_pde_solve(xi, zeta, config).phi00 - correction_integral(xi, zeta)
