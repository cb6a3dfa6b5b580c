"""Transfer matrices for -u'' + V u = k^2 u on a single edge.

A transfer matrix maps (u, u') at the start of an edge to (u, u') at its end,
both derivatives taken along the edge direction:

    Phi = [[psi1(l), psi2(l)], [psi1'(l), psi2'(l)]]

with psi1 = (1, 0) and psi2 = (0, 1) at x = 0.  All matrices here are real
with unit determinant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ValidationError

J = np.diag([1.0, -1.0])

# |omega * l| below this switches to the Taylor branch
_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class ZeroPotential:
    def is_zero(self) -> bool:
        return True

    def is_symmetric(self) -> bool:
        return True


@dataclass(frozen=True)
class ConstantPotential:
    value: float

    def is_zero(self) -> bool:
        return self.value == 0.0

    def is_symmetric(self) -> bool:
        return True


@dataclass(frozen=True)
class PiecewisePotential:
    """Constant pieces ordered from the source end: ((length, value), ...)."""

    pieces: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pieces = tuple((float(a), float(b)) for a, b in self.pieces)
        object.__setattr__(self, "pieces", pieces)
        if not pieces:
            raise ValidationError("piecewise potential needs at least one piece")
        if any(length <= 0 for length, _ in pieces):
            raise ValidationError("piece lengths must be positive")

    @property
    def total_length(self) -> float:
        return math.fsum(length for length, _ in self.pieces)

    def is_zero(self) -> bool:
        return all(v == 0.0 for _, v in self.pieces)

    def is_symmetric(self) -> bool:
        return self.pieces == self.pieces[::-1]


@dataclass(frozen=True)
class SampledPotential:
    """Values on a uniform grid from source (first) to target (last)."""

    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) < 2:
            raise ValidationError("sampled potential needs at least 2 grid points")

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)

    def is_symmetric(self) -> bool:
        return self.values == self.values[::-1]


Potential = Union[ZeroPotential, ConstantPotential, PiecewisePotential, SampledPotential]


def check_potential(potential: Potential, length: float, tol: float = 1e-12) -> None:
    if length <= 0:
        raise ValidationError(f"edge length must be positive, got {length}")
    if isinstance(potential, PiecewisePotential):
        total = potential.total_length
        if abs(total - length) > tol * max(1.0, length):
            raise ValidationError(
                f"piecewise lengths sum to {total!r}, edge length is {length!r}"
            )


# -- closed forms -----------------------------------------------------------


def _cos_sinc(z: float, length: float) -> tuple[float, float]:
    """C = cos(w l) and S = sin(w l)/w for w^2 l^2 = z, continued to z < 0."""
    if abs(z) < _SERIES_CUTOFF**2:
        # 6 terms of the entire series in z = w^2 l^2
        c = s = 0.0
        term_c, term_s = 1.0, 1.0
        for j in range(6):
            c += term_c
            s += term_s
            term_c *= -z / ((2 * j + 1) * (2 * j + 2))
            term_s *= -z / ((2 * j + 2) * (2 * j + 3))
        return c, s * length
    if z > 0:
        w = math.sqrt(z) / length
        return math.cos(w * length), math.sin(w * length) / w
    w = math.sqrt(-z) / length
    return math.cosh(w * length), math.sinh(w * length) / w


def propagate_constant(q: float, length: float, k: float) -> np.ndarray:
    """Transfer matrix for a constant potential q over ``length`` at wavenumber k."""
    if length <= 0:
        raise ValidationError("length must be positive")
    e = k * k - q
    c, s = _cos_sinc(e * length * length, length)
    return np.array([[c, s], [-e * s, c]])


def propagate_piecewise(potential: PiecewisePotential, k: float) -> np.ndarray:
    out = np.eye(2)
    for length, value in potential.pieces:
        out = propagate_constant(value, length, k) @ out
    return out


# -- numerical integration --------------------------------------------------


def integrate_transfer(
    potential: Callable[[float], float], length: float, k: float, steps: int
) -> np.ndarray:
    """Fourth-order Magnus integration of Y' = [[0, 1], [V(x) - k^2, 0]] Y, Y(0) = I.

    Each step samples V at the two Gauss nodes and applies the exponential
    of a traceless 2x2 generator, so the determinant stays 1 up to rounding
    however coarse the step is.  Global error is O(h^4) for smooth V.
    """
    if steps < 1:
        raise ValidationError("steps must be positive")
    h = length / steps
    k2 = k * k
    off = math.sqrt(3.0) / 6.0
    y = np.eye(2)
    for i in range(steps):
        x = i * h
        p1 = potential(x + (0.5 - off) * h) - k2
        p2 = potential(x + (0.5 + off) * h) - k2
        # generator [[c, h], [g, -c]]: mean of A at the nodes plus the commutator term
        c = math.sqrt(3.0) / 12.0 * h * h * (p1 - p2)
        g = 0.5 * h * (p1 + p2)
        cs, sn = _cos_sinc(-(c * c + h * g), 1.0)
        step = np.array([[cs + sn * c, sn * h], [sn * g, cs - sn * c]])
        y = step @ y
    return y


def sampled_profile(potential: SampledPotential, length: float) -> Callable[[float], float]:
    """Piecewise-linear interpolant of the grid values over [0, length]."""
    values = np.asarray(potential.values)
    grid = np.linspace(0.0, length, len(values))

    def profile(x: float) -> float:
        return float(np.interp(x, grid, values))

    return profile


def default_steps(potential: SampledPotential, minimum: int = 256) -> int:
    """Smallest multiple of the grid cell count that is at least ``minimum``."""
    cells = len(potential.values) - 1
    return cells * max(1, math.ceil(minimum / cells))


def propagate_sampled(
    potential: SampledPotential, length: float, k: float, steps: int | None = None
) -> np.ndarray:
    if steps is None:
        steps = default_steps(potential)
    if steps < 16:
        raise ValidationError("propagate_sampled needs at least 16 steps")
    return integrate_transfer(sampled_profile(potential, length), length, k, steps)


def edge_transfer(potential: Potential, length: float, k: float, steps: int | None = None):
    """Dispatch on the potential class."""
    if isinstance(potential, ZeroPotential):
        return propagate_constant(0.0, length, k)
    if isinstance(potential, ConstantPotential):
        return propagate_constant(potential.value, length, k)
    if isinstance(potential, PiecewisePotential):
        return propagate_piecewise(potential, k)
    if isinstance(potential, SampledPotential):
        return propagate_sampled(potential, length, k, steps)
    raise TypeError(f"unknown potential {potential!r}")


# -- orientation and doubled edges -----------------------------------------


def reverse_transfer(phi: np.ndarray) -> np.ndarray:
    """Transfer matrix of the reversed edge, J Phi^{-1} J with J = diag(1, -1).

    Every transfer matrix has unit determinant, so the inverse is the
    adjugate.  Dividing by a computed determinant would only add error: for
    strongly evanescent edges a d - b c cancels catastrophically.
    """
    a, b = phi[0]
    c, d = phi[1]
    return np.array([[d, b], [c, a]])


def doubled_edge_matrix(phi: np.ndarray) -> np.ndarray:
    """Phi_e Phi_{-e}: one lap forward and back along the doubled edge."""
    return phi @ reverse_transfer(phi)


def is_doubled_edge_periodic(phi: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff Phi_e Phi_{-e} has a fixed vector, i.e. its trace is 2."""
    return abs(np.trace(doubled_edge_matrix(phi)) - 2.0) <= tol


def partial_transfer(
    potential: Potential, length: float, a: float, b: float, k: float, steps: int | None = None
) -> np.ndarray:
    """Transfer matrix across the sub-interval [a, b] of an edge."""
    span = b - a
    if span <= 0:
        return np.eye(2)
    if isinstance(potential, ZeroPotential):
        return propagate_constant(0.0, span, k)
    if isinstance(potential, ConstantPotential):
        return propagate_constant(potential.value, span, k)
    if isinstance(potential, PiecewisePotential):
        out = np.eye(2)
        start = 0.0
        for piece_len, value in potential.pieces:
            lo, hi = max(a, start), min(b, start + piece_len)
            if hi > lo:
                out = propagate_constant(value, hi - lo, k) @ out
            start += piece_len
        return out
    if isinstance(potential, SampledPotential):
        profile = sampled_profile(potential, length)
        n = steps or default_steps(potential)
        sub = max(16, math.ceil(n * span / length))
        return integrate_transfer(lambda s: profile(a + s), span, k, sub)
    raise TypeError(f"unknown potential {potential!r}")
