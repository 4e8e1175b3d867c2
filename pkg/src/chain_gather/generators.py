"""Initial-configuration generators.

All generators emit coordinates in connectivity-range units with every chain
edge at most 1, so their output feeds :func:`chain_gather.chain.build_chain`
directly.  Randomness is confined to :func:`perturbed_chain` and driven by a
named seed, recorded in traces for replay.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import Point2
from .tolerances import Tolerances, DEFAULT_TOLERANCES
from . import kernels


class GeneratorError(Exception):
    pass


class NotCoprime(GeneratorError):
    pass


class DegenerateParameters(GeneratorError):
    pass


class OddN(GeneratorError):
    pass


class RetriesExhausted(GeneratorError):
    pass


def regular_star(n: int, d: int, edge: float = 1.0) -> list[Point2]:
    """Star polygon with Schlaefli symbol {n/d}: vertex j at circle angle
    2*pi*d*j/n, scaled so adjacent vertices are ``edge`` apart."""
    if n < 3 or d < 1 or 2 * d >= n:
        raise DegenerateParameters(f"need n >= 3 and 1 <= d < n/2, got n={n} d={d}")
    if not 0.0 < edge <= 1.0:
        raise DegenerateParameters(f"edge must be in (0, 1], got {edge}")
    if math.gcd(n, d) != 1:
        raise NotCoprime(f"gcd({n}, {d}) != 1: not a single closed chain")
    radius = edge / (2.0 * math.sin(math.pi * d / n))
    step = 2.0 * math.pi * d / n
    return [
        Point2(radius * math.cos(step * j), radius * math.sin(step * j))
        for j in range(n)
    ]


def translated_isogonal(
    n: int, d: int, t_param: float, edge_max: float = 1.0
) -> list[Point2]:
    """Isogonal polygon with two alternating edge lengths.

    Vertex j sits at circle angle (2*pi/n) * (j*d + (-1)^j * t_param); the
    circle is scaled so the longer of the two alternating edges equals
    ``edge_max``.  Values of ``t_param`` that collapse adjacent vertices
    are rejected; values that reproduce equal edges are allowed (callers
    can detect the degenerate regular output).
    """
    if n % 2 != 0:
        raise OddN(f"translated isogonal polygons need even n, got {n}")
    if n < 4 or d < 1 or 2 * d >= n:
        raise DegenerateParameters(f"need n >= 4 even and 1 <= d < n/2, got n={n} d={d}")
    if not 0.0 < t_param < n / 2.0:
        raise DegenerateParameters(f"t_param must be in (0, n/2), got {t_param}")
    if not 0.0 < edge_max <= 1.0:
        raise DegenerateParameters(f"edge_max must be in (0, 1], got {edge_max}")
    if math.gcd(n, d) != 1:
        raise NotCoprime(f"gcd({n}, {d}) != 1")
    base = 2.0 * math.pi / n
    gap_even = base * (d - 2.0 * t_param)  # angular step j -> j+1, j even
    gap_odd = base * (d + 2.0 * t_param)
    factors = [abs(math.sin(gap_even / 2.0)), abs(math.sin(gap_odd / 2.0))]
    if min(factors) < 1e-12:
        raise DegenerateParameters(
            f"t_param={t_param} collapses adjacent vertices (zero edge)"
        )
    radius = edge_max / (2.0 * max(factors))
    return [
        Point2(
            radius * math.cos(base * (j * d + (-1) ** j * t_param)),
            radius * math.sin(base * (j * d + (-1) ** j * t_param)),
        )
        for j in range(n)
    ]


def globally_isogonal(
    points: list[Point2], tol: Tolerances = DEFAULT_TOLERANCES
) -> bool:
    """Whole-ring isogonality test matching the robots' local criterion:
    equal angle sizes and orientations, with equal or strictly alternating
    vector lengths."""
    n = len(points)
    if n < 3:
        return True
    xs = np.array([p.x for p in points])
    ys = np.array([p.y for p in points])
    sweep = kernels.analyze_ring(xs, ys, tol.eps_len, tol.eps_ang)
    if sweep.alpha.max() - sweep.alpha.min() > tol.eps_ang:
        return False
    if not (sweep.turn == sweep.turn[0]).all():
        return False
    lens = sweep.ulen
    if lens.max() - lens.min() <= tol.eps_len:
        return True
    if n % 2 == 0:
        evens = lens[::2]
        odds = lens[1::2]
        if (
            evens.max() - evens.min() <= tol.eps_len
            and odds.max() - odds.min() <= tol.eps_len
        ):
            return True
    return False


def perturbed_chain(
    n: int,
    base_edge: float = 1.0,
    jitter: float = 0.05,
    seed: int = 0,
    max_retries: int = 32,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[Point2]:
    """Regular n-gon with per-vertex jitter: the standard non-isogonal input.

    Each vertex is displaced uniformly within a disk of radius ``jitter``;
    the ring is rescaled if any edge ends up above the connectivity range.
    For jitter > 0 the result is re-sampled (bounded retries) until it is
    globally non-isogonal.
    """
    if n < 3:
        raise DegenerateParameters(f"need n >= 3, got {n}")
    if not 0.0 < base_edge <= 1.0:
        raise DegenerateParameters(f"base_edge must be in (0, 1], got {base_edge}")
    if jitter < 0.0:
        raise DegenerateParameters("jitter must be >= 0")
    radius = base_edge / (2.0 * math.sin(math.pi / n))
    theta = 2.0 * math.pi * np.arange(n) / n
    base_x = radius * np.cos(theta)
    base_y = radius * np.sin(theta)
    for attempt in range(max_retries):
        rng = np.random.default_rng(np.random.SeedSequence([seed, attempt]))
        if jitter > 0.0:
            r = jitter * np.sqrt(rng.uniform(0.0, 1.0, n))
            phi = rng.uniform(0.0, 2.0 * math.pi, n)
            xs = base_x + r * np.cos(phi)
            ys = base_y + r * np.sin(phi)
        else:
            xs, ys = base_x.copy(), base_y.copy()
        edges = np.hypot(np.roll(xs, -1) - xs, np.roll(ys, -1) - ys)
        max_edge = float(edges.max())
        if max_edge > 1.0:
            scale = 1.0 / max_edge
            xs *= scale
            ys *= scale
        points = [Point2(float(x), float(y)) for x, y in zip(xs, ys)]
        if jitter == 0.0 or not globally_isogonal(points, tol):
            return points
    raise RetriesExhausted(
        f"no non-isogonal sample after {max_retries} tries (jitter={jitter})"
    )


def line_cycle(n: int, spacing: float = 1.0) -> list[Point2]:
    """Doubled-back flat cycle: a straight line walked out and back."""
    if n < 4 or n % 2 != 0:
        raise DegenerateParameters(f"line cycle needs even n >= 4, got {n}")
    if not 0.0 < spacing <= 1.0:
        raise DegenerateParameters(f"spacing must be in (0, 1], got {spacing}")
    half = n // 2
    out = [Point2(j * spacing, 0.0) for j in range(half + 1)]
    back = [Point2((half - j) * spacing, 0.0) for j in range(1, half)]
    return out + back


def gtc_lower_bound_cycle(n: int, spacing: float = 1.0) -> list[Point2]:
    """Cycle preset from the quadratic lower-bound construction: a regular
    ring with neighbours at the full connectivity range."""
    if n < 3:
        raise DegenerateParameters(f"need n >= 3, got {n}")
    return regular_star(n, 1, spacing)
