"""Lebesgue moments of monomials over balls and boxes.

These supply the objective vector of the certificate program: with v(x)
written over a monomial basis with coefficient vector c, the integral of
v over the domain is c . w where w_k is the moment of the k-th basis
monomial.  A feasible-but-arbitrary objective only selects among sound
certificates, so exact moments are provided for the two domain shapes
used in practice (balls and axis-aligned boxes); anything else should be
wrapped in a bounding box by the caller.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import rng
from .poly import Monomial, PolynomialError


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def n_vars(self) -> int:
        return len(self.center)

    def bounding_box(self) -> "Box":
        c = np.asarray(self.center)
        return Box(tuple(c - self.radius), tuple(c + self.radius))

    def inflated(self, factor: float) -> "Ball":
        return Ball(self.center, self.radius * factor)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d2 = np.sum((pts - np.asarray(self.center)) ** 2, axis=1)
        return d2 <= self.radius**2


@dataclass(frozen=True)
class Box:
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if len(self.lo) != len(self.hi):
            raise ValueError("lo/hi length mismatch")
        if not all(l < h for l, h in zip(self.lo, self.hi)):
            raise ValueError("need lo < hi componentwise")

    @property
    def n_vars(self) -> int:
        return len(self.lo)

    def bounding_box(self) -> "Box":
        return self

    def inflated(self, factor: float) -> "Box":
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        mid = (lo + hi) / 2
        half = (hi - lo) / 2 * factor
        return Box(tuple(mid - half), tuple(mid + half))

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all(
            (pts >= np.asarray(self.lo)) & (pts <= np.asarray(self.hi)), axis=1
        )


IntegrationDomain = Union[Ball, Box]


def domain_center(dom: IntegrationDomain) -> np.ndarray:
    if isinstance(dom, Ball):
        return np.asarray(dom.center, dtype=float)
    return (np.asarray(dom.lo) + np.asarray(dom.hi)) / 2.0


def _unit_ball_moment(alpha: Sequence[int]) -> float:
    """Moment of x^alpha over the centered unit ball in len(alpha) dims.

    Zero when any exponent is odd; otherwise
    prod Gamma((a_i+1)/2) / Gamma((n+|a|)/2 + 1), evaluated in log space
    so degree-20 moments in several variables do not overflow.
    """
    if any(a % 2 for a in alpha):
        return 0.0
    n = len(alpha)
    total = sum(alpha)
    log_num = sum(math.lgamma((a + 1) / 2) for a in alpha)
    log_den = math.lgamma((n + total) / 2 + 1)
    return math.exp(log_num - log_den)


def monomial_moment(dom: IntegrationDomain, alpha: Monomial) -> float:
    """Exact integral of the monomial over the domain.

    Boxes use the product formula; balls use the centered formula after a
    binomial expansion of the affine change of variables
    x = center + radius * u, which contributes radius^(n + |beta|) per term.
    """
    n = dom.n_vars
    if alpha.max_var() >= n:
        raise PolynomialError(
            f"monomial {alpha!r} does not fit a {n}-dimensional domain"
        )
    exps = alpha.dense(n)
    if isinstance(dom, Box):
        out = 1.0
        for a, lo, hi in zip(exps, dom.lo, dom.hi):
            out *= (hi ** (a + 1) - lo ** (a + 1)) / (a + 1)
        return out

    center = dom.center
    r = dom.radius
    if all(c == 0.0 for c in center):
        return r ** (n + sum(exps)) * _unit_ball_moment(exps)

    # sum over componentwise beta <= alpha of
    #   prod binom(a_i, b_i) c_i^(a_i - b_i) * r^(n+|beta|) * M0(beta)
    def expand(i: int, coeff: float, beta: list[int]) -> float:
        if i == n:
            return coeff * r ** (n + sum(beta)) * _unit_ball_moment(beta)
        total = 0.0
        a = exps[i]
        c = center[i]
        for b in range(a + 1):
            factor = math.comb(a, b) * c ** (a - b)
            if factor == 0.0:
                continue
            total += expand(i + 1, coeff * factor, beta + [b])
        return total

    return expand(0, 1.0, [])


def objective_vector(
    dom: IntegrationDomain, basis: Sequence[Monomial]
) -> np.ndarray:
    """Per-monomial moments; c . result integrates the polynomial with
    coefficient vector c over the domain."""
    return np.array([monomial_moment(dom, m) for m in basis], dtype=float)


def sample_uniform(
    dom: IntegrationDomain, n: int, seed: int, lane: int = 0, offset: int = 0
) -> np.ndarray:
    """Uniform points in the domain, deterministic in (seed, lane, offset).

    Point ``i`` consumes a fixed counter window, so disjoint offset ranges
    partition the stream and chunked draws match a single large draw.
    """
    d = dom.n_vars
    idx = np.arange(offset, offset + n)
    if isinstance(dom, Box):
        u = rng.uniforms(
            seed, lane, (idx[:, None] * d + np.arange(d)[None, :])
        )
        lo = np.asarray(dom.lo)
        hi = np.asarray(dom.hi)
        return lo + u * (hi - lo)
    width = d + 1
    z = rng.normals(
        seed, lane, (idx[:, None] * width + np.arange(d)[None, :])
    )
    norms = np.linalg.norm(z, axis=1)
    norms[norms == 0.0] = 1.0
    u = rng.uniforms(seed, lane, idx * width + d)
    radii = dom.radius * u ** (1.0 / d)
    return np.asarray(dom.center) + z / norms[:, None] * radii[:, None]
