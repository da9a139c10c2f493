"""Solved certificate container and its JSON round trip.

A certificate carries the solved decision polynomials, the sum-of-squares
multipliers, the Gram matrix of every sum-of-squares expression (keyed by
constraint or multiplier name), and solver bookkeeping.  Reported
membership is the strict super-level set {v > level + margin}: the small
margin absorbs floating-point slack in the solved inequalities.

JSON serialization uses the canonical polynomial text form and shortest
round-trip float repr, so a written certificate re-reads bit-exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .poly import Monomial, Polynomial, parse_polynomial

MODE_REACH_AVOID = "reach_avoid"
MODE_SAFETY = "safety"

DEFAULT_MARGIN = 1e-6


def monomial_from_string(text: str, n_vars: int) -> Monomial:
    poly = parse_polynomial(text, n_vars)
    if len(poly.terms) != 1:
        raise ValueError(f"not a single monomial: {text!r}")
    ((mono, coeff),) = poly.terms.items()
    if coeff != 1.0:
        raise ValueError(f"monomial has a coefficient: {text!r}")
    return mono


@dataclass
class Certificate:
    """Solved (v, u, multipliers) tuple with Gram matrices."""

    mode: str
    n_vars: int
    v: Polynomial
    u: Polynomial
    multipliers: dict[str, Polynomial]
    p_threshold: float
    objective: float
    grams: dict[str, np.ndarray] = field(default_factory=dict)
    gram_bases: dict[str, list[Monomial]] = field(default_factory=dict)
    margin: float = DEFAULT_MARGIN
    degrees: dict[str, int] = field(default_factory=dict)
    solver_stats: dict = field(default_factory=dict)
    problem_echo: dict = field(default_factory=dict)

    def membership_level(self, level: float | None = None) -> float:
        return self.p_threshold if level is None else float(level)

    def to_json_dict(self) -> dict:
        return {
            "format": "reachcert-certificate/1",
            "mode": self.mode,
            "n_vars": self.n_vars,
            "p_threshold": self.p_threshold,
            "margin": self.margin,
            "objective": self.objective,
            "degrees": dict(self.degrees),
            "v": self.v.render(),
            "u": self.u.render(),
            "multipliers": {k: p.render() for k, p in self.multipliers.items()},
            "grams": {k: g.tolist() for k, g in self.grams.items()},
            "gram_bases": {
                k: [repr(m) for m in basis] for k, basis in self.gram_bases.items()
            },
            "solver_stats": _plain(self.solver_stats),
            "problem": _plain(self.problem_echo),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Certificate":
        n = int(data["n_vars"])
        grams = {k: np.asarray(g, dtype=float) for k, g in data.get("grams", {}).items()}
        bases = {
            k: [monomial_from_string(s, n) for s in lst]
            for k, lst in data.get("gram_bases", {}).items()
        }
        return cls(
            mode=data["mode"],
            n_vars=n,
            v=parse_polynomial(data["v"], n),
            u=parse_polynomial(data["u"], n),
            multipliers={
                k: parse_polynomial(s, n)
                for k, s in data.get("multipliers", {}).items()
            },
            p_threshold=float(data["p_threshold"]),
            objective=float(data.get("objective", 0.0)),
            grams=grams,
            gram_bases=bases,
            margin=float(data.get("margin", DEFAULT_MARGIN)),
            degrees={k: int(v) for k, v in data.get("degrees", {}).items()},
            solver_stats=dict(data.get("solver_stats", {})),
            problem_echo=dict(data.get("problem", {})),
        )

    def save(self, path: str):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "Certificate":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def zero_certificate(
    n_vars: int, p_threshold: float = 0.0, mode: str = MODE_REACH_AVOID
) -> Certificate:
    """The always-feasible trivial certificate v = u = 0."""
    zero = Polynomial.zero(n_vars)
    names = ["s0", "s1", "s2", "s3", "s4", "p_free"]
    if mode == MODE_SAFETY:
        names = ["s0", "s1", "s2", "s3", "s4"]
    return Certificate(
        mode=mode,
        n_vars=n_vars,
        v=zero,
        u=zero,
        multipliers={name: zero for name in names},
        p_threshold=p_threshold,
        objective=0.0,
    )


def _plain(value):
    """Recursively convert numpy scalars/arrays for JSON."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value
