"""Sparse multivariate polynomial core.

Polynomials are stored as maps from canonical monomials to float64
coefficients.  Values are immutable once constructed and every operation
is a pure function, so instances may be shared freely across threads.

The global monomial order is graded lexicographic (ascending total degree,
ties broken by descending exponent vector with ``x1`` heaviest).  Bases,
Gram indexing and all text output follow this one order so that repeated
runs are byte-for-byte reproducible.

Text syntax, shared by the renderer and the parser::

    3*x1^2*x2 - 0.5*x2 + 1

Variables are ``x1 .. xn`` (1-based in text, 0-based indices in code),
``^`` or ``**`` raises to a nonnegative integer power, terms are joined
with ``+``/``-``.  Parentheses are not part of the grammar.
"""

from __future__ import annotations

import math
import re
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

# Exponents beyond this indicate a runaway symbolic construction.
MAX_EXPONENT = 64

# Coefficients smaller than this are dropped when explicitly cleaning
# solver output; ordinary arithmetic only drops exact zeros.
CLEANUP_EPS = 1e-14


class PolynomialError(ValueError):
    """Dimension mismatch or malformed construction."""


class ParseError(PolynomialError):
    """Syntax error in polynomial text; carries the 1-based column."""

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.column = column


class Monomial:
    """Product of variable powers, e.g. ``x1^2*x3``.

    Stored sparsely as a sorted tuple of ``(variable index, exponent)``
    pairs with all exponents positive (canonical form).
    """

    __slots__ = ("exps",)

    def __init__(self, exponents: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = exponents.items() if isinstance(exponents, Mapping) else exponents
        cleaned = []
        for var, exp in items:
            if exp < 0:
                raise PolynomialError(f"negative exponent {exp} for x{var + 1}")
            if exp > MAX_EXPONENT:
                raise PolynomialError(
                    f"exponent {exp} for x{var + 1} exceeds the cap {MAX_EXPONENT}"
                )
            if var < 0:
                raise PolynomialError(f"negative variable index {var}")
            if exp > 0:
                cleaned.append((int(var), int(exp)))
        cleaned.sort()
        object.__setattr__(self, "exps", tuple(cleaned))

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("Monomial is immutable")

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.exps)

    def exponent(self, var: int) -> int:
        for v, e in self.exps:
            if v == var:
                return e
        return 0

    def max_var(self) -> int:
        """Largest variable index used, or -1 for the constant monomial."""
        return self.exps[-1][0] if self.exps else -1

    def dense(self, n_vars: int) -> tuple[int, ...]:
        out = [0] * n_vars
        for v, e in self.exps:
            out[v] = e
        return tuple(out)

    def mul(self, other: "Monomial") -> "Monomial":
        merged = dict(self.exps)
        for v, e in other.exps:
            merged[v] = merged.get(v, 0) + e
        return Monomial(merged)

    def diff(self, var: int) -> tuple[int, "Monomial"]:
        """Return ``(factor, monomial)`` with d/dx_var x^a = factor * x^b."""
        e = self.exponent(var)
        if e == 0:
            return 0, Monomial()
        merged = dict(self.exps)
        merged[var] = e - 1
        return e, Monomial(merged)

    def eval(self, x: Sequence[float]) -> float:
        out = 1.0
        for v, e in self.exps:
            out *= x[v] ** e
        return out

    def sort_key(self, n_vars: int) -> tuple:
        # graded lex: degree first, then descending exponent vector.
        return (self.degree, tuple(-e for e in self.dense(n_vars)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self.exps == other.exps

    def __hash__(self) -> int:
        return hash(self.exps)

    def __repr__(self) -> str:
        if not self.exps:
            return "1"
        return "*".join(
            f"x{v + 1}" if e == 1 else f"x{v + 1}^{e}" for v, e in self.exps
        )


ONE = Monomial()


def monomial_basis(n_vars: int, max_degree: int) -> list[Monomial]:
    """All monomials of total degree <= max_degree in graded-lex order.

    Length is C(n_vars + max_degree, max_degree).
    """
    if n_vars < 1:
        raise PolynomialError("n_vars must be >= 1")
    if max_degree < 0:
        raise PolynomialError("max_degree must be >= 0")

    basis: list[Monomial] = []

    def fill(var: int, remaining: int, acc: list[tuple[int, int]]):
        if var == n_vars - 1:
            basis.append(Monomial(acc + [(var, remaining)]))
            return
        for e in range(remaining, -1, -1):
            fill(var + 1, remaining - e, acc + [(var, e)])

    for deg in range(max_degree + 1):
        fill(0, deg, [])
    return basis


def _format_coeff(c: float) -> str:
    if c == int(c) and abs(c) < 1e15:
        return str(int(c))
    return repr(c)


class Polynomial:
    """Sparse polynomial over ``n_vars`` real variables, float64 coefficients.

    Canonical form: no stored zero coefficients, no duplicate monomials.
    Evaluation is linear in the coefficients.
    """

    __slots__ = ("n_vars", "terms")

    def __init__(self, n_vars: int, terms: Mapping[Monomial, float] | None = None):
        if n_vars < 1:
            raise PolynomialError("n_vars must be >= 1")
        clean: dict[Monomial, float] = {}
        if terms:
            for mono, coeff in terms.items():
                c = float(coeff)
                if c != 0.0:
                    if mono.max_var() >= n_vars:
                        raise PolynomialError(
                            f"monomial {mono!r} uses x{mono.max_var() + 1} "
                            f"but n_vars={n_vars}"
                        )
                    clean[mono] = clean.get(mono, 0.0) + c
        clean = {m: c for m, c in clean.items() if c != 0.0}
        object.__setattr__(self, "n_vars", n_vars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n_vars: int) -> "Polynomial":
        return cls(n_vars)

    @classmethod
    def constant(cls, n_vars: int, value: float) -> "Polynomial":
        return cls(n_vars, {ONE: value})

    @classmethod
    def variable(cls, n_vars: int, var: int) -> "Polynomial":
        if not 0 <= var < n_vars:
            raise PolynomialError(f"variable index {var} out of range")
        return cls(n_vars, {Monomial({var: 1}): 1.0})

    @classmethod
    def from_coeffs(
        cls, n_vars: int, basis: Sequence[Monomial], coeffs: Sequence[float]
    ) -> "Polynomial":
        if len(basis) != len(coeffs):
            raise PolynomialError("basis/coefficient length mismatch")
        return cls(n_vars, dict(zip(basis, coeffs)))

    # -- ring operations ---------------------------------------------------

    def _check_same_vars(self, other: "Polynomial"):
        if self.n_vars != other.n_vars:
            raise PolynomialError(
                f"dimension mismatch: {self.n_vars} vs {other.n_vars} variables"
            )

    def __add__(self, other) -> "Polynomial":
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.n_vars, other)
        self._check_same_vars(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0.0) + c
        return Polynomial(self.n_vars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n_vars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.n_vars, other)
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, float)):
            return Polynomial(
                self.n_vars, {m: c * other for m, c in self.terms.items()}
            )
        self._check_same_vars(other)
        out: dict[Monomial, float] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1.mul(m2)
                out[m] = out.get(m, 0.0) + c1 * c2
        return Polynomial(self.n_vars, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise PolynomialError("exponent must be a nonnegative integer")
        out = Polynomial.constant(self.n_vars, 1.0)
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.n_vars == other.n_vars
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.n_vars, frozenset(self.terms.items())))

    # -- calculus and evaluation -------------------------------------------

    def partial(self, var: int) -> "Polynomial":
        """Formal partial derivative with respect to ``x_{var+1}``."""
        if not 0 <= var < self.n_vars:
            raise PolynomialError(f"variable index {var} out of range")
        out: dict[Monomial, float] = {}
        for m, c in self.terms.items():
            factor, dm = m.diff(var)
            if factor:
                out[dm] = out.get(dm, 0.0) + factor * c
        return Polynomial(self.n_vars, out)

    def eval(self, x: Sequence[float]) -> float:
        if len(x) != self.n_vars:
            raise PolynomialError(
                f"point has {len(x)} coordinates, expected {self.n_vars}"
            )
        return float(sum(c * m.eval(x) for m, c in self.terms.items()))

    def __call__(self, x: Sequence[float]) -> float:
        return self.eval(x)

    def eval_many(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an ``(N, n_vars)`` array of points; returns ``(N,)``."""
        return PolyEvaluator([self])(points)[:, 0]

    @property
    def degree(self) -> int:
        """Total degree; zero polynomial has degree 0."""
        return max((m.degree for m in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, mono: Monomial) -> float:
        return self.terms.get(mono, 0.0)

    def cleaned(self, eps: float = CLEANUP_EPS) -> "Polynomial":
        """Drop coefficients with magnitude below ``eps``."""
        return Polynomial(
            self.n_vars, {m: c for m, c in self.terms.items() if abs(c) >= eps}
        )

    def sorted_terms(self) -> list[tuple[Monomial, float]]:
        return sorted(self.terms.items(), key=lambda mc: mc[0].sort_key(self.n_vars))

    # -- text --------------------------------------------------------------

    def render(self) -> str:
        """Canonical text form, highest-degree terms first.

        Round-trips exactly through :func:`parse_polynomial`.
        """
        if not self.terms:
            return "0"
        ordered = sorted(
            self.terms.items(),
            key=lambda mc: (-mc[0].degree,) + tuple(-e for e in mc[0].dense(self.n_vars)),
        )
        parts = []
        for mono, coeff in ordered:
            sign = "-" if coeff < 0 else "+"
            mag = abs(coeff)
            if mono is ONE or not mono.exps:
                body = _format_coeff(mag)
            elif mag == 1.0:
                body = repr(mono)
            else:
                body = f"{_format_coeff(mag)}*{mono!r}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Polynomial({self.n_vars}, {self.render()!r})"


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<var>x\d+)"
    r"|(?P<pow>\*\*|\^)"
    r"|(?P<mul>\*)"
    r"|(?P<sign>[+-])"
    r")"
)


def parse_polynomial(text: str, n_vars: int) -> Polynomial:
    """Parse the textual syntax produced by :meth:`Polynomial.render`.

    Raises :class:`ParseError` with a 1-based column on bad input.
    """
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", pos + 1)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()

    if not tokens:
        raise ParseError("empty polynomial", 1)

    terms: dict[Monomial, float] = {}
    i = 0

    def parse_term(start: int) -> int:
        nonlocal terms
        i = start
        sign = 1.0
        while i < len(tokens) and tokens[i][0] == "sign":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        coeff = 1.0
        exps: dict[int, int] = {}
        saw_factor = False
        while True:
            if i >= len(tokens):
                break
            kind, value, col = tokens[i]
            if kind == "num":
                coeff *= float(value)
                i += 1
            elif kind == "var":
                var = int(value[1:]) - 1
                if not 0 <= var < n_vars:
                    raise ParseError(
                        f"variable {value} out of range for n_vars={n_vars}", col
                    )
                exp = 1
                if i + 1 < len(tokens) and tokens[i + 1][0] == "pow":
                    if i + 2 >= len(tokens) or tokens[i + 2][0] != "num":
                        raise ParseError("expected integer exponent", tokens[i + 1][2])
                    exp_text = tokens[i + 2][1]
                    exp_val = float(exp_text)
                    if exp_val != int(exp_val) or exp_val < 0:
                        raise ParseError(
                            f"exponent must be a nonnegative integer, got {exp_text}",
                            tokens[i + 2][2],
                        )
                    exp = int(exp_val)
                    i += 3
                else:
                    i += 1
                exps[var] = exps.get(var, 0) + exp
            else:
                raise ParseError(f"unexpected token {value!r}", col)
            saw_factor = True
            if i < len(tokens) and tokens[i][0] == "mul":
                i += 1
                if i >= len(tokens) or tokens[i][0] not in ("num", "var"):
                    col = tokens[i - 1][2]
                    raise ParseError("dangling '*'", col)
                continue
            break
        if not saw_factor:
            col = tokens[i][2] if i < len(tokens) else len(text)
            raise ParseError("expected a term", col)
        mono = Monomial(exps)
        terms[mono] = terms.get(mono, 0.0) + sign * coeff
        return i

    i = parse_term(0)
    while i < len(tokens):
        if tokens[i][0] != "sign":
            raise ParseError(f"expected '+' or '-', got {tokens[i][1]!r}", tokens[i][2])
        i = parse_term(i)

    return Polynomial(n_vars, terms)


class PolyEvaluator:
    """Vectorized evaluator for a fixed list of polynomials.

    Precomputes exponent tables once; calls evaluate all polynomials at an
    ``(N, n_vars)`` point array in a handful of numpy operations.  Used by
    the simulation and sampling hot loops.
    """

    def __init__(self, polys: Sequence[Polynomial]):
        if not polys:
            raise PolynomialError("need at least one polynomial")
        self.n_vars = polys[0].n_vars
        for p in polys:
            if p.n_vars != self.n_vars:
                raise PolynomialError("mixed n_vars in evaluator")
        self.n_polys = len(polys)
        coeffs: list[float] = []
        exps: list[tuple[int, ...]] = []
        self._slices: list[tuple[int, int]] = []
        for p in polys:
            start = len(coeffs)
            for m, c in p.sorted_terms():
                coeffs.append(c)
                exps.append(m.dense(self.n_vars))
            self._slices.append((start, len(coeffs)))
        self._coeffs = np.asarray(coeffs, dtype=float)
        self._exps = (
            np.asarray(exps, dtype=np.int64)
            if exps
            else np.zeros((0, self.n_vars), dtype=np.int64)
        )
        self._max_exp = int(self._exps.max()) if exps else 0

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.shape[1] != self.n_vars:
            raise PolynomialError(
                f"points have {pts.shape[1]} coordinates, expected {self.n_vars}"
            )
        n = pts.shape[0]
        if self._exps.shape[0] == 0:
            return np.zeros((n, self.n_polys))
        # pows[v][:, e] = x_v ** e, built by cumulative multiplication
        pows = np.ones((self.n_vars, n, self._max_exp + 1))
        for v in range(self.n_vars):
            col = pts[:, v]
            for e in range(1, self._max_exp + 1):
                pows[v, :, e] = pows[v, :, e - 1] * col
        term_vals = np.ones((n, self._exps.shape[0]))
        for v in range(self.n_vars):
            term_vals *= pows[v][:, self._exps[:, v]]
        out = np.empty((n, self.n_polys))
        for k, (lo, hi) in enumerate(self._slices):
            if lo == hi:
                out[:, k] = 0.0
            else:
                out[:, k] = term_vals[:, lo:hi] @ self._coeffs[lo:hi]
        return out


def binom(n: int, k: int) -> int:
    return math.comb(n, k)
