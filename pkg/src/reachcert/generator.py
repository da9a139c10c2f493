"""Infinitesimal generator of a polynomial Ito diffusion.

For ``dX = b(X) dt + sigma(X) dW`` the generator of a twice-differentiable
function f is

    A f = sum_i b_i df/dx_i + 1/2 sum_ij (sigma sigma^T)_ij d2f/dx_i dx_j.

This module always returns the interior expression above.  The stopped
process used elsewhere in the toolkit has generator zero outside the open
region between the safe boundary and the target; that convention is
realized by *where* constraints are imposed on A f, never by modifying
the operator itself.

Pure functions over immutable inputs; thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .poly import Polynomial, PolynomialError


@dataclass(frozen=True)
class SdeSystem:
    """Drift vector and diffusion matrix of a polynomial SDE.

    ``drift`` has one polynomial per state variable; ``diffusion`` is an
    ``n x m`` matrix of polynomials with ``m`` the Wiener dimension.
    ``m = 0`` encodes a deterministic ODE: the diffusion rows are empty
    and the second-order generator term vanishes.
    """

    n_vars: int
    drift: tuple[Polynomial, ...]
    diffusion: tuple[tuple[Polynomial, ...], ...]

    def __post_init__(self):
        if len(self.drift) != self.n_vars:
            raise PolynomialError(
                f"drift has {len(self.drift)} components, expected {self.n_vars}"
            )
        if len(self.diffusion) != self.n_vars:
            raise PolynomialError(
                f"diffusion has {len(self.diffusion)} rows, expected {self.n_vars}"
            )
        widths = {len(row) for row in self.diffusion}
        if len(widths) > 1:
            raise PolynomialError("ragged diffusion matrix")
        for p in self.drift:
            if p.n_vars != self.n_vars:
                raise PolynomialError("drift component has wrong n_vars")
        for row in self.diffusion:
            for p in row:
                if p.n_vars != self.n_vars:
                    raise PolynomialError("diffusion entry has wrong n_vars")
        # sigma sigma^T is reused for every monomial of every decision
        # polynomial, so it is formed symbolically once and cached here.
        a = tuple(
            tuple(
                sum(
                    (self.diffusion[i][k] * self.diffusion[j][k]
                     for k in range(self.m)),
                    Polynomial.zero(self.n_vars),
                )
                for j in range(self.n_vars)
            )
            for i in range(self.n_vars)
        )
        object.__setattr__(self, "_sigma_sigma_t", a)

    @classmethod
    def create(
        cls,
        drift: Sequence[Polynomial],
        diffusion: Sequence[Sequence[Polynomial]],
    ) -> "SdeSystem":
        if not drift:
            raise PolynomialError("empty drift")
        n = drift[0].n_vars
        return cls(n, tuple(drift), tuple(tuple(row) for row in diffusion))

    @property
    def m(self) -> int:
        """Wiener dimension (number of diffusion columns)."""
        return len(self.diffusion[0]) if self.diffusion and self.diffusion[0] else 0

    @property
    def is_deterministic(self) -> bool:
        return self.m == 0 or all(p.is_zero() for row in self.diffusion for p in row)

    def sigma_sigma_t(self) -> tuple[tuple[Polynomial, ...], ...]:
        return self._sigma_sigma_t  # type: ignore[attr-defined]

    def drift_degree(self) -> int:
        return max((p.degree for p in self.drift if not p.is_zero()), default=0)

    def diffusion_degree(self) -> int:
        return max(
            (p.degree for row in self.diffusion for p in row if not p.is_zero()),
            default=0,
        )


def apply_generator(sde: SdeSystem, f: Polynomial) -> Polynomial:
    """Exact symbolic generator A f.

    With ``m = 0`` the result reduces to the Lie derivative grad(f) . b,
    which is the deterministic (ODE) special case.
    """
    if f.n_vars != sde.n_vars:
        raise PolynomialError(
            f"f has {f.n_vars} variables, system has {sde.n_vars}"
        )
    n = sde.n_vars
    out = Polynomial.zero(n)
    grads = [f.partial(i) for i in range(n)]
    for i in range(n):
        if not sde.drift[i].is_zero() and not grads[i].is_zero():
            out = out + sde.drift[i] * grads[i]
    if sde.m > 0:
        a = sde.sigma_sigma_t()
        for i in range(n):
            for j in range(n):
                if a[i][j].is_zero():
                    continue
                second = grads[i].partial(j)
                if not second.is_zero():
                    out = out + 0.5 * a[i][j] * second
    return out


def generator_degree_bound(sde: SdeSystem, deg_f: int) -> int:
    """Upper bound on deg(A f) for any f of total degree ``deg_f``.

    max(deg_f - 1 + deg(b), deg_f - 2 + 2*deg(sigma)), clipped at 0; terms
    whose derivative order exceeds deg_f (or whose coefficient is
    identically zero) do not contribute.
    """
    if deg_f < 0:
        raise PolynomialError("deg_f must be >= 0")
    candidates = [0]
    has_drift = any(not p.is_zero() for p in sde.drift)
    if has_drift and deg_f >= 1:
        candidates.append(deg_f - 1 + sde.drift_degree())
    has_noise = sde.m > 0 and any(
        not p.is_zero() for row in sde.diffusion for p in row
    )
    if has_noise and deg_f >= 2:
        candidates.append(deg_f - 2 + 2 * sde.diffusion_degree())
    return max(candidates)
