"""Sum-of-squares certificate programs and their SDP compilation.

Reach-avoid mode searches for polynomials v, u and multipliers such that

    A v + s0*h0 + s1*(1 - g)                 is SOS      (s0, s1 SOS)
    -v + A u + s2*h0 + s3*(1 - g)            is SOS      (s2, s3 SOS)
    -v + p_free*h0                           is SOS      (p_free unconstrained)
    1 - v + s4*(g - 1)                       is SOS      (s4 SOS)

maximizing the integral of v over the objective domain.  Here the safe
set is {h0 < 0} and the target {g <= 1}; on the region between them both
h0 and 1-g are negative, so the SOS multipliers relax each inequality to
exactly where it is required.  The solved strict super-level set
{v > p} is then a certified inner approximation of the set of states
reaching the target safely with probability above p.

Safety mode bounds the same probability from above over an initial set
INI = {ini <= 0}: minimize the scalar p subject to

    p - v + s0*ini                           is SOS
    v - 1 + s1*(g - 1)                       is SOS
    v - A u + s2*h0 + s3*(1 - g)             is SOS
    -A v + s4*h0                             is SOS

Compilation uses the Gram encoding (q is SOS iff q = z^T Q z with Q PSD
over the monomial basis z), one PSD block per SOS expression, one linear
equality per monomial in graded-lex order.  Every SOS expression's degree
is rounded up to the next even integer by the Gram basis choice.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .certificate import MODE_REACH_AVOID, MODE_SAFETY, Certificate
from .generator import SdeSystem, apply_generator, generator_degree_bound
from .moments import IntegrationDomain, objective_vector, sample_uniform
from .poly import Monomial, Polynomial, monomial_basis
from .sdp import SdpBuilder, SdpProblem, SdpSolution, SolveStatus

logger = logging.getLogger("reachcert.sosprog")


class SosError(ValueError):
    pass


class SosDegreeError(SosError):
    """Degree configuration cannot express a constraint."""


class SolverFailure(RuntimeError):
    """Raised when certificate extraction is attempted on a failed solve."""

    def __init__(self, status: SolveStatus, detail: str = ""):
        super().__init__(f"solver status {status.value}" + (f": {detail}" if detail else ""))
        self.status = status


@dataclass(frozen=True)
class DegreeConfig:
    """Polynomial degrees: v, u, the SOS multipliers, and the free
    boundary multiplier.  All are required to be even and at least 2."""

    d_v: int
    d_u: int
    d_s: int
    d_p: int

    def __post_init__(self):
        for name in ("d_v", "d_u", "d_s", "d_p"):
            value = getattr(self, name)
            if value < 2:
                raise SosError(f"{name} must be >= 2, got {value}")
            if value % 2:
                raise SosError(f"{name} must be even, got {value}")

    @classmethod
    def padded(cls, d_v: int, d_u: int | None = None, d_s: int | None = None,
               d_p: int | None = None) -> "DegreeConfig":
        """Round odd values up to even; missing values default to d_v."""

        def pad(value: int) -> int:
            return max(2, value + (value % 2))

        d_u = d_v if d_u is None else d_u
        d_s = d_v if d_s is None else d_s
        d_p = d_v if d_p is None else d_p
        return cls(pad(d_v), pad(d_u), pad(d_s), pad(d_p))

    def as_dict(self) -> dict[str, int]:
        return {"v": self.d_v, "u": self.d_u, "s": self.d_s, "p": self.d_p}


@dataclass(frozen=True)
class ReachAvoidProblem:
    """System plus set data: safe set {h0 < 0}, target {g <= 1},
    probability threshold, and the domain the objective integrates over
    (which must contain the closed safe set)."""

    sde: SdeSystem
    h0: Polynomial
    g: Polynomial
    p_threshold: float
    objective_domain: IntegrationDomain

    def __post_init__(self):
        n = self.sde.n_vars
        if self.h0.n_vars != n or self.g.n_vars != n:
            raise SosError("set polynomials and system disagree on n_vars")
        if self.objective_domain.n_vars != n:
            raise SosError("objective domain has wrong dimension")
        if not 0.0 <= self.p_threshold < 1.0:
            raise SosError("p_threshold must lie in [0, 1)")

    @property
    def n_vars(self) -> int:
        return self.sde.n_vars

    def geometry_warnings(self, seed: int = 0, n_samples: int = 4096) -> list[str]:
        """Sampled sanity checks: target inside the safe set, safe set
        inside the objective domain.  Returns human-readable warnings."""
        warnings = []
        pts = sample_uniform(
            self.objective_domain.inflated(1.5), n_samples, seed, lane=901
        )
        h0_vals = self.h0.eval_many(pts)
        g_vals = self.g.eval_many(pts)
        bad_target = np.any((g_vals <= 1.0) & (h0_vals >= 0.0))
        if bad_target:
            warnings.append(
                "sampled a target point outside the open safe set "
                "(need {g <= 1} inside {h0 < 0})"
            )
        inside_dom = self.objective_domain.contains(pts)
        escaped = np.any((h0_vals <= 0.0) & ~inside_dom)
        if escaped:
            warnings.append(
                "sampled a safe-set point outside the objective domain "
                "(the domain must contain the closed safe set)"
            )
        return warnings


class _AffinePoly:
    """Polynomial whose coefficients are affine in the decision vector:
    each monomial maps to (constant, {decision index: weight})."""

    __slots__ = ("n_vars", "terms")

    def __init__(self, n_vars: int, terms: dict | None = None):
        self.n_vars = n_vars
        self.terms: dict[Monomial, tuple[float, dict[int, float]]] = terms or {}

    @classmethod
    def from_numeric(cls, poly: Polynomial) -> "_AffinePoly":
        return cls(
            poly.n_vars, {m: (c, {}) for m, c in poly.terms.items()}
        )

    @classmethod
    def from_decision(
        cls, n_vars: int, basis: Sequence[Monomial], offset: int
    ) -> "_AffinePoly":
        return cls(
            n_vars, {m: (0.0, {offset + k: 1.0}) for k, m in enumerate(basis)}
        )

    def _accumulate(self, mono: Monomial, const: float, lin: Mapping[int, float],
                    scale: float = 1.0):
        cur_c, cur_l = self.terms.get(mono, (0.0, {}))
        cur_l = dict(cur_l)
        for idx, w in lin.items():
            cur_l[idx] = cur_l.get(idx, 0.0) + w * scale
        self.terms[mono] = (cur_c + const * scale, cur_l)

    def plus(self, other: "_AffinePoly", scale: float = 1.0) -> "_AffinePoly":
        out = _AffinePoly(self.n_vars, {m: (c, dict(l)) for m, (c, l) in self.terms.items()})
        for m, (c, l) in other.terms.items():
            out._accumulate(m, c, l, scale)
        return out

    def times_poly(self, poly: Polynomial) -> "_AffinePoly":
        out = _AffinePoly(self.n_vars)
        for m, (c, l) in self.terms.items():
            for mw, cw in poly.terms.items():
                out._accumulate(m.mul(mw), c, l, cw)
        return out

    def mapped_monomials(self, fn) -> "_AffinePoly":
        """Push each monomial through a linear map fn: Monomial -> Polynomial."""
        out = _AffinePoly(self.n_vars)
        for m, (c, l) in self.terms.items():
            image = fn(m)
            for mi, ci in image.terms.items():
                out._accumulate(mi, c, l, ci)
        return out

    def max_degree(self) -> int:
        return max((m.degree for m in self.terms), default=0)

    def evaluate(self, coeffs: np.ndarray) -> Polynomial:
        terms = {}
        for m, (c, l) in self.terms.items():
            value = c + sum(coeffs[i] * w for i, w in l.items())
            if value != 0.0:
                terms[m] = value
        return Polynomial(self.n_vars, terms)


@dataclass
class SosConstraint:
    """One SOS membership: affine part plus SOS-multiplier terms.

    ``multipliers`` lists (name, gram basis, weight polynomial); the
    constraint's own slack Gram certifies the total expression."""

    name: str
    region: str
    affine: _AffinePoly
    multipliers: list[tuple[str, list[Monomial], Polynomial]]
    slack_basis: list[Monomial]


@dataclass
class SosProgram:
    mode: str
    problem: ReachAvoidProblem
    degrees: DegreeConfig
    free_layout: dict[str, tuple[int, list[Monomial] | None]]
    n_free: int
    constraints: list[SosConstraint]
    objective: np.ndarray  # over the free vector, to maximize
    ini: Polynomial | None = None

    @property
    def n_vars(self) -> int:
        return self.problem.n_vars

    def decision_coeffs(self, name: str, free: np.ndarray) -> Polynomial:
        offset, basis = self.free_layout[name]
        if basis is None:
            return Polynomial.constant(self.n_vars, free[offset])
        return Polynomial.from_coeffs(
            self.n_vars, basis, free[offset : offset + len(basis)]
        )

    def assemble_constraint(
        self, index: int, free: np.ndarray, grams: Mapping[str, np.ndarray]
    ) -> Polynomial:
        """Affine part plus multiplier terms, minus the slack Gram form.

        Identically zero exactly when the coefficient-matching equalities
        of the compiled SDP hold."""
        con = self.constraints[index]
        total = con.affine.evaluate(free)
        for name, basis, weight in con.multipliers:
            total = total + gram_polynomial(self.n_vars, grams[name], basis) * weight
        total = total - gram_polynomial(
            self.n_vars, grams[con.name], con.slack_basis
        )
        return total


def gram_polynomial(
    n_vars: int, gram: np.ndarray, basis: Sequence[Monomial]
) -> Polynomial:
    """z^T Q z as a polynomial."""
    terms: dict[Monomial, float] = {}
    size = len(basis)
    for i in range(size):
        for j in range(i, size):
            w = gram[i, j] if i == j else gram[i, j] + gram[j, i]
            if w == 0.0:
                continue
            mono = basis[i].mul(basis[j])
            terms[mono] = terms.get(mono, 0.0) + w
    return Polynomial(n_vars, terms)


def _even_ceil(value: int) -> int:
    return value + (value % 2)


def _slack_basis(n_vars: int, degree_bound: int) -> list[Monomial]:
    return monomial_basis(n_vars, _even_ceil(degree_bound) // 2)


def build_reach_avoid(prob: ReachAvoidProblem, deg: DegreeConfig) -> SosProgram:
    """The four-constraint certificate program in reach-avoid mode."""
    n = prob.n_vars
    sde = prob.sde
    h0, g = prob.h0, prob.g
    one_minus_g = 1.0 - g

    basis_v = monomial_basis(n, deg.d_v)
    basis_u = monomial_basis(n, deg.d_u)
    basis_p = monomial_basis(n, deg.d_p)
    basis_s = monomial_basis(n, deg.d_s // 2)

    layout = {
        "v": (0, basis_v),
        "u": (len(basis_v), basis_u),
        "p_free": (len(basis_v) + len(basis_u), basis_p),
    }
    n_free = len(basis_v) + len(basis_u) + len(basis_p)

    lp_v = _AffinePoly.from_decision(n, basis_v, layout["v"][0])
    lp_u = _AffinePoly.from_decision(n, basis_u, layout["u"][0])
    lp_p = _AffinePoly.from_decision(n, basis_p, layout["p_free"][0])
    gen = lambda m: apply_generator(sde, Polynomial(n, {m: 1.0}))
    lp_av = lp_v.mapped_monomials(gen)
    lp_au = lp_u.mapped_monomials(gen)

    deg_av = generator_degree_bound(sde, deg.d_v)
    deg_au = generator_degree_bound(sde, deg.d_u)
    deg_h0 = h0.degree
    deg_g = g.degree

    mult_reach = deg.d_s + max(deg_h0, deg_g)
    _require_degree(
        "generator_nonneg", deg_av, mult_reach,
        "A v out-degrees every multiplier term; raise d_s",
    )
    _require_degree(
        "value_bound", max(deg.d_v, deg_au), mult_reach,
        "v or A u out-degrees every multiplier term; raise d_s",
    )
    _require_degree(
        "target_cap", deg.d_v, deg.d_s + deg_g,
        "v out-degrees the target multiplier term; raise d_s",
    )

    constraints = [
        SosConstraint(
            name="generator_nonneg",
            region="safe_minus_target",
            affine=lp_av,
            multipliers=[("s0", basis_s, h0), ("s1", basis_s, one_minus_g)],
            slack_basis=_slack_basis(
                n, max(deg_av, deg.d_s + deg_h0, deg.d_s + deg_g)
            ),
        ),
        SosConstraint(
            name="value_bound",
            region="safe_minus_target",
            affine=lp_au.plus(lp_v, -1.0),  # -v + A u
            multipliers=[("s2", basis_s, h0), ("s3", basis_s, one_minus_g)],
            slack_basis=_slack_basis(
                n, max(deg.d_v, deg_au, deg.d_s + deg_h0, deg.d_s + deg_g)
            ),
        ),
        SosConstraint(
            name="boundary_nonpos",
            region="safe_boundary",
            affine=lp_p.times_poly(h0).plus(lp_v, -1.0),  # -v + p_free*h0
            multipliers=[],
            slack_basis=_slack_basis(n, max(deg.d_v, deg.d_p + deg_h0)),
        ),
        SosConstraint(
            name="target_cap",
            region="target",
            affine=_AffinePoly.from_numeric(
                Polynomial.constant(n, 1.0)
            ).plus(lp_v, -1.0),  # 1 - v
            multipliers=[("s4", basis_s, g - 1.0)],
            slack_basis=_slack_basis(n, max(deg.d_v, deg.d_s + deg_g)),
        ),
    ]

    objective = np.zeros(n_free)
    objective[: len(basis_v)] = objective_vector(prob.objective_domain, basis_v)

    return SosProgram(
        mode=MODE_REACH_AVOID,
        problem=prob,
        degrees=deg,
        free_layout=layout,
        n_free=n_free,
        constraints=constraints,
        objective=objective,
    )


def build_safety(
    prob: ReachAvoidProblem, ini: Polynomial, deg: DegreeConfig
) -> SosProgram:
    """Safety-verification mode: minimize an upper bound p on the safe
    target-hitting probability over the initial set {ini <= 0}."""
    n = prob.n_vars
    if ini.n_vars != n:
        raise SosError("ini polynomial has wrong n_vars")
    sde = prob.sde
    h0, g = prob.h0, prob.g

    ini_inside = _sampled_subset_check(prob, ini, seed=7)
    if not ini_inside:
        logger.warning(
            "sampled an initial-set point outside the open safe set; "
            "the computed bound still holds only on INI within the safe set"
        )

    basis_v = monomial_basis(n, deg.d_v)
    basis_u = monomial_basis(n, deg.d_u)
    basis_s = monomial_basis(n, deg.d_s // 2)

    layout = {
        "v": (0, basis_v),
        "u": (len(basis_v), basis_u),
        "p": (len(basis_v) + len(basis_u), None),
    }
    n_free = len(basis_v) + len(basis_u) + 1

    lp_v = _AffinePoly.from_decision(n, basis_v, layout["v"][0])
    lp_u = _AffinePoly.from_decision(n, basis_u, layout["u"][0])
    lp_p = _AffinePoly(n, {Monomial(): (0.0, {layout["p"][0]: 1.0})})
    gen = lambda m: apply_generator(sde, Polynomial(n, {m: 1.0}))
    lp_av = lp_v.mapped_monomials(gen)
    lp_au = lp_u.mapped_monomials(gen)

    deg_av = generator_degree_bound(sde, deg.d_v)
    deg_au = generator_degree_bound(sde, deg.d_u)
    deg_h0, deg_g, deg_ini = h0.degree, g.degree, ini.degree

    _require_degree(
        "ini_cap", deg.d_v, deg.d_s + deg_ini,
        "v out-degrees the initial-set multiplier term; raise d_s",
    )
    _require_degree(
        "target_floor", deg.d_v, deg.d_s + deg_g,
        "v out-degrees the target multiplier term; raise d_s",
    )
    _require_degree(
        "value_floor", max(deg.d_v, deg_au), deg.d_s + max(deg_h0, deg_g),
        "v or A u out-degrees every multiplier term; raise d_s",
    )
    _require_degree(
        "generator_nonpos", deg_av, deg.d_s + deg_h0,
        "A v out-degrees the safe-set multiplier term; raise d_s",
    )

    constraints = [
        SosConstraint(
            name="ini_cap",
            region="initial",
            affine=lp_p.plus(lp_v, -1.0),  # p - v
            multipliers=[("s0", basis_s, ini)],
            slack_basis=_slack_basis(n, max(deg.d_v, deg.d_s + deg_ini)),
        ),
        SosConstraint(
            name="target_floor",
            region="target",
            affine=lp_v.plus(
                _AffinePoly.from_numeric(Polynomial.constant(n, -1.0))
            ),  # v - 1
            multipliers=[("s1", basis_s, g - 1.0)],
            slack_basis=_slack_basis(n, max(deg.d_v, deg.d_s + deg_g)),
        ),
        SosConstraint(
            name="value_floor",
            region="safe_minus_target",
            affine=lp_v.plus(lp_au, -1.0),  # v - A u
            multipliers=[("s2", basis_s, h0), ("s3", basis_s, 1.0 - g)],
            slack_basis=_slack_basis(
                n, max(deg.d_v, deg_au, deg.d_s + deg_h0, deg.d_s + deg_g)
            ),
        ),
        SosConstraint(
            name="generator_nonpos",
            region="safe",
            affine=_AffinePoly(n).plus(lp_av, -1.0),  # -A v
            multipliers=[("s4", basis_s, h0)],
            slack_basis=_slack_basis(n, max(deg_av, deg.d_s + deg_h0)),
        ),
    ]

    objective = np.zeros(n_free)
    objective[layout["p"][0]] = -1.0  # maximize -p, i.e. minimize p

    return SosProgram(
        mode=MODE_SAFETY,
        problem=prob,
        degrees=deg,
        free_layout=layout,
        n_free=n_free,
        constraints=constraints,
        objective=objective,
        ini=ini,
    )


def _sampled_subset_check(
    prob: ReachAvoidProblem, ini: Polynomial, seed: int, n_samples: int = 4096
) -> bool:
    pts = sample_uniform(prob.objective_domain.inflated(1.2), n_samples, seed, lane=902)
    ini_vals = ini.eval_many(pts)
    h0_vals = prob.h0.eval_many(pts)
    return not np.any((ini_vals <= 0.0) & (h0_vals >= 0.0))


def _require_degree(name: str, lhs_degree: int, multiplier_degree: int, hint: str):
    if lhs_degree > multiplier_degree:
        raise SosDegreeError(
            f"constraint {name!r}: decision term degree {lhs_degree} exceeds "
            f"multiplier reach {multiplier_degree} ({hint})"
        )


def gram_basis_scales(
    dom: "IntegrationDomain", basis: Sequence[Monomial]
) -> np.ndarray:
    """Per-monomial Gram basis scaling; identity for now.

    L2 normalization was tried here and made the within-row coefficient
    spread of the compiled equalities worse (monomial products do not
    commute with per-monomial norms), so the raw basis is kept and
    conditioning is handled by row/column equilibration in the solver.
    """
    return np.ones(len(basis))


DEFAULT_TRACE_PENALTY = 1e-8


def compile_program(
    prog: SosProgram, trace_penalty: float = DEFAULT_TRACE_PENALTY
) -> SdpProblem:
    """Gram-encode each SOS constraint into a block-diagonal SDP.

    Coefficient-matching equalities are generated per constraint in
    graded-lex monomial order, so the compiled problem (and any file dump
    of it) is reproducible byte for byte.

    ``trace_penalty`` subtracts eps * tr(Gram) from the objective.  The
    feasible set (hence soundness of any extracted certificate) is
    untouched; the penalty bounds the otherwise unbounded optimal face of
    the multiplier blocks, without which the interior-point iterates
    drift along feasible rays and stall short of tolerance.  The
    objective loss is at most eps times the total Gram trace (~1e-4 at
    the default on degree-12 instances).
    """
    n = prog.n_vars
    dom = prog.problem.objective_domain
    builder = SdpBuilder()
    for name, (offset, basis) in prog.free_layout.items():
        count = 1 if basis is None else len(basis)
        for k in range(count):
            builder.add_free(f"{name}[{k}]")
    for idx, w in enumerate(prog.objective):
        builder.set_obj_free(idx, w)

    used_free: set[int] = set()
    for con in prog.constraints:
        mult_blocks = []
        for mname, mbasis, weight in con.multipliers:
            mult_blocks.append(
                (
                    builder.add_block(len(mbasis), name=mname),
                    mbasis,
                    weight,
                    gram_basis_scales(dom, mbasis),
                )
            )
        slack = builder.add_block(len(con.slack_basis), name=con.name)
        slack_scale = gram_basis_scales(dom, con.slack_basis)

        # every monomial the constraint can touch, in graded-lex order
        monos: set[Monomial] = set(con.affine.terms.keys())
        for _, mbasis, weight in con.multipliers:
            pair_monos = _pair_products(mbasis)
            for pm in pair_monos:
                for mw in weight.terms:
                    monos.add(pm.mul(mw))
        monos.update(_pair_products(con.slack_basis))
        ordered = sorted(monos, key=lambda m: m.sort_key(n))

        rows = {}
        for mono in ordered:
            const, lin = con.affine.terms.get(mono, (0.0, {}))
            row = builder.new_row(-const)
            rows[mono] = row
            for var, w in lin.items():
                builder.add_free_entry(row, var, w)
                used_free.add(var)

        # data entries carry 1/(scale_i scale_j): the solver's Gram variable
        # is then the one over the unit-norm basis, G = D^-1 Ghat D^-1
        for bid, mbasis, weight, scale in mult_blocks:
            for i in range(len(mbasis)):
                for j in range(i, len(mbasis)):
                    pair = mbasis[i].mul(mbasis[j])
                    sij = scale[i] * scale[j]
                    for mw, cw in weight.terms.items():
                        builder.add_block_entry(
                            rows[pair.mul(mw)], bid, i, j, cw / sij
                        )
        sb = con.slack_basis
        for i in range(len(sb)):
            for j in range(i, len(sb)):
                builder.add_block_entry(
                    rows[sb[i].mul(sb[j])], slack, i, j,
                    -1.0 / (slack_scale[i] * slack_scale[j]),
                )

    unused = sorted(set(range(prog.n_free)) - used_free)
    if unused:
        logger.debug(
            "%d decision coefficient(s) appear in no constraint and will be pinned",
            len(unused),
        )
    problem = builder.build()
    if trace_penalty > 0.0:
        for b, spec in enumerate(problem.blocks):
            problem.obj_blocks[b] = (
                -trace_penalty * np.ones(spec.size)
                if spec.diag
                else -trace_penalty * np.eye(spec.size)
            )
    return problem


def _pair_products(basis: Sequence[Monomial]) -> set[Monomial]:
    out = set()
    for i in range(len(basis)):
        for j in range(i, len(basis)):
            out.add(basis[i].mul(basis[j]))
    return out


def extract_certificate(prog: SosProgram, sol: SdpSolution) -> Certificate:
    """Numeric certificate from a primal-feasible solve.

    Solved polynomials are cleaned of sub-1e-14 coefficient noise; Gram
    blocks are symmetrized.  Raises :class:`SolverFailure` on any
    non-optimal status.
    """
    if sol.status is not SolveStatus.OPTIMAL:
        raise SolverFailure(sol.status, "certificate extraction needs an optimal solve")

    free = sol.free
    v = prog.decision_coeffs("v", free).cleaned()
    u = prog.decision_coeffs("u", free).cleaned()

    multipliers: dict[str, Polynomial] = {}
    grams: dict[str, np.ndarray] = {}
    bases: dict[str, list[Monomial]] = {}
    dom = prog.problem.objective_domain
    block_iter = iter(range(len(sol.blocks)))

    def unscaled_gram(b: int, basis: Sequence[Monomial]) -> np.ndarray:
        scale = gram_basis_scales(dom, basis)
        gram = (sol.blocks[b] + sol.blocks[b].T) / 2.0
        return gram / np.outer(scale, scale)

    for con in prog.constraints:
        for mname, mbasis, _ in con.multipliers:
            b = next(block_iter)
            gram = unscaled_gram(b, mbasis)
            grams[mname] = gram
            bases[mname] = list(mbasis)
            multipliers[mname] = gram_polynomial(prog.n_vars, gram, mbasis).cleaned()
        b = next(block_iter)
        grams[con.name] = unscaled_gram(b, con.slack_basis)
        bases[con.name] = list(con.slack_basis)

    if prog.mode == MODE_REACH_AVOID:
        multipliers["p_free"] = prog.decision_coeffs("p_free", free).cleaned()
        p_threshold = prog.problem.p_threshold
        objective = float(prog.objective @ free)
    else:
        p_threshold = float(free[prog.free_layout["p"][0]])
        objective = p_threshold

    stats = {
        "status": sol.status.value,
        "iterations": sol.iterations,
        "gap": sol.gap,
        "primal_residual": sol.primal_residual,
        "dual_residual": sol.dual_residual,
        "objective": sol.objective,
    }
    return Certificate(
        mode=prog.mode,
        n_vars=prog.n_vars,
        v=v,
        u=u,
        multipliers=multipliers,
        p_threshold=p_threshold,
        objective=objective,
        grams=grams,
        gram_bases=bases,
        degrees=prog.degrees.as_dict(),
        solver_stats=stats,
    )
