"""Search for joints minimizing P(Z > 0) under prescribed equal marginals
and pairwise moment constraints.

Two formulations of the same search:

  full          one variable per atom of {0,1}^n (2^n variables), solved in
                floating point via scipy's HiGHS backend; capped at n <= 16.
  exchangeable  one variable per Hamming-weight class (n+1 variables), valid
                because permutation-averaging any feasible joint preserves
                equal marginals, the pair moments, and P(Z > 0); solved in
                exact rational arithmetic so the reported optimum carries no
                solver tolerance.

The two routes must agree on small n, which is one of the package's
verification properties.  The scientific payload is the ratio of the
optimum to P(Z~ > 0) at p = 1/(n-1), whose large-n behaviour probes whether
the halved lower bound's constant can be improved to e/(2(e-1)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from . import simplex
from .dist import JointBernoulli, MarginalVector, prob_hit_independent

MODES = ("pairwise_equality", "negative_covariance")
REDUCTIONS = ("full", "exchangeable")

FULL_VARIABLE_LIMIT = 16
EXCHANGEABLE_LIMIT = 10_000

# Witness atoms below this are dropped as solver dust (HiGHS default
# feasibility tolerance is far coarser than this).
WITNESS_ATOM_FLOOR = 1e-15


@dataclass(frozen=True, eq=False)
class FullLpProblem:
    """Atom-level formulation: minimize c @ q over q >= 0."""

    c: np.ndarray
    a_eq: sparse.csr_matrix
    b_eq: np.ndarray
    a_ub: sparse.csr_matrix | None
    b_ub: np.ndarray | None


@dataclass(frozen=True)
class ExchangeableLpProblem:
    """Weight-class formulation in exact rationals: maximize w_0."""

    objective: tuple[Fraction, ...]
    eq: tuple[tuple[tuple[Fraction, ...], Fraction], ...]
    ub: tuple[tuple[tuple[Fraction, ...], Fraction], ...]


@dataclass(frozen=True, eq=False)
class ExtremalLp:
    n: int
    p: Fraction
    mode: str
    reduction: str
    problem: FullLpProblem | ExchangeableLpProblem


@dataclass(frozen=True)
class LpSolution:
    """Solved search instance.

    `objective` is the minimum of P(Z > 0).  Exactly one of `witness_atoms`
    (full) / `witness_weights` (exchangeable) is set for optimal solutions;
    the exchangeable route additionally reports the exact rational optimum.
    """

    status: str  # "optimal" | "infeasible"
    objective: float | None
    witness_atoms: dict[int, float] | None = None
    witness_weights: tuple[float, ...] | None = None
    objective_exact: Fraction | None = None
    weights_exact: tuple[Fraction, ...] | None = None


def _check_common(n: int, p: Fraction | float | int, mode: str) -> Fraction:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"marginal p must lie in [0, 1], got {p}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return p


def build_full_lp(
    n: int, p: Fraction | float, mode: str = "pairwise_equality"
) -> ExtremalLp:
    """Atom-level LP: q_x >= 0, sum q = 1, marginals p, pair moments p^2.

    Pair moments are equalities in pairwise_equality mode and upper bounds
    in negative_covariance mode (a relaxation, so its optimum can only be
    lower).  Objective: minimize the mass off the zero atom.
    """
    p = _check_common(n, p, mode)
    if n > FULL_VARIABLE_LIMIT:
        raise ValueError(
            f"full reduction enumerates 2^n atoms; n={n} exceeds {FULL_VARIABLE_LIMIT}"
        )
    size = 1 << n
    pf = float(p)
    p2f = float(p * p)

    pairs = list(combinations(range(n), 2))
    pair_row = {pair: r for r, pair in enumerate(pairs)}

    eq_rows: list[int] = []
    eq_cols: list[int] = []
    pair_rows: list[int] = []
    pair_cols: list[int] = []
    for mask in range(size):
        eq_rows.append(0)
        eq_cols.append(mask)
        bits = [i for i in range(n) if (mask >> i) & 1]
        for i in bits:
            eq_rows.append(1 + i)
            eq_cols.append(mask)
        for pair in combinations(bits, 2):
            pair_rows.append(pair_row[pair])
            pair_cols.append(mask)

    a_marg = sparse.csr_matrix(
        (np.ones(len(eq_rows)), (eq_rows, eq_cols)), shape=(1 + n, size)
    )
    b_marg = np.array([1.0] + [pf] * n)
    a_pair = sparse.csr_matrix(
        (np.ones(len(pair_rows)), (pair_rows, pair_cols)), shape=(len(pairs), size)
    )
    b_pair = np.full(len(pairs), p2f)

    c = np.ones(size)
    c[0] = 0.0
    if mode == "pairwise_equality":
        problem = FullLpProblem(
            c=c,
            a_eq=sparse.vstack([a_marg, a_pair], format="csr"),
            b_eq=np.concatenate([b_marg, b_pair]),
            a_ub=None,
            b_ub=None,
        )
    else:
        problem = FullLpProblem(
            c=c, a_eq=a_marg, b_eq=b_marg, a_ub=a_pair, b_ub=b_pair
        )
    return ExtremalLp(n=n, p=p, mode=mode, reduction="full", problem=problem)


def build_exchangeable_lp(
    n: int, p: Fraction | float, mode: str = "pairwise_equality"
) -> ExtremalLp:
    """Weight-class LP over w_k = P(Z = k), k = 0..n, in exact rationals.

    Constraints: total mass one, first falling moment sum k*w_k = n*p, and
    second falling moment sum k(k-1)*w_k = n(n-1)*p^2 (equality or upper
    bound by mode).  Objective: maximize w_0, i.e. minimize P(Z > 0).
    """
    p = _check_common(n, p, mode)
    if n < 2:
        raise ValueError(f"exchangeable reduction needs n >= 2, got {n}")
    if n > EXCHANGEABLE_LIMIT:
        raise ValueError(f"n={n} exceeds exchangeable limit {EXCHANGEABLE_LIMIT}")

    ks = range(n + 1)
    ones = tuple(Fraction(1) for _ in ks)
    first = tuple(Fraction(k) for k in ks)
    second = tuple(Fraction(k * (k - 1)) for k in ks)
    objective = tuple(Fraction(1 if k == 0 else 0) for k in ks)

    eq = [(ones, Fraction(1)), (first, n * p)]
    ub = []
    moment_row = (second, n * (n - 1) * p * p)
    if mode == "pairwise_equality":
        eq.append(moment_row)
    else:
        ub.append(moment_row)
    problem = ExchangeableLpProblem(objective=objective, eq=tuple(eq), ub=tuple(ub))
    return ExtremalLp(n=n, p=p, mode=mode, reduction="exchangeable", problem=problem)


def solve(lp: ExtremalLp) -> LpSolution:
    """Solve either formulation; see LpSolution for what is populated."""
    if isinstance(lp.problem, ExchangeableLpProblem):
        return _solve_exchangeable(lp.problem)
    return _solve_full(lp.problem)


def _solve_exchangeable(problem: ExchangeableLpProblem) -> LpSolution:
    result = simplex.solve_exact(
        problem.objective, eq_constraints=problem.eq, ub_constraints=problem.ub
    )
    if result.status == "infeasible":
        return LpSolution(status="infeasible", objective=None)
    if result.status != "optimal":
        raise RuntimeError(f"exchangeable LP reported {result.status}; builder bug")
    objective_exact = 1 - result.value  # min P(Z>0) = 1 - max w_0
    return LpSolution(
        status="optimal",
        objective=float(objective_exact),
        witness_weights=tuple(float(w) for w in result.x),
        objective_exact=objective_exact,
        weights_exact=result.x,
    )


def _solve_full(problem: FullLpProblem) -> LpSolution:
    res = linprog(
        problem.c,
        A_ub=problem.a_ub,
        b_ub=problem.b_ub,
        A_eq=problem.a_eq,
        b_eq=problem.b_eq,
        bounds=(0, None),
        method="highs",
    )
    if res.status == 2:
        return LpSolution(status="infeasible", objective=None)
    if res.status != 0:
        raise RuntimeError(f"full LP solver failed: {res.message}")
    atoms = {
        mask: float(q)
        for mask, q in enumerate(res.x)
        if q > WITNESS_ATOM_FLOOR
    }
    return LpSolution(status="optimal", objective=float(res.fun), witness_atoms=atoms)


def expand_exchangeable(n: int, weights) -> JointBernoulli:
    """Spread each weight class uniformly over its masks.

    Inverse of collapsing a joint to Hamming-weight totals; used to
    round-trip exchangeable LP witnesses through the atom-level toolkit.
    Each class closes with a residual atom so the class total survives
    float conversion exactly.
    """
    if n > FULL_VARIABLE_LIMIT:
        raise ValueError(f"expansion is dense in 2^n; n={n} exceeds {FULL_VARIABLE_LIMIT}")
    if len(weights) != n + 1:
        raise ValueError(f"need n+1 = {n + 1} weights, got {len(weights)}")
    atoms: dict[int, float] = {}
    for k, weight in enumerate(weights):
        target = float(weight)
        if target == 0.0:
            continue
        masks = [
            sum(1 << i for i in bits) for bits in combinations(range(n), k)
        ]
        share = target / len(masks)
        running = 0.0
        for mask in masks[:-1]:
            atoms[mask] = share
            running += share
        atoms[masks[-1]] = target - running
    return JointBernoulli(n, atoms)


def min_ratio(
    n: int, mode: str = "pairwise_equality"
) -> tuple[float, LpSolution]:
    """Minimal P(Z>0) / P(Z~>0) at the calibration marginal p = 1/(n-1)."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    p = Fraction(1, n - 1)
    solution = solve(build_exchangeable_lp(n, p, mode))
    if solution.status != "optimal":
        raise RuntimeError(f"search at n={n} reported {solution.status}; builder bug")
    mtilde = prob_hit_independent(MarginalVector((float(p),) * n))
    return solution.objective / mtilde, solution


def conjecture_sweep(
    n_min: int, n_max: int, mode: str = "pairwise_equality"
) -> list[dict]:
    """Tabulate the optimal ratio against the candidate family's ratio.

    One row per n with keys: n, p, mtilde, lp_objective, lp_ratio,
    construction_ratio, gap, status, running_inf.  The convergence of
    lp_ratio toward e/(2(e-1)) is evidence about the best possible lower
    constant, reported as data and never asserted.
    """
    if not 3 <= n_min <= n_max:
        raise ValueError(f"need 3 <= n_min <= n_max, got {n_min}..{n_max}")
    if n_max > EXCHANGEABLE_LIMIT:
        raise ValueError(f"n_max={n_max} exceeds {EXCHANGEABLE_LIMIT}")
    rows = []
    running_inf = float("inf")
    for n in range(n_min, n_max + 1):
        ratio, solution = min_ratio(n, mode)
        p = 1.0 / (n - 1)
        mtilde = prob_hit_independent(MarginalVector((p,) * n))
        construction_ratio = (0.5 + 0.5 / (n - 1)) / mtilde
        running_inf = min(running_inf, ratio)
        rows.append(
            {
                "n": n,
                "p": p,
                "mtilde": mtilde,
                "lp_objective": solution.objective,
                "lp_ratio": ratio,
                "construction_ratio": construction_ratio,
                "gap": construction_ratio - ratio,
                "status": solution.status,
                "running_inf": running_inf,
            }
        )
    return rows
