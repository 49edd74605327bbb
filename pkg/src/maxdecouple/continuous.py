"""Decoupling bounds for nonnegative real-valued variables with finite
discrete support.

Everything reduces to the Bernoulli bounds through threshold indicators:
for t >= 0 the variables 1{X_i > t} form a Bernoulli family, and
E[max X_i] is the integral of P(max > t) over t.  With finite support that
integral is an exact finite sum over the sorted distinct support values
(left endpoints, since the indicators use strict '> t'), so no quadrature
is involved anywhere.

The pairwise condition checked here is the thresholded analogue of negative
covariance: P(X_i > t, X_j > t) <= P(X_i > t) P(X_j > t) at every support
threshold.  Survival functions of finitely supported laws are piecewise
constant between support points, so checking support thresholds only is
equivalent to checking all t > 0.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .constructions import is_prime
from .dist import NORMALIZATION_TOL, JointBernoulli
from .errors import InvalidDistributionError
from .bounds import PINELIS_CONSTANT

# Slack for the expectation-level inequality verdicts; wider than the
# Bernoulli slack because values (hence sums) can be arbitrary magnitudes.
EXPECTATION_SLACK = 1e-10

# Slack for the per-threshold orthant comparison, a probability-scale check.
ORTHANT_SLACK = 1e-12


def _check_finite_nonneg(x: float, what: str) -> float:
    x = float(x)
    if not (x >= 0.0 and x < float("inf")):
        raise InvalidDistributionError(f"{what} must be finite and >= 0, got {x!r}")
    return x


@dataclass(frozen=True)
class NonnegJoint:
    """Finite-support joint law of n nonnegative real variables.

    Atoms are (value-vector, probability) pairs, kept in construction order;
    all summations walk that order, so results are deterministic.
    """

    n: int
    atoms: tuple[tuple[tuple[float, ...], float], ...]

    def __init__(self, n: int, atoms: Sequence[tuple[Sequence[float], float]]):
        if n < 1:
            raise InvalidDistributionError(f"need at least one variable, got n={n}")
        rows = []
        for idx, (values, prob) in enumerate(atoms):
            vec = tuple(
                _check_finite_nonneg(v, f"atoms[{idx}].values[{k}]")
                for k, v in enumerate(values)
            )
            if len(vec) != n:
                raise InvalidDistributionError(
                    f"atoms[{idx}] has {len(vec)} values, expected n={n}"
                )
            prob = _check_finite_nonneg(prob, f"atoms[{idx}].p")
            rows.append((vec, prob))
        if not rows:
            raise InvalidDistributionError("atom list must be nonempty")
        total = math.fsum(prob for _, prob in rows)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidDistributionError(
                f"probabilities sum to {total!r}, deviation {total - 1.0!r} "
                f"exceeds tolerance {NORMALIZATION_TOL}"
            )
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "atoms", tuple(rows))

    def to_json_dict(self) -> dict:
        return {
            "kind": "nonneg-joint",
            "n": self.n,
            "atoms": [{"values": list(v), "p": p} for v, p in self.atoms],
        }

    @classmethod
    def from_json_dict(cls, obj: object) -> "NonnegJoint":
        if not isinstance(obj, dict):
            raise InvalidDistributionError("joint document must be a JSON object")
        if obj.get("kind") != "nonneg-joint":
            raise InvalidDistributionError(
                f"field 'kind' must be 'nonneg-joint', got {obj.get('kind')!r}"
            )
        n = obj.get("n")
        if not isinstance(n, int) or isinstance(n, bool):
            raise InvalidDistributionError("field 'n' must be an integer")
        raw = obj.get("atoms")
        if not isinstance(raw, list):
            raise InvalidDistributionError("field 'atoms' must be a list")
        rows = []
        for idx, entry in enumerate(raw):
            if not isinstance(entry, dict) or "values" not in entry or "p" not in entry:
                raise InvalidDistributionError(
                    f"atoms[{idx}] must be an object with 'values' and 'p'"
                )
            values = entry["values"]
            if not isinstance(values, list):
                raise InvalidDistributionError(f"atoms[{idx}].values must be a list")
            rows.append((values, entry["p"]))
        return cls(n, rows)


class ContinuousCheck(NamedTuple):
    emax: float
    emax_ind: float
    upper_holds: bool
    pairwise_ok: bool
    lower_holds: bool


def _support_grid(joint: NonnegJoint) -> list[float]:
    values = {0.0}
    for vec, _ in joint.atoms:
        values.update(vec)
    return sorted(values)


def _layer_cake_expected_max(joint: NonnegJoint) -> float:
    grid = _support_grid(joint)
    atom_max = [(max(vec), prob) for vec, prob in joint.atoms]
    total = 0.0
    for t, t_next in zip(grid, grid[1:]):
        survival = 0.0
        for m, prob in atom_max:
            if m > t:
                survival += prob
        total += (t_next - t) * survival
    return total


def expected_max(joint: NonnegJoint) -> float:
    """E[max_i X_i], as the direct atom sum.

    Also evaluates the tail-integral form (sum over support thresholds of
    interval length times P(max > t)) and insists the two agree to 1e-10;
    a mismatch can only be an internal bug, never a property of the input.
    """
    direct = 0.0
    for vec, prob in joint.atoms:
        direct += prob * max(vec)
    layered = _layer_cake_expected_max(joint)
    if abs(direct - layered) > EXPECTATION_SLACK:
        raise RuntimeError(
            f"tail-integral cross-check failed: direct={direct!r} layered={layered!r}"
        )
    return direct


def _marginal_survivals(joint: NonnegJoint, i: int) -> tuple[list[float], list[float]]:
    """Support values of X_i (ascending) and suffix sums P(X_i > value[j-1]).

    Returns (values, suffix) with suffix[j] = P(X_i >= values[j]) summed
    from the top down; suffix has one trailing 0 so that indexing by
    bisect_right never falls off the end.
    """
    law: dict[float, float] = {}
    for vec, prob in joint.atoms:
        v = vec[i]
        law[v] = law.get(v, 0.0) + prob
    values = sorted(law)
    suffix = [0.0] * (len(values) + 1)
    for j in range(len(values) - 1, -1, -1):
        suffix[j] = law[values[j]] + suffix[j + 1]
    return values, suffix


def _survival_at(values: list[float], suffix: list[float], t: float) -> float:
    """P(X > t) from the precomputed suffix table."""
    return suffix[bisect_right(values, t)]


def expected_max_independent(joint: NonnegJoint) -> float:
    """E[max_i X~_i] for the independent version, computed exactly.

    Extracts each coordinate's marginal law, then integrates
    1 - prod_i P(X_i <= t) over the finite support grid.
    """
    per_coord = [_marginal_survivals(joint, i) for i in range(joint.n)]
    grid = _support_grid(joint)
    total = 0.0
    for t, t_next in zip(grid, grid[1:]):
        cdf_prod = 1.0
        for values, suffix in per_coord:
            cdf_prod *= 1.0 - _survival_at(values, suffix, t)
        total += (t_next - t) * (1.0 - cdf_prod)
    return total


def pairwise_orthant_ok(joint: NonnegJoint, slack: float = ORTHANT_SLACK) -> bool:
    """Thresholded negative-dependence test.

    True iff P(X_i > t, X_j > t) <= P(X_i > t) P(X_j > t) + slack for every
    pair i != j and every support threshold t (support thresholds suffice:
    both sides are constant between consecutive support values).
    """
    per_coord = [_marginal_survivals(joint, i) for i in range(joint.n)]
    grid = _support_grid(joint)
    for i in range(joint.n):
        for j in range(i + 1, joint.n):
            for t in grid:
                joint_surv = 0.0
                for vec, prob in joint.atoms:
                    if vec[i] > t and vec[j] > t:
                        joint_surv += prob
                si = _survival_at(*per_coord[i], t)
                sj = _survival_at(*per_coord[j], t)
                if joint_surv > si * sj + slack:
                    return False
    return True


def decoupling_check_cont(joint: NonnegJoint) -> ContinuousCheck:
    """Run both expectation-level decoupling bounds on one joint.

    upper_holds must be True for every input (no dependence assumption);
    lower_holds is guaranteed only when pairwise_ok is True, but its raw
    value is reported either way.
    """
    emax = expected_max(joint)
    emax_ind = expected_max_independent(joint)
    upper = emax <= PINELIS_CONSTANT * emax_ind + EXPECTATION_SLACK
    ok = pairwise_orthant_ok(joint)
    lower = emax >= 0.5 * emax_ind - EXPECTATION_SLACK
    return ContinuousCheck(emax, emax_ind, upper, ok, lower)


def affine_hash_values(
    n: int, q: int, value_maps: Sequence[Sequence[float]]
) -> NonnegJoint:
    """Pairwise-independent real-valued family from an affine hash.

    With (a, b) uniform on {0..q-1}^2 and q prime, set
    X_i = value_maps[i][(a + b*i) mod q].  For i != j the hash pair is
    uniform on the q^2 cells, so X_i and X_j are exactly independent and
    each X_i is uniform over its value table.
    """
    if not is_prime(q):
        raise ValueError(f"q must be prime, got {q}")
    if not 1 <= n <= q:
        raise ValueError(f"need 1 <= n <= q, got n={n}, q={q}")
    if len(value_maps) != n:
        raise ValueError(f"need one value table per variable ({n}), got {len(value_maps)}")
    tables = []
    for i, table in enumerate(value_maps):
        if len(table) != q:
            raise ValueError(f"value table {i} must have length q={q}")
        tables.append(tuple(_check_finite_nonneg(v, f"value_maps[{i}]") for v in table))
    counts: dict[tuple[float, ...], int] = {}
    for a in range(q):
        for b in range(q):
            vec = tuple(tables[i][(a + b * i) % q] for i in range(n))
            counts[vec] = counts.get(vec, 0) + 1
    cells = q * q
    atoms = [(vec, counts[vec] / cells) for vec in sorted(counts)]
    return NonnegJoint(n, atoms)


def bernoulli_embedding(joint: JointBernoulli) -> NonnegJoint:
    """View a Bernoulli joint as a nonnegative joint with 0/1 values.

    The continuous operations then reproduce the Bernoulli ones exactly:
    expected_max is P(Z > 0) and expected_max_independent is P(Z~ > 0).
    """
    atoms = [
        (tuple(float((mask >> i) & 1) for i in range(joint.n)), prob)
        for mask, prob in joint.atoms
    ]
    return NonnegJoint(joint.n, atoms)
