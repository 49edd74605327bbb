"""Decoupling inequalities between a joint Bernoulli family and its
independent version.

Let M = P(Z > 0) for the joint and M~ = P(Z~ > 0) for independent copies
with the same marginals.  The bounds computed here:

  upper:        M <= c * M~           with c = e/(e-1), for every joint;
  lower:        M >= M~ / 2           under pairwise independence, or the
                                      weaker condition E[X_i X_j] <= p_i p_j
                                      (negative pairwise covariance);
  corrected:    M >= (1 - H/(B+H)) * M~ / 2   for every joint, where H
                totals the positive-part excess correlations and B = S + S^2
                with S the sum of marginals.

The lower bound runs through Paley-Zygmund applied to Z, which is why the
report also carries (E Z)^2 / E[Z^2] and the nonnegative factorization
certificate G (see `g_function`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .dist import (
    JointBernoulli,
    MarginalVector,
    eta_matrix,
    marginals,
    moments_of_z,
    prob_hit,
    prob_hit_independent,
    second_moments,
)

# Optimal constant in the upper decoupling bound.  Never hard-code a decimal
# truncation of these; all comparisons derive from math.e at full precision.
PINELIS_CONSTANT = math.e / (math.e - 1.0)

# Conjectured optimal constant for the lower bound: half the upper constant.
CONJECTURED_LOWER_CONSTANT = math.e / (2.0 * (math.e - 1.0))

# Absolute slack for inequality verdicts.  Every compared quantity lives in
# [0, n] with n <= 24 in dense use, so accumulated float error sits far below.
VERDICT_SLACK = 1e-12

# Default tolerance for the negative-covariance applicability test.
DEFAULT_COVARIANCE_TOL = 1e-12


class UpperCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


class MainLowerCheck(NamedTuple):
    lhs: float
    rhs: float
    applicable: bool
    holds: bool


class EtaLowerCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


class GFactorization(NamedTuple):
    g: float
    f: float


@dataclass(frozen=True)
class BoundReport:
    """Every scalar the bound battery produces for one joint.

    Field names match the JSON serialization exactly.  `verdicts` maps each
    inequality to its boolean outcome; `universal_ok` folds together the
    verdicts that must hold for every valid joint, so a False there means a
    malformed input or a library bug, never a legitimately failing bound.
    """

    M: float
    M_tilde: float
    S: float
    P_prod: float
    G: float
    F: float
    A: float
    B: float
    C: float
    H: float
    pz_lower: float
    pinelis_rhs: float
    eta_lower: float
    verdicts: dict[str, bool]

    _SCALAR_FIELDS = (
        "M",
        "M_tilde",
        "S",
        "P_prod",
        "G",
        "F",
        "A",
        "B",
        "C",
        "H",
        "pz_lower",
        "pinelis_rhs",
        "eta_lower",
    )

    # Verdicts that hold for every valid joint, with no dependence assumption.
    _UNIVERSAL_VERDICTS = (
        "pinelis",
        "paley_zygmund",
        "eta_lower",
        "g_nonnegative",
        "factorization",
        "moment_implication",
        "main_lower",
    )

    @property
    def universal_ok(self) -> bool:
        return all(self.verdicts[name] for name in self._UNIVERSAL_VERDICTS)

    def to_json_dict(self) -> dict:
        out: dict = {name: getattr(self, name) for name in self._SCALAR_FIELDS}
        out["verdicts"] = dict(self.verdicts)
        return out


def pinelis_upper_check(joint: JointBernoulli) -> UpperCheck:
    """Check P(Z > 0) <= c * P(Z~ > 0) with c = e/(e-1).

    Holds for every joint regardless of dependence; a False verdict means
    the input is corrupt or there is a bug.
    """
    lhs = prob_hit(joint)
    rhs = PINELIS_CONSTANT * prob_hit_independent(marginals(joint))
    return UpperCheck(lhs, rhs, lhs <= rhs + VERDICT_SLACK)


def paley_zygmund_lower(joint: JointBernoulli) -> float:
    """(E Z)^2 / E[Z^2], a lower bound on P(Z > 0) valid for every joint."""
    ez, ez2 = moments_of_z(joint)
    if ez2 <= 0.0:
        return 0.0
    return (ez * ez) / ez2


def main_lower_check(
    joint: JointBernoulli, tol: float = DEFAULT_COVARIANCE_TOL
) -> MainLowerCheck:
    """Check P(Z > 0) >= P(Z~ > 0) / 2 under negative pairwise covariance.

    `applicable` reports whether every pair satisfies
    E[X_i X_j] <= p_i p_j + tol (pairwise independence passes a fortiori).
    When applicable is True the bound is guaranteed, so holds must be True;
    when it is False no claim is made and `holds` merely reports the raw
    comparison.
    """
    p = marginals(joint)
    m = second_moments(joint).m
    applicable = True
    for i in range(joint.n):
        for j in range(joint.n):
            if i != j and m[i][j] > p.p[i] * p.p[j] + tol:
                applicable = False
                break
        if not applicable:
            break
    lhs = prob_hit(joint)
    rhs = 0.5 * prob_hit_independent(p)
    return MainLowerCheck(lhs, rhs, applicable, lhs >= rhs - VERDICT_SLACK)


def eta_lower_check(joint: JointBernoulli) -> EtaLowerCheck:
    """Check P(Z > 0) >= (1 - H/(B+H)) * P(Z~ > 0) / 2 for any joint.

    H totals the clipped excess correlations over ordered pairs and
    B = S + S^2.  When B + H = 0 (all marginals zero) both sides vanish and
    the right-hand side is defined as 0.
    """
    p = marginals(joint)
    s = p.total
    b = s + s * s
    h = eta_matrix(joint).total
    mtilde = prob_hit_independent(p)
    if b + h == 0.0:
        rhs = 0.0
    else:
        rhs = 0.5 * (1.0 - h / (b + h)) * mtilde
    lhs = prob_hit(joint)
    return EtaLowerCheck(lhs, rhs, lhs >= rhs - VERDICT_SLACK)


def g_function(marginal: MarginalVector) -> GFactorization:
    """Nonnegativity certificate for the halved lower bound.

    G = S + P + S*P - 1 with S the marginal sum and P = prod(1 - p_i), and
    F = S*G.  G >= 0 for every marginal vector in [0,1]^n: when S >= 1 each
    remaining term is nonnegative, and when S < 1 the elementary bound
    P >= 1 - S gives G >= S(1 - S) >= 0.  F >= 0 is exactly what makes the
    Paley-Zygmund route beat half of P(Z~ > 0).
    """
    s = marginal.total
    p_prod = 1.0
    for p in marginal.p:
        p_prod *= 1.0 - p
    g = s + p_prod + s * p_prod - 1.0
    return GFactorization(g, s * g)


def full_report(
    joint: JointBernoulli, tol: float = DEFAULT_COVARIANCE_TOL
) -> BoundReport:
    """Evaluate every bound on one joint and collect the scalar evidence."""
    p = marginals(joint)
    s = p.total
    p_prod = 1.0
    for x in p.p:
        p_prod *= 1.0 - x

    m = prob_hit(joint)
    mtilde = prob_hit_independent(p)
    g, f = g_function(p)
    pz = paley_zygmund_lower(joint)
    h = eta_matrix(joint).total

    a = s * s
    b = s + s * s
    c = 0.5 * mtilde

    upper = pinelis_upper_check(joint)
    lower = main_lower_check(joint, tol)
    eta = eta_lower_check(joint)

    # F also has a direct polynomial form, 2S^2 - (S + S^2)(1 - P); agreement
    # with S*G is the factorization identity, checked as a genuine dual route.
    f_direct = 2.0 * s * s - (s + s * s) * (1.0 - p_prod)

    # The arithmetic implication behind the eta correction: A/B >= C forces
    # A/(B+H) >= C * (1 - H/(B+H)).  Checked on the computed scalars.
    if b > 0.0 and a / b >= c - VERDICT_SLACK:
        implication_ok = a / (b + h) >= c * (1.0 - h / (b + h)) - VERDICT_SLACK
    else:
        implication_ok = True

    verdicts = {
        "pinelis": upper.holds,
        "paley_zygmund": pz <= m + VERDICT_SLACK,
        "main_lower_applicable": lower.applicable,
        "main_lower": lower.holds if lower.applicable else True,
        "eta_lower": eta.holds,
        "g_nonnegative": g >= -VERDICT_SLACK,
        "factorization": abs(f_direct - f) <= 1e-10,
        "moment_implication": implication_ok,
    }
    return BoundReport(
        M=m,
        M_tilde=mtilde,
        S=s,
        P_prod=p_prod,
        G=g,
        F=f,
        A=a,
        B=b,
        C=c,
        H=h,
        pz_lower=pz,
        pinelis_rhs=upper.rhs,
        eta_lower=eta.rhs,
        verdicts=verdicts,
    )
