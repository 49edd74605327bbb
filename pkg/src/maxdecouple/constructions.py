"""Canonical joint distributions: tightness examples, counterexamples, and
exact pairwise-independent families.

All builders return validated `JointBernoulli` tables.  Where a family is
defined by equalities that must survive floating point exactly (total mass
one, P(Z > 0) = 1), the last atom receives the residual 1 - (partial sum),
which closes the table exactly without perturbing any marginal by more than
one rounding step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .dist import DENSE_VARIABLE_LIMIT, JointBernoulli, MarginalVector

FAMILY_KINDS = (
    "one_hot_uniform",
    "conjectured_extremal",
    "comonotone",
    "affine_hash",
    "xor_parity",
    "product",
)


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


def one_hot_uniform(n: int) -> JointBernoulli:
    """Equal mass 1/n on each one-hot mask: exactly one variable fires.

    Marginals are all 1/n and P(Z > 0) = 1 exactly.  As n grows the
    independent version has P(Z~ > 0) = 1 - (1 - 1/n)^n -> 1 - 1/e, which is
    what makes the upper decoupling constant e/(e-1) unimprovable.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    share = 1.0 / n
    atoms = {}
    running = 0.0
    for i in range(n - 1):
        atoms[1 << i] = share
        running += share
    atoms[1 << (n - 1)] = 1.0 - running
    return JointBernoulli(n, atoms)


def conjectured_extremal(n: int) -> JointBernoulli:
    """Pairwise-independent family believed to minimize P(Z>0)/P(Z~>0).

    Marginals are all 1/(n-1); the hit count Z is supported on {0, 2} with
    P(Z=0) = 1/2 - 1/(2(n-1)), and P(Z=2) spread uniformly over all two-hot
    masks.  The exchangeable spreading makes every pair moment equal
    P(Z=2)/C(n,2) = 1/(n-1)^2 = p_i p_j, i.e. exact pairwise independence.
    As n grows, P(Z>0)/P(Z~>0) -> e/(2(e-1)).

    n = 2 is permitted but degenerate (P(Z=0) = 0, a point mass on {1,1}).
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    p_zero = 0.5 - 1.0 / (2.0 * (n - 1))
    pair_masks = [(1 << i) | (1 << j) for i, j in combinations(range(n), 2)]
    # Identical mass on every two-hot mask: the true total is then
    # p_zero + C(n,2) * pair_prob, off one from exact by a single rounding.
    pair_prob = (1.0 - p_zero) / len(pair_masks)
    atoms = {mask: pair_prob for mask in pair_masks}
    if p_zero > 0.0:
        atoms[0] = p_zero
    return JointBernoulli(n, atoms)


def comonotone(n: int, eps: float) -> JointBernoulli:
    """All variables equal: everything fires with probability eps, else nothing.

    The maximally positively dependent family.  P(Z > 0) = eps while
    P(Z~ > 0) = 1 - (1-eps)^n = n*eps + O(eps^2), so the ratio of the
    independent to the dependent hit probability climbs to n as eps -> 0,
    which is the worst possible ratio.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    full = (1 << n) - 1
    if eps == 0.0:
        return JointBernoulli(n, {0: 1.0})
    if eps == 1.0:
        return JointBernoulli(n, {full: 1.0})
    return JointBernoulli(n, {0: 1.0 - eps, full: eps})


def affine_hash(n: int, q: int, m: int) -> JointBernoulli:
    """Exact pairwise-independent thresholds of an affine hash family.

    Draw (a, b) uniformly from {0..q-1}^2 with q prime and set X_i = 1 iff
    (a + b*i) mod q < m.  For i != j the pair of hash values is uniform on
    the q^2 pairs (the 2x2 map is invertible mod q since i != j), so every
    pair of variables is exactly independent with marginals m/q.
    """
    if not is_prime(q):
        raise ValueError(f"q must be prime, got {q}")
    if not 1 <= n <= q:
        raise ValueError(f"need 1 <= n <= q, got n={n}, q={q}")
    if not 0 <= m <= q:
        raise ValueError(f"need 0 <= m <= q, got m={m}")
    counts: dict[int, int] = {}
    for a in range(q):
        for b in range(q):
            mask = 0
            for i in range(n):
                if (a + b * i) % q < m:
                    mask |= 1 << i
            counts[mask] = counts.get(mask, 0) + 1
    cells = q * q
    return JointBernoulli(n, {mask: c / cells for mask, c in counts.items()})


def xor_parity(k: int) -> JointBernoulli:
    """Parity bits over all nonempty subsets of k fair coins.

    n = 2^k - 1 variables indexed by nonempty subsets T of {1..k}; variable
    T is the parity of the coins in T.  Any two distinct parities differ by
    a third parity, which is itself a fair coin independent of either, so
    the family is exactly pairwise independent with marginals 1/2 despite
    being fully determined by only k random bits.
    """
    if not 1 <= k <= 4:
        raise ValueError(f"need 1 <= k <= 4, got {k}")
    share = 2.0 ** -k
    atoms = {}
    for u in range(1 << k):
        mask = 0
        for t in range(1, 1 << k):
            if (u & t).bit_count() & 1:
                mask |= 1 << (t - 1)
        atoms[mask] = share
    return JointBernoulli((1 << k) - 1, atoms)


def product(marginal: MarginalVector) -> JointBernoulli:
    """The fully independent joint with the given marginals.

    This is the explicit law of the independent version (X~_1, ..., X~_n),
    materialized over all 2^n outcomes; exact-zero atoms are dropped.
    """
    n = marginal.n
    if n > DENSE_VARIABLE_LIMIT:
        raise ValueError(
            f"product law needs a full 2^n table; n={n} exceeds {DENSE_VARIABLE_LIMIT}"
        )
    probs = np.array([1.0])
    for p in marginal.p:
        probs = np.concatenate([probs * (1.0 - p), probs * p])
    atoms = {mask: float(pr) for mask, pr in enumerate(probs) if pr != 0.0}
    return JointBernoulli(n, atoms)


@dataclass(frozen=True)
class FamilySpec:
    """Parsed description of a named family, as accepted by the CLI.

    `kind` is one of FAMILY_KINDS; only the parameters that family uses may
    be set.  `build()` runs the corresponding constructor, which performs
    the range validation.
    """

    kind: str
    n: int | None = None
    eps: float | None = None
    q: int | None = None
    m: int | None = None
    k: int | None = None
    p: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")

    def build(self) -> JointBernoulli:
        if self.kind == "one_hot_uniform":
            self._require(n=self.n)
            return one_hot_uniform(self.n)
        if self.kind == "conjectured_extremal":
            self._require(n=self.n)
            return conjectured_extremal(self.n)
        if self.kind == "comonotone":
            self._require(n=self.n, eps=self.eps)
            return comonotone(self.n, self.eps)
        if self.kind == "affine_hash":
            self._require(n=self.n, q=self.q, m=self.m)
            return affine_hash(self.n, self.q, self.m)
        if self.kind == "xor_parity":
            self._require(k=self.k)
            return xor_parity(self.k)
        self._require(p=self.p or None)
        return product(MarginalVector(self.p))

    def _require(self, **params) -> None:
        missing = [name for name, value in params.items() if value is None]
        if missing:
            raise ValueError(
                f"family {self.kind!r} needs parameter(s): {', '.join(missing)}"
            )
