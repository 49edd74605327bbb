"""Exact joint Bernoulli distributions as sparse mask -> probability tables.

Bit convention (fixed package-wide): bit 0 of an atom mask is the first
variable, so bit i set in mask x means X_{i+1} = 1.  The atom table is kept
sorted by ascending mask, and probability summations in the operations walk
that order left to right, which makes all derived quantities deterministic.
(The construction-time normalization check instead uses math.fsum, since it
measures true mass rather than producing a result.)

The hit count Z = sum_i X_i of an atom is the popcount of its mask; it is
never stored, always derived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidDistributionError

# Tolerance on |total mass - 1| for any probability table.
NORMALIZATION_TOL = 1e-12

# Largest n for which full-support (2^n atom) scans are permitted.  Sparse
# atom tables may use larger n as long as their support stays small.
DENSE_VARIABLE_LIMIT = 24

AtomTable = Iterable[tuple[int, float]] | Mapping[int, float]


def _normalize_atoms(n: int, atoms: AtomTable) -> tuple[tuple[int, float], ...]:
    if isinstance(atoms, Mapping):
        pairs = list(atoms.items())
    else:
        pairs = list(atoms)
    pairs.sort(key=lambda kv: kv[0])
    out = []
    last_mask = -1
    for mask, prob in pairs:
        mask = int(mask)
        prob = float(prob)
        if mask == last_mask:
            raise InvalidDistributionError(f"duplicate atom mask {mask}")
        if mask < 0 or mask >> n:
            raise InvalidDistributionError(
                f"atom mask {mask} out of range for n={n} (need 0 <= mask < 2^n)"
            )
        if not math.isfinite(prob) or prob < 0.0:
            raise InvalidDistributionError(
                f"atom mask {mask} has invalid probability {prob!r}"
            )
        out.append((mask, prob))
        last_mask = mask
    # Exactly-rounded total: the invariant concerns the true mass, not
    # artifacts of accumulation order over large supports.
    total = math.fsum(prob for _, prob in out)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise InvalidDistributionError(
            f"probabilities sum to {total!r}, deviation {total - 1.0!r} "
            f"exceeds tolerance {NORMALIZATION_TOL}"
        )
    return tuple(out)


@dataclass(frozen=True)
class JointBernoulli:
    """Joint law of (X_1, ..., X_n) on {0,1}^n as a sparse atom table.

    Immutable after construction; all operations on it are pure functions,
    so instances can be shared freely across threads.
    """

    n: int
    atoms: tuple[tuple[int, float], ...]

    def __init__(self, n: int, atoms: AtomTable):
        if n < 1:
            raise InvalidDistributionError(f"need at least one variable, got n={n}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "atoms", _normalize_atoms(int(n), atoms))

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(mask for mask, _ in self.atoms)

    @property
    def probs(self) -> tuple[float, ...]:
        return tuple(prob for _, prob in self.atoms)

    def to_json_dict(self) -> dict:
        return {
            "kind": "bernoulli-joint",
            "n": self.n,
            "atoms": [{"mask": mask, "p": prob} for mask, prob in self.atoms],
        }

    @classmethod
    def from_json_dict(cls, obj: object) -> "JointBernoulli":
        if not isinstance(obj, dict):
            raise InvalidDistributionError("joint document must be a JSON object")
        if obj.get("kind") != "bernoulli-joint":
            raise InvalidDistributionError(
                f"field 'kind' must be 'bernoulli-joint', got {obj.get('kind')!r}"
            )
        n = obj.get("n")
        if not isinstance(n, int) or isinstance(n, bool):
            raise InvalidDistributionError("field 'n' must be an integer")
        raw = obj.get("atoms")
        if not isinstance(raw, list):
            raise InvalidDistributionError("field 'atoms' must be a list")
        pairs = []
        for idx, entry in enumerate(raw):
            if not isinstance(entry, dict):
                raise InvalidDistributionError(f"atoms[{idx}] must be an object")
            if "mask" not in entry or "p" not in entry:
                raise InvalidDistributionError(
                    f"atoms[{idx}] needs 'mask' and 'p' fields"
                )
            mask = entry["mask"]
            if not isinstance(mask, int) or isinstance(mask, bool):
                raise InvalidDistributionError(f"atoms[{idx}].mask must be an integer")
            prob = entry["p"]
            if not isinstance(prob, (int, float)) or isinstance(prob, bool):
                raise InvalidDistributionError(f"atoms[{idx}].p must be a number")
            pairs.append((mask, float(prob)))
        return cls(n, pairs)


@dataclass(frozen=True)
class MarginalVector:
    """Marginal success probabilities p_1, ..., p_n.

    Fully determines the law of the independent version (X~_1, ..., X~_n):
    mutually independent Bernoullis with these same marginals.
    """

    p: tuple[float, ...]

    def __init__(self, p: Sequence[float]):
        vec = tuple(float(x) for x in p)
        if not vec:
            raise InvalidDistributionError("marginal vector must be nonempty")
        lo, hi = min(vec), max(vec)
        # Upper slack matches the atom-table normalization tolerance: masked
        # sums of a valid table can exceed 1 by at most that much.
        if lo < 0.0 or hi > 1.0 + NORMALIZATION_TOL:
            raise InvalidDistributionError(
                f"marginals must lie in [0, 1]; found value {lo if lo < 0 else hi!r}"
            )
        object.__setattr__(self, "p", vec)

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def total(self) -> float:
        """Sum of the marginals, accumulated left to right."""
        return sum(self.p)


@dataclass(frozen=True, eq=False)
class SecondMomentMatrix:
    """All pairwise success probabilities m[i][j] = P(X_i = 1, X_j = 1).

    Symmetric with m[i][i] = p_i.  Stored as a read-only float array.
    """

    m: np.ndarray

    def __init__(self, m: np.ndarray):
        arr = np.array(m, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidDistributionError("second-moment matrix must be square")
        if not np.array_equal(arr, arr.T):
            raise InvalidDistributionError("second-moment matrix must be symmetric")
        diag = np.diag(arr)
        if np.any(arr < 0.0) or np.any(
            arr > np.minimum.outer(diag, diag) + NORMALIZATION_TOL
        ):
            raise InvalidDistributionError(
                "pair probabilities must lie in [0, min(p_i, p_j)]"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "m", arr)

    @property
    def n(self) -> int:
        return self.m.shape[0]


@dataclass(frozen=True, eq=False)
class EtaMatrix:
    """Positive-part excess pair correlations and their total.

    eta[i][j] = max(0, P(X_i=1, X_j=1) - p_i p_j) for i != j, zero on the
    diagonal.  The total sums over ordered pairs, so every unordered pair
    contributes twice; downstream bounds rely on that convention.
    """

    eta: np.ndarray
    total: float

    def __init__(self, eta: np.ndarray, total: float):
        arr = np.array(eta, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "eta", arr)
        object.__setattr__(self, "total", float(total))


def marginals(joint: JointBernoulli) -> MarginalVector:
    """Extract P(X_i = 1) for each variable by scanning the atom table."""
    totals = [0.0] * joint.n
    for mask, prob in joint.atoms:
        i = 0
        while mask:
            if mask & 1:
                totals[i] += prob
            mask >>= 1
            i += 1
    return MarginalVector(totals)


def _bit_matrix(joint: JointBernoulli) -> np.ndarray:
    return np.array(
        [[(mask >> i) & 1 for i in range(joint.n)] for mask, _ in joint.atoms],
        dtype=np.float64,
    )


def second_moments(joint: JointBernoulli) -> SecondMomentMatrix:
    """Compute E[X_i X_j] = P(both set) for all pairs in one pass."""
    bits = _bit_matrix(joint)
    weights = np.array(joint.probs, dtype=np.float64)
    m = (bits * weights[:, None]).T @ bits
    # Mirror the upper triangle and pin the diagonal to the marginals so the
    # matrix is exactly symmetric with m[i][i] = p_i by definition.
    m = np.triu(m) + np.triu(m, 1).T
    np.fill_diagonal(m, marginals(joint).p)
    return SecondMomentMatrix(m)


def prob_hit(joint: JointBernoulli) -> float:
    """P(Z > 0): total mass off the zero mask, i.e. E[max_i X_i]."""
    total = 0.0
    for mask, prob in joint.atoms:
        if mask:
            total += prob
    return total


def prob_hit_independent(marginal: MarginalVector) -> float:
    """P(Z~ > 0) = 1 - prod_i (1 - p_i) for the independent version."""
    survive = 1.0
    for p in marginal.p:
        survive *= 1.0 - p
    return 1.0 - survive


def moments_of_z(joint: JointBernoulli) -> tuple[float, float]:
    """(E[Z], E[Z^2]) where Z is the number of variables that fire."""
    ez = 0.0
    ez2 = 0.0
    for mask, prob in joint.atoms:
        k = mask.bit_count()
        ez += k * prob
        ez2 += k * k * prob
    return ez, ez2


def is_pairwise_independent(joint: JointBernoulli, tol: float) -> bool:
    """True iff |P(X_i=1, X_j=1) - p_i p_j| <= tol for every pair i != j."""
    if tol < 0.0:
        raise ValueError(f"tolerance must be nonnegative, got {tol}")
    p = np.array(marginals(joint).p)
    gap = np.abs(second_moments(joint).m - np.outer(p, p))
    np.fill_diagonal(gap, 0.0)
    return bool(gap.max() <= tol)


def eta_matrix(joint: JointBernoulli) -> EtaMatrix:
    """Clip each pair's excess correlation at zero and total over ordered pairs."""
    p = np.array(marginals(joint).p)
    excess = second_moments(joint).m - np.outer(p, p)
    np.fill_diagonal(excess, 0.0)
    eta = np.maximum(excess, 0.0)
    return EtaMatrix(eta, float(eta.sum()))


def sample(joint: JointBernoulli, seed: int, count: int) -> list[int]:
    """Draw atom masks by inverse CDF over the ascending-mask table.

    Deterministic given the seed (PCG64 stream); disjoint seeds give
    independent streams, which is how parallel sampling should split work.
    """
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    cum = np.cumsum(np.array(joint.probs, dtype=np.float64))
    u = np.random.default_rng(seed).random(count)
    idx = np.searchsorted(cum, u, side="right")
    idx = np.minimum(idx, len(joint.atoms) - 1)
    mask_arr = np.empty(len(joint.atoms), dtype=object)
    for pos, (mask, _) in enumerate(joint.atoms):
        mask_arr[pos] = mask
    return mask_arr[idx].tolist()


def permute_variables(joint: JointBernoulli, perm: Sequence[int]) -> JointBernoulli:
    """Relabel variables: new variable perm[i] is old variable i."""
    if sorted(perm) != list(range(joint.n)):
        raise ValueError(f"perm must be a permutation of 0..{joint.n - 1}")
    table = {}
    for mask, prob in joint.atoms:
        new_mask = 0
        for i in range(joint.n):
            if (mask >> i) & 1:
                new_mask |= 1 << perm[i]
        table[new_mask] = prob
    return JointBernoulli(joint.n, table)
