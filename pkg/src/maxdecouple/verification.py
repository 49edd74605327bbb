"""Randomized property battery over every module's invariants.

The battery drives randomized instances (joints, nonnegative joints,
marginal vectors) plus the deterministic named families through every
universal and conditional inequality in the package.  All randomness flows
from one seed through spawned child streams, so a given (seed, trials)
pair always produces byte-identical results; a failing instance is
serialized as JSON so it can be replayed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import bounds, continuous, optimize
from .constructions import (
    affine_hash,
    comonotone,
    conjectured_extremal,
    one_hot_uniform,
    product,
    xor_parity,
)
from .continuous import NonnegJoint
from .dist import (
    JointBernoulli,
    MarginalVector,
    eta_matrix,
    is_pairwise_independent,
    marginals,
    moments_of_z,
    permute_variables,
    prob_hit,
    prob_hit_independent,
    sample,
    second_moments,
)

MAX_COUNTEREXAMPLES = 3


@dataclass
class PropertyResult:
    name: str
    passes: int = 0
    failures: int = 0
    counterexamples: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    @property
    def total(self) -> int:
        return self.passes + self.failures

    def record(self, ok: bool, instance: str | None = None) -> None:
        if ok:
            self.passes += 1
        else:
            self.failures += 1
            if instance and len(self.counterexamples) < MAX_COUNTEREXAMPLES:
                self.counterexamples.append(instance)


def random_joint(
    rng: np.random.Generator, max_n: int = 10, max_support: int = 16
) -> JointBernoulli:
    """Sparse random joint: arbitrary dependence, any correlation sign."""
    n = int(rng.integers(1, max_n + 1))
    size = 1 << n
    support = int(rng.integers(1, min(size, max_support) + 1))
    masks = rng.choice(size, size=support, replace=False)
    weights = rng.random(support) + 1e-3  # keep atoms away from zero mass
    probs = weights / weights.sum()
    return JointBernoulli(n, {int(m): float(p) for m, p in zip(masks, probs)})


def random_nonneg_joint(
    rng: np.random.Generator, max_n: int = 6, max_support: int = 8
) -> NonnegJoint:
    """Random finite-support nonnegative joint; lattice values force ties."""
    n = int(rng.integers(1, max_n + 1))
    support = int(rng.integers(1, max_support + 1))
    rows = []
    for _ in range(support):
        values = tuple(
            float(rng.integers(0, 4)) * 0.5
            if rng.random() < 0.5
            else float(rng.uniform(0.0, 3.0))
            for _ in range(n)
        )
        rows.append(values)
    weights = rng.random(support) + 1e-3
    probs = weights / weights.sum()
    return NonnegJoint(n, [(v, float(p)) for v, p in zip(rows, probs)])


def random_marginals(rng: np.random.Generator, max_n: int = 20) -> MarginalVector:
    n = int(rng.integers(1, max_n + 1))
    return MarginalVector([float(x) for x in rng.random(n)])


def _joint_json(joint: JointBernoulli) -> str:
    return json.dumps(joint.to_json_dict(), separators=(",", ":"))


def _nonneg_json(joint: NonnegJoint) -> str:
    return json.dumps(joint.to_json_dict(), separators=(",", ":"))


def _family_instances() -> list[JointBernoulli]:
    """Named families, including the maximally positively dependent ones."""
    instances = []
    for n in range(3, 13):
        instances.append(conjectured_extremal(n))
    for k in range(1, 5):
        instances.append(xor_parity(k))
    for q, m in ((2, 1), (3, 1), (3, 2), (5, 2), (7, 3), (11, 4), (13, 5)):
        instances.append(affine_hash(q, q, m))
    for n in (1, 2, 3, 8, 16):
        instances.append(one_hot_uniform(n))
    for n, eps in ((2, 0.1), (8, 1e-6), (5, 0.0), (5, 1.0), (3, 0.5)):
        instances.append(comonotone(n, eps))
    instances.append(product(MarginalVector((0.3, 0.7))))
    instances.append(product(MarginalVector((0.5,) * 4)))
    return instances


def _pairwise_independent_families() -> list[JointBernoulli]:
    instances = []
    for n in range(3, 13):
        instances.append(conjectured_extremal(n))
    for k in range(1, 5):
        instances.append(xor_parity(k))
    for q, m in ((2, 1), (3, 1), (3, 2), (5, 2), (7, 3), (11, 4), (13, 5), (31, 11)):
        instances.append(affine_hash(min(q, 8), q, m))
    instances.append(product(MarginalVector((0.25, 0.5, 0.75))))
    return instances


def _check_joint_properties(
    joint: JointBernoulli, rng: np.random.Generator, tallies: dict[str, PropertyResult]
) -> None:
    doc = _joint_json(joint)
    report = bounds.full_report(joint)
    m = report.M
    ez, ez2 = moments_of_z(joint)

    tallies["prob-hit-range-and-union-bound"].record(
        0.0 <= m <= 1.0 + bounds.VERDICT_SLACK and m <= ez + bounds.VERDICT_SLACK, doc
    )

    # E[Z^2] recomputed from the pair moments must match the atom scan.
    sm = second_moments(joint).m
    p = marginals(joint).p
    recomposed = sum(p) + 2.0 * sum(
        sm[i][j] for i in range(joint.n) for j in range(i + 1, joint.n)
    )
    tallies["second-moment-identity"].record(abs(ez2 - recomposed) <= 1e-10, doc)

    tallies["pinelis-universal"].record(report.verdicts["pinelis"], doc)
    tallies["paley-zygmund-universal"].record(report.verdicts["paley_zygmund"], doc)
    tallies["eta-bound-universal"].record(report.verdicts["eta_lower"], doc)
    tallies["main-bound-under-negative-covariance"].record(
        report.verdicts["main_lower"], doc
    )
    tallies["ratio-cap"].record(
        report.M_tilde <= joint.n * m + bounds.VERDICT_SLACK, doc
    )

    perm = [int(x) for x in rng.permutation(joint.n)]
    relabeled = permute_variables(joint, perm)
    for tol in (1e-12, 1e-6):
        if is_pairwise_independent(joint, tol) != is_pairwise_independent(
            relabeled, tol
        ):
            tallies["pairwise-flag-permutation-invariant"].record(False, doc)
            break
    else:
        tallies["pairwise-flag-permutation-invariant"].record(True, doc)

    h = eta_matrix(joint).total
    if h == 0.0:
        main = bounds.main_lower_check(joint)
        eta = bounds.eta_lower_check(joint)
        tallies["eta-reduces-to-main-when-h-zero"].record(
            abs(eta.rhs - main.rhs) <= 1e-12, doc
        )
    else:
        tallies["eta-reduces-to-main-when-h-zero"].record(True, doc)

    embedded = continuous.bernoulli_embedding(joint)
    check = continuous.decoupling_check_cont(embedded)
    mtilde = prob_hit_independent(marginals(joint))
    main = bounds.main_lower_check(joint)
    agreed = (
        check.emax == m
        and check.emax_ind == mtilde
        and check.upper_holds == report.verdicts["pinelis"]
        and check.pairwise_ok == main.applicable
    )
    tallies["bernoulli-embedding-commutes"].record(agreed, doc)


def _strictly_increasing_map(rng: np.random.Generator):
    kind = int(rng.integers(0, 3))
    if kind == 0:
        a = float(rng.uniform(0.5, 2.0))
        b = float(rng.uniform(0.0, 1.0))
        return lambda v: a * v + b
    if kind == 1:
        return lambda v: v * v
    return lambda v: v / (1.0 + v)


def _check_nonneg_properties(
    joint: NonnegJoint, rng: np.random.Generator, tallies: dict[str, PropertyResult]
) -> None:
    doc = _nonneg_json(joint)
    try:
        check = continuous.decoupling_check_cont(joint)
    except RuntimeError:
        # expected_max's internal tail-integral cross-check tripped
        tallies["layer-cake-identity"].record(False, doc)
        return
    tallies["layer-cake-identity"].record(True, doc)
    tallies["continuous-upper-universal"].record(check.upper_holds, doc)
    tallies["continuous-lower-under-orthant"].record(
        check.lower_holds if check.pairwise_ok else True, doc
    )

    f = _strictly_increasing_map(rng)
    mapped = NonnegJoint(
        joint.n, [(tuple(f(v) for v in vec), p) for vec, p in joint.atoms]
    )
    same = continuous.pairwise_orthant_ok(mapped) == check.pairwise_ok
    delta = float(rng.uniform(0.4, 1.1))
    floored = NonnegJoint(
        joint.n,
        [
            (tuple(math.floor(v / delta) * delta for v in vec), p)
            for vec, p in joint.atoms
        ],
    )
    weak_ok = (not check.pairwise_ok) or continuous.pairwise_orthant_ok(floored)
    tallies["monotone-transform-preserves-orthant-flag"].record(same and weak_ok, doc)


def _check_family_properties(tallies: dict[str, PropertyResult]) -> None:
    for joint in _family_instances():
        doc = _joint_json(joint)
        report = bounds.full_report(joint)
        tallies["families-universal-verdicts"].record(report.universal_ok, doc)

    for joint in _pairwise_independent_families():
        doc = _joint_json(joint)
        tallies["families-pairwise-independent"].record(
            is_pairwise_independent(joint, 1e-12), doc
        )
        main = bounds.main_lower_check(joint)
        tallies["families-half-lower-bound"].record(
            main.applicable and main.holds, doc
        )

    for n in range(3, 13):
        joint = conjectured_extremal(n)
        p = marginals(joint)
        target = 1.0 / (n - 1)
        tallies["extremal-marginals"].record(
            max(abs(x - target) for x in p.p) <= 1e-12, _joint_json(joint)
        )
    for n in (1, 2, 3, 8, 16):
        joint = one_hot_uniform(n)
        tallies["one-hot-hit-probability-exactly-one"].record(
            prob_hit(joint) == 1.0, _joint_json(joint)
        )


def _check_lp_properties(tallies: dict[str, PropertyResult]) -> None:
    for n in (2, 3, 4, 5, 6):
        candidates = [Fraction(1, 10), Fraction(3, 10), Fraction(1, 2), Fraction(1, n - 1)]
        for p in dict.fromkeys(candidates):
            tag = f'{{"lp":{{"n":{n},"p":"{p}"}}}}'
            joint = product(MarginalVector((float(p),) * n))
            marg = marginals(joint).p
            sm = second_moments(joint).m
            pf, p2f = float(p), float(p) * float(p)
            feasible = max(abs(x - pf) for x in marg) <= 1e-12 and all(
                abs(sm[i][j] - p2f) <= 1e-12
                for i in range(n)
                for j in range(i + 1, n)
            )
            solved = optimize.solve(optimize.build_exchangeable_lp(n, p))
            solved_full = optimize.solve(optimize.build_full_lp(n, p))
            tallies["lp-product-feasibility"].record(
                feasible
                and solved.status == "optimal"
                and solved_full.status == "optimal",
                tag,
            )

    for n in (3, 4, 5):
        for p in (Fraction(1, n - 1), Fraction(3, 10)):
            for mode in optimize.MODES:
                tag = f'{{"lp":{{"n":{n},"p":"{p}","mode":"{mode}"}}}}'
                full = optimize.solve(optimize.build_full_lp(n, p, mode))
                exch = optimize.solve(optimize.build_exchangeable_lp(n, p, mode))
                tallies["lp-reduction-soundness"].record(
                    full.status == "optimal"
                    and exch.status == "optimal"
                    and abs(full.objective - exch.objective) <= 1e-8,
                    tag,
                )
                if mode == "pairwise_equality":
                    witness = optimize.expand_exchangeable(n, exch.weights_exact)
                    tallies["lp-witness-roundtrip"].record(
                        abs(prob_hit(witness) - exch.objective) <= 1e-9
                        and is_pairwise_independent(witness, 1e-12),
                        tag,
                    )
                    s = n * float(p)
                    pz = s * s / (s + s * s) if s > 0 else 0.0
                    half = 0.5 * prob_hit_independent(
                        MarginalVector((float(p),) * n)
                    )
                    tallies["lp-objective-bound-consistency"].record(
                        exch.objective >= pz - 1e-9
                        and exch.objective >= half - 1e-9,
                        tag,
                    )
            eq = optimize.solve(optimize.build_exchangeable_lp(n, p))
            relaxed = optimize.solve(
                optimize.build_exchangeable_lp(n, p, "negative_covariance")
            )
            tallies["lp-relaxation-never-larger"].record(
                relaxed.objective_exact <= eq.objective_exact,
                f'{{"lp":{{"n":{n},"p":"{p}"}}}}',
            )


def _check_sampling(tallies: dict[str, PropertyResult]) -> None:
    joint = conjectured_extremal(4)
    first = sample(joint, seed=7, count=2000)
    second = sample(joint, seed=7, count=2000)
    tallies["sample-reproducible"].record(first == second, _joint_json(joint))
    point = JointBernoulli(2, {1: 1.0})
    tallies["sample-point-mass"].record(
        sample(point, seed=0, count=50) == [1] * 50, _joint_json(point)
    )


PROPERTY_NAMES = (
    "prob-hit-range-and-union-bound",
    "second-moment-identity",
    "pinelis-universal",
    "paley-zygmund-universal",
    "eta-bound-universal",
    "main-bound-under-negative-covariance",
    "ratio-cap",
    "pairwise-flag-permutation-invariant",
    "eta-reduces-to-main-when-h-zero",
    "bernoulli-embedding-commutes",
    "g-nonnegative",
    "layer-cake-identity",
    "continuous-upper-universal",
    "continuous-lower-under-orthant",
    "monotone-transform-preserves-orthant-flag",
    "families-universal-verdicts",
    "families-pairwise-independent",
    "families-half-lower-bound",
    "extremal-marginals",
    "one-hot-hit-probability-exactly-one",
    "lp-product-feasibility",
    "lp-reduction-soundness",
    "lp-witness-roundtrip",
    "lp-objective-bound-consistency",
    "lp-relaxation-never-larger",
    "sample-reproducible",
    "sample-point-mass",
)


def run_battery(seed: int, trials: int) -> list[PropertyResult]:
    """Run every property `trials` times (randomized ones) and tally."""
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    tallies = {name: PropertyResult(name) for name in PROPERTY_NAMES}
    seq = np.random.SeedSequence(seed)
    joint_rng, nonneg_rng, marg_rng = (
        np.random.default_rng(s) for s in seq.spawn(3)
    )

    for _ in range(trials):
        _check_joint_properties(random_joint(joint_rng), joint_rng, tallies)
    for _ in range(trials):
        _check_nonneg_properties(random_nonneg_joint(nonneg_rng), nonneg_rng, tallies)
    for _ in range(trials):
        marg = random_marginals(marg_rng)
        g, _ = bounds.g_function(marg)
        tallies["g-nonnegative"].record(
            g >= -1e-12, json.dumps({"kind": "marginals", "p": list(marg.p)})
        )

    _check_family_properties(tallies)
    _check_lp_properties(tallies)
    _check_sampling(tallies)
    return [tallies[name] for name in PROPERTY_NAMES]


def format_battery(seed: int, trials: int, results: list[PropertyResult]) -> str:
    """Human-readable, byte-deterministic battery summary."""
    width = max(len(r.name) for r in results)
    lines = [f"verification battery: seed={seed} trials={trials}"]
    for r in results:
        status = "ok  " if r.ok else "FAIL"
        lines.append(f"{status} {r.name.ljust(width)} {r.passes}/{r.total}")
        for doc in r.counterexamples:
            lines.append(f"     counterexample: {doc}")
    bad = sum(1 for r in results if not r.ok)
    total = sum(r.total for r in results)
    if bad:
        lines.append(f"{bad} properties FAILED out of {len(results)} ({total} checks)")
    else:
        lines.append(f"all {len(results)} properties passed ({total} checks)")
    return "\n".join(lines) + "\n"
