"""Closed-form evaluation of the limit laws.

Every joint law of the limit sup-measure reduces to a Choquet integral of a
max of weighted indicators against the extremal coefficient functional
``theta(K) = Leb(K)**beta``.  Comonotonic additivity turns that integral
into a layer cake over the sorted weights, which is what
:func:`tail_dependence` computes; everything else here is a reparametrized
call into it, plus the occupancy-pattern limits and the functional of the
first-occurrence variant.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .distributions import gamma_fn
from .interval_sets import IntervalSet, atomize

__all__ = [
    "ChoquetQuery",
    "PatternQuery",
    "theta",
    "tail_dependence",
    "joint_cdf",
    "extremal_cdf",
    "tau_z",
    "pattern_limit",
    "mstar_theta",
    "mstar_theta_set",
]

import math


def _check_beta(beta: float):
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")


def theta(k: IntervalSet, beta: float) -> float:
    """Extremal coefficient of a set: Leb(K)**beta, with 0**beta = 0."""
    _check_beta(beta)
    leb = k.lebesgue()
    return leb ** beta if leb > 0 else 0.0


@dataclass(frozen=True)
class ChoquetQuery:
    """A finite family of (set, threshold) pairs plus the two indices."""

    pairs: tuple  # of (IntervalSet, z > 0)
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        _check_beta(self.beta)
        if not self.pairs:
            raise ValueError("query must contain at least one pair")
        for _, z in self.pairs:
            if not z > 0:
                raise ValueError(f"thresholds must be positive, got {z}")

    @property
    def weights(self) -> tuple:
        return tuple(z ** -self.alpha for _, z in self.pairs)

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "pairs": [{"set": a.to_json(), "z": z} for a, z in self.pairs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChoquetQuery":
        for field in ("alpha", "beta", "pairs"):
            if field not in obj:
                raise ValueError(f"query JSON is missing field {field!r}")
        try:
            pairs = tuple(
                (IntervalSet.from_json(p["set"]), float(p["z"])) for p in obj["pairs"]
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed query pairs: field {exc}") from exc
        return cls(pairs=pairs, alpha=float(obj["alpha"]), beta=float(obj["beta"]))


@dataclass(frozen=True)
class PatternQuery:
    """Occupancy pattern: which sets must be hit (1) and which missed (0)."""

    family: tuple  # of IntervalSet
    delta: tuple  # 0/1, at least one 1

    def __post_init__(self):
        if len(self.family) != len(self.delta):
            raise ValueError("delta length must match the family")
        if any(d not in (0, 1) for d in self.delta):
            raise ValueError("delta entries must be 0 or 1")
        if not any(self.delta):
            raise ValueError("delta must contain at least one 1")


def _union_measures(family):
    """Atom measures and per-set atom masks; all combinatorics route here."""
    deco = atomize(family)
    measures = deco.measures
    masks = deco.member_masks()

    def leb_of_mask(mask: int) -> float:
        total = 0.0
        j = 0
        while mask:
            if mask & 1:
                total += measures[j]
            mask >>= 1
            j += 1
        return total

    return masks, leb_of_mask


def tail_dependence(q: ChoquetQuery) -> float:
    """Choquet integral of max_i w_i 1_{A_i} against theta, by layer cake.

    Weights w_i = z_i**-alpha are sorted decreasingly and the integral is
    sum_k (w_(k) - w_(k+1)) * Leb(A_(1) u ... u A_(k))**beta; ties collapse
    automatically because their increments vanish.
    """
    masks, leb_of_mask = _union_measures([a for a, _ in q.pairs])
    order = sorted(range(len(q.pairs)), key=lambda i: -q.weights[i])
    w = [q.weights[i] for i in order] + [0.0]
    total = 0.0
    cum = 0
    for k, i in enumerate(order):
        cum |= masks[i]
        if w[k] > w[k + 1]:
            total += (w[k] - w[k + 1]) * theta_measure(leb_of_mask(cum), q.beta)
    return float(total)


def theta_measure(leb: float, beta: float) -> float:
    return leb ** beta if leb > 0 else 0.0


def joint_cdf(q: ChoquetQuery) -> float:
    """P(M(A_i) <= z_i for all i) = exp(-tail_dependence)."""
    return math.exp(-tail_dependence(q))


def extremal_cdf(times, levels, alpha: float, beta: float) -> float:
    """Joint CDF of the extremal process t -> M([0, t]) at increasing times.

    Evaluates the layer cake over the nested family {[0, t_k)}; the d = 1
    marginal is Frechet with scale t**beta.
    """
    times = [float(t) for t in times]
    levels = [float(x) for x in levels]
    if len(times) != len(levels):
        raise ValueError("times and levels must have equal length")
    if not times:
        raise ValueError("at least one time is required")
    if times[0] <= 0 or any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise ValueError("times must be positive and strictly increasing")
    carrier = (0.0, times[-1])
    pairs = tuple(
        (IntervalSet(((0.0, t),), carrier), x) for t, x in zip(times, levels)
    )
    return joint_cdf(ChoquetQuery(pairs=pairs, alpha=alpha, beta=beta))


def tau_z(t: float, z: float, alpha: float, beta: float) -> float:
    """Non-ergodicity statistic of the unit max-increment process.

    tau_z(t) = log P(increment at 0 <= z, increment at t <= z)
               - 2 log P(increment <= z), computed on the window [0, t+1]
    (the law is translation invariant).  For t > 1 this is the constant
    (2 - 2**beta) * z**-alpha > 0, which is what rules out ergodicity.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if not z > 0:
        raise ValueError(f"z must be positive, got {z}")
    carrier = (0.0, t + 1.0)
    a1 = IntervalSet(((0.0, 1.0),), carrier)
    a2 = IntervalSet(((t, t + 1.0),), carrier)
    single = tail_dependence(ChoquetQuery(pairs=((a1, z),), alpha=alpha, beta=beta))
    joint = tail_dependence(ChoquetQuery(pairs=((a1, z), (a2, z)), alpha=alpha, beta=beta))
    return 2.0 * single - joint


def pattern_limit(p: PatternQuery, beta: float) -> float:
    """Limit of the normalized occupancy-pattern counts.

    Inclusion-exclusion over the hit events followed by termwise
    integration gives gamma(1-beta) * sum over S within the hit set of
    (-1)**(|S|+1) * Leb(union of S and the missed sets)**beta, the empty S
    contributing -Leb(union of the missed sets)**beta (0 when all hit).
    """
    _check_beta(beta)
    masks, leb_of_mask = _union_measures(list(p.family))
    hit = [k for k, d in enumerate(p.delta) if d == 1]
    miss_mask = 0
    for k, d in enumerate(p.delta):
        if d == 0:
            miss_mask |= masks[k]
    total = 0.0
    for size in range(0, len(hit) + 1):
        sign = 1.0 if size % 2 == 1 else -1.0
        for subset in combinations(hit, size):
            mask = miss_mask
            for k in subset:
                mask |= masks[k]
            total += sign * theta_measure(leb_of_mask(mask), beta)
    return float(gamma_fn(1.0 - beta) * total)


def mstar_theta(a: float, b: float, beta: float) -> float:
    """Functional of the first-occurrence variant on [a, b): b**beta - a**beta.

    Equals the Lebesgue measure of the image of [a, b] under t -> t**beta,
    and agrees with theta on [0, b).
    """
    _check_beta(beta)
    if a < 0 or a >= b:
        raise ValueError(f"need 0 <= a < b, got a={a}, b={b}")
    return b ** beta - a ** beta


def mstar_theta_set(s: IntervalSet, beta: float) -> float:
    """Variant functional of a finite union: additive over its intervals."""
    _check_beta(beta)
    return sum(mstar_theta(lo, hi, beta) for lo, hi in s.intervals)
