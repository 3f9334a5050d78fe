"""Exact joint samplers of the limiting random sup-measures.

Each limit object is a decreasing sequence of Poisson levels
``gamma_ell**(-1/alpha)`` paired with i.i.d. random hitting sets; a query
set takes the level of the first atom whose hitting set meets it.  Since
levels are strictly decreasing, generation can stop as soon as every query
set has been hit, which makes the joint sample exact.

The hitting set consists of Q i.i.d. uniforms where Q has the block-size law
with infinite mean, so individual draws can exceed 10**12.  Points are never
enumerated: void patterns over the query atoms and the minimum of the
uniforms are both sampled in closed form given Q, in log space.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distributions import qbeta_sample
from .interval_sets import CapacityError, IntervalSet, atomize, normalize

__all__ = [
    "LimitAtom",
    "LimitSample",
    "StoppingBudgetError",
    "sample_rbeta_hits",
    "sample_rbeta_points",
    "sample_karlin",
    "sample_on_window",
    "sample_mstar",
    "sample_coupled",
    "sample_top_m_process",
    "limit_samples_csv",
]

DEFAULT_MAX_ATOMS = 10 ** 6
PATTERN_BUDGET = 20
POINT_ENUMERATION_CAP = 10 ** 8


class StoppingBudgetError(RuntimeError):
    """Atom budget exhausted before every query set was hit (diagnostic)."""

    def __init__(self, max_atoms, unhit):
        self.unhit = tuple(unhit)
        super().__init__(
            f"no hit after {max_atoms} atoms for query sets {self.unhit}; "
            "their hit probabilities may be vanishingly small"
        )


class _HitPatternSampler:
    """Joint void-pattern sampler over disjoint atoms with measures mu_j.

    Given Q, the probability that exactly the atoms in S see no point is
    sum over supersets T of S of (-1)**(|T|-|S|) * (1 - mu_T)**Q.  The
    superset sums for all 2**m patterns at once are a Moebius transform,
    after which the pattern is drawn categorically.
    """

    def __init__(self, beta: float, measures):
        mu = np.asarray(measures, dtype=float)
        if mu.ndim != 1:
            raise ValueError("measures must be a flat vector")
        m = mu.size
        if m > PATTERN_BUDGET:
            raise CapacityError(
                f"{m} atoms exceed the {PATTERN_BUDGET}-atom pattern budget"
            )
        if np.any(mu <= 0):
            raise ValueError("atom measures must be positive")
        if mu.sum() > 1.0 + 1e-9:
            raise ValueError("atom measures must sum to at most 1")
        self.beta = beta
        self.m = m
        # mu_sum[mask] = total measure of the atoms in the mask; a full
        # cover has mu_sum = 1 and log1p(-1) = -inf, which is the intended
        # zero void probability
        mu_sum = np.zeros(1)
        for j in range(m):
            mu_sum = np.concatenate([mu_sum, mu_sum + mu[j]])
        with np.errstate(divide="ignore"):
            self._log1m = np.log1p(-np.minimum(mu_sum, 1.0))
        self._log1m_list = self._log1m.tolist()
        self._full = (1 << m) - 1

    def void_pmf(self, q) -> np.ndarray:
        try:
            qf = float(q)
        except OverflowError:
            qf = 1e308  # (1-mu)**q is flush to zero either way
        with np.errstate(under="ignore"):
            p = np.exp(qf * self._log1m)
        # Moebius transform over the subset lattice: p[S] -= p[S | bit]
        for j in range(self.m):
            v = p.reshape(-1, 2, 1 << j)
            v[:, 0, :] -= v[:, 1, :]
        np.clip(p, 0.0, None, out=p)
        total = p.sum()
        if not 0.0 < total < np.inf:
            raise FloatingPointError("void-pattern pmf degenerated")
        return p / total

    def draw(self, rng: np.random.Generator):
        """Returns (q, hit_mask); bit j of hit_mask set when atom j is hit."""
        q = qbeta_sample(rng, self.beta)
        try:
            qf = float(q)
        except OverflowError:
            qf = 1e308
        if self.m == 1:
            hit = rng.random() < -math.expm1(qf * self._log1m_list[1])
            return q, int(hit)
        if self.m <= 6:
            # scalar math beats numpy dispatch at these sizes
            p = [math.exp(qf * l) for l in self._log1m_list]
            for j in range(self.m):
                bit = 1 << j
                for mask in range(len(p)):
                    if not mask & bit:
                        p[mask] -= p[mask | bit]
            total = 0.0
            for mask, v in enumerate(p):
                if v < 0.0:
                    p[mask] = 0.0
                total += p[mask]
            r = rng.random() * total
            acc = 0.0
            void_mask = self._full
            for mask, v in enumerate(p):
                acc += v
                if r < acc:
                    void_mask = mask
                    break
            return q, self._full & ~void_mask
        pmf = self.void_pmf(q)
        c = np.cumsum(pmf)
        void_mask = int(np.searchsorted(c, rng.random() * c[-1], side="right"))
        void_mask = min(void_mask, self._full)
        return q, self._full & ~void_mask


def sample_rbeta_hits(rng: np.random.Generator, beta: float, measures) -> np.ndarray:
    """Exact joint hit indicators of disjoint atoms under one hitting set.

    Draws Q from the block-size law and then the void pattern of the atoms
    under Q i.i.d. uniforms, without enumerating the points.  Marginally
    each atom is hit with probability mu_j**beta.
    """
    sampler = _HitPatternSampler(beta, measures)
    _, hit_mask = sampler.draw(rng)
    return np.array([(hit_mask >> j) & 1 == 1 for j in range(sampler.m)])


def sample_rbeta_points(rng: np.random.Generator, beta: float, cap: int = POINT_ENUMERATION_CAP) -> np.ndarray:
    """Explicit uniform points of one hitting set; only for modest Q.

    The block-size law has infinite mean, so enumeration is guarded by a
    hard cap and raises :class:`CapacityError` beyond it.
    """
    q = qbeta_sample(rng, beta)
    if q > cap:
        raise CapacityError(f"hitting set has {q} points, beyond the cap {cap}")
    return rng.random(q)


@dataclass(frozen=True)
class LimitAtom:
    index: int
    gamma: float
    value: float
    q: int
    hit_pattern: int  # bitmask over the query atoms


@dataclass(frozen=True)
class LimitSample:
    """Joint values of a limit sup-measure over a query family."""

    values: tuple
    atoms_used: int
    seed: int | None = None


def _split_family(family):
    family = list(family)
    if not family:
        raise ValueError("query family must be nonempty")
    active = [i for i, a in enumerate(family) if a.lebesgue() > 0.0]
    return family, active


@lru_cache(maxsize=256)
def _family_setup(beta: float, active_family: tuple):
    """Shared decomposition and pattern sampler for a repeated query family."""
    deco = atomize(active_family)
    sampler = _HitPatternSampler(beta, tuple(deco.measures))
    return sampler, tuple(deco.member_masks())


@lru_cache(maxsize=256)
def _coupled_setup(beta: float, active_family: tuple):
    """Full partition of [0, 1) (atoms plus gaps) in left-to-right order."""
    deco = atomize(active_family)
    union_all = normalize(
        [iv for a in deco.atoms for iv in a.intervals], deco.atoms[0].carrier
    )
    cells = list(deco.atoms) + [
        IntervalSet((piece,), union_all.carrier) for piece in union_all.complement().intervals
    ]
    order = sorted(range(len(cells)), key=lambda j: cells[j].intervals[0][0])
    rank_of = {old: new for new, old in enumerate(order)}
    cells = [cells[j] for j in order]
    member = [0] * len(active_family)
    for i, idxs in enumerate(deco.membership):
        for j in idxs:
            member[i] |= 1 << rank_of[j]
    sampler = _HitPatternSampler(beta, tuple(c.lebesgue() for c in cells))
    return sampler, tuple(member)


def sample_karlin(
    rng: np.random.Generator,
    alpha: float,
    beta: float,
    family,
    max_atoms: int = DEFAULT_MAX_ATOMS,
    collect_atoms: bool = False,
):
    """Exact joint sample of the limit sup-measure over a family on [0, 1].

    Levels arrive by exponential increments; hit patterns come from the
    atom decomposition of the family.  Generation stops once every
    positive-measure set is hit; later atoms have strictly smaller levels
    and cannot alter any coordinate.  Zero-measure sets are 0 outright
    (the hitting set is a.s. a finite point set).
    """
    family, active = _split_family(family)
    values = [0.0] * len(family)
    if not active:
        sample = LimitSample(values=tuple(values), atoms_used=0)
        return (sample, []) if collect_atoms else sample

    sampler, member = _family_setup(beta, tuple(family[i] for i in active))
    pending = set(range(len(active)))
    atoms = []
    gamma = 0.0
    used = 0
    while used < max_atoms:
        used += 1
        gamma += rng.standard_exponential()
        q, hit_mask = sampler.draw(rng)
        if collect_atoms:
            atoms.append(
                LimitAtom(index=used, gamma=gamma, value=gamma ** (-1.0 / alpha), q=q, hit_pattern=hit_mask)
            )
        if not hit_mask:
            continue
        level = gamma ** (-1.0 / alpha)
        for i in list(pending):
            if member[i] & hit_mask:
                values[active[i]] = level
                pending.discard(i)
        if not pending:
            sample = LimitSample(values=tuple(values), atoms_used=used)
            return (sample, atoms) if collect_atoms else sample
    raise StoppingBudgetError(max_atoms, tuple(active[i] for i in sorted(pending)))


@lru_cache(maxsize=256)
def _scaled_family(family: tuple, width: float) -> tuple:
    return tuple(a.rescaled_to_unit(width) for a in family)


def sample_on_window(
    rng: np.random.Generator,
    alpha: float,
    beta: float,
    family,
    width: float | None = None,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> LimitSample:
    """Sample over a family on [0, T] via self-similar scaling.

    The family is shrunk by 1/T onto the unit carrier, sampled there, and
    the values are scaled by T**(beta/alpha).
    """
    family = tuple(family)
    if not family:
        raise ValueError("query family must be nonempty")
    if width is None:
        width = family[0].carrier[1]
    if not width > 0:
        raise ValueError("window width must be positive")
    base = sample_karlin(rng, alpha, beta, _scaled_family(family, width), max_atoms=max_atoms)
    factor = width ** (beta / alpha)
    return LimitSample(values=tuple(v * factor for v in base.values), atoms_used=base.atoms_used)


def sample_mstar(
    rng: np.random.Generator,
    alpha: float,
    beta: float,
    family,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> LimitSample:
    """Variant sup-measure whose hitting set is the minimum uniform only.

    The minimum of Q uniforms is drawn directly as 1-(1-U)**(1/Q) in log
    space; an interval [a, b) is hit with probability b**beta - a**beta.
    """
    family, active = _split_family(family)
    values = [0.0] * len(family)
    if not active:
        return LimitSample(values=tuple(values), atoms_used=0)
    pending = set(active)
    gamma = 0.0
    used = 0
    while used < max_atoms:
        used += 1
        gamma += rng.standard_exponential()
        q = qbeta_sample(rng, beta)
        try:
            qf = float(q)
        except OverflowError:
            qf = 1e308
        x = -math.expm1(math.log1p(-rng.random()) / qf)
        touched = [i for i in pending if family[i].contains(x)]
        if not touched:
            continue
        level = gamma ** (-1.0 / alpha)
        for i in touched:
            values[i] = level
            pending.discard(i)
        if not pending:
            return LimitSample(values=tuple(values), atoms_used=used)
    raise StoppingBudgetError(max_atoms, tuple(sorted(pending)))


def sample_coupled(
    rng: np.random.Generator,
    alpha: float,
    beta: float,
    family,
    max_atoms: int = DEFAULT_MAX_ATOMS,
):
    """One Poisson realization driving both sup-measures; returns (M, M*).

    The unit carrier is partitioned into the query atoms plus the gaps, the
    joint void pattern is drawn over the whole partition, and the minimum
    uniform necessarily lies in the leftmost occupied cell.  Pathwise
    M(A) >= M*(A) by construction.
    """
    family, active = _split_family(family)
    values = [0.0] * len(family)
    star_values = [0.0] * len(family)
    if not active:
        return (
            LimitSample(values=tuple(values), atoms_used=0),
            LimitSample(values=tuple(star_values), atoms_used=0),
        )

    sampler, member = _coupled_setup(beta, tuple(family[i] for i in active))
    pending = set(range(len(active)))
    star_pending = set(range(len(active)))
    gamma = 0.0
    used = 0
    while used < max_atoms:
        used += 1
        gamma += rng.standard_exponential()
        _, hit_mask = sampler.draw(rng)
        if not hit_mask:
            continue
        level = gamma ** (-1.0 / alpha)
        min_bit = 1 << ((hit_mask & -hit_mask).bit_length() - 1)  # leftmost occupied cell
        for i in list(pending):
            if member[i] & hit_mask:
                values[active[i]] = level
                pending.discard(i)
        for i in list(star_pending):
            if member[i] & min_bit:
                star_values[active[i]] = level
                star_pending.discard(i)
        if not pending and not star_pending:
            return (
                LimitSample(values=tuple(values), atoms_used=used),
                LimitSample(values=tuple(star_values), atoms_used=used),
            )
    raise StoppingBudgetError(
        max_atoms, tuple(active[i] for i in sorted(pending | star_pending))
    )


def sample_top_m_process(
    rng: np.random.Generator,
    alpha: float,
    beta: float,
    m: int,
    family,
):
    """Values and per-set hit indicators of the first m limit atoms.

    This is the limit counterpart of the discrete top-m order statistics
    with their location sets, for distributional comparison.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    family, active = _split_family(family)
    hits_none = [False] * len(family)
    if not active:
        gammas = np.cumsum(rng.standard_exponential(m))
        return [(float(g ** (-1.0 / alpha)), tuple(hits_none)) for g in gammas]

    sampler, member = _family_setup(beta, tuple(family[i] for i in active))
    out = []
    gamma = 0.0
    for _ in range(m):
        gamma += rng.standard_exponential()
        _, hit_mask = sampler.draw(rng)
        hits = list(hits_none)
        for i, mask in enumerate(member):
            hits[active[i]] = bool(mask & hit_mask)
        out.append((gamma ** (-1.0 / alpha), tuple(hits)))
    return out


def limit_samples_csv(samples, fh=None) -> str:
    """CSV export of a batch: columns replica,set_id,value,atoms_used."""
    buf = fh if fh is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["replica", "set_id", "value", "atoms_used"])
    for replica, sample in enumerate(samples):
        for set_id, value in enumerate(sample.values):
            writer.writerow([replica, set_id, repr(value), sample.atoms_used])
    return buf.getvalue() if fh is None else ""
