"""Conservative hypothesis test: could a full hand count reverse the outcome?

The null hypothesis is that the summed per-precinct MRO reaches the margin
threshold (1 for relative overstatements), i.e. that the apparent outcome is
wrong.  The test statistic is the maximum weighted MRO observed in the audit
sample.  Given that observation, `taint_count` asks: how many precincts, at
minimum, must hide errors above the sample-implied cap for the null to
remain possible?  The P-value is then the worst-case chance that a random
sample of the size actually drawn missed all of those precincts.

All intermediates are exact rationals; only the final P-value is a float.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import comb, sqrt
from typing import Literal, NamedTuple

import numpy as np

from .core import ContestSetup, AuditRecord, PrecinctReturns, compute_totals, validate_audit
from .discrepancy import (
    PrecinctDiscrepancy,
    pairwise_overstatement,
    precinct_bound,
    precinct_mro,
)
from .errors import (
    EmptySample,
    InconsistentBounds,
    InvalidCount,
    UnknownPrecinct,
    ValidationError,
    ZeroBoundWithTaintWeight,
)

Rational = Fraction | int


@dataclass(frozen=True)
class WeightFunction:
    """Monotone per-precinct weighting of the observed MRO.

    ``identity`` scores a precinct by its MRO directly; ``taint`` scores it
    by MRO divided by the precinct's a priori bound, so precincts are
    compared by how much of their error budget they used.
    """

    kind: Literal["identity", "taint"]

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "taint"):
            raise ValidationError(f"unknown weight function {self.kind!r}")

    def apply(self, mro: Fraction, bound: Fraction) -> Fraction:
        if self.kind == "identity":
            return mro
        if bound == 0:
            raise ZeroBoundWithTaintWeight(
                "taint weight undefined for a precinct with bound 0"
            )
        return mro / bound

    def cap(self, threshold: Rational, bound: Fraction) -> Fraction:
        """Largest MRO a precinct can hold while its weighted value stays <= threshold."""
        if self.kind == "identity":
            return Fraction(threshold)
        return Fraction(threshold) * bound


IDENTITY = WeightFunction("identity")
TAINT = WeightFunction("taint")


@dataclass(frozen=True)
class SamplingDesign:
    """How the audit sample relates to the precinct population."""

    method: Literal["with_replacement", "simple_random_sample"]
    draws: int

    def __post_init__(self) -> None:
        if self.method not in ("with_replacement", "simple_random_sample"):
            raise ValidationError(f"unknown sampling method {self.method!r}")
        if self.draws < 1:
            raise ValidationError("sampling design needs at least one draw")


@dataclass(frozen=True)
class TestConfig:
    """Weight, sampling design, and the threshold the null must reach."""

    __test__ = False  # keep pytest from collecting this as a test class

    weight: WeightFunction
    sampling: SamplingDesign
    margin_threshold: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.margin_threshold <= 0:
            raise ValidationError("margin threshold must be positive")


@dataclass(frozen=True)
class RiskReport:
    """Everything needed to reproduce one risk computation."""

    observed_statistic: Fraction
    taint_count: int
    population_size: int
    effective_n: int
    p_value: float
    config: TestConfig
    sample_size: int
    null_infeasible: bool = False


def observed_statistic(
    sample: Sequence[PrecinctDiscrepancy], weight: WeightFunction
) -> Fraction:
    """Maximum weighted MRO over the sampled precincts.

    Raises:
        EmptySample: no precincts were sampled.
        ZeroBoundWithTaintWeight: taint weighting hit a zero bound.
    """
    if not sample:
        raise EmptySample("observed statistic needs at least one sampled precinct")
    return max(weight.apply(d.max_overstatement, d.bound) for d in sample)


def taint_count(
    bounds: Sequence[Rational],
    threshold: Rational,
    weight: WeightFunction = IDENTITY,
    margin_threshold: Rational = Fraction(1),
) -> int:
    """Minimum number of precincts that must exceed the sample-implied cap.

    Worst-case allocation: the adversary gives t precincts their full bound
    (choosing those with the largest bounds, which maximises the achievable
    sum for either weight kind) and every other precinct the largest MRO
    whose weighted value stays at or below ``threshold``.  The returned t is
    the smallest count for which that allocation reaches
    ``margin_threshold``.  Returns ``len(bounds) + 1`` as a sentinel when
    even t = N cannot reach it (the null is impossible and the P-value is 0).

    Raises:
        InconsistentBounds: a bound is negative.
    """
    bounds = [Fraction(b) for b in bounds]
    for bound in bounds:
        if bound < 0:
            raise InconsistentBounds(f"negative per-precinct bound {bound}")
    threshold = Fraction(threshold)
    target = Fraction(margin_threshold)
    if weight.kind == "taint" and threshold > 1:
        # A weighted observation above 1 exceeds every bound; cap at the bound.
        threshold = Fraction(1)

    ordered = sorted(bounds, reverse=True)
    n = len(ordered)
    caps = [weight.cap(threshold, bound) for bound in ordered]
    achievable = sum(caps, Fraction(0))
    if achievable >= target:
        return 0
    for t, (bound, cap) in enumerate(zip(ordered, caps), start=1):
        achievable += bound - cap
        if achievable >= target:
            return t
    return n + 1


def p_value(taint_count: int, population: int, sampling: SamplingDesign) -> float:
    """Chance a clean sample misses every one of `taint_count` precincts.

    With replacement this is ((N - t) / N) ** n; for a simple random sample
    it is the hypergeometric probability of drawing zero tainted precincts.

    Raises:
        InvalidCount: t outside [0, N], or an SRS larger than the population.
    """
    if not 0 <= taint_count <= population:
        raise InvalidCount(
            f"taint count {taint_count} outside [0, {population}]"
        )
    n = sampling.draws
    if sampling.method == "with_replacement":
        return float(Fraction(population - taint_count, population) ** n)
    if n > population:
        raise InvalidCount(
            f"cannot draw {n} of {population} precincts without replacement"
        )
    clean = population - taint_count
    if n > clean:
        return 0.0
    return float(Fraction(comb(clean, n), comb(population, n)))


class MonteCarloResult(NamedTuple):
    estimate: float
    standard_error: float


def monte_carlo_pvalue(
    taint_count: int,
    population: int,
    sampling: SamplingDesign,
    replications: int,
    seed: int,
) -> MonteCarloResult:
    """Simulation check of :func:`p_value`; deterministic for a given seed.

    Each replication draws a sample from a population in which exactly
    ``taint_count`` precincts are tainted and records whether the sample
    missed all of them.  With-replacement draws are simulated literally;
    for a simple random sample the number of tainted precincts drawn is
    simulated hypergeometrically.
    """
    if replications < 1:
        raise ValidationError("need at least one replication")
    if not 0 <= taint_count <= population:
        raise InvalidCount(
            f"taint count {taint_count} outside [0, {population}]"
        )
    n = sampling.draws
    if sampling.method == "simple_random_sample" and n > population:
        raise InvalidCount(
            f"cannot draw {n} of {population} precincts without replacement"
        )
    rng = np.random.default_rng(seed)
    chunk = 100_000
    misses = 0
    remaining = replications
    while remaining > 0:
        size = min(chunk, remaining)
        if sampling.method == "with_replacement":
            draws = rng.integers(0, population, size=(size, n))
            tainted_in_sample = (draws < taint_count).any(axis=1)
            misses += int(np.count_nonzero(~tainted_in_sample))
        else:
            counts = rng.hypergeometric(
                taint_count, population - taint_count, n, size=size
            )
            misses += int(np.count_nonzero(counts == 0))
        remaining -= size
    estimate = misses / replications
    stderr = sqrt(estimate * (1.0 - estimate) / replications)
    return MonteCarloResult(estimate, stderr)


def run_test(
    setup: ContestSetup,
    returns: Sequence[PrecinctReturns],
    audits: Sequence[AuditRecord],
    config: TestConfig,
    bounds: Mapping[str, Fraction] | None = None,
) -> RiskReport:
    """Full pipeline: discrepancies -> statistic -> taint count -> P-value.

    ``bounds`` maps every precinct id to its a priori MRO bound; when omitted
    it is computed from the returns.  The audited precincts must be a subset
    of the population.

    When even a fully adversarial population cannot reach the margin
    threshold, the report carries ``null_infeasible=True``, the taint count
    saturates at the population size, and the P-value is 0.
    """
    totals = compute_totals(setup, returns)
    by_id = {ret.precinct_id: ret for ret in returns}
    if bounds is None:
        bounds = {
            ret.precinct_id: precinct_bound(ret, totals.pairwise_margins)
            for ret in returns
        }
    else:
        missing = set(by_id) - set(bounds)
        if missing:
            raise ValidationError(
                f"bounds missing for {len(missing)} precinct(s), "
                f"e.g. {sorted(missing)[:3]}"
            )

    discrepancies = []
    for audit in audits:
        ret = by_id.get(audit.precinct_id)
        if ret is None:
            raise UnknownPrecinct(
                f"audited precinct {audit.precinct_id!r} not in the returns"
            )
        validate_audit(setup, ret, audit)
        pairwise = pairwise_overstatement(ret, audit, totals.pairwise_margins)
        discrepancies.append(
            PrecinctDiscrepancy(
                precinct_id=audit.precinct_id,
                pairwise=pairwise,
                max_overstatement=precinct_mro(pairwise),
                bound=Fraction(bounds[audit.precinct_id]),
            )
        )

    statistic = observed_statistic(discrepancies, config.weight)
    population = setup.precinct_count
    raw_count = taint_count(
        [bounds[ret.precinct_id] for ret in returns],
        statistic,
        config.weight,
        config.margin_threshold,
    )
    infeasible = raw_count > population
    count = min(raw_count, population)
    return RiskReport(
        observed_statistic=statistic,
        taint_count=count,
        population_size=population,
        effective_n=config.sampling.draws,
        p_value=p_value(count, population, config.sampling),
        config=config,
        sample_size=len(discrepancies),
        null_infeasible=infeasible,
    )
