"""Domain model for contests, precinct returns, and exact vote arithmetic.

This module is the single source of truth for tabulation: candidate totals,
the apparent winner/loser partition, pairwise margins, candidate pooling and
full-hand-tally comparison.  Everything here is exact integer arithmetic;
ratios appear only in :mod:`mro_audit.discrepancy`.

All values are immutable after construction and all operations are pure, so
they are safe to share across threads.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .errors import (
    AmbiguousOutcome,
    CandidateMismatch,
    IncompleteTally,
    PoolContainsWinner,
    UnknownPrecinct,
    ValidationError,
)

Candidate = str
Pair = tuple[Candidate, Candidate]


@dataclass(frozen=True)
class ContestSetup:
    """Static description of a contest.

    Attributes:
        candidates: ordered, unique candidate identifiers (write-ins are
            modelled as an ordinary candidate so pooling handles them
            uniformly).
        votes_per_voter: how many candidates each voter may vote for; the
            contest seats exactly this many winners.
        precinct_count: number of precincts reporting in this contest.
    """

    candidates: tuple[Candidate, ...]
    votes_per_voter: int
    precinct_count: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if len(self.candidates) < 2:
            raise ValidationError("a contest needs at least two candidates")
        if len(set(self.candidates)) != len(self.candidates):
            raise ValidationError("candidate identifiers must be unique")
        if not 1 <= self.votes_per_voter < len(self.candidates):
            raise ValidationError(
                f"votes_per_voter must be in [1, {len(self.candidates) - 1}], "
                f"got {self.votes_per_voter}"
            )
        if self.precinct_count < 1:
            raise ValidationError("precinct_count must be at least 1")


@dataclass(frozen=True)
class PrecinctReturns:
    """Machine counts for one precinct.

    ``ballot_bound`` is the a priori cap on valid ballots cast in the
    precinct.  It is required for any bound computation; ``None`` is allowed
    only for pure tabulation flows and makes bound-dependent operations fail
    with :class:`~mro_audit.errors.MissingBallotBound`.
    """

    precinct_id: str
    county_id: str
    ballot_bound: int | None
    machine_votes: Mapping[Candidate, int]

    def total_votes(self) -> int:
        return sum(self.machine_votes.values())


@dataclass(frozen=True)
class AuditRecord:
    """Hand-count results for one audited precinct."""

    precinct_id: str
    hand_votes: Mapping[Candidate, int]


@dataclass(frozen=True)
class ContestTotals:
    """Contest-wide totals, the winner/loser partition and pairwise margins.

    For apparent totals (from machine counts) every stored margin is strictly
    positive and ``outcome_confirmed`` is ``None``.  For actual totals (from a
    full hand tally, see :func:`actual_margins`) the partition is still the
    *apparent* one, margins may be nonpositive, and ``outcome_confirmed``
    records whether every winner kept a positive margin.
    """

    totals: dict[Candidate, int]
    winners: tuple[Candidate, ...]
    losers: tuple[Candidate, ...]
    pairwise_margins: dict[Pair, int]
    outcome_confirmed: bool | None = None

    def margin(self, winner: Candidate, loser: Candidate) -> int:
        return self.pairwise_margins[(winner, loser)]


def _check_vote_map(
    setup: ContestSetup,
    votes: Mapping[Candidate, int],
    ballot_bound: int | None,
    where: str,
) -> None:
    """Validate one precinct's vote map against the contest invariants."""
    expected = set(setup.candidates)
    got = set(votes)
    if got != expected:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        raise CandidateMismatch(
            f"{where}: candidate set mismatch"
            + (f", missing {missing}" if missing else "")
            + (f", unexpected {extra}" if extra else "")
        )
    for candidate, count in votes.items():
        if not isinstance(count, int) or isinstance(count, bool):
            raise ValidationError(f"{where}: count for {candidate!r} is not an integer")
        if count < 0:
            raise ValidationError(f"{where}: negative count {count} for {candidate!r}")
    if ballot_bound is not None:
        if ballot_bound < 0:
            raise ValidationError(f"{where}: negative ballot bound {ballot_bound}")
        for candidate, count in votes.items():
            if count > ballot_bound:
                raise ValidationError(
                    f"{where}: count {count} for {candidate!r} exceeds "
                    f"ballot bound {ballot_bound}"
                )
        total = sum(votes.values())
        cap = setup.votes_per_voter * ballot_bound
        if total > cap:
            raise ValidationError(
                f"{where}: {total} votes exceed {setup.votes_per_voter} "
                f"per ballot times bound {ballot_bound}"
            )


def validate_returns(setup: ContestSetup, returns: Sequence[PrecinctReturns]) -> None:
    """Check one-returns-per-precinct and every per-precinct count invariant.

    Raises:
        ValidationError: wrong precinct count, duplicate ids, negative or
            bound-violating counts.
        CandidateMismatch: a precinct does not cover the contest candidates.
    """
    if len(returns) != setup.precinct_count:
        raise ValidationError(
            f"expected {setup.precinct_count} precincts, got {len(returns)}"
        )
    seen: set[str] = set()
    for ret in returns:
        if ret.precinct_id in seen:
            raise ValidationError(f"duplicate precinct id {ret.precinct_id!r}")
        seen.add(ret.precinct_id)
        _check_vote_map(setup, ret.machine_votes, ret.ballot_bound,
                        f"precinct {ret.precinct_id}")


def validate_audit(setup: ContestSetup, returns_p: PrecinctReturns,
                   audit: AuditRecord) -> None:
    """Check a hand-count record against its precinct's ballot bound."""
    if audit.precinct_id != returns_p.precinct_id:
        raise UnknownPrecinct(
            f"audit for {audit.precinct_id!r} checked against "
            f"precinct {returns_p.precinct_id!r}"
        )
    _check_vote_map(setup, audit.hand_votes, returns_p.ballot_bound,
                    f"audit of precinct {audit.precinct_id}")


def compute_totals(setup: ContestSetup,
                   returns: Sequence[PrecinctReturns]) -> ContestTotals:
    """Tabulate returns and determine the apparent outcome.

    The winners are the ``votes_per_voter`` candidates whose totals strictly
    exceed every other candidate's total; the result carries one positive
    margin per winner/loser pair.  Precinct order does not affect the result.

    Raises:
        AmbiguousOutcome: a tie at the seat boundary (or any winner/loser
            margin that is not strictly positive); the audit framework
            requires strictly positive apparent margins.
    """
    validate_returns(setup, returns)
    totals = {candidate: 0 for candidate in setup.candidates}
    for ret in returns:
        for candidate, count in ret.machine_votes.items():
            totals[candidate] += count

    order = {candidate: i for i, candidate in enumerate(setup.candidates)}
    ranked = sorted(setup.candidates, key=lambda c: (-totals[c], order[c]))
    seats = setup.votes_per_voter
    winners = tuple(ranked[:seats])
    losers = tuple(ranked[seats:])
    if totals[winners[-1]] <= totals[losers[0]]:
        raise AmbiguousOutcome(
            f"no strict margin between {winners[-1]!r} ({totals[winners[-1]]}) "
            f"and {losers[0]!r} ({totals[losers[0]]})"
        )
    margins = {(w, l): totals[w] - totals[l] for w in winners for l in losers}
    return ContestTotals(totals=totals, winners=winners, losers=losers,
                         pairwise_margins=margins)


def pool_candidates(
    setup: ContestSetup,
    returns: Sequence[PrecinctReturns],
    pool: Iterable[Candidate],
    pooled_id: Candidate,
) -> tuple[ContestSetup, list[PrecinctReturns]]:
    """Merge losing candidates into a single pseudo-candidate.

    The pooled candidate's votes in each precinct are the sum of the pool's
    votes; all other entries, ballot bounds and county assignments are
    unchanged.  Margins between unpooled candidates are preserved.

    Raises:
        PoolContainsWinner: the pool intersects the apparent winner set.
        ValidationError: empty pool, unknown pool member, or ``pooled_id``
            colliding with an existing candidate.
    """
    pool = set(pool)
    if not pool:
        raise ValidationError("candidate pool is empty")
    unknown = pool - set(setup.candidates)
    if unknown:
        raise ValidationError(f"pool members not in contest: {sorted(unknown)}")
    if pooled_id in setup.candidates:
        raise ValidationError(f"pooled id {pooled_id!r} is already a candidate")

    totals = compute_totals(setup, returns)
    winners_in_pool = pool & set(totals.winners)
    if winners_in_pool:
        raise PoolContainsWinner(
            f"pool contains apparent winner(s): {sorted(winners_in_pool)}"
        )

    kept = tuple(c for c in setup.candidates if c not in pool)
    new_setup = ContestSetup(
        candidates=kept + (pooled_id,),
        votes_per_voter=setup.votes_per_voter,
        precinct_count=setup.precinct_count,
    )
    new_returns = []
    for ret in returns:
        votes = {c: ret.machine_votes[c] for c in kept}
        votes[pooled_id] = sum(ret.machine_votes[c] for c in pool)
        new_returns.append(
            PrecinctReturns(
                precinct_id=ret.precinct_id,
                county_id=ret.county_id,
                ballot_bound=ret.ballot_bound,
                machine_votes=votes,
            )
        )
    return new_setup, new_returns


def pool_audit_records(
    audits: Sequence[AuditRecord],
    pool: Iterable[Candidate],
    pooled_id: Candidate,
) -> list[AuditRecord]:
    """Apply the same candidate pooling to hand-count records.

    Mechanical companion to :func:`pool_candidates` for audit data; the
    winner checks happened when the returns were pooled.
    """
    pool = set(pool)
    pooled = []
    for audit in audits:
        missing = pool - set(audit.hand_votes)
        if missing:
            raise CandidateMismatch(
                f"audit of precinct {audit.precinct_id}: pool members "
                f"{sorted(missing)} not in the hand counts"
            )
        votes = {c: v for c, v in audit.hand_votes.items() if c not in pool}
        votes[pooled_id] = sum(audit.hand_votes[c] for c in pool)
        pooled.append(AuditRecord(audit.precinct_id, votes))
    return pooled


def actual_margins(
    setup: ContestSetup,
    returns: Sequence[PrecinctReturns],
    audits: Sequence[AuditRecord],
) -> ContestTotals:
    """Tabulate a complete hand tally against the apparent partition.

    Requires an audit record for every precinct.  The returned totals keep
    the *apparent* winner/loser partition; ``outcome_confirmed`` is True
    exactly when every apparent winner still beats every apparent loser in
    the hand counts.

    Raises:
        IncompleteTally: some precinct has no audit record.
        UnknownPrecinct: an audit record names a precinct not in the returns.
    """
    apparent = compute_totals(setup, returns)
    by_id: dict[str, AuditRecord] = {}
    known = {ret.precinct_id for ret in returns}
    for audit in audits:
        if audit.precinct_id not in known:
            raise UnknownPrecinct(f"audit for unknown precinct {audit.precinct_id!r}")
        if audit.precinct_id in by_id:
            raise ValidationError(f"duplicate audit for precinct {audit.precinct_id!r}")
        by_id[audit.precinct_id] = audit
    missing = known - set(by_id)
    if missing:
        raise IncompleteTally(
            f"{len(missing)} precinct(s) lack an audit record, "
            f"e.g. {sorted(missing)[:3]}"
        )

    totals = {candidate: 0 for candidate in setup.candidates}
    for ret in returns:
        audit = by_id[ret.precinct_id]
        validate_audit(setup, ret, audit)
        for candidate, count in audit.hand_votes.items():
            totals[candidate] += count

    margins = {
        (w, l): totals[w] - totals[l]
        for w in apparent.winners
        for l in apparent.losers
    }
    confirmed = min(margins.values()) > 0
    return ContestTotals(
        totals=totals,
        winners=apparent.winners,
        losers=apparent.losers,
        pairwise_margins=margins,
        outcome_confirmed=confirmed,
    )
