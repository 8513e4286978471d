"""Command-line interface.

Machine-readable JSON goes to stdout, diagnostics to stderr.  Exit codes:
0 success, 1 validation / domain error, 2 usage error.  Every flag can also
be supplied from a ``key=value`` config file via ``--config``; explicit
flags win over the file.
"""

from __future__ import annotations

import functools
import json
from fractions import Fraction

import click

from . import __version__
from .core import compute_totals, pool_audit_records, pool_candidates
from .discrepancy import analyze_precinct, mro_sum, precinct_bound, precinct_mro
from .errors import AuditError
from .io import load_audits, load_config, load_county_plans, load_returns
from .oracle import brute_mro, brute_taint_count, gen_instance, random_audits
from .report import (
    build_document,
    document_json,
    file_digest,
    percent,
    risk_block,
)
from .risk import (
    IDENTITY,
    TAINT,
    SamplingDesign,
    TestConfig,
    monte_carlo_pvalue,
    p_value,
    run_test,
    taint_count,
)
from .sampling import conservative_effective_n, draw_sample

_SAMPLING_METHODS = {"wr": "with_replacement", "srs": "simple_random_sample"}


def _domain_errors(fn):
    """Map domain errors to exit code 1 with the error class in the message."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except AuditError as exc:
            raise click.ClickException(f"{type(exc).__name__}: {exc}") from exc

    return wrapper


def _config_map(config_path: str | None) -> dict[str, str]:
    return load_config(config_path) if config_path else {}


def _resolve(cli_value, config: dict[str, str], key: str, cast=str, default=None):
    if cli_value is not None:
        return cli_value
    if key in config:
        return cast(config[key])
    return default


def _parse_sampling(text: str, effective_n: int | None) -> SamplingDesign:
    method_key, _, draws_text = text.strip().partition(":")
    if method_key not in _SAMPLING_METHODS:
        raise click.UsageError(
            f"--sampling must be wr[:N] or srs[:N], got {text!r}"
        )
    if effective_n is not None:
        draws = effective_n
    elif draws_text:
        try:
            draws = int(draws_text)
        except ValueError:
            raise click.UsageError(f"bad sample size in --sampling {text!r}")
    else:
        raise click.UsageError(
            "sample size missing: use --sampling wr:N or add --effective-n"
        )
    return SamplingDesign(method=_SAMPLING_METHODS[method_key], draws=draws)


def _parse_pool(text: str | None) -> list[str]:
    if not text:
        return []
    members = [part.strip() for part in text.split(",") if part.strip()]
    if not members:
        raise click.UsageError("--pool given but names no candidates")
    return members


def _load_contest(returns_path, votes_per_voter, pool, pooled_id):
    setup, returns = load_returns(returns_path, votes_per_voter)
    pooled_info = None
    if pool:
        setup, returns = pool_candidates(setup, returns, pool, pooled_id)
        pooled_info = {"members": list(pool), "pooled_id": pooled_id}
    return setup, returns, pooled_info


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2))


@click.group()
@click.version_option(version=__version__, prog_name="mro-audit")
def cli() -> None:
    """Post-election audit calculations over precinct returns."""


option_config = click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False),
    default=None, help="key=value file supplying defaults for the flags.",
)
option_pool = click.option(
    "--pool", default=None,
    help="Comma-separated losing candidates to merge into one pseudo-candidate.",
)
option_pooled_id = click.option(
    "--pooled-id", default=None, help="Name for the pooled pseudo-candidate.",
)
option_votes_per_voter = click.option(
    "--votes-per-voter", type=int, default=None,
    help="Votes each voter may cast (default 1).",
)


@cli.command()
@click.argument("returns_file", type=click.Path(exists=True, dir_okay=False))
@option_pool
@option_pooled_id
@option_votes_per_voter
@option_config
@_domain_errors
def margins(returns_file, pool, pooled_id, votes_per_voter, config_path):
    """Tabulate totals and pairwise margins."""
    config = _config_map(config_path)
    pool = _parse_pool(_resolve(pool, config, "pool"))
    pooled_id = _resolve(pooled_id, config, "pooled-id", default="Pooled")
    votes_per_voter = _resolve(votes_per_voter, config, "votes-per-voter", int, 1)
    setup, returns, pooled_info = _load_contest(
        returns_file, votes_per_voter, pool, pooled_id
    )
    totals = compute_totals(setup, returns)
    payload = {
        "schema": "mro-audit/1",
        "candidates": list(setup.candidates),
        "totals": dict(totals.totals),
        "winners": list(totals.winners),
        "losers": list(totals.losers),
        "pairwise_margins": [
            {"winner": w, "loser": l, "margin": m}
            for (w, l), m in totals.pairwise_margins.items()
        ],
        "total_ballot_bound": sum(r.ballot_bound or 0 for r in returns),
    }
    if pooled_info:
        payload["pooled"] = pooled_info
    _echo_json(payload)


@cli.command()
@click.argument("returns_file", type=click.Path(exists=True, dir_okay=False))
@option_pool
@option_pooled_id
@option_votes_per_voter
@option_config
@_domain_errors
def bounds(returns_file, pool, pooled_id, votes_per_voter, config_path):
    """Per-precinct a priori MRO bounds (no hand counts needed)."""
    config = _config_map(config_path)
    pool = _parse_pool(_resolve(pool, config, "pool"))
    pooled_id = _resolve(pooled_id, config, "pooled-id", default="Pooled")
    votes_per_voter = _resolve(votes_per_voter, config, "votes-per-voter", int, 1)
    setup, returns, _ = _load_contest(
        returns_file, votes_per_voter, pool, pooled_id
    )
    totals = compute_totals(setup, returns)
    rows = []
    largest = Fraction(0)
    for ret in returns:
        bound = precinct_bound(ret, totals.pairwise_margins)
        largest = max(largest, bound)
        rows.append(
            {
                "precinct_id": ret.precinct_id,
                "county_id": ret.county_id,
                "bound": f"{bound.numerator}/{bound.denominator}",
                "bound_float": float(bound),
            }
        )
    _echo_json(
        {
            "schema": "mro-audit/1",
            "precincts": rows,
            "max_bound_float": float(largest),
        }
    )


@cli.command()
@click.argument("returns_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--counties", "counties_file", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="County table: county_id,registered_voters[,required_samples].")
@click.option("--seed", default=None, help="Sampling seed (any string or integer).")
@option_votes_per_voter
@option_config
@_domain_errors
def plan(returns_file, counties_file, seed, votes_per_voter, config_path):
    """Draw the stratified county sample and its conservative reduction."""
    config = _config_map(config_path)
    counties_file = _resolve(counties_file, config, "counties")
    seed = _resolve(seed, config, "seed")
    votes_per_voter = _resolve(votes_per_voter, config, "votes-per-voter", int, 1)
    if counties_file is None:
        raise click.UsageError("--counties is required (flag or config)")
    if seed is None:
        raise click.UsageError("--seed is required (flag or config)")
    setup, returns = load_returns(returns_file, votes_per_voter)
    plans = load_county_plans(counties_file, returns)
    sample = draw_sample(plans, returns, seed)
    grouped = []
    cursor = 0
    for county_plan in plans:
        take = county_plan.required_samples
        grouped.append(
            {
                "county_id": county_plan.county_id,
                "required_samples": take,
                "sampled": sample[cursor:cursor + take],
            }
        )
        cursor += take
    _echo_json(
        {
            "schema": "mro-audit/1",
            "seed": str(seed),
            "total_samples": len(sample),
            "conservative_effective_n": conservative_effective_n(
                plans, setup.precinct_count
            ),
            "counties": grouped,
        }
    )


def _risk_options(fn):
    for option in (
        click.option("--weight", type=click.Choice(["identity", "taint"]),
                     default=None, help="Per-precinct weighting of the MRO."),
        click.option("--sampling", "sampling_text", default=None,
                     help="wr:N (with replacement) or srs:N (simple random sample)."),
        click.option("--effective-n", type=int, default=None,
                     help="Override the sample-size part of --sampling."),
        option_pool,
        option_pooled_id,
        option_votes_per_voter,
        option_config,
    ):
        fn = option(fn)
    return fn


def _run_pipeline(returns_file, audits_file, weight, sampling_text,
                  effective_n, pool, pooled_id, votes_per_voter, config_path):
    config = _config_map(config_path)
    pool = _parse_pool(_resolve(pool, config, "pool"))
    pooled_id = _resolve(pooled_id, config, "pooled-id", default="Pooled")
    votes_per_voter = _resolve(votes_per_voter, config, "votes-per-voter", int, 1)
    weight = _resolve(weight, config, "weight", default="identity")
    if weight not in ("identity", "taint"):
        raise click.UsageError(f"weight must be identity or taint, got {weight!r}")
    sampling_text = _resolve(sampling_text, config, "sampling")
    effective_n = _resolve(effective_n, config, "effective-n", int)
    if sampling_text is None:
        raise click.UsageError("--sampling is required (flag or config)")
    design = _parse_sampling(sampling_text, effective_n)
    test_config = TestConfig(
        weight=IDENTITY if weight == "identity" else TAINT,
        sampling=design,
    )
    setup, returns, pooled_info = _load_contest(
        returns_file, votes_per_voter, pool, pooled_id
    )
    audits = load_audits(audits_file)
    if pool:
        audits = pool_audit_records(audits, pool, pooled_id)
    report = run_test(setup, returns, audits, test_config)
    return setup, returns, audits, test_config, report, pooled_info


@cli.command()
@click.argument("returns_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("audits_file", type=click.Path(exists=True, dir_okay=False))
@_risk_options
@_domain_errors
def pvalue(returns_file, audits_file, weight, sampling_text, effective_n,
           pool, pooled_id, votes_per_voter, config_path):
    """Conservative P-value that the apparent outcome is wrong."""
    *_, report, pooled_info = _run_pipeline(
        returns_file, audits_file, weight, sampling_text, effective_n,
        pool, pooled_id, votes_per_voter, config_path,
    )
    payload = {"schema": "mro-audit/1", **risk_block(report)}
    if pooled_info:
        payload["pooled"] = pooled_info
    _echo_json(payload)


@cli.command(name="report")
@click.argument("returns_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("audits_file", type=click.Path(exists=True, dir_okay=False))
@_risk_options
@_domain_errors
def report_command(returns_file, audits_file, weight, sampling_text,
                   effective_n, pool, pooled_id, votes_per_voter, config_path):
    """Full audit report document (schema mro-audit/1)."""
    setup, returns, audits, _, report, pooled_info = _run_pipeline(
        returns_file, audits_file, weight, sampling_text, effective_n,
        pool, pooled_id, votes_per_voter, config_path,
    )
    totals = compute_totals(setup, returns)
    bounds_map = {
        ret.precinct_id: precinct_bound(ret, totals.pairwise_margins)
        for ret in returns
    }
    discrepancies = []
    by_id = {ret.precinct_id: ret for ret in returns}
    for audit in audits:
        discrepancies.append(
            analyze_precinct(by_id[audit.precinct_id], audit,
                             totals.pairwise_margins)
        )
    document = build_document(
        setup, returns, totals, bounds_map, discrepancies, report,
        tool_version=__version__,
        input_digests={
            "returns": file_digest(returns_file),
            "audits": file_digest(audits_file),
        },
        pooled=pooled_info,
    )
    click.echo(document_json(document))


@cli.command()
@click.option("--taint-count", "tainted", type=int, default=None,
              help="Number of tainted precincts in the simulated population.")
@click.option("--population", type=int, default=None, help="Population size.")
@click.option("--sampling", "sampling_text", default=None,
              help="wr:N or srs:N.")
@click.option("--reps", type=int, default=None,
              help="Monte Carlo replications (default 100000).")
@click.option("--seed", type=int, default=None, help="Simulation seed.")
@click.option("--verify", is_flag=True, default=False,
              help="Also run the brute-force oracle self-checks.")
@option_config
@click.pass_context
@_domain_errors
def simulate(ctx, tainted, population, sampling_text, reps, seed, verify,
             config_path):
    """Monte Carlo validation of the closed-form P-value."""
    config = _config_map(config_path)
    tainted = _resolve(tainted, config, "taint-count", int)
    population = _resolve(population, config, "population", int)
    sampling_text = _resolve(sampling_text, config, "sampling")
    reps = _resolve(reps, config, "reps", int, 100_000)
    seed = _resolve(seed, config, "seed", int, 0)
    if tainted is None or population is None or sampling_text is None:
        raise click.UsageError(
            "--taint-count, --population and --sampling are required"
        )
    design = _parse_sampling(sampling_text, None)
    closed = p_value(tainted, population, design)
    estimate, stderr = monte_carlo_pvalue(tainted, population, design, reps, seed)
    agrees = abs(estimate - closed) <= 3.0 * stderr + 1e-12
    payload = {
        "schema": "mro-audit/1",
        "closed_form": closed,
        "closed_form_percent": percent(closed),
        "monte_carlo": {
            "estimate": estimate,
            "standard_error": stderr,
            "replications": reps,
            "seed": seed,
        },
        "within_3_standard_errors": agrees,
    }
    ok = agrees
    if verify:
        checks = _oracle_checks(seed)
        payload["oracle_checks"] = checks
        ok = ok and all(c["passed"] for c in checks.values())
    _echo_json(payload)
    if not ok:
        ctx.exit(1)


def _oracle_checks(seed: int) -> dict:
    """Cross-check fast implementations against the brute-force oracles."""
    import random as _random

    rng = _random.Random(seed)
    checks: dict[str, dict] = {}

    trials, failures = 150, 0
    for _ in range(trials):
        n = rng.randint(1, 10)
        bound_values = [Fraction(rng.randint(0, 60), 100) for _ in range(n)]
        cap = Fraction(rng.randint(0, 30), 100)
        goal = Fraction(rng.randint(1, 300), 100)
        if taint_count(bound_values, cap, IDENTITY, goal) != brute_taint_count(
            bound_values, cap, goal
        ):
            failures += 1
    checks["taint_count_vs_subset_search"] = {
        "trials": trials, "failures": failures, "passed": failures == 0,
    }

    trials, failures = 150, 0
    for _ in range(trials):
        setup, returns, _ = gen_instance(1, rng.randint(2, 6), seed=rng.randrange(2**30))
        audits = random_audits(setup, returns, seed=rng.randrange(2**30))
        totals = compute_totals(setup, returns)
        pairwise = analyze_precinct(returns[0], audits[0], totals.pairwise_margins)
        if precinct_mro(pairwise.pairwise) != brute_mro(
            returns[0], audits[0], totals.pairwise_margins
        ):
            failures += 1
    checks["precinct_mro_vs_pair_enumeration"] = {
        "trials": trials, "failures": failures, "passed": failures == 0,
    }

    trials, failures = 30, 0
    for _ in range(trials):
        setup, returns, audits = gen_instance(
            rng.randint(1, 10), rng.randint(2, 4),
            reversal=True, seed=rng.randrange(2**30),
        )
        totals = compute_totals(setup, returns)
        by_id = {a.precinct_id: a for a in audits}
        discs = [
            analyze_precinct(ret, by_id[ret.precinct_id], totals.pairwise_margins)
            for ret in returns
        ]
        if mro_sum(discs).total < 1:
            failures += 1
    checks["planted_reversals_reach_threshold"] = {
        "trials": trials, "failures": failures, "passed": failures == 0,
    }
    return checks


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
