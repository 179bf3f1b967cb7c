"""Command-line front end.

Every library operation is exposed as a subcommand with reproducible output:
csv and json modes are byte-stable for a fixed configuration.  Exit codes:
0 success, 1 some audit failed, 2 usage error, 3 a budget or capacity limit
was hit.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from dataclasses import dataclass
from importlib import resources

import click

from . import analysis, general, uniqueness
from .errors import BudgetError, CapacityError, DomainError, TableError
from .factoring import FactorTable, load_factor_table_path
from .lucas import (
    FIBONACCI,
    LucasParams,
    brute_rank,
    period_mod_prime,
    rank_of_apparition,
)

EXIT_AUDIT = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

TABLE_ENV_VAR = "FIBTOTIENT_FACTOR_TABLE"


def bundled_table_path() -> str:
    return str(resources.files("fibtotient").joinpath("data/fib_factors.txt"))


@dataclass
class RunConfig:
    factor_table_path: str | None
    use_table: bool
    rho_budget: int
    brute_cap: int
    workers: int
    output_format: str
    seed: int

    _table: FactorTable | None = None
    _table_loaded: bool = False

    def table(self) -> FactorTable | None:
        if not self.use_table:
            return None
        if not self._table_loaded:
            path = self.factor_table_path or bundled_table_path()
            self._table = load_factor_table_path(path)
            self._table_loaded = True
        return self._table


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (BudgetError, CapacityError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_BUDGET)
        except BrokenPipeError:
            # the reading end (head, less, ...) went away; leave quietly
            devnull = os.open(os.devnull, os.O_WRONLY)
            os.dup2(devnull, sys.stdout.fileno())
            sys.exit(0)
        except (DomainError, TableError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_USAGE)

    return wrapper


@click.group()
@click.option(
    "--table", "table_path", default=None, envvar=TABLE_ENV_VAR,
    help=f"Factor table file (default: bundled table; env {TABLE_ENV_VAR}).",
)
@click.option("--no-table", is_flag=True, help="Run without any factor table.")
@click.option("--rho-budget", default=2_000_000, show_default=True,
              help="Pollard rho iterations per composite.")
@click.option("--brute-cap", default=1_000_000, show_default=True,
              help="Iteration cap for brute-force rank/period paths.")
@click.option("--workers", default=1, show_default=True,
              help="Worker processes for the census sweep.")
@click.option("--format", "fmt", type=click.Choice(["pretty", "csv", "json"]),
              default="pretty", show_default=True)
@click.option("--seed", default=0, show_default=True,
              help="Seed offsetting the rho polynomial constant.")
@click.pass_context
def main(ctx, table_path, no_table, rho_budget, brute_cap, workers, fmt, seed):
    """Ranks of apparition, Pisano periods, Sophie Germain witnesses and
    totient-divisibility residue sets of Fibonacci and Lucas sequences."""
    ctx.obj = RunConfig(
        factor_table_path=table_path,
        use_table=not no_table,
        rho_budget=rho_budget,
        brute_cap=brute_cap,
        workers=workers,
        output_format=fmt,
        seed=seed,
    )


def _emit(config: RunConfig, payload: dict, pretty_lines: list[str], csv_text: str):
    if config.output_format == "json":
        click.echo(json.dumps(payload, sort_keys=True, indent=2))
    elif config.output_format == "csv":
        click.echo(csv_text, nl=False)
    else:
        for line in pretty_lines:
            click.echo(line)


def _parse_params(p: int, q: int) -> LucasParams:
    try:
        return LucasParams(p, q)
    except DomainError as exc:
        raise click.UsageError(str(exc))


@main.command()
@click.argument("q", type=int)
@click.pass_obj
@handle_errors
def pisano(config, q):
    """Period of the Fibonacci sequence mod the odd prime Q."""
    record = period_mod_prime(FIBONACCI, q, brute_cap=config.brute_cap)
    payload = {"q": q, "pi_q": record.period, "z_q": record.rank,
               "method": record.method}
    _emit(config, payload, [str(record.period)],
          f"q,pi_q,z_q\n{q},{record.period},{record.rank}\n")


@main.command()
@click.argument("p", type=int)
@click.option("--P", "pp", default=1, show_default=True, help="Lucas parameter P.")
@click.option("--Q", "qq", default=-1, show_default=True, help="Lucas parameter Q.")
@click.pass_obj
@handle_errors
def rank(config, p, pp, qq):
    """Rank of apparition of the prime P in the sequence U(P, Q)."""
    params = _parse_params(pp, qq)
    try:
        z = rank_of_apparition(params, p)
    except DomainError:
        z = brute_rank(params, p, cap=config.brute_cap)
    payload = {"p": p, "P": pp, "Q": qq, "rank": z}
    _emit(config, payload, [str(z)], f"p,rank\n{p},{z}\n")


def _witness_payload(a, audits) -> dict:
    return {
        "q": a.q, "p": a.p, "p_prime": a.p_prime, "pi_q": a.period,
        "witness": a.witness, "z_p": a.rank_p, "ratio": a.ratio,
        "leg5_p": a.leg5_p, "leg5_q": a.leg5_q,
        "q_mod15": a.q_mod15, "q_mod60": a.q_mod60,
        "audits": {claim: status for claim, status in audits},
    }


@main.command()
@click.argument("q", type=int)
@click.pass_obj
@handle_errors
def witness(config, q):
    """Witness test at p = 2q+1, with the theorem audits."""
    a = analysis.witness_2q1(q, brute_cap=config.brute_cap)
    audits = analysis.audit_theorems(a)
    payload = _witness_payload(a, audits)
    lines = [
        f"q = {a.q}: p = {a.p} ({'prime' if a.p_prime else 'composite'}), "
        f"pi(q) = {a.period}, witness = {a.witness}",
    ]
    if a.witness:
        lines.append(f"z(p) = {a.rank_p}, ratio = {a.ratio}, (5|p) = {a.leg5_p:+d}")
    lines += [f"audit {claim}: {status}" for claim, status in audits]
    csv_text = (
        "q,p,p_prime,pi_q,witness,z_p,ratio,leg5_p\n"
        f"{a.q},{a.p},{int(a.p_prime)},{a.period},{int(a.witness)},"
        f"{a.rank_p if a.rank_p is not None else ''},"
        f"{a.ratio if a.ratio is not None else ''},{a.leg5_p}\n"
    )
    _emit(config, payload, lines, csv_text)
    if any(status == analysis.FAIL for _, status in audits):
        sys.exit(EXIT_AUDIT)


@main.command()
@click.argument("q", type=int)
@click.pass_obj
@handle_errors
def sq(config, q):
    """Predicted residue set mod pi(q)."""
    a = analysis.witness_2q1(q, brute_cap=config.brute_cap)
    s = analysis.sq_predicted(q, analysis=a)
    payload = {
        "q": q, "period": s.period, "empty": s.empty,
        "difference": s.difference, "length": s.length,
        "members": list(s.members()),
    }
    if s.empty:
        lines = [f"S({q}) predicted empty (mod {s.period})"]
    else:
        lines = [
            f"S({q}) = {{{', '.join(str(r) for r in s.members())}}} mod {s.period}"
            f" (difference {s.difference}, length {s.length})"
        ]
    csv_text = "q,period,difference,length,members\n" + (
        f"{q},{s.period},{s.difference if s.difference is not None else ''},"
        f"{s.length if s.length is not None else ''},"
        f"\"{' '.join(str(r) for r in s.members())}\"\n"
    )
    _emit(config, payload, lines, csv_text)


def _census_pretty(report) -> list[str]:
    lines = [
        f"odd primes swept up to {report.q_max}",
        f"sophie germain primes: {report.sg_count}",
        f"witnesses: {report.hit_count} ({report.hits_gt5} with q > 5)",
        f"ratio counts: {dict(sorted(report.ratio_counts.items()))}",
        f"q mod 15 (q > 5): {dict(sorted(report.mod15_counts.items()))}",
        f"q mod 60 (q > 5): {dict(sorted(report.mod60_counts.items()))}",
        f"rogue witnesses (non Sophie Germain): {report.rogue_witnesses}",
        f"audit failures: {report.audit_failures}",
    ]
    header = "  ".join(f"{c:>7}" for c in analysis.CENSUS_CSV_COLUMNS)
    lines.append(header)
    for row in report.rows:
        lines.append(
            "  ".join(
                f"{getattr(row, c):>7}" for c in analysis.CENSUS_CSV_COLUMNS
            )
        )
    return lines


@main.command()
@click.argument("q_max", type=int)
@click.pass_obj
@handle_errors
def census(config, q_max):
    """Witness census over all odd primes up to Q_MAX."""
    report = analysis.census(q_max, workers=config.workers)
    _emit(
        config,
        json.loads(analysis.census_json(report)),
        _census_pretty(report),
        analysis.census_csv(report),
    )
    if report.audit_failures or report.rogue_witnesses:
        sys.exit(EXIT_AUDIT)


@main.command()
@click.pass_obj
@handle_errors
def table1(config):
    """The 33 witness rows with q <= 5000 (six columns)."""
    report = analysis.census(5000, workers=config.workers)
    csv_text = analysis.census_csv(report, columns=analysis.TABLE_CSV_COLUMNS)
    payload = [
        {col: getattr(row, col) for col in analysis.TABLE_CSV_COLUMNS}
        for row in report.rows
    ]
    header = "  ".join(f"{c:>7}" for c in analysis.TABLE_CSV_COLUMNS)
    lines = [header] + [
        "  ".join(f"{getattr(row, c):>7}" for c in analysis.TABLE_CSV_COLUMNS)
        for row in report.rows
    ]
    _emit(config, payload, lines, csv_text)
    if report.audit_failures:
        sys.exit(EXIT_AUDIT)


@main.command()
@click.argument("q", type=int)
@click.option("--samples", default=analysis.DEFAULT_SAMPLES_PER_CLASS,
              show_default=True)
@click.option("--m-cap", default=analysis.DEFAULT_M_CAP, show_default=True)
@click.option("--work-cap", default=analysis.DEFAULT_WORK_CAP, show_default=True)
@click.pass_obj
@handle_errors
def empirical(config, q, samples, m_cap, work_cap):
    """Empirical per-class verdicts for S(q)."""
    verdicts = analysis.sq_empirical(
        q,
        samples_per_class=samples,
        m_cap=m_cap,
        table=config.table(),
        budget=config.rho_budget,
        work_cap=work_cap,
        rho_seed=config.seed,
    )
    payload = {
        str(r): {"verdict": v.value, "witness": v.witness, "reason": v.reason}
        for r, v in verdicts.items()
    }
    lines = [f"class {r} mod {len(verdicts)}: {v.value} ({v.reason})"
             for r, v in verdicts.items()]
    csv_lines = ["class,verdict,witness"]
    csv_lines += [
        f"{r},{v.value},{v.witness if v.witness is not None else ''}"
        for r, v in verdicts.items()
    ]
    _emit(config, payload, lines, "\n".join(csv_lines) + "\n")


@main.command()
@click.argument("q_max", type=int)
@click.option("--samples", default=analysis.DEFAULT_SAMPLES_PER_CLASS,
              show_default=True)
@click.option("--empirical-budget", default=10_000, show_default=True,
              help="rho iterations per composite during the probe.")
@click.pass_obj
@handle_errors
def converse(config, q_max, samples, empirical_budget):
    """Probe primes without witnesses for unexplained all-yes classes."""
    report = analysis.verify_converse(
        q_max,
        samples_per_class=samples,
        empirical_budget=empirical_budget,
        table=config.table(),
        rho_seed=config.seed,
    )
    payload = {
        "q_max": report.q_max,
        "probed": report.probed,
        "exceptions": report.exceptions,
        "classes_total": report.classes_total,
        "classes_yes": report.classes_yes,
        "classes_no": report.classes_no,
        "classes_unknown": report.classes_unknown,
        "unknown_rate": report.unknown_rate,
    }
    lines = [
        f"probed {len(report.probed)} primes without witnesses up to {q_max}",
        f"classes: {report.classes_total} total, {report.classes_no} no, "
        f"{report.classes_unknown} unknown (rate {report.unknown_rate:.3f})",
        f"exceptions: {report.exceptions}",
    ]
    csv_text = (
        "q_max,probed,classes_total,classes_no,classes_unknown,unknown_rate,exceptions\n"
        f"{q_max},{len(report.probed)},{report.classes_total},{report.classes_no},"
        f"{report.classes_unknown},{report.unknown_rate:.6f},"
        f"\"{report.exceptions}\"\n"
    )
    _emit(config, payload, lines, csv_text)
    if report.exceptions:
        sys.exit(EXIT_AUDIT)


@main.command(name="unique-scan")
@click.argument("k_min", type=int)
@click.argument("k_max", type=int)
@click.pass_obj
@handle_errors
def unique_scan_cmd(config, k_min, k_max):
    """Per-k candidate scan for witnesses p = kq+1 with k >= 4."""
    reports = uniqueness.unique_scan(
        k_min, k_max, table=config.table(), budget=config.rho_budget,
        rho_seed=config.seed,
    )
    lines = []
    csv_lines = ["k,verdict,blocking,candidates"]
    for r in reports:
        blocking = " ".join(str(d) for d in r.blocking)
        cands = " ".join(f"{c.p}" for c in r.candidates)
        lines.append(f"k = {r.k}: {r.verdict}"
                     + (f" (blocking: {blocking})" if r.blocking else ""))
        for rej in r.case1.rejections + r.case2.rejections:
            lines.append(f"    rejected p = {rej.p}: {rej.reason}")
        csv_lines.append(f"{r.k},{r.verdict},\"{blocking}\",\"{cands}\"")
    _emit(
        config,
        json.loads(uniqueness.reports_json(reports)),
        lines,
        "\n".join(csv_lines) + "\n",
    )
    if any(r.verdict == uniqueness.VERDICT_CANDIDATE for r in reports):
        sys.exit(EXIT_AUDIT)


@main.command(name="exception-scan")
@click.argument("k_max", type=int)
@click.argument("q_max", type=int)
@click.pass_obj
@handle_errors
def exception_scan(config, k_max, q_max):
    """Brute (k, q) box scan; the known exception is (8, 5, 41)."""
    triples = uniqueness.direct_exception_scan(k_max, q_max)
    payload = [{"k": k, "q": q, "p": p} for k, q, p in triples]
    lines = [f"k = {k}, q = {q}, p = {p}" for k, q, p in triples] or ["none"]
    csv_text = "k,q,p\n" + "".join(f"{k},{q},{p}\n" for k, q, p in triples)
    _emit(config, payload, lines, csv_text)
    if any(q != 5 for _, q, _p in triples):
        sys.exit(EXIT_AUDIT)


@main.command()
@click.option("--P", "pp", type=int, required=True)
@click.option("--Q", "qq", type=int, required=True)
@click.pass_obj
@handle_errors
def classes(config, pp, qq):
    """Admissible congruence classes for the discriminant of (P, Q)."""
    params = _parse_params(pp, qq)
    cset = general.congruence_classes(params)
    agrees = general.classes_cross_check(params)
    payload = {
        "P": pp, "Q": qq, "D": params.D,
        "modulus": cset.modulus,
        "residues": list(cset.residues),
        "conductor": cset.conductor,
        "agrees_with_4d_enumeration": agrees,
    }
    lines = [
        f"D = {params.D}: classes {list(cset.residues)} mod {cset.modulus}"
        f" (conductor {cset.conductor}, 4|D| cross-check "
        f"{'agrees' if agrees else 'DISAGREES'})"
    ]
    csv_text = (
        "P,Q,D,modulus,residues,agrees\n"
        f"{pp},{qq},{params.D},{cset.modulus},"
        f"\"{' '.join(str(r) for r in cset.residues)}\",{int(agrees)}\n"
    )
    _emit(config, payload, lines, csv_text)
    if not agrees:
        sys.exit(EXIT_AUDIT)


@main.command(name="lucas-scan")
@click.argument("q_max", type=int)
@click.option("--P", "pp", type=int, required=True)
@click.option("--Q", "qq", type=int, required=True)
@click.pass_obj
@handle_errors
def lucas_scan_cmd(config, q_max, pp, qq):
    """Witness scan for the Lucas sequence U(P, Q)."""
    params = _parse_params(pp, qq)
    report = general.lucas_scan(params, q_max, brute_cap=config.brute_cap)
    lines = [
        f"(P, Q) = ({pp}, {qq}), D = {params.D}: "
        f"{len(report.hits)} hits among {report.sg_total} Sophie Germain primes"
        f" <= {q_max}",
        f"classes {list(report.classes.residues)} mod {report.classes.modulus}",
        f"class failures: {report.class_failures}",
        f"parity failures: {report.parity_failures}",
    ]
    lines += [
        f"q = {a.q}: omega = {a.period}, alpha(p) = {a.rank_p}, ratio = {a.ratio}"
        for a in report.hits
    ]
    _emit(
        config,
        json.loads(general.scan_json(report)),
        lines,
        general.scan_csv(report),
    )
    if not report.audit_ok:
        sys.exit(EXIT_AUDIT)


def _parse_pq(text: str) -> LucasParams:
    try:
        p_str, q_str = text.split(",")
        return LucasParams(int(p_str), int(q_str))
    except (ValueError, DomainError) as exc:
        raise click.UsageError(f"bad P,Q pair {text!r}: {exc}")


@main.command(name="same-d")
@click.argument("q_max", type=int)
@click.option("--a", "pair_a", required=True, help="First P,Q pair, e.g. 1,-1")
@click.option("--b", "pair_b", required=True, help="Second P,Q pair, e.g. 3,1")
@click.pass_obj
@handle_errors
def same_d(config, q_max, pair_a, pair_b):
    """Compare hit sets of two sequences with one discriminant."""
    params_a = _parse_pq(pair_a)
    params_b = _parse_pq(pair_b)
    equal, differ = general.same_d_equivalence(
        params_a, params_b, q_max, brute_cap=config.brute_cap
    )
    payload = {
        "a": {"P": params_a.P, "Q": params_a.Q},
        "b": {"P": params_b.P, "Q": params_b.Q},
        "D": params_a.D,
        "q_max": q_max,
        "equal": equal,
        "differing": differ,
    }
    lines = [f"hit sets {'coincide' if equal else 'DIFFER'} up to {q_max}"]
    if differ:
        lines.append(f"differing primes: {differ}")
    csv_text = f"equal,differing\n{int(equal)},\"{' '.join(map(str, differ))}\"\n"
    _emit(config, payload, lines, csv_text)
    if not equal:
        sys.exit(EXIT_AUDIT)


if __name__ == "__main__":
    main()
