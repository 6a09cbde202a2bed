"""Batch command line: ``siegel-hecke [global options] <subcommand> ...``.

Every option can also come from the environment as SIEGEL_HECKE_<OPTION>
(for subcommand options SIEGEL_HECKE_<SUBCOMMAND>_<OPTION>).

Exit codes: 0 success, 2 input error, 3 anomaly detected.
"""

from __future__ import annotations

import functools
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import click
import numpy as np

from . import analytic, eigen_core, gf_algebra, nonvanishing, serialize, signs_sim
from .graded import GradingError
from .primes import primes_upto
from .report import ExperimentReport

EXIT_INPUT = 2
EXIT_ANOMALY = 3


class AnomalyDetected(Exception):
    def __init__(self, report: ExperimentReport, replay: Path | None):
        super().__init__(f"{len(report.anomalies)} anomalies")
        self.report = report
        self.replay = replay


@dataclass
class RunConfig:
    mode: str = "exact"
    tol: float = eigen_core.ZERO_TOL
    primes_up_to: int = 100
    cutoff: int = 1000
    seed: int = 0
    measure: str = "uniform"
    out: str | None = None
    workers: int = 1

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.mode == "exact":
            d["tol"] = None  # tolerance is only used in float mode
        return d


def _error(kind: str, message: str, code: int, **extra):
    payload = {"error": kind, "message": message, "exit_code": code, **extra}
    click.echo(json.dumps(payload, sort_keys=True), err=True)
    sys.exit(code)


class _Group(click.Group):
    """Turns exceptions into JSON error objects with the exit-code contract."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            return super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.exceptions.Exit as e:
            sys.exit(e.exit_code)
        except click.Abort:
            _error("Aborted", "aborted", 1)
        except click.UsageError as e:
            _error("UsageError", e.format_message(), EXIT_INPUT)
        except AnomalyDetected as e:
            _error("AnomalyDetected", str(e), EXIT_ANOMALY, replay=str(e.replay) if e.replay else None)
        except (ValueError, KeyError, GradingError, OSError, json.JSONDecodeError) as e:
            extra_info = {"row": e.row} if isinstance(e, eigen_core.IngestError) else {}
            _error(type(e).__name__, str(e), EXIT_INPUT, **extra_info)


def _emit(ctx: click.Context, report: ExperimentReport, name: str | None = None, csv_text: str | None = None):
    cfg: RunConfig = ctx.obj
    report.config = {**report.config, "run": cfg.to_dict()}
    payload = report.to_dict()
    text = json.dumps(payload, indent=2, sort_keys=True)
    click.echo(text)
    replay = None
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name or report.kind}.json").write_text(text + "\n")
        if csv_text is not None:
            (out / f"{name or report.kind}.csv").write_text(csv_text)
    if report.anomalies:
        replay_dir = Path(cfg.out) if cfg.out else Path(".")
        replay = replay_dir / f"{name or report.kind}.replay.json"
        replay.write_text(json.dumps(report.anomalies, indent=2, sort_keys=True) + "\n")
        raise AnomalyDetected(report, replay)


def _load_seeds(path: str, p: int | None):
    sys_ = serialize.load_system(path)
    primes = [p] if p is not None else sys_.primes()
    return sys_, [sys_[q] for q in primes]


def _maybe_float(seed, cfg: RunConfig):
    return seed.to_float() if cfg.mode == "float" else seed


def _system(ctx, path: str | None, salt: int, N: int):
    """System from a file, or sampled from --measure and --seed."""
    cfg: RunConfig = ctx.obj
    if path:
        return serialize.load_system(path)
    measure = signs_sim.SamplingMeasure.parse(cfg.measure)
    child = np.random.SeedSequence(cfg.seed).spawn(salt + 1)[salt]
    return signs_sim.sample_system(measure, primes_upto(N), child)


_RUN_OPTIONS = [
    click.option("--mode", type=click.Choice(["exact", "float"]), default=None),
    click.option("--tol", type=float, default=None),
    click.option("--primes-up-to", type=int, default=None),
    click.option("--cutoff", type=int, default=None),
    click.option("--seed", type=int, default=None),
    click.option("--measure", default=None),
    click.option("--out", type=click.Path(file_okay=False), default=None),
    click.option("--workers", type=int, default=None),
]


def run_options(f):
    """Let each subcommand repeat the global options; given values win."""

    def callback(ctx: click.Context, **kwargs):
        cfg: RunConfig = ctx.obj
        for name in ("mode", "tol", "primes_up_to", "cutoff", "seed", "measure", "out", "workers"):
            val = kwargs.pop(name)
            if val is not None:
                setattr(cfg, name, val)
        return ctx.invoke(f, ctx, **kwargs)

    callback = click.pass_context(functools.update_wrapper(callback, f))
    for opt in reversed(_RUN_OPTIONS):
        callback = opt(callback)
    return callback


@click.group(cls=_Group, context_settings={"auto_envvar_prefix": "SIEGEL_HECKE", "show_default": True})
@click.option("--mode", type=click.Choice(["exact", "float"]), default="exact")
@click.option("--tol", type=float, default=eigen_core.ZERO_TOL, help="zero tolerance (float mode)")
@click.option("--primes-up-to", type=int, default=100)
@click.option("--cutoff", type=int, default=1000, help="series cutoff N")
@click.option("--seed", type=int, default=0, help="rng seed")
@click.option("--measure", default="uniform", help="uniform | weighted:sato-tate | pinned:t1,t2 [;atom=t1,t2@q]")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="report directory")
@click.option("--workers", type=int, default=1)
@click.pass_context
def cli(ctx, mode, tol, primes_up_to, cutoff, seed, measure, out, workers):
    """Hecke eigenvalue recurrences, Rankin-Selberg series and sign statistics."""
    ctx.obj = RunConfig(mode, tol, primes_up_to, cutoff, seed, measure, out, workers)


@cli.command()
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@run_options
def ingest(ctx, csv_path):
    """Read p,n,mu,k records and write the normalised system."""
    records = eigen_core.read_records(csv_path)
    sys_ = eigen_core.system_from_records(records)
    bad = eigen_core.record_consistency(sys_)
    report = ExperimentReport(
        "ingest",
        {"csv": str(csv_path)},
        {"system": serialize.system_to_json(sys_), "records": len(records), "inconsistent": bad},
    )
    _emit(ctx, report, "system")


@cli.command()
@click.option("--seed-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--p", "prime", type=int, default=None, help="restrict to one prime")
@click.option("--n", "nmax", type=int, default=14)
@run_options
def recur(ctx, seed_file, prime, nmax):
    """lambda(p^n) for n <= N from the four-term recurrence."""
    _, seeds = _load_seeds(seed_file, prime)
    rows = {}
    for s in seeds:
        vals = eigen_core.lambda_prime_powers(_maybe_float(s, ctx.obj), nmax)
        rows[str(s.p)] = [serialize.value_to_json(v) for v in vals]
    _emit(ctx, ExperimentReport("recur", {"seed_file": seed_file, "n": nmax}, {"lambda": rows}))


@cli.command()
@click.option("--seed-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--p", "prime", type=int, default=None)
@click.option("--n", "nmax", type=int, default=14)
@run_options
def gf(ctx, seed_file, prime, nmax):
    """Local generating function (1 - T^2/p) / spin(T) and its coefficients."""
    _, seeds = _load_seeds(seed_file, prime)
    rows = {}
    for s in seeds:
        g = gf_algebra.local_spin_gf(_maybe_float(s, ctx.obj))
        rows[str(s.p)] = {
            "num": [serialize.value_to_json(c) for c in g.num],
            "den": [serialize.value_to_json(c) for c in g.den],
            "series": [serialize.value_to_json(c) for c in gf_algebra.series_coeffs(g, nmax)],
        }
    _emit(ctx, ExperimentReport("gf", {"seed_file": seed_file, "n": nmax}, {"gf": rows}))


@cli.command()
@click.option("--f", "f_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--g", "g_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--depth", type=int, default=40)
@run_options
def hadamard(ctx, f_file, g_file, depth):
    """Local Rankin factors g_p / prod(1 - a_i b_j T) at the shared primes."""
    F, G = serialize.load_system(f_file), serialize.load_system(g_file)
    rows = {}
    for p in sorted(set(F.primes()) & set(G.primes())):
        sF, sG = _maybe_float(F[p], ctx.obj), _maybe_float(G[p], ctx.obj)
        fac = gf_algebra.local_rankin_factor(sF, sG)
        rows[str(p)] = {
            "g_p": [serialize.value_to_json(c) for c in fac.gp],
            "den": [serialize.value_to_json(c) for c in fac.den],
            "residual": serialize.value_to_json(analytic.identity_check_per_prime(sF, sG, depth)),
        }
    _emit(ctx, ExperimentReport("hadamard", {"f": f_file, "g": g_file, "depth": depth}, {"factors": rows}))


@cli.command()
@click.option("--trials", type=int, default=100_000)
@click.option("--sweep-mode", type=click.Choice(["satake", "free"]), default="satake")
@click.option("--primes", default="2,3,5,7,97", help="comma-separated")
@click.option("--replay", type=click.Path(exists=True, dir_okay=False), default=None, help="re-run pairs from a replay file")
@run_options
def nonvanish(ctx, trials, sweep_mode, primes, replay):
    """First joint non-vanishing index over sampled (or replayed) pairs."""
    cfg: RunConfig = ctx.obj
    if replay:
        pairs = serialize.pairs_from_json(json.loads(Path(replay).read_text()))
        report = nonvanishing.replay_pairs(pairs, cfg.tol)
    else:
        plist = tuple(int(x) for x in primes.split(",") if x.strip())
        sweep = nonvanishing.SweepConfig(mode=sweep_mode, primes=plist, tol=cfg.tol)
        report = nonvanishing.sweep_nonvanishing(sweep, trials, cfg.seed, cfg.workers)
    _emit(ctx, report)


@cli.command()
@click.option("--seed-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--p", "prime", type=int, default=None)
@click.option("--window", type=int, default=64)
@run_options
def scan(ctx, seed_file, prime, window):
    """Zero pattern of lambda(p^n) over a window of exponents."""
    _, seeds = _load_seeds(seed_file, prime)
    rows = {}
    anomalies = []
    for s in seeds:
        rep = nonvanishing.vanishing_pattern_scan(_maybe_float(s, ctx.obj), window, ctx.obj.tol)
        rows[str(s.p)] = {**asdict(rep), "ok": rep.ok}
        if not rep.ok:
            anomalies.append({"seed": serialize.seed_to_json(s), "report": rows[str(s.p)]})
    _emit(ctx, ExperimentReport("scan", {"seed_file": seed_file, "window": window}, {"scans": rows}, anomalies))


@cli.command()
@click.option("--f", "f_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--g", "g_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--sigma", "sigmas", type=float, multiple=True, default=(2.0,))
@click.option("--A", "A", type=float, default=16.0)
@click.option("--C", "C", type=float, default=1.0)
@run_options
def lseries(ctx, f_file, g_file, sigmas, A, C):
    """Check L(F,G) = g * L(FxG) coefficientwise and monitor |g(sigma)|.

    Systems missing from --f/--g are sampled from --measure.
    """
    cfg: RunConfig = ctx.obj
    N = cfg.cutoff
    F = _system(ctx, f_file, 0, N)
    G = _system(ctx, g_file, 1, N)
    check = analytic.factorization_check(F, G, N, cfg.mode)
    P = min(cfg.primes_up_to, N)
    factors = analytic.rankin_factors(F, G, P)
    bounds = [analytic.g_bound_check(factors, s, A, C) for s in sigmas]
    anomalies = []
    if check["mismatches"] or (not check["exact"] and check["max_residual"] > 1e-9):
        anomalies.append({"reason": "factorization mismatch", **check})
    report = ExperimentReport(
        "lseries",
        {"f": f_file, "g": g_file, "sigmas": list(sigmas), "A": A, "C": C},
        {"factorization": check, "g_bound": bounds},
        anomalies,
    )
    _emit(ctx, report)


@cli.command()
@click.option("--k1", type=int, required=True)
@click.option("--k2", type=int, required=True)
@click.option("--c", "cs", type=float, multiple=True, help="evaluate the archimedean ratio at these c")
@click.option("--t", "ts", type=float, multiple=True, default=(0.0,))
@run_options
def gamma(ctx, k1, k2, cs, ts):
    """Gamma factor shifts of L(FxG, s) and optional ratio monitoring."""
    g = analytic.gamma_factors(k1, k2)
    ratios = []
    for c in cs:
        for t in ts:
            v, b = analytic.archimedean_ratio(k1, k2, c, t)
            ratios.append({"c": c, "t": t, "ratio": v, "bound": b, "ratio_over_bound": v / b})
    results = {
        "entries": [{"kind": k, "shift": s} for k, s in g.entries],
        "count": len(g),
        "C_shifts": g.c_shifts,
        "R_shifts": g.r_shifts,
        "ratios": ratios,
    }
    _emit(ctx, ExperimentReport("gamma", {"k1": k1, "k2": k2, "c": list(cs), "t": list(ts)}, results))


@cli.command()
@click.option("--f", "f_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--g", "g_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--same/--independent", default=True, help="with sampling: G = F or an independent draw")
@click.option("--checkpoints", default=None, help="comma-separated x values (default: log-spaced to the cutoff)")
@run_options
def sums(ctx, f_file, g_file, same, checkpoints):
    """Partial sums of lambda_F(n) lambda_G(n) with log-log slope; CSV curve in --out."""
    cfg: RunConfig = ctx.obj
    N = cfg.cutoff
    if checkpoints:
        cps = [int(x) for x in checkpoints.split(",") if x.strip()]
    else:
        cps = sorted(set(np.logspace(1, np.log10(N), 16).astype(int).tolist())) if N >= 10 else [N]
    mode = "float" if cfg.mode == "float" or not (f_file or g_file) else None
    if f_file or g_file:
        F = _system(ctx, f_file, 0, N)
        G = F if (same and not g_file) else _system(ctx, g_file, 1, N)
        tF = eigen_core.extend_multiplicative(F, N, mode)
        tG = tF if G is F else eigen_core.extend_multiplicative(G, N, mode)
    else:
        measure = signs_sim.SamplingMeasure.parse(cfg.measure)
        sF, sG = np.random.SeedSequence(cfg.seed).spawn(2)
        tF = signs_sim.sample_table(measure, N, sF)
        tG = tF if same else signs_sim.sample_table(measure, N, sG)
    report = analytic.partial_sum_experiment(tF, tG, cps, same=tF is tG)
    _emit(ctx, report, csv_text=analytic.sums_to_csv(report))


@cli.command()
@click.option("--pairs", type=int, default=20)
@click.option("--x", "x", type=int, default=10**6)
@click.option("--prime-x", type=int, default=None, help="cutoff for the prime-sign estimators")
@click.option("--c", "c", type=float, default=0.1, help="hypothesis constant")
@click.option("--band", type=float, default=0.03, help="allowed |pos fraction - 1/2|")
@run_options
def signs(ctx, pairs, x, prime_x, c, band):
    """Sign census, prime-sign estimators and hypothesis check on sampled pairs."""
    cfg: RunConfig = ctx.obj
    measure = signs_sim.SamplingMeasure.parse(cfg.measure)
    report = signs_sim.signs_experiment(measure, pairs, x, cfg.seed, c, prime_x, cfg.workers, band)
    _emit(ctx, report)


def main():
    cli(prog_name="siegel-hecke")


if __name__ == "__main__":
    main()
