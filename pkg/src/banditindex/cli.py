"""Command-line interface: compute, check, generate, stats, bench."""
from __future__ import annotations

import json
import math
import statistics
import sys
import time
from multiprocessing import get_context
from pathlib import Path
from typing import Optional

import click
import numpy as np

from .arm import (
    ArmError,
    RestlessArm,
    generate_banded,
    generate_dense_uniform,
    load_arm,
    save_arm,
)
from .index_solver import (
    AverageReward,
    Block,
    Criterion,
    Cubic,
    Discounted,
    Indexable,
    Multichain,
    Naive,
    NonIndexable,
    NotWeaklyCommunicating,
    SolverOptions,
    Variant,
    compute_indices,
)
from .oracle import TooLarge, UnsupportedByOracle, naive_whittle, oracle_indexability

#: Index discrepancy below which two runs count as agreeing.
AGREEMENT_TOL = 1e-6


@click.group()
def main() -> None:
    """Indexability testing and Whittle/Gittins index computation."""


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load(arm_file: str) -> RestlessArm:
    try:
        return load_arm(arm_file)
    except ArmError as exc:
        _fail(str(exc))
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot read arm file {arm_file}: {exc}")
    raise AssertionError("unreachable")


def _resolve_criterion(
    arm: RestlessArm, criterion: Optional[str], beta: Optional[float]
) -> Criterion:
    """Flags take precedence over the arm file's discount field."""
    if criterion == "avg":
        if beta is not None:
            _fail("--beta is incompatible with --criterion avg")
        return AverageReward()
    if criterion == "discounted":
        value = beta if beta is not None else arm.discount
        if value is None:
            _fail("discounted criterion requires --beta or a discount in the arm file")
        return Discounted(float(value))
    if beta is not None:
        return Discounted(float(beta))
    if arm.discount is not None:
        return Discounted(arm.discount)
    return AverageReward()


def _json_index(value: float) -> object:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


def _result_file(result, variant_name: str, elapsed_ms: float) -> dict:
    if isinstance(result, Indexable):
        return {
            "status": "indexable",
            "indices": [_json_index(v) for v in result.indices],
            "sigma": list(result.sigma),
            "iterations": result.iterations,
            "variant": variant_name,
            "elapsed_ms": elapsed_ms,
        }
    if isinstance(result, NonIndexable):
        status = "non_indexable"
    else:
        status = "multichain"
    return {
        "status": status,
        "indices": None,
        "sigma": None,
        "iterations": result.iterations,
        "variant": variant_name,
        "elapsed_ms": elapsed_ms,
    }


@main.command()
@click.argument("arm_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--criterion", type=click.Choice(["avg", "discounted"]), default=None,
              help="Evaluation criterion; default comes from the arm file.")
@click.option("--beta", type=float, default=None, help="Discount factor in (0, 1).")
@click.option("--variant", type=click.Choice(["naive", "cubic", "block"]),
              default="block", show_default=True)
@click.option("--recompute-count", type=int, default=None,
              help="Bulk refresh count for the block variant.")
@click.option("--no-index-check", is_flag=True, default=False,
              help="Skip the re-entry (indexability) test.")
@click.option("--tolerance", type=float, default=None,
              help="Relative zero threshold (default 1e-10 or BANDIT_INDEX_TOL).")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the result JSON here instead of stdout.")
def compute(arm_file, criterion, beta, variant, recompute_count, no_index_check,
            tolerance, out) -> None:
    """Compute indices of the arm in ARM_FILE.

    Exit code: 0 indexable, 2 non-indexable, 3 multichain, 1 error.
    """
    arm = _load(arm_file)
    crit = _resolve_criterion(arm, criterion, beta)
    if recompute_count is not None and variant != "block":
        _fail("--recompute-count is only valid with --variant block")
    variant_obj: Variant
    if variant == "naive":
        variant_obj = Naive()
    elif variant == "cubic":
        variant_obj = Cubic()
    else:
        variant_obj = Block(recompute_count)
    opts = SolverOptions(
        check_indexability=not no_index_check,
        variant=variant_obj,
        criterion=crit,
        tolerance=tolerance,
    )
    start = time.perf_counter()
    try:
        result = compute_indices(arm, opts)
    except (NotWeaklyCommunicating, TooLarge, ValueError) as exc:
        _fail(str(exc))
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    payload = _result_file(result, variant, elapsed_ms)
    text = json.dumps(payload, indent=2)
    if out is not None:
        Path(out).write_text(text + "\n", encoding="utf-8")
        click.echo(f"{payload['status']} ({elapsed_ms:.1f} ms) -> {out}")
    else:
        click.echo(text)
    if isinstance(result, Indexable):
        sys.exit(0)
    if isinstance(result, NonIndexable):
        click.echo(
            f"non-indexable: state {result.witness_state} re-enters at iteration "
            f"{result.at_iteration}", err=True)
        sys.exit(2)
    click.echo(
        f"multichain: active set {result.at_policy} at iteration {result.iterations}",
        err=True)
    sys.exit(3)


def _discrepancy(a: np.ndarray, b: np.ndarray) -> float:
    """Max index difference; infinite entries must match in sign."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not np.array_equal(np.isposinf(a), np.isposinf(b)) or not np.array_equal(
        np.isneginf(a), np.isneginf(b)
    ):
        return math.inf
    finite = np.isfinite(a)
    if not finite.any():
        return 0.0
    return float(np.max(np.abs(a[finite] - b[finite])))


def _verdict_name(result) -> str:
    if isinstance(result, Indexable):
        return "indexable"
    if isinstance(result, NonIndexable):
        return "non_indexable"
    return "multichain"


@main.command()
@click.argument("arm_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--oracle", "use_oracle", is_flag=True, default=False,
              help="Cross-check against the policy-enumeration oracle.")
@click.option("--max-n", type=int, default=10, show_default=True,
              help="Refuse --oracle runs beyond this size.")
def check(arm_file, use_oracle, max_n) -> None:
    """Cross-check the engine against a reference on ARM_FILE.

    Default reference is the fresh-factorization mirror; with --oracle, the
    exhaustive policy-enumeration oracle.  Nonzero exit on disagreement.
    """
    arm = _load(arm_file)
    crit = _resolve_criterion(arm, None, None)
    try:
        engine = compute_indices(arm, SolverOptions(criterion=crit))
        if use_oracle:
            if arm.n > max_n:
                _fail(f"--oracle limited to n <= {max_n}, arm has n={arm.n}")
            reference = oracle_indexability(arm)
            ref_name = "oracle"
        else:
            reference = naive_whittle(arm, crit)
            ref_name = "naive"
    except (NotWeaklyCommunicating, TooLarge) as exc:
        _fail(str(exc))
    if isinstance(reference, UnsupportedByOracle):
        click.echo(f"engine: {_verdict_name(engine)}")
        click.echo(f"oracle: UNSUPPORTED_BY_ORACLE ({reference.reason})")
        sys.exit(0)
    click.echo(f"engine: {_verdict_name(engine)}")
    click.echo(f"{ref_name}: {_verdict_name(reference)}")
    if type(engine) is not type(reference):
        click.echo("DISAGREE: verdicts differ")
        sys.exit(1)
    if isinstance(engine, Indexable):
        d = _discrepancy(engine.indices, reference.indices)
        click.echo(f"max index discrepancy: {d:.3e}")
        if not d <= AGREEMENT_TOL:
            click.echo("DISAGREE: index discrepancy exceeds tolerance")
            sys.exit(1)
    click.echo("AGREE")
    sys.exit(0)


@main.command()
@click.option("--n", type=int, required=True, help="Number of states.")
@click.option("--bandwidth", default="dense", show_default=True,
              help='Odd band width, or "dense".')
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=int, default=1, show_default=True,
              help="Number of arms to generate (seeds seed..seed+count-1).")
@click.option("--out-dir", type=click.Path(file_okay=False), default=".",
              show_default=True)
def generate(n, bandwidth, seed, count, out_dir) -> None:
    """Write COUNT random arm files into OUT-DIR (deterministic in --seed)."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    for i in range(count):
        s = seed + i
        try:
            if bandwidth == "dense":
                arm = generate_dense_uniform(n, s)
                tag = "dense"
            else:
                b = int(bandwidth)
                arm = generate_banded(n, b, s)
                tag = f"b{b}"
        except (ArmError, ValueError) as exc:
            _fail(str(exc))
        path = directory / f"arm_n{n}_{tag}_seed{s}.json"
        save_arm(arm, path)
        click.echo(str(path))


def _stats_worker(task: tuple[int, str, int]) -> tuple[int, Optional[bool], str]:
    """Generate one arm and test indexability (top-level for pickling)."""
    n, bandwidth, seed = task
    try:
        if bandwidth == "dense":
            arm = generate_dense_uniform(n, seed)
        else:
            arm = generate_banded(n, int(bandwidth), seed)
        result = compute_indices(arm, SolverOptions(variant=Cubic()))
        return seed, isinstance(result, Indexable), ""
    except Exception as exc:  # logged per-cell by the caller
        return seed, None, f"{type(exc).__name__}: {exc}"


def _parse_int_list(text: str, option: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        _fail(f"{option} expects a comma-separated list of integers, got {text!r}")
    raise AssertionError("unreachable")


@main.command()
@click.option("--n", "n_list", required=True,
              help="Comma-separated list of state counts.")
@click.option("--bandwidth", "bandwidth_list", default="dense", show_default=True,
              help='Comma-separated list of odd band widths and/or "dense".')
@click.option("--samples", type=int, required=True, help="Arms per (n, bandwidth) cell.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Worker processes; output is identical for any value.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Write the CSV here instead of stdout.")
def stats(n_list, bandwidth_list, samples, seed, jobs, csv_path) -> None:
    """Count indexable arms per (n, bandwidth) cell over seeded samples."""
    if samples < 1:
        _fail("--samples must be >= 1")
    ns = _parse_int_list(n_list, "--n")
    bandwidths = [part for part in bandwidth_list.split(",") if part != ""]
    lines = ["n,bandwidth,samples,indexable,seed"]
    for n in ns:
        for bandwidth in bandwidths:
            tasks = [(n, bandwidth, seed + i) for i in range(samples)]
            if jobs > 1:
                with get_context("fork").Pool(jobs) as pool:
                    outcomes = pool.map(_stats_worker, tasks, chunksize=16)
            else:
                outcomes = [_stats_worker(t) for t in tasks]
            errors = [(s, msg) for s, ok, msg in outcomes if ok is None]
            if errors:
                bad_seed, msg = errors[0]
                click.echo(
                    f"cell n={n} bandwidth={bandwidth} aborted at seed {bad_seed}: {msg}",
                    err=True)
                continue
            indexable = sum(1 for _, ok, _ in outcomes if ok)
            lines.append(f"{n},{bandwidth},{samples},{indexable},{seed}")
    text = "\n".join(lines) + "\n"
    if csv_path is not None:
        Path(csv_path).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--n", "n_list", required=True,
              help="Comma-separated list of state counts.")
@click.option("--variant", "variant_list", default="cubic,block", show_default=True,
              help="Comma-separated subset of naive,cubic,block.")
@click.option("--repeats", type=int, default=3, show_default=True,
              help="Timed runs per row (fresh arm each); the median is reported.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Write the CSV here instead of stdout.")
def bench(n_list, variant_list, repeats, seed, csv_path) -> None:
    """Time compute_indices on fresh random dense arms."""
    if repeats < 1:
        _fail("--repeats must be >= 1")
    ns = _parse_int_list(n_list, "--n")
    variants: list[tuple[str, Variant]] = []
    for name in variant_list.split(","):
        if name == "naive":
            variants.append((name, Naive()))
        elif name == "cubic":
            variants.append((name, Cubic()))
        elif name == "block":
            variants.append((name, Block()))
        elif name:
            _fail(f"unknown variant {name!r}")
    lines = ["n,variant,check,median_ms"]
    for n in ns:
        arms = [generate_dense_uniform(n, seed + rep) for rep in range(repeats)]
        for name, variant_obj in variants:
            for check_flag, label in ((True, "on"), (False, "off")):
                opts = SolverOptions(check_indexability=check_flag, variant=variant_obj)
                times_ms = []
                for arm in arms:
                    start = time.perf_counter()
                    try:
                        compute_indices(arm, opts)
                    except TooLarge as exc:
                        _fail(str(exc))
                    times_ms.append((time.perf_counter() - start) * 1000.0)
                lines.append(f"{n},{name},{label},{statistics.median(times_ms):.3f}")
    text = "\n".join(lines) + "\n"
    if csv_path is not None:
        Path(csv_path).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
