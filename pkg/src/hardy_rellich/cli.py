"""Command-line driver: constants, verification runs, identity suites, sweeps.

Every command that produces tabular data writes a CSV and a JSON record into
the output directory and renders a matplotlib figure next to them.  Exit
codes are machine-readable: 0 success (Rellich criterion holds where it
applies), 1 solver failure, 2 Hardy holds but the Rellich criterion fails,
3 Hardy invalid, 64 usage or configuration errors.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import agmon, figures, form_calculus, grushin
from .constants import grushin_constants, rellich_constant
from .errors import ConfigError, SolverError, UnsupportedConfigurationError
from .form_calculus import DiscreteForm, DiscreteFunction
from .radial_spectral import (
    ConvergenceReport,
    GridSpec,
    WeightProfile,
    assemble,
    hardy_quotient_min,
    rellich_quotient_min,
)
from .report import CSV_COLUMNS, ReportRecord, RunConfig, write_csv
from .weights import WeightParams

EX_OK = 0
EX_SOLVER = 1
EX_RELLICH_INVALID = 2
EX_HARDY_INVALID = 3
EX_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to an INI run configuration")
    common.add_argument("--out", default="reports", help="output directory")
    common.add_argument("--jobs", type=int, default=1, help="parallel sweep cells")
    common.add_argument("--seed", type=int, default=None, help="override config seed")
    common.add_argument("--json", action="store_true", help="print the JSON record")

    parser = _Parser(prog="hardy-rellich", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_const = sub.add_parser(
        "constants", parents=[common], help="closed-form constant ledger"
    )
    p_const.add_argument("dim", type=int)
    p_const.add_argument("delta", type=float)
    p_const.add_argument("delta_prime", type=float)
    p_const.add_argument(
        "--grushin",
        type=int,
        metavar="D2",
        default=None,
        help="treat dim as the first factor of a product operator",
    )

    for kind in ("hardy", "rellich"):
        sub.add_parser(
            f"verify-{kind}", parents=[common], help=f"variational {kind} verification run"
        )
    sub.add_parser("identities", parents=[common], help="form-calculus identity suite")
    sub.add_parser(
        "agmon", parents=[common], help="metric completeness, cutoffs and energy decay"
    )
    sub.add_parser("grushin", parents=[common], help="product-operator separation checks")
    sub.add_parser("sweep", parents=[common], help="constant ledger over a parameter grid")
    return parser


def _load_config(args) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig.default()
    return config.with_seed(args.seed)


def _out_dir(args) -> Path:
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _fmt_exact(value) -> str:
    if value is None:
        return "-"
    frac = Fraction(value)
    return f"{frac} ({float(frac):.12g})"


def _print_ledger(ledger) -> None:
    p = ledger.params
    kind = "grushin (d1)" if ledger.grushin else "punctured space"
    print(f"constants for d={p.dim} delta={p.delta:g} delta_prime={p.delta_prime:g} [{kind}]")
    print(f"  a1     = {_fmt_exact(ledger.a1)}")
    print(f"  nu     = {_fmt_exact(ledger.nu)}")
    print(f"  gamma  = {'inf' if ledger.gamma is None else _fmt_exact(ledger.gamma)}")
    print(f"  a2     = {_fmt_exact(ledger.a2)}")
    print(f"  regime = {ledger.regime.value}")
    print(f"  hardy_valid   = {ledger.hardy_valid}")
    print(f"  rellich_valid = {ledger.rellich_valid}")
    if not ledger.hardy_valid:
        print("  note: Hardy constant invalid (d + min(delta, delta') - 2 <= 0)")
    elif not ledger.rellich_valid:
        print("  note: criterion nu < a1 fails; no Rellich constant")


def _ledger_exit(ledger) -> int:
    if not ledger.hardy_valid:
        return EX_HARDY_INVALID
    if not ledger.rellich_valid:
        return EX_RELLICH_INVALID
    return EX_OK


def cmd_constants(args) -> int:
    params = WeightParams(args.dim, args.delta, args.delta_prime)
    if args.grushin is not None:
        if args.grushin < 1:
            raise UsageError("--grushin dimension must be >= 1")
        ledger = grushin_constants(params)
    else:
        ledger = rellich_constant(params)
    _print_ledger(ledger)
    if args.json:
        record = ReportRecord(run_id="", command="constants", ledger=ledger)
        print(record.to_json(), end="")
    return _ledger_exit(ledger)


def _schedule_from_config(config: RunConfig, kind: str) -> list:
    grid = config["grid"]
    base = GridSpec(grid["n"], grid["r_min"], grid["r_max"])
    widen = config["schedule"]["widen_decades"]
    if widen is None:
        widen = [2.0, 4.0, 6.0] if kind == "hardy" else [2.0, 4.0]
    decades = np.log10(base.r_max / base.r_min)
    density = (base.n - 1) / decades
    schedule = []
    if config["schedule"]["include_coarse"]:
        schedule.append(GridSpec(max(3, base.n // 2 + 1), base.r_min, base.r_max))
    schedule.append(base)
    for extra in widen:
        factor = 10.0 ** (extra / 2.0)
        n = int(round(density * (decades + extra))) + 1
        schedule.append(GridSpec(n, base.r_min / factor, base.r_max * factor))
    return schedule


def _verify_rows(report: ConvergenceReport) -> list:
    rows = []
    for est, sec in zip(report.estimates, report.seconds):
        rows.append(
            {
                "n": est.grid["n"],
                "r_min": est.grid["r_min"],
                "r_max": est.grid["r_max"],
                "estimate": est.value,
                "target": report.target,
                "gap": est.value - report.target,
                "residual": est.residual_norm,
                "seconds": sec,
            }
        )
    return rows


def cmd_verify(args, kind: str) -> int:
    config = _load_config(args)
    weight = config["weight"]
    params = WeightParams(weight["dim"], weight["delta"], weight["delta_prime"])
    ledger = rellich_constant(params)
    if not ledger.hardy_valid:
        print("hardy constant invalid for these parameters; nothing to verify")
        return EX_HARDY_INVALID
    if kind == "rellich" and not ledger.rellich_valid:
        print(
            f"criterion nu < a1 fails (nu={float(ledger.nu):g}, "
            f"a1={float(ledger.a1):g}); refusing the Rellich run"
        )
        return EX_RELLICH_INVALID
    target = float(ledger.a1 if kind == "hardy" else ledger.a2)
    schedule = _schedule_from_config(config, kind)
    solver = config["solver"]

    profile = WeightProfile(params)
    minimize = hardy_quotient_min if kind == "hardy" else rellich_quotient_min
    estimates, seconds = [], []
    for step, spec in enumerate(schedule, start=1):
        start = time.perf_counter()
        try:
            forms = assemble(profile, spec.build())
            est = minimize(
                forms,
                rtol=solver["residual_tol"],
                max_iterations=solver["max_iterations"],
            )
        except SolverError as exc:
            print(
                f"refinement step {step} (n={spec.n}, r=[{spec.r_min:g}, "
                f"{spec.r_max:g}]) failed: {exc}",
                file=sys.stderr,
            )
            return EX_SOLVER
        seconds.append(time.perf_counter() - start)
        estimates.append(est)
        print(
            f"step {step}: n={est.grid['n']} r=[{est.grid['r_min']:g}, "
            f"{est.grid['r_max']:g}] estimate={est.value:.9g} "
            f"gap={est.value - target:.3e}"
        )
    report = ConvergenceReport(target=target, kind=kind, estimates=estimates, seconds=seconds)

    out = _out_dir(args)
    run_id = config.run_id()
    stem = f"verify-{kind}-{run_id[:12]}"
    rows = _verify_rows(report)
    write_csv(out / f"{stem}.csv", rows)
    record = ReportRecord(
        run_id=run_id,
        command=f"verify-{kind}",
        ledger=ledger,
        estimates=[
            {k: row[k] for k in CSV_COLUMNS if k != "seconds"}
            | {"iterations": est.iterations}
            for row, est in zip(rows, report.estimates)
        ],
        gaps=report.gaps,
        diagnostics={
            "monotone": report.monotone_flag,
            "one_sided": report.one_sided_flag,
            "kind": kind,
        },
        seconds=seconds,
    )
    (out / f"{stem}.json").write_text(record.to_json(), encoding="utf-8")
    figures.convergence_figure(report, out / f"{stem}.png")
    final_gap = report.gaps[-1]
    print(f"final gap: {final_gap:.6g} ({final_gap / target:.3%} of target {target:.6g})")
    if args.json:
        print(record.to_json(), end="")
    return EX_OK


def cmd_identities(args) -> int:
    config = _load_config(args)
    ident = config["identities"]
    results = form_calculus.run_identity_suite(
        dims=ident["dims"],
        deltas=ident["deltas"],
        samples=ident["samples"],
        seed=config.seed,
        nodes=ident["nodes"],
        r_min=ident["r_min"],
        r_max=ident["r_max"],
    )
    checks = [
        ("key_identity", results["key_identity"], form_calculus.EQUALITY_TOL),
        ("leibniz_square", results["leibniz_square"], form_calculus.EQUALITY_TOL),
        ("resolvent_bound", results["resolvent_bound"], None),
        ("locality_bounds", results["locality_bounds"], None),
        ("normal_contraction", results["normal_contraction"], None),
    ]
    all_ok = True
    rows = []
    for name, value, tol in checks:
        if tol is None:
            ok = bool(value)
            print(f"{name:20s} {'pass' if ok else 'FAIL'}")
            rows.append({"check": name, "max_residual": "", "threshold": "", "passed": ok})
        else:
            ok = value <= tol
            print(f"{name:20s} max residual {value:.3e} (tol {tol:g}) {'pass' if ok else 'FAIL'}")
            rows.append({"check": name, "max_residual": value, "threshold": tol, "passed": ok})
        all_ok &= ok

    out = _out_dir(args)
    run_id = config.run_id()
    stem = f"identities-{run_id[:12]}"
    write_csv(out / f"{stem}.csv", rows, columns=["check", "max_residual", "threshold", "passed"])
    figures.residual_figure(
        [name for name, _, tol in checks if tol is not None],
        [value for _, value, tol in checks if tol is not None],
        form_calculus.EQUALITY_TOL,
        out / f"{stem}.png",
    )
    record = ReportRecord(
        run_id=run_id,
        command="identities",
        diagnostics={
            "families": results["families"],
            "samples": results["samples"],
            "results": {name: (value if tol is None else value) for name, value, tol in checks},
            "all_passed": all_ok,
        },
    )
    (out / f"{stem}.json").write_text(record.to_json(), encoding="utf-8")
    if args.json:
        print(record.to_json(), end="")
    return EX_OK if all_ok else 1


def cmd_agmon(args) -> int:
    config = _load_config(args)
    weight, grid_cfg, acfg = config["weight"], config["grid"], config["agmon"]
    params = WeightParams(weight["dim"], weight["delta"], weight["delta_prime"])
    profile = WeightProfile(params)
    from .radial_spectral import RadialGrid

    grid = RadialGrid.log_spaced(grid_cfg["r_min"], grid_cfg["r_max"], acfg["nodes"])
    metric = agmon.AgmonMetric(grid)
    cutoffs = agmon.build_cutoffs(
        metric, acfg["plateau"], acfg["depth"], acfg["step_decades"]
    )
    probe = agmon.completeness_probe(1.0, [10.0**-k for k in range(1, 7)])
    eikonal = max(agmon.eikonal_max(grid, v) for v in cutoffs.values)

    alpha = (params.dim + params.delta - 2 - acfg["trial_epsilon"]) / 2
    support = (grid.r_min * 10.0, grid.r_max / 100.0)
    phi = DiscreteFunction(agmon.tapered_power_values(grid, alpha, support))
    form = DiscreteForm.build(profile, grid)
    decay, bounds = agmon.energy_decay(form, cutoffs, phi)
    energy_phi = float(form_calculus.energy(form, phi.field(form)))

    print("completeness probe (r=1, shells 1e-1..1e-6):", np.array2string(probe, precision=6))
    print(f"eikonal bound max d^2 |grad rho|^2 = {eikonal:.12f} (cap {cutoffs.m**-2:g})")
    rows = []
    for k, (val, bound) in enumerate(zip(decay, bounds), start=1):
        inner, outer = cutoffs.shells[k - 1]
        rows.append(
            {
                "step": k,
                "inner": inner,
                "outer": outer,
                "energy": val,
                "bound": bound,
            }
        )
        print(f"shell {k}: [{inner:.3g}, {outer:.3g}] localized energy {val:.6e}")
    print(f"trial energy {energy_phi:.6e}; final ratio {decay[-1] / energy_phi:.3e}")

    out = _out_dir(args)
    run_id = config.run_id()
    stem = f"agmon-{run_id[:12]}"
    write_csv(out / f"{stem}.csv", rows, columns=["step", "inner", "outer", "energy", "bound"])
    record = ReportRecord(
        run_id=run_id,
        command="agmon",
        diagnostics={
            "probe": probe.tolist(),
            "eikonal_max": eikonal,
            "plateau": cutoffs.m,
            "decay": decay,
            "bounds": bounds,
            "trial_energy": energy_phi,
        },
    )
    (out / f"{stem}.json").write_text(record.to_json(), encoding="utf-8")
    figures.decay_figure(decay, bounds, energy_phi, out / f"{stem}.png")
    if args.json:
        print(record.to_json(), end="")
    return EX_OK


def cmd_grushin(args) -> int:
    config = _load_config(args)
    weight, gcfg = config["weight"], config["grushin"]
    params = WeightParams(weight["dim"], weight["delta"], weight["delta_prime"])
    ledger = grushin_constants(params)
    _print_ledger(ledger)
    if not ledger.hardy_valid:
        return EX_HARDY_INVALID
    gconfig = grushin.GrushinConfig(
        params=params,
        dim2=gcfg["dim2"],
        b=gcfg["b"],
        second_grid=grushin.SecondFactorGrid(n=gcfg["second_nodes"]),
    )
    try:
        report, quotients = grushin.grushin_hardy_estimate(gconfig, lambdas=gcfg["lambdas"])
        cross = grushin.cross_validate_product_norm(
            gconfig, n1=gcfg["cross_n"], n2=gcfg["cross_n"]
        )
    except SolverError as exc:
        print(f"first-factor solve failed: {exc}", file=sys.stderr)
        return EX_SOLVER
    except UnsupportedConfigurationError as exc:
        print(f"unsupported configuration: {exc}", file=sys.stderr)
        return EX_USAGE
    target = report.target
    rows = []
    for lam, q in zip(gcfg["lambdas"], quotients):
        rows.append({"lambda": lam, "quotient": q, "target": target, "gap": q - target})
        print(f"lambda={lam:g}: quotient={q:.9g} gap={q - target:.3e}")
    print(f"strong-operator norm cross-validation residual: {cross:.3e}")

    out = _out_dir(args)
    run_id = config.run_id()
    stem = f"grushin-{run_id[:12]}"
    write_csv(out / f"{stem}.csv", rows, columns=["lambda", "quotient", "target", "gap"])
    record = ReportRecord(
        run_id=run_id,
        command="grushin",
        ledger=ledger,
        estimates=rows,
        gaps=[q - target for q in quotients],
        diagnostics={"cross_validation": cross, "first_factor_gap": report.gaps[-1]},
        seconds=list(report.seconds),
    )
    (out / f"{stem}.json").write_text(record.to_json(), encoding="utf-8")
    figures.lambda_figure(gcfg["lambdas"], quotients, target, out / f"{stem}.png")
    if args.json:
        print(record.to_json(), end="")
    return EX_OK


def _sweep_cell(cell):
    dim, delta, delta_prime = cell
    ledger = rellich_constant(WeightParams(dim, delta, delta_prime))
    floats = ledger.as_floats()
    return {
        "dim": dim,
        "delta": delta,
        "delta_prime": delta_prime,
        "a1": "" if floats["a1"] is None else floats["a1"],
        "nu": floats["nu"],
        "gamma": floats["gamma"],
        "a2": "" if floats["a2"] is None else floats["a2"],
        "regime": floats["regime"],
        "hardy_valid": floats["hardy_valid"],
        "rellich_valid": floats["rellich_valid"],
    }, ledger


def cmd_sweep(args) -> int:
    config = _load_config(args)
    scfg = config["sweep"]
    cells = [
        (dim, delta, delta_prime)
        for dim in scfg["dims"]
        for delta in scfg["deltas"]
        for delta_prime in scfg["delta_primes"]
    ]
    jobs = max(1, args.jobs)
    if jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_cell, cells))
    else:
        results = [_sweep_cell(cell) for cell in cells]

    out = _out_dir(args)
    run_id = config.run_id()
    stem = f"sweep-{run_id[:12]}"
    rows = [row for row, _ in results]
    write_csv(
        out / f"{stem}.csv",
        rows,
        columns=[
            "dim",
            "delta",
            "delta_prime",
            "a1",
            "nu",
            "gamma",
            "a2",
            "regime",
            "hardy_valid",
            "rellich_valid",
        ],
    )
    records = [
        ReportRecord(run_id=run_id, command="sweep-cell", ledger=ledger).payload()
        for _, ledger in results
    ]
    import json as _json

    (out / f"{stem}-records.json").write_text(
        _json.dumps(records, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    figures.sweep_figure(rows, out / f"{stem}.png")
    n_rellich = sum(1 for row in rows if row["rellich_valid"])
    print(f"swept {len(rows)} cells; Rellich criterion holds on {n_rellich}")
    if args.json:
        print(_json.dumps(records, sort_keys=True, indent=2))
    return EX_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "constants":
            return cmd_constants(args)
        if args.command == "verify-hardy":
            return cmd_verify(args, "hardy")
        if args.command == "verify-rellich":
            return cmd_verify(args, "rellich")
        if args.command == "identities":
            return cmd_identities(args)
        if args.command == "agmon":
            return cmd_agmon(args)
        if args.command == "grushin":
            return cmd_grushin(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        raise UsageError(f"unknown command {args.command!r}")
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_USAGE
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EX_SOLVER


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
