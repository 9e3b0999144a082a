"""Command-line surface: simulations, sweeps, analytic reports, oracles,
layout emission, and an XOR codec walkthrough.

Exit codes: 0 success, 1 usage error, 2 validation error (a named model
bound was violated), 3 internal failure.  Values given as flags override
values from ``--config`` (a flat JSON object), which override defaults.
Output lands on stdout or, with ``--out``, in a file written atomically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .analytic import (
    analytic_report,
    compare_apportionments,
    exact_mds_reliability,
    hraid_reliability,
    hraid_unreliability,
    raid_series_approx,
)
from .codec import (
    disk_cells,
    encode_stripes,
    node_cells,
    random_payloads,
    recover,
    verify_parity,
    write_strip_tree,
)
from .config import FailureModel, HraidConfig, ValidationError
from .layout import LayoutGrid, generate_layout, verify_layout
from .oracle import exact_reliability_enum, markov_mttdl
from .simulator import (
    MttdlEstimate,
    estimate_mttdl,
    simulate_trial,
    sweep,
    trace_jsonl_line,
)
from .stream import TrialStream

_CSV_HEADER = (
    "n,m,k,ell,delta_per_hour,gamma_per_hour,trials,seed,"
    "mttdl_hours,std_hours,ci95_low,ci95_high"
)

#: Config-file keys accepted by simulate and sweep, mapped to flag dests.
_CONFIG_KEYS = {
    "n": "n",
    "m": "m",
    "k": "k",
    "ell": "ell",
    "delta_per_hour": "delta",
    "gamma_per_hour": "gamma",
    "trials": "trials",
    "seed": "seed",
    "output_format": "format",
    "output_path": "out",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: D401 - argparse hook
        raise UsageError(message)


def _write_output(text: str, out: str | None) -> None:
    """Print to stdout, or write the file atomically (temp + rename)."""
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_config_file(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError(f"config file {path} must hold a JSON object")
    unknown = sorted(set(raw) - set(_CONFIG_KEYS))
    if unknown:
        raise ValidationError(
            f"config file {path} has unknown keys {unknown}; "
            f"accepted: {sorted(_CONFIG_KEYS)}"
        )
    return {_CONFIG_KEYS[key]: value for key, value in raw.items()}


def _merge(args: argparse.Namespace, defaults: dict) -> dict:
    """Flags override config-file values override defaults."""
    merged = dict(defaults)
    if getattr(args, "config", None):
        merged.update(_load_config_file(args.config))
    for dest in defaults:
        flag_value = getattr(args, dest, None)
        if flag_value is not None:
            merged[dest] = flag_value
    return merged


def _add_geometry_flags(p: argparse.ArgumentParser, with_kl: bool = True) -> None:
    p.add_argument("--n", type=int, help="number of storage nodes (N)")
    p.add_argument("--m", type=int, help="disks per node (M)")
    if with_kl:
        p.add_argument("--k", type=int, help="inter-node tolerance (node failures)")
        p.add_argument("--l", dest="ell", type=int, help="intra-node tolerance (disk failures per node)")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=float, help="disk failure rate per hour")
    p.add_argument("--gamma", type=float, help="controller failure rate per hour")
    p.add_argument("--trials", type=int, help="Monte Carlo trial count")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--format", choices=["table", "csv", "json"], help="output format")
    p.add_argument("--out", help="output file (atomic write); default stdout")
    p.add_argument("--config", help="JSON config file; flags take precedence")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="hraidlab",
        description="Reliability laboratory for hierarchical RAID arrays.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="Monte Carlo MTTDL for one configuration")
    _add_geometry_flags(p_sim)
    _add_run_flags(p_sim)
    p_sim.add_argument(
        "--trace",
        help="also dump per-trial event traces as JSON lines to this file "
        "(runs the scalar traced engine)",
    )

    p_sweep = sub.add_parser("sweep", help="MTTDL grid over k = 0..3, l = 0..3")
    _add_geometry_flags(p_sweep, with_kl=False)
    _add_run_flags(p_sweep)

    p_an = sub.add_parser("analytic", help="closed-form reliability quantities")
    an_sub = p_an.add_subparsers(dest="analytic_command", required=True)
    p_rep = an_sub.add_parser("report", help="reliability summary for one configuration")
    _add_geometry_flags(p_rep)
    p_rep.add_argument("--eps", type=float, help="disk unreliability for evaluations")
    p_rep.add_argument("--out", help="output file; default stdout")
    p_cmp = an_sub.add_parser("compare", help="HRAID1/2 vs HRAID2/1 apportionment")
    _add_geometry_flags(p_cmp, with_kl=False)
    p_cmp.add_argument("--out", help="output file; default stdout")

    p_or = sub.add_parser("oracle", help="exact enumeration and Markov oracles")
    or_sub = p_or.add_subparsers(dest="oracle_command", required=True)
    p_enum = or_sub.add_parser("enum", help="fatal-set counts by failure cardinality")
    _add_geometry_flags(p_enum)
    p_enum.add_argument("--eps", type=float, help="also evaluate unreliability at eps")
    p_enum.add_argument("--out", help="output file; default stdout")
    p_mark = or_sub.add_parser("markov", help="exact MTTDL of the lumped failure chain")
    _add_geometry_flags(p_mark)
    p_mark.add_argument("--delta", type=float, help="disk failure rate per hour")
    p_mark.add_argument("--gamma", type=float, help="controller failure rate per hour")
    p_mark.add_argument("--out", help="output file; default stdout")

    p_lay = sub.add_parser("layout", help="emit or verify a strip layout")
    _add_geometry_flags(p_lay)
    p_lay.add_argument("--format", choices=["text", "json"], help="output format")
    p_lay.add_argument("--out", help="output file; default stdout")
    p_lay.add_argument("--verify", help="verify a JSON grid file instead of emitting")

    p_cod = sub.add_parser(
        "codec-demo", help="XOR encode, erase, and recover walkthrough (k, l <= 1)"
    )
    _add_geometry_flags(p_cod)
    p_cod.add_argument("--seed", type=int, help="payload seed")
    p_cod.add_argument("--strip-size", type=int, help="strip payload bytes")
    p_cod.add_argument("--dir", help="also write the strip tree under this directory")
    p_cod.add_argument(
        "--erase-disk",
        action="append",
        metavar="NODE:POS",
        help="erase one disk (repeatable)",
    )
    p_cod.add_argument(
        "--erase-node", action="append", type=int, help="erase one whole node (repeatable)"
    )
    return parser


def _require(merged: dict, *names: str) -> None:
    missing = [n for n in names if merged.get(n) is None]
    if missing:
        raise UsageError("missing required value(s): " + ", ".join(f"--{n}" for n in missing))


def _geometry(merged: dict) -> HraidConfig:
    return HraidConfig(
        n_nodes=merged["n"],
        disks_per_node=merged["m"],
        inter_tolerance=merged["k"],
        intra_tolerance=merged["ell"],
    )


def _rates(merged: dict) -> FailureModel:
    return FailureModel(
        disk_rate=merged["delta"], controller_rate=merged["gamma"]
    )


_RUN_DEFAULTS = {
    "n": None,
    "m": None,
    "k": 0,
    "ell": 0,
    "delta": 1e-6,
    "gamma": 0.0,
    "trials": 10_000,
    "seed": 0,
    "format": "table",
    "out": None,
}


def _cmd_simulate(args: argparse.Namespace) -> int:
    merged = _merge(args, _RUN_DEFAULTS)
    _require(merged, "n", "m")
    config = _geometry(merged)
    rates = _rates(merged)
    trials, seed = merged["trials"], merged["seed"]

    if args.trace:
        times = np.empty(trials, dtype=np.float64)
        with open(args.trace, "w") as fh:
            for i in range(trials):
                event = simulate_trial(config, rates, TrialStream(seed, i))
                times[i] = event.time_hours
                fh.write(trace_jsonl_line(i, event) + "\n")
        est = MttdlEstimate.from_times(times, seed)
    else:
        est = estimate_mttdl(config, rates, trials, seed)

    fmt = merged["format"]
    if fmt == "csv":
        text = _CSV_HEADER + "\n" + (
            f"{config.n},{config.m},{config.k},{config.ell},{rates.disk_rate!r},"
            f"{rates.controller_rate!r},{est.trials},{est.seed},"
            f"{est.mean_hours!r},{est.std_dev_hours!r},{est.ci95_low!r},{est.ci95_high!r}\n"
        )
    elif fmt == "json":
        text = json.dumps(
            {
                "n": config.n,
                "m": config.m,
                "k": config.k,
                "ell": config.ell,
                "delta_per_hour": rates.disk_rate,
                "gamma_per_hour": rates.controller_rate,
                "trials": est.trials,
                "seed": est.seed,
                "mttdl_hours": est.mean_hours,
                "std_hours": est.std_dev_hours,
                "ci95_low": est.ci95_low,
                "ci95_high": est.ci95_high,
            },
            indent=2,
        )
    else:
        text = (
            f"MTTDL estimate for HRAID {config.k}/{config.ell}: N={config.n}, "
            f"M={config.m}, delta={rates.disk_rate:g}/h, "
            f"gamma={rates.controller_rate:g}/h, trials={est.trials}, seed={est.seed}\n"
            f"  mean    : {est.mean_hours:.3f} h ({est.mean_hours / 1000.0:.1f} thousand hours)\n"
            f"  std dev : {est.std_dev_hours:.3f} h\n"
            f"  95% CI  : [{est.ci95_low:.3f}, {est.ci95_high:.3f}] h"
        )
    _write_output(text, merged["out"])
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    merged = _merge(args, _RUN_DEFAULTS)
    _require(merged, "n", "m")
    rates = _rates(merged)
    result = sweep(
        n=merged["n"],
        m=merged["m"],
        rates=rates,
        trials=merged["trials"],
        seed=merged["seed"],
    )
    fmt = merged["format"]
    if fmt == "csv":
        text = result.to_csv()
    elif fmt == "json":
        text = result.to_json()
    else:
        text = result.format_table()
    _write_output(text, merged["out"])
    return 0


def _cmd_analytic(args: argparse.Namespace) -> int:
    if args.analytic_command == "compare":
        if args.n is None or args.m is None:
            raise UsageError("missing required value(s): --n, --m")
        cmp_result = compare_apportionments(args.n, args.m)
        text = (
            f"HRAID1/2 vs HRAID2/1 on N={args.n} nodes x M={args.m} disks\n"
            f"  minimal fatal sets (6 failures): "
            f"1/2 -> {cmp_result.coeff_12}, 2/1 -> {cmp_result.coeff_21}\n"
            f"  verdict: {cmp_result.ordering.name}\n"
            f"  threshold form: N > 2 + (M-2)^2/(3M(M-1)) = "
            f"{cmp_result.threshold_n} ~= {float(cmp_result.threshold_n):.6g}"
        )
        _write_output(text, args.out)
        return 0

    if args.n is None or args.m is None:
        raise UsageError("missing required value(s): --n, --m")
    config = HraidConfig(args.n, args.m, args.k or 0, args.ell or 0)
    report = analytic_report(config)
    lines = [
        f"HRAID {config.k}/{config.ell} on N={config.n} nodes x M={config.m} disks",
        f"  d_min (fewest disk failures that can lose data)   : {report.d_min}",
        f"  d_max (most disk failures any survivable pattern) : {report.d_max}",
        f"  leading unreliability term: {report.leading.coefficient} * eps^{report.leading.power}",
    ]
    if report.p_12 is not None:
        lines += [
            f"  sixth-failure pool D_S = (N-2)M + M-2 = {report.d_s}",
            f"  p_1/2 = (M-2)/D_S = {report.p_12} ~= {float(report.p_12):.6g}",
            f"  p_2/1 = (M-1)/D_S = {report.p_21} ~= {float(report.p_21):.6g}",
            f"  apportionment threshold: N > {report.threshold_n} "
            f"~= {float(report.threshold_n):.6g}",
        ]
    if args.eps is not None:
        eps = args.eps
        r = hraid_reliability(config, eps)
        u = hraid_unreliability(config, eps)
        node_r = exact_mds_reliability(config.m, config.ell, eps)
        series = raid_series_approx(config.m, config.ell, eps)
        lines += [
            f"  at eps = {eps:g}:",
            f"    node reliability R_l                 : {node_r:.15g}",
            f"    node unreliability, two-term series  : {series:.15g}",
            f"    array reliability                    : {r:.15g}",
            f"    array unreliability                  : {u:.15g}",
            f"    leading-term approximation           : {report.leading.evaluate(eps):.15g}",
        ]
    _write_output("\n".join(lines), args.out)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    if args.n is None or args.m is None:
        raise UsageError("missing required value(s): --n, --m")
    config = HraidConfig(args.n, args.m, args.k or 0, args.ell or 0)
    if args.oracle_command == "enum":
        poly = exact_reliability_enum(config)
        text = poly.to_csv()
        if args.eps is not None:
            text += (
                f"# unreliability at eps={args.eps:g}: "
                f"{poly.unreliability(args.eps):.15g}\n"
            )
        _write_output(text, args.out)
        return 0
    rates = FailureModel(
        disk_rate=args.delta if args.delta is not None else 1e-6,
        controller_rate=args.gamma if args.gamma is not None else 0.0,
    )
    hours = markov_mttdl(config, rates)
    text = (
        f"exact MTTDL for HRAID {config.k}/{config.ell}: N={config.n}, M={config.m}, "
        f"delta={rates.disk_rate:g}/h, gamma={rates.controller_rate:g}/h\n"
        f"  {hours:.15g} hours ({hours / 1000.0:.4f} thousand hours)"
    )
    _write_output(text, args.out)
    return 0


def _cmd_layout(args: argparse.Namespace) -> int:
    if args.verify:
        try:
            grid = LayoutGrid.from_json(Path(args.verify).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read grid file {args.verify}: {exc}") from exc
        violations = verify_layout(grid)
        if violations:
            text = "\n".join(
                [f"layout INVALID: {len(violations)} violation(s)"] + violations
            )
            _write_output(text, args.out)
            return 2
        _write_output("layout valid: all balance invariants hold", args.out)
        return 0
    if args.n is None or args.m is None:
        raise UsageError("missing required value(s): --n, --m")
    config = HraidConfig(args.n, args.m, args.k or 0, args.ell or 0)
    grid = generate_layout(config)
    text = grid.to_json() if args.format == "json" else grid.as_text()
    _write_output(text, args.out)
    return 0


def _cmd_codec_demo(args: argparse.Namespace) -> int:
    n = args.n if args.n is not None else 4
    m = args.m if args.m is not None else 4
    k = args.k if args.k is not None else 1
    ell = args.ell if args.ell is not None else 1
    seed = args.seed if args.seed is not None else 42
    strip_size = args.strip_size if args.strip_size is not None else 4096
    config = HraidConfig(n, m, k, ell)
    grid = generate_layout(config)
    payloads = random_payloads(grid, seed, strip_size)
    content = encode_stripes(payloads, config, grid)
    bad = verify_parity(content)
    lines = [
        f"encoded HRAID {k}/{ell}: N={n}, M={m}, {len(payloads)} data strips of "
        f"{strip_size} bytes (seed {seed})",
        f"parity check after encode: {'ok' if not bad else 'FAILED'}",
    ]
    if args.dir:
        write_strip_tree(content, args.dir)
        lines.append(f"strip tree written under {args.dir}/node*/disk*/row*.bin")

    erased = set()
    if args.erase_disk:
        for spec_str in args.erase_disk:
            try:
                node_s, pos_s = spec_str.split(":")
                node, pos = int(node_s), int(pos_s)
            except ValueError as exc:
                raise UsageError(
                    f"--erase-disk expects NODE:POS, got {spec_str!r}"
                ) from exc
            erased |= disk_cells(config, node, pos)
            lines.append(f"erased disk: node {node}, position {pos}")
    if args.erase_node:
        for node in args.erase_node:
            erased |= node_cells(config, node)
            lines.append(f"erased node {node}")

    if erased:
        scenarios = [("requested erasure", erased)]
    else:
        scenarios = [
            ("single disk (node 1, position 1)", disk_cells(config, 1, 1)),
            ("whole node 2", node_cells(config, 2)),
            (
                "two whole nodes (1 and 2)",
                node_cells(config, 1) | node_cells(config, 2),
            ),
        ]
    for label, cells in scenarios:
        result = recover(content, cells)
        if result.data_loss:
            lines.append(f"recover after {label}: DATA LOSS ({result.message})")
            continue
        exact = np.array_equal(result.content.strips, content.strips)
        lines.append(
            f"recover after {label}: rebuilt {len(cells)} strips, "
            f"bit-exact: {'yes' if exact else 'NO'}"
            + (
                f" (failed nodes restriped: {result.failed_nodes})"
                if result.failed_nodes
                else ""
            )
        )
    _write_output("\n".join(lines), None)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "analytic":
            return _cmd_analytic(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        if args.command == "layout":
            return _cmd_layout(args)
        if args.command == "codec-demo":
            return _cmd_codec_demo(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
