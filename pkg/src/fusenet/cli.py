"""Command-line entry point: plan, simulate, and sweep workflows.

Exit codes: 0 success, 2 configuration error, 3 desynchronization abort.
Every error path prints a single machine-readable line to stderr of the
form ``error: <category>: <detail>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from typing import Optional, Sequence

from .config import (
    SCHEMA_VERSION,
    ConfigDocument,
    load_config,
    resolved_dict,
)
from .errors import ConfigurationError, DesynchronizationError, UnsatisfiableError
from .metrics import PlanRow, plan_table, summarize
from .network import NetworkConfig, Strategy, run_network
from .pair_algebra import LinkModel

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DESYNC = 3

SWEEP_PARAMETERS = ("length_km", "p", "n", "m", "F", "strategy")

_SUMMARY_FIELDS = (
    "pairs_total",
    "pairs_per_second",
    "empirical_end_fidelity",
    "empirical_end_fidelity_stderr",
    "analytic_end_fidelity",
    "cycle_period_s",
    "failure_cycles",
    "frame_latency_cycles",
    "cycles",
    "links_per_cycle",
)


def _fail(category: str, message: str, code: int) -> int:
    print(f"error: {category}: {message}", file=sys.stderr)
    return code


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigurationError(f"{flag} expects comma-separated integers, got {text!r}")
    if not values:
        raise ConfigurationError(f"{flag} expects at least one value")
    return values


def _plan_rows_text(rows: list[PlanRow]) -> str:
    header = ("m", "n_required", "exact_pf_at_n", "exact_pf_at_prev_n", "expected_successes")
    cells = [header]
    for row in rows:
        cells.append(
            (
                str(row.m),
                str(row.n_required),
                f"{row.exact_pf_at_n:.10g}",
                f"{row.exact_pf_at_prev_n:.10g}",
                f"{row.expected_successes:.10g}",
            )
        )
    widths = [max(len(line[col]) for line in cells) for col in range(len(header))]
    lines = [
        "  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip()
        for line in cells
    ]
    return "\n".join(lines) + "\n"


def _plan_rows_csv(rows: list[PlanRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["m", "p", "target_pf", "n_required", "exact_pf_at_n", "exact_pf_at_prev_n", "expected_successes"]
    )
    for row in rows:
        writer.writerow(
            [row.m, repr(row.p), repr(row.target_pf), row.n_required,
             repr(row.exact_pf_at_n), repr(row.exact_pf_at_prev_n),
             repr(row.expected_successes)]
        )
    return buf.getvalue()


def cmd_plan(args: argparse.Namespace) -> int:
    try:
        m_values = _parse_int_list(args.m, "--m")
        rows = plan_table(m_values, args.p, args.target)
    except UnsatisfiableError as exc:
        return _fail("unsatisfiable", str(exc), EXIT_CONFIG)
    except ConfigurationError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    if args.format == "csv":
        sys.stdout.write(_plan_rows_csv(rows))
    else:
        sys.stdout.write(_plan_rows_text(rows))
    return EXIT_OK


def _summary_document(doc: ConfigDocument, stats_dict: dict) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": resolved_dict(doc),
        "summary": stats_dict,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _write_trace(path: str, trace) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in trace:
            fh.write(
                json.dumps(
                    {
                        "t_ns": rec.t_ns,
                        "seq": rec.seq,
                        "kind": rec.kind,
                        "node": rec.node,
                        "detail": rec.detail,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def _summary_csv(stats_dict: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_SUMMARY_FIELDS)
    writer.writerow([_csv_cell(stats_dict[name]) for name in _SUMMARY_FIELDS])
    return buf.getvalue()


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        doc = load_config(args.config)
        result = run_network(doc.network, collect_trace=doc.output.trace)
        stats = summarize(result.records, doc.network)
    except DesynchronizationError as exc:
        return _fail("desync", str(exc), EXIT_DESYNC)
    except ConfigurationError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    if doc.output.format == "csv":
        text = _summary_csv(stats.to_dict())
    else:
        text = _summary_document(doc, stats.to_dict())
    if doc.output.path is None:
        sys.stdout.write(text)
    else:
        with open(doc.output.path, "w", encoding="utf-8") as fh:
            fh.write(text)
    if doc.output.trace:
        _write_trace(doc.output.trace_path, result.trace)
    return EXIT_OK


def _apply_sweep_value(network: NetworkConfig, param: str, raw: str) -> NetworkConfig:
    links = []
    if param == "strategy":
        try:
            strategy = Strategy(raw)
        except ValueError:
            raise ConfigurationError(
                f"--values: unknown strategy {raw!r}; choose one of "
                f"{[s.value for s in Strategy]}"
            ) from None
        return replace(network, strategy=strategy)
    if param in ("n", "m"):
        try:
            value = int(raw)
        except ValueError:
            raise ConfigurationError(f"--values: {param} expects integers, got {raw!r}") from None
    else:
        try:
            value = float(raw)
        except ValueError:
            raise ConfigurationError(f"--values: {param} expects numbers, got {raw!r}") from None
    for link in network.links:
        model = link.model
        if param == "length_km":
            model = replace(model, length_km=value)
        elif param == "p":
            model = LinkModel(
                length_km=model.length_km,
                p_success=value,
                raw_fidelity=model.raw_fidelity,
            )
        elif param == "F":
            model = replace(model, raw_fidelity=value)
        if param == "n":
            links.append(replace(link, model=model, n_fusiliers=value))
        elif param == "m":
            links.append(replace(link, model=model, m_fusilands=value))
        else:
            links.append(replace(link, model=model))
    return replace(network, links=links)


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.param not in SWEEP_PARAMETERS:
        return _fail(
            "config",
            f"--param: unknown parameter {args.param!r}; choose one of {SWEEP_PARAMETERS}",
            EXIT_CONFIG,
        )
    raw_values = [part for part in args.values.split(",") if part.strip() != ""]
    if not raw_values:
        return _fail("config", "--values: expected at least one value", EXIT_CONFIG)
    try:
        doc = load_config(args.config)
        rows = []
        for index, raw in enumerate(raw_values):
            network = _apply_sweep_value(doc.network, args.param, raw)
            network = replace(network, seed=doc.network.seed + index)
            result = run_network(network)
            stats = summarize(result.records, network)
            rows.append((raw, network.seed, stats.to_dict()))
    except DesynchronizationError as exc:
        return _fail("desync", str(exc), EXIT_DESYNC)
    except ConfigurationError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["param", "value", "seed", *_SUMMARY_FIELDS])
    for raw, seed, stats_dict in rows:
        writer.writerow(
            [args.param, raw, seed]
            + [_csv_cell(stats_dict[name]) for name in _SUMMARY_FIELDS]
        )
    text = buf.getvalue()
    destination = args.out if args.out is not None else doc.output.path
    if destination is None:
        sys.stdout.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusenet",
        description=(
            "Simulate and plan linear entanglement-distribution chains built "
            "from fusillade transmitters and fusiland receivers."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="size fusillades for target failure rates")
    plan.add_argument("--m", required=True, help="comma-separated receiver counts")
    plan.add_argument("--p", type=float, required=True, help="per-signal success probability")
    plan.add_argument("--target", type=float, default=0.01, help="target failure probability")
    plan.add_argument("--format", choices=("text", "csv"), default="text")
    plan.set_defaults(func=cmd_plan)

    simulate = sub.add_parser("simulate", help="run one configured chain")
    simulate.add_argument("config", help="path to a JSON config document")
    simulate.set_defaults(func=cmd_simulate)

    sweep = sub.add_parser("sweep", help="run a config across parameter values")
    sweep.add_argument("config", help="path to a JSON config document")
    sweep.add_argument("--param", required=True, help=f"one of {SWEEP_PARAMETERS}")
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--out", default=None, help="write CSV here instead of stdout")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
