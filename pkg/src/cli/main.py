"""
Command-line front end: simulate, verify, sweep, analyze, pack and unpack.

stdout carries only deterministic output (records, reports, CSV, transcripts);
diagnostics go to stderr through loguru. Exit codes: 0 success, 1 check
failure, 2 usage error. Every error path prints one line
`error reason=<code> detail=<text>` to stderr.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from loguru import logger

import config
from evaluation.asymptotics import (
    CSV_HEADER,
    geometric_range,
    parse_n_values,
    trend_table,
)
from evaluation.battery import format_verification_report, run_battery
from src.cli.models import CliConfig
from src.errors import (
    CachingError,
    CheckFailedError,
    ConsistencyError,
    DecodeMismatchError,
    InsufficientRangeError,
    UsageError,
)
from src.schemes.model import CachingScheme
from src.simulation.demands import named_demand
from src.simulation.description import (
    SchemeDescription,
    build_scheme,
    load_description,
    validate_description,
)
from src.simulation.simulator import DemandMode, run, sweep_demands
from src.simulation.store import (
    FileStore,
    pack,
    random_files,
    read_inputs,
    read_manifest,
    unpack,
    write_manifest,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

_CHECK_FAILURES = (CheckFailedError, ConsistencyError, DecodeMismatchError, InsufficientRangeError)


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so errors share one format."""

    def error(self, message):
        raise UsageError(message)


def _add_scheme_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", dest="config_path", type=Path, help="scheme description file")
    parser.add_argument("--scheme", choices=["mn", "grouping"])
    parser.add_argument("--K", type=int, help="users (mn)")
    parser.add_argument("--N", type=int, help="files (defaults to K)")
    parser.add_argument("--t", type=int, help="caching multiplicity t = K*M/N (mn)")
    parser.add_argument("--M", help="cache size in files, integer or p/q (mn, instead of --t)")
    parser.add_argument("--h", type=int, help="replication multiplier (mn)")
    parser.add_argument("--n", type=int, help="ground set size (grouping)")
    parser.add_argument("--a", type=int, help="user label size (grouping)")
    parser.add_argument("--b", type=int, help="slot label size (grouping)")
    parser.add_argument("--payload-bytes", dest="payload_bytes", type=int)
    parser.add_argument("--seed", type=int)


def _add_output_flags(parser: argparse.ArgumentParser, formats: Sequence[str]) -> None:
    parser.add_argument("--out", type=Path, help="write output here instead of stdout")
    parser.add_argument("--format", choices=list(formats), default=formats[0])


def _add_mode_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=["auto", "exhaustive", "random"], default="auto")
    parser.add_argument("--count", type=int, help="demands in random mode")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symcache", description="Symmetric uncoded caching lab")
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--quiet", action="store_true", help="warnings only on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    simulate = sub.add_parser("simulate", help="run one demand over real payloads")
    _add_scheme_flags(simulate)
    simulate.add_argument("--demand", help="comma-separated file indices, or distinct|uniform|random")
    simulate.add_argument("--inputs", nargs="+", type=Path, default=[], help="real files as payloads")
    simulate.add_argument("--transcript", type=Path, help="write the transmission log here")
    _add_output_flags(simulate, ["human", "csv", "transcript"])

    verify = sub.add_parser("verify", help="run the property battery for one instance")
    _add_scheme_flags(verify)
    _add_mode_flags(verify)
    _add_output_flags(verify, ["human"])

    sweep = sub.add_parser("sweep", help="worst-case rate over a demand set")
    _add_scheme_flags(sweep)
    _add_mode_flags(sweep)
    _add_output_flags(sweep, ["human", "csv"])

    analyze = sub.add_parser("analyze", help="asymptotic trend table as CSV")
    analyze.add_argument("--epsilon", type=float, required=True)
    group = analyze.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", dest="n_values", help="comma-separated n values, e.g. 1e3,1e4")
    group.add_argument("--range", dest="n_range", help="geometric range start:stop:factor")
    _add_output_flags(analyze, ["csv"])

    pack_cmd = sub.add_parser("pack", help="split files into F subfiles and write a manifest")
    pack_cmd.add_argument("inputs", nargs="+", type=Path)
    pack_cmd.add_argument("--F", type=int, required=True)
    pack_cmd.add_argument("--out", type=Path, required=True, help="manifest path")

    unpack_cmd = sub.add_parser("unpack", help="rebuild the original files from a manifest")
    unpack_cmd.add_argument("manifest", type=Path)
    unpack_cmd.add_argument("--dir", dest="directory", type=Path, required=True)
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = "DEBUG" if verbose else "WARNING" if quiet else config.LOG_LEVEL
    logger.remove()
    logger.add(sys.stderr, level=level)


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"wrote {out}")


def _description(cfg: CliConfig) -> SchemeDescription:
    overrides = cfg.scheme_overrides()
    if cfg.config_path is not None:
        return load_description(cfg.config_path, overrides)
    if cfg.scheme is None:
        raise UsageError("--scheme or --config is required")
    return validate_description(overrides)


def _store_for(scheme: CachingScheme, desc: SchemeDescription, inputs: List[Path]) -> FileStore:
    if inputs:
        files = read_inputs(inputs)
        if len(files) != scheme.N:
            raise UsageError(f"--inputs gave {len(files)} files, scheme has N={scheme.N}")
        return pack(files, scheme.F)
    return pack(random_files(scheme.N, desc.payload_bytes, desc.seed), scheme.F)


def _mode(cfg: CliConfig, scheme: CachingScheme, seed: int) -> DemandMode:
    if cfg.mode == "exhaustive":
        return DemandMode.exhaustive()
    if cfg.mode == "random":
        return DemandMode.random(cfg.count, seed)
    mode = DemandMode.auto(scheme.K, scheme.N, seed)
    if mode.kind == "random" and cfg.count is not None:
        mode = DemandMode.random(cfg.count, seed)
    return mode


# -----------------------------------------------------------
# Subcommands
# -----------------------------------------------------------

def cmd_simulate(cfg: CliConfig) -> int:
    desc = _description(cfg)
    scheme = build_scheme(desc)
    store = _store_for(scheme, desc, cfg.inputs)
    demand = named_demand(desc.demand or "distinct", scheme.K, scheme.N, desc.seed)
    result = run(scheme, store, demand, keep_log=True)

    transcript = scheme.transcript(demand, result.log)
    if cfg.transcript is not None:
        Path(cfg.transcript).write_text(transcript, encoding="utf-8")
        logger.info(f"wrote transcript to {cfg.transcript}")

    if cfg.format == "transcript":
        _emit(transcript, cfg.out)
    elif cfg.format == "csv":
        _emit(result.to_record() + "\n", cfg.out)
    else:
        _emit(result.summary() + result.to_record() + "\n", cfg.out)

    if not result.verified:
        user, slot = result.first_failure
        raise DecodeMismatchError(
            f"user {user + 1} reconstructed slot {slot} incorrectly", user=user, slot=slot
        )
    return EXIT_OK


def cmd_verify(cfg: CliConfig) -> int:
    desc = _description(cfg)
    scheme = build_scheme(desc)
    report = run_battery(scheme, desc.payload_bytes, desc.seed, _mode(cfg, scheme, desc.seed))
    _emit(format_verification_report(report), cfg.out)
    if not report.passed:
        raise CheckFailedError(f"failed checks: {','.join(report.failed_checks)}")
    return EXIT_OK


def cmd_sweep(cfg: CliConfig) -> int:
    desc = _description(cfg)
    scheme = build_scheme(desc)
    store = _store_for(scheme, desc, [])
    sweep = sweep_demands(scheme, store, _mode(cfg, scheme, desc.seed))
    if cfg.format == "csv":
        _emit(sweep.table(), cfg.out)
    else:
        _emit(sweep.summary_line() + "\n", cfg.out)
    if not sweep.all_verified:
        failure = sweep.first_failure
        user, slot = failure.first_failure
        raise DecodeMismatchError(
            f"demand {failure.demand.render()}: user {user + 1} slot {slot} incorrect", user=user, slot=slot
        )
    return EXIT_OK


def cmd_analyze(cfg: CliConfig) -> int:
    if cfg.n_range is not None:
        try:
            start, stop, factor = (int(float(x)) for x in cfg.n_range.split(":"))
        except ValueError:
            raise UsageError(f"--range must be start:stop:factor, got {cfg.n_range!r}") from None
        n_values = geometric_range(start, stop, factor)
    else:
        n_values = parse_n_values(cfg.n_values)

    try:
        table = trend_table(cfg.epsilon, n_values)
    except InsufficientRangeError as exc:
        lines = [CSV_HEADER] + [row.to_csv() for row in exc.rows]
        lines.append(f"# verdict insufficient_range rows={len(exc.rows)} needed={config.MIN_TREND_ROWS}")
        _emit("\n".join(lines) + "\n", cfg.out)
        raise

    _emit(table.to_csv(), cfg.out)
    if not table.passed:
        failed = [f"{v.name}={v.status}" for v in table.verdicts if not v.passed]
        raise CheckFailedError(f"trend verdicts not passed: {','.join(failed)}")
    return EXIT_OK


def cmd_pack(cfg: CliConfig) -> int:
    store = pack(read_inputs(cfg.inputs), cfg.F)
    write_manifest(store, [p.name for p in cfg.inputs], cfg.out)
    sys.stdout.write(f"packed files={store.N} F={store.F} L={store.L} manifest={cfg.out}\n")
    return EXIT_OK


def cmd_unpack(cfg: CliConfig) -> int:
    manifest = read_manifest(cfg.manifest)
    store = manifest.to_store()
    cfg.directory.mkdir(parents=True, exist_ok=True)
    for name, data in zip(manifest.names, unpack(store)):
        target = cfg.directory / Path(name).name
        target.write_bytes(data)
        sys.stdout.write(f"unpacked {target} bytes={len(data)}\n")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "analyze": cmd_analyze,
    "pack": cmd_pack,
    "unpack": cmd_unpack,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbose, args.quiet)
        values = {k: v for k, v in vars(args).items() if k not in {"verbose", "quiet"}}
        cfg = CliConfig.model_validate(values)
        return COMMANDS[cfg.command](cfg)
    except CachingError as exc:
        sys.stderr.write(exc.one_line() + "\n")
        return EXIT_CHECK_FAILED if isinstance(exc, _CHECK_FAILURES) else EXIT_USAGE
    except ValueError as exc:
        # pydantic ValidationError and other malformed input
        sys.stderr.write(f"error reason=usage_error detail={' '.join(str(exc).split())}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"error reason=io_error detail={' '.join(str(exc).split())}\n")
        return EXIT_USAGE
