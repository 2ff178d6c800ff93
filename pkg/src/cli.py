"""Command-line scenario runner.

    gp-fluctuations fock-check --seed 3 --set fock.modes=4 --set fock.n=3
    gp-fluctuations --config runs/depletion.cfg --output runs/depletion

Exit status is 0 when every check passes, 1 when a check fails or the
scenario raises, and 2 when the configuration is invalid.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import TYPE_CHECKING

from dotenv import load_dotenv

from src import __version__
from src.core.errors import ConfigError, GPFluctuationsError
from src.core.settings import get_settings
from src.models.schemas import RunConfig, Scenario

# numpy must not load before --threads is applied
if TYPE_CHECKING:
    from src.models.results import RunManifest

logger = logging.getLogger("gp_fluctuations")

_THREAD_VARIABLES = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gp-fluctuations", description="Gross-Pitaevskii fluctuation experiments")
    parser.add_argument("scenario", nargs="?", choices=[s.value for s in Scenario],
                        help="scenario to run (overrides the config's scenario key)")
    parser.add_argument("--config", type=Path, help="config file with block.key = value lines")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="BLOCK.KEY=VALUE",
                        help="override one config entry (repeatable)")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--threads", type=int, help="cap BLAS/OpenMP threads")
    parser.add_argument("--output", type=Path, help="output directory (default: $GPF_OUTPUT_ROOT/<scenario>)")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def configure_threads(threads: int | None) -> None:
    """Set thread caps before numpy loads its BLAS."""
    if threads is None:
        return
    if threads < 1:
        raise ConfigError("threads", f"must be positive, got {threads}")
    for name in _THREAD_VARIABLES:
        os.environ[name] = str(threads)


def output_directory(config: RunConfig) -> Path:
    if config.output is not None:
        return config.output
    return get_settings().output_root / config.scenario.value


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run(config: RunConfig) -> RunManifest:
    """Run the configured scenario and write its CSVs and manifest.

    Scenario errors are recorded on the manifest instead of raised, so the
    manifest exists for every run that got past config validation.
    """
    from src.core.io import failed_checks, write_manifest, write_records
    from src.core.suites import run_suite
    from src.models.results import RunManifest

    directory = output_directory(config)
    manifest = RunManifest(
        scenario=config.scenario.value,
        config=config.model_dump(mode="json"),
        version=__version__,
        seed=config.seed,
        started=_now(),
    )
    start = time.perf_counter()
    records = []
    try:
        records = run_suite(config)
    except GPFluctuationsError as e:
        logger.error("scenario %s failed: %s", config.scenario.value, e)
        manifest.error = f"{type(e).__name__}: {e}"
    except Exception as e:
        logger.exception("scenario %s crashed", config.scenario.value)
        manifest.error = f"{type(e).__name__}: {e}"

    manifest.checks = [c for r in records for c in r.checks]
    manifest.outputs = [str(p) for p in write_records(records, directory)]
    manifest.wall_time = time.perf_counter() - start
    manifest.finished = _now()
    manifest.outputs.append(str(write_manifest(manifest, directory)))

    failed = failed_checks(manifest.checks)
    for check in failed:
        logger.warning("check failed: %s residual=%.3e threshold=%.3e %s",
                       check.name, check.residual, check.threshold, check.detail)
    logger.info("%s: %d checks, %d failed, %.1f s", config.scenario.value, len(manifest.checks),
                len(failed), manifest.wall_time)
    return manifest


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        configure_threads(args.threads)
        from src.core.io import load_config, parse_override

        overrides = dict(parse_override(item) for item in args.overrides)
        if args.scenario:
            overrides["scenario"] = args.scenario
        if args.seed is not None:
            overrides["seed"] = str(args.seed)
        if args.output is not None:
            overrides["output"] = str(args.output)
        config = load_config(args.config, overrides)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    manifest = run(config)
    print(manifest.outputs[-1])
    if manifest.error:
        print(f"error: {manifest.error}", file=sys.stderr)
    return 0 if manifest.passed else 1


if __name__ == "__main__":
    sys.exit(main())
