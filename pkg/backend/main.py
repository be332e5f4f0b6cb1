#!/usr/bin/env python3
"""
helmgrid command line.

    python main.py <solve|lfa1d|lfa2d|dispersion|bench> [--config run.json] [--out result.csv] [--threads N]

Exit codes: 0 success, 2 invalid configuration, 3 solve did not converge,
1 any other failure.
"""

import argparse
import sys
from typing import List, Optional

from dotenv import find_dotenv, load_dotenv
from pydantic import ValidationError

from helmgrid_core.config import COMMANDS, ConfigManager
from helmgrid_core.engines import (EXIT_CONFIG, EXIT_OK, ExperimentEngine, collect_metadata, format_help)
from helmgrid_core.errors import ConfigError, HelmgridError
from helmgrid_core.logs.core.logger_config import get_component_logger, setup_logging
from helmgrid_core.output import ConsoleOutput

EXIT_FAILURE = 1


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="helmgrid",
        description="Two-grid Helmholtz solver with Fourier and dispersion analysis; results are written as CSV.",
        epilog=format_help(collect_metadata(ExperimentEngine)),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration (default: the bundled defaults.json)")
    parser.add_argument("--out", help="CSV output path (default: stdout)")
    parser.add_argument("--threads", type=_positive_int, help="workers for concurrent subdomain solves")
    parser.add_argument("--debug", action="store_true", help="log at DEBUG level to the console")
    parser.add_argument("--log-dir", help="log directory (default: $HELMGRID_LOG_DIR or ./logs)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    dotenv_path = find_dotenv(usecwd=True)
    if dotenv_path:
        load_dotenv(dotenv_path=dotenv_path, override=False)
    setup_logging(debug_mode=args.debug, log_dir=args.log_dir)
    logger = get_component_logger('helmgrid.cli')

    manager = ConfigManager(args.config)
    try:
        manager.load_config()
        run_config = manager.parse()
        engine = ExperimentEngine(run_config, threads=args.threads)
        logger.info(f"Running {args.command} with {manager.config_path}")
        result = engine.run(args.command, args.out)
    except ConfigError as exc:
        print(ConsoleOutput.format_error(str(exc), exc.errors), file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as exc:
        details = [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()]
        print(ConsoleOutput.format_error("invalid parameters", details), file=sys.stderr)
        return EXIT_CONFIG
    except HelmgridError as exc:
        logger.error(f"{args.command} failed: {exc}", exc_info=True)
        print(ConsoleOutput.format_error(str(exc)), file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        logger.error(f"{args.command} could not write its output: {exc}")
        print(ConsoleOutput.format_error(str(exc)), file=sys.stderr)
        return EXIT_FAILURE

    if result.exit_code != EXIT_OK:
        logger.warning(f"{args.command} finished with exit code {result.exit_code}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
