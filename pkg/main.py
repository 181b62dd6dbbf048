"""
QCS Network Simulator
=====================

Command-line entry point: satellite quantum clock-synchronization network
traces, figures of merit, shadow geometry and static Monte Carlo tables.
"""

import argparse
import sys
from typing import List, Optional, TextIO

# Load environment variables first
from dotenv import load_dotenv
load_dotenv()

import structlog

from api.commands import COMMANDS
from api.commands.base import CommandContext
from domain.errors import ConfigError, QcsError
from infrastructure.config import Settings
from infrastructure.container import Container
from infrastructure.logging import configure_logging
from infrastructure.repositories.scenario_repository import scenario_with_overrides

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcs", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, module in COMMANDS.items():
        cmd = sub.add_parser(name, help=module.HELP)
        cmd.add_argument("--scenario", required=True, help="scenario TOML file (path or name under SCENARIO_DIR)")
        cmd.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        cmd.add_argument("--out", default=None, help="override the output directory")
        cmd.add_argument("--json", action="store_true", help="mirror every CSV as JSON records")
    return parser


def main(
    argv: Optional[List[str]] = None,
    settings: Optional[Settings] = None,
    stdout: TextIO = sys.stdout,
) -> int:
    args = build_parser().parse_args(argv)
    settings = settings or Settings()
    configure_logging(settings)
    container = Container(settings)

    try:
        scenario = container.get_scenario_repository().load(args.scenario)
        out = args.out
        if out is None and scenario.output.directory == "out":
            out = settings.OUTPUT_DIR
        scenario = scenario_with_overrides(scenario, seed=args.seed, out=out)

        logger.info("run_started", command=args.command, scenario=scenario.name, seed=scenario.seed,
                    out=scenario.output.directory)
        ctx = CommandContext(scenario=scenario, container=container, stdout=stdout, as_json=args.json)
        COMMANDS[args.command].run(ctx)
        logger.info("run_finished", command=args.command, files=len(ctx.written))
        return EXIT_OK
    except ConfigError as e:
        logger.error("config_error", error=str(e), line=e.line)
        return EXIT_CONFIG
    except QcsError as e:
        logger.error("simulation_error", error=str(e), kind=type(e).__name__)
        return EXIT_RUNTIME
    except Exception:
        logger.exception("unexpected_error")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
