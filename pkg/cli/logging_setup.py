"""structlog configuration on top of stdlib logging."""

import logging
import os
import sys

import structlog

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVEL_ENV = "CETA_LOG_LEVEL"


def resolve_log_level(cli_value: str | None) -> str:
    """CLI flag, then ``CETA_LOG_LEVEL``, then INFO."""
    level = (cli_value or os.environ.get(LOG_LEVEL_ENV) or "INFO").upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ValueError(f"unknown log level {level!r}")
    return level


def configure_logging(level: str = "INFO", json_logs: bool = False) -> None:
    """Route structlog events through a stdlib handler.

    Logs go to stderr so that ``--json`` output on stdout stays parseable.
    """
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(message)s" if json_logs else LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )
    renderer: structlog.types.Processor = (
        structlog.processors.JSONRenderer()
        if json_logs
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    processors: list[structlog.types.Processor] = [
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_log_level,
    ]
    if json_logs:
        processors += [
            structlog.stdlib.add_logger_name,
            structlog.processors.TimeStamper(fmt="iso"),
        ]
    structlog.configure(
        processors=[*processors, renderer],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )
