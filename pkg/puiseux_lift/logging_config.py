import logging
import sys

import structlog


def configure_logging(level: str = "INFO") -> None:
  """Configure structlog for normal application logging.

  Log lines go to stderr so that stdout stays free for command output.

  Args:
      level: Minimum level name, e.g. ``"INFO"`` or ``"DEBUG"``.
  """
  structlog.configure(
    processors=[
      structlog.processors.TimeStamper(fmt="iso"),
      structlog.processors.add_log_level,
      structlog.dev.ConsoleRenderer(),
    ],
    wrapper_class=structlog.make_filtering_bound_logger(
      logging.getLevelNamesMapping().get(level.upper(), logging.INFO)
    ),
    context_class=dict,
    logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
  )
