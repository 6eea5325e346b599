"""Logging utilities for domcode."""
from __future__ import annotations

import json
import logging
import sys
from datetime import datetime, timezone
from typing import Callable, Optional

from config import APP_NAME, LOG_FORMAT, LOG_LEVEL, SEARCH_TRACE_FILE

_current_run_id: Optional[str] = None


def set_run_id(run_id: Optional[str]) -> None:
    """Remember the run id that structured log records should carry."""
    global _current_run_id
    _current_run_id = run_id


def log_with_run(level_func: Callable[[str], None], message: str, run_id: Optional[str]) -> None:
    """Log a message, appending the run id when present."""
    if run_id:
        level_func(f"{message} | run_id={run_id}")
        return

    level_func(message)


def debug_log_search(message: str, run_id: Optional[str]) -> None:
    """Append a solver trace line to the configured trace file when enabled."""
    if not SEARCH_TRACE_FILE:
        return

    try:
        timestamp = datetime.now(timezone.utc).isoformat()
        with open(SEARCH_TRACE_FILE, "a", encoding="utf-8") as trace_file:
            if run_id:
                trace_file.write(f"{timestamp} | run_id={run_id} | {message}\n")
            else:
                trace_file.write(f"{timestamp} | {message}\n")
    except Exception as exc:  # pragma: no cover - best-effort trace logging
        logging.error("Failed to write search trace: %s", exc)


class JsonLogHandler(logging.Handler):
    """Write one JSON object per record to stderr."""

    def __init__(self, app_name: str = APP_NAME) -> None:
        super().__init__()
        self.app_name = app_name

    def emit(self, record: logging.LogRecord) -> None:  # pragma: no cover - logging integration
        try:
            payload = {
                "app_name": self.app_name,
                "log_asctime": self.formatter.formatTime(record) if self.formatter else None,
                "log_levelname": record.levelname,
                "log_message": self._format_message(record),
                "run_id": _current_run_id,
            }
            sys.stderr.write(json.dumps(payload) + "\n")
        except Exception:
            self.handleError(record)

    @staticmethod
    def _format_message(record: logging.LogRecord) -> str:
        if record.args:
            try:
                return record.msg % record.args
            except (TypeError, ValueError):
                return str(record.msg)
        return str(record.msg)


def setup_logging(app_name: str = APP_NAME, level: Optional[str] = None) -> logging.Logger:
    """Initialize logging and return the configured application logger.

    Handlers go on the root logger because modules log through the
    ``logging`` module functions. Everything goes to stderr; stdout carries
    results only.
    """
    root = logging.getLogger()
    root.setLevel(getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO))

    for handler in root.handlers[:]:
        root.removeHandler(handler)

    formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")

    if LOG_FORMAT.lower() == "json":
        handler: logging.Handler = JsonLogHandler(app_name)
    else:
        handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(formatter)
    root.addHandler(handler)

    return logging.getLogger(app_name)
