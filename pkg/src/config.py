"""Central configuration for domcode."""
from __future__ import annotations

import os
from pathlib import Path

APP_NAME = "domcode"
REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = REPO_ROOT / "fixtures"
SCHEMAS_DIR = REPO_ROOT / "schemas"
REPRODUCE_CONFIG_PATH = Path(os.environ.get("DOMCODE_REPRODUCE_CONFIG", REPO_ROOT / "config" / "reproduce.yaml"))

LOG_LEVEL = os.getenv("DOMCODE_LOG_LEVEL", "INFO")
LOG_FORMAT = os.getenv("DOMCODE_LOG_FORMAT", "text")
SEARCH_TRACE_FILE = os.environ.get("DOMCODE_SEARCH_TRACE_FILE", "")

MAX_VERTICES = int(os.environ.get("DOMCODE_MAX_VERTICES", 4096))
BRUTE_FORCE_MAX_VERTICES = int(os.environ.get("DOMCODE_BRUTE_FORCE_MAX_VERTICES", 20))

SOLVER_TIME_LIMIT_S = float(os.environ.get("DOMCODE_TIME_LIMIT_S", 0))  # 0 = unlimited
SOLVER_NODE_LIMIT = int(os.environ.get("DOMCODE_NODE_LIMIT", 0))  # 0 = unlimited
SOLVER_THREADS = int(os.environ.get("DOMCODE_THREADS", 0))  # 0 = CPU quota
SOLVER_PROGRESS_INTERVAL = int(os.environ.get("DOMCODE_PROGRESS_INTERVAL", 200_000))
PARALLEL_SPLIT_DEPTH = int(os.environ.get("DOMCODE_PARALLEL_SPLIT_DEPTH", 6))

TRANSFER_SOLVER_MAX_VERTICES = int(os.environ.get("DOMCODE_TRANSFER_MAX_VERTICES", 25))
