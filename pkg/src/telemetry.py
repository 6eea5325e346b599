"""Container CPU quota lookup used to size the parallel solver."""
from __future__ import annotations

import logging
import os
from typing import Optional

from logging_utils import log_with_run


def get_cpu_limit(run_id: Optional[str] = None) -> float:
    """Return the CPU quota derived from cgroups, falling back to the host count."""
    try:
        try:
            with open("/sys/fs/cgroup/cpu.max", "r", encoding="utf-8") as cpu_max_file:
                cpu_max = cpu_max_file.read().strip()
            if cpu_max.split()[0] != "max":
                quota, period = cpu_max.split()
                return int(quota) / int(period)
            return float(os.cpu_count() or 1)
        except FileNotFoundError:
            try:
                with open("/sys/fs/cgroup/cpu/cpu.cfs_quota_us", "r", encoding="utf-8") as quota_file:
                    quota = int(quota_file.read().strip())
                if quota > 0:
                    with open("/sys/fs/cgroup/cpu/cpu.cfs_period_us", "r", encoding="utf-8") as period_file:
                        period = int(period_file.read().strip())
                    return quota / period
            except FileNotFoundError:
                pass
        return float(os.cpu_count() or 1)
    except Exception as exc:
        log_with_run(logging.warning, f"Error reading CPU quota: {exc}", run_id)
        return float(os.cpu_count() or 1)


def default_worker_count(run_id: Optional[str] = None) -> int:
    """Number of solver processes to start when none is configured."""
    return max(1, int(get_cpu_limit(run_id)))
