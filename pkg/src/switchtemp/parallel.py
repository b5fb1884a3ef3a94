"""Thread-count policy shared by the scan and the simulator."""

from __future__ import annotations

import os

__all__ = ["worker_count"]


def worker_count(threads: int | None = None) -> int:
    """Explicit value, else TOOL_THREADS; 0 or unset means one per CPU."""
    if threads is None:
        try:
            threads = int(os.environ.get("TOOL_THREADS", "0"))
        except ValueError:
            threads = 0
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads
