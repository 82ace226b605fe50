"""
Runtime settings read from the environment.

AOI_OUTPUT_DIR   default output directory (config file and CLI win)
AOI_MAX_WORKERS  worker processes for sweeps; 1 runs everything in-process
AOI_LOG_LEVEL    logging level name
"""

import os
from dataclasses import dataclass
from typing import Optional


@dataclass
class RuntimeSettings:
    """Settings for the runner and CLI."""
    output_dir: Optional[str] = None
    max_workers: Optional[int] = None
    log_level: str = "INFO"

    def __post_init__(self):
        if self.output_dir is None:
            self.output_dir = os.getenv("AOI_OUTPUT_DIR") or "results"

        if self.max_workers is None:
            env_workers = os.getenv("AOI_MAX_WORKERS")
            if env_workers:
                try:
                    self.max_workers = max(1, int(env_workers))
                except ValueError:
                    raise ValueError(f"AOI_MAX_WORKERS must be an integer, got {env_workers!r}")
            else:
                self.max_workers = os.cpu_count() or 1

        env_level = os.getenv("AOI_LOG_LEVEL")
        if env_level:
            self.log_level = env_level.upper()
