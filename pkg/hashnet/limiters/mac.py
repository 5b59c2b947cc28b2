"""Set limits for macOS.

macOS accepts RLIMIT_AS, RLIMIT_DATA and RLIMIT_RSS but does not act on any of them
when exceeded, so memory budgets are refused up front, see `supports_memory`.

** `setrlimit` **
https://github.com/apple/darwin-xnu/blob/main/bsd/man/man2/getrlimit.2
"""
from __future__ import annotations

import platform
import resource

from hashnet.limiters.limiter import Limiter


class LimiterMac(Limiter):
    def limit_memory(self, memory: int) -> None:
        raise NotImplementedError(f"Can't limit memory on {platform.platform()}")

    def limit_cpu_time(self, cpu_time: int, interval: int = 5) -> None:
        """Limit the cpu time for this process.

        The process is killed with -signal.SIGXCPU status. Handling SIGXCPU in
        the process does not work once it spawns subprocesses.

        Parameters
        ----------
        cpu_time : int
            The amount of time in seconds

        interval: int = 5
            Seconds between the soft and the hard limit
        """
        resource.setrlimit(resource.RLIMIT_CPU, (cpu_time, cpu_time + interval))
