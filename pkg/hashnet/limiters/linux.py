"""Set limits for Linux.

** `setrlimit` **
https://man7.org/linux/man-pages/man2/setrlimit.2.html

** `signals` **
https://man7.org/linux/man-pages/man7/signal.7.html
"""
from __future__ import annotations

import resource

from hashnet.limiters.limiter import Limiter


class LimiterLinux(Limiter):
    def limit_memory(self, memory: int) -> None:
        """Limit the addressable memory.

        Exceeding it usually shows up as a python `MemoryError`, which lets us
        send back a traceback. A `SIGSEGV` is also possible and is read as a
        memory failure by `Budget`.

        Parameters
        ----------
        memory : int
            The memory limit in bytes
        """
        _, hard = resource.getrlimit(resource.RLIMIT_AS)
        resource.setrlimit(resource.RLIMIT_AS, (memory, hard))

    def limit_cpu_time(self, cpu_time: int, interval: int = 5) -> None:
        """Limit the cpu time for this process.

        The process is sent SIGXCPU once `cpu_time` is used and SIGKILL after
        another `interval` seconds.

        Parameters
        ----------
        cpu_time : int
            The amount of time in seconds

        interval: int = 5
            Seconds between the soft and the hard limit
        """
        resource.setrlimit(resource.RLIMIT_CPU, (cpu_time, cpu_time + interval))
