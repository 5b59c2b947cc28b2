"""Limiters set resource limits inside the child process of a `Budget`."""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Callable

import logging
import os
import platform
import signal
import sys
import traceback
import warnings
from multiprocessing.connection import Connection

from hashnet.exceptions import CpuTimeoutException, MemoryLimitException
from hashnet.util import Monitor, callstring, terminate_process_tree

logger = logging.getLogger(__name__)


class Limiter(ABC):
    """Defines how to limit resources for a given system."""

    def __init__(
        self,
        func: Callable,
        output: Connection,
        memory: int | None = None,
        cpu_time: int | None = None,
        terminate_child_processes: bool = True,
    ) -> None:
        """
        Parameters
        ----------
        func : Callable
            The function to be limited

        output : Connection
            Where the (result, error, traceback) response is sent

        memory : int | None = None
            The memory in bytes to allocate

        cpu_time : int | None = None
            The cpu time in seconds to allocate

        terminate_child_processes: bool = True
            Whether to clean up all child processes upon completion
        """
        self.func = func
        self.output = output
        self.memory = memory
        self.cpu_time = cpu_time
        self.terminate_child_processes = terminate_child_processes

    def __call__(self, *args: Any, **kwargs: Any) -> None:
        """Set process limits, call the function and send back what happened

        Note
        ----
        This runs inside the subprocess started by `Budget.__call__`.
        """
        _default_sigterm_handler = signal.getsignal(signal.SIGTERM)

        def _closing_handler(sig: int, frame: Any) -> None:
            self.output.close()
            if callable(_default_sigterm_handler):
                _default_sigterm_handler(sig, frame)
            else:
                sys.exit(128 + sig)

        signal.signal(signal.SIGTERM, _closing_handler)

        try:
            if self.cpu_time is not None:
                self.limit_cpu_time(self.cpu_time)

            if self.memory is not None:
                usage = Monitor().memory("B", kind="vms")
                if self.memory <= usage:
                    warnings.warn(
                        f"Current memory usage in new process is {usage}B but"
                        f" setting limit to {self.memory}B. Likely to fail, try"
                        " increasing the memory budget"
                    )
                self.limit_memory(self.memory)

            result = self.func(*args, **kwargs)
            error = None
            tb = None

        except BaseException as e:
            result = None
            error = self._wrap_error(e, *args, **kwargs)
            tb = "".join(traceback.format_exception(*sys.exc_info()))

        # The response may itself be too large for the memory left, degrade to
        # sending the error about that and finally to sending nothing at all
        responses: list[Any] = [(result, error, tb)]
        try:
            fallback = MemoryLimitException("Could not send the result")
            responses.append((None, fallback, None))
        except MemoryError:
            pass
        responses.append(None)

        for response in responses:
            try:
                self.output.send(response)
                break
            except Exception:
                continue

        self.output.close()
        if self.terminate_child_processes:
            try:
                terminate_process_tree(timeout=2, include_parent=False)
            except MemoryError:
                os.kill(os.getpid(), signal.SIGSEGV)

    @staticmethod
    def create(
        func: Callable,
        output: Connection,
        memory: int | None = None,
        cpu_time: int | None = None,
        terminate_child_processes: bool = True,
    ) -> Limiter:
        """For full documentation, see __init__."""
        arguments = {
            "func": func,
            "output": output,
            "memory": memory,
            "cpu_time": cpu_time,
            "terminate_child_processes": terminate_child_processes,
        }

        # NOTE: Imports inside if statements
        #
        #   The system limiters inherit from this module, importing them at the top
        #   would be circular. The `resource` module they rely on is also missing
        #   on Windows.
        system_name = platform.system().lower()
        if system_name.startswith("linux"):
            from hashnet.limiters.linux import LimiterLinux

            return LimiterLinux(**arguments)  # type: ignore

        elif system_name.startswith("darwin"):
            from hashnet.limiters.mac import LimiterMac

            return LimiterMac(**arguments)  # type: ignore

        else:
            return LimiterWallTimeOnly(**arguments)  # type: ignore

    @abstractmethod
    def limit_memory(self, memory: int) -> None:
        """Limit's the memory of this process."""
        ...

    @abstractmethod
    def limit_cpu_time(self, cpu_time: int) -> None:
        """Limit's the cpu time of this process."""
        ...

    def _wrap_error(
        self, err: BaseException, *args: Any, **kwargs: Any
    ) -> BaseException:
        if self.memory is not None and isinstance(err, MemoryError):
            if not isinstance(err, MemoryLimitException):
                return MemoryLimitException(
                    f"Not enough memory to run ({self.memory}B)."
                    f"\n{callstring(self.func, *args, **kwargs)}"
                )

        if self.cpu_time is not None and isinstance(err, CpuTimeoutException):
            return CpuTimeoutException(
                f"Did not finish in cpu time ({self.cpu_time}s)"
                f"\n{callstring(self.func, *args, **kwargs)}"
            )

        return err


class LimiterWallTimeOnly(Limiter):
    """Platforms without `setrlimit`, only the parent's wall time watch applies"""

    def limit_memory(self, memory: int) -> None:
        raise NotImplementedError(f"Can't limit memory on {platform.platform()}")

    def limit_cpu_time(self, cpu_time: int) -> None:
        raise NotImplementedError(f"Can't limit cpu time on {platform.platform()}")
