"""Run a callable in a subprocess under wall time, cpu time and memory budgets.

The pipeline runs each area analysis through a `Budget`, which gives both the
per-area resource limits and process level concurrency when several areas are
dispatched from a thread pool.

.. code:: python

    budget = Budget(run_area, wall_time=(2, "m"), memory=(1, "GB"))
    report = budget(config, area)
"""
from __future__ import annotations

from typing import Any, Callable, Generic, TypeVar

import logging
import multiprocessing
import signal
import threading
import time
from multiprocessing.context import BaseContext

import psutil
from typing_extensions import ParamSpec

from hashnet.exceptions import (
    BudgetException,
    CpuTimeoutException,
    MemoryLimitException,
    WallTimeoutException,
)
from hashnet.limiters import Limiter
from hashnet.support import contexts as valid_contexts
from hashnet.support import supports
from hashnet.util import (
    Amount,
    as_bytes,
    as_seconds,
    callstring,
    terminate_process_tree,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")
P = ParamSpec("P")


class _EMPTY:
    pass


_NOTHING = _EMPTY()


class RemoteTraceback(Exception):
    """Traceback of an error raised inside the budgeted subprocess"""

    def __str__(self) -> str:
        return str(self.args[0])


class Budget(Generic[P, T]):
    """Restrict the resources of each call of a function"""

    def __init__(
        self,
        func: Callable[P, T],
        *,
        name: str | None = None,
        memory: Amount | None = None,
        cpu_time: Amount | None = None,
        wall_time: Amount | None = None,
        context: str | BaseContext | None = None,
        terminate_child_processes: bool = True,
    ) -> None:
        """
        Parameters
        ----------
        func : Callable
            The function to limit and call, must be picklable for "spawn"

        name : str | None
            A name to give the process that gets created

        memory : int | tuple[int, str] | None = None
            Memory budget in bytes or as (amount, unit), units "B", "KB", "MB", "GB"

        cpu_time : int | tuple[float, str] | None = None
            CPU seconds or (amount, unit), units "s", "m", "h"

        wall_time : int | tuple[float, str] | None = None
            Wall clock seconds or (amount, unit), units "s", "m", "h"

        context : "fork" | "forkserver" | "spawn" | BaseContext | None = None
            The context to use with multiprocessing.get_context()

        terminate_child_processes: bool = True
            Whether to clean up all child processes upon completion
        """
        _memory = as_bytes(memory)
        _cpu_time = as_seconds(cpu_time)
        _wall_time = as_seconds(wall_time)

        if not callable(func):
            raise ValueError(f"`func` ({func}) must be callable")

        if _cpu_time is not None and not _cpu_time >= 1:
            raise ValueError(f"`cpu_time` {cpu_time} must be >= 1 seconds")

        if _wall_time is not None and not _wall_time >= 1:
            raise ValueError(f"`wall_time` {wall_time} must be >= 1 second")

        if _memory is not None and not _memory >= 1:
            raise ValueError(f"`memory` {memory} must be >= 1 Byte")

        if _memory is not None and not supports("memory"):
            raise ValueError("`memory` budgets are not supported on this system")

        if _cpu_time is not None and not supports("cpu_time"):
            raise ValueError("`cpu_time` budgets are not supported on this system")

        if isinstance(context, str) and context not in valid_contexts:
            raise ValueError(f"`context` {context} must be in {valid_contexts}")

        self.func = func
        self.name = name
        self.memory = _memory
        self.cpu_time = _cpu_time
        self.wall_time = _wall_time
        self.context = (
            multiprocessing.get_context(context)
            if isinstance(context, str) or context is None
            else context
        )
        self.terminate_child_processes = terminate_child_processes

    def __call__(self, *args: P.args, **kwargs: P.kwargs) -> T:
        """Run the function in a subprocess and block until it finishes

        Returns
        -------
        T
            What the function returned

        Raises
        ------
        WallTimeoutException | CpuTimeoutException | MemoryLimitException
            When the corresponding budget ran out

        BudgetException
            When the subprocess died without a reason we could identify

        Exception
            Anything the function itself raised
        """
        receive_pipe, send_pipe = self.context.Pipe(duplex=False)
        limiter = Limiter.create(
            func=self.func,
            output=send_pipe,
            memory=self.memory,
            cpu_time=self.cpu_time,
            terminate_child_processes=self.terminate_child_processes,
        )
        subprocess = self.context.Process(  # type: ignore
            target=limiter.__call__,
            args=args,
            kwargs=kwargs,
            daemon=False,
            name=self.name,
        )

        # A signal handler can only be set from the main thread, areas dispatched
        # from a thread pool rely on the pool owner's handler instead
        if threading.main_thread() is threading.current_thread():
            _default_sigterm_handler = signal.getsignal(signal.SIGTERM)

            def _closing_handler(sig: int, frame: Any) -> None:
                if subprocess.is_alive():
                    subprocess.kill()
                receive_pipe.close()
                subprocess.join(0.1)
                if callable(_default_sigterm_handler):
                    _default_sigterm_handler(sig, frame)

            signal.signal(signal.SIGTERM, _closing_handler)

        subprocess.start()
        call = callstring(self.func, *args, **kwargs)

        # Responses we can get
        #
        # * (result, None, None)     | success
        # * (None, error, traceback) | the function or a limit raised
        # * None                     | MemoryError while sending the real response
        # * nothing                  | wall time, killed by a signal, unknown
        result: Any = _NOTHING
        err: BaseException | None = None
        tb: str | None = None
        start = time.time()
        try:
            while True:
                if self.wall_time is not None and time.time() - start > self.wall_time:
                    err = WallTimeoutException(
                        f"Did not finish in time ({self.wall_time}s)\n{call}"
                    )
                    break
                elif receive_pipe.poll(0.01):
                    response = receive_pipe.recv()
                    if response is None:
                        err = MemoryLimitException(
                            "Could not retrieve the result or any error about why,"
                            f" likely out of memory.\n{call}"
                        )
                    else:
                        result, err, tb = response
                    break
                elif not subprocess.is_alive():
                    # it may have sent its response right before exiting
                    if receive_pipe.poll():
                        continue
                    break
        except EOFError:
            err = MemoryLimitException(
                f"The subprocess closed without sending a response.\n{call}"
            )
        finally:
            receive_pipe.close()
            send_pipe.close()

            # Read the exitcode before psutil gets a chance to reap the process
            exitcode = None if subprocess.is_alive() else subprocess.exitcode
            if self.terminate_child_processes:
                terminate_process_tree(subprocess.pid, include_parent=True)
            elif subprocess.is_alive():
                subprocess.kill()
            subprocess.join(1)

        if err is not None:
            if tb is not None:
                raise err from RemoteTraceback(tb)
            raise err

        if result is not _NOTHING:
            return result  # type: ignore

        raise self._classify_exit(exitcode, call)

    def _classify_exit(self, exitcode: int | None, call: str) -> BudgetException:
        if exitcode is None:
            return WallTimeoutException(
                f"Did not finish in time ({self.wall_time}s)\n{call}"
            )

        if exitcode == -signal.SIGSEGV and self.memory is not None:
            return MemoryLimitException(
                "The subprocess exited with SIGSEGV while a memory budget was set,"
                f" presumably it ran out of memory.\n{call}"
            )

        if (
            self.cpu_time is not None
            and hasattr(signal, "SIGXCPU")
            and exitcode in (-signal.SIGXCPU, -signal.SIGKILL)
        ):
            return CpuTimeoutException(
                f"Did not finish in cpu time ({self.cpu_time}s)\n{call}"
            )

        return BudgetException(
            f"Subprocess ended with exitcode {exitcode} and no result\n{call}"
        )


def run_budgeted(
    func: Callable[..., T],
    *args: Any,
    memory: Amount | None = None,
    cpu_time: Amount | None = None,
    wall_time: Amount | None = None,
    isolate: bool = False,
    name: str | None = None,
    **kwargs: Any,
) -> T:
    """Call `func` directly when no budget is set and `isolate` is False"""
    if not isolate and memory is None and cpu_time is None and wall_time is None:
        return func(*args, **kwargs)

    budget = Budget(
        func, name=name, memory=memory, cpu_time=cpu_time, wall_time=wall_time
    )
    logger.debug(
        f"Running {callstring(func)} with memory={budget.memory}B"
        f" cpu_time={budget.cpu_time}s wall_time={budget.wall_time}s"
    )
    return budget(*args, **kwargs)
