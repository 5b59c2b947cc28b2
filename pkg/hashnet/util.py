from __future__ import annotations

from typing import Any, Callable, Tuple, Union

import os
import signal
from functools import partial

import psutil

_mem_unit_table = {
    "B": 1,
    "KB": 2**10,
    "MB": 2**20,
    "GB": 2**30,
}

_time_unit_table = {"s": 1, "m": 60, "h": 60 * 60}

# A plain number or (amount, unit) such as (1, "GB") or (2, "m")
Amount = Union[int, float, Tuple[float, str]]


def memconvert(x: float, *, frm: str = "B", to: str = "B") -> float:
    """Convert between memory units

    Parameters
    ----------
    x : float
        The memory amount

    frm : "B" | "KB" | "MB" | "GB" = "B"
        What unit it is in

    to :  "B" | "KB" | "MB" | "GB" = "B"
        What unit to convert to

    Returns
    -------
    float
        The memory amount, rounded when converting to bytes
    """
    try:
        u_from = _mem_unit_table[frm.upper()]
        u_to = _mem_unit_table[to.upper()]
    except KeyError as e:
        raise ValueError(f"Unknown memory unit {e}, use {list(_mem_unit_table)}")

    as_target = x * u_from / u_to
    return round(as_target) if to.upper() == "B" else as_target


def timeconvert(x: float, *, frm: str = "s", to: str = "s") -> float:
    """Convert between time units "s" | "m" | "h", see `memconvert`"""
    try:
        u_from = _time_unit_table[frm.lower()]
        u_to = _time_unit_table[to.lower()]
    except KeyError as e:
        raise ValueError(f"Unknown time unit {e}, use {list(_time_unit_table)}")

    return x * u_from / u_to


def as_bytes(amount: Amount | None) -> int | None:
    """Memory `amount` in bytes, accepts (4, "GB") style tuples"""
    if amount is None:
        return None

    if isinstance(amount, (tuple, list)):
        x, unit = amount
        return round(memconvert(x, frm=unit))

    return round(amount)


def as_seconds(amount: Amount | None) -> int | None:
    """Time `amount` in whole seconds, accepts (1.5, "h") style tuples"""
    if amount is None:
        return None

    if isinstance(amount, (tuple, list)):
        x, unit = amount
        return round(timeconvert(x, frm=unit))

    return round(amount)


def callstring(f: Callable, *args: Any, **kwargs: Any) -> str:
    """Get a string of the function being called with the args and kwargs

    Long arguments such as whole corpora are shortened.
    """
    parts = [_short(a) for a in args] + [f"{k}={_short(v)}" for k, v in kwargs.items()]
    param_str = ", ".join(parts)
    if isinstance(f, partial):
        name = f.func.__name__
    elif hasattr(f, "__qualname__"):
        name = f.__qualname__
    else:
        name = f.__class__.__name__

    return f"{name}({param_str})"


def _short(x: Any, limit: int = 60) -> str:
    text = str(x)
    return text if len(text) <= limit else text[: limit - 3] + "..."


def terminate_process_tree(
    pid: int | None | psutil.Process = None,
    sig: int = signal.SIGTERM,
    timeout: float = 5,
    include_parent: bool = True,
) -> tuple[list[psutil.Process], list[psutil.Process]]:
    """Signal a process and all its children, SIGKILL whatever survives `timeout`

    * https://psutil.readthedocs.io/en/latest/#kill-process-tree
    """
    if isinstance(pid, psutil.Process):
        parent: psutil.Process | None = pid
        _pid = pid.pid
    else:
        parent = None
        _pid = pid if pid is not None else os.getpid()

    if _pid == os.getpid() and include_parent:
        raise RuntimeError(f"Can't kill this process ({_pid}) from within itself")

    try:
        if parent is None:
            parent = psutil.Process(pid=_pid)
        children = parent.children(recursive=True)
    except psutil.NoSuchProcess:
        parent = None
        children = []

    if include_parent and parent is not None:
        children.append(parent)

    for child in children:
        try:
            child.send_signal(sig)
        except psutil.NoSuchProcess:
            pass

    gone, alive = psutil.wait_procs(children, timeout=timeout)
    for child in alive:
        try:
            child.kill()
        except psutil.NoSuchProcess:
            pass

    return psutil.wait_procs(children, timeout=None) if alive else (gone, alive)


class Monitor:
    def __init__(self, pid: int | None = None):
        """
        Parameters
        ----------
        pid : int | None = None
            The process id to monitor, defaults to current process
        """
        self.process = psutil.Process(pid)

    def memory(self, units: str = "B", *, kind: str = "rss") -> float:
        """Current memory consumption

        Parameters
        ----------
        units : "B" | "KB" | "MB" | "GB" = "B"
            Units to measure in

        kind : "vms" | "rss" = "rss"
            The kind of memory to measure.
            https://psutil.readthedocs.io/en/latest/#psutil.Process.memory_info
        """
        mem = self.process.memory_info()
        if not hasattr(mem, kind):
            raise ValueError(f"No memory kind {kind}, use one from {mem}")

        return memconvert(getattr(mem, kind), frm="B", to=units)

    def peak_memory(self, units: str = "B") -> float:
        """Peak resident memory, falls back to current rss where not reported"""
        try:
            import resource

            # ru_maxrss is KB on Linux, bytes on macOS
            peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
            scale = 1 if psutil.MACOS else 1024
            if self.process.pid == os.getpid():
                return memconvert(peak * scale, frm="B", to=units)
        except ImportError:
            pass

        return self.memory(units, kind="rss")
