from __future__ import annotations

import platform
import sys

if sys.platform.lower().startswith("win"):
    contexts = ["spawn"]
else:
    contexts = ["fork", "spawn", "forkserver"]


def supports(limit: str) -> bool:
    """Check if budgets of a given kind can be enforced on this system

    Parameters
    ----------
    limit: "wall_time" | "cpu_time" | "memory"
        The kind of budget to check support for

    Returns
    -------
    bool
        Whether it is supported or not
    """
    mapping = {
        "wall_time": supports_walltime,
        "cpu_time": supports_cputime,
        "memory": supports_memory,
    }
    func = mapping.get(limit.lower(), None)
    if func is None:
        raise ValueError(f"Not a known budget, must be one of {list(mapping.keys())}")

    return func()


def supports_walltime() -> bool:
    """Wall time is watched from the parent process, so always"""
    return True


def supports_cputime() -> bool:
    """CPU time is limited with `setrlimit` on Linux and macOS"""
    plat = sys.platform.lower()
    return plat.startswith("linux") or plat.startswith("darwin")


def supports_memory() -> bool:
    """Memory can only be limited on Linux

    * Linux - `RLIMIT_AS`
    * Darwin - No, see "hashnet/limiters/mac.py"
    * Others - No
    """
    return sys.platform.lower().startswith("linux")


def describe() -> str:
    """One line summary of the budget support, for logs"""
    kinds = ["wall_time", "cpu_time", "memory"]
    found = ", ".join(f"{k}={supports(k)}" for k in kinds)
    return f"{platform.system()} budgets: {found}"
