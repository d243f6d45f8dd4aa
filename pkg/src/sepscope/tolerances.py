"""Named numerical tolerances.

Every check in the package reads its threshold from the active
:class:`Tolerances` instance. The defaults can be swapped for a block of
code with :func:`override`, which is context-local and therefore safe under
threads and asyncio tasks.
"""

from __future__ import annotations

import dataclasses
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from typing import Iterator


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9
    trace: float = 1e-9
    psd: float = 1e-9
    hull: float = 1e-7
    prune: float = 1e-9
    product: float = 1e-7
    entropy: float = 1e-9
    unitary: float = 1e-9
    norm: float = 1e-9

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]


DEFAULT = Tolerances()
_active: ContextVar[Tolerances] = ContextVar("sepscope_tolerances", default=DEFAULT)


def current() -> Tolerances:
    return _active.get()


@contextmanager
def override(**changes: float) -> Iterator[Tolerances]:
    """Temporarily replace some tolerances, e.g. ``override(psd=1e-8)``."""
    unknown = set(changes) - set(Tolerances.keys())
    if unknown:
        raise KeyError(f"unknown tolerance key(s): {sorted(unknown)}")
    tol = dataclasses.replace(_active.get(), **{k: float(v) for k, v in changes.items()})
    token = _active.set(tol)
    try:
        yield tol
    finally:
        _active.reset(token)
