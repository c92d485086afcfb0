"""Fault-injection switches for the mutation-sensitivity checks.

Each named mutation corrupts one operation; the suites must then fail with a
printed counterexample.  Nothing here affects the order or equality oracles,
so cached pure results stay valid while a mutation is active.
"""

from __future__ import annotations

from contextlib import contextmanager

KNOWN = ("drop-convex", "drop-mult-term", "swap-min-sup")

_active: set[str] = set()


def active(name: str) -> bool:
    return name in _active


def activate(name: str) -> None:
    if name not in KNOWN:
        raise ValueError(f"unknown mutation {name!r}; known: {', '.join(KNOWN)}")
    _active.add(name)


def clear() -> None:
    _active.clear()


@contextmanager
def mutation(name: str):
    activate(name)
    try:
        yield
    finally:
        _active.discard(name)
