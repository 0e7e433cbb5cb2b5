"""Logical clocks.

Every timed component takes a clock object instead of calling time.time()
directly, so the service runs on wall time while tests and simulations run
on a virtual clock they advance by hand.
"""

import time


class Clock:
    """Interface: now() returns seconds as a float."""

    def now(self) -> float:
        raise NotImplementedError


class RealClock(Clock):
    def now(self) -> float:
        return time.time()


class VirtualClock(Clock):
    """Manually advanced clock for deterministic runs."""

    def __init__(self, start: float = 0.0):
        self._now = float(start)

    def now(self) -> float:
        return self._now

    def advance(self, seconds: float) -> None:
        if seconds < 0:
            raise ValueError("cannot advance a clock backwards")
        self._now += seconds
