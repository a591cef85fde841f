"""Persisting-laying alarm over a sliding classification window."""

from __future__ import annotations

from collections import deque

from .classify import PoseClass

__all__ = ["FallMonitor"]


class FallMonitor:
    """Raises once when a fully populated window is mostly Laying.

    The window must span the configured duration before it can fire, and the
    monitor re-arms only after a later full window loses its Laying majority.
    """

    def __init__(self, window: float = 10.0, laying_fraction: float = 0.8,
                 rearm_fraction: float = 0.5):
        self.window = window
        self.laying_fraction = laying_fraction
        self.rearm_fraction = rearm_fraction
        self._samples: deque[tuple[float, bool]] = deque()
        self._armed = True

    @property
    def armed(self) -> bool:
        return self._armed

    def push(self, stamp: float, pose: PoseClass) -> bool:
        """Feed one classification; True exactly when the alarm trips."""
        self._samples.append((stamp, pose is PoseClass.LAYING))
        cutoff = stamp - self.window
        while self._samples and self._samples[0][0] < cutoff - 1e-9:
            self._samples.popleft()
        span = stamp - self._samples[0][0]
        if span < self.window - 1e-9:
            return False
        laying = sum(1 for _, is_laying in self._samples if is_laying)
        fraction = laying / len(self._samples)
        if self._armed and fraction >= self.laying_fraction:
            self._armed = False
            return True
        if not self._armed and fraction < self.rearm_fraction:
            self._armed = True
        return False

    def reset(self) -> None:
        self._samples.clear()
        self._armed = True
