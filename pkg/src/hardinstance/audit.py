"""
Span audit for runs on the hard instance.

From x0 = 0 only the partials of the two end coordinates can be nonzero (the
left end sees the constant 1, the right end the q^(n+1) term). A partial at a
point supported on a revealed set R can only be nonzero on R, its neighbours
and the two ends, so the revealed frontier grows from both ends. A run
respects the span condition iff every iterate stays supported on R.
"""

import logging

import numpy as np

from core.vectors import as_vector

logger = logging.getLogger(__name__)


class SpanAudit:
    """Incremental checker; feed it (coordinate, iterate) pairs in order."""

    def __init__(self, n: int, x0=None):
        self.n = n
        x0 = np.zeros(n) if x0 is None else as_vector(x0, n, "x0")
        self._revealed = np.zeros(n, dtype=bool)
        self.step = 0
        self.violation: int | None = None
        if np.any(x0 != 0.0):
            # Not anchored at the origin
            self.violation = 0

    @property
    def ok(self) -> bool:
        return self.violation is None

    def revealed(self) -> np.ndarray:
        return np.flatnonzero(self._revealed)

    def can_reveal(self, i: int) -> bool:
        r = self._revealed
        return (
            i == 0
            or i == self.n - 1
            or r[i]
            or (i > 0 and r[i - 1])
            or (i + 1 < self.n and r[i + 1])
        )

    def observe(self, i: int, *iterates: np.ndarray) -> bool:
        """Record one step that queried coordinate i and produced `iterates`."""
        self.step += 1
        if self.violation is not None:
            return False
        if self.can_reveal(i):
            self._revealed[i] = True
        for x in iterates:
            if np.any((x != 0.0) & ~self._revealed):
                self.violation = self.step
                logger.info("span violation at step %d", self.step)
                return False
        return True

    # Observer adapters

    def engine_observer(self, engine) -> bool:
        """For AcdmEngine.run; checks x, v and y. Never stops the run."""
        self.observe(engine.last_coordinate, engine.solution(), engine.v(), engine.y())
        return False

    def cdm_observer(self, k: int, i: int, x: np.ndarray) -> None:
        self.observe(i, x)


def span_audit(n: int, x0, coordinates, iterates) -> bool:
    """True iff the recorded run (coordinate i_k then iterate x_{k+1}) respects the span condition."""
    audit = SpanAudit(n, x0)
    for i, x in zip(coordinates, iterates):
        if not audit.observe(int(i), np.asarray(x)):
            return False
    return audit.ok
