"""Per-measurement uncertainty sequences and their asymptote."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence

import numpy as np


class TraceEntry(NamedTuple):
    n: int
    delta_a_eff: float
    pre_width: float


class Asymptote(NamedTuple):
    value: float
    converged: bool


def asymptotic_value(values: Sequence[float], rel_tol: float = 1e-4, window: int = 3) -> Asymptote:
    """Mean of the last ``window`` values, flagged converged when their
    relative spread ``(max - min) / mean`` is below ``rel_tol``.

    Accepts a plain sequence or an :class:`UncertaintyTrace`.
    """
    if isinstance(values, UncertaintyTrace):
        values = values.values
    values = np.asarray(values, dtype=float)
    if window < 1:
        raise ValueError("window must be >= 1")
    if values.size < window:
        raise ValueError(f"need at least {window} entries, got {values.size}")
    tail = values[-window:]
    mean = float(tail.mean())
    spread = float(tail.max() - tail.min())
    converged = bool(np.isfinite(mean) and mean != 0 and spread / abs(mean) < rel_tol)
    return Asymptote(mean, converged)


@dataclass
class UncertaintyTrace:
    entries: List[TraceEntry] = field(default_factory=list)
    asymptote: Optional[float] = None
    converged: bool = False

    def append(self, n, delta_a_eff, pre_width):
        if self.entries and n <= self.entries[-1].n:
            raise ValueError("trace indices must be strictly increasing")
        self.entries.append(TraceEntry(int(n), float(delta_a_eff), float(pre_width)))

    def update_asymptote(self, rel_tol, window):
        """Refresh the convergence flag; returns True once converged."""
        if len(self.entries) < window:
            return False
        est = asymptotic_value(self.values, rel_tol, window)
        self.converged = est.converged
        self.asymptote = est.value if est.converged else None
        return self.converged

    @property
    def n(self):
        return np.array([e.n for e in self.entries], dtype=int)

    @property
    def values(self):
        return np.array([e.delta_a_eff for e in self.entries])

    @property
    def pre_widths(self):
        return np.array([e.pre_width for e in self.entries])

    def __len__(self):
        return len(self.entries)

    def rows(self):
        return [tuple(e) for e in self.entries]
