"""Interaction graphs induced by a mode-locked pump comb inside an OPO.

Signal mode ``j`` sits at ``omega0 + j*spacing`` and pump tooth ``s`` at
``2*omega0 + s*spacing``. Energy conservation lets pump ``s`` couple every
signal pair with ``j + k == s``, i.e. one skew diagonal of the adjacency
matrix; ``j == k`` is the degenerate (single-mode) case.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import InvalidArgument
from .graphs import InteractionGraph

__all__ = ["ModeGrid", "PhaseMatchWindow", "CoverageReport", "pump_comb_graph", "coverage_report"]


def _index_tuple(values, name: str, allow_empty: bool) -> Tuple[int, ...]:
    values = list(values)
    if any(isinstance(v, bool) or int(v) != v for v in values):
        raise InvalidArgument(f"{name} must be integers")
    vals = [int(v) for v in values]
    if len(set(vals)) != len(vals):
        raise InvalidArgument(f"{name} contains duplicates")
    if not vals and not allow_empty:
        raise InvalidArgument(f"{name} must be non-empty")
    return tuple(sorted(vals))


@dataclass(frozen=True)
class ModeGrid:
    """Signal and pump comb layout.

    ``fsr_matched`` records whether the pump repetition rate equals the OPO
    free spectral range; only matched grids produce an interaction graph.
    """

    omega0: float
    spacing: float
    signal_indices: Tuple[int, ...]
    pump_indices: Tuple[int, ...] = ()
    fsr_matched: bool = True

    def __post_init__(self):
        if not self.spacing > 0:
            raise InvalidArgument(f"spacing must be > 0, got {self.spacing!r}")
        object.__setattr__(self, "signal_indices", _index_tuple(self.signal_indices, "signal_indices", False))
        object.__setattr__(self, "pump_indices", _index_tuple(self.pump_indices, "pump_indices", True))

    def signal_frequency(self, j: int) -> float:
        return self.omega0 + j * self.spacing

    def pump_frequency(self, s: int) -> float:
        return 2 * self.omega0 + s * self.spacing

    def to_dict(self) -> dict:
        return {
            "omega0": self.omega0,
            "spacing": self.spacing,
            "signals": list(self.signal_indices),
            "pumps": list(self.pump_indices),
            "fsr_matched": self.fsr_matched,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModeGrid":
        return cls(
            float(data.get("omega0", 0.0)),
            float(data.get("spacing", 1.0)),
            tuple(data["signals"]),
            tuple(data.get("pumps", ())),
            bool(data.get("fsr_matched", True)),
        )


@dataclass(frozen=True)
class PhaseMatchWindow:
    """Inclusive range of signal indices inside the crystal's phase-matching band."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidArgument(f"window lo={self.lo} exceeds hi={self.hi}")

    def __contains__(self, j: int) -> bool:
        return self.lo <= j <= self.hi

    @classmethod
    def unbounded(cls) -> "PhaseMatchWindow":
        return cls(-(2**62), 2**62)


def _retained(grid: ModeGrid, window: PhaseMatchWindow) -> Tuple[List[int], int]:
    kept = [j for j in grid.signal_indices if j in window]
    return kept, len(grid.signal_indices) - len(kept)


def _adjacency(signals: List[int], pumps) -> np.ndarray:
    idx = np.asarray(signals)
    sums = idx[:, None] + idx[None, :]
    return np.isin(sums, np.asarray(list(pumps), dtype=int)).astype(float)


def pump_comb_graph(grid: ModeGrid, window: PhaseMatchWindow) -> InteractionGraph:
    """Adjacency ``A_jk = 1`` iff ``j + k`` is a pump tooth, over in-window signals.

    Signals outside the window are dropped with a warning.

    Raises:
        InvalidArgument: if the grid is not FSR-matched or no signal survives
            the window.
    """
    if not grid.fsr_matched:
        raise InvalidArgument("pump repetition rate does not match the cavity FSR")
    kept, dropped = _retained(grid, window)
    if dropped:
        warnings.warn(f"{dropped} signal mode(s) outside the phase-matching window were dropped")
    if not kept:
        raise InvalidArgument("no signal mode inside the phase-matching window")
    return InteractionGraph(_adjacency(kept, grid.pump_indices))


@dataclass(frozen=True)
class CoverageReport:
    signal_indices: Tuple[int, ...]
    dropped_signals: int
    realized_edges: int
    degenerate_couplings: int
    missing_pump_sums: Tuple[int, ...]
    complete: bool
    matched: bool

    def to_dict(self) -> dict:
        return {
            "signal_indices": list(self.signal_indices),
            "dropped_signals": self.dropped_signals,
            "realized_edges": self.realized_edges,
            "degenerate_couplings": self.degenerate_couplings,
            "missing_pump_sums": list(self.missing_pump_sums),
            "complete": self.complete,
            "matched": self.matched,
        }


def coverage_report(grid: ModeGrid, window: PhaseMatchWindow) -> CoverageReport:
    """Summarise which couplings the pump comb realises over the in-window signals.

    ``realized_edges`` counts coupled pairs ``j < k``; ``degenerate_couplings``
    counts self-loops; ``missing_pump_sums`` lists the values of ``j + k`` no
    pump tooth provides. ``complete`` means the graph is all-ones.
    """
    kept, dropped = _retained(grid, window)
    if not kept:
        return CoverageReport((), dropped, 0, 0, (), False, grid.fsr_matched)
    A = _adjacency(kept, grid.pump_indices)
    needed = {j + k for j in kept for k in kept}
    missing = tuple(sorted(needed.difference(grid.pump_indices)))
    return CoverageReport(
        signal_indices=tuple(kept),
        dropped_signals=dropped,
        realized_edges=int(np.triu(A, 1).sum()),
        degenerate_couplings=int(np.trace(A)),
        missing_pump_sums=missing,
        complete=grid.fsr_matched and not missing,
        matched=grid.fsr_matched,
    )
