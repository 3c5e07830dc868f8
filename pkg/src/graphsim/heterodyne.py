r"""Quantum heterodyne multiplexing in the classical-local-oscillator limit.

A local-oscillator tooth at grid index ``c`` beats against the signal pair
``c - j, c + j``; after balanced subtraction the pair appears at photocurrent
frequency ``(2j - 1) * spacing``. Demodulating channels ``j = 1..n`` and summing
measures :math:`\beta_0 \sum_j A_\theta^{(c \pm j)}` with
:math:`A_\theta = \cos\theta\, X + \sin\theta\, P`.

Image-band beats, DC terms and same-port interference are dropped, and
demodulation is ideal. Detected positions that carry no state mode are
vacuum inputs and add one unit of variance per unit-magnitude coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .comb import ModeGrid
from .dynamics import GaussianState, QuadratureForm, covariance, limit_variance, variance
from .errors import InvalidArgument, InvalidPlan
from .graphs import allones_graph

__all__ = [
    "DetectionPlan",
    "MeasuredObservable",
    "HeterodyneResult",
    "BandwidthReport",
    "channel_frequency",
    "measured_observable",
    "measured_variance",
    "partial_sum_limit_variance",
    "bandwidth_gap_analysis",
    "lo_comb_plan",
    "lo_quadrature",
]


def channel_frequency(j: int, spacing: float = 1.0) -> float:
    """Photocurrent frequency of demodulation channel ``j``: ``(2j - 1) * spacing``."""
    if int(j) != j or j < 1:
        raise InvalidArgument(f"channel index must be an integer >= 1, got {j!r}")
    return (2 * int(j) - 1) * spacing


@dataclass(frozen=True)
class DetectionPlan:
    """LO comb teeth, LO phase and per-tooth demodulation channel count.

    Each tooth ``c`` detects ``{c - n, ..., c - 1, c + 1, ..., c + n}``; coverage
    of two teeth may not overlap, and no tooth may sit on a detected position.
    """

    lo_indices: Tuple[int, ...]
    theta: float
    n_channels: int
    lo_amplitude: float = 1.0

    def __post_init__(self):
        teeth = tuple(sorted(int(c) for c in self.lo_indices))
        object.__setattr__(self, "lo_indices", teeth)
        if not teeth:
            raise InvalidPlan("plan needs at least one LO tooth")
        if len(set(teeth)) != len(teeth):
            raise InvalidPlan("duplicate LO teeth")
        if int(self.n_channels) != self.n_channels or self.n_channels < 1:
            raise InvalidPlan(f"n_channels must be an integer >= 1, got {self.n_channels!r}")
        if not self.lo_amplitude > 0 or not math.isfinite(self.lo_amplitude):
            raise InvalidPlan(f"lo_amplitude must be finite and > 0, got {self.lo_amplitude!r}")
        if not math.isfinite(self.theta):
            raise InvalidPlan("theta must be finite")
        seen: Dict[int, int] = {}
        for c in teeth:
            for m in self._covered(c):
                if m in seen:
                    raise InvalidPlan(f"mode {m} covered by LO teeth {seen[m]} and {c}")
                seen[m] = c
        clash = set(teeth) & set(seen)
        if clash:
            raise InvalidPlan(f"LO teeth {sorted(clash)} sit on detected positions")

    def _covered(self, c: int) -> List[int]:
        n = int(self.n_channels)
        return [c - j for j in range(n, 0, -1)] + [c + j for j in range(1, n + 1)]

    @property
    def detected_mode_indices(self) -> Tuple[int, ...]:
        return tuple(sorted(m for c in self.lo_indices for m in self._covered(c)))

    def channel_modes(self, j: int) -> List[int]:
        """Grid positions demodulated at channel ``j`` across all teeth."""
        channel_frequency(j)
        if j > self.n_channels:
            raise InvalidArgument(f"channel {j} exceeds n_channels={self.n_channels}")
        return sorted(m for c in self.lo_indices for m in (c - j, c + j))

    def to_dict(self) -> dict:
        return {
            "lo_indices": list(self.lo_indices),
            "theta": self.theta,
            "beta0": self.lo_amplitude,
            "n_channels": int(self.n_channels),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DetectionPlan":
        return cls(
            tuple(data["lo_indices"]),
            float(data["theta"]),
            int(data["n_channels"]),
            float(data.get("beta0", 1.0)),
        )


@dataclass(frozen=True, eq=False)
class MeasuredObservable:
    """The summed, demodulated observable in units of ``scale`` (the LO amplitude).

    ``mode_indices`` labels the entries of ``form``: the state's modes in grid
    order followed by the vacuum-padded positions.
    """

    form: QuadratureForm
    mode_indices: Tuple[int, ...]
    scale: float
    vacuum_padded_indices: Tuple[int, ...]
    n_state_modes: int

    def state_form(self) -> Optional[QuadratureForm]:
        """Restriction to the state's modes, or None if no state mode is detected."""
        k = self.n_state_modes
        x, p = self.form.x_coeffs[:k], self.form.p_coeffs[:k]
        if not (np.any(x) or np.any(p)):
            return None
        return QuadratureForm(x, p)

    def vacuum_variance_padding(self) -> float:
        k = self.n_state_modes
        return float(np.sum(self.form.x_coeffs[k:] ** 2 + self.form.p_coeffs[k:] ** 2))


def _state_indices(grid: ModeGrid, state_indices: Optional[Sequence[int]]) -> Tuple[int, ...]:
    if state_indices is None:
        return grid.signal_indices
    idx = tuple(int(i) for i in state_indices)
    if len(set(idx)) != len(idx):
        raise InvalidArgument("duplicate state mode indices")
    if not set(idx) <= set(grid.signal_indices):
        raise InvalidArgument("state modes must be signal modes of the grid")
    return idx


def _validate_against_grid(plan: DetectionPlan, grid: ModeGrid) -> None:
    on_signal = set(plan.lo_indices) & set(grid.signal_indices)
    if on_signal:
        raise InvalidPlan(f"LO teeth {sorted(on_signal)} coincide with signal modes")


def lo_quadrature(theta: float) -> Tuple[float, float]:
    """``(cos theta, sin theta)`` with round-off residues at multiples of pi/2 set to zero."""
    c, s = math.cos(theta), math.sin(theta)
    # cos(pi/2) ~ 6e-17 would otherwise pick up the antisqueezed quadrature
    if abs(c) < 1e-15:
        c = 0.0
    if abs(s) < 1e-15:
        s = 0.0
    return c, s


def _coefficient_vectors(plan, positions: Sequence[int], detected) -> Tuple[np.ndarray, np.ndarray]:
    mask = np.array([m in detected for m in positions], dtype=float)
    c, s = lo_quadrature(plan.theta)
    return c * mask, s * mask


def measured_observable(
    plan: DetectionPlan, grid: ModeGrid, state_indices: Optional[Sequence[int]] = None
) -> MeasuredObservable:
    """Quadrature form measured by ``plan`` on the signal modes of ``grid``.

    Every detected position gets ``cos(theta)`` on X and ``sin(theta)`` on P.
    ``state_indices`` names the grid positions carried by the state, in state
    order; it defaults to all signal modes of the grid.

    Raises:
        InvalidPlan: if an LO tooth coincides with a signal mode.
    """
    _validate_against_grid(plan, grid)
    modes = _state_indices(grid, state_indices)
    detected = set(plan.detected_mode_indices)
    padded = tuple(sorted(detected.difference(modes)))
    positions = modes + padded
    x, p = _coefficient_vectors(plan, positions, detected)
    return MeasuredObservable(QuadratureForm(x, p), positions, plan.lo_amplitude, padded, len(modes))


@dataclass(frozen=True)
class HeterodyneResult:
    """Measured variance, raw (``beta0**2`` scaled) and normalised.

    ``channels`` maps channel index to its share of the normalised variance,
    ``Cov(S_j, S)``; the shares sum to ``normalized``.
    """

    raw: float
    normalized: float
    state_part: float
    vacuum_part: float
    channels: Dict[int, float] = field(default_factory=dict)


def measured_variance(
    state: GaussianState,
    plan: DetectionPlan,
    grid: ModeGrid,
    state_indices: Optional[Sequence[int]] = None,
) -> HeterodyneResult:
    """Variance of the multiplexed heterodyne observable on ``state``.

    Raises:
        InvalidArgument: if the state's mode count differs from the state
            indices (all grid signals by default).
    """
    obs = measured_observable(plan, grid, state_indices)
    if state.n_modes != obs.n_state_modes:
        raise InvalidArgument(f"state has {state.n_modes} modes, grid assigns {obs.n_state_modes}")
    modes = obs.mode_indices[: obs.n_state_modes]
    sf = obs.state_form()
    state_part = variance(state, sf) if sf is not None else 0.0
    vac = obs.vacuum_variance_padding()

    padded = set(obs.vacuum_padded_indices)
    channels = {}
    for j in range(1, plan.n_channels + 1):
        ch = set(plan.channel_modes(j))
        x, p = _coefficient_vectors(plan, modes, ch)
        share = covariance(state, QuadratureForm(x, p), sf) if (sf is not None and (x.any() or p.any())) else 0.0
        share += float(len(ch & padded))
        channels[j] = share

    normalized = state_part + vac
    return HeterodyneResult(
        raw=plan.lo_amplitude**2 * normalized,
        normalized=normalized,
        state_part=state_part,
        vacuum_part=vac,
        channels=channels,
    )


def lo_comb_plan(n_channels: int, n_teeth: int, theta: float = math.pi / 2, start: int = 0,
                 lo_amplitude: float = 1.0) -> Tuple[DetectionPlan, Tuple[int, ...]]:
    """LO teeth spaced ``2n + 1`` apart so their bands tile a contiguous signal range.

    Returns the plan and the signal positions it covers.
    """
    step = 2 * n_channels + 1
    plan = DetectionPlan(tuple(start + i * step for i in range(n_teeth)), theta, n_channels, lo_amplitude)
    return plan, plan.detected_mode_indices


def partial_sum_limit_variance(n_modes: int, m: int) -> float:
    """Large-time variance of the sum of ``m`` phases of the all-ones-graph state.

    Evaluated spectrally from the graph; equals ``m (1 - m/n)``.
    """
    if not 1 <= m <= n_modes:
        raise InvalidArgument(f"need 1 <= m <= n_modes, got m={m}, n_modes={n_modes}")
    p = np.zeros(n_modes)
    p[:m] = 1.0
    return limit_variance(allones_graph(n_modes), QuadratureForm(np.zeros(n_modes), p))


@dataclass(frozen=True)
class BandwidthReport:
    n_modes: int
    n_channels: int
    detected_modes: int
    limit_variance: float
    vacuum_variance: float
    residual_db: float
    lo_teeth_needed: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def bandwidth_gap_analysis(n_modes: int, n_channels: int) -> BandwidthReport:
    """How much phase-sum squeezing a bandwidth-limited detector sees.

    A single LO with ``n`` channels reads the partial sum over ``m = 2n + 1``
    modes (capped at ``n_modes``) of an ``n_modes``-mode phase-sum-squeezed
    comb. ``lo_teeth_needed`` is the number of LO teeth, each detecting ``2n``
    signal modes, required to read the full sum.
    """
    if n_channels < 1 or n_modes < n_channels:
        raise InvalidArgument(f"need 1 <= n_channels <= n_modes, got {n_channels}, {n_modes}")
    m = min(2 * n_channels + 1, n_modes)
    lim = partial_sum_limit_variance(n_modes, m)
    residual = 10 * math.log10(lim / m) if lim > 0 else -math.inf
    return BandwidthReport(
        n_modes=n_modes,
        n_channels=n_channels,
        detected_modes=m,
        limit_variance=lim,
        vacuum_variance=float(m),
        residual_db=residual,
        lo_teeth_needed=math.ceil(n_modes / (2 * n_channels)),
    )
