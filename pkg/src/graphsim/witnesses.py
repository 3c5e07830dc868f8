"""GHZ entanglement witnesses: the phase sum and the pairwise amplitude differences.

A state is flagged when ``Var(X_k - X_l) + Var(P_1 + ... + P_N)`` drops below
``bound``. For unit gains and vacuum-normalised quadratures every separable
state satisfies the inequality with ``bound = 4``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Tuple

import numpy as np
from scipy.optimize import brentq

from .dynamics import GaussianState, QuadratureForm, variance
from .errors import InvalidArgument

__all__ = [
    "DEFAULT_BOUND",
    "WitnessReport",
    "phase_sum_form",
    "amplitude_diff_form",
    "ghz_witness",
    "ghz_violation_onset",
]

DEFAULT_BOUND = 4.0

Pair = Tuple[int, int]


def phase_sum_form(n: int) -> QuadratureForm:
    """``P_1 + ... + P_n``."""
    if n < 1:
        raise InvalidArgument("phase sum needs at least one mode")
    return QuadratureForm(np.zeros(n), np.ones(n))


def amplitude_diff_form(n: int, k: int, l: int) -> QuadratureForm:
    """``X_k - X_l`` with 1-based mode labels, ``1 <= k < l <= n``."""
    if not (1 <= k < l <= n):
        raise InvalidArgument(f"need 1 <= k < l <= n, got k={k}, l={l}, n={n}")
    x = np.zeros(n)
    x[k - 1] = 1.0
    x[l - 1] = -1.0
    return QuadratureForm(x, np.zeros(n))


@dataclass(frozen=True)
class WitnessReport:
    var_p_sum: float
    var_x_diffs: Dict[Pair, float]
    bound: float

    @property
    def combined(self) -> Dict[Pair, float]:
        return {pair: v + self.var_p_sum for pair, v in self.var_x_diffs.items()}

    @property
    def violated(self) -> Dict[Pair, bool]:
        return {pair: c < self.bound for pair, c in self.combined.items()}

    @property
    def all_violated(self) -> bool:
        return all(self.violated.values())

    def rows(self):
        """Table rows ``(pair, var_x_diff, var_p_sum, combined, bound, violated)``."""
        combined = self.combined
        for pair, v in self.var_x_diffs.items():
            c = combined[pair]
            yield f"{pair[0]}-{pair[1]}", v, self.var_p_sum, c, self.bound, c < self.bound

    def to_dict(self) -> dict:
        return {
            "var_p_sum": self.var_p_sum,
            "bound": self.bound,
            "pairs": [
                {"pair": list(pair), "var_x_diff": v, "combined": c, "violated": bool(viol)}
                for pair, (_, v, _, c, _, viol) in zip(self.var_x_diffs, self.rows())
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WitnessReport":
        diffs = {tuple(p["pair"]): float(p["var_x_diff"]) for p in data["pairs"]}
        return cls(float(data["var_p_sum"]), diffs, float(data["bound"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def ghz_witness(state: GaussianState, bound: float = DEFAULT_BOUND) -> WitnessReport:
    """Evaluate the combined-variance witness for every mode pair ``k < l``."""
    n = state.n_modes
    if n < 2:
        raise InvalidArgument("witness needs at least two modes")
    var_p = variance(state, phase_sum_form(n))
    diffs = {
        (k, l): variance(state, amplitude_diff_form(n, k, l))
        for k, l in combinations(range(1, n + 1), 2)
    }
    return WitnessReport(var_p, diffs, float(bound))


def ghz_violation_onset(n: int, bound: float = DEFAULT_BOUND) -> float:
    """Interaction time beyond which the evolved GHZ-graph vacuum violates the bound.

    Solves ``2 exp(-2 tau) + n exp(-2 (n-1) tau) = bound``; the left side is
    strictly decreasing, equal to ``2 + n`` at ``tau = 0``. Returns 0 if the
    vacuum already violates it.
    """
    if n < 2:
        raise InvalidArgument("witness needs at least two modes")
    if not 0 < bound:
        raise InvalidArgument("bound must be positive")

    def excess(tau):
        return 2 * math.exp(-2 * tau) + n * math.exp(-2 * (n - 1) * tau) - bound

    if excess(0.0) < 0:
        return 0.0
    hi = 1.0
    while excess(hi) >= 0:
        hi *= 2
        if hi > 1e6:
            raise InvalidArgument(f"bound {bound} is never reached")
    return brentq(excess, 0.0, hi, xtol=1e-14, rtol=1e-15)
