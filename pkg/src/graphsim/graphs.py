r"""Squeezing-interaction graphs and their eigensystems.

The weight matrix ``A`` of an :class:`InteractionGraph` enters the Hamiltonian as

.. math::

    H = \frac{i\hbar\kappa}{2} \sum_{k,l} A_{kl} a_k^\dagger a_l^\dagger + h.c.

so that an off-diagonal pair contributes one :math:`a_k^\dagger a_l^\dagger` term
and a diagonal weight ``w`` contributes :math:`w\, a_k^{\dagger 2}/2`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .errors import InvalidArgument

__all__ = [
    "InteractionGraph",
    "Spectrum",
    "ghz_graph",
    "vlb_graph",
    "allones_graph",
    "uniform_parameters",
    "spectrum",
]


@dataclass(frozen=True, eq=False)
class InteractionGraph:
    """Weighted symmetric coupling graph; diagonal entries are self-loop weights.

    Weights are dimensionless, in units of the coupling constant. The stored
    array is read-only.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise InvalidArgument(f"weights must be a non-empty square matrix, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise InvalidArgument("weights must be finite")
        if not np.array_equal(w, w.T):
            raise InvalidArgument("weights must be symmetric")
        w += 0.0  # normalise -0.0
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n_modes(self) -> int:
        return self.weights.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InteractionGraph):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __hash__(self) -> int:
        return hash(self.weights.tobytes())

    def to_dict(self) -> dict:
        return {"n": self.n_modes, "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "InteractionGraph":
        try:
            n = int(data["n"])
            weights = data["weights"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"graph object needs 'n' and 'weights': {exc}") from exc
        g = cls(np.asarray(weights, dtype=float))
        if g.n_modes != n:
            raise InvalidArgument(f"'n'={n} does not match weights of size {g.n_modes}")
        return g

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "InteractionGraph":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigendecomposition of a graph's weight matrix.

    Eigenvalues are sorted in descending order; eigenvectors are the columns of
    ``eigenvectors``. ``uniform`` holds ``(alpha, beta)`` when the matrix is
    ``alpha * J + beta * I`` (``J`` the all-ones matrix), which enables closed-form
    functions of the matrix downstream.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    uniform: Optional[Tuple[float, float]] = None

    @property
    def method(self) -> str:
        return "analytic" if self.uniform is not None else "dense"

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T

    def projector(self, value: float, atol: float = 1e-9) -> np.ndarray:
        """Orthogonal projector onto the eigenspace of ``value``."""
        mask = np.abs(self.eigenvalues - value) <= atol
        V = self.eigenvectors[:, mask]
        return V @ V.T


def _check_n(n: int, minimum: int) -> int:
    if int(n) != n or n < minimum:
        raise InvalidArgument(f"mode count must be an integer >= {minimum}, got {n!r}")
    return int(n)


def ghz_graph(n: int) -> InteractionGraph:
    """All pairwise two-mode squeezing edges, no self-loops: ``A = J - I``."""
    n = _check_n(n, 2)
    return InteractionGraph(np.ones((n, n)) - np.eye(n))


def vlb_graph(n: int) -> InteractionGraph:
    """Pairwise edges of weight 1 plus self-loops of weight ``-(n-2)/2``.

    This is the coupling pattern of the multi-beam-splitter GHZ protocol, where
    the degenerate terms run opposite to the pairwise ones.
    """
    n = _check_n(n, 2)
    w = np.ones((n, n))
    np.fill_diagonal(w, -(n - 2) / 2)
    return InteractionGraph(w)


def allones_graph(n: int) -> InteractionGraph:
    """Every pair and every self-loop with weight 1: ``A = J``."""
    n = _check_n(n, 1)
    return InteractionGraph(np.ones((n, n)))


def uniform_parameters(weights) -> Optional[Tuple[float, float]]:
    """Return ``(alpha, beta)`` if ``weights == alpha*J + beta*I`` exactly, else None."""
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    d = w[0, 0]
    if not np.all(np.diag(w) == d):
        return None
    if n == 1:
        return 0.0, float(d)
    alpha = w[0, 1]
    off = w[~np.eye(n, dtype=bool)]
    if not np.all(off == alpha):
        return None
    return float(alpha), float(d - alpha)


def helmert_basis(n: int) -> np.ndarray:
    """Orthonormal basis with the uniform vector first, then Helmert contrasts.

    Column ``k`` (k >= 1) is ``(1, ..., 1, -k, 0, ..., 0) / sqrt(k (k+1))``.
    """
    V = np.zeros((n, n))
    V[:, 0] = 1.0 / np.sqrt(n)
    for k in range(1, n):
        V[:k, k] = 1.0
        V[k, k] = -k
        V[:, k] /= np.sqrt(k * (k + 1))
    return V


def _canonical_order(w: np.ndarray, V: np.ndarray, tie_tol: float):
    # sign convention: first non-negligible component positive
    V = V.copy()
    for i in range(V.shape[1]):
        col = V[:, i]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            V[:, i] = -col
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    out = []
    i = 0
    while i < len(w):
        j = i + 1
        while j < len(w) and w[i] - w[j] <= tie_tol:
            j += 1
        block = list(range(i, j))
        block.sort(key=lambda c: tuple(np.round(V[:, c], 12)))
        out.extend(block)
        i = j
    return w[out], V[:, out]


def spectrum(g: Union[InteractionGraph, np.ndarray], dense: bool = False) -> Spectrum:
    """Full eigendecomposition of a graph's weight matrix.

    Matrices of the form ``alpha*J + beta*I`` (which includes the GHZ,
    self-loop-balanced and all-ones families) are decomposed in closed form;
    anything else goes through a dense symmetric eigensolver. ``dense=True``
    forces the solver path.

    Raises:
        InvalidArgument: if a raw matrix is not symmetric.
    """
    if not isinstance(g, InteractionGraph):
        g = InteractionGraph(g)
    A = g.weights
    n = g.n_modes
    scale = max(1.0, float(np.max(np.abs(A))) * n)
    tie_tol = 1e-10 * scale

    params = None if dense else uniform_parameters(A)
    if params is not None:
        alpha, beta = params
        w = np.full(n, beta)
        w[0] = alpha * n + beta
        w, V = _canonical_order(w, helmert_basis(n), tie_tol)
        # snap ties to their exact closed-form values
        w = np.where(np.abs(w - beta) <= tie_tol, beta, w)
    else:
        w, V = np.linalg.eigh(A)
        w, V = _canonical_order(w, V, tie_tol)
    w.setflags(write=False)
    V.setflags(write=False)
    return Spectrum(w, V, params)
