r"""Gaussian-state evolution under quadratic squeezing Hamiltonians.

Quadratures are :math:`X_j = a_j + a_j^\dagger` and :math:`P_j = i(a_j^\dagger - a_j)`,
so :math:`[X, P] = 2i` and the vacuum has unit variance in every quadrature.
Covariance matrices use block order ``(X_1..X_N, P_1..P_N)``.

For a graph with weight matrix ``A`` and interaction time ``tau`` (coupling times
time), the Heisenberg picture gives ``X(tau) = exp(tau A) X(0)`` and
``P(tau) = exp(-tau A) P(0)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .errors import ComputationError, InvalidArgument
from .graphs import InteractionGraph, Spectrum, spectrum

__all__ = [
    "EvolutionSpec",
    "GaussianState",
    "QuadratureForm",
    "symplectic_form",
    "sym_exp",
    "symplectic_map",
    "evolve_vacuum",
    "evolve",
    "covariance",
    "variance",
    "squeezing_db",
    "limit_variance",
]

METHODS = ("analytic", "dense")


def symplectic_form(n: int, scale: float = 2.0) -> np.ndarray:
    """``[[0, scale*I], [-scale*I, 0]]``; the default matches ``[X, P] = 2i``."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, scale * I], [-scale * I, Z]])


@dataclass(frozen=True)
class EvolutionSpec:
    """Interaction time ``tau = kappa * t`` and the matrix-exponential route."""

    tau: float
    method: str = "analytic"

    def __post_init__(self):
        if not math.isfinite(self.tau) or self.tau < 0:
            raise InvalidArgument(f"tau must be finite and >= 0, got {self.tau!r}")
        if self.method not in METHODS:
            raise InvalidArgument(f"method must be one of {METHODS}, got {self.method!r}")


@dataclass(frozen=True, eq=False)
class QuadratureForm:
    """Linear observable ``sum_j x_coeffs[j] X_j + p_coeffs[j] P_j``."""

    x_coeffs: np.ndarray
    p_coeffs: np.ndarray

    def __post_init__(self):
        x = np.array(self.x_coeffs, dtype=float).ravel()
        p = np.array(self.p_coeffs, dtype=float).ravel()
        if x.shape != p.shape:
            raise InvalidArgument("x_coeffs and p_coeffs must have the same length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
            raise InvalidArgument("coefficients must be finite")
        if not (np.any(x) or np.any(p)):
            raise InvalidArgument("a quadrature form needs at least one nonzero coefficient")
        x.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "x_coeffs", x)
        object.__setattr__(self, "p_coeffs", p)

    @property
    def n_modes(self) -> int:
        return self.x_coeffs.size

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.x_coeffs, self.p_coeffs])

    def vacuum_variance(self) -> float:
        return float(self.vector @ self.vector)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuadratureForm):
            return NotImplemented
        return np.array_equal(self.x_coeffs, other.x_coeffs) and np.array_equal(
            self.p_coeffs, other.p_coeffs
        )

    def __repr__(self) -> str:
        return f"QuadratureForm(x={self.x_coeffs.tolist()}, p={self.p_coeffs.tolist()})"


@dataclass(frozen=True)
class _SpectralCov:
    # cov_XX = V exp(2 tau L) V^T, cov_PP = V exp(-2 tau L) V^T
    spec: Spectrum
    tau: float

    def bilinear(self, c: np.ndarray, d: np.ndarray, sign: float) -> float:
        s = 2.0 * sign * self.tau
        if self.spec.uniform is not None:
            alpha, beta = self.spec.uniform
            n = c.size
            along = c.sum() * d.sum() / n
            # residual projection, not c@d - along: no cancellation when c is nearly uniform
            across = (c - c.mean()) @ (d - d.mean())
            return float(math.exp(s * (alpha * n + beta)) * along + math.exp(s * beta) * across)
        V = self.spec.eigenvectors
        return float(np.sum((V.T @ c) * (V.T @ d) * np.exp(s * self.spec.eigenvalues)))


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Zero-mean Gaussian state of ``n_modes`` modes.

    ``cov`` is the symmetrised quadrature covariance in ``(X.., P..)`` block
    order with vacuum equal to the identity. States produced by
    :func:`evolve_vacuum` with the analytic method also keep the spectral data
    they were built from, which :func:`covariance` uses to evaluate quadratic
    forms without cancellation between exponentially large entries.
    """

    cov: np.ndarray
    mean: Optional[np.ndarray] = None
    _spectral: Optional[_SpectralCov] = field(default=None, repr=False)

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2 or cov.shape[0] == 0:
            raise InvalidArgument(f"cov must be 2N x 2N with N >= 1, got shape {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise InvalidArgument("cov must be finite")
        if not np.allclose(cov, cov.T, rtol=1e-12, atol=0.0):
            raise InvalidArgument("cov must be symmetric")
        cov = 0.5 * (cov + cov.T)
        cov.setflags(write=False)
        mean = np.zeros(cov.shape[0]) if self.mean is None else np.array(self.mean, dtype=float)
        if mean.shape != (cov.shape[0],):
            raise InvalidArgument("mean must have length 2N")
        if np.any(mean):
            raise InvalidArgument("only zero-mean states are supported")
        mean.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    @classmethod
    def vacuum(cls, n: int) -> "GaussianState":
        if n < 1:
            raise InvalidArgument("vacuum needs at least one mode")
        return cls(np.eye(2 * n))

    @classmethod
    def squeezed_product(cls, r) -> "GaussianState":
        """Independent single-mode squeezed vacua: ``Var X_j = e^{2 r_j}``, ``Var P_j = e^{-2 r_j}``."""
        r = np.asarray(r, dtype=float).ravel()
        return cls(np.diag(np.concatenate([np.exp(2 * r), np.exp(-2 * r)])))

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Williamson spectrum, in vacuum units (all ones for a pure state)."""
        n = self.n_modes
        w = np.linalg.eigvals(1j * symplectic_form(n, 1.0) @ self.cov)
        return np.sort(np.abs(w.real))[::2]

    def uncertainty_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of ``cov + i*Omega`` (unit symplectic form); all >= 0 if physical."""
        return np.linalg.eigvalsh(self.cov + 1j * symplectic_form(self.n_modes, 1.0))

    def validate(self, rtol: float = 1e-9) -> None:
        """Check positivity and the uncertainty relation.

        The tolerance is scaled by the covariance norm: a squeezed covariance with
        norm ``s`` only resolves eigenvalues down to about ``s * eps``.

        Raises:
            InvalidArgument: if the state is unphysical.
        """
        tol = rtol * max(1.0, float(np.linalg.norm(self.cov, 2)))
        if np.min(np.linalg.eigvalsh(self.cov)) <= -tol:
            raise InvalidArgument("cov is not positive definite")
        if np.min(self.uncertainty_eigenvalues()) < -tol:
            raise InvalidArgument("cov violates the uncertainty relation")

    def to_dict(self) -> dict:
        return {"n": self.n_modes, "cov": self.cov.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianState":
        try:
            n = int(data["n"])
            cov = np.asarray(data["cov"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"state object needs 'n' and 'cov': {exc}") from exc
        state = cls(cov)
        if state.n_modes != n:
            raise InvalidArgument(f"'n'={n} does not match cov of size {cov.shape}")
        return state

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "GaussianState":
        return cls.from_dict(json.loads(text))


def sym_exp(g: InteractionGraph, t: float, method: str = "analytic") -> np.ndarray:
    """``exp(t * A)`` for the graph's symmetric weight matrix ``A``.

    The analytic route uses ``exp(t(aJ + bI)) = e^{tb} (I + expm1(t a n)/n J)``
    for uniform matrices and the symmetric eigendecomposition otherwise; the
    dense route is Pade scaling-and-squaring.
    """
    if method == "dense":
        return expm(t * g.weights)
    return _sym_exp_from_spectrum(spectrum(g), t)


def _sym_exp_from_spectrum(spec: Spectrum, t: float) -> np.ndarray:
    n = spec.eigenvectors.shape[0]
    if spec.uniform is not None:
        alpha, beta = spec.uniform
        out = np.full((n, n), math.expm1(t * alpha * n) / n)
        out[np.diag_indices(n)] += 1.0
        return math.exp(t * beta) * out
    V = spec.eigenvectors
    out = (V * np.exp(t * spec.eigenvalues)) @ V.T
    return 0.5 * (out + out.T)


def symplectic_map(g: InteractionGraph, spec: EvolutionSpec) -> np.ndarray:
    """Heisenberg map ``S = diag(exp(tau A), exp(-tau A))`` on ``(X.., P..)``."""
    n = g.n_modes
    S = np.zeros((2 * n, 2 * n))
    S[:n, :n] = sym_exp(g, spec.tau, spec.method)
    S[n:, n:] = sym_exp(g, -spec.tau, spec.method)
    return S


def evolve_vacuum(g: InteractionGraph, spec: EvolutionSpec) -> GaussianState:
    """Vacuum evolved for ``spec.tau``: ``cov_XX = exp(2 tau A)``, ``cov_PP = exp(-2 tau A)``."""
    n = g.n_modes
    cov = np.zeros((2 * n, 2 * n))
    if spec.method == "dense":
        cov[:n, :n] = expm(2 * spec.tau * g.weights)
        cov[n:, n:] = expm(-2 * spec.tau * g.weights)
        return GaussianState(0.5 * (cov + cov.T))
    eig = spectrum(g)
    cov[:n, :n] = _sym_exp_from_spectrum(eig, 2 * spec.tau)
    cov[n:, n:] = _sym_exp_from_spectrum(eig, -2 * spec.tau)
    return GaussianState(cov, _spectral=_SpectralCov(eig, spec.tau))


def evolve(state: GaussianState, g: InteractionGraph, spec: EvolutionSpec) -> GaussianState:
    """Apply the graph's Heisenberg map to an arbitrary state: ``S cov S^T``."""
    if state.n_modes != g.n_modes:
        raise InvalidArgument(f"state has {state.n_modes} modes, graph has {g.n_modes}")
    S = symplectic_map(g, spec)
    return GaussianState(S @ state.cov @ S.T)


def _check_form(state: GaussianState, f: QuadratureForm) -> None:
    if f.n_modes != state.n_modes:
        raise InvalidArgument(f"form has {f.n_modes} modes, state has {state.n_modes}")


def covariance(state: GaussianState, f: QuadratureForm, h: QuadratureForm) -> float:
    """Symmetrised covariance of two quadrature forms on ``state``."""
    _check_form(state, f)
    _check_form(state, h)
    sp = state._spectral
    if sp is not None:
        value = sp.bilinear(f.x_coeffs, h.x_coeffs, +1.0) + sp.bilinear(f.p_coeffs, h.p_coeffs, -1.0)
    else:
        value = float(f.vector @ state.cov @ h.vector)
    if not math.isfinite(value):
        raise ComputationError(f"non-finite covariance for {f!r}")
    return value


def variance(state: GaussianState, f: QuadratureForm) -> float:
    """``c^T cov c`` for the form's coefficient vector ``c``.

    Raises:
        InvalidArgument: on a mode-count mismatch.
        ComputationError: if the result is not strictly positive, which only
            happens when squeezing exceeds floating-point resolution.
    """
    value = covariance(state, f, f)
    if not value > 0:
        raise ComputationError(f"variance {value!r} of {f!r} is not positive")
    return value


def squeezing_db(state: GaussianState, f: QuadratureForm) -> float:
    """Variance relative to vacuum in dB; negative values are squeezed."""
    return 10.0 * math.log10(variance(state, f) / f.vacuum_variance())


def limit_variance(g: InteractionGraph, f: QuadratureForm, rtol: float = 1e-10) -> float:
    """Variance of ``f`` on the evolved vacuum as ``tau -> infinity``.

    Each eigencomponent of the X part grows like ``exp(2 tau lambda)`` and each
    component of the P part like ``exp(-2 tau lambda)``; decaying components
    drop out, zero modes are kept, and any surviving growing component makes
    the limit infinite.
    """
    if f.n_modes != g.n_modes:
        raise InvalidArgument(f"form has {f.n_modes} modes, graph has {g.n_modes}")
    eig = spectrum(g)
    lam_tol = rtol * max(1.0, float(np.max(np.abs(eig.eigenvalues))))
    coeff_tol = rtol * f.vacuum_variance()
    if eig.uniform is not None:
        alpha, beta = eig.uniform
        n = g.n_modes
        lams = np.array([alpha * n + beta, beta])

        def weights(c):
            r = c - c.mean()
            return np.array([c.sum() ** 2 / n, r @ r])

    else:
        lams = eig.eigenvalues
        V = eig.eigenvectors

        def weights(c):
            return (V.T @ c) ** 2

    total = 0.0
    for c, sign in ((f.x_coeffs, 1.0), (f.p_coeffs, -1.0)):
        wts = weights(c)
        rate = sign * lams
        significant = wts > coeff_tol
        if np.any(significant & (rate > lam_tol)):
            return math.inf
        total += float(np.sum(wts[significant & (np.abs(rate) <= lam_tol)]))
    return total
