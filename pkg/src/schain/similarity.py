"""Composite similarity as exact linear forms in the weight vectors.

``S(lambda, omega) = alpha * sum_j omega_j a_j + (1 - alpha) * sum_p lambda_p s_p``

where ``s_p`` are PathSim matrices and ``a_j`` per-attribute similarity
matrices. Every entry of ``S``, ``W o S`` and the degree vector is linear in
the stacked weights ``theta = (lambda, omega)``; the model keeps the
coefficient matrices so the fractional program can be assembled exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, DimensionMismatch, InfeasibleWeights
from .hin import ConstraintSet, constraint_pairs
from .metapath import Tssn

DEGREE_FLOOR = 1e-12
FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class LinearForm:
    lambda_coeffs: np.ndarray
    omega_coeffs: np.ndarray
    constant: float = 0.0

    def __call__(self, lam, omega) -> float:
        return float(
            self.constant
            + np.dot(self.lambda_coeffs, np.asarray(lam, dtype=float))
            + np.dot(self.omega_coeffs, np.asarray(omega, dtype=float))
        )


def attribute_components(attrs: np.ndarray) -> list[np.ndarray]:
    """One similarity matrix per attribute column.

    ``a_j(u, v) = 1 - |x_uj - x_vj| / range_j``; a constant column gives
    the all-ones matrix.
    """
    attrs = np.asarray(attrs, dtype=np.float64)
    if attrs.ndim != 2:
        raise DimensionMismatch("attribute table must be two-dimensional")
    out = []
    for col in attrs.T:
        span = float(col.max() - col.min()) if col.size else 0.0
        if span == 0.0:
            a = np.ones((col.size, col.size))
        else:
            x = (col - col.min()) / span
            a = 1.0 - np.abs(x[:, None] - x[None, :])
        a.setflags(write=False)
        out.append(a)
    return out


def constraint_matrix(cs: ConstraintSet, n: int) -> np.ndarray:
    """+1 on must-link pairs, -1 on cannot-link pairs, 0 elsewhere."""
    W = np.zeros((n, n))
    for u, v, sign in constraint_pairs(cs):
        if u >= n or v >= n:
            raise DimensionMismatch(f"constraint pair ({u}, {v}) outside 0..{n - 1}")
        W[u, v] = W[v, u] = sign
    W.setflags(write=False)
    return W


@dataclass(frozen=True, eq=False)
class LinearSimModel:
    """Immutable coefficient representation of ``S``, ``W o S`` and ``D``.

    ``coeffs[c]`` is the coefficient matrix of ``theta[c]`` in ``S``, with
    the first ``num_metapaths`` slots for meta-paths and the rest for
    attributes (the mixing weight ``alpha`` is folded in).
    """

    coeffs: np.ndarray  # (m, n, n)
    W: np.ndarray  # (n, n)
    alpha: float
    gamma: float
    num_metapaths: int
    num_attrs: int
    delta: float = DEGREE_FLOOR

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    @property
    def num_weights(self) -> int:
        return self.num_metapaths + self.num_attrs

    def split(self, theta) -> tuple[np.ndarray, np.ndarray]:
        theta = np.asarray(theta, dtype=np.float64)
        return theta[: self.num_metapaths], theta[self.num_metapaths :]

    def join(self, lam, omega) -> np.ndarray:
        lam = np.asarray(lam, dtype=np.float64).reshape(-1)
        omega = np.asarray(omega, dtype=np.float64).reshape(-1)
        if lam.size != self.num_metapaths or omega.size != self.num_attrs:
            raise DimensionMismatch(
                f"expected {self.num_metapaths} meta-path and {self.num_attrs} attribute "
                f"weights, got {lam.size} and {omega.size}"
            )
        return np.concatenate([lam, omega])

    def uniform_weights(self) -> np.ndarray:
        p, q = self.num_metapaths, self.num_attrs
        return np.concatenate([np.full(p, 1.0 / p) if p else [], np.full(q, 1.0 / q) if q else []])

    def entry(self, u: int, v: int) -> LinearForm:
        col = self.coeffs[:, u, v]
        return LinearForm(col[: self.num_metapaths].copy(), col[self.num_metapaths :].copy(), 0.0)

    def degree_form(self, u: int) -> LinearForm:
        col = self.coeffs[:, u, :].sum(axis=1)
        return LinearForm(col[: self.num_metapaths], col[self.num_metapaths :], self.delta)

    def similarity(self, theta) -> np.ndarray:
        return np.tensordot(np.asarray(theta, dtype=np.float64), self.coeffs, axes=1)


def assemble(
    pathsims: Sequence[Tssn | np.ndarray],
    attr_components: Sequence[np.ndarray],
    W: np.ndarray | None = None,
    alpha: float = 0.5,
    gamma: float = 0.0,
) -> LinearSimModel:
    """Stack meta-path and attribute similarities into a :class:`LinearSimModel`.

    With no attributes the mixture uses ``alpha = 0``; with no meta-paths
    ``alpha = 1``. Otherwise ``alpha`` is used as given.
    """
    paths = [np.asarray(s.weights if isinstance(s, Tssn) else s, dtype=np.float64) for s in pathsims]
    attrs = [np.asarray(a, dtype=np.float64) for a in attr_components]
    if not paths and not attrs:
        raise DataError("need at least one meta-path or one attribute")
    if not 0.0 <= alpha <= 1.0:
        raise DataError(f"alpha must lie in [0, 1], got {alpha}")
    if gamma < 0:
        raise DataError(f"gamma must be non-negative, got {gamma}")
    n = (paths or attrs)[0].shape[0]
    for mat in paths + attrs:
        if mat.shape != (n, n):
            raise DimensionMismatch(f"similarity matrix of shape {mat.shape}, expected {(n, n)}")
        if not np.allclose(mat, mat.T, atol=1e-12):
            raise DataError("similarity matrices must be symmetric")
    if W is None:
        W = np.zeros((n, n))
    W = np.asarray(W, dtype=np.float64)
    if W.shape != (n, n):
        raise DimensionMismatch(f"constraint matrix of shape {W.shape}, expected {(n, n)}")

    eff_alpha = alpha if (paths and attrs) else (1.0 if attrs else 0.0)
    coeffs = np.stack([(1.0 - eff_alpha) * s for s in paths] + [eff_alpha * a for a in attrs])
    coeffs.setflags(write=False)
    W = W.copy()
    W.setflags(write=False)
    return LinearSimModel(coeffs, W, float(eff_alpha), float(gamma), len(paths), len(attrs))


def check_feasible(model: LinearSimModel, theta) -> np.ndarray:
    """Validate stacked weights: each non-empty block non-negative and summing to one."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (model.num_weights,):
        raise DimensionMismatch(f"expected {model.num_weights} weights, got shape {theta.shape}")
    for name, block in zip(("lambda", "omega"), model.split(theta)):
        if block.size == 0:
            continue
        if np.any(block < -FEASIBILITY_TOL):
            raise InfeasibleWeights(f"{name} has negative entries: {block}")
        if abs(block.sum() - 1.0) > FEASIBILITY_TOL:
            raise InfeasibleWeights(f"{name} sums to {block.sum()!r}, not 1")
    return theta


def evaluate(model: LinearSimModel, lam, omega) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(S, W o S, d)`` where ``d`` is the diagonal of ``D``.

    ``d = rowsum(S) + delta`` keeps every degree positive while staying
    linear in the weights.
    """
    theta = check_feasible(model, model.join(lam, omega))
    S = model.similarity(theta)
    return S, model.W * S, S.sum(axis=1) + model.delta
