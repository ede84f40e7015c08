"""Outer alternation between the spectral step and the weight step."""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError, TooFewObjects, WeightStepError
from .fractional import DinkelbachTrace, build_fractional_objective, dinkelbach
from .hin import ConstraintSet, Hin, MetaPath
from .metapath import tssn
from .similarity import (
    LinearSimModel,
    assemble,
    attribute_components,
    constraint_matrix,
    evaluate,
)
from .spectral import ClusterIndicators, spectral_step

log = logging.getLogger(__name__)

MONOTONICITY_TOL = 1e-9
FIXED_POINT_TOL = 1e-9


@dataclass(frozen=True)
class SchainConfig:
    k: int
    alpha: float = 0.5
    gamma: float = 0.0
    epsilon: float = 1e-4
    max_iter: int = 20
    seed: int = 0
    tol_f: float = 1e-6
    max_dinkelbach: int = 50
    kmeans_restarts: int = 10

    def __post_init__(self):
        if int(self.k) < 2:
            raise DataError(f"k must be at least 2, got {self.k}")
        if not self.epsilon > 0:
            raise DataError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_iter) < 1:
            raise DataError(f"max_iter must be at least 1, got {self.max_iter}")
        if not 0.0 <= self.alpha <= 1.0:
            raise DataError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.gamma < 0:
            raise DataError(f"gamma must be non-negative, got {self.gamma}")
        if not self.tol_f > 0 or int(self.max_dinkelbach) < 1 or int(self.kmeans_restarts) < 1:
            raise DataError("tol_f, max_dinkelbach and kmeans_restarts must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class ClusteringResult:
    labels: np.ndarray
    clusters: list[list[str]]
    lambda_: np.ndarray
    omega: np.ndarray
    J_history: list[float] = field(default_factory=list)
    dinkelbach_traces: list[DinkelbachTrace] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    # (J before, J after) of every weight step
    weight_steps: list[tuple[float, float]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "clusters": self.clusters,
            "lambda": [float(x) for x in self.lambda_],
            "omega": [float(x) for x in self.omega],
            "J_history": [float(x) for x in self.J_history],
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "mu_traces": [list(map(float, t.mus)) for t in self.dinkelbach_traces],
            "F_traces": [list(map(float, t.F_values)) for t in self.dinkelbach_traces],
        }


def penalty(model: LinearSimModel, z: ClusterIndicators, lam, omega) -> float:
    """``sum_r (z'Dz - z'(S + W o S)z) / z'Dz + gamma (|lambda|^2 + |omega|^2)``."""
    S, WS, d = evaluate(model, lam, omega)
    A = S + WS
    total = 0.0
    for r in range(z.k):
        members = np.flatnonzero(z.labels == r)
        vol = float(d[members].sum())
        within = float(A[np.ix_(members, members)].sum())
        total += (vol - within) / vol
    lam = np.asarray(lam, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return total + model.gamma * (float(lam @ lam) + float(omega @ omega))


def schain_fit(model: LinearSimModel, config: SchainConfig, ids: Sequence[str] | None = None) -> ClusteringResult:
    """Run the alternation on an assembled model."""
    k = int(config.k)
    if model.n < k:
        raise TooFewObjects(f"{model.n} target objects cannot form {k} clusters")
    ids = list(ids) if ids is not None else [str(i) for i in range(model.n)]

    theta = model.uniform_weights()
    history: list[float] = []
    traces: list[DinkelbachTrace] = []
    steps: list[tuple[float, float]] = []
    prev_labels = None
    converged = False
    z = None
    t = 0
    for t in range(int(config.max_iter)):
        lam, omega = model.split(theta)
        S, WS, d = evaluate(model, lam, omega)
        z, _ = spectral_step(S, WS, d, k, seed=config.seed + t, restarts=config.kmeans_restarts)

        J_before = penalty(model, z, lam, omega)
        fp = build_fractional_objective(model, z)
        new_lam, new_omega, trace = dinkelbach(
            fp, start=theta, tol_rel=config.tol_f, max_iter=config.max_dinkelbach, seed=config.seed + t
        )
        J_after = penalty(model, z, new_lam, new_omega)
        if J_after > J_before + MONOTONICITY_TOL:
            raise WeightStepError(f"weight step increased J from {J_before!r} to {J_after!r}")
        if not trace.converged:
            log.warning("Dinkelbach stopped after %d iterations without reaching F = 0", trace.iterations)

        delta = abs(J_after - (history[-1] if history else J_before))
        new_theta = model.join(new_lam, new_omega)
        fixed = (
            prev_labels is not None
            and np.array_equal(prev_labels, z.labels)
            and float(np.max(np.abs(new_theta - theta), initial=0.0)) < FIXED_POINT_TOL
        )
        history.append(J_after)
        traces.append(trace)
        steps.append((J_before, J_after))
        log.info("iteration %d: J=%.10g dJ=%.3g lambda=%s omega=%s", t + 1, J_after, delta, new_lam, new_omega)
        theta, prev_labels = new_theta, z.labels
        if delta <= config.epsilon or fixed:
            converged = True
            break

    lam, omega = model.split(theta)
    clusters = [[ids[i] for i in np.flatnonzero(z.labels == r)] for r in range(k)]
    return ClusteringResult(
        labels=z.labels,
        clusters=clusters,
        lambda_=lam.copy(),
        omega=omega.copy(),
        J_history=history,
        dinkelbach_traces=traces,
        iterations=t + 1,
        converged=converged,
        weight_steps=steps,
    )


def resolve_threads(threads: int | None = None) -> int:
    """Worker count from the argument or ``SCHAIN_THREADS`` (0 or unset means auto)."""
    if threads is None:
        try:
            threads = int(os.environ.get("SCHAIN_THREADS", "0"))
        except ValueError:
            threads = 0
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def build_model(
    hin: Hin,
    metapaths: Sequence[MetaPath],
    constraints: ConstraintSet | None,
    target_type: str,
    alpha: float = 0.5,
    gamma: float = 0.0,
    threads: int | None = None,
) -> LinearSimModel:
    """TSSNs, attribute similarities and constraint matrix for ``target_type``."""
    hin.index(target_type)
    workers = min(resolve_threads(threads), max(1, len(metapaths)))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            tssns = list(pool.map(lambda p: tssn(hin, p, target_type), metapaths))
    else:
        tssns = [tssn(hin, p, target_type) for p in metapaths]
    attrs = hin.attributes.get(target_type)
    comps = attribute_components(attrs) if attrs is not None and attrs.shape[1] else []
    n = hin.n(target_type)
    W = constraint_matrix(constraints or ConstraintSet(), n)
    return assemble(tssns, comps, W, alpha=alpha, gamma=gamma)


def schain_run(
    hin: Hin,
    metapaths: Sequence[MetaPath],
    constraints: ConstraintSet | None,
    target_type: str,
    config: SchainConfig,
    threads: int | None = None,
) -> ClusteringResult:
    n = hin.n(target_type)
    if n < config.k:
        raise TooFewObjects(f"target type {target_type!r} has {n} objects, fewer than k={config.k}")
    model = build_model(hin, metapaths, constraints, target_type, config.alpha, config.gamma, threads)
    return schain_fit(model, config, ids=hin.objects[target_type])
