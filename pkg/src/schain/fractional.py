"""Weight learning for fixed clusters by Dinkelbach's method.

For fixed indicators the regularized objective is a ratio ``f / g`` of two
polynomials in ``theta = (lambda, omega)``. Dinkelbach's iteration solves
``F(mu) = max f - mu g`` repeatedly with ``mu <- f / g`` until ``F`` reaches
zero. The inner problem is handled by multi-start projected gradient ascent
on the product of the two probability simplices.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DataError, DinkelbachInvariantError
from .similarity import LinearSimModel
from .spectral import ClusterIndicators

log = logging.getLogger(__name__)


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = 1}`` (sort-based)."""
    y = np.asarray(y, dtype=np.float64)
    if y.size == 0:
        return y.copy()
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, y.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    tau = css[rho] / (rho + 1.0)
    return np.maximum(y - tau, 0.0)


@dataclass(frozen=True, eq=False)
class FracProgram:
    """``f / g`` with ``g = prod_r Q_r`` and
    ``f = sum_r N_r prod_{s != r} Q_s + (shift - gamma |theta|^2) g``.

    ``N_r = Nc[r] . theta`` and ``Q_r = q0[r] + Qc[r] . theta`` are the
    per-cluster within-affinity and volume. Rows may be rescaled by a
    positive constant per cluster; that leaves ``f / g`` unchanged.
    """

    Nc: np.ndarray  # (k, m)
    Qc: np.ndarray  # (k, m)
    q0: np.ndarray  # (k,)
    shift: float
    gamma: float
    num_metapaths: int
    num_attrs: int

    @property
    def k(self) -> int:
        return self.Qc.shape[0]

    @property
    def num_weights(self) -> int:
        return self.num_metapaths + self.num_attrs

    def uniform(self) -> np.ndarray:
        p, q = self.num_metapaths, self.num_attrs
        return np.concatenate([np.full(p, 1.0 / p) if p else [], np.full(q, 1.0 / q) if q else []])

    def project(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=np.float64)
        p = self.num_metapaths
        return np.concatenate([project_simplex(theta[:p]), project_simplex(theta[p:])])

    def evaluate(self, theta):
        """``(f, g, grad_f, grad_g)`` at ``theta``."""
        return kernels.frac_eval(self.Nc, self.Qc, self.q0, theta, self.shift, self.gamma)

    def f(self, theta) -> float:
        return self.evaluate(theta)[0]

    def g(self, theta) -> float:
        return self.evaluate(theta)[1]

    def ratio(self, theta) -> float:
        f, g, _, _ = self.evaluate(theta)
        return f / g

    def volumes(self, theta) -> np.ndarray:
        return self.q0 + self.Qc @ np.asarray(theta, dtype=np.float64)

    def within(self, theta) -> np.ndarray:
        return self.Nc @ np.asarray(theta, dtype=np.float64)


def build_fractional_objective(
    model: LinearSimModel,
    z: ClusterIndicators,
    shift: float | None = None,
    normalize: bool = True,
) -> FracProgram:
    """Assemble the fractional program for fixed cluster indicators.

    ``shift`` defaults to ``2 * gamma + 1``, which makes ``f`` positive on
    the feasible set. With ``normalize`` each cluster's linear forms are
    divided by its volume at uniform weights so that ``g`` is of order one.
    """
    if z.n != model.n:
        raise DataError(f"partition covers {z.n} objects, model has {model.n}")
    if shift is None:
        shift = 2.0 * model.gamma + 1.0
    Z = z.z
    m = model.num_weights
    Nc = np.empty((z.k, m))
    Qc = np.empty((z.k, m))
    mod = 1.0 + model.W
    for c in range(m):
        C = model.coeffs[c]
        Nc[:, c] = np.einsum("rn,rn->r", Z @ (C * mod), Z)
        Qc[:, c] = Z @ C.sum(axis=1)
    q0 = Z.sum(axis=1) * model.delta
    if normalize:
        scale = q0 + Qc @ model.uniform_weights()
        Nc /= scale[:, None]
        Qc /= scale[:, None]
        q0 = q0 / scale
    if np.any(q0 <= 0):
        raise DataError("cluster volume is not positive")
    return FracProgram(
        np.ascontiguousarray(Nc),
        np.ascontiguousarray(Qc),
        np.ascontiguousarray(q0),
        float(shift),
        float(model.gamma),
        model.num_metapaths,
        model.num_attrs,
    )


@dataclass
class NppResult:
    theta: np.ndarray
    F: float
    converged: bool
    iterations: int


ARMIJO_BETA = 0.5
ARMIJO_C = 1e-4
PG_TOL = 1e-8
MAX_INNER = 500


def _ascend(fp: FracProgram, mu: float, theta0, max_iter=MAX_INNER, tol=PG_TOL) -> NppResult:
    theta = fp.project(theta0)
    f, g, gf, gg = fp.evaluate(theta)
    h = f - mu * g
    grad = gf - mu * gg
    step = 1.0
    for it in range(max_iter):
        if np.linalg.norm(fp.project(theta + grad) - theta) <= tol:
            return NppResult(theta, h, True, it)
        t = step
        while True:
            cand = fp.project(theta + t * grad)
            d = cand - theta
            fc, gc, gfc, ggc = fp.evaluate(cand)
            hc = fc - mu * gc
            if hc >= h + ARMIJO_C * float(grad @ d) and hc >= h:
                break
            t *= ARMIJO_BETA
            if t < 1e-20:
                # no ascent direction left at working precision
                return NppResult(theta, h, True, it)
        if not np.any(d):
            return NppResult(theta, h, True, it)
        new_grad = gfc - mu * ggc
        # Barzilai-Borwein trial step for the next line search
        y = grad - new_grad
        sy = float(d @ y)
        step = float(d @ d) / sy if sy > 1e-300 else min(t * 4.0, 1e6)
        step = min(max(step, 1e-10), 1e6)
        theta, h, grad = cand, hc, new_grad
    pg = np.linalg.norm(fp.project(theta + grad) - theta)
    return NppResult(theta, h, pg <= tol, max_iter)


def npp_solve(
    fp: FracProgram,
    mu: float,
    start=None,
    extra_starts=(),
    n_random: int = 2,
    seed: int = 0,
) -> NppResult:
    """Approximate ``F(mu) = max f - mu g`` over the feasible weights.

    Starts from the uniform weights, ``start``, any ``extra_starts`` and
    ``n_random`` seeded Dirichlet draws; the best local maximum wins. The
    ``converged`` flag is False if the winning run hit the iteration cap.
    """
    if mu < 0:
        raise DataError("mu must be non-negative")
    starts = [fp.uniform()]
    for s in ([start] if start is not None else []) + list(extra_starts):
        starts.append(np.asarray(s, dtype=np.float64))
    rng = np.random.default_rng(seed)
    p, q = fp.num_metapaths, fp.num_attrs
    for _ in range(n_random):
        starts.append(np.concatenate([rng.dirichlet(np.ones(p)) if p else [], rng.dirichlet(np.ones(q)) if q else []]))
    best = None
    seen = []
    for s in starts:
        if any(np.array_equal(s, o) for o in seen):
            continue
        seen.append(s)
        res = _ascend(fp, mu, s)
        if best is None or res.F > best.F:
            best = res
    if not best.converged:
        log.warning("inner NPP solver hit %d iterations at mu=%g; using best iterate", MAX_INNER, mu)
    return best


@dataclass
class DinkelbachTrace:
    mus: list = field(default_factory=list)
    F_values: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    final_lambda: np.ndarray | None = None
    final_omega: np.ndarray | None = None
    ratio: float = float("nan")
    tol: float = 0.0
    inner_warnings: int = 0


def dinkelbach(
    fp: FracProgram,
    start=None,
    tol_rel: float = 1e-6,
    max_iter: int = 50,
    seed: int = 0,
    n_random: int = 2,
) -> tuple[np.ndarray, np.ndarray, DinkelbachTrace]:
    """Maximize ``f / g`` from ``mu_1 = 0`` with ``mu_{i+1} = f / g`` at the NPP solution.

    Stops once ``F(mu_i) <= tol_rel * |f(uniform)|``. The returned weights
    are the best ratio among all iterates and ``start``.
    """
    uniform = fp.uniform()
    tol = tol_rel * abs(fp.f(uniform))
    trace = DinkelbachTrace(tol=tol)
    extra = [] if start is None else [np.asarray(start, dtype=np.float64)]
    candidates = [uniform] + extra
    mu, prev = 0.0, None
    for i in range(max_iter):
        res = npp_solve(fp, mu, start=prev, extra_starts=extra, n_random=n_random, seed=seed)
        trace.inner_warnings += int(not res.converged)
        trace.mus.append(float(mu))
        trace.F_values.append(float(res.F))
        trace.iterations = i + 1
        candidates.append(res.theta)
        if res.F < -tol:
            raise DinkelbachInvariantError(f"F(mu_{i + 1}) = {res.F:g} is negative")
        if i > 0 and trace.F_values[-2] > tol and not res.F < trace.F_values[-2]:
            raise DinkelbachInvariantError(
                f"F did not decrease: F(mu_{i}) = {trace.F_values[-2]!r}, F(mu_{i + 1}) = {res.F!r}"
            )
        if res.F <= tol:
            trace.converged = True
            break
        mu_next = fp.ratio(res.theta)
        if not mu_next > mu:
            raise DinkelbachInvariantError(f"mu did not increase: {mu!r} -> {mu_next!r}")
        mu, prev = mu_next, res.theta

    ratios = [fp.ratio(c) for c in candidates]
    theta = candidates[int(np.argmax(ratios))]
    lam, omega = theta[: fp.num_metapaths].copy(), theta[fp.num_metapaths :].copy()
    trace.final_lambda, trace.final_omega = lam, omega
    trace.ratio = float(max(ratios))
    return lam, omega, trace
