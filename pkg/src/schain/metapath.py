"""Meta-path instance counts, PathSim and type-specific sub-networks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import AsymmetricPath, CountOverflow, TargetTypeMismatch
from .hin import Hin, MetaPath

# float shadow of the integer product; anything near this is an int64 overflow risk
_OVERFLOW_GUARD = float(2**62)


@dataclass(frozen=True)
class CountMatrix:
    values: np.ndarray  # (n, n) int64
    metapath: MetaPath


@dataclass(frozen=True)
class Tssn:
    """PathSim-weighted homogeneous network over the meta-path's end type."""

    weights: np.ndarray  # (n, n) float64 in [0, 1]
    metapath: MetaPath

    def edges(self):
        """``(u, v, weight)`` for ``u < v`` with positive weight, row-major."""
        iu, iv = np.nonzero(np.triu(self.weights, 1) > 0)
        return [(int(u), int(v), float(self.weights[u, v])) for u, v in zip(iu, iv)]


def commuting_matrix(
    hin: Hin, path: MetaPath, target_type: str | None = None, order: str = "left"
) -> CountMatrix:
    """Count path instances between every pair of end-type objects.

    Entry ``(u, v)`` is the product of incidence matrices along the type
    sequence. ``order`` picks left-to-right or right-to-left association;
    both give identical counts.
    """
    seq = path.type_sequence
    if target_type is not None and (seq[0] != target_type or seq[-1] != target_type):
        raise TargetTypeMismatch(f"meta-path {path} does not start and end at {target_type!r}")
    if seq[0] != seq[-1]:
        raise AsymmetricPath(f"meta-path {path} has different end types")

    mats = [hin.incidence(a, b) for a, b in zip(seq, seq[1:])]
    if order == "left":
        counts, shadow = mats[0], mats[0].astype(np.float64)
        for m in mats[1:]:
            counts = counts @ m
            shadow = shadow @ m.astype(np.float64)
            _check_overflow(shadow, path)
    elif order == "right":
        counts, shadow = mats[-1], mats[-1].astype(np.float64)
        for m in reversed(mats[:-1]):
            counts = m @ counts
            shadow = m.astype(np.float64) @ shadow
            _check_overflow(shadow, path)
    else:
        raise ValueError(f"order must be 'left' or 'right', not {order!r}")

    dense = np.asarray(sp.csr_matrix(counts).toarray(), dtype=np.int64)
    dense.setflags(write=False)
    return CountMatrix(dense, path)


def _check_overflow(shadow, path):
    if shadow.nnz and float(abs(shadow).max()) >= _OVERFLOW_GUARD:
        raise CountOverflow(f"instance counts for meta-path {path} overflow 64-bit integers")


def pathsim_matrix(counts: CountMatrix) -> Tssn:
    """s(u, v) = 2 c(u, v) / (c(u, u) + c(v, v)), zero when the denominator is zero."""
    c = counts.values.astype(np.float64)
    diag = np.diag(c)
    denom = diag[:, None] + diag[None, :]
    s = np.divide(2.0 * c, denom, out=np.zeros_like(c), where=denom > 0)
    s.setflags(write=False)
    return Tssn(s, counts.metapath)


def tssn(hin: Hin, path: MetaPath, target_type: str | None = None) -> Tssn:
    return pathsim_matrix(commuting_matrix(hin, path, target_type))
