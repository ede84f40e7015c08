"""Backend selection for the hot kernels.

The compiled extension ``schain._kernels_cy`` is used when it was built and
imports cleanly; otherwise the numpy implementations in
``schain._kernels_py`` are used. Setting ``SCHAIN_PURE_PYTHON=1`` forces the
fallback.
"""
from __future__ import annotations

import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)

BACKENDS = {"python": _kernels_py}

try:
    from . import _kernels_cy
except ImportError:  # extension not built
    _kernels_cy = None
else:
    BACKENDS["cython"] = _kernels_cy

if os.environ.get("SCHAIN_PURE_PYTHON", "") not in ("", "0") or _kernels_cy is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_impl = BACKENDS[BACKEND]
log.debug("schain kernels backend: %s", BACKEND)

frac_eval = _impl.frac_eval
assign_labels = _impl.assign_labels
cluster_edge_stats = _impl.cluster_edge_stats
intra_component_counts = _impl.intra_component_counts
