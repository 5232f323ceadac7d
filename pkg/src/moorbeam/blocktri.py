"""Block tri-diagonal Newton system and its solver.

The solve kernel has two interchangeable backends: a compiled extension
(built from _blocktri.pyx) and a pure-numpy fallback.  The compiled one is
preferred at import time; set MOORBEAM_PURE_PYTHON=1 to force the fallback.
"""

import os
from dataclasses import dataclass

import numpy as np

from . import _blocktri_py


class SingularBlockError(RuntimeError):
    """A diagonal pivot block is singular (rigid-body mode or bad BC)."""


_backend_errors = (_blocktri_py.SingularBlockError,)

if os.environ.get("MOORBEAM_PURE_PYTHON") == "1":
    _kernel = _blocktri_py
    BACKEND = "python"
else:
    try:
        from . import _blocktri as _kernel  # type: ignore[attr-defined]

        _backend_errors = (_blocktri_py.SingularBlockError, _kernel.SingularBlockError)
        BACKEND = "compiled"
    except ImportError:
        _kernel = _blocktri_py
        BACKEND = "python"


@dataclass
class BlockTriDiagSystem:
    """Per-cell 6x6 blocks (lower, diag, upper) and 6-vector right-hand sides.

    lower[0] and upper[-1] are unused and kept zero."""

    lower: np.ndarray  # (N, 6, 6)
    diag: np.ndarray   # (N, 6, 6)
    upper: np.ndarray  # (N, 6, 6)
    rhs: np.ndarray    # (N, 6)

    @property
    def n_blocks(self) -> int:
        return self.diag.shape[0]

    def to_dense(self):
        """Assembled dense matrix and flat rhs (oracle/debug use)."""
        n, m, _ = self.diag.shape
        a = np.zeros((n * m, n * m))
        for k in range(n):
            a[k * m:(k + 1) * m, k * m:(k + 1) * m] = self.diag[k]
            if k > 0:
                a[k * m:(k + 1) * m, (k - 1) * m:k * m] = self.lower[k]
            if k < n - 1:
                a[k * m:(k + 1) * m, (k + 1) * m:(k + 2) * m] = self.upper[k]
        return a, self.rhs.reshape(-1)


def solve_block_tridiagonal(system: BlockTriDiagSystem, backend: str | None = None) -> np.ndarray:
    """Solve the block system; returns per-cell solution vectors (N, 6).

    backend: None (module default), "compiled" or "python"."""
    if backend is None:
        kernel = _kernel
    elif backend == "python":
        kernel = _blocktri_py
    elif backend == "compiled":
        if BACKEND != "compiled":
            raise RuntimeError("compiled kernel not available")
        kernel = _kernel
    else:
        raise ValueError(f"unknown backend {backend!r}")
    lower = np.ascontiguousarray(system.lower)
    diag = np.ascontiguousarray(system.diag)
    upper = np.ascontiguousarray(system.upper)
    rhs = np.ascontiguousarray(system.rhs)
    try:
        return np.asarray(kernel.solve(lower, diag, upper, rhs))
    except _backend_errors as exc:
        raise SingularBlockError(str(exc)) from exc
