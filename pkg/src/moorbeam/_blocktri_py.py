"""Pure-numpy block Thomas solver, the fallback when the compiled kernel is
unavailable (or disabled via MOORBEAM_PURE_PYTHON=1)."""

import numpy as np


class SingularBlockError(np.linalg.LinAlgError):
    pass


def solve(lower, diag, upper, rhs):
    """Solve the block tri-diagonal system by forward elimination and back
    substitution.  lower/diag/upper are (N, m, m), rhs is (N, m); lower[0]
    and upper[N-1] are ignored.  Returns (N, m)."""
    n, m, _ = diag.shape
    c = np.empty((n, m, m))
    d = np.empty((n, m))
    pivot = diag[0]
    _check(pivot, 0)
    aug = np.concatenate([upper[0], rhs[0][:, None]], axis=1) if n > 1 else rhs[0][:, None]
    sol = _solve_block(pivot, aug, 0)
    if n > 1:
        c[0] = sol[:, :m]
    d[0] = sol[:, -1]
    for k in range(1, n):
        pivot = diag[k] - lower[k] @ c[k - 1]
        b = rhs[k] - lower[k] @ d[k - 1]
        if k < n - 1:
            aug = np.concatenate([upper[k], b[:, None]], axis=1)
            sol = _solve_block(pivot, aug, k)
            c[k] = sol[:, :m]
            d[k] = sol[:, -1]
        else:
            d[k] = _solve_block(pivot, b[:, None], k)[:, 0]
    x = np.empty((n, m))
    x[n - 1] = d[n - 1]
    for k in range(n - 2, -1, -1):
        x[k] = d[k] - c[k] @ x[k + 1]
    return x


def _check(block, k):
    if not np.all(np.isfinite(block)):
        raise SingularBlockError(f"non-finite diagonal block at cell {k}")


def _solve_block(pivot, rhs, k):
    _check(pivot, k)
    try:
        sol = np.linalg.solve(pivot, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularBlockError(f"singular diagonal block at cell {k}") from exc
    if not np.all(np.isfinite(sol)):
        raise SingularBlockError(f"singular diagonal block at cell {k}")
    return sol
