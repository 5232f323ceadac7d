import numpy as np
import pytest

from moorbeam.blocktri import (
    BACKEND,
    BlockTriDiagSystem,
    SingularBlockError,
    solve_block_tridiagonal,
)

BACKENDS = ["python"] + (["compiled"] if BACKEND == "compiled" else [])


def random_system(n, rng, m=6, dominance=8.0):
    lower = rng.normal(size=(n, m, m))
    upper = rng.normal(size=(n, m, m))
    diag = rng.normal(size=(n, m, m)) + dominance * np.eye(m)
    rhs = rng.normal(size=(n, m))
    lower[0] = 0.0
    upper[-1] = 0.0
    return BlockTriDiagSystem(lower, diag, upper, rhs)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n", [1, 2, 10, 50])
def test_matches_dense_lu(backend, n):
    rng = np.random.default_rng(100 + n)
    system = random_system(n, rng)
    a, b = system.to_dense()
    expected = np.linalg.solve(a, b).reshape(n, 6)
    x = solve_block_tridiagonal(system, backend=backend)
    rel = np.linalg.norm(x - expected) / np.linalg.norm(expected)
    assert rel < 1e-10


@pytest.mark.parametrize("backend", BACKENDS)
def test_single_block_is_direct_solve(backend):
    rng = np.random.default_rng(7)
    diag = rng.normal(size=(1, 6, 6)) + 4 * np.eye(6)
    rhs = rng.normal(size=(1, 6))
    system = BlockTriDiagSystem(np.zeros((1, 6, 6)), diag, np.zeros((1, 6, 6)), rhs)
    x = solve_block_tridiagonal(system, backend=backend)
    assert np.allclose(x[0], np.linalg.solve(diag[0], rhs[0]), atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_identity_diagonal(backend):
    rng = np.random.default_rng(8)
    n = 12
    diag = np.tile(np.eye(6), (n, 1, 1))
    rhs = rng.normal(size=(n, 6))
    system = BlockTriDiagSystem(np.zeros((n, 6, 6)), diag, np.zeros((n, 6, 6)), rhs)
    assert np.allclose(solve_block_tridiagonal(system, backend=backend), rhs, atol=1e-14)


@pytest.mark.parametrize("backend", BACKENDS)
def test_singular_pivot_raises_with_cell_index(backend):
    rng = np.random.default_rng(9)
    system = random_system(5, rng)
    system.diag[3] = 0.0
    system.lower[3] = 0.0
    with pytest.raises(SingularBlockError, match="cell 3"):
        solve_block_tridiagonal(system, backend=backend)


def test_backends_agree():
    if BACKEND != "compiled":
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(10)
    system = random_system(33, rng)
    x1 = solve_block_tridiagonal(system, backend="python")
    x2 = solve_block_tridiagonal(system, backend="compiled")
    assert np.allclose(x1, x2, atol=1e-12)
