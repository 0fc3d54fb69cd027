import numpy as np
import pytest


def dft_matrix(d):
    """Independent dense DFT: entries exp(+2 pi i p l / d) / sqrt(d)."""
    p = np.arange(d)
    return np.exp(2j * np.pi * np.outer(p, p) / d) / np.sqrt(d)


def random_unitary(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def l1_vertex_oracle(A, y, tol=1e-10):
    """Exact min ||z||_1 s.t. Az = y for real A with full row rank.

    The split LP attains its optimum at a basic solution, i.e. on a support
    T of size rank(A) with A_T invertible; enumerate them all.
    Returns (optimal value, list of optimal vertices).
    """
    import itertools

    q, n = A.shape
    best, argbest = np.inf, []
    for T in itertools.combinations(range(n), q):
        sub = A[:, T]
        if abs(np.linalg.det(sub)) < 1e-9:
            continue
        z = np.zeros(n)
        z[list(T)] = np.linalg.solve(sub, y)
        val = np.abs(z).sum()
        if val < best - tol:
            best, argbest = val, [z]
        elif abs(val - best) <= tol:
            argbest.append(z)
    return best, argbest


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k[2:])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}: {detail}")
