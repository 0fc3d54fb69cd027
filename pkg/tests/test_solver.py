import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockcs import operators as ops
from blockcs import sampling as smp
from blockcs.solver import (
    RecoveryResult,
    SolverOptions,
    SparseSignal,
    basis_pursuit,
    check_recovery,
    complex_sign,
    psnr,
    soft_threshold,
)
from conftest import l1_vertex_oracle


def test_complex_sign():
    np.testing.assert_allclose(complex_sign([3 + 4j, 0, -2]), [0.6 + 0.8j, 0, -1])


def test_soft_threshold_is_prox_of_modulus(rng):
    # prox of tau*|.| at x minimizes tau|z| + |z - x|^2 / 2; compare with a grid search
    x, tau = 0.7 - 0.4j, 0.3
    grid = np.linspace(-1.5, 1.5, 601)
    z = grid[:, None] + 1j * grid[None, :]
    obj = tau * np.abs(z) + np.abs(z - x) ** 2 / 2
    best = z.ravel()[np.argmin(obj)]
    assert abs(soft_threshold(x, tau) - best) <= 0.01
    assert soft_threshold(0.2, 0.3) == 0


def test_zero_measurements():
    res = basis_pursuit(np.eye(3), np.zeros(3))
    assert res.converged and np.all(res.estimate == 0)


def test_identity_operator():
    y = np.array([1.0, -2.0, 0.5j, 0.0])
    res = basis_pursuit(np.eye(4), y)
    np.testing.assert_allclose(res.estimate, y, atol=1e-8)


def test_zero_operator_rejected():
    with pytest.raises(ValueError):
        basis_pursuit(np.zeros((2, 3)), np.ones(2))


def test_one_sparse_from_four_dft_rows():
    a0 = ops.dft_operator(8)
    A = smp.isolated_sampler(a0, np.full(8, 1 / 8), 4, seed=1)
    x = np.zeros(8, dtype=complex)
    x[5] = 1.0 - 0.5j
    res = basis_pursuit(A.operator, A.matvec(x), reference=x)
    assert res.success
    # oracle: among all 1-sparse candidates, the feasible one with the smallest l1 norm
    mat = A.matrix
    y = mat @ x
    cands = []
    for j in range(8):
        c = np.vdot(mat[:, j], y) / np.vdot(mat[:, j], mat[:, j])
        if np.linalg.norm(mat[:, j] * c - y) <= 1e-10:
            cands.append((abs(c), j, c))
    _, j, c = min(cands)
    oracle = np.zeros(8, dtype=complex)
    oracle[j] = c
    np.testing.assert_allclose(res.estimate, oracle, atol=1e-6)


def test_iteration_cap_reported():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((5, 12))
    x = np.zeros(12)
    x[[1, 7]] = [1.0, -2.0]
    res = basis_pursuit(A, A @ x, SolverOptions(max_iter=20, polish=False))
    assert not res.converged and res.iterations == 20


@pytest.mark.parametrize("seed", range(10))
def test_matches_vertex_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 11))
    q = int(rng.integers(2, n))
    A = rng.standard_normal((q, n))
    y = rng.standard_normal(q)
    res = basis_pursuit(A, y)
    best, vertices = l1_vertex_oracle(A, y)
    assert res.converged
    assert np.linalg.norm(A @ res.estimate - y) <= 1e-9 * np.linalg.norm(y) * 1.0001
    assert res.objective == pytest.approx(best, abs=1e-7)
    if len(vertices) == 1:
        np.testing.assert_allclose(res.estimate, vertices[0], atol=1e-6)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), theta=st.floats(0, 2 * math.pi), c=st.floats(0.1, 10))
def test_phase_and_scale_equivariance(seed, theta, c):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((6, 10)) + 1j * rng.standard_normal((6, 10))
    x = np.zeros(10, dtype=complex)
    x[rng.choice(10, 2, replace=False)] = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    y = A @ x
    base = basis_pursuit(A, y).estimate
    rotated = basis_pursuit(A, np.exp(1j * theta) * y).estimate
    scaled = basis_pursuit(A, c * y).estimate
    scale = np.linalg.norm(base)
    assert np.linalg.norm(rotated - np.exp(1j * theta) * base) <= 1e-6 * scale
    assert np.linalg.norm(scaled - c * base) <= 1e-6 * c * scale


def test_check_recovery():
    x = np.array([1.0, 0, 2.0])
    ok, err = check_recovery(x, x.copy())
    assert ok and err == 0
    ok, err = check_recovery(x, np.zeros(3))
    assert not ok and err == pytest.approx(1.0)
    ok, err = check_recovery(x, x * (1 + 1e-7))
    assert ok
    sig = SparseSignal(3, [0, 2], [1.0, 2.0])
    assert check_recovery(sig, RecoveryResult(x, 1, 0.0, 3.0, True))[0]
    with pytest.raises(ValueError):
        SparseSignal(3, [0], [0.0])


def test_psnr():
    a = np.zeros(4)
    assert psnr(a, a, 1.0) == math.inf
    assert psnr(a, a + 0.1, 1.0) == pytest.approx(20.0)
    rng = np.random.default_rng(1)
    for _ in range(5):
        r, e = rng.random(16), rng.random(16)
        oracle = 10 * math.log10(16 / np.sum((r - e) ** 2))
        assert psnr(r, e, 1.0) == pytest.approx(oracle)
    with pytest.raises(ValueError):
        psnr(a, a, 0)


@pytest.mark.parametrize("polish", [True, False])
def test_polish_and_plain_iteration_agree(polish):
    rng = np.random.default_rng(3)
    A = rng.standard_normal((6, 10)) + 1j * rng.standard_normal((6, 10))
    x = np.zeros(10, dtype=complex)
    x[[2, 8]] = [1 + 1j, -0.5]
    res = basis_pursuit(A, A @ x, SolverOptions(polish=polish), reference=x)
    assert res.success and res.converged
    if not polish:
        assert not res.certified
