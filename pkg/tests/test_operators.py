import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockcs import operators as ops
from conftest import dft_matrix


def test_dft_size_one_is_identity():
    np.testing.assert_allclose(ops.dft_operator(1).to_dense(), [[1.0]])


def test_dft_of_first_canonical_vector_is_constant():
    e0 = np.zeros(4)
    e0[0] = 1
    np.testing.assert_allclose(ops.dft_operator(4).matvec(e0), np.full(4, 0.5), atol=1e-15)


def test_dft_unitary_and_matches_formula():
    f = ops.dft_operator(8).to_dense()
    assert np.linalg.norm(f.conj().T @ f - np.eye(8)) <= 1e-12
    np.testing.assert_allclose(f, dft_matrix(8), atol=1e-13)
    np.testing.assert_allclose(np.abs(f), 1 / np.sqrt(8), atol=1e-14)


def test_dft_rejects_bad_size():
    with pytest.raises(ValueError):
        ops.dft_operator(0)


@settings(max_examples=30, deadline=None)
@given(
    rows=st.integers(1, 6),
    cols=st.integers(1, 6),
    seed=st.integers(0, 2**32 - 1),
)
def test_adjoint_consistency_dense(rows, cols, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    a = ops.DenseMatrix(m)
    x = rng.standard_normal(cols) + 1j * rng.standard_normal(cols)
    y = rng.standard_normal(rows) + 1j * rng.standard_normal(rows)
    assert abs(np.vdot(y, a.matvec(x)) - np.vdot(a.rmatvec(y), x)) <= 1e-10 * (1 + np.linalg.norm(m))


@settings(max_examples=20, deadline=None)
@given(d1=st.integers(1, 5), d2=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_adjoint_consistency_kron_of_dfts(d1, d2, seed):
    rng = np.random.default_rng(seed)
    k = ops.kron(ops.dft_operator(d1), ops.dft_operator(d2))
    x = rng.standard_normal(d1 * d2) + 1j * rng.standard_normal(d1 * d2)
    y = rng.standard_normal(d1 * d2) + 1j * rng.standard_normal(d1 * d2)
    assert abs(np.vdot(y, k.matvec(x)) - np.vdot(k.rmatvec(y), x)) <= 1e-10
    np.testing.assert_allclose(k.H.to_dense(), k.to_dense().conj().T, atol=1e-12)


def test_materialization_matches_forward_map(rng):
    f = ops.kron(ops.dft_operator(3), ops.dft_operator(4))
    dense = f.to_dense()
    for j in range(12):
        e = np.zeros(12)
        e[j] = 1
        np.testing.assert_allclose(dense[:, j], f.matvec(e), atol=1e-12)


def test_kron_of_identities():
    np.testing.assert_array_equal(ops.kron(ops.identity(2), ops.identity(3)).to_dense(), np.eye(6))


@settings(max_examples=25, deadline=None)
@given(
    shape=st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4)),
    seed=st.integers(0, 2**32 - 1),
)
def test_kron_mixed_product(shape, seed):
    rng = np.random.default_rng(seed)
    p, q, r, s = shape
    a = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
    b = rng.standard_normal((r, s)) + 1j * rng.standard_normal((r, s))
    x, y = rng.standard_normal(q), rng.standard_normal(s)
    k = ops.kron(ops.DenseMatrix(a), ops.DenseMatrix(b))
    np.testing.assert_allclose(k.matvec(np.kron(x, y)), np.kron(a @ x, b @ y), atol=1e-10)
    np.testing.assert_allclose(k.to_dense(), np.kron(a, b), atol=1e-12)


def test_kron_of_dfts_is_2d_dft():
    # 2-D DFT entry ((p1,p2),(l1,l2)) = exp(2 i pi (p1 l1 + p2 l2)/4)/4, row-major pairs
    idx = np.array([(a, b) for a in range(4) for b in range(4)])
    phase = np.outer(idx[:, 0], idx[:, 0]) + np.outer(idx[:, 1], idx[:, 1])
    oracle = np.exp(2j * np.pi * phase / 4) / 4
    f = ops.dft_operator(4)
    np.testing.assert_allclose(ops.kron(f, f).to_dense(), oracle, atol=1e-12)


def test_block_diag_example():
    np.testing.assert_allclose(ops.block_diag_example(2).to_dense(), np.eye(2), atol=1e-15)
    a = ops.block_diag_example(8).to_dense()
    assert np.linalg.norm(a.conj().T @ a - np.eye(8)) <= 1e-12
    sup = np.max(np.abs(a) ** 2, axis=1)
    assert sup[0] == pytest.approx(1.0)
    np.testing.assert_allclose(sup[1:], 1 / 7, atol=1e-14)
    with pytest.raises(ValueError):
        ops.block_diag_example(1)


def test_operator_norm_cases(rng):
    assert ops.operator_norm(ops.identity(5)) == pytest.approx(1.0, abs=1e-8)
    assert ops.operator_norm(np.diag([3.0, 1.0, 0.5])) == pytest.approx(3.0, abs=1e-8)
    m = rng.standard_normal((12, 8))
    assert ops.operator_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-8)


def test_operator_norm_cap_raises():
    m = np.diag([1.0, 0.999999])
    with pytest.raises(ops.ConvergenceError) as info:
        ops.operator_norm(m, tol=1e-15, maxiter=3)
    assert info.value.estimate > 0


def test_vstack_and_compose(rng):
    a = rng.standard_normal((3, 4))
    b = rng.standard_normal((2, 4))
    st_ = ops.vstack([ops.DenseMatrix(a), ops.DenseMatrix(b)], scales=[2.0, 0.5])
    np.testing.assert_allclose(st_.to_dense(), np.vstack([2 * a, 0.5 * b]))
    c = rng.standard_normal((4, 5))
    np.testing.assert_allclose(ops.compose(ops.DenseMatrix(a), ops.DenseMatrix(c)).to_dense(), a @ c, atol=1e-12)


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        ops.dft_operator(3).matvec(np.ones(4))
