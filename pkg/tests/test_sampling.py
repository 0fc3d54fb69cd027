import json

import numpy as np
import pytest

from blockcs import blocks as bl
from blockcs import coherence as coh
from blockcs import operators as ops
from blockcs import sampling as smp
from conftest import dft_matrix


def test_single_block_gives_identity():
    d = bl.partition_blocks(ops.dft_operator(6), [range(6)])
    A = smp.draw_blocks(d, [1.0], 3, seed=4)
    np.testing.assert_allclose(A.gram(), np.eye(6), atol=1e-12)


def test_line_block_assembly_matches_selected_rows():
    d = bl.line_blocks(ops.dft_operator(4))
    pi = bl.DrawingDistribution.from_weights([1, 2, 3, 4])
    A = smp.draw_blocks(d, pi, 4, seed=11)
    f2 = np.kron(dft_matrix(4), dft_matrix(4))
    expected = np.vstack([f2[4 * k : 4 * k + 4] / np.sqrt(4 * pi[k]) for k in A.indices])
    np.testing.assert_allclose(A.matrix, expected, atol=1e-12)
    assert A.q == 16 and A.m == 4


def test_mean_gram_is_identity():
    d = bl.line_blocks(ops.dft_operator(4))
    pi = bl.DrawingDistribution.from_weights([1, 1, 2, 4])
    acc = np.zeros((16, 16), dtype=complex)
    trials = 10_000
    for t in range(trials):
        acc += smp.draw_blocks(d, pi, 2, seed=t).gram()
    assert np.max(np.abs(acc / trials - np.eye(16))) <= 0.05


def test_exact_expectation_identity():
    # E[A^H A] = sum_k pi_k B_k^H B_k / pi_k, evaluated exactly
    d = bl.rows_and_columns_blocks(3)
    pi = bl.DrawingDistribution.from_weights(np.arange(1, d.M + 1))
    total = sum(pi[k] * smp.from_indices(d, pi, [k]).gram() for k in range(d.M))
    np.testing.assert_allclose(total, np.eye(9), atol=1e-12)


def test_same_seed_bitwise_identical():
    d = bl.line_blocks(ops.dft_operator(8))
    pi = bl.DrawingDistribution.uniform(8)
    a, b = smp.draw_blocks(d, pi, 5, 99), smp.draw_blocks(d, pi, 5, 99)
    assert np.array_equal(a.matrix, b.matrix)
    g = bl.gaussian_dictionary(3, 10)
    assert np.array_equal(smp.draw_blocks(g, None, 4, 2).matrix, smp.draw_blocks(g, None, 4, 2).matrix)


def test_gaussian_draw_scaling():
    g = bl.gaussian_dictionary(3, 10)
    A = smp.draw_blocks(g, None, 4, 2)
    np.testing.assert_array_equal(A.blocks[1], g.gaussian_block(2, 1) / 2.0)


def test_isolated_row_norms():
    A = smp.isolated_sampler(ops.dft_operator(16), np.full(16, 1 / 16), 8, seed=0)
    assert A.q == 8
    # row a_j has norm 1, scaled by 1/sqrt(m * 1/n) = sqrt(n/m)
    np.testing.assert_allclose(np.linalg.norm(A.matrix, axis=1), np.sqrt(16 / 8), atol=1e-12)


def test_isolated_single_draw_gram():
    n = m = 8
    A = smp.isolated_sampler(ops.dft_operator(n), np.full(n, 1 / n), m, seed=3)
    f = dft_matrix(n)
    expected = (n / m) * sum(np.outer(f[j].conj(), f[j]) for j in A.indices)
    np.testing.assert_allclose(A.gram(), expected, atol=1e-12)


def test_optimal_pi_draws_first_row_half_the_time():
    a0 = ops.block_diag_example(16)
    d = bl.partition_blocks(a0, [[i] for i in range(16)])
    A = smp.isolated_sampler(a0, coh.optimal_pi(d), 10_000, seed=5)
    assert abs(np.mean(A.indices == 0) - 0.5) <= 0.02


def test_distinct_draws():
    d = bl.line_blocks(ops.dft_operator(16))
    pi = bl.DrawingDistribution.uniform(16)
    A = smp.draw_distinct_blocks(d, pi, 9, seed=2)
    assert len(set(A.indices.tolist())) == 9
    with pytest.raises(ValueError):
        smp.draw_distinct_blocks(d, pi, 17, seed=2)


def test_draw_validation():
    d = bl.line_blocks(ops.dft_operator(4))
    with pytest.raises(ValueError):
        smp.draw_blocks(d, [0.5, 0.5], 2, 0)
    with pytest.raises(ValueError):
        smp.draw_blocks(d, [0.3, 0.3, 0.3, 0.3], 2, 0)
    with pytest.raises(ValueError):
        smp.draw_blocks(d, bl.DrawingDistribution.uniform(4), 0, 0)


def test_partition_for_golfing():
    d = bl.partition_blocks(ops.dft_operator(10), [[i] for i in range(10)])
    A = smp.draw_blocks(d, bl.DrawingDistribution.uniform(10), 10, 1)
    assert smp.partition_for_golfing(A, [10])[0] is A
    groups = smp.partition_for_golfing(A, [4, 3, 3])
    np.testing.assert_array_equal(groups[0].indices, A.indices[:4])
    np.testing.assert_array_equal(groups[1].indices, A.indices[4:7])
    np.testing.assert_array_equal(groups[2].indices, A.indices[7:])
    x = np.random.default_rng(0).standard_normal(10)
    np.testing.assert_allclose(np.concatenate([g.matvec(x) for g in groups]), A.matvec(x), atol=1e-12)
    with pytest.raises(ValueError):
        smp.partition_for_golfing(A, [4, 4])


def test_mask_and_pgm_round_trip(tmp_path):
    d = bl.line_blocks(ops.dft_operator(8))
    A = smp.from_indices(d, bl.DrawingDistribution.uniform(8), [0, 3, 3])
    mask = smp.sampling_mask(A)
    assert mask.shape == (8, 8)
    np.testing.assert_array_equal(mask.any(axis=1), np.isin(np.arange(8), [0, 3]))
    path = tmp_path / "mask.pgm"
    smp.write_pgm(path, mask)
    assert path.read_text().startswith("P2\n8 8\n255\n")
    np.testing.assert_array_equal(smp.read_pgm(path), mask * 255)


def test_serialization():
    d = bl.line_blocks(ops.dft_operator(4))
    A = smp.draw_blocks(d, bl.DrawingDistribution.uniform(4), 3, 8)
    data = json.loads(A.to_json())
    assert data["indices"] == A.indices.tolist() and data["seed"] == 8
