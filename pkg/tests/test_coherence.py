import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockcs import blocks as bl
from blockcs import coherence as coh
from blockcs import operators as ops


def naive_mu(dense_blocks, probs, S):
    """Coherences straight from their definitions, one block and column at a time."""
    n = dense_blocks[0].shape[1]
    s = len(S)
    Sc = [i for i in range(n) if i not in set(S)]
    m1 = m2 = 0.0
    m3 = 0.0
    for b, p in zip(dense_blocks, probs):
        bs = b[:, S]
        m1 = max(m1, np.linalg.norm(bs.conj().T @ bs, 2) / p)
        for i in Sc:
            m2 = max(m2, math.sqrt(s) * np.linalg.norm(bs.conj().T @ b[:, i]) / p)
    for i in Sc:
        acc = np.zeros((s, s), dtype=complex)
        for b, p in zip(dense_blocks, probs):
            c = b[:, S].conj().T @ b[:, i]
            acc += np.outer(c, c.conj()) / p
        m3 = max(m3, s * np.linalg.norm(acc, 2))
    m4 = max(np.max(np.abs(b.conj().T @ b)) / p for b, p in zip(dense_blocks, probs))
    return m1, m2, m3, m4


def random_partition(n, M, rng):
    perm = rng.permutation(n)
    cuts = np.sort(rng.choice(np.arange(1, n), M - 1, replace=False))
    return [list(x) for x in np.split(perm, cuts)]


def test_support_set_validation():
    np.testing.assert_array_equal(coh.support_set([3, 1], 5), [1, 3])
    for bad in ([1, 1], [5], [-1], []):
        with pytest.raises(ValueError):
            coh.support_set(bad, 5)


def test_single_block_orthogonal():
    d = bl.partition_blocks(ops.dft_operator(8), [range(8)])
    r = coh.gamma(d, [1.0], [1, 4, 6])
    assert r.mu1 == pytest.approx(1.0, abs=1e-12)
    assert r.mu2 == pytest.approx(0.0, abs=1e-12)
    assert r.mu3 == pytest.approx(0.0, abs=1e-12)
    assert r.gamma == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(coh.optimal_pi(d).probabilities, [1.0])


def test_identity_partition_mu2_zero():
    d = bl.partition_blocks(np.eye(6), [[0, 1], [2, 3], [4, 5]])
    pi = bl.DrawingDistribution.uniform(3)
    assert coh.mu2(d, pi, [0, 2]) == 0.0
    assert coh.mu4(d, pi) == pytest.approx(3.0)


def test_line_blocks_singleton_mu1():
    d = bl.line_blocks(ops.dft_operator(4))
    assert coh.mu1(d, bl.DrawingDistribution.uniform(4), [5]) == pytest.approx(1.0, abs=1e-12)


def test_line_blocks_sup_norm_and_optimal_pi():
    d = bl.line_blocks(ops.dft_operator(16))
    np.testing.assert_allclose(coh.block_sup_norms(d), 1 / 16, atol=1e-12)
    np.testing.assert_allclose(coh.optimal_pi(d).probabilities, 1 / 16, atol=1e-12)
    assert coh.mu4(d, bl.DrawingDistribution.uniform(16)) == pytest.approx(1.0, abs=1e-12)


def test_block_diag_optimal_pi():
    d = bl.partition_blocks(ops.block_diag_example(64), [[i] for i in range(64)])
    pi = coh.optimal_pi(d).probabilities
    assert pi[0] == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(pi[1:], 1 / 126, atol=1e-12)


def test_sup_norm_is_max_entry(rng):
    g = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    brute = max(np.max(np.abs(g @ e)) for e in np.eye(5))
    assert coh.sup_norm_1_to_inf(g) == pytest.approx(brute)
    assert coh.sup_norm_1_to_inf(g) == pytest.approx(np.max(np.abs(g)))


@pytest.mark.parametrize("seed", range(4))
def test_partition_against_naive(seed):
    rng = np.random.default_rng(seed)
    d = bl.partition_blocks(ops.dft_operator(16), random_partition(16, 4, rng))
    probs = rng.random(4) + 0.1
    pi = bl.DrawingDistribution.from_weights(probs)
    S = sorted(rng.choice(16, 3, replace=False))
    r = coh.gamma(d, pi, S)
    m1, m2, m3, m4 = naive_mu(d.dense_blocks, pi.probabilities, S)
    assert r.mu1 == pytest.approx(m1, abs=1e-10)
    assert r.mu2 == pytest.approx(m2, abs=1e-10)
    assert r.mu3 == pytest.approx(m3, abs=1e-10)
    assert r.mu4 == pytest.approx(m4, abs=1e-10)
    assert r.gamma == max(r.mu1, r.mu2, r.mu3)
    assert r.mu1 >= 1 - 1e-10


def test_line_blocks_against_naive():
    d = bl.line_blocks(ops.dft_operator(4))
    pi = bl.DrawingDistribution.from_weights([1, 2, 3, 4])
    S = [0, 4, 9]
    r = coh.gamma(d, pi, S)
    expected = naive_mu(d.dense_blocks, pi.probabilities, S)
    np.testing.assert_allclose([r.mu1, r.mu2, r.mu3, r.mu4], expected, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(["partition", "lines", "rowscols", "blockdiag"]))
def test_gamma_below_s_mu4(seed, kind):
    rng = np.random.default_rng(seed)
    if kind == "partition":
        d = bl.partition_blocks(ops.dft_operator(12), random_partition(12, int(rng.integers(2, 7)), rng))
    elif kind == "lines":
        d = bl.line_blocks(ops.dft_operator(4))
    elif kind == "rowscols":
        d = bl.rows_and_columns_blocks(3)
    else:
        d = bl.partition_blocks(ops.block_diag_example(9), [[i] for i in range(9)])
    pi = bl.DrawingDistribution.from_weights(rng.random(d.M) + 0.05)
    s = int(rng.integers(1, d.n))
    S = rng.choice(d.n, s, replace=False)
    r = coh.gamma(d, pi, S)
    assert r.gamma <= s * r.mu4 * (1 + 1e-10)


def test_gaussian_mu3_closed_form_and_monte_carlo():
    g = bl.gaussian_dictionary(4, 64)
    assert coh.mu3(g, None, range(8)) == 2.0
    est = coh.mu3_monte_carlo(g, range(8), trials=2000, seed=1)
    assert abs(est - 2.0) / 2.0 <= 0.1


def test_gaussian_gamma_report():
    g = bl.gaussian_dictionary(4, 64)
    r = coh.gamma(g, None, range(8), trials=2000, seed=0)
    assert r.mode == "monte-carlo" and r.trials == 2000 and r.quantile == 0.99
    assert r.mu3 == 2.0
    s, p = 8, 4
    # gamma = O(s log(s) / p): within a log(s) factor of s/p either way
    assert s / p / math.log(s) <= r.gamma <= s / p * math.log(s) * 4


def test_report_json_fields():
    d = bl.line_blocks(ops.dft_operator(4))
    r = coh.gamma(d, bl.DrawingDistribution.uniform(4), [0, 1])
    data = json.loads(r.to_json())
    for key in ("mu1", "mu2", "mu3", "mu4", "gamma", "s", "mode", "trials", "quantile"):
        assert key in data


def test_zero_probability_rejected():
    d = bl.line_blocks(ops.dft_operator(2))
    with pytest.raises(ValueError):
        coh.mu1(d, [1.0, 0.0], [0])


def test_required_blocks():
    expected = 1602 * math.log(4096) * math.log(1200)
    assert coh.required_blocks(1, 1024, 0.01) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(94_470, rel=1e-3)
    assert coh.required_blocks(0, 1024, 0.01) == 0
    assert coh.required_blocks(2, 100, 0.1) == pytest.approx(2 * coh.required_blocks(1, 100, 0.1))
    first = 2 * math.log(4 * 100) * math.log(12 / 0.1)
    second = math.log(5) * math.log(12 * math.e * math.log(5) / 0.1)
    assert coh.required_blocks_proof(1.5, 100, 5, 0.1) == pytest.approx(534 * 1.5 * (first + second))
    assert coh.required_blocks_proof(1, 100, 1, 0.1) == pytest.approx(534 * first)
    with pytest.raises(ValueError):
        coh.required_blocks(1, 10, 1.5)


def brute_2_to_1_real(mat):
    return max(np.linalg.norm(np.array(sig) @ mat) for sig in itertools.product([-1, 1], repeat=mat.shape[0]))


def test_upsilon_one_by_one():
    row = np.array([[0.6, 0.8]])
    u = coh.upsilon_pdg(np.eye(2), [0], row)
    assert u.value == pytest.approx(0.6) and u.exact


def test_upsilon_identity_block():
    u = coh.upsilon_pdg(np.eye(2), [0, 1], np.eye(2))
    assert u.value == pytest.approx(math.sqrt(2)) and u.exact


def test_upsilon_real_matches_brute_force(rng):
    a0 = np.linalg.qr(rng.standard_normal((8, 8)))[0]
    block = a0[:5]
    S = [1, 3, 6]
    u = coh.upsilon_pdg(a0, S, block)
    bar = (block / np.linalg.norm(block, axis=1)[:, None])[:, S]
    assert u.exact
    assert u.value == pytest.approx(brute_2_to_1_real(bar), abs=1e-10)
    assert u.value <= u.upper_bound + 1e-12


def test_upsilon_complex_line_block():
    d = bl.line_blocks(ops.dft_operator(4))
    block = d.dense_blocks[1]
    S = [1, 6]
    u = coh.upsilon_pdg(bl.dft2_operator(4), S, block)
    bar = (block / np.linalg.norm(block, axis=1)[:, None])[:, S]
    signs = max(np.linalg.norm(np.array(sig) @ bar.conj()) for sig in itertools.product([-1, 1], repeat=4))
    # exhaustive phase grid with the first phase fixed
    grid = np.exp(2j * np.pi * np.arange(48) / 48)
    best = 0.0
    for ph in itertools.product(grid, repeat=3):
        best = max(best, np.linalg.norm(np.array((1.0, *ph)) @ bar.conj()))
    assert not u.exact
    assert u.value >= signs - 1e-10
    assert u.value >= best - 1e-9
    assert u.value <= u.upper_bound + 1e-12
    assert u.value == pytest.approx(best, rel=5e-3)


def test_upsilon_large_block_bound():
    a0 = np.eye(24)
    u = coh.upsilon_pdg(a0, [0, 1], a0, max_exact_rows=20)
    assert not u.exact and u.method == "upper-bound"
