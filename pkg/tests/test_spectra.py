import math

import numpy as np
import pytest

from thlab.ensemble import (
    BaseDistribution,
    EntrySequence,
    MatrixKind,
    MovingAverageProcess,
    sample_patterned_matrix,
)
from thlab.errors import InvalidArgumentError, NumericInputError
from thlab.spectra import (
    StructuredOperator,
    diagonal_w2_bound,
    eigenvalues_symmetric,
    empirical_moment,
    esd,
    fast_matvec,
    hutchinson_moment,
    power_trace_moments,
    w2_distance,
    zero_diagonal,
)

T, H = MatrixKind.TOEPLITZ, MatrixKind.HANKEL


def _matrix(kind=T, n=64, m=1, seed=5, dist=BaseDistribution.STANDARD_NORMAL):
    return sample_patterned_matrix(kind, n, MovingAverageProcess(m, None, dist, seed))


def test_eigenvalues_known_matrix():
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    ev = eigenvalues_symmetric(a)
    assert np.allclose(ev, [1.0, 3.0], atol=1e-12)


def test_eigenvalues_residual_and_trace():
    mat = _matrix(n=80)
    ev = eigenvalues_symmetric(mat)
    w, v = np.linalg.eigh(mat.entries)
    resid = np.max(np.abs(mat.entries @ v - v * w))
    assert resid <= 1e-10
    assert np.all(np.diff(ev) >= 0)
    assert abs(ev.sum() - np.trace(mat.entries)) <= 1e-9
    assert abs((ev**2).sum() - np.sum(mat.entries**2)) <= 1e-9


def test_eigenvalues_validation():
    with pytest.raises(InvalidArgumentError):
        eigenvalues_symmetric(np.zeros((2, 3)))
    with pytest.raises(NumericInputError):
        eigenvalues_symmetric(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_esd_summary_properties():
    ev = np.array([3.0, -1.0, 1.0, 1.0])
    s = esd(ev, bins=4, h_max=3)
    assert s.n == 4
    assert np.array_equal(s.eigenvalues, [-1.0, 1.0, 1.0, 3.0])
    assert int(s.hist_counts.sum()) == 4
    assert s.cdf(-2.0) == 0.0
    assert s.cdf(1.0) == 0.75
    assert s.cdf(10.0) == 1.0
    assert s.moment(1) == pytest.approx(1.0)
    assert s.moment(2) == pytest.approx(3.0)
    assert s.moment(3) == pytest.approx(7.0)
    with pytest.raises(InvalidArgumentError):
        s.moment(4)


def test_esd_csv_and_json():
    s = esd(np.array([0.5, -0.5]), bins=2, h_max=2)
    csv = s.eigenvalues_csv()
    assert csv.splitlines()[0] == "index,eigenvalue"
    assert csv.splitlines()[1] == "0,-0.5"
    d = s.to_json_dict()
    assert d["n"] == 2
    assert len(d["histogram"]["edges"]) == len(d["histogram"]["counts"]) + 1
    assert d["moments"]["2"] == pytest.approx(0.25)


def test_esd_validation():
    with pytest.raises(InvalidArgumentError):
        esd(np.array([]))
    with pytest.raises(InvalidArgumentError):
        esd(np.array([1.0]), bins=0)
    with pytest.raises(NumericInputError):
        esd(np.array([np.inf]))


def test_power_trace_matches_eigen_path():
    for kind in (T, H):
        mat = _matrix(kind, n=60, seed=9)
        ev = eigenvalues_symmetric(mat)
        dense = power_trace_moments(mat, 8)
        for h in range(1, 9):
            want = float(np.mean(ev**h))
            assert dense[h - 1] == pytest.approx(want, rel=1e-8, abs=1e-10)


def test_empirical_moment_paths_agree():
    mat = _matrix(H, n=48, seed=2)
    assert empirical_moment(mat, 0) == 1.0
    for h in (1, 2, 3, 6):
        e = empirical_moment(mat, h, path="eigen")
        d = empirical_moment(mat, h, path="dense")
        assert d == pytest.approx(e, rel=1e-9, abs=1e-12)
    with pytest.raises(InvalidArgumentError):
        empirical_moment(mat, 2, path="magic")
    with pytest.raises(InvalidArgumentError):
        empirical_moment(mat, -1)


def test_operator_matches_dense_both_kinds():
    rng = np.random.default_rng(0)
    for kind in (T, H):
        for n in (1, 2, 5, 33, 128):
            mat = _matrix(kind, n=n, m=1, seed=n)
            op = StructuredOperator.from_matrix(mat)
            v = rng.standard_normal(n)
            got = fast_matvec(op, v)
            want = mat.entries @ v
            assert np.max(np.abs(got - want)) <= 1e-12 * max(1.0, np.abs(want).max())


def test_operator_block_apply():
    mat = _matrix(T, n=40, seed=7)
    op = StructuredOperator.from_matrix(mat)
    block = np.random.default_rng(1).standard_normal((40, 5))
    got = op.apply(block)
    want = mat.entries @ block
    assert got.shape == (40, 5)
    assert np.max(np.abs(got - want)) <= 1e-12


def test_operator_validation():
    op = StructuredOperator.from_matrix(_matrix(n=8))
    with pytest.raises(InvalidArgumentError):
        fast_matvec(op, np.zeros(9))
    with pytest.raises(InvalidArgumentError):
        op.apply(np.zeros((9, 2)))
    seq = EntrySequence(0, 7, np.zeros(8))
    with pytest.raises(InvalidArgumentError):
        StructuredOperator.from_sequence(T, seq, 0)


def test_hutchinson_matches_trace():
    mat = _matrix(T, n=96, seed=13)
    op = StructuredOperator.from_matrix(mat)
    truth = empirical_moment(mat, 4, path="eigen")
    est, se = hutchinson_moment(op, 4, probes=256, seed=21)
    assert se > 0.0
    assert abs(est - truth) <= 4.0 * se


def test_hutchinson_even_h_unbiased_pooled():
    # pool independent runs: the pooled mean must sit within its pooled SE
    mat = _matrix(H, n=64, seed=17)
    op = StructuredOperator.from_matrix(mat)
    truth = empirical_moment(mat, 2, path="eigen")
    runs = 200
    ests = np.empty(runs)
    for r in range(runs):
        ests[r], _ = hutchinson_moment(op, 2, probes=16, seed=1000 + r)
    pooled_se = float(np.std(ests, ddof=1) / math.sqrt(runs))
    assert abs(float(np.mean(ests)) - truth) <= 3.0 * pooled_se + 1e-12


def test_hutchinson_se_scaling():
    # SE should shrink like 1/sqrt(probes); compare 64 vs 256 probes
    mat = _matrix(T, n=128, seed=3)
    op = StructuredOperator.from_matrix(mat)
    reps = 40
    se_small = np.mean([hutchinson_moment(op, 4, 64, seed=5000 + r)[1] for r in range(reps)])
    se_big = np.mean([hutchinson_moment(op, 4, 256, seed=6000 + r)[1] for r in range(reps)])
    ratio = se_small / se_big
    assert abs(ratio - 2.0) <= 0.6


def test_hutchinson_validation():
    op = StructuredOperator.from_matrix(_matrix(n=8))
    with pytest.raises(InvalidArgumentError):
        hutchinson_moment(op, 0)
    with pytest.raises(InvalidArgumentError):
        hutchinson_moment(op, 2, probes=4)


def test_w2_distance_properties():
    a = esd(np.array([0.0, 1.0, 2.0]), bins=2, h_max=1)
    b = esd(np.array([0.0, 1.0, 2.0]), bins=2, h_max=1)
    assert w2_distance(a, b) == 0.0
    c = esd(np.array([0.5, 1.5, 2.5]), bins=2, h_max=1)
    assert w2_distance(a, c) == pytest.approx(0.5)  # pure translation
    assert w2_distance(a, c) == w2_distance(c, a)


def test_w2_distance_unequal_sizes():
    rng = np.random.default_rng(8)
    x = rng.standard_normal(400)
    a = esd(x, bins=3, h_max=1)
    b = esd(np.concatenate([x, x]), bins=3, h_max=1)  # same distribution, 2x size
    assert w2_distance(a, b) <= 0.02
    c = esd(x + 1.0, bins=3, h_max=1)
    assert w2_distance(a, c) == pytest.approx(1.0, abs=1e-9)


def test_zero_diagonal_and_bound():
    mat = _matrix(T, n=50, m=0, seed=29)
    z = zero_diagonal(mat)
    assert z.variant == "zero_diagonal"
    assert np.all(np.diagonal(z.entries) == 0.0)
    off = ~np.eye(50, dtype=bool)
    assert np.array_equal(z.entries[off], mat.entries[off])
    # Hoffman-Wielandt: squared W2 of the two spectra is at most the
    # scaled Frobenius gap, which here is exactly the diagonal mass
    ev_full = eigenvalues_symmetric(mat)
    ev_zero = eigenvalues_symmetric(z)
    w2_sq = float(np.mean((ev_full - ev_zero) ** 2))
    bound = diagonal_w2_bound(mat)
    assert bound == pytest.approx(float(np.sum(np.diagonal(mat.entries) ** 2)) / 50)
    assert w2_sq <= bound + 1e-12


def test_zero_diagonal_bound_all_kinds():
    for kind in (T, H):
        mat = _matrix(kind, n=64, m=1, seed=31)
        z = zero_diagonal(mat)
        w2 = w2_distance(esd(eigenvalues_symmetric(mat)), esd(eigenvalues_symmetric(z)))
        assert w2 * w2 <= diagonal_w2_bound(mat) + 1e-12
