import itertools
import json

import numpy as np
import pytest

from fastmobius import (
    Antichain,
    JointDistribution,
    antichain_leq,
    canonical_distribution,
    empirical_distribution,
    enumerate_antichains,
    i_min,
    i_mmi,
    median_binarize,
    mutual_information,
    phiid_mmi,
    phiid_redundancy_vector,
    redundancy_vector,
)

A = Antichain.parse


def random_distribution(rng, n, arity=2):
    p = rng.random((arity,) * (n + 1)) ** 2
    return JointDistribution((arity,) * n, (arity,), p / p.sum())


# ---------------------------------------------------------------------------
# JointDistribution plumbing
# ---------------------------------------------------------------------------

def test_distribution_validation():
    with pytest.raises(ValueError, match="sums"):
        JointDistribution((2,), (2,), np.full((2, 2), 0.3))
    with pytest.raises(ValueError, match="negative"):
        JointDistribution((2,), (2,), [[0.5, 0.6], [-0.1, 0.0]])
    with pytest.raises(ValueError, match="alphabet"):
        JointDistribution((1,), (2,), np.full((1, 2), 0.5))
    with pytest.raises(ValueError, match="cap"):
        JointDistribution((2,) * 26, (2,), np.zeros((2,) * 27))


def test_flat_layout_sources_vary_fastest():
    # flat index walks x1 fastest, then x2, then y
    flat = np.arange(8) / 28.0
    d = JointDistribution.from_flat(flat, (2, 2), (2,))
    assert d.pmf[1, 0, 0] == pytest.approx(flat[1])
    assert d.pmf[0, 1, 0] == pytest.approx(flat[2])
    assert d.pmf[0, 0, 1] == pytest.approx(flat[4])
    assert np.allclose(d.to_flat(), flat)


def test_json_round_trip():
    d = canonical_distribution("xor", 3)
    blob = json.dumps(d.to_json_dict())
    back = JointDistribution.from_json_dict(json.loads(blob))
    assert back.source_arities == d.source_arities
    assert back.target_arities == d.target_arities
    assert np.allclose(back.pmf, d.pmf)


def test_json_rejects_bad_states():
    with pytest.raises(ValueError):
        JointDistribution.from_json_dict(
            {"source_arities": [2], "target_arities": [2], "pmf": [{"state": [2, 0], "p": 1.0}]}
        )


# ---------------------------------------------------------------------------
# Mutual information and canonical distributions
# ---------------------------------------------------------------------------

def test_mi_analytic_cases():
    assert mutual_information(canonical_distribution("unq"), [1]) == pytest.approx(1.0)
    assert mutual_information(canonical_distribution("uniform"), [1, 2, 3]) == pytest.approx(0.0)
    xor = canonical_distribution("xor")
    assert mutual_information(xor, [1, 2, 3, 4]) == pytest.approx(0.0)
    assert mutual_information(xor, [1, 2, 3, 4, 5]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        mutual_information(xor, [])
    with pytest.raises(ValueError):
        mutual_information(xor, [6])


def test_canonical_pmfs_exact():
    uni = canonical_distribution("uniform")
    assert np.all(uni.pmf == 1 / 64)
    xor = canonical_distribution("xor")
    idx = np.indices(xor.pmf.shape)
    parity_ok = idx[:5].sum(axis=0) % 2 == idx[5]
    assert np.all(xor.pmf[parity_ok] == 1 / 32) and np.all(xor.pmf[~parity_ok] == 0)
    red = canonical_distribution("red")
    assert red.pmf[(0,) * 6] == 0.5 and red.pmf[(1,) * 6] == 0.5 and red.pmf.sum() == 1.0
    unq = canonical_distribution("unq")
    assert unq.pmf[(1, 0, 0, 0, 0, 1)] == 1 / 32 and unq.pmf[(1, 0, 0, 0, 0, 0)] == 0
    with pytest.raises(ValueError):
        canonical_distribution("nope")


# ---------------------------------------------------------------------------
# Redundancy measures
# ---------------------------------------------------------------------------

def test_i_mmi_examples():
    red = canonical_distribution("red")
    assert i_mmi(red, A("(1)(2)(3)(4)(5)", 5)) == pytest.approx(1.0)
    xor = canonical_distribution("xor")
    assert i_mmi(xor, A("(1)(2)", 5)) == pytest.approx(0.0)
    rng = np.random.default_rng(0)
    d = random_distribution(rng, 3)
    assert i_mmi(d, A("(123)", 3)) == pytest.approx(mutual_information(d, [1, 2, 3]))


def test_i_min_examples():
    assert i_min(canonical_distribution("unq"), A("(1)", 5)) == pytest.approx(1.0)
    uni = canonical_distribution("uniform")
    for text in ("(1)(2)", "(12)(45)", "(12345)"):
        assert i_min(uni, A(text, 5)) == pytest.approx(0.0)


def test_self_redundancy_is_mutual_information(rng):
    d = random_distribution(rng, 3)
    for mask_text in ("(1)", "(23)", "(123)"):
        a = A(mask_text, 3)
        mi = mutual_information(d, a.members[0])
        assert i_mmi(d, a) == pytest.approx(mi, abs=1e-12)
        assert i_min(d, a) == pytest.approx(mi, abs=1e-12)


def test_measure_agreement_on_canonical_suite_n3(table3):
    for name in ("uniform", "xor", "unq", "red"):
        d = canonical_distribution(name, 3)
        v_min = redundancy_vector(d, table3, "min")
        v_mmi = redundancy_vector(d, table3, "mmi")
        assert np.max(np.abs(v_min.values - v_mmi.values)) < 1e-9


def test_monotonicity_along_the_lattice(table3, rng):
    for _ in range(5):
        d = random_distribution(rng, 3)
        for measure in ("min", "mmi"):
            v = redundancy_vector(d, table3, measure)
            for a, b in itertools.product(table3, repeat=2):
                if antichain_leq(a, b):
                    assert v[a] <= v[b] + 1e-9


def test_monotonicity_n4_sampled(table4, rng):
    d = random_distribution(rng, 4)
    v = redundancy_vector(d, table4, "mmi")
    assert np.all(v.values >= -1e-12)
    idx = rng.integers(0, len(table4), size=(3000, 2))
    for i, j in idx:
        if table4.leq(int(i), int(j)):
            assert v.values[i] <= v.values[j] + 1e-9


def test_redundancy_vector_canonical_patterns(table3):
    uni = redundancy_vector(canonical_distribution("uniform", 3), table3)
    assert np.all(uni.values == 0)
    red = redundancy_vector(canonical_distribution("red", 3), table3)
    assert np.allclose(red.values, 1.0)
    with pytest.raises(ValueError):
        redundancy_vector(canonical_distribution("red", 3), table3, "nope")


def test_phiid_mmi_examples(rng):
    # matching source/target pair: the full-vs-full case is plain MI
    pmf = np.zeros((2, 2, 2, 2))
    pmf[0, 0, 0, 0] = pmf[1, 1, 1, 1] = 0.5
    d = JointDistribution((2, 2), (2, 2), pmf)
    assert phiid_mmi(d, A("(12)", 2), A("(12)", 2)) == pytest.approx(
        mutual_information(d, [1, 2], [1, 2])
    )
    assert phiid_mmi(d, A("(1)(2)", 2), A("(1)(2)", 2)) == pytest.approx(1.0)
    # independent sides: every entry zero
    q = np.full((2, 2, 2, 2), 1 / 16)
    ind = JointDistribution((2, 2), (2, 2), q)
    table = enumerate_antichains(2)
    v = phiid_redundancy_vector(ind, table)
    assert np.max(np.abs(v.values)) < 1e-12


# ---------------------------------------------------------------------------
# Estimation plumbing
# ---------------------------------------------------------------------------

def test_empirical_exact_counts():
    samples = np.array([[0, 0], [0, 0], [1, 1], [1, 1]])
    d = empirical_distribution(samples, [0], [1])
    assert d.pmf[0, 0] == 0.5 and d.pmf[1, 1] == 0.5 and d.pmf[0, 1] == 0
    single = empirical_distribution(np.array([[1, 0]]), [0], [1])
    assert single.pmf[1, 0] == 1.0


def test_empirical_validation():
    with pytest.raises(ValueError):
        empirical_distribution(np.zeros((0, 2), dtype=int), [0], [1])
    with pytest.raises(ValueError, match="arity"):
        empirical_distribution(np.array([[3, 0]]), [0], [1], source_arities=[2])
    with pytest.raises(ValueError):
        empirical_distribution(np.array([[0.5, 0.0]]), [0], [1])


def test_empirical_converges_to_xor():
    rng = np.random.default_rng(99)
    n = 5
    xs = rng.integers(0, 2, size=(1_000_000, n))
    y = xs.sum(axis=1) % 2
    d = empirical_distribution(np.column_stack([xs, y]), range(n), [n])
    tv = 0.5 * np.abs(d.pmf - canonical_distribution("xor", n).pmf).sum()
    assert tv < 0.005


def test_median_binarize():
    assert median_binarize([1, 2, 3, 4]).tolist() == [0, 0, 1, 1]
    assert median_binarize([5, 5, 5]).tolist() == [0, 0, 0]
    assert median_binarize([3, 1, 2]).tolist() == [1, 0, 0]
    with pytest.raises(ValueError):
        median_binarize([])
