"""Acceptance gate: every release criterion, one test each, at its stated
tolerance. Run with `pytest tests/test_acceptance.py -v -s` to see one
PASS/FAIL line per criterion.
"""

import functools
import time

import numpy as np
import pytest

from fastmobius import (
    Antichain,
    JointDistribution,
    build_mobius_matrix,
    canonical_distribution,
    enumerate_antichains,
    mobius_fast,
    mobius_recursive,
    mutual_information,
    phiid_atoms,
    phiid_mobius,
    phiid_redundancy_vector,
    pid_atoms,
    redundancy_vector,
    redundant_voice_sequence,
    save_matrix,
    shuffle_null_correction,
    top_synergy_atom,
    zeta_matrix,
)
from fastmobius.mobius import DoubleLatticeVector

A = Antichain.parse


def criterion(name):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException:
                print(f"[FAIL] {name}")
                raise
            print(f"[PASS] {name}" + (f" ({detail})" if detail else ""))
        return wrapper
    return deco


@pytest.fixture(scope="module")
def table5():
    return enumerate_antichains(5)


@pytest.fixture(scope="module")
def matrix5(table5):
    return build_mobius_matrix(table5)


def random_distribution(rng, n):
    p = rng.random((2,) * (n + 1)) ** 2
    return JointDistribution((2,) * n, (2,), p / p.sum())


@criterion("lattice counts 4/18/166/7579 and n=5 enumeration under 5 min")
def test_lattice_counts():
    assert len(enumerate_antichains(2)) == 4
    assert len(enumerate_antichains(3)) == 18
    assert len(enumerate_antichains(4)) == 166
    t0 = time.perf_counter()
    enumerate_antichains.cache_clear()
    table = enumerate_antichains(5)
    elapsed = time.perf_counter() - t0
    assert len(table) == 7579
    assert elapsed < 300
    return f"n=5 in {elapsed:.2f}s"


@criterion("closed form equals recursive oracle (n=2,3 exhaustive; n=4 x10000)")
def test_mobius_oracle_equivalence(table4):
    checked = 0
    for n in (2, 3):
        table = enumerate_antichains(n)
        for a in table:
            for b in table:
                assert mobius_fast(a, b) == mobius_recursive(a, b)
                checked += 1
    rng = np.random.default_rng(2718)
    idx = rng.integers(0, len(table4), size=(10_000, 2))
    for i, j in idx:
        a, b = table4[int(i)], table4[int(j)]
        assert mobius_fast(a, b) == mobius_recursive(a, b)
        checked += 1
    return f"{checked} pairs, zero mismatches"


@criterion("zeta inversion M*Z = Z*M = I in exact integers for n <= 4")
def test_zeta_inversion():
    for n in (2, 3, 4):
        table = enumerate_antichains(n)
        matrix = build_mobius_matrix(table)
        size = len(table)
        dense = np.zeros((size, size), dtype=np.int64)
        dense[matrix.rows, matrix.cols] = matrix.vals
        z = zeta_matrix(table)
        eye = np.eye(size, dtype=np.int64)
        assert np.array_equal(dense @ z, eye)
        assert np.array_equal(z @ dense, eye)
    return "n=2,3,4 exact"


@criterion("five-source benchmark table, both measures, every atom within 1e-9")
def test_benchmark_table_reproduction(table5, matrix5):
    # expected nonzero atom per distribution: (atom label, value) pattern;
    # every other atom must vanish.
    expected = {
        "xor": "(12345)",
        "red": "(1)(2)(3)(4)(5)",
        "unq": "(1)",
        "uniform": None,
    }
    slowest = 0.0
    for name, hot in expected.items():
        d = canonical_distribution(name)
        for measure in ("min", "mmi"):
            t0 = time.perf_counter()
            v = redundancy_vector(d, table5, measure)
            atoms = pid_atoms(v, matrix5)
            elapsed = time.perf_counter() - t0
            slowest = max(slowest, elapsed)
            values = atoms.values.copy()
            if hot is not None:
                k = table5.position(A(hot, 5))
                assert abs(values[k] - 1.0) < 1e-9
                values[k] = 0.0
            assert np.max(np.abs(values)) < 1e-9
            assert elapsed < 300
    return f"slowest distribution {slowest:.2f}s"


@criterion("top-synergy shortcut equals full inversion (100 dists x n=2,3,4 x both measures)")
def test_top_synergy_shortcut():
    rng = np.random.default_rng(31415)
    for n in (2, 3, 4):
        table = enumerate_antichains(n)
        matrix = build_mobius_matrix(table)
        full = (1 << n) - 1
        needed = []
        for u in range(1 << n):
            needed.append(
                Antichain(n, (full,))
                if u == 0
                else Antichain.from_masks(n, (full ^ (1 << x) for x in range(n) if u >> x & 1))
            )
        for _ in range(100):
            d = random_distribution(rng, n)
            for measure in ("min", "mmi"):
                v = redundancy_vector(d, table, measure)
                atoms = pid_atoms(v, matrix)
                reds = {key: v[key] for key in needed}
                assert top_synergy_atom(reds) == pytest.approx(
                    atoms.values[table.top_index()], abs=1e-12
                )
    return "600 decompositions, 1e-12"


@criterion("n=5 matrix: density in [0.3%,0.7%], file under 400 kB, build under 60 min")
def test_sparsity_and_size_budget(table5):
    t0 = time.perf_counter()
    matrix = build_mobius_matrix(table5)
    build_s = time.perf_counter() - t0
    assert 0.003 <= matrix.density <= 0.007
    blob = save_matrix(matrix)
    assert len(blob) < 400 * 1024
    assert build_s < 3600
    assert np.all(np.abs(matrix.vals) == 1)
    return (
        f"density {100 * matrix.density:.3f}%, file {len(blob) / 1024:.0f} kB, "
        f"build {build_s:.2f}s"
    )


@criterion("double lattice: n=4 Kronecker has exactly 2,007,889 nonzeros; n=2 matches the 16-equation oracle")
def test_double_lattice(matrix4, matrix2):
    t0 = time.perf_counter()
    mm4 = phiid_mobius(matrix4)
    kron_s = time.perf_counter() - t0
    assert mm4.nnz == 2_007_889
    assert kron_s < 5.0

    # independent oracle: recursively solve the 16 product-order equations
    table = matrix2.table
    size = len(table)
    rng = np.random.default_rng(999)
    v = rng.random(size * size)
    mm2 = phiid_mobius(matrix2)
    fast = phiid_atoms(DoubleLatticeVector(table, v), mm2).values

    def dleq(x, y):
        return table.leq(x[0], y[0]) and table.leq(x[1], y[1])

    elems = [(i, j) for i in range(size) for j in range(size)]
    order = sorted(elems, key=lambda e: sum(dleq(f, e) for f in elems))
    solved = {}
    for e in order:
        below = sum(val for f, val in solved.items() if dleq(f, e) and f != e)
        solved[e] = v[e[0] * size + e[1]] - below
    oracle = np.array([solved[(i, j)] for i in range(size) for j in range(size)])
    assert np.max(np.abs(fast - oracle)) < 1e-12

    # atom sums equal the joint mutual information
    pmf = np.zeros((2, 2, 2, 2))
    pmf[0, 0, 0, 0] = pmf[1, 1, 1, 1] = 0.5
    copy = JointDistribution((2, 2), (2, 2), pmf)
    atoms = phiid_atoms(phiid_redundancy_vector(copy, table), mm2)
    assert atoms.values.sum() == pytest.approx(
        mutual_information(copy, [1, 2], [1, 2]), abs=1e-9
    )
    q = rng.random((2, 2, 2, 2))
    q /= q.sum()
    d = JointDistribution((2, 2), (2, 2), q)
    atoms = phiid_atoms(phiid_redundancy_vector(d, table), mm2)
    assert atoms.values.sum() == pytest.approx(
        mutual_information(d, [1, 2], [1, 2]), abs=1e-9
    )
    return f"kron in {1000 * kron_s:.0f} ms"


@criterion("inversion round trip: 1000 random vectors (n <= 4) reproduce within 1e-12")
def test_inversion_round_trip():
    rng = np.random.default_rng(777)
    counts = {2: 334, 3: 333, 4: 333}
    worst = 0.0
    for n, count in counts.items():
        table = enumerate_antichains(n)
        matrix = build_mobius_matrix(table)
        z = zeta_matrix(table).astype(np.float64)
        batch = rng.normal(size=(len(table), count))
        atoms = matrix.to_csr().T @ batch
        back = z.T @ atoms
        worst = max(worst, float(np.max(np.abs(back - batch))))
    assert worst < 1e-12
    return f"max error {worst:.2e}"


@criterion("synthetic shifted-voice pattern: designated atoms dominate after bias correction")
def test_synthetic_voice_rank_property(matrix4):
    table = matrix4.table
    size = len(table)
    i_s = table.position(A("(1)", 4))

    res2 = shuffle_null_correction(
        redundant_voice_sequence(6000, fold=2, seed=21), 4, seed=9, matrix=matrix4
    )
    row = res2.corrected.values[i_s * size : (i_s + 1) * size]
    j_tb = table.position(A("(3)(4)", 4))
    two_part = [j for j, b in enumerate(table.entries) if len(b.members) == 2]
    assert all(row[j_tb] > row[j] for j in two_part if j != j_tb)
    assert row[j_tb] == max(res2.corrected.values)

    res3 = shuffle_null_correction(
        redundant_voice_sequence(6000, fold=3, seed=21), 4, seed=9, matrix=matrix4
    )
    row3 = res3.corrected.values[i_s * size : (i_s + 1) * size]
    j_atb = table.position(A("(2)(3)(4)", 4))
    three_part = [j for j, b in enumerate(table.entries) if len(b.members) == 3]
    assert all(row3[j_atb] > row3[j] for j in three_part if j != j_atb)
    assert row3[j_atb] == max(res3.corrected.values)
    return (
        f"2-fold S->T|B = {row[j_tb]:.2f} bits, 3-fold S->A|T|B = {row3[j_atb]:.2f} bits"
    )
