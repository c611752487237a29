"""Two-sided decomposition of symbolic time series.

A k-channel symbol sequence (e.g. four melodic voices over a 13-letter
alphabet of notes plus silence) is reduced to its state *changes*, the
empirical distribution of consecutive-state transitions is counted sparsely,
and the transition information is decomposed over the double lattice.
Atoms are grouped into overlapping information-dynamics categories and
bias-corrected against a shuffle null that destroys the temporal order while
preserving the state marginals.

Dense pmfs are useless here (13^8 cells for four voices), so all marginal
mutual informations come from sparse count aggregation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .lattice import Antichain, AntichainTable, CapacityError, enumerate_antichains
from .mobius import (
    DoubleLatticeVector,
    SparseMobiusMatrix,
    build_mobius_matrix,
    phiid_atoms,
    phiid_mobius,
)

_EPS = 1e-15

#: Category names in report order.
CATEGORIES = ("bottom-up", "top-down", "storage", "transfer", "copy", "erasure")


@dataclass(frozen=True, eq=False)
class SymbolicSequence:
    """k parallel channels of symbols from a common alphabet.

    data has shape (length, k); every symbol lies in 0..alphabet-1.
    """

    data: np.ndarray
    alphabet: int

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] == 0:
            raise ValueError("sequence must be a nonempty (length, channels) table")
        if not np.issubdtype(data.dtype, np.integer):
            raise ValueError("sequence symbols must be integers")
        if self.alphabet < 2:
            raise ValueError("alphabet must have at least 2 symbols")
        if data.min() < 0 or data.max() >= self.alphabet:
            raise ValueError(f"symbols outside 0..{self.alphabet - 1}")
        object.__setattr__(self, "data", data.astype(np.int64))

    @property
    def length(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[1]


def dedupe_consecutive(seq: SymbolicSequence) -> SymbolicSequence:
    """Drop time steps whose full state repeats the previous step.

    Idempotent; a constant sequence collapses to a single step.
    """
    data = seq.data
    if data.shape[0] == 1:
        return seq
    changed = np.any(data[1:] != data[:-1], axis=1)
    keep = np.concatenate(([True], changed))
    return SymbolicSequence(data[keep], seq.alphabet)


@dataclass(eq=False)
class TransitionModel:
    """Sparse empirical pmf over consecutive state pairs.

    Stores distinct (state_t, state_t+1) pairs with their counts; sources
    are the channels at t, targets the channels at t+1. Mutual informations
    between channel subsets are computed by sparse aggregation and cached.
    """

    alphabet: int
    k: int
    sources: np.ndarray
    targets: np.ndarray
    counts: np.ndarray
    total: int
    _mi_cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_pairs(cls, sources, targets, alphabet: int) -> "TransitionModel":
        """Aggregate raw transition pairs (possibly with duplicates)."""
        src = np.asarray(sources, dtype=np.int64)
        tgt = np.asarray(targets, dtype=np.int64)
        if src.ndim != 2 or src.shape != tgt.shape or src.shape[0] == 0:
            raise ValueError("need matching nonempty (m, k) source/target tables")
        if src.min(initial=0) < 0 or max(src.max(initial=0), tgt.max(initial=0)) >= alphabet:
            raise ValueError(f"symbols outside 0..{alphabet - 1}")
        k = src.shape[1]
        stacked = np.hstack([src, tgt])
        uniq, inverse = np.unique(stacked, axis=0, return_inverse=True)
        counts = np.bincount(inverse).astype(np.float64)
        return cls(
            alphabet=alphabet,
            k=k,
            sources=uniq[:, :k],
            targets=uniq[:, k:],
            counts=counts,
            total=src.shape[0],
        )

    def probability(self, state_t, state_next) -> float:
        key = np.hstack([np.asarray(state_t), np.asarray(state_next)])
        stacked = np.hstack([self.sources, self.targets])
        match = np.all(stacked == key, axis=1)
        return float(self.counts[match].sum() / self.total)

    def _project(self, block: np.ndarray, mask: int) -> np.ndarray:
        idx = [i for i in range(self.k) if mask >> i & 1]
        weights = self.alphabet ** np.arange(len(idx), dtype=np.int64)
        return block[:, idx] @ weights

    def mutual_information(self, source_mask: int, target_mask: int) -> float:
        """I(X_A at t; X_B at t+1) in bits, for channel subset bitmasks."""
        if not 0 < source_mask < 1 << self.k or not 0 < target_mask < 1 << self.k:
            raise ValueError("channel subset masks must be nonempty and within range")
        key = (source_mask, target_mask)
        hit = self._mi_cache.get(key)
        if hit is not None:
            return hit
        ps = self._project(self.sources, source_mask)
        pt = self._project(self.targets, target_mask)
        radix = int(pt.max()) + 1 if len(pt) else 1
        joint_key = ps * radix + pt
        uj, inv = np.unique(joint_key, return_inverse=True)
        cj = np.bincount(inv, weights=self.counts)
        us, sinv = np.unique(uj // radix, return_inverse=True)
        cs = np.bincount(sinv, weights=cj)
        ut, tinv = np.unique(uj % radix, return_inverse=True)
        ct = np.bincount(tinv, weights=cj)
        p = cj / self.total
        denom = (cs[sinv] / self.total) * (ct[tinv] / self.total)
        nz = p > _EPS
        mi = float(np.sum(p[nz] * (np.log2(p[nz]) - np.log2(denom[nz]))))
        self._mi_cache[key] = mi
        return mi

    def total_information(self) -> float:
        """I between the full state at t and at t+1."""
        full = (1 << self.k) - 1
        return self.mutual_information(full, full)


def transition_distribution(seq: SymbolicSequence) -> TransitionModel:
    """Empirical transition pmf of a (deduplicated) sequence."""
    if seq.length < 2:
        raise ValueError("need at least 2 time steps to count transitions")
    return TransitionModel.from_pairs(seq.data[:-1], seq.data[1:], seq.alphabet)


# ---------------------------------------------------------------------------
# Double-lattice decomposition of a transition model
# ---------------------------------------------------------------------------

def double_redundancy_vector(model: TransitionModel, table: AntichainTable) -> DoubleLatticeVector:
    """Two-sided MMI redundancy: entry (i,j) is the minimum I(X_a; Y_b) over
    member pairs of the source antichain alpha_i and target antichain beta_j."""
    if table.n != model.k:
        raise ValueError(f"table is for n={table.n} but the model has {model.k} channels")
    size = len(table)
    nsub = (1 << model.k) - 1
    mi = np.empty((nsub + 1, nsub + 1))
    for a in range(1, nsub + 1):
        for b in range(1, nsub + 1):
            mi[a, b] = model.mutual_information(a, b)
    members = [np.array(a.members) for a in table.entries]
    values = np.empty(size * size)
    for i in range(size):
        rows = mi[members[i]]
        for j in range(size):
            values[i * size + j] = rows[:, members[j]].min()
    return DoubleLatticeVector(table, values)


def phiid_from_model(
    model: TransitionModel,
    matrix: SparseMobiusMatrix | None = None,
    measure: str = "mmi",
) -> tuple[DoubleLatticeVector, DoubleLatticeVector]:
    """Full double-lattice atoms of a transition model.

    Returns (atoms, redundancies). Only the two-sided MMI measure is
    defined for double lattices. Channel counts above 4 are rejected: the
    n=5 double lattice has 7579^2 atoms.
    """
    if measure != "mmi":
        raise ValueError("double-lattice decompositions support only the 'mmi' measure")
    if model.k > 4:
        raise CapacityError("double-lattice decomposition stops at 4 channels (7579^2 atoms at 5)")
    if matrix is None:
        matrix = build_mobius_matrix(enumerate_antichains(model.k))
    v = double_redundancy_vector(model, matrix.table)
    atoms = phiid_atoms(v, phiid_mobius(matrix))
    return atoms, v


# ---------------------------------------------------------------------------
# Information-dynamics categories
# ---------------------------------------------------------------------------

def classify_atom(alpha: Antichain, beta: Antichain) -> frozenset:
    """Overlapping category membership of the atom alpha -> beta.

    "Larger" compares group cardinalities; copy/erasure ask for a proper
    subset relation against any member of the other side.
    """
    if alpha.n != beta.n:
        raise ValueError(f"mixed channel counts: {alpha.n} vs {beta.n}")
    cats = set()
    a_sizes = [m.bit_count() for m in alpha.members]
    b_sizes = [m.bit_count() for m in beta.members]
    if alpha == beta:
        cats.add("storage")
    if len(alpha) == 1 and len(beta) == 1 and alpha != beta:
        cats.add("transfer")
    if len(beta) == 1 and b_sizes[0] > max(a_sizes):
        cats.add("bottom-up")
    if len(alpha) == 1 and a_sizes[0] > max(b_sizes):
        cats.add("top-down")
    if len(alpha) == 1:
        a = alpha.members[0]
        if any(a & b == a and a != b for b in beta.members):
            cats.add("copy")
    if len(beta) == 1:
        b = beta.members[0]
        if any(b & a == b and b != a for a in alpha.members):
            cats.add("erasure")
    return frozenset(cats)


def category_members(table: AntichainTable) -> dict:
    """Flat double-lattice indices per category (pure lattice structure)."""
    size = len(table)
    out: dict = {name: [] for name in CATEGORIES}
    for i, alpha in enumerate(table.entries):
        for j, beta in enumerate(table.entries):
            for name in classify_atom(alpha, beta):
                out[name].append(i * size + j)
    return {name: np.array(idx, dtype=np.int64) for name, idx in out.items()}


@dataclass
class CategoryStats:
    count: int
    mean_abs: float
    sem: float
    indices: np.ndarray


def category_report(atoms: DoubleLatticeVector, members: dict | None = None) -> dict:
    """Mean absolute atom value and standard error per category."""
    if members is None:
        members = category_members(atoms.table)
    report = {}
    for name in CATEGORIES:
        idx = members[name]
        vals = np.abs(atoms.values[idx])
        sem = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
        report[name] = CategoryStats(
            count=len(vals),
            mean_abs=float(vals.mean()) if len(vals) else 0.0,
            sem=sem,
            indices=idx,
        )
    return report


# ---------------------------------------------------------------------------
# Shuffle-null bias correction
# ---------------------------------------------------------------------------

@dataclass
class CorrectedDecomposition:
    """Raw and bias-corrected double-lattice atoms plus null statistics."""

    table: AntichainTable
    raw: DoubleLatticeVector
    corrected: DoubleLatticeVector
    null_mean: np.ndarray
    null_std: np.ndarray
    n_shuffles: int


def shuffle_null_correction(
    seq: SymbolicSequence,
    n_shuffles: int,
    seed: int = 0,
    matrix: SparseMobiusMatrix | None = None,
) -> CorrectedDecomposition:
    """Bias-correct transition atoms against a temporal-shuffle null.

    The sequence is deduplicated, decomposed, and compared against
    n_shuffles permutations of the deduplicated state order (each shuffle is
    deduplicated again, since a permutation can create fresh adjacent
    repeats). Corrected values are raw minus the null mean. Deterministic
    for a fixed seed.
    """
    if n_shuffles < 0:
        raise ValueError("n_shuffles must be >= 0")
    deduped = dedupe_consecutive(seq)
    if matrix is None:
        matrix = build_mobius_matrix(enumerate_antichains(deduped.channels))
    raw, _ = phiid_from_model(transition_distribution(deduped), matrix)
    size2 = len(matrix.table) ** 2
    if n_shuffles == 0:
        warnings.warn("n_shuffles=0: returning uncorrected atoms", RuntimeWarning, stacklevel=2)
        return CorrectedDecomposition(
            table=matrix.table,
            raw=raw,
            corrected=DoubleLatticeVector(matrix.table, raw.values.copy()),
            null_mean=np.zeros(size2),
            null_std=np.zeros(size2),
            n_shuffles=0,
        )
    rng = np.random.default_rng(seed)
    replicates = []
    for _ in range(n_shuffles):
        perm = rng.permutation(deduped.length)
        shuffled = dedupe_consecutive(SymbolicSequence(deduped.data[perm], deduped.alphabet))
        atoms, _ = phiid_from_model(transition_distribution(shuffled), matrix)
        replicates.append(atoms.values)
    null = np.stack(replicates)
    null_mean = null.mean(axis=0)
    null_std = null.std(axis=0, ddof=1) if n_shuffles > 1 else np.zeros(size2)
    return CorrectedDecomposition(
        table=matrix.table,
        raw=raw,
        corrected=DoubleLatticeVector(matrix.table, raw.values - null_mean),
        null_mean=null_mean,
        null_std=null_std,
        n_shuffles=n_shuffles,
    )


# ---------------------------------------------------------------------------
# Synthetic validation sequences
# ---------------------------------------------------------------------------

def redundant_voice_sequence(
    length: int,
    fold: int = 2,
    alphabet: int = 13,
    seed: int = 0,
) -> SymbolicSequence:
    """Four voices where lower parts echo the first voice with fixed shifts.

    Channel order is (S, A, T, B). The 2-fold construction keeps S and A
    free and sets T[t+1] = (S[t] - 4) mod alphabet and
    B[t+1] = (S[t] - 6) mod alphabet; the 3-fold construction additionally
    sets A[t+1] = (S[t] - 2) mod alphabet. All transition information then
    flows from S into the echoing voices, redundantly.
    """
    if fold not in (2, 3):
        raise ValueError("fold must be 2 or 3")
    if length < 3:
        raise ValueError("need at least 3 time steps")
    rng = np.random.default_rng(seed)
    data = rng.integers(0, alphabet, size=(length, 4))
    s = data[:, 0]
    data[1:, 2] = (s[:-1] - 4) % alphabet
    data[1:, 3] = (s[:-1] - 6) % alphabet
    if fold == 3:
        data[1:, 1] = (s[:-1] - 2) % alphabet
    return SymbolicSequence(data, alphabet)
