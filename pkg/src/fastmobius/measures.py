"""Discrete joint distributions, mutual information, and the redundancy
measures that populate lattice vectors.

All information values are in bits (log base 2), with the 0*log(0) = 0
convention; probabilities below 1e-15 are treated as exact zeros inside the
entropy sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .lattice import Antichain, AntichainTable
from .mobius import DoubleLatticeVector, LatticeVector

_EPS = 1e-15

#: Dense pmf cell budget. Every workload here fits comfortably; anything
#: larger (e.g. 13^8 chord transitions) must go through sparse counting in
#: the dynamics module instead.
MAX_PMF_CELLS = 1 << 26

CANONICAL_NAMES = ("uniform", "xor", "unq", "red")


@dataclass
class JointDistribution:
    """A pmf over (X_1..X_n, Y_1..Y_m) with finite alphabets.

    The array has shape (*source_arities, *target_arities). The flat layout
    used by the JSON format and the scripting bindings has sources varying
    fastest; use from_flat / to_flat for that view.
    """

    source_arities: tuple[int, ...]
    target_arities: tuple[int, ...]
    pmf: np.ndarray

    def __post_init__(self) -> None:
        self.source_arities = tuple(int(a) for a in self.source_arities)
        self.target_arities = tuple(int(a) for a in self.target_arities)
        if not self.source_arities or not self.target_arities:
            raise ValueError("need at least one source and one target variable")
        if any(a < 2 for a in self.source_arities + self.target_arities):
            raise ValueError("every variable needs an alphabet of size >= 2")
        cells = int(np.prod(self.source_arities + self.target_arities))
        if cells > MAX_PMF_CELLS:
            raise ValueError(
                f"dense pmf with {cells:,} cells exceeds the {MAX_PMF_CELLS:,} cap; "
                "use sparse transition counting instead"
            )
        self.pmf = np.asarray(self.pmf, dtype=np.float64).reshape(
            self.source_arities + self.target_arities
        )
        if self.pmf.min() < -1e-12:
            raise ValueError("negative probability in pmf")
        self.pmf = np.clip(self.pmf, 0.0, None)
        total = float(self.pmf.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"pmf sums to {total!r}, not 1")

    @property
    def n(self) -> int:
        return len(self.source_arities)

    @property
    def m(self) -> int:
        return len(self.target_arities)

    @classmethod
    def from_flat(
        cls,
        flat: Iterable[float],
        source_arities: Iterable[int],
        target_arities: Iterable[int],
    ) -> "JointDistribution":
        """Build from a flat buffer with sources varying fastest."""
        sa = tuple(int(a) for a in source_arities)
        ta = tuple(int(a) for a in target_arities)
        arr = np.asarray(list(flat), dtype=np.float64).reshape(sa + ta, order="F")
        return cls(sa, ta, arr)

    def to_flat(self) -> np.ndarray:
        return self.pmf.ravel(order="F")

    def to_json_dict(self) -> dict:
        """State-listed JSON form; cells omitted from "pmf" are zero."""
        states = []
        for idx in np.argwhere(self.pmf > 0):
            states.append({"state": [int(i) for i in idx], "p": float(self.pmf[tuple(idx)])})
        return {
            "source_arities": list(self.source_arities),
            "target_arities": list(self.target_arities),
            "pmf": states,
        }

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "JointDistribution":
        try:
            sa = tuple(int(a) for a in obj["source_arities"])
            ta = tuple(int(a) for a in obj["target_arities"])
            cells = obj["pmf"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed distribution JSON: {exc}") from None
        arr = np.zeros(sa + ta)
        for cell in cells:
            state = tuple(int(i) for i in cell["state"])
            if len(state) != len(sa) + len(ta):
                raise ValueError(f"state {state} has wrong length")
            for sym, arity in zip(state, sa + ta):
                if not 0 <= sym < arity:
                    raise ValueError(f"state {state} outside declared arities")
            arr[state] += float(cell["p"])
        return cls(sa, ta, arr)


def _indices_from(spec, count: int, kind: str) -> list[int]:
    """Normalize a bitmask or iterable of 1-based indices to 0-based axes."""
    if isinstance(spec, (int, np.integer)):
        if spec <= 0 or spec >> count:
            raise ValueError(f"{kind} mask {spec:#x} empty or outside 1..{count}")
        return [i for i in range(count) if spec >> i & 1]
    idx = sorted(set(int(i) for i in spec))
    if not idx:
        raise ValueError(f"{kind} selection is empty")
    if idx[0] < 1 or idx[-1] > count:
        raise ValueError(f"{kind} indices {idx} outside 1..{count}")
    return [i - 1 for i in idx]


def _mi_2d(joint: np.ndarray) -> float:
    pa = joint.sum(axis=1)
    pb = joint.sum(axis=0)
    nz = joint > _EPS
    p = joint[nz]
    denom = np.outer(pa, pb)[nz]
    return float(np.sum(p * (np.log2(p) - np.log2(denom))))


def _pair_marginal(d: JointDistribution, src_axes: list[int], tgt_axes: list[int]) -> np.ndarray:
    keep = src_axes + [d.n + t for t in tgt_axes]
    drop = tuple(ax for ax in range(d.pmf.ndim) if ax not in keep)
    marg = d.pmf.sum(axis=drop) if drop else d.pmf
    rows = int(np.prod([d.source_arities[i] for i in src_axes]))
    return marg.reshape(rows, -1)


def mutual_information(d: JointDistribution, sources, targets=None) -> float:
    """Shannon mutual information in bits between source and target subsets.

    sources/targets are 1-based index bitmasks or iterables of 1-based
    indices; targets defaults to all target variables.
    """
    src = _indices_from(sources, d.n, "source")
    if targets is None:
        targets = range(1, d.m + 1)
    tgt = _indices_from(targets, d.m, "target")
    return _mi_2d(_pair_marginal(d, src, tgt))


# ---------------------------------------------------------------------------
# Canonical test distributions (binary sources, binary target)
# ---------------------------------------------------------------------------

def canonical_distribution(name: str, n: int = 5) -> JointDistribution:
    """The four benchmark distributions on n binary sources and one binary
    target: uniform noise, parity (xor), a single perfect copy (unq), and
    full redundancy (red)."""
    if name not in CANONICAL_NAMES:
        raise ValueError(f"unknown canonical distribution {name!r}; choose from {CANONICAL_NAMES}")
    if n < 1:
        raise ValueError("need at least one source")
    shape = (2,) * n + (2,)
    grid = np.indices(shape)
    xs = grid[:n]
    y = grid[n]
    if name == "uniform":
        pmf = np.full(shape, 1.0 / 2 ** (n + 1))
    elif name == "xor":
        pmf = np.where(xs.sum(axis=0) % 2 == y, 1.0 / 2**n, 0.0)
    elif name == "unq":
        pmf = np.where(xs[0] == y, 1.0 / 2**n, 0.0)
    else:  # red
        all_equal = np.ones(shape, dtype=bool)
        for x in xs:
            all_equal &= x == y
        pmf = np.where(all_equal, 0.5, 0.0)
    return JointDistribution((2,) * n, (2,), pmf)


# ---------------------------------------------------------------------------
# Redundancy measures
# ---------------------------------------------------------------------------

def _require_single_target(d: JointDistribution, what: str) -> None:
    if d.m != 1:
        raise ValueError(f"{what} needs a single target variable, got {d.m}")


def i_mmi(d: JointDistribution, alpha: Antichain, _cache: dict | None = None) -> float:
    """Minimum over the antichain's members of their mutual information with
    the target. Monotone along the lattice by construction."""
    _require_single_target(d, "i_mmi")
    if _cache is None:
        _cache = {}
    best = np.inf
    for mask in alpha.members:
        mi = _cache.get(mask)
        if mi is None:
            mi = mutual_information(d, mask)
            _cache[mask] = mi
        best = min(best, mi)
    return float(best)


def _specific_information(d: JointDistribution, mask: int) -> np.ndarray:
    """I_spec(Y=y; X_A) for each y: the average surprisal reduction about
    Y=y from seeing the group A, sum_{x_A} p(x_A|y) [log2 p(y|x_A) - log2 p(y)].

    Zero-probability (x_A, y) cells contribute nothing; outcomes with
    p(y) = 0 are reported as 0 and skipped by the caller's weighting.
    """
    joint = _pair_marginal(d, _indices_from(mask, d.n, "source"), [0])
    p_y = joint.sum(axis=0)
    p_x = joint.sum(axis=1)
    out = np.zeros(joint.shape[1])
    for yi in range(joint.shape[1]):
        if p_y[yi] <= _EPS:
            continue
        col = joint[:, yi]
        nz = col > _EPS
        p_x_given_y = col[nz] / p_y[yi]
        p_y_given_x = col[nz] / p_x[nz]
        out[yi] = np.sum(p_x_given_y * (np.log2(p_y_given_x) - np.log2(p_y[yi])))
    return out


def i_min(d: JointDistribution, alpha: Antichain, _cache: dict | None = None) -> float:
    """Expected minimum specific information over the antichain's members:
    sum_y p(y) min_{A in alpha} I_spec(Y=y; X_A)."""
    _require_single_target(d, "i_min")
    if _cache is None:
        _cache = {}
    specs = []
    for mask in alpha.members:
        s = _cache.get(mask)
        if s is None:
            s = _specific_information(d, mask)
            _cache[mask] = s
        specs.append(s)
    minimum = np.minimum.reduce(specs)
    p_y = _pair_marginal(d, [0], [0]).sum(axis=0)
    return float(np.sum(p_y * minimum))


def phiid_mmi(d: JointDistribution, alpha: Antichain, beta: Antichain, _cache: dict | None = None) -> float:
    """Two-sided minimum mutual information: min over source-target member
    pairs of I(X_a; Y_b)."""
    if _cache is None:
        _cache = {}
    best = np.inf
    for a in alpha.members:
        for b in beta.members:
            mi = _cache.get((a, b))
            if mi is None:
                mi = mutual_information(d, a, b)
                _cache[(a, b)] = mi
            best = min(best, mi)
    return float(best)


MEASURES = ("min", "mmi")


def redundancy_vector(d: JointDistribution, table: AntichainTable, measure: str = "mmi") -> LatticeVector:
    """Evaluate the chosen redundancy measure at every lattice element.

    Per-group quantities are cached, so the cost is one pass over the 2^n
    source groups plus a min per antichain.
    """
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}; choose from {MEASURES}")
    _require_single_target(d, "redundancy_vector")
    if table.n != d.n:
        raise ValueError(f"table is for n={table.n} but distribution has {d.n} sources")
    cache: dict = {}
    fn = i_mmi if measure == "mmi" else i_min
    values = np.array([fn(d, a, cache) for a in table.entries])
    return LatticeVector(table, values)


def phiid_redundancy_vector(d: JointDistribution, table: AntichainTable) -> DoubleLatticeVector:
    """Double-lattice redundancy under the two-sided MMI measure.

    Entry (i, j) is min over member pairs of I(X_a; Y_b); requires the
    distribution to have as many targets as sources (one lattice serves
    both sides).
    """
    if d.n != d.m:
        raise ValueError("two-sided decomposition needs matching source/target counts")
    if table.n != d.n:
        raise ValueError(f"table is for n={table.n} but distribution has {d.n} sources")
    cache: dict = {}
    size = len(table)
    values = np.empty(size * size)
    for i, alpha in enumerate(table.entries):
        for j, beta in enumerate(table.entries):
            values[i * size + j] = phiid_mmi(d, alpha, beta, cache)
    return DoubleLatticeVector(table, values)


# ---------------------------------------------------------------------------
# Estimation plumbing
# ---------------------------------------------------------------------------

def empirical_distribution(
    samples,
    source_cols: Iterable[int],
    target_cols: Iterable[int],
    source_arities: Iterable[int] | None = None,
    target_arities: Iterable[int] | None = None,
) -> JointDistribution:
    """Maximum-likelihood (frequency) pmf from a table of discrete samples.

    Columns are 0-based positions into the sample rows. Arities default to
    max observed value + 1, floored at 2.
    """
    data = np.asarray(samples)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValueError("samples must be a nonempty 2-D table")
    if not np.issubdtype(data.dtype, np.integer):
        rounded = np.rint(data)
        if np.max(np.abs(data - rounded)) > 1e-9:
            raise ValueError("samples must be discrete integers (binarize first?)")
        data = rounded.astype(np.int64)
    src = list(source_cols)
    tgt = list(target_cols)
    if not src or not tgt:
        raise ValueError("need at least one source column and one target column")
    cols = src + tgt
    sub = data[:, cols]
    if sub.min() < 0:
        raise ValueError("negative symbol in samples")

    def resolve(declared, block):
        if declared is None:
            return tuple(max(2, int(block[:, i].max()) + 1) for i in range(block.shape[1]))
        declared = tuple(int(a) for a in declared)
        for i, a in enumerate(declared):
            if block[:, i].max() >= a:
                raise ValueError(
                    f"symbol {int(block[:, i].max())} outside declared arity {a} in column {i}"
                )
        return declared

    sa = resolve(source_arities, sub[:, : len(src)])
    ta = resolve(target_arities, sub[:, len(src):])
    counts = np.zeros(sa + ta)
    np.add.at(counts, tuple(sub.T), 1.0)
    return JointDistribution(sa, ta, counts / data.shape[0])


def median_binarize(column) -> np.ndarray:
    """1 where the value strictly exceeds the series median, else 0.

    Even-length series compare against the midpoint of the two central
    values; a constant series maps to all zeros.
    """
    x = np.asarray(column, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("median_binarize expects a nonempty 1-D series")
    return (x > np.median(x)).astype(np.int64)
