"""Redundancy lattice machinery.

The elements of the redundancy lattice on n sources are the antichains of
nonempty subsets of {1..n}: families of source groups where no group contains
another. Subsets are stored as bitmasks (bit i-1 set means index i is in the
group), and families of subsets as bitsets over all 2^n subset masks, so that
the order-ideal calculus behind the closed-form Mobius function reduces to
integer bit operations.

Ordering convention: alpha <= beta iff every member of beta contains some
member of alpha, so the all-singletons antichain (1)(2)...(n) is the bottom
and the full set (1...n) is the top. The main-text-style reading with the
quantifiers swapped orders the lattice upside down; we keep the convention
under which singletons sit at the bottom of the usual Hasse diagrams. See
README for discussion.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

#: Dedekind numbers M(n): antichains of the n-element powerset (including the
#: empty antichain and the antichain containing only the empty set).
DEDEKIND = {0: 2, 1: 3, 2: 6, 3: 20, 4: 168, 5: 7581, 6: 7_828_354}

#: Largest n enumerated without an explicit override. The n=6 lattice has
#: M(6) - 2 = 7,828,352 elements and its Mobius matrix would need hundreds of
#: gigabytes at the observed sparsity, so it is rejected by default.
MAX_DEFAULT_N = 5

#: Hard cap on source indices in a single group (bitmask width).
MAX_SOURCES = 16


class CapacityError(ValueError):
    """A request whose lattice or matrix is too large to build."""


# ---------------------------------------------------------------------------
# Source sets (bitmask helpers)
# ---------------------------------------------------------------------------

def source_set(indices: Iterable[int], n: int) -> int:
    """Bitmask for a nonempty group of 1-based source indices."""
    mask = 0
    for i in indices:
        if not 1 <= i <= n:
            raise ValueError(f"source index {i} outside 1..{n}")
        mask |= 1 << (i - 1)
    if mask == 0:
        raise ValueError("source sets must be nonempty")
    return mask


def source_indices(mask: int) -> tuple[int, ...]:
    """1-based indices of a source-set bitmask, ascending."""
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def format_source_set(mask: int) -> str:
    return "(" + "".join(str(i) for i in source_indices(mask)) + ")"


@lru_cache(maxsize=None)
def _closure_tables(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Per-mask bitsets of all submasks (sub) and supermasks (sup).

    sub[m] has bit s set iff s is a subset of m (including s=0 and s=m);
    sup[m] the dual. Bitsets live over all 2^n subset masks.
    """
    size = 1 << n
    sub = [0] * size
    sub[0] = 1
    for m in range(1, size):
        low = m & -m
        rest = sub[m ^ low]
        sub[m] = rest | (rest << low)
    sup = [0] * size
    for m in range(size):
        sm = sub[m]
        for s in range(size):
            if sm >> s & 1:
                sup[s] |= 1 << m
    return tuple(sub), tuple(sup)


def _family_masks(bits: int) -> tuple[int, ...]:
    """Subset masks present in a family bitset, ascending."""
    return tuple(s for s in range(bits.bit_length()) if bits >> s & 1)


def is_antichain(family: Iterable[int]) -> bool:
    """True iff no member of the family is a subset of another member.

    Members are subset bitmasks; the empty family is vacuously an antichain
    (the Mobius formula relies on that for the diagonal).
    """
    masks = list(family)
    for a in masks:
        for b in masks:
            if a != b and a & b == a:
                return False
    return True


# ---------------------------------------------------------------------------
# Antichains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Antichain:
    """A canonical antichain of nonempty source groups over n sources.

    Members are subset bitmasks in strictly increasing order. Instances are
    immutable and hashable; use :meth:`from_masks` / :meth:`from_sets` /
    :meth:`parse` rather than fiddling with masks by hand.
    """

    n: int
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_SOURCES:
            raise ValueError(f"n={self.n} outside 1..{MAX_SOURCES}")
        if not self.members:
            raise ValueError("antichain must have at least one member")
        full = (1 << self.n) - 1
        prev = 0
        for m in self.members:
            if m <= 0 or m & ~full:
                raise ValueError(f"member {m:#x} not a nonempty subset of 1..{self.n}")
            if m <= prev:
                raise ValueError("members must be strictly increasing bitmasks")
            prev = m
        if not is_antichain(self.members):
            raise ValueError(f"family {self.members} is not an antichain")

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "Antichain":
        return cls(n, tuple(sorted(set(masks))))

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "Antichain":
        return cls.from_masks(n, (source_set(s, n) for s in sets))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Antichain":
        """Parse the "(12)(3)" text form.

        Indices are single digits 1-9. Duplicate groups, empty groups and
        families with nested groups are rejected.
        """
        if not re.fullmatch(r"(?:\([1-9]+\))+", text):
            raise ValueError(f"malformed antichain {text!r}; expected e.g. '(12)(3)'")
        groups = re.findall(r"\(([1-9]+)\)", text)
        masks = []
        for g in groups:
            if len(set(g)) != len(g):
                raise ValueError(f"repeated index inside group ({g})")
            masks.append(sum(1 << (int(c) - 1) for c in g))
        if len(set(masks)) != len(masks):
            raise ValueError(f"duplicate group in {text!r}")
        if n is None:
            n = max(m.bit_length() for m in masks)
        return cls.from_masks(n, masks)

    def __str__(self) -> str:
        return "".join(format_source_set(m) for m in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def member_sets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(source_indices(m) for m in self.members)


@dataclass(frozen=True)
class BottomFamily:
    """The family containing only the empty set.

    This is the complement of the top antichain (1...n). It is not a valid
    element of the redundancy lattice, but ideal_of must accept it so that
    the complement-ideal of the top element comes out as {emptyset}.
    """

    n: int

    members: tuple[int, ...] = (0,)

    def __str__(self) -> str:  # pragma: no cover - debugging aid
        return "()"


def _check_same_n(alpha, beta) -> int:
    if alpha.n != beta.n:
        raise ValueError(f"mixed source counts: {alpha.n} vs {beta.n}")
    return alpha.n


def antichain_leq(alpha: Antichain, beta: Antichain) -> bool:
    """Lattice order: every member of beta contains some member of alpha."""
    _check_same_n(alpha, beta)
    return all(any(a & b == a for a in alpha.members) for b in beta.members)


def complement(alpha: Antichain | BottomFamily):
    """Memberwise complement {1..n}\\a for each group a.

    An involution that reverses inclusion among members. The top antichain
    maps to the BottomFamily {emptyset} and vice versa.
    """
    full = (1 << alpha.n) - 1
    if isinstance(alpha, BottomFamily):
        return Antichain(alpha.n, (full,))
    masks = tuple(sorted(full ^ m for m in alpha.members))
    if masks == (0,):
        return BottomFamily(alpha.n)
    return Antichain(alpha.n, masks)


# ---------------------------------------------------------------------------
# Down-sets (order ideals of the powerset)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DownSet:
    """A downward-closed family of subsets of {1..n}, as a 2^n-wide bitset.

    Bit s is set iff subset mask s belongs to the family; bit 0 (the empty
    set) is always set.
    """

    n: int
    bits: int

    def __post_init__(self) -> None:
        if self.bits <= 0 or self.bits >> (1 << self.n):
            raise ValueError("down-set bitset empty or out of range")
        sub, _ = _closure_tables(self.n)
        for s in _family_masks(self.bits):
            if sub[s] & ~self.bits:
                raise ValueError(f"family not downward closed at {format_source_set(s)}")

    def __contains__(self, mask: int) -> bool:
        return bool(self.bits >> mask & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def masks(self) -> tuple[int, ...]:
        return _family_masks(self.bits)

    def issubset(self, other: "DownSet") -> bool:
        return self.n == other.n and not self.bits & ~other.bits

    def minus(self, other: "DownSet") -> tuple[int, ...]:
        """Set difference as a plain family of subset masks (not a DownSet)."""
        return _family_masks(self.bits & ~other.bits)


def ideal_of(family, n: int | None = None) -> DownSet:
    """Smallest downward-closed family containing the given subsets.

    Accepts an Antichain, the BottomFamily, or any iterable of subset masks
    (n required in that case). Always contains the empty set.
    """
    if isinstance(family, (Antichain, BottomFamily)):
        n = family.n
        masks = family.members
    else:
        if n is None:
            raise ValueError("n is required for a raw mask family")
        masks = tuple(family)
    sub, _ = _closure_tables(n)
    bits = 1  # the empty set
    for m in masks:
        bits |= sub[m]
    return DownSet(n, bits)


# ---------------------------------------------------------------------------
# Meet and join
# ---------------------------------------------------------------------------

def _minimal_masks(masks: Iterable[int]) -> tuple[int, ...]:
    pool = sorted(set(masks))
    keep = [m for m in pool if not any(o != m and o & m == o for o in pool)]
    return tuple(keep)


def meet(alpha: Antichain, beta: Antichain) -> Antichain:
    """Greatest lower bound: inclusion-minimal members of the union."""
    n = _check_same_n(alpha, beta)
    return Antichain(n, _minimal_masks(alpha.members + beta.members))


def join(alpha: Antichain, beta: Antichain) -> Antichain:
    """Least upper bound: minimal elements among pairwise unions."""
    n = _check_same_n(alpha, beta)
    unions = (a | b for a in alpha.members for b in beta.members)
    return Antichain(n, _minimal_masks(unions))


# ---------------------------------------------------------------------------
# Lattice enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AntichainTable:
    """All lattice elements for a given n, in canonical global order.

    The order is descending antichain cardinality with lexicographic
    tie-break on the member masks, so decompositions list redundancy first
    and full synergy last: n=2 reads (1)(2), (1), (2), (12).

    comp_ideal_bits[i] is the order ideal generated by the complement of
    entry i (a 2^n-wide bitset); the lattice order is reverse inclusion of
    those ideals, which is how every bulk operation here tests it.
    """

    n: int
    entries: tuple[Antichain, ...]
    index: dict
    comp_ideal_bits: tuple[int, ...]
    downset_bits: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Antichain]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> Antichain:
        return self.entries[i]

    def position(self, alpha: Antichain) -> int:
        try:
            return self.index[alpha]
        except KeyError:
            raise KeyError(f"{alpha} is not an element of the n={self.n} lattice") from None

    def leq(self, i: int, j: int) -> bool:
        """Order test by ideal inclusion: alpha_i <= alpha_j."""
        return not self.comp_ideal_bits[j] & ~self.comp_ideal_bits[i]

    def top_index(self) -> int:
        return self.index[Antichain(self.n, ((1 << self.n) - 1,))]

    def bottom_index(self) -> int:
        return self.index[Antichain(self.n, tuple(1 << i for i in range(self.n)))]


def _enumerate_ideal_bits(n: int) -> list[int]:
    """All nonempty order ideals of the poset of nonempty subsets of {1..n}.

    Ideals are bitsets over subset masks with bit 0 unused. Breadth-first
    closure: every ideal is reached by repeatedly adding a minimal
    non-member. Count equals M(n) - 2 once the empty ideal is dropped.
    """
    size = 1 << n
    sub, _ = _closure_tables(n)
    # Proper nonempty submasks of each mask, as a bitset.
    strict = [sub[m] & ~(1 << m) & ~1 for m in range(size)]
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for ideal in frontier:
            for m in range(1, size):
                if ideal >> m & 1:
                    continue
                if strict[m] & ~ideal:
                    continue
                grown = ideal | (1 << m)
                if grown not in seen:
                    seen.add(grown)
                    nxt.append(grown)
        frontier = nxt
    seen.discard(0)
    return sorted(seen)


@lru_cache(maxsize=8)
def enumerate_antichains(n: int, force: bool = False) -> AntichainTable:
    """Build the full lattice table for n sources.

    Counts are the Dedekind numbers minus two: 4, 18, 166, 7579 for
    n = 2..5. n above 5 is rejected unless force=True, since the element
    count jumps to M(6) - 2 = 7,828,352 and downstream matrices become
    hundreds of gigabytes.
    """
    if n < 2:
        raise ValueError("the lattice needs at least 2 sources")
    if n > MAX_SOURCES:
        raise CapacityError(f"n={n} exceeds the {MAX_SOURCES}-bit source encoding")
    if n > MAX_DEFAULT_N:
        if not force:
            raise CapacityError(
                f"n={n} rejected: the Dedekind numbers explode "
                f"(M(6)={DEDEKIND[6]:,} antichains); pass force=True to override"
            )
        warnings.warn(
            f"enumerating n={n} antichains; expect Dedekind-number blowup",
            RuntimeWarning,
            stacklevel=2,
        )

    _, sup = _closure_tables(n)
    full = (1 << n) - 1
    antichains = []
    for ideal in _enumerate_ideal_bits(n):
        members = tuple(
            m for m in _family_masks(ideal)
            if not ideal & sup[m] & ~(1 << m)
        )
        antichains.append(Antichain(n, members))
    antichains.sort(key=lambda a: (-len(a.members), a.members))

    expected = DEDEKIND[n] - 2 if n in DEDEKIND else None
    if expected is not None and len(antichains) != expected:
        raise AssertionError(
            f"enumeration produced {len(antichains)} antichains, expected {expected}"
        )

    sub, _ = _closure_tables(n)
    comp_bits = []
    down_bits = []
    for a in antichains:
        cb = 1
        db = 1
        for m in a.members:
            cb |= sub[full ^ m]
            db |= sub[m]
        comp_bits.append(cb)
        down_bits.append(db)

    return AntichainTable(
        n=n,
        entries=tuple(antichains),
        index={a: i for i, a in enumerate(antichains)},
        comp_ideal_bits=tuple(comp_bits),
        downset_bits=tuple(down_bits),
    )
