"""Finite functions, permutations and block combinatorics.

Everything lives over the sets (n] = {1, ..., n}, so all indexing in this
package is 1-based.  Values are immutable and safe to share between threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import OutOfRange, SizeMismatch


@dataclass(frozen=True, eq=False)
class FinFunction:
    """A function (domain_size] -> (codomain_size] given by its value tuple."""

    domain_size: int
    codomain_size: int
    values: tuple[int, ...]

    # equality is by graph, so a Permutation equals the FinFunction it refines
    def __eq__(self, other):
        if not isinstance(other, FinFunction):
            return NotImplemented
        return (self.domain_size, self.codomain_size, self.values) == \
            (other.domain_size, other.codomain_size, other.values)

    def __hash__(self):
        return hash((self.domain_size, self.codomain_size, self.values))

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.domain_size < 0 or self.codomain_size < 0:
            raise OutOfRange(f"negative size in {self.domain_size}->{self.codomain_size}")
        if len(self.values) != self.domain_size:
            raise SizeMismatch(
                f"expected {self.domain_size} values, got {len(self.values)}")
        for v in self.values:
            if not (isinstance(v, int) and 1 <= v <= self.codomain_size):
                raise OutOfRange(f"value {v} outside 1..{self.codomain_size}")

    @staticmethod
    def of(values: Sequence[int], codomain_size: int) -> "FinFunction":
        return FinFunction(len(values), codomain_size, tuple(values))

    @staticmethod
    def identity(n: int) -> "FinFunction":
        return FinFunction(n, n, tuple(range(1, n + 1)))

    @staticmethod
    def constant(n: int, value: int, codomain_size: int) -> "FinFunction":
        return FinFunction(n, codomain_size, (value,) * n)

    @staticmethod
    def point(i: int, n: int) -> "FinFunction":
        """The function (1] -> (n] picking i."""
        return FinFunction(1, n, (i,))

    def __call__(self, i: int) -> int:
        if not 1 <= i <= self.domain_size:
            raise OutOfRange(f"argument {i} outside 1..{self.domain_size}")
        return self.values[i - 1]

    def is_identity(self) -> bool:
        return self.domain_size == self.codomain_size and \
            self.values == tuple(range(1, self.domain_size + 1))

    def is_injective(self) -> bool:
        return len(set(self.values)) == self.domain_size

    def is_surjective(self) -> bool:
        return len(set(self.values)) == self.codomain_size

    def is_bijective(self) -> bool:
        return self.domain_size == self.codomain_size and self.is_injective()

    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.values, self.values[1:]))

    def fiber(self, j: int) -> tuple[int, ...]:
        """All i with f(i) = j, in increasing order."""
        return tuple(i for i in range(1, self.domain_size + 1) if self.values[i - 1] == j)

    def as_permutation(self) -> "Permutation":
        return Permutation(self.domain_size, self.codomain_size, self.values)


@dataclass(frozen=True)
class Permutation(FinFunction):
    """A bijective FinFunction with equal domain and codomain."""

    def __post_init__(self):
        super().__post_init__()
        if self.domain_size != self.codomain_size:
            raise SizeMismatch("permutation must have equal domain and codomain")
        if not self.is_injective():
            raise SizeMismatch(f"values {self.values} are not a permutation")

    @staticmethod
    def of(values: Sequence[int]) -> "Permutation":
        n = len(values)
        return Permutation(n, n, tuple(values))

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(n, n, tuple(range(1, n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.domain_size
        for i, v in enumerate(self.values, start=1):
            inv[v - 1] = i
        return Permutation.of(inv)


def compose(g: FinFunction, f: FinFunction) -> FinFunction:
    """Pointwise composition g o f (apply f first)."""
    if f.codomain_size != g.domain_size:
        raise SizeMismatch(
            f"cannot compose: middle sizes {f.codomain_size} != {g.domain_size}")
    values = tuple(g.values[v - 1] for v in f.values)
    if isinstance(g, Permutation) and isinstance(f, Permutation):
        return Permutation(f.domain_size, g.codomain_size, values)
    return FinFunction(f.domain_size, g.codomain_size, values)


def all_functions(domain_size: int, codomain_size: int) -> Iterator[FinFunction]:
    """All functions (domain_size] -> (codomain_size] in lexicographic order."""
    if domain_size == 0:
        yield FinFunction(0, codomain_size, ())
        return
    for values in itertools.product(range(1, codomain_size + 1), repeat=domain_size):
        yield FinFunction(domain_size, codomain_size, values)


def all_permutations(n: int) -> Iterator[Permutation]:
    for values in itertools.permutations(range(1, n + 1)):
        yield Permutation(n, n, values)


def all_injections(domain_size: int, codomain_size: int) -> Iterator[FinFunction]:
    for values in itertools.permutations(range(1, codomain_size + 1), domain_size):
        yield FinFunction(domain_size, codomain_size, values)


@dataclass(frozen=True)
class BlockStructure:
    """An ordered arity decomposition n = n_1 + ... + n_m."""

    block_sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "block_sizes", tuple(self.block_sizes))
        if any(s < 0 for s in self.block_sizes):
            raise OutOfRange(f"negative block in {self.block_sizes}")

    @property
    def total(self) -> int:
        return sum(self.block_sizes)

    @property
    def block_count(self) -> int:
        return len(self.block_sizes)

    def offset(self, i: int) -> int:
        """Number of positions strictly before block i."""
        if not 1 <= i <= self.block_count:
            raise OutOfRange(f"block {i} outside 1..{self.block_count}")
        return sum(self.block_sizes[: i - 1])

    def fiber_collapse(self) -> FinFunction:
        """The monotone map (total] -> (m] sending block i to i."""
        values = []
        for i, size in enumerate(self.block_sizes, start=1):
            values.extend([i] * size)
        return FinFunction(self.total, self.block_count, tuple(values))

    def block_inclusion(self, i: int) -> FinFunction:
        """The inclusion (n_i] -> (total] of block i."""
        off = self.offset(i)
        size = self.block_sizes[i - 1]
        return FinFunction(size, self.total, tuple(range(off + 1, off + size + 1)))


def lex_index(block: int, offset: int, structure: BlockStructure) -> int:
    """1-based position of the pair <block, offset> in the lexicographic order."""
    if not 1 <= block <= structure.block_count:
        raise OutOfRange(f"block {block} outside 1..{structure.block_count}")
    if not 1 <= offset <= structure.block_sizes[block - 1]:
        raise OutOfRange(
            f"offset {offset} outside 1..{structure.block_sizes[block - 1]}")
    return structure.offset(block) + offset


def lex_pair(position: int, structure: BlockStructure) -> tuple[int, int]:
    """Inverse of lex_index."""
    if not 1 <= position <= structure.total:
        raise OutOfRange(f"position {position} outside 1..{structure.total}")
    for i, size in enumerate(structure.block_sizes, start=1):
        if position <= size:
            return i, position
        position -= size
    raise OutOfRange("unreachable")  # pragma: no cover


def block_sum(blocks: Sequence[Permutation],
              structure: Optional[BlockStructure] = None) -> Permutation:
    """The permutation sigma_1 + ... + sigma_m acting inside consecutive blocks."""
    if structure is None:
        structure = BlockStructure(tuple(b.domain_size for b in blocks))
    if len(blocks) != structure.block_count:
        raise SizeMismatch("block count does not match structure")
    for b, size in zip(blocks, structure.block_sizes):
        if b.domain_size != size:
            raise SizeMismatch(f"block of size {b.domain_size} placed in slot of {size}")
    values = []
    for i, b in enumerate(blocks, start=1):
        off = structure.offset(i)
        values.extend(off + v for v in b.values)
    return Permutation.of(values)


def transport_blocks(sigmas: Sequence[FinFunction], tau: FinFunction) -> FinFunction:
    """Blockwise map <sigma_1,...,sigma_m> star tau between lexicographic sums.

    sigmas[i] : (k_i] -> (n_i] for i in (m], tau : (j] -> (m].  The result
    sends the lexicographic pair <i, r> over source blocks (k_tau(1), ...,
    k_tau(j)) to the pair <tau(i), sigma_tau(i)(r)> over target blocks
    (n_1, ..., n_m).
    """
    m = tau.codomain_size
    if len(sigmas) != m:
        raise SizeMismatch(f"expected {m} blocks, got {len(sigmas)}")
    target = BlockStructure(tuple(s.codomain_size for s in sigmas))
    source_sizes = tuple(sigmas[tau(i) - 1].domain_size for i in range(1, tau.domain_size + 1))
    source = BlockStructure(source_sizes)
    values = []
    for i in range(1, tau.domain_size + 1):
        s = sigmas[tau(i) - 1]
        for r in range(1, s.domain_size + 1):
            values.append(lex_index(tau(i), s(r), target))
    return FinFunction(source.total, target.total, tuple(values))


def pullback(f: FinFunction, p: FinFunction) -> tuple[FinFunction, FinFunction]:
    """Pullback of f : r -> m along p : r' -> m.

    Returns the projections (q1 : s -> r, q2 : s -> r') where s enumerates
    the pairs (a, b) with f(a) = p(b), ordered by (b, a).  q2 is therefore
    monotone, which makes the induced map over p monotone whenever f is.
    """
    if f.codomain_size != p.codomain_size:
        raise SizeMismatch(
            f"pullback needs equal codomains, got {f.codomain_size} and {p.codomain_size}")
    pairs = [(a, b)
             for b in range(1, p.domain_size + 1)
             for a in range(1, f.domain_size + 1)
             if f(a) == p(b)]
    q1 = FinFunction(len(pairs), f.domain_size, tuple(a for a, _ in pairs))
    q2 = FinFunction(len(pairs), p.domain_size, tuple(b for _, b in pairs))
    return q1, q2


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All ordered decompositions of total into `parts` non-negative summands."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest
