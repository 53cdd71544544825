"""Max-min-variance partitioning of a subcarrier pool across UEs.

The problem: split {1..N} into K disjoint index subsets with prescribed
cardinalities so that the smallest subset variance is as large as possible
(equivalently, the largest per-UE range CRB is as small as possible).

Ships three routes:
  * ``variance_bound``        - certified upper bound on the optimum,
  * ``interleaved_partition`` - the near-optimal shift-family solution,
  * ``exact_partition``       - exhaustive ground truth for small pools,
plus ``crb_gap``, the exact relative CRB gap between the interleaved
solution and the bound, (K-1)(K+1) / [(N-1)(N+1) - (K-1)(K+1)].
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import CapacityError, ConfigError
from .model import index_variance


@dataclass(frozen=True)
class PartitionInstance:
    """Pool size, number of UEs and per-UE subset cardinalities."""

    pool_size: int
    n_ues: int
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if self.n_ues < 1 or len(self.counts) != self.n_ues:
            raise ConfigError("counts must list one cardinality per UE")
        if any(c < 1 for c in self.counts):
            raise ConfigError("every count must be >= 1")
        if sum(self.counts) > self.pool_size:
            raise ConfigError(
                f"counts sum to {sum(self.counts)} > pool size {self.pool_size}")


@dataclass(frozen=True)
class PartitionSolution:
    """K disjoint index subsets with their certificates.

    ``gap`` is the relative CRB gap (bound/min_variance - 1), i.e. how far
    the achieved worst-UE CRB sits above the certified lower bound.
    """

    subsets: tuple[tuple[int, ...], ...]
    min_variance: float
    bound: float
    gap: float


@dataclass(frozen=True)
class VarianceBound:
    """Per-UE bounds N*eps_t/(K*N_k) and the binding (smallest) value."""

    pool_variance: float  # eps_t = (N^2-1)/12
    per_ue: tuple[float, ...]
    binding: float


def pool_variance(pool_size: int) -> float:
    """Variance of the full index pool {1..N}: (N^2 - 1)/12, exact."""
    return (pool_size * pool_size - 1) / 12.0


def variance_bound(instance: PartitionInstance) -> VarianceBound:
    """Upper bound on the max-min subset variance, reported per UE."""
    n = instance.pool_size
    eps_t = pool_variance(n)
    per_ue = tuple(n * eps_t / (instance.n_ues * c) for c in instance.counts)
    return VarianceBound(pool_variance=eps_t, per_ue=per_ue, binding=min(per_ue))


def interleaved_partition(instance: PartitionInstance) -> PartitionSolution:
    """Subset k = {k, k+K, k+2K, ...}; all K subsets share one variance.

    Requires equal counts N_k = N/K (the shift-family construction needs
    congruent subsets).
    """
    n, k_ues = instance.pool_size, instance.n_ues
    counts = set(instance.counts)
    if len(counts) != 1 or counts.pop() * k_ues != n:
        raise ConfigError(
            "interleaved partition requires equal counts with K*N_k = N")
    per = n // k_ues
    subsets = tuple(tuple(range(k, n + 1, k_ues)) for k in range(1, k_ues + 1))
    common = index_variance(subsets[0])
    bnd = variance_bound(instance).binding
    gap = float("nan") if common == 0 else bnd / common - 1.0
    assert per == len(subsets[0])  # guaranteed by the equal-counts check
    return PartitionSolution(subsets=subsets, min_variance=common,
                             bound=bnd, gap=gap)


def crb_gap(n: int, k: int) -> Fraction:
    """Exact relative CRB gap of the interleaved partition vs the bound."""
    if not (1 <= k <= n):
        raise ConfigError(f"need 1 <= K <= N, got K={k}, N={n}")
    num = (k - 1) * (k + 1)
    den = (n - 1) * (n + 1) - num
    return Fraction(num, den)


def variance_decomposition(subsets, pool_indices=None):
    """Split total squared deviation into within- and between-subset parts.

    Returns (total, within, between) where ``total`` is the squared
    deviation of all assigned indices about their grand mean; the identity
    total == within + between holds for every partition.
    """
    all_idx = [i for s in subsets for i in s]
    if pool_indices is not None and sorted(all_idx) != sorted(pool_indices):
        raise ConfigError("subsets do not cover the given pool")
    n = len(all_idx)
    grand = sum(all_idx) / n
    total = sum((i - grand) ** 2 for i in all_idx)
    within = 0.0
    between = 0.0
    for s in subsets:
        m = sum(s) / len(s)
        within += sum((i - m) ** 2 for i in s)
        between += len(s) * (m - grand) ** 2
    return total, within, between


def _partition_count(n: int, counts: tuple[int, ...]) -> int:
    total = 0
    remaining = n
    count = 1
    for c in counts:
        count *= math.comb(remaining, c)
        remaining -= c
    return count


def exact_partition(instance: PartitionInstance,
                    max_enumerations: int = 10_000_000) -> PartitionSolution:
    """Globally optimal max-min-variance partition by exhaustive search.

    Symmetry pruning: among UEs with identical counts the subsets are
    interchangeable, so their minimal elements are forced to be increasing.
    Ties between equally optimal partitions break toward the
    lexicographically smallest subset list.  Leftover indices
    (sum(counts) < N) stay unassigned.
    """
    n = instance.pool_size
    counts = instance.counts
    if _partition_count(n, counts) > max_enumerations:
        raise CapacityError(
            f"instance needs more than {max_enumerations} enumerations")

    best: tuple[float, tuple[tuple[int, ...], ...]] | None = None

    def recurse(remaining: tuple[int, ...], chosen: list[tuple[int, ...]],
                current_min: float):
        nonlocal best
        k = len(chosen)
        if k == len(counts):
            cand = (current_min, tuple(chosen))
            if best is None or cand[0] > best[0] + 1e-12 or (
                    abs(cand[0] - best[0]) <= 1e-12 and cand[1] < best[1]):
                best = cand
            return
        c = counts[k]
        same_size_prev = k > 0 and counts[k - 1] == c
        for subset in combinations(remaining, c):
            if same_size_prev and subset[0] < chosen[-1][0]:
                continue  # interchangeable with an already-tried ordering
            v = index_variance(subset)
            new_min = min(current_min, v)
            if best is not None and new_min < best[0] - 1e-12:
                continue
            rest = tuple(i for i in remaining if i not in set(subset))
            recurse(rest, chosen + [subset], new_min)

    recurse(tuple(range(1, n + 1)), [], math.inf)
    assert best is not None
    min_var, subsets = best
    bnd = variance_bound(instance).binding
    gap = float("nan") if min_var == 0 else bnd / min_var - 1.0
    return PartitionSolution(subsets=subsets, min_variance=min_var,
                             bound=bnd, gap=gap)


def enumerate_partitions(instance: PartitionInstance,
                         max_enumerations: int = 10_000_000):
    """Yield every partition (no pruning) as a tuple of index tuples.

    Order is deterministic.  UEs with equal counts produce permuted
    duplicates by design; use this as a brute-force oracle.
    """
    n = instance.pool_size
    counts = instance.counts
    if _partition_count(n, counts) > max_enumerations:
        raise CapacityError(
            f"instance needs more than {max_enumerations} enumerations")

    def recurse(remaining: tuple[int, ...], k: int):
        if k == len(counts):
            yield ()
            return
        for subset in combinations(remaining, counts[k]):
            rest = tuple(i for i in remaining if i not in set(subset))
            for tail in recurse(rest, k + 1):
                yield (subset,) + tail

    yield from recurse(tuple(range(1, n + 1)), 0)
