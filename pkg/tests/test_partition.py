import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import isac_lab as il
from isac_lab.errors import CapacityError, ConfigError


def _instance(n, k, counts=None):
    counts = counts or (n // k,) * k
    return il.PartitionInstance(pool_size=n, n_ues=k, counts=tuple(counts))


class TestVarianceBound:
    def test_desk_instance(self):
        bound = il.variance_bound(_instance(48, 3))
        assert bound.pool_variance == pytest.approx((48 ** 2 - 1) / 12, abs=0)
        assert bound.binding == pytest.approx(48 * bound.pool_variance / 48,
                                              rel=1e-15)
        assert bound.binding == pytest.approx(191.91666666666666, rel=1e-12)

    def test_interleaved_under_bound(self):
        sol = il.interleaved_partition(_instance(48, 3))
        assert sol.min_variance == pytest.approx(191.25, abs=0)
        assert sol.min_variance <= sol.bound

    def test_single_subset(self):
        bound = il.variance_bound(_instance(10, 1, (10,)))
        assert bound.binding == pytest.approx(bound.pool_variance)
        sol = il.interleaved_partition(_instance(10, 1, (10,)))
        assert sol.min_variance == pytest.approx(bound.binding)

    def test_per_ue_bounds_for_unequal_counts(self):
        bound = il.variance_bound(_instance(12, 2, (4, 8)))
        assert bound.per_ue[0] == pytest.approx(12 * bound.pool_variance / (2 * 4))
        assert bound.per_ue[1] == pytest.approx(12 * bound.pool_variance / (2 * 8))
        assert bound.binding == min(bound.per_ue)


class TestInterleavedPartition:
    def test_desk_subsets_match_fixed_lists(self):
        sol = il.interleaved_partition(_instance(48, 3))
        assert sol.subsets[0] == il.TABLE1_SINGLE_UE["interleaved"]
        assert sol.subsets[1] == tuple(range(2, 48, 3))
        assert sol.subsets[2] == tuple(range(3, 49, 3))
        variances = [il.index_variance(s) for s in sol.subsets]
        assert all(v == pytest.approx(191.25) for v in variances)

    def test_one_index_each_degenerate(self):
        sol = il.interleaved_partition(_instance(4, 4))
        assert sol.min_variance == 0.0
        assert math.isnan(sol.gap)

    def test_small_even_split(self):
        sol = il.interleaved_partition(_instance(6, 2))
        assert sol.subsets == ((1, 3, 5), (2, 4, 6))
        assert sol.min_variance == pytest.approx(8 / 3, rel=1e-15)

    def test_unequal_counts_rejected(self):
        with pytest.raises(ConfigError):
            il.interleaved_partition(_instance(12, 2, (4, 8)))

    def test_gap_matches_closed_form(self):
        for n, k in ((48, 3), (24, 4), (60, 5)):
            sol = il.interleaved_partition(_instance(n, k))
            assert sol.gap == pytest.approx(float(il.crb_gap(n, k)), rel=1e-12)


class TestCrbGap:
    def test_desk_value_exact(self):
        assert il.crb_gap(48, 3) == Fraction(8, 2295)

    def test_large_system_value(self):
        gap = il.crb_gap(1024, 20)
        assert gap == Fraction(399, 1048176)
        assert float(gap) == pytest.approx(3.80661262994001e-4, rel=1e-9)

    def test_single_ue_no_gap(self):
        assert il.crb_gap(100, 1) == 0

    def test_cross_check_against_variances(self):
        # independent route: bound/achieved - 1 in exact rationals
        for n, k in ((48, 3), (30, 5), (64, 8)):
            achieved = Fraction(n * n - k * k, 12)
            bound = Fraction(n * n - 1, 12)
            assert bound / achieved - 1 == il.crb_gap(n, k)

    def test_domain_error(self):
        with pytest.raises(ConfigError):
            il.crb_gap(10, 11)


class TestDecompositionIdentity:
    @given(st.integers(min_value=2, max_value=12), st.data())
    @settings(max_examples=60, deadline=None)
    def test_total_splits_into_within_plus_between(self, n, data):
        k = data.draw(st.integers(min_value=1, max_value=min(4, n)))
        pool = list(range(1, n + 1))
        data.draw(st.randoms(use_true_random=False)).shuffle(pool)
        cuts = sorted(data.draw(
            st.lists(st.integers(min_value=1, max_value=n - 1),
                     min_size=k - 1, max_size=k - 1, unique=True))) + [n]
        subsets, start = [], 0
        for cut in cuts:
            subsets.append(tuple(pool[start:cut]))
            start = cut
        subsets = [s for s in subsets if s]
        total, within, between = il.variance_decomposition(subsets)
        assert total == pytest.approx(within + between, abs=1e-9)

    def test_full_pool_total_is_pool_variance(self):
        sol = il.interleaved_partition(_instance(48, 3))
        total, within, between = il.variance_decomposition(
            sol.subsets, pool_indices=range(1, 49))
        assert total == pytest.approx(48 * (48 ** 2 - 1) / 12, rel=1e-12)

    def test_cover_mismatch_rejected(self):
        with pytest.raises(ConfigError):
            il.variance_decomposition([(1, 2)], pool_indices=[1, 2, 3])


class TestExactPartition:
    def test_small_balanced_beats_interleaved(self):
        # brute-force oracle over all balanced splits of {1..6}
        best = -1.0
        for s1 in itertools.combinations(range(1, 7), 3):
            if 1 not in s1:
                continue
            s2 = tuple(sorted(set(range(1, 7)) - set(s1)))
            best = max(best, min(il.index_variance(s1), il.index_variance(s2)))
        assert best == pytest.approx(26 / 9, rel=1e-12)

        sol = il.exact_partition(_instance(6, 2))
        interleaved = il.interleaved_partition(_instance(6, 2))
        assert sol.min_variance == pytest.approx(best, rel=1e-12)
        assert sol.min_variance >= interleaved.min_variance
        assert sol.subsets == ((1, 4, 5), (2, 3, 6))
        assert sol.min_variance <= sol.bound

    def test_four_pool_two_ues(self):
        sol = il.exact_partition(_instance(4, 2))
        assert sol.subsets == ((1, 3), (2, 4))
        assert sol.min_variance == pytest.approx(1.0)

    def test_interleaved_never_better_than_exact(self):
        for n, k in ((6, 2), (8, 2), (9, 3), (8, 4)):
            exact = il.exact_partition(_instance(n, k))
            inter = il.interleaved_partition(_instance(n, k))
            assert exact.min_variance >= inter.min_variance - 1e-12
            assert exact.min_variance <= exact.bound + 1e-12

    def test_leftover_indices_allowed(self):
        sol = il.exact_partition(_instance(6, 2, (2, 2)))
        used = {i for s in sol.subsets for i in s}
        assert len(used) == 4 and used <= set(range(1, 7))

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            il.exact_partition(_instance(30, 3), max_enumerations=1000)

    def test_enumeration_oracle_agrees(self):
        # unpruned enumeration as ground truth for the pruned solver
        inst = _instance(8, 2)
        best = max(min(il.index_variance(s) for s in p)
                   for p in il.enumerate_partitions(inst))
        assert il.exact_partition(inst).min_variance == pytest.approx(best)


class TestShiftFamilyOptimality:
    def _families(self, n, k):
        """All (base set, shift vector) families of disjoint congruent subsets."""
        per = n // k
        for base in itertools.combinations(range(1, n + 1), per):
            for shifts in itertools.permutations(range(-n, n + 1), k - 1):
                if any(s == 0 for s in shifts):
                    continue
                subsets = [tuple(base)]
                ok = True
                seen = set(base)
                for s in shifts:
                    moved = tuple(i + s for i in base)
                    if moved[0] < 1 or moved[-1] > n or seen & set(moved):
                        ok = False
                        break
                    seen |= set(moved)
                    subsets.append(moved)
                if ok:
                    yield subsets

    @pytest.mark.parametrize("n,k", [(6, 2), (8, 2)])
    def test_interleaved_maximizes_common_variance(self, n, k):
        best = max(il.index_variance(fam[0]) for fam in self._families(n, k))
        inter = il.interleaved_partition(_instance(n, k))
        assert inter.min_variance == pytest.approx(best, rel=1e-12)
