# Which index subsets are the best and the worst for sensing?
#
# Brute-forces every C(pool, count) subset of a small pool and confirms
# that the edge-first pattern attains the maximum index variance (best
# bound) while any consecutive run attains the minimum (worst bound).

import isac_lab as il

for pool, count in ((12, 4), (16, 6)):
    report = il.verify_extremality(pool, count)
    print(f"pool={pool}, count={count}: scanned {report.n_subsets} subsets")
    print(f"  max variance {report.max_variance:.4f} attained by "
          f"{[list(s) for s in report.argmax]}")
    print(f"  min variance {report.min_variance:.4f} attained by "
          f"{len(report.argmin)} consecutive runs, e.g. {list(report.argmin[0])}")
    print(f"  edge-first is the argmax: {report.edge_first_is_max}")
    print(f"  subband is an argmin:     {report.subband_is_min}")
    print()

# The minimum over consecutive runs has the closed form (count^2 - 1) / 12.
for pool, count in ((12, 4), (16, 6), (20, 9)):
    report = il.verify_extremality(pool, count)
    print(f"pool={pool}, count={count}: min variance {report.min_variance:.6f}"
          f" vs (count^2-1)/12 = {(count ** 2 - 1) / 12:.6f}")

# Mirror symmetry: reflecting a subset about the band center preserves its
# variance, so extremal subsets always come in mirror pairs.
pool = 16
subset = il.generate_scheme(il.SchemeKind("edge-first"), pool, 5, 1, 1)
mirror = tuple(sorted(pool + 1 - i for i in subset))
print(f"\n{list(subset)} and mirrored {list(mirror)}: variances "
      f"{il.index_variance(subset):.4f} / {il.index_variance(mirror):.4f}")
