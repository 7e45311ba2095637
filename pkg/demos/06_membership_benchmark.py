"""Timing: the closed-form membership check against assemble-and-iterate.

For a rejected draw the fast path never touches a matrix, so the advantage
grows with the grid; for an accepted draw the matrix gets built anyway and
the gap narrows but survives.
"""

from bigmrf import bench_membership, write_bench_csv

records = bench_membership([(60, 60), (100, 100)], n_valid=2, n_invalid=2,
                           seed=0, reps=10, baseline_reps=3)
for r in records:
    if r.method == "baseline":
        print(f"{r.dims.n1:3d}x{r.dims.n2:<3d} {r.case:8s}: "
              f"baseline/fast = {r.ratio:8.1f}")
write_bench_csv(records, "bench.csv")
print("wrote bench.csv")
