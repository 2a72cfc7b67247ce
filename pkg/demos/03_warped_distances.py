"""Dynamic time warping over yearly profile vectors.

Four hand-picked yearly profiles: two near-twins (XPM, ZET) and two assets
whose volatility and tail regimes move apart in different years (DMD, FRC).
After pooled z-scoring the three variables, DTW aligns the year axes and
sums local costs along the cheapest monotone path; the twin pair must come
out far closer than the divergent pair under every local metric.
"""

from coresat import (
    LocalMetric,
    SampleVector,
    SampleVectorSeries,
    dtw_distance,
    dtw_distance_brute,
    local_cost_matrix,
    pairwise_matrix,
    standardize_panel,
)

PROFILES = {
    "DMD": ([-4.52, 1.67, -0.73, 8.46, -5.50, 0.85],
            [28.12, 22.96, 9.65, 20.00, 14.37, 16.48],
            [1.81, 1.18, 2.00, 2.00, 1.30, 2.00]),
    "FRC": ([-7.10, -1.62, -0.25, 5.92, -1.97, 5.05],
            [18.74, 20.27, 59.19, 44.84, 29.43, 104.04],
            [2.00, 1.44, 0.63, 1.18, 1.51, 0.90]),
    "XPM": ([-7.27, -0.38, -0.58, 5.38, -2.98, 0.70],
            [15.58, 24.28, 8.66, 26.47, 22.84, 13.35],
            [1.67, 1.65, 1.79, 1.63, 1.76, 1.57]),
    "ZET": ([-5.74, 0.16, 0.51, 2.88, -3.73, 1.11],
            [28.72, 24.63, 16.39, 35.35, 20.14, 24.01],
            [1.65, 1.68, 1.72, 1.74, 1.83, 1.80]),
}


def series_for(asset_id):
    means, stds, alphas = PROFILES[asset_id]
    return SampleVectorSeries(
        asset_id=asset_id,
        vectors=tuple(
            SampleVector(year=2014 + i, mean_return=means[i], std_dev=stds[i], tail_alpha=alphas[i])
            for i in range(6)
        ),
    )


panel = [series_for(a) for a in PROFILES]
z = standardize_panel(panel)
by_id = {s.asset_id: s for s in z}

print("local cost matrix (Manhattan) between the standardized twins XPM and ZET:")
costs = local_cost_matrix(by_id["XPM"].as_matrix(), by_id["ZET"].as_matrix(), LocalMetric.MANHATTAN)
for i, row in enumerate(costs):
    print(f"  {2014 + i}: " + "  ".join(f"{v:5.2f}" for v in row))
print("(the cheap path hugs the diagonal: the twins need almost no warping)\n")

print("DTW distance vs exhaustive path enumeration (T=6 has 1,683 admissible paths):")
for metric in LocalMetric:
    fast = dtw_distance(by_id["XPM"], by_id["ZET"], metric)
    brute = dtw_distance_brute(by_id["XPM"], by_id["ZET"], metric)
    print(f"  {metric.value:12s} dp {fast:.6f}  brute {brute:.6f}  |delta| {abs(fast - brute):.1e}")

print("\npairwise distances: twins vs the divergent pair")
for metric in LocalMetric:
    dm = pairwise_matrix(z, metric)
    idx = {label: i for i, label in enumerate(dm.labels)}
    close = dm.d[idx["XPM"], idx["ZET"]]
    far = dm.d[idx["DMD"], idx["FRC"]]
    print(f"  {metric.value:12s} d(XPM, ZET) = {close:6.3f}   d(DMD, FRC) = {far:6.3f}")
print("\nasynchronous regime changes (FRC's 2016/2019 vol explosions, DMD's tail flips)")
print("survive warping, so the divergent pair stays far in every metric")
