//! Small numeric helpers shared across modules.

/// Pairwise (cascade) summation. Deterministic for a given slice and more
/// accurate than naive left-to-right accumulation on long series.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Trapezoid integral over a uniform grid with spacing `dt`.
pub(crate) fn trapezoid_uniform(ys: &[f64], dt: f64) -> f64 {
    if ys.len() < 2 {
        return 0.0;
    }
    let interior = pairwise_sum(&ys[1..ys.len() - 1]);
    dt * (0.5 * (ys[0] + ys[ys.len() - 1]) + interior)
}

/// Trapezoid integral over an arbitrary ascending grid.
pub(crate) fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return 0.0;
    }
    let terms: Vec<f64> = (1..xs.len())
        .map(|i| 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]))
        .collect();
    pairwise_sum(&terms)
}

/// SplitMix64 finalizer; the avalanche step behind the counter-based
/// generators in `models`.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
