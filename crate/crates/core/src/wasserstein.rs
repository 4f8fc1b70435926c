use crate::distribution::DiscreteDistribution;

/// Exact 1-D Wasserstein-1 distance, `∫_0^1 |Q1(u) - Q2(u)| du`.
///
/// Walks the merged cumulative breakpoints of both laws; on each segment
/// both quantile functions are constant.
pub fn wasserstein1(d1: &DiscreteDistribution, d2: &DiscreteDistribution) -> f64 {
    let (a1, c1) = (d1.atoms(), d1.cumulative());
    let (a2, c2) = (d2.atoms(), d2.cumulative());
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = 0.0f64;
    let mut total = 0.0f64;
    while i < a1.len() && j < a2.len() {
        let next = c1[i].min(c2[j]);
        total += (next - prev) * (a1[i] - a2[j]).abs();
        prev = next;
        if c1[i] == next {
            i += 1;
        }
        if c2[j] == next {
            j += 1;
        }
    }
    total
}
