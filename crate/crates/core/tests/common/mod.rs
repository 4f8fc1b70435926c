//! Generators and brute-force reference computations shared by the
//! integration tests. Nothing here calls into the measure code.

#![allow(dead_code)]

use proptest::prelude::*;
use riskmeas_core::DiscreteDistribution;

/// A law with rational weights `count / denominator`, kept alongside its
/// expansion into `denominator` equally likely outcomes.
#[derive(Debug, Clone)]
pub struct RationalLaw {
    pub atoms: Vec<f64>,
    pub counts: Vec<u32>,
}

impl RationalLaw {
    pub fn denominator(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn distribution(&self) -> DiscreteDistribution {
        let n = f64::from(self.denominator());
        let w: Vec<f64> = self.counts.iter().map(|&c| f64::from(c) / n).collect();
        DiscreteDistribution::from_weighted(&self.atoms, &w).unwrap()
    }

    /// Sorted sample where every outcome has probability `1 / denominator`.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out: Vec<f64> =
            self.atoms.iter().zip(&self.counts).flat_map(|(&a, &c)| std::iter::repeat_n(a, c as usize)).collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

pub fn rational_law() -> impl Strategy<Value = RationalLaw> {
    prop::collection::vec((-40i32..=40, 1u32..=6), 1..12).prop_map(|cells| RationalLaw {
        atoms: cells.iter().map(|&(a, _)| f64::from(a) * 0.5).collect(),
        counts: cells.iter().map(|&(_, c)| c).collect(),
    })
}

pub fn sample(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 1..max_len)
}

pub fn open_unit() -> impl Strategy<Value = f64> {
    0.001f64..0.999
}

/// Inf-quantile of an equally weighted sorted sample: `x_(ceil(n u))`.
pub fn order_statistic_quantile(sorted: &[f64], u: f64) -> f64 {
    let n = sorted.len() as f64;
    // n·(k/n) can land an ulp above k
    let k = (n * u - 1e-9).ceil().max(1.0) as usize;
    sorted[k.min(sorted.len()) - 1]
}

/// `(1-α)⁻¹ ∫_α^1 q_u du` for an equally weighted sorted sample, summed
/// over the unit cells `((j-1)/n, j/n]`.
pub fn order_statistic_es(sorted: &[f64], alpha: f64) -> f64 {
    let n = sorted.len() as f64;
    let mut acc = 0.0;
    for (j, &x) in sorted.iter().enumerate() {
        let lo = (j as f64 / n).max(alpha);
        let hi = (j + 1) as f64 / n;
        if hi > lo {
            acc += x * (hi - lo);
        }
    }
    acc / (1.0 - alpha)
}

/// Asymmetric squared loss averaged over a sample.
pub fn expectile_objective(sample: &[f64], tau: f64, ell: f64) -> f64 {
    sample
        .iter()
        .map(|&y| {
            let d = y - ell;
            if d > 0.0 {
                tau * d * d
            } else {
                (1.0 - tau) * d * d
            }
        })
        .sum::<f64>()
        / sample.len() as f64
}

/// Golden-section minimizer of a convex function on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iterations: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iterations {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
