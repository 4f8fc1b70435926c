//! Variance, VaR, Expected Shortfall and expectiles evaluated exactly on
//! [`DiscreteDistribution`].

use serde::Serialize;

use crate::distribution::{compensated_sum, DiscreteDistribution, Level, LevelKind};
use crate::error::{Result, RiskError};

/// A risk measure together with its level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MeasureKind {
    Mean,
    Variance,
    VaR(Level),
    ES(Level),
    Expectile(Level),
}

impl MeasureKind {
    pub fn var(alpha: f64) -> Result<Self> {
        Ok(Self::VaR(Level::quantile(alpha)?))
    }

    pub fn es(alpha: f64) -> Result<Self> {
        Ok(Self::ES(Level::quantile(alpha)?))
    }

    pub fn expectile(tau: f64) -> Result<Self> {
        Ok(Self::Expectile(Level::expectile(tau)?))
    }

    /// Checks that the embedded level has the role this measure expects.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::VaR(l) | Self::ES(l) => l.expect_kind(LevelKind::QuantileAlpha).map(|_| ()),
            Self::Expectile(l) => l.expect_kind(LevelKind::ExpectileTau).map(|_| ()),
            Self::Mean | Self::Variance => Ok(()),
        }
    }

    pub fn evaluate(&self, d: &DiscreteDistribution) -> Result<f64> {
        match self {
            Self::Mean => Ok(mean(d)),
            Self::Variance => Ok(variance(d)),
            Self::VaR(l) => value_at_risk(d, *l),
            Self::ES(l) => expected_shortfall(d, *l),
            Self::Expectile(l) => expectile(d, *l, &ExpectileSolverConfig::default()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mean => "mean",
            Self::Variance => "variance",
            Self::VaR(_) => "var",
            Self::ES(_) => "es",
            Self::Expectile(_) => "expectile",
        }
    }
}

/// Settings for the expectile root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectileSolverConfig {
    /// Residual bound on the first-order condition. `None` means
    /// `1e-12 * max(1, max |atom|)`.
    pub abs_tolerance: Option<f64>,
    pub max_iterations: usize,
}

impl Default for ExpectileSolverConfig {
    fn default() -> Self {
        Self { abs_tolerance: None, max_iterations: 200 }
    }
}

impl ExpectileSolverConfig {
    fn validate(&self) -> Result<()> {
        if let Some(t) = self.abs_tolerance {
            if t.is_nan() || t <= 0.0 {
                return Err(RiskError::InvalidInput(format!("expectile tolerance must be positive, got {t}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(RiskError::InvalidInput("expectile solver needs at least one iteration".into()));
        }
        Ok(())
    }
}

pub fn mean(d: &DiscreteDistribution) -> f64 {
    d.expectation(|x| x)
}

pub fn variance(d: &DiscreteDistribution) -> f64 {
    let m = mean(d);
    d.expectation(|x| (x - m) * (x - m))
}

/// `VaR_α(L) = inf{ℓ : P(L <= ℓ) >= α}`.
pub fn value_at_risk(d: &DiscreteDistribution, alpha: Level) -> Result<f64> {
    let a = alpha.expect_kind(LevelKind::QuantileAlpha)?;
    Ok(d.quantile(a))
}

/// Expected Shortfall as the integrated quantile function
/// `(1/(1-α)) ∫_α^1 q_u du`, which is a finite sum on a discrete law.
pub fn expected_shortfall(d: &DiscreteDistribution, alpha: Level) -> Result<f64> {
    let a = alpha.expect_kind(LevelKind::QuantileAlpha)?;
    let es = es_integrated(d, a);
    debug_assert!({
        let cond = es_conditional(d, a);
        (es - cond).abs() <= 1e-10 * es.abs().max(1.0)
    });
    Ok(es)
}

/// Expected Shortfall through the tail conditional mean plus the correction
/// for a probability atom at the quantile:
/// `E[L|L>=q] + (E[L|L>=q] - q)(P[L>=q]/(1-α) - 1)`.
pub fn expected_shortfall_conditional(d: &DiscreteDistribution, alpha: Level) -> Result<f64> {
    let a = alpha.expect_kind(LevelKind::QuantileAlpha)?;
    Ok(es_conditional(d, a))
}

pub(crate) fn es_integrated(d: &DiscreteDistribution, alpha: f64) -> f64 {
    let k = d.quantile_index(alpha);
    let atoms = d.atoms();
    let cum = d.cumulative();
    let head = atoms[k] * (cum[k] - alpha).max(0.0);
    let tail = compensated_sum(atoms[k + 1..].iter().zip(&d.weights()[k + 1..]).map(|(a, w)| a * w));
    (head + tail) / (1.0 - alpha)
}

fn es_conditional(d: &DiscreteDistribution, alpha: f64) -> f64 {
    let k = d.quantile_index(alpha);
    let q = d.atoms()[k];
    let tail_prob = compensated_sum(d.weights()[k..].iter().copied());
    let tail_mean = compensated_sum(d.atoms()[k..].iter().zip(&d.weights()[k..]).map(|(a, w)| a * w)) / tail_prob;
    tail_mean + (tail_mean - q) * (tail_prob / (1.0 - alpha) - 1.0)
}

/// First-order condition `τE[(L-ℓ)⁺] - (1-τ)E[(ℓ-L)⁺]`; continuous and
/// strictly decreasing in `ℓ`.
pub fn expectile_condition(d: &DiscreteDistribution, tau: f64, ell: f64) -> f64 {
    let up = d.expectation(|x| (x - ell).max(0.0));
    let down = d.expectation(|x| (ell - x).max(0.0));
    tau * up - (1.0 - tau) * down
}

/// τ-expectile: the root of [`expectile_condition`].
///
/// The condition is piecewise linear between atoms. Bisection over atom
/// indices locates the piece holding the sign change, then the linear piece
/// is solved in closed form. If rounding leaves a residual above the
/// tolerance, bisection continues on the real bracket.
pub fn expectile(d: &DiscreteDistribution, tau: Level, cfg: &ExpectileSolverConfig) -> Result<f64> {
    let t = tau.expect_kind(LevelKind::ExpectileTau)?;
    cfg.validate()?;
    expectile_raw(d, t, cfg)
}

pub(crate) fn expectile_raw(d: &DiscreteDistribution, tau: f64, cfg: &ExpectileSolverConfig) -> Result<f64> {
    let atoms = d.atoms();
    let weights = d.weights();
    let n = atoms.len();
    if n == 1 {
        return Ok(atoms[0]);
    }
    let scale = atoms[0].abs().max(atoms[n - 1].abs()).max(1.0);
    let tol = cfg.abs_tolerance.unwrap_or(1e-12 * scale);
    let g = |ell: f64| expectile_condition(d, tau, ell);

    let mut iterations = 0usize;
    let (mut lo, mut hi) = (0usize, n - 1);
    while hi - lo > 1 {
        iterations += 1;
        if iterations > cfg.max_iterations {
            return Err(RiskError::NoConvergence(cfg.max_iterations));
        }
        let mid = lo + (hi - lo) / 2;
        let gm = g(atoms[mid]);
        if gm == 0.0 {
            return Ok(atoms[mid]);
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Linear piece [atoms[lo], atoms[hi]]: atoms <= lo sit below ℓ, the rest above.
    let below_mass = compensated_sum(weights[..=lo].iter().copied());
    let below_sum = compensated_sum(atoms[..=lo].iter().zip(&weights[..=lo]).map(|(a, w)| a * w));
    let above_mass = compensated_sum(weights[hi..].iter().copied());
    let above_sum = compensated_sum(atoms[hi..].iter().zip(&weights[hi..]).map(|(a, w)| a * w));
    let (mut left, mut right) = (atoms[lo], atoms[hi]);
    let mut ell = ((tau * above_sum + (1.0 - tau) * below_sum) / (tau * above_mass + (1.0 - tau) * below_mass))
        .clamp(left, right);

    loop {
        let r = g(ell);
        if r.abs() <= tol {
            return Ok(ell);
        }
        if r > 0.0 {
            left = ell;
        } else {
            right = ell;
        }
        let mid = 0.5 * (left + right);
        if mid <= left || mid >= right {
            // bracket exhausted at floating resolution
            return Ok(ell);
        }
        iterations += 1;
        if iterations > cfg.max_iterations {
            return Err(RiskError::NoConvergence(cfg.max_iterations));
        }
        ell = mid;
    }
}

/// `ρ(L) - E(L)`.
pub fn risk_adjusted_capital(d: &DiscreteDistribution, kind: MeasureKind) -> Result<f64> {
    Ok(kind.evaluate(d)? - mean(d))
}
