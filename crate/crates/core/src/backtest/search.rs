//! Exhaustive searches over small discrete laws: joint laws on atom grids,
//! VaR superadditivity instances and comonotone pairs where expectiles fail
//! to add up.

use serde::Serialize;

use crate::comonotone::ComonotonePair;
use crate::distribution::{DiscreteDistribution, Level, LevelKind};
use crate::error::{Result, RiskError};
use crate::measures::{self, ExpectileSolverConfig};

/// Finite joint law of `(L1, L2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointLaw {
    pub cells: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl JointLaw {
    pub fn new(cells: Vec<(f64, f64)>, weights: Vec<f64>) -> Result<Self> {
        // validates weights
        let first: Vec<f64> = cells.iter().map(|c| c.0).collect();
        DiscreteDistribution::from_weighted(&first, &weights)?;
        Ok(Self { cells, weights })
    }

    /// Product law of two independent marginals.
    pub fn independent(d1: &DiscreteDistribution, d2: &DiscreteDistribution) -> Self {
        let mut cells = Vec::with_capacity(d1.len() * d2.len());
        let mut weights = Vec::with_capacity(d1.len() * d2.len());
        for (&a, &wa) in d1.atoms().iter().zip(d1.weights()) {
            for (&b, &wb) in d2.atoms().iter().zip(d2.weights()) {
                cells.push((a, b));
                weights.push(wa * wb);
            }
        }
        Self { cells, weights }
    }

    fn law(&self, f: impl Fn(&(f64, f64)) -> f64) -> DiscreteDistribution {
        let v: Vec<f64> = self.cells.iter().map(f).collect();
        DiscreteDistribution::from_weighted(&v, &self.weights).expect("weights validated")
    }

    pub fn first(&self) -> DiscreteDistribution {
        self.law(|c| c.0)
    }

    pub fn second(&self) -> DiscreteDistribution {
        self.law(|c| c.1)
    }

    pub fn sum(&self) -> DiscreteDistribution {
        self.law(|c| c.0 + c.1)
    }

    /// Law of `(-L1, -L2)`.
    pub fn mirrored(&self) -> Self {
        Self { cells: self.cells.iter().map(|&(a, b)| (-a, -b)).collect(), weights: self.weights.clone() }
    }
}

/// Joint laws on `x_atoms × y_atoms` whose cell probabilities are multiples
/// of `1/denominator`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointGrid {
    pub x_atoms: Vec<f64>,
    pub y_atoms: Vec<f64>,
    pub denominator: u32,
}

impl JointGrid {
    pub fn new(x_atoms: Vec<f64>, y_atoms: Vec<f64>, denominator: u32) -> Result<Self> {
        if x_atoms.is_empty() || y_atoms.is_empty() || denominator == 0 {
            return Err(RiskError::InvalidInput("joint grid needs atoms and a positive denominator".into()));
        }
        Ok(Self { x_atoms, y_atoms, denominator })
    }

    pub fn mirrored(&self) -> Self {
        Self {
            x_atoms: self.x_atoms.iter().map(|x| -x).collect(),
            y_atoms: self.y_atoms.iter().map(|y| -y).collect(),
            denominator: self.denominator,
        }
    }
}

impl Default for JointGrid {
    /// 3×3 atoms with weights in multiples of 1/8.
    fn default() -> Self {
        Self { x_atoms: vec![0.0, 1.0, 3.0], y_atoms: vec![-1.0, 0.0, 2.0], denominator: 8 }
    }
}

/// Every joint law on the grid (cells with zero weight dropped), in
/// lexicographic order of the weight compositions.
pub fn enumerate_joint_laws(grid: &JointGrid) -> Vec<JointLaw> {
    let cells: Vec<(f64, f64)> = grid.x_atoms.iter().flat_map(|&x| grid.y_atoms.iter().map(move |&y| (x, y))).collect();
    let mut out = Vec::new();
    let mut parts = vec![0u32; cells.len()];
    compositions(&mut parts, 0, grid.denominator, &mut |parts| {
        let d = f64::from(grid.denominator);
        let (c, w): (Vec<_>, Vec<_>) =
            parts.iter().zip(&cells).filter(|(&k, _)| k > 0).map(|(&k, &cell)| (cell, f64::from(k) / d)).unzip();
        out.push(JointLaw { cells: c, weights: w });
    });
    out
}

fn compositions(parts: &mut [u32], idx: usize, remaining: u32, visit: &mut impl FnMut(&[u32])) {
    if idx == parts.len() - 1 {
        parts[idx] = remaining;
        visit(parts);
        return;
    }
    for k in 0..=remaining {
        parts[idx] = k;
        compositions(parts, idx + 1, remaining - k, visit);
    }
    parts[idx] = 0;
}

/// Search space for VaR superadditivity: iid pairs of two-point laws
/// `P(L = 0) = 1 - p`, `P(L = x) = p`, followed by joint grids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarSearchSpace {
    pub probabilities: Vec<f64>,
    pub loss_sizes: Vec<f64>,
    pub joint_grids: Vec<JointGrid>,
}

impl Default for VarSearchSpace {
    fn default() -> Self {
        Self {
            probabilities: (1..=10).map(|k| f64::from(k) / 100.0).collect(),
            loss_sizes: (1..=10).map(f64::from).collect(),
            joint_grids: vec![JointGrid::default()],
        }
    }
}

impl VarSearchSpace {
    fn candidates(&self) -> impl Iterator<Item = (String, JointLaw)> + '_ {
        let iid = self.probabilities.iter().flat_map(move |&p| {
            self.loss_sizes.iter().map(move |&x| {
                let m = DiscreteDistribution::from_weighted(&[0.0, x], &[1.0 - p, p]).expect("two-point law");
                (format!("iid two-point p={p} x={x}"), JointLaw::independent(&m, &m))
            })
        });
        let grids = self.joint_grids.iter().enumerate().flat_map(|(g, grid)| {
            enumerate_joint_laws(grid)
                .into_iter()
                .enumerate()
                .map(move |(i, law)| (format!("joint grid {g} law {i}"), law))
        });
        iid.chain(grids)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarSuperadditivity {
    pub description: String,
    pub law: JointLaw,
    pub var_first: f64,
    pub var_second: f64,
    pub var_sum: f64,
    pub es_first: f64,
    pub es_second: f64,
    pub es_sum: f64,
}

fn var_check(alpha: Level, description: String, law: JointLaw) -> Result<Option<VarSuperadditivity>> {
    let (d1, d2, s) = (law.first(), law.second(), law.sum());
    let var_first = measures::value_at_risk(&d1, alpha)?;
    let var_second = measures::value_at_risk(&d2, alpha)?;
    let var_sum = measures::value_at_risk(&s, alpha)?;
    if var_sum <= var_first + var_second {
        return Ok(None);
    }
    Ok(Some(VarSuperadditivity {
        description,
        es_first: measures::expected_shortfall(&d1, alpha)?,
        es_second: measures::expected_shortfall(&d2, alpha)?,
        es_sum: measures::expected_shortfall(&s, alpha)?,
        law,
        var_first,
        var_second,
        var_sum,
    }))
}

/// First law in the search space with `VaR(L1+L2) > VaR(L1) + VaR(L2)`.
pub fn find_var_superadditivity_example(alpha: Level, space: &VarSearchSpace) -> Result<VarSuperadditivity> {
    alpha.expect_kind(LevelKind::QuantileAlpha)?;
    for (description, law) in space.candidates() {
        if let Some(hit) = var_check(alpha, description, law)? {
            return Ok(hit);
        }
    }
    Err(RiskError::NotFound)
}

/// Every VaR superadditivity instance in the search space.
pub fn var_superadditivity_instances(alpha: Level, space: &VarSearchSpace) -> Result<Vec<VarSuperadditivity>> {
    alpha.expect_kind(LevelKind::QuantileAlpha)?;
    let mut out = Vec::new();
    for (description, law) in space.candidates() {
        if let Some(hit) = var_check(alpha, description, law)? {
            out.push(hit);
        }
    }
    Ok(out)
}

/// Comonotone pairs over a 3-atom factor `{0, 1, 2}` with weights in
/// multiples of `1/weight_denominator` and nondecreasing integer maps with
/// values in `0..=max_value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComonotoneGrid {
    pub weight_denominator: u32,
    pub max_value: u32,
}

impl Default for ComonotoneGrid {
    fn default() -> Self {
        Self { weight_denominator: 4, max_value: 2 }
    }
}

fn nondecreasing_maps(len: usize, max_value: u32) -> Vec<Vec<f64>> {
    fn rec(prefix: &mut Vec<u32>, len: usize, max_value: u32, out: &mut Vec<Vec<f64>>) {
        if prefix.len() == len {
            out.push(prefix.iter().map(|&v| f64::from(v)).collect());
            return;
        }
        let start = prefix.last().copied().unwrap_or(0);
        for v in start..=max_value {
            prefix.push(v);
            rec(prefix, len, max_value, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(len), len, max_value, &mut out);
    out
}

/// All comonotone pairs of the grid, in search order: factor weights, then
/// `f1`, then `f2`.
pub fn comonotone_pairs(grid: &ComonotoneGrid) -> Vec<ComonotonePair> {
    let den = grid.weight_denominator;
    let maps = nondecreasing_maps(3, grid.max_value);
    let mut out = Vec::new();
    for a in 1..den {
        for b in 1..den.saturating_sub(a) {
            let c = den - a - b;
            if c == 0 {
                continue;
            }
            let d = f64::from(den);
            let factor = DiscreteDistribution::from_weighted(
                &[0.0, 1.0, 2.0],
                &[f64::from(a) / d, f64::from(b) / d, f64::from(c) / d],
            )
            .expect("positive weights summing to one");
            for f1 in &maps {
                for f2 in &maps {
                    out.push(ComonotonePair::new(factor.clone(), f1.clone(), f2.clone()).expect("nondecreasing maps"));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComonotoneCounterexample {
    pub factor_weights: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub expectile_first: f64,
    pub expectile_second: f64,
    pub expectile_sum: f64,
    /// `e(L1+L2) - e(L1) - e(L2)`
    pub gap: f64,
}

/// Minimum additivity gap reported as a counterexample.
pub const COMONOTONE_GAP_THRESHOLD: f64 = 1e-6;

/// First comonotone pair in the grid where the τ-expectile is not additive.
pub fn find_expectile_comonotone_counterexample(
    tau: Level,
    grid: &ComonotoneGrid,
) -> Result<(ComonotonePair, ComonotoneCounterexample)> {
    tau.expect_kind(LevelKind::ExpectileTau)?;
    let cfg = ExpectileSolverConfig::default();
    for pair in comonotone_pairs(grid) {
        let laws = pair.laws();
        let e1 = measures::expectile(&laws.first, tau, &cfg)?;
        let e2 = measures::expectile(&laws.second, tau, &cfg)?;
        let es = measures::expectile(&laws.sum, tau, &cfg)?;
        let gap = es - e1 - e2;
        if gap.abs() > COMONOTONE_GAP_THRESHOLD {
            let found = ComonotoneCounterexample {
                factor_weights: pair.factor().weights().to_vec(),
                f1: pair.f1().to_vec(),
                f2: pair.f2().to_vec(),
                expectile_first: e1,
                expectile_second: e2,
                expectile_sum: es,
                gap,
            };
            return Ok((pair, found));
        }
    }
    Err(RiskError::NotFound)
}
