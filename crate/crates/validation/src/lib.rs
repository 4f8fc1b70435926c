//! Bookkeeping and random instance generators for the acceptance suite.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use riskmeas_core::DiscreteDistribution;

pub struct Outcome {
    pub ok: bool,
    pub summary: String,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn fail(summary: String) -> Self {
        Self { ok: false, summary, notes: Vec::new() }
    }
}

/// Collects sub-checks of one criterion; keeps the first few failures.
pub struct Checks {
    started: Instant,
    count: usize,
    failures: Vec<String>,
    failure_count: usize,
    facts: Vec<String>,
    notes: Vec<String>,
}

const KEPT_FAILURES: usize = 5;

impl Default for Checks {
    fn default() -> Self {
        Self::new()
    }
}

impl Checks {
    pub fn new() -> Self {
        Self {
            started: Instant::now(),
            count: 0,
            failures: Vec::new(),
            failure_count: 0,
            facts: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(describe());
            }
        }
    }

    pub fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, || format!("{what}: got {got}, want {want} (tol {tol:e})"));
    }

    /// A headline number for the summary line.
    pub fn fact(&mut self, s: impl Into<String>) {
        self.facts.push(s.into());
    }

    /// Extra explanation printed under the summary line.
    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn within(&mut self, limit: Duration) {
        let elapsed = self.started.elapsed();
        self.check(elapsed < limit, || format!("runtime {elapsed:.2?} exceeds {limit:?}"));
    }

    pub fn finish(self) -> Outcome {
        let ok = self.failure_count == 0;
        let mut summary = format!("{}/{} checks", self.count - self.failure_count, self.count);
        if !self.facts.is_empty() {
            summary.push_str("; ");
            summary.push_str(&self.facts.join(", "));
        }
        let mut notes: Vec<String> = self.failures.into_iter().map(|f| format!("failed: {f}")).collect();
        if self.failure_count > KEPT_FAILURES {
            notes.push(format!("... {} more failures", self.failure_count - KEPT_FAILURES));
        }
        notes.extend(self.notes);
        Outcome { ok, summary, notes }
    }
}

/// Random law with 1..=30 atoms in [-100, 100] and random positive weights.
pub fn random_law(rng: &mut ChaCha8Rng) -> DiscreteDistribution {
    let n = rng.random_range(1..=30);
    let atoms: Vec<f64> = (0..n).map(|_| rng.random_range(-100.0..100.0)).collect();
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    DiscreteDistribution::from_weighted(&atoms, &weights).expect("valid random law")
}

/// Random sample of 1..=200 values; half the time rounded to integers so
/// the empirical law has atoms with repeated mass.
pub fn random_sample(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = rng.random_range(1..=200);
    let rounded = rng.random_bool(0.5);
    (0..n)
        .map(|_| {
            let x: f64 = rng.random_range(-50.0..50.0);
            if rounded {
                x.round()
            } else {
                x
            }
        })
        .collect()
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
