//! Majority-vote probability model: the chance that a majority of `n`
//! independent voters, each correct with probability `p`, picks the better of
//! two options, plus the (p, n) surface used to chart it.

use crate::error::{Error, Result};

/// How an even split between the two options is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieRule {
    /// A tied vote is decided by a fair coin, so the tie outcome contributes
    /// half of its probability mass.
    FairCoin,
    /// Ties are ruled out by construction: only odd voter counts are accepted.
    OddOnly,
}

/// Parameters of one majority vote.
#[derive(Debug, Clone, Copy)]
pub struct JuryParams {
    n: u64,
    p: f64,
    tie_rule: TieRule,
}

impl JuryParams {
    pub fn new(n: u64, p: f64, tie_rule: TieRule) -> Result<Self> {
        if n < 1 {
            return Err(Error::param("voter count must be at least 1"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!("probability p = {p} outside [0, 1]")));
        }
        if tie_rule == TieRule::OddOnly && n.is_multiple_of(2) {
            return Err(Error::param(format!(
                "tie rule odd-only rejects even voter count n = {n}"
            )));
        }
        Ok(JuryParams { n, p, tie_rule })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn tie_rule(&self) -> TieRule {
        self.tie_rule
    }
}

/// ln C(n, k), accumulated as a compensated sum of log ratios so the
/// cancellation stays tight even for n in the thousands.
fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for i in 1..=k {
        let term = (((n - k + i) as f64) / (i as f64)).ln();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// ln of the binomial pmf at `k`.
fn ln_pmf(n: u64, k: u64, p: f64, q: f64) -> f64 {
    ln_choose(n, k) + (k as f64) * p.ln() + ((n - k) as f64) * q.ln()
}

// Terms this far below the running maximum cannot affect an f64 sum.
const NEGLIGIBLE: f64 = 1e-30;

/// P(majority of `n` voters is correct) for per-voter correctness `p`.
///
/// The tail sum is anchored at the most likely tail count, whose pmf is
/// evaluated in log space; neighbouring terms follow by the binomial term
/// recurrence in linear space. Stable through n = 10,000 and beyond.
pub fn majority_probability(params: &JuryParams) -> f64 {
    let n = params.n;
    let p = params.p;
    let q = 1.0 - p;
    if n == 1 {
        return p;
    }
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }

    let k_start = n / 2 + 1; // smallest strict-majority count
    let mode = (((n + 1) as f64) * p).floor().min(n as f64) as u64;
    let anchor = mode.clamp(k_start, n);
    let ln_anchor = ln_pmf(n, anchor, p, q);
    let ratio = p / q;

    // Relative term sum around the anchor; terms decay moving away from it.
    let mut total = 1.0;
    let mut rel = 1.0;
    let mut k = anchor;
    while k > k_start {
        rel *= (k as f64) / ((n - k + 1) as f64) / ratio;
        total += rel;
        k -= 1;
        if rel < NEGLIGIBLE {
            break;
        }
    }
    rel = 1.0;
    k = anchor;
    while k < n {
        rel *= ((n - k) as f64) / ((k + 1) as f64) * ratio;
        total += rel;
        k += 1;
        if rel < NEGLIGIBLE {
            break;
        }
    }
    let mut prob = (ln_anchor + total.ln()).exp();

    if n.is_multiple_of(2) && params.tie_rule == TieRule::FairCoin {
        prob += 0.5 * ln_pmf(n, n / 2, p, q).exp();
    }
    prob.clamp(0.0, 1.0)
}

/// Rectangular (p, n) grid specification for the probability surface.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSpec {
    pub p_min: f64,
    pub p_max: f64,
    pub p_step: f64,
    pub n_min: u64,
    pub n_max: u64,
    pub tie_rule: TieRule,
}

impl SurfaceSpec {
    fn validate(&self) -> Result<()> {
        if !self.p_step.is_finite() || self.p_step <= 0.0 {
            return Err(Error::param("p-step must be positive"));
        }
        if self.n_min < 1 {
            return Err(Error::param("n-min must be at least 1"));
        }
        if self.n_max < self.n_min || self.p_max < self.p_min {
            return Err(Error::param("empty surface grid"));
        }
        if !(0.0..=1.0).contains(&self.p_min) || !(0.0..=1.0).contains(&self.p_max) {
            return Err(Error::param("p bounds outside [0, 1]"));
        }
        Ok(())
    }

    fn p_values(&self) -> Vec<f64> {
        let count = ((self.p_max - self.p_min) / self.p_step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| (self.p_min + i as f64 * self.p_step).min(1.0))
            .collect()
    }
}

/// Majority-correct probabilities over a (p, n) grid.
#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    pub p_values: Vec<f64>,
    pub n_values: Vec<u64>,
    /// `cells[i][j]` is the probability at `(p_values[i], n_values[j])`.
    pub cells: Vec<Vec<f64>>,
}

/// Evaluates the majority-correct probability at every grid point.
///
/// Rows are independent pure computations; the result is identical however
/// they are scheduled.
pub fn condorcet_surface(spec: &SurfaceSpec) -> Result<SurfaceGrid> {
    use rayon::prelude::*;

    spec.validate()?;
    let p_values = spec.p_values();
    let n_values: Vec<u64> = (spec.n_min..=spec.n_max).collect();
    for &n in &n_values {
        // Surfaces under odd-only must not contain even columns.
        JuryParams::new(n, spec.p_min, spec.tie_rule)?;
    }
    let cells: Vec<Vec<f64>> = p_values
        .par_iter()
        .map(|&p| {
            n_values
                .iter()
                .map(|&n| {
                    let params = JuryParams::new(n, p, spec.tie_rule).expect("validated above");
                    majority_probability(&params)
                })
                .collect()
        })
        .collect();
    Ok(SurfaceGrid {
        p_values,
        n_values,
        cells,
    })
}
