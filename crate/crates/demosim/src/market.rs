//! Decision markets over a d-dimensional knowledge space.
//!
//! Citizens are points in [0, 1]^d; the environment (the objectively best
//! decision) sits at the all-ones corner, and the market point starts at the
//! origin. Citizens act once each, in random order, writing one knowledge
//! value into one market dimension. The incentive-free variant writes a
//! uniformly random dimension unconditionally; the incentive variant writes
//! the citizen's best dimension, with participation gated by a coin weighted
//! by that best value.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Per-citizen knowledge points in [0, 1]^d.
#[derive(Debug, Clone)]
pub struct KnowledgeMatrix {
    rows: Vec<Vec<f64>>,
    d: usize,
    p: f64,
    seed: u64,
}

impl KnowledgeMatrix {
    /// Wraps explicit knowledge rows (rectangular, entries in [0, 1]).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::param("knowledge matrix must be non-empty"));
        }
        let d = rows[0].len();
        for row in &rows {
            if row.len() != d {
                return Err(Error::param("knowledge rows have unequal lengths"));
            }
            if let Some(bad) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::param(format!("knowledge value {bad} outside [0, 1]")));
            }
        }
        Ok(KnowledgeMatrix {
            rows,
            d,
            p: f64::NAN,
            seed: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, citizen: usize) -> &[f64] {
        &self.rows[citizen]
    }

    pub fn value(&self, citizen: usize, dimension: usize) -> f64 {
        self.rows[citizen][dimension]
    }

    /// Population quality parameter the matrix was generated with (NaN for
    /// explicit matrices).
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Draws an n x d knowledge matrix: every entry is Normal(p, (p(1-p))^2)
/// clamped into [0, 1]. At p = 0 or p = 1 the distribution is degenerate and
/// every entry equals p exactly.
pub fn generate_knowledge(n: usize, d: usize, p: f64, seed: u64) -> Result<KnowledgeMatrix> {
    if n < 1 || d < 1 {
        return Err(Error::param("knowledge matrix needs n >= 1 and d >= 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("quality parameter p = {p} outside [0, 1]")));
    }
    let sd = p * (1.0 - p);
    let mut rng = rng_from_seed(seed);
    let rows = if sd == 0.0 {
        vec![vec![p; d]; n]
    } else {
        let normal = Normal::new(p, sd).expect("sd is positive and finite");
        (0..n)
            .map(|_| (0..d).map(|_| normal.sample(&mut rng).clamp(0.0, 1.0)).collect())
            .collect()
    };
    Ok(KnowledgeMatrix { rows, d, p, seed })
}

/// The objective truth point: all ones.
pub fn environment(d: usize) -> Vec<f64> {
    vec![1.0; d]
}

/// One citizen's turn at the market.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketAction {
    pub citizen: usize,
    pub dimension: usize,
    pub value: f64,
    pub participated: bool,
}

/// Final market point plus the full action log.
#[derive(Debug, Clone)]
pub struct MarketState {
    pub m: Vec<f64>,
    pub log: Vec<MarketAction>,
}

impl MarketState {
    fn new(d: usize) -> Self {
        MarketState {
            m: vec![0.0; d],
            log: Vec::new(),
        }
    }

    fn write(&mut self, citizen: usize, dimension: usize, value: f64) {
        self.m[dimension] = value;
        self.log.push(MarketAction {
            citizen,
            dimension,
            value,
            participated: true,
        });
    }

    fn abstain(&mut self, citizen: usize, dimension: usize, value: f64) {
        self.log.push(MarketAction {
            citizen,
            dimension,
            value,
            participated: false,
        });
    }

    /// Dimensions somebody has written at least once.
    pub fn written_dimensions(&self) -> Vec<usize> {
        let mut written = vec![false; self.m.len()];
        for a in &self.log {
            if a.participated {
                written[a.dimension] = true;
            }
        }
        (0..self.m.len()).filter(|&j| written[j]).collect()
    }
}

fn acting_order(n: usize, order_seed: u64) -> (Vec<usize>, crate::rng::SimRng) {
    let mut rng = rng_from_seed(order_seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    (order, rng)
}

/// Runs the incentive-free market: every citizen acts, writing a uniformly
/// random dimension of their knowledge into the market.
pub fn run_incentive_free_market(know: &KnowledgeMatrix, order_seed: u64) -> MarketState {
    let (order, mut rng) = acting_order(know.n(), order_seed);
    let mut state = MarketState::new(know.d());
    for citizen in order {
        let dimension = rng.random_range(0..know.d());
        state.write(citizen, dimension, know.value(citizen, dimension));
    }
    state
}

/// Runs the incentive market: each citizen targets their best dimension and
/// participates with probability equal to that best value.
///
/// Participation coins and tie picks are stateless per citizen (derived from
/// `coin_seed` and the citizen index), so the acting order does not perturb
/// them.
pub fn run_incentive_market(
    know: &KnowledgeMatrix,
    order_seed: u64,
    coin_seed: u64,
) -> MarketState {
    let (order, _) = acting_order(know.n(), order_seed);
    let mut state = MarketState::new(know.d());
    for citizen in order {
        let dimension = best_dimension(
            know.row(citizen),
            derive_seed(coin_seed, &[citizen as u64, TIE_PICK]),
        );
        let value = know.value(citizen, dimension);
        let toss: f64 = rng_from_seed(derive_seed(coin_seed, &[citizen as u64])).random();
        if toss < value {
            state.write(citizen, dimension, value);
        } else {
            state.abstain(citizen, dimension, value);
        }
    }
    state
}

/// Scripted incentive-free run: citizens act in the given order and write the
/// given dimensions. Used for walkthroughs and tests.
pub fn run_incentive_free_scripted(
    know: &KnowledgeMatrix,
    order: &[usize],
    dimensions: &[usize],
) -> Result<MarketState> {
    if order.len() != know.n() || dimensions.len() != know.n() {
        return Err(Error::param("order and dimension scripts must cover every citizen"));
    }
    let mut state = MarketState::new(know.d());
    for (&citizen, &dimension) in order.iter().zip(dimensions) {
        if citizen >= know.n() || dimension >= know.d() {
            return Err(Error::param("scripted citizen or dimension out of range"));
        }
        state.write(citizen, dimension, know.value(citizen, dimension));
    }
    Ok(state)
}

/// Scripted incentive run: citizens act in the given order, every
/// participation coin is forced to land on "participate". Exact-max ties
/// pick by `tie_seed` as in the unscripted run.
pub fn run_incentive_scripted(
    know: &KnowledgeMatrix,
    order: &[usize],
    tie_seed: u64,
) -> Result<MarketState> {
    if order.len() != know.n() {
        return Err(Error::param("order script must cover every citizen"));
    }
    let mut state = MarketState::new(know.d());
    for &citizen in order {
        if citizen >= know.n() {
            return Err(Error::param("scripted citizen out of range"));
        }
        let dimension = best_dimension(
            know.row(citizen),
            derive_seed(tie_seed, &[citizen as u64, TIE_PICK]),
        );
        state.write(citizen, dimension, know.value(citizen, dimension));
    }
    Ok(state)
}

const TIE_PICK: u64 = 1;

/// Index of the largest value. An exact tie picks uniformly (seeded) among
/// the tied dimensions; values clamp to 1 often at high quality, and a fixed
/// tie order would starve every other dimension of writes.
fn best_dimension(row: &[f64], tie_seed: u64) -> usize {
    let mut best = 0;
    let mut ties = 1usize;
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = j;
            ties = 1;
        } else if v == row[best] {
            ties += 1;
        }
    }
    if ties == 1 {
        return best;
    }
    let pick = rng_from_seed(tie_seed).random_range(0..ties);
    row.iter()
        .enumerate()
        .filter(|(_, &v)| v == row[best])
        .nth(pick)
        .map(|(j, _)| j)
        .expect("pick is within the tie count")
}

/// Distance measure between the market point and the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceVariant {
    /// Euclidean distance divided by sqrt(d): sqrt(sum (e_j - m_j)^2 / d).
    RootNormalized,
    /// Mean squared gap: sum (e_j - m_j)^2 / d (the square of the above).
    MeanSquared,
}

/// How far the market sits from the environment, in [0, 1] under both
/// variants.
pub fn market_distance_error(m: &[f64], e: &[f64], variant: DistanceVariant) -> Result<f64> {
    if m.len() != e.len() || m.is_empty() {
        return Err(Error::param(format!(
            "market length {} does not match environment length {}",
            m.len(),
            e.len()
        )));
    }
    let d = m.len() as f64;
    let sum_sq: f64 = m.iter().zip(e).map(|(&mj, &ej)| (ej - mj) * (ej - mj)).sum();
    Ok(match variant {
        DistanceVariant::MeanSquared => sum_sq / d,
        DistanceVariant::RootNormalized => (sum_sq / d).sqrt(),
    })
}

/// A rounded market point and whether it matches the environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub choices: Vec<u8>,
    pub correct: bool,
}

/// Rounds every dimension half-up (0.5 rounds to 1); the decision is correct
/// when every rounded dimension hits the environment's 1.
pub fn market_decision(m: &[f64]) -> Decision {
    let choices: Vec<u8> = m.iter().map(|&v| u8::from(v >= 0.5)).collect();
    let correct = choices.iter().all(|&c| c == 1);
    Decision { choices, correct }
}

/// The fixed three-citizen, three-dimension walkthrough: citizen knowledge
/// `[0.7, 0.5, 0.4]`, `[0.5, 0.6, 0.3]`, `[0.3, 0.5, 0.7]`; the incentive-free
/// side writes dimensions 3, 1, 2 (in citizen order), and every incentive
/// coin lands on "participate".
pub struct Walkthrough {
    pub knowledge: KnowledgeMatrix,
    pub free: MarketState,
    pub incentive: MarketState,
}

pub fn scripted_walkthrough() -> Walkthrough {
    let knowledge = KnowledgeMatrix::from_rows(vec![
        vec![0.7, 0.5, 0.4],
        vec![0.5, 0.6, 0.3],
        vec![0.3, 0.5, 0.7],
    ])
    .expect("fixed rows are valid");
    let order = [0, 1, 2];
    let free = run_incentive_free_scripted(&knowledge, &order, &[2, 0, 1])
        .expect("fixed script is valid");
    let incentive =
        run_incentive_scripted(&knowledge, &order, 0).expect("fixed script is valid");
    Walkthrough {
        knowledge,
        free,
        incentive,
    }
}
