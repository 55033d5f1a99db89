//! Citizen populations and the trust networks they declare.
//!
//! A population is a vector of political tendencies in [0, 1]. Citizens join
//! the network one by one in random order; each newcomer declares `m` trust
//! links, preferring popular targets (declared in-degree) and, with strength
//! `beta`, targets of similar tendency. Link weights are the tendency
//! similarity `1 - |x_i - x_j|`.
//!
//! Vote power flows along every link in both directions: declaring trust
//! makes a citizen reachable from their representative as well, which keeps
//! the flow graph strongly connected instead of draining everything into the
//! earliest joiners. Each citizen's outgoing flow weights are normalized
//! into a probability distribution.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Per-citizen political tendencies in [0, 1].
#[derive(Debug, Clone)]
pub struct TendencyPopulation {
    x: Vec<f64>,
    seed: u64,
}

impl TendencyPopulation {
    /// Wraps an explicit tendency vector (every entry validated into [0, 1]).
    pub fn from_tendencies(x: Vec<f64>) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::param("population needs at least 2 citizens"));
        }
        if let Some(bad) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::param(format!("tendency {bad} outside [0, 1]")));
        }
        Ok(TendencyPopulation { x, seed: 0 })
    }

    pub fn tendencies(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Draws `n` tendencies from Uniform[0, 1]; identical seeds give identical
/// vectors.
pub fn generate_tendencies(n: usize, seed: u64) -> Result<TendencyPopulation> {
    if n < 2 {
        return Err(Error::param("population needs at least 2 citizens"));
    }
    let mut rng = rng_from_seed(seed);
    let x = (0..n).map(|_| rng.random()).collect();
    Ok(TendencyPopulation { x, seed })
}

/// Trust between two tendencies: 1 when identical, 0 when fully opposed.
pub fn edge_weight(x_i: f64, x_j: f64) -> Result<f64> {
    for v in [x_i, x_j] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::param(format!("tendency {v} outside [0, 1]")));
        }
    }
    Ok(1.0 - (x_i - x_j).abs())
}

/// Growth parameters for network generation.
#[derive(Debug, Clone, Copy)]
pub struct NetworkGenParams {
    /// Trust links declared by each citizen.
    pub m: usize,
    /// Assortativity strength: 0 is pure preferential attachment, larger
    /// values bias links toward similar tendencies.
    pub beta: f64,
    pub seed: u64,
}

impl Default for NetworkGenParams {
    fn default() -> Self {
        NetworkGenParams {
            m: 3,
            beta: 24.0,
            seed: 0,
        }
    }
}

/// One directed flow edge.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub target: usize,
    /// Tendency similarity, exactly `1 - |x_i - x_j|`.
    pub raw: f64,
    /// Row-normalized flow weight; each citizen's outgoing weights sum to 1.
    pub weight: f64,
    /// Whether the source citizen declared this link themselves (false for
    /// the reciprocal direction of somebody else's declaration).
    pub declared: bool,
}

/// Weighted trust network with row-stochastic outgoing flow weights.
#[derive(Debug, Clone)]
pub struct TrustNetwork {
    n: usize,
    out: Vec<Vec<Edge>>,
}

impl TrustNetwork {
    /// Builds a network from an explicit directed edge list, with no
    /// reciprocation added. Raw weights come from the similarity rule; rows
    /// are normalized. Every citizen must have at least one outgoing edge.
    pub fn from_edges(pop: &TendencyPopulation, edges: &[(usize, usize)]) -> Result<Self> {
        let n = pop.len();
        let x = pop.tendencies();
        let mut out: Vec<Vec<Edge>> = vec![Vec::new(); n];
        for &(src, dst) in edges {
            if src >= n || dst >= n {
                return Err(Error::param(format!("edge ({src}, {dst}) out of range")));
            }
            if src == dst {
                return Err(Error::param(format!("self-loop at citizen {src}")));
            }
            if out[src].iter().any(|e| e.target == dst) {
                return Err(Error::param(format!("duplicate edge ({src}, {dst})")));
            }
            out[src].push(Edge {
                target: dst,
                raw: edge_weight(x[src], x[dst])?,
                weight: 0.0,
                declared: true,
            });
        }
        if let Some(lonely) = out.iter().position(|row| row.is_empty()) {
            return Err(Error::param(format!(
                "citizen {lonely} has no outgoing links"
            )));
        }
        let mut net = TrustNetwork { n, out };
        net.normalize_rows();
        Ok(net)
    }

    fn normalize_rows(&mut self) {
        for row in &mut self.out {
            let total: f64 = row.iter().map(|e| e.raw).sum();
            if total > 0.0 {
                for e in row.iter_mut() {
                    e.weight = e.raw / total;
                }
            } else {
                // All links here have zero similarity; trust them equally.
                let w = 1.0 / row.len() as f64;
                for e in row.iter_mut() {
                    e.weight = w;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Outgoing flow edges of a citizen (declared links plus reciprocals).
    pub fn out_edges(&self, citizen: usize) -> &[Edge] {
        &self.out[citizen]
    }

    /// Total number of flow edges.
    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Declared-link in-degree per citizen: how many others declared trust in
    /// them. This is the popularity the growth process attaches to.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for row in &self.out {
            for e in row {
                if e.declared {
                    deg[e.target] += 1;
                }
            }
        }
        deg
    }

    /// Writes the declared links as `source,target,raw_weight,normalized_weight`
    /// for external layout/visualization tools. The normalized weight is the
    /// link's share of the source citizen's outgoing flow.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "source,target,raw_weight,normalized_weight")?;
        for (src, row) in self.out.iter().enumerate() {
            for e in row {
                if e.declared {
                    writeln!(w, "{},{},{},{}", src, e.target, e.raw, e.weight)?;
                }
            }
        }
        Ok(())
    }
}

/// Grows a trust network over the population by preferential attachment with
/// an assortativity bias.
///
/// Citizens are added in a seeded random order. The first `m + 1` arrivals
/// declare links to each other so every early citizen starts with `m`
/// outgoing links. Each later arrival declares `m` links to distinct
/// existing citizens, picking target `t` with probability proportional to
/// `(in_degree(t) + 1) * (1 - |x_new - x_t|)^beta` over declared in-degrees.
/// The flow graph is the symmetric closure of the declared links.
pub fn generate_network(
    pop: &TendencyPopulation,
    params: &NetworkGenParams,
) -> Result<TrustNetwork> {
    let n = pop.len();
    let x = pop.tendencies();
    if params.m < 1 {
        return Err(Error::param("m must be at least 1"));
    }
    if params.m >= n {
        return Err(Error::param(format!(
            "m = {} needs a population larger than {}",
            params.m, n
        )));
    }
    if params.beta.is_nan() || params.beta < 0.0 {
        return Err(Error::param("beta must be non-negative"));
    }

    let m = params.m;
    let mut rng = rng_from_seed(params.seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    // Declared links, keyed by unordered pair: (low declared high, high
    // declared low).
    let mut pairs: BTreeMap<(usize, usize), (bool, bool)> = BTreeMap::new();
    let mut in_degree = vec![0usize; n];
    let mut declare = |src: usize, dst: usize, in_degree: &mut Vec<usize>| {
        let entry = pairs.entry((src.min(dst), src.max(dst))).or_insert((false, false));
        if src < dst {
            entry.0 = true;
        } else {
            entry.1 = true;
        }
        in_degree[dst] += 1;
    };

    // Bootstrap: the first m + 1 arrivals all declare trust in each other.
    let mut present: Vec<usize> = Vec::with_capacity(n);
    for (i, &a) in order[..m + 1].iter().enumerate() {
        for (j, &b) in order[..m + 1].iter().enumerate() {
            if i != j {
                declare(a, b, &mut in_degree);
            }
        }
        present.push(a);
    }

    let mut scores: Vec<f64> = Vec::with_capacity(n);
    for &newcomer in &order[m + 1..] {
        scores.clear();
        for &t in &present {
            let sim = 1.0 - (x[newcomer] - x[t]).abs();
            scores.push((in_degree[t] + 1) as f64 * sim.powf(params.beta));
        }
        for _ in 0..m {
            let pick = sample_index(&mut rng, &scores);
            declare(newcomer, present[pick], &mut in_degree);
            scores[pick] = f64::NAN; // picked; no duplicate targets
        }
        present.push(newcomer);
    }

    let mut out: Vec<Vec<Edge>> = vec![Vec::new(); n];
    for (&(a, b), &(a_declared, b_declared)) in &pairs {
        let raw = edge_weight(x[a], x[b])?;
        out[a].push(Edge {
            target: b,
            raw,
            weight: 0.0,
            declared: a_declared,
        });
        out[b].push(Edge {
            target: a,
            raw,
            weight: 0.0,
            declared: b_declared,
        });
    }
    let mut net = TrustNetwork { n, out };
    net.normalize_rows();
    Ok(net)
}

/// Samples an index proportionally to `scores`, skipping NaN entries (already
/// picked). Falls back to a uniform pick over unpicked entries when no score
/// is positive.
fn sample_index(rng: &mut crate::rng::SimRng, scores: &[f64]) -> usize {
    let total: f64 = scores.iter().copied().filter(|s| !s.is_nan()).sum();
    if total > 0.0 {
        let mut target = rng.random::<f64>() * total;
        for (i, &s) in scores.iter().enumerate() {
            if s > 0.0 {
                target -= s;
                if target < 0.0 {
                    return i;
                }
            }
        }
        // Rounding pushed us past the end; take the last positive entry.
        scores.iter().rposition(|&s| s > 0.0).expect("total was positive")
    } else {
        let eligible: Vec<usize> = (0..scores.len()).filter(|&i| !scores[i].is_nan()).collect();
        eligible[rng.random_range(0..eligible.len())]
    }
}
