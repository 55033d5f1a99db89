//! Vote-power propagation: any active subset of the population stands in for
//! the whole of it.
//!
//! Every citizen starts with `1/n` vote power. Active citizens absorb
//! whatever power reaches them; inactive citizens forward theirs along their
//! outgoing trust links each round until (almost) all power has pooled at
//! active citizens. The absorbed-power vector then weights the active
//! citizens' tendencies into a collective tendency and vote.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{coin, derive_seed, rng_from_seed};
use crate::trustnet::{TendencyPopulation, TrustNetwork};

/// Absorption target: stop once this share of total power has been absorbed.
pub const DEFAULT_EPSILON: f64 = 1.0 - 1e-9;

/// Iteration cap; power trapped in inactive cycles is cut off here.
pub fn default_max_iter(n: usize) -> usize {
    10 * n
}

/// Which citizens take part in one decision.
#[derive(Debug, Clone)]
pub struct ActivityMask {
    active: Vec<bool>,
    k: f64,
    resamples: u32,
}

impl ActivityMask {
    /// Wraps explicit participation flags; at least one must be set.
    pub fn from_flags(active: Vec<bool>) -> Result<Self> {
        if !active.iter().any(|&a| a) {
            return Err(Error::param("activity mask has no active citizen"));
        }
        Ok(ActivityMask {
            active,
            k: f64::NAN,
            resamples: 0,
        })
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn count_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Participation percentage this mask was drawn with (NaN for explicit
    /// masks).
    pub fn k(&self) -> f64 {
        self.k
    }

    /// How many all-inactive draws were rejected before this mask came out.
    pub fn resamples(&self) -> u32 {
        self.resamples
    }
}

/// Draws a participation mask with per-citizen probability `k` percent.
/// All-inactive draws are rejected and redrawn from a derived seed.
pub fn sample_activity(n: usize, k: f64, seed: u64) -> Result<ActivityMask> {
    if !(k > 0.0 && k <= 100.0) {
        return Err(Error::param(format!(
            "participation percentage k = {k} outside (0, 100]"
        )));
    }
    if n == 0 {
        return Err(Error::param("empty population"));
    }
    let prob = k / 100.0;
    for attempt in 0u32.. {
        let mut rng = if attempt == 0 {
            rng_from_seed(seed)
        } else {
            rng_from_seed(derive_seed(seed, &[attempt as u64]))
        };
        let active: Vec<bool> = (0..n).map(|_| rng.random_bool(prob)).collect();
        if active.iter().any(|&a| a) {
            return Ok(ActivityMask {
                active,
                k,
                resamples: attempt,
            });
        }
    }
    unreachable!("resampling loop always terminates at the first active draw")
}

/// Result of one propagation run.
#[derive(Debug, Clone)]
pub struct PropagationState {
    /// Absorbed vote power per citizen, renormalized to sum 1. Positive only
    /// at active citizens.
    pub y: Vec<f64>,
    /// Rounds executed before the stop condition fired.
    pub iterations: usize,
    /// Power still in flight at cutoff, discarded before renormalization.
    pub residual: f64,
    /// Largest deviation of `sum(pi) + sum(y)` from 1 seen at any round.
    pub max_conservation_gap: f64,
}

/// Sums a slice and divides it through by the sum. Shared by every code path
/// that produces a weight vector, so equal inputs yield bit-equal outputs.
fn normalize(v: &mut [f64]) -> f64 {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        for e in v.iter_mut() {
            *e /= total;
        }
    }
    total
}

/// Uniform weight vector over `n` citizens, normalized like any other weight
/// vector.
pub fn uniform_weights(n: usize) -> Vec<f64> {
    let mut v = vec![1.0 / n as f64; n];
    normalize(&mut v);
    v
}

/// Runs the iterative absorb-and-forward process until `epsilon` of the
/// total power has been absorbed or `max_iter` rounds have passed.
pub fn propagate_vote_power(
    net: &TrustNetwork,
    mask: &ActivityMask,
    epsilon: f64,
    max_iter: usize,
) -> Result<PropagationState> {
    let n = net.n();
    if mask.len() != n {
        return Err(Error::param(format!(
            "mask length {} does not match network size {n}",
            mask.len()
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon must lie strictly between 0 and 1"));
    }
    if max_iter < 1 {
        return Err(Error::param("max_iter must be at least 1"));
    }

    let active = mask.active();
    let mut pi = vec![1.0 / n as f64; n];
    let mut y = vec![0.0_f64; n];
    let mut next_pi = vec![0.0_f64; n];
    let mut iterations = 0usize;
    let mut max_gap = (pi.iter().sum::<f64>() - 1.0).abs();

    while y.iter().sum::<f64>() < epsilon && iterations < max_iter {
        // Active citizens absorb; inactive citizens keep forwarding.
        for ((&is_active, y_i), pi_i) in active.iter().zip(&mut y).zip(&mut pi) {
            if is_active {
                *y_i += *pi_i;
                *pi_i = 0.0;
            }
        }
        next_pi.fill(0.0);
        for (i, &mass) in pi.iter().enumerate() {
            if mass > 0.0 {
                for e in net.out_edges(i) {
                    next_pi[e.target] += mass * e.weight;
                }
            }
        }
        std::mem::swap(&mut pi, &mut next_pi);
        iterations += 1;

        let gap = (pi.iter().sum::<f64>() + y.iter().sum::<f64>() - 1.0).abs();
        if gap > max_gap {
            max_gap = gap;
        }
    }

    let residual = pi.iter().sum::<f64>();
    normalize(&mut y);
    Ok(PropagationState {
        y,
        iterations,
        residual,
        max_conservation_gap: max_gap,
    })
}

/// Absorbed vote power computed exactly, by solving the linear system of the
/// absorbing chain instead of iterating.
///
/// With `Q` the inactive-to-inactive block of the flow matrix, the visit
/// totals `z` of the inactive states solve `(I - Q^T) z = pi0_inactive`;
/// active citizen `j` then absorbs `1/n + sum_i z_i A_ij`. Fails with a
/// structural error when some inactive citizen cannot reach any active one
/// (the chain would trap power forever).
pub fn exact_absorption_oracle(net: &TrustNetwork, mask: &ActivityMask) -> Result<Vec<f64>> {
    let n = net.n();
    if mask.len() != n {
        return Err(Error::param(format!(
            "mask length {} does not match network size {n}",
            mask.len()
        )));
    }
    let active = mask.active();

    // Every inactive citizen must be able to reach an active one through
    // positive-weight links.
    let mut reaches = active.to_vec();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for e in net.out_edges(i) {
            if e.weight > 0.0 {
                rev[e.target].push(i);
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| active[i]).collect();
    while let Some(v) = queue.pop_front() {
        for &u in &rev[v] {
            if !reaches[u] {
                reaches[u] = true;
                queue.push_back(u);
            }
        }
    }
    if let Some(stuck) = reaches.iter().position(|&r| !r) {
        return Err(Error::Structural(format!(
            "citizen {stuck} has no path to any active citizen; absorbed power is undefined"
        )));
    }

    let transient: Vec<usize> = (0..n).filter(|&i| !active[i]).collect();
    let t = transient.len();
    let mut transient_index = vec![usize::MAX; n];
    for (ti, &node) in transient.iter().enumerate() {
        transient_index[node] = ti;
    }

    // (I - Q^T) z = pi0 over the inactive block.
    let mut mat = vec![vec![0.0_f64; t]; t];
    for (ti, row) in mat.iter_mut().enumerate() {
        row[ti] = 1.0;
    }
    for (ui, &u) in transient.iter().enumerate() {
        for e in net.out_edges(u) {
            let vi = transient_index[e.target];
            if vi != usize::MAX {
                mat[vi][ui] -= e.weight;
            }
        }
    }
    let rhs = vec![1.0 / n as f64; t];
    let z = solve_linear(mat, rhs)?;

    let mut y = vec![0.0_f64; n];
    for i in 0..n {
        if active[i] {
            y[i] = 1.0 / n as f64;
        }
    }
    for (ui, &u) in transient.iter().enumerate() {
        for e in net.out_edges(u) {
            if active[e.target] {
                y[e.target] += z[ui] * e.weight;
            }
        }
    }
    Ok(y)
}

/// Gaussian elimination with partial pivoting; the systems here are tiny.
#[allow(clippy::needless_range_loop)] // two rows of `a` are live per update
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let t = b.len();
    for col in 0..t {
        let pivot_row = (col..t)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .expect("non-empty range");
        if a[pivot_row][col].abs() < 1e-12 {
            return Err(Error::Structural(
                "absorbing-chain system is singular".into(),
            ));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..t {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..t {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0_f64; t];
    for row in (0..t).rev() {
        let mut acc = b[row];
        for k in row + 1..t {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// A collective decision: a tendency in [0, 1] and the corresponding binary
/// vote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionOutcome {
    pub tendency: f64,
    pub vote: u8,
}

const TIE_COIN: u64 = u64::MAX;

/// Weights each citizen's tendency by their share of the vote power.
///
/// The vote compares the power mass behind each option; citizens sitting at
/// exactly 0.5 put their mass behind a side chosen by a per-citizen seeded
/// coin, and an exactly tied vote falls to one final seeded coin.
pub fn weighted_outcome(
    pop: &TendencyPopulation,
    weights: &[f64],
    vote_seed: u64,
) -> Result<DecisionOutcome> {
    let x = pop.tendencies();
    if weights.len() != x.len() {
        return Err(Error::param(format!(
            "weights length {} does not match population size {}",
            weights.len(),
            x.len()
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::param(format!(
            "weights sum to {total}, expected 1"
        )));
    }

    let mut tendency = 0.0;
    for i in 0..x.len() {
        tendency += x[i] * weights[i];
    }

    let mut mass_for = 0.0;
    let mut mass_against = 0.0;
    for i in 0..x.len() {
        if x[i] > 0.5 {
            mass_for += weights[i];
        } else if x[i] < 0.5 {
            mass_against += weights[i];
        } else if coin(vote_seed, i as u64) {
            mass_for += weights[i];
        } else {
            mass_against += weights[i];
        }
    }
    let vote = if mass_for > mass_against {
        1
    } else if mass_against > mass_for {
        0
    } else {
        coin(vote_seed, TIE_COIN) as u8
    };
    Ok(DecisionOutcome { tendency, vote })
}

/// The benchmark outcome with everyone voting: the population mean tendency
/// and the unweighted majority vote.
pub fn full_population_reference(pop: &TendencyPopulation, vote_seed: u64) -> DecisionOutcome {
    let weights = uniform_weights(pop.len());
    weighted_outcome(pop, &weights, vote_seed).expect("uniform weights are valid")
}

/// Unweighted outcome over only the active citizens.
pub fn direct_baseline(
    pop: &TendencyPopulation,
    mask: &ActivityMask,
    vote_seed: u64,
) -> Result<DecisionOutcome> {
    if mask.len() != pop.len() {
        return Err(Error::param(format!(
            "mask length {} does not match population size {}",
            mask.len(),
            pop.len()
        )));
    }
    let count = mask.count_active();
    let mut weights = vec![0.0_f64; pop.len()];
    for (w, &a) in weights.iter_mut().zip(mask.active()) {
        if a {
            *w = 1.0 / count as f64;
        }
    }
    normalize(&mut weights);
    weighted_outcome(pop, &weights, vote_seed)
}

/// Absolute gap between a reference tendency and an observed one.
pub fn tendency_error(reference: f64, observed: f64) -> f64 {
    (reference - observed).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trustnet::{generate_network, generate_tendencies, NetworkGenParams};
    use proptest::prelude::*;
    use rand::Rng;

    fn all_active(n: usize) -> ActivityMask {
        ActivityMask::from_flags(vec![true; n]).unwrap()
    }

    fn small_net(n: usize, seed: u64) -> (TendencyPopulation, TrustNetwork) {
        let pop = generate_tendencies(n, seed).unwrap();
        let net = generate_network(
            &pop,
            &NetworkGenParams {
                m: 2,
                beta: 1.0,
                seed,
            },
        )
        .unwrap();
        (pop, net)
    }

    #[test]
    fn full_participation_sampling_activates_everyone() {
        let mask = sample_activity(100, 100.0, 5).unwrap();
        assert_eq!(mask.count_active(), 100);
        assert_eq!(mask.resamples(), 0);
    }

    #[test]
    fn sampling_fraction_concentrates() {
        let mask = sample_activity(100_000, 30.0, 17).unwrap();
        let frac = mask.count_active() as f64 / 100_000.0;
        assert!((frac - 0.30).abs() < 0.01, "fraction = {frac}");
    }

    #[test]
    fn sampling_rejects_bad_k() {
        assert!(sample_activity(10, 0.0, 1).is_err());
        assert!(sample_activity(10, -5.0, 1).is_err());
        assert!(sample_activity(10, 100.5, 1).is_err());
    }

    #[test]
    fn all_inactive_draws_are_resampled() {
        // At k = 1% and n = 5 most seeds need at least one redraw.
        let mut saw_resample = false;
        for seed in 0..50 {
            let mask = sample_activity(5, 1.0, seed).unwrap();
            assert!(mask.count_active() >= 1);
            saw_resample |= mask.resamples() > 0;
        }
        assert!(saw_resample, "no seed in 0..50 exercised the redraw path");
    }

    #[test]
    fn all_active_absorbs_uniformly_in_one_round() {
        let (_, net) = small_net(20, 3);
        let state =
            propagate_vote_power(&net, &all_active(20), DEFAULT_EPSILON, default_max_iter(20))
                .unwrap();
        assert_eq!(state.iterations, 1);
        assert_eq!(state.residual, 0.0);
        let expected = uniform_weights(20);
        assert_eq!(state.y, expected);
    }

    #[test]
    fn sole_active_citizen_absorbs_everything() {
        let pop = TendencyPopulation::from_tendencies(vec![0.2, 0.8, 0.4, 0.6]).unwrap();
        // Directed 4-cycle: strongly connected.
        let net = TrustNetwork::from_edges(&pop, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let mut flags = vec![false; 4];
        flags[1] = true;
        let mask = ActivityMask::from_flags(flags).unwrap();
        let state = propagate_vote_power(&net, &mask, 1.0 - 1e-12, 100_000).unwrap();
        for (i, &v) in state.y.iter().enumerate() {
            let want = if i == 1 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-9, "y[{i}] = {v}");
        }
    }

    #[test]
    fn propagation_checks_dimensions_and_settings() {
        let (_, net) = small_net(10, 1);
        let mask = all_active(9);
        assert!(propagate_vote_power(&net, &mask, DEFAULT_EPSILON, 100).is_err());
        let mask = all_active(10);
        assert!(propagate_vote_power(&net, &mask, 1.5, 100).is_err());
        assert!(propagate_vote_power(&net, &mask, DEFAULT_EPSILON, 0).is_err());
    }

    #[test]
    fn conservation_holds_throughout() {
        for seed in 0..20 {
            let (_, net) = small_net(50, seed);
            let mask = sample_activity(50, 40.0, seed ^ 0xabc).unwrap();
            let state =
                propagate_vote_power(&net, &mask, DEFAULT_EPSILON, default_max_iter(50)).unwrap();
            assert!(
                state.max_conservation_gap < 1e-9,
                "gap = {}",
                state.max_conservation_gap
            );
            let active = mask.active();
            for (i, &v) in state.y.iter().enumerate() {
                assert!(v >= 0.0);
                assert!(v == 0.0 || active[i], "inactive citizen {i} absorbed {v}");
            }
        }
    }

    #[test]
    fn oracle_all_active_is_uniform() {
        let (_, net) = small_net(12, 9);
        let y = exact_absorption_oracle(&net, &all_active(12)).unwrap();
        for &v in &y {
            assert!((v - 1.0 / 12.0).abs() < 1e-15);
        }
    }

    #[test]
    fn oracle_line_network_pools_at_the_middle() {
        let pop = TendencyPopulation::from_tendencies(vec![0.1, 0.5, 0.9]).unwrap();
        let net =
            TrustNetwork::from_edges(&pop, &[(0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
        let mask = ActivityMask::from_flags(vec![false, true, false]).unwrap();
        let y = exact_absorption_oracle(&net, &mask).unwrap();
        assert!((y[1] - 1.0).abs() < 1e-12, "y = {y:?}");
        assert_eq!(y[0], 0.0);
        assert_eq!(y[2], 0.0);
    }

    #[test]
    fn oracle_rejects_unreachable_active_set() {
        let pop = TendencyPopulation::from_tendencies(vec![0.1, 0.2, 0.9]).unwrap();
        // Citizens 0 and 1 only trust each other; citizen 2 watches fromapart.
        let net = TrustNetwork::from_edges(&pop, &[(0, 1), (1, 0), (2, 0)]).unwrap();
        let mask = ActivityMask::from_flags(vec![false, false, true]).unwrap();
        match exact_absorption_oracle(&net, &mask) {
            Err(Error::Structural(_)) => {}
            other => panic!("expected structural error, got {other:?}"),
        }
    }

    #[test]
    fn propagation_matches_oracle_on_random_instances() {
        let mut rng = rng_from_seed(2_024);
        let mut checked = 0;
        while checked < 30 {
            let seed: u64 = rng.random();
            let (_, net) = small_net(8, seed);
            let mask = match sample_activity(8, 50.0, seed ^ 0x55) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let oracle = match exact_absorption_oracle(&net, &mask) {
                Ok(y) => y,
                Err(_) => continue, // trapped instance: oracle undefined
            };
            let state = propagate_vote_power(&net, &mask, 1.0 - 1e-10, 1_000_000).unwrap();
            for (i, (got, want)) in state.y.iter().zip(&oracle).enumerate() {
                assert!(
                    (got - want).abs() < 1e-6,
                    "seed {seed} citizen {i}: {got} vs {want}"
                );
            }
            checked += 1;
        }
    }

    #[test]
    fn weighted_outcome_matches_hand_computation() {
        let pop = TendencyPopulation::from_tendencies(vec![0.1, 0.9]).unwrap();
        let out = weighted_outcome(&pop, &[0.3, 0.7], 1).unwrap();
        assert!((out.tendency - 0.66).abs() < 1e-12);
        assert_eq!(out.vote, 1);
    }

    #[test]
    fn weighted_outcome_with_point_mass() {
        let pop = TendencyPopulation::from_tendencies(vec![0.2, 0.9]).unwrap();
        let out = weighted_outcome(&pop, &[1.0, 0.0], 1).unwrap();
        assert_eq!(out.tendency, 0.2);
        assert_eq!(out.vote, 0);
    }

    #[test]
    fn weighted_outcome_rejects_unnormalized_weights() {
        let pop = TendencyPopulation::from_tendencies(vec![0.2, 0.9]).unwrap();
        assert!(weighted_outcome(&pop, &[0.6, 0.6], 1).is_err());
        assert!(weighted_outcome(&pop, &[1.0], 1).is_err());
    }

    #[test]
    fn uniform_weights_reduce_to_population_mean() {
        let pop = generate_tendencies(37, 4).unwrap();
        let out = weighted_outcome(&pop, &uniform_weights(37), 9).unwrap();
        let mean: f64 = pop.tendencies().iter().sum::<f64>() / 37.0;
        assert!((out.tendency - mean).abs() < 1e-12);
        assert_eq!(out, full_population_reference(&pop, 9));
    }

    #[test]
    fn reference_matches_hand_computation() {
        let pop = TendencyPopulation::from_tendencies(vec![0.2, 0.4, 0.9]).unwrap();
        let out = full_population_reference(&pop, 11);
        assert!((out.tendency - 0.5).abs() < 1e-12);
        assert_eq!(out.vote, 0);

        let pop = TendencyPopulation::from_tendencies(vec![0.7, 0.7, 0.7]).unwrap();
        let out = full_population_reference(&pop, 11);
        assert!((out.tendency - 0.7).abs() < 1e-12);
        assert_eq!(out.vote, 1);
    }

    #[test]
    fn tied_reference_vote_is_coin_resolved_and_reproducible() {
        let pop = TendencyPopulation::from_tendencies(vec![0.3, 0.8]).unwrap();
        let a = full_population_reference(&pop, 123);
        let b = full_population_reference(&pop, 123);
        assert_eq!(a, b);
        // Some seed must flip the coin the other way.
        let flipped = (0..64u64).any(|s| full_population_reference(&pop, s).vote != a.vote);
        assert!(flipped);
    }

    #[test]
    fn baseline_with_everyone_active_equals_reference() {
        let pop = generate_tendencies(25, 6).unwrap();
        let mask = all_active(25);
        let direct = direct_baseline(&pop, &mask, 77).unwrap();
        assert_eq!(direct, full_population_reference(&pop, 77));
    }

    #[test]
    fn baseline_restricted_to_actives() {
        let pop = TendencyPopulation::from_tendencies(vec![0.1, 0.9, 0.9]).unwrap();
        let mask = ActivityMask::from_flags(vec![true, false, true]).unwrap();
        let out = direct_baseline(&pop, &mask, 5).unwrap();
        assert!((out.tendency - 0.5).abs() < 1e-12);
        // One vote each way: coin-resolved, stable per seed.
        assert_eq!(out.vote, direct_baseline(&pop, &mask, 5).unwrap().vote);

        let solo = ActivityMask::from_flags(vec![false, true, false]).unwrap();
        let out = direct_baseline(&pop, &solo, 5).unwrap();
        assert!((out.tendency - 0.9).abs() < 1e-12);
        assert_eq!(out.vote, 1);
    }

    #[test]
    fn tendency_error_is_absolute_difference() {
        assert_eq!(tendency_error(0.5, 0.5), 0.0);
        assert!((tendency_error(0.5, 0.66) - 0.16).abs() < 1e-12);
        assert_eq!(tendency_error(1.0, 0.0), 1.0);
    }

    #[test]
    fn full_participation_is_exact() {
        for seed in 0..10 {
            let (pop, net) = small_net(60, seed);
            let mask = sample_activity(60, 100.0, seed).unwrap();
            let state =
                propagate_vote_power(&net, &mask, DEFAULT_EPSILON, default_max_iter(60)).unwrap();
            let ddd = weighted_outcome(&pop, &state.y, seed).unwrap();
            let reference = full_population_reference(&pop, seed);
            assert_eq!(ddd.tendency, reference.tendency, "seed {seed}");
            assert_eq!(ddd.vote, reference.vote, "seed {seed}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn propagation_conserves_and_normalizes(
            n in 4usize..24,
            k in 10.0f64..100.0,
            seed in 0u64..10_000,
        ) {
            let pop = generate_tendencies(n, seed).unwrap();
            let net = generate_network(&pop, &NetworkGenParams { m: 2, beta: 1.0, seed }).unwrap();
            let mask = sample_activity(n, k, seed ^ 0x9999).unwrap();
            let state =
                propagate_vote_power(&net, &mask, DEFAULT_EPSILON, default_max_iter(n)).unwrap();
            prop_assert!(state.max_conservation_gap < 1e-9);
            prop_assert!((state.y.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(state.residual >= 0.0);
            for (i, &v) in state.y.iter().enumerate() {
                prop_assert!(v >= 0.0);
                prop_assert!(v == 0.0 || mask.active()[i]);
            }
        }
    }
}
