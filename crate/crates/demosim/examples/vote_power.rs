//! Vote-power propagation: a 30% turnout standing in for everyone.
//!
//! Runs the absorb-and-forward process on one generated network, shows the
//! conservation bookkeeping, cross-checks the result against the exact
//! absorbing-chain solve, and compares three collective outcomes: the full
//! population, the vote-power weighting, and the unweighted active subset.
//!
//! ```bash
//! cargo run --example vote_power
//! ```

use demosim::ddd::{
    default_max_iter, direct_baseline, exact_absorption_oracle, full_population_reference,
    propagate_vote_power, sample_activity, tendency_error, weighted_outcome, DEFAULT_EPSILON,
};
use demosim::rng::derive_seed;
use demosim::trustnet::{generate_network, generate_tendencies, NetworkGenParams};

fn main() -> demosim::Result<()> {
    let master = 14;
    let n = 100;
    // One seed per purpose, all derived from the master seed. Reusing one
    // seed verbatim would correlate the draws (the same generator stream
    // would decide both tendencies and participation).
    let pop = generate_tendencies(n, derive_seed(master, &[1]))?;
    let net = generate_network(
        &pop,
        &NetworkGenParams {
            m: 3,
            beta: 24.0,
            seed: derive_seed(master, &[2]),
        },
    )?;
    let mask = sample_activity(n, 30.0, derive_seed(master, &[3]))?;
    println!(
        "{} of {} citizens participate (30% turnout, {} redraws)",
        mask.count_active(),
        n,
        mask.resamples()
    );

    let state = propagate_vote_power(&net, &mask, DEFAULT_EPSILON, default_max_iter(n))?;
    println!(
        "propagation: {} rounds, residual {:.2e}, worst conservation gap {:.2e}",
        state.iterations, state.residual, state.max_conservation_gap
    );

    let exact = exact_absorption_oracle(&net, &mask)?;
    let worst = state
        .y
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("worst gap to the exact absorbing-chain solve: {worst:.2e}");

    let mut top: Vec<(usize, f64)> = state.y.iter().copied().enumerate().collect();
    top.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("\nheaviest vote-power holders:");
    for (citizen, power) in top.iter().take(5) {
        println!(
            "  citizen {citizen:>3}: {:.3} of the total power (tendency {:.3})",
            power,
            pop.tendencies()[*citizen]
        );
    }

    let vote_seed = derive_seed(master, &[4]);
    let reference = full_population_reference(&pop, vote_seed);
    let weighted = weighted_outcome(&pop, &state.y, vote_seed)?;
    let direct = direct_baseline(&pop, &mask, vote_seed)?;
    println!("\ncollective tendency (0.5 = moderate):");
    println!("  full population: {:.4} -> vote {}", reference.tendency, reference.vote);
    println!(
        "  power-weighted:  {:.4} -> vote {} (error {:.4})",
        weighted.tendency,
        weighted.vote,
        tendency_error(reference.tendency, weighted.tendency)
    );
    println!(
        "  active only:     {:.4} -> vote {} (error {:.4})",
        direct.tendency,
        direct.vote,
        tendency_error(reference.tendency, direct.tendency)
    );
    Ok(())
}
