//! Majority-vote probabilities: how group size and individual competence
//! combine.
//!
//! Prints the probability that a majority of n voters picks the better of
//! two options for a few (n, p) pairs, then writes the full surface (the
//! fig2 preset grid) as CSV.
//!
//! ```bash
//! cargo run --example condorcet_surface
//! ```

use demosim::condorcet::{condorcet_surface, majority_probability, JuryParams, SurfaceSpec, TieRule};

fn main() -> demosim::Result<()> {
    println!("probability that a majority vote picks the better option\n");
    println!("{:>6} {:>8} {:>14}", "n", "p", "P(majority)");
    for &(n, p) in &[
        (1u64, 0.6),
        (11, 0.6),
        (101, 0.6),
        (1_001, 0.6),
        (101, 0.45),
        (1_001, 0.45),
        (101, 0.5),
    ] {
        let params = JuryParams::new(n, p, TieRule::FairCoin)?;
        println!("{n:>6} {p:>8} {:>14.8}", majority_probability(&params));
    }
    println!("\ncompetence above one half compounds toward certainty; below it, toward zero.");

    let grid = condorcet_surface(&SurfaceSpec {
        p_min: 0.0,
        p_max: 1.0,
        p_step: 0.01,
        n_min: 1,
        n_max: 100,
        tie_rule: TieRule::FairCoin,
    })?;
    let csv = demosim::experiments::surface_csv(&grid);
    let path = std::env::temp_dir().join("condorcet_surface.csv");
    std::fs::write(&path, csv)?;
    println!(
        "\nwrote the {} x {} surface to {}",
        grid.p_values.len(),
        grid.n_values.len(),
        path.display()
    );
    Ok(())
}
