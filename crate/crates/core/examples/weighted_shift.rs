//! The weighted shift `x_{j,k} ↦ x_{j,k+1} / (k+1)` on the ball of ℓ∞(ℕ²):
//! factorial decay of the iterates, the Riesz certificate, and a witness
//! that no power is compact.
//!
//! ```bash
//! cargo run --example weighted_shift
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riesz_lab::gleason_shift::{
    noncompact_witness, riesz_certificate, schwarz_check, shift_iterate_sup, DEFAULT_TRUNCATION,
};

fn main() -> riesz_lab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    println!("{:>3} {:>14} {:>14}", "n", "1/(n+1)!", "sampled sup");
    for n in 0..=6 {
        let s = shift_iterate_sup(n, (16, 16), 50, &mut rng)?;
        println!("{n:>3} {:>14.6e} {:>14.6e}", s.closed_form, s.empirical);
    }

    let cert = riesz_certificate(10, DEFAULT_TRUNCATION)?;
    let last = cert.entries.last().expect("ten entries");
    println!(
        "C_10^(1/10) <= {:.4}, decreasing = {}",
        last.root, cert.decreasing
    );

    let w = noncompact_witness(3, 8, DEFAULT_TRUNCATION)?;
    println!(
        "T^3 p_(j,1), j <= 8: {} pairs, distances in [{:.6}, {:.6}], expected {:.6}",
        w.pairs.len(),
        w.min_distance.unwrap_or(0.0),
        w.max_distance.unwrap_or(0.0),
        w.expected
    );

    let s = schwarz_check(1000, (16, 16), &mut rng);
    println!(
        "Schwarz bound: {} violations in {} pairs",
        s.violations, s.pairs
    );
    Ok(())
}
