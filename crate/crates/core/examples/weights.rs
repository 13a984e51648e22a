//! Admissibility and nonanalyticity of weight sequences.
//!
//! ```bash
//! cargo run --example weights
//! ```

use riesz_lab::dales_davie::{check_admissible, dd_norm, WeightSequence};
use riesz_lab::{Interval, Poly};

fn main() -> riesz_lab::Result<()> {
    let families = [
        ("(n!)^2", WeightSequence::factorial_sq(40)),
        ("(n!)^1.5", WeightSequence::factorial_pow(1.5, 40)?),
        ("n!", WeightSequence::factorial_pow(1.0, 40)?),
        ("(n!)^0.5", WeightSequence::factorial_pow(0.5, 40)?),
    ];
    for (name, w) in &families {
        let r = check_admissible(w)?;
        println!(
            "{name:>9}: binomial {:<5} tail_40 = {:.4}  {}",
            r.binomial_ok,
            r.nonanalytic_tail.last().copied().unwrap_or(f64::NAN),
            r.nonanalytic_status
        );
    }

    let w = &families[0].1;
    let f = Poly::new(vec![0.0, 0.0, 0.5]);
    let g = Poly::new(vec![1.0, -1.0, 0.25]);
    let nf = dd_norm(&f, w, Interval::UNIT)?;
    let ng = dd_norm(&g, w, Interval::UNIT)?;
    let nfg = dd_norm(&f.mul(&g), w, Interval::UNIT)?;
    println!(
        "||fg|| = {:.6} <= ||f|| ||g|| = {:.6}",
        nfg.upper,
        nf.upper * ng.upper
    );
    Ok(())
}
