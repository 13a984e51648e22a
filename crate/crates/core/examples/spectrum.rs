//! Eigenvalues of the truncated composition operator against the set
//! `{φ'(x₀)ⁿ} ∪ {0, 1}`.
//!
//! ```bash
//! cargo run --example spectrum
//! ```

use riesz_lab::operator::build_matrix;
use riesz_lab::spectra::{compare, eigenvalues, predicted_spectrum};
use riesz_lab::PolyMap;

fn main() -> riesz_lab::Result<()> {
    let map = PolyMap::on_unit(vec![0.1, 0.6, 0.2])?;
    let fp = map.find_fixed_point(100);
    let degree = 24;
    let matrix = build_matrix(&map, fp.x0, degree)?;
    let computed = eigenvalues(&matrix)?;
    let predicted = predicted_spectrum(&map, fp.x0, degree)?;
    let report = compare(&computed, &predicted, 1e-9);

    println!("x0 = {:.15}, phi'(x0) = {:.15}", fp.x0, fp.derivative_at_x0);
    for (k, z) in computed.iter().enumerate().take(8) {
        println!("  lambda_{k:<2} = {:.15e}", z.re);
    }
    println!(
        "matched {} of {} predicted, max relative mismatch {:.2e}, valid = {}",
        report.matched_pairs.len(),
        report.predicted.len(),
        report.max_mismatch,
        report.valid
    );
    Ok(())
}
