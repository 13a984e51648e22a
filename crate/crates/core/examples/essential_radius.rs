//! Brackets on `‖Tⁿ - K‖^{1/n}` in the C¹ norm, the quantity whose limit is
//! the essential spectral radius.
//!
//! ```bash
//! cargo run --example essential_radius
//! ```

use riesz_lab::operator::{essential_radius_sequence, NormKind};
use riesz_lab::PolyMap;

fn main() -> riesz_lab::Result<()> {
    for coeffs in [vec![0.0, 0.5], vec![0.0, 0.0, 0.5]] {
        let map = PolyMap::on_unit(coeffs.clone())?;
        let seq = essential_radius_sequence(&map, 0.0, NormKind::C1, 20)?;
        println!("phi = {coeffs:?}");
        println!("{:>4} {:>14} {:>14}", "n", "r_n lower", "r_n upper");
        for e in seq.entries.iter().step_by(4) {
            println!(
                "{:>4} {:>14.6e} {:>14.6e}",
                e.n,
                e.log_lower.exp(),
                e.log_upper.exp()
            );
        }
        println!(
            "  essential radius >= {:.6}",
            seq.last().log_ess_lower.exp()
        );
    }
    Ok(())
}
