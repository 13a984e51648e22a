//! Classify a few self-maps of [0, 1] on C¹.
//!
//! ```bash
//! cargo run --example classify_c1
//! ```

use riesz_lab::classifier::{classify_c1, EvidenceValue};
use riesz_lab::PolyMap;

fn main() -> riesz_lab::Result<()> {
    let maps = [
        ("x^2/2", vec![0.0, 0.0, 0.5]),
        ("x/2", vec![0.0, 0.5]),
        ("x", vec![0.0, 1.0]),
        ("1/3", vec![1.0 / 3.0]),
        ("0.4 + 0.3(x - 0.4)^2", vec![0.448, -0.24, 0.3]),
    ];
    for (name, coeffs) in maps {
        let c = classify_c1(&PolyMap::on_unit(coeffs)?);
        print!("{name:>22}  {}", c.verdict);
        if let Some(EvidenceValue::Bracket { lower, upper }) = c.fact("r_n_max") {
            print!("   r_20 in [{lower:.3e}, {upper:.3e}]");
        }
        println!();
    }
    Ok(())
}
