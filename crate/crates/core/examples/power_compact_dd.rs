//! Power compactness of `f ↦ f ∘ φ` on the Dales–Davie algebra with
//! weights `Mₙ = (n!)²`.
//!
//! ```bash
//! cargo run --example power_compact_dd
//! ```

use riesz_lab::classifier::classify_dd;
use riesz_lab::dales_davie::WeightSequence;
use riesz_lab::PolyMap;

fn main() -> riesz_lab::Result<()> {
    let weights = WeightSequence::factorial_sq(40);
    for coeffs in [
        vec![0.0, 0.5],
        vec![0.0, 0.0, 0.5],
        vec![0.0, 0.0, 0.0, 0.9],
        vec![0.0, 1.0],
    ] {
        let map = PolyMap::on_unit(coeffs.clone())?;
        let c = classify_dd(&map, &weights)?;
        println!("{coeffs:?}: {}", c.verdict);
        for fact in &c.evidence {
            println!(
                "    {:<32} {}",
                fact.name,
                serde_json::to_string(&fact.value)?
            );
        }
    }
    Ok(())
}
