//! Fixed points, shrinking images and log-space iterate derivatives.
//!
//! ```bash
//! cargo run --example fixed_points
//! ```

use riesz_lab::PolyMap;

fn main() -> riesz_lab::Result<()> {
    let map = PolyMap::on_unit(vec![0.2, 0.3, 0.4])?;
    let fp = map.find_fixed_point(100);
    println!(
        "x0 = {:.15} ({:?}, {} of {} seeds agree), phi'(x0) = {:.6}",
        fp.x0, fp.status, fp.seeds_agreeing, fp.seeds, fp.derivative_at_x0
    );

    let bounds = map.orbit_bounds(fp.x0, 30, 1024)?;
    println!("{:>3} {:>12} {:>22}", "n", "diameter", "log sup|phi_n'|");
    for b in bounds.iter().step_by(5) {
        println!(
            "{:>3} {:>12.4e}  [{:>9.3}, {:>9.3}]",
            b.n, b.diameter, b.log_deriv.lower, b.log_deriv.upper
        );
    }

    // x² fixes 0 and 1, so seeds split
    let two = PolyMap::on_unit(vec![0.0, 0.0, 1.0])?.find_fixed_point(100);
    let xs: Vec<f64> = two.candidates.iter().map(|c| c.x).collect();
    println!("x^2: {:?} with limits {xs:?}", two.status);
    Ok(())
}
