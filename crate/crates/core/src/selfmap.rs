//! Polynomial self-maps of a real interval: evaluation, differentiation,
//! iteration, fixed points and iterate-range diameters.
//!
//! Iterates are handled two ways. [`PolyMap::iterate`] composes exactly and
//! is limited by degree growth; everything else follows orbits of grid points
//! and of grid cells, which never forms `φₙ` symbolically. Derivatives of
//! iterates are accumulated as `Σ log|φ'(φᵢ(x))|` so that products of many
//! small factors stay representable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Interval, Poly};
use crate::report::logf64;

/// Grid used when validating that a map preserves its domain.
pub const DOMAIN_CHECK_GRID: usize = 10_000;
/// Slack allowed when checking that values stay inside the domain.
pub const DOMAIN_TOL: f64 = 1e-12;
/// Largest degree [`PolyMap::iterate`] will build.
pub const DEFAULT_MAX_ITERATE_DEGREE: usize = 4096;
/// Smallest grid accepted by the orbit-based estimators.
pub const MIN_ORBIT_GRID: usize = 64;

/// A polynomial `φ` mapping the interval `domain` into itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyMapSpec", into = "PolyMapSpec")]
pub struct PolyMap {
    poly: Poly,
    domain: Interval,
}

/// Wire form: `{"coeffs": [...], "domain": [lo, hi]}`, domain defaulting to
/// `[0, 1]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyMapSpec {
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub domain: Interval,
}

impl TryFrom<PolyMapSpec> for PolyMap {
    type Error = Error;

    fn try_from(spec: PolyMapSpec) -> Result<Self> {
        PolyMap::new(spec.coeffs, spec.domain)
    }
}

impl From<PolyMap> for PolyMapSpec {
    fn from(map: PolyMap) -> Self {
        PolyMapSpec {
            coeffs: map.poly.coeffs().to_vec(),
            domain: map.domain,
        }
    }
}

impl PolyMap {
    /// Builds and validates a self-map. Fails if a coefficient is not finite
    /// or if `φ` leaves the domain by more than [`DOMAIN_TOL`].
    pub fn new(coeffs: Vec<f64>, domain: Interval) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidMap("coefficients must be finite".into()));
        }
        let map = PolyMap {
            poly: Poly::new(coeffs),
            domain,
        };
        map.check_self_map()?;
        Ok(map)
    }

    pub fn on_unit(coeffs: Vec<f64>) -> Result<Self> {
        PolyMap::new(coeffs, Interval::UNIT)
    }

    pub fn from_poly(poly: Poly, domain: Interval) -> Result<Self> {
        PolyMap::new(poly.coeffs().to_vec(), domain)
    }

    pub fn identity(domain: Interval) -> Self {
        PolyMap {
            poly: Poly::identity(),
            domain,
        }
    }

    pub fn constant(c: f64, domain: Interval) -> Result<Self> {
        PolyMap::new(vec![c], domain)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn is_constant(&self) -> bool {
        self.poly.is_constant()
    }

    fn check_self_map(&self) -> Result<()> {
        let dom = self.domain;
        let grid = dom.chebyshev_grid(DOMAIN_CHECK_GRID);
        let check = |x: f64| -> Result<()> {
            let y = self.poly.eval(x);
            if dom.contains(y, DOMAIN_TOL) {
                Ok(())
            } else {
                Err(Error::InvalidMap(format!(
                    "φ({x}) = {y} leaves the domain [{}, {}]",
                    dom.lo(),
                    dom.hi()
                )))
            }
        };
        for &x in &grid {
            check(x)?;
        }
        // Interior extrema between grid nodes: locate sign changes of φ'
        // and evaluate at the bisected critical point.
        let dp = self.poly.derivative();
        if self.degree() >= 2 {
            let slopes: Vec<f64> = grid.iter().map(|&x| dp.eval(x)).collect();
            for (i, w) in slopes.windows(2).enumerate() {
                if w[0] == 0.0 || w[0].signum() != w[1].signum() {
                    check(bisect_root(&dp, grid[i], grid[i + 1]))?;
                }
            }
        }
        Ok(())
    }

    /// `φ(x)`; `x` must lie in the domain up to [`DOMAIN_TOL`].
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.domain.contains(x, DOMAIN_TOL) {
            return Err(Error::Domain(format!(
                "{x} is outside [{}, {}]",
                self.domain.lo(),
                self.domain.hi()
            )));
        }
        Ok(self.poly.eval(x))
    }

    /// Evaluation with the result clamped into the domain; used when
    /// following orbits, where rounding may step outside by an ulp.
    fn step(&self, x: f64) -> f64 {
        self.domain.clamp(self.poly.eval(x))
    }

    /// `φ'` as a plain polynomial (its range is unconstrained).
    pub fn derivative(&self) -> Poly {
        self.poly.derivative()
    }

    /// `φₙ` by exact composition, `φ₀` being the identity.
    pub fn iterate(&self, n: usize) -> Result<PolyMap> {
        self.iterate_with_max_degree(n, DEFAULT_MAX_ITERATE_DEGREE)
    }

    pub fn iterate_with_max_degree(&self, n: usize, max_degree: usize) -> Result<PolyMap> {
        let degree = iterate_degree(self.degree(), n);
        if degree > max_degree as u128 {
            return Err(Error::DegreeOverflow {
                degree,
                max: max_degree,
            });
        }
        let mut out = Poly::identity();
        for _ in 0..n {
            out = self.poly.compose(&out);
        }
        Ok(PolyMap {
            poly: out,
            domain: self.domain,
        })
    }

    /// `log sup |φₙ'|` estimated as the largest orbit sum
    /// `Σ_{i<n} log|φ'(φᵢ(x))|` over a Chebyshev grid. `-∞` signals that the
    /// derivative vanishes along every sampled orbit.
    pub fn iterate_deriv_log_sup(&self, n: usize, grid_size: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Precondition("iterate index must be positive".into()));
        }
        Ok(self.orbit_bounds(self.domain.mid(), n, grid_size)?[n - 1]
            .log_deriv
            .lower)
    }

    /// `Σ_{i<n} log|φ'(φᵢ(x))|` for each starting point, `n = 1..=n_max`;
    /// row `n - 1` holds the values for `φₙ`.
    pub fn log_deriv_orbits(&self, starts: &[f64], n_max: usize) -> Vec<Vec<f64>> {
        let dp = self.poly.derivative();
        let tracker = TinyTracker::new(&self.poly);
        let mut points: Vec<(OrbitPoint, f64)> = starts
            .iter()
            .map(|&x| (OrbitPoint::Plain(self.domain.clamp(x)), 0.0))
            .collect();
        let mut out = Vec::with_capacity(n_max);
        for _ in 0..n_max {
            for (x, log_sum) in points.iter_mut() {
                let (next, log_slope) = self.orbit_step(*x, &dp, tracker.as_ref());
                *log_sum += log_slope;
                *x = next;
            }
            out.push(points.iter().map(|p| p.1).collect());
        }
        out
    }

    fn orbit_step(
        &self,
        x: OrbitPoint,
        dp: &Poly,
        tracker: Option<&TinyTracker>,
    ) -> (OrbitPoint, f64) {
        match (x, tracker) {
            (OrbitPoint::Plain(v), t) => {
                let slope = dp.eval(v).abs().ln();
                let next = t.map_or(OrbitPoint::Plain(self.step(v)), |t| t.step_plain(v, self));
                (next, slope)
            }
            (tiny, Some(t)) => t.step_tiny(tiny),
            (OrbitPoint::Tiny { .. }, None) => unreachable!("tiny points need a tracker"),
        }
    }

    /// Euclidean diameter of `φₙ(grid)`, following orbits pointwise.
    pub fn iterate_range_diameter(&self, n: usize, grid_size: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Precondition("iterate index must be positive".into()));
        }
        Ok(self.diameter_sequence(n, grid_size)?[n - 1])
    }

    /// Diameters of `φₙ(grid)` for `n = 1..=n_max`.
    pub fn diameter_sequence(&self, n_max: usize, grid_size: usize) -> Result<Vec<f64>> {
        check_grid(grid_size)?;
        let mut xs = self.domain.chebyshev_grid(grid_size);
        let mut out = Vec::with_capacity(n_max);
        for _ in 0..n_max {
            for x in xs.iter_mut() {
                *x = self.step(*x);
            }
            out.push(diameter(&xs));
        }
        Ok(out)
    }

    /// Per-iterate brackets for `n = 1..=n_max`, measured against `center`.
    ///
    /// Lower ends come from the orbits of grid points. Upper ends come from
    /// enclosures of the orbits of grid cells: a cell `[m - r, m + r]` maps
    /// into `[φ(m) - rS, φ(m) + rS]` with `S = |φ'(m)| + r sup|φ''|`, which also
    /// bounds `|φ'|` on the cell, and `Σ log S` bounds `log |φₙ'|` on it.
    pub fn orbit_bounds(
        &self,
        center: f64,
        n_max: usize,
        grid_size: usize,
    ) -> Result<Vec<IterateBounds>> {
        check_grid(grid_size)?;
        let dom = self.domain;
        let dp = self.poly.derivative();
        let second = if self.degree() >= 2 {
            self.poly.nth_derivative(2).coefficient_bound(dom)
        } else {
            0.0
        };
        let fudge = 1.0 + 8.0 * f64::EPSILON;

        let grid = dom.chebyshev_grid(grid_size);
        let tracker = TinyTracker::new(&self.poly);
        let mut points: Vec<(OrbitPoint, f64)> =
            grid.iter().map(|&x| (OrbitPoint::Plain(x), 0.0)).collect();
        let mut cells: Vec<CellOrbit> = grid
            .windows(2)
            .map(|w| CellOrbit {
                mid: 0.5 * (w[0] + w[1]),
                radius: 0.5 * (w[1] - w[0]) * fudge,
                log_deriv: 0.0,
            })
            .collect();

        let mut out = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            for (x, log_sum) in points.iter_mut() {
                let (next, log_slope) = self.orbit_step(*x, &dp, tracker.as_ref());
                *log_sum += log_slope;
                *x = next;
            }
            for cell in cells.iter_mut() {
                let m = cell.mid;
                let slope =
                    (dp.eval(m).abs() + dp.eval_error_bound(m) + cell.radius * second) * fudge;
                cell.log_deriv += slope.ln();
                let image = self.poly.eval(m);
                // the last term absorbs underflow in the product
                let radius =
                    cell.radius * slope + self.poly.eval_error_bound(m) + f64::MIN_POSITIVE;
                let (lo, hi) = (image - radius, image + radius);
                if lo < dom.lo() || hi > dom.hi() {
                    let (lo, hi) = (lo.max(dom.lo()), hi.min(dom.hi()));
                    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
                    cell.mid = 0.5 * (lo + hi);
                    cell.radius = 0.5 * (hi - lo) * fudge;
                } else {
                    cell.mid = image;
                    cell.radius = radius;
                }
            }

            let values: Vec<f64> = points.iter().map(|p| p.0.value()).collect();
            let log_deriv_lower = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            let log_deriv_upper = cells
                .iter()
                .map(|c| c.log_deriv)
                .fold(f64::NEG_INFINITY, f64::max)
                .max(log_deriv_lower);
            let log_dev_lower = points
                .iter()
                .map(|p| p.0.log_distance(center))
                .fold(f64::NEG_INFINITY, f64::max);
            let dev_lower = log_dev_lower.exp();
            let dev_upper = cells
                .iter()
                .map(|c| ((c.mid - center).abs() + c.radius) * fudge)
                .fold(0.0, f64::max)
                .max(dev_lower);
            out.push(IterateBounds {
                n,
                log_deriv: LogBracket {
                    lower: log_deriv_lower,
                    upper: log_deriv_upper,
                },
                log_deviation: LogBracket {
                    lower: log_dev_lower,
                    upper: dev_upper.ln().max(log_dev_lower),
                },
                diameter: diameter(&values),
            });
        }
        Ok(out)
    }

    /// Picard iteration from `seeds` equally spaced starting points.
    pub fn find_fixed_point(&self, seeds: usize) -> FixedPointReport {
        self.find_fixed_point_with(seeds, &FixedPointConfig::default())
    }

    pub fn find_fixed_point_with(&self, seeds: usize, cfg: &FixedPointConfig) -> FixedPointReport {
        let seeds = seeds.max(1);
        let dp = self.poly.derivative();
        let limits: Vec<Option<f64>> = self
            .domain
            .uniform_grid(seeds)
            .into_iter()
            .map(|s| self.picard(s, cfg))
            .collect();

        let mut candidates: Vec<FixedPointCandidate> = Vec::new();
        for x in limits.iter().flatten() {
            match candidates
                .iter_mut()
                .find(|c| (c.x - x).abs() <= cfg.agree_tol)
            {
                Some(c) => c.seeds += 1,
                None => candidates.push(FixedPointCandidate {
                    x: *x,
                    residual: (self.poly.eval(*x) - x).abs(),
                    derivative: dp.eval(*x),
                    seeds: 1,
                }),
            }
        }
        candidates.sort_by(|a, b| b.seeds.cmp(&a.seeds).then(a.x.total_cmp(&b.x)));

        let basin_diameter_sequence = self
            .diameter_sequence(cfg.diameter_steps, cfg.diameter_grid)
            .unwrap_or_default();
        let converged = limits.iter().filter(|l| l.is_some()).count();
        let (x0, seeds_agreeing) = match candidates.first() {
            Some(c) => (c.x, c.seeds),
            None => (
                limits
                    .iter()
                    .flatten()
                    .next()
                    .copied()
                    .unwrap_or(self.domain.mid()),
                0,
            ),
        };
        let residual = (self.poly.eval(x0) - x0).abs();
        let status = if converged == seeds && candidates.len() == 1 && residual <= cfg.residual_tol
        {
            FixedPointStatus::Found
        } else {
            FixedPointStatus::NotFound
        };
        FixedPointReport {
            status,
            x0,
            residual,
            derivative_at_x0: dp.eval(x0),
            seeds,
            seeds_converged: converged,
            seeds_agreeing,
            candidates,
            basin_diameter_sequence,
        }
    }

    fn picard(&self, start: f64, cfg: &FixedPointConfig) -> Option<f64> {
        let mut x = start;
        let mut settled_at = None;
        for step in 0..cfg.max_steps {
            let y = self.step(x);
            let delta = (y - x).abs();
            x = y;
            if delta == 0.0 {
                return Some(x);
            }
            if delta <= cfg.tol {
                let s = *settled_at.get_or_insert(step);
                // a few extra steps settle the last bits
                if step - s >= cfg.polish_steps {
                    return Some(x);
                }
            } else {
                settled_at = None;
            }
        }
        settled_at.map(|_| x)
    }
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < MIN_ORBIT_GRID {
        return Err(Error::Precondition(format!(
            "grid size {grid_size} is below the minimum {MIN_ORBIT_GRID}"
        )));
    }
    Ok(())
}

fn diameter(xs: &[f64]) -> f64 {
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    (hi - lo).max(0.0)
}

/// Degree of `φₙ` when `deg φ = d`, saturating.
pub fn iterate_degree(d: usize, n: usize) -> u128 {
    match d {
        0 if n == 0 => 1,
        0 => 0,
        _ => (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX),
    }
}

/// Root of `p` in `[a, b]` by bisection on the sign.
fn bisect_root(p: &Poly, mut a: f64, mut b: f64) -> f64 {
    let mut fa = p.eval(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Below this modulus an orbit point next to the fixed point 0 is carried
/// as a logarithm, where `φ(x) = c_m x^m (1 + O(x))` is exact to rounding.
const TINY: f64 = 1e-150;

#[derive(Clone, Copy, Debug)]
enum OrbitPoint {
    Plain(f64),
    Tiny { negative: bool, ln_abs: f64 },
}

impl OrbitPoint {
    fn value(self) -> f64 {
        match self {
            OrbitPoint::Plain(v) => v,
            OrbitPoint::Tiny { negative, ln_abs } => {
                let v = ln_abs.exp();
                if negative {
                    -v
                } else {
                    v
                }
            }
        }
    }

    fn log_distance(self, center: f64) -> f64 {
        match self {
            OrbitPoint::Tiny { ln_abs, .. } if center == 0.0 => ln_abs,
            p => (p.value() - center).abs().ln(),
        }
    }
}

/// Leading behaviour of `φ` at an exact fixed point 0.
struct TinyTracker {
    order: usize,
    ln_lead: f64,
    lead_negative: bool,
}

impl TinyTracker {
    fn new(p: &Poly) -> Option<Self> {
        if p.coeff(0) != 0.0 || p.is_zero() {
            return None;
        }
        let order = (1..=p.degree()).find(|&k| p.coeff(k) != 0.0)?;
        let lead = p.coeff(order);
        Some(TinyTracker {
            order,
            ln_lead: lead.abs().ln(),
            lead_negative: lead < 0.0,
        })
    }

    fn step_plain(&self, x: f64, map: &PolyMap) -> OrbitPoint {
        if x != 0.0 && x.abs() < TINY {
            self.step_tiny(OrbitPoint::Tiny {
                negative: x < 0.0,
                ln_abs: x.abs().ln(),
            })
            .0
        } else {
            OrbitPoint::Plain(map.step(x))
        }
    }

    /// Image of a tiny point and `ln|φ'|` there.
    fn step_tiny(&self, x: OrbitPoint) -> (OrbitPoint, f64) {
        let OrbitPoint::Tiny { negative, ln_abs } = x else {
            unreachable!("only tiny points are stepped in log form")
        };
        let m = self.order as f64;
        let ln_slope = self.ln_lead + m.ln() + (m - 1.0) * ln_abs;
        let ln_next = self.ln_lead + m * ln_abs;
        let negative = self.lead_negative ^ (negative && self.order % 2 == 1);
        let next = if ln_next < TINY.ln() {
            OrbitPoint::Tiny {
                negative,
                ln_abs: ln_next,
            }
        } else {
            let v = ln_next.exp();
            OrbitPoint::Plain(if negative { -v } else { v })
        };
        (next, ln_slope)
    }
}

struct CellOrbit {
    mid: f64,
    radius: f64,
    log_deriv: f64,
}

/// Natural-log bracket; `-∞` encodes an exact zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogBracket {
    #[serde(with = "logf64")]
    pub lower: f64,
    #[serde(with = "logf64")]
    pub upper: f64,
}

impl LogBracket {
    pub fn exp(&self) -> (f64, f64) {
        (self.lower.exp(), self.upper.exp())
    }
}

/// Estimates for a single iterate `φₙ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterateBounds {
    pub n: usize,
    /// `log sup |φₙ'|`.
    pub log_deriv: LogBracket,
    /// `log sup |φₙ(x) - center|`.
    pub log_deviation: LogBracket,
    /// Diameter of the image of the grid.
    pub diameter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointConfig {
    pub max_steps: usize,
    pub tol: f64,
    pub polish_steps: usize,
    pub agree_tol: f64,
    pub residual_tol: f64,
    pub diameter_steps: usize,
    pub diameter_grid: usize,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            max_steps: 10_000,
            tol: 1e-12,
            polish_steps: 64,
            agree_tol: 1e-8,
            residual_tol: 1e-10,
            diameter_steps: 64,
            diameter_grid: 1024,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointStatus {
    Found,
    NotFound,
}

/// One cluster of seed limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointCandidate {
    pub x: f64,
    pub residual: f64,
    pub derivative: f64,
    pub seeds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub status: FixedPointStatus,
    /// Common limit when found, otherwise the best candidate.
    pub x0: f64,
    pub residual: f64,
    pub derivative_at_x0: f64,
    pub seeds: usize,
    pub seeds_converged: usize,
    pub seeds_agreeing: usize,
    /// Distinct limits reached by converging seeds, most popular first.
    pub candidates: Vec<FixedPointCandidate>,
    pub basin_diameter_sequence: Vec<f64>,
}

impl FixedPointReport {
    pub fn found(&self) -> bool {
        self.status == FixedPointStatus::Found
    }

    /// Converged limits that are genuine fixed points.
    pub fn fixed_points(&self, residual_tol: f64) -> impl Iterator<Item = &FixedPointCandidate> {
        self.candidates
            .iter()
            .filter(move |c| c.residual <= residual_tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_square() -> PolyMap {
        PolyMap::on_unit(vec![0.0, 0.0, 0.5]).unwrap()
    }

    fn half() -> PolyMap {
        PolyMap::on_unit(vec![0.0, 0.5]).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(half_square().eval(1.0).unwrap(), 0.5);
        assert_eq!(PolyMap::identity(Interval::UNIT).eval(0.3).unwrap(), 0.3);
        assert_eq!(half().eval(0.8).unwrap(), 0.4);
    }

    #[test]
    fn eval_outside_domain_is_an_error() {
        assert!(matches!(half().eval(1.5), Err(Error::Domain(_))));
        assert!(half().eval(1.0 + 1e-13).is_ok());
    }

    #[test]
    fn rejects_maps_leaving_the_domain() {
        assert!(PolyMap::on_unit(vec![0.0, 2.0]).is_err());
        assert!(PolyMap::on_unit(vec![-0.1, 1.0]).is_err());
        // bump 4x(1-x) peaks at exactly 1, fine; 4.01 x(1-x) pokes out between nodes
        assert!(PolyMap::on_unit(vec![0.0, 4.0, -4.0]).is_ok());
        assert!(PolyMap::on_unit(vec![0.0, 4.0001, -4.0001]).is_err());
        assert!(PolyMap::on_unit(vec![f64::NAN]).is_err());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(half_square().derivative().coeffs(), &[0.0, 1.0]);
        assert!(PolyMap::constant(0.3, Interval::UNIT)
            .unwrap()
            .derivative()
            .is_zero());
        assert_eq!(half().derivative().coeffs(), &[0.5]);
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(
            half_square().iterate(2).unwrap().poly().coeffs(),
            &[0.0, 0.0, 0.0, 0.0, 0.125]
        );
        assert_eq!(half_square().iterate(0).unwrap().poly(), &Poly::identity());
        assert_eq!(half().iterate(3).unwrap().poly().coeffs(), &[0.0, 0.125]);
    }

    #[test]
    fn iterate_degree_overflow() {
        let err = half_square().iterate(13).unwrap_err();
        assert!(matches!(err, Error::DegreeOverflow { degree: 8192, .. }));
        assert!(half_square().iterate(12).is_ok());
        assert!(half().iterate(10_000).is_ok());
    }

    #[test]
    fn log_sup_examples() {
        let v = half().iterate_deriv_log_sup(5, 64).unwrap();
        assert!((v - (1.0f64 / 32.0).ln()).abs() < 1e-14);
        assert_eq!(half_square().iterate_deriv_log_sup(1, 64).unwrap(), 0.0);
        // oracle: φ₃ = x⁸/128, φ₃' = x⁷/16, maximised on a 10⁵-point grid
        let exact = Poly::monomial(8, 1.0 / 128.0).derivative();
        let oracle = Interval::UNIT
            .uniform_grid(100_000)
            .into_iter()
            .map(|x| exact.eval(x).abs())
            .fold(0.0, f64::max)
            .ln();
        let v = half_square().iterate_deriv_log_sup(3, 4096).unwrap();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - (1.0f64 / 16.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn log_sup_handles_vanishing_derivative() {
        let c = PolyMap::constant(0.25, Interval::UNIT).unwrap();
        assert_eq!(c.iterate_deriv_log_sup(3, 64).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn log_sup_survives_underflow() {
        // |φ₂₀'| is about 2^(-2^20); the plain product is zero in f64
        let v = half_square().iterate_deriv_log_sup(20, 1024).unwrap();
        let expected = (20.0 - ((1u64 << 20) - 1) as f64) * 2f64.ln();
        assert!(v.is_finite());
        assert!((v - expected).abs() < 1e-6 * expected.abs());
    }

    #[test]
    fn small_grids_are_rejected() {
        assert!(half().iterate_deriv_log_sup(2, 63).is_err());
        assert!(half().iterate_range_diameter(2, 10).is_err());
    }

    #[test]
    fn orbit_brackets_are_ordered() {
        for map in [
            half(),
            half_square(),
            PolyMap::on_unit(vec![0.1, 0.3, 0.4]).unwrap(),
        ] {
            let fp = map.find_fixed_point(16);
            for b in map.orbit_bounds(fp.x0, 12, 256).unwrap() {
                assert!(b.log_deriv.lower <= b.log_deriv.upper);
                assert!(b.log_deviation.lower <= b.log_deviation.upper);
            }
        }
    }

    #[test]
    fn fixed_point_examples() {
        let r = half_square().find_fixed_point(10);
        assert!(r.found());
        assert_eq!(r.x0, 0.0);
        assert_eq!(r.derivative_at_x0, 0.0);
        assert_eq!(r.seeds_agreeing, 10);

        let r = PolyMap::identity(Interval::UNIT).find_fixed_point(10);
        assert!(!r.found());
        assert_eq!(r.candidates.len(), 10);

        let r = PolyMap::on_unit(vec![0.25, 0.5])
            .unwrap()
            .find_fixed_point(10);
        assert!(r.found());
        assert!((r.x0 - 0.5).abs() < 1e-12);
        assert!((r.derivative_at_x0 - 0.5).abs() < 1e-15);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn oscillating_map_is_not_found() {
        // 1 - x swaps the endpoints; only the midpoint is fixed
        let r = PolyMap::on_unit(vec![1.0, -1.0])
            .unwrap()
            .find_fixed_point(5);
        assert!(!r.found());
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(half().iterate_range_diameter(4, 64).unwrap(), 1.0 / 16.0);
        let id = PolyMap::identity(Interval::UNIT);
        assert_eq!(id.iterate_range_diameter(7, 64).unwrap(), 1.0);
        // oracle: direct iteration of the right endpoint
        let phi3_at_1 = (0..3).fold(1.0, |x: f64, _| x * x / 2.0);
        assert_eq!(phi3_at_1, 1.0 / 128.0);
        assert_eq!(
            half_square().iterate_range_diameter(3, 64).unwrap(),
            phi3_at_1
        );
    }

    #[test]
    fn json_round_trip_with_default_domain() {
        let m: PolyMap = serde_json::from_str(r#"{"coeffs":[0,0,0.5]}"#).unwrap();
        assert_eq!(m, half_square());
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"coeffs":[0.0,0.0,0.5],"domain":[0.0,1.0]}"#);
        assert!(serde_json::from_str::<PolyMap>(r#"{"coeffs":[0,2]}"#).is_err());
        assert!(serde_json::from_str::<PolyMap>(r#"{"coeffs":[0],"extra":1}"#).is_err());
    }
}
