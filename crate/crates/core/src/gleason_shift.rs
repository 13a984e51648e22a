//! The weighted shift `(φ(x))_{j,k} = x_{j,k+1} / (k+1)` on the closed unit
//! ball of `ℓ∞(ℕ²)`, truncated to `J × K` coordinates, together with
//! polynomial test functions in the coordinate projections `p_{j,k}`.
//!
//! Truncation zeroes column `K` of every shifted point. That can only shrink
//! distances, so no computed quantity here can overshoot the closed-form
//! upper bounds it is checked against.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dales_davie::ln_factorial;
use crate::error::{Error, Result};
use crate::report::{format_f64, Csv};

pub const DEFAULT_TRUNCATION: (usize, usize) = (64, 64);
/// Relative slack on the two-point Schwarz bound.
pub const SCHWARZ_SLACK: f64 = 1e-9;
const BALL_TOL: f64 = 1e-12;

/// `n!` as a float; exact while it fits in 53 bits.
fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// A point of the truncated ball, `1 ≤ j ≤ J`, `1 ≤ k ≤ K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShiftPointWire", into = "ShiftPointWire")]
pub struct ShiftPoint {
    rows: usize,
    cols: usize,
    values: Vec<Complex64>,
    /// Set when column `K` was zeroed by the truncated shift.
    boundary_zeroed: bool,
}

/// Wire form: truncation header plus the dense array `values[j-1][k-1]`,
/// each entry `[re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftPointWire {
    #[serde(rename = "J")]
    pub rows: usize,
    #[serde(rename = "K")]
    pub cols: usize,
    #[serde(default)]
    pub boundary_zeroed: bool,
    pub values: Vec<Vec<Complex64>>,
}

impl TryFrom<ShiftPointWire> for ShiftPoint {
    type Error = Error;

    fn try_from(w: ShiftPointWire) -> Result<Self> {
        if w.values.len() != w.rows || w.values.iter().any(|r| r.len() != w.cols) {
            return Err(Error::Config(format!(
                "shift point values do not match the {}×{} header",
                w.rows, w.cols
            )));
        }
        let mut p = ShiftPoint::new(w.rows, w.cols, w.values.concat())?;
        p.boundary_zeroed = w.boundary_zeroed;
        Ok(p)
    }
}

impl From<ShiftPoint> for ShiftPointWire {
    fn from(p: ShiftPoint) -> Self {
        ShiftPointWire {
            rows: p.rows,
            cols: p.cols,
            boundary_zeroed: p.boundary_zeroed,
            values: p.values.chunks(p.cols).map(<[Complex64]>::to_vec).collect(),
        }
    }
}

impl ShiftPoint {
    pub fn new(rows: usize, cols: usize, values: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::Config(format!(
                "need {rows}×{cols} = {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(z) = values
            .iter()
            .find(|z| z.is_nan() || z.norm() > 1.0 + BALL_TOL)
        {
            return Err(Error::Domain(format!(
                "entry {z} lies outside the unit ball"
            )));
        }
        Ok(ShiftPoint {
            rows,
            cols,
            values,
            boundary_zeroed: false,
        })
    }

    /// The origin `x⁰`.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ShiftPoint {
            rows,
            cols,
            values: vec![Complex64::new(0.0, 0.0); rows * cols],
            boundary_zeroed: false,
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        ShiftPoint {
            values: vec![Complex64::new(1.0, 0.0); rows * cols],
            ..ShiftPoint::zeros(rows, cols)
        }
    }

    /// The point with a single nonzero entry.
    pub fn single(rows: usize, cols: usize, j: usize, k: usize, value: Complex64) -> Result<Self> {
        let mut p = ShiftPoint::zeros(rows, cols);
        *p.entry_mut(j, k)? = value;
        if value.norm() > 1.0 + BALL_TOL {
            return Err(Error::Domain(format!(
                "entry {value} lies outside the unit ball"
            )));
        }
        Ok(p)
    }

    /// Entries uniform in the unit disk, half of them pushed to the circle.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let values = (0..rows * cols)
            .map(|_| {
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                let r = if rng.gen_bool(0.5) {
                    1.0
                } else {
                    rng.gen::<f64>().sqrt()
                };
                Complex64::from_polar(r, theta)
            })
            .collect();
        ShiftPoint {
            values,
            ..ShiftPoint::zeros(rows, cols)
        }
    }

    pub fn truncation(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn boundary_zeroed(&self) -> bool {
        self.boundary_zeroed
    }

    fn index(&self, j: usize, k: usize) -> Result<usize> {
        if j == 0 || k == 0 || j > self.rows || k > self.cols {
            return Err(Error::Truncation(format!(
                "coordinate ({j}, {k}) outside the {}×{} truncation",
                self.rows, self.cols
            )));
        }
        Ok((j - 1) * self.cols + (k - 1))
    }

    /// `x_{j,k}`, 1-indexed; coordinates past the truncation read as 0.
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.index(j, k)
            .map(|i| self.values[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    fn entry_mut(&mut self, j: usize, k: usize) -> Result<&mut Complex64> {
        let i = self.index(j, k)?;
        Ok(&mut self.values[i])
    }

    /// `d_∞(x, x⁰) = sup |x_{j,k}|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Coordinate of the largest entry.
    pub fn argmax(&self) -> (usize, usize) {
        let i = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        (i / self.cols + 1, i % self.cols + 1)
    }

    /// `αx`, which stays in the ball for `|α| ≤ 1`.
    pub fn scale(&self, alpha: Complex64) -> Result<Self> {
        if alpha.norm() > 1.0 + BALL_TOL {
            return Err(Error::Domain(format!("|α| = {} exceeds 1", alpha.norm())));
        }
        Ok(ShiftPoint {
            values: self.values.iter().map(|z| z * alpha).collect(),
            ..self.clone()
        })
    }
}

/// One application of the weighted shift.
pub fn shift_apply(x: &ShiftPoint) -> ShiftPoint {
    let (rows, cols) = x.truncation();
    let mut out = ShiftPoint::zeros(rows, cols);
    for j in 1..=rows {
        for k in 1..cols {
            out.values[(j - 1) * cols + (k - 1)] = x.get(j, k + 1) / (k + 1) as f64;
        }
    }
    out.boundary_zeroed = true;
    out
}

pub fn shift_iterate(x: &ShiftPoint, n: usize) -> ShiftPoint {
    (0..n).fold(x.clone(), |p, _| shift_apply(&p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterateSup {
    pub n: usize,
    /// `1 / (n+1)!`.
    pub closed_form: f64,
    /// `max_{k ≤ K-n} k! / (k+n)!`, the exact value under truncation.
    pub truncated_exact: f64,
    /// Largest `d_∞(φₙ(x), x⁰)` over the sampled points.
    pub empirical: f64,
    pub samples: usize,
}

/// `sup_x d_∞(φₙ(x), x⁰)` over the truncated ball.
pub fn shift_iterate_sup<R: Rng + ?Sized>(
    n: usize,
    truncation: (usize, usize),
    samples: usize,
    rng: &mut R,
) -> Result<IterateSup> {
    let (rows, cols) = truncation;
    if n + 1 > cols {
        return Err(Error::Truncation(format!(
            "iterate {n} needs K ≥ {}, have K = {cols}",
            n + 1
        )));
    }
    let closed_form = 1.0 / factorial(n + 1);
    // k!/(k+n)! = 1 / ((k+1)⋯(k+n)), largest at k = 1
    let truncated_exact = (1..=cols - n)
        .map(|k| 1.0 / (k + 1..=k + n).fold(1.0, |acc, m| acc * m as f64))
        .fold(0.0, f64::max);
    let empirical = (0..samples)
        .map(|_| shift_iterate(&ShiftPoint::random(rows, cols, rng), n).sup_norm())
        .fold(0.0, f64::max);
    Ok(IterateSup {
        n,
        closed_form,
        truncated_exact,
        empirical,
        samples,
    })
}

/// A monomial `Π p_{j,k}^e`, factors sorted by coordinate.
pub type Monomial = Vec<((usize, usize), u32)>;

/// Polynomial in finitely many coordinate projections.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub terms: Vec<(Monomial, Complex64)>,
}

impl TestFunction {
    pub fn constant(c: Complex64) -> Self {
        TestFunction {
            terms: vec![(Vec::new(), c)],
        }
    }

    /// The coordinate projection `p_{j,k}`.
    pub fn projection(j: usize, k: usize) -> Self {
        TestFunction {
            terms: vec![(vec![((j, k), 1)], Complex64::new(1.0, 0.0))],
        }
    }

    pub fn eval(&self, x: &ShiftPoint) -> Complex64 {
        self.terms
            .iter()
            .map(|(mono, c)| {
                mono.iter()
                    .fold(*c, |acc, &((j, k), e)| acc * x.get(j, k).powu(e))
            })
            .sum()
    }

    /// `Σ |coefficient|`, an upper bound for the sup-norm over the ball.
    pub fn coefficient_l1(&self) -> f64 {
        self.normalized().terms.iter().map(|(_, c)| c.norm()).sum()
    }

    /// Certified to lie in the unit ball of the algebra.
    pub fn in_unit_ball(&self) -> bool {
        self.coefficient_l1() <= 1.0 + SCHWARZ_SLACK
    }

    /// Merges equal monomials and drops zero coefficients.
    pub fn normalized(&self) -> TestFunction {
        let mut terms: Vec<(Monomial, Complex64)> = Vec::new();
        for (mono, c) in &self.terms {
            let mut m: Monomial = Vec::new();
            let mut sorted = mono.clone();
            sorted.sort();
            for (coord, e) in sorted {
                match m.last_mut() {
                    Some((last, le)) if *last == coord => *le += e,
                    _ if e > 0 => m.push((coord, e)),
                    _ => {}
                }
            }
            match terms.iter_mut().find(|(tm, _)| *tm == m) {
                Some((_, tc)) => *tc += c,
                None => terms.push((m, *c)),
            }
        }
        terms.retain(|(_, c)| c.norm() != 0.0);
        TestFunction { terms }
    }

    pub fn sub(&self, other: &TestFunction) -> TestFunction {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(m, c)| (m.clone(), -c)));
        TestFunction { terms }.normalized()
    }

    /// `f ∘ φ`, using `p_{j,k} ∘ φ = p_{j,k+1} / (k+1)`.
    pub fn compose_shift(&self) -> TestFunction {
        let terms = self
            .terms
            .iter()
            .map(|(mono, c)| {
                let mut coeff = *c;
                let shifted = mono
                    .iter()
                    .map(|&((j, k), e)| {
                        coeff /= ((k + 1) as f64).powi(e as i32);
                        ((j, k + 1), e)
                    })
                    .collect();
                (shifted, coeff)
            })
            .collect();
        TestFunction { terms }
    }

    /// Exact sup-norm over the ball for a linear function `Σ aₖ p_k`
    /// (distinct coordinates): `Σ |aₖ|`, attained by aligning phases.
    pub fn linear_sup_norm(&self) -> Option<f64> {
        let f = self.normalized();
        f.terms
            .iter()
            .all(|(m, _)| m.len() == 1 && m[0].1 == 1)
            .then(|| f.terms.iter().map(|(_, c)| c.norm()).sum())
    }

    /// Random polynomial with `Σ |coefficient| ≤ 1`, over coordinates of the
    /// given truncation.
    pub fn random_unit_ball<R: Rng + ?Sized>(
        truncation: (usize, usize),
        max_terms: usize,
        max_degree: u32,
        rng: &mut R,
    ) -> TestFunction {
        let (rows, cols) = truncation;
        let n_terms = rng.gen_range(1..=max_terms.max(1));
        let mut terms: Vec<(Monomial, Complex64)> = (0..n_terms)
            .map(|_| {
                let degree = rng.gen_range(0..=max_degree);
                let mono = (0..degree)
                    .map(|_| ((rng.gen_range(1..=rows), rng.gen_range(1..=cols)), 1))
                    .collect();
                let c = Complex64::from_polar(
                    rng.gen::<f64>(),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
                (mono, c)
            })
            .collect();
        let l1: f64 = terms.iter().map(|(_, c)| c.norm()).sum();
        if l1 > 0.0 {
            let target = rng.gen_range(0.5..=1.0);
            for (_, c) in terms.iter_mut() {
                *c *= target / l1;
            }
        }
        TestFunction { terms }.normalized()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GleasonBound {
    /// `2 d_∞(x, x⁰)`.
    pub upper: f64,
    /// `max |f(x) - f(x⁰)|` over the tried unit-ball test functions.
    pub empirical_lower: f64,
    pub samples: usize,
}

/// Bracket on the Gleason distance from `x` to the origin.
pub fn gleason_distance_bound<R: Rng + ?Sized>(
    x: &ShiftPoint,
    samples: usize,
    rng: &mut R,
) -> Result<GleasonBound> {
    if samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let origin = ShiftPoint::zeros(x.rows, x.cols);
    let (j, k) = x.argmax();
    let mut best = (x.get(j, k)).norm();
    for _ in 0..samples {
        let f = TestFunction::random_unit_ball(x.truncation(), 4, 3, rng);
        best = best.max((f.eval(x) - f.eval(&origin)).norm());
    }
    Ok(GleasonBound {
        upper: 2.0 * x.sup_norm(),
        empirical_lower: best,
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchwarzSummary {
    pub pairs: usize,
    pub violations: usize,
    /// Largest `|f(x) - f(x⁰)| / (2 d_∞(x, x⁰))`.
    pub max_ratio: f64,
}

/// Checks `|f(x) - f(x⁰)| ≤ 2 d_∞(x, x⁰)` over random points and certified
/// unit-ball test functions.
pub fn schwarz_check<R: Rng + ?Sized>(
    pairs: usize,
    truncation: (usize, usize),
    rng: &mut R,
) -> SchwarzSummary {
    let (rows, cols) = truncation;
    let origin = ShiftPoint::zeros(rows, cols);
    let mut violations = 0;
    let mut max_ratio = 0.0f64;
    for _ in 0..pairs {
        let radius: f64 = rng.gen_range(1e-3..=1.0);
        let x = ShiftPoint::random(rows, cols, rng)
            .scale(Complex64::new(radius, 0.0))
            .expect("radius ≤ 1");
        let f = TestFunction::random_unit_ball(truncation, 6, 4, rng);
        debug_assert!(f.in_unit_ball());
        let lhs = (f.eval(&x) - f.eval(&origin)).norm();
        let bound = 2.0 * x.sup_norm();
        if lhs > bound * (1.0 + SCHWARZ_SLACK) {
            violations += 1;
        }
        if bound > 0.0 {
            max_ratio = max_ratio.max(lhs / bound);
        }
    }
    SchwarzSummary {
        pairs,
        violations,
        max_ratio,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub n: usize,
    /// `2 / (n+1)!`.
    pub c_upper: f64,
    pub log_c_upper: f64,
    /// `c_upper^{1/n}`.
    pub root: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszCertificate {
    pub entries: Vec<CertificateEntry>,
    pub decreasing: bool,
}

impl RieszCertificate {
    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(["n", "c_upper", "root"]);
        for e in &self.entries {
            csv.push([e.n.to_string(), format_f64(e.c_upper), format_f64(e.root)]);
        }
        csv
    }
}

/// Upper bounds `Cₙ ≤ 2 · sup d_∞(φₙ(x), x⁰) = 2/(n+1)!` on the Gleason
/// radius of `φₙ(X)` about `x⁰`, and their `n`-th roots.
pub fn riesz_certificate(n_max: usize, truncation: (usize, usize)) -> Result<RieszCertificate> {
    if n_max + 1 > truncation.1 {
        return Err(Error::Truncation(format!(
            "n_max = {n_max} needs K ≥ {}, have K = {}",
            n_max + 1,
            truncation.1
        )));
    }
    let entries: Vec<CertificateEntry> = (1..=n_max)
        .map(|n| {
            let log_c = std::f64::consts::LN_2 - ln_factorial(n + 1);
            CertificateEntry {
                n,
                c_upper: 2.0 / factorial(n + 1),
                log_c_upper: log_c,
                root: (log_c / n as f64).exp(),
            }
        })
        .collect();
    let decreasing = entries.windows(2).all(|w| w[1].root < w[0].root);
    Ok(RieszCertificate {
        entries,
        decreasing,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub j: usize,
    pub j2: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub n: usize,
    pub j_test: usize,
    /// `2 / (n+1)!`.
    pub expected: f64,
    pub pairs: Vec<WitnessPair>,
    pub min_distance: Option<f64>,
    pub max_distance: Option<f64>,
}

impl WitnessSummary {
    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(["j", "j'", "distance"]);
        for p in &self.pairs {
            csv.push([p.j.to_string(), p.j2.to_string(), format_f64(p.distance)]);
        }
        csv
    }
}

/// Pairwise sup-distances between `Tⁿ p_{j,1}`, `1 ≤ j ≤ J_test`. A bounded
/// sequence with all pairwise distances equal and positive has no convergent
/// subsequence, so `Tⁿ` is not compact.
pub fn noncompact_witness(
    n: usize,
    j_test: usize,
    truncation: (usize, usize),
) -> Result<WitnessSummary> {
    let (rows, cols) = truncation;
    if n == 0 || n + 1 > cols {
        return Err(Error::Truncation(format!(
            "power {n} needs 1 ≤ n ≤ K - 1 with K = {cols}"
        )));
    }
    if j_test > rows {
        return Err(Error::Truncation(format!(
            "J_test = {j_test} exceeds J = {rows}"
        )));
    }
    let images: Vec<TestFunction> = (1..=j_test)
        .map(|j| (0..n).fold(TestFunction::projection(j, 1), |f, _| f.compose_shift()))
        .collect();
    let mut pairs = Vec::new();
    for a in 0..images.len() {
        for b in a + 1..images.len() {
            let distance = images[a]
                .sub(&images[b])
                .linear_sup_norm()
                .expect("images of projections are linear");
            pairs.push(WitnessPair {
                j: a + 1,
                j2: b + 1,
                distance,
            });
        }
    }
    let min_distance = pairs.iter().map(|p| p.distance).reduce(f64::min);
    let max_distance = pairs.iter().map(|p| p.distance).reduce(f64::max);
    Ok(WitnessSummary {
        n,
        j_test,
        expected: 2.0 / factorial(n + 1),
        pairs,
        min_distance,
        max_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn shift_examples() {
        let y = shift_apply(&ShiftPoint::ones(4, 8));
        for j in 1..=4 {
            assert_eq!(y.get(j, 1), c(0.5));
            assert_eq!(y.get(j, 8), c(0.0));
        }
        assert!(y.boundary_zeroed());
        let zero = ShiftPoint::zeros(3, 5);
        assert_eq!(shift_apply(&zero).sup_norm(), 0.0);
        let x = ShiftPoint::single(5, 6, 3, 4, c(1.0)).unwrap();
        let y = shift_apply(&x);
        assert_eq!(y.get(3, 3), c(0.25));
        assert_eq!(y.sup_norm(), 0.25);
    }

    #[test]
    fn iterate_sup_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = shift_iterate_sup(1, (8, 8), 20, &mut rng).unwrap();
        assert_eq!(s.closed_form, 0.5);
        let s = shift_iterate_sup(3, (8, 8), 20, &mut rng).unwrap();
        assert_eq!(s.closed_form, 1.0 / 24.0);
        assert_eq!(s.truncated_exact, s.closed_form);
        assert!(s.empirical <= s.closed_form * (1.0 + 1e-15));
        let s = shift_iterate_sup(0, (8, 8), 5, &mut rng).unwrap();
        assert_eq!(s.closed_form, 1.0);
        assert!(matches!(
            shift_iterate_sup(8, (8, 8), 1, &mut rng),
            Err(Error::Truncation(_))
        ));
    }

    #[test]
    fn gleason_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = gleason_distance_bound(&ShiftPoint::zeros(4, 4), 10, &mut rng).unwrap();
        assert_eq!((g.upper, g.empirical_lower), (0.0, 0.0));
        let x = ShiftPoint::single(4, 4, 1, 1, c(0.25)).unwrap();
        let g = gleason_distance_bound(&x, 10, &mut rng).unwrap();
        assert_eq!(g.upper, 0.5);
        assert!(g.empirical_lower >= 0.25);
        assert!(g.empirical_lower <= g.upper * (1.0 + 1e-9));
        let alpha = Complex64::from_polar(0.3, 1.1);
        let gx = gleason_distance_bound(&x.scale(alpha).unwrap(), 1, &mut rng).unwrap();
        assert!((gx.upper - 0.3 * g.upper).abs() <= 1e-15);
    }

    #[test]
    fn certificate_examples() {
        let cert = riesz_certificate(10, (64, 64)).unwrap();
        assert_eq!(cert.entries[0].c_upper, 1.0);
        assert_eq!(cert.entries[2].c_upper, 1.0 / 12.0);
        // oracle: (2/39916800)^{1/10}
        let oracle = (2.0f64 / 39_916_800.0).powf(0.1);
        assert!((cert.entries[9].root - oracle).abs() < 1e-12);
        assert!((cert.entries[9].root - 0.186).abs() < 5e-4);
        assert!(cert.decreasing);
        assert!(riesz_certificate(64, (64, 64)).is_err());
    }

    #[test]
    fn witness_examples() {
        let w = noncompact_witness(1, 3, (64, 64)).unwrap();
        assert_eq!(w.pairs.len(), 3);
        assert!(w.pairs.iter().all(|p| p.distance == 1.0));
        let w = noncompact_witness(4, 5, (64, 64)).unwrap();
        assert!(w
            .pairs
            .iter()
            .all(|p| (p.distance - 1.0 / 60.0).abs() < 1e-17));
        let w = noncompact_witness(4, 1, (64, 64)).unwrap();
        assert!(w.pairs.is_empty());
        assert_eq!(w.min_distance, None);
        assert!(noncompact_witness(64, 2, (64, 64)).is_err());
        assert!(noncompact_witness(2, 65, (64, 64)).is_err());
    }

    #[test]
    fn composition_matches_pointwise_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let f = TestFunction::random_unit_ball((6, 6), 5, 3, &mut rng);
            let x = ShiftPoint::random(6, 7, &mut rng);
            let lhs = f.eval(&shift_apply(&x));
            let rhs = f.compose_shift().eval(&x);
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn projection_composes_to_weighted_projection() {
        let f = TestFunction::projection(2, 3).compose_shift();
        assert_eq!(f.terms, vec![(vec![((2, 4), 1)], c(0.25))]);
    }

    #[test]
    fn json_round_trip() {
        let x = ShiftPoint::single(2, 3, 2, 1, Complex64::new(0.5, -0.5)).unwrap();
        let text = serde_json::to_string(&x).unwrap();
        let back: ShiftPoint = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<ShiftPoint>(
            r#"{"J":1,"K":2,"values":[[[2.0,0.0],[0.0,0.0]]]}"#
        )
        .is_err());
        assert!(
            serde_json::from_str::<ShiftPoint>(r#"{"J":2,"K":2,"values":[[[0.0,0.0]]]}"#).is_err()
        );
    }

    #[test]
    fn random_functions_are_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            assert!(TestFunction::random_unit_ball((8, 8), 6, 4, &mut rng).in_unit_ball());
        }
    }

    #[test]
    fn schwarz_small_run() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = schwarz_check(200, (8, 8), &mut rng);
        assert_eq!(s.violations, 0);
        assert!(s.max_ratio <= 1.0);
    }
}
