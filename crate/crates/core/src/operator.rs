//! The composition operator `T f = f ∘ φ` on polynomials of degree `≤ d`,
//! written in the monomial basis `(x - x₀)ᵏ` centred at a fixed point, and
//! two-sided estimates of `‖Tⁿ - L‖` where `L f = f(x₀) 1`.
//!
//! `L` is the only compact operator ever used as a witness, so upper bounds
//! on the distance from `Tⁿ` to the compacts are "upper bounds via the
//! rank-one witness". The C¹ lower bound `|φ'(x₀)|ⁿ / 2` holds against every
//! compact operator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::poly::{Interval, Poly};
use crate::report::{format_f64, logf64, Csv};
use crate::selfmap::{IterateBounds, LogBracket, PolyMap};

/// Largest `|φ(x₀) - x₀|` accepted when centring at `x₀`.
pub const FIXED_POINT_TOL: f64 = 1e-10;
pub const DEFAULT_DISTANCE_GRID: usize = 2048;
pub const RANK_ONE_WITNESS: &str = "upper bound via rank-one witness L f = f(x0) 1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// Operator norm from the C¹ unit ball into `(C(X), ‖·‖_∞)`.
    Sup,
    /// `‖f‖ = ‖f‖_∞ + ‖f'‖_∞`.
    C1,
    /// Dales–Davie norm `Σ ‖f⁽ⁿ⁾‖_∞ / Mₙ`.
    Ddm,
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sup" => Ok(NormKind::Sup),
            "c1" => Ok(NormKind::C1),
            "ddm" => Ok(NormKind::Ddm),
            other => Err(Error::Config(format!("unknown norm kind {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub norm_kind: NormKind,
}

impl NormBracket {
    pub fn new(lower: f64, upper: f64, norm_kind: NormKind) -> Self {
        debug_assert!(
            0.0 <= lower && lower <= upper,
            "bad bracket [{lower}, {upper}]"
        );
        NormBracket {
            lower,
            upper,
            norm_kind,
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Matrix of `T` on `span{(x - x₀)ᵏ : k ≤ d}`. Column `k` holds the
/// coefficients of `(φ(x) - x₀)ᵏ` truncated at degree `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    pub entries: CMatrix,
    pub x0: f64,
    pub degree: usize,
    pub map: PolyMap,
    /// `φ(x₀) - x₀`, dropped when centring.
    pub centering_residual: f64,
    /// Columns that lost nonzero coefficients above degree `d`.
    pub truncated_columns: Vec<usize>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn is_truncated(&self) -> bool {
        !self.truncated_columns.is_empty()
    }

    /// Applies the matrix to centred coefficients of a polynomial.
    pub fn apply(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        self.entries.mul_vec(coeffs)
    }

    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(["row", "col", "re", "im"]);
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let z = self.entries[(i, j)];
                csv.push([
                    i.to_string(),
                    j.to_string(),
                    format_f64(z.re),
                    format_f64(z.im),
                ]);
            }
        }
        csv
    }
}

/// Centred coefficients of a polynomial: `f(x) = Σ cₖ (x - x₀)ᵏ`.
pub fn centered_coefficients(f: &Poly, x0: f64, d: usize) -> Vec<Complex64> {
    let shifted = f.taylor_shift(x0);
    (0..=d)
        .map(|k| Complex64::new(shifted.coeff(k), 0.0))
        .collect()
}

pub fn build_matrix(map: &PolyMap, x0: f64, d: usize) -> Result<OperatorMatrix> {
    if d < 1 {
        return Err(Error::Precondition(
            "truncation degree must be at least 1".into(),
        ));
    }
    let residual = map.poly().eval(x0) - x0;
    if residual.is_nan() || residual.abs() > FIXED_POINT_TOL {
        return Err(Error::NotFixedPoint {
            x0,
            residual: residual.abs(),
        });
    }
    // ψ(u) = φ(x₀ + u) - x₀, with ψ(0) = 0 imposed
    let mut psi = map.poly().taylor_shift(x0).coeffs().to_vec();
    if psi.is_empty() {
        psi.push(0.0);
    }
    psi[0] = 0.0;
    let psi = Poly::new(psi);

    let n = d + 1;
    let mut entries = CMatrix::zeros(n);
    let mut truncated_columns = Vec::new();
    let mut column = Poly::constant(1.0);
    let mut flagged = false;
    for k in 0..n {
        if k > 0 {
            let (next, lost) = column.mul_truncated(&psi, d);
            column = next;
            flagged |= lost;
        }
        if flagged {
            truncated_columns.push(k);
        }
        for (j, c) in column.coeffs().iter().enumerate() {
            entries[(j, k)] = Complex64::new(*c, 0.0);
        }
    }
    Ok(OperatorMatrix {
        entries,
        x0,
        degree: d,
        map: map.clone(),
        centering_residual: residual,
        truncated_columns,
    })
}

/// Matrix of `L f = f(x₀) 1`: the single entry `(0, 0) = 1`. `L` is the
/// operator induced by the constant map `x₀`.
pub fn rank_one_l(x0: f64, d: usize) -> Result<OperatorMatrix> {
    let domain = Interval::new(x0.min(0.0), x0.max(1.0))?;
    build_matrix(&PolyMap::constant(x0, domain)?, x0, d)
}

/// `ln(eᵃ + eᵇ)` without overflow; `-∞` is the identity.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Log-space bracket of `‖Tⁿ - L‖` for one iterate.
fn distance_from_bounds(
    map: &PolyMap,
    x0: f64,
    b: &IterateBounds,
    log_deriv_at_x0: f64,
    kind: NormKind,
) -> Result<LogBracket> {
    let reach = map.domain().max_distance_from(x0);
    // sup |φₙ - x₀| directly, or through the mean value theorem
    let log_dev_upper = b.log_deviation.upper.min(b.log_deriv.upper + reach.ln());
    match kind {
        NormKind::C1 => Ok(LogBracket {
            lower: log_deriv_at_x0 - std::f64::consts::LN_2,
            upper: log_add_exp(log_dev_upper, b.log_deriv.upper),
        }),
        NormKind::Sup => Ok(LogBracket {
            // test function (x - x₀) / (reach + 1), of unit C¹ norm
            lower: b.log_deviation.lower - (reach + 1.0).ln(),
            upper: log_dev_upper,
        }),
        NormKind::Ddm => Err(Error::Precondition(
            "distance estimates are available for sup and C1 norms only".into(),
        )),
    }
}

/// `ln |φₙ'(x₀)|` for `n = 1..=n_max` by the chain rule along the orbit of `x₀`.
fn log_chain_at(map: &PolyMap, x0: f64, n_max: usize) -> Vec<f64> {
    let dp = map.derivative();
    let mut x = x0;
    let mut acc = 0.0;
    (0..n_max)
        .map(|_| {
            acc += dp.eval(x).abs().ln();
            x = map.domain().clamp(map.poly().eval(x));
            acc
        })
        .collect()
}

fn distance_log_brackets(
    map: &PolyMap,
    x0: f64,
    n_max: usize,
    kind: NormKind,
    grid_size: usize,
) -> Result<Vec<LogBracket>> {
    let bounds = map.orbit_bounds(x0, n_max, grid_size)?;
    let chain = log_chain_at(map, x0, n_max);
    bounds
        .iter()
        .zip(chain)
        .map(|(b, c)| distance_from_bounds(map, x0, b, c, kind))
        .collect()
}

/// Bracket of `‖Tⁿ - L‖` in the chosen norm; `x₀` must be the fixed point.
pub fn distance_tn_to_l(
    map: &PolyMap,
    x0: f64,
    n: usize,
    kind: NormKind,
    grid_size: usize,
) -> Result<NormBracket> {
    if n == 0 {
        return Err(Error::Precondition("power must be positive".into()));
    }
    let b = distance_log_brackets(map, x0, n, kind, grid_size)?[n - 1];
    let (lower, upper) = b.exp();
    Ok(NormBracket::new(lower, upper, kind))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEntry {
    pub n: usize,
    /// `ln rₙ` lower, `rₙ = ‖Tⁿ - K‖^{1/n}` minimised over all compact `K`.
    #[serde(with = "logf64")]
    pub log_lower: f64,
    /// `ln ‖Tⁿ - L‖^{1/n}`.
    #[serde(with = "logf64")]
    pub log_upper: f64,
    /// `ln |φₙ'(x₀)|^{1/n}`; in C¹ this bounds the essential spectral radius
    /// from below, by applying the per-power bound to `Tⁿᵏ` for all `k`.
    #[serde(with = "logf64")]
    pub log_ess_lower: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EssentialRadiusSequence {
    pub x0: f64,
    pub norm_kind: NormKind,
    pub grid_size: usize,
    pub witness: String,
    pub entries: Vec<RadiusEntry>,
}

impl EssentialRadiusSequence {
    pub fn last(&self) -> &RadiusEntry {
        self.entries.last().expect("n_max ≥ 2")
    }

    pub fn upper(&self, n: usize) -> f64 {
        self.entries[n - 1].log_upper.exp()
    }

    pub fn lower(&self, n: usize) -> f64 {
        self.entries[n - 1].log_lower.exp()
    }

    /// True when the upper brackets strictly decrease from `from` on.
    pub fn upper_decreasing_from(&self, from: usize) -> bool {
        self.entries
            .iter()
            .skip(from.saturating_sub(1))
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[1].log_upper < w[0].log_upper || w[1].log_upper == f64::NEG_INFINITY)
    }

    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(["n", "log_lower", "log_upper"]);
        for e in &self.entries {
            csv.push([
                e.n.to_string(),
                format_f64(e.log_lower),
                format_f64(e.log_upper),
            ]);
        }
        csv
    }
}

pub fn essential_radius_sequence(
    map: &PolyMap,
    x0: f64,
    kind: NormKind,
    n_max: usize,
) -> Result<EssentialRadiusSequence> {
    essential_radius_sequence_with_grid(map, x0, kind, n_max, DEFAULT_DISTANCE_GRID)
}

pub fn essential_radius_sequence_with_grid(
    map: &PolyMap,
    x0: f64,
    kind: NormKind,
    n_max: usize,
    grid_size: usize,
) -> Result<EssentialRadiusSequence> {
    if n_max < 2 {
        return Err(Error::Precondition(format!(
            "n_max must be at least 2, got {n_max}"
        )));
    }
    let brackets = distance_log_brackets(map, x0, n_max, kind, grid_size)?;
    let chain = log_chain_at(map, x0, n_max);
    let entries = brackets
        .iter()
        .zip(chain)
        .enumerate()
        .map(|(i, (b, c))| {
            let n = (i + 1) as f64;
            RadiusEntry {
                n: i + 1,
                log_lower: b.lower / n,
                log_upper: b.upper / n,
                log_ess_lower: c / n,
            }
        })
        .collect();
    Ok(EssentialRadiusSequence {
        x0,
        norm_kind: kind,
        grid_size,
        witness: RANK_ONE_WITNESS.into(),
        entries,
    })
}
