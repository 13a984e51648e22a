//! Weight sequences for Dales–Davie algebras `D(X, M)`, their admissibility
//! and nonanalyticity checks, the `D`-norm `Σ ‖f⁽ⁿ⁾‖_∞ / Mₙ` of polynomials,
//! and the analyticity index of a self-map.
//!
//! Weights are stored as `log Mₙ`; factorials and binomials go through
//! `ln Γ`, so `(n!)²` stays usable far past the point where it overflows.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::operator::{NormBracket, NormKind};
use crate::poly::{Interval, Poly, SupBracket, DEFAULT_SUP_GRID};
use crate::selfmap::PolyMap;

/// Slack on the log-space binomial inequality.
pub const BINOMIAL_LOG_TOL: f64 = 1e-12;
/// The last tail value must fall below this for nonanalyticity to be
/// certified.
pub const DEFAULT_TAIL_THRESHOLD: f64 = 0.5;

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// A finite prefix `(M₀, …, M_N)` of a weight sequence, `M₀ = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightSpec", into = "WeightSpec")]
pub struct WeightSequence {
    log_values: Vec<f64>,
    family: WeightSpec,
}

/// Wire form of a weight sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    /// `Mₙ = (n!)²`.
    FactorialSq {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        param: Option<f64>,
        #[serde(rename = "N")]
        n: usize,
    },
    /// `Mₙ = (n!)^p`.
    FactorialPow {
        param: f64,
        #[serde(rename = "N")]
        n: usize,
    },
    Explicit {
        values: Vec<f64>,
    },
}

impl TryFrom<WeightSpec> for WeightSequence {
    type Error = Error;

    fn try_from(spec: WeightSpec) -> Result<Self> {
        match spec {
            WeightSpec::FactorialSq { param, n } => match param {
                Some(p) if p != 2.0 => Err(Error::InvalidWeight(format!(
                    "factorial_sq has exponent 2, got param {p}"
                ))),
                _ => Ok(WeightSequence::factorial_sq(n)),
            },
            WeightSpec::FactorialPow { param, n } => WeightSequence::factorial_pow(param, n),
            WeightSpec::Explicit { values } => WeightSequence::explicit(values),
        }
    }
}

impl From<WeightSequence> for WeightSpec {
    fn from(w: WeightSequence) -> Self {
        w.family
    }
}

impl WeightSequence {
    pub fn factorial_sq(n_max: usize) -> Self {
        WeightSequence {
            log_values: (0..=n_max).map(|n| 2.0 * ln_factorial(n)).collect(),
            family: WeightSpec::FactorialSq {
                param: None,
                n: n_max,
            },
        }
    }

    pub fn factorial_pow(p: f64, n_max: usize) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::InvalidWeight(format!("exponent {p} is not finite")));
        }
        Ok(WeightSequence {
            log_values: (0..=n_max).map(|n| p * ln_factorial(n)).collect(),
            family: WeightSpec::FactorialPow { param: p, n: n_max },
        })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        match values.first() {
            None => return Err(Error::InvalidWeight("empty weight sequence".into())),
            Some(&m0) if m0 != 1.0 => {
                return Err(Error::InvalidWeight(format!(
                    "M₀ must be exactly 1, got {m0}"
                )))
            }
            _ => {}
        }
        if let Some((n, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidWeight(format!(
                "M_{n} = {v} is not a positive finite number"
            )));
        }
        Ok(WeightSequence {
            log_values: values.iter().map(|v| v.ln()).collect(),
            family: WeightSpec::Explicit { values },
        })
    }

    /// Largest index `N`.
    pub fn max_index(&self) -> usize {
        self.log_values.len() - 1
    }

    pub fn log_value(&self, n: usize) -> f64 {
        self.log_values[n]
    }

    pub fn value(&self, n: usize) -> f64 {
        self.log_values[n].exp()
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.family
    }

    /// The prefix `(M₀, …, M_N')`.
    pub fn truncate(&self, n_max: usize) -> WeightSequence {
        let n_max = n_max.min(self.max_index());
        let family = match &self.family {
            WeightSpec::FactorialSq { param, .. } => WeightSpec::FactorialSq {
                param: *param,
                n: n_max,
            },
            WeightSpec::FactorialPow { param, .. } => WeightSpec::FactorialPow {
                param: *param,
                n: n_max,
            },
            WeightSpec::Explicit { values } => WeightSpec::Explicit {
                values: values[..=n_max].to_vec(),
            },
        };
        WeightSequence {
            log_values: self.log_values[..=n_max].to_vec(),
            family,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub window: usize,
    pub binomial_ok: bool,
    /// First `(n, m)` with `M_{n+m} / (Mₙ M_m) < C(n+m, m)`.
    pub first_violation: Option<(usize, usize)>,
    /// `(n!/Mₙ)^{1/n}` for `n = 1..=N`.
    pub nonanalytic_tail: Vec<f64>,
    pub tail_threshold: f64,
    pub nonanalytic_ok: bool,
    /// Human-readable status of the finite nonanalyticity check.
    pub nonanalytic_status: String,
}

impl AdmissibilityReport {
    pub fn is_usable(&self) -> bool {
        self.binomial_ok && self.nonanalytic_ok
    }
}

pub fn check_admissible(w: &WeightSequence) -> Result<AdmissibilityReport> {
    check_admissible_with(w, DEFAULT_TAIL_THRESHOLD)
}

pub fn check_admissible_with(
    w: &WeightSequence,
    tail_threshold: f64,
) -> Result<AdmissibilityReport> {
    if w.log_value(0) != 0.0 {
        return Err(Error::InvalidWeight("M₀ must be exactly 1".into()));
    }
    let n_max = w.max_index();
    if n_max < 2 {
        return Err(Error::Precondition(format!(
            "admissibility needs N ≥ 2, got {n_max}"
        )));
    }

    let first_violation = (2..=n_max).find_map(|s| {
        (1..s).map(|n| (n, s - n)).find(|&(n, m)| {
            let lhs = w.log_value(n + m) - w.log_value(n) - w.log_value(m);
            lhs < ln_binomial(n + m, m) - BINOMIAL_LOG_TOL
        })
    });

    let tail: Vec<f64> = (1..=n_max)
        .map(|n| ((ln_factorial(n) - w.log_value(n)) / n as f64).exp())
        .collect();
    let half = tail.len() / 2;
    let decreasing = tail[half..].windows(2).all(|p| p[1] < p[0]);
    let last = *tail.last().expect("N ≥ 2");
    let nonanalytic_ok = decreasing && last < tail_threshold;
    let nonanalytic_status = if nonanalytic_ok {
        format!("certified at window {n_max}")
    } else {
        format!("not certified at window {n_max}")
    };

    Ok(AdmissibilityReport {
        window: n_max,
        binomial_ok: first_violation.is_none(),
        first_violation,
        nonanalytic_tail: tail,
        tail_threshold,
        nonanalytic_ok,
        nonanalytic_status,
    })
}

/// `‖f‖_D = Σ_{n ≤ deg f} ‖f⁽ⁿ⁾‖_∞ / Mₙ` over `domain`, as a bracket.
pub fn dd_norm(f: &Poly, w: &WeightSequence, domain: Interval) -> Result<NormBracket> {
    dd_norm_with_grid(f, w, domain, DEFAULT_SUP_GRID)
}

pub fn dd_norm_with_grid(
    f: &Poly,
    w: &WeightSequence,
    domain: Interval,
    grid_size: usize,
) -> Result<NormBracket> {
    let degree = f.degree();
    if degree > w.max_index() {
        return Err(Error::InsufficientWeights {
            degree,
            available: w.max_index(),
        });
    }
    let grid = domain.chebyshev_grid(grid_size);
    let mut lower = 0.0;
    let mut upper = 0.0;
    let mut g = f.clone();
    for n in 0..=degree {
        let b = g.sup_bracket_on(domain, &grid);
        let inv_m = (-w.log_value(n)).exp();
        lower += b.lower * inv_m;
        upper += b.upper * inv_m;
        g = g.derivative();
    }
    Ok(NormBracket::new(lower, upper, NormKind::Ddm))
}

/// `max_{1 ≤ k ≤ deg φ} (‖φ⁽ᵏ⁾‖_∞ / k!)^{1/k}`; exact for polynomials since
/// higher derivatives vanish. `k_max` must be at least `deg φ`.
pub fn analyticity_index(map: &PolyMap, k_max: usize) -> Result<SupBracket> {
    let degree = map.degree();
    if k_max < degree {
        return Err(Error::Precondition(format!(
            "K = {k_max} is below deg φ = {degree}"
        )));
    }
    let dom = map.domain();
    let grid = dom.chebyshev_grid(DEFAULT_SUP_GRID);
    let mut out = SupBracket::exact(0.0);
    let mut g = map.poly().clone();
    for k in 1..=degree {
        g = g.derivative();
        let b = g.sup_bracket_on(dom, &grid);
        let scale = |v: f64| ((v.ln() - ln_factorial(k)) / k as f64).exp();
        out.lower = out.lower.max(scale(b.lower));
        out.upper = out.upper.max(scale(b.upper));
    }
    Ok(out)
}
