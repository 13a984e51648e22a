//! Verdicts on whether `T f = f ∘ φ` is compact, power compact, Riesz but
//! not power compact, or not Riesz, each with the numbers that justify it.

use serde::{Deserialize, Serialize};

use crate::dales_davie::{check_admissible, AdmissibilityReport, WeightSequence, WeightSpec};
use crate::error::{Error, Result};
use crate::operator::{essential_radius_sequence_with_grid, NormKind};
use crate::poly::{Interval, DEFAULT_SUP_GRID};
use crate::report::logf64;
use crate::selfmap::{iterate_degree, FixedPointConfig, FixedPointReport, PolyMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum Verdict {
    Compact,
    PowerCompact(usize),
    RieszNotPowerCompact,
    NotRiesz,
    Inconclusive,
}

impl Verdict {
    pub fn is_definite(self) -> bool {
        self != Verdict::Inconclusive
    }

    /// Compact and power compact operators are Riesz.
    pub fn is_riesz(self) -> Option<bool> {
        match self {
            Verdict::Compact | Verdict::PowerCompact(_) | Verdict::RieszNotPowerCompact => {
                Some(true)
            }
            Verdict::NotRiesz => Some(false),
            Verdict::Inconclusive => None,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Compact => write!(f, "Compact"),
            Verdict::PowerCompact(n) => write!(f, "PowerCompact({n})"),
            Verdict::RieszNotPowerCompact => write!(f, "RieszNotPowerCompact"),
            Verdict::NotRiesz => write!(f, "NotRiesz"),
            Verdict::Inconclusive => write!(f, "Inconclusive"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum Algebra {
    C1,
    Ddm { weights: WeightSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EvidenceValue {
    Scalar(#[serde(with = "logf64")] f64),
    Bracket {
        #[serde(with = "logf64")]
        lower: f64,
        #[serde(with = "logf64")]
        upper: f64,
    },
    Sequence(Vec<f64>),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceFact {
    pub name: String,
    pub value: EvidenceValue,
    /// Which criterion the fact feeds.
    pub tag: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    /// `|φ'(x₀)|` at or below this counts as zero.
    pub deriv_zero_tol: f64,
    /// Largest power tried for power compactness.
    pub iterate_cap: usize,
    /// Iterates inspected by the shrinking-diameter certificate.
    pub certificate_window: usize,
    /// Required per-step diameter ratio inside the window.
    pub certificate_ratio: f64,
    /// Iterates computed before the window is read off.
    pub diameter_steps: usize,
    pub n_max: usize,
    /// `rₙ_upper` at `n_max` must fall below this for a Riesz verdict.
    pub radius_threshold: f64,
    /// Largest `n` in the chain-bound check.
    pub chain_test_max: usize,
    pub grid_size: usize,
    pub orbit_grid: usize,
    pub fixed_point_seeds: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            deriv_zero_tol: 1e-10,
            iterate_cap: 64,
            certificate_window: 20,
            certificate_ratio: 0.95,
            diameter_steps: 64,
            n_max: 20,
            radius_threshold: 0.5,
            chain_test_max: 30,
            grid_size: DEFAULT_SUP_GRID,
            orbit_grid: 2048,
            fixed_point_seeds: 100,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("iterate_cap", self.iterate_cap),
            ("certificate_window", self.certificate_window),
            ("chain_test_max", self.chain_test_max),
            ("fixed_point_seeds", self.fixed_point_seeds),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        if self.diameter_steps <= self.certificate_window {
            return Err(Error::Config(
                "diameter_steps must exceed certificate_window".into(),
            ));
        }
        if self.n_max < 2 {
            return Err(Error::Config("n_max must be at least 2".into()));
        }
        for (name, v) in [
            ("deriv_zero_tol", self.deriv_zero_tol),
            ("certificate_ratio", self.certificate_ratio),
            ("radius_threshold", self.radius_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub algebra: Algebra,
    pub map: PolyMap,
    pub evidence: Vec<EvidenceFact>,
    pub config: ClassifierConfig,
}

impl Classification {
    pub fn fact(&self, name: &str) -> Option<&EvidenceValue> {
        self.evidence
            .iter()
            .find(|f| f.name == name)
            .map(|f| &f.value)
    }
}

#[derive(Default)]
struct Evidence(Vec<EvidenceFact>);

impl Evidence {
    fn push(&mut self, name: &str, value: EvidenceValue, tag: &str) {
        self.0.push(EvidenceFact {
            name: name.into(),
            value,
            tag: tag.into(),
        });
    }

    fn scalar(&mut self, name: &str, v: f64, tag: &str) {
        self.push(name, EvidenceValue::Scalar(v), tag);
    }

    fn bracket(&mut self, name: &str, lower: f64, upper: f64, tag: &str) {
        self.push(name, EvidenceValue::Bracket { lower, upper }, tag);
    }

    fn text(&mut self, name: &str, v: impl Into<String>, tag: &str) {
        self.push(name, EvidenceValue::Text(v.into()), tag);
    }
}

const TAG_CONSTANT: &str = "constant map gives a rank-one operator";
const TAG_STRUCTURE: &str = "nonconstant polynomials have nonconstant iterates";
const TAG_SINGLETON: &str = "iterated images shrink to the fixed point";
const TAG_C1_CRITERION: &str = "C1 Riesz iff singleton intersection and vanishing derivative";
const TAG_C1_RADIUS: &str = "C1 distance from T^n to compacts";
const TAG_FIXED_POINT: &str = "fixed point of the self-map";
const TAG_DD_COMPACT: &str = "sup of the derivative below one gives compactness";
const TAG_DD_POWER: &str = "iterate derivative below one gives power compactness";
const TAG_DD_NECESSARY: &str = "Riesz forces a unique fixed point with derivative below one";
const TAG_WEIGHTS: &str = "admissible nonanalytic weights";

/// Outcome of the shrinking-diameter test on the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shrinking {
    Geometric,
    Stagnant,
    Unclear,
}

/// Diameters at or below this are indistinguishable from rounding noise.
fn diameter_floor(domain: Interval) -> f64 {
    64.0 * f64::EPSILON * domain.lo().abs().max(domain.hi().abs()).max(domain.width())
}

fn singleton_certificate(diameters: &[f64], cfg: &ClassifierConfig, domain: Interval) -> Shrinking {
    let floor = diameter_floor(domain);
    let window = &diameters[diameters.len() - cfg.certificate_window - 1..];
    let geometric = window
        .windows(2)
        .all(|w| w[1] <= floor || w[1] <= cfg.certificate_ratio * w[0]);
    if geometric {
        return Shrinking::Geometric;
    }
    let first = diameters[0];
    let last = *diameters.last().expect("non-empty");
    if last > floor && last >= 0.5 * first {
        Shrinking::Stagnant
    } else {
        Shrinking::Unclear
    }
}

fn fixed_point_report(map: &PolyMap, cfg: &ClassifierConfig) -> FixedPointReport {
    let fp_cfg = FixedPointConfig {
        diameter_steps: cfg.diameter_steps,
        ..FixedPointConfig::default()
    };
    map.find_fixed_point_with(cfg.fixed_point_seeds, &fp_cfg)
}

fn record_fixed_points(ev: &mut Evidence, fp: &FixedPointReport) {
    ev.text(
        "fixed_point_status",
        if fp.found() { "found" } else { "not_found" },
        TAG_FIXED_POINT,
    );
    ev.scalar("x0", fp.x0, TAG_FIXED_POINT);
    ev.scalar("fixed_point_residual", fp.residual, TAG_FIXED_POINT);
    ev.scalar("derivative_at_x0", fp.derivative_at_x0, TAG_FIXED_POINT);
    ev.scalar("seeds_agreeing", fp.seeds_agreeing as f64, TAG_FIXED_POINT);
}

/// Two or more genuine fixed points; both lie in every `φₙ(X)`.
fn distinct_fixed_points(fp: &FixedPointReport, cfg: &FixedPointConfig) -> Vec<f64> {
    let mut xs: Vec<f64> = fp.fixed_points(cfg.residual_tol).map(|c| c.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= cfg.agree_tol);
    xs
}

/// Classification of `T` on `C¹` of the map's interval.
pub fn classify_c1(map: &PolyMap) -> Classification {
    classify_c1_with(map, &ClassifierConfig::default())
}

pub fn classify_c1_with(map: &PolyMap, cfg: &ClassifierConfig) -> Classification {
    let mut ev = Evidence::default();
    let verdict = decide_c1(map, cfg, &mut ev);
    Classification {
        verdict,
        algebra: Algebra::C1,
        map: map.clone(),
        evidence: ev.0,
        config: cfg.clone(),
    }
}

fn decide_c1(map: &PolyMap, cfg: &ClassifierConfig, ev: &mut Evidence) -> Verdict {
    if map.is_constant() {
        ev.scalar("constant_value", map.poly().coeff(0), TAG_CONSTANT);
        return Verdict::Compact;
    }
    // deg φ_N = (deg φ)^N ≥ 1, so no iterate up to the cap is constant
    let degrees: Vec<f64> = (1..=cfg.iterate_cap)
        .map(|n| iterate_degree(map.degree(), n).min(1 << 53) as f64)
        .collect();
    ev.push(
        "iterate_degrees",
        EvidenceValue::Sequence(degrees),
        TAG_STRUCTURE,
    );

    let fp = fixed_point_report(map, cfg);
    record_fixed_points(ev, &fp);
    let fixed = distinct_fixed_points(&fp, &FixedPointConfig::default());
    if fixed.len() >= 2 {
        ev.push(
            "distinct_fixed_points",
            EvidenceValue::Sequence(fixed),
            TAG_SINGLETON,
        );
        return Verdict::NotRiesz;
    }

    let diameters = match map.diameter_sequence(cfg.diameter_steps, cfg.orbit_grid) {
        Ok(d) => d,
        Err(e) => {
            ev.text("diameter_error", e.to_string(), TAG_SINGLETON);
            return Verdict::Inconclusive;
        }
    };
    let shrinking = singleton_certificate(&diameters, cfg, map.domain());
    ev.push(
        "diameter_sequence",
        EvidenceValue::Sequence(diameters),
        TAG_SINGLETON,
    );
    ev.text(
        "singleton_certificate",
        format!("{shrinking:?}").to_lowercase(),
        TAG_SINGLETON,
    );
    if shrinking == Shrinking::Stagnant {
        return Verdict::NotRiesz;
    }
    if !fp.found() {
        return Verdict::Inconclusive;
    }

    let radius = match essential_radius_sequence_with_grid(
        map,
        fp.x0,
        NormKind::C1,
        cfg.n_max,
        cfg.orbit_grid,
    ) {
        Ok(r) => r,
        Err(e) => {
            ev.text("radius_error", e.to_string(), TAG_C1_RADIUS);
            return Verdict::Inconclusive;
        }
    };
    let last = *radius.last();
    ev.bracket(
        "r_n_max",
        last.log_lower.exp(),
        last.log_upper.exp(),
        TAG_C1_RADIUS,
    );
    ev.scalar(
        "essential_radius_lower",
        last.log_ess_lower.exp(),
        TAG_C1_RADIUS,
    );
    ev.push(
        "r_n_upper",
        EvidenceValue::Sequence(radius.entries.iter().map(|e| e.log_upper.exp()).collect()),
        TAG_C1_RADIUS,
    );

    let slope = fp.derivative_at_x0.abs();
    if slope > cfg.deriv_zero_tol {
        ev.text(
            "criterion",
            "derivative at the fixed point is nonzero",
            TAG_C1_CRITERION,
        );
        return Verdict::NotRiesz;
    }
    if shrinking != Shrinking::Geometric {
        return Verdict::Inconclusive;
    }
    let decreasing_from = (1..=cfg.n_max).find(|&n| radius.upper_decreasing_from(n));
    if let Some(n) = decreasing_from {
        ev.scalar("r_n_upper_decreasing_from", n as f64, TAG_C1_RADIUS);
    }
    if decreasing_from.is_some() && last.log_upper.exp() < cfg.radius_threshold {
        ev.text(
            "criterion",
            "singleton intersection and vanishing derivative; no iterate is constant",
            TAG_C1_CRITERION,
        );
        Verdict::RieszNotPowerCompact
    } else {
        Verdict::Inconclusive
    }
}

/// Classification of `T` on the Dales–Davie algebra `D(X, M)`.
pub fn classify_dd(map: &PolyMap, w: &WeightSequence) -> Result<Classification> {
    classify_dd_with(map, w, &ClassifierConfig::default())
}

pub fn classify_dd_with(
    map: &PolyMap,
    w: &WeightSequence,
    cfg: &ClassifierConfig,
) -> Result<Classification> {
    let admissible: AdmissibilityReport = check_admissible(w)?;
    if !admissible.is_usable() {
        return Err(Error::Precondition(format!(
            "weights must be admissible and nonanalytic (binomial_ok = {}, nonanalytic = {})",
            admissible.binomial_ok, admissible.nonanalytic_status
        )));
    }
    let mut ev = Evidence::default();
    ev.text(
        "weights",
        admissible.nonanalytic_status.clone(),
        TAG_WEIGHTS,
    );
    let verdict = decide_dd(map, cfg, &mut ev)?;
    Ok(Classification {
        verdict,
        algebra: Algebra::Ddm {
            weights: w.spec().clone(),
        },
        map: map.clone(),
        evidence: ev.0,
        config: cfg.clone(),
    })
}

fn decide_dd(map: &PolyMap, cfg: &ClassifierConfig, ev: &mut Evidence) -> Result<Verdict> {
    let dom = map.domain();
    let dp = map.derivative();
    let deriv_sup = dp.sup_bracket(dom, cfg.grid_size);
    ev.bracket(
        "sup_abs_derivative",
        deriv_sup.lower,
        deriv_sup.upper,
        TAG_DD_COMPACT,
    );
    if deriv_sup.upper < 1.0 {
        return Ok(Verdict::Compact);
    }

    let fp = fixed_point_report(map, cfg);
    record_fixed_points(ev, &fp);
    let fixed = distinct_fixed_points(&fp, &FixedPointConfig::default());
    if fixed.len() >= 2 {
        ev.push(
            "distinct_fixed_points",
            EvidenceValue::Sequence(fixed),
            TAG_DD_NECESSARY,
        );
        return Ok(Verdict::NotRiesz);
    }
    if fixed.len() == 1 && fp.derivative_at_x0.abs() >= 1.0 {
        return Ok(Verdict::NotRiesz);
    }
    if !fp.found() {
        return Ok(Verdict::Inconclusive);
    }

    let x0 = fp.x0;
    let bounds = map.orbit_bounds(x0, cfg.iterate_cap.max(cfg.chain_test_max), cfg.orbit_grid)?;
    let power = (1..=cfg.iterate_cap).find_map(|n| {
        let orbit = bounds[n - 1].log_deriv;
        let (lower, upper) = iterate_deriv_sup(map, n, cfg.grid_size)
            .map(|(lo, up)| (lo.max(orbit.lower.exp()), up.min(orbit.upper.exp())))
            .unwrap_or_else(|| orbit.exp());
        (upper < 1.0).then_some((n, lower, upper))
    });
    let Some((n_power, lower, upper)) = power else {
        return Ok(Verdict::Inconclusive);
    };
    ev.bracket("sup_abs_iterate_derivative", lower, upper, TAG_DD_POWER);
    ev.scalar("power", n_power as f64, TAG_DD_POWER);

    // φₙ(X) ⊂ φ_N(X) for n ≥ N, so |φ'| ≤ c_N along every later orbit step
    let reach = bounds[n_power - 1].log_deviation.upper.exp();
    let lo = (x0 - reach).max(dom.lo());
    let hi = (x0 + reach).min(dom.hi());
    let c_n = match Interval::new(lo, hi) {
        Ok(image) => dp.sup_bracket(image, cfg.grid_size).upper,
        Err(_) => dp.eval(x0).abs() + dp.eval_error_bound(x0),
    };
    ev.bracket("image_enclosure", lo, hi, TAG_DD_POWER);
    ev.scalar("sup_abs_derivative_on_image", c_n, TAG_DD_POWER);
    if c_n < 1.0 {
        let c = 0.5 * (c_n + 1.0);
        let chain = chain_bound_check(map, n_power, c, deriv_sup.upper, cfg);
        ev.scalar("chain_constant", c, TAG_DD_POWER);
        ev.push(
            "chain_bound_max_margin",
            EvidenceValue::Scalar(chain.max_margin),
            TAG_DD_POWER,
        );
        ev.text(
            "chain_bound",
            format!(
                "|phi_n'(x)| < c^(n-{n_power}) sup|phi'|^{n_power} for {} < n <= {}: {}",
                n_power,
                cfg.chain_test_max,
                if chain.holds { "holds" } else { "fails" }
            ),
            TAG_DD_POWER,
        );
    }
    Ok(Verdict::PowerCompact(n_power))
}

/// `‖φₙ'‖_∞` bracket from the composed iterate when its degree is moderate.
fn iterate_deriv_sup(map: &PolyMap, n: usize, grid_size: usize) -> Option<(f64, f64)> {
    let it = map.iterate(n).ok()?;
    let b = it.derivative().sup_bracket(map.domain(), grid_size);
    Some((b.lower, b.upper))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainCheck {
    pub holds: bool,
    /// Largest `log|φₙ'(x)| - log bound` seen; negative when the bound holds.
    pub max_margin: f64,
}

/// Checks `|φₙ'(x)| < c^{n-N} ‖φ'‖_∞^N` at every grid point for
/// `N < n ≤ chain_test_max`, in log space.
pub fn chain_bound_check(
    map: &PolyMap,
    power: usize,
    c: f64,
    deriv_sup: f64,
    cfg: &ClassifierConfig,
) -> ChainCheck {
    let grid = map.domain().chebyshev_grid(cfg.grid_size);
    let rows = map.log_deriv_orbits(&grid, cfg.chain_test_max);
    let mut max_margin = f64::NEG_INFINITY;
    for n in power + 1..=cfg.chain_test_max {
        let bound = (n - power) as f64 * c.ln() + power as f64 * deriv_sup.ln();
        for &v in &rows[n - 1] {
            max_margin = max_margin.max(v - bound);
        }
    }
    ChainCheck {
        holds: max_margin < 0.0,
        max_margin,
    }
}
