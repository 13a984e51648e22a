//! Acceptance suite: one PASS/FAIL line per criterion. Oracles are computed
//! here independently of the library.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use riesz_lab::classifier::{classify_c1, classify_dd, EvidenceValue, Verdict};
use riesz_lab::dales_davie::{check_admissible, dd_norm, WeightSequence};
use riesz_lab::gleason_shift::{
    noncompact_witness, riesz_certificate, shift_iterate_sup, ShiftPoint, TestFunction,
};
use riesz_lab::operator::{build_matrix, essential_radius_sequence, NormKind};
use riesz_lab::spectra::eigenvalues;
use riesz_lab::{Interval, Poly, PolyMap};

const SEED: u64 = 20_240_601;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.3} s", d.as_secs_f64())
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// `x₀ + λ(x - x₀) + c(x - x₀)²` expanded.
fn attracting_coeffs(x0: f64, lambda: f64, c: f64) -> Vec<f64> {
    vec![x0 - lambda * x0 + c * x0 * x0, lambda - 2.0 * c * x0, c]
}

struct CorpusMap {
    map: PolyMap,
    x0: f64,
    lambda: f64,
}

/// Twenty self-maps of [0, 1] with a known attracting fixed point; half
/// have `λ = 0`.
fn random_corpus() -> Vec<CorpusMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    while out.len() < 20 {
        let x0 = rng.gen_range(0.15..0.85);
        let lambda = if out.len() % 2 == 0 {
            0.0
        } else {
            rng.gen_range(0.05..=0.6)
        };
        let c = rng.gen_range(-0.4..0.4);
        if lambda + 2.0 * f64::abs(c) >= 0.95 || f64::abs(c) < 0.02 {
            continue;
        }
        if let Ok(map) = PolyMap::on_unit(attracting_coeffs(x0, lambda, c)) {
            out.push(CorpusMap { map, x0, lambda });
        }
    }
    out
}

fn spectrum_formula() -> Outcome {
    let start = Instant::now();
    let map = PolyMap::on_unit(vec![0.0, 0.5]).unwrap();
    let eig = eigenvalues(&build_matrix(&map, 0.0, 32).unwrap()).unwrap();
    let elapsed = start.elapsed();
    let oracle: Vec<f64> = (0..=32).map(|k| 0.5f64.powi(k)).collect();
    let mut worst = 0.0f64;
    let mut simple = true;
    for &v in &oracle {
        let hits: Vec<&Complex64> = eig
            .iter()
            .filter(|z| (*z - Complex64::new(v, 0.0)).norm() <= 1e-9 * v)
            .collect();
        simple &= hits.len() == 1;
        if let Some(z) = hits.first() {
            worst = worst.max((*z - Complex64::new(v, 0.0)).norm() / v);
        }
    }
    let pass = eig.len() == 33 && simple && worst <= 1e-9 && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "{} eigenvalues, each 2^-k hit exactly once = {simple}, max rel err {worst:.1e}, {}",
            eig.len(),
            secs(elapsed)
        ),
    )
}

fn riesz_criterion() -> Outcome {
    let fixed = [
        (vec![0.0, 0.0, 0.5], Verdict::RieszNotPowerCompact),
        (vec![0.0, 0.5], Verdict::NotRiesz),
        (vec![0.0, 1.0], Verdict::NotRiesz),
        (vec![0.7], Verdict::Compact),
    ];
    let fixed_ok = fixed
        .iter()
        .filter(|(c, v)| classify_c1(&PolyMap::on_unit(c.clone()).unwrap()).verdict == *v)
        .count();
    let corpus = random_corpus();
    let mut wrong = Vec::new();
    for (i, m) in corpus.iter().enumerate() {
        // Riesz on C¹ iff the attracting fixed point has zero derivative
        let expected = if m.lambda == 0.0 {
            Verdict::RieszNotPowerCompact
        } else {
            Verdict::NotRiesz
        };
        let got = classify_c1(&m.map).verdict;
        if got != expected {
            wrong.push(format!(
                "#{i} (x0={:.3}, lambda={:.3}) -> {got}",
                m.x0, m.lambda
            ));
        }
    }
    outcome(
        fixed_ok == 4 && wrong.is_empty(),
        format!(
            "{fixed_ok}/4 named maps, {} misclassified of {} random maps{}",
            wrong.len(),
            corpus.len(),
            if wrong.is_empty() {
                String::new()
            } else {
                format!(": {}", wrong.join("; "))
            }
        ),
    )
}

fn essential_lower_bound() -> Outcome {
    let map = PolyMap::on_unit(vec![0.0, 0.5]).unwrap();
    let seq = essential_radius_sequence(&map, 0.0, NormKind::C1, 20).unwrap();
    let mut failures = Vec::new();
    for e in &seq.entries {
        let n = e.n as f64;
        let oracle = 2f64.powf(-(n + 1.0) / n);
        if e.log_lower.exp() < oracle {
            failures.push(e.n);
        }
    }
    let r20 = seq.lower(20);
    outcome(
        failures.is_empty() && r20 >= 0.46,
        format!("r_n lower >= (2^(-n-1))^(1/n) fails at n = {failures:?}, r_20 lower = {r20:.6}"),
    )
}

fn riesz_decay() -> Outcome {
    let start = Instant::now();
    let map = PolyMap::on_unit(vec![0.0, 0.0, 0.5]).unwrap();
    let seq = essential_radius_sequence(&map, 0.0, NormKind::C1, 20).unwrap();
    let elapsed = start.elapsed();
    let r20 = seq.upper(20);
    let decreasing = (5..20).all(|n| seq.upper(n + 1) < seq.upper(n));
    // the upper bracket may not undercut the exact value |phi_20'(1)|^(1/20)
    let log_true = (20.0 + 1.0 - 2f64.powi(20)) * std::f64::consts::LN_2 / 20.0;
    let sound = seq.entries[19].log_upper >= log_true;
    outcome(
        r20 < 0.1 && decreasing && sound && elapsed < Duration::from_secs(1),
        format!(
            "r_20 upper = {r20:.3e}, decreasing for n >= 5 = {decreasing}, above exact derivative root = {sound}, {}",
            secs(elapsed)
        ),
    )
}

fn power_compactness() -> Outcome {
    let map = PolyMap::on_unit(vec![0.0, 0.0, 0.5]).unwrap();
    let w = WeightSequence::factorial_sq(40);
    let c = classify_dd(&map, &w).unwrap();
    let bracket_ok = matches!(
        c.fact("sup_abs_iterate_derivative"),
        Some(EvidenceValue::Bracket { lower, upper })
            if (lower - 0.5).abs() <= 1e-10 && (upper - 0.5).abs() <= 1e-10
    );
    let chain_c = match c.fact("chain_constant") {
        Some(EvidenceValue::Scalar(v)) => *v,
        _ => f64::NAN,
    };
    // φₙ(x) = 2^(1-2ⁿ) x^(2ⁿ), so log|φₙ'(x)| = (n + 1 - 2ⁿ) log 2 + (2ⁿ - 1) log x
    let n_power = 2usize;
    let sup_deriv = 1.0f64;
    let mut worst = f64::NEG_INFINITY;
    for x in Interval::UNIT.chebyshev_grid(4096) {
        for n in n_power + 1..=30 {
            let p = 2f64.powi(n as i32);
            let log_deriv = (n as f64 + 1.0 - p) * std::f64::consts::LN_2 + (p - 1.0) * x.ln();
            let bound = (n - n_power) as f64 * chain_c.ln() + n_power as f64 * sup_deriv.ln();
            worst = worst.max(log_deriv - bound);
        }
    }
    let chain_ok = chain_c < 1.0 && worst < 0.0;
    outcome(
        c.verdict == Verdict::PowerCompact(2) && bracket_ok && chain_ok,
        format!(
            "verdict {}, |phi_2'| bracket within 1e-10 of 1/2 = {bracket_ok}, c = {chain_c:.4}, worst log margin {worst:.3}",
            c.verdict
        ),
    )
}

fn weight_machinery() -> Outcome {
    let sq = check_admissible(&WeightSequence::factorial_sq(40)).unwrap();
    let fact = check_admissible(&WeightSequence::factorial_pow(1.0, 40).unwrap()).unwrap();
    let tail_is_one = fact
        .nonanalytic_tail
        .iter()
        .all(|t| (t - 1.0).abs() <= 1e-12);

    let w = WeightSequence::factorial_sq(40);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let random_poly = |rng: &mut ChaCha8Rng| {
        let degree = rng.gen_range(0..=8);
        Poly::new((0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect())
    };
    let mut violations = 0;
    for _ in 0..500 {
        let f = random_poly(&mut rng);
        let g = random_poly(&mut rng);
        let nf = dd_norm(&f, &w, Interval::UNIT).unwrap();
        let ng = dd_norm(&g, &w, Interval::UNIT).unwrap();
        let nfg = dd_norm(&f.mul(&g), &w, Interval::UNIT).unwrap();
        if nfg.upper > (1.0 + 1e-8) * nf.upper * ng.upper {
            violations += 1;
        }
    }
    outcome(
        sq.binomial_ok && sq.nonanalytic_ok && !fact.nonanalytic_ok && tail_is_one && violations == 0,
        format!(
            "(n!)^2 admissible = {}, nonanalytic = {}; n! nonanalytic = {}, tail == 1 = {tail_is_one}; {violations} submultiplicativity violations in 500 pairs",
            sq.binomial_ok, sq.nonanalytic_ok, fact.nonanalytic_ok
        ),
    )
}

fn weighted_shift() -> Outcome {
    let start = Instant::now();
    let truncation = (64, 64);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut sup_ok = true;
    for n in 0..=10u64 {
        let s = shift_iterate_sup(n as usize, truncation, 10, &mut rng).unwrap();
        let oracle = 1.0 / factorial(n + 1) as f64;
        sup_ok &= s.closed_form == oracle
            && s.truncated_exact == oracle
            && s.empirical <= oracle * (1.0 + 1e-15);
    }
    let cert = riesz_certificate(10, truncation).unwrap();
    let root = cert.entries[9].root;
    let oracle_root = (2.0 / factorial(11) as f64).powf(0.1);
    let mut witness_ok = true;
    for n in 1..=10u64 {
        let w = noncompact_witness(n as usize, 50, truncation).unwrap();
        let expected = 2.0 / factorial(n + 1) as f64;
        witness_ok &= w.pairs.len() == 50 * 49 / 2
            && w.pairs
                .iter()
                .all(|p| p.distance > 0.0 && (p.distance - expected).abs() <= 1e-15 * expected);
    }
    let elapsed = start.elapsed();
    outcome(
        sup_ok && root <= 0.19 && (root - oracle_root).abs() < 1e-12 && witness_ok && elapsed < Duration::from_secs(5),
        format!(
            "sup = 1/(n+1)! for n <= 10: {sup_ok}; C_10^(1/10) <= {root:.4}; witness distances 2/(n+1)! for n <= 10: {witness_ok}; {}",
            secs(elapsed)
        ),
    )
}

fn schwarz_gleason() -> Outcome {
    let truncation = (64, 64);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let origin = ShiftPoint::zeros(truncation.0, truncation.1);
    let mut violations = 0;
    let mut max_ratio = 0.0f64;
    for _ in 0..1000 {
        let r = rng.gen_range(1e-3..=1.0);
        let x = ShiftPoint::random(truncation.0, truncation.1, &mut rng)
            .scale(Complex64::new(r, 0.0))
            .unwrap();
        let f = TestFunction::random_unit_ball(truncation, 6, 4, &mut rng);
        let l1: f64 = f.terms.iter().map(|(_, c)| c.norm()).sum();
        assert!(l1 <= 1.0 + 1e-12, "test function outside the unit ball");
        let d = x.sup_norm();
        let lhs = (f.eval(&x) - f.eval(&origin)).norm();
        if lhs > 2.0 * d * (1.0 + 1e-9) {
            violations += 1;
        }
        max_ratio = max_ratio.max(lhs / (2.0 * d));
    }
    outcome(
        violations == 0,
        format!("{violations} violations in 1000 pairs, largest |f(x)-f(0)| / 2d = {max_ratio:.4}"),
    )
}

fn fixed_point_uniqueness() -> Outcome {
    let mut maps: Vec<(String, PolyMap, f64)> = random_corpus()
        .into_iter()
        .enumerate()
        .map(|(i, m)| (format!("corpus #{i}"), m.map, m.x0))
        .collect();
    maps.push(("x/2".into(), PolyMap::on_unit(vec![0.0, 0.5]).unwrap(), 0.0));
    maps.push((
        "x^2/2".into(),
        PolyMap::on_unit(vec![0.0, 0.0, 0.5]).unwrap(),
        0.0,
    ));
    let mut failures = Vec::new();
    for (name, map, x0) in &maps {
        let fp = map.find_fixed_point(100);
        let agree = fp.found() && fp.seeds_agreeing == 100 && (fp.x0 - x0).abs() <= 1e-8;
        // diameters shrink by 0.95 per step over the last 20 of 64 iterates,
        // or sit at the rounding floor
        let d = map.diameter_sequence(64, 1024).unwrap();
        let floor = 64.0 * f64::EPSILON;
        let geometric = d[43..]
            .windows(2)
            .all(|w| w[1] <= floor || w[1] <= 0.95 * w[0]);
        if !(agree && geometric) {
            failures.push(format!("{name}: agree {agree}, geometric {geometric}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} of {} attracting maps pass{}",
            maps.len() - failures.len(),
            maps.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!(": {}", failures.join("; "))
            }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("spectrum of x/2 at degree 32", spectrum_formula),
        (
            "C1 Riesz criterion on named and random maps",
            riesz_criterion,
        ),
        (
            "essential radius lower bound for x/2",
            essential_lower_bound,
        ),
        ("essential radius decay for x^2/2", riesz_decay),
        (
            "power compactness of x^2/2 with (n!)^2 weights",
            power_compactness,
        ),
        (
            "weight admissibility and submultiplicativity",
            weight_machinery,
        ),
        (
            "weighted shift decay, certificate and witness",
            weighted_shift,
        ),
        ("Schwarz bound for the Gleason distance", schwarz_gleason),
        (
            "fixed point uniqueness and shrinking images",
            fixed_point_uniqueness,
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!(
            "[{}] {}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
