//! Dense complex eigenvalues and comparison against the geometric spectrum
//! `{φ'(x₀)ⁿ : n ≥ 1} ∪ {0, 1}` of a Riesz composition endomorphism.
//!
//! The eigensolver first isolates eigenvalues that row/column permutations
//! expose (triangular matrices are isolated completely, so their spectrum is
//! read off the diagonal exactly), then reduces what remains to Hessenberg
//! form with Householder reflections and runs single-shift complex QR with
//! Wilkinson shifts and deflation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{vec_norm, CMatrix};
use crate::operator::OperatorMatrix;
use crate::report::{format_f64, Csv};
use crate::selfmap::PolyMap;

pub const MAX_DIM: usize = 512;
/// Absolute deflation floor, relative to `‖A‖_F`.
pub const DEFLATION_REL: f64 = 1e-14;
pub const SWEEPS_PER_DIM: usize = 30;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Eigenvalues of an operator matrix, sorted by decreasing modulus.
pub fn eigenvalues(m: &OperatorMatrix) -> Result<Vec<Complex64>> {
    eigenvalues_dense(&m.entries)
}

pub fn eigenvalues_dense(a: &CMatrix) -> Result<Vec<Complex64>> {
    let n = a.dim();
    if n > MAX_DIM {
        return Err(Error::Precondition(format!(
            "matrix dimension {n} exceeds {MAX_DIM}"
        )));
    }
    let (permuted, lo, hi) = isolate(a);
    let mut out: Vec<Complex64> = (0..lo).map(|i| permuted[(i, i)]).collect();
    out.extend((hi..n).map(|i| permuted[(i, i)]));
    if lo < hi {
        let block = submatrix(&permuted, lo, hi);
        match qr_eigenvalues_with_norm(&block, a.frobenius_norm()) {
            Ok(v) => out.extend(v),
            Err(Error::NoConvergence { sweeps, partial }) => {
                out.extend(partial);
                sort_by_modulus(&mut out);
                return Err(Error::NoConvergence {
                    sweeps,
                    partial: out,
                });
            }
            Err(e) => return Err(e),
        }
    }
    sort_by_modulus(&mut out);
    Ok(out)
}

/// Hessenberg reduction plus shifted QR, without the permutation step.
pub fn qr_eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    let mut v = qr_eigenvalues_with_norm(a, a.frobenius_norm())?;
    sort_by_modulus(&mut v);
    Ok(v)
}

fn sort_by_modulus(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });
}

fn submatrix(a: &CMatrix, lo: usize, hi: usize) -> CMatrix {
    let mut out = CMatrix::zeros(hi - lo);
    for i in lo..hi {
        for j in lo..hi {
            out[(i - lo, j - lo)] = a[(i, j)];
        }
    }
    out
}

fn swap_sym(a: &mut CMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    let n = a.dim();
    for k in 0..n {
        let t = a[(i, k)];
        a[(i, k)] = a[(j, k)];
        a[(j, k)] = t;
    }
    for k in 0..n {
        let t = a[(k, i)];
        a[(k, i)] = a[(k, j)];
        a[(k, j)] = t;
    }
}

/// Symmetric permutation to block upper triangular form. Returns the
/// permuted matrix and the half-open active range `lo..hi`; diagonal entries
/// outside it are eigenvalues.
fn isolate(a: &CMatrix) -> (CMatrix, usize, usize) {
    let mut m = a.clone();
    let (mut lo, mut hi) = (0usize, a.dim());
    while lo < hi {
        // a row with no off-diagonal entries in the active block goes last
        let isolated_row = (lo..hi)
            .rev()
            .find(|&i| (lo..hi).all(|j| j == i || m[(i, j)].norm_sqr() == 0.0));
        if let Some(i) = isolated_row {
            swap_sym(&mut m, i, hi - 1);
            hi -= 1;
            continue;
        }
        // a column with no off-diagonal entries goes first
        let isolated_col =
            (lo..hi).find(|&j| (lo..hi).all(|i| i == j || m[(i, j)].norm_sqr() == 0.0));
        match isolated_col {
            Some(j) => {
                swap_sym(&mut m, j, lo);
                lo += 1;
            }
            None => break,
        }
    }
    (m, lo, hi)
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut CMatrix) {
    let n = a.dim();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let norm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x;
        v[0] += phase * norm;
        let vn = vec_norm(&v);
        for z in v.iter_mut() {
            *z /= vn;
        }
        // A ← (I - 2vvᴴ) A
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * a[(k + 1 + t, j)])
                .sum();
            for (t, vi) in v.iter().enumerate() {
                a[(k + 1 + t, j)] -= 2.0 * vi * dot;
            }
        }
        // A ← A (I - 2vvᴴ)
        for i in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| a[(i, k + 1 + t)] * vi)
                .sum();
            for (t, vi) in v.iter().enumerate() {
                a[(i, k + 1 + t)] -= 2.0 * dot * vi.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = zero();
        }
    }
}

/// Eigenvalues of `[[a, b], [c, d]]`; the smaller one comes from the
/// determinant to avoid cancellation.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_tr = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * c).sqrt();
    let (p, q) = (half_tr + disc, half_tr - disc);
    let big = if p.norm() >= q.norm() { p } else { q };
    if big.norm() == 0.0 {
        return (big, big);
    }
    (big, (a * d - b * c) / big)
}

fn qr_eigenvalues_with_norm(a: &CMatrix, frob: f64) -> Result<Vec<Complex64>> {
    let m = a.dim();
    let mut h = a.clone();
    hessenberg(&mut h);
    let floor = DEFLATION_REL * frob;
    let max_sweeps = SWEEPS_PER_DIM * m.max(1);
    let mut eig = Vec::with_capacity(m);
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = m;
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(m);

    while hi > 0 {
        let last = hi - 1;
        if last == 0 {
            eig.push(h[(0, 0)]);
            break;
        }
        let mut l = last;
        while l > 0 {
            let s = h[(l, l - 1)].norm();
            if s <= f64::EPSILON * (h[(l - 1, l - 1)].norm() + h[(l, l)].norm()) || s <= floor {
                h[(l, l - 1)] = zero();
                break;
            }
            l -= 1;
        }
        if l == last {
            eig.push(h[(last, last)]);
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if l + 1 == last {
            let (e1, e2) = eig2(h[(l, l)], h[(l, last)], h[(last, l)], h[(last, last)]);
            eig.push(e1);
            eig.push(e2);
            hi -= 2;
            since_deflation = 0;
            continue;
        }

        sweeps += 1;
        since_deflation += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence {
                sweeps: max_sweeps,
                partial: eig,
            });
        }
        let d = h[(last, last)];
        let mu = if since_deflation.is_multiple_of(10) {
            // exceptional shift to break cycles
            d + Complex64::new(0.75 * h[(last, last - 1)].norm(), 0.0)
        } else {
            let (e1, e2) = eig2(
                h[(last - 1, last - 1)],
                h[(last - 1, last)],
                h[(last, last - 1)],
                d,
            );
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };

        for k in l..=last {
            h[(k, k)] -= mu;
        }
        rot.clear();
        for k in l..last {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (1.0, zero())
            } else if x.norm() == 0.0 {
                (0.0, y.conj() / y.norm())
            } else {
                (x.norm() / r, (x / x.norm()) * y.conj() / r)
            };
            for j in k..=last {
                let u = h[(k, j)];
                let w = h[(k + 1, j)];
                h[(k, j)] = c * u + s * w;
                h[(k + 1, j)] = -s.conj() * u + c * w;
            }
            rot.push((c, s));
        }
        for (t, &(c, s)) in rot.iter().enumerate() {
            let k = l + t;
            for i in l..=(k + 1).min(last) {
                let u = h[(i, k)];
                let w = h[(i, k + 1)];
                h[(i, k)] = c * u + s.conj() * w;
                h[(i, k + 1)] = -s * u + c * w;
            }
        }
        for k in l..=last {
            h[(k, k)] += mu;
        }
    }
    Ok(eig)
}

/// Dominant eigenvalue modulus by power iteration.
pub fn power_iteration_radius(a: &CMatrix, max_iter: usize, tol: f64) -> f64 {
    let n = a.dim();
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 / (i + 1) as f64, 0.0))
        .collect();
    let norm = vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= norm);
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        let w = a.mul_vec(&v);
        let next = vec_norm(&w);
        if next == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|z| z / next).collect();
        if (next - estimate).abs() <= tol * next {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Eigenvector for an approximate eigenvalue by inverse iteration.
pub fn inverse_iteration(a: &CMatrix, lambda: Complex64, steps: usize) -> Option<Vec<Complex64>> {
    let n = a.dim();
    let scale = a.frobenius_norm().max(1.0);
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= lambda + Complex64::new(1e-10 * scale, 0.0);
    }
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0, 0.1 * i as f64))
        .collect();
    for _ in 0..steps {
        let w = shifted.solve(&v)?;
        let norm = vec_norm(&w);
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        v = w.into_iter().map(|z| z / norm).collect();
    }
    Some(v)
}

/// `{φ'(x₀)ⁿ : 1 ≤ n ≤ n_cut} ∪ {0, 1}`, duplicates removed.
pub fn predicted_spectrum(map: &PolyMap, x0: f64, n_cut: usize) -> Result<Vec<Complex64>> {
    let lambda = map.derivative().eval(x0);
    predicted_from_derivative(lambda, n_cut)
}

pub fn predicted_from_derivative(lambda: f64, n_cut: usize) -> Result<Vec<Complex64>> {
    if lambda.is_nan() || lambda.abs() >= 1.0 {
        return Err(Error::Precondition(format!(
            "|φ'(x₀)| = {} but a Riesz endomorphism needs |φ'(x₀)| < 1 at its fixed point",
            lambda.abs()
        )));
    }
    let mut out: Vec<Complex64> = Vec::with_capacity(n_cut + 2);
    let mut push = |z: f64| {
        let z = Complex64::new(z, 0.0);
        if !out.contains(&z) {
            out.push(z);
        }
    };
    let mut p = 1.0;
    for _ in 0..n_cut {
        p *= lambda;
        push(p);
    }
    push(0.0);
    push(1.0);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub predicted_index: usize,
    pub computed_index: usize,
    /// `|computed - predicted| / |predicted|`.
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityRow {
    pub predicted_index: usize,
    pub value: Complex64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub tol: f64,
    pub computed: Vec<Complex64>,
    pub predicted: Vec<Complex64>,
    pub matched_pairs: Vec<MatchedPair>,
    pub max_mismatch: f64,
    pub multiplicity_table: Vec<MultiplicityRow>,
    /// Nonzero predicted values with no computed eigenvalue within tolerance.
    pub unmatched_predicted: Vec<usize>,
    /// Nonzero predicted values seen more than once.
    pub multiplicity_violations: Vec<usize>,
    /// Computed eigenvalues that are neither matched nor within `tol` of 0.
    pub unexplained_computed: Vec<usize>,
    /// Computed eigenvalues within `tol` of 0 (compared by count only).
    pub zero_count: usize,
    pub valid: bool,
}

impl SpectrumReport {
    /// Predicted index matched to each computed eigenvalue.
    pub fn matched_index_of(&self, computed_index: usize) -> Option<usize> {
        self.matched_pairs
            .iter()
            .find(|p| p.computed_index == computed_index)
            .map(|p| p.predicted_index)
    }

    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(["re", "im", "matched_predicted_index"]);
        for (i, z) in self.computed.iter().enumerate() {
            csv.push([
                format_f64(z.re),
                format_f64(z.im),
                self.matched_index_of(i)
                    .map(|k| k.to_string())
                    .unwrap_or_default(),
            ]);
        }
        csv
    }
}

/// Greedy nearest matching of the nonzero predicted values (modulus above
/// `tol`) against the computed ones, with relative tolerance `tol`.
pub fn compare(computed: &[Complex64], predicted: &[Complex64], tol: f64) -> SpectrumReport {
    let mut used = vec![false; computed.len()];
    let mut matched_pairs = Vec::new();
    let mut unmatched_predicted = Vec::new();
    let mut multiplicity_table = Vec::new();
    let mut multiplicity_violations = Vec::new();

    for (pi, p) in predicted.iter().enumerate() {
        if p.norm() <= tol {
            continue;
        }
        let radius = tol * p.norm();
        let count = computed
            .iter()
            .filter(|c| (*c - p).norm() <= radius)
            .count();
        multiplicity_table.push(MultiplicityRow {
            predicted_index: pi,
            value: *p,
            count,
        });
        if count > 1 {
            multiplicity_violations.push(pi);
        }
        let nearest = computed
            .iter()
            .enumerate()
            .filter(|(ci, _)| !used[*ci])
            .min_by(|a, b| (a.1 - p).norm().total_cmp(&(b.1 - p).norm()));
        match nearest {
            Some((ci, c)) if (c - p).norm() <= radius => {
                used[ci] = true;
                matched_pairs.push(MatchedPair {
                    predicted_index: pi,
                    computed_index: ci,
                    rel_error: (c - p).norm() / p.norm(),
                });
            }
            _ => unmatched_predicted.push(pi),
        }
    }

    let zero_count = computed.iter().filter(|c| c.norm() <= tol).count();
    let unexplained_computed = computed
        .iter()
        .enumerate()
        .filter(|(ci, c)| !used[*ci] && c.norm() > tol)
        .map(|(ci, _)| ci)
        .collect();
    let max_mismatch = matched_pairs
        .iter()
        .map(|p| p.rel_error)
        .fold(0.0, f64::max);
    let valid = unmatched_predicted.is_empty() && multiplicity_violations.is_empty();
    SpectrumReport {
        tol,
        computed: computed.to_vec(),
        predicted: predicted.to_vec(),
        matched_pairs,
        max_mismatch,
        multiplicity_table,
        unmatched_predicted,
        multiplicity_violations,
        unexplained_computed,
        zero_count,
        valid,
    }
}
