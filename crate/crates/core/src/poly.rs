//! Dense real polynomials in the monomial basis, plus the sup-norm brackets
//! shared by every module that needs `‖f‖_∞` on an interval.
//!
//! A bracket is `[grid max, rigorous upper bound]`: the lower end is the
//! largest value seen on a Chebyshev–Lobatto grid, the upper end adds the
//! linear-interpolation error `h²/8 · sup|f''|` on every grid cell, with
//! `sup|f''|` bounded from the coefficients of the Taylor expansion about the
//! interval midpoint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of points for sup-norm grids.
pub const DEFAULT_SUP_GRID: usize = 4096;

/// Closed real interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidMap(format!(
                "domain [{lo}, {hi}] must be a finite interval with lo < hi"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// Largest distance from `x` to a point of the interval.
    pub fn max_distance_from(&self, x: f64) -> f64 {
        (x - self.lo).abs().max((self.hi - x).abs())
    }

    /// `n` Chebyshev–Lobatto points in ascending order; both endpoints are
    /// included exactly.
    pub fn chebyshev_grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2, "grid needs at least two points");
        let (c, r) = (self.mid(), self.radius());
        let last = (n - 1) as f64;
        let mut grid: Vec<f64> = (0..n)
            .map(|i| c - r * (std::f64::consts::PI * i as f64 / last).cos())
            .collect();
        grid[0] = self.lo;
        grid[n - 1] = self.hi;
        grid
    }

    /// `n` equally spaced points including both endpoints.
    pub fn uniform_grid(&self, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![self.mid()];
        }
        let step = self.width() / (n - 1) as f64;
        let mut grid: Vec<f64> = (0..n).map(|i| self.lo + step * i as f64).collect();
        grid[n - 1] = self.hi;
        grid
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::UNIT
    }
}

/// Two-sided estimate of a nonnegative quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupBracket {
    pub lower: f64,
    pub upper: f64,
}

impl SupBracket {
    pub fn exact(v: f64) -> Self {
        SupBracket { lower: v, upper: v }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Real polynomial, coefficients in ascending degree with trailing zeros
/// trimmed. The zero polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for Poly {
    fn from(coeffs: Vec<f64>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<f64> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    pub fn identity() -> Self {
        Poly::new(vec![0.0, 1.0])
    }

    pub fn monomial(k: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `Σ |c_k| |x|^k`, the scale of the rounding error of [`Poly::eval`].
    pub fn eval_abs(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    /// Forward error bound for Horner evaluation at `x`.
    pub fn eval_error_bound(&self, x: f64) -> f64 {
        let n = self.degree();
        if n == 0 {
            return 0.0;
        }
        2.0 * (n as f64 + 1.0) * f64::EPSILON * self.eval_abs(x)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// `self ∘ inner`, by Horner's scheme over polynomials.
    pub fn compose(&self, inner: &Poly) -> Poly {
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, &c| {
            acc.mul(inner).add(&Poly::constant(c))
        })
    }

    /// The polynomial `u ↦ p(a + u)`.
    pub fn taylor_shift(&self, a: f64) -> Poly {
        self.compose(&Poly::new(vec![a, 1.0]))
    }

    /// Drops every coefficient above degree `d`; the flag reports whether any
    /// discarded coefficient was nonzero.
    pub fn truncate(&self, d: usize) -> (Poly, bool) {
        if self.coeffs.len() <= d + 1 {
            return (self.clone(), false);
        }
        let discarded = self.coeffs[d + 1..].iter().any(|&c| c != 0.0);
        (Poly::new(self.coeffs[..=d].to_vec()), discarded)
    }

    /// Multiplication with every product truncated at degree `d`.
    pub fn mul_truncated(&self, other: &Poly, d: usize) -> (Poly, bool) {
        if self.is_zero() || other.is_zero() {
            return (Poly::zero(), false);
        }
        let mut out = vec![0.0; (self.coeffs.len() + other.coeffs.len() - 1).min(d + 1)];
        let mut discarded = false;
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j <= d {
                    out[i + j] += a * b;
                } else if a * b != 0.0 {
                    discarded = true;
                }
            }
        }
        (Poly::new(out), discarded)
    }

    /// Rigorous bound on `sup |p|` over `dom` from the coefficients of the
    /// expansion about the midpoint: `Σ |q_k| ρ^k` with `q(s) = p(c + s)`.
    pub fn coefficient_bound(&self, dom: Interval) -> f64 {
        let q = self.taylor_shift(dom.mid());
        let rho = dom.radius();
        let bound = q
            .coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * rho + c.abs());
        bound * (1.0 + 4.0 * (q.coeffs.len() as f64 + 1.0) * f64::EPSILON)
    }

    /// Sup-norm bracket of `|p|` over `dom` on a Chebyshev–Lobatto grid of
    /// `grid_size` points.
    pub fn sup_bracket(&self, dom: Interval, grid_size: usize) -> SupBracket {
        let grid = dom.chebyshev_grid(grid_size);
        self.sup_bracket_on(dom, &grid)
    }

    /// Sup-norm bracket on an explicit ascending grid covering `dom`.
    pub fn sup_bracket_on(&self, dom: Interval, grid: &[f64]) -> SupBracket {
        if self.is_constant() {
            return SupBracket::exact(self.coeff(0).abs());
        }
        let first = self.derivative();
        let second = if self.degree() >= 2 {
            self.nth_derivative(2).coefficient_bound(dom)
        } else {
            0.0
        };
        let vals: Vec<f64> = grid.iter().map(|&x| self.eval(x).abs()).collect();
        let lower = vals.iter().copied().fold(0.0, f64::max);
        let mut upper = lower;
        for (w, xs) in vals.windows(2).zip(grid.windows(2)) {
            let h = xs[1] - xs[0];
            let err = self
                .eval_error_bound(xs[0])
                .max(self.eval_error_bound(xs[1]));
            let mid = 0.5 * (xs[0] + xs[1]);
            // p is monotone on the cell when p' keeps its sign there
            let monotone = first.eval(mid).abs() > first.eval_error_bound(mid) + 0.5 * h * second;
            let bump = if monotone { 0.0 } else { h * h / 8.0 * second };
            upper = upper.max(w[0].max(w[1]) + err + bump);
        }
        SupBracket { lower, upper }
    }
}
