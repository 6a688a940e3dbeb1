//! Elephant polynomials, their λ coefficient table, and the exact walk laws on
//! ℤ₂ and ℤ_L that they encode.
//!
//! Monomial coefficients of `R_n` grow like `2^n` with alternating signs, so
//! Horner evaluation loses all precision for large `n` on `[-1, 1]`. The
//! numerically stable evaluator [`stable_eval`] writes `R_n(cos t)` as the
//! characteristic function of an elephant walk,
//! `R_n(x) = Σ_k P(k plus steps) · T_{|2k-n|}(x)`, a convex combination of
//! Chebyshev polynomials that is bounded by 1 on `[-1, 1]`.

use statrs::function::factorial::ln_binomial;
use thiserror::Error;

/// Largest degree accepted by [`lambda_table`].
pub const LAMBDA_CAP: usize = 500;

/// Log-domain slack allowed when checking the λ bounds.
pub const LOG_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElephantError {
    #[error("alpha = {0} is outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("p = {0} is outside [0, 1]")]
    InvalidMemory(f64),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("degree {n} exceeds the cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("cycle length must be at least 3, got {0}")]
    CycleTooShort(u32),
    #[error("x = {0} is outside (-1, 1)")]
    OutsideInterval(f64),
    #[error("no entry λ_({n},{k})")]
    MissingEntry { n: usize, k: usize },
}

/// `R_n` in the monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ElephantPoly {
    pub n: usize,
    pub alpha: f64,
    /// `coeffs[i]` multiplies `x^i`; length `n + 1`.
    pub coeffs: Vec<f64>,
}

impl ElephantPoly {
    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `Σ |c_i x^i|`, the scale of the rounding error in [`Self::eval`].
    pub fn condition(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x.abs() + c.abs())
    }

    /// Whether every coefficient of the wrong parity is exactly zero.
    pub fn has_parity(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(i, c)| (i + self.n) % 2 == 0 || *c == 0.0)
    }

    fn next(&self) -> ElephantPoly {
        let n = self.n;
        let c = &self.coeffs;
        let a = self.alpha / n as f64;
        // d = R_n', e = (1 - x^2) R_n'.
        let d: Vec<f64> = (0..n).map(|i| (i + 1) as f64 * c[i + 1]).collect();
        let mut out = vec![0.0; n + 2];
        for i in 0..=n + 1 {
            let shifted = if i >= 1 { c[i - 1] } else { 0.0 };
            let di = d.get(i).copied().unwrap_or(0.0);
            let dm = if i >= 2 { d.get(i - 2).copied().unwrap_or(0.0) } else { 0.0 };
            out[i] = shifted - a * (di - dm);
        }
        ElephantPoly { n: n + 1, alpha: self.alpha, coeffs: out }
    }
}

/// `R_1, ..., R_{n_max}` from the recursion.
pub fn poly_sequence(alpha: f64, n_max: usize) -> Result<Vec<ElephantPoly>, ElephantError> {
    if n_max == 0 {
        return Err(ElephantError::ZeroDegree);
    }
    if !alpha.is_finite() {
        return Err(ElephantError::InvalidAlpha(alpha));
    }
    let mut out = Vec::with_capacity(n_max);
    out.push(ElephantPoly { n: 1, alpha, coeffs: vec![0.0, 1.0] });
    for _ in 1..n_max {
        let next = out.last().expect("nonempty").next();
        assert!(next.has_parity(), "R_{} broke parity", next.n);
        out.push(next);
    }
    Ok(out)
}

/// `λ_{n,k}` for `1 ≤ n ≤ n_max`, `0 ≤ k ≤ ⌊n/2⌋`.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaTable {
    pub alpha: f64,
    /// `rows[n - 1][k]`, linear recursion.
    pub rows: Vec<Vec<f64>>,
    /// `log_rows[n - 1][k]`, the same recursion run through log-sum-exp.
    /// `-inf` marks an exact zero (only when `α = 0` and `k ≥ 1`).
    pub log_rows: Vec<Vec<f64>>,
}

impl LambdaTable {
    pub fn n_max(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, n: usize, k: usize) -> Option<f64> {
        self.rows.get(n.checked_sub(1)?)?.get(k).copied()
    }

    pub fn log_get(&self, n: usize, k: usize) -> Option<f64> {
        self.log_rows.get(n.checked_sub(1)?)?.get(k).copied()
    }

    pub fn row(&self, n: usize) -> Option<&[f64]> {
        Some(self.rows.get(n.checked_sub(1)?)?.as_slice())
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Fills the λ table from its two-term recursion.
pub fn lambda_table(alpha: f64, n_max: usize) -> Result<LambdaTable, ElephantError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ElephantError::InvalidAlpha(alpha));
    }
    if n_max == 0 {
        return Err(ElephantError::ZeroDegree);
    }
    if n_max > LAMBDA_CAP {
        return Err(ElephantError::CapExceeded { n: n_max, cap: LAMBDA_CAP });
    }
    let mut rows = vec![vec![1.0]];
    let mut log_rows = vec![vec![0.0]];
    let ln_alpha = alpha.ln();
    for n in 1..n_max {
        let nf = n as f64;
        let prev = &rows[n - 1];
        let lprev = &log_rows[n - 1];
        let width = (n + 1) / 2 + 1;
        let mut row = Vec::with_capacity(width);
        let mut lrow = Vec::with_capacity(width);
        for k in 0..width {
            let stay = 1.0 + 2.0 * alpha * k as f64 / nf;
            let mut v = 0.0;
            let mut lv = f64::NEG_INFINITY;
            if let Some(&p) = prev.get(k) {
                v += stay * p;
                lv = lprev[k] + stay.ln();
            }
            if k >= 1 {
                let shift = 1.0 - 2.0 * (k - 1) as f64 / nf;
                v += alpha * shift * prev[k - 1];
                lv = log_add(lv, ln_alpha + shift.ln() + lprev[k - 1]);
            }
            row.push(v);
            lrow.push(lv);
        }
        rows.push(row);
        log_rows.push(lrow);
    }
    Ok(LambdaTable { alpha, rows, log_rows })
}

/// Outcome of checking `e^{-(1-α)n/(3+α)} C(n,2k) α^k ≤ λ_{n,k} ≤ C(n,2k) α^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaBoundReport {
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    pub lower: f64,
    pub upper: f64,
    pub log_lambda: f64,
    pub log_lower: f64,
    pub log_upper: f64,
    /// `log λ - log lower`; nonnegative when the lower bound holds.
    pub lower_slack: f64,
    /// `log upper - log λ`; nonnegative when the upper bound holds.
    pub upper_slack: f64,
    pub pass: bool,
}

fn ln_choose(n: usize, k: usize) -> f64 {
    if k == 0 || k == n {
        0.0
    } else {
        ln_binomial(n as u64, k as u64)
    }
}

/// Evaluates both λ bounds in the log domain.
pub fn lambda_bounds_check(table: &LambdaTable, n: usize, k: usize) -> Result<LambdaBoundReport, ElephantError> {
    let lambda = table.get(n, k).ok_or(ElephantError::MissingEntry { n, k })?;
    let log_lambda = table.log_get(n, k).ok_or(ElephantError::MissingEntry { n, k })?;
    let alpha = table.alpha;
    let log_upper = if k == 0 { 0.0 } else { ln_choose(n, 2 * k) + k as f64 * alpha.ln() };
    let log_lower = log_upper - (1.0 - alpha) * n as f64 / (3.0 + alpha);
    let (lower_slack, upper_slack) = if log_upper == f64::NEG_INFINITY {
        // α = 0 and k ≥ 1: λ and both bounds vanish.
        let zero = if lambda == 0.0 { 0.0 } else { f64::NEG_INFINITY };
        (zero, zero)
    } else {
        (log_lambda - log_lower, log_upper - log_lambda)
    };
    let tol = LOG_TOLERANCE * log_upper.abs().max(1.0);
    Ok(LambdaBoundReport {
        n,
        k,
        lambda,
        lower: log_lower.exp(),
        upper: log_upper.exp(),
        log_lambda,
        log_lower,
        log_upper,
        lower_slack,
        upper_slack,
        pass: lower_slack >= -tol && upper_slack >= -tol && lambda >= 0.0,
    })
}

/// `Σ (-1)^k λ_{n,k} x^{n-2k} (1-x²)^k`.
pub fn basis_eval(table: &LambdaTable, n: usize, x: f64) -> Result<f64, ElephantError> {
    let row = table.row(n).ok_or(ElephantError::MissingEntry { n, k: 0 })?;
    let y = 1.0 - x * x;
    Ok(row
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * l * x.powi((n - 2 * k) as i32) * y.powi(k as i32)
        })
        .sum())
}

/// `Σ λ_{n,k} |x|^{n-2k} |1-x²|^k`, the scale of the rounding error in
/// [`basis_eval`].
pub fn basis_condition(table: &LambdaTable, n: usize, x: f64) -> Result<f64, ElephantError> {
    let row = table.row(n).ok_or(ElephantError::MissingEntry { n, k: 0 })?;
    let y = (1.0 - x * x).abs();
    Ok(row.iter().enumerate().map(|(k, l)| l * x.abs().powi((n - 2 * k) as i32) * y.powi(k as i32)).sum())
}

/// Law of the number of plus steps of an elephant walk with reinforcement
/// `α ∈ [-1, 1]`: the first step is ±1 with probability 1/2 each, and step
/// `m + 1` is plus with probability `(1-α)/2 + α·(plus count)/m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevMixture {
    pub alpha: f64,
    pub n: usize,
    /// `weights[k] = P(k plus steps among n)`.
    pub weights: Vec<f64>,
}

impl ChebyshevMixture {
    pub fn new(alpha: f64, n: usize) -> Result<Self, ElephantError> {
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(ElephantError::InvalidAlpha(alpha));
        }
        if n == 0 {
            return Err(ElephantError::ZeroDegree);
        }
        let mut mix = Self { alpha, n: 1, weights: vec![0.5, 0.5] };
        for _ in 1..n {
            mix.advance();
        }
        Ok(mix)
    }

    /// Moves from `R_n` to `R_{n+1}`.
    pub fn advance(&mut self) {
        let m = self.n;
        let mf = m as f64;
        let mut next = vec![0.0; m + 2];
        for (k, &p) in self.weights.iter().enumerate() {
            let up = ((1.0 - self.alpha) / 2.0 + self.alpha * k as f64 / mf).clamp(0.0, 1.0);
            next[k + 1] += p * up;
            next[k] += p * (1.0 - up);
        }
        self.weights = next;
        self.n += 1;
    }

    /// `R_n(x)` as the mixture `Σ_k w_k T_{|2k-n|}(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n as i64;
        self.weights.iter().enumerate().map(|(k, w)| w * chebyshev_t((2 * k as i64 - n).unsigned_abs(), x)).sum()
    }
}

/// Chebyshev polynomial of the first kind.
pub fn chebyshev_t(m: u64, x: f64) -> f64 {
    let mf = m as f64;
    if x.abs() <= 1.0 {
        (mf * x.acos()).cos()
    } else {
        let v = (mf * x.abs().acosh()).cosh();
        if x < 0.0 && m % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

/// `R_n(x)` through the Chebyshev mixture; accurate to a few ulps on `[-1, 1]`.
pub fn stable_eval(alpha: f64, n: usize, x: f64) -> Result<f64, ElephantError> {
    Ok(ChebyshevMixture::new(alpha, n)?.eval(x))
}

/// Characteristic function `E e^{itS_n}` of the elephant walk with memory `p`.
pub fn erw_charfn(p: f64, n: usize, t: f64) -> Result<f64, ElephantError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ElephantError::InvalidMemory(p));
    }
    stable_eval(2.0 * p - 1.0, n, t.cos())
}

/// `2P(S_n = 0) - 1` for the walk on ℤ₂ with uniform μ, and its sandwich.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReturnGap {
    pub n: usize,
    pub value: f64,
    /// `e^{-2(1-α)m/(3+α)} α^m` for `n = 2m`, 0 for odd `n`.
    pub lower: f64,
    /// `α^m` for `n = 2m`, 0 for odd `n`.
    pub upper: f64,
    pub pass: bool,
}

/// `λ_{2m,m}` when `n = 2m`, exactly 0 when `n` is odd.
pub fn z2_return_gap(alpha: f64, n: usize) -> Result<ReturnGap, ElephantError> {
    if n == 0 {
        return Err(ElephantError::ZeroDegree);
    }
    if n % 2 == 1 {
        lambda_table(alpha, 1)?;
        return Ok(ReturnGap { n, value: 0.0, lower: 0.0, upper: 0.0, pass: true });
    }
    let m = n / 2;
    let table = lambda_table(alpha, n)?;
    let report = lambda_bounds_check(&table, n, m)?;
    let upper = alpha.powi(m as i32);
    let lower = (-2.0 * (1.0 - alpha) * m as f64 / (3.0 + alpha)).exp() * upper;
    Ok(ReturnGap { n, value: report.lambda, lower, upper, pass: report.pass })
}

/// Exact law of `S_n` on ℤ_L with `μ(±1) = 1/2` and identity transforms,
/// by real Fourier inversion. Entry `m` is `P(S_n = m)`.
pub fn cycle_distribution(alpha: f64, l: u32, n: usize) -> Result<Vec<f64>, ElephantError> {
    if l < 3 {
        return Err(ElephantError::CycleTooShort(l));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ElephantError::InvalidAlpha(alpha));
    }
    let mix = ChebyshevMixture::new(alpha, n)?;
    let lf = l as f64;
    let chars: Vec<f64> =
        (0..l).map(|k| mix.eval((2.0 * std::f64::consts::PI * k as f64 / lf).cos())).collect();
    Ok((0..l as u64)
        .map(|m| {
            let s: f64 = chars
                .iter()
                .enumerate()
                .map(|(k, r)| r * (2.0 * std::f64::consts::PI * ((k as u64 * m) % l as u64) as f64 / lf).cos())
                .sum();
            s / lf
        })
        .collect())
}

/// Outcome of `|R_n(x)| ≤ |x|^{(1-α)n/8} + 5e^{-3(1-α)n/280}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayReport {
    pub alpha: f64,
    pub n: usize,
    pub x: f64,
    /// `|R_n(x)|` from the stable mixture.
    pub value: f64,
    /// The same quantity from the λ basis, for comparison.
    pub basis_value: Option<f64>,
    pub bound: f64,
    /// `bound - value`.
    pub slack: f64,
    pub pass: bool,
}

pub fn decay_bound_value(alpha: f64, n: usize, x: f64) -> f64 {
    let nf = n as f64;
    x.abs().powf((1.0 - alpha) * nf / 8.0) + 5.0 * (-3.0 * (1.0 - alpha) * nf / 280.0).exp()
}

/// Checks the decay bound at one `(α, n, x)`.
pub fn decay_bound_check(alpha: f64, n: usize, x: f64) -> Result<DecayReport, ElephantError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(ElephantError::InvalidAlpha(alpha));
    }
    if !(x > -1.0 && x < 1.0) {
        return Err(ElephantError::OutsideInterval(x));
    }
    let value = stable_eval(alpha, n, x)?.abs();
    let basis_value = if n <= LAMBDA_CAP { Some(basis_eval(&lambda_table(alpha, n)?, n, x)?.abs()) } else { None };
    let bound = decay_bound_value(alpha, n, x);
    Ok(DecayReport { alpha, n, x, value, basis_value, bound, slack: bound - value, pass: value <= bound })
}

/// [`decay_bound_check`] for every `n ≤ n_max` and every `x` in `xs`, reusing
/// one mixture per `α`. Reports are ordered by `n`, then by `x`.
pub fn decay_grid(alpha: f64, n_max: usize, xs: &[f64]) -> Result<Vec<DecayReport>, ElephantError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(ElephantError::InvalidAlpha(alpha));
    }
    if let Some(&x) = xs.iter().find(|x| !(**x > -1.0 && **x < 1.0)) {
        return Err(ElephantError::OutsideInterval(x));
    }
    let table = lambda_table(alpha, n_max.min(LAMBDA_CAP))?;
    let mut mix = ChebyshevMixture::new(alpha, 1)?;
    let mut out = Vec::with_capacity(n_max * xs.len());
    for n in 1..=n_max {
        if n > 1 {
            mix.advance();
        }
        for &x in xs {
            let value = mix.eval(x).abs();
            let basis_value = if n <= table.n_max() { Some(basis_eval(&table, n, x)?.abs()) } else { None };
            let bound = decay_bound_value(alpha, n, x);
            out.push(DecayReport { alpha, n, x, value, basis_value, bound, slack: bound - value, pass: value <= bound });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn first_polynomials() {
        let alpha = 0.3;
        let polys = poly_sequence(alpha, 3).unwrap();
        assert_eq!(polys[0].coeffs, vec![0.0, 1.0]);
        assert!(close(polys[1].coeffs[0], -alpha, 1e-15));
        assert!(close(polys[1].coeffs[2], 1.0 + alpha, 1e-15));
        assert!(close(polys[1].eval(0.0), -alpha, 1e-15));
        for p in &polys {
            assert!(p.has_parity());
            assert_eq!(p.coeffs.len(), p.n + 1);
        }
    }

    #[test]
    fn zero_alpha_gives_monomials() {
        for p in poly_sequence(0.0, 12).unwrap() {
            for (i, c) in p.coeffs.iter().enumerate() {
                assert_eq!(*c, if i == p.n { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn lambda_small_entries() {
        let a = 0.5;
        let t = lambda_table(a, 6).unwrap();
        assert!(close(t.get(2, 1).unwrap(), a, 1e-15));
        assert!(close(t.get(3, 1).unwrap(), a * (2.0 + a), 1e-15));
        assert!(close(t.get(4, 2).unwrap(), a * a * (2.0 + a) / 3.0, 1e-15));
        assert!(close(t.get(4, 2).unwrap(), 0.208_333_333_333_333_3, 1e-15));
        for n in 1..=6 {
            assert_eq!(t.get(n, 0), Some(1.0));
            assert_eq!(t.row(n).unwrap().len(), n / 2 + 1);
            for k in 0..=n / 2 {
                assert!(close(t.log_get(n, k).unwrap(), t.get(n, k).unwrap().ln(), 1e-13));
            }
        }
        assert_eq!(t.get(4, 3), None);
    }

    #[test]
    fn alpha_one_is_binomial_and_tight() {
        let t = lambda_table(1.0, 60).unwrap();
        for n in 1..=60 {
            for k in 0..=n / 2 {
                let r = lambda_bounds_check(&t, n, k).unwrap();
                assert!(r.pass);
                assert!(r.lower_slack.abs() < 1e-10 && r.upper_slack.abs() < 1e-10, "{r:?}");
            }
        }
        assert_eq!(t.get(20, 5), Some(184_756.0));
    }

    #[test]
    fn bounds_hold_on_grid() {
        for i in 0..=10 {
            let alpha = i as f64 / 10.0;
            let t = lambda_table(alpha, 200).unwrap();
            for n in 1..=200 {
                for k in 0..=n / 2 {
                    let r = lambda_bounds_check(&t, n, k).unwrap();
                    assert!(r.pass, "{r:?}");
                    assert!(alpha == 0.0 && k > 0 || r.lambda > 0.0);
                }
            }
        }
    }

    #[test]
    fn bound_example_four_two() {
        let t = lambda_table(0.5, 4).unwrap();
        let r = lambda_bounds_check(&t, 4, 2).unwrap();
        assert!(r.pass);
        assert!(close(r.upper, 0.25, 1e-14));
        assert!(close(r.lower, (-2.0f64 / 3.5).exp() * 0.25, 1e-14));
        assert!(close(r.lower, 0.141_179_530_5, 1e-10));
        let r0 = lambda_bounds_check(&t, 4, 0).unwrap();
        assert!(r0.pass && r0.upper == 1.0);
    }

    #[test]
    fn zero_alpha_bounds() {
        let t = lambda_table(0.0, 10).unwrap();
        assert_eq!(t.get(10, 3), Some(0.0));
        assert!(lambda_bounds_check(&t, 10, 3).unwrap().pass);
        assert!(lambda_bounds_check(&t, 10, 0).unwrap().pass);
    }

    #[test]
    fn basis_agrees_with_stable_to_n_200() {
        for &alpha in &[0.1, 0.5, 0.9, 1.0] {
            let t = lambda_table(alpha, 200).unwrap();
            for n in 1..=200 {
                for i in -20..=20 {
                    let x = i as f64 / 20.0;
                    let s = stable_eval(alpha, n, x).unwrap();
                    let tol = 1e-9 * s.abs() + 1e-13 + 8.0 * f64::EPSILON * basis_condition(&t, n, x).unwrap();
                    assert!(close(basis_eval(&t, n, x).unwrap(), s, tol), "alpha={alpha} n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn evaluators_agree_where_conditioned() {
        for &alpha in &[0.1, 0.5, 0.9] {
            let t = lambda_table(alpha, 40).unwrap();
            let polys = poly_sequence(alpha, 40).unwrap();
            for p in &polys {
                for i in -10..=10 {
                    let x = i as f64 / 10.0;
                    let s = stable_eval(alpha, p.n, x).unwrap();
                    let tol = 1e-9 * s.abs().max(1e-300) + 1e-12 + 4.0 * f64::EPSILON * p.condition(x);
                    assert!(close(p.eval(x), s, tol), "n={} x={x}", p.n);
                    assert!(close(basis_eval(&t, p.n, x).unwrap(), s, tol), "n={} x={x}", p.n);
                }
            }
        }
    }

    #[test]
    fn basis_endpoints() {
        let t = lambda_table(0.7, 30).unwrap();
        for n in 1..=30 {
            assert!(close(basis_eval(&t, n, 1.0).unwrap(), 1.0, 1e-15));
            if n % 2 == 0 {
                let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(basis_eval(&t, n, 0.0).unwrap(), sign * t.get(n, n / 2).unwrap());
            }
        }
    }

    #[test]
    fn chebyshev_at_alpha_one() {
        for n in [1usize, 2, 7, 50, 200, 500] {
            let mix = ChebyshevMixture::new(1.0, n).unwrap();
            for i in 0..50 {
                let theta = i as f64 * 0.0637;
                assert!(close(mix.eval(theta.cos()), (n as f64 * theta).cos(), 1e-9));
            }
        }
    }

    #[test]
    fn charfn_examples() {
        for n in [1, 5, 40] {
            for p in [0.0, 0.3, 0.8, 1.0] {
                assert!(close(erw_charfn(p, n, 0.0).unwrap(), 1.0, 1e-12));
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!(close(erw_charfn(p, n, std::f64::consts::PI).unwrap(), sign, 1e-12));
            }
            for t in [0.3, 1.1, 2.5] {
                assert!(close(erw_charfn(0.5, n, t).unwrap(), t.cos().powi(n as i32), 1e-12));
            }
        }
        assert!(erw_charfn(1.2, 3, 0.0).is_err());
    }

    #[test]
    fn negative_alpha_matches_recursion() {
        let polys = poly_sequence(-0.6, 12).unwrap();
        for p in &polys {
            for x in [-0.9, -0.2, 0.4, 0.95] {
                assert!(close(p.eval(x), stable_eval(-0.6, p.n, x).unwrap(), 1e-12));
            }
        }
    }

    #[test]
    fn return_gap_examples() {
        let g = z2_return_gap(0.5, 2).unwrap();
        assert!(close(g.value, 0.5, 1e-15) && g.pass);
        let g = z2_return_gap(0.5, 4).unwrap();
        assert!(close(g.value, 0.208_333_333_333_333_3, 1e-15));
        assert!(g.lower <= g.value && g.value <= g.upper);
        assert_eq!(z2_return_gap(0.5, 7).unwrap().value, 0.0);
    }

    #[test]
    fn cycle_examples() {
        let a = 0.4;
        let d = cycle_distribution(a, 3, 2).unwrap();
        assert!(close(d[0], (1.0 - a) / 2.0, 1e-14));
        for l in 3..9 {
            let d = cycle_distribution(a, l, 1).unwrap();
            for (m, p) in d.iter().enumerate() {
                let want = if m == 1 || m == l as usize - 1 { 0.5 } else { 0.0 };
                assert!(close(*p, want, 1e-14), "L={l} m={m}");
            }
        }
        assert_eq!(cycle_distribution(a, 2, 3), Err(ElephantError::CycleTooShort(2)));
    }

    #[test]
    fn cycle_is_a_distribution() {
        for l in 3..12u32 {
            for n in [1usize, 2, 9, 60] {
                let d = cycle_distribution(0.8, l, n).unwrap();
                assert!(d.iter().all(|p| *p >= -1e-10));
                assert!(close(d.iter().sum(), 1.0, 1e-12));
            }
        }
    }

    #[test]
    fn decay_grid_matches_pointwise() {
        let xs = [-0.7, 0.0, 0.3];
        let grid = decay_grid(0.4, 30, &xs).unwrap();
        assert_eq!(grid.len(), 90);
        for r in grid.iter().filter(|r| r.n % 7 == 0) {
            let single = decay_bound_check(0.4, r.n, r.x).unwrap();
            assert!((single.value - r.value).abs() < 1e-15 && single.pass == r.pass);
        }
    }

    #[test]
    fn decay_examples() {
        let r = decay_bound_check(0.5, 40, 0.0).unwrap();
        assert!(r.pass);
        assert!(close(r.value, lambda_table(0.5, 40).unwrap().get(40, 20).unwrap(), 1e-14));
        let r = decay_bound_check(0.0, 30, 0.7).unwrap();
        assert!(close(r.value, 0.7f64.powi(30), 1e-14) && r.pass);
        assert!(decay_bound_check(0.5, 10, 1.0).is_err());
        assert!(decay_bound_check(1.0, 10, 0.5).is_err());
    }
}
