//! Partial sums of Lambda-weighted Rankin-Selberg coefficients, main-term
//! comparison, split-prime restrictions, convergence diagnostics, and
//! error-curve fitting.
//!
//! The central quantity is S(x) = sum_{n<=x} Lambda(n) a(n). For a
//! twisted-equivalent pair it tracks the main term x^{1+i*tau0}/(1+i*tau0);
//! otherwise it is o(x). The observed errors are fitted to the decay model
//! err = x * exp(-c * sqrt(log x)); the fitted c is purely descriptive.

use num_complex::Complex64;
use serde::Serialize;

use crate::arithmetic::{CompensatedComplexSum, CompensatedSum, PrimeTable};
use crate::error::{Error, Result};
use crate::fields::splits_completely_in_compositum;
use crate::rankin::{rs_bc_coefficient, rs_coefficient, CoefficientStream};
use crate::reps::BaseChangedRep;

/// sum_{n<=x} Lambda(n) a(n), compensated.
pub fn partial_sum(stream: &CoefficientStream, x: u64) -> Result<Complex64> {
    if x > stream.limit() {
        return Err(Error::Capacity(format!(
            "partial sum at {x} exceeds stream limit {}",
            stream.limit()
        )));
    }
    let mut acc = CompensatedComplexSum::new();
    for e in stream.upto(x) {
        acc.add(e.value * (e.p as f64).ln());
    }
    finite(acc.value())
}

/// sum_{n<=x} (1 - n/x) Lambda(n) a(n).
pub fn weighted_partial_sum(stream: &CoefficientStream, x: u64) -> Result<Complex64> {
    if x > stream.limit() {
        return Err(Error::Capacity(format!(
            "weighted partial sum at {x} exceeds stream limit {}",
            stream.limit()
        )));
    }
    let xf = x as f64;
    let mut acc = CompensatedComplexSum::new();
    for e in stream.upto(x) {
        let weight = 1.0 - e.n as f64 / xf;
        acc.add(e.value * ((e.p as f64).ln() * weight));
    }
    finite(acc.value())
}

/// Main term x^{1+i*tau0} / (1+i*tau0).
pub fn main_term(x: f64, tau0: f64) -> Complex64 {
    let phase = Complex64::new(0.0, tau0 * x.ln()).exp();
    x * phase / Complex64::new(1.0, tau0)
}

/// Which splitting restriction to apply to the prime sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitRestriction {
    /// Primes splitting completely in the (shared) field E; k = 1 terms only.
    FieldE,
    /// Primes splitting completely in the compositum EF; k = 1 terms only.
    CompositumEF,
}

/// sum over completely split p <= x of (log p) a(p).
pub fn split_restricted_sum(
    a: &BaseChangedRep,
    b: &BaseChangedRep,
    x: u64,
    mode: SplitRestriction,
    primes: &PrimeTable,
) -> Result<Complex64> {
    if primes.limit() < x {
        return Err(Error::Capacity(format!(
            "prime table limit {} below x = {x}",
            primes.limit()
        )));
    }
    let mut acc = CompensatedComplexSum::new();
    match mode {
        SplitRestriction::FieldE => {
            if a.field() != b.field() {
                return Err(Error::FieldMismatch(
                    "split restriction over E needs a shared field".into(),
                ));
            }
            for &p in primes.upto(x) {
                if a.field().splits_completely(p) {
                    acc.add(rs_coefficient(a, b, p)? * (p as f64).ln());
                }
            }
        }
        SplitRestriction::CompositumEF => {
            for &p in primes.upto(x) {
                if splits_completely_in_compositum(a.field(), b.field(), p) {
                    acc.add(rs_bc_coefficient(a, b, p)? * (p as f64).ln());
                }
            }
        }
    }
    finite(acc.value())
}

/// Partial sums of the convergent series behind the higher-power control:
/// sum_p (log^2 p / p^{k f_p}) * sum_{v|p} |sum_j alpha(v,j)^k|^2, reported at
/// each cutoff P of the grid. The grid must be ascending.
pub fn hypothesis_h_partials(
    bc: &BaseChangedRep,
    k: u32,
    grid: &[u64],
    primes: &PrimeTable,
) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::Domain(format!("power k must be >= 2, got {k}")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    if let Some(&max) = grid.last() {
        if primes.limit() < max {
            return Err(Error::Capacity(format!(
                "prime table limit {} below grid end {max}",
                primes.limit()
            )));
        }
    }
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = CompensatedSum::new();
    let mut iter = primes.primes().iter().copied().peekable();
    for &cutoff in grid {
        while let Some(&p) = iter.peek() {
            if p > cutoff {
                break;
            }
            iter.next();
            if bc.field().ramified_at(p) {
                continue; // zeroed parameters contribute nothing
            }
            let sd = bc.field().splitting_data(p)?;
            let mut power_sum = Complex64::new(0.0, 0.0);
            for alpha in bc.descent().satake_at(p)? {
                power_sum += alpha.powu(sd.f as u32 * k);
            }
            let log_p = (p as f64).ln();
            let denom = (p as f64).powi((k as u64 * sd.f) as i32);
            acc.add(log_p * log_p / denom * sd.g as f64 * power_sum.norm_sqr());
        }
        out.push(acc.value());
    }
    Ok(out)
}

/// sum of |Lambda(n) a(n)| over n = p^{k f_p} <= x with k > threshold.
pub fn high_power_tail(
    a: &BaseChangedRep,
    b: &BaseChangedRep,
    x: u64,
    k_threshold: u32,
    primes: &PrimeTable,
) -> Result<f64> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(
            "high-power tail needs a shared field".into(),
        ));
    }
    if primes.limit() < x {
        return Err(Error::Capacity(format!(
            "prime table limit {} below x = {x}",
            primes.limit()
        )));
    }
    let mut acc = CompensatedSum::new();
    for &p in primes.upto(x) {
        if a.field().ramified_at(p) {
            continue;
        }
        let f = a.field().splitting_data(p)?.f;
        let mut k = k_threshold as u64 + 1;
        while let Some(n) = checked_pow(p, k * f) {
            if n > x {
                break;
            }
            let coeff = rs_coefficient(a, b, n)?;
            acc.add((coeff * (p as f64).ln()).norm());
            k += 1;
        }
    }
    Ok(acc.value())
}

fn checked_pow(p: u64, e: u64) -> Option<u64> {
    let mut n = 1u64;
    for _ in 0..e {
        n = n.checked_mul(p)?;
    }
    Some(n)
}

/// Result of fitting log(err/x) against -sqrt(log x).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorFit {
    /// Decay constant, clamped to be nonnegative.
    pub c: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual_rms: f64,
}

/// Least-squares fit of the decay model err = x * exp(-c sqrt(log x)) to
/// (x, err) samples. Needs at least 4 samples with nonzero error.
pub fn error_curve_fit(samples: &[(f64, f64)]) -> Result<ErrorFit> {
    let usable: Vec<(f64, f64)> = samples
        .iter()
        .filter(|&&(x, err)| x > 1.0 && err > 0.0 && err.is_finite())
        .map(|&(x, err)| (-(x.ln().sqrt()), (err / x).ln()))
        .collect();
    if usable.len() < 4 {
        return Err(Error::FitDegenerate(format!(
            "need at least 4 grid points with nonzero error, have {}",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let mean_u = usable.iter().map(|&(u, _)| u).sum::<f64>() / n;
    let mean_y = usable.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for &(u, y) in &usable {
        cov += (u - mean_u) * (y - mean_y);
        var += (u - mean_u) * (u - mean_u);
    }
    if var < 1e-12 {
        return Err(Error::FitDegenerate(
            "grid spans no range in sqrt(log x)".into(),
        ));
    }
    let slope = cov / var;
    let intercept = mean_y - slope * mean_u;
    let mut ss = 0.0;
    for &(u, y) in &usable {
        let r = y - (slope * u + intercept);
        ss += r * r;
    }
    Ok(ErrorFit {
        c: slope.max(0.0),
        intercept,
        residual_rms: (ss / n).sqrt(),
    })
}

/// One grid point of a partial-sum report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReportRow {
    pub x: u64,
    pub sum_re: f64,
    pub sum_im: f64,
    pub main_re: f64,
    pub main_im: f64,
    pub abs_err: f64,
}

/// Partial sums over a grid with main terms, absolute errors, and the fitted
/// decay constant. `tau0` comes from the twist detector, never from the user.
#[derive(Debug, Clone, Serialize)]
pub struct PartialSumReport {
    pub rows: Vec<ReportRow>,
    pub tau0: Option<f64>,
    pub fitted_c: Option<f64>,
    pub fit_residual: Option<f64>,
    pub metadata: Vec<(String, String)>,
}

impl PartialSumReport {
    pub fn verdict(&self) -> &'static str {
        if self.tau0.is_some() {
            "equivalent"
        } else {
            "not-equivalent"
        }
    }
}

/// Evaluate sums and main terms across a strictly increasing grid. With no
/// detected tau0 the main term is 0 (the sum itself is the error).
pub fn build_report(
    sums: &[(u64, Complex64)],
    tau0: Option<f64>,
    metadata: Vec<(String, String)>,
) -> Result<PartialSumReport> {
    if sums.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Domain(
            "report grid must be strictly increasing".into(),
        ));
    }
    let mut rows = Vec::with_capacity(sums.len());
    for &(x, sum) in sums {
        let main = match tau0 {
            Some(t) => main_term(x as f64, t),
            None => Complex64::new(0.0, 0.0),
        };
        let err = (sum - main).norm();
        if !sum.is_finite() || !err.is_finite() {
            return Err(Error::Contract(format!("non-finite report row at x = {x}")));
        }
        rows.push(ReportRow {
            x,
            sum_re: sum.re,
            sum_im: sum.im,
            main_re: main.re,
            main_im: main.im,
            abs_err: err,
        });
    }
    let fit = error_curve_fit(
        &rows
            .iter()
            .map(|r| (r.x as f64, r.abs_err))
            .collect::<Vec<_>>(),
    )
    .ok();
    Ok(PartialSumReport {
        rows,
        tau0,
        fitted_c: fit.map(|f| f.c),
        fit_residual: fit.map(|f| f.residual_rms),
        metadata,
    })
}

/// Half-decade geometric grid: the values 10^{j/2} that fall in [lo, hi],
/// with the endpoints always included.
pub fn geometric_grid(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if lo > hi {
        return out;
    }
    out.push(lo);
    let mut j = (2.0 * (lo as f64).log10()).ceil() as i64;
    loop {
        let x = 10f64.powf(j as f64 / 2.0).round() as u64;
        if x > hi {
            break;
        }
        if x > *out.last().unwrap() {
            out.push(x);
        }
        j += 1;
    }
    if *out.last().unwrap() < hi {
        out.push(hi);
    }
    out
}

fn finite(v: Complex64) -> Result<Complex64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Contract("non-finite sum".into()))
    }
}
