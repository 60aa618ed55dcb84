//! Rankin-Selberg coefficients, local Euler factors, factorization checks,
//! and sparse coefficient streams.
//!
//! For two base-changed representations over the *same* cyclic extension the
//! Dirichlet coefficients are supported on prime powers p^{k*f} (f the
//! residue degree of p) and are given in descent parameters by
//!
//!   a(p^K) = g * f * (sum_j alpha_j^K) * conj(sum_i alpha'_i^K),   f | K,
//!
//! with a(p^K) = 0 when f does not divide K, exactly. For representations
//! over two different extensions E and F the convolution is *defined* through
//! the twist families of the descents:
//!
//!   a_BC(n) = sum_{i < deg E} sum_{j < deg F} a_i(n) * conj(a'_j(n)),
//!
//! where a_i is the standard coefficient of the descent twisted by the i-th
//! power of the field character. Ramified primes contribute 0 to single-field
//! streams (all parameters are zeroed at ramified places); the two-field
//! convolution keeps whatever the defining twist family produces there.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arithmetic::{factor_prime_power, CompensatedComplexSum, PrimeTable};
use crate::error::{Error, Result};
use crate::reps::{AutomorphicRepQ, BaseChangedRep};

const POLE_GUARD: f64 = 1e-14;

fn ensure_same_field(a: &BaseChangedRep, b: &BaseChangedRep) -> Result<()> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(format!(
            "representations live over different fields (conductor {} order {} vs conductor {} order {})",
            a.field().conductor(),
            a.field().degree(),
            b.field().conductor(),
            b.field().degree()
        )));
    }
    Ok(())
}

/// Power sum of Satake parameters: sum_j alpha(p,j)^K for n = p^K, and 0 at
/// non-prime-powers.
pub fn standard_coefficient(rep: &AutomorphicRepQ, n: u64) -> Result<Complex64> {
    let Some((p, k)) = factor_prime_power(n) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let mut s = Complex64::new(0.0, 0.0);
    for alpha in rep.satake_at(p)? {
        s += alpha.powu(k);
    }
    Ok(s)
}

/// Rankin-Selberg coefficient of a pair over one cyclic extension.
pub fn rs_coefficient(a: &BaseChangedRep, b: &BaseChangedRep, n: u64) -> Result<Complex64> {
    let Some((p, k)) = factor_prime_power(n) else {
        ensure_same_field(a, b)?;
        return Ok(Complex64::new(0.0, 0.0));
    };
    rs_coefficient_at(a, b, p, k)
}

/// The same coefficient addressed by (p, k) with n = p^k, usable even when
/// p^k overflows machine integers.
pub fn rs_coefficient_at(
    a: &BaseChangedRep,
    b: &BaseChangedRep,
    p: u64,
    k: u32,
) -> Result<Complex64> {
    ensure_same_field(a, b)?;
    if a.field().ramified_at(p) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let s = a.field().splitting_data(p)?;
    if !(k as u64).is_multiple_of(s.f) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut sa = Complex64::new(0.0, 0.0);
    for alpha in a.descent().satake_at(p)? {
        sa += alpha.powu(k);
    }
    let mut sb = Complex64::new(0.0, 0.0);
    for alpha in b.descent().satake_at(p)? {
        sb += alpha.powu(k);
    }
    Ok((s.g * s.f) as f64 * sa * sb.conj())
}

/// The twist family of a base-changed representation: descent tensored with
/// every power of the field character.
pub fn twist_family(bc: &BaseChangedRep) -> Result<Vec<AutomorphicRepQ>> {
    let eta = bc.field().character();
    (0..bc.field().degree())
        .map(|i| bc.descent().twist(&eta.pow(i as i64), 0.0))
        .collect()
}

/// Rankin-Selberg coefficient across two (possibly distinct) extensions:
/// the double sum of standard coefficients over both twist families, with the
/// second factor conjugated. Degrees need not be coprime; callers that care
/// about the one-pair uniqueness theory should check [`degrees_coprime`].
pub fn rs_bc_coefficient(a: &BaseChangedRep, b: &BaseChangedRep, n: u64) -> Result<Complex64> {
    if factor_prime_power(n).is_none() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut ta = Complex64::new(0.0, 0.0);
    for rep in twist_family(a)? {
        ta += standard_coefficient(&rep, n)?;
    }
    let mut tb = Complex64::new(0.0, 0.0);
    for rep in twist_family(b)? {
        tb += standard_coefficient(&rep, n)?;
    }
    Ok(ta * tb.conj())
}

/// True when the two field degrees are coprime (the pathway in which the
/// twisted-pair count is 0 or 1).
pub fn degrees_coprime(a: &BaseChangedRep, b: &BaseChangedRep) -> bool {
    crate::arithmetic::gcd(a.field().degree(), b.field().degree()) == 1
}

fn check_term(z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if (one - z).norm() < POLE_GUARD {
        return Err(Error::NumericalSingularity(POLE_GUARD));
    }
    Ok(one - z)
}

/// Local Rankin-Selberg Euler factor at an unramified p, Re s > 1:
/// prod over places of prod_{j,i} (1 - alpha_j conj(alpha'_i) p^{-f s})^{-1}.
pub fn euler_factor(
    a: &BaseChangedRep,
    b: &BaseChangedRep,
    p: u64,
    s: Complex64,
) -> Result<Complex64> {
    ensure_same_field(a, b)?;
    if s.re <= 1.0 {
        return Err(Error::ConvergenceDomain(format!(
            "euler_factor requires Re s > 1, got {}",
            s.re
        )));
    }
    let sd = a.field().splitting_data(p)?;
    if sd.e > 1 {
        return Err(Error::RamifiedPlace { p });
    }
    let u = (-s * (sd.f as f64) * (p as f64).ln()).exp();
    let pa = a.satake_at(p)?;
    let pb = b.satake_at(p)?;
    let mut place = Complex64::new(1.0, 0.0);
    for &x in &pa[0] {
        for &y in &pb[0] {
            place /= check_term(x * y.conj() * u)?;
        }
    }
    Ok(place.powu(sd.g as u32))
}

/// Local factor of the standard L-function of a base-changed representation:
/// prod over places of prod_j (1 - alpha_j p^{-f s})^{-1}.
pub fn standard_local_factor(bc: &BaseChangedRep, p: u64, s: Complex64) -> Result<Complex64> {
    let sd = bc.field().splitting_data(p)?;
    if sd.e > 1 {
        return Err(Error::RamifiedPlace { p });
    }
    let u = (-s * (sd.f as f64) * (p as f64).ln()).exp();
    let places = bc.satake_at(p)?;
    let mut place = Complex64::new(1.0, 0.0);
    for &x in &places[0] {
        place /= check_term(x * u)?;
    }
    Ok(place.powu(sd.g as u32))
}

/// Local factor over Q of a representation (zeroed parameters at ramified p
/// make the factor 1 there).
pub fn q_local_factor(rep: &AutomorphicRepQ, p: u64, s: Complex64) -> Result<Complex64> {
    let u = (-s * (p as f64).ln()).exp();
    let mut out = Complex64::new(1.0, 0.0);
    for alpha in rep.satake_at(p)? {
        out /= check_term(alpha * u)?;
    }
    Ok(out)
}

/// |L_p(s, pi over E) - prod_i L_p(s, descent tensor eta^i over Q)|.
///
/// The two sides agree identically: with eta(p) of order f and zeta running
/// over its powers, prod_i (1 - z zeta^i) = (1 - z^f)^{l/f}.
pub fn factorization_residual(bc: &BaseChangedRep, p: u64, s: Complex64) -> Result<f64> {
    let lhs = standard_local_factor(bc, p, s)?;
    let mut rhs = Complex64::new(1.0, 0.0);
    for rep in twist_family(bc)? {
        rhs *= q_local_factor(&rep, p, s)?;
    }
    Ok((lhs - rhs).norm())
}

/// Partial Dirichlet series sum_{n<=N} Lambda(n) a(n) n^{-s} of a same-field
/// pair, for Re s >= 1.1.
pub fn truncated_log_derivative(
    a: &BaseChangedRep,
    b: &BaseChangedRep,
    s: Complex64,
    n_max: u64,
    primes: &PrimeTable,
) -> Result<Complex64> {
    if s.re < 1.1 {
        return Err(Error::ConvergenceDomain(format!(
            "truncated log derivative requires Re s >= 1.1, got {}",
            s.re
        )));
    }
    if n_max < 2 {
        return Err(Error::Domain("series cutoff must be at least 2".into()));
    }
    if primes.limit() < n_max {
        return Err(Error::Domain(format!(
            "prime table limit {} below requested cutoff {n_max}",
            primes.limit()
        )));
    }
    let mut acc = CompensatedComplexSum::new();
    for &p in primes.upto(n_max) {
        let log_p = (p as f64).ln();
        let mut n = p;
        loop {
            let coeff = rs_coefficient(a, b, n)?;
            if coeff.norm() > 0.0 {
                let weight = (-s * (n as f64).ln()).exp();
                acc.add(coeff * weight * log_p);
            }
            match n.checked_mul(p) {
                Some(next) if next <= n_max => n = next,
                _ => break,
            }
        }
    }
    Ok(acc.value())
}

/// Analytic -d/ds log of the truncated Euler product prod_{p<=p_max} L_p,
/// derivative taken per local factor. Field-ramified primes are skipped,
/// matching their zero contribution on the Dirichlet side.
pub fn euler_product_log_derivative(
    a: &BaseChangedRep,
    b: &BaseChangedRep,
    s: Complex64,
    p_max: u64,
    primes: &PrimeTable,
) -> Result<Complex64> {
    ensure_same_field(a, b)?;
    if s.re <= 1.0 {
        return Err(Error::ConvergenceDomain(format!(
            "euler product requires Re s > 1, got {}",
            s.re
        )));
    }
    let mut acc = CompensatedComplexSum::new();
    for &p in primes.upto(p_max) {
        if a.field().ramified_at(p) {
            continue;
        }
        let sd = a.field().splitting_data(p)?;
        let u = (-s * (sd.f as f64) * (p as f64).ln()).exp();
        let f_log_p = sd.f as f64 * (p as f64).ln();
        let pa = a.satake_at(p)?;
        let pb = b.satake_at(p)?;
        let mut local = Complex64::new(0.0, 0.0);
        for &x in &pa[0] {
            for &y in &pb[0] {
                let beta = x * y.conj();
                local += beta * u / check_term(beta * u)?;
            }
        }
        acc.add(local * f_log_p * sd.g as f64);
    }
    Ok(acc.value())
}

/// One nonzero Dirichlet coefficient: n = p^K with its prime and value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamEntry {
    pub n: u64,
    pub p: u64,
    pub value: Complex64,
}

/// Which convolution a stream materializes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    SingleField,
    BaseChange,
}

/// Sparse materialization of Lambda-weighted coefficient support up to a
/// limit: entries at prime powers with nonzero coefficient, ascending in n.
///
/// Generation is chunked over fixed prime ranges and the chunks are
/// concatenated in order, so the result is identical for any worker count.
#[derive(Debug, Clone)]
pub struct CoefficientStream {
    kind: StreamKind,
    limit: u64,
    entries: Vec<StreamEntry>,
}

const CHUNK: usize = 4096;

impl CoefficientStream {
    /// Stream of a same-field pair.
    pub fn single_field(
        a: &BaseChangedRep,
        b: &BaseChangedRep,
        limit: u64,
        primes: &PrimeTable,
    ) -> Result<Self> {
        ensure_same_field(a, b)?;
        if primes.limit() < limit {
            return Err(Error::Domain(format!(
                "prime table limit {} below stream limit {limit}",
                primes.limit()
            )));
        }
        let chunks: Vec<Result<Vec<StreamEntry>>> = primes
            .upto(limit)
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut out = Vec::with_capacity(chunk.len());
                for &p in chunk {
                    if a.field().ramified_at(p) {
                        continue;
                    }
                    let sd = a.field().splitting_data(p)?;
                    let base_a = a.descent().satake_at(p)?;
                    let base_b = b.descent().satake_at(p)?;
                    let step_a: Vec<Complex64> =
                        base_a.iter().map(|x| x.powu(sd.f as u32)).collect();
                    let step_b: Vec<Complex64> =
                        base_b.iter().map(|x| x.powu(sd.f as u32)).collect();
                    let gf = (sd.g * sd.f) as f64;
                    let Some(mut n) = checked_pow(p, sd.f) else {
                        continue;
                    };
                    let mut pow_a = step_a.clone();
                    let mut pow_b = step_b.clone();
                    while n <= limit {
                        let sa: Complex64 = pow_a.iter().sum();
                        let sb: Complex64 = pow_b.iter().sum();
                        let value = gf * sa * sb.conj();
                        if value.re != 0.0 || value.im != 0.0 {
                            out.push(StreamEntry { n, p, value });
                        }
                        match checked_pow_step(n, p, sd.f) {
                            Some(next) if next <= limit => {
                                n = next;
                                for (cur, st) in pow_a.iter_mut().zip(&step_a) {
                                    *cur *= st;
                                }
                                for (cur, st) in pow_b.iter_mut().zip(&step_b) {
                                    *cur *= st;
                                }
                            }
                            _ => break,
                        }
                    }
                }
                Ok(out)
            })
            .collect();
        Self::assemble(StreamKind::SingleField, limit, chunks)
    }

    /// Stream of a two-field pair via the twist-family definition.
    pub fn base_change(
        a: &BaseChangedRep,
        b: &BaseChangedRep,
        limit: u64,
        primes: &PrimeTable,
    ) -> Result<Self> {
        if primes.limit() < limit {
            return Err(Error::Domain(format!(
                "prime table limit {} below stream limit {limit}",
                primes.limit()
            )));
        }
        let family_a = twist_family(a)?;
        let family_b = twist_family(b)?;
        let chunks: Vec<Result<Vec<StreamEntry>>> = primes
            .upto(limit)
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut out = Vec::with_capacity(chunk.len());
                for &p in chunk {
                    let base_a: Vec<Vec<Complex64>> = family_a
                        .iter()
                        .map(|r| r.satake_at(p))
                        .collect::<Result<_>>()?;
                    let base_b: Vec<Vec<Complex64>> = family_b
                        .iter()
                        .map(|r| r.satake_at(p))
                        .collect::<Result<_>>()?;
                    let mut pow_a = base_a.clone();
                    let mut pow_b = base_b.clone();
                    let mut n = p;
                    loop {
                        let ta: Complex64 = pow_a.iter().flatten().sum();
                        let tb: Complex64 = pow_b.iter().flatten().sum();
                        let value = ta * tb.conj();
                        if value.re != 0.0 || value.im != 0.0 {
                            out.push(StreamEntry { n, p, value });
                        }
                        match n.checked_mul(p) {
                            Some(next) if next <= limit => {
                                n = next;
                                step_powers(&mut pow_a, &base_a);
                                step_powers(&mut pow_b, &base_b);
                            }
                            _ => break,
                        }
                    }
                }
                Ok(out)
            })
            .collect();
        Self::assemble(StreamKind::BaseChange, limit, chunks)
    }

    fn assemble(
        kind: StreamKind,
        limit: u64,
        chunks: Vec<Result<Vec<StreamEntry>>>,
    ) -> Result<Self> {
        let mut entries = Vec::new();
        for chunk in chunks {
            entries.extend(chunk?);
        }
        entries.sort_unstable_by_key(|e| e.n);
        Ok(Self {
            kind,
            limit,
            entries,
        })
    }

    pub fn kind(&self) -> StreamKind {
        self.kind
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn entries(&self) -> &[StreamEntry] {
        &self.entries
    }

    /// Entries with n <= x.
    pub fn upto(&self, x: u64) -> &[StreamEntry] {
        let end = self.entries.partition_point(|e| e.n <= x);
        &self.entries[..end]
    }
}

fn step_powers(pow: &mut [Vec<Complex64>], base: &[Vec<Complex64>]) {
    for (row, base_row) in pow.iter_mut().zip(base) {
        for (cur, st) in row.iter_mut().zip(base_row) {
            *cur *= st;
        }
    }
}

fn checked_pow(p: u64, f: u64) -> Option<u64> {
    let mut n = 1u64;
    for _ in 0..f {
        n = n.checked_mul(p)?;
    }
    Some(n)
}

fn checked_pow_step(n: u64, p: u64, f: u64) -> Option<u64> {
    let mut m = n;
    for _ in 0..f {
        m = m.checked_mul(p)?;
    }
    Some(m)
}
