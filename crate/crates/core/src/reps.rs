//! Concrete automorphic representations over Q given by computable Satake
//! parameters, twisting, and base change to a cyclic extension.
//!
//! Three kinds of representation are supported:
//!
//! - character representations (rank 1): the parameter at p is chi(p);
//! - level-one holomorphic cusp forms (rank 2): the parameters at p are the
//!   roots of X^2 - lambda(p) X + 1 with lambda(p) = a(p) / p^{(k-1)/2};
//! - explicit tables (any rank): unit-circle parameters loaded per prime.
//!
//! A representation may carry a twist by Dirichlet characters and a real
//! determinant shift tau, which multiplies every parameter by p^{-i*tau} =
//! (cos, -sin)(tau log p). Twisting by a *principal* character is the
//! identity: the canonical twist family of a field character eta is
//! {1, eta, ..., eta^{l-1}} and its power-zero member is the untwisted
//! representation itself.
//!
//! Base change to a cyclic extension is defined on parameters: at an
//! unramified p with residue degree f and g places above p, every place
//! carries the parameter multiset {alpha^f}. At ramified places all
//! parameters are zero by convention.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arithmetic::PrimeTable;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::fields::CyclicExtension;

/// Largest supported Hecke-eigenvalue table limit.
pub const MAX_TAU_LIMIT: u64 = 1_000_000;

/// Eigenvalue table of a level-one holomorphic cusp form.
#[derive(Debug, Clone)]
pub struct CuspFormTable {
    weight: u32,
    limit: u64,
    eigenvalues: HashMap<u64, i128>,
}

impl CuspFormTable {
    pub fn new(weight: u32, limit: u64, eigenvalues: HashMap<u64, i128>) -> Self {
        Self {
            weight,
            limit,
            eigenvalues,
        }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn eigenvalue(&self, p: u64) -> Result<i128> {
        if p > self.limit {
            return Err(Error::Capacity(format!(
                "eigenvalue table limit {} exceeded at p = {p}",
                self.limit
            )));
        }
        self.eigenvalues
            .get(&p)
            .copied()
            .ok_or_else(|| Error::Capacity(format!("no eigenvalue stored for p = {p}")))
    }

    /// Normalized eigenvalue lambda(p) = a(p) / p^{(k-1)/2}.
    pub fn lambda(&self, p: u64) -> Result<f64> {
        let a = self.eigenvalue(p)?;
        Ok(a as f64 / (p as f64).powf((self.weight as f64 - 1.0) / 2.0))
    }

    /// Data-integrity check: |lambda(p)| <= 2 for every stored prime.
    pub fn verify_deligne_bound(&self) -> Result<()> {
        for &p in self.eigenvalues.keys() {
            let l = self.lambda(p)?;
            if l.abs() > 2.0 {
                return Err(Error::Contract(format!(
                    "normalized eigenvalue |{l}| > 2 at p = {p}"
                )));
            }
        }
        Ok(())
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.eigenvalues.keys().copied()
    }
}

/// Coefficients of prod_{n>=1} (1 - q^n)^24 up to q^limit, as exact integers.
///
/// Computed as the 8th power of Jacobi's sparse cube
/// prod (1-q^n)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2},
/// by repeated dense-times-sparse convolution. The convolution is blocked
/// over the output with the sparse term in the outer loop, so every pass
/// streams contiguous memory instead of juggling ~sqrt(limit) read cursors.
/// Blocks are disjoint and the arithmetic is exact, so the parallel
/// evaluation is bit-deterministic regardless of worker count.
fn eta24_coefficients(limit: usize) -> Vec<i128> {
    const BLOCK: usize = 1 << 15;
    let mut sparse: Vec<(usize, i128)> = Vec::new();
    let mut k = 0usize;
    loop {
        let idx = k * (k + 1) / 2;
        if idx > limit {
            break;
        }
        let sign = if k.is_multiple_of(2) { 1 } else { -1 };
        sparse.push((idx, sign * (2 * k as i128 + 1)));
        k += 1;
    }

    let mut dense = vec![0i128; limit + 1];
    for &(idx, c) in &sparse {
        dense[idx] = c;
    }

    let mut out = vec![0i128; limit + 1];
    for _ in 0..7 {
        let src = &dense;
        out.par_chunks_mut(BLOCK)
            .enumerate()
            .for_each(|(chunk, slice)| {
                let lo = chunk * BLOCK;
                let hi = lo + slice.len();
                slice.fill(0);
                for &(idx, c) in &sparse {
                    if idx >= hi {
                        break;
                    }
                    let start = lo.max(idx);
                    for (d, s) in slice[start - lo..]
                        .iter_mut()
                        .zip(&src[start - idx..hi - idx])
                    {
                        *d += c * s;
                    }
                }
            });
        std::mem::swap(&mut dense, &mut out);
    }
    dense
}

/// Ramanujan tau(n) for 1 <= n <= limit, from the q-expansion of
/// q * prod (1 - q^n)^24. Index 0 is unused.
pub fn tau_coefficients(limit: u64) -> Result<Vec<i128>> {
    if limit > MAX_TAU_LIMIT {
        return Err(Error::Capacity(format!(
            "tau table limit {limit} exceeds supported maximum {MAX_TAU_LIMIT}"
        )));
    }
    let limit = limit as usize;
    if limit == 0 {
        return Ok(vec![0]);
    }
    let eta = eta24_coefficients(limit - 1);
    let mut tau = vec![0i128; limit + 1];
    tau[1..=limit].copy_from_slice(&eta[..limit]);
    Ok(tau)
}

/// Eigenvalue table of the discriminant form Delta (weight 12): tau(p) at
/// every prime p <= limit.
pub fn ramanujan_tau_table(limit: u64) -> Result<CuspFormTable> {
    let tau = tau_coefficients(limit)?;
    let primes = PrimeTable::sieve(limit)?;
    let eigenvalues = primes
        .primes()
        .iter()
        .map(|&p| (p, tau[p as usize]))
        .collect();
    Ok(CuspFormTable::new(12, limit, eigenvalues))
}

/// Per-prime Satake parameter lists of arbitrary rank.
#[derive(Debug, Clone)]
pub struct ExplicitTable {
    rank: usize,
    limit: u64,
    params: HashMap<u64, Vec<Complex64>>,
}

impl ExplicitTable {
    pub fn new(rank: usize, params: HashMap<u64, Vec<Complex64>>) -> Result<Self> {
        let limit = params.keys().copied().max().unwrap_or(0);
        for (p, v) in &params {
            if v.len() != rank {
                return Err(Error::Domain(format!(
                    "parameter list at p = {p} has length {} but rank is {rank}",
                    v.len()
                )));
            }
        }
        Ok(Self {
            rank,
            limit,
            params,
        })
    }

    /// Parse lines `p,re_1,im_1,...,re_m,im_m`; a header line is skipped.
    pub fn from_csv(rank: usize, text: &str) -> Result<Self> {
        let mut params = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('p')) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 1 + 2 * rank {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, found {}",
                    lineno + 1,
                    1 + 2 * rank,
                    fields.len()
                )));
            }
            let p: u64 = fields[0]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: bad prime: {e}", lineno + 1)))?;
            let mut values = Vec::with_capacity(rank);
            for j in 0..rank {
                let re: f64 = fields[1 + 2 * j]
                    .parse()
                    .map_err(|e| Error::Parse(format!("line {}: bad float: {e}", lineno + 1)))?;
                let im: f64 = fields[2 + 2 * j]
                    .parse()
                    .map_err(|e| Error::Parse(format!("line {}: bad float: {e}", lineno + 1)))?;
                values.push(Complex64::new(re, im));
            }
            params.insert(p, values);
        }
        Self::new(rank, params)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn params(&self, p: u64) -> Result<&[Complex64]> {
        self.params
            .get(&p)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Capacity(format!("no explicit parameters stored for p = {p}")))
    }
}

#[derive(Debug, Clone)]
enum RepKind {
    Character(DirichletCharacter),
    CuspForm(Arc<CuspFormTable>),
    Explicit(Arc<ExplicitTable>),
}

/// An automorphic representation of GL_m over Q presented by its Satake
/// parameters, together with twist data (character part and real shift tau).
#[derive(Debug, Clone)]
pub struct AutomorphicRepQ {
    kind: RepKind,
    /// Product of pairwise-composable twist characters; empty means untwisted.
    twist_chars: Vec<DirichletCharacter>,
    /// tau in the determinant twist |det|^{i*tau}.
    shift: f64,
}

/// p^{-i*tau} as (cos, -sin)(tau log p).
pub fn determinant_shift(p: u64, tau: f64) -> Complex64 {
    let t = tau * (p as f64).ln();
    Complex64::new(t.cos(), -t.sin())
}

impl AutomorphicRepQ {
    /// Rank-1 representation attached to a Dirichlet character.
    pub fn character_rep(chi: DirichletCharacter) -> Self {
        Self {
            kind: RepKind::Character(chi),
            twist_chars: Vec::new(),
            shift: 0.0,
        }
    }

    /// The trivial GL(1) representation (parameter 1 at every prime).
    pub fn trivial() -> Self {
        Self::character_rep(DirichletCharacter::trivial())
    }

    /// Rank-2 representation of a level-one cusp form eigenvalue table.
    pub fn cusp_form_rep(table: Arc<CuspFormTable>) -> Self {
        Self {
            kind: RepKind::CuspForm(table),
            twist_chars: Vec::new(),
            shift: 0.0,
        }
    }

    /// Representation defined by an explicit parameter table.
    pub fn explicit_rep(table: Arc<ExplicitTable>) -> Self {
        Self {
            kind: RepKind::Explicit(table),
            twist_chars: Vec::new(),
            shift: 0.0,
        }
    }

    pub fn rank(&self) -> usize {
        match &self.kind {
            RepKind::Character(_) => 1,
            RepKind::CuspForm(_) => 2,
            RepKind::Explicit(t) => t.rank(),
        }
    }

    /// Largest prime admitted by the underlying tables, if any bound applies.
    pub fn table_limit(&self) -> Option<u64> {
        match &self.kind {
            RepKind::Character(_) => None,
            RepKind::CuspForm(t) => Some(t.limit()),
            RepKind::Explicit(t) => Some(t.limit()),
        }
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Twist by a character and a determinant shift. Characters compose with
    /// any existing twist; a principal character acts as the identity.
    pub fn twist(&self, chi: &DirichletCharacter, tau: f64) -> Result<Self> {
        let mut out = self.clone();
        out.shift += tau;
        if !chi.is_principal() {
            let mut merged = false;
            for existing in &mut out.twist_chars {
                if existing.conductor() == chi.conductor() {
                    *existing = DirichletCharacter::product(existing, chi)?;
                    merged = true;
                    break;
                }
            }
            if !merged {
                out.twist_chars.push(chi.clone());
            }
            out.twist_chars.retain(|c| !c.is_principal());
        }
        Ok(out)
    }

    /// Combined twist value at p: product of character values times p^{-i*tau}.
    fn twist_value(&self, p: u64) -> Complex64 {
        let mut v = determinant_shift(p, self.shift);
        for chi in &self.twist_chars {
            v *= chi.eval(p as i64);
        }
        v
    }

    /// True when no character (base or twist) kills p.
    pub fn is_unramified_at(&self, p: u64) -> bool {
        let base_ok = match &self.kind {
            RepKind::Character(chi) => !chi.ramified_at(p),
            _ => true,
        };
        base_ok && self.twist_chars.iter().all(|c| !c.ramified_at(p))
    }

    /// Satake parameter multiset at p (all zeros at ramified p).
    pub fn satake_at(&self, p: u64) -> Result<Vec<Complex64>> {
        let tw = self.twist_value(p);
        let params = match &self.kind {
            RepKind::Character(chi) => vec![chi.eval(p as i64) * tw],
            RepKind::CuspForm(table) => {
                let lambda = table.lambda(p)?;
                let disc = lambda * lambda - 4.0;
                let (alpha, beta) = if disc <= 0.0 {
                    let im = (-disc).sqrt() / 2.0;
                    (
                        Complex64::new(lambda / 2.0, im),
                        Complex64::new(lambda / 2.0, -im),
                    )
                } else {
                    // outside the Deligne range; kept exact so integrity tests can see it
                    let r = disc.sqrt() / 2.0;
                    (
                        Complex64::new(lambda / 2.0 + r, 0.0),
                        Complex64::new(lambda / 2.0 - r, 0.0),
                    )
                };
                vec![alpha * tw, beta * tw]
            }
            RepKind::Explicit(table) => table.params(p)?.iter().map(|&a| a * tw).collect(),
        };
        Ok(params)
    }
}

/// A Galois-invariant representation over a cyclic extension, given by its
/// descent to Q plus the field.
#[derive(Debug, Clone)]
pub struct BaseChangedRep {
    descent: AutomorphicRepQ,
    field: CyclicExtension,
}

impl BaseChangedRep {
    pub fn new(descent: AutomorphicRepQ, field: CyclicExtension) -> Self {
        Self { descent, field }
    }

    /// A representation over Q viewed as base-changed along Q/Q.
    pub fn over_q(descent: AutomorphicRepQ) -> Self {
        Self {
            descent,
            field: CyclicExtension::rationals(),
        }
    }

    pub fn descent(&self) -> &AutomorphicRepQ {
        &self.descent
    }

    pub fn field(&self) -> &CyclicExtension {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.descent.rank()
    }

    /// Parameter multisets at the g places above an unramified prime p: every
    /// place carries {alpha^f} for the descent parameters alpha.
    pub fn satake_at(&self, p: u64) -> Result<Vec<Vec<Complex64>>> {
        let s = self.field.splitting_data(p)?;
        if s.e > 1 {
            return Err(Error::RamifiedPlace { p });
        }
        let descent_params = self.descent.satake_at(p)?;
        let place: Vec<Complex64> = descent_params.iter().map(|a| a.powu(s.f as u32)).collect();
        Ok(vec![place; s.g as usize])
    }
}

/// Left side of the base-change power-sum identity at an unramified p:
/// sum over places v | p of f * (sum_j alpha(v,j)^k).
pub fn place_power_sum(bc: &BaseChangedRep, p: u64, k: u32) -> Result<Complex64> {
    let s = bc.field().splitting_data(p)?;
    if s.e > 1 {
        return Err(Error::RamifiedPlace { p });
    }
    let places = bc.satake_at(p)?;
    let mut total = Complex64::new(0.0, 0.0);
    for place in &places {
        let mut ps = Complex64::new(0.0, 0.0);
        for a in place {
            ps += a.powu(k);
        }
        total += ps * s.f as f64;
    }
    Ok(total)
}

/// Right side of the same identity: sum over the twist family eta^a of the
/// (f*k)-th power sums of the twisted descent parameters at p.
pub fn twist_power_sum(bc: &BaseChangedRep, p: u64, k: u32) -> Result<Complex64> {
    let s = bc.field().splitting_data(p)?;
    if s.e > 1 {
        return Err(Error::RamifiedPlace { p });
    }
    let eta = bc.field().character();
    let degree = bc.field().degree();
    let mut total = Complex64::new(0.0, 0.0);
    for a in 0..degree {
        let twisted = bc.descent().twist(&eta.pow(a as i64), 0.0)?;
        for alpha in twisted.satake_at(p)? {
            total += alpha.powu(s.f as u32 * k);
        }
    }
    Ok(total)
}
