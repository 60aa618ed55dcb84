//! Dirichlet characters of prime conductor.
//!
//! These are the computational stand-ins for the idele-class characters that
//! class field theory attaches to cyclic extensions of Q. A character mod a
//! prime q is labelled by an index `a` in `[0, q-2]`: it sends the least
//! primitive root g of q to `e^{2*pi*i*a/(q-1)}`. The labelling is canonical,
//! so configurations reproduce across runs and machines.
//!
//! Values are precomputed as a table of length q for O(1) evaluation inside
//! sieve loops, and the discrete logs are kept so that the *order* of a value
//! (needed for residue degrees) is integer arithmetic, never float phase.

use std::sync::Arc;

use num_complex::Complex64;

use crate::arithmetic::{gcd, is_prime_u64, pow_mod};
use crate::error::{Error, Result};

/// Largest supported conductor (value tables are O(conductor)).
pub const MAX_CONDUCTOR: u64 = 1_000_000;

#[derive(Debug)]
struct ModulusData {
    /// dlog[r] = discrete log of r base the least primitive root, for r coprime to q.
    dlog: Vec<u32>,
    generator: u64,
}

/// A Dirichlet character of prime conductor (or the trivial character, conductor 1).
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    conductor: u64,
    index: u64,
    order: u64,
    modulus: Arc<ModulusData>,
    values: Arc<[Complex64]>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.conductor == other.conductor && self.index == other.index
    }
}
impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    /// The trivial character: identically 1 (conductor 1).
    pub fn trivial() -> Self {
        let modulus = Arc::new(ModulusData {
            dlog: vec![0],
            generator: 0,
        });
        Self {
            conductor: 1,
            index: 0,
            order: 1,
            modulus,
            values: Arc::from(vec![Complex64::new(1.0, 0.0)]),
        }
    }

    /// The canonical character of exactly `target_order` mod a prime conductor:
    /// index `(conductor-1)/target_order` on the least primitive root.
    pub fn of_order(conductor: u64, target_order: u64) -> Result<Self> {
        let modulus = modulus_data(conductor)?;
        let group_order = conductor - 1;
        if target_order == 0 || !group_order.is_multiple_of(target_order) {
            return Err(Error::Domain(format!(
                "no character of order {target_order} mod {conductor}: order must divide {group_order}"
            )));
        }
        Ok(Self::from_parts(
            conductor,
            group_order / target_order,
            modulus,
        ))
    }

    /// Character with an explicit dual-group index in `[0, conductor-2]`.
    pub fn with_index(conductor: u64, index: u64) -> Result<Self> {
        let modulus = modulus_data(conductor)?;
        Ok(Self::from_parts(
            conductor,
            index % (conductor - 1),
            modulus,
        ))
    }

    /// The canonical generator of the dual group mod `conductor` (index 1).
    pub fn dual_generator(conductor: u64) -> Result<Self> {
        Self::with_index(conductor, 1)
    }

    fn from_parts(conductor: u64, index: u64, modulus: Arc<ModulusData>) -> Self {
        let group_order = conductor - 1;
        let order = group_order / gcd(index, group_order);
        let mut values = vec![Complex64::new(0.0, 0.0); conductor as usize];
        for r in 1..conductor {
            let e = modulus.dlog[r as usize] as u64;
            values[r as usize] = root_of_unity((index * e) % group_order, group_order);
        }
        Self {
            conductor,
            index,
            order,
            modulus,
            values: Arc::from(values),
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Order of the character in the dual group.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// The least primitive root used for the canonical labelling (0 for the
    /// trivial character).
    pub fn generator(&self) -> u64 {
        self.modulus.generator
    }

    /// Principal means order 1 (includes the trivial character).
    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    pub fn is_trivial(&self) -> bool {
        self.conductor == 1
    }

    /// chi(n), with chi(n) = 0 iff conductor | n (conductor > 1).
    pub fn eval(&self, n: i64) -> Complex64 {
        let r = n.rem_euclid(self.conductor as i64) as usize;
        self.values[r]
    }

    /// True when the character kills p, i.e. conductor > 1 and conductor | p.
    pub fn ramified_at(&self, p: u64) -> bool {
        self.conductor > 1 && p.is_multiple_of(self.conductor)
    }

    /// Multiplicative order of chi(n) as a root of unity (None at ramified n).
    /// Computed from discrete logs, so it is exact.
    pub fn value_order(&self, n: u64) -> Option<u64> {
        if self.conductor == 1 {
            return Some(1);
        }
        let r = (n % self.conductor) as usize;
        if r == 0 {
            return None;
        }
        let group_order = self.conductor - 1;
        let t = (self.index * self.modulus.dlog[r] as u64) % group_order;
        Some(group_order / gcd(t, group_order))
    }

    /// chi^k (indices multiply mod conductor-1; k may be negative).
    pub fn pow(&self, k: i64) -> Self {
        if self.conductor == 1 {
            return self.clone();
        }
        let group_order = (self.conductor - 1) as i128;
        let index = ((self.index as i128 * k as i128).rem_euclid(group_order)) as u64;
        Self::from_parts(self.conductor, index, Arc::clone(&self.modulus))
    }

    /// Inverse in the dual group (complex conjugate values).
    pub fn conjugate(&self) -> Self {
        self.pow(-1)
    }

    /// Pointwise product of two characters. Both must share a conductor,
    /// unless one of them is trivial; composite moduli are out of scope.
    pub fn product(a: &Self, b: &Self) -> Result<Self> {
        if a.conductor == 1 {
            return Ok(b.clone());
        }
        if b.conductor == 1 {
            return Ok(a.clone());
        }
        if a.conductor != b.conductor {
            return Err(Error::Domain(format!(
                "cannot multiply characters mod {} and mod {}: composite conductors unsupported",
                a.conductor, b.conductor
            )));
        }
        let group_order = a.conductor - 1;
        let index = (a.index + b.index) % group_order;
        Ok(Self::from_parts(a.conductor, index, Arc::clone(&a.modulus)))
    }
}

fn modulus_data(conductor: u64) -> Result<Arc<ModulusData>> {
    if conductor > MAX_CONDUCTOR {
        return Err(Error::Capacity(format!(
            "conductor {conductor} exceeds supported maximum {MAX_CONDUCTOR}"
        )));
    }
    if !is_prime_u64(conductor) {
        return Err(Error::Domain(format!("conductor {conductor} is not prime")));
    }
    let generator = least_primitive_root(conductor);
    let mut dlog = vec![0u32; conductor as usize];
    let mut t = 1u64;
    for e in 0..conductor - 1 {
        dlog[t as usize] = e as u32;
        t = t * generator % conductor;
    }
    Ok(Arc::new(ModulusData { dlog, generator }))
}

/// Least primitive root of a prime q.
fn least_primitive_root(q: u64) -> u64 {
    if q == 2 {
        return 1;
    }
    let group_order = q - 1;
    let mut prime_factors = Vec::new();
    let mut m = group_order;
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            prime_factors.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        prime_factors.push(m);
    }
    (2..q)
        .find(|&g| {
            prime_factors
                .iter()
                .all(|&r| pow_mod(g, group_order / r, q) != 1)
        })
        .expect("every prime has a primitive root")
}

/// e^{2*pi*i*num/den}, exact at quarter turns so that quadratic and quartic
/// character values come out as exact 0 / +-1 / +-i components.
fn root_of_unity(num: u64, den: u64) -> Complex64 {
    let g = gcd(num, den);
    let (n, d) = (num / g, den / g);
    match (d, n) {
        (1, _) => Complex64::new(1.0, 0.0),
        (2, _) => Complex64::new(-1.0, 0.0),
        (4, 1) => Complex64::new(0.0, 1.0),
        (4, 3) => Complex64::new(0.0, -1.0),
        _ => {
            let theta = 2.0 * std::f64::consts::PI * (n as f64) / (d as f64);
            Complex64::new(theta.cos(), theta.sin())
        }
    }
}
