//! Cyclic extensions of Q presented by a Dirichlet character, with per-prime
//! splitting invariants.
//!
//! A field here *is* its character: for an unramified prime p the residue
//! degree f_p is the multiplicative order of the character value at p, the
//! ramification index is e_p = 1, and g_p = degree / f_p places lie above p,
//! so e_p * f_p * g_p = degree. At the ramified prime (p = conductor) a prime
//! extension degree forces total ramification. No polynomial arithmetic or
//! ring-of-integers computation is involved.

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};

/// Cyclic extension E/Q of degree equal to the order of its presenting character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicExtension {
    character: DirichletCharacter,
}

/// Decomposition invariants of a rational prime p in a cyclic extension:
/// local degree = e * f, and e * f * g = field degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplittingData {
    pub p: u64,
    /// Ramification index e_p.
    pub e: u64,
    /// Residue (modular) degree f_p; the residue field above p has p^f elements.
    pub f: u64,
    /// Number of places above p.
    pub g: u64,
}

impl SplittingData {
    /// Local degree [E_v : Q_p] = e * f.
    pub fn local_degree(&self) -> u64 {
        self.e * self.f
    }

    /// Residue field cardinality q_v = p^f.
    pub fn residue_cardinality(&self) -> u64 {
        self.p.pow(self.f as u32)
    }
}

impl CyclicExtension {
    /// Present a cyclic extension by a character. The character must be
    /// primitive: order 1 is accepted only for the trivial character
    /// (a principal character mod q > 1 presents Q but pretends ramification).
    pub fn new(character: DirichletCharacter) -> Result<Self> {
        if character.order() == 1 && !character.is_trivial() {
            return Err(Error::Domain(
                "principal character of conductor > 1 is imprimitive; use the trivial character for Q"
                    .into(),
            ));
        }
        Ok(Self { character })
    }

    /// The degenerate extension Q/Q.
    pub fn rationals() -> Self {
        Self {
            character: DirichletCharacter::trivial(),
        }
    }

    pub fn degree(&self) -> u64 {
        self.character.order()
    }

    pub fn conductor(&self) -> u64 {
        self.character.conductor()
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn is_rationals(&self) -> bool {
        self.character.is_trivial()
    }

    pub fn ramified_at(&self, p: u64) -> bool {
        self.character.ramified_at(p)
    }

    /// Splitting invariants (e, f, g) of the prime p.
    ///
    /// Unramified p: e = 1 and f = order of the character value at p.
    /// Ramified p with prime degree: totally ramified is forced, since an
    /// e > 1 must divide the prime degree. Ramified p with composite degree
    /// is rejected rather than guessed.
    pub fn splitting_data(&self, p: u64) -> Result<SplittingData> {
        let degree = self.degree();
        if self.ramified_at(p) {
            if degree == 1 {
                unreachable!("the trivial character ramifies nowhere");
            }
            if !crate::arithmetic::is_prime_u64(degree) {
                return Err(Error::UnsupportedRamified { p, degree });
            }
            return Ok(SplittingData {
                p,
                e: degree,
                f: 1,
                g: 1,
            });
        }
        let f = self
            .character
            .value_order(p)
            .expect("unramified prime has a nonzero character value");
        Ok(SplittingData {
            p,
            e: 1,
            f,
            g: degree / f,
        })
    }

    /// True iff e_p = f_p = 1, i.e. the character value at p is 1 and p is unramified.
    pub fn splits_completely(&self, p: u64) -> bool {
        !self.ramified_at(p) && self.character.value_order(p) == Some(1)
    }
}

/// A prime splits completely in the compositum EF iff it splits completely in
/// both E and F (compositum criterion for abelian extensions).
pub fn splits_completely_in_compositum(e: &CyclicExtension, f: &CyclicExtension, p: u64) -> bool {
    e.splits_completely(p) && f.splits_completely(p)
}
