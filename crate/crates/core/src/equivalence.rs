//! Twisted-equivalence detection between representations over Q and the
//! group structure of twisted pairs.
//!
//! `detect_twist(A, B, ...)` decides whether B = A tensor |det|^{i*tau} for a
//! real tau, by comparing Satake multisets over a set of test primes. The
//! candidate tau is read off the determinant ratio at the smallest test
//! prime: det_B/det_A = p^{-i m tau} pins tau modulo 2*pi/(m log p). Since
//! the logarithms of distinct primes are rationally independent, requiring
//! consistency across three or more primes leaves at most one candidate in
//! the search window |tau| <= 100, which is then verified against the full
//! multisets at every test prime.

use num_complex::Complex64;
use serde::Serialize;

use crate::arithmetic::gcd;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::reps::{determinant_shift, AutomorphicRepQ};

/// Detector search window for |tau|.
pub const TAU_WINDOW: f64 = 100.0;

/// A successful detection: the shift and the worst multiset mismatch seen.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwistDetection {
    pub tau: f64,
    pub max_residual: f64,
}

/// One twisted-equivalent pair found by the (i, j) scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwistMatch {
    pub i: u64,
    pub j: u64,
    pub tau: f64,
    pub max_residual: f64,
}

/// Multiset comparison: sort both sides by (re, im) after rounding at tol/10,
/// then take the worst pairwise distance.
fn multiset_distance(xs: &[Complex64], ys: &[Complex64], tol: f64) -> f64 {
    let quantum = tol / 10.0;
    let sorted = |vals: &[Complex64]| {
        let mut v: Vec<Complex64> = vals.to_vec();
        v.sort_by(|a, b| {
            let ka = ((a.re / quantum).round(), (a.im / quantum).round());
            let kb = ((b.re / quantum).round(), (b.im / quantum).round());
            ka.partial_cmp(&kb).unwrap()
        });
        v
    };
    let xs = sorted(xs);
    let ys = sorted(ys);
    xs.iter()
        .zip(&ys)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = theta % two_pi;
    if t > std::f64::consts::PI {
        t -= two_pi;
    } else if t < -std::f64::consts::PI {
        t += two_pi;
    }
    t
}

/// If B = A tensor |det|^{i*tau} holds over the test primes (within tol, as
/// multisets), return the canonical tau; otherwise None.
///
/// Preconditions: equal ranks, at least two test primes, every test prime
/// unramified for both representations.
pub fn detect_twist(
    a: &AutomorphicRepQ,
    b: &AutomorphicRepQ,
    test_primes: &[u64],
    tol: f64,
) -> Result<Option<TwistDetection>> {
    if a.rank() != b.rank() {
        return Err(Error::Domain(format!(
            "rank mismatch: {} vs {}",
            a.rank(),
            b.rank()
        )));
    }
    if test_primes.len() < 2 {
        return Err(Error::Domain("need at least two test primes".into()));
    }
    let mut primes = test_primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    for &p in &primes {
        if !a.is_unramified_at(p) || !b.is_unramified_at(p) {
            return Err(Error::Domain(format!("test prime {p} is ramified")));
        }
    }
    let m = a.rank() as f64;

    let sa: Vec<Vec<Complex64>> = primes
        .iter()
        .map(|&p| a.satake_at(p))
        .collect::<Result<_>>()?;
    let sb: Vec<Vec<Complex64>> = primes
        .iter()
        .map(|&p| b.satake_at(p))
        .collect::<Result<_>>()?;

    // Determinant phases; a zero determinant would leave tau unconstrained.
    let mut phases = Vec::with_capacity(primes.len());
    for ((&p, pa), pb) in primes.iter().zip(&sa).zip(&sb) {
        let da: Complex64 = pa.iter().product();
        let db: Complex64 = pb.iter().product();
        if da.norm() < 1e-9 || db.norm() < 1e-9 {
            return Err(Error::Domain(format!(
                "Satake determinant vanishes at test prime {p}"
            )));
        }
        // unitary twists cannot change the determinant modulus
        if ((db.norm() / da.norm()) - 1.0).abs() > 1e-6 {
            return Ok(None);
        }
        phases.push((p, (db / da).arg()));
    }

    // Enumerate aliases of the phase constraint at the smallest prime.
    let (p0, theta0) = phases[0];
    let period0 = 2.0 * std::f64::consts::PI / (m * (p0 as f64).ln());
    let base = -theta0 / (m * (p0 as f64).ln());
    let k_lo = ((-TAU_WINDOW - base) / period0).floor() as i64;
    let k_hi = ((TAU_WINDOW - base) / period0).ceil() as i64;

    let residual_at = |tau: f64| -> f64 {
        let mut worst = 0.0f64;
        for ((&p, pa), pb) in primes.iter().zip(&sa).zip(&sb) {
            let shift = determinant_shift(p, tau);
            let shifted: Vec<Complex64> = pa.iter().map(|&x| x * shift).collect();
            worst = worst.max(multiset_distance(&shifted, pb, tol));
        }
        worst
    };

    let mut survivors: Vec<TwistDetection> = Vec::new();
    for k in k_lo..=k_hi {
        let tau = base + k as f64 * period0;
        if tau.abs() > TAU_WINDOW {
            continue;
        }
        // cheap consistency filter on the remaining determinant phases
        let consistent = phases
            .iter()
            .skip(1)
            .all(|&(p, theta)| wrap_angle(-m * tau * (p as f64).ln() - theta).abs() < 1e-4);
        if !consistent {
            continue;
        }
        // refine: average the nearest alias of every prime's phase estimate
        let mut refined = 0.0;
        for &(p, theta) in &phases {
            let scale = m * (p as f64).ln();
            let alias = ((-tau * scale - theta) / (2.0 * std::f64::consts::PI)).round();
            refined += -(theta + 2.0 * std::f64::consts::PI * alias) / scale;
        }
        refined /= phases.len() as f64;
        let residual = residual_at(refined);
        if residual <= tol {
            survivors.push(TwistDetection {
                tau: refined,
                max_residual: residual,
            });
        }
    }

    survivors.sort_by(|x, y| x.tau.partial_cmp(&y.tau).unwrap());
    survivors.dedup_by(|x, y| (x.tau - y.tau).abs() < 1e-9);
    // with three or more primes at most one alias survives; if fewer, prefer
    // the smallest shift in absolute value
    survivors.sort_by(|x, y| {
        (x.tau.abs(), x.tau)
            .partial_cmp(&(y.tau.abs(), y.tau))
            .unwrap()
    });
    Ok(survivors.into_iter().next())
}

/// Scan both twist families for equivalences
/// `pi tensor eta^i = pi' tensor psi^j tensor |det|^{i*tau}`.
///
/// The scan asserts uniqueness: at most one (j, tau) per i, and a common tau
/// across all matches; violations are reported as contract errors rather than
/// silently returned.
pub fn twisted_pairs(
    pi: &AutomorphicRepQ,
    eta: &DirichletCharacter,
    pi_prime: &AutomorphicRepQ,
    psi: &DirichletCharacter,
    test_primes: &[u64],
    tol: f64,
) -> Result<Vec<TwistMatch>> {
    for &p in test_primes {
        if eta.ramified_at(p) || psi.ramified_at(p) {
            return Err(Error::Domain(format!(
                "test prime {p} is ramified for a twisting character"
            )));
        }
    }
    let ell = eta.order();
    let q = psi.order();
    let mut matches = Vec::new();
    for i in 0..ell {
        for j in 0..q {
            let twisted_pi = pi.twist(&eta.pow(i as i64), 0.0)?;
            let twisted_prime = pi_prime.twist(&psi.pow(j as i64), 0.0)?;
            if let Some(d) = detect_twist(&twisted_prime, &twisted_pi, test_primes, tol)? {
                matches.push(TwistMatch {
                    i,
                    j,
                    tau: d.tau,
                    max_residual: d.max_residual,
                });
            }
        }
    }
    for i in 0..ell {
        if matches.iter().filter(|m| m.i == i).count() > 1 {
            return Err(Error::Contract(format!(
                "twist uniqueness violated: several (j, tau) matched i = {i}"
            )));
        }
    }
    if let Some(first) = matches.first() {
        for m in &matches[1..] {
            if (m.tau - first.tau).abs() > 1e-9 {
                return Err(Error::Contract(format!(
                    "matched shifts disagree: {} vs {}",
                    first.tau, m.tau
                )));
            }
        }
    }
    Ok(matches)
}

/// Verdict of the subgroup / divisibility structure of a match set.
#[derive(Debug, Clone, Serialize)]
pub struct PairGroupCheck {
    pub match_count: u64,
    pub degree_gcd: u64,
    /// The matched indices form a coset of a subgroup of Z/ell (checked on
    /// the relabeled family, i.e. on the difference set).
    pub coset_of_subgroup: bool,
    pub count_divides_gcd: bool,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Check the group structure of a set of twisted matches: the difference set
/// of matched i-indices must be a subgroup of Z/ell and the number of matches
/// must divide gcd(ell, q). Empty match sets pass vacuously.
pub fn pair_group_check(matches: &[TwistMatch], ell: u64, q: u64) -> PairGroupCheck {
    let degree_gcd = gcd(ell, q);
    let count = matches.len() as u64;
    if matches.is_empty() {
        return PairGroupCheck {
            match_count: 0,
            degree_gcd,
            coset_of_subgroup: true,
            count_divides_gcd: true,
            pass: true,
            witness: None,
        };
    }
    let mut indices: Vec<u64> = matches.iter().map(|m| m.i % ell).collect();
    indices.sort_unstable();
    indices.dedup();

    // difference set; the matched set is a coset of it when sizes agree
    let mut diffs: Vec<u64> = Vec::new();
    for &x in &indices {
        for &y in &indices {
            diffs.push((x + ell - y) % ell);
        }
    }
    diffs.sort_unstable();
    diffs.dedup();
    let mut witness = None;
    let mut closed = true;
    'outer: for &x in &diffs {
        for &y in &diffs {
            let d = (x + ell - y) % ell;
            if diffs.binary_search(&d).is_err() {
                closed = false;
                witness = Some(format!("difference {x} - {y} = {d} escapes the set"));
                break 'outer;
            }
        }
    }
    let coset_of_subgroup = closed && diffs.len() == indices.len();
    if closed && diffs.len() != indices.len() && witness.is_none() {
        witness = Some(format!(
            "matched indices span {} cosets of a subgroup of size {}",
            indices.len(),
            diffs.len()
        ));
    }
    let count_divides_gcd = count > 0 && degree_gcd.is_multiple_of(count);
    if !count_divides_gcd && witness.is_none() {
        witness = Some(format!("{count} matches do not divide gcd = {degree_gcd}"));
    }
    PairGroupCheck {
        match_count: count,
        degree_gcd,
        coset_of_subgroup,
        count_divides_gcd,
        pass: coset_of_subgroup && count_divides_gcd,
        witness,
    }
}

/// First `count` primes unramified for every given representation and
/// character; the default detector prime set takes count = 25.
pub fn default_test_primes(
    reps: &[&AutomorphicRepQ],
    chars: &[&DirichletCharacter],
    count: usize,
) -> Result<Vec<u64>> {
    let table = crate::arithmetic::PrimeTable::sieve(10_000)?;
    let mut out = Vec::with_capacity(count);
    for &p in table.primes() {
        let ok =
            reps.iter().all(|r| r.is_unramified_at(p)) && chars.iter().all(|c| !c.ramified_at(p));
        if ok {
            out.push(p);
            if out.len() == count {
                return Ok(out);
            }
        }
    }
    Err(Error::Capacity(format!(
        "could not collect {count} unramified test primes below 10000"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::ramanujan_tau_table;
    use rand::Rng;
    use rand::SeedableRng;
    use std::sync::Arc;

    const TOL: f64 = 1e-9;

    fn char_rep(conductor: u64, order: u64) -> AutomorphicRepQ {
        AutomorphicRepQ::character_rep(DirichletCharacter::of_order(conductor, order).unwrap())
    }

    fn primes_for(reps: &[&AutomorphicRepQ]) -> Vec<u64> {
        default_test_primes(reps, &[], 25).unwrap()
    }

    #[test]
    fn identity_detection() {
        let a = char_rep(5, 2);
        let primes = primes_for(&[&a]);
        let d = detect_twist(&a, &a, &primes, TOL).unwrap().unwrap();
        assert!(d.tau.abs() < 1e-12);
        assert!(d.max_residual < 1e-12);
    }

    #[test]
    fn detector_inverts_constructed_shift() {
        let a = char_rep(5, 2);
        let b = a.twist(&DirichletCharacter::trivial(), 0.7).unwrap();
        let primes = primes_for(&[&a]);
        let d = detect_twist(&a, &b, &primes, TOL).unwrap().unwrap();
        assert!((d.tau - 0.7).abs() <= 1e-9, "tau = {}", d.tau);
    }

    #[test]
    fn distinct_characters_do_not_match() {
        let a = char_rep(5, 2);
        let b = char_rep(7, 3);
        let primes = primes_for(&[&a, &b]);
        assert!(detect_twist(&a, &b, &primes, TOL).unwrap().is_none());
    }

    #[test]
    fn cusp_form_only_matches_shift_zero() {
        let table = Arc::new(ramanujan_tau_table(1000).unwrap());
        let delta = AutomorphicRepQ::cusp_form_rep(table);
        let primes = primes_for(&[&delta]);
        let d = detect_twist(&delta, &delta, &primes, TOL).unwrap().unwrap();
        assert!(d.tau.abs() < 1e-12);
        let shifted = delta.twist(&DirichletCharacter::trivial(), 0.31).unwrap();
        let d = detect_twist(&delta, &shifted, &primes, TOL)
            .unwrap()
            .unwrap();
        assert!((d.tau - 0.31).abs() < 1e-9);
        // a genuinely different rep never aliases to some other tau
        let quad = DirichletCharacter::of_order(5, 2).unwrap();
        let twisted = delta.twist(&quad, 0.0).unwrap();
        let primes = default_test_primes(&[&delta, &twisted], &[], 25).unwrap();
        assert!(detect_twist(&delta, &twisted, &primes, TOL)
            .unwrap()
            .is_none());
    }

    #[test]
    fn canonical_tau_is_stable_across_prime_sets() {
        let a = char_rep(5, 4);
        let b = a.twist(&DirichletCharacter::trivial(), -3.2).unwrap();
        let all = primes_for(&[&a]);
        let d1 = detect_twist(&a, &b, &all[..5], TOL).unwrap().unwrap();
        let d2 = detect_twist(&a, &b, &all[..25], TOL).unwrap().unwrap();
        let d3 = detect_twist(&a, &b, &all[3..20], TOL).unwrap().unwrap();
        assert!((d1.tau - d2.tau).abs() < 1e-9);
        assert!((d1.tau - d3.tau).abs() < 1e-9);
    }

    #[test]
    fn detector_domain_errors() {
        let a = char_rep(5, 2);
        let table = Arc::new(ramanujan_tau_table(1000).unwrap());
        let delta = AutomorphicRepQ::cusp_form_rep(table);
        let primes = primes_for(&[&a]);
        assert!(detect_twist(&a, &delta, &primes, TOL).is_err()); // rank mismatch
        assert!(detect_twist(&a, &a, &[2], TOL).is_err()); // too few primes
        assert!(detect_twist(&a, &a, &[2, 5], TOL).is_err()); // ramified test prime
    }

    #[test]
    fn randomized_soundness_of_the_scan() {
        // the (i, j) scan recovers exactly the constructed twist and nothing else
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20_240_811);
        let table = Arc::new(ramanujan_tau_table(1000).unwrap());
        for trial in 0..50 {
            let eta = DirichletCharacter::of_order(5, 2).unwrap();
            let psi = DirichletCharacter::of_order(7, 3).unwrap();
            let base: AutomorphicRepQ = if trial % 2 == 0 {
                char_rep(11, [1u64, 2, 5, 10][rng.gen_range(0..4)])
            } else {
                AutomorphicRepQ::cusp_form_rep(Arc::clone(&table))
            };
            let i0 = rng.gen_range(0..eta.order());
            let j0 = rng.gen_range(0..psi.order());
            let tau0: f64 = rng.gen_range(-20.0..20.0);
            // arrange pi eta^{i0} = pi' psi^{j0} |det|^{i tau0}
            let pi_prime = base
                .twist(&eta.pow(i0 as i64), 0.0)
                .unwrap()
                .twist(&psi.pow(-(j0 as i64)), -tau0)
                .unwrap();
            let primes = default_test_primes(&[&base, &pi_prime], &[&eta, &psi], 25).unwrap();
            let matches = twisted_pairs(&base, &eta, &pi_prime, &psi, &primes, TOL).unwrap();
            assert_eq!(matches.len(), 1, "trial {trial}");
            let m = &matches[0];
            assert_eq!((m.i, m.j), (i0, j0), "trial {trial}");
            assert!(
                (m.tau - tau0).abs() < 1e-9,
                "trial {trial}: {} vs {tau0}",
                m.tau
            );
        }
    }

    #[test]
    fn diagonal_family_matches_on_the_diagonal() {
        let eta = DirichletCharacter::of_order(7, 3).unwrap();
        let pi = AutomorphicRepQ::trivial();
        let primes = default_test_primes(&[&pi], &[&eta], 25).unwrap();
        let matches = twisted_pairs(&pi, &eta, &pi, &eta, &primes, TOL).unwrap();
        assert_eq!(matches.len(), 3);
        for m in &matches {
            assert_eq!(m.i, m.j);
            assert!(m.tau.abs() < 1e-10);
        }
        let check = pair_group_check(&matches, 3, 3);
        assert!(check.pass);
        assert_eq!(check.match_count, 3);
    }

    #[test]
    fn generic_coprime_scan_is_empty() {
        let eta = DirichletCharacter::of_order(5, 2).unwrap();
        let psi = DirichletCharacter::of_order(7, 3).unwrap();
        let pi = AutomorphicRepQ::trivial();
        let pi_prime = char_rep(13, 2);
        let primes = default_test_primes(&[&pi, &pi_prime], &[&eta, &psi], 25).unwrap();
        let matches = twisted_pairs(&pi, &eta, &pi_prime, &psi, &primes, TOL).unwrap();
        assert!(matches.is_empty());
        assert!(pair_group_check(&matches, 2, 3).pass);
    }

    #[test]
    fn arranged_coprime_scan_has_one_match() {
        let eta = DirichletCharacter::of_order(5, 2).unwrap();
        let psi = DirichletCharacter::of_order(7, 3).unwrap();
        let pi = AutomorphicRepQ::trivial();
        // pi' = pi tensor eta^{-1}: the single match sits at (i, j) = (1, 0)
        let pi_prime = pi.twist(&eta.pow(-1), 0.0).unwrap();
        let primes = default_test_primes(&[&pi, &pi_prime], &[&eta, &psi], 25).unwrap();
        let matches = twisted_pairs(&pi, &eta, &pi_prime, &psi, &primes, TOL).unwrap();
        assert_eq!(matches.len(), 1);
        assert_eq!((matches[0].i, matches[0].j), (1, 0));
        let check = pair_group_check(&matches, 2, 3);
        assert!(check.pass, "witness: {:?}", check.witness);
        assert_eq!(check.degree_gcd, 1);
    }

    #[test]
    fn group_check_rejects_non_coset() {
        let mk = |i: u64| TwistMatch {
            i,
            j: 0,
            tau: 0.0,
            max_residual: 0.0,
        };
        // {0, 1} inside Z/4 is not a coset of a subgroup
        let check = pair_group_check(&[mk(0), mk(1)], 4, 4);
        assert!(!check.pass);
        assert!(check.witness.is_some());
        // {0, 2} is the order-2 subgroup
        let check = pair_group_check(&[mk(0), mk(2)], 4, 4);
        assert!(check.coset_of_subgroup);
        assert!(check.pass);
        // {1, 3} is a coset of it
        let check = pair_group_check(&[mk(1), mk(3)], 4, 4);
        assert!(check.coset_of_subgroup);
    }
}
