//! Sturm-certified positivity of the quantum Fubini-Study metric.
//!
//! The metric is positive definite at a deformation parameter q exactly
//! when every bidegree block of every Gram matrix is positive definite,
//! and by Sylvester's criterion that reduces to strict positivity of the
//! leading principal minors of each block.  The minors are exact rational
//! functions of q, so their signs over an interval are decided by Sturm
//! chains (Sturm 1835) rather than sampling: a certificate here means
//! root-freeness of numerator and denominator on the open interval plus
//! one exact interior evaluation.
//!
//! Two entry points are provided.  [`certify_on`] certifies positivity on
//! a caller-chosen window.  [`maximal_certificate`] computes the largest
//! rational subwindow around q = 1 on which positivity can hold inside a
//! search window: it isolates every real root and pole of every minor on
//! the positive axis, pushes the isolating windows off q = 1, and takes
//! the widest gap.  The hard Lefschetz determinants ride along as
//! exclusion subjects: their roots bound the certified window too (the
//! Lefschetz package degenerates there), and their isolating windows are
//! reported separately.  Endpoints are maximal up to the width of the
//! refined isolating windows, which is driven below 2^-10.

use crate::metric::QuantumMetric;
use crate::scalar::{Rat, Scalar, ScalarError};
use crate::sturm::{
    isolate_real_roots, refine_window, sign_on_interval, IntPoly, RootWindow, SignVerdict,
};
use num::{One, Signed, Zero};

/// Where a minor lives: the degree, the bidegree block inside it, and the
/// order of the leading principal minor (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorLabel {
    /// Total degree of the Gram block.
    pub degree: usize,
    /// Holomorphic letter count of the block.
    pub holo: usize,
    /// Anti-holomorphic letter count of the block.
    pub anti: usize,
    /// Order of the leading principal minor inside the block.
    pub order: usize,
}

impl std::fmt::Display for MinorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "degree {} bidegree ({},{}) order {}",
            self.degree, self.holo, self.anti, self.order
        )
    }
}

/// One leading principal minor as an exact scalar, with its address.
#[derive(Debug, Clone)]
pub struct MinorSubject {
    /// Where the minor sits.
    pub label: MinorLabel,
    /// The exact minor.
    pub value: Scalar,
}

/// Failures while certifying positivity.
#[derive(Debug, thiserror::Error)]
pub enum PositivityError {
    /// Exact arithmetic failed (complex value where a real one is needed,
    /// or an evaluation pole).
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    /// A minor is identically zero, so the block is degenerate for all q.
    #[error("minor at {label} vanishes identically")]
    DegenerateMinor {
        /// Address of the vanishing minor.
        label: MinorLabel,
    },
    /// A minor is not strictly positive at the pivot q = 1.
    #[error("minor at {label} is not positive at q = 1")]
    NotPositiveAtOne {
        /// Address of the failing minor.
        label: MinorLabel,
    },
    /// A hard Lefschetz determinant vanishes at the pivot q = 1.
    #[error("hard Lefschetz determinant in degree {degree} vanishes at q = 1")]
    LefschetzDegenerateAtOne {
        /// Source degree of the degenerate power.
        degree: usize,
    },
    /// A minor failed its sign certificate on the requested window.
    #[error("minor at {label} is not certifiably positive on the window: {verdict:?}")]
    NotPositiveOnWindow {
        /// Address of the failing minor.
        label: MinorLabel,
        /// The failing verdict with its witness.
        verdict: SignVerdict,
    },
    /// A hard Lefschetz determinant vanishes inside the certified window.
    #[error("hard Lefschetz determinant in degree {degree} vanishes on the window: {verdict:?}")]
    LefschetzVanishesOnWindow {
        /// Source degree of the degenerate power.
        degree: usize,
        /// The failing verdict with its witness.
        verdict: SignVerdict,
    },
    /// The requested window does not contain the pivot q = 1 or is empty.
    #[error("certification window must be an interval of positive numbers around 1")]
    BadWindow,
}

/// A certified positivity interval.
#[derive(Debug, Clone)]
pub struct PositivityCertificate {
    /// Rank of the projective space.
    pub n: usize,
    /// Open interval on which every minor is certified strictly positive
    /// and every hard Lefschetz determinant certified nonvanishing.
    pub window: (Rat, Rat),
    /// Addresses of the certified minors.
    pub minors: Vec<MinorLabel>,
    /// Refined isolating windows of hard Lefschetz determinant roots found
    /// inside the search window (empty when the determinants are root-free
    /// on the positive axis).
    pub exclusions: Vec<(Rat, Rat)>,
}

impl PositivityCertificate {
    /// True iff `q` lies inside the certified open window.
    pub fn contains(&self, q: &Rat) -> bool {
        &self.window.0 < q && q < &self.window.1
    }
}

/// Enumerates the leading principal minors of every bidegree block of
/// every Gram matrix.
///
/// # Arguments
///
/// * `metric` - a certified metric package.
///
/// # Returns
///
/// All minors in degree order, with addresses.
pub fn gram_minor_subjects(metric: &QuantumMetric) -> Vec<MinorSubject> {
    let n = metric.hodge().complex_dimension();
    let mut out = Vec::new();
    for k in 0..=2 * n {
        let basis = metric.hodge().degree_basis(k);
        let gram = metric.gram(k);
        // Bidegree blocks in lexicographic (holo, anti) order.
        let mut blocks: Vec<((usize, usize), Vec<usize>)> = Vec::new();
        for (i, w) in basis.iter().enumerate() {
            let holo = w.iter().filter(|&&x| (x as usize) < n).count();
            let key = (holo, w.len() - holo);
            match blocks.iter_mut().find(|(k0, _)| *k0 == key) {
                Some((_, rows)) => rows.push(i),
                None => blocks.push((key, vec![i])),
            }
        }
        blocks.sort_by_key(|(k0, _)| *k0);
        for ((holo, anti), rows) in blocks {
            for order in 1..=rows.len() {
                let mut sub = crate::linalg::Matrix::zeros(order, order);
                for (a, &ra) in rows[..order].iter().enumerate() {
                    for (b, &rb) in rows[..order].iter().enumerate() {
                        sub.set(a, b, gram.at(ra, rb).clone());
                    }
                }
                out.push(MinorSubject {
                    label: MinorLabel { degree: k, holo, anti, order },
                    value: sub.det(),
                });
            }
        }
    }
    out
}

/// Certifies that every minor is strictly positive and every hard
/// Lefschetz determinant nonvanishing on the given open window.
///
/// # Arguments
///
/// * `metric` - a certified metric package.
/// * `window` - open interval `(a, b)` with `0 < a < 1 < b`.
///
/// # Returns
///
/// The certificate, or the first failing subject with its witness.
pub fn certify_on(
    metric: &QuantumMetric,
    window: &(Rat, Rat),
) -> Result<PositivityCertificate, PositivityError> {
    let one = Rat::one();
    if window.0 <= Rat::new(0.into(), 1.into()) || window.0 >= one || window.1 <= one {
        return Err(PositivityError::BadWindow);
    }
    let subjects = screened_subjects(metric)?;
    let mut minors = Vec::new();
    for subject in &subjects {
        match sign_on_interval(&subject.value, window)? {
            SignVerdict::Positive => minors.push(subject.label.clone()),
            verdict => {
                return Err(PositivityError::NotPositiveOnWindow {
                    label: subject.label.clone(),
                    verdict,
                })
            }
        }
    }
    for (degree, det) in lefschetz_subjects(metric)? {
        match sign_on_interval(&det, window)? {
            SignVerdict::Positive | SignVerdict::Negative => {}
            verdict => {
                return Err(PositivityError::LefschetzVanishesOnWindow { degree, verdict })
            }
        }
    }
    Ok(PositivityCertificate {
        n: metric.hodge().complex_dimension(),
        window: window.clone(),
        minors,
        exclusions: Vec::new(),
    })
}

/// Computes and certifies the maximal positivity window around q = 1
/// inside a search window: the gap between the nearest root or pole of
/// any minor (or root of any hard Lefschetz determinant) below and above
/// the pivot.
///
/// # Arguments
///
/// * `metric` - a certified metric package.
/// * `search` - open interval `(a, b)` with `0 < a < 1 < b` bounding the
///   root hunt.
///
/// # Returns
///
/// The certificate with the widest certifiable window and the Lefschetz
/// exclusion windows found inside the search interval.
pub fn maximal_certificate(
    metric: &QuantumMetric,
    search: &(Rat, Rat),
) -> Result<PositivityCertificate, PositivityError> {
    let one = Rat::one();
    if search.0 <= Rat::new(0.into(), 1.into()) || search.0 >= one || search.1 <= one {
        return Err(PositivityError::BadWindow);
    }
    let subjects = screened_subjects(metric)?;
    let lefschetz = lefschetz_subjects(metric)?;

    // Blocking windows: roots and poles of minors, roots of determinants.
    let mut blockers: Vec<RootWindow> = Vec::new();
    let mut exclusions: Vec<(Rat, Rat)> = Vec::new();
    for subject in &subjects {
        for poly in [
            IntPoly::from_real_laurent(subject.value.num())?,
            IntPoly::from_real_laurent(subject.value.den())?,
        ] {
            for w in isolate_real_roots(&poly, search)?.windows {
                blockers.push(tighten(&poly, w));
            }
        }
    }
    for (_, det) in &lefschetz {
        let poly = IntPoly::from_real_laurent(det.num())?;
        for w in isolate_real_roots(&poly, search)?.windows {
            let w = tighten(&poly, w);
            exclusions.push((w.lo.clone(), w.hi.clone()));
            blockers.push(w);
        }
    }

    // The widest gap around the pivot.
    let mut lo = search.0.clone();
    let mut hi = search.1.clone();
    for w in &blockers {
        if w.hi < one && w.hi > lo {
            lo = w.hi.clone();
        }
        if w.lo > one && w.lo < hi {
            hi = w.lo.clone();
        }
    }

    let mut certificate = certify_on(metric, &(lo, hi))?;
    certificate.exclusions = exclusions;
    Ok(certificate)
}

/// Evaluates every minor at one exact pivot and reports strict positivity.
///
/// # Arguments
///
/// * `metric` - a certified metric package.
/// * `q` - evaluation point, expected positive.
///
/// # Returns
///
/// True iff every minor is strictly positive at `q`; an error if a minor
/// has a pole there.
pub fn positive_at(metric: &QuantumMetric, q: &Rat) -> Result<bool, PositivityError> {
    for subject in gram_minor_subjects(metric) {
        let value = subject.value.eval(q)?;
        if !value.is_real() || !value.re().is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---- Private helpers ----

/// Collects the minors and screens out structural failures: identically
/// zero minors and minors not strictly positive at the pivot q = 1.
fn screened_subjects(metric: &QuantumMetric) -> Result<Vec<MinorSubject>, PositivityError> {
    let one = Rat::one();
    let subjects = gram_minor_subjects(metric);
    for subject in &subjects {
        if subject.value.is_zero() {
            return Err(PositivityError::DegenerateMinor { label: subject.label.clone() });
        }
        let pivot = subject.value.eval(&one)?;
        if !pivot.is_real() || !pivot.re().is_positive() {
            return Err(PositivityError::NotPositiveAtOne { label: subject.label.clone() });
        }
    }
    Ok(subjects)
}

/// The hard Lefschetz determinants with their source degrees, screened to
/// be nonvanishing at the pivot q = 1.
fn lefschetz_subjects(metric: &QuantumMetric) -> Result<Vec<(usize, Scalar)>, PositivityError> {
    let one = Rat::one();
    let dets = metric
        .hodge()
        .lefschetz_determinants()
        .expect("certified Hodge structure has nondegenerate Lefschetz powers");
    let mut out = Vec::new();
    for (degree, det) in dets.into_iter().enumerate() {
        let pivot = det.eval(&one)?;
        if pivot.is_real() && pivot.re().is_zero() {
            return Err(PositivityError::LefschetzDegenerateAtOne { degree });
        }
        out.push((degree, det));
    }
    Ok(out)
}

/// Refines an isolating window until it is narrow (width below 2^-10) and
/// strictly on one side of q = 1.  Termination: the pivot screens ensure
/// no subject vanishes at 1, so the root inside the window is not 1 and
/// bisection eventually separates them.
fn tighten(p: &IntPoly, w: RootWindow) -> RootWindow {
    let one = Rat::one();
    let narrow = Rat::new(1.into(), 1024.into());
    let mut w = refine_window(p, &w, &narrow);
    while !(w.hi < one || w.lo > one) {
        let width = (&w.hi - &w.lo) / Rat::new(4.into(), 1.into());
        w = refine_window(p, &w, &width);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigInt, One};

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    // ==== Certificates ====

    #[test]
    fn rank_one_certificate_fills_the_search_window() {
        // The CP^1 minors are 1, 1, q^-2, 1: root- and pole-free on the
        // positive axis, so the maximal window is the whole search window
        // and there are no exclusions.
        let m = QuantumMetric::new(1).expect("certified metric");
        let cert = maximal_certificate(&m, &(rat(1, 10), rat(10, 1))).expect("certificate");
        assert_eq!(cert.window, (rat(1, 10), rat(10, 1)));
        assert!(cert.exclusions.is_empty());
        assert_eq!(cert.minors.len(), 4);
        assert!(cert.contains(&rat(1, 2)));
        assert!(cert.contains(&rat(2, 1)));
    }

    #[test]
    fn rank_two_certificate_fills_the_search_window() {
        // Every CP^2 minor is a ratio of monomials times products of
        // 1 + q^2 type factors, and both hard Lefschetz determinants are
        // q-powers times such products, so nothing vanishes on the
        // positive axis: the certificate again fills the search window.
        let m = QuantumMetric::new(2).expect("certified metric");
        let cert = maximal_certificate(&m, &(rat(1, 2), rat(2, 1))).expect("certificate");
        assert_eq!(cert.window, (rat(1, 2), rat(2, 1)));
        assert!(cert.exclusions.is_empty());
        assert!(cert.contains(&Rat::one()));
    }

    #[test]
    fn explicit_window_certifies_directly() {
        let m = QuantumMetric::new(2).expect("certified metric");
        let cert = certify_on(&m, &(rat(3, 4), rat(3, 2))).expect("certificate");
        // The blocks have sizes C(2,a) C(2,b) and each block of size s
        // contributes s leading minors, so the count per degree is
        // 1, 2+2, 1+4+1, 2+2, 1, totalling 16.
        assert_eq!(cert.minors.len(), 16);
        assert!(cert.contains(&Rat::one()));
    }

    // ==== Pivot evaluation ====

    #[test]
    fn minors_are_one_at_the_classical_point() {
        // The Grams are orthonormal at q = 1, so every leading principal
        // minor evaluates to exactly 1 there.
        for n in 1..=2usize {
            let m = QuantumMetric::new(n).expect("certified metric");
            for subject in gram_minor_subjects(&m) {
                let v = subject.value.eval(&Rat::one()).expect("no pole at 1");
                assert!(v.is_real() && v.re().is_one(), "minor {} at n = {n}", subject.label);
            }
        }
    }

    #[test]
    fn positivity_holds_at_scattered_pivots() {
        let m = QuantumMetric::new(2).expect("certified metric");
        for q in [rat(1, 5), rat(1, 2), rat(1, 1), rat(3, 2), rat(5, 1)] {
            assert!(positive_at(&m, &q).expect("no pole"), "pivot {q}");
        }
    }

    // ==== Window hygiene ====

    #[test]
    fn windows_must_surround_the_pivot() {
        let m = QuantumMetric::new(1).expect("certified metric");
        assert!(matches!(
            certify_on(&m, &(rat(2, 1), rat(3, 1))),
            Err(PositivityError::BadWindow)
        ));
        assert!(matches!(
            maximal_certificate(&m, &(rat(-1, 1), rat(2, 1))),
            Err(PositivityError::BadWindow)
        ));
    }
}
