//! Exact real-root isolation and interval sign certification.
//!
//! Root counting uses Sturm chains (Sturm 1835) over primitive integer
//! polynomials: the chain is the negated Euclidean remainder sequence of the
//! squarefree part and its derivative, with every member rescaled by a
//! positive rational to primitive integer coefficients (positive scaling
//! preserves all sign data).  Bisection splits a window until each piece
//! holds one distinct root; a midpoint that lands exactly on a root is
//! deflated out, so Sturm counts always run between non-root endpoints.
//!
//! Sign certification of a rational function on an open interval reduces to
//! root isolation of the cleared numerator and denominator: no roots and no
//! poles inside the window pin the sign to the sign at any interior sample
//! point, and any strict verdict ships with that certificate.  A mixed
//! verdict carries an explicit witness (a sign-change sample pair, or the
//! isolating interval of an even-multiplicity touch point).

use crate::scalar::{Laurent, Rat, Scalar, ScalarError};
use num::bigint::BigInt;
use num::{One, Signed, Zero};

/// A univariate polynomial with integer coefficients, ascending order,
/// trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    /// Builds from ascending coefficients, trimming trailing zeros.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut v = coeffs;
        while v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
        IntPoly(v)
    }

    /// Builds from small integers (test convenience).
    pub fn from_ints(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Clears a *real* Laurent polynomial to `q^shift * IntPoly / positive`,
    /// returning the polynomial part.  For `q > 0` the dropped factors are
    /// strictly positive, so all sign questions transfer.
    ///
    /// # Returns
    /// The integer polynomial, or [`ScalarError::NotReal`] when a
    /// coefficient has a nonzero imaginary part.
    pub fn from_real_laurent(p: &Laurent) -> Result<Self, ScalarError> {
        if !p.is_real() {
            return Err(ScalarError::NotReal);
        }
        let shift = p.min_exp().unwrap_or(0);
        let mut lcm = BigInt::one();
        for (_, c) in p.iter() {
            lcm = num::integer::lcm(lcm, c.re().denom().clone());
        }
        let deg = match (p.min_exp(), p.max_exp()) {
            (Some(a), Some(b)) => (b - a) as usize,
            _ => 0,
        };
        let mut v = vec![BigInt::zero(); deg + 1];
        for (n, c) in p.iter() {
            v[(n - shift) as usize] = (c.re() * Rat::from_integer(lcm.clone())).to_integer();
        }
        Ok(IntPoly::new(v))
    }

    /// True iff the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// Ascending coefficients.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + Rat::from_integer(c.clone());
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> IntPoly {
        if self.0.len() <= 1 {
            return IntPoly(vec![]);
        }
        IntPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// Divides by content; sign of the leading coefficient is kept.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut content = BigInt::zero();
        for c in &self.0 {
            content = num::integer::gcd(content, c.clone());
        }
        IntPoly(self.0.iter().map(|c| c / &content).collect())
    }

    /// The squarefree part `p / gcd(p, p')`, primitive.
    pub fn squarefree(&self) -> IntPoly {
        if self.is_zero() || self.degree() == 0 {
            return self.primitive();
        }
        let g = rat_gcd(&to_rat(self), &to_rat(&self.derivative()));
        if g.len() <= 1 {
            return self.primitive();
        }
        let q = rat_div_exact(&to_rat(self), &g);
        from_rat(&q).primitive()
    }

    /// Deflates an exact rational root `r = p/s`: divides by `(s*q - p)`.
    /// Precondition: `self(r) == 0`.
    fn deflate(&self, root: &Rat) -> IntPoly {
        let lin = vec![-Rat::from_integer(root.numer().clone()),
                       Rat::from_integer(root.denom().clone())];
        let q = rat_div_exact(&to_rat(self), &lin);
        from_rat(&q).primitive()
    }
}

// ---- Rational-coefficient polynomial helpers (internal) ----

fn to_rat(p: &IntPoly) -> Vec<Rat> {
    p.0.iter().map(|c| Rat::from_integer(c.clone())).collect()
}

fn from_rat(p: &[Rat]) -> IntPoly {
    let mut lcm = BigInt::one();
    for c in p {
        lcm = num::integer::lcm(lcm, c.denom().clone());
    }
    IntPoly::new(
        p.iter()
            .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
            .collect(),
    )
}

fn rat_trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

/// Remainder of `a` by nonzero `b`.
fn rat_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = rat_trim(a.to_vec());
    let b = rat_trim(b.to_vec());
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let k = r.len() - b.len();
        let f = r.last().unwrap() / &lead;
        for (j, c) in b.iter().enumerate() {
            let sub = &f * c;
            r[j + k] = &r[j + k] - &sub;
        }
        r = rat_trim(r);
    }
    r
}

/// Exact quotient; panics if inexact (internal use on known factors).
fn rat_div_exact(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = rat_trim(a.to_vec());
    let b = rat_trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    if r.is_empty() {
        return vec![];
    }
    assert!(r.len() >= b.len(), "inexact polynomial division");
    let lead = b.last().unwrap().clone();
    let mut q = vec![Rat::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let k = r.len() - b.len();
        let f = r.last().unwrap() / &lead;
        q[k] = f.clone();
        for (j, c) in b.iter().enumerate() {
            let sub = &f * c;
            r[j + k] = &r[j + k] - &sub;
        }
        r = rat_trim(r);
    }
    assert!(r.is_empty(), "inexact polynomial division");
    rat_trim(q)
}

/// Monic gcd over the rationals.
fn rat_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut x = rat_trim(a.to_vec());
    let mut y = rat_trim(b.to_vec());
    while !y.is_empty() {
        let r = rat_rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in x.iter_mut() {
            *c = &*c / &lead;
        }
    }
    x
}

// ---- Sturm chains ----

/// The Sturm chain of a squarefree primitive integer polynomial.
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    /// Builds the chain `p, p', -rem(...)` with primitive positive rescaling
    /// at every step.
    pub fn new(squarefree: &IntPoly) -> Self {
        let mut chain = vec![squarefree.primitive()];
        if squarefree.degree() >= 1 {
            chain.push(squarefree.derivative().primitive());
            loop {
                let n = chain.len();
                let r = rat_rem(&to_rat(&chain[n - 2]), &to_rat(&chain[n - 1]));
                if rat_trim(r.clone()).is_empty() {
                    break;
                }
                let neg: Vec<Rat> = r.iter().map(|c| -c.clone()).collect();
                chain.push(from_rat(&neg).primitive());
            }
        }
        SturmChain { chain }
    }

    /// Sign-variation count of the chain at `x`.
    fn variations(&self, x: &Rat) -> usize {
        let mut count = 0;
        let mut last: Option<bool> = None; // sign encoded as is_positive
        for p in &self.chain {
            let v = p.eval(x);
            if v.is_zero() {
                continue;
            }
            let s = v.is_positive();
            if let Some(prev) = last {
                if prev != s {
                    count += 1;
                }
            }
            last = Some(s);
        }
        count
    }

    /// Number of distinct real roots in the open interval `(a, b)`.
    /// Precondition: neither endpoint is a root.
    pub fn count_roots(&self, a: &Rat, b: &Rat) -> usize {
        debug_assert!(!self.chain[0].eval(a).is_zero());
        debug_assert!(!self.chain[0].eval(b).is_zero());
        self.variations(a) - self.variations(b)
    }
}

// ---- Root isolation ----

/// An isolating window for one distinct real root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootWindow {
    /// Lower bound (inclusive when `exact`).
    pub lo: Rat,
    /// Upper bound.
    pub hi: Rat,
    /// True iff `lo == hi` is the root itself.
    pub exact: bool,
}

impl RootWindow {
    /// True iff `x` lies inside the window (or equals an exact root).
    pub fn contains(&self, x: &Rat) -> bool {
        if self.exact {
            &self.lo == x
        } else {
            &self.lo < x && x < &self.hi
        }
    }
}

/// The result of isolating all distinct roots of a polynomial in a window.
#[derive(Debug, Clone)]
pub struct RootIsolation {
    /// Disjoint isolating windows in ascending order, one distinct root each.
    pub windows: Vec<RootWindow>,
}

impl RootIsolation {
    /// Number of distinct roots found.
    pub fn count(&self) -> usize {
        self.windows.len()
    }
}

/// Isolates the distinct real roots of `p` inside the open window `(a, b)`.
///
/// # Arguments
/// * `p` - nonzero integer polynomial (need not be squarefree; multiplicity
///   is erased by taking the squarefree part).
/// * `window` - open interval with `window.0 < window.1`.
///
/// # Returns
/// Disjoint isolating windows in ascending order, one distinct root each.
/// Roots on the window boundary are excluded (the window is open).  Passing
/// the zero polynomial is a programming error and panics; a vanishing
/// certificate subject must be screened upstream.
pub fn isolate_real_roots(
    p: &IntPoly,
    window: &(Rat, Rat),
) -> Result<RootIsolation, ScalarError> {
    if window.0 >= window.1 {
        return Err(ScalarError::EmptyWindow);
    }
    assert!(!p.is_zero(), "cannot isolate roots of the zero polynomial");
    let mut sf = p.squarefree();
    let (a, b) = (window.0.clone(), window.1.clone());

    // Deflate roots sitting exactly on the window boundary: the window is
    // open, so they are not reported, and removing them legitimizes Sturm
    // counts from the endpoints.
    while sf.degree() >= 1 && sf.eval(&a).is_zero() {
        sf = sf.deflate(&a);
    }
    while sf.degree() >= 1 && sf.eval(&b).is_zero() {
        sf = sf.deflate(&b);
    }

    // Bisection over disjoint segments.  A midpoint that is itself a root
    // is recorded exactly and deflated, so segment endpoints stay non-roots.
    let mut exact_roots: Vec<Rat> = Vec::new();
    let mut open_windows: Vec<RootWindow> = Vec::new();
    let mut chain = SturmChain::new(&sf);
    let two = Rat::from_integer(2.into());
    let mut stack = vec![(a, b)];
    while let Some((lo, hi)) = stack.pop() {
        if sf.degree() == 0 {
            continue; // everything deflated away
        }
        let n = chain.count_roots(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            open_windows.push(RootWindow { lo, hi, exact: false });
            continue;
        }
        let mid = (&lo + &hi) / &two;
        if sf.eval(&mid).is_zero() {
            exact_roots.push(mid.clone());
            sf = sf.deflate(&mid);
            chain = SturmChain::new(&sf);
        }
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }

    let mut windows = open_windows;
    windows.extend(exact_roots.into_iter().map(|r| RootWindow {
        lo: r.clone(),
        hi: r,
        exact: true,
    }));
    windows.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(RootIsolation { windows })
}

/// Shrinks an isolating window (for the squarefree part of `p`) below
/// `width` by bisection; exact windows are returned unchanged.
pub fn refine_window(p: &IntPoly, w: &RootWindow, width: &Rat) -> RootWindow {
    if w.exact {
        return w.clone();
    }
    let sf = p.squarefree();
    let mut lo = w.lo.clone();
    let mut hi = w.hi.clone();
    // A strict isolating window of a squarefree polynomial has a sign
    // change across it; keeping the low-end sign steers the bisection.
    let sign_lo = sf.eval(&lo).is_positive();
    let two = Rat::from_integer(2.into());
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        let v = sf.eval(&mid);
        if v.is_zero() {
            return RootWindow { lo: mid.clone(), hi: mid, exact: true };
        }
        if v.is_positive() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RootWindow { lo, hi, exact: false }
}

/// Refines the given windows until they are pairwise strictly separated and
/// keep a strict gap to both window edges.  Needed before gap sampling: the
/// bisection tree can hand back touching windows.
fn separate_windows(p: &IntPoly, windows: &[RootWindow], edge: &(Rat, Rat)) -> Vec<RootWindow> {
    let mut ws: Vec<RootWindow> = windows.to_vec();
    let two = Rat::from_integer(2.into());
    let shrink = |w: &RootWindow| -> RootWindow {
        let target = (&w.hi - &w.lo) / &two;
        refine_window(p, w, &target)
    };
    loop {
        let mut changed = false;
        if !ws.is_empty() {
            if !ws[0].exact && ws[0].lo <= edge.0 {
                let t = shrink(&ws[0]);
                ws[0] = t;
                changed = true;
            }
            let n = ws.len();
            if !ws[n - 1].exact && ws[n - 1].hi >= edge.1 {
                let t = shrink(&ws[n - 1]);
                ws[n - 1] = t;
                changed = true;
            }
        }
        for k in 0..ws.len().saturating_sub(1) {
            if ws[k].hi >= ws[k + 1].lo {
                // Distinct roots always separate eventually; exact windows
                // are points and never shrink (nor need to).
                if !ws[k].exact {
                    let t = shrink(&ws[k]);
                    ws[k] = t;
                    changed = true;
                }
                if !ws[k + 1].exact {
                    let t = shrink(&ws[k + 1]);
                    ws[k + 1] = t;
                    changed = true;
                }
            }
        }
        if !changed {
            return ws;
        }
    }
}

// ---- Interval sign certification ----

/// Witness data for a non-single-signed verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MixedWitness {
    /// Two interior sample points with strictly opposite signs.
    SignChange {
        /// Point where the function is strictly negative.
        neg_at: Rat,
        /// Point where the function is strictly positive.
        pos_at: Rat,
    },
    /// The function vanishes inside the window without changing sign
    /// (even-multiplicity root); the isolating window is the witness.
    TouchesZero {
        /// Isolating window of the touch point.
        lo: Rat,
        /// Upper bound of the isolating window.
        hi: Rat,
    },
    /// The function is identically zero.
    IdenticallyZero,
}

/// Certified sign of a real rational function on an open interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignVerdict {
    /// Strictly positive on the whole open interval (no numerator roots, no
    /// poles, positive at an interior sample).
    Positive,
    /// Strictly negative on the whole open interval.
    Negative,
    /// Not of a single strict sign; carries a witness.
    Mixed(MixedWitness),
    /// The denominator vanishes inside the interval.
    HasPole {
        /// Isolating window of a pole.
        lo: Rat,
        /// Upper bound of the isolating window.
        hi: Rat,
    },
}

/// Certifies the sign of a real scalar on the open interval `window`.
///
/// # Arguments
/// * `f` - a scalar with real coefficients (the reduced form guarantees
///   numerator and denominator share no real factor, so no spurious poles).
/// * `window` - open interval `(a, b)` with `0 < a < b` expected for the
///   geometric parameter range (positivity of `q` is what lets monomial
///   factors be dropped).
///
/// # Returns
/// A [`SignVerdict`]; strict verdicts are certificates (root- and
/// pole-freeness plus one exact interior sample), mixed verdicts carry
/// explicit witnesses.
pub fn sign_on_interval(f: &Scalar, window: &(Rat, Rat)) -> Result<SignVerdict, ScalarError> {
    f.expect_real()?;
    if window.0 >= window.1 {
        return Err(ScalarError::EmptyWindow);
    }
    if f.is_zero() {
        return Ok(SignVerdict::Mixed(MixedWitness::IdenticallyZero));
    }
    let num = IntPoly::from_real_laurent(f.num())?;
    let den = IntPoly::from_real_laurent(f.den())?;

    // Poles first: the reduced form has no common real factors, so any
    // denominator root inside the window is a genuine pole.
    let poles = isolate_real_roots(&den, window)?;
    if let Some(w) = poles.windows.first() {
        return Ok(SignVerdict::HasPole { lo: w.lo.clone(), hi: w.hi.clone() });
    }

    let roots = isolate_real_roots(&num, window)?;
    let sign_at = |x: &Rat| -> i8 {
        let v = num.eval(x) * den.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    };
    if roots.windows.is_empty() {
        let mid = (&window.0 + &window.1) / Rat::from_integer(2.into());
        return Ok(match sign_at(&mid) {
            1 => SignVerdict::Positive,
            -1 => SignVerdict::Negative,
            _ => unreachable!("sample point cannot be a root: none isolated"),
        });
    }

    // Refine the windows until every gap between them (and to the window
    // edges) is nonempty, then sample one interior point per gap.  Gap
    // samples avoid every root window, so their signs are strict.
    let ws = separate_windows(&num, &roots.windows, window);
    let two = Rat::from_integer(2.into());
    let mut samples: Vec<Rat> = Vec::new();
    samples.push((&window.0 + &ws[0].lo) / &two);
    for k in 0..ws.len() - 1 {
        samples.push((&ws[k].hi + &ws[k + 1].lo) / &two);
    }
    samples.push((ws.last().unwrap().hi.clone() + &window.1) / &two);

    let signed: Vec<(Rat, i8)> = samples
        .into_iter()
        .map(|x| {
            let s = sign_at(&x);
            debug_assert!(s != 0, "gap sample landed on a root");
            (x, s)
        })
        .collect();
    for k in 0..signed.len() - 1 {
        if signed[k].1 != signed[k + 1].1 {
            let (neg, pos) = if signed[k].1 < 0 {
                (signed[k].0.clone(), signed[k + 1].0.clone())
            } else {
                (signed[k + 1].0.clone(), signed[k].0.clone())
            };
            return Ok(SignVerdict::Mixed(MixedWitness::SignChange { neg_at: neg, pos_at: pos }));
        }
    }
    // All gap samples agree: every interior root is an even-order touch.
    let w = &ws[0];
    Ok(SignVerdict::Mixed(MixedWitness::TouchesZero { lo: w.lo.clone(), hi: w.hi.clone() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{quantum_integer, GaussRat};

    fn rat(p: i64, r: i64) -> Rat {
        Rat::new(p.into(), r.into())
    }

    // ==== Root isolation against hand-counted examples ====

    #[test]
    fn isolates_quadratic_roots() {
        // (q - 1)(q - 3) = q^2 - 4q + 3: both roots in (0, 4).
        let p = IntPoly::from_ints(&[3, -4, 1]);
        let iso = isolate_real_roots(&p, &(rat(0, 1), rat(4, 1))).unwrap();
        assert_eq!(iso.count(), 2);
        assert!(iso.windows[0].contains(&rat(1, 1)));
        assert!(iso.windows[1].contains(&rat(3, 1)));
    }

    #[test]
    fn open_window_excludes_boundary_roots() {
        // Roots at 1 and 2; the open window (1, 2) contains neither.
        let p = IntPoly::from_ints(&[2, -3, 1]);
        let iso = isolate_real_roots(&p, &(rat(1, 1), rat(2, 1))).unwrap();
        assert_eq!(iso.count(), 0);
    }

    #[test]
    fn multiplicity_is_erased() {
        // (q - 2)^3 has one distinct root.
        let p = IntPoly::from_ints(&[-8, 12, -6, 1]);
        let iso = isolate_real_roots(&p, &(rat(0, 1), rat(5, 1))).unwrap();
        assert_eq!(iso.count(), 1);
        assert!(iso.windows[0].contains(&rat(2, 1)));
    }

    #[test]
    fn exact_midpoint_root_is_deflated() {
        // Roots 1, 3/2, 2 inside (1/2, 5/2): 3/2 is hit by bisection.
        // 2(q-1)(q-3/2)(q-2) = 2q^3 - 9q^2 + 13q - 6.
        let p = IntPoly::from_ints(&[-6, 13, -9, 2]);
        let iso = isolate_real_roots(&p, &(rat(1, 2), rat(5, 2))).unwrap();
        assert_eq!(iso.count(), 3);
        let exact: Vec<_> = iso.windows.iter().filter(|w| w.exact).collect();
        assert!(exact.iter().any(|w| w.lo == rat(3, 2)));
    }

    #[test]
    fn dense_cluster_is_separated() {
        // Chebyshev-flavored cluster: roots of (q-1)(q-101/100)(q-102/100).
        let a = vec![Rat::one(), rat(101, 100), rat(102, 100)];
        let mut coeffs = vec![Rat::one()];
        for r in &a {
            let mut next = vec![Rat::zero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] = &next[k + 1] + c;
                next[k] = &next[k] - &(c * r);
            }
            coeffs = next;
        }
        let p = super::from_rat(&coeffs);
        let iso = isolate_real_roots(&p, &(rat(1, 2), rat(2, 1))).unwrap();
        assert_eq!(iso.count(), 3);
        for (w, r) in iso.windows.iter().zip(a.iter()) {
            assert!(w.contains(r));
        }
    }

    #[test]
    fn refine_window_narrows() {
        let p = IntPoly::from_ints(&[-2, 0, 1]); // q^2 - 2, root sqrt(2)
        let iso = isolate_real_roots(&p, &(rat(1, 1), rat(2, 1))).unwrap();
        let w = refine_window(&p, &iso.windows[0], &rat(1, 1000));
        assert!(&w.hi - &w.lo <= rat(1, 1000));
        // sqrt(2) = 1.41421...: the window must still contain it.
        assert!(w.lo < rat(14143, 10000));
        assert!(w.hi > rat(14142, 10000));
    }

    // ==== Sign certification ====

    #[test]
    fn certifies_positive_quantum_integer() {
        // (3)_{q^-2} is strictly positive on (1/2, 2).
        let s = quantum_integer(3, -2).unwrap();
        let v = sign_on_interval(&s, &(rat(1, 2), rat(2, 1))).unwrap();
        assert_eq!(v, SignVerdict::Positive);
    }

    #[test]
    fn detects_sign_change_with_witness() {
        // q - 1 changes sign at 1 inside (1/2, 2).
        let s = &Scalar::q() - &Scalar::one();
        match sign_on_interval(&s, &(rat(1, 2), rat(2, 1))).unwrap() {
            SignVerdict::Mixed(MixedWitness::SignChange { neg_at, pos_at }) => {
                assert!(neg_at < Rat::one());
                assert!(pos_at > Rat::one());
            }
            v => panic!("expected sign change, got {:?}", v),
        }
    }

    #[test]
    fn detects_even_touch_with_witness() {
        // (q - 1)^2 touches zero at 1 without changing sign.
        let one = &Scalar::q() - &Scalar::one();
        let s = &one * &one;
        match sign_on_interval(&s, &(rat(1, 2), rat(2, 1))).unwrap() {
            SignVerdict::Mixed(MixedWitness::TouchesZero { lo, hi }) => {
                assert!(lo <= Rat::one() && Rat::one() <= hi);
            }
            v => panic!("expected touch witness, got {:?}", v),
        }
    }

    #[test]
    fn detects_pole() {
        // 1 / (q - 1) has a pole at 1.
        let s = (&Scalar::q() - &Scalar::one()).inv().unwrap();
        match sign_on_interval(&s, &(rat(1, 2), rat(2, 1))).unwrap() {
            SignVerdict::HasPole { lo, hi } => {
                assert!(lo <= Rat::one() && Rat::one() <= hi);
            }
            v => panic!("expected pole, got {:?}", v),
        }
    }

    #[test]
    fn negative_verdict_and_monomial_factors() {
        // -q^-3 (strictly negative for q > 0; the monomial is dropped by
        // clearing, the constant sign survives).
        let s = -&Scalar::q_pow(-3);
        let v = sign_on_interval(&s, &(rat(1, 2), rat(2, 1))).unwrap();
        assert_eq!(v, SignVerdict::Negative);
    }

    #[test]
    fn rejects_complex_and_empty_window() {
        let s = Scalar::i();
        assert!(sign_on_interval(&s, &(rat(1, 2), rat(2, 1))).is_err());
        let t = Scalar::one();
        assert_eq!(
            sign_on_interval(&t, &(rat(2, 1), rat(1, 2))),
            Err(ScalarError::EmptyWindow)
        );
    }

    #[test]
    fn identically_zero_witness() {
        let v = sign_on_interval(&Scalar::zero(), &(rat(1, 2), rat(2, 1))).unwrap();
        assert_eq!(v, SignVerdict::Mixed(MixedWitness::IdenticallyZero));
    }

    // ==== Clearing real Laurent data ====

    #[test]
    fn clearing_real_laurent() {
        // q^-2/3 + 5q clears to 1 + 15 q^3 (shift q^-2, scale 3).
        let p = Laurent::from_terms([
            (-2, GaussRat::from_frac(1, 3)),
            (1, GaussRat::from_int(5)),
        ]);
        let cleared = IntPoly::from_real_laurent(&p).unwrap();
        assert_eq!(cleared, IntPoly::from_ints(&[1, 0, 0, 15]));
    }
}
