//! Exact scalar arithmetic: rational functions of a positive parameter `q`
//! with Gaussian-rational coefficients.
//!
//! A [`Scalar`] is a quotient `num / den` where `num` is a Laurent polynomial
//! over the Gaussian rationals (elements `a + b*i` with `a`, `b` rational,
//! cf. Gauss 1832) and `den` is a Laurent polynomial with rational
//! coefficients.  Every value is kept in a canonical reduced form:
//!
//! * `den` is real, has lowest exponent zero (a genuine polynomial with a
//!   nonzero constant term), integer coefficients with content one, and a
//!   positive leading coefficient;
//! * `num` and `den` share no nonconstant real polynomial factor.
//!
//! With the denominator pinned real, the reduced pair is unique, so
//! structural equality decides mathematical equality.  Reduction first
//! removes the largest conjugation-stable divisor of the Gaussian gcd
//! (the largest *real* common factor), then rescales the denominator to its
//! primitive integer form.
//!
//! The submodule keeps evaluation exact: a scalar evaluated at a positive
//! rational point yields a Gaussian rational with no rounding.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arbitrary-precision rational number.
pub type Rat = BigRational;

/// Errors raised by exact scalar arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    /// Division by the zero scalar.
    #[error("division by zero scalar")]
    DivisionByZero,
    /// Evaluation at a point where the denominator vanishes.
    #[error("denominator vanishes at the evaluation point {0}")]
    PoleAtPoint(String),
    /// Evaluation of a Laurent polynomial with negative exponents at zero.
    #[error("negative q-exponent evaluated at q = 0")]
    NegativeExponentAtZero,
    /// A quantum integer with a non-positive number of terms.
    #[error("quantum integer needs at least one term, got {0}")]
    EmptyQuantumInteger(i64),
    /// An operation that requires a real scalar met a nonzero imaginary part.
    #[error("expected a real scalar, found nonzero imaginary part")]
    NotReal,
    /// An interval query with an empty or inverted window.
    #[error("empty or inverted interval window")]
    EmptyWindow,
}

// ---- Gaussian rationals ----

/// A Gaussian rational `re + im*i` with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    re: Rat,
    im: Rat,
}

impl GaussRat {
    /// Builds `re + im*i`.
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    /// The zero element.
    pub fn zero() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::zero() }
    }

    /// The unit element.
    pub fn one() -> Self {
        GaussRat { re: Rat::one(), im: Rat::zero() }
    }

    /// The imaginary unit `i`.
    pub fn i() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::one() }
    }

    /// Embeds an integer.
    pub fn from_int(n: i64) -> Self {
        GaussRat { re: Rat::from_integer(BigInt::from(n)), im: Rat::zero() }
    }

    /// Embeds a rational `p/r`; `r` must be nonzero.
    pub fn from_frac(p: i64, r: i64) -> Self {
        GaussRat {
            re: Rat::new(BigInt::from(p), BigInt::from(r)),
            im: Rat::zero(),
        }
    }

    /// Embeds a real rational.
    pub fn from_rat(r: Rat) -> Self {
        GaussRat { re: r, im: Rat::zero() }
    }

    /// Real part.
    pub fn re(&self) -> &Rat {
        &self.re
    }

    /// Imaginary part.
    pub fn im(&self) -> &Rat {
        &self.im
    }

    /// True iff the value is zero.
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// True iff the imaginary part vanishes.
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Complex conjugate `re - im*i`.
    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Squared modulus `re^2 + im^2` (a real rational).
    pub fn norm_sq(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; the value must be nonzero.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n = self.norm_sq();
        Ok(GaussRat { re: &self.re / &n, im: -(&self.im / &n) })
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl fmt::Display for GaussRat {
    /// Canonical text: `a/b` when real, `a/b+c/d*i` or `a/b-c/d*i` otherwise
    /// (pure imaginary values keep the explicit `0` real part).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}*i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

// ---- Laurent polynomials ----

/// A Laurent polynomial in `q` over the Gaussian rationals.
///
/// Stored sparsely as exponent -> coefficient with no zero entries, so the
/// representation is canonical and ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Laurent {
    terms: BTreeMap<i64, GaussRat>,
}

impl Laurent {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new() }
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Laurent::monomial(GaussRat::one(), 0)
    }

    /// The single term `c * q^n` (the zero polynomial when `c` is zero).
    pub fn monomial(c: GaussRat, n: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(n, c);
        }
        Laurent { terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing
    /// duplicates and dropping zeros.
    pub fn from_terms(pairs: impl IntoIterator<Item = (i64, GaussRat)>) -> Self {
        let mut terms: BTreeMap<i64, GaussRat> = BTreeMap::new();
        for (n, c) in pairs {
            if c.is_zero() {
                continue;
            }
            let entry = terms.entry(n).or_insert_with(GaussRat::zero);
            *entry = &*entry + &c;
            if entry.is_zero() {
                terms.remove(&n);
            }
        }
        Laurent { terms }
    }

    /// True iff the polynomial is zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True iff the polynomial is the constant `1`.
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.get(&0).map(|c| c == &GaussRat::one()).unwrap_or(false)
    }

    /// True iff all coefficients are real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    /// Lowest exponent, or `None` for the zero polynomial.
    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Highest exponent, or `None` for the zero polynomial.
    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Coefficient of `q^n` (zero when absent).
    pub fn coeff(&self, n: i64) -> GaussRat {
        self.terms.get(&n).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Iterates over `(exponent, coefficient)` pairs in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (&i64, &GaussRat)> {
        self.terms.iter()
    }

    /// Multiplies by `q^k` (shifts all exponents by `k`).
    pub fn shift(&self, k: i64) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(n, c)| (n + k, c.clone())).collect(),
        }
    }

    /// Scales by a Gaussian rational.
    pub fn scale(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return Laurent::zero();
        }
        Laurent {
            terms: self.terms.iter().map(|(n, a)| (*n, a * c)).collect(),
        }
    }

    /// Coefficient-wise complex conjugation (fixes `q`).
    pub fn conj(&self) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(n, c)| (*n, c.conj())).collect(),
        }
    }

    /// Substitutes `q -> q^-1` (reverses exponents).
    pub fn invert_q(&self) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(n, c)| (-n, c.clone())).collect(),
        }
    }

    /// Evaluates at a nonzero rational point.
    pub fn eval(&self, q0: &Rat) -> Result<GaussRat, ScalarError> {
        let mut acc = GaussRat::zero();
        for (n, c) in &self.terms {
            let p = rat_pow(q0, *n)?;
            acc = &acc + &c.scale_rat(&p);
        }
        Ok(acc)
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
}

impl GaussRat {
    /// Scales by a real rational.
    fn scale_rat(&self, r: &Rat) -> GaussRat {
        GaussRat { re: &self.re * r, im: &self.im * r }
    }
}

/// Exact `q0^n` for integer `n`; `q0` must be nonzero when `n < 0`.
fn rat_pow(q0: &Rat, n: i64) -> Result<Rat, ScalarError> {
    if n == 0 {
        return Ok(Rat::one());
    }
    if q0.is_zero() && n < 0 {
        return Err(ScalarError::NegativeExponentAtZero);
    }
    let mut base = if n < 0 { q0.recip() } else { q0.clone() };
    let mut e = n.unsigned_abs();
    let mut acc = Rat::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    Ok(acc)
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        let mut terms = self.terms.clone();
        for (n, c) in &rhs.terms {
            let entry = terms.entry(*n).or_insert_with(GaussRat::zero);
            *entry = &*entry + c;
            if entry.is_zero() {
                terms.remove(n);
            }
        }
        Laurent { terms }
    }
}

impl Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        self + &(-rhs)
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(n, c)| (*n, -c)).collect(),
        }
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut terms: BTreeMap<i64, GaussRat> = BTreeMap::new();
        for (n, a) in &self.terms {
            for (m, b) in &rhs.terms {
                let c = a * b;
                if c.is_zero() {
                    continue;
                }
                let entry = terms.entry(n + m).or_insert_with(GaussRat::zero);
                *entry = &*entry + &c;
                if entry.is_zero() {
                    terms.remove(&(n + m));
                }
            }
        }
        Laurent { terms }
    }
}

impl fmt::Display for Laurent {
    /// Canonical text: terms in ascending exponent joined with ` + `, each
    /// as `coeff*q^n` with the standard abbreviations (`q^0` omitted, `q^1`
    /// as `q`, unit real coefficients folded, complex coefficients
    /// parenthesized).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in &self.terms {
            let (sep, coeff) = if first {
                ("", c.clone())
            } else if c.is_real() && c.re().is_negative() {
                (" - ", -c)
            } else {
                (" + ", c.clone())
            };
            first = false;
            let coeff_txt = if !coeff.is_real() {
                format!("({})", coeff)
            } else {
                format!("{}", coeff)
            };
            match (*n, coeff_txt.as_str()) {
                (0, _) => write!(f, "{}{}", sep, coeff_txt)?,
                (1, "1") => write!(f, "{}q", sep)?,
                (1, _) => write!(f, "{}{}*q", sep, coeff_txt)?,
                (_, "1") => write!(f, "{}q^{}", sep, n)?,
                _ => write!(f, "{}{}*q^{}", sep, coeff_txt, n)?,
            }
        }
        Ok(())
    }
}

// ---- Dense polynomial helpers for gcd computations ----

/// Dense polynomial over the Gaussian rationals, ascending coefficients,
/// trailing zeros trimmed.  Internal carrier for Euclidean gcd.
#[derive(Debug, Clone, PartialEq)]
struct Dense(Vec<GaussRat>);

impl Dense {
    fn from_laurent_shifted(p: &Laurent) -> (Self, i64) {
        // Factors q^min out so the result is an honest polynomial with a
        // nonzero constant term.
        match p.min_exp() {
            None => (Dense(vec![]), 0),
            Some(m) => {
                let deg = p.max_exp().unwrap() - m;
                let mut v = vec![GaussRat::zero(); (deg + 1) as usize];
                for (n, c) in p.iter() {
                    v[(n - m) as usize] = c.clone();
                }
                (Dense(v), m)
            }
        }
    }

    fn to_laurent(&self, shift: i64) -> Laurent {
        Laurent::from_terms(
            self.0
                .iter()
                .enumerate()
                .map(|(k, c)| (k as i64 + shift, c.clone())),
        )
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        // Callers guarantee nonzero.
        self.0.len() - 1
    }

    fn trim(mut self) -> Self {
        while self.0.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.0.pop();
        }
        self
    }

    fn conj(&self) -> Self {
        Dense(self.0.iter().map(|c| c.conj()).collect())
    }

    fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.0.last().unwrap().inv().unwrap();
        Dense(self.0.iter().map(|c| c * &lead).collect())
    }

    /// Remainder of `self` by nonzero `d` (standard long division).
    fn rem(&self, d: &Dense) -> Dense {
        let mut r = self.clone().trim();
        let dd = d.clone().trim();
        let lead_inv = dd.0.last().unwrap().inv().unwrap();
        while !r.is_zero() && r.degree() >= dd.degree() {
            let k = r.degree() - dd.degree();
            let factor = &r.0[r.degree()] * &lead_inv;
            for (j, c) in dd.0.iter().enumerate() {
                let sub = &factor * c;
                r.0[j + k] = &r.0[j + k] - &sub;
            }
            r = r.trim();
        }
        r
    }

    /// Exact quotient `self / d`; panics if the division is inexact
    /// (callers only divide by known factors).
    fn div_exact(&self, d: &Dense) -> Dense {
        let mut r = self.clone().trim();
        let dd = d.clone().trim();
        assert!(!dd.is_zero(), "division by zero polynomial");
        let lead_inv = dd.0.last().unwrap().inv().unwrap();
        if r.is_zero() {
            return Dense(vec![]);
        }
        assert!(r.degree() >= dd.degree(), "inexact polynomial division");
        let mut qv = vec![GaussRat::zero(); r.degree() - dd.degree() + 1];
        while !r.is_zero() && r.degree() >= dd.degree() {
            let k = r.degree() - dd.degree();
            let factor = &r.0[r.degree()] * &lead_inv;
            qv[k] = factor.clone();
            for (j, c) in dd.0.iter().enumerate() {
                let sub = &factor * c;
                r.0[j + k] = &r.0[j + k] - &sub;
            }
            r = r.trim();
        }
        assert!(r.is_zero(), "inexact polynomial division");
        Dense(qv).trim()
    }

    /// Monic gcd by the Euclidean algorithm.
    fn gcd(&self, other: &Dense) -> Dense {
        let mut a = self.clone().trim();
        let mut b = other.clone().trim();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

// ---- Scalars ----

/// A rational function of `q` in canonical reduced form.
///
/// See the module documentation for the normal-form invariants.  Structural
/// equality on this type decides mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    num: Laurent,
    den: Laurent,
}

impl Scalar {
    /// The zero scalar.
    pub fn zero() -> Self {
        Scalar { num: Laurent::zero(), den: Laurent::one() }
    }

    /// The unit scalar.
    pub fn one() -> Self {
        Scalar { num: Laurent::one(), den: Laurent::one() }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar { num: Laurent::monomial(GaussRat::i(), 0), den: Laurent::one() }
    }

    /// The monomial `q^n`.
    pub fn q_pow(n: i64) -> Self {
        Scalar { num: Laurent::monomial(GaussRat::one(), n), den: Laurent::one() }
    }

    /// The variable `q`.
    pub fn q() -> Self {
        Scalar::q_pow(1)
    }

    /// Embeds an integer constant.
    pub fn from_int(n: i64) -> Self {
        Scalar { num: Laurent::monomial(GaussRat::from_int(n), 0), den: Laurent::one() }
    }

    /// Embeds the rational constant `p/r` (`r` nonzero).
    pub fn from_frac(p: i64, r: i64) -> Self {
        Scalar {
            num: Laurent::monomial(GaussRat::from_frac(p, r), 0),
            den: Laurent::one(),
        }
    }

    /// Embeds a Gaussian rational constant.
    pub fn from_gauss(c: GaussRat) -> Self {
        Scalar { num: Laurent::monomial(c, 0), den: Laurent::one() }
    }

    /// Embeds a Laurent polynomial.
    pub fn from_laurent(p: Laurent) -> Self {
        Scalar { num: p, den: Laurent::one() }
    }

    /// Builds `num / den` in canonical form.
    ///
    /// # Arguments
    /// * `num` - numerator Laurent polynomial.
    /// * `den` - denominator Laurent polynomial; must be nonzero.
    ///
    /// # Returns
    /// The reduced scalar, or [`ScalarError::DivisionByZero`] when `den` is
    /// the zero polynomial.
    pub fn ratio(num: Laurent, den: Laurent) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::reduced(num, den))
    }

    /// Canonical reduction; `den` must be nonzero.
    fn reduced(num: Laurent, den: Laurent) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }

        // A real denominator is required for the canonical form; realify by
        // the conjugate when direct construction handed in a complex one.
        let (num, den) = if den.is_real() {
            (num, den)
        } else {
            let dc = den.conj();
            (&num * &dc, &den * &dc)
        };

        // Split off monomial parts: the denominator keeps exponent zero as
        // its lowest term, the numerator carries the residual power of q.
        let (mut n_poly, n_shift) = Dense::from_laurent_shifted(&num);
        let (mut d_poly, d_shift) = Dense::from_laurent_shifted(&den);
        let shift = n_shift - d_shift;

        // Largest real common factor: the conjugation-stable part of the
        // Gaussian gcd.  Dividing it out leaves the denominator real.
        if d_poly.degree() > 0 {
            let g = n_poly.gcd(&d_poly);
            if !g.is_zero() && g.degree() > 0 {
                let real_g = g.gcd(&g.conj());
                if real_g.degree() > 0 {
                    n_poly = n_poly.div_exact(&real_g);
                    d_poly = d_poly.div_exact(&real_g);
                }
            }
        }

        // Denominator scale: primitive integer coefficients, positive lead.
        // Every denominator coefficient is real at this point.
        let mut lcm_den = BigInt::one();
        for c in &d_poly.0 {
            lcm_den = num::integer::lcm(lcm_den, c.re().denom().clone());
        }
        let mut ints: Vec<BigInt> = d_poly
            .0
            .iter()
            .map(|c| (c.re() * Rat::from_integer(lcm_den.clone())).to_integer())
            .collect();
        let mut content = BigInt::zero();
        for v in &ints {
            content = num::integer::gcd(content, v.clone());
        }
        if ints.last().map(|v| v.is_negative()).unwrap_or(false) {
            content = -content;
        }
        for v in ints.iter_mut() {
            *v = &*v / &content;
        }
        // num := num * (lcm_den / content) to compensate the den rescale.
        let compensate = Rat::new(lcm_den, content);
        let n_laurent = n_poly
            .to_laurent(shift)
            .scale(&GaussRat::from_rat(compensate));
        let d_laurent = Laurent::from_terms(
            ints.into_iter()
                .enumerate()
                .map(|(k, v)| (k as i64, GaussRat::from_rat(Rat::from_integer(v)))),
        );
        Scalar { num: n_laurent, den: d_laurent }
    }

    /// Numerator of the canonical form.
    pub fn num(&self) -> &Laurent {
        &self.num
    }

    /// Denominator of the canonical form (real, constant term nonzero).
    pub fn den(&self) -> &Laurent {
        &self.den
    }

    /// True iff the scalar is zero.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True iff the scalar is one.
    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True iff numerator and denominator are both real.
    pub fn is_real(&self) -> bool {
        self.num.is_real()
    }

    /// Coefficient-wise complex conjugation `i -> -i` (fixes `q`).
    pub fn conjugate(&self) -> Self {
        Scalar { num: self.num.conj(), den: self.den.clone() }
    }

    /// Substitutes `q -> q^-1`.
    pub fn invert_q(&self) -> Self {
        Scalar::reduced(self.num.invert_q(), self.den.invert_q())
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::reduced(self.den.clone(), self.num.clone()))
    }

    /// Evaluates at a rational point (`q0 > 0` for the geometric range,
    /// though any nonpole rational works).
    pub fn eval(&self, q0: &Rat) -> Result<GaussRat, ScalarError> {
        let d = self.den.eval(q0)?;
        if d.is_zero() {
            return Err(ScalarError::PoleAtPoint(q0.to_string()));
        }
        let n = self.num.eval(q0)?;
        Ok(&n * &d.inv()?)
    }

    /// The real part as a scalar (conjugation-average).
    pub fn real_part(&self) -> Self {
        let conj = self.conjugate();
        &(self + &conj) * &Scalar::from_frac(1, 2)
    }

    /// Checks the scalar is real and returns it unchanged.
    pub fn expect_real(&self) -> Result<&Self, ScalarError> {
        if self.is_real() {
            Ok(self)
        } else {
            Err(ScalarError::NotReal)
        }
    }

    /// Canonical text form, e.g. `(q^-1 + q) / (q^2 + 1)`.
    pub fn canonical_text(&self) -> String {
        if self.den.is_one() {
            format!("{}", self.num)
        } else {
            format!("({}) / ({})", self.num, self.den)
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.den == rhs.den {
            // Common fast path; equal (often unit) denominators.
            return Scalar::reduced(&self.num + &rhs.num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        Scalar::reduced(num, &self.den * &rhs.den)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar { num: &self.num * &rhs.num, den: Laurent::one() };
        }
        Scalar::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        // Panics on a zero divisor; use `Scalar::inv` for checked division.
        assert!(!rhs.is_zero(), "scalar division by zero");
        Scalar::reduced(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.canonical_text())
    }
}

// ---- Quantum integers and combinatorics ----

/// The one-parameter quantum integer `(k)_{q^step} = 1 + q^step + ... +
/// q^{step*(k-1)}`.
///
/// # Arguments
/// * `k` - number of terms; must be at least 1.
/// * `step` - exponent increment per term (may be negative).
///
/// # Returns
/// The Laurent polynomial sum, or an error when `k < 1`.
pub fn quantum_integer(k: i64, step: i64) -> Result<Scalar, ScalarError> {
    if k < 1 {
        return Err(ScalarError::EmptyQuantumInteger(k));
    }
    let mut p = Laurent::zero();
    for j in 0..k {
        p = &p + &Laurent::monomial(GaussRat::one(), step * j);
    }
    Ok(Scalar::from_laurent(p))
}

/// The balanced quantum integer `[k]_q = (q^k - q^-k)/(q - q^-1)`, extended
/// oddly to all integers (`[-k] = -[k]`, `[0] = 0`).
pub fn balanced_quantum_integer(k: i64) -> Scalar {
    if k == 0 {
        return Scalar::zero();
    }
    let a = k.abs();
    // [a]_q = q^{1-a} + q^{3-a} + ... + q^{a-1}.
    let p = Laurent::from_terms((0..a).map(|j| (1 - a + 2 * j, GaussRat::one())));
    let s = Scalar::from_laurent(p);
    if k < 0 {
        -&s
    } else {
        s
    }
}

/// `n!` as an exact integer; `n` must be small enough to enumerate.
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 2..=n {
        acc *= BigInt::from(j);
    }
    acc
}

/// The balanced q-factorial `[n]_q! = [1][2]...[n]` (`[0]! = 1`).
pub fn balanced_q_factorial(n: u32) -> Scalar {
    let mut acc = Scalar::one();
    for j in 1..=n {
        acc = &acc * &balanced_quantum_integer(j as i64);
    }
    acc
}

/// Binomial coefficient `C(n, k)` as an exact integer.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Parses a rational literal `p/r` or `p` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rat> {
    let text = text.trim();
    let (num_txt, den_txt) = match text.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num_txt.parse().ok()?;
    let den: BigInt = den_txt.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rat::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Scalar {
        Scalar::q()
    }

    // ==== Gaussian rational arithmetic ====

    #[test]
    fn gauss_field_ops() {
        let a = GaussRat::new(Rat::new(1.into(), 2.into()), Rat::new(3.into(), 4.into()));
        let b = GaussRat::new(Rat::new((-2).into(), 1.into()), Rat::new(1.into(), 3.into()));
        // (1/2 + 3/4 i)(-2 + 1/3 i) = (-1 - 1/4) + (1/6 - 3/2) i = -5/4 - 4/3 i.
        let p = &a * &b;
        assert_eq!(p.re(), &Rat::new((-5).into(), 4.into()));
        assert_eq!(p.im(), &Rat::new((-4).into(), 3.into()));
        // Division undoes multiplication.
        let back = &p * &b.inv().unwrap();
        assert_eq!(back, a);
        // Conjugation is a ring involution.
        assert_eq!(p.conj(), &a.conj() * &b.conj());
    }

    #[test]
    fn gauss_display_forms() {
        assert_eq!(GaussRat::from_frac(3, 2).to_string(), "3/2");
        assert_eq!(GaussRat::new(Rat::zero(), Rat::one()).to_string(), "0+1*i");
        let z = GaussRat::new(Rat::new(1.into(), 2.into()), Rat::new((-1).into(), 3.into()));
        assert_eq!(z.to_string(), "1/2-1/3*i");
    }

    // ==== Laurent polynomials ====

    #[test]
    fn laurent_product_and_display() {
        // (q^-1 + q)(q - q^-1) = q^2 - q^-2.
        let a = Laurent::from_terms([(-1, GaussRat::one()), (1, GaussRat::one())]);
        let b = Laurent::from_terms([(1, GaussRat::one()), (-1, GaussRat::from_int(-1))]);
        let p = &a * &b;
        assert_eq!(p, Laurent::from_terms([(2, GaussRat::one()), (-2, GaussRat::from_int(-1))]));
        assert_eq!(p.to_string(), "-1*q^-2 + q^2");
    }

    #[test]
    fn laurent_eval_exact() {
        // q^-2 + 2 at q = 3/2 is 4/9 + 2 = 22/9.
        let p = Laurent::from_terms([(-2, GaussRat::one()), (0, GaussRat::from_int(2))]);
        let v = p.eval(&Rat::new(3.into(), 2.into())).unwrap();
        assert_eq!(v, GaussRat::from_frac(22, 9));
    }

    // ==== Scalar canonical form ====

    #[test]
    fn scalar_reduction_cancels_common_factor() {
        // (q^2 - 1) / (q - 1) reduces to q + 1.
        let num = Laurent::from_terms([(2, GaussRat::one()), (0, GaussRat::from_int(-1))]);
        let den = Laurent::from_terms([(1, GaussRat::one()), (0, GaussRat::from_int(-1))]);
        let s = Scalar::ratio(num, den).unwrap();
        assert_eq!(s, &q() + &Scalar::one());
        assert!(s.den().is_one());
    }

    #[test]
    fn scalar_denominator_canonical_scale() {
        // 1 / (2q - 2) keeps the primitive positive denominator q - 1 and
        // folds the 1/2 into the numerator.
        let num = Laurent::one();
        let den = Laurent::from_terms([(1, GaussRat::from_int(2)), (0, GaussRat::from_int(-2))]);
        let s = Scalar::ratio(num, den).unwrap();
        assert_eq!(s.den().to_string(), "-1 + q");
        assert_eq!(s.num().to_string(), "1/2");
    }

    #[test]
    fn scalar_denominator_lowest_exponent_zero() {
        // 1 / (q^-3 (q-1)) has denominator q - 1 and numerator q^3.
        let num = Laurent::one();
        let den = Laurent::from_terms([(-2, GaussRat::one()), (-3, GaussRat::from_int(-1))]);
        let s = Scalar::ratio(num, den).unwrap();
        assert_eq!(s.den().min_exp(), Some(0));
        assert_eq!(s.num().to_string(), "q^3");
    }

    #[test]
    fn scalar_complex_denominator_realified() {
        // 1 / (q - i) = (q + i) / (q^2 + 1): canonical den must be real.
        let den = Laurent::from_terms([(1, GaussRat::one()), (0, -&GaussRat::i())]);
        let s = Scalar::ratio(Laurent::one(), den).unwrap();
        assert!(s.den().is_real());
        assert_eq!(s.den().to_string(), "1 + q^2");
        assert_eq!(s.num().to_string(), "(0+1*i) + q");
    }

    #[test]
    fn scalar_field_axioms_spot() {
        let a = Scalar::ratio(
            Laurent::from_terms([(1, GaussRat::one()), (0, GaussRat::i())]),
            Laurent::from_terms([(0, GaussRat::from_int(1)), (2, GaussRat::from_int(3))]),
        )
        .unwrap();
        let b = &q() - &Scalar::from_frac(1, 2);
        let c = Scalar::ratio(
            Laurent::from_terms([(-2, GaussRat::from_int(5))]),
            Laurent::from_terms([(0, GaussRat::one()), (1, GaussRat::one())]),
        )
        .unwrap();
        // Distributivity and associativity in reduced form.
        assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        // Inverses.
        assert!((&(&a / &b) * &b).eq(&a));
        assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
    }

    #[test]
    fn scalar_eval_matches_structure() {
        // s = (q^2 + i q) / (q + 2) at q = 1/3: (1/9 + i/3)/(7/3) = 1/21 + i/7.
        let s = Scalar::ratio(
            Laurent::from_terms([(2, GaussRat::one()), (1, GaussRat::i())]),
            Laurent::from_terms([(1, GaussRat::one()), (0, GaussRat::from_int(2))]),
        )
        .unwrap();
        let v = s.eval(&Rat::new(1.into(), 3.into())).unwrap();
        assert_eq!(v, GaussRat::new(Rat::new(1.into(), 21.into()), Rat::new(1.into(), 7.into())));
    }

    #[test]
    fn scalar_eval_detects_pole() {
        let s = Scalar::ratio(
            Laurent::one(),
            Laurent::from_terms([(1, GaussRat::one()), (0, GaussRat::from_int(-1))]),
        )
        .unwrap();
        assert!(matches!(s.eval(&Rat::one()), Err(ScalarError::PoleAtPoint(_))));
    }

    #[test]
    fn conjugation_is_involutive_and_multiplicative() {
        let s = Scalar::ratio(
            Laurent::from_terms([(0, GaussRat::i()), (3, GaussRat::from_frac(2, 7))]),
            Laurent::from_terms([(0, GaussRat::one()), (1, GaussRat::from_int(4))]),
        )
        .unwrap();
        let t = &q() + &Scalar::i();
        assert_eq!(s.conjugate().conjugate(), s);
        assert_eq!((&s * &t).conjugate(), &s.conjugate() * &t.conjugate());
    }

    // ==== Quantum integers ====

    #[test]
    fn quantum_integer_geometric_form() {
        // (3)_{q^-2} = 1 + q^-2 + q^-4.
        let s = quantum_integer(3, -2).unwrap();
        assert_eq!(s.num().to_string(), "q^-4 + q^-2 + 1");
        // At q = 1/2: 1 + 4 + 16 = 21.
        let v = s.eval(&Rat::new(1.into(), 2.into())).unwrap();
        assert_eq!(v, GaussRat::from_int(21));
        assert!(quantum_integer(0, 2).is_err());
    }

    #[test]
    fn balanced_quantum_integer_identities() {
        // [2]_q = q^-1 + q, [3]_q = q^-2 + 1 + q^2.
        assert_eq!(balanced_quantum_integer(2).num().to_string(), "q^-1 + q");
        assert_eq!(balanced_quantum_integer(3).num().to_string(), "q^-2 + 1 + q^2");
        // Odd extension.
        assert_eq!(balanced_quantum_integer(-3), -&balanced_quantum_integer(3));
        // [a][b+1] - [b][a+1] = [a-b] with a = 5, b = 2.
        let lhs = &(&balanced_quantum_integer(5) * &balanced_quantum_integer(3))
            - &(&balanced_quantum_integer(2) * &balanced_quantum_integer(6));
        assert_eq!(lhs, balanced_quantum_integer(3));
        // (k)_{q^-2} = q^{1-k} [k]_q with k = 4.
        let lhs = quantum_integer(4, -2).unwrap();
        let rhs = &Scalar::q_pow(-3) * &balanced_quantum_integer(4);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(8, 4), BigInt::from(70));
        assert_eq!(binomial(4, 7), BigInt::zero());
        // [3]! = [1][2][3] = (q^-1 + q)(q^-2 + 1 + q^2).
        let f3 = balanced_q_factorial(3);
        let expect = &balanced_quantum_integer(2) * &balanced_quantum_integer(3);
        assert_eq!(f3, expect);
    }

    #[test]
    fn parse_rational_literals() {
        assert_eq!(parse_rational("9/10"), Some(Rat::new(9.into(), 10.into())));
        assert_eq!(parse_rational("-3"), Some(Rat::from_integer((-3).into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
