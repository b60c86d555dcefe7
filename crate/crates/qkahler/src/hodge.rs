//! Lefschetz decomposition and Hodge star of the quantum exterior fiber.
//!
//! The fundamental form kappa of the fiber algebra is central, so left
//! wedge multiplication L = kappa ^ (-) is well defined on normal forms and
//! carries bidegree (1, 1).  Together with the counting operator
//! H = (k - M) id on degree k (M = n the complex dimension) it forms the
//! raising half of an sl_2 package whose lowering member is produced by the
//! metric module; this module certifies the purely algebraic half:
//!
//! * hard Lefschetz: L^(M-k) maps degree k isomorphically onto degree
//!   2M - k, certified by an exact determinant whose roots feed the
//!   positivity exclusion set downstream;
//! * the Lefschetz decomposition: degree k splits as the direct sum of the
//!   shifted primitive spaces L^j P^(k-2j), where P^m is the kernel of
//!   L^(M-m+1) on degree m refined by bidegree.  The splitting is certified
//!   by assembling the change of basis column by column and inverting it
//!   exactly, so the primitive dimensions obey the classical differences
//!   dim P^m = C(2M, m) - C(2M, m-2);
//! * the Hodge star in the Weil normal form (Weil 1958): on L^j w with w a
//!   primitive (a, b)-form of total degree m,
//!
//!   ```text
//!   star(L^j w) = (-1)^(m(m+1)/2) i^(a-b) (j! / (M-m-j)!) L^(M-m-j) w,
//!   ```
//!
//!   extended C-linearly over the decomposition.  The factorial pair is
//!   pluggable between classical integers and balanced quantum integers;
//!   both collapse to the same operator at q = 1 and both satisfy every
//!   structural identity below (the reciprocal shape of the coefficient is
//!   all the proofs use), so the classical normalization is the default and
//!   is the one the metric package is calibrated against.
//!
//! Construction certifies, degree by degree, that star . star = (-1)^k,
//! that star maps bidegree (a, b) into (M - b, M - a), and that star
//! commutes with the conjugate-linear star structure of the algebra.

use crate::fiberalg::{FiberAlgebra, FiberError, LinComb, Word};
use crate::linalg::Matrix;
use crate::scalar::{balanced_q_factorial, factorial, GaussRat, Rat, Scalar, ScalarError};
use std::collections::BTreeMap;

/// Failures while building or auditing the Hodge structure.
#[derive(Debug, thiserror::Error)]
pub enum HodgeError {
    /// Underlying fiber algebra construction failed.
    #[error(transparent)]
    Fiber(#[from] FiberError),
    /// Exact scalar arithmetic failed (division by a vanishing scalar).
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    /// The Lefschetz summands do not fill out the degree.
    #[error("Lefschetz splitting in degree {degree} assembles {got} vectors, expected {want}")]
    SplittingMismatch {
        /// Degree of the failing component.
        degree: usize,
        /// Number of assembled summand vectors.
        got: usize,
        /// Binomial dimension of the degree.
        want: usize,
    },
    /// The assembled Lefschetz change of basis is singular.
    #[error("Lefschetz change of basis is singular in degree {degree}")]
    Singular {
        /// Degree of the failing component.
        degree: usize,
    },
    /// The Hodge star fails to square to (-1)^k.
    #[error("star . star differs from (-1)^k in degree {degree}")]
    StarSquare {
        /// Degree of the failing component.
        degree: usize,
    },
    /// The Hodge star leaks outside the mirrored bidegree.
    #[error("star image leaves bidegree (M-b, M-a) in degree {degree}")]
    BidegreeViolation {
        /// Degree of the failing component.
        degree: usize,
    },
    /// The Hodge star does not commute with the algebra's star structure.
    #[error("star does not commute with conjugation in degree {degree}")]
    StarCompatibility {
        /// Degree of the failing component.
        degree: usize,
    },
    /// A hard Lefschetz determinant vanishes identically.
    #[error("Lefschetz power has vanishing determinant from degree {degree}")]
    DegenerateLefschetz {
        /// Source degree of the failing power.
        degree: usize,
    },
}

/// Choice of the scalar pair in the Weil star formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeilCoefficients {
    /// Classical integer factorials j! / (M-m-j)!.
    ClassicalFactorial,
    /// Balanced quantum factorials [j]! / [M-m-j]! with [k] = (q^k - q^-k)
    /// / (q - q^-1).
    BalancedQFactorial,
}

/// One shifted primitive summand L^power P^(holo, anti) inside a fixed
/// degree, together with its column range in the assembled change of basis.
#[derive(Debug, Clone)]
pub struct LefschetzSummand {
    /// Lefschetz power j applied to the primitive space.
    pub power: usize,
    /// Holomorphic part of the primitive bidegree.
    pub holo: usize,
    /// Anti-holomorphic part of the primitive bidegree.
    pub anti: usize,
    /// First column of this summand in the change of basis.
    pub offset: usize,
    /// Number of columns (the primitive dimension).
    pub count: usize,
}

/// The certified Lefschetz decomposition of one degree: the summand layout
/// and the invertible change of basis from summand coordinates to the wedge
/// monomial basis.
#[derive(Debug)]
pub struct DegreeDecomposition {
    summands: Vec<LefschetzSummand>,
    basis: Matrix,
    inverse: Matrix,
}

impl DegreeDecomposition {
    /// Summand layout, in the assembly order (increasing Lefschetz power,
    /// then bidegree).
    pub fn summands(&self) -> &[LefschetzSummand] {
        &self.summands
    }

    /// Columns express the summand vectors in the wedge monomial basis.
    pub fn change_of_basis(&self) -> &Matrix {
        &self.basis
    }

    /// Exact inverse of [`Self::change_of_basis`].
    pub fn inverse_change_of_basis(&self) -> &Matrix {
        &self.inverse
    }
}

/// The Kahler package of the fiber: Lefschetz operators, certified
/// primitive decomposition, and the Weil-form Hodge star, all exact.
#[derive(Debug)]
pub struct HodgeStructure {
    n: usize,
    alg: FiberAlgebra,
    weil: WeilCoefficients,
    bases: Vec<Vec<Word>>,
    l_ops: Vec<Matrix>,
    prim: BTreeMap<(usize, usize), Vec<Vec<Scalar>>>,
    decomps: Vec<DegreeDecomposition>,
    stars: Vec<Matrix>,
}

impl HodgeStructure {
    /// Builds the Hodge structure of the CP^n fiber with the default
    /// classical Weil coefficients and certifies every structural identity.
    ///
    /// # Arguments
    ///
    /// * `n` - rank of the projective space (complex dimension M = n).
    ///
    /// # Returns
    ///
    /// The certified structure, or the first failing identity.
    pub fn new(n: usize) -> Result<HodgeStructure, HodgeError> {
        HodgeStructure::with_weil(n, WeilCoefficients::ClassicalFactorial)
    }

    /// Builds the Hodge structure with an explicit Weil coefficient choice.
    ///
    /// # Arguments
    ///
    /// * `n` - rank of the projective space.
    /// * `weil` - scalar family used in the star normal form.
    ///
    /// # Returns
    ///
    /// The certified structure, or the first failing identity.
    pub fn with_weil(n: usize, weil: WeilCoefficients) -> Result<HodgeStructure, HodgeError> {
        let alg = FiberAlgebra::new(n)?;
        let top = 2 * n;
        let bases: Vec<Vec<Word>> = (0..=top).map(|k| alg.theta_basis(k)).collect();
        let dims: Vec<usize> = bases.iter().map(Vec::len).collect();

        // L in every degree: wedge kappa on the left against each basis word.
        let kappa = alg.kappa();
        let mut l_ops = Vec::new();
        for k in 0..=top.saturating_sub(2) {
            let mut m = Matrix::zeros(bases[k + 2].len(), bases[k].len());
            for (j, w) in bases[k].iter().enumerate() {
                let image = alg.wedge(&kappa, &unit(w));
                for (i, c) in alg.coordinates(&image, &bases[k + 2]).into_iter().enumerate() {
                    m.set(i, j, c);
                }
            }
            l_ops.push(m);
        }

        // Primitive spaces P^(a, b) = ker L^(M-m+1) on bidegree (a, b),
        // m = a + b.  When the power overshoots the top degree the whole
        // bidegree is primitive.
        let mut prim: BTreeMap<(usize, usize), Vec<Vec<Scalar>>> = BTreeMap::new();
        for m in 0..=n {
            let r = n - m + 1;
            for a in 0..=m.min(n) {
                let b = m - a;
                if b > n {
                    continue;
                }
                let sub = alg.theta_basis_bidegree(a, b);
                if sub.is_empty() {
                    continue;
                }
                let positions: Vec<usize> = sub
                    .iter()
                    .map(|w| bases[m].iter().position(|v| v == w).expect("bidegree word"))
                    .collect();
                let dim_m = bases[m].len();
                let vectors: Vec<Vec<Scalar>> = if m + 2 * r > top {
                    // L^r lands above the top degree and is the zero map.
                    positions
                        .iter()
                        .map(|&p| {
                            let mut v = vec![Scalar::zero(); dim_m];
                            v[p] = Scalar::one();
                            v
                        })
                        .collect()
                } else {
                    let full = l_power(&l_ops, &dims, m, r);
                    let mut restricted = Matrix::zeros(full.rows(), positions.len());
                    for (j, &p) in positions.iter().enumerate() {
                        for i in 0..full.rows() {
                            restricted.set(i, j, full.at(i, p).clone());
                        }
                    }
                    restricted
                        .kernel_basis()
                        .into_iter()
                        .map(|kv| {
                            let mut v = vec![Scalar::zero(); dim_m];
                            for (j, &p) in positions.iter().enumerate() {
                                v[p] = kv[j].clone();
                            }
                            v
                        })
                        .collect()
                };
                if !vectors.is_empty() {
                    prim.insert((a, b), vectors);
                }
            }
        }

        // Assemble and invert the Lefschetz change of basis in every degree.
        let mut decomps = Vec::new();
        for k in 0..=top {
            let dim = bases[k].len();
            let mut summands = Vec::new();
            let mut columns: Vec<Vec<Scalar>> = Vec::new();
            for j in k.saturating_sub(n)..=k / 2 {
                let m = k - 2 * j;
                let lp = l_power(&l_ops, &dims, m, j);
                for ((a, b), vecs) in &prim {
                    if a + b != m {
                        continue;
                    }
                    let offset = columns.len();
                    for v in vecs {
                        columns.push(lp.apply(v));
                    }
                    summands.push(LefschetzSummand {
                        power: j,
                        holo: *a,
                        anti: *b,
                        offset,
                        count: vecs.len(),
                    });
                }
            }
            if columns.len() != dim {
                return Err(HodgeError::SplittingMismatch {
                    degree: k,
                    got: columns.len(),
                    want: dim,
                });
            }
            let basis = Matrix::from_columns(&columns);
            let inverse = basis.inverse().ok_or(HodgeError::Singular { degree: k })?;
            decomps.push(DegreeDecomposition { summands, basis, inverse });
        }

        // The star in the Weil normal form, assembled summand by summand.
        let mut stars = Vec::new();
        for k in 0..=top {
            let dec = &decomps[k];
            let out_dim = bases[top - k].len();
            let mut image = Matrix::zeros(out_dim, bases[k].len());
            for s in &dec.summands {
                let m = s.holo + s.anti;
                let complement = n - m - s.power;
                let lp = l_power(&l_ops, &dims, m, complement);
                let scalar = &(&parity_sign(m) * &i_power(s.holo as i64 - s.anti as i64))
                    * &weil_scalar(weil, s.power, complement)?;
                let vecs = &prim[&(s.holo, s.anti)];
                for (i, v) in vecs.iter().enumerate() {
                    for (row, val) in lp.apply(v).iter().enumerate() {
                        image.set(row, s.offset + i, &scalar * val);
                    }
                }
            }
            stars.push(image.mul(&dec.inverse));
        }

        let hs = HodgeStructure { n, alg, weil, bases, l_ops, prim, decomps, stars };
        hs.certify_construction()?;
        Ok(hs)
    }

    /// Complex dimension M of the underlying projective space.
    pub fn complex_dimension(&self) -> usize {
        self.n
    }

    /// The underlying fiber algebra.
    pub fn algebra(&self) -> &FiberAlgebra {
        &self.alg
    }

    /// Weil coefficient family the star was built with.
    pub fn weil_mode(&self) -> WeilCoefficients {
        self.weil
    }

    /// Wedge monomial basis of the given degree.
    pub fn degree_basis(&self, k: usize) -> &[Word] {
        &self.bases[k]
    }

    /// The Lefschetz raising operator from degree k to degree k + 2.
    pub fn lefschetz(&self, k: usize) -> &Matrix {
        &self.l_ops[k]
    }

    /// The scalar of the counting operator H = (k - M) id on degree k.
    pub fn counting_scalar(&self, k: usize) -> Scalar {
        Scalar::from_int(k as i64 - self.n as i64)
    }

    /// The certified Lefschetz decomposition of degree k.
    pub fn decomposition(&self, k: usize) -> &DegreeDecomposition {
        &self.decomps[k]
    }

    /// Primitive basis of bidegree (a, b), as coordinate vectors in the
    /// degree a + b wedge monomial basis; empty when the space vanishes.
    pub fn primitive_basis(&self, a: usize, b: usize) -> &[Vec<Scalar>] {
        self.prim.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Dimension of the primitive space of bidegree (a, b).
    pub fn primitive_dimension(&self, a: usize, b: usize) -> usize {
        self.primitive_basis(a, b).len()
    }

    /// The Hodge star from degree k to degree 2M - k in wedge monomial
    /// coordinates.
    pub fn hodge_star(&self, k: usize) -> &Matrix {
        &self.stars[k]
    }

    /// Applies the Hodge star to a homogeneous form of the stated degree.
    ///
    /// # Arguments
    ///
    /// * `k` - degree of the form; every word of `form` must have length k.
    /// * `form` - the form in normal-form coordinates.
    ///
    /// # Returns
    ///
    /// The starred form in degree 2M - k.
    pub fn star_form(&self, k: usize, form: &LinComb) -> LinComb {
        let coords = self.alg.coordinates(form, &self.bases[k]);
        from_coords(&self.stars[k].apply(&coords), &self.bases[2 * self.n - k])
    }

    /// Exact determinants of the hard Lefschetz powers L^(M-k) from degree
    /// k onto degree 2M - k, for k = 0..M.
    ///
    /// # Returns
    ///
    /// One nonzero determinant per source degree, or the first degenerate
    /// power.  The roots of these determinants bound the positivity window
    /// of the metric downstream.
    pub fn lefschetz_determinants(&self) -> Result<Vec<Scalar>, HodgeError> {
        let mut out = Vec::new();
        let dims: Vec<usize> = self.bases.iter().map(Vec::len).collect();
        for k in 0..self.n {
            let det = l_power(&self.l_ops, &dims, k, self.n - k).det();
            if det.is_zero() {
                return Err(HodgeError::DegenerateLefschetz { degree: k });
            }
            out.push(det);
        }
        Ok(out)
    }

    // ---- Private helpers ----

    /// Certifies the star identities on every degree: the square law
    /// star . star = (-1)^k, the bidegree mirror (a, b) -> (M - b, M - a),
    /// and commutation with the algebra's conjugate-linear star.
    fn certify_construction(&self) -> Result<(), HodgeError> {
        let top = 2 * self.n;
        for k in 0..=top {
            let square = self.stars[top - k].mul(&self.stars[k]);
            let mut want = Matrix::identity(self.bases[k].len());
            if k % 2 == 1 {
                want = want.scale(&-&Scalar::one());
            }
            if square != want {
                return Err(HodgeError::StarSquare { degree: k });
            }
            for (col, w) in self.bases[k].iter().enumerate() {
                let (a, b) = bidegree(w, self.n);
                for (row, image_word) in self.bases[top - k].iter().enumerate() {
                    if self.stars[k].at(row, col).is_zero() {
                        continue;
                    }
                    let (a2, b2) = bidegree(image_word, self.n);
                    if a2 != self.n - b || b2 != self.n - a {
                        return Err(HodgeError::BidegreeViolation { degree: k });
                    }
                }
                let lhs = self.alg.star(&self.star_form(k, &unit(w)));
                let rhs = self.star_form(k, &self.alg.star(&unit(w)));
                if lhs != rhs {
                    return Err(HodgeError::StarCompatibility { degree: k });
                }
            }
        }
        Ok(())
    }
}

/// The composed Lefschetz power L^r starting at degree k, with dims the
/// per-degree basis sizes (needed to size the empty composition).
fn l_power(l_ops: &[Matrix], dims: &[usize], k: usize, r: usize) -> Matrix {
    let mut m = Matrix::identity(dims[k]);
    for s in 0..r {
        m = l_ops[k + 2 * s].mul(&m);
    }
    m
}

/// The Weil coefficient j! / (M-m-j)! in the selected family, with the
/// complement power M - m - j passed explicitly.
fn weil_scalar(
    weil: WeilCoefficients,
    power: usize,
    complement: usize,
) -> Result<Scalar, ScalarError> {
    match weil {
        WeilCoefficients::ClassicalFactorial => {
            let ratio = Rat::new(factorial(power as u32), factorial(complement as u32));
            Ok(Scalar::from_gauss(GaussRat::from_rat(ratio)))
        }
        WeilCoefficients::BalancedQFactorial => {
            let den = balanced_q_factorial(complement as u32).inv()?;
            Ok(&balanced_q_factorial(power as u32) * &den)
        }
    }
}

/// (-1)^(m(m+1)/2), the Weil parity sign.
fn parity_sign(m: usize) -> Scalar {
    if (m * (m + 1) / 2) % 2 == 0 {
        Scalar::one()
    } else {
        -&Scalar::one()
    }
}

/// i^e for a possibly negative exponent.
fn i_power(e: i64) -> Scalar {
    match e.rem_euclid(4) {
        0 => Scalar::one(),
        1 => Scalar::i(),
        2 => -&Scalar::one(),
        _ => -&Scalar::i(),
    }
}

/// Number of holomorphic and anti-holomorphic letters of a word.
fn bidegree(w: &Word, n: usize) -> (usize, usize) {
    let holo = w.iter().filter(|&&x| (x as usize) < n).count();
    (holo, w.len() - holo)
}

/// The singleton combination of one word.
fn unit(w: &Word) -> LinComb {
    let mut lc = LinComb::new();
    lc.insert(w.clone(), Scalar::one());
    lc
}

/// Rebuilds a combination from coordinates over a word basis, dropping
/// zeros so equality is structural.
fn from_coords(coords: &[Scalar], basis: &[Word]) -> LinComb {
    let mut lc = LinComb::new();
    for (c, w) in coords.iter().zip(basis) {
        if !c.is_zero() {
            lc.insert(w.clone(), c.clone());
        }
    }
    lc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::binomial;
    use num::One;

    // ==== Construction ====

    #[test]
    fn builds_and_certifies_for_small_ranks() {
        for n in 1..=3 {
            HodgeStructure::new(n).expect("certified Hodge structure");
        }
    }

    #[test]
    fn quantum_factorial_variant_also_certifies() {
        HodgeStructure::with_weil(2, WeilCoefficients::BalancedQFactorial)
            .expect("balanced q-factorial star");
    }

    // ==== Frozen values at rank one ====

    #[test]
    fn rank_one_star_is_frozen() {
        let hs = HodgeStructure::new(1).expect("CP^1 Hodge structure");
        let kappa = hs.algebra().kappa();
        // star(1) = kappa: the volume normalization.
        assert_eq!(hs.star_form(0, &unit(&vec![])), kappa);
        // star(e+) = -i e+ and star(e-) = i e-: the (1,0)/(0,1) phases.
        let ep = unit(&vec![0u8]);
        let em = unit(&vec![1u8]);
        let mut want = LinComb::new();
        want.insert(vec![0u8], -&Scalar::i());
        assert_eq!(hs.star_form(1, &ep), want);
        let mut want = LinComb::new();
        want.insert(vec![1u8], Scalar::i());
        assert_eq!(hs.star_form(1, &em), want);
        // star(kappa) = 1.
        assert_eq!(hs.star_form(2, &kappa), unit(&vec![]));
    }

    // ==== Frozen values at rank two ====

    #[test]
    fn rank_two_star_on_lefschetz_powers_is_frozen() {
        let hs = HodgeStructure::new(2).expect("CP^2 Hodge structure");
        let kappa = hs.algebra().kappa();
        // kappa^2 = L^2(1), so star(1) = (0!/2!) kappa^2 = kappa^2 / 2,
        // star(kappa) = (1!/1!) kappa = kappa, star(kappa^2) = (2!/0!) 1.
        let kappa_sq = hs.algebra().wedge(&kappa, &kappa);
        let mut half_sq = LinComb::new();
        for (w, c) in &kappa_sq {
            half_sq.insert(w.clone(), c * &Scalar::from_frac(1, 2));
        }
        assert_eq!(hs.star_form(0, &unit(&vec![])), half_sq);
        assert_eq!(hs.star_form(2, &kappa), kappa);
        let mut two = LinComb::new();
        two.insert(vec![], Scalar::from_int(2));
        assert_eq!(hs.star_form(4, &kappa_sq), two);
    }

    // ==== Primitive dimensions ====

    #[test]
    fn primitive_dimensions_follow_binomial_differences() {
        for n in 1..=3usize {
            let hs = HodgeStructure::new(n).expect("Hodge structure");
            for m in 0..=n {
                let mut total = 0;
                for a in 0..=m {
                    total += hs.primitive_dimension(a, m - a);
                }
                // dim P^m = C(2M, m) - C(2M, m-2).
                let want = binomial(2 * n as u32, m as u32)
                    - if m >= 2 { binomial(2 * n as u32, m as u32 - 2) } else { 0.into() };
                assert_eq!(num::BigInt::from(total), want, "n = {n}, m = {m}");
            }
        }
    }

    #[test]
    fn rank_two_bidegree_refinement_is_classical() {
        let hs = HodgeStructure::new(2).expect("CP^2 Hodge structure");
        // P^(1,1) excludes the kappa direction: 4 - 1 = 3; the pure
        // bidegrees are entirely primitive.
        assert_eq!(hs.primitive_dimension(1, 1), 3);
        assert_eq!(hs.primitive_dimension(2, 0), 1);
        assert_eq!(hs.primitive_dimension(0, 2), 1);
        assert_eq!(hs.primitive_dimension(1, 0), 2);
        assert_eq!(hs.primitive_dimension(0, 1), 2);
        assert_eq!(hs.primitive_dimension(0, 0), 1);
    }

    #[test]
    fn rank_two_middle_degree_summand_layout() {
        let hs = HodgeStructure::new(2).expect("CP^2 Hodge structure");
        let dec = hs.decomposition(2);
        // Degree 2 = P^(2,0) + P^(1,1) + P^(0,2) + L P^(0,0): 1 + 3 + 1 + 1.
        let counts: Vec<(usize, usize, usize, usize)> = dec
            .summands()
            .iter()
            .map(|s| (s.power, s.holo, s.anti, s.count))
            .collect();
        assert_eq!(
            counts,
            vec![(0, 0, 2, 1), (0, 1, 1, 3), (0, 2, 0, 1), (1, 0, 0, 1)]
        );
    }

    // ==== Hard Lefschetz ====

    #[test]
    fn lefschetz_determinants_are_nonzero() {
        for n in 1..=3usize {
            let hs = HodgeStructure::new(n).expect("Hodge structure");
            let dets = hs.lefschetz_determinants().expect("nonzero determinants");
            assert_eq!(dets.len(), n);
            for det in &dets {
                assert!(!det.is_zero());
                // The classical limit q = 1 is an isomorphism as well.
                assert!(!det.eval(&Rat::one()).expect("no pole at 1").is_zero());
            }
        }
    }

    #[test]
    fn rank_one_lefschetz_determinant_is_one() {
        let hs = HodgeStructure::new(1).expect("CP^1 Hodge structure");
        let dets = hs.lefschetz_determinants().expect("nonzero determinants");
        // L maps 1 to kappa = e+_1 e-_1, the single degree-2 word.
        assert!(dets[0].is_one());
    }

    // ==== Star identities beyond the certified ones ====

    #[test]
    fn classical_and_quantum_stars_agree_at_q_one() {
        let classical = HodgeStructure::new(2).expect("classical star");
        let quantum = HodgeStructure::with_weil(2, WeilCoefficients::BalancedQFactorial)
            .expect("balanced q-factorial star");
        let one = Rat::one();
        for k in 0..=4 {
            let a = classical.hodge_star(k);
            let b = quantum.hodge_star(k);
            for r in 0..a.rows() {
                for c in 0..a.cols() {
                    assert_eq!(
                        a.at(r, c).eval(&one).expect("no pole"),
                        b.at(r, c).eval(&one).expect("no pole"),
                        "degree {k} entry ({r}, {c})"
                    );
                }
            }
        }
    }

    #[test]
    fn star_squares_to_parity_on_every_degree() {
        let hs = HodgeStructure::new(2).expect("CP^2 Hodge structure");
        for k in 0..=4usize {
            let square = hs.hodge_star(4 - k).mul(hs.hodge_star(k));
            let dim = hs.degree_basis(k).len();
            let mut want = Matrix::identity(dim);
            if k % 2 == 1 {
                want = want.scale(&-&Scalar::one());
            }
            assert_eq!(square, want, "degree {k}");
        }
    }
}
