//! The quantum Fubini-Study metric on the exterior fiber.
//!
//! The pairing is built from the Hodge star by the classical recipe: for
//! homogeneous forms of equal degree,
//!
//! ```text
//!   g(w, v) = eps(star(w ^ star_alg(v))),
//! ```
//!
//! where star_alg is the conjugate-linear star of the algebra, star the
//! Weil-form Hodge star, and eps reads off the scalar part (only the top
//! degree contributes, and the top component is one dimensional, so eps is
//! one exact coefficient).  The pairing is conjugate linear in the second
//! slot, Hermitian, vanishes across degrees and across bidegrees, and its
//! Gram matrices turn out real, which makes the dual Lefschetz block
//!
//! ```text
//!   Lambda = G_k^-1 L^H G_(k+2)
//! ```
//!
//! the honest adjoint of L (the reality is certified during construction,
//! since the adjoint identity depends on it).  The triple (L, Lambda, H)
//! then satisfies the sl_2 commutation relations [L, Lambda] = H,
//! [H, L] = 2 L, [H, Lambda] = -2 Lambda exactly; the residual matrices
//! are exposed for the certification suite.
//!
//! In degree one the same pairing collapses to a closed formula,
//!
//! ```text
//!   g(w, v) = (+/- i / (M-1)!) eps(star(w ^ kappa^(M-1) ^ star_alg(v))),
//! ```
//!
//! with the sign keyed to the chirality of the second argument (plus for
//! holomorphic, minus for anti-holomorphic); the agreement of the two
//! routes on all of degree one is part of the test suite.

use crate::fiberalg::{FiberAlgebra, LinComb};
use crate::hodge::{HodgeError, HodgeStructure, WeilCoefficients};
use crate::linalg::Matrix;
use crate::scalar::{factorial, GaussRat, Rat, Scalar};

/// Failures while building or auditing the metric.
#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    /// The underlying Hodge structure failed to certify.
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    /// A Gram matrix is singular, so no dual Lefschetz operator exists.
    #[error("Gram matrix in degree {degree} is singular")]
    SingularGram {
        /// Degree of the failing block.
        degree: usize,
    },
    /// A Gram matrix is not Hermitian.
    #[error("Gram matrix in degree {degree} is not Hermitian")]
    NotHermitian {
        /// Degree of the failing block.
        degree: usize,
    },
    /// A Gram matrix has an entry with nonzero imaginary part.
    #[error("Gram matrix in degree {degree} has a complex entry")]
    ComplexGram {
        /// Degree of the failing block.
        degree: usize,
    },
    /// The pairing leaks across bidegrees inside one degree.
    #[error("pairing does not vanish across bidegrees in degree {degree}")]
    BidegreeLeak {
        /// Degree of the failing block.
        degree: usize,
    },
    /// The pairing leaks across distinct degrees.
    #[error("pairing does not vanish between degrees {lower} and {upper}")]
    DegreeLeak {
        /// Smaller of the two degrees.
        lower: usize,
        /// Larger of the two degrees.
        upper: usize,
    },
}

/// The exact metric package: Gram matrices in every degree and the dual
/// Lefschetz operators they induce.
#[derive(Debug)]
pub struct QuantumMetric {
    hodge: HodgeStructure,
    grams: Vec<Matrix>,
    gram_inverses: Vec<Matrix>,
    lambdas: Vec<Matrix>,
}

impl QuantumMetric {
    /// Builds the metric of the CP^n fiber over the default classical Weil
    /// star and certifies Hermitian symmetry, reality, bidegree and degree
    /// orthogonality, and invertibility of every Gram block.
    ///
    /// # Arguments
    ///
    /// * `n` - rank of the projective space.
    ///
    /// # Returns
    ///
    /// The certified metric, or the first failing property.
    pub fn new(n: usize) -> Result<QuantumMetric, MetricError> {
        QuantumMetric::with_weil(n, WeilCoefficients::ClassicalFactorial)
    }

    /// Builds the metric over an explicit Weil coefficient choice.
    ///
    /// # Arguments
    ///
    /// * `n` - rank of the projective space.
    /// * `weil` - scalar family used in the underlying Hodge star.
    ///
    /// # Returns
    ///
    /// The certified metric, or the first failing property.
    pub fn with_weil(n: usize, weil: WeilCoefficients) -> Result<QuantumMetric, MetricError> {
        let hodge = HodgeStructure::with_weil(n, weil)?;
        let top = 2 * n;

        let mut grams = Vec::new();
        let mut gram_inverses = Vec::new();
        for k in 0..=top {
            let basis = hodge.degree_basis(k);
            let mut g = Matrix::zeros(basis.len(), basis.len());
            for (i, wi) in basis.iter().enumerate() {
                for (j, wj) in basis.iter().enumerate() {
                    g.set(i, j, pairing_of(&hodge, &unit(wi), &unit(wj)));
                }
            }
            if g != g.conj_transpose() {
                return Err(MetricError::NotHermitian { degree: k });
            }
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    if !g.at(i, j).is_real() {
                        return Err(MetricError::ComplexGram { degree: k });
                    }
                }
            }
            let inv = g.inverse().ok_or(MetricError::SingularGram { degree: k })?;
            grams.push(g);
            gram_inverses.push(inv);
        }

        // Lambda from degree k to k - 2, stored at index k - 2.
        let mut lambdas = Vec::new();
        for k in 2..=top {
            let l = hodge.lefschetz(k - 2);
            let block = gram_inverses[k - 2].mul(&l.conj_transpose()).mul(&grams[k]);
            lambdas.push(block);
        }

        let metric = QuantumMetric { hodge, grams, gram_inverses, lambdas };
        metric.certify_construction()?;
        Ok(metric)
    }

    /// The underlying Hodge structure.
    pub fn hodge(&self) -> &HodgeStructure {
        &self.hodge
    }

    /// The underlying fiber algebra.
    pub fn algebra(&self) -> &FiberAlgebra {
        self.hodge.algebra()
    }

    /// The metric pairing g(w, v), conjugate linear in `v`.  The arguments
    /// may be inhomogeneous; components of distinct degree pair to zero.
    ///
    /// # Arguments
    ///
    /// * `omega` - first argument, linear slot.
    /// * `nu` - second argument, conjugate-linear slot.
    ///
    /// # Returns
    ///
    /// The exact scalar value of the pairing.
    pub fn pairing(&self, omega: &LinComb, nu: &LinComb) -> Scalar {
        pairing_of(&self.hodge, omega, nu)
    }

    /// The Gram matrix of the wedge monomial basis in one degree.
    pub fn gram(&self, k: usize) -> &Matrix {
        &self.grams[k]
    }

    /// Exact inverse of [`Self::gram`].
    pub fn gram_inverse(&self, k: usize) -> &Matrix {
        &self.gram_inverses[k]
    }

    /// The dual Lefschetz operator from degree k down to k - 2, the metric
    /// adjoint of L (k ranges over 2..=2M).
    pub fn dual_lefschetz(&self, k: usize) -> &Matrix {
        &self.lambdas[k - 2]
    }

    /// Residual matrices of [L, Lambda] - H on every degree; all zero when
    /// the sl_2 relation holds exactly.
    pub fn sl2_residuals(&self) -> Vec<Matrix> {
        let top = 2 * self.hodge.complex_dimension();
        let mut out = Vec::new();
        for k in 0..=top {
            let dim = self.grams[k].rows();
            let mut acc = Matrix::zeros(dim, dim);
            if k >= 2 {
                acc = acc.add(&self.hodge.lefschetz(k - 2).mul(self.dual_lefschetz(k)));
            }
            if k + 2 <= top {
                acc = acc.sub(&self.dual_lefschetz(k + 2).mul(self.hodge.lefschetz(k)));
            }
            let h = Matrix::identity(dim).scale(&self.hodge.counting_scalar(k));
            out.push(acc.sub(&h));
        }
        out
    }

    /// Residual matrices of [H, L] - 2 L (per source degree k -> k + 2) and
    /// [H, Lambda] + 2 Lambda (per source degree k -> k - 2); all zero when
    /// the counting relations hold exactly.
    pub fn weight_residuals(&self) -> (Vec<Matrix>, Vec<Matrix>) {
        let top = 2 * self.hodge.complex_dimension();
        let two = Scalar::from_int(2);
        let mut raising = Vec::new();
        for k in 0..=top.saturating_sub(2) {
            let l = self.hodge.lefschetz(k);
            let spread = &self.hodge.counting_scalar(k + 2) - &self.hodge.counting_scalar(k);
            raising.push(l.scale(&(&spread - &two)));
        }
        let mut lowering = Vec::new();
        for k in 2..=top {
            let lam = self.dual_lefschetz(k);
            let spread = &self.hodge.counting_scalar(k - 2) - &self.hodge.counting_scalar(k);
            lowering.push(lam.scale(&(&spread + &two)));
        }
        (raising, lowering)
    }

    /// The closed degree-one form of the pairing, with the chirality-keyed
    /// prefactor +/- i / (M-1)!.  Both arguments must be homogeneous of
    /// degree one; the result agrees with [`Self::pairing`] exactly.
    ///
    /// # Arguments
    ///
    /// * `omega` - first argument, linear slot.
    /// * `nu` - second argument, conjugate-linear slot.
    ///
    /// # Returns
    ///
    /// The exact scalar value of the degree-one pairing.
    pub fn degree_one_pairing(&self, omega: &LinComb, nu: &LinComb) -> Scalar {
        let n = self.hodge.complex_dimension();
        let alg = self.hodge.algebra();
        // kappa^(M-1) once.
        let mut power = unit(&vec![]);
        for _ in 0..n - 1 {
            power = alg.wedge(&alg.kappa(), &power);
        }
        let inv_fact =
            Scalar::from_gauss(GaussRat::from_rat(Rat::new(1.into(), factorial(n as u32 - 1))));
        let mut total = Scalar::zero();
        for (chirality, prefactor) in [
            (true, &Scalar::i() * &inv_fact),
            (false, &(-&Scalar::i()) * &inv_fact),
        ] {
            let part: LinComb = nu
                .iter()
                .filter(|(w, _)| w.len() == 1 && ((w[0] as usize) < n) == chirality)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect();
            if part.is_empty() {
                continue;
            }
            let starred = alg.star(&part);
            let wedge = alg.wedge(omega, &alg.wedge(&power, &starred));
            let value = scalar_part(&self.hodge.star_form(2 * n, &top_component(&wedge, 2 * n)));
            total = &total + &(&prefactor * &value);
        }
        total
    }

    // ---- Private helpers ----

    /// Certifies bidegree orthogonality inside each degree and vanishing of
    /// the pairing across distinct degrees.
    fn certify_construction(&self) -> Result<(), MetricError> {
        let n = self.hodge.complex_dimension();
        let top = 2 * n;
        for k in 0..=top {
            let basis = self.hodge.degree_basis(k);
            for (i, wi) in basis.iter().enumerate() {
                for (j, wj) in basis.iter().enumerate() {
                    if bidegree(wi, n) != bidegree(wj, n)
                        && !self.grams[k].at(i, j).is_zero()
                    {
                        return Err(MetricError::BidegreeLeak { degree: k });
                    }
                }
            }
        }
        for k in 0..=top {
            for l in k + 1..=top {
                for wi in self.hodge.degree_basis(k) {
                    for wj in self.hodge.degree_basis(l) {
                        let forward = self.pairing(&unit(wi), &unit(wj));
                        let backward = self.pairing(&unit(wj), &unit(wi));
                        if !forward.is_zero() || !backward.is_zero() {
                            return Err(MetricError::DegreeLeak { lower: k, upper: l });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The pairing pipeline over a Hodge structure: wedge the first argument
/// with the star of the conjugate of the second, then star the top
/// component down to a scalar.
fn pairing_of(hodge: &HodgeStructure, omega: &LinComb, nu: &LinComb) -> Scalar {
    let alg = hodge.algebra();
    let top = 2 * hodge.complex_dimension();
    let starred = alg.star(nu);
    // Star degree by degree (the input may be inhomogeneous).
    let mut inner = LinComb::new();
    for k in 0..=top {
        let component = component_of(&starred, k);
        if component.is_empty() {
            continue;
        }
        for (w, c) in hodge.star_form(k, &component) {
            let slot = inner.entry(w).or_insert_with(Scalar::zero);
            *slot = &*slot + &c;
        }
    }
    let wedge = alg.wedge(omega, &inner);
    scalar_part(&hodge.star_form(top, &top_component(&wedge, top)))
}

/// The component of words of exactly the given length.
fn component_of(lc: &LinComb, k: usize) -> LinComb {
    lc.iter().filter(|(w, _)| w.len() == k).map(|(w, c)| (w.clone(), c.clone())).collect()
}

/// The top-degree component (alias of [`component_of`] at the top degree,
/// named for the call sites that feed the final star).
fn top_component(lc: &LinComb, top: usize) -> LinComb {
    component_of(lc, top)
}

/// Coefficient of the empty word.
fn scalar_part(lc: &LinComb) -> Scalar {
    lc.get(&vec![]).cloned().unwrap_or_else(Scalar::zero)
}

/// Number of holomorphic and anti-holomorphic letters of a word.
fn bidegree(w: &[u8], n: usize) -> (usize, usize) {
    let holo = w.iter().filter(|&&x| (x as usize) < n).count();
    (holo, w.len() - holo)
}

/// The singleton combination of one word.
fn unit(w: &[u8]) -> LinComb {
    let mut lc = LinComb::new();
    lc.insert(w.to_vec(), Scalar::one());
    lc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::quantum_integer;
    use num::One;

    // ==== Construction ====

    #[test]
    fn builds_and_certifies_for_small_ranks() {
        for n in 1..=3 {
            QuantumMetric::new(n).expect("certified metric");
        }
    }

    // ==== Frozen values at rank one ====

    #[test]
    fn rank_one_metric_is_frozen() {
        let m = QuantumMetric::new(1).expect("CP^1 metric");
        let kappa = m.algebra().kappa();
        let ep = unit(&[0u8]);
        let em = unit(&[1u8]);
        // g(1, 1) = 1 and g(kappa, kappa) = 1: the volume normalization.
        assert!(m.pairing(&unit(&[]), &unit(&[])).is_one());
        assert!(m.pairing(&kappa, &kappa).is_one());
        // g(e+, e+) = 1, g(e-, e-) = q^-2, and the chiralities are
        // orthogonal.
        assert!(m.pairing(&ep, &ep).is_one());
        assert_eq!(m.pairing(&em, &em), Scalar::q_pow(-2));
        assert!(m.pairing(&ep, &em).is_zero());
        assert!(m.pairing(&em, &ep).is_zero());
        // Lambda kappa = 1.
        let lam = m.dual_lefschetz(2);
        assert_eq!(lam.rows(), 1);
        assert!(lam.at(0, 0).is_one());
    }

    // ==== sl_2 ====

    #[test]
    fn sl2_commutators_close_exactly() {
        for n in 1..=3usize {
            let m = QuantumMetric::new(n).expect("certified metric");
            for (k, res) in m.sl2_residuals().into_iter().enumerate() {
                assert!(res.is_zero(), "[L, Lambda] - H fails at n = {n}, degree {k}");
            }
            let (raising, lowering) = m.weight_residuals();
            for res in raising.iter().chain(&lowering) {
                assert!(res.is_zero(), "counting relation fails at n = {n}");
            }
        }
    }

    // ==== Degree one ====

    #[test]
    fn degree_one_closed_form_matches_the_pipeline() {
        for n in 1..=3usize {
            let m = QuantumMetric::new(n).expect("certified metric");
            let basis = m.hodge().degree_basis(1).to_vec();
            for wi in &basis {
                for wj in &basis {
                    assert_eq!(
                        m.degree_one_pairing(&unit(wi), &unit(wj)),
                        m.pairing(&unit(wi), &unit(wj)),
                        "n = {n}, pair ({wi:?}, {wj:?})"
                    );
                }
            }
        }
    }

    #[test]
    fn degree_one_norms_are_frozen() {
        // The degree-one norms follow one geometric pattern: with
        // c_n = n / (1 + q^2 + ... + q^(2n-2)),
        //
        //   |e+_k|^2 = c_n q^(1-k),   |e-_k|^2 = c_n q^(-1-k),
        //
        // so the two chiralities differ by the fixed ratio q^-2 and all
        // norms collapse to 1 at q = 1.
        for n in 1..=3usize {
            let m = QuantumMetric::new(n).expect("certified metric");
            let g = m.gram(1);
            let scale = &Scalar::from_int(n as i64)
                * &quantum_integer(n as i64, 2).expect("positive index").inv().expect("nonzero");
            for k in 1..=n {
                assert_eq!(
                    *g.at(k - 1, k - 1),
                    &scale * &Scalar::q_pow(1 - k as i64),
                    "holomorphic norm at n = {n}, k = {k}"
                );
                assert_eq!(
                    *g.at(n + k - 1, n + k - 1),
                    &scale * &Scalar::q_pow(-1 - k as i64),
                    "anti-holomorphic norm at n = {n}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn dual_lefschetz_sends_kappa_to_the_dimension() {
        // Lambda kappa = n is forced by the sl_2 relations: kappa = L(1),
        // so Lambda L(1) = (L Lambda - H)(1) = -(0 - n) 1 = n.
        for n in 1..=3usize {
            let m = QuantumMetric::new(n).expect("certified metric");
            let kappa = m.algebra().kappa();
            let coords: Vec<Scalar> = m
                .hodge()
                .degree_basis(2)
                .iter()
                .map(|w| kappa.get(w).cloned().unwrap_or_else(Scalar::zero))
                .collect();
            let image = m.dual_lefschetz(2).apply(&coords);
            assert_eq!(image, vec![Scalar::from_int(n as i64)]);
        }
    }

    #[test]
    fn degree_one_gram_is_diagonal() {
        for n in 1..=3usize {
            let m = QuantumMetric::new(n).expect("certified metric");
            let g = m.gram(1);
            for i in 0..g.rows() {
                for j in 0..g.cols() {
                    if i != j {
                        assert!(g.at(i, j).is_zero(), "n = {n}, entry ({i}, {j})");
                    } else {
                        assert!(!g.at(i, j).is_zero(), "n = {n}, vanishing norm at {i}");
                    }
                }
            }
        }
    }

    // ==== Classical limit ====

    #[test]
    fn grams_are_orthonormal_at_q_one() {
        let one = Rat::one();
        for n in 1..=2usize {
            let m = QuantumMetric::new(n).expect("certified metric");
            for k in 0..=2 * n {
                let g = m.gram(k);
                for i in 0..g.rows() {
                    for j in 0..g.cols() {
                        let v = g.at(i, j).eval(&one).expect("no pole at 1");
                        let want = if i == j { GaussRat::one() } else { GaussRat::zero() };
                        assert_eq!(v, want, "n = {n}, degree {k}, entry ({i}, {j})");
                    }
                }
            }
        }
    }
}
