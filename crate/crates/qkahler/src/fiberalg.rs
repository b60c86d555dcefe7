//! The quantum exterior algebra of the cotangent fiber of quantum projective
//! space.
//!
//! For CP^n the degree-one part of the fiber splits into a holomorphic piece
//! H+ with basis e+_1..e+_n and an anti-holomorphic piece H- with basis
//! e-_1..e-_n, realized here as the Levi submodules span{v_1 (x) f_l} and
//! span{v_i (x) f_1} of V (x) V* (see [`crate::uqrep::h_plus`] and
//! [`crate::uqrep::h_minus`]).  The full fiber is the quadratic algebra with
//! relations
//!
//! ```text
//!   e+_j e+_i = -q   e+_i e+_j   (i < j),   e+_i e+_i = 0,
//!   e-_j e-_i = -q^-1 e-_i e-_j  (i < j),   e-_i e-_i = 0,
//!   e-_j e+_i = sum_{kl} A[(k,l),(j,i)] e+_k e-_l,
//! ```
//!
//! following the first-order differential calculi of Heckenberger and Kolb
//! (2006) on irreducible quantum flag manifolds.  The cross-coefficient
//! matrix A is produced by two independent routes:
//!
//! * a constraint solver working over the space of Levi intertwiners
//!   H- (x) H+ -> H+ (x) H-.  Equivariance leaves a two-parameter space,
//!   and requiring the fundamental (1,1)-form kappa to stay central in
//!   degree three (an affine condition, since each commutator term uses the
//!   cross relation exactly once) cuts it to a one-parameter affine line at
//!   every rank.  The line contains degenerate members (among them the
//!   rank-one projector onto kappa), so a final constraint is imposed: the
//!   rewriting system must be confluent, which by the diamond lemma of
//!   Bergman 1978 makes the wedge monomials a basis.  Confluence is a
//!   quadratic condition in the line parameter; for n >= 2 it has exactly
//!   two roots, the calculus built from the braiding and its mirror built
//!   from the inverse braiding (at rank two the condition is
//!   (t + q^2)(t + q^-2) = 0).  Both roots are flat, so the residual choice
//!   is one of convention and the R-matrix oracle selects the
//!   braiding-aligned root.  For n = 1 the whole line is confluent and the
//!   oracle selects in the same way, subject to reality and the classical
//!   limit.
//! * an R-matrix oracle assembling the braidings of V and V* into the
//!   four-leg operator that exchanges the two chirality pairs.  The trace
//!   coupling that accompanies this operator in the relations of the full
//!   calculus acts through coordinate functions whose counit vanishes on
//!   the fiber indices, so no trace term survives the restriction to the
//!   fiber.
//!
//! The solver governs wherever it determines the answer: equivariance,
//! centrality, and confluence are its constraints, and every oracle variant
//! is compared entry by entry against the adopted solution with
//! disagreements reported rather than adopted.  The oracle decides only the
//! final convention tie among the solver's confluent members.
//!
//! The star structure is conjugate-linear with the graded reversal rule,
//! and its degree-one weights are not chosen but solved: conjugation must
//! intertwine the Levi action through the twist X -> (S(X))^*, which forces
//! the ratios of the diagonal weights, while involutivity and reality of
//! kappa fix their products.  Only one overall phase remains and is pinned
//! to the rank-one convention star(e+) = -i e-.
//!
//! Normal forms are computed by a terminating rewriting system that orders
//! every word into the wedge basis e+_K ^ e-_L.  Termination is immediate
//! from the lexicographic measure (cross inversions, holomorphic inversions,
//! anti-holomorphic inversions), so by the diamond lemma correctness
//! reduces to the degree-three overlap audit shipped with the module, and
//! the graded dimension audit certifies that the quotient has the classical
//! binomial dimensions.

use crate::linalg::{Matrix, RankAccumulator};
use crate::scalar::{Rat, Scalar, ScalarError};
use crate::uqrep::{h_minus, h_plus, invariant_vectors, levi_nodes, tensor, braiding, BraidSlots, Rep, RepError, SubRep};
use num::One;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

/// A word in the generators: letter x < n encodes e+_{x+1}, letter n <= x < 2n
/// encodes e-_{x-n+1}.  Normal-form words are strictly increasing, which is
/// exactly the wedge basis e+_K ^ e-_L with K and L ascending.
pub type Word = Vec<u8>;

/// A finite linear combination of words with exact scalar coefficients.
pub type LinComb = BTreeMap<Word, Scalar>;

/// The oracle assembly variant the calculus is pinned to.  At n = 1 it
/// selects the member of the solver's confluent line; at higher rank it
/// selects between the two confluent points left by the quadratic pinning
/// condition (the braiding calculus and its inverse-braiding mirror).
const ORACLE_VARIANT: &str = "transpose";

/// Failures while building or auditing the fiber algebra.
#[derive(Debug, thiserror::Error)]
pub enum FiberError {
    /// Underlying module construction failed.
    #[error("module construction failed: {0}")]
    Rep(#[from] RepError),
    /// Exact scalar arithmetic failed (division by zero, pole at the
    /// evaluation point).
    #[error("scalar arithmetic failed: {0}")]
    Scalar(#[from] ScalarError),
    /// The space of invariant (1,1)-forms does not have dimension one.
    #[error("invariant (1,1)-form space has dimension {got}, expected 1")]
    KappaDimension {
        /// Dimension actually found.
        got: usize,
    },
    /// The invariant (1,1)-form is not diagonal or cannot be normalized.
    #[error("invariant (1,1)-form is not diagonal with unit leading term")]
    KappaShape,
    /// The affine system for the cross relations has no solution.
    #[error("cross-relation solver system is inconsistent")]
    SolverInconsistent,
    /// The solution family has an unexpected dimension.
    #[error("cross-relation family has dimension {got} at n = {n}, expected {want}")]
    FamilyDimension {
        /// Rank of the projective space.
        n: usize,
        /// Observed family dimension.
        got: usize,
        /// Expected family dimension.
        want: usize,
    },
    /// Confluence cut the solution family to a locus of degree three or
    /// higher, where no convention-based selection is possible.
    #[error("confluence pinning left a degree-{degree} locus instead of at most two points")]
    ConfluencePinning {
        /// Degree of the residual polynomial locus.
        degree: usize,
    },
    /// The pinned R-matrix assembly does not provide an admissible member of
    /// the solution family (the confluent line at n = 1, or one of the two
    /// confluent points at higher rank).
    #[error("R-matrix oracle variant '{variant}' does not select an admissible cross relation")]
    OracleMismatch {
        /// Name of the assembly variant that failed.
        variant: &'static str,
    },
    /// The conjugate-equivariant star weights do not exist or are
    /// inconsistent with involutivity and the reality of kappa.
    #[error("star weight solve failed: {reason}")]
    StarStructure {
        /// Short description of the failing condition.
        reason: &'static str,
    },
    /// The solved relations do not degenerate to the exterior algebra at q = 1.
    #[error("cross relations fail the classical limit check at q = 1")]
    ClassicalLimit,
    /// The relation ideal is not closed under the star structure.
    #[error("cross relations are not closed under the star structure")]
    StarClosure,
    /// The fundamental form fails to be central in degree three.
    #[error("kappa is not central against generator {letter}")]
    KappaNotCentral {
        /// Offending generator letter.
        letter: u8,
    },
    /// A graded component has the wrong dimension.
    #[error("dimension audit failed in degree {degree}: rank {got}, expected {want}")]
    DimensionAudit {
        /// Degree of the failing component.
        degree: usize,
        /// Rank actually observed.
        got: usize,
        /// Expected binomial dimension.
        want: usize,
    },
    /// Two reduction strategies disagree on a word.
    #[error("rewriting is not confluent on {word:?}")]
    NotConfluent {
        /// Word witnessing the failure.
        word: Word,
    },
}

/// A generator of the Levi subalgebra acting on the fiber, identified by its
/// ambient node number (2..=n for CP^n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeviGenerator {
    /// Raising generator E_a.
    E(usize),
    /// Lowering generator F_a.
    F(usize),
}

/// The quantum exterior algebra of the fiber of Omega^(0,*) (+) Omega^(*,0)
/// over CP^n, with certified relations and a memoized normal-form engine.
#[derive(Debug)]
pub struct FiberAlgebra {
    n: usize,
    hp: SubRep,
    hm: SubRep,
    kappa_coeffs: Vec<Scalar>,
    cross: Matrix,
    family_dim: usize,
    matched_variants: Vec<&'static str>,
    oracle_report: BTreeMap<&'static str, Vec<(usize, usize)>>,
    sigma: Vec<Scalar>,
    tau: Vec<Scalar>,
    memo: Mutex<HashMap<Word, LinComb>>,
}

impl FiberAlgebra {
    /// Builds the fiber algebra of CP^n: solves for the fundamental form,
    /// the cross relations, and the star weights, runs the oracle
    /// comparison, and certifies the classical limit, reality, star
    /// closure, confluence, and centrality of kappa.
    ///
    /// # Arguments
    ///
    /// * `n` - rank of the projective space CP^n, so the fiber has 2n
    ///   generators.
    ///
    /// # Returns
    ///
    /// The certified algebra, or the first structural failure encountered.
    pub fn new(n: usize) -> Result<FiberAlgebra, FiberError> {
        assert!(n >= 1, "CP^0 has no fiber directions");
        let hp = h_plus(n);
        let hm = h_minus(n);
        // H+ (x) H- carries the wedge basis e+_k ^ e-_l of the (1,1)-forms;
        // H- (x) H+ carries the left-hand sides of the cross relations.
        let rep_out = tensor(&hp.rep, &hm.rep)?;
        let rep_in = tensor(&hm.rep, &hp.rep)?;

        let kappa_coeffs = solve_kappa(n, &rep_out)?;
        let solution = solve_cross(n, &hp, &hm, &rep_out, &rep_in, &kappa_coeffs)?;
        let (sigma, tau) = solve_star_weights(n, &hp, &hm)?;

        let algebra = FiberAlgebra {
            n,
            hp,
            hm,
            kappa_coeffs,
            cross: solution.cross,
            family_dim: solution.family_dim,
            matched_variants: solution.matched_variants,
            oracle_report: solution.oracle_report,
            sigma,
            tau,
            memo: Mutex::new(HashMap::new()),
        };
        algebra.certify_construction()?;
        Ok(algebra)
    }

    /// Rank n of the underlying projective space.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the degree-k component: binomial(2n, k).
    pub fn fiber_dim(&self, k: usize) -> usize {
        choose(2 * self.n, k)
    }

    /// Coefficients c_1..c_n of the fundamental form kappa = sum c_k e+_k ^ e-_k,
    /// normalized so that c_1 = 1.
    pub fn kappa_coeffs(&self) -> &[Scalar] {
        &self.kappa_coeffs
    }

    /// The fundamental (1,1)-form as a normal-form linear combination.
    pub fn kappa(&self) -> LinComb {
        let mut out = LinComb::new();
        for (k, c) in self.kappa_coeffs.iter().enumerate() {
            add_term(&mut out, vec![k as u8, (self.n + k) as u8], c);
        }
        out
    }

    /// The solved cross-coefficient matrix: entry (k0 n + l0, j0 n + i0) is
    /// the coefficient of e+_{k0+1} ^ e-_{l0+1} in e-_{j0+1} ^ e+_{i0+1}.
    pub fn cross_matrix(&self) -> &Matrix {
        &self.cross
    }

    /// Dimension of the solution family cut out by equivariance, centrality,
    /// and confluence alone: 1 for n = 1 (the whole line is confluent), 0 for
    /// n >= 2 (finitely many confluent points).  The final selection among
    /// confluent members is the oracle's convention choice in either case.
    pub fn cross_family_dim(&self) -> usize {
        self.family_dim
    }

    /// Names of the oracle assembly variants that reproduce the solved cross
    /// relations entry by entry.
    pub fn oracle_agreement(&self) -> &[&'static str] {
        &self.matched_variants
    }

    /// Entry positions (row, column) where each oracle assembly variant
    /// disagrees with the solved cross matrix; an empty list means exact
    /// agreement.  The solver result governs either way.
    pub fn oracle_discrepancies(&self) -> &BTreeMap<&'static str, Vec<(usize, usize)>> {
        &self.oracle_report
    }

    /// The solved star weights on degree one: star(e+_k) = sigma_k e-_k and
    /// star(e-_k) = tau_k e+_k, with sigma_1 = tau_1 = -i.
    pub fn star_weights(&self) -> (&[Scalar], &[Scalar]) {
        (&self.sigma, &self.tau)
    }

    /// The holomorphic seed module (basis e+_1..e+_n).
    pub fn h_plus(&self) -> &SubRep {
        &self.hp
    }

    /// The anti-holomorphic seed module (basis e-_1..e-_n).
    pub fn h_minus(&self) -> &SubRep {
        &self.hm
    }

    // ---- Rewriting engine ----

    /// Normal form of a word, as a combination of strictly increasing words;
    /// memoized, leftmost-reduction strategy.
    pub fn normal_form(&self, w: &[u8]) -> LinComb {
        let Some(t) = find_reducible(w, true) else {
            let mut out = LinComb::new();
            add_term(&mut out, w.to_vec(), &Scalar::one());
            return out;
        };
        if let Some(hit) = self.memo.lock().unwrap().get(w) {
            return hit.clone();
        }
        let mut acc = LinComb::new();
        for (word, coeff) in reduce_at_with(self.n, &self.cross, w, t) {
            for (nf_word, nf_coeff) in self.normal_form(&word) {
                add_term(&mut acc, nf_word, &(&coeff * &nf_coeff));
            }
        }
        self.memo.lock().unwrap().insert(w.to_vec(), acc.clone());
        acc
    }

    /// Normal form under the rightmost-reduction strategy; not memoized.
    /// Used by the confluence audit as an independent reduction order.
    pub fn normal_form_rightmost(&self, w: &[u8]) -> LinComb {
        normal_form_with(self.n, &self.cross, w, false)
    }

    /// Wedge product of two normal-form combinations, re-normalized.
    pub fn wedge(&self, a: &LinComb, b: &LinComb) -> LinComb {
        let mut acc = LinComb::new();
        for (wa, ca) in a {
            for (wb, cb) in b {
                let mut word = wa.clone();
                word.extend_from_slice(wb);
                let c = ca * cb;
                for (nf_word, nf_coeff) in self.normal_form(&word) {
                    add_term(&mut acc, nf_word, &(&c * &nf_coeff));
                }
            }
        }
        acc
    }

    /// The star structure: conjugate-linear, star(e+_k) = sigma_k e-_k,
    /// star(e-_k) = tau_k e+_k with the solved conjugate-equivariant
    /// weights, and (w ^ v)* = (-1)^{kl} v* ^ w* on forms of degrees k and
    /// l.  On a basis word this reverses and toggles the letters and
    /// multiplies by (-1)^{k(k-1)/2} and the product of letter weights.
    pub fn star(&self, a: &LinComb) -> LinComb {
        let mut acc = LinComb::new();
        for (w, c) in a {
            let image = self.star_word(w);
            let conj = c.conjugate();
            for (word, coeff) in image {
                add_term(&mut acc, word, &(&conj * &coeff));
            }
        }
        acc
    }

    /// All strictly increasing words of length k: the wedge basis of the
    /// degree-k component, in lexicographic order.
    pub fn theta_basis(&self, k: usize) -> Vec<Word> {
        let pool: Vec<u8> = (0..2 * self.n as u8).collect();
        combinations(&pool, k)
    }

    /// The wedge basis of the bidegree-(a, b) component: e+_K ^ e-_L with
    /// |K| = a, |L| = b, ordered K-major lexicographically.
    pub fn theta_basis_bidegree(&self, a: usize, b: usize) -> Vec<Word> {
        let plus_pool: Vec<u8> = (0..self.n as u8).collect();
        let minus_pool: Vec<u8> = (self.n as u8..2 * self.n as u8).collect();
        let mut out = Vec::new();
        for k_part in combinations(&plus_pool, a) {
            for l_part in combinations(&minus_pool, b) {
                let mut w = k_part.clone();
                w.extend_from_slice(&l_part);
                out.push(w);
            }
        }
        out
    }

    /// Coordinates of a normal-form combination in the given basis.
    /// Panics if the combination has support outside the basis.
    pub fn coordinates(&self, lc: &LinComb, basis: &[Word]) -> Vec<Scalar> {
        let index: BTreeMap<&Word, usize> =
            basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut out = vec![Scalar::zero(); basis.len()];
        for (w, c) in lc {
            let i = *index.get(w).expect("combination leaves the basis span");
            out[i] = &out[i] + c;
        }
        out
    }

    // ---- Levi action ----

    /// Ambient weight of a basis word: the sum of its letter weights in
    /// fundamental-weight coordinates.
    pub fn k_weight(&self, w: &[u8]) -> Vec<i64> {
        let mut wt = vec![0i64; self.n];
        for &x in w {
            let letter_wt = self.letter_weight(x);
            for (acc, d) in wt.iter_mut().zip(letter_wt) {
                *acc += d;
            }
        }
        wt
    }

    /// Matrix of a Levi generator on the span of the given basis words,
    /// acting through the iterated coproduct (E picks up K's on the left,
    /// F picks up K^-1's on the right).  Panics if the action leaves the
    /// span, which would contradict equivariance of the relations.
    pub fn levi_action_matrix(&self, gen: LeviGenerator, basis: &[Word]) -> Matrix {
        let index: BTreeMap<&Word, usize> =
            basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut m = Matrix::zeros(basis.len(), basis.len());
        for (col, w) in basis.iter().enumerate() {
            for (word, coeff) in self.act(gen, w) {
                let row = *index.get(&word).expect("Levi action leaves the span");
                let cur = &*m.at(row, col) + &coeff;
                m.set(row, col, cur);
            }
        }
        m
    }

    // ---- Audits ----

    /// Certifies the graded dimensions: in each degree k = 1..=2n the normal
    /// forms of (degree k-1 basis) x (generators) must span a space of rank
    /// binomial(2n, k), and every word of length 2n+1 must reduce to zero.
    pub fn audit_dimensions(&self) -> Result<(), FiberError> {
        let letters: Vec<u8> = (0..2 * self.n as u8).collect();
        for k in 1..=2 * self.n {
            let target = self.theta_basis(k);
            let want = choose(2 * self.n, k);
            let mut acc = RankAccumulator::new(target.len());
            for w in self.theta_basis(k - 1) {
                for &g in &letters {
                    let mut word = w.clone();
                    word.push(g);
                    let nf = self.normal_form(&word);
                    acc.offer(self.coordinates(&nf, &target));
                }
            }
            if acc.rank() != want {
                return Err(FiberError::DimensionAudit { degree: k, got: acc.rank(), want });
            }
        }
        for w in self.theta_basis(2 * self.n) {
            for &g in &letters {
                let mut word = w.clone();
                word.push(g);
                if !self.normal_form(&word).is_empty() {
                    return Err(FiberError::DimensionAudit {
                        degree: 2 * self.n + 1,
                        got: 1,
                        want: 0,
                    });
                }
            }
        }
        Ok(())
    }

    /// Certifies local confluence: leftmost and rightmost reduction agree on
    /// every length-three word, which covers all rule overlaps; with the
    /// terminating measure this gives unique normal forms by the diamond
    /// lemma.
    pub fn audit_confluence(&self) -> Result<(), FiberError> {
        let letters: Vec<u8> = (0..2 * self.n as u8).collect();
        for &x in &letters {
            for &y in &letters {
                for &z in &letters {
                    let w = vec![x, y, z];
                    if self.normal_form(&w) != self.normal_form_rightmost(&w) {
                        return Err(FiberError::NotConfluent { word: w });
                    }
                }
            }
        }
        Ok(())
    }

    /// Human-readable listing of the defining relations, for diagnostics and
    /// the relation dump of the command line tool.
    pub fn relation_strings(&self) -> Vec<String> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 1..=n {
            out.push(format!("e+_{i} e+_{i} = 0"));
            out.push(format!("e-_{i} e-_{i} = 0"));
        }
        for i in 1..=n {
            for j in i + 1..=n {
                out.push(format!("e+_{j} e+_{i} = -q e+_{i} e+_{j}"));
                out.push(format!("e-_{j} e-_{i} = -q^-1 e-_{i} e-_{j}"));
            }
        }
        for j0 in 0..n {
            for i0 in 0..n {
                let col = j0 * n + i0;
                let mut terms = Vec::new();
                for k0 in 0..n {
                    for l0 in 0..n {
                        let c = self.cross.at(k0 * n + l0, col);
                        if !c.is_zero() {
                            terms.push(format!(
                                "({}) e+_{} e-_{}",
                                c.canonical_text(),
                                k0 + 1,
                                l0 + 1
                            ));
                        }
                    }
                }
                let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                out.push(format!("e-_{} e+_{} = {}", j0 + 1, i0 + 1, rhs));
            }
        }
        out
    }

    // ---- Private helpers ----

    /// Star of a single basis word, normalized.
    fn star_word(&self, w: &[u8]) -> LinComb {
        let n = self.n as u8;
        let k = w.len();
        let word: Word = w
            .iter()
            .rev()
            .map(|&x| if x < n { x + n } else { x - n })
            .collect();
        let mut coeff = if (k * k.saturating_sub(1) / 2) % 2 == 1 {
            -&Scalar::one()
        } else {
            Scalar::one()
        };
        for &x in w {
            let weight = if x < n {
                &self.sigma[x as usize]
            } else {
                &self.tau[(x - n) as usize]
            };
            coeff = &coeff * weight;
        }
        let mut out = LinComb::new();
        for (nf_word, nf_coeff) in self.normal_form(&word) {
            add_term(&mut out, nf_word, &(&coeff * &nf_coeff));
        }
        out
    }

    /// Ambient weight of a single letter.
    fn letter_weight(&self, x: u8) -> &[i64] {
        if (x as usize) < self.n {
            self.hp.rep.weight(x as usize)
        } else {
            self.hm.rep.weight(x as usize - self.n)
        }
    }

    /// Action of a Levi generator on one basis word through the iterated
    /// coproduct, as a normal-form combination.
    fn act(&self, gen: LeviGenerator, w: &[u8]) -> LinComb {
        let mut acc = LinComb::new();
        for s in 0..w.len() {
            let (node, lowering) = match gen {
                LeviGenerator::E(a) => (a, false),
                LeviGenerator::F(a) => (a, true),
            };
            // K-dressing: Delta(E) = E (x) 1 + K (x) E puts K's to the left
            // of the acting slot, Delta(F) = F (x) K^-1 + 1 (x) F puts
            // inverse K's to the right.
            let mut exponent = 0i64;
            if lowering {
                for &x in &w[s + 1..] {
                    exponent -= self.letter_weight(x)[node - 1];
                }
            } else {
                for &x in &w[..s] {
                    exponent += self.letter_weight(x)[node - 1];
                }
            }
            let dress = Scalar::q_pow(exponent);
            let x = w[s];
            let (matrix, offset) = if (x as usize) < self.n {
                let m = if lowering { self.hp.rep.f_matrix(node) } else { self.hp.rep.e_matrix(node) };
                (m, 0usize)
            } else {
                let m = if lowering { self.hm.rep.f_matrix(node) } else { self.hm.rep.e_matrix(node) };
                (m, self.n)
            };
            let col = x as usize - offset;
            for row in 0..matrix.rows() {
                let entry = matrix.at(row, col);
                if entry.is_zero() {
                    continue;
                }
                let mut word = w.to_vec();
                word[s] = (row + offset) as u8;
                let c = &dress * entry;
                for (nf_word, nf_coeff) in self.normal_form(&word) {
                    add_term(&mut acc, nf_word, &(&c * &nf_coeff));
                }
            }
        }
        acc
    }

    /// Construction-time certificates: classical limit and reality of the
    /// cross relations, their star closure, involutivity of the star,
    /// centrality of kappa, reality of its coefficients, and confluence of
    /// the rewriting system.
    fn certify_construction(&self) -> Result<(), FiberError> {
        let n = self.n;
        let one = Rat::one();
        // Classical limit: at q = 1 the cross relation must be the plain
        // exterior flip e-_j e+_i = -e+_i e-_j.  Reality of every entry is
        // checked alongside; the star closure below depends on it.
        for j0 in 0..n {
            for i0 in 0..n {
                let col = j0 * n + i0;
                for k0 in 0..n {
                    for l0 in 0..n {
                        let entry = self.cross.at(k0 * n + l0, col);
                        if !entry.is_real() {
                            return Err(FiberError::StarClosure);
                        }
                        let val = entry.eval(&one)?;
                        let expect = if k0 == i0 && l0 == j0 {
                            crate::scalar::GaussRat::from_int(-1)
                        } else {
                            crate::scalar::GaussRat::zero()
                        };
                        if val != expect {
                            return Err(FiberError::ClassicalLimit);
                        }
                    }
                }
            }
        }
        // Star closure: the star image of every cross relation must reduce
        // to zero, i.e. lie in the ideal.
        for j0 in 0..n {
            for i0 in 0..n {
                let col = j0 * n + i0;
                let mut rel = LinComb::new();
                add_term(&mut rel, vec![(n + j0) as u8, i0 as u8], &Scalar::one());
                for k0 in 0..n {
                    for l0 in 0..n {
                        let c = self.cross.at(k0 * n + l0, col);
                        add_term(&mut rel, vec![k0 as u8, (n + l0) as u8], &(-c));
                    }
                }
                if !self.star(&rel).is_empty() {
                    return Err(FiberError::StarClosure);
                }
            }
        }
        // Kappa: real coefficients with classical value one, and central in
        // degree three (an independent re-check of the solver constraint,
        // this time through the rewriting engine).
        for c in &self.kappa_coeffs {
            if !c.is_real() || c.eval(&one)? != crate::scalar::GaussRat::one() {
                return Err(FiberError::KappaShape);
            }
        }
        let kappa = self.kappa();
        for g in 0..2 * n as u8 {
            let mut gen = LinComb::new();
            add_term(&mut gen, vec![g], &Scalar::one());
            if self.wedge(&kappa, &gen) != self.wedge(&gen, &kappa) {
                return Err(FiberError::KappaNotCentral { letter: g });
            }
        }
        // Star involutivity on the generators, tying the solved sigma and
        // tau weights to the adopted relations.
        for g in 0..2 * n as u8 {
            let mut gen = LinComb::new();
            add_term(&mut gen, vec![g], &Scalar::one());
            if self.star(&self.star(&gen)) != gen {
                return Err(FiberError::StarStructure { reason: "star fails to square to the identity" });
            }
        }
        // Confluence of the adopted rewriting system; for n >= 2 this
        // re-certifies through the public audit exactly the condition the
        // solver pinned the family with.
        self.audit_confluence()
    }
}

// ---- Fundamental form ----

/// Solves for the unique invariant (1,1)-form: the joint invariants of the
/// Levi action on H+ (x) H- must be one-dimensional, supported on the
/// diagonal pairs e+_k (x) e-_k, and normalizable to leading coefficient 1.
fn solve_kappa(n: usize, rep_out: &Rep) -> Result<Vec<Scalar>, FiberError> {
    let inv = invariant_vectors(rep_out);
    if inv.len() != 1 {
        return Err(FiberError::KappaDimension { got: inv.len() });
    }
    let v = &inv[0];
    for k0 in 0..n {
        for l0 in 0..n {
            if k0 != l0 && !v[k0 * n + l0].is_zero() {
                return Err(FiberError::KappaShape);
            }
        }
    }
    let lead = &v[0];
    if lead.is_zero() {
        return Err(FiberError::KappaShape);
    }
    let inv_lead = lead.inv()?;
    Ok((0..n).map(|k0| &v[k0 * n + k0] * &inv_lead).collect())
}

// ---- Constraint solver ----

/// The outcome of the cross-relation solve: the adopted matrix, the final
/// family dimension, and the oracle reconciliation report.
struct CrossSolution {
    cross: Matrix,
    family_dim: usize,
    matched_variants: Vec<&'static str>,
    oracle_report: BTreeMap<&'static str, Vec<(usize, usize)>>,
}

/// Solves for the cross-coefficient matrix in three stages: the affine
/// system (equivariance + degree-three centrality of kappa), then the
/// quadratic confluence condition that pins the leftover line for n >= 2,
/// and finally the oracle reconciliation (selection at n = 1, entrywise
/// comparison report otherwise).
fn solve_cross(
    n: usize,
    hp: &SubRep,
    hm: &SubRep,
    rep_out: &Rep,
    rep_in: &Rep,
    kappa: &[Scalar],
) -> Result<CrossSolution, FiberError> {
    let dim = n * n;
    // K-equivariance pins the support: an intertwiner can only connect
    // basis pairs of equal ambient weight.
    let mut unknowns: Vec<(usize, usize)> = Vec::new();
    for r in 0..dim {
        for c in 0..dim {
            if rep_out.weight(r) == rep_in.weight(c) {
                unknowns.push((r, c));
            }
        }
    }
    let index: HashMap<(usize, usize), usize> =
        unknowns.iter().enumerate().map(|(i, &rc)| (rc, i)).collect();

    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();

    // E/F intertwining: (G_out A - A G_in) = 0 entrywise, expressed over the
    // supported unknowns.
    for &a in &levi_nodes(n) {
        for lowering in [false, true] {
            let (g_out, g_in) = if lowering {
                (rep_out.f_matrix(a), rep_in.f_matrix(a))
            } else {
                (rep_out.e_matrix(a), rep_in.e_matrix(a))
            };
            for big_r in 0..dim {
                for big_c in 0..dim {
                    let mut row = vec![Scalar::zero(); unknowns.len()];
                    let mut nonzero = false;
                    for m in 0..dim {
                        let g = g_out.at(big_r, m);
                        if !g.is_zero() {
                            if let Some(&u) = index.get(&(m, big_c)) {
                                row[u] = &row[u] + g;
                                nonzero = true;
                            }
                        }
                        let g = g_in.at(m, big_c);
                        if !g.is_zero() {
                            if let Some(&u) = index.get(&(big_r, m)) {
                                row[u] = &row[u] - g;
                                nonzero = true;
                            }
                        }
                    }
                    if nonzero {
                        rows.push(row);
                        rhs.push(Scalar::zero());
                    }
                }
            }
        }
    }

    // Degree-three centrality of kappa.  Both kappa ^ g and g ^ kappa are
    // expanded by hand into the wedge basis; exactly one cross substitution
    // occurs per term, so every equation is affine in the unknowns.
    centrality_rows(n, kappa, &index, &mut rows, &mut rhs);

    let (particular, kernel) = solve_affine(&rows, &rhs, unknowns.len())
        .ok_or(FiberError::SolverInconsistent)?;
    if kernel.len() != 1 {
        // Equivariance leaves two parameters and centrality is expected to
        // cut exactly one; anything else falsifies the configuration.
        return Err(FiberError::FamilyDimension { n, got: kernel.len(), want: 1 });
    }
    let direction = &kernel[0];

    let to_matrix = |vec: &[Scalar]| {
        let mut m = Matrix::zeros(dim, dim);
        for (u, &(r, c)) in unknowns.iter().enumerate() {
            m.set(r, c, vec[u].clone());
        }
        m
    };

    // Stage two: along the line particular + t * direction, every
    // confluence residual coefficient is a polynomial of degree at most two
    // in t (a degree-three word admits at most two cross substitutions per
    // reduction path).  Three samples determine each polynomial exactly.
    let polys = confluence_polynomials(n, &particular, direction, &to_matrix);

    let candidates = oracle_candidates(n, hp, hm);
    let one = Rat::one();

    let (adopted, family_dim) = if polys.is_empty() {
        // The whole line is confluent.  That is the expected situation for
        // n = 1, where the pinned oracle variant selects the member of the
        // family, subject to reality, the classical limit, and membership.
        if n != 1 {
            return Err(FiberError::FamilyDimension { n, got: 1, want: 0 });
        }
        let particular_m = to_matrix(&particular);
        let mut adopted = None;
        for (name, m) in &candidates {
            if *name != ORACLE_VARIANT {
                continue;
            }
            let val = m.at(0, 0);
            let admissible = val.is_real()
                && matches!(val.eval(&one), Ok(g) if g == crate::scalar::GaussRat::from_int(-1))
                && in_family(m, &particular_m, &kernel, &unknowns);
            if admissible {
                adopted = Some(m.clone());
            }
        }
        let adopted = adopted.ok_or(FiberError::OracleMismatch { variant: ORACLE_VARIANT })?;
        (adopted, 1)
    } else {
        // The common roots of all residual polynomials are the confluent
        // members of the line.
        let mut gcd: Vec<Scalar> = Vec::new();
        for p in &polys {
            gcd = poly_gcd(gcd, p.clone())?;
        }
        match gcd.len() {
            0 | 1 => return Err(FiberError::SolverInconsistent),
            2 => {
                // Monic linear gcd t + c: a unique confluent parameter -c.
                let t_star = -&gcd[0];
                let solved: Vec<Scalar> = particular
                    .iter()
                    .zip(direction)
                    .map(|(p, d)| p + &(&t_star * d))
                    .collect();
                (to_matrix(&solved), 0)
            }
            3 => {
                // A monic quadratic: two confluent points on the line, the
                // braiding calculus and its inverse-braiding mirror (at rank
                // two the gcd factors as (t + q^2)(t + q^-2)).  Both are flat
                // by the diamond lemma, so the tie is a convention choice and
                // the R-matrix oracle selects the braiding-aligned root.
                let mut adopted = None;
                for (name, m) in &candidates {
                    if *name != ORACLE_VARIANT {
                        continue;
                    }
                    let on_line = line_parameter(m, &particular, direction, &unknowns, &index);
                    if let Some(t) = on_line {
                        if poly_eval(&gcd, &t).is_zero() {
                            adopted = Some(m.clone());
                        }
                    }
                }
                let adopted =
                    adopted.ok_or(FiberError::OracleMismatch { variant: ORACLE_VARIANT })?;
                (adopted, 0)
            }
            d => return Err(FiberError::ConfluencePinning { degree: d - 1 }),
        }
    };

    // Oracle reconciliation: compare every assembly variant entry by entry
    // against the adopted matrix; disagreements are reported, not adopted.
    let mut matched = Vec::new();
    let mut report = BTreeMap::new();
    for (name, m) in &candidates {
        let mut differing = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                if m.at(r, c) != adopted.at(r, c) {
                    differing.push((r, c));
                }
            }
        }
        if differing.is_empty() {
            matched.push(*name);
        }
        report.insert(*name, differing);
    }

    Ok(CrossSolution { cross: adopted, family_dim, matched_variants: matched, oracle_report: report })
}

/// Collects the nonzero confluence residual polynomials along the affine
/// line of solutions: for every length-three word, the coefficients of
/// (leftmost normal form) - (rightmost normal form) as polynomials in the
/// line parameter, reconstructed from the samples t = 0, 1, 2.
fn confluence_polynomials(
    n: usize,
    particular: &[Scalar],
    direction: &[Scalar],
    to_matrix: &impl Fn(&[Scalar]) -> Matrix,
) -> Vec<Vec<Scalar>> {
    let samples: Vec<Matrix> = (0..3)
        .map(|t| {
            let vec: Vec<Scalar> = particular
                .iter()
                .zip(direction)
                .map(|(p, d)| p + &(&Scalar::from_int(t) * d))
                .collect();
            to_matrix(&vec)
        })
        .collect();
    let letters: Vec<u8> = (0..2 * n as u8).collect();
    let half = Scalar::from_frac(1, 2);
    let mut polys = Vec::new();
    for &x in &letters {
        for &y in &letters {
            for &z in &letters {
                let w = vec![x, y, z];
                let residuals: Vec<LinComb> = samples
                    .iter()
                    .map(|m| {
                        let mut diff = normal_form_with(n, m, &w, true);
                        for (word, coeff) in normal_form_with(n, m, &w, false) {
                            add_term(&mut diff, word, &-&coeff);
                        }
                        diff
                    })
                    .collect();
                let mut keys: Vec<&Word> = residuals.iter().flat_map(|r| r.keys()).collect();
                keys.sort();
                keys.dedup();
                for key in keys {
                    let at = |s: usize| residuals[s].get(key).cloned().unwrap_or_else(Scalar::zero);
                    let (r0, r1, r2) = (at(0), at(1), at(2));
                    // Lagrange reconstruction on 0, 1, 2 for c0 + c1 t + c2 t^2.
                    let c2 = &(&(&r0 - &r1) - &(&r1 - &r2)) * &half;
                    let c1 = &(&r1 - &r0) - &c2;
                    let mut poly = vec![r0, c1, c2];
                    while poly.last().is_some_and(Scalar::is_zero) {
                        poly.pop();
                    }
                    if !poly.is_empty() {
                        polys.push(poly);
                    }
                }
            }
        }
    }
    polys
}

/// Monic greatest common divisor of two polynomials over the scalar field,
/// coefficients in ascending degree; an empty vector is the zero polynomial.
fn poly_gcd(a: Vec<Scalar>, b: Vec<Scalar>) -> Result<Vec<Scalar>, FiberError> {
    let (mut a, mut b) = (a, b);
    while !b.is_empty() {
        let lead_inv = b.last().expect("nonempty").inv()?;
        let db = b.len() - 1;
        // Remainder of a modulo b by exact long division; each pass cancels
        // the leading coefficient of a, so the loop terminates.
        while a.len() >= b.len() {
            let da = a.len() - 1;
            let factor = &a[da] * &lead_inv;
            let shift = da - db;
            for k in 0..=db {
                a[shift + k] = &a[shift + k] - &(&factor * &b[k]);
            }
            while a.last().is_some_and(Scalar::is_zero) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(lead) = a.last() {
        let inv = lead.inv()?;
        a = a.iter().map(|c| c * &inv).collect();
    }
    Ok(a)
}

/// Evaluates a polynomial with scalar coefficients (ascending degree) at a
/// scalar point by Horner's rule.
fn poly_eval(poly: &[Scalar], at: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for c in poly.iter().rev() {
        acc = &(&acc * at) + c;
    }
    acc
}

/// Parameter t with particular + t * direction = candidate on the matched
/// support, provided the candidate lies on the affine line and vanishes off
/// the support; None otherwise.
fn line_parameter(
    candidate: &Matrix,
    particular: &[Scalar],
    direction: &[Scalar],
    unknowns: &[(usize, usize)],
    index: &HashMap<(usize, usize), usize>,
) -> Option<Scalar> {
    let mut t: Option<Scalar> = None;
    for (u, &(r, c)) in unknowns.iter().enumerate() {
        let delta = candidate.at(r, c) - &particular[u];
        if direction[u].is_zero() {
            if !delta.is_zero() {
                return None;
            }
        } else {
            let tv = &delta * &direction[u].inv().ok()?;
            match &t {
                None => t = Some(tv),
                Some(prev) if *prev == tv => {}
                Some(_) => return None,
            }
        }
    }
    for r in 0..candidate.rows() {
        for c in 0..candidate.cols() {
            if !index.contains_key(&(r, c)) && !candidate.at(r, c).is_zero() {
                return None;
            }
        }
    }
    t
}

/// Appends the affine rows encoding centrality of kappa against every
/// generator: coefficients of the wedge basis in kappa ^ g - g ^ kappa.
fn centrality_rows(
    n: usize,
    kappa: &[Scalar],
    index: &HashMap<(usize, usize), usize>,
    rows: &mut Vec<Vec<Scalar>>,
    rhs: &mut Vec<Scalar>,
) {
    let width = index.len();
    // Rows are collected per wedge-basis word of degree three.
    fn touch(
        table: &mut BTreeMap<Word, (Vec<Scalar>, Scalar)>,
        w: Word,
        width: usize,
    ) -> &mut (Vec<Scalar>, Scalar) {
        table.entry(w).or_insert_with(|| (vec![Scalar::zero(); width], Scalar::zero()))
    }

    // g = e+_i: kappa ^ e+_i is linear in the unknowns, e+_i ^ kappa is
    // constant; the equation is (linear part) - (constant part) = 0.
    for i0 in 0..n {
        let mut local: BTreeMap<Word, (Vec<Scalar>, Scalar)> = BTreeMap::new();
        for k0 in 0..n {
            let ck = &kappa[k0];
            // kappa ^ g term: p_k m_k p_i -> cross on (m_k, p_i).
            for a0 in 0..n {
                for b0 in 0..n {
                    let Some(&u) = index.get(&(a0 * n + b0, k0 * n + i0)) else { continue };
                    // Word p_k p_a m_b, then sort the holomorphic pair.
                    let (word, sign) = match a0.cmp(&k0) {
                        std::cmp::Ordering::Equal => continue,
                        std::cmp::Ordering::Less => {
                            (vec![a0 as u8, k0 as u8, (n + b0) as u8], -&Scalar::q())
                        }
                        std::cmp::Ordering::Greater => {
                            (vec![k0 as u8, a0 as u8, (n + b0) as u8], Scalar::one())
                        }
                    };
                    let slot = touch(&mut local, word, width);
                    slot.0[u] = &slot.0[u] + &(ck * &sign);
                }
            }
            // g ^ kappa term: p_i p_k m_k, constant in the unknowns.
            let (word, sign) = match k0.cmp(&i0) {
                std::cmp::Ordering::Equal => continue,
                std::cmp::Ordering::Less => {
                    (vec![k0 as u8, i0 as u8, (n + k0) as u8], -&Scalar::q())
                }
                std::cmp::Ordering::Greater => {
                    (vec![i0 as u8, k0 as u8, (n + k0) as u8], Scalar::one())
                }
            };
            let slot = touch(&mut local, word, width);
            slot.1 = &slot.1 + &(ck * &sign);
        }
        for (_, (row, constant)) in local {
            rows.push(row);
            rhs.push(constant);
        }
    }

    // g = e-_i: kappa ^ e-_i is constant, e-_i ^ kappa is linear; the
    // equation is (constant part) - (linear part) = 0, normalized to
    // (linear rows) = (constant rhs) with flipped signs.
    for i0 in 0..n {
        let mut local: BTreeMap<Word, (Vec<Scalar>, Scalar)> = BTreeMap::new();
        for k0 in 0..n {
            let ck = &kappa[k0];
            // kappa ^ g term: p_k m_k m_i, constant.
            let (word, sign) = match i0.cmp(&k0) {
                std::cmp::Ordering::Equal => continue,
                std::cmp::Ordering::Less => {
                    (vec![k0 as u8, (n + i0) as u8, (n + k0) as u8], -&Scalar::q_pow(-1))
                }
                std::cmp::Ordering::Greater => {
                    (vec![k0 as u8, (n + k0) as u8, (n + i0) as u8], Scalar::one())
                }
            };
            let slot = touch(&mut local, word, width);
            slot.1 = &slot.1 + &(ck * &sign);
        }
        for k0 in 0..n {
            let ck = &kappa[k0];
            // g ^ kappa term: m_i p_k m_k -> cross on (m_i, p_k), entering
            // with a minus sign relative to kappa ^ g.
            for a0 in 0..n {
                for b0 in 0..n {
                    let Some(&u) = index.get(&(a0 * n + b0, i0 * n + k0)) else { continue };
                    let (word, sign) = match b0.cmp(&k0) {
                        std::cmp::Ordering::Equal => continue,
                        std::cmp::Ordering::Greater => {
                            (vec![a0 as u8, (n + k0) as u8, (n + b0) as u8], -&Scalar::q_pow(-1))
                        }
                        std::cmp::Ordering::Less => {
                            (vec![a0 as u8, (n + b0) as u8, (n + k0) as u8], Scalar::one())
                        }
                    };
                    let slot = touch(&mut local, word, width);
                    slot.0[u] = &slot.0[u] - &(ck * &sign);
                }
            }
        }
        // The expression reads (constant) - (linear) = 0; the linear part
        // was accumulated with a minus sign, so flipping it once gives the
        // stored form (linear coefficients) * x = (constant rhs).
        for (_, (row, constant)) in local {
            let flipped: Vec<Scalar> = row.iter().map(|x| -x).collect();
            rows.push(flipped);
            rhs.push(constant);
        }
    }
}

/// Solves rows * x = rhs over the scalar field: returns a particular
/// solution together with a kernel basis, or None if inconsistent.
fn solve_affine(
    rows: &[Vec<Scalar>],
    rhs: &[Scalar],
    width: usize,
) -> Option<(Vec<Scalar>, Vec<Vec<Scalar>>)> {
    if rows.is_empty() {
        let kernel = (0..width)
            .map(|i| {
                let mut v = vec![Scalar::zero(); width];
                v[i] = Scalar::one();
                v
            })
            .collect();
        return Some((vec![Scalar::zero(); width], kernel));
    }
    let coeff = Matrix::from_rows(rows.to_vec());
    let mut aug_rows = rows.to_vec();
    for (row, b) in aug_rows.iter_mut().zip(rhs) {
        row.push(b.clone());
    }
    let aug = Matrix::from_rows(aug_rows);
    let (rref, pivots) = aug.rref();
    if pivots.contains(&width) {
        return None;
    }
    let mut particular = vec![Scalar::zero(); width];
    for (row_idx, &pc) in pivots.iter().enumerate() {
        particular[pc] = rref.at(row_idx, width).clone();
    }
    Some((particular, coeff.kernel_basis()))
}

/// Tests membership of a candidate matrix in the affine solution family.
fn in_family(
    candidate: &Matrix,
    particular: &Matrix,
    kernel: &[Vec<Scalar>],
    unknowns: &[(usize, usize)],
) -> bool {
    // Support outside the unknown set must vanish.
    let mut supported = vec![vec![false; candidate.cols()]; candidate.rows()];
    for &(r, c) in unknowns {
        supported[r][c] = true;
    }
    for r in 0..candidate.rows() {
        for c in 0..candidate.cols() {
            if !supported[r][c] && !candidate.at(r, c).is_zero() {
                return false;
            }
        }
    }
    let diff: Vec<Scalar> = unknowns
        .iter()
        .map(|&(r, c)| candidate.at(r, c) - particular.at(r, c))
        .collect();
    let mut acc = RankAccumulator::new(unknowns.len());
    for v in kernel {
        acc.offer(v.clone());
    }
    // offer reports whether the row enlarged the span; membership in the
    // affine family means the difference adds nothing beyond the kernel.
    !acc.offer(diff)
}

// ---- R-matrix oracle ----

/// Candidate oracle matrices, named by assembly variant.  The four-leg
/// operator T = B23 B12' B34 B23'' is applied to the embedded chirality
/// pairs inside (V (x) V*)^(x)2 and read off in the two possible
/// contraction conventions, each with the overall factor -q^-2 from the
/// square length of the crossing root (and its inverse as a guard).
///
/// The full calculus pairs this operator with a trace coupling over the
/// coordinate functions, but the counit of those coordinates vanishes on
/// every fiber index (only the frozen highest-weight slot survives it), so
/// the restriction to the fiber keeps the four-leg term alone.
fn oracle_candidates(n: usize, hp: &SubRep, hm: &SubRep) -> Vec<(&'static str, Matrix)> {
    let big_n = n + 1;
    let b_vv_inv = braiding(n, BraidSlots::VecVec)
        .inverse()
        .expect("vector braiding is invertible");
    let b_vd = braiding(n, BraidSlots::VecDual);
    let b_vd_inv = b_vd.inverse().expect("mixed braiding is invertible");
    let b_dd = braiding(n, BraidSlots::DualDual);

    let apply_t = |v: Vec<Scalar>| {
        let v = apply_on_legs(&b_vd_inv, 1, &v, big_n);
        let v = apply_on_legs(&b_dd, 2, &v, big_n);
        let v = apply_on_legs(&b_vv_inv, 0, &v, big_n);
        apply_on_legs(&b_vd, 1, &v, big_n)
    };

    // Embedded basis indices inside (V (x) V*)^(x)2, read off the stored
    // seed bases so the ordering conventions stay aligned with the solver.
    let pos_p: Vec<usize> = (0..n).map(|k| unit_position(&hp.basis[k])).collect();
    let pos_m: Vec<usize> = (0..n).map(|k| unit_position(&hm.basis[k])).collect();
    let pair_dim = big_n * big_n;
    let w_pm = |k0: usize, l0: usize| pos_p[k0] * pair_dim + pos_m[l0];
    let w_mp = |j0: usize, i0: usize| pos_m[j0] * pair_dim + pos_p[i0];

    let dim4 = pair_dim * pair_dim;
    let unit = |idx: usize| {
        let mut v = vec![Scalar::zero(); dim4];
        v[idx] = Scalar::one();
        v
    };

    let images_pm: Vec<Vec<Scalar>> = (0..n * n)
        .map(|rc| apply_t(unit(w_pm(rc / n, rc % n))))
        .collect();
    let images_mp: Vec<Vec<Scalar>> = (0..n * n)
        .map(|rc| apply_t(unit(w_mp(rc / n, rc % n))))
        .collect();

    let mut out = Vec::new();
    for (name, exponent) in [("direct", -2i64), ("transpose", -2), ("direct-inv", 2), ("transpose-inv", 2)] {
        let factor = -&Scalar::q_pow(exponent);
        let mut m = Matrix::zeros(n * n, n * n);
        for k0 in 0..n {
            for l0 in 0..n {
                for j0 in 0..n {
                    for i0 in 0..n {
                        let val = if name.starts_with("direct") {
                            &images_pm[k0 * n + l0][w_mp(j0, i0)]
                        } else {
                            &images_mp[j0 * n + i0][w_pm(k0, l0)]
                        };
                        m.set(k0 * n + l0, j0 * n + i0, &factor * val);
                    }
                }
            }
        }
        out.push((name, m));
    }
    out
}

/// Index of the single nonzero entry of a unit basis vector.
fn unit_position(v: &[Scalar]) -> usize {
    let mut found = None;
    for (idx, c) in v.iter().enumerate() {
        if !c.is_zero() {
            assert!(found.is_none(), "basis vector is not a unit vector");
            found = Some(idx);
        }
    }
    found.expect("basis vector is zero")
}

/// Applies an operator on a neighboring leg pair of a vector in the
/// four-fold tensor power of an N-dimensional space.
fn apply_on_legs(b: &Matrix, first: usize, v: &[Scalar], n_dim: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); v.len()];
    for (idx, coeff) in v.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let x = [
            idx / (n_dim * n_dim * n_dim),
            (idx / (n_dim * n_dim)) % n_dim,
            (idx / n_dim) % n_dim,
            idx % n_dim,
        ];
        let col = x[first] * n_dim + x[first + 1];
        for row in 0..n_dim * n_dim {
            let entry = b.at(row, col);
            if entry.is_zero() {
                continue;
            }
            let mut y = x;
            y[first] = row / n_dim;
            y[first + 1] = row % n_dim;
            let out_idx = ((y[0] * n_dim + y[1]) * n_dim + y[2]) * n_dim + y[3];
            out[out_idx] = &out[out_idx] + &(coeff * entry);
        }
    }
    out
}

// ---- Star weights ----

/// Solves the conjugate-equivariance conditions for the diagonal star
/// weights on degree one.  Conjugation intertwines the Levi action through
/// the twist X -> (S(X))^* of the compact real form, which sends E_a to
/// -F_a; on the diagonal weight ansatz this forces
///
/// ```text
///   sigma_j E^img_a[i, j] = -conj(F^src_a[i, j]) sigma_i
/// ```
///
/// for all Levi nodes a, where E^img acts on the image module and F^src on
/// the source.  The ratios are propagated from the first weight, seeded by
/// the rank-one convention -i; involutivity and reality of kappa are then
/// verified as products.
fn solve_star_weights(
    n: usize,
    hp: &SubRep,
    hm: &SubRep,
) -> Result<(Vec<Scalar>, Vec<Scalar>), FiberError> {
    let seed = -&Scalar::i();
    let sigma = conjugation_weights(n, &hm.rep, &hp.rep, &seed)?;
    let tau = conjugation_weights(n, &hp.rep, &hm.rep, &seed)?;
    for k in 0..n {
        if !(&sigma[k].conjugate() * &tau[k]).is_one() {
            return Err(FiberError::StarStructure { reason: "weights break involutivity" });
        }
        if !(&(&tau[k] * &sigma[k]) + &Scalar::one()).is_zero() {
            return Err(FiberError::StarStructure { reason: "weights break reality of kappa" });
        }
    }
    Ok((sigma, tau))
}

/// Diagonal weights of a conjugate-equivariant map from `source` to
/// `image`, normalized to the given first weight; fails if the constraint
/// graph is inconsistent or does not connect every basis vector.
fn conjugation_weights(
    n: usize,
    image: &Rep,
    source: &Rep,
    seed: &Scalar,
) -> Result<Vec<Scalar>, FiberError> {
    let mut vals: Vec<Option<Scalar>> = vec![None; n];
    vals[0] = Some(seed.clone());
    let nodes = levi_nodes(n);
    loop {
        let mut progressed = false;
        for &a in &nodes {
            let e_img = image.e_matrix(a);
            let f_src = source.f_matrix(a);
            for i in 0..n {
                for j in 0..n {
                    let e = e_img.at(i, j);
                    let f = f_src.at(i, j);
                    match (e.is_zero(), f.is_zero()) {
                        (true, true) => continue,
                        (false, true) | (true, false) => {
                            // One side of sigma_j e = -conj(f) sigma_i is
                            // forced to vanish: no nonzero diagonal map.
                            return Err(FiberError::StarStructure {
                                reason: "conjugation constraint forces a zero weight",
                            });
                        }
                        (false, false) => {}
                    }
                    let rhs = -&f.conjugate();
                    match (vals[j].clone(), vals[i].clone()) {
                        (Some(vj), Some(vi)) => {
                            if &vj * e != &rhs * &vi {
                                return Err(FiberError::StarStructure {
                                    reason: "conjugation constraints are inconsistent",
                                });
                            }
                        }
                        (None, Some(vi)) => {
                            vals[j] = Some(&(&rhs * &vi) * &e.inv()?);
                            progressed = true;
                        }
                        (Some(vj), None) => {
                            vals[i] = Some(&(&vj * e) * &rhs.inv()?);
                            progressed = true;
                        }
                        (None, None) => {}
                    }
                }
            }
        }
        if !progressed {
            break;
        }
    }
    vals.into_iter()
        .map(|v| {
            v.ok_or(FiberError::StarStructure { reason: "conjugation constraints do not connect the basis" })
        })
        .collect()
}

// ---- Word utilities ----

/// One reduction step at position t of a word, with the given cross matrix,
/// as raw (word, coefficient) terms.
fn reduce_at_with(n: usize, cross: &Matrix, w: &[u8], t: usize) -> Vec<(Word, Scalar)> {
    let n8 = n as u8;
    let (a, b) = (w[t], w[t + 1]);
    debug_assert!(a >= b, "reduction requested on an ordered pair");
    if a == b {
        return Vec::new();
    }
    let mut out = Vec::new();
    if a < n8 || b >= n8 {
        // Same-sector descending pair: swap with -q (holomorphic) or
        // -q^-1 (anti-holomorphic).
        let coeff = if a < n8 { -&Scalar::q() } else { -&Scalar::q_pow(-1) };
        let mut word = w.to_vec();
        word.swap(t, t + 1);
        out.push((word, coeff));
    } else {
        // Cross pair e-_j e+_i: substitute the relation.
        let j0 = (a - n8) as usize;
        let i0 = b as usize;
        let col = j0 * n + i0;
        for k0 in 0..n {
            for l0 in 0..n {
                let c = cross.at(k0 * n + l0, col);
                if c.is_zero() {
                    continue;
                }
                let mut word = w.to_vec();
                word[t] = k0 as u8;
                word[t + 1] = (n + l0) as u8;
                out.push((word, c.clone()));
            }
        }
    }
    out
}

/// Unmemoized normal form with the given cross matrix, under the leftmost
/// or rightmost reduction strategy; used by the confluence stage of the
/// solver on trial members of the solution family.
fn normal_form_with(n: usize, cross: &Matrix, w: &[u8], leftmost: bool) -> LinComb {
    match find_reducible(w, leftmost) {
        None => {
            let mut out = LinComb::new();
            add_term(&mut out, w.to_vec(), &Scalar::one());
            out
        }
        Some(t) => {
            let mut acc = LinComb::new();
            for (word, coeff) in reduce_at_with(n, cross, w, t) {
                for (nf_word, nf_coeff) in normal_form_with(n, cross, &word, leftmost) {
                    add_term(&mut acc, nf_word, &(&coeff * &nf_coeff));
                }
            }
            acc
        }
    }
}

/// Adds a scaled word into a combination, dropping cancellations.
fn add_term(acc: &mut LinComb, w: Word, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.entry(w) {
        Entry::Vacant(slot) => {
            slot.insert(c.clone());
        }
        Entry::Occupied(mut slot) => {
            let sum = &*slot.get() + c;
            if sum.is_zero() {
                slot.remove();
            } else {
                *slot.get_mut() = sum;
            }
        }
    }
}

/// Position of the first (leftmost = true) or last reducible adjacent pair,
/// i.e. a pair with w[t] >= w[t+1].
fn find_reducible(w: &[u8], leftmost: bool) -> Option<usize> {
    if leftmost {
        (0..w.len().saturating_sub(1)).find(|&t| w[t] >= w[t + 1])
    } else {
        (0..w.len().saturating_sub(1)).rev().find(|&t| w[t] >= w[t + 1])
    }
}

/// All k-element ascending selections from an ascending pool, lexicographic.
fn combinations(pool: &[u8], k: usize) -> Vec<Vec<u8>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if pool.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (idx, &x) in pool.iter().enumerate() {
        if pool.len() - idx < k {
            break;
        }
        for mut rest in combinations(&pool[idx + 1..], k - 1) {
            let mut w = Vec::with_capacity(k);
            w.push(x);
            w.append(&mut rest);
            out.push(w);
        }
    }
    out
}

/// Small binomial coefficient as usize.
fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as usize
}

// ==== Tests ====

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRat;

    fn q() -> Scalar {
        Scalar::q()
    }

    // ==== Construction and solver shape ====

    #[test]
    fn construction_and_family_dimensions() {
        let a1 = FiberAlgebra::new(1).expect("CP^1 fiber");
        assert_eq!(a1.cross_family_dim(), 1);
        let a2 = FiberAlgebra::new(2).expect("CP^2 fiber");
        assert_eq!(a2.cross_family_dim(), 0);
        let a3 = FiberAlgebra::new(3).expect("CP^3 fiber");
        assert_eq!(a3.cross_family_dim(), 0);
    }

    #[test]
    fn oracle_variant_is_pinned_across_ranks() {
        for n in 1..=3 {
            let alg = FiberAlgebra::new(n).expect("fiber algebra");
            assert!(
                alg.oracle_agreement().contains(&ORACLE_VARIANT),
                "variant list at n = {n}: {:?}",
                alg.oracle_agreement()
            );
        }
    }

    #[test]
    fn kappa_coefficients_are_real_and_classical() {
        for n in 1..=3 {
            let alg = FiberAlgebra::new(n).expect("fiber algebra");
            let coeffs = alg.kappa_coeffs();
            assert_eq!(coeffs.len(), n);
            assert!(coeffs[0].is_one());
            for c in coeffs {
                assert!(c.is_real());
                assert_eq!(c.eval(&Rat::one()).unwrap(), GaussRat::one());
            }
        }
    }

    // ==== Rewriting ====

    #[test]
    fn same_sector_rewrites_match_hand_computation() {
        let alg = FiberAlgebra::new(2).expect("CP^2 fiber");
        // e+_2 e+_1 = -q e+_1 e+_2: letters [1, 0] -> -q [0, 1].
        let nf = alg.normal_form(&[1, 0]);
        assert_eq!(nf.len(), 1);
        assert_eq!(nf.get(&vec![0u8, 1]).unwrap(), &-&q());
        // e-_2 e-_1 = -q^-1 e-_1 e-_2: letters [3, 2] -> -q^-1 [2, 3].
        let nf = alg.normal_form(&[3, 2]);
        assert_eq!(nf.get(&vec![2u8, 3]).unwrap(), &-&Scalar::q_pow(-1));
        // Squares vanish.
        assert!(alg.normal_form(&[0, 0]).is_empty());
        assert!(alg.normal_form(&[2, 2]).is_empty());
    }

    #[test]
    fn cross_rewrite_matches_cross_matrix() {
        let alg = FiberAlgebra::new(2).expect("CP^2 fiber");
        let n = 2;
        // e-_1 e+_2: letters [2, 1]; j0 = 0, i0 = 1, column 1.
        let nf = alg.normal_form(&[2, 1]);
        for k0 in 0..n {
            for l0 in 0..n {
                let expect = alg.cross_matrix().at(k0 * n + l0, 1);
                let word = vec![k0 as u8, (n + l0) as u8];
                match nf.get(&word) {
                    Some(c) => assert_eq!(c, expect),
                    None => assert!(expect.is_zero()),
                }
            }
        }
    }

    #[test]
    fn dimension_audit_for_small_ranks() {
        for n in 1..=3 {
            let alg = FiberAlgebra::new(n).expect("fiber algebra");
            alg.audit_dimensions().expect("graded dimensions");
        }
    }

    #[test]
    fn confluence_audit_for_small_ranks() {
        for n in 1..=3 {
            let alg = FiberAlgebra::new(n).expect("fiber algebra");
            alg.audit_confluence().expect("confluent rewriting");
        }
    }

    #[test]
    fn theta_bases_have_binomial_sizes() {
        let alg = FiberAlgebra::new(3).expect("CP^3 fiber");
        for k in 0..=6 {
            assert_eq!(alg.theta_basis(k).len(), choose(6, k));
        }
        // Bidegree components refine the grading: C(3,a) C(3,b) each.
        let mut total = 0;
        for a in 0..=3 {
            for b in 0..=3 {
                if a + b == 3 {
                    let part = alg.theta_basis_bidegree(a, b).len();
                    assert_eq!(part, choose(3, a) * choose(3, b));
                    total += part;
                }
            }
        }
        assert_eq!(total, choose(6, 3));
    }

    #[test]
    fn wedge_is_associative_on_samples() {
        let alg = FiberAlgebra::new(2).expect("CP^2 fiber");
        let mut x = LinComb::new();
        add_term(&mut x, vec![2], &Scalar::one());
        add_term(&mut x, vec![1], &Scalar::i());
        let mut y = LinComb::new();
        add_term(&mut y, vec![0], &q());
        add_term(&mut y, vec![3], &Scalar::one());
        let mut z = LinComb::new();
        add_term(&mut z, vec![2], &Scalar::one());
        let left = alg.wedge(&alg.wedge(&x, &y), &z);
        let right = alg.wedge(&x, &alg.wedge(&y, &z));
        assert_eq!(left, right);
    }

    // ==== Star structure ====

    #[test]
    fn star_is_an_involution() {
        let alg = FiberAlgebra::new(2).expect("CP^2 fiber");
        let mut x = LinComb::new();
        add_term(&mut x, vec![0], &Scalar::one());
        add_term(&mut x, vec![3], &Scalar::i());
        add_term(&mut x, vec![0, 2], &q());
        add_term(&mut x, vec![1, 3], &Scalar::from_frac(2, 3));
        let twice = alg.star(&alg.star(&x));
        assert_eq!(twice, x);
    }

    #[test]
    fn star_fixes_kappa() {
        for n in 1..=3 {
            let alg = FiberAlgebra::new(n).expect("fiber algebra");
            let kappa = alg.kappa();
            assert_eq!(alg.star(&kappa), kappa);
        }
    }

    // ==== Equivariance ====

    #[test]
    fn cross_solution_is_a_levi_intertwiner() {
        for n in 2..=3 {
            let alg = FiberAlgebra::new(n).expect("fiber algebra");
            let rep_out = tensor(&alg.h_plus().rep, &alg.h_minus().rep).unwrap();
            let rep_in = tensor(&alg.h_minus().rep, &alg.h_plus().rep).unwrap();
            let a = alg.cross_matrix();
            for &node in &levi_nodes(n) {
                let e_holds = rep_out.e_matrix(node).mul(a) == a.mul(rep_in.e_matrix(node));
                let f_holds = rep_out.f_matrix(node).mul(a) == a.mul(rep_in.f_matrix(node));
                assert!(e_holds && f_holds, "intertwining fails at node {node}");
            }
        }
    }

    #[test]
    fn kappa_is_levi_invariant_through_the_action() {
        for n in 2..=3 {
            let alg = FiberAlgebra::new(n).expect("fiber algebra");
            let basis = alg.theta_basis_bidegree(1, 1);
            let coords = alg.coordinates(&alg.kappa(), &basis);
            for &node in &levi_nodes(n) {
                for gen in [LeviGenerator::E(node), LeviGenerator::F(node)] {
                    let m = alg.levi_action_matrix(gen, &basis);
                    let image = m.apply(&coords);
                    assert!(image.iter().all(Scalar::is_zero), "kappa moves under {gen:?}");
                }
            }
        }
    }

    // ==== Frozen values ====

    #[test]
    fn rank_two_cross_matrix_is_frozen() {
        let alg = FiberAlgebra::new(2).expect("CP^2 fiber");
        let a = alg.cross_matrix();
        // Row and column pairs are enumerated (k, l) -> 2 (k - 1) + (l - 1).
        // Column c holds the reduced word e-_j e+_i, row r the wedge word
        // e+_k e-_l.  The pinned relations read
        //
        //   e-_1 e+_1 = -q^-2 e+_1 e-_1
        //   e-_1 e+_2 = -q^-1 e+_2 e-_1
        //   e-_2 e+_1 = -q^-1 e+_1 e-_2
        //   e-_2 e+_2 = (q^-2 - q^-4) e+_1 e-_1 - q^-2 e+_2 e-_2
        //
        // and at q = 1 collapse to anticommutators, as they must.
        let mut expect = vec![vec![Scalar::zero(); 4]; 4];
        expect[0][0] = -&Scalar::q_pow(-2);
        expect[2][1] = -&Scalar::q_pow(-1);
        expect[1][2] = -&Scalar::q_pow(-1);
        expect[0][3] = &Scalar::q_pow(-2) - &Scalar::q_pow(-4);
        expect[3][3] = -&Scalar::q_pow(-2);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(a.at(r, c), &expect[r][c], "entry ({r}, {c})");
            }
        }
    }

    #[test]
    fn kappa_and_star_weights_follow_geometric_patterns() {
        for n in 1..=3usize {
            let alg = FiberAlgebra::new(n).expect("fiber algebra");
            // kappa = sum_k q^(2 (k - 1)) e+_k e-_k once the leading pair is
            // normalized to one.
            for (k0, c) in alg.kappa_coeffs().iter().enumerate() {
                assert_eq!(c, &Scalar::q_pow(2 * k0 as i64), "kappa pair {k0}");
            }
            // star(e+_k) = -i q^(1 - k) e-_k, star(e-_k) = -i q^(k - 1) e+_k.
            let (sigma, tau) = alg.star_weights();
            let minus_i = -&Scalar::i();
            for k0 in 0..n {
                assert_eq!(sigma[k0], &minus_i * &Scalar::q_pow(-(k0 as i64)));
                assert_eq!(tau[k0], &minus_i * &Scalar::q_pow(k0 as i64));
            }
        }
    }

    #[test]
    fn rank_one_cross_coefficient_is_frozen() {
        let alg = FiberAlgebra::new(1).expect("CP^1 fiber");
        let value = alg.cross_matrix().at(0, 0).clone();
        // Pinned by the oracle inside the admissible family {-c : c real,
        // c(1) = 1}; the assembled braidings give -q^-2.
        assert_eq!(value, -&Scalar::q_pow(-2));
    }
}
