//! Finite-dimensional representations of the quantized enveloping algebra
//! of type A.
//!
//! The algebra U_q(sl_N) (Jimbo 1985, Drinfeld 1986) is presented by
//! generators E_a, F_a, K_a (a = 1..N-1) with
//!
//! ```text
//!   K_a E_b K_a^-1 = q^(alpha_a, alpha_b) E_b,
//!   [E_a, F_b]     = delta_ab (K_a - K_a^-1) / (q - q^-1),
//! ```
//!
//! plus the quantum Serre relations, and carries the coproduct
//! `Delta(E) = E (x) 1 + K (x) E`, `Delta(F) = F (x) K^-1 + 1 (x) F`,
//! antipode `S(E) = -K^-1 E`, `S(F) = -F K`, `S(K) = K^-1`.  A module is
//! stored concretely: a list of weights in fundamental-weight coordinates
//! (so the K-action is diagonal and never needs its own matrices) together
//! with one matrix per simple node for E and for F.  Duals act through the
//! antipode, tensor products through the coproduct, and everything is
//! checked against the defining relations by [`Rep::verify_relations`].
//!
//! Braidings come from the standard R-matrix of the vector representation
//! (Faddeev, Reshetikhin, Takhtajan 1989), rescaled by q^-1 so that all
//! entries stay Laurent in q; the braidings on pairs involving the dual
//! module are produced from it by the rigid-category crossing formulas with
//! the canonical evaluation and coevaluation (Klimyk, Schmuedgen 1997).
//! The q^-1 rescaling changes each braiding by one uniform power of q and
//! is invisible to every balanced combination used elsewhere in the crate.

use crate::linalg::{joint_kernel, Matrix};
use crate::scalar::{balanced_quantum_integer, Rat, Scalar};
use num::BigInt;
use thiserror::Error;

/// Failures while building or checking representations.
#[derive(Debug, Error)]
pub enum RepError {
    /// A defining relation of the algebra does not hold on the module.
    #[error("relation {relation} fails on the module")]
    RelationFailure {
        /// Human-readable name of the failed relation.
        relation: String,
    },
    /// A proposed submodule basis is not preserved by the action.
    #[error("subspace is not invariant under {generator}")]
    NotInvariant {
        /// Generator whose action leaves the span.
        generator: String,
    },
    /// A proposed submodule basis vector mixes distinct weights.
    #[error("basis vector {index} is not a weight vector")]
    NotWeightVector {
        /// Position of the offending vector in the basis list.
        index: usize,
    },
    /// A proposed submodule basis is linearly dependent.
    #[error("submodule basis is linearly dependent")]
    DependentBasis,
    /// Two modules cannot be combined because their ambient data differ.
    #[error("modules live over different ambient algebras")]
    AmbientMismatch,
}

// ---- Cartan data for A_n ----

/// Symmetrized Cartan pairing (alpha_i, alpha_j) for A_n, normalized so
/// that every root has square length 2.
pub fn alpha_pairing(rank: usize, i: usize, j: usize) -> i64 {
    assert!((1..=rank).contains(&i) && (1..=rank).contains(&j));
    if i == j {
        2
    } else if i.abs_diff(j) == 1 {
        -1
    } else {
        0
    }
}

/// Coordinates of the simple root alpha_a in the fundamental-weight basis:
/// row a of the Cartan matrix.
pub fn alpha_coords(rank: usize, a: usize) -> Vec<i64> {
    (1..=rank).map(|j| alpha_pairing(rank, a, j)).collect()
}

/// Pairing of fundamental weights, (omega_i, omega_j) = min(i,j)(N - max(i,j))/N
/// with N = rank + 1.  Rational in general; exposed for weight bookkeeping.
pub fn fundamental_pairing(rank: usize, i: usize, j: usize) -> Rat {
    assert!((1..=rank).contains(&i) && (1..=rank).contains(&j));
    let n_big = BigInt::from(rank as i64 + 1);
    let lo = BigInt::from(i.min(j) as i64);
    let hi = BigInt::from((rank + 1 - i.max(j)) as i64);
    Rat::new(lo * hi, n_big)
}

/// Pairing (2 rho, wt) of twice the Weyl vector with a weight given in
/// fundamental-weight coordinates.  Always an integer in type A:
/// (2 rho, omega_i) = i (N - i).
pub fn two_rho_pairing(wt: &[i64]) -> i64 {
    let n_big = wt.len() as i64 + 1;
    wt.iter()
        .enumerate()
        .map(|(idx, &m)| {
            let i = idx as i64 + 1;
            m * i * (n_big - i)
        })
        .sum()
}

// ---- Modules ----

/// A finite-dimensional weight module over U_q(sl_{rank+1}), or over a Levi
/// subalgebra of it when `nodes` lists only part of the simple nodes.
///
/// Weights are stored in fundamental-weight coordinates of the ambient
/// algebra, so K_i acts on the j-th basis vector by q^(weights[j][i-1]) for
/// every i, even when E_i, F_i are absent from `nodes`.
#[derive(Debug, Clone)]
pub struct Rep {
    rank: usize,
    nodes: Vec<usize>,
    dim: usize,
    weights: Vec<Vec<i64>>,
    e: Vec<Matrix>,
    f: Vec<Matrix>,
}

impl Rep {
    /// Ambient rank n of A_n.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Simple nodes whose E, F act on this module (1-based, ascending).
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Dimension of the underlying space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Weight of the j-th basis vector (0-based j), fundamental coordinates.
    pub fn weight(&self, j: usize) -> &[i64] {
        &self.weights[j]
    }

    /// Matrix of E_a; `a` must appear in `nodes`.
    pub fn e_matrix(&self, a: usize) -> &Matrix {
        let idx = self.node_index(a);
        &self.e[idx]
    }

    /// Matrix of F_a; `a` must appear in `nodes`.
    pub fn f_matrix(&self, a: usize) -> &Matrix {
        let idx = self.node_index(a);
        &self.f[idx]
    }

    /// Diagonal matrix of K_i (any i up to the ambient rank).
    pub fn k_matrix(&self, i: usize) -> Matrix {
        self.k_power_matrix(i, 1)
    }

    /// Diagonal matrix of K_i^-1.
    pub fn k_inv_matrix(&self, i: usize) -> Matrix {
        self.k_power_matrix(i, -1)
    }

    fn k_power_matrix(&self, i: usize, sign: i64) -> Matrix {
        assert!((1..=self.rank).contains(&i), "node out of range");
        let mut m = Matrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            m.set(j, j, Scalar::q_pow(sign * self.weights[j][i - 1]));
        }
        m
    }

    fn node_index(&self, a: usize) -> usize {
        self.nodes
            .iter()
            .position(|&x| x == a)
            .expect("node not present on this module")
    }

    /// Checks every defining relation of the (Levi) algebra on this module:
    /// weight compatibility of E and F, the E-F commutators against the
    /// balanced K-difference, and the quantum Serre relations.
    pub fn verify_relations(&self) -> Result<(), RepError> {
        let fail = |relation: &str| {
            Err(RepError::RelationFailure { relation: relation.to_string() })
        };
        // E_a raises weights by alpha_a, F_a lowers them; this encodes the
        // whole K-conjugation family structurally.
        for (idx, &a) in self.nodes.iter().enumerate() {
            let alpha = alpha_coords(self.rank, a);
            for r in 0..self.dim {
                for c in 0..self.dim {
                    if !self.e[idx].at(r, c).is_zero() {
                        let shifted: Vec<i64> = self.weights[c]
                            .iter()
                            .zip(&alpha)
                            .map(|(w, d)| w + d)
                            .collect();
                        if self.weights[r] != shifted {
                            return fail(&format!("weight shift of E_{a}"));
                        }
                    }
                    if !self.f[idx].at(r, c).is_zero() {
                        let shifted: Vec<i64> = self.weights[c]
                            .iter()
                            .zip(&alpha)
                            .map(|(w, d)| w - d)
                            .collect();
                        if self.weights[r] != shifted {
                            return fail(&format!("weight shift of F_{a}"));
                        }
                    }
                }
            }
        }
        // [E_a, F_b] = delta_ab (K_a - K_a^-1)/(q - q^-1).
        let qdiff = &Scalar::q() - &Scalar::q_pow(-1);
        for (ia, &a) in self.nodes.iter().enumerate() {
            for (ib, &b) in self.nodes.iter().enumerate() {
                let lhs = self.e[ia].commutator(&self.f[ib]);
                let rhs = if a == b {
                    self.k_matrix(a)
                        .sub(&self.k_inv_matrix(a))
                        .scale(&(&Scalar::one() / &qdiff))
                } else {
                    Matrix::zeros(self.dim, self.dim)
                };
                if lhs != rhs {
                    return fail(&format!("[E_{a}, F_{b}]"));
                }
            }
        }
        // Serre relations among the E's and among the F's.
        let two = balanced_quantum_integer(2);
        for (ia, &a) in self.nodes.iter().enumerate() {
            for (ib, &b) in self.nodes.iter().enumerate() {
                if a == b {
                    continue;
                }
                for (family, name) in [(&self.e, "E"), (&self.f, "F")] {
                    let x = &family[ia];
                    let y = &family[ib];
                    let holds = if a.abs_diff(b) >= 2 {
                        x.commutator(y).is_zero()
                    } else {
                        let xxy = x.mul(x).mul(y);
                        let xyx = x.mul(y).mul(x).scale(&two);
                        let yxx = y.mul(x).mul(x);
                        xxy.sub(&xyx).add(&yxx).is_zero()
                    };
                    if !holds {
                        return fail(&format!("Serre({name}_{a}, {name}_{b})"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The vector representation of U_q(sl_{n+1}): basis v_1..v_{n+1} with
/// E_a v_{a+1} = v_a, F_a v_a = v_{a+1}, highest weight omega_1.
pub fn vector_rep(n: usize) -> Rep {
    assert!(n >= 1, "rank must be at least 1");
    let dim = n + 1;
    let mut weights = Vec::with_capacity(dim);
    let mut wt = vec![0i64; n];
    wt[0] = 1;
    weights.push(wt.clone());
    for j in 1..dim {
        let alpha = alpha_coords(n, j);
        for (w, d) in wt.iter_mut().zip(&alpha) {
            *w -= d;
        }
        weights.push(wt.clone());
    }
    let mut e = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    for a in 1..=n {
        let mut ea = Matrix::zeros(dim, dim);
        ea.set(a - 1, a, Scalar::one());
        e.push(ea);
        let mut fa = Matrix::zeros(dim, dim);
        fa.set(a, a - 1, Scalar::one());
        f.push(fa);
    }
    Rep { rank: n, nodes: (1..=n).collect(), dim, weights, e, f }
}

/// The dual module on the dual basis f_1..f_dim, acting through the
/// antipode: `(X f)(v) = f(S(X) v)`, so the matrix of X on the dual is the
/// transpose of the matrix of S(X).
pub fn dual_rep(rep: &Rep) -> Rep {
    let weights = rep.weights.iter().map(|w| w.iter().map(|m| -m).collect()).collect();
    let mut e = Vec::with_capacity(rep.nodes.len());
    let mut f = Vec::with_capacity(rep.nodes.len());
    for (idx, &a) in rep.nodes.iter().enumerate() {
        // S(E_a) = -K_a^-1 E_a, S(F_a) = -F_a K_a.
        let se = rep.k_inv_matrix(a).mul(&rep.e[idx]).scale(&-&Scalar::one());
        let sf = rep.f[idx].mul(&rep.k_matrix(a)).scale(&-&Scalar::one());
        e.push(se.transpose());
        f.push(sf.transpose());
    }
    Rep {
        rank: rep.rank,
        nodes: rep.nodes.clone(),
        dim: rep.dim,
        weights,
        e,
        f,
    }
}

/// Tensor product along the coproduct; basis order `(i, j) -> i*dim_b + j`.
pub fn tensor(a: &Rep, b: &Rep) -> Result<Rep, RepError> {
    if a.rank != b.rank || a.nodes != b.nodes {
        return Err(RepError::AmbientMismatch);
    }
    let dim = a.dim * b.dim;
    let mut weights = Vec::with_capacity(dim);
    for wa in &a.weights {
        for wb in &b.weights {
            weights.push(wa.iter().zip(wb).map(|(x, y)| x + y).collect());
        }
    }
    let id_a = Matrix::identity(a.dim);
    let id_b = Matrix::identity(b.dim);
    let mut e = Vec::with_capacity(a.nodes.len());
    let mut f = Vec::with_capacity(a.nodes.len());
    for (idx, &node) in a.nodes.iter().enumerate() {
        // Delta(E) = E (x) 1 + K (x) E, Delta(F) = F (x) K^-1 + 1 (x) F.
        let et = a.e[idx]
            .kronecker(&id_b)
            .add(&a.k_matrix(node).kronecker(&b.e[idx]));
        let ft = a.f[idx]
            .kronecker(&b.k_inv_matrix(node))
            .add(&id_a.kronecker(&b.f[idx]));
        e.push(et);
        f.push(ft);
    }
    Ok(Rep { rank: a.rank, nodes: a.nodes.clone(), dim, weights, e, f })
}

/// Forgets the action of every simple node outside `nodes`, keeping all
/// K-weights; this is restriction to a Levi subalgebra.
pub fn restrict_to_levi(rep: &Rep, nodes: &[usize]) -> Rep {
    let mut e = Vec::new();
    let mut f = Vec::new();
    let mut kept = Vec::new();
    for (idx, &a) in rep.nodes.iter().enumerate() {
        if nodes.contains(&a) {
            kept.push(a);
            e.push(rep.e[idx].clone());
            f.push(rep.f[idx].clone());
        }
    }
    Rep {
        rank: rep.rank,
        nodes: kept,
        dim: rep.dim,
        weights: rep.weights.clone(),
        e,
        f,
    }
}

/// Simple nodes of the Levi subalgebra fixing the first node: 2..=n.
pub fn levi_nodes(n: usize) -> Vec<usize> {
    (2..=n).collect()
}

/// The module carried by a distinguished invariant subspace, together with
/// its basis written in the coordinates of the parent module.
#[derive(Debug, Clone)]
pub struct SubRep {
    /// The restricted module in the subspace basis.
    pub rep: Rep,
    /// basis[j] is the j-th subspace basis vector in parent coordinates.
    pub basis: Vec<Vec<Scalar>>,
}

/// Restricts the action of `parent` to the span of `basis`.
///
/// Every basis vector must be a weight vector and the span must be
/// preserved by E_a, F_a for every listed node; otherwise an error reports
/// the offending generator.
pub fn submodule(parent: &Rep, basis: &[Vec<Scalar>]) -> Result<SubRep, RepError> {
    let b = Matrix::from_columns(basis);
    if b.rank() != basis.len() {
        return Err(RepError::DependentBasis);
    }
    let mut weights = Vec::with_capacity(basis.len());
    for (j, v) in basis.iter().enumerate() {
        let mut wt: Option<Vec<i64>> = None;
        for (coord, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            match &wt {
                None => wt = Some(parent.weights[coord].clone()),
                Some(w) if *w == parent.weights[coord] => {}
                Some(_) => return Err(RepError::NotWeightVector { index: j }),
            }
        }
        weights.push(wt.ok_or(RepError::NotWeightVector { index: j })?);
    }
    let restrict = |op: &Matrix, generator: String| -> Result<Matrix, RepError> {
        let mut cols = Vec::with_capacity(basis.len());
        for v in basis {
            let image = op.apply(v);
            let col = b
                .solve(&image)
                .ok_or(RepError::NotInvariant { generator: generator.clone() })?;
            cols.push(col);
        }
        Ok(Matrix::from_columns(&cols))
    };
    let mut e = Vec::with_capacity(parent.nodes.len());
    let mut f = Vec::with_capacity(parent.nodes.len());
    for (idx, &a) in parent.nodes.iter().enumerate() {
        e.push(restrict(&parent.e[idx], format!("E_{a}"))?);
        f.push(restrict(&parent.f[idx], format!("F_{a}"))?);
    }
    let rep = Rep {
        rank: parent.rank,
        nodes: parent.nodes.clone(),
        dim: basis.len(),
        weights,
        e,
        f,
    };
    Ok(SubRep { rep, basis: basis.to_vec() })
}

/// Basis of the joint invariants: the kernel of every listed E_a and F_a
/// together with the kernel of K_i - 1 for every ambient node i, so an
/// invariant must in particular have weight zero.
pub fn invariant_vectors(rep: &Rep) -> Vec<Vec<Scalar>> {
    let mut ops: Vec<Matrix> = Vec::new();
    ops.extend(rep.e.iter().cloned());
    ops.extend(rep.f.iter().cloned());
    let id = Matrix::identity(rep.dim);
    for i in 1..=rep.rank {
        ops.push(rep.k_matrix(i).sub(&id));
    }
    joint_kernel(&ops, rep.dim)
}

/// The common parent of both chirality seed modules: V (x) V* restricted
/// to the Levi subalgebra fixing node 1.
fn seed_parent(n: usize) -> Rep {
    let v = vector_rep(n);
    let vd = dual_rep(&v);
    restrict_to_levi(&tensor(&v, &vd).expect("same ambient"), &levi_nodes(n))
}

/// The anti-holomorphic seed module: span of v_i (x) f_1, i >= 2, inside
/// V (x) V*, a Levi module of defining type (highest weight the first
/// fundamental weight of the Levi factor).
///
/// The basis is enumerated with i descending, so the k-th basis vector is
/// v_{n+2-k} (x) f_1.  With this ordering the Levi-invariant quadratic
/// ideal of the induced exterior algebra is spanned by squares together
/// with e_i (x) e_j + q^-1 e_j (x) e_i for i < j, which yields the
/// standard anti-holomorphic commutation constant -q^-1 on descending
/// pairs.
pub fn h_minus(n: usize) -> SubRep {
    let parent = seed_parent(n);
    let dim = n + 1;
    let basis: Vec<Vec<Scalar>> = (1..dim)
        .rev()
        .map(|i| {
            let mut x = vec![Scalar::zero(); dim * dim];
            x[i * dim] = Scalar::one();
            x
        })
        .collect();
    submodule(&parent, &basis).expect("span of v_i (x) f_1 is Levi-invariant")
}

/// The holomorphic seed module: span of v_1 (x) f_l, l >= 2, inside
/// V (x) V*, a Levi module of anti-defining type (highest weight the last
/// fundamental weight of the Levi factor).  Sharing the parent V (x) V*
/// with [`h_minus`] lets degree-(1,1) data embed into (V (x) V*)^(x)2.
///
/// The basis is enumerated with l descending, so the k-th basis vector is
/// v_1 (x) f_{n+2-k}.  With this ordering the Levi-invariant quadratic
/// ideal of the induced exterior algebra is spanned by squares together
/// with e_i (x) e_j + q e_j (x) e_i for i < j, which yields the standard
/// holomorphic commutation constant -q on descending pairs.
pub fn h_plus(n: usize) -> SubRep {
    let parent = seed_parent(n);
    let dim = n + 1;
    let basis: Vec<Vec<Scalar>> = (1..dim)
        .rev()
        .map(|l| {
            let mut x = vec![Scalar::zero(); dim * dim];
            x[l] = Scalar::one();
            x
        })
        .collect();
    submodule(&parent, &basis).expect("span of v_1 (x) f_l is Levi-invariant")
}

// ---- Braidings ----

/// The four ordered pairs of the vector module V and its dual on which a
/// braiding is provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BraidSlots {
    /// V (x) V -> V (x) V.
    VecVec,
    /// V* (x) V -> V (x) V*.
    DualVec,
    /// V (x) V* -> V* (x) V.
    VecDual,
    /// V* (x) V* -> V* (x) V*.
    DualDual,
}

/// The braiding on the requested pair, normalized so all entries are
/// Laurent polynomials in q (an overall q^-1 against the bare R-matrix on
/// V (x) V, and the matching uniform powers on the dualized pairs).
///
/// All four matrices specialize to the tensor flip at q = 1 and intertwine
/// the module actions; the dualized ones arise from the crossing formulas
///
/// ```text
///   c(V*, V)  = (ev (x) 1)(1 (x) c(V,V)^-1 (x) 1)(1 (x) coev),
///   c(V, V*)  = [(ev (x) 1)(1 (x) c(V,V) (x) 1)(1 (x) coev)]^-1,
///   c(V*, V*) = [(ev (x) 1)(1 (x) c(V*,V) (x) 1)(1 (x) coev)]^-1,
/// ```
///
/// with ev(f_i (x) v_j) = delta_ij and coev(1) = sum_k v_k (x) f_k.
pub fn braiding(n: usize, slots: BraidSlots) -> Matrix {
    let dim = n + 1;
    let hat = braiding_vec_vec(dim);
    match slots {
        BraidSlots::VecVec => hat,
        BraidSlots::DualVec => close(&hat.inverse().expect("braiding invertible"), dim),
        BraidSlots::VecDual => close(&hat, dim)
            .inverse()
            .expect("crossing of braiding invertible"),
        BraidSlots::DualDual => {
            let dual_vec = close(&hat.inverse().expect("braiding invertible"), dim);
            close(&dual_vec, dim)
                .inverse()
                .expect("crossing of braiding invertible")
        }
    }
}

// ---- Private helpers ----

/// q^-1 times the R-matrix braiding of V (x) V:
/// v_i (x) v_i -> q v_i (x) v_i, and for i < j
/// v_i (x) v_j -> v_j (x) v_i + (q - q^-1) v_i (x) v_j,
/// v_j (x) v_i -> v_i (x) v_j, all scaled by q^-1.
/// Eigenvalues after scaling: 1 on the q-symmetric square, -q^-2 on the
/// q-alternating square.
fn braiding_vec_vec(dim: usize) -> Matrix {
    let mut m = Matrix::zeros(dim * dim, dim * dim);
    let qs = Scalar::q();
    let qdiff = &qs - &Scalar::q_pow(-1);
    for k in 0..dim {
        for l in 0..dim {
            let col = k * dim + l;
            if k == l {
                m.set(col, col, qs.clone());
            } else if k < l {
                m.set(l * dim + k, col, Scalar::one());
                m.set(col, col, qdiff.clone());
            } else {
                m.set(l * dim + k, col, Scalar::one());
            }
        }
    }
    m.scale(&Scalar::q_pow(-1))
}

/// Closes the outer legs of a map on a two-fold tensor product with ev on
/// the left and coev on the right:
/// `close(X)[(j,k),(a,b)] = X[(a,j),(b,k)]`.
fn close(x: &Matrix, dim: usize) -> Matrix {
    let mut out = Matrix::zeros(dim * dim, dim * dim);
    for j in 0..dim {
        for k in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    let v = x.at(a * dim + j, b * dim + k);
                    if !v.is_zero() {
                        out.set(j * dim + k, a * dim + b, v.clone());
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRat;
    use num::Zero;

    /// Exact evaluation of every entry at a rational point.
    fn eval_matrix(m: &Matrix, at: &Rat) -> Vec<Vec<GaussRat>> {
        (0..m.rows())
            .map(|r| {
                (0..m.cols())
                    .map(|c| m.at(r, c).eval(at).expect("no pole"))
                    .collect()
            })
            .collect()
    }

    fn flip_matrix(dim: usize) -> Matrix {
        let mut m = Matrix::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(j * dim + i, i * dim + j, Scalar::one());
            }
        }
        m
    }

    // ==== Cartan data ====

    #[test]
    fn weyl_vector_pairing_closed_form() {
        // (2 rho, omega_i) = i(N - i) must match 2 sum_j (omega_j, omega_i).
        for n in 1..=4 {
            for i in 1..=n {
                let mut acc = Rat::zero();
                for j in 1..=n {
                    acc += fundamental_pairing(n, i, j);
                }
                let mut wt = vec![0i64; n];
                wt[i - 1] = 1;
                assert_eq!(Rat::from_integer(BigInt::from(two_rho_pairing(&wt))), acc * BigInt::from(2));
            }
        }
    }

    // ==== Defining relations ====

    #[test]
    fn vector_and_dual_reps_satisfy_relations() {
        for n in 1..=4 {
            let v = vector_rep(n);
            v.verify_relations().expect("vector rep");
            dual_rep(&v).verify_relations().expect("dual rep");
        }
    }

    #[test]
    fn tensor_reps_satisfy_relations() {
        for n in 1..=3 {
            let v = vector_rep(n);
            let vd = dual_rep(&v);
            tensor(&v, &vd).unwrap().verify_relations().expect("V (x) V*");
            tensor(&vd, &v).unwrap().verify_relations().expect("V* (x) V");
            tensor(&v, &v).unwrap().verify_relations().expect("V (x) V");
        }
    }

    #[test]
    fn dual_action_matches_hand_computation() {
        // sl_2: E v_2 = v_1, K v_1 = q v_1.  On the dual,
        // (E f_1)(v_2) = f_1(S(E) v_2) = f_1(-K^-1 E v_2) = -q^-1,
        // so E f_1 = -q^-1 f_2 and E f_2 = 0.
        let vd = dual_rep(&vector_rep(1));
        let e = vd.e_matrix(1);
        assert_eq!(e.at(1, 0), &-&Scalar::q_pow(-1));
        assert!(e.at(0, 0).is_zero() && e.at(0, 1).is_zero() && e.at(1, 1).is_zero());
        // Weights are negated: wt(f_1) = -omega_1.
        assert_eq!(vd.weight(0), &[-1]);
    }

    // ==== Invariants ====

    #[test]
    fn coevaluation_vector_is_the_invariant_of_v_tensor_dual() {
        // sum_j v_j (x) f_j is killed by every E_a and F_a and has weight
        // zero; it spans the invariants of V (x) V*.
        for n in 1..=3 {
            let v = vector_rep(n);
            let t = tensor(&v, &dual_rep(&v)).unwrap();
            let inv = invariant_vectors(&t);
            assert_eq!(inv.len(), 1);
            let dim = n + 1;
            let w = &inv[0];
            let anchor = w[0].clone();
            assert!(!anchor.is_zero());
            for i in 0..dim {
                for j in 0..dim {
                    let entry = &w[i * dim + j];
                    if i == j {
                        assert_eq!(entry, &anchor);
                    } else {
                        assert!(entry.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn evaluation_side_invariant_carries_rho_weights() {
        // In V* (x) V the invariant is sum_j q^(2 rho, wt v_j) f_j (x) v_j;
        // for the vector module (2 rho, wt v_j) = N + 1 - 2j.
        for n in 1..=3 {
            let v = vector_rep(n);
            let t = tensor(&dual_rep(&v), &v).unwrap();
            let inv = invariant_vectors(&t);
            assert_eq!(inv.len(), 1);
            let dim = n + 1;
            let w = &inv[0];
            let anchor = w[0].clone();
            for j in 0..dim {
                let expect = &anchor
                    * &Scalar::q_pow(two_rho_pairing(v.weight(j)) - two_rho_pairing(v.weight(0)));
                assert_eq!(w[j * dim + j], expect);
            }
        }
    }

    // ==== Submodules and Levi restriction ====

    #[test]
    fn non_invariant_span_is_rejected() {
        // span{v_1} in the sl_2 vector module is not F-stable.
        let v = vector_rep(1);
        let basis = vec![vec![Scalar::one(), Scalar::zero()]];
        match submodule(&v, &basis) {
            Err(RepError::NotInvariant { generator }) => assert_eq!(generator, "F_1"),
            other => panic!("expected invariance failure, got {other:?}"),
        }
    }

    #[test]
    fn chirality_seed_modules_restrict() {
        for n in 1..=3 {
            let hp = h_plus(n);
            let hm = h_minus(n);
            assert_eq!(hp.rep.dim(), n);
            assert_eq!(hm.rep.dim(), n);
            hp.rep.verify_relations().expect("H+ Levi module");
            hm.rep.verify_relations().expect("H- Levi module");
            // Every weight keeps a nonzero K_1-component, so no invariants.
            for j in 0..n {
                assert_ne!(hp.rep.weight(j)[0], 0);
                assert_ne!(hm.rep.weight(j)[0], 0);
            }
            assert!(invariant_vectors(&hp.rep).is_empty());
            assert!(invariant_vectors(&hm.rep).is_empty());
        }
    }

    #[test]
    fn seed_weights_at_rank_two() {
        // n = 2: wt(v_1) = (1,0), wt(v_2) = (-1,1), wt(v_3) = (0,-1), so
        // H+ basis v_1 (x) f_3, v_1 (x) f_2 carries (1,1) and (2,-1).
        let hp = h_plus(2);
        assert_eq!(hp.rep.weight(0), &[1, 1]);
        assert_eq!(hp.rep.weight(1), &[2, -1]);
        let hm = h_minus(2);
        assert_eq!(hm.rep.weight(0), &[-1, -1]);
        assert_eq!(hm.rep.weight(1), &[-2, 1]);
    }

    // ==== Braidings ====

    #[test]
    fn vec_vec_braiding_intertwines_and_has_two_eigenvalues() {
        for n in 1..=3 {
            let v = vector_rep(n);
            let t = tensor(&v, &v).unwrap();
            let r = braiding(n, BraidSlots::VecVec);
            for a in 1..=n {
                assert_eq!(r.mul(t.e_matrix(a)), t.e_matrix(a).mul(&r), "E_{a}");
                assert_eq!(r.mul(t.f_matrix(a)), t.f_matrix(a).mul(&r), "F_{a}");
                assert_eq!(r.mul(&t.k_matrix(a)), t.k_matrix(a).mul(&r), "K_{a}");
            }
            // (R - 1)(R + q^-2) = 0 with the alternating rank N(N-1)/2.
            let dim2 = (n + 1) * (n + 1);
            let id = Matrix::identity(dim2);
            let sym = r.sub(&id);
            let alt = r.add(&id.scale(&Scalar::q_pow(-2)));
            assert!(sym.mul(&alt).is_zero());
            assert_eq!(sym.rank(), (n + 1) * n / 2);
        }
    }

    #[test]
    fn all_braidings_intertwine_and_flip_classically() {
        let one = Rat::from_integer(BigInt::from(1));
        for n in 1..=2 {
            let v = vector_rep(n);
            let vd = dual_rep(&v);
            let cases = [
                (BraidSlots::VecVec, &v, &v),
                (BraidSlots::DualVec, &vd, &v),
                (BraidSlots::VecDual, &v, &vd),
                (BraidSlots::DualDual, &vd, &vd),
            ];
            for (slots, a, b) in cases {
                let dom = tensor(a, b).unwrap();
                let cod = tensor(b, a).unwrap();
                let c = braiding(n, slots);
                for node in 1..=n {
                    assert_eq!(
                        c.mul(dom.e_matrix(node)),
                        cod.e_matrix(node).mul(&c),
                        "{slots:?} E_{node}"
                    );
                    assert_eq!(
                        c.mul(dom.f_matrix(node)),
                        cod.f_matrix(node).mul(&c),
                        "{slots:?} F_{node}"
                    );
                    assert_eq!(
                        c.mul(&dom.k_matrix(node)),
                        cod.k_matrix(node).mul(&c),
                        "{slots:?} K_{node}"
                    );
                }
                assert_eq!(
                    eval_matrix(&c, &one),
                    eval_matrix(&flip_matrix(n + 1), &one),
                    "{slots:?} at q = 1"
                );
            }
        }
    }

    #[test]
    fn mixed_braid_relation_holds() {
        // On V* (x) V (x) V:
        // (R (x) 1)(1 (x) c)(c (x) 1) = (1 (x) c)(c (x) 1)(1 (x) R)
        // with c the braiding V* (x) V -> V (x) V*.
        for n in 1..=2 {
            let dim = n + 1;
            let id = Matrix::identity(dim);
            let r = braiding(n, BraidSlots::VecVec);
            let c = braiding(n, BraidSlots::DualVec);
            let lhs = r
                .kronecker(&id)
                .mul(&id.kronecker(&c))
                .mul(&c.kronecker(&id));
            let rhs = id
                .kronecker(&c)
                .mul(&c.kronecker(&id))
                .mul(&id.kronecker(&r));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn sl2_braiding_matches_hand_computation() {
        // n = 1, basis (11, 12, 21, 22): after the q^-1 scale,
        // 11 -> 11, 12 -> q^-1 21 + (1 - q^-2) 12, 21 -> q^-1 12, 22 -> 22.
        let r = braiding(1, BraidSlots::VecVec);
        assert_eq!(r.at(0, 0), &Scalar::one());
        assert_eq!(r.at(3, 3), &Scalar::one());
        assert_eq!(r.at(2, 1), &Scalar::q_pow(-1));
        assert_eq!(r.at(1, 1), &(&Scalar::one() - &Scalar::q_pow(-2)));
        assert_eq!(r.at(1, 2), &Scalar::q_pow(-1));
        assert!(r.at(2, 2).is_zero());
    }
}
