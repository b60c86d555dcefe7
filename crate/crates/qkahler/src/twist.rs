//! Twisted fiber operators for line modules, curvature commutators,
//! spectral-gap bounds, and flag-manifold metadata.
//!
//! A line-module twist acts on the fiber through its Chern curvature,
//! which for a positive module is `nabla^2 = -theta i L` and for a
//! negative module `+theta i L`, with `theta` a scalar certified positive
//! on the working interval.  The curvature commutator `[i nabla^2,
//! Lambda_F]` is then computed blockwise by honest matrix composition of
//! the Lefschetz and dual Lefschetz operators (the sl_2 relation is
//! reproduced, not assumed) and certified to equal `+/- theta (k - M)`
//! times the identity on every degree.
//!
//! The spectral-gap reporter returns the lower bounds this curvature
//! scalar yields: `theta` for the twisted anti-holomorphic Laplacian (on
//! middle degrees and on the anti-holomorphic complex), `3 theta` for the
//! Chern Laplacian on middle degrees, and `sqrt(theta)` for the absolute
//! value of twisted Dolbeault-Dirac eigenvalues, each with its domain
//! annotation and the attainment flag that applies when the top
//! anti-holomorphic level carries a holomorphically closed form.  Bounds
//! are carried exactly: the Dirac bound is stored as the radicand.
//!
//! The metadata registry records the irreducible quantum flag manifolds
//! (Heckenberger-Kolb 2006): series, crossed Dynkin nodes, Levi factor,
//! cotangent modules, complex dimension, and the spin data with the
//! holomorphic square root of the canonical module.  Rows serialize to
//! JSON through one code path so file-based golden comparisons and CLI
//! output cannot drift apart.

use crate::metric::QuantumMetric;
use crate::scalar::{quantum_integer, Rat, Scalar, ScalarError};
use crate::sturm::{sign_on_interval, SignVerdict};
use serde::{Deserialize, Serialize};

/// Failures while building twists or certifying curvature actions.
#[derive(Debug, thiserror::Error)]
pub enum TwistError {
    /// Exact arithmetic failed.
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    /// The curvature scalar could not be certified positive on the
    /// working window.
    #[error("theta is not certifiably positive on the working window: {verdict:?}")]
    ThetaNotPositive {
        /// The failing verdict with its witness.
        verdict: SignVerdict,
    },
    /// The twist index zero has flat curvature: no sign, no gap claim.
    #[error("twist index 0 is flat; no curvature sign or spectral gap is claimed")]
    FlatTwist,
    /// A curvature commutator block is not the predicted scalar multiple
    /// of the identity.
    #[error("curvature commutator block in degree {degree} is not scalar")]
    NonScalarBlock {
        /// Degree of the failing block.
        degree: usize,
    },
    /// The requested flag manifold is not in the registry.
    #[error("unknown flag manifold identifier: {space}")]
    UnknownSpace {
        /// The identifier that failed to resolve.
        space: String,
    },
}

/// Sign of a twisting line module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwistSign {
    /// Positive module: curvature `nabla^2 = -theta i L`.
    Positive,
    /// Negative module: curvature `nabla^2 = +theta i L`.
    Negative,
}

/// A one-dimensional twist with certified positive curvature scalar.
#[derive(Debug, Clone)]
pub struct TwistData {
    sign: TwistSign,
    theta: Scalar,
    window: (Rat, Rat),
}

impl TwistData {
    /// Builds a twist after certifying `theta` strictly positive on the
    /// given window.
    ///
    /// # Arguments
    ///
    /// * `sign` - positivity type of the line module.
    /// * `theta` - curvature scalar.
    /// * `window` - open q-interval on which positivity is certified.
    ///
    /// # Returns
    ///
    /// The certified twist, or the failing sign verdict.
    pub fn new(sign: TwistSign, theta: Scalar, window: (Rat, Rat)) -> Result<TwistData, TwistError> {
        match sign_on_interval(&theta, &window)? {
            SignVerdict::Positive => Ok(TwistData { sign, theta, window }),
            verdict => Err(TwistError::ThetaNotPositive { verdict }),
        }
    }

    /// The positivity type.
    pub fn sign(&self) -> TwistSign {
        self.sign
    }

    /// The curvature scalar.
    pub fn theta(&self) -> &Scalar {
        &self.theta
    }

    /// The window on which `theta` is certified positive.
    pub fn window(&self) -> &(Rat, Rat) {
        &self.window
    }

    /// Coefficient of `L` in the curvature action: `-theta i` for
    /// positive twists, `+theta i` for negative ones.
    pub fn curvature_coefficient(&self) -> Scalar {
        let ti = &self.theta * &Scalar::i();
        match self.sign {
            TwistSign::Positive => -&ti,
            TwistSign::Negative => ti,
        }
    }
}

/// One certified block of the curvature commutator.
#[derive(Debug, Clone)]
pub struct CurvatureBlock {
    /// Form degree of the block.
    pub degree: usize,
    /// Dimension of the block.
    pub dimension: usize,
    /// The scalar by which `[i nabla^2, Lambda_F]` acts.
    pub scalar: Scalar,
}

/// The per-degree curvature commutator report.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    /// Sign of the twist the report was computed for.
    pub sign: TwistSign,
    /// Curvature scalar of the twist.
    pub theta: Scalar,
    /// Certified blocks in degree order.
    pub blocks: Vec<CurvatureBlock>,
}

/// Computes `[i nabla^2, Lambda_F]` degree by degree as an exact matrix
/// composition and certifies each block equals `+/- theta (k - M)` times
/// the identity (sign per the twist).
///
/// # Arguments
///
/// * `metric` - certified metric package carrying `L` and `Lambda`.
/// * `twist` - the twisting line module.
///
/// # Returns
///
/// The blockwise report, or the first non-scalar block.
pub fn curvature_commutator(
    metric: &QuantumMetric,
    twist: &TwistData,
) -> Result<CurvatureReport, TwistError> {
    let m = metric.hodge().complex_dimension();
    let top = 2 * m;
    // i nabla^2 = i (-/+ theta i) L = +/- theta L.
    let factor = &Scalar::i() * &twist.curvature_coefficient();
    let mut blocks = Vec::new();
    for k in 0..=top {
        let dim = metric.gram(k).rows();
        let mut acc = crate::linalg::Matrix::zeros(dim, dim);
        if k >= 2 {
            let raise = metric.hodge().lefschetz(k - 2).scale(&factor);
            acc = acc.add(&raise.mul(metric.dual_lefschetz(k)));
        }
        if k + 2 <= top {
            let raise = metric.hodge().lefschetz(k).scale(&factor);
            acc = acc.sub(&metric.dual_lefschetz(k + 2).mul(&raise));
        }
        let scalar = &factor * &metric.hodge().counting_scalar(k);
        let expect = crate::linalg::Matrix::identity(dim).scale(&scalar);
        if acc != expect {
            return Err(TwistError::NonScalarBlock { degree: k });
        }
        blocks.push(CurvatureBlock { degree: k, dimension: dim, scalar });
    }
    Ok(CurvatureReport { sign: twist.sign(), theta: twist.theta().clone(), blocks })
}

/// The operators covered by the spectral-gap reporter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapOperator {
    /// The twisted anti-holomorphic Laplacian.
    TwistedAntiholomorphicLaplace,
    /// The Laplacian of the full Chern connection.
    ChernLaplace,
    /// The twisted anti-holomorphic Dolbeault-Dirac operator.
    TwistedDiracAntiholomorphic,
}

/// An exact lower bound: either the scalar itself or the square root of a
/// stored radicand.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundExpression {
    /// The bound is this exact scalar.
    Exact(Scalar),
    /// The bound is the square root of this exact scalar.
    SquareRootOf(Scalar),
}

/// A spectral lower bound with its domain of validity.
#[derive(Debug, Clone)]
pub struct GapBound {
    /// The bounded operator.
    pub operator: GapOperator,
    /// The exact bound expression.
    pub bound: BoundExpression,
    /// Human-readable domain annotation.
    pub domain: &'static str,
    /// True when the bound is attained (hence sharp) as soon as the top
    /// anti-holomorphic level carries a holomorphically closed form.
    pub attained_with_antiholomorphic_form: bool,
}

/// Returns the curvature lower bound for one operator family.
///
/// # Arguments
///
/// * `theta` - curvature scalar, certified strictly positive on the
///   working window (1/2, 2) before any bound is issued.
/// * `operator` - which operator family to bound.
///
/// # Returns
///
/// The bound with domain annotation, or a rejection when `theta` cannot
/// be certified positive.
pub fn gap_bounds(theta: &Scalar, operator: GapOperator) -> Result<GapBound, TwistError> {
    let window = working_window();
    match sign_on_interval(theta, &window)? {
        SignVerdict::Positive => {}
        verdict => return Err(TwistError::ThetaNotPositive { verdict }),
    }
    Ok(match operator {
        GapOperator::TwistedAntiholomorphicLaplace => GapBound {
            operator,
            bound: BoundExpression::Exact(theta.clone()),
            domain: "homogeneous forms of degree 1 through M-1, and the anti-holomorphic complex",
            attained_with_antiholomorphic_form: true,
        },
        GapOperator::ChernLaplace => GapBound {
            operator,
            bound: BoundExpression::Exact(&Scalar::from_int(3) * theta),
            domain: "homogeneous forms of degree 1 through M-1",
            attained_with_antiholomorphic_form: false,
        },
        GapOperator::TwistedDiracAntiholomorphic => GapBound {
            operator,
            bound: BoundExpression::SquareRootOf(theta.clone()),
            domain: "the anti-holomorphic complex",
            attained_with_antiholomorphic_form: true,
        },
    })
}

/// Builds the twist of the quantum-sphere line module with index `k`:
/// positive for `k > 0` with `theta = (k)_{q^-2}`, negative for `k < 0`
/// with `theta = (|k|)_{q^-2}`, under the normalization that gives the
/// index-one module curvature `nabla^2 = -i kappa (x) e`.
///
/// # Arguments
///
/// * `k` - twist index.
///
/// # Returns
///
/// The certified twist, or the flat report for `k = 0`.
pub fn podles_curvature(k: i64) -> Result<TwistData, TwistError> {
    if k == 0 {
        return Err(TwistError::FlatTwist);
    }
    let sign = if k > 0 { TwistSign::Positive } else { TwistSign::Negative };
    let theta = quantum_integer(k.abs(), -2)?;
    TwistData::new(sign, theta, working_window())
}

// ---- Flag manifold metadata ----

/// One row of the irreducible quantum flag manifold tables: diagram data,
/// cotangent modules, dimension, and spin data.  Parametric entries are
/// recorded as symbolic strings in the table's own notation (`w_j` for
/// the j-th fundamental weight).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagMetadata {
    /// Registry identifier (kebab-case).
    pub space: String,
    /// Display name of the quantum homogeneous space.
    pub name: String,
    /// Coordinate-algebra symbol.
    pub symbol: String,
    /// Dynkin series of the underlying group.
    pub series: String,
    /// Crossed node(s) of the Dynkin diagram.
    pub crossed_nodes: String,
    /// Semisimple part of the quantized Levi factor.
    pub levi: String,
    /// The anti-holomorphic cotangent space as a Levi module.
    pub antiholomorphic_module: String,
    /// The holomorphic cotangent space as a Levi module.
    pub holomorphic_module: String,
    /// Complex dimension M of the classical manifold.
    pub complex_dimension: String,
    /// When the classical manifold is spin (absent when it is not).
    pub spin_criterion: Option<String>,
    /// Holomorphic square root of the canonical module (absent when not
    /// spin).
    pub spin_square_root: Option<String>,
}

/// Looks up one flag manifold by registry identifier.
///
/// # Arguments
///
/// * `space` - kebab-case identifier, e.g. `grassmannian` or
///   `cayley-plane`.
///
/// # Returns
///
/// The table row, or an unknown-identifier error.
pub fn flag_metadata(space: &str) -> Result<FlagMetadata, TwistError> {
    flag_registry()
        .into_iter()
        .find(|row| row.space == space)
        .ok_or_else(|| TwistError::UnknownSpace { space: space.to_string() })
}

/// All registry identifiers in table order.
pub fn flag_spaces() -> Vec<&'static str> {
    vec![
        "grassmannian",
        "odd-quadric",
        "lagrangian-grassmannian",
        "even-quadric",
        "spinor-variety",
        "cayley-plane",
        "freudenthal-variety",
    ]
}

/// Canonical JSON rendering of a metadata row: pretty-printed with a
/// trailing newline.  Golden-file comparisons and CLI output both go
/// through here.
pub fn metadata_json(meta: &FlagMetadata) -> String {
    let mut text = serde_json::to_string_pretty(meta).expect("metadata serializes");
    text.push('\n');
    text
}

// ---- Private helpers ----

/// The default working window for positivity certification of curvature
/// scalars.
fn working_window() -> (Rat, Rat) {
    (Rat::new(1.into(), 2.into()), Rat::new(2.into(), 1.into()))
}

/// The seven rows of the flag manifold tables.
fn flag_registry() -> Vec<FlagMetadata> {
    let row = |space: &str,
               name: &str,
               symbol: &str,
               series: &str,
               crossed: &str,
               levi: &str,
               anti: &str,
               holo: &str,
               dim: &str,
               spin: Option<&str>,
               root: Option<&str>| FlagMetadata {
        space: space.to_string(),
        name: name.to_string(),
        symbol: symbol.to_string(),
        series: series.to_string(),
        crossed_nodes: crossed.to_string(),
        levi: levi.to_string(),
        antiholomorphic_module: anti.to_string(),
        holomorphic_module: holo.to_string(),
        complex_dimension: dim.to_string(),
        spin_criterion: spin.map(str::to_string),
        spin_square_root: root.map(str::to_string),
    };
    vec![
        row(
            "grassmannian",
            "quantum Grassmannian",
            "O_q(Gr_{k,n+1})",
            "A_n",
            "k",
            "U_q(sl_k + sl_{n-k+1})",
            "V_{w_1} x V_{w_1}",
            "V_{w_{k-1}} x V_{w_{n-k}}",
            "k(n-k+1)",
            Some("spin for all n in 2Z_{>0} + 1"),
            Some("E_{-(n+1)/2}"),
        ),
        row(
            "odd-quadric",
            "odd quantum quadric",
            "O_q(Q_{2n+1})",
            "B_n",
            "1",
            "U_q(so_{2n-1})",
            "V_{w_1}",
            "V_{w_1}",
            "2n-1",
            None,
            None,
        ),
        row(
            "lagrangian-grassmannian",
            "quantum Lagrangian Grassmannian",
            "O_q(L_n)",
            "C_n",
            "n",
            "U_q(sl_n)",
            "V_{2w_1}",
            "V_{2w_{n-1}}",
            "n(n+1)/2",
            Some("spin for all n in 2Z_{>0} + 1"),
            Some("E_{-(n+1)/2}"),
        ),
        row(
            "even-quadric",
            "even quantum quadric",
            "O_q(Q_{2n})",
            "D_n",
            "1",
            "U_q(so_{2(n-1)})",
            "V_{w_1}",
            "V_{w_1}",
            "2(n-1)",
            Some("spin for all n in Z_{>0}"),
            Some("E_{-n+1}"),
        ),
        row(
            "spinor-variety",
            "quantum spinor variety",
            "O_q(S_n)",
            "D_n",
            "n-1, n",
            "U_q(sl_n)",
            "V_{w_2}",
            "V_{w_{n-2}}",
            "n(n-1)/2",
            Some("spin for all n in Z_{>0}"),
            Some("E_{-n+1}"),
        ),
        row(
            "cayley-plane",
            "quantum Caley plane",
            "O_q(OP^2)",
            "E_6",
            "1, 6",
            "U_q(so_{10})",
            "V_{w_6}",
            "V_{w_5}",
            "16",
            Some("spin"),
            Some("E_{-6}"),
        ),
        row(
            "freudenthal-variety",
            "quantum Freudenthal variety",
            "O_q(F)",
            "E_7",
            "7",
            "U_q(e_6)",
            "V_{w_1}",
            "V_{w_6}",
            "27",
            Some("spin"),
            Some("E_{-9}"),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRat;
    use num::One;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    // ==== Podles curvature ====

    #[test]
    fn podles_curvature_is_frozen() {
        // k = -3: negative module, theta = (3)_{q^-2} = 1 + q^-2 + q^-4.
        let t = podles_curvature(-3).expect("certified twist");
        assert_eq!(t.sign(), TwistSign::Negative);
        let want = &(&Scalar::one() + &Scalar::q_pow(-2)) + &Scalar::q_pow(-4);
        assert_eq!(*t.theta(), want);
        // k = 1: positive module with unit curvature.
        let t1 = podles_curvature(1).expect("certified twist");
        assert_eq!(t1.sign(), TwistSign::Positive);
        assert!(t1.theta().is_one());
        // At q = 1 the scalar collapses to the classical Chern number |k|.
        for k in [-4i64, -1, 2, 5] {
            let t = podles_curvature(k).expect("certified twist");
            let v = t.theta().eval(&Rat::one()).expect("no pole at 1");
            assert_eq!(v, GaussRat::from_int(k.abs()));
        }
        assert!(matches!(podles_curvature(0), Err(TwistError::FlatTwist)));
    }

    // ==== Curvature commutator ====

    #[test]
    fn curvature_commutator_is_scalar_blockwise() {
        // Both signs, with the nontrivial Podles scalar theta = (3)_{q^-2},
        // over CP^1 and CP^2.  The scalar must be -/+ theta (k - M).
        for n in 1..=2usize {
            let metric = QuantumMetric::new(n).expect("certified metric");
            for k in [3i64, -3] {
                let twist = podles_curvature(k).expect("certified twist");
                let report = curvature_commutator(&metric, &twist).expect("scalar blocks");
                for block in &report.blocks {
                    let count = Scalar::from_int(block.degree as i64 - n as i64);
                    let want = match twist.sign() {
                        TwistSign::Positive => &count * twist.theta(),
                        TwistSign::Negative => -&(&count * twist.theta()),
                    };
                    assert_eq!(block.scalar, want, "n = {n}, k = {k}, degree {}", block.degree);
                }
            }
        }
    }

    #[test]
    fn curvature_commutator_spot_values() {
        // Negative twist on CP^1 at degree 0: -theta (0 - 1) = +theta.
        let metric = QuantumMetric::new(1).expect("certified metric");
        let neg = podles_curvature(-2).expect("certified twist");
        let report = curvature_commutator(&metric, &neg).expect("scalar blocks");
        assert_eq!(report.blocks[0].scalar, *neg.theta());
        // Any twist at the middle degree k = M: the (k - M) factor kills
        // the block.
        assert!(report.blocks[1].scalar.is_zero());
        // Positive twist on CP^2 at degree 1: +theta (1 - 2) = -theta.
        let metric2 = QuantumMetric::new(2).expect("certified metric");
        let pos = podles_curvature(2).expect("certified twist");
        let report2 = curvature_commutator(&metric2, &pos).expect("scalar blocks");
        assert_eq!(report2.blocks[1].scalar, -&pos.theta().clone());
    }

    // ==== Gap bounds ====

    #[test]
    fn gap_bounds_follow_the_curvature_scalar() {
        let theta = podles_curvature(-3).expect("twist").theta().clone();
        let lap = gap_bounds(&theta, GapOperator::TwistedAntiholomorphicLaplace).expect("bound");
        assert_eq!(lap.bound, BoundExpression::Exact(theta.clone()));
        assert!(lap.attained_with_antiholomorphic_form);
        let chern = gap_bounds(&theta, GapOperator::ChernLaplace).expect("bound");
        assert_eq!(chern.bound, BoundExpression::Exact(&Scalar::from_int(3) * &theta));
        assert!(!chern.attained_with_antiholomorphic_form);
        // Dirac: the radicand is 1 + q^-2 + q^-4 itself.
        let dirac = gap_bounds(&theta, GapOperator::TwistedDiracAntiholomorphic).expect("bound");
        assert_eq!(dirac.bound, BoundExpression::SquareRootOf(theta.clone()));
        assert!(dirac.attained_with_antiholomorphic_form);
        // Unit curvature bounds the Laplacian by exactly 1.
        let unit = gap_bounds(&Scalar::one(), GapOperator::TwistedAntiholomorphicLaplace)
            .expect("bound");
        assert_eq!(unit.bound, BoundExpression::Exact(Scalar::one()));
    }

    #[test]
    fn gap_bounds_scale_with_theta() {
        // Positive homogeneity: scaling theta by c scales the Dirac
        // radicand by c, hence the bound by sqrt(c); the Laplace bounds
        // scale linearly.  Monotonicity follows at any positive pivot.
        let theta = quantum_integer(2, -2).expect("positive index");
        let scaled = &Scalar::from_int(4) * &theta;
        let d1 = gap_bounds(&theta, GapOperator::TwistedDiracAntiholomorphic).expect("bound");
        let d4 = gap_bounds(&scaled, GapOperator::TwistedDiracAntiholomorphic).expect("bound");
        match (&d1.bound, &d4.bound) {
            (BoundExpression::SquareRootOf(a), BoundExpression::SquareRootOf(b)) => {
                assert_eq!(*b, &Scalar::from_int(4) * a);
            }
            _ => panic!("Dirac bounds must be radicals"),
        }
        let q0 = rat(9, 10);
        let small = theta.eval(&q0).expect("no pole");
        let large = scaled.eval(&q0).expect("no pole");
        assert!(large.re() > small.re());
    }

    #[test]
    fn nonpositive_theta_is_rejected() {
        let minus = -&Scalar::one();
        assert!(matches!(
            gap_bounds(&minus, GapOperator::ChernLaplace),
            Err(TwistError::ThetaNotPositive { .. })
        ));
        // q - 1 changes sign at the pivot: rejected with a witness.
        let wobble = &Scalar::q_pow(1) - &Scalar::one();
        assert!(matches!(
            gap_bounds(&wobble, GapOperator::TwistedAntiholomorphicLaplace),
            Err(TwistError::ThetaNotPositive { .. })
        ));
    }

    // ==== Flag metadata ====

    #[test]
    fn registry_matches_the_dimension_column() {
        let dims = [
            ("grassmannian", "k(n-k+1)"),
            ("odd-quadric", "2n-1"),
            ("lagrangian-grassmannian", "n(n+1)/2"),
            ("even-quadric", "2(n-1)"),
            ("spinor-variety", "n(n-1)/2"),
            ("cayley-plane", "16"),
            ("freudenthal-variety", "27"),
        ];
        for (space, dim) in dims {
            let row = flag_metadata(space).expect("known space");
            assert_eq!(row.complex_dimension, dim, "{space}");
        }
        assert!(matches!(
            flag_metadata("projective-superspace"),
            Err(TwistError::UnknownSpace { .. })
        ));
    }

    #[test]
    fn spin_rows_match_the_square_root_column() {
        // The odd quadric has no spin row; the spinor variety carries
        // E_{-n+1}; the exceptional spaces have fixed indices.
        assert_eq!(flag_metadata("odd-quadric").unwrap().spin_square_root, None);
        assert_eq!(
            flag_metadata("spinor-variety").unwrap().spin_square_root.as_deref(),
            Some("E_{-n+1}")
        );
        assert_eq!(
            flag_metadata("cayley-plane").unwrap().spin_square_root.as_deref(),
            Some("E_{-6}")
        );
        assert_eq!(
            flag_metadata("freudenthal-variety").unwrap().spin_square_root.as_deref(),
            Some("E_{-9}")
        );
    }

    #[test]
    fn metadata_round_trips_through_json() {
        for space in flag_spaces() {
            let row = flag_metadata(space).expect("known space");
            let text = metadata_json(&row);
            let back: FlagMetadata = serde_json::from_str(&text).expect("parses");
            assert_eq!(back, row, "{space}");
        }
    }

    #[test]
    fn metadata_matches_golden_files_bit_exactly() {
        for space in flag_spaces() {
            let row = flag_metadata(space).expect("known space");
            let path =
                format!("{}/tests/golden/{space}.json", env!("CARGO_MANIFEST_DIR"));
            let golden = std::fs::read_to_string(&path).expect("golden file present");
            assert_eq!(metadata_json(&row), golden, "{space}");
        }
    }
}
