//! Block-diagonal two-operator Kraus channels on two qubits.
//!
//! Two concrete families are provided: the simplified two-qubit amplitude
//! damping channel and the ten-parameter general block-diagonal channel. The
//! block operators `T_ij = A_i† A_j` are always formed from matrix products of
//! the stored Kraus operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{mat4_from_json, mat4_to_json, MatrixJson};
use crate::linalg::{
    direct_sum, hermitian_deviation, is_finite4, lower_block, mat4_real, off_block_norm,
    upper_block, Mat2, Mat4,
};

/// Accepted deviation from `A₁†A₁ + A₂†A₂ = I` when building a pair.
pub const TRACE_TOL: f64 = 1e-10;
/// Accepted off-block magnitude in `A_i† A_j`.
pub const BLOCK_TOL: f64 = 1e-12;

/// Two block-diagonal Kraus operators `A₁`, `A₂` on `C⁴ = C² ⊕ C²`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausPair {
    pub a1: Mat4,
    pub a2: Mat4,
}

impl KrausPair {
    /// Validates block structure and trace preservation.
    pub fn new(a1: Mat4, a2: Mat4) -> Result<Self> {
        if !is_finite4(&a1) || !is_finite4(&a2) {
            return Err(Error::Domain("Kraus operators must be finite".into()));
        }
        for (name, m) in [("A1", &a1), ("A2", &a2)] {
            if off_block_norm(m) != 0.0 {
                return Err(Error::Structure(format!(
                    "{name} is not block-diagonal with 2x2 blocks"
                )));
            }
        }
        let pair = Self { a1, a2 };
        let check = check_trace_preserving(&pair, TRACE_TOL);
        if !check.within_tol {
            return Err(Error::Domain(format!(
                "A1'A1 + A2'A2 deviates from the identity by {:.3e}",
                check.kraus_residual
            )));
        }
        Ok(pair)
    }
}

/// Both normalization residuals of a Kraus pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCheck {
    /// `‖A₁†A₁ + A₂†A₂ − I‖_F`, the condition behind `T₂₂ = I − T₁₁`.
    pub kraus_residual: f64,
    /// `‖A₁A₁† + A₂A₂† − I‖_F`.
    pub row_residual: f64,
    /// `kraus_residual <= tol`.
    pub within_tol: bool,
}

pub fn check_trace_preserving(k: &KrausPair, tol: f64) -> TraceCheck {
    let id = Mat4::identity();
    let kraus_residual = (k.a1.adjoint() * k.a1 + k.a2.adjoint() * k.a2 - id).norm();
    let row_residual = (k.a1 * k.a1.adjoint() + k.a2 * k.a2.adjoint() - id).norm();
    TraceCheck {
        kraus_residual,
        row_residual,
        within_tol: kraus_residual <= tol,
    }
}

/// `T_ij = A_i† A_j` and their 2×2 diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperators {
    pub t11: Mat4,
    pub t12: Mat4,
    pub t21: Mat4,
    pub t22: Mat4,
    pub e11: Mat2,
    pub e12: Mat2,
    pub f11: Mat2,
    pub f12: Mat2,
}

impl BlockOperators {
    /// `[T₁₁, T₁₂, T₂₁, T₂₂]`.
    pub fn all(&self) -> [&Mat4; 4] {
        [&self.t11, &self.t12, &self.t21, &self.t22]
    }
}

pub fn derive_blocks(k: &KrausPair) -> Result<BlockOperators> {
    let t11 = k.a1.adjoint() * k.a1;
    let t12 = k.a1.adjoint() * k.a2;
    let t22 = k.a2.adjoint() * k.a2;
    for (name, t) in [("T11", &t11), ("T12", &t12), ("T22", &t22)] {
        let off = off_block_norm(t);
        if off > BLOCK_TOL {
            return Err(Error::Structure(format!(
                "{name} has off-block magnitude {off:.3e}"
            )));
        }
    }
    Ok(BlockOperators {
        e11: upper_block(&t11),
        f11: lower_block(&t11),
        e12: upper_block(&t12),
        f12: lower_block(&t12),
        t21: t12.adjoint(),
        t11,
        t12,
        t22,
    })
}

/// Damping probabilities of the simplified two-qubit amplitude damping channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ADParams {
    pub p1: f64,
    pub p2: f64,
}

impl ADParams {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!("{name} = {p} is outside [0, 1]")));
            }
        }
        Ok(Self { p1, p2 })
    }
}

/// `A₂ = B₁(p₁) ⊗ B₂(p₂)` together with the fixed choice of `A₁`.
pub fn build_ad(params: ADParams) -> Result<KrausPair> {
    let ADParams { p1, p2 } = ADParams::new(params.p1, params.p2)?;
    let damped = p2 * (1.0 - p1);
    let a1 = mat4_real([
        [0.0, (1.0 - p2).sqrt(), 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, (1.0 - damped).sqrt()],
    ]);
    let a2 = mat4_real([
        [0.0, p2.sqrt(), 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, damped.sqrt()],
        [0.0, 0.0, 0.0, 0.0],
    ]);
    KrausPair::new(a1, a2)
}

/// Free parameters `a₁…a₁₀` of the general channel and the dependent entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralParams {
    pub a: [f64; 10],
    /// `b₁…b₆`.
    pub b: [f64; 6],
    pub c1: f64,
    pub c2: f64,
}

impl GeneralParams {
    /// Solves the normalization constraints for `b₁…b₆`.
    ///
    /// The first violated constraint is named in the error.
    pub fn new(a: [f64; 10]) -> Result<Self> {
        for (i, &x) in a.iter().enumerate() {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::Domain(format!("a{} = {x} is outside (0, 1)", i + 1)));
            }
        }
        let [a1, a2, a3, a4, a5, a6, a7, a8, a9, a10] = a;

        let b1_sq = 1.0 - a1 * a1 - a3 * a3 - a9 * a9;
        if b1_sq < 0.0 {
            return Err(Error::Domain(format!(
                "b1 radicand 1 - a1^2 - a3^2 - a9^2 = {b1_sq:.6} is negative"
            )));
        }
        let b4_sq = 1.0 - a5 * a5 - a7 * a7 - a10 * a10;
        if b4_sq < 0.0 {
            return Err(Error::Domain(format!(
                "b4 radicand 1 - a5^2 - a7^2 - a10^2 = {b4_sq:.6} is negative"
            )));
        }
        let c1_sq = (a4 * a4 - 1.0) * a1 * a1 - 2.0 * a1 * a2 * a3 * a4 - a4 * a4
            + (a2 * a2 - 1.0) * (a3 * a3 - 1.0);
        if c1_sq < 0.0 {
            return Err(Error::Domain(format!(
                "c1 radicand = {c1_sq:.6} is negative"
            )));
        }
        let c2_sq = (a8 * a8 - 1.0) * a5 * a5 - 2.0 * a5 * a6 * a7 * a8 - a8 * a8
            + (a6 * a6 - 1.0) * (a7 * a7 - 1.0);
        if c2_sq < 0.0 {
            return Err(Error::Domain(format!(
                "c2 radicand = {c2_sq:.6} is negative"
            )));
        }
        let den_upper = a1 * a1 + a3 * a3 - 1.0;
        if den_upper == 0.0 {
            return Err(Error::Domain("denominator a1^2 + a3^2 - 1 is zero".into()));
        }
        let den_lower = a5 * a5 + a7 * a7 - 1.0;
        if den_lower == 0.0 {
            return Err(Error::Domain("denominator a5^2 + a7^2 - 1 is zero".into()));
        }

        let (b1, b4, c1, c2) = (b1_sq.sqrt(), b4_sq.sqrt(), c1_sq.sqrt(), c2_sq.sqrt());
        let g_upper = a1 * a2 + a3 * a4;
        let g_lower = a5 * a6 + a7 * a8;
        let b2 = (g_upper * b1 - c1 * a9) / den_upper;
        let b3 = (g_upper * a9 + c1 * b1) / den_upper;
        let b5 = (g_lower * b4 - c2 * a10) / den_lower;
        let b6 = (g_lower * a10 + c2 * b4) / den_lower;
        Ok(Self {
            a,
            b: [b1, b2, b3, b4, b5, b6],
            c1,
            c2,
        })
    }
}

pub fn build_general(params: &GeneralParams) -> Result<KrausPair> {
    let [a1, a2, a3, a4, a5, a6, a7, a8, a9, a10] = params.a;
    let [b1, b2, b3, b4, b5, b6] = params.b;
    let k1 = mat4_real([
        [a1, a2, 0.0, 0.0],
        [a3, a4, 0.0, 0.0],
        [0.0, 0.0, a5, a6],
        [0.0, 0.0, a7, a8],
    ]);
    let k2 = mat4_real([
        [b1, b2, 0.0, 0.0],
        [a9, b3, 0.0, 0.0],
        [0.0, 0.0, b4, b5],
        [0.0, 0.0, a10, b6],
    ]);
    KrausPair::new(k1, k2)
}

/// A channel description.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Channel {
    Ad(ADParams),
    General(GeneralParams),
    Raw(KrausPair),
}

impl Channel {
    pub fn kraus(&self) -> Result<KrausPair> {
        match self {
            Channel::Ad(p) => build_ad(*p),
            Channel::General(p) => build_general(p),
            Channel::Raw(k) => Ok(k.clone()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ChannelDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("channel: {e}")))?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ChannelDoc::from(self)).expect("channel serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ChannelDoc::from(self)).expect("channel serializes")
    }
}

/// Wire form of [`Channel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ChannelDoc {
    Ad { p1: f64, p2: f64 },
    General { a: Vec<f64> },
    Raw { a1: MatrixJson, a2: MatrixJson },
}

impl From<&Channel> for ChannelDoc {
    fn from(ch: &Channel) -> Self {
        let to_entries = |m: &Mat4| -> MatrixJson {
            mat4_to_json(m)
                .into_iter()
                .map(|row| row.into_iter().map(crate::io::ComplexEntry::Pair).collect())
                .collect()
        };
        match ch {
            Channel::Ad(p) => ChannelDoc::Ad { p1: p.p1, p2: p.p2 },
            Channel::General(p) => ChannelDoc::General { a: p.a.to_vec() },
            Channel::Raw(k) => ChannelDoc::Raw {
                a1: to_entries(&k.a1),
                a2: to_entries(&k.a2),
            },
        }
    }
}

impl TryFrom<ChannelDoc> for Channel {
    type Error = Error;

    fn try_from(doc: ChannelDoc) -> Result<Self> {
        match doc {
            ChannelDoc::Ad { p1, p2 } => Ok(Channel::Ad(ADParams::new(p1, p2)?)),
            ChannelDoc::General { a } => {
                let a: [f64; 10] = a.try_into().map_err(|v: Vec<f64>| {
                    Error::Parse(format!(
                        "general channel needs 10 parameters, got {}",
                        v.len()
                    ))
                })?;
                Ok(Channel::General(GeneralParams::new(a)?))
            }
            ChannelDoc::Raw { a1, a2 } => Ok(Channel::Raw(KrausPair::new(
                mat4_from_json(&a1)?,
                mat4_from_json(&a2)?,
            )?)),
        }
    }
}

/// Checks the block operator relations that follow from trace preservation.
pub fn block_relation_residuals(blocks: &BlockOperators) -> (f64, f64) {
    let t22_gap = (blocks.t22 - (Mat4::identity() - blocks.t11)).norm();
    let split_gap = (blocks.t11 - direct_sum(&blocks.e11, &blocks.f11)).norm()
        + (blocks.t12 - direct_sum(&blocks.e12, &blocks.f12)).norm();
    (t22_gap, split_gap)
}

/// `max |E_ij − conj(E_ji)|` over `E₁₁` and `F₁₁`.
pub fn diagonal_block_hermiticity(blocks: &BlockOperators) -> f64 {
    hermitian_deviation(&blocks.e11).max(hermitian_deviation(&blocks.f11))
}

#[doc(hidden)]
pub fn identity_channel() -> KrausPair {
    KrausPair {
        a1: Mat4::identity(),
        a2: Mat4::zeros(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, hermitian_eigenvalues_desc, mat2_real};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    const FIG3: [f64; 10] = [0.9, 0.7, 0.2, 0.9, 0.6, 0.7, 0.9, 0.1, 0.6, 0.5];

    fn random_general(rng: &mut ChaCha20Rng) -> GeneralParams {
        loop {
            let a: [f64; 10] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
            if let Ok(p) = GeneralParams::new(a) {
                return p;
            }
        }
    }

    #[test]
    fn ad_without_damping() {
        let k = build_ad(ADParams::new(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(k.a2, Mat4::zeros());
        assert_eq!(k.a1.adjoint() * k.a1, Mat4::identity());
    }

    #[test]
    fn ad_entries() {
        let k = build_ad(ADParams::new(0.5, 0.7).unwrap()).unwrap();
        assert!((k.a2[(0, 1)].re - 0.7f64.sqrt()).abs() < 1e-15);
        assert!((k.a2[(2, 3)].re - 0.35f64.sqrt()).abs() < 1e-15);
        assert!((k.a2[(0, 1)].re - 0.83666).abs() < 1e-5);
        assert!((k.a2[(2, 3)].re - 0.59161).abs() < 1e-5);
        assert!(check_trace_preserving(&k, 1e-12).kraus_residual <= 1e-12);
    }

    #[test]
    fn ad_rejects_out_of_range() {
        assert!(matches!(ADParams::new(1.2, 0.5), Err(Error::Domain(_))));
        assert!(matches!(
            build_ad(ADParams { p1: 0.5, p2: -0.1 }),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn ad_blocks() {
        let k = build_ad(ADParams::new(0.5, 0.7).unwrap()).unwrap();
        let b = derive_blocks(&k).unwrap();
        assert!((b.e11 - mat2_real([[1.0, 0.0], [0.0, 0.3]])).norm() < 1e-15);
        assert!((b.f11 - mat2_real([[1.0, 0.0], [0.0, 0.65]])).norm() < 1e-15);
        assert!((b.e12 - mat2_real([[0.0, 0.0], [0.0, 0.21f64.sqrt()]])).norm() < 1e-15);
        assert!((b.f12 - mat2_real([[0.0, 0.35f64.sqrt()], [0.0, 0.0]])).norm() < 1e-15);
    }

    #[test]
    fn identity_channel_blocks() {
        let b = derive_blocks(&identity_channel()).unwrap();
        assert_eq!(b.t11, Mat4::identity());
        assert_eq!(b.t12, Mat4::zeros());
        assert_eq!(b.t22, Mat4::zeros());
    }

    #[test]
    fn trace_residual_of_doubled_identity() {
        let k = KrausPair {
            a1: Mat4::identity(),
            a2: Mat4::identity(),
        };
        let check = check_trace_preserving(&k, 1e-10);
        assert!((check.kraus_residual - 2.0).abs() < 1e-15);
        assert!(!check.within_tol);
        let id = check_trace_preserving(&identity_channel(), 1e-10);
        assert_eq!(id.kraus_residual, 0.0);
        assert_eq!(id.row_residual, 0.0);
    }

    #[test]
    fn raw_pair_must_be_block_diagonal() {
        let mut a1 = Mat4::identity();
        a1[(0, 3)] = c64(1e-3, 0.0);
        assert!(matches!(
            KrausPair::new(a1, Mat4::zeros()),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn figure_three_vector_is_not_a_channel() {
        let err = GeneralParams::new(FIG3).unwrap_err();
        match err {
            Error::Domain(msg) => assert!(msg.contains("b1 radicand"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn general_names_first_violation() {
        // b1 fine, b4 radicand negative
        let a = [0.3, 0.3, 0.3, 0.3, 0.9, 0.3, 0.5, 0.3, 0.3, 0.3];
        match GeneralParams::new(a) {
            Err(Error::Domain(msg)) => assert!(msg.contains("b4"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(GeneralParams::new([0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 1.0]).is_err());
    }

    #[test]
    fn general_random_is_trace_preserving() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_general(&mut rng);
            let k = build_general(&p).unwrap();
            let check = check_trace_preserving(&k, TRACE_TOL);
            assert!(check.kraus_residual <= 1e-10, "{:?}", p.a);
            let b = derive_blocks(&k).unwrap();
            let (t22_gap, split_gap) = block_relation_residuals(&b);
            assert!(t22_gap <= 1e-12 && split_gap == 0.0);
            assert_eq!(b.t21, b.t12.adjoint());
        }
    }

    #[test]
    fn general_blocks_match_shorthand_entries() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let p = random_general(&mut rng);
        let [a1, a2, a3, a4, a5, a6, a7, a8, a9, a10] = p.a;
        let [b1, b2, b3, b4, b5, b6] = p.b;
        let b = derive_blocks(&build_general(&p).unwrap()).unwrap();
        let e = [
            a1 * a1 + a3 * a3,
            a1 * a2 + a3 * a4,
            a2 * a2 + a4 * a4,
            a1 * b1 + a3 * a9,
            a1 * b2 + a3 * b3,
            a2 * b1 + a4 * a9,
            a2 * b2 + a4 * b3,
        ];
        let f = [
            a5 * a5 + a7 * a7,
            a5 * a6 + a7 * a8,
            a6 * a6 + a8 * a8,
            a5 * b4 + a7 * a10,
            a5 * b5 + a7 * b6,
            a6 * b4 + a8 * a10,
            a6 * b5 + a8 * b6,
        ];
        let close = |m: &Mat2, rows: [[f64; 2]; 2]| (m - mat2_real(rows)).norm() < 1e-14;
        assert!(close(&b.e11, [[e[0], e[1]], [e[1], e[2]]]));
        assert!(close(&b.f11, [[f[0], f[1]], [f[1], f[2]]]));
        // The upper-right entry of A1'A2 pairs column 1 of A1 with column 2 of A2.
        assert!(close(&b.e12, [[e[3], e[4]], [e[5], e[6]]]));
        assert!(close(&b.f12, [[f[3], f[4]], [f[5], f[6]]]));
    }

    #[test]
    fn diagonal_blocks_are_contractions() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = random_general(&mut rng);
            let b = derive_blocks(&build_general(&p).unwrap()).unwrap();
            assert!(diagonal_block_hermiticity(&b) == 0.0);
            for m in [&b.e11, &b.f11] {
                let spectrum =
                    hermitian_eigenvalues_desc(&DMatrix::from_fn(2, 2, |i, j| m[(i, j)]));
                assert!(spectrum
                    .iter()
                    .all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let channels = vec![
            Channel::Ad(ADParams::new(0.5, 0.7).unwrap()),
            Channel::General(random_general(&mut rng)),
            Channel::Raw(build_ad(ADParams::new(0.1, 0.9).unwrap()).unwrap()),
        ];
        for ch in channels {
            let text = ch.to_json();
            assert_eq!(Channel::from_json(&text).unwrap(), ch);
        }
    }

    #[test]
    fn json_parse_errors() {
        assert!(matches!(
            Channel::from_json(r#"{"kind": "general", "a": [0.1, 0.2]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            Channel::from_json(r#"{"kind": "ad", "p1": 2.0, "p2": 0.1}"#),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            Channel::from_json(r#"{"kind": "other"}"#),
            Err(Error::Parse(_))
        ));
        let raw = r#"{"kind": "raw",
            "a1": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],
            "a2": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#;
        assert_eq!(
            Channel::from_json(raw).unwrap(),
            Channel::Raw(identity_channel())
        );
    }
}
