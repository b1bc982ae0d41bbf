//! Fixed-size complex linear algebra for 2×2 and 4×4 matrices.
//!
//! Matrix arithmetic (products, sums, adjoints, traces, Frobenius norms) comes
//! from `nalgebra`; this module adds the pieces the range computations need on
//! top of it: the closed-form spectral decomposition of a real symmetric 2×2
//! matrix, the Bloch-sphere state parametrization, block extraction for 4×4
//! operators and a phase gauge that maps a complex Hermitian 2×2 matrix onto a
//! real symmetric one.

use std::f64::consts::{PI, TAU};

use nalgebra::{Complex, DMatrix, Matrix2, Matrix4, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a 2×2 complex matrix from rows.
pub fn mat2(rows: [[C64; 2]; 2]) -> Mat2 {
    Mat2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
}

/// Builds a 2×2 complex matrix with real entries.
pub fn mat2_real(rows: [[f64; 2]; 2]) -> Mat2 {
    Mat2::new(
        c64(rows[0][0], 0.0),
        c64(rows[0][1], 0.0),
        c64(rows[1][0], 0.0),
        c64(rows[1][1], 0.0),
    )
}

/// Builds a 4×4 complex matrix with real entries.
pub fn mat4_real(rows: [[f64; 4]; 4]) -> Mat4 {
    Mat4::from_fn(|i, j| c64(rows[i][j], 0.0))
}

pub fn is_finite2(m: &Mat2) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_finite4(m: &Mat4) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `a ⊕ b` as a 4×4 block-diagonal matrix.
pub fn direct_sum(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    out.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    out.fixed_view_mut::<2, 2>(2, 2).copy_from(b);
    out
}

pub fn upper_block(m: &Mat4) -> Mat2 {
    m.fixed_view::<2, 2>(0, 0).into_owned()
}

pub fn lower_block(m: &Mat4) -> Mat2 {
    m.fixed_view::<2, 2>(2, 2).into_owned()
}

/// Frobenius norm of the two off-diagonal 2×2 blocks.
pub fn off_block_norm(m: &Mat4) -> f64 {
    let upper_right = m.fixed_view::<2, 2>(0, 2).norm_squared();
    let lower_left = m.fixed_view::<2, 2>(2, 0).norm_squared();
    (upper_right + lower_left).sqrt()
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Real symmetric 2×2 matrix stored as `[[2a, b], [b, 2c]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealSym2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl RealSym2 {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// From the matrix entries `[[m11, m12], [m12, m22]]`.
    pub fn from_entries(m11: f64, m12: f64, m22: f64) -> Self {
        Self {
            a: 0.5 * m11,
            b: m12,
            c: 0.5 * m22,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        [[2.0 * self.a, self.b], [self.b, 2.0 * self.c]]
    }

    pub fn to_mat2(&self) -> Mat2 {
        mat2_real(self.entries())
    }

    /// `½ Tr Z = a + c`.
    pub fn half_trace(&self) -> f64 {
        self.a + self.c
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }

    /// `Z - λI`.
    pub fn shifted(&self, lambda: f64) -> Self {
        Self::new(self.a - 0.5 * lambda, self.b, self.c - 0.5 * lambda)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(s * self.a, s * self.b, s * self.c)
    }
}

/// Diagonal unitary `D = diag(1, phase)` with `|phase| = 1`.
///
/// For a Hermitian `H = [[x, w], [conj(w), y]]` the choice
/// `phase = conj(w) / |w|` makes `D† H D` real symmetric. Conjugating the
/// companion matrix by the same `D` leaves every expectation value unchanged,
/// so nuclear ranges can be computed in the real frame and states mapped back
/// with [`PhaseGauge::to_original`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGauge {
    pub phase: C64,
}

impl PhaseGauge {
    pub fn identity() -> Self {
        Self {
            phase: c64(1.0, 0.0),
        }
    }

    /// Splits a Hermitian matrix into its real symmetric form and the gauge.
    pub fn real_form(h: &Mat2, tol: f64) -> Result<(RealSym2, PhaseGauge)> {
        let deviation = hermitian_deviation(h);
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let w = 0.5 * (h[(0, 1)] + h[(1, 0)].conj());
        let modulus = w.norm();
        let gauge = if modulus == 0.0 {
            PhaseGauge::identity()
        } else {
            PhaseGauge {
                phase: w.conj() / modulus,
            }
        };
        let z = RealSym2::from_entries(h[(0, 0)].re, modulus, h[(1, 1)].re);
        Ok((z, gauge))
    }

    /// `D† m D`.
    pub fn to_real_frame(&self, m: &Mat2) -> Mat2 {
        let p = self.phase;
        mat2([
            [m[(0, 0)], m[(0, 1)] * p],
            [p.conj() * m[(1, 0)], m[(1, 1)]],
        ])
    }

    /// `D ψ`.
    pub fn to_original(&self, psi: &PureState2) -> PureState2 {
        PureState2 {
            components: Vector2::new(psi.components[0], self.phase * psi.components[1]),
        }
    }
}

/// Closed-form spectral data of a real symmetric 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymEig2 {
    /// `ε = sqrt(b² + (a - c)²)`; the eigenvalues are `half_trace ± ε`.
    pub epsilon: f64,
    pub half_trace: f64,
    /// Rotation angle in `[0, π)` with `tan 2α = b / (a - c)`.
    pub rotation_angle: f64,
}

impl SymEig2 {
    pub fn is_degenerate(&self) -> bool {
        self.epsilon == 0.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        (
            self.half_trace - self.epsilon,
            self.half_trace + self.epsilon,
        )
    }

    /// `R(α) = [[cos α, -sin α], [sin α, cos α]]`.
    ///
    /// First column is the eigenvector of `+ε`, second of `-ε`, so
    /// `Rᵀ (Z - ½TrZ·I) R = diag(ε, -ε)`.
    pub fn rotation(&self) -> Matrix2<f64> {
        let (s, c) = self.rotation_angle.sin_cos();
        Matrix2::new(c, -s, s, c)
    }

    /// The symmetric orthogonal diagonalizer `[[cos α, sin α], [sin α, -cos α]]`.
    ///
    /// Same eigenvectors as [`SymEig2::rotation`], second column negated.
    pub fn reflection(&self) -> Matrix2<f64> {
        let (s, c) = self.rotation_angle.sin_cos();
        Matrix2::new(c, s, s, -c)
    }
}

/// Spectral decomposition of `Z = [[2a, b], [b, 2c]]`.
///
/// `2α` is taken as `atan2(b, a - c)` folded into `[0, 2π)`, so `cos 2α` and
/// `sin 2α` carry the signs of `a - c` and `b`. A multiple of the identity
/// gives `ε = 0` and `α = 0`.
pub fn symmetric_eig2(z: &RealSym2) -> SymEig2 {
    let diff = z.a - z.c;
    let epsilon = z.b.hypot(diff);
    let rotation_angle = if epsilon == 0.0 {
        0.0
    } else {
        let mut two_alpha = z.b.atan2(diff).rem_euclid(TAU);
        if two_alpha >= TAU {
            two_alpha = 0.0;
        }
        let alpha = 0.5 * two_alpha;
        if alpha >= PI {
            0.0
        } else {
            alpha
        }
    };
    SymEig2 {
        epsilon,
        half_trace: z.half_trace(),
        rotation_angle,
    }
}

/// Normalized vector in `C²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState2 {
    pub components: Vector2<C64>,
}

impl PureState2 {
    pub fn new(c0: C64, c1: C64) -> Self {
        Self {
            components: Vector2::new(c0, c1),
        }
    }

    /// Normalizes `(c0, c1)`; `None` for the zero vector.
    pub fn normalized(c0: C64, c1: C64) -> Option<Self> {
        let v = Vector2::new(c0, c1);
        let n = v.norm();
        (n > 0.0 && n.is_finite()).then(|| Self {
            components: v / c64(n, 0.0),
        })
    }

    /// `(cos θ/2, e^{iφ} sin θ/2)`.
    pub fn bloch(theta: f64, phi: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        Self::new(c64(c, 0.0), C64::from_polar(s, phi))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.norm_squared()
    }

    /// `⟨ψ|M|ψ⟩`.
    pub fn expectation(&self, m: &Mat2) -> C64 {
        let v = &self.components;
        (v.adjoint() * m * v)[(0, 0)]
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> Mat2 {
        let v = &self.components;
        v * v.adjoint()
    }
}

/// `|ψ⟩ = R(α) (cos θ/2, e^{iφ} sin θ/2)ᵀ`.
///
/// With `α` from [`symmetric_eig2`] this state satisfies
/// `⟨ψ|Z|ψ⟩ = ½TrZ + ε cos θ`.
pub fn build_state(alpha: f64, theta: f64, phi: f64) -> PureState2 {
    let (sa, ca) = alpha.sin_cos();
    let (sh, ch) = (0.5 * theta).sin_cos();
    let e = C64::from_polar(1.0, phi);
    PureState2::new(
        c64(ca * ch, 0.0) - e * (sa * sh),
        c64(sa * ch, 0.0) + e * (ca * sh),
    )
}

/// Spectrum of a 2×2 Hermitian matrix in closed form.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEig2 {
    /// Ascending.
    pub values: [f64; 2],
    /// `vectors[k]` belongs to `values[k]`.
    pub vectors: [PureState2; 2],
}

pub fn hermitian_eig2(h: &Mat2) -> Result<HermitianEig2> {
    let (z, gauge) = PhaseGauge::real_form(h, 1e-10 * (1.0 + h.norm()))?;
    let eig = symmetric_eig2(&z);
    let rot = eig.rotation();
    let top = PureState2::new(c64(rot[(0, 0)], 0.0), c64(rot[(1, 0)], 0.0));
    let bottom = PureState2::new(c64(rot[(0, 1)], 0.0), c64(rot[(1, 1)], 0.0));
    let (lo, hi) = eig.eigenvalues();
    Ok(HermitianEig2 {
        values: [lo, hi],
        vectors: [gauge.to_original(&bottom), gauge.to_original(&top)],
    })
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues_desc(m: &DMatrix<C64>) -> Vec<f64> {
    let herm = (m + m.adjoint()) * c64(0.5, 0.0);
    let mut values: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reconstruct(eig: &SymEig2) -> Matrix2<f64> {
        let u = eig.rotation();
        let d = Matrix2::new(eig.epsilon, 0.0, 0.0, -eig.epsilon);
        u * d * u.transpose() + Matrix2::identity() * eig.half_trace
    }

    fn max_abs(m: &Matrix2<f64>) -> f64 {
        m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    #[test]
    fn adjoint_of_real_nilpotent() {
        let m = mat2_real([[0.0, 2.0], [0.0, 0.0]]);
        assert_eq!(m.adjoint(), mat2_real([[0.0, 0.0], [2.0, 0.0]]));
    }

    #[test]
    fn trace_and_norm_basics() {
        assert_eq!(Mat2::identity().trace(), c64(2.0, 0.0));
        assert_eq!(Mat4::zeros().norm(), 0.0);
    }

    #[test]
    fn eig_of_diagonal() {
        let eig = symmetric_eig2(&RealSym2::new(1.0, 0.0, 0.0));
        assert_eq!(eig.epsilon, 1.0);
        assert_eq!(eig.half_trace, 1.0);
        assert_eq!(eig.rotation_angle, 0.0);
    }

    #[test]
    fn eig_of_swap() {
        let eig = symmetric_eig2(&RealSym2::new(0.0, 1.0, 0.0));
        assert_eq!(eig.epsilon, 1.0);
        assert_eq!(eig.half_trace, 0.0);
        assert!((eig.rotation_angle - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn eig_degenerate_identity_multiple() {
        let eig = symmetric_eig2(&RealSym2::new(0.7, 0.0, 0.7));
        assert!(eig.is_degenerate());
        assert_eq!(eig.rotation_angle, 0.0);
        assert_eq!(eig.eigenvalues(), (1.4, 1.4));
    }

    #[test]
    fn eig_with_a_less_than_c() {
        // diag(0, 2): the +ε eigenvector is e2, so α = π/2.
        let z = RealSym2::new(0.0, 0.0, 1.0);
        let eig = symmetric_eig2(&z);
        assert!((eig.rotation_angle - PI / 2.0).abs() < 1e-15);
        assert!(max_abs(&(reconstruct(&eig) - Matrix2::new(0.0, 0.0, 0.0, 2.0))) < 1e-15);
    }

    #[test]
    fn reflection_diagonalizes_too() {
        let z = RealSym2::new(0.3, -1.1, -0.4);
        let eig = symmetric_eig2(&z);
        let u = eig.reflection();
        let zp =
            Matrix2::new(2.0 * z.a, z.b, z.b, 2.0 * z.c) - Matrix2::identity() * eig.half_trace;
        let d = u * zp * u.transpose();
        assert!(max_abs(&(d - Matrix2::new(eig.epsilon, 0.0, 0.0, -eig.epsilon))) < 1e-14);
    }

    #[test]
    fn poles_of_the_bloch_sphere() {
        let north = build_state(0.0, 0.0, 1.234);
        assert_eq!(north.components[0], c64(1.0, 0.0));
        assert_eq!(north.components[1].norm(), 0.0);
        let south = build_state(0.0, PI, 0.0);
        assert!((south.components[0] - c64(0.0, 0.0)).norm() < 1e-16);
        assert!((south.components[1] - c64(1.0, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn state_reproduces_constraint_value() {
        let z = RealSym2::new(0.4, -0.9, 1.3);
        let eig = symmetric_eig2(&z);
        let zm = z.to_mat2();
        for &(theta, phi) in &[(0.3, 0.1), (1.7, 4.0), (2.9, 6.0)] {
            let psi = build_state(eig.rotation_angle, theta, phi);
            let got = psi.expectation(&zm);
            let want = eig.half_trace + eig.epsilon * f64::cos(theta);
            assert!((got.re - want).abs() < 1e-14 && got.im.abs() < 1e-14);
        }
    }

    #[test]
    fn hermitian_eig2_complex_offdiagonal() {
        let h = mat2([
            [c64(1.0, 0.0), c64(0.5, -0.5)],
            [c64(0.5, 0.5), c64(-1.0, 0.0)],
        ]);
        let eig = hermitian_eig2(&h).unwrap();
        for k in 0..2 {
            let v = eig.vectors[k].components;
            let hv = h * v;
            assert!((hv - v * c64(eig.values[k], 0.0)).norm() < 1e-14);
        }
        let expected = (1.0f64 + 0.5).sqrt();
        assert!((eig.values[1] - expected).abs() < 1e-14);
    }

    #[test]
    fn hermitian_eig2_rejects_non_hermitian() {
        let m = mat2_real([[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(
            hermitian_eig2(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn blocks_round_trip() {
        let a = mat2([
            [c64(1.0, 2.0), c64(3.0, 0.0)],
            [c64(0.0, -1.0), c64(4.0, 4.0)],
        ]);
        let b = Mat2::identity();
        let s = direct_sum(&a, &b);
        assert_eq!(upper_block(&s), a);
        assert_eq!(lower_block(&s), b);
        assert_eq!(off_block_norm(&s), 0.0);
    }

    fn entry() -> impl Strategy<Value = C64> {
        (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(re, im)| c64(re, im))
    }

    fn mat2_strategy() -> impl Strategy<Value = Mat2> {
        proptest::array::uniform4(entry()).prop_map(|e| mat2([[e[0], e[1]], [e[2], e[3]]]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn eig_reconstruction(a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64) {
            let z = RealSym2::new(a, b, c);
            let eig = symmetric_eig2(&z);
            prop_assert!(eig.epsilon >= 0.0);
            prop_assert!((0.0..PI).contains(&eig.rotation_angle));
            let want = Matrix2::new(2.0 * a, b, b, 2.0 * c);
            prop_assert!(max_abs(&(reconstruct(&eig) - want)) <= 1e-12);
        }

        #[test]
        fn state_is_normalized(alpha in 0.0..PI, theta in 0.0..=PI, phi in 0.0..TAU) {
            let psi = build_state(alpha, theta, phi);
            prop_assert!((psi.norm_sqr() - 1.0).abs() <= 1e-14);
        }

        #[test]
        fn adjoint_is_an_involution(m in mat2_strategy()) {
            prop_assert_eq!(m.adjoint().adjoint(), m);
        }

        #[test]
        fn trace_is_cyclic(a in mat2_strategy(), b in mat2_strategy()) {
            prop_assert!(((a * b).trace() - (b * a).trace()).norm() <= 1e-12);
        }

        #[test]
        fn gauge_preserves_expectations(
            m in mat2_strategy(),
            x in -3.0..3.0f64, y in -3.0..3.0f64, wr in -3.0..3.0f64, wi in -3.0..3.0f64,
            theta in 0.0..=PI, phi in 0.0..TAU,
        ) {
            let h = mat2([[c64(x, 0.0), c64(wr, wi)], [c64(wr, -wi), c64(y, 0.0)]]);
            let (z, gauge) = PhaseGauge::real_form(&h, 1e-12).unwrap();
            let psi_real = PureState2::bloch(theta, phi);
            let psi = gauge.to_original(&psi_real);
            let dz = psi.expectation(&h) - psi_real.expectation(&z.to_mat2());
            let da = psi.expectation(&m) - psi_real.expectation(&gauge.to_real_frame(&m));
            prop_assert!(dz.norm() <= 1e-12);
            prop_assert!(da.norm() <= 1e-12);
        }
    }
}
