//! Numerical ranges of 2×2 matrices and their nuclear restrictions.
//!
//! For a real symmetric `Z = [[2a, b], [b, 2c]]` and any complex
//! `A = [[d, f], [g, h]]`, the states with `⟨ψ|Z|ψ⟩ = λ` are
//! `ψ = R(α)(cos θ/2, e^{iφ} sin θ/2)` with `cos θ = (λ − ½TrZ)/ε`, and
//! their expectation values of `A` trace the curve
//!
//! ```text
//! z(φ, λ) = z₀ + wλ + p(λ)[q cos φ + r sin φ]
//! w    = [b(f+g) + (a−c)(d−h)] / 2ε²        z₀ = (d+h)/2 − (a+c)w
//! p(λ) = [ε² − (λ−a−c)²]^{1/2} / 2ε²        ≥ 0
//! q    = (a−c)(f+g) − b(d−h)                r  = iε(f−g)
//! ```
//!
//! Signs of `q`, `r` follow the rotation `R(α)` used by
//! [`build_state`](crate::linalg::build_state); with `2α = atan2(b, a−c)` no
//! extra `sgn(a−c)` factor is needed. The state route is canonical and the
//! coefficients above are checked against it in the tests.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Vector3};
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::linalg::{
    build_state, c64, hermitian_deviation, hermitian_eig2, hermitian_eigenvalues_desc,
    symmetric_eig2, Mat2, Mat4, PhaseGauge, PureState2, RealSym2, SymEig2, C64,
};

/// `p(λ)` at or below this is a point.
pub const POINT_TOL: f64 = 1e-12;
/// `|q₂r₁ − q₁r₂|` at or below this is a segment.
pub const SEGMENT_TOL: f64 = 1e-12;
/// Relative tolerance for `|q| = |r|`, `q ⊥ r`.
pub const CIRCLE_RTOL: f64 = 1e-10;
/// Distance accepted by [`angles_from_point`].
pub const ON_CURVE_TOL: f64 = 1e-8;
/// `|cos φ|` may exceed one by this much before a point is rejected.
pub const CLAMP_TOL: f64 = 1e-9;
/// Hermiticity tolerance for rank-k intervals.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CurveKind {
    Ellipse,
    Circle,
    Segment,
    Point,
    Empty,
    FullRange,
}

/// Geometry of `φ ↦ q cos φ + r sin φ`, which does not depend on `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Elliptic,
    Linear,
    Pointlike,
}

/// `W(A | Z − λI)` for a real symmetric `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct NuclearCurve {
    pub a: Mat2,
    pub z: RealSym2,
    pub lambda: f64,
    pub eig: SymEig2,
    pub z0: C64,
    pub w: C64,
    pub q: C64,
    pub r: C64,
    pub p_of_lambda: f64,
    /// `z₀ + wλ`.
    pub center: C64,
    pub cos_theta: f64,
    pub theta: f64,
    pub kind: CurveKind,
}

impl NuclearCurve {
    pub fn shape(&self) -> Shape {
        shape_of(self.q, self.r)
    }

    /// `q₁r₂ − r₁q₂`.
    pub fn determinant(&self) -> f64 {
        self.q.re * self.r.im - self.r.re * self.q.im
    }

    pub fn is_drawable(&self) -> bool {
        !matches!(self.kind, CurveKind::Empty | CurveKind::FullRange)
    }

    /// Signed distance-like level: negative inside, zero on, positive outside.
    ///
    /// Defined for elliptic shapes as `‖M⁻¹(z − center)‖ − p` where the
    /// columns of `M` are `q` and `r`; stays finite as `p → 0`.
    pub fn level(&self, z: C64) -> Option<f64> {
        if self.shape() != Shape::Elliptic || !self.is_drawable() {
            return None;
        }
        let det = self.determinant();
        let v = z - self.center;
        let u0 = (self.r.im * v.re - self.r.re * v.im) / det;
        let u1 = (self.q.re * v.im - self.q.im * v.re) / det;
        Some(u0.hypot(u1) - self.p_of_lambda)
    }

    /// `dz/dφ`.
    fn tangent(&self, phi: f64) -> C64 {
        let (s, c) = phi.sin_cos();
        (self.r * c - self.q * s) * self.p_of_lambda
    }

    fn point_unchecked(&self, phi: f64) -> C64 {
        let (s, c) = phi.sin_cos();
        self.center + (self.q * c + self.r * s) * self.p_of_lambda
    }
}

fn shape_of(q: C64, r: C64) -> Shape {
    if q.norm().max(r.norm()) <= POINT_TOL {
        Shape::Pointlike
    } else if (q.im * r.re - q.re * r.im).abs() <= SEGMENT_TOL {
        Shape::Linear
    } else {
        Shape::Elliptic
    }
}

fn is_circle(q: C64, r: C64) -> bool {
    let scale = q.norm_sqr() + r.norm_sqr();
    let dot = q.re * r.re + q.im * r.im;
    (q.norm_sqr() - r.norm_sqr()).abs() <= CIRCLE_RTOL * scale && dot.abs() <= CIRCLE_RTOL * scale
}

/// Snap window for `λ` at the ends of the spectral interval.
fn endpoint_tol(half_trace: f64, epsilon: f64) -> f64 {
    1e-14 * 1f64.max(half_trace.abs()).max(epsilon)
}

/// The curve `W(A | Z − λI)` with its coefficients and classification.
pub fn nuclear_curve(a: &Mat2, z: &RealSym2, lambda: f64) -> NuclearCurve {
    let eig = symmetric_eig2(z);
    let (d, f, g, h) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let mid = (d + h) * 0.5;
    let m = eig.half_trace;
    let shift = lambda - m;

    if eig.is_degenerate() {
        let kind = if shift.abs() <= endpoint_tol(m, 0.0) {
            CurveKind::FullRange
        } else {
            CurveKind::Empty
        };
        return NuclearCurve {
            a: *a,
            z: *z,
            lambda,
            eig,
            z0: mid,
            w: c64(0.0, 0.0),
            q: c64(0.0, 0.0),
            r: c64(0.0, 0.0),
            p_of_lambda: 0.0,
            center: mid,
            cos_theta: 1.0,
            theta: 0.0,
            kind,
        };
    }

    let eps = eig.epsilon;
    let diff = z.a - z.c;
    let two_eps_sq = 2.0 * eps * eps;
    let w = ((f + g) * z.b + (d - h) * diff) / two_eps_sq;
    let z0 = mid - w * m;
    let q = (f + g) * diff - (d - h) * z.b;
    let r = (f - g) * c64(0.0, eps);

    let tol = endpoint_tol(m, eps);
    let cos_theta = if (shift - eps).abs() <= tol {
        1.0
    } else if (shift + eps).abs() <= tol {
        -1.0
    } else {
        shift / eps
    };
    let center = mid + w * shift;
    if cos_theta.is_nan() || cos_theta.abs() > 1.0 {
        return NuclearCurve {
            a: *a,
            z: *z,
            lambda,
            eig,
            z0,
            w,
            q,
            r,
            p_of_lambda: 0.0,
            center,
            cos_theta: cos_theta.clamp(-1.0, 1.0),
            theta: cos_theta.clamp(-1.0, 1.0).acos(),
            kind: CurveKind::Empty,
        };
    }
    let sin_theta = ((1.0 - cos_theta) * (1.0 + cos_theta)).sqrt();
    let p = sin_theta / (2.0 * eps);

    let kind = if p <= POINT_TOL {
        CurveKind::Point
    } else {
        match shape_of(q, r) {
            Shape::Pointlike => CurveKind::Point,
            Shape::Linear => CurveKind::Segment,
            Shape::Elliptic if is_circle(q, r) => CurveKind::Circle,
            Shape::Elliptic => CurveKind::Ellipse,
        }
    };
    NuclearCurve {
        a: *a,
        z: *z,
        lambda,
        eig,
        z0,
        w,
        q,
        r,
        p_of_lambda: p,
        center,
        cos_theta,
        theta: cos_theta.acos(),
        kind,
    }
}

/// Nuclear curve for a complex Hermitian `Z`, computed in the real frame.
///
/// States of the returned curve live in the real frame; map them back with
/// the returned gauge.
pub fn nuclear_curve_hermitian(
    a: &Mat2,
    z: &Mat2,
    lambda: f64,
) -> Result<(NuclearCurve, PhaseGauge)> {
    let (zr, gauge) = PhaseGauge::real_form(z, HERMITIAN_TOL)?;
    Ok((nuclear_curve(&gauge.to_real_frame(a), &zr, lambda), gauge))
}

/// `z₀ + wλ + p(λ)[q cos φ + r sin φ]`.
pub fn curve_point(c: &NuclearCurve, phi: f64) -> Result<C64> {
    if !c.is_drawable() {
        return Err(Error::InvalidKind(c.kind));
    }
    Ok(c.point_unchecked(phi))
}

/// The state generating `curve_point(c, φ)`.
pub fn curve_state(c: &NuclearCurve, phi: f64) -> Result<PureState2> {
    if !c.is_drawable() {
        return Err(Error::InvalidKind(c.kind));
    }
    Ok(build_state(c.eig.rotation_angle, c.theta, phi))
}

/// `α x² + β y² + γ xy = 1` in coordinates `(z − center) / scale`.
///
/// `q` and `r` are the axes the coefficients come from. Nearly parallel axes
/// make `α`, `β`, `γ` huge and nearly dependent, so `eval` and
/// `discriminant` work from the axes instead of the rounded coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicImplicit {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub center: C64,
    pub scale: f64,
    pub q: C64,
    pub r: C64,
}

impl ConicImplicit {
    /// `γ² − 4αβ`, with the numerator evaluated in double-double.
    pub fn discriminant(&self) -> f64 {
        let (q1, q2, r1, r2) = (self.q.re, self.q.im, self.r.re, self.r.im);
        let sq = |x: f64| TwoFloat::new_mul(x, x);
        let a = sq(q2) + sq(r2);
        let b = sq(q1) + sq(r1);
        let s = TwoFloat::new_mul(q1, q2) + TwoFloat::new_mul(r1, r2);
        let det = TwoFloat::new_mul(r1, q2) - TwoFloat::new_mul(q1, r2);
        let det_sq = det * det;
        f64::from((s * s - a * b) * 4.0 / (det_sq * det_sq))
    }

    /// `α x² + β y² + γ xy − 1`, computed as `|M⁻¹ v|² − 1` with `M = [q r]`.
    pub fn eval(&self, z: C64) -> f64 {
        let v = (z - self.center) / self.scale;
        let (q1, q2, r1, r2) = (self.q.re, self.q.im, self.r.re, self.r.im);
        let det = r1 * q2 - q1 * r2;
        let u = (r2 * v.re - r1 * v.im) / det;
        let w = (q1 * v.im - q2 * v.re) / det;
        u * u + w * w - 1.0
    }
}

pub fn conic_implicit(c: &NuclearCurve) -> Result<ConicImplicit> {
    match c.kind {
        CurveKind::Ellipse | CurveKind::Circle => {}
        CurveKind::Segment | CurveKind::Point => {
            return Err(Error::DegenerateConic(c.determinant().abs()))
        }
        kind => return Err(Error::InvalidKind(kind)),
    }
    let (q1, q2, r1, r2) = (c.q.re, c.q.im, c.r.re, c.r.im);
    let det = r1 * q2 - q1 * r2;
    let det_sq = det * det;
    Ok(ConicImplicit {
        alpha: (q2 * q2 + r2 * r2) / det_sq,
        beta: (q1 * q1 + r1 * r1) / det_sq,
        gamma: -2.0 * (q1 * q2 + r1 * r2) / det_sq,
        center: c.center,
        scale: c.p_of_lambda,
        q: c.q,
        r: c.r,
    })
}

/// Recovers `(θ, φ)` with `curve_point(c, φ) = z̃`.
///
/// `θ` comes from `λ`. For ellipses `cos φ` and `sin φ` solve the 2×2 linear
/// system of the two coordinate equations; for segments `φ` is the first of
/// the two preimages. Points report `φ = 0`.
pub fn angles_from_point(c: &NuclearCurve, ztilde: C64) -> Result<(f64, f64)> {
    let off = |phi: f64| -> Result<(f64, f64)> {
        let distance = (c.point_unchecked(phi) - ztilde).norm();
        if distance <= ON_CURVE_TOL {
            Ok((c.theta, phi))
        } else {
            Err(Error::OffCurve {
                re: ztilde.re,
                im: ztilde.im,
                distance,
            })
        }
    };
    match c.kind {
        CurveKind::Empty | CurveKind::FullRange => Err(Error::InvalidKind(c.kind)),
        CurveKind::Point => off(0.0),
        CurveKind::Ellipse | CurveKind::Circle => {
            let p = c.p_of_lambda;
            let x = (ztilde.re - c.center.re) / p;
            let y = (ztilde.im - c.center.im) / p;
            let (q1, q2, r1, r2) = (c.q.re, c.q.im, c.r.re, c.r.im);
            let det = q1 * r2 - r1 * q2;
            let cos_phi = (x * r2 - y * r1) / det;
            let sin_phi = (q1 * y - q2 * x) / det;
            if cos_phi.abs() > 1.0 + CLAMP_TOL {
                return Err(Error::OffCurve {
                    re: ztilde.re,
                    im: ztilde.im,
                    distance: (cos_phi.hypot(sin_phi) - 1.0).abs() * p * c.q.norm().max(c.r.norm()),
                });
            }
            off(sin_phi.atan2(cos_phi.clamp(-1.0, 1.0)).rem_euclid(TAU))
        }
        CurveKind::Segment => {
            let dir = if c.q.norm() >= c.r.norm() { c.q } else { c.r };
            let u = dir / dir.norm();
            let proj = |v: C64| v.re * u.re + v.im * u.im;
            let (qs, rs) = (proj(c.q), proj(c.r));
            let radius = qs.hypot(rs);
            let ratio = proj(ztilde - c.center) / (c.p_of_lambda * radius);
            if ratio.abs() > 1.0 + CLAMP_TOL {
                return Err(Error::OffCurve {
                    re: ztilde.re,
                    im: ztilde.im,
                    distance: (ratio.abs() - 1.0) * c.p_of_lambda * radius,
                });
            }
            let phi0 = rs.atan2(qs);
            off((phi0 + ratio.clamp(-1.0, 1.0).acos()).rem_euclid(TAU))
        }
    }
}

/// Closest curve parameter to `z` and the distance, refined beyond the grid.
///
/// `None` for empty and full-range curves.
pub fn nearest_on_curve(c: &NuclearCurve, z: C64, grid: usize) -> Option<(f64, f64)> {
    match c.kind {
        CurveKind::Empty | CurveKind::FullRange => return None,
        CurveKind::Point => return Some((0.0, (z - c.center).norm())),
        _ => {}
    }
    let grid = grid.max(8);
    let step = TAU / grid as f64;
    let dist_sq: Vec<f64> = (0..grid)
        .map(|k| (c.point_unchecked(k as f64 * step) - z).norm_sqr())
        .collect();
    let mut minima: Vec<usize> = (0..grid)
        .filter(|&k| {
            let prev = dist_sq[(k + grid - 1) % grid];
            let next = dist_sq[(k + 1) % grid];
            dist_sq[k] <= prev && dist_sq[k] <= next
        })
        .collect();
    minima.sort_by(|&i, &j| dist_sq[i].total_cmp(&dist_sq[j]));
    minima.truncate(2);

    // derivative of ½|z(φ) − z|²
    let slope = |phi: f64| {
        let v = c.point_unchecked(phi) - z;
        let t = c.tangent(phi);
        v.re * t.re + v.im * t.im
    };
    let mut best = (0.0, f64::INFINITY);
    for k in minima {
        let phi_k = k as f64 * step;
        let mut candidates = vec![(phi_k, dist_sq[k].sqrt())];
        for (lo, hi) in [(phi_k - step, phi_k), (phi_k, phi_k + step)] {
            if let Some(root) = bisect(slope, lo, hi, 1e-15) {
                candidates.push((root, (c.point_unchecked(root) - z).norm()));
            }
        }
        for (phi, d) in candidates {
            if d < best.1 {
                best = (phi.rem_euclid(TAU), d);
            }
        }
    }
    Some(best)
}

/// Root of `f` on `[lo, hi]` when the endpoint values differ in sign.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// One sampled point with the parameters that generate it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSample {
    pub z: C64,
    /// Curve parameter, or the support direction for boundary samples.
    pub phi: f64,
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RangeSamples {
    pub points: Vec<RangeSample>,
}

impl RangeSamples {
    pub const CSV_HEADER: &'static str = "re,im,phi,lambda";

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<C64> {
        self.points.iter().map(|s| s.z).collect()
    }

    pub fn extend(&mut self, other: RangeSamples) {
        self.points.extend(other.points);
    }

    /// CSV rows without the header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for s in &self.points {
            let lambda = s.lambda.map(fmt17).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt17(s.z.re),
                fmt17(s.z.im),
                fmt17(s.phi),
                lambda
            ));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}", Self::CSV_HEADER, self.csv_rows())
    }
}

/// `max Re(e^{−iθ} z)` over `z ∈ W(A)`.
pub fn support_function(a: &Mat2, theta: f64) -> f64 {
    let rot = a * C64::from_polar(1.0, -theta);
    let herm = (rot + rot.adjoint()) * c64(0.5, 0.0);
    hermitian_eig2(&herm)
        .expect("Hermitian part is Hermitian")
        .values[1]
}

/// Boundary points of `W(A)` in `n` support directions `θ_k = 2πk/n`.
pub fn numerical_range_boundary(a: &Mat2, n: usize) -> RangeSamples {
    let n = n.max(3);
    let points = (0..n)
        .map(|k| {
            let theta = TAU * k as f64 / n as f64;
            let rot = a * C64::from_polar(1.0, -theta);
            let herm = (rot + rot.adjoint()) * c64(0.5, 0.0);
            let top = hermitian_eig2(&herm)
                .expect("Hermitian part is Hermitian")
                .vectors[1];
            RangeSample {
                z: top.expectation(a),
                phi: theta,
                lambda: None,
            }
        })
        .collect();
    RangeSamples { points }
}

/// `n` points of the nuclear curve at `φ_k = 2πk/n`, evaluated through the
/// generating states. Full-range curves yield the boundary of `W(A)`.
pub fn sample_curve(c: &NuclearCurve, n: usize) -> RangeSamples {
    match c.kind {
        CurveKind::Empty => RangeSamples::default(),
        CurveKind::FullRange => {
            let mut s = numerical_range_boundary(&c.a, n);
            for p in &mut s.points {
                p.lambda = Some(c.lambda);
            }
            s
        }
        _ => {
            let points = (0..n)
                .map(|k| {
                    let phi = TAU * k as f64 / n as f64;
                    let psi = build_state(c.eig.rotation_angle, c.theta, phi);
                    RangeSample {
                        z: psi.expectation(&c.a),
                        phi,
                        lambda: Some(c.lambda),
                    }
                })
                .collect();
            RangeSamples { points }
        }
    }
}

/// Square matrices accepted by [`hermitian_rank_k_interval`].
pub trait HermitianInput {
    fn dim(&self) -> usize;
    fn hermitian_deviation(&self) -> f64;
    fn spectrum_desc(&self) -> Vec<f64>;
}

impl HermitianInput for Mat2 {
    fn dim(&self) -> usize {
        2
    }
    fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(self)
    }
    fn spectrum_desc(&self) -> Vec<f64> {
        let herm = (self + self.adjoint()) * c64(0.5, 0.0);
        let v = hermitian_eig2(&herm).expect("symmetrized").values;
        vec![v[1], v[0]]
    }
}

impl HermitianInput for Mat4 {
    fn dim(&self) -> usize {
        4
    }
    fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(self)
    }
    fn spectrum_desc(&self) -> Vec<f64> {
        hermitian_eigenvalues_desc(&DMatrix::from_fn(4, 4, |i, j| self[(i, j)]))
    }
}

/// `[λ_{n−k+1}, λ_k]` for eigenvalues `λ₁ ≥ … ≥ λ_n`; `None` when inverted.
pub fn hermitian_rank_k_interval<M: HermitianInput>(a: &M, k: usize) -> Result<Option<(f64, f64)>> {
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.dim();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("rank k = {k} must lie in 1..={n}")));
    }
    let spectrum = a.spectrum_desc();
    let (lo, hi) = (spectrum[n - k], spectrum[k - 1]);
    Ok((lo <= hi).then_some((lo, hi)))
}

/// A unit vector with `⟨ψ|A|ψ⟩ = z`, if `z ∈ W(A)` within `tol`.
///
/// Writes the expectation as `½TrA + t·n` over Bloch vectors `n` and
/// intersects the solution set of the two real linear equations with the
/// unit sphere.
pub fn generating_state(a: &Mat2, z: C64, tol: f64) -> Option<PureState2> {
    let t0 = (a[(0, 0)] + a[(1, 1)]) * 0.5;
    let tx = (a[(0, 1)] + a[(1, 0)]) * 0.5;
    let ty = (a[(0, 1)] - a[(1, 0)]) * c64(0.0, 0.5);
    let tz = (a[(0, 0)] - a[(1, 1)]) * 0.5;
    let u = Vector3::new(tx.re, ty.re, tz.re);
    let v = Vector3::new(tx.im, ty.im, tz.im);
    let target = z - t0;
    let scale = 1.0 + u.norm() + v.norm();

    let bloch = |n: Vector3<f64>| -> PureState2 {
        let nz = n.z.clamp(-1.0, 1.0);
        PureState2::bloch(nz.acos(), n.y.atan2(n.x))
    };
    let cross = u.cross(&v);
    let gram = [[u.dot(&u), u.dot(&v)], [u.dot(&v), v.dot(&v)]];
    let gram_det = gram[0][0] * gram[1][1] - gram[0][1] * gram[0][1];

    let (n0, free) = if cross.norm() > 1e-12 * scale * scale {
        // n0 = s u + t v with u·n0 = X, v·n0 = Y
        let s = (target.re * gram[1][1] - target.im * gram[0][1]) / gram_det;
        let t = (target.im * gram[0][0] - target.re * gram[0][1]) / gram_det;
        (u * s + v * t, cross / cross.norm())
    } else {
        let (dir, value, other, other_value) = if u.norm() >= v.norm() {
            (u, target.re, v, target.im)
        } else {
            (v, target.im, u, target.re)
        };
        if dir.norm() <= 1e-14 * scale {
            return (target.norm() <= tol).then(|| PureState2::bloch(0.0, 0.0));
        }
        let n0 = dir * (value / dir.norm_squared());
        if (other.dot(&n0) - other_value).abs() > tol {
            return None;
        }
        let unit = dir / dir.norm();
        let seed = if unit.x.abs() < 0.9 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        let perp = (seed - unit * unit.dot(&seed)).normalize();
        (n0, perp)
    };
    let n0_sq = n0.norm_squared();
    if n0_sq > 1.0 + tol {
        return None;
    }
    let n = n0 + free * (1.0 - n0_sq).max(0.0).sqrt();
    let psi = bloch(n);
    ((psi.expectation(a) - z).norm() <= tol.max(1e-12 * scale)).then_some(psi)
}
