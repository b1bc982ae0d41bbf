//! Brute-force sampling of `W(A|Z)` straight from its definition.
//!
//! Random pure states are pushed onto `⟨ψ|Z|ψ⟩ = 0` by damped Gauss–Newton
//! steps in Bloch coordinates. Nothing here uses the closed-form curves, so
//! the clouds serve as an independent check on them and work for arbitrary,
//! including non-normal, `Z`.

use std::f64::consts::TAU;

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::linalg::{c64, Mat2, PureState2, RealSym2, C64};
use crate::ranges::{
    generating_state, nearest_on_curve, nuclear_curve, CurveKind, RangeSample, RangeSamples,
};

/// Name of the generator behind every cloud, recorded next to the seed.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha::ChaCha20Rng::seed_from_u64)";
pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 200;
/// φ-grid used by [`cross_check_curve`].
pub const CROSS_CHECK_GRID: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelState {
    pub psi: PureState2,
    /// `⟨ψ|Z|ψ⟩` after refinement.
    pub exp_z: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateCloud {
    pub states: Vec<KernelState>,
    pub constraint_tol: f64,
    pub seed: RngSeed,
    /// Number of states drawn before filtering.
    pub drawn: usize,
}

impl StateCloud {
    pub const CSV_HEADER: &'static str =
        "psi0_re,psi0_im,psi1_re,psi1_im,expZ_re,expZ_im,expA_re,expA_im";

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn to_csv(&self, a: &Mat2) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for s in &self.states {
            let [c0, c1] = [s.psi.components[0], s.psi.components[1]];
            let exp_a = s.psi.expectation(a);
            let cells = [
                c0.re, c0.im, c1.re, c1.im, s.exp_z.re, s.exp_z.im, exp_a.re, exp_a.im,
            ];
            let row: Vec<String> = cells.iter().map(|&x| fmt17(x)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Reproducibility record for a cloud written to disk.
    pub fn metadata(&self, n: usize) -> serde_json::Value {
        serde_json::json!({
            "rng": RNG_ALGORITHM,
            "seed": self.seed.0,
            "requested": n,
            "retained": self.states.len(),
            "constraint_tol": self.constraint_tol,
            "max_iterations": MAX_ITERATIONS,
        })
    }
}

/// `⟨Z⟩` and its partial derivatives at the Bloch point `(θ, φ)`.
fn expectation_and_jacobian(z: &Mat2, theta: f64, phi: f64) -> (C64, C64, C64) {
    let (st, ct) = theta.sin_cos();
    let e = C64::from_polar(1.0, phi);
    let half_sum = (z[(0, 0)] + z[(1, 1)]) * 0.5;
    let half_diff = (z[(0, 0)] - z[(1, 1)]) * 0.5;
    let off = e * z[(0, 1)] + e.conj() * z[(1, 0)];
    let value = half_sum + half_diff * ct + off * (0.5 * st);
    let d_theta = -half_diff * st + off * (0.5 * ct);
    let d_phi = (e * z[(0, 1)] - e.conj() * z[(1, 0)]) * c64(0.0, 0.5 * st);
    (value, d_theta, d_phi)
}

/// Drives `|⟨Z⟩|` down from `(θ, φ)`; returns the final coordinates.
fn refine(z: &Mat2, mut theta: f64, mut phi: f64) -> (f64, f64) {
    let (mut value, mut dt, mut dp) = expectation_and_jacobian(z, theta, phi);
    for _ in 0..MAX_ITERATIONS {
        let cost = value.norm_sqr();
        if cost == 0.0 {
            break;
        }
        let jac = Matrix2::new(dt.re, dp.re, dt.im, dp.im);
        let res = Vector2::new(value.re, value.im);
        let Ok(pinv) = jac.pseudo_inverse(1e-14) else {
            break;
        };
        let step = -(pinv * res);
        if !step.iter().all(|s| s.is_finite()) {
            break;
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (nt, np) = (theta + t * step[0], phi + t * step[1]);
            let (nv, ndt, ndp) = expectation_and_jacobian(z, nt, np);
            if nv.norm_sqr() < cost {
                (theta, phi, value, dt, dp) = (nt, np, nv, ndt, ndp);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (theta, phi)
}

fn canonical_order(x: &KernelState, y: &KernelState) -> std::cmp::Ordering {
    let key = |s: &KernelState| {
        let [c0, c1] = [s.psi.components[0], s.psi.components[1]];
        [c0.re, c0.im, c1.re, c1.im]
    };
    let (kx, ky) = (key(x), key(y));
    kx.iter()
        .zip(ky.iter())
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Uniform random states refined toward `⟨ψ|Z|ψ⟩ = 0`; only those with
/// `|⟨Z⟩| ≤ tol` are kept.
pub fn sample_kernel_states(z: &Mat2, n: usize, tol: f64, seed: RngSeed) -> Result<StateCloud> {
    if n == 0 {
        return Err(Error::Domain("cloud size must be at least 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(
            "constraint tolerance must be positive".into(),
        ));
    }
    let mut rng = seed.rng();
    let mut states = Vec::new();
    for _ in 0..n {
        let cos_theta: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..TAU);
        let global: f64 = rng.random_range(0.0..TAU);
        let (theta, phi) = refine(z, cos_theta.acos(), phi);
        let bloch = PureState2::bloch(theta, phi);
        let g = C64::from_polar(1.0, global);
        let psi = PureState2::new(bloch.components[0] * g, bloch.components[1] * g);
        let exp_z = psi.expectation(z);
        if exp_z.norm() <= tol {
            states.push(KernelState { psi, exp_z });
        }
    }
    states.sort_by(canonical_order);
    Ok(StateCloud {
        states,
        constraint_tol: tol,
        seed,
        drawn: n,
    })
}

/// The `⟨A⟩` values of a cloud. `φ` records the relative phase of the state.
pub fn cloud_range(a: &Mat2, cloud: &StateCloud) -> Result<RangeSamples> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let points = cloud
        .states
        .iter()
        .map(|s| {
            let [c0, c1] = [s.psi.components[0], s.psi.components[1]];
            RangeSample {
                z: s.psi.expectation(a),
                phi: (c1.arg() - c0.arg()).rem_euclid(TAU),
                lambda: None,
            }
        })
        .collect();
    Ok(RangeSamples { points })
}

/// Largest distance from a cloud value of `W(A|Z − λI)` to the closed-form
/// curve.
///
/// Full-range curves are checked by membership in `W(A)` instead.
pub fn cross_check_curve(
    a: &Mat2,
    z: &RealSym2,
    lambda: f64,
    cloud_size: usize,
    seed: RngSeed,
) -> Result<f64> {
    let cloud = sample_kernel_states(&z.shifted(lambda).to_mat2(), cloud_size, DEFAULT_TOL, seed)?;
    let values = cloud_range(a, &cloud)?.values();
    let curve = nuclear_curve(a, z, lambda);
    let distance = |v: C64| -> f64 {
        match curve.kind {
            CurveKind::Empty => f64::INFINITY,
            CurveKind::FullRange => {
                if generating_state(a, v, 1e-6).is_some() {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            _ => nearest_on_curve(&curve, v, CROSS_CHECK_GRID)
                .map(|(_, d)| d)
                .unwrap_or(f64::INFINITY),
        }
    };
    Ok(values.into_iter().map(distance).fold(0.0, f64::max))
}

/// `U = [[1, 1], [1, −1]]/√2`.
pub fn hadamard() -> Mat2 {
    let s = 0.5f64.sqrt();
    crate::linalg::mat2_real([[s, s], [s, -s]])
}

/// Polar angle of a Bloch point, for tests and diagnostics.
pub fn bloch_cos_theta(psi: &PureState2) -> f64 {
    let [c0, c1] = [psi.components[0], psi.components[1]];
    (c0.norm_sqr() - c1.norm_sqr()).clamp(-1.0, 1.0)
}
