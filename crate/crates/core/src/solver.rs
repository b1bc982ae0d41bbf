//! Codes of dimension two from intersections of nuclear curves.
//!
//! For `P₂ = |ψ_E⟩⟨ψ_E| ⊕ |ψ_F⟩⟨ψ_F|` the Knill–Laflamme conditions reduce to
//! equal expectations of `E₁₁`/`F₁₁` (the common `λ₁₁`) and of `E₁₂`/`F₁₂`
//! (the common `λ₁₂`). For fixed `λ₁₁` the admissible `λ₁₂` are the
//! intersection points `Γ(λ₁₁)` of the two nuclear curves, and `λ₁₁` ranges
//! over the overlap `Ω` of the spectral intervals of `E₁₁` and `F₁₁`.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::channels::{build_ad, derive_blocks, ADParams, BlockOperators, Channel};
use crate::error::{Error, Result};
use crate::io::{complex_to_json, mat4_to_json};
use crate::linalg::{
    build_state, c64, direct_sum, symmetric_eig2, Mat2, Mat4, PhaseGauge, PureState2, RealSym2, C64,
};
use crate::ranges::{
    angles_from_point, bisect, curve_state, generating_state, nearest_on_curve, nuclear_curve,
    CurveKind, NuclearCurve, Shape, HERMITIAN_TOL,
};

/// Distance at which a point is taken to lie on a curve or on another point.
pub const MATCH_TOL: f64 = 1e-9;
/// Projector tolerance of [`verify_kl`].
pub const PROJECTOR_TOL: f64 = 1e-8;
/// Curve parameters tried when one side covers a whole numerical range.
const FULL_RANGE_PROBES: usize = 8;

/// Overlap of the spectral intervals `[ν₁, ν₂]` of `E₁₁` and `[μ₁, μ₂]` of `F₁₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaInterval {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
    pub nu: (f64, f64),
    pub mu: (f64, f64),
}

/// One point of `Γ(λ₁₁)` with the states that generate it on both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPoint {
    pub z: C64,
    pub lambda11: f64,
    pub phi_e: f64,
    pub phi_f: f64,
    pub theta_e: f64,
    pub theta_f: f64,
    /// In the basis of the original blocks.
    pub psi_e: PureState2,
    pub psi_f: PureState2,
}

/// A point of `Γ` whose generating states could not be recovered.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejected {
    pub z: C64,
    pub lambda11: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeSolution {
    /// `λ_ij` extracted from `P₂ T_ij P₂`.
    pub lambda: [[C64; 2]; 2],
    pub psi_e: PureState2,
    pub psi_f: PureState2,
    pub p2: Mat4,
    /// `‖P₂T_ijP₂ − λ_ijP₂‖_F` for `T₁₁, T₁₂, T₂₁, T₂₂`.
    pub residuals: [f64; 4],
}

impl CodeSolution {
    pub fn lambda11(&self) -> f64 {
        self.lambda[0][0].re
    }

    pub fn lambda12(&self) -> C64 {
        self.lambda[0][1]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(SolutionDoc::from(self)).expect("solution serializes")
    }
}

/// Wire form of [`CodeSolution`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionDoc {
    pub lambda11: f64,
    pub lambda12: [f64; 2],
    pub psi_e: [[f64; 2]; 2],
    pub psi_f: [[f64; 2]; 2],
    pub p2: Vec<Vec<[f64; 2]>>,
    pub residuals: [f64; 4],
}

impl From<&CodeSolution> for SolutionDoc {
    fn from(s: &CodeSolution) -> Self {
        let state = |psi: &PureState2| {
            [
                complex_to_json(psi.components[0]),
                complex_to_json(psi.components[1]),
            ]
        };
        SolutionDoc {
            lambda11: s.lambda11(),
            lambda12: complex_to_json(s.lambda12()),
            psi_e: state(&s.psi_e),
            psi_f: state(&s.psi_f),
            p2: mat4_to_json(&s.p2),
            residuals: s.residuals,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub lambda_grid: usize,
    pub phi_samples: usize,
    pub kl_tol: f64,
    pub intersect_tol: f64,
    pub dedup_radius: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda_grid: 1000,
            phi_samples: 512,
            kl_tol: 1e-10,
            intersect_tol: 1e-12,
            dedup_radius: 1e-9,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let counts_ok = self.lambda_grid > 0 && self.phi_samples > 0;
        let tols_ok = [self.kl_tol, self.intersect_tol, self.dedup_radius]
            .iter()
            .all(|t| *t > 0.0 && t.is_finite());
        if counts_ok && tols_ok {
            Ok(())
        } else {
            Err(Error::Domain("solver settings must all be positive".into()))
        }
    }
}

/// One diagonal block pair `(Z, A)` in the real frame of `Z`.
#[derive(Debug, Clone, Copy)]
struct Side {
    a: Mat2,
    z: RealSym2,
    gauge: PhaseGauge,
}

impl Side {
    fn new(a: &Mat2, z: &Mat2) -> Result<Self> {
        let (zr, gauge) = PhaseGauge::real_form(z, HERMITIAN_TOL)?;
        Ok(Self {
            a: gauge.to_real_frame(a),
            z: zr,
            gauge,
        })
    }

    fn curve(&self, lambda: f64) -> NuclearCurve {
        nuclear_curve(&self.a, &self.z, lambda)
    }

    fn is_degenerate(&self) -> bool {
        symmetric_eig2(&self.z).is_degenerate()
    }
}

fn sides(blocks: &BlockOperators) -> Result<(Side, Side)> {
    Ok((
        Side::new(&blocks.e12, &blocks.e11)?,
        Side::new(&blocks.f12, &blocks.f11)?,
    ))
}

pub fn omega(blocks: &BlockOperators) -> Result<OmegaInterval> {
    let (e, f) = sides(blocks)?;
    let nu = symmetric_eig2(&e.z).eigenvalues();
    let mu = symmetric_eig2(&f.z).eigenvalues();
    let (lo, hi) = (nu.0.max(mu.0), nu.1.min(mu.1));
    Ok(OmegaInterval {
        lo,
        hi,
        empty: lo > hi,
        nu,
        mu,
    })
}

/// Geometry of one side at a fixed `λ₁₁`.
enum Geom<'a> {
    Nothing,
    Point(C64),
    /// Ellipse, circle or segment.
    Curve(&'a NuclearCurve),
    /// All of `W(A)`.
    Full(&'a Mat2),
}

fn is_scalar(a: &Mat2) -> bool {
    let scale = 1.0 + a.norm();
    (a[(0, 0)] - a[(1, 1)]).norm() <= 1e-14 * scale
        && a[(0, 1)].norm() <= 1e-14 * scale
        && a[(1, 0)].norm() <= 1e-14 * scale
}

fn geom(c: &NuclearCurve) -> Geom<'_> {
    match c.kind {
        CurveKind::Empty => Geom::Nothing,
        CurveKind::Point => Geom::Point(c.center),
        CurveKind::FullRange if is_scalar(&c.a) => Geom::Point(c.a[(0, 0)]),
        CurveKind::FullRange => Geom::Full(&c.a),
        _ => Geom::Curve(c),
    }
}

fn cross(u: C64, v: C64) -> f64 {
    u.re * v.im - u.im * v.re
}

fn on_curve(c: &NuclearCurve, z: C64, cfg: &SolverConfig) -> bool {
    nearest_on_curve(c, z, cfg.phi_samples).is_some_and(|(_, d)| d <= MATCH_TOL)
}

fn in_range(a: &Mat2, z: C64) -> bool {
    generating_state(a, z, MATCH_TOL).is_some()
}

/// Roots of `φ ↦ level(c_param(φ))` on a uniform grid, refined by bisection.
fn parametric_on_implicit(
    param: &NuclearCurve,
    implicit: &NuclearCurve,
    cfg: &SolverConfig,
) -> Vec<C64> {
    let n = cfg.phi_samples.max(8);
    let step = TAU / n as f64;
    let point = |phi: f64| {
        let (s, c) = phi.sin_cos();
        param.center + (param.q * c + param.r * s) * param.p_of_lambda
    };
    let f = |phi: f64| implicit.level(point(phi)).unwrap_or(f64::NAN);
    let values: Vec<f64> = (0..=n).map(|k| f(k as f64 * step)).collect();
    let mut out = Vec::new();
    for k in 0..n {
        let (lo, hi) = (k as f64 * step, (k + 1) as f64 * step);
        if values[k] == 0.0 {
            out.push(point(lo));
        } else if values[k + 1] != 0.0 && values[k].signum() != values[k + 1].signum() {
            if let Some(phi) = bisect(f, lo, hi, cfg.intersect_tol) {
                out.push(point(phi));
            }
        }
    }
    out
}

fn segment_ends(c: &NuclearCurve) -> (C64, C64) {
    let dir = if c.q.norm() >= c.r.norm() { c.q } else { c.r };
    let u = dir / dir.norm();
    let proj = |v: C64| v.re * u.re + v.im * u.im;
    let half = c.p_of_lambda * proj(c.q).hypot(proj(c.r));
    (c.center - u * half, c.center + u * half)
}

fn segment_segment(a: &NuclearCurve, b: &NuclearCurve) -> Vec<C64> {
    let (a0, a1) = segment_ends(a);
    let (b0, b1) = segment_ends(b);
    let (da, db) = (a1 - a0, b1 - b0);
    let denom = cross(da, db);
    let scale = da.norm() * db.norm();
    if denom.abs() > 1e-12 * scale {
        let s = cross(b0 - a0, db) / denom;
        let t = cross(b0 - a0, da) / denom;
        let slack = 1e-12;
        if (-slack..=1.0 + slack).contains(&s) && (-slack..=1.0 + slack).contains(&t) {
            return vec![a0 + da * s.clamp(0.0, 1.0)];
        }
        return Vec::new();
    }
    // parallel: intersect only when collinear, keeping the ends of the overlap
    let u = da / da.norm();
    if cross(b0 - a0, u).abs() > MATCH_TOL {
        return Vec::new();
    }
    let proj = |v: C64| (v - a0).re * u.re + (v - a0).im * u.im;
    let (bl, bh) = {
        let (x, y) = (proj(b0), proj(b1));
        (x.min(y), x.max(y))
    };
    let (lo, hi) = (bl.max(0.0), bh.min(da.norm()));
    if lo > hi + MATCH_TOL {
        Vec::new()
    } else if hi - lo <= MATCH_TOL {
        vec![a0 + u * (0.5 * (lo + hi))]
    } else {
        vec![a0 + u * lo, a0 + u * hi]
    }
}

fn eigenvalues2(a: &Mat2) -> [C64; 2] {
    let half = (a[(0, 0)] + a[(1, 1)]) * 0.5;
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let root = (half * half - det).sqrt();
    [half - root, half + root]
}

/// Candidate points of `Γ` for one pair of side geometries.
fn intersect(ge: &Geom, gf: &Geom, cfg: &SolverConfig) -> Vec<C64> {
    use Geom::*;
    match (ge, gf) {
        (Nothing, _) | (_, Nothing) => Vec::new(),
        (Point(x), Point(y)) => {
            if (x - y).norm() <= MATCH_TOL {
                vec![(x + y) * 0.5]
            } else {
                Vec::new()
            }
        }
        (Point(x), Curve(c)) | (Curve(c), Point(x)) => {
            if on_curve(c, *x, cfg) {
                vec![*x]
            } else {
                Vec::new()
            }
        }
        (Point(x), Full(a)) | (Full(a), Point(x)) => {
            if in_range(a, *x) {
                vec![*x]
            } else {
                Vec::new()
            }
        }
        (Curve(c), Full(a)) | (Full(a), Curve(c)) => (0..FULL_RANGE_PROBES)
            .map(|k| {
                let phi = TAU * k as f64 / FULL_RANGE_PROBES as f64;
                let (s, co) = phi.sin_cos();
                c.center + (c.q * co + c.r * s) * c.p_of_lambda
            })
            .filter(|z| in_range(a, *z))
            .collect(),
        (Full(a), Full(b)) => {
            let mut cands = Vec::new();
            for m in [a, b] {
                cands.extend(eigenvalues2(m));
                cands.push((m[(0, 0)] + m[(1, 1)]) * 0.5);
            }
            cands
                .into_iter()
                .filter(|z| in_range(a, *z) && in_range(b, *z))
                .collect()
        }
        (Curve(ce), Curve(cf)) => match (ce.kind, cf.kind) {
            (CurveKind::Segment, CurveKind::Segment) => segment_segment(ce, cf),
            (CurveKind::Segment, _) => parametric_on_implicit(ce, cf, cfg),
            _ => parametric_on_implicit(cf, ce, cfg)
                .into_iter()
                .chain(if cf.kind == CurveKind::Segment {
                    Vec::new()
                } else {
                    parametric_on_implicit(ce, cf, cfg)
                })
                .collect(),
        },
    }
}

/// Generating state on one side of a point of `Γ`, with its `(θ, φ)`.
fn side_state(side: &Side, c: &NuclearCurve, z: C64) -> Result<(f64, f64, PureState2)> {
    let (theta, phi, psi) = match c.kind {
        CurveKind::Empty => return Err(Error::InvalidKind(c.kind)),
        CurveKind::FullRange => {
            let psi = generating_state(&c.a, z, MATCH_TOL).ok_or_else(|| {
                Error::Domain(format!(
                    "no state reaches ({}, {}) in the full range",
                    z.re, z.im
                ))
            })?;
            let [c0, c1] = [psi.components[0], psi.components[1]];
            let theta = 2.0 * c0.norm().clamp(0.0, 1.0).acos();
            let phi = if c1.norm() == 0.0 {
                0.0
            } else {
                (c1.arg() - c0.arg()).rem_euclid(TAU)
            };
            (theta, phi, psi)
        }
        _ => {
            let (theta, phi) = angles_from_point(c, z)?;
            (theta, phi, curve_state(c, phi)?)
        }
    };
    Ok((theta, phi, side.gauge.to_original(&psi)))
}

fn dedup_points(points: Vec<C64>, radius: f64) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    for z in points {
        if out.iter().all(|y| (y - z).norm() > radius) {
            out.push(z);
        }
    }
    out
}

fn gamma_sides(
    e: &Side,
    f: &Side,
    lambda11: f64,
    cfg: &SolverConfig,
) -> (Vec<GammaPoint>, Vec<Rejected>) {
    let (ce, cf) = (e.curve(lambda11), f.curve(lambda11));
    let raw = intersect(&geom(&ce), &geom(&cf), cfg);
    let mut out = Vec::new();
    let mut rejected = Vec::new();
    for z in dedup_points(raw, cfg.dedup_radius) {
        let states = side_state(e, &ce, z).and_then(|se| Ok((se, side_state(f, &cf, z)?)));
        let ((theta_e, phi_e, psi_e), (theta_f, phi_f, psi_f)) = match states {
            Ok(pair) => pair,
            Err(err) => {
                rejected.push(Rejected {
                    z,
                    lambda11,
                    reason: err.to_string(),
                });
                continue;
            }
        };
        out.push(GammaPoint {
            z,
            lambda11,
            phi_e,
            phi_f,
            theta_e,
            theta_f,
            psi_e,
            psi_f,
        });
    }
    out.sort_by(|x, y| x.z.re.total_cmp(&y.z.re).then(x.z.im.total_cmp(&y.z.im)));
    (out, rejected)
}

/// Intersection points of the two nuclear curves at `λ₁₁`.
pub fn gamma(
    blocks: &BlockOperators,
    lambda11: f64,
    cfg: &SolverConfig,
) -> Result<Vec<GammaPoint>> {
    Ok(gamma_report(blocks, lambda11, cfg)?.0)
}

/// Like [`gamma`], also returning the intersection points dropped because
/// their angles could not be recovered.
pub fn gamma_report(
    blocks: &BlockOperators,
    lambda11: f64,
    cfg: &SolverConfig,
) -> Result<(Vec<GammaPoint>, Vec<Rejected>)> {
    let (e, f) = sides(blocks)?;
    Ok(gamma_sides(&e, &f, lambda11, cfg))
}

/// `Tr(P₂T_ijP₂)/2` and `‖P₂T_ijP₂ − λ_ijP₂‖_F` for all four `T_ij`.
pub fn verify_kl(p2: &Mat4, blocks: &BlockOperators) -> Result<([[C64; 2]; 2], [f64; 4])> {
    let hermitian = (p2 - p2.adjoint()).norm();
    let idempotent = (p2 * p2 - p2).norm();
    let trace = p2.trace();
    if !(hermitian <= PROJECTOR_TOL
        && idempotent <= PROJECTOR_TOL
        && (trace - c64(2.0, 0.0)).norm() <= PROJECTOR_TOL)
    {
        return Err(Error::NotAProjector(format!(
            "|P - P'| = {hermitian:.3e}, |P^2 - P| = {idempotent:.3e}, tr P = {:.6}",
            trace.re
        )));
    }
    let mut lambda = [[c64(0.0, 0.0); 2]; 2];
    let mut residuals = [0.0; 4];
    for (k, t) in blocks.all().into_iter().enumerate() {
        let compressed = p2 * t * p2;
        let l = compressed.trace() * 0.5;
        lambda[k / 2][k % 2] = l;
        residuals[k] = (compressed - p2 * l).norm();
    }
    Ok((lambda, residuals))
}

fn solution_from_states(
    psi_e: PureState2,
    psi_f: PureState2,
    blocks: &BlockOperators,
) -> Result<CodeSolution> {
    let p2 = direct_sum(&psi_e.projector(), &psi_f.projector());
    let (lambda, residuals) = verify_kl(&p2, blocks)?;
    Ok(CodeSolution {
        lambda,
        psi_e,
        psi_f,
        p2,
        residuals,
    })
}

fn lambda_grid(om: &OmegaInterval, n: usize) -> Vec<f64> {
    if n <= 1 || om.hi <= om.lo {
        return vec![om.lo];
    }
    let width = om.hi - om.lo;
    let mut grid: Vec<f64> = (0..n)
        .map(|k| om.lo + width * (k as f64 / (n - 1) as f64))
        .collect();
    grid[n - 1] = om.hi;
    grid
}

/// Extra `λ₁₁` values where a point-shaped side meets the other side.
///
/// A side whose `q` and `r` vanish traces a straight line in `λ₁₁`, so its
/// meetings with the other curve happen at isolated `λ₁₁` that a uniform
/// grid would miss.
fn refined_lambdas(e: &Side, f: &Side, grid: &[f64], om: &OmegaInterval) -> Vec<f64> {
    if grid.len() < 2 || e.is_degenerate() || f.is_degenerate() {
        return Vec::new();
    }
    let mid = 0.5 * (om.lo + om.hi);
    let (se, sf) = (e.curve(mid).shape(), f.curve(mid).shape());
    let (point_side, other) = match (se, sf) {
        (Shape::Pointlike, Shape::Pointlike) => {
            return point_point_lambda(e, f, om).into_iter().collect();
        }
        (Shape::Pointlike, _) => (e, f),
        (_, Shape::Pointlike) => (f, e),
        _ => return Vec::new(),
    };
    let other_shape = other.curve(mid).shape();
    let g = |lambda: f64| -> f64 {
        let pt = point_side.curve(lambda).center;
        let oc = other.curve(lambda);
        match other_shape {
            Shape::Elliptic => oc.level(pt).unwrap_or(f64::NAN),
            _ => {
                let dir = if oc.q.norm() >= oc.r.norm() {
                    oc.q
                } else {
                    oc.r
                };
                cross(pt - oc.center, dir / dir.norm())
            }
        }
    };
    let values: Vec<f64> = grid.iter().map(|&l| g(l)).collect();
    let mut out = Vec::new();
    for k in 0..grid.len() - 1 {
        let (v0, v1) = (values[k], values[k + 1]);
        if v0 != 0.0 && v1 != 0.0 && v0.is_finite() && v1.is_finite() && v0.signum() != v1.signum()
        {
            let tol = 4.0 * f64::EPSILON * grid[k].abs().max(grid[k + 1].abs()).max(1.0);
            if let Some(l) = bisect(g, grid[k], grid[k + 1], tol) {
                out.push(l);
            }
        }
    }
    out
}

/// Both centers move affinely in `λ`; solve `c_E(λ) = c_F(λ)`.
fn point_point_lambda(e: &Side, f: &Side, om: &OmegaInterval) -> Option<f64> {
    let (ce, cf) = (e.curve(om.lo), f.curve(om.lo));
    let dw = ce.w - cf.w;
    let dc = cf.center - ce.center;
    if dw.norm() == 0.0 {
        return None;
    }
    let t = (dw.conj() * dc).re / dw.norm_sqr();
    let lambda = om.lo + t;
    let ok = (om.lo..=om.hi).contains(&lambda) && (dc - dw * t).norm() <= MATCH_TOL;
    ok.then_some(lambda)
}

fn compare_solutions(x: &CodeSolution, y: &CodeSolution) -> Ordering {
    let (a, b) = (x.lambda12(), y.lambda12());
    x.lambda11()
        .total_cmp(&y.lambda11())
        .then(a.re.total_cmp(&b.re))
        .then(a.im.total_cmp(&b.im))
}

/// Sorts and merges solutions closer than `radius` in `(λ₁₁, λ₁₂)`, keeping
/// the smaller residual.
fn sort_dedup(mut sols: Vec<CodeSolution>, radius: f64) -> Vec<CodeSolution> {
    sols.sort_by(compare_solutions);
    let mut out: Vec<CodeSolution> = Vec::new();
    for s in sols {
        let dup = out.iter().rposition(|kept| {
            (kept.lambda11() - s.lambda11()).abs() <= radius
                && (kept.lambda12() - s.lambda12()).norm() <= radius
        });
        match dup {
            Some(i) if s.max_residual() < out[i].max_residual() => out[i] = s,
            Some(_) => {}
            None => out.push(s),
        }
    }
    out
}

/// Solutions of a scan together with the intersection points it dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solutions: Vec<CodeSolution>,
    pub rejected: Vec<Rejected>,
}

/// Scans `Ω` for codes satisfying the Knill–Laflamme conditions.
pub fn solve_blocks(blocks: &BlockOperators, cfg: &SolverConfig) -> Result<Vec<CodeSolution>> {
    Ok(solve_blocks_report(blocks, cfg)?.solutions)
}

pub fn solve_blocks_report(blocks: &BlockOperators, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let om = omega(blocks)?;
    if om.empty {
        return Err(Error::EmptyOmega {
            lo: om.lo,
            hi: om.hi,
        });
    }
    let (e, f) = sides(blocks)?;
    let mut lambdas = lambda_grid(&om, cfg.lambda_grid);
    lambdas.extend(refined_lambdas(&e, &f, &lambdas, &om));

    let mut sols = Vec::new();
    let mut rejected = Vec::new();
    for lambda in lambdas {
        let (points, dropped) = gamma_sides(&e, &f, lambda, cfg);
        rejected.extend(dropped);
        for g in points {
            let s = solution_from_states(g.psi_e, g.psi_f, blocks)?;
            if s.max_residual() <= cfg.kl_tol {
                sols.push(s);
            }
        }
    }
    Ok(SolveReport {
        solutions: sort_dedup(sols, cfg.dedup_radius),
        rejected,
    })
}

pub fn solve(channel: &Channel, cfg: &SolverConfig) -> Result<Vec<CodeSolution>> {
    Ok(solve_report(channel, cfg)?.solutions)
}

pub fn solve_report(channel: &Channel, cfg: &SolverConfig) -> Result<SolveReport> {
    let blocks = derive_blocks(&channel.kraus()?)?;
    solve_blocks_report(&blocks, cfg)
}

/// `λ₁₁ = 1 − p₂(1−p₁)/(2−p₁−p₂+p₁p₂)`, the nontrivial code of the
/// amplitude damping channel.
pub fn ad_closed_form_lambda11(p: ADParams) -> f64 {
    let (p1, p2) = (p.p1, p.p2);
    1.0 - p2 * (1.0 - p1) / (2.0 - p1 - p2 + p1 * p2)
}

/// Closed-form `(cos θ_E, cos θ_F)` of the amplitude damping code.
pub fn ad_closed_form_cosines(p: ADParams) -> (f64, f64) {
    let (p1, p2) = (p.p1, p.p2);
    let d = 2.0 - p1 - p2 + p1 * p2;
    ((p1 - p2 + p1 * p2) / d, (p1 * p2 - p1 - p2) / d)
}

pub fn ad_closed_form(p: ADParams) -> Result<CodeSolution> {
    let p = ADParams::new(p.p1, p.p2)?;
    if !(p.p1 > 0.0 && p.p1 < 1.0 && p.p2 > 0.0 && p.p2 < 1.0) {
        return Err(Error::Domain(format!(
            "closed form needs 0 < p1, p2 < 1, got ({}, {})",
            p.p1, p.p2
        )));
    }
    let blocks = derive_blocks(&build_ad(p)?)?;
    let (cos_e, cos_f) = ad_closed_form_cosines(p);
    let psi_e = build_state(0.0, cos_e.clamp(-1.0, 1.0).acos(), 0.0);
    let psi_f = build_state(0.0, cos_f.clamp(-1.0, 1.0).acos(), 0.0);
    solution_from_states(psi_e, psi_f, &blocks)
}
