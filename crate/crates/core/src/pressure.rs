//! Pressure as a post-processed diagnostic, and the face-jump conditions a
//! forcing must meet for the velocity to be classical up to the boundary.
//!
//! Taking the divergence of `∇p = f - u' + Δu - (u·∇)u` and using
//! `div u' = div Δu = 0` leaves the Poisson problem
//! `-|κ|² p̂(k) = iκ·(f̂ - r̂)(k)`, `r = (u·∇)u`, for `k ≠ 0`; the mean is
//! fixed by `∫ p = Q₀`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::galerkin::{advection, apply_a, Dealias, Dynamics};
use crate::spectral::{derivative, divergence, gradient, l2_norm, SpectralField, WaveVector};

#[derive(Clone, Debug, PartialEq)]
pub struct PressureField {
    pub p: SpectralField,
    pub q0: f64,
}

impl PressureField {
    pub fn box_l(&self) -> f64 {
        self.p.box_l()
    }

    /// `∫ p dx`
    pub fn mean_integral(&self) -> f64 {
        self.p.coeff(WaveVector::ZERO)[0].re * self.p.volume()
    }
}

/// Solves the pressure Poisson problem for velocity `u` under forcing `f`.
pub fn recover_pressure(u: &SpectralField, f: &SpectralField, q0: f64) -> Result<PressureField> {
    let r = advection(u, u, Dealias::On)?;
    let src = &f.with_cutoff(u.cutoff()) - &r;
    let l = u.box_l();
    let mut p = SpectralField::zeros(u.cutoff(), 1, l);
    for (k, c) in src.modes() {
        if k.is_zero() {
            continue;
        }
        let kv = k.kappa(l);
        let dot: Complex64 = (0..3).map(|d| c[d] * kv[d]).sum();
        p.coeff_mut(k)[0] = -Complex64::i() * dot / k.kappa_sq(l);
    }
    p.coeff_mut(WaveVector::ZERO)[0] = Complex64::new(q0 / p.volume(), 0.0);
    Ok(PressureField { p, q0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct PressureResiduals {
    /// `‖∇p - (f - u' + Δu - (u·∇)u)‖` with `u'` the Galerkin right-hand side.
    pub momentum: f64,
    /// `‖Δp - div(f - (u·∇)u)‖`
    pub poisson: f64,
    /// `‖f‖ + ν‖Δu‖ + ‖(u·∇)u‖`, the size of the balanced terms.
    pub scale: f64,
    /// `|∫ p - Q₀|`
    pub mean_defect: f64,
}

impl PressureResiduals {
    pub fn passes(&self, tol: f64) -> bool {
        self.momentum <= tol * self.scale
            && self.poisson <= tol * self.scale
            && self.mean_defect <= tol * self.scale.max(1.0)
    }
}

pub fn pressure_residuals(
    p: &PressureField,
    u: &SpectralField,
    f: &SpectralField,
    dynamics: Dynamics,
) -> Result<PressureResiduals> {
    let f = f.with_cutoff(u.cutoff());
    let r = advection(u, u, Dealias::On)?;
    let du = dynamics.rhs(u, &f)?;
    let visc = apply_a(u).scaled(dynamics.viscosity);
    // f - u' + νΔu - r
    let mut balance = &f - &du;
    balance.axpy(-1.0, &visc);
    balance.axpy(-1.0, &r);
    let grad_p = gradient(&p.p);
    let momentum = l2_norm(&(&grad_p - &balance));

    let src = &f - &r;
    let lap_p = -&apply_a(&p.p);
    let poisson = l2_norm(&(&lap_p - &divergence(&src)));
    Ok(PressureResiduals {
        momentum,
        poisson,
        scale: l2_norm(&f) + l2_norm(&visc) + l2_norm(&r),
        mean_defect: (p.mean_integral() - p.q0).abs(),
    })
}

/// Point evaluator of a forcing in physical space, `(x, t) ↦ f(x, t)`.
pub type ForcingEvaluator<'a> = dyn Fn([f64; 3], f64) -> [f64; 3] + Sync + 'a;

/// Real value of a spectral field at one point, by direct summation.
pub fn evaluate(f: &SpectralField, x: [f64; 3]) -> Vec<f64> {
    let l = f.box_l();
    let k = f.cutoff() as i64;
    let side = f.side();
    let phase = |axis: usize| -> Vec<Complex64> {
        (-k..=k)
            .map(|m| Complex64::from_polar(1.0, std::f64::consts::TAU * m as f64 * x[axis] / l))
            .collect()
    };
    let (e1, e2, e3) = (phase(0), phase(1), phase(2));
    let mut out = vec![Complex64::new(0.0, 0.0); f.components()];
    for i in 0..side {
        for j in 0..side {
            let ph = e1[i] * e2[j];
            for m in 0..side {
                let w = WaveVector::new(i as i64 - k, j as i64 - k, m as i64 - k);
                let e = ph * e3[m];
                for (o, c) in out.iter_mut().zip(f.coeff(w)) {
                    *o += c * e;
                }
            }
        }
    }
    out.into_iter().map(|c| c.re).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct JumpCondition {
    /// Human-readable form of the condition, e.g. `f2|x1 + d2u2/dx1^2|x1 (t=0)`.
    pub name: String,
    pub component: usize,
    /// Axes (1-based) across which the jump is taken.
    pub axes: Vec<usize>,
    pub time: f64,
    pub max_jump: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatibilityReport {
    pub face_points: usize,
    pub conditions: Vec<JumpCondition>,
    /// `max(‖f‖_∞, ‖∂²u₀‖_∞)` over the sampled faces.
    pub scale: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Evaluates the face-jump conditions
///
/// * `f_i(·, 0)|_{x_k=0}^{x_k=l} = -∂²u0_i/∂x_k²|_{x_k=0}^{x_k=l}` for `k ≠ i`,
/// * `[f_i(·, t)|_{x_a=0}^{x_a=l}]|_{x_b=0}^{x_b=l} = 0` for every pair `a < b`
///   and every listed `t`,
///
/// on `m × m` face grids (`m` points per free axis).
pub fn check_compatibility(
    f: &ForcingEvaluator<'_>,
    u0: &SpectralField,
    times: &[f64],
    m: usize,
    rel_tol: f64,
) -> CompatibilityReport {
    let l = u0.box_l();
    let node = |i: usize| l * i as f64 / m as f64;
    let mut conditions = Vec::new();
    let mut scale: f64 = 0.0;
    let mut track = |v: &[f64]| {
        for x in v {
            scale = scale.max(x.abs());
        }
    };

    // Second derivatives ∂²u0/∂x_k², one field per k.
    let d2: Vec<SpectralField> = (0..3).map(|k| derivative(&derivative(u0, k), k)).collect();

    for i in 0..3 {
        for k in (0..3).filter(|&k| k != i) {
            let (a, b) = other_axes(k);
            let mut worst: f64 = 0.0;
            for p in 0..m {
                for q in 0..m {
                    let mut lo = [0.0; 3];
                    lo[a] = node(p);
                    lo[b] = node(q);
                    let mut hi = lo;
                    hi[k] = l;
                    let (f_lo, f_hi) = (f(lo, 0.0), f(hi, 0.0));
                    let (u_lo, u_hi) = (evaluate(&d2[k], lo), evaluate(&d2[k], hi));
                    track(&[f_lo[i], f_hi[i], u_lo[i], u_hi[i]]);
                    let jump = (f_hi[i] - f_lo[i]) + (u_hi[i] - u_lo[i]);
                    worst = worst.max(jump.abs());
                }
            }
            conditions.push(JumpCondition {
                name: format!("f{0}|x{1} + d2u{0}/dx{1}^2|x{1} (t=0)", i + 1, k + 1),
                component: i + 1,
                axes: vec![k + 1],
                time: 0.0,
                max_jump: worst,
            });
        }
    }

    for &t in times {
        for i in 0..3 {
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                let free = 3 - a - b;
                let mut worst: f64 = 0.0;
                for p in 0..m {
                    let corner = |ha: bool, hb: bool| {
                        let mut x = [0.0; 3];
                        x[free] = node(p);
                        x[a] = if ha { l } else { 0.0 };
                        x[b] = if hb { l } else { 0.0 };
                        f(x, t)[i]
                    };
                    let v = [
                        corner(true, true),
                        corner(true, false),
                        corner(false, true),
                        corner(false, false),
                    ];
                    track(&v);
                    worst = worst.max((v[0] - v[1] - v[2] + v[3]).abs());
                }
                conditions.push(JumpCondition {
                    name: format!("[f{}|x{}]|x{} (t={t})", i + 1, a + 1, b + 1),
                    component: i + 1,
                    axes: vec![a + 1, b + 1],
                    time: t,
                    max_jump: worst,
                });
            }
        }
    }
    let tolerance = rel_tol * scale;
    let passed = conditions.iter().all(|c| c.max_jump <= tolerance);
    CompatibilityReport {
        face_points: m * m,
        conditions,
        scale,
        tolerance,
        passed,
    }
}

fn other_axes(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}
