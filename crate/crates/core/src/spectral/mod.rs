//! Fourier representation of periodic fields on `[0, l]^3`: transforms,
//! differentiation, Leray projection and the norms used by the estimates.

pub mod fft;
mod field;
mod grid;
pub mod random;
mod wave;

use num_complex::Complex64;

pub use field::SpectralField;
pub use grid::{from_physical, to_physical, PhysicalGrid};
pub use wave::WaveVector;

use crate::error::Result;

/// Default quadrature size: `2(K+1)` rounded up to an FFT-friendly size.
pub fn default_grid(cutoff: usize) -> usize {
    fft::fft_friendly(2 * (cutoff + 1))
}

/// Smallest FFT-friendly grid on which a product of two cutoff-`K` fields,
/// truncated back to `K`, is alias-free (`n ≥ 3K + 1`).
pub fn dealiased_grid(cutoff: usize) -> usize {
    fft::fft_friendly(3 * cutoff + 1).max(default_grid(cutoff))
}

fn dot_kappa(kappa: &[f64; 3], c: &[Complex64]) -> Complex64 {
    c[0] * kappa[0] + c[1] * kappa[1] + c[2] * kappa[2]
}

/// Removes the component of every `k ≠ 0` coefficient parallel to `κ`.
/// The mean (`k = 0`) is left unchanged.
pub fn leray_project(field: &SpectralField) -> SpectralField {
    assert_eq!(field.components(), 3, "Leray projection needs a vector field");
    let l = field.box_l();
    let mut out = field.clone();
    out.for_each_mode_mut(|k, c| {
        if k.is_zero() {
            return;
        }
        let kappa = k.kappa(l);
        let k2 = k.kappa_sq(l);
        let s = dot_kappa(&kappa, c) / k2;
        for (ci, ki) in c.iter_mut().zip(kappa) {
            *ci -= s * ki;
        }
    });
    out
}

/// `∂F/∂x_axis` for `axis ∈ {0, 1, 2}`.
pub fn derivative(field: &SpectralField, axis: usize) -> SpectralField {
    assert!(axis < 3, "axis must be 0, 1 or 2");
    let l = field.box_l();
    let mut out = field.clone();
    out.for_each_mode_mut(|k, c| {
        let ik = Complex64::new(0.0, k.kappa(l)[axis]);
        c.iter_mut().for_each(|v| *v *= ik);
    });
    out
}

/// Gradient of every component; result component `3 * d + axis` holds
/// `∂F_d/∂x_axis`.
pub fn gradient(field: &SpectralField) -> SpectralField {
    let comps = field.components();
    let l = field.box_l();
    let mut out = SpectralField::zeros(field.cutoff(), 3 * comps, l);
    let src: Vec<Vec<Complex64>> = field.modes().map(|(_, c)| c.to_vec()).collect();
    let mut i = 0;
    out.for_each_mode_mut(|k, c| {
        let kappa = k.kappa(l);
        for d in 0..comps {
            for axis in 0..3 {
                c[3 * d + axis] = src[i][d] * Complex64::new(0.0, kappa[axis]);
            }
        }
        i += 1;
    });
    out
}

/// Scalar divergence of a vector field.
pub fn divergence(field: &SpectralField) -> SpectralField {
    assert_eq!(field.components(), 3);
    let l = field.box_l();
    let mut out = SpectralField::zeros(field.cutoff(), 1, l);
    let src: Vec<Complex64> = field
        .modes()
        .map(|(k, c)| dot_kappa(&k.kappa(l), c) * Complex64::new(0.0, 1.0))
        .collect();
    for (o, s) in out.raw_mut().iter_mut().zip(src) {
        *o = s;
    }
    out
}

/// `max_k |κ·c(k)|`, the spectral divergence defect.
pub fn max_divergence(field: &SpectralField) -> f64 {
    let l = field.box_l();
    field
        .modes()
        .map(|(k, c)| dot_kappa(&k.kappa(l), c).norm())
        .fold(0.0, f64::max)
}

/// `(F, G) = ∫ F·G dx`, computed by Parseval.
pub fn l2_inner(f: &SpectralField, g: &SpectralField) -> Result<f64> {
    f.check_compatible(g)?;
    let mut acc = 0.0;
    for (a, b) in f.raw().iter().zip(g.raw()) {
        acc += a.re * b.re + a.im * b.im;
    }
    Ok(acc * f.volume())
}

/// `|F|² = (F, F)`.
pub fn l2_norm_sq(f: &SpectralField) -> f64 {
    f.raw().iter().map(|c| c.norm_sqr()).sum::<f64>() * f.volume()
}

pub fn l2_norm(f: &SpectralField) -> f64 {
    l2_norm_sq(f).sqrt()
}

/// `sqrt(l³ Σ_k (1 + |κ|²)^s |c(k)|²)`; negative `s` gives dual norms.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    sobolev_norm_sq(f, s).sqrt()
}

pub fn sobolev_norm_sq(f: &SpectralField, s: f64) -> f64 {
    let l = f.box_l();
    let mut acc = 0.0;
    for (k, c) in f.modes() {
        let w = if k.is_zero() {
            1.0
        } else {
            (1.0 + k.kappa_sq(l)).powf(s)
        };
        acc += w * c.iter().map(|v| v.norm_sqr()).sum::<f64>();
    }
    acc * f.volume()
}

/// Quadrature `L^p` norm on an `n^3` grid using the pointwise Euclidean
/// magnitude. `p = f64::INFINITY` gives the max over nodes.
pub fn lp_norm(f: &SpectralField, p: f64, n: usize) -> Result<f64> {
    let grid = to_physical(f, n)?;
    Ok(grid_lp_norm(&grid, p))
}

pub fn grid_lp_norm(grid: &PhysicalGrid, p: f64) -> f64 {
    assert!(p >= 1.0, "L^p needs p >= 1");
    let mags = grid.magnitudes();
    if p.is_infinite() {
        return mags.into_iter().fold(0.0, f64::max);
    }
    let sum: f64 = mags.iter().map(|m| m.powf(p)).sum();
    (sum * grid.cell_volume()).powf(1.0 / p)
}

/// Zeroes every mode with `|k_i| > cutoff` while keeping the storage size.
pub fn truncate(f: &SpectralField, cutoff: usize) -> SpectralField {
    f.with_cutoff(cutoff.min(f.cutoff())).with_cutoff(f.cutoff())
}
