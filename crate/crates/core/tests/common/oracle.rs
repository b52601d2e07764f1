//! Independent reference computations by direct summation over modes.
//! Deliberately slow; only meant for small cutoffs. The including module must
//! have `SpectralField` and `WaveVector` in scope.
#![allow(dead_code)]

use num_complex::Complex64;

use super::{SpectralField, WaveVector};

fn kappa(k: WaveVector, l: f64) -> [f64; 3] {
    let s = std::f64::consts::TAU / l;
    [s * k.0[0] as f64, s * k.0[1] as f64, s * k.0[2] as f64]
}

fn cube(cutoff: usize) -> Vec<WaveVector> {
    let k = cutoff as i64;
    let mut out = Vec::new();
    for a in -k..=k {
        for b in -k..=k {
            for c in -k..=k {
                out.push(WaveVector::new(a, b, c));
            }
        }
    }
    out
}

/// Truncated convolution `(u·∇)v` summed over all pairs `p + q = k`.
pub fn advection(u: &SpectralField, v: &SpectralField) -> SpectralField {
    let l = u.box_l();
    let cut = u.cutoff();
    let comps = v.components();
    let mut out = SpectralField::zeros(cut, comps, l);
    let waves = cube(cut);
    for &p in &waves {
        let up = u.coeff(p).to_vec();
        if up.iter().all(|c| c.norm() == 0.0) {
            continue;
        }
        for &q in &waves {
            let k = WaveVector::new(p.0[0] + q.0[0], p.0[1] + q.0[1], p.0[2] + q.0[2]);
            if k.max_abs() > cut as u64 {
                continue;
            }
            let kq = kappa(q, l);
            // i (u(p)·κ(q))
            let s = (up[0] * kq[0] + up[1] * kq[1] + up[2] * kq[2]) * Complex64::new(0.0, 1.0);
            let vq = v.coeff(q).to_vec();
            let target = out.coeff_mut(k);
            for d in 0..comps {
                target[d] += s * vq[d];
            }
        }
    }
    out
}

/// `b(u, v, w)` from the convolution sum and Parseval.
pub fn trilinear(u: &SpectralField, v: &SpectralField, w: &SpectralField) -> f64 {
    let adv = advection(u, v);
    let mut acc = 0.0;
    for k in cube(u.cutoff()) {
        for (a, b) in adv.coeff(k).iter().zip(w.coeff(k)) {
            acc += (a * b.conj()).re;
        }
    }
    acc * u.box_l().powi(3)
}

/// Projected nonlinearity: convolution, then removal of the `κ`-parallel part
/// and of the mean.
pub fn nonlinear(u: &SpectralField) -> SpectralField {
    let l = u.box_l();
    let mut adv = advection(u, u);
    for k in cube(u.cutoff()) {
        let c = adv.coeff_mut(k);
        if k.is_zero() {
            c.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            continue;
        }
        let kk = kappa(k, l);
        let k2 = kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2];
        let s = (c[0] * kk[0] + c[1] * kk[1] + c[2] * kk[2]) / k2;
        for d in 0..3 {
            c[d] -= s * kk[d];
        }
    }
    adv
}

/// Direct evaluation of `Σ_k c(k) exp(iκ·x)` at one point.
pub fn evaluate(f: &SpectralField, x: [f64; 3]) -> Vec<f64> {
    let l = f.box_l();
    let mut out = vec![Complex64::new(0.0, 0.0); f.components()];
    for k in cube(f.cutoff()) {
        let kk = kappa(k, l);
        let phase = Complex64::from_polar(1.0, kk[0] * x[0] + kk[1] * x[1] + kk[2] * x[2]);
        for (o, c) in out.iter_mut().zip(f.coeff(k)) {
            *o += c * phase;
        }
    }
    out.into_iter().map(|c| c.re).collect()
}
